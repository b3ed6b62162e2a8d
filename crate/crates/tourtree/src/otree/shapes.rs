//! Canonical small tree shapes: directed and antidirected paths, stars,
//! and the double star.

use super::OrientedTree;
use crate::{Error, Result};

/// The directed path `0→1→…→n−1`.
pub fn directed_path(n: usize) -> Result<OrientedTree> {
    OrientedTree::new(n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect::<Vec<_>>())
}

/// The antidirected path on `0..n`: consecutive edges alternate direction,
/// starting forward — `0→1←2→3←…`.
pub fn antidirected_path(n: usize) -> Result<OrientedTree> {
    let edges: Vec<(usize, usize)> = (0..n.saturating_sub(1))
        .map(|i| if i % 2 == 0 { (i, i + 1) } else { (i + 1, i) })
        .collect();
    OrientedTree::new(n, edges)
}

/// The out-star: center `0` beats every other vertex.
pub fn out_star(n: usize) -> Result<OrientedTree> {
    OrientedTree::new(n, (1..n).map(|v| (0, v)).collect::<Vec<_>>())
}

/// The in-star: every other vertex beats center `0`.
pub fn in_star(n: usize) -> Result<OrientedTree> {
    OrientedTree::new(n, (1..n).map(|v| (v, 0)).collect::<Vec<_>>())
}

/// The double star on `a + b + c` vertices: a directed path on `b`
/// vertices, with `a` in-neighbours added at its initial vertex and `c`
/// out-neighbours added at its terminal vertex. Labels: in-leaves `0..a`,
/// path `a..a+b`, out-leaves `a+b..a+b+c`.
pub fn double_star(a: usize, b: usize, c: usize) -> Result<OrientedTree> {
    if a < 1 || b < 1 || c < 1 {
        return Err(Error::param(format!(
            "double star needs a, b, c >= 1, got {a}, {b}, {c}"
        )));
    }
    let mut edges = Vec::with_capacity(a + b + c - 1);
    for v in 0..a {
        edges.push((v, a));
    }
    for i in 0..b - 1 {
        edges.push((a + i, a + i + 1));
    }
    for v in 0..c {
        edges.push((a + b - 1, a + b + v));
    }
    OrientedTree::new(a + b + c, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_have_the_right_leaf_classes() {
        let p = directed_path(5).unwrap();
        let (ins, outs) = p.leaf_classes();
        assert_eq!((ins, outs), (vec![0], vec![4]));

        // 0→1←2→3←4: both ends point inward, so 0 is an in-leaf and 4 is
        // too (edge 4→3); no out-leaves exist
        let q = antidirected_path(5).unwrap();
        let (ins, outs) = q.leaf_classes();
        assert_eq!(ins, vec![0, 4]);
        assert!(outs.is_empty());
    }

    #[test]
    fn stars_orient_all_edges_one_way() {
        let s = out_star(4).unwrap();
        assert!((1..4).all(|v| s.edge_between(0, v) == Some(true)));
        let t = in_star(4).unwrap();
        assert!((1..4).all(|v| t.edge_between(v, 0) == Some(true)));
    }

    #[test]
    fn double_star_shape() {
        let t = double_star(2, 3, 1).unwrap();
        assert_eq!(t.n(), 6);
        // in-leaves 0,1 point at path start 2; path 2→3→4; out-leaf 5
        assert_eq!(t.edge_between(0, 2), Some(true));
        assert_eq!(t.edge_between(1, 2), Some(true));
        assert_eq!(t.edge_between(2, 3), Some(true));
        assert_eq!(t.edge_between(3, 4), Some(true));
        assert_eq!(t.edge_between(4, 5), Some(true));
        assert!(double_star(0, 1, 1).is_err());
        // b = 1 collapses the path to a single center
        let c = double_star(1, 1, 1).unwrap();
        let (ins, outs) = c.leaf_classes();
        assert_eq!((ins, outs), (vec![0], vec![2]));
    }
}
