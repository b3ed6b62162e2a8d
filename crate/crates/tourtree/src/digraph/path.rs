//! Hamiltonian directed paths. Every tournament has one: insert vertices
//! one at a time into a growing directed path, locating a consistent slot
//! by binary search (if the new vertex neither beats the head nor loses to
//! the tail, some consecutive pair has an arrow in and an arrow out).

use super::Tournament;

/// A directed Hamiltonian path `v_1 → v_2 → ... → v_n`, built by insertion.
pub fn hamiltonian_directed_path(t: &Tournament) -> Vec<usize> {
    let mut path: Vec<usize> = Vec::with_capacity(t.n());
    for v in 0..t.n() {
        if path.is_empty() {
            path.push(v);
            continue;
        }
        if t.has_edge(v, path[0]) {
            path.insert(0, v);
            continue;
        }
        if t.has_edge(*path.last().unwrap(), v) {
            path.push(v);
            continue;
        }
        // path[0] → v and v → path[last]: binary search keeps the invariant
        // path[lo] → v and v → path[hi]
        let (mut lo, mut hi) = (0, path.len() - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if t.has_edge(path[mid], v) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        path.insert(hi, v);
    }
    path
}

/// Check a vertex sequence: a permutation of all vertices with every
/// consecutive edge oriented forward.
pub fn is_directed_hamiltonian_path(t: &Tournament, seq: &[usize]) -> bool {
    if seq.len() != t.n() {
        return false;
    }
    let mut seen = vec![false; t.n()];
    for &v in seq {
        if v >= t.n() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    seq.windows(2).all(|w| t.has_edge(w[0], w[1]))
}

#[cfg(test)]
mod tests {
    use super::super::{random_tournament, transitive, Tournament};
    use super::*;

    #[test]
    fn transitive_gives_rank_order() {
        let t = transitive(5);
        assert_eq!(hamiltonian_directed_path(&t), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn three_cycle_gives_some_rotation() {
        let t = Tournament::from_bit_string(3, "101").unwrap();
        let p = hamiltonian_directed_path(&t);
        assert!(is_directed_hamiltonian_path(&t, &p));
    }

    #[test]
    fn every_six_vertex_tournament_has_a_path() {
        // exhaustive: all 2^15 tournaments on 6 vertices
        for code in 0..(1u64 << 15) {
            let t = Tournament::from_code(6, code);
            let p = hamiltonian_directed_path(&t);
            assert!(
                is_directed_hamiltonian_path(&t, &p),
                "bad path {p:?} for code {code}"
            );
        }
    }

    #[test]
    fn random_large_instances() {
        for seed in 0..10 {
            let t = random_tournament(200, seed);
            let p = hamiltonian_directed_path(&t);
            assert!(is_directed_hamiltonian_path(&t, &p));
        }
    }

    #[test]
    fn checker_rejects_bad_sequences() {
        let t = transitive(4);
        assert!(!is_directed_hamiltonian_path(&t, &[0, 1, 2])); // too short
        assert!(!is_directed_hamiltonian_path(&t, &[0, 1, 1, 2])); // repeat
        assert!(!is_directed_hamiltonian_path(&t, &[3, 2, 1, 0])); // wrong way
    }
}
