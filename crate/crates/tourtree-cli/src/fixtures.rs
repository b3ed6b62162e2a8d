//! Built-in named inputs, so standard examples are one-line commands
//! instead of handwritten files. Tree and tournament arguments accept
//! either a fixture name or a file path; names take precedence, so a file
//! whose name collides with a fixture pattern must be given with a
//! directory prefix (`./paley-7`).

use anyhow::{anyhow, Result};
use tourtree::digraph::{circulant, paley, transitive, Tournament};
use tourtree::otree::{
    antidirected_path, directed_path, double_star, in_star, out_star, OrientedTree,
};

fn parse_counts<const N: usize>(parts: &[&str]) -> Option<[usize; N]> {
    if parts.len() != N {
        return None;
    }
    let mut out = [0usize; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.parse().ok()?;
    }
    Some(out)
}

/// Resolve a tree fixture name. `None` means the name matches no fixture
/// pattern (and should be treated as a file path); `Some(Err)` means it
/// matched a pattern but carries invalid sizes.
pub fn tree_fixture(name: &str) -> Option<Result<OrientedTree>> {
    let parts: Vec<&str> = name.split('-').collect();
    let build = match parts.as_slice() {
        ["path", "directed", rest @ ..] => {
            let [n] = parse_counts(rest)?;
            directed_path(n)
        }
        ["path", "antidirected", rest @ ..] => {
            let [n] = parse_counts(rest)?;
            antidirected_path(n)
        }
        ["out", "star", rest @ ..] => {
            let [n] = parse_counts(rest)?;
            out_star(n)
        }
        ["in", "star", rest @ ..] => {
            let [n] = parse_counts(rest)?;
            in_star(n)
        }
        ["double", "star", rest @ ..] => {
            let [a, b, c] = parse_counts(rest)?;
            double_star(a, b, c)
        }
        _ => return None,
    };
    Some(build.map_err(|e| anyhow!("fixture `{name}`: {e}")))
}

/// Resolve a tournament fixture name; same contract as [`tree_fixture`].
/// `circulant-N` is the rotational tournament with offsets `1..=(N-1)/2`.
pub fn tournament_fixture(name: &str) -> Option<Result<Tournament>> {
    let parts: Vec<&str> = name.split('-').collect();
    let build = match parts.as_slice() {
        ["transitive", rest @ ..] => {
            let [n] = parse_counts(rest)?;
            Ok(transitive(n))
        }
        ["paley", rest @ ..] => {
            let [q] = parse_counts(rest)?;
            paley(q)
        }
        ["circulant", rest @ ..] => {
            let [n] = parse_counts(rest)?;
            if n < 3 || n % 2 == 0 {
                Err(tourtree::Error::param(format!(
                    "circulant fixtures need an odd order of at least 3, got {n}"
                )))
            } else {
                circulant(n, &(1..=n / 2).collect::<Vec<_>>())
            }
        }
        _ => return None,
    };
    Some(build.map_err(|e| anyhow!("fixture `{name}`: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_fixture_names_parse() {
        assert_eq!(tree_fixture("path-directed-5").unwrap().unwrap().n(), 5);
        assert_eq!(tree_fixture("path-antidirected-7").unwrap().unwrap().n(), 7);
        assert_eq!(tree_fixture("out-star-4").unwrap().unwrap().n(), 4);
        assert_eq!(tree_fixture("in-star-4").unwrap().unwrap().n(), 4);
        assert_eq!(tree_fixture("double-star-2-3-2").unwrap().unwrap().n(), 7);
        assert!(tree_fixture("t.json").is_none());
        assert!(tree_fixture("./path-directed-5").is_none());
        assert!(tree_fixture("double-star-0-1-1").unwrap().is_err());
    }

    #[test]
    fn tournament_fixture_names_parse() {
        assert_eq!(tournament_fixture("paley-7").unwrap().unwrap().n(), 7);
        assert_eq!(tournament_fixture("circulant-5").unwrap().unwrap().n(), 5);
        assert_eq!(tournament_fixture("transitive-9").unwrap().unwrap().n(), 9);
        assert!(tournament_fixture("hosts/g.json").is_none());
        assert!(tournament_fixture("paley-8").unwrap().is_err());
        assert!(tournament_fixture("circulant-4").unwrap().is_err());
    }
}
