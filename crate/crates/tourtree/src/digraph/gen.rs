//! Tournament generators: seeded random, transitive, circulant, Paley.

use super::Tournament;
use crate::rng::rng_from_seed;
use crate::{Error, Result};
use rand::Rng;

/// Uniformly random tournament: every pair flips an independent fair coin.
pub fn random_tournament(n: usize, seed: u64) -> Tournament {
    let mut rng = rng_from_seed(seed);
    Tournament::from_orientation(n, |_, _| rng.gen_bool(0.5))
}

/// The transitive tournament: `i→j` whenever `i < j`.
pub fn transitive(n: usize) -> Tournament {
    Tournament::from_orientation(n, |_, _| true)
}

/// Circulant tournament: `i→j` iff `(j − i) mod n` is an offset. Needs `n`
/// odd and, for every residue `r`, exactly one of `r`, `n−r` among the
/// offsets — otherwise some pair would get no edge or both. The offsets
/// `{1, ..., (n−1)/2}` give the rotational regular tournament.
pub fn circulant(n: usize, offsets: &[usize]) -> Result<Tournament> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::param(format!(
            "circulant needs odd n >= 3, got {n}"
        )));
    }
    let mut chosen = vec![false; n];
    for &o in offsets {
        if o == 0 || o >= n {
            return Err(Error::param(format!(
                "offset {o} out of range 1..={}",
                n - 1
            )));
        }
        if chosen[o] {
            return Err(Error::param(format!("duplicate offset {o}")));
        }
        chosen[o] = true;
    }
    for r in 1..n {
        if chosen[r] == chosen[n - r] {
            return Err(Error::param(format!(
                "offsets must contain exactly one of {r}, {} (got {})",
                n - r,
                if chosen[r] { "both" } else { "neither" }
            )));
        }
    }
    Ok(Tournament::from_orientation(n, |i, j| chosen[(j - i) % n]))
}

/// Paley tournament on a prime `q ≡ 3 (mod 4)`: `i→j` iff `j − i` is a
/// nonzero quadratic residue mod `q`. The congruence condition makes −1 a
/// non-residue, so exactly one of `j−i`, `i−j` is a residue per pair.
pub fn paley(q: usize) -> Result<Tournament> {
    if !is_prime(q) || q % 4 != 3 {
        return Err(Error::param(format!(
            "paley needs a prime q with q % 4 == 3, got {q}"
        )));
    }
    let mut is_qr = vec![false; q];
    for x in 1..q {
        is_qr[x * x % q] = true;
    }
    Ok(Tournament::from_orientation(q, |i, j| is_qr[(j - i) % q]))
}

fn is_prime(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitive_outdegrees_descend() {
        let t = transitive(4);
        let degs: Vec<usize> = (0..4).map(|v| t.out_deg(v)).collect();
        assert_eq!(degs, vec![3, 2, 1, 0]);
    }

    #[test]
    fn circulant_one_two_is_regular_on_five() {
        let t = circulant(5, &[1, 2]).unwrap();
        for v in 0..5 {
            assert_eq!(t.out_deg(v), 2);
            assert_eq!(t.in_deg(v), 2);
        }
        t.validate().unwrap();
    }

    #[test]
    fn circulant_rejects_bad_offsets() {
        assert!(circulant(6, &[1, 2]).is_err()); // even n
        assert!(circulant(5, &[1]).is_err()); // residue 2 uncovered
        assert!(circulant(5, &[1, 4]).is_err()); // both of 1, 4 chosen
        assert!(circulant(5, &[1, 2, 3]).is_err());
        assert!(circulant(5, &[0, 1]).is_err());
        assert!(circulant(5, &[2, 4]).is_ok()); // non-standard but valid
    }

    #[test]
    fn paley_seven_matches_residues() {
        let t = paley(7).unwrap();
        // quadratic residues mod 7 are {1, 2, 4}
        for (i, j) in [(0usize, 1usize), (0, 2), (0, 4), (3, 4), (6, 0)] {
            assert!(t.has_edge(i, j), "expected {i}→{j}");
        }
        for v in 0..7 {
            assert_eq!((t.out_deg(v), t.in_deg(v)), (3, 3));
        }
        t.validate().unwrap();
    }

    #[test]
    fn paley_rejects_wrong_modulus() {
        assert!(paley(5).is_err()); // 5 % 4 == 1
        assert!(paley(9).is_err()); // not prime
        assert!(paley(11).is_ok());
    }

    #[test]
    fn random_is_seeded_and_valid() {
        let a = random_tournament(20, 99);
        let b = random_tournament(20, 99);
        let c = random_tournament(20, 100);
        assert_eq!(a, b);
        assert_ne!(a, c);
        a.validate().unwrap();
    }
}
