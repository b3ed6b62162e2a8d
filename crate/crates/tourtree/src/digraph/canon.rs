//! Exhaustive enumeration and isomorphism handling for small tournaments.
//!
//! The canonical form of a labelled tournament is the minimum of its `u64`
//! pair-code over all `n!` relabelings. Enumeration walks every code in
//! ascending order and keeps the canonical ones; a per-permutation lookup
//! table (target pair position + orientation flip) makes one relabeling a
//! 21-step loop at n = 7, and a "found a smaller image" early abort prunes
//! most non-canonical codes after a handful of permutations.

use super::encode::{pair_count, pair_index};
use super::Tournament;
use crate::exec::{fold_range_chunked, map_indexed, ExecMode};
use crate::{Error, Result};

/// Largest order enumerated without an explicit override (2^21 codes).
pub const CODE_ORDER_LIMIT: usize = 7;

/// Hard ceiling even with the override: the pair code must fit in a `u64`
/// and the permutation tables in memory.
pub fn max_enumerable_order() -> usize {
    11
}

/// Number of labelled tournaments on `n` vertices, `2^(n(n−1)/2)`.
pub fn labelled_count(n: usize) -> u64 {
    let m = pair_count(n);
    assert!(m < 64);
    1u64 << m
}

fn check_order(n: usize, allow_large: bool) -> Result<()> {
    if n < 1 {
        return Err(Error::param("order must be at least 1"));
    }
    let cap = if allow_large { max_enumerable_order() } else { CODE_ORDER_LIMIT };
    if n > cap {
        return Err(Error::refused(format!(
            "enumeration at n={n} means 2^{} codes x {} permutations; \
             pass the override to force it (n <= {})",
            n * (n - 1) / 2,
            (1..=n).product::<usize>(),
            max_enumerable_order()
        )));
    }
    Ok(())
}

/// All permutations of `0..n` in a fixed (lexicographic) order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity((1..=n).product());
    let mut cur: Vec<usize> = (0..n).collect();
    let mut used = vec![false; n];
    fn rec(n: usize, depth: usize, cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if depth == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur[depth] = v;
                rec(n, depth + 1, cur, used, out);
                used[v] = false;
            }
        }
    }
    rec(n, 0, &mut cur, &mut used, &mut out);
    out
}

/// Per-permutation relabeling table: entry `p` holds the target pair
/// position and whether the pair's endpoints swap order (which reverses the
/// meaning of the bit).
struct PermTable {
    map: Vec<(u8, bool)>,
}

fn perm_tables(n: usize) -> Vec<PermTable> {
    permutations(n)
        .into_iter()
        .map(|sigma| {
            let mut map = Vec::with_capacity(pair_count(n));
            for i in 0..n {
                for j in (i + 1)..n {
                    let (si, sj) = (sigma[i], sigma[j]);
                    let (lo, hi, flip) = if si < sj { (si, sj, false) } else { (sj, si, true) };
                    map.push((pair_index(n, lo, hi) as u8, flip));
                }
            }
            PermTable { map }
        })
        .collect()
}

fn apply(table: &PermTable, m: usize, code: u64) -> u64 {
    let mut img = 0u64;
    for p in 0..m {
        let bit = code >> p & 1;
        let (q, flip) = table.map[p];
        img |= (bit ^ flip as u64) << q;
    }
    img
}

/// The minimum code over all relabelings of `t` (orders up to 11).
pub fn canonical_code(t: &Tournament) -> u64 {
    let n = t.n();
    assert!(n >= 1 && n <= max_enumerable_order());
    let m = pair_count(n);
    let code = t.to_code();
    perm_tables(n)
        .iter()
        .map(|tab| apply(tab, m, code))
        .min()
        .unwrap_or(code)
}

fn is_canonical_with(tables: &[PermTable], m: usize, code: u64) -> bool {
    // skip the identity (first in lexicographic order): it maps code to itself
    tables[1..].iter().all(|tab| apply(tab, m, code) >= code)
}

/// Is `code` the canonical representative of its isomorphism class?
pub fn is_canonical_code(n: usize, code: u64) -> bool {
    assert!(n >= 1 && n <= max_enumerable_order());
    is_canonical_with(&perm_tables(n), pair_count(n), code)
}

/// Canonical codes of every isomorphism class at order `n`, ascending.
/// Refuses `n > 7` unless `allow_large` (cost guard).
pub fn canonical_codes(n: usize, mode: ExecMode, allow_large: bool) -> Result<Vec<u64>> {
    check_order(n, allow_large)?;
    if n == 1 {
        return Ok(vec![0]);
    }
    let m = pair_count(n);
    let tables = perm_tables(n);
    let total = 1u64 << m;
    // scan in fixed-size chunks; each chunk collects its canonical codes in
    // ascending order, chunks concatenate in order
    let chunk = (total / 256).max(1024).min(total);
    Ok(fold_range_chunked(
        mode,
        0..total,
        chunk,
        Vec::new,
        |mut acc, code| {
            if is_canonical_with(&tables, m, code) {
                acc.push(code);
            }
            acc
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    ))
}

/// Number of isomorphism classes at order `n` by canonical-form dedup.
pub fn iso_class_count(n: usize, mode: ExecMode, allow_large: bool) -> Result<u64> {
    Ok(canonical_codes(n, mode, allow_large)?.len() as u64)
}

/// Independent count of isomorphism classes by orbit counting: average,
/// over all permutations, the number of tournaments each fixes. A
/// permutation fixes `2^c` tournaments, `c` = number of its pair-orbits,
/// when every pair-orbit closes without a net orientation flip, and zero
/// otherwise.
pub fn burnside_iso_count(n: usize, mode: ExecMode) -> Result<u64> {
    check_order(n, true)?;
    if n == 1 {
        return Ok(1);
    }
    let m = pair_count(n);
    let tables = perm_tables(n);
    let fixed_counts = map_indexed(mode, tables.len(), |ti| {
        let tab = &tables[ti];
        let mut seen = vec![false; m];
        let mut cycles = 0u32;
        for start in 0..m {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut p = start;
            let mut flip = false;
            loop {
                seen[p] = true;
                let (q, f) = tab.map[p];
                flip ^= f;
                p = q as usize;
                if p == start {
                    break;
                }
            }
            if flip {
                // orbit forces an edge to oppose itself: nothing fixed
                return 0u128;
            }
        }
        1u128 << cycles
    });
    let total: u128 = fixed_counts.into_iter().sum();
    let fact: u128 = (1..=n as u128).product();
    debug_assert_eq!(total % fact, 0);
    Ok((total / fact) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Isomorphism-class counts for n = 1..7. Derived here by exhaustive
    /// canonical-form dedup and cross-checked by orbit counting; matches the
    /// known sequence 1, 1, 2, 4, 12, 56, 456.
    const ISO_COUNTS: [u64; 7] = [1, 1, 2, 4, 12, 56, 456];

    #[test]
    fn iso_classes_small_orders() {
        for n in 1..=5 {
            let by_canon = iso_class_count(n, ExecMode::Sequential, false).unwrap();
            assert_eq!(by_canon, ISO_COUNTS[n - 1], "canonical dedup at n={n}");
            let by_orbits = burnside_iso_count(n, ExecMode::Sequential).unwrap();
            assert_eq!(by_orbits, ISO_COUNTS[n - 1], "orbit count at n={n}");
        }
    }

    #[test]
    fn iso_classes_six_and_seven() {
        // the full n=7 sweep runs in seconds with the parallel path
        for n in 6..=7 {
            let by_canon = iso_class_count(n, ExecMode::auto(), false).unwrap();
            let by_orbits = burnside_iso_count(n, ExecMode::auto()).unwrap();
            assert_eq!(by_canon, ISO_COUNTS[n - 1]);
            assert_eq!(by_orbits, ISO_COUNTS[n - 1]);
        }
    }

    #[test]
    fn canonical_code_is_class_invariant() {
        // relabeling a tournament never changes its canonical code
        let t = super::super::random_tournament(6, 4242);
        let c = canonical_code(&t);
        for (a, b) in [(0usize, 3usize), (1, 5), (2, 4)] {
            let perm: Vec<usize> = (0..6)
                .map(|v| if v == a { b } else if v == b { a } else { v })
                .collect();
            let relabeled =
                Tournament::from_orientation(6, |i, j| {
                    let (pi, pj) = (perm[i], perm[j]);
                    if pi < pj { t.has_edge(pi, pj) } else { !t.has_edge(pj, pi) }
                });
            assert_eq!(canonical_code(&relabeled), c);
        }
        assert!(is_canonical_code(6, c));
    }

    #[test]
    fn enumeration_guard_refuses_large_orders() {
        assert!(matches!(
            canonical_codes(8, ExecMode::Sequential, false),
            Err(Error::Refused(_))
        ));
        assert!(canonical_codes(12, ExecMode::Sequential, true).is_err());
    }

    #[test]
    fn labelled_counts() {
        assert_eq!(labelled_count(2), 2);
        assert_eq!(labelled_count(3), 8);
        assert_eq!(labelled_count(6), 1 << 15);
        assert_eq!(labelled_count(7), 1 << 21);
    }

    #[test]
    fn canonical_codes_are_sorted_and_canonical() {
        let codes = canonical_codes(4, ExecMode::Sequential, false).unwrap();
        assert_eq!(codes.len(), 4);
        assert!(codes.windows(2).all(|w| w[0] < w[1]));
        for &c in &codes {
            assert_eq!(canonical_code(&Tournament::from_code(4, c)), c);
        }
    }
}
