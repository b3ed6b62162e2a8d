//! Bit-string and JSON wire forms for tournaments.
//!
//! The pair `(i, j)` with `i < j` occupies position
//! `i·n − i(i+1)/2 + (j − i − 1)` — lexicographic over ordered pairs — and
//! its bit is set exactly when the edge runs `i→j`. The bit string reads
//! left to right from position 0. The hex form packs four positions per
//! digit, first position as the most significant bit of the digit, with the
//! final digit zero-padded.
//!
//! JSON documents are `{"n": int, "bits": "<hex>"}` on output; input also
//! accepts `{"n": int, "edges": [[u, v], ...]}` with full validation.

use super::Tournament;
use crate::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Number of vertex pairs, `n(n−1)/2`.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Position of the pair `(i, j)`, `i < j`, in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(n: usize, p: usize) -> (usize, usize) {
    debug_assert!(p < pair_count(n));
    let mut i = 0;
    let mut base = 0;
    while base + (n - i - 1) <= p {
        base += n - i - 1;
        i += 1;
    }
    (i, i + 1 + (p - base))
}

impl Tournament {
    /// The binary bit string, one char per pair ('1' = lower label wins).
    pub fn to_bit_string(&self) -> String {
        let mut s = String::with_capacity(pair_count(self.n));
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                s.push(if self.has_edge(i, j) { '1' } else { '0' });
            }
        }
        s
    }

    /// Decode a binary bit string of length exactly `n(n−1)/2`.
    pub fn from_bit_string(n: usize, bits: &str) -> Result<Self> {
        let m = pair_count(n);
        if bits.len() != m {
            return Err(Error::format(format!(
                "bit string for n={n} must have length {m}, got {}",
                bits.len()
            )));
        }
        let mut fwd = Vec::with_capacity(m);
        for (p, c) in bits.chars().enumerate() {
            match c {
                '1' => fwd.push(true),
                '0' => fwd.push(false),
                other => {
                    return Err(Error::format(format!(
                        "bit string position {p}: expected 0 or 1, got {other:?}"
                    )))
                }
            }
        }
        Ok(Self::from_orientation(n, |i, j| fwd[pair_index(n, i, j)]))
    }

    /// Pack into a single `u64` code, bit `p` = pair `p` (requires
    /// `n(n−1)/2 ≤ 63`, i.e. n ≤ 11). Codes order tournaments the same way
    /// bit strings do when compared position 0 first — see
    /// [`super::canonical_code`].
    pub fn to_code(&self) -> u64 {
        let m = pair_count(self.n);
        assert!(m <= 63, "code form only supports n <= 11");
        let mut code = 0u64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has_edge(i, j) {
                    code |= 1 << pair_index(self.n, i, j);
                }
            }
        }
        code
    }

    /// Unpack a `u64` code (inverse of [`Tournament::to_code`]).
    pub fn from_code(n: usize, code: u64) -> Self {
        let m = pair_count(n);
        assert!(m <= 63, "code form only supports n <= 11");
        debug_assert!(m == 63 || code < (1u64 << m));
        Self::from_orientation(n, |i, j| code >> pair_index(n, i, j) & 1 == 1)
    }

    /// Hex rendering of the bit string: digit `k` packs positions
    /// `4k..4k+3`, position `4k` as the digit's MSB; the last digit is
    /// zero-padded. Length is exactly `⌈m/4⌉`.
    pub fn to_hex_bits(&self) -> String {
        let m = pair_count(self.n);
        let bit = |p: usize| -> u8 {
            let (i, j) = pair_from_index(self.n, p);
            self.has_edge(i, j) as u8
        };
        (0..m.div_ceil(4))
            .map(|k| {
                let mut digit = 0u8;
                for off in 0..4 {
                    let p = 4 * k + off;
                    if p < m {
                        digit |= bit(p) << (3 - off);
                    }
                }
                char::from_digit(digit as u32, 16).unwrap()
            })
            .collect()
    }

    /// Decode the hex form; the string must have exactly `⌈m/4⌉` digits and
    /// zero padding bits.
    pub fn from_hex_bits(n: usize, hex: &str) -> Result<Self> {
        let m = pair_count(n);
        let want = m.div_ceil(4);
        if hex.len() != want {
            return Err(Error::format(format!(
                "hex bits for n={n} must have {want} digits, got {}",
                hex.len()
            )));
        }
        let mut fwd = vec![false; m];
        for (k, c) in hex.chars().enumerate() {
            let digit = c
                .to_digit(16)
                .ok_or_else(|| Error::format(format!("invalid hex digit {c:?}")))?
                as u8;
            for off in 0..4 {
                let p = 4 * k + off;
                let b = digit >> (3 - off) & 1 == 1;
                if p < m {
                    fwd[p] = b;
                } else if b {
                    return Err(Error::format(
                        "nonzero padding bits in hex form".to_string(),
                    ));
                }
            }
        }
        Ok(Self::from_orientation(n, |i, j| fwd[pair_index(n, i, j)]))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("tournament serialization cannot fail")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Serialize for Tournament {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            n: usize,
            bits: &'a str,
        }
        Wire { n: self.n(), bits: &self.to_hex_bits() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Tournament {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            n: usize,
            #[serde(default)]
            bits: Option<String>,
            #[serde(default)]
            edges: Option<Vec<(usize, usize)>>,
        }
        let w = Wire::deserialize(de)?;
        let t = match (w.bits, w.edges) {
            (Some(h), None) => Tournament::from_hex_bits(w.n, &h),
            (None, Some(e)) => Tournament::from_edges(w.n, &e),
            (Some(_), Some(_)) => Err(Error::format(
                "give exactly one of \"bits\" or \"edges\"".to_string(),
            )),
            (None, None) => Err(Error::format(
                "missing tournament body: need \"bits\" or \"edges\"".to_string(),
            )),
        };
        t.map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{random_tournament, transitive};
    use super::*;

    #[test]
    fn pair_index_roundtrip() {
        for n in 2..=9 {
            let mut seen = vec![];
            for i in 0..n {
                for j in (i + 1)..n {
                    let p = pair_index(n, i, j);
                    assert_eq!(pair_from_index(n, p), (i, j));
                    seen.push(p);
                }
            }
            assert_eq!(seen, (0..pair_count(n)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn bit_string_decodes_fixed_examples() {
        // all-ones is the transitive order 0 → 1 → 2 (and 0 → 2)
        let t = Tournament::from_bit_string(3, "111").unwrap();
        assert_eq!(t, transitive(3));

        // "110": pairs (0,1),(0,2) forward, (1,2) reversed — the transitive
        // order 0, 2, 1 (NOT a 3-cycle: only one pair is reversed)
        let t = Tournament::from_bit_string(3, "110").unwrap();
        assert!(t.has_edge(0, 1) && t.has_edge(0, 2) && t.has_edge(2, 1));
        assert_eq!(t.low_semidegree_count(1), 2); // transitive: both ends have semidegree 0

        // the 3-cycle 0→1→2→0 flips exactly the middle pair (0,2)
        let t = Tournament::from_bit_string(3, "101").unwrap();
        assert!(t.has_edge(0, 1) && t.has_edge(1, 2) && t.has_edge(2, 0));
        assert_eq!(t.min_semidegree(), Some(1));

        // n=2, "0": the single edge runs 1→0
        let t = Tournament::from_bit_string(2, "0").unwrap();
        assert!(t.has_edge(1, 0));
    }

    #[test]
    fn bit_string_rejects_bad_input() {
        assert!(Tournament::from_bit_string(3, "11").is_err());
        assert!(Tournament::from_bit_string(3, "1111").is_err());
        assert!(Tournament::from_bit_string(3, "1x1").is_err());
    }

    #[test]
    fn hex_packing_convention() {
        // n=3: bits "111" pads to 1110 = 0xe; "101" pads to 1010 = 0xa
        assert_eq!(transitive(3).to_hex_bits(), "e");
        let cyc = Tournament::from_bit_string(3, "101").unwrap();
        assert_eq!(cyc.to_hex_bits(), "a");
        // n=5: ten bits, all ones → "11111111 11" → ff + "11"+pad = c
        assert_eq!(transitive(5).to_hex_bits(), "ffc");
        // nonzero padding must be rejected: n=3 has 3 bits, low bit is padding
        assert!(Tournament::from_hex_bits(3, "f").is_err());
        assert!(Tournament::from_hex_bits(3, "e").is_ok());
    }

    #[test]
    fn json_roundtrip_and_edge_input() {
        for seed in 0..5u64 {
            let t = random_tournament(9, seed);
            let s = t.to_json_string();
            let back = Tournament::from_json_str(&s).unwrap();
            assert_eq!(t, back);
        }
        let t = Tournament::from_json_str(r#"{"n":3,"edges":[[0,1],[1,2],[2,0]]}"#).unwrap();
        assert!(t.has_edge(2, 0));
        assert!(Tournament::from_json_str(r#"{"n":3,"edges":[[0,1],[1,2]]}"#).is_err());
        assert!(Tournament::from_json_str(r#"{"n":3}"#).is_err());
        assert!(
            Tournament::from_json_str(r#"{"n":3,"bits":"e","edges":[[0,1],[1,2],[2,0]]}"#)
                .is_err()
        );
    }

    #[test]
    fn code_roundtrip_matches_bit_string_order() {
        for code in 0..64u64 {
            let t = Tournament::from_code(4, code);
            assert_eq!(t.to_code(), code);
            // bit p of the code is char p of the bit string
            let s = t.to_bit_string();
            for (p, c) in s.chars().enumerate() {
                assert_eq!(c == '1', code >> p & 1 == 1);
            }
        }
    }
}
