//! Perfect pairings of `n` elements.
//!
//! A pairing partitions `{1, ..., n}` into `n/2` unordered pairs. As a matrix
//! it is the symmetric hollow permutation matrix `S` with `S[i][j] = 1` when
//! `i` and `j` are paired; here it is stored as a partner array, which is the
//! same data: `partner[partner[i]] = i` and `partner[i] != i` for all `i`.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{PairError, Result};
use crate::matrix::CompatibilityMatrix;

/// A perfect matching on `n` elements (1-based in the public API).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    /// 0-based partner array.
    partner: Vec<usize>,
}

impl Pairing {
    /// The reference pairing {1,2}, {3,4}, ..., {n-1,n}.
    pub fn adjacent(n: usize) -> Result<Self> {
        check_even(n)?;
        let partner = (0..n).map(|i| i ^ 1).collect();
        Ok(Self { partner })
    }

    /// Builds a pairing from a 1-based partner array.
    pub fn from_partners(partners: &[usize]) -> Result<Self> {
        let n = partners.len();
        check_even(n)?;
        for &p in partners {
            if p == 0 || p > n {
                return Err(PairError::InvalidPairing {
                    reason: format!("partner {p} out of range 1..={n}"),
                });
            }
        }
        let partner: Vec<usize> = partners.iter().map(|&p| p - 1).collect();
        validate_involution(&partner)?;
        Ok(Self { partner })
    }

    /// Builds a pairing from `n/2` unordered 1-based pairs covering
    /// every element exactly once.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        check_even(n)?;
        if pairs.len() != n / 2 {
            return Err(PairError::InvalidPairing {
                reason: format!("expected {} pairs, got {}", n / 2, pairs.len()),
            });
        }
        let mut partner = vec![usize::MAX; n];
        for &(a, b) in pairs {
            if a == 0 || a > n || b == 0 || b > n {
                return Err(PairError::InvalidPairing {
                    reason: format!("pair ({a},{b}) out of range 1..={n}"),
                });
            }
            if a == b {
                return Err(PairError::InvalidPairing {
                    reason: format!("element {a} paired with itself"),
                });
            }
            if partner[a - 1] != usize::MAX || partner[b - 1] != usize::MAX {
                return Err(PairError::InvalidPairing {
                    reason: format!("element in pair ({a},{b}) already paired"),
                });
            }
            partner[a - 1] = b - 1;
            partner[b - 1] = a - 1;
        }
        validate_involution(&partner)?;
        Ok(Self { partner })
    }

    /// A uniformly random pairing drawn from the given RNG.
    pub fn random(n: usize, rng: &mut impl Rng) -> Result<Self> {
        check_even(n)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut partner = vec![0; n];
        for chunk in order.chunks_exact(2) {
            partner[chunk[0]] = chunk[1];
            partner[chunk[1]] = chunk[0];
        }
        Ok(Self { partner })
    }

    pub(crate) fn from_partner0(partner: Vec<usize>) -> Self {
        debug_assert!(validate_involution(&partner).is_ok());
        Self { partner }
    }

    pub(crate) fn partner0(&self) -> &[usize] {
        &self.partner
    }

    /// Element count.
    pub fn n(&self) -> usize {
        self.partner.len()
    }

    /// Partner of 1-based element `i`.
    pub fn partner_of(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.n() {
            return Err(PairError::IndexOutOfRange {
                index: i,
                n: self.n(),
            });
        }
        Ok(self.partner[i - 1] + 1)
    }

    /// The pair set as 1-based `(i, j)` with `i < j`, ascending by `i`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .filter(|&i| i < self.partner[i])
            .map(|i| (i + 1, self.partner[i] + 1))
            .collect()
    }

    /// Total compatibility of this pairing under `matrix`: the sum of the
    /// chosen pairs' entries, equal to half the Frobenius inner product of
    /// the pairing matrix and `matrix`.
    pub fn total_compatibility(&self, matrix: &CompatibilityMatrix) -> Result<f64> {
        if self.n() != matrix.n() {
            return Err(PairError::DimensionMismatch {
                left: self.n(),
                right: matrix.n(),
            });
        }
        let mut total = 0.0;
        for i in 0..self.n() {
            let j = self.partner[i];
            if i < j {
                total += matrix.get(i + 1, j + 1);
            }
        }
        Ok(total)
    }

    /// Writes one `i-j` line per pair, ascending by the smaller element.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let mut buf = String::new();
        for (a, b) in self.pairs() {
            buf.push_str(&format!("{a}-{b}\n"));
        }
        w.write_all(buf.as_bytes())?;
        Ok(())
    }

    pub fn write_to_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        self.write_to(&mut f)
    }

    /// Parses the `i-j` line format. `n` is inferred from the line count.
    pub fn read_from(r: impl Read) -> Result<Self> {
        let mut pairs = Vec::new();
        for (idx, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (a, b) = line.split_once('-').ok_or_else(|| PairError::Parse {
                line: idx + 1,
                message: format!("expected 'i-j', got '{line}'"),
            })?;
            let parse = |s: &str| {
                s.trim().parse::<usize>().map_err(|e| PairError::Parse {
                    line: idx + 1,
                    message: format!("bad element '{}': {e}", s.trim()),
                })
            };
            pairs.push((parse(a)?, parse(b)?));
        }
        Self::from_pairs(pairs.len() * 2, &pairs)
    }

    pub fn read_from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

fn check_even(n: usize) -> Result<()> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(PairError::OddN { n });
    }
    Ok(())
}

fn validate_involution(partner: &[usize]) -> Result<()> {
    for (i, &p) in partner.iter().enumerate() {
        if p >= partner.len() {
            return Err(PairError::InvalidPairing {
                reason: format!("partner of {} out of range", i + 1),
            });
        }
        if p == i {
            return Err(PairError::InvalidPairing {
                reason: format!("element {} paired with itself", i + 1),
            });
        }
        if partner[p] != i {
            return Err(PairError::InvalidPairing {
                reason: format!("partner array is not an involution at {}", i + 1),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::five_seven;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn adjacent_reference_pairing() {
        let s = Pairing::adjacent(6).unwrap();
        assert_eq!(s.pairs(), vec![(1, 2), (3, 4), (5, 6)]);
        assert_eq!(s.partner_of(1).unwrap(), 2);
        assert_eq!(s.partner_of(6).unwrap(), 5);
    }

    #[test]
    fn involution_is_enforced() {
        // Fixed point.
        assert!(Pairing::from_partners(&[1, 2, 4, 3]).is_err());
        // Not an involution.
        assert!(Pairing::from_partners(&[2, 3, 1, 4]).is_err());
        // Valid.
        let p = Pairing::from_partners(&[2, 1, 4, 3]).unwrap();
        assert_eq!(p.pairs(), vec![(1, 2), (3, 4)]);
    }

    #[test]
    fn from_pairs_rejects_double_use() {
        assert!(Pairing::from_pairs(4, &[(1, 2), (2, 3)]).is_err());
        assert!(Pairing::from_pairs(4, &[(1, 2)]).is_err());
        assert!(Pairing::from_pairs(4, &[(1, 1), (2, 3)]).is_err());
    }

    #[test]
    fn total_compatibility_examples() {
        // Constant matrix: every pairing totals (n/2) * c.
        let c = CompatibilityMatrix::constant(4, 1.0).unwrap();
        for pairs in [[(1, 2), (3, 4)], [(1, 3), (2, 4)], [(1, 4), (2, 3)]] {
            let s = Pairing::from_pairs(4, &pairs).unwrap();
            assert_eq!(s.total_compatibility(&c).unwrap(), 2.0);
        }

        // Zero matrix.
        let z = CompatibilityMatrix::zeros(4).unwrap();
        let s = Pairing::adjacent(4).unwrap();
        assert_eq!(s.total_compatibility(&z).unwrap(), 0.0);

        // 5/7 matrix, matched pairing picks up both entries.
        let m = five_seven();
        let s = Pairing::from_pairs(4, &[(1, 2), (3, 4)]).unwrap();
        assert_eq!(s.total_compatibility(&m).unwrap(), 12.0);
        let cross = Pairing::from_pairs(4, &[(1, 3), (2, 4)]).unwrap();
        assert_eq!(cross.total_compatibility(&m).unwrap(), 0.0);
    }

    #[test]
    fn total_compatibility_dimension_mismatch() {
        let m = five_seven();
        let s = Pairing::adjacent(6).unwrap();
        assert!(matches!(
            s.total_compatibility(&m),
            Err(PairError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn total_is_half_frobenius() {
        let m = five_seven();
        let s = Pairing::from_pairs(4, &[(1, 2), (3, 4)]).unwrap();
        // Full Frobenius inner product counts each pair twice.
        let mut frob = 0.0;
        for i in 1..=4 {
            for j in 1..=4 {
                let s_ij = if i != j && s.partner_of(i).unwrap() == j {
                    1.0
                } else {
                    0.0
                };
                frob += s_ij * m.get(i, j);
            }
        }
        assert_eq!(s.total_compatibility(&m).unwrap(), frob / 2.0);
    }

    #[test]
    fn random_pairings_are_valid() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..50 {
            let p = Pairing::random(10, &mut rng).unwrap();
            assert_eq!(p.pairs().len(), 5);
            // pairs() output is by construction an involution; re-validate.
            assert!(Pairing::from_pairs(10, &p.pairs()).is_ok());
        }
    }

    #[test]
    fn text_roundtrip() {
        let p = Pairing::from_pairs(6, &[(5, 6), (1, 4), (2, 3)]).unwrap();
        let mut buf = Vec::new();
        p.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf), "1-4\n2-3\n5-6\n");
        let back = Pairing::read_from(&buf[..]).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn read_rejects_bad_text() {
        assert!(Pairing::read_from("1-2\n3-3\n".as_bytes()).is_err());
        assert!(Pairing::read_from("1-2\nbogus\n".as_bytes()).is_err());
        assert!(Pairing::read_from("1-2\n2-3\n".as_bytes()).is_err());
    }
}
