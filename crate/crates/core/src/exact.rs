//! Exhaustive ground truth for small instances.
//!
//! Enumerates all `(n-1)!!` pairings to provide the exact optimum and the
//! exact moments of the total compatibility. This is the independent
//! reference that the closed-form statistics, the equivalence test and the
//! heuristics are checked against; it is also exposed through the `exact`
//! CLI subcommand.

use crate::error::{PairError, Result};
use crate::matrix::CompatibilityMatrix;
use crate::pairing::Pairing;

/// Enumeration and brute-force search are capped here: 13!! = 135135
/// pairings keeps any exhaustive pass instantaneous.
pub const MAX_ENUMERATION_N: usize = 14;

/// Exact `(n-1)!!` counting is capped where the product is comfortably
/// inside u64.
pub const MAX_COUNT_N: usize = 20;

fn check_even_at_least_2(n: usize) -> Result<()> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(PairError::OddN { n });
    }
    if n < 2 {
        return Err(PairError::TooSmall { n, min: 2 });
    }
    Ok(())
}

/// Number of distinct pairings of `n` elements: the double factorial
/// `(n-1)!!`.
pub fn pairing_count(n: usize) -> Result<u64> {
    check_even_at_least_2(n)?;
    if n > MAX_COUNT_N {
        return Err(PairError::TooLarge {
            n,
            max: MAX_COUNT_N,
        });
    }
    let mut count: u64 = 1;
    let mut k = n as u64 - 1;
    while k > 1 {
        count *= k;
        k -= 2;
    }
    Ok(count)
}

/// Base-10 logarithm of `(n-1)!!`, usable far beyond the exact-count cap.
pub fn pairing_count_log10(n: usize) -> Result<f64> {
    check_even_at_least_2(n)?;
    Ok((1..n).step_by(2).map(|k| (k as f64).log10()).sum())
}

/// Lazily yields every pairing of `n` elements exactly once.
///
/// Enumeration is the canonical recursion "pair the lowest unpaired element
/// with each remaining candidate in index order", realised as a mixed-radix
/// counter, so the order is deterministic and lexicographic: for n=4 it is
/// {1,2}{3,4}, {1,3}{2,4}, {1,4}{2,3}.
pub fn enumerate_pairings(n: usize) -> Result<PairingEnumeration> {
    check_even_at_least_2(n)?;
    if n > MAX_ENUMERATION_N {
        return Err(PairError::TooLarge {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    Ok(PairingEnumeration {
        n,
        digits: vec![0; n / 2],
        done: false,
    })
}

/// Iterator state for [`enumerate_pairings`].
#[derive(Debug, Clone)]
pub struct PairingEnumeration {
    n: usize,
    /// digits[k] selects the partner of the lowest unpaired element at
    /// depth k, among the n - 2k - 1 remaining candidates.
    digits: Vec<usize>,
    done: bool,
}

impl PairingEnumeration {
    fn decode(&self) -> Pairing {
        let mut avail: Vec<usize> = (0..self.n).collect();
        let mut partner = vec![0; self.n];
        for &d in &self.digits {
            let a = avail.remove(0);
            let b = avail.remove(d);
            partner[a] = b;
            partner[b] = a;
        }
        Pairing::from_partner0(partner)
    }

    fn advance(&mut self) {
        let m = self.digits.len();
        for k in (0..m).rev() {
            let radix = self.n - 2 * k - 1;
            self.digits[k] += 1;
            if self.digits[k] < radix {
                return;
            }
            self.digits[k] = 0;
        }
        self.done = true;
    }
}

impl Iterator for PairingEnumeration {
    type Item = Pairing;

    fn next(&mut self) -> Option<Pairing> {
        if self.done {
            return None;
        }
        let pairing = self.decode();
        self.advance();
        Some(pairing)
    }
}

/// Exact maximizer of the total compatibility, by exhaustion.
///
/// Ties are broken by enumeration order (the first maximizer wins).
pub fn brute_force_optimum(matrix: &CompatibilityMatrix) -> Result<(Pairing, f64)> {
    let mut best: Option<(Pairing, f64)> = None;
    for s in enumerate_pairings(matrix.n())? {
        let total = s.total_compatibility(matrix)?;
        match &best {
            Some((_, t)) if total <= *t => {}
            _ => best = Some((s, total)),
        }
    }
    Ok(best.expect("enumeration yields at least one pairing"))
}

/// Exact mean and population variance of `{ total(S) : S pairing }`,
/// computed over the full enumeration. Returns `(mu_sum, sigma2_sum)`.
pub fn enumerated_moments(matrix: &CompatibilityMatrix) -> Result<(f64, f64)> {
    let count = pairing_count(matrix.n())? as f64;
    let mut sum = 0.0;
    for s in enumerate_pairings(matrix.n())? {
        sum += s.total_compatibility(matrix)?;
    }
    let mean = sum / count;
    let mut sq = 0.0;
    for s in enumerate_pairings(matrix.n())? {
        let d = s.total_compatibility(matrix)? - mean;
        sq += d * d;
    }
    Ok((mean, sq / count))
}

/// Definitional equivalence check: do `a` and `b` give the same total for
/// every pairing? Totals are compared within `tol` scaled by
/// `max(1, |ta|, |tb|)`.
///
/// This enumerates all pairings and is independent of the invariant-based
/// test in the equivalence module.
pub fn equivalent_by_enumeration(
    a: &CompatibilityMatrix,
    b: &CompatibilityMatrix,
    tol: f64,
) -> Result<bool> {
    if a.n() != b.n() {
        return Err(PairError::DimensionMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    for s in enumerate_pairings(a.n())? {
        let ta = s.total_compatibility(a)?;
        let tb = s.total_compatibility(b)?;
        if (ta - tb).abs() > tol * ta.abs().max(tb.abs()).max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{five_seven, rand_matrix};
    use std::collections::HashSet;

    #[test]
    fn counting_facts() {
        assert_eq!(pairing_count(2).unwrap(), 1);
        assert_eq!(pairing_count(4).unwrap(), 3);
        assert_eq!(pairing_count(6).unwrap(), 15);
        assert_eq!(pairing_count(8).unwrap(), 105);
        assert_eq!(pairing_count(10).unwrap(), 945);
        assert!(matches!(pairing_count(3), Err(PairError::OddN { .. })));
        assert!(matches!(pairing_count(22), Err(PairError::TooLarge { .. })));
    }

    #[test]
    fn count_order_of_magnitude_at_100() {
        // 99!! is on the order of 1e78.
        let log = pairing_count_log10(100).unwrap();
        assert!(log > 78.0 && log < 79.0, "log10(99!!) = {log}");
    }

    #[test]
    fn enumeration_small_cases() {
        let all: Vec<_> = enumerate_pairings(2).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].pairs(), vec![(1, 2)]);

        let all: Vec<_> = enumerate_pairings(4).unwrap().map(|p| p.pairs()).collect();
        assert_eq!(
            all,
            vec![
                vec![(1, 2), (3, 4)],
                vec![(1, 3), (2, 4)],
                vec![(1, 4), (2, 3)],
            ]
        );
    }

    #[test]
    fn enumeration_is_exhaustive_and_distinct() {
        for n in [6, 8] {
            let expected = pairing_count(n).unwrap() as usize;
            let mut seen = HashSet::new();
            for p in enumerate_pairings(n).unwrap() {
                assert_eq!(p.pairs().len(), n / 2);
                assert!(seen.insert(p.pairs()), "duplicate pairing");
            }
            assert_eq!(seen.len(), expected);
        }
        assert!(enumerate_pairings(16).is_err());
    }

    #[test]
    fn each_pair_appears_double_factorial_times() {
        // At n=6 every fixed pair {i,j} appears in (n-3)!! = 3 of the 15
        // pairings.
        let mut counts = std::collections::HashMap::new();
        for p in enumerate_pairings(6).unwrap() {
            for pair in p.pairs() {
                *counts.entry(pair).or_insert(0usize) += 1;
            }
        }
        assert_eq!(counts.len(), 15); // C(6,2)
        assert!(counts.values().all(|&c| c == 3));
    }

    #[test]
    fn totals_sum_identity_for_integer_matrix() {
        // sum_S <S,C> = (n-3)!! * sum_{i<j} C_ij, exact in integers.
        let m = CompatibilityMatrix::from_fn(6, |i, j| ((3 * i + j) % 7) as f64).unwrap();
        let total: f64 = enumerate_pairings(6)
            .unwrap()
            .map(|s| s.total_compatibility(&m).unwrap())
            .sum();
        assert_eq!(total, 3.0 * m.sum_entries());
    }

    #[test]
    fn brute_force_examples() {
        let (best, total) = brute_force_optimum(&five_seven()).unwrap();
        assert_eq!(best.pairs(), vec![(1, 2), (3, 4)]);
        assert_eq!(total, 12.0);

        // All pairings tie on a constant matrix: first enumerated wins.
        let c = CompatibilityMatrix::constant(6, 2.0).unwrap();
        let (best, total) = brute_force_optimum(&c).unwrap();
        assert_eq!(best.pairs(), vec![(1, 2), (3, 4), (5, 6)]);
        assert_eq!(total, 6.0);

        let z = CompatibilityMatrix::zeros(6).unwrap();
        assert_eq!(brute_force_optimum(&z).unwrap().1, 0.0);
    }

    #[test]
    fn moments_trivial_cases() {
        let c = CompatibilityMatrix::constant(6, 2.0).unwrap();
        let (mu, var) = enumerated_moments(&c).unwrap();
        assert_eq!(mu, 6.0); // n c / 2
        assert_eq!(var, 0.0);

        let z = CompatibilityMatrix::zeros(4).unwrap();
        assert_eq!(enumerated_moments(&z).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn equivalence_by_enumeration_detects_uniform_shift() {
        // Adding t to row/column 1 shifts every total by exactly t, so the
        // shifted matrix is not equivalent.
        let a = CompatibilityMatrix::constant(4, 1.0).unwrap();
        let b = CompatibilityMatrix::from_fn(4, |i, j| if i == 1 || j == 1 { 2.0 } else { 1.0 })
            .unwrap();
        assert!(equivalent_by_enumeration(&a, &a, 0.0).unwrap());
        assert!(!equivalent_by_enumeration(&a, &b, 1e-9).unwrap());
    }

    #[test]
    fn moments_match_by_construction_shift() {
        // Sanity on a random instance: shifting all entries by d shifts the
        // mean by (n/2) d and leaves the variance unchanged.
        let m = rand_matrix(8, 31);
        let shifted = CompatibilityMatrix::from_fn(8, |i, j| m.get(i, j) + 0.75).unwrap();
        let (mu, var) = enumerated_moments(&m).unwrap();
        let (mu2, var2) = enumerated_moments(&shifted).unwrap();
        assert!((mu2 - mu - 4.0 * 0.75).abs() < 1e-9);
        assert!((var2 - var).abs() < 1e-9);
    }
}
