//! Equivalence classes of compatibility matrices.
//!
//! Two matrices are equivalent when they give the same total compatibility
//! for every pairing. The class of a matrix is characterized by a conserved
//! per-pair quantity
//!
//! ```text
//! K[i][j] = C[i][j] - (rowsum_i(C) + rowsum_j(C)) / (n - 2)
//! ```
//!
//! so equivalence can be decided by comparing two `O(n^2)` invariants
//! instead of quantifying over all `(n-1)!!` pairings. The same algebra
//! yields a closed-form transform to the unique member of a class whose
//! element variance is minimal: every row sum of the optimum equals
//! `(n-1) * mu_element(C)`.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{PairError, Result};
use crate::matrix::{self, CompatibilityMatrix};

/// Default elementwise tolerance for [`equivalent`]. Differences are scaled
/// by `max(1, largest invariant magnitude)`.
pub const DEFAULT_EQUIV_TOL: f64 = 1e-9;

/// The conserved quantity of one matrix's equivalence class, stored as a
/// symmetric hollow array of per-pair values.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassInvariant {
    n: usize,
    /// Strict upper triangle, same layout as `CompatibilityMatrix`.
    kvalues: Vec<f64>,
}

impl ClassInvariant {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Invariant value for the 1-based pair `(i, j)`, `i != j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j) && i != j,
            "pair ({i},{j}) out of range"
        );
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.kvalues[matrix::tri_index(self.n, a - 1, b - 1)]
    }

    /// Sum of the upper-triangle invariant values. For the invariant of a
    /// matrix `C` this equals `-n/(n-2)` times the entry sum of `C`.
    pub fn sum_values(&self) -> f64 {
        self.kvalues.iter().sum()
    }

    /// Largest absolute invariant value.
    pub fn max_abs(&self) -> f64 {
        self.kvalues.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute elementwise difference between two invariants.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(PairError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .kvalues
            .iter()
            .zip(&other.kvalues)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Writes the same dense text format as matrices, with the header tagged
    /// `n=<count>,kind=invariant`.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let mut buf = format!("n={},kind=invariant\n", self.n);
        for i in 1..=self.n {
            for j in 1..=self.n {
                if j > 1 {
                    buf.push(',');
                }
                if i == j {
                    buf.push('0');
                } else {
                    buf.push_str(&format!("{}", self.get(i, j)));
                }
            }
            buf.push('\n');
        }
        w.write_all(buf.as_bytes())?;
        Ok(())
    }

    pub fn write_to_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        self.write_to(&mut f)
    }

    /// Parses the tagged invariant format.
    pub fn read_from(r: impl Read) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or_else(|| matrix::parse_err(1, "empty file"))??;
        let n = matrix::parse_header(&header, 1, Some("invariant"))?;
        matrix::check_element_count(n)?;
        let mut kvalues = Vec::with_capacity(n * (n - 1) / 2);
        let mut rows = Vec::with_capacity(n);
        for (line_no, line) in lines.by_ref().take(n).enumerate() {
            rows.push(matrix::parse_row(&line?, line_no + 2)?);
        }
        if rows.len() != n {
            return Err(matrix::parse_err(rows.len() + 1, "unexpected end of file"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(PairError::DimensionMismatch {
                    left: row.len(),
                    right: n,
                });
            }
            for j in (i + 1)..n {
                if (row[j] - rows[j][i]).abs() > matrix::CONSTRUCTION_TOL {
                    return Err(PairError::NotSymmetric { i: i + 1, j: j + 1 });
                }
                kvalues.push(row[j]);
            }
        }
        Ok(Self { n, kvalues })
    }

    pub fn read_from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

/// The conserved quantity of `matrix`'s class, from the row-sum form:
/// `K[i][j] = C[i][j] - (rowsum_i + rowsum_j)/(n-2)`.
pub fn invariant(matrix: &CompatibilityMatrix) -> ClassInvariant {
    let n = matrix.n();
    let scale = 1.0 / (n as f64 - 2.0);
    let rows = matrix.row_sums();
    let kvalues = matrix
        .entries()
        .map(|(i, j, v)| v - (rows[i - 1] + rows[j - 1]) * scale)
        .collect();
    ClassInvariant { n, kvalues }
}

/// The same conserved quantity computed through the dense matrix expression
/// `C - (J - I) .* (J C + C J) / (n - 2)`, where `J` is all-ones, `I` is the
/// identity and `.*` is the elementwise product.
///
/// Algebraically identical to [`invariant`]; kept as an independent route
/// (explicit dense products, no row-sum shortcut) for cross-checking.
pub fn invariant_matrix_form(matrix: &CompatibilityMatrix) -> ClassInvariant {
    let n = matrix.n();
    let mut dense = vec![vec![0.0; n]; n];
    for (i, j, v) in matrix.entries() {
        dense[i - 1][j - 1] = v;
        dense[j - 1][i - 1] = v;
    }
    let ones = vec![vec![1.0; n]; n];
    let jc = matmul(&ones, &dense);
    let cj = matmul(&dense, &ones);

    let scale = 1.0 / (n as f64 - 2.0);
    let mut kvalues = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            // (J - I) has zero diagonal and ones elsewhere, so off-diagonal
            // entries of the Hadamard product are just the sum itself.
            kvalues.push(dense[i][j] - (jc[i][j] + cj[i][j]) * scale);
        }
    }
    ClassInvariant { n, kvalues }
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// Decides whether `a` and `b` belong to the same equivalence class, i.e.
/// yield the same total compatibility for every pairing.
///
/// Decided via the conserved invariant: true iff the invariants agree
/// elementwise within `tol * max(1, largest invariant magnitude)`.
pub fn equivalent(a: &CompatibilityMatrix, b: &CompatibilityMatrix, tol: f64) -> Result<bool> {
    let ka = invariant(a);
    let kb = invariant(b);
    let diff = ka.max_abs_diff(&kb)?;
    let scale = ka.max_abs().max(kb.max_abs()).max(1.0);
    Ok(diff <= tol * scale)
}

/// The unique member of `matrix`'s equivalence class with minimal element
/// variance:
///
/// ```text
/// X[i][j] = 2(n-1)/(n-2) * mu_element(C)
///         + C[i][j] - (rowsum_i(C) + rowsum_j(C))/(n-2)
/// ```
///
/// Every row sum of the result equals `(n-1) * mu_element(C)`, and the
/// transform is idempotent: applying it to any member of the class gives
/// the same matrix.
pub fn variance_optimize(matrix: &CompatibilityMatrix) -> CompatibilityMatrix {
    let n = matrix.n() as f64;
    let offset = 2.0 * (n - 1.0) / (n - 2.0) * matrix.mu_element();
    let scale = 1.0 / (n - 2.0);
    let rows = matrix.row_sums();
    CompatibilityMatrix::from_fn(matrix.n(), |i, j| {
        offset + matrix.get(i, j) - (rows[i - 1] + rows[j - 1]) * scale
    })
    .expect("same dimensions as a valid matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{enumerate_pairings, equivalent_by_enumeration};
    use crate::testutil::{five_seven, rand_matrix};

    /// A class-preserving perturbation: adds `t[i] + t[j]` to every entry.
    /// Preserves the invariant exactly when the components of `t` sum to 0.
    fn add_row_pattern(m: &CompatibilityMatrix, t: &[f64]) -> CompatibilityMatrix {
        CompatibilityMatrix::from_fn(m.n(), |i, j| m.get(i, j) + t[i - 1] + t[j - 1]).unwrap()
    }

    #[test]
    fn invariant_constant_matrix() {
        // Every pair: c - (3c + 3c)/2 = -2c at n=4.
        let c = 1.75;
        let k = invariant(&CompatibilityMatrix::constant(4, c).unwrap());
        for i in 1..=4 {
            for j in 1..=4 {
                if i != j {
                    assert!((k.get(i, j) + 2.0 * c).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn invariant_zero_matrix() {
        let k = invariant(&CompatibilityMatrix::zeros(6).unwrap());
        assert_eq!(k.max_abs(), 0.0);
    }

    #[test]
    fn invariant_five_seven_by_hand() {
        // Row sums are 5,5,7,7; K[1][2] = 5 - (5+5)/2 = 0,
        // K[3][4] = 7 - (7+7)/2 = 0, cross pairs = 0 - (5+7)/2 = -6.
        let k = invariant(&five_seven());
        assert_eq!(k.get(1, 2), 0.0);
        assert_eq!(k.get(3, 4), 0.0);
        for (i, j) in [(1, 3), (1, 4), (2, 3), (2, 4)] {
            assert_eq!(k.get(i, j), -6.0);
        }
    }

    #[test]
    fn invariant_sum_identity() {
        // sum of K over pairs = -n/(n-2) * sum of C over pairs.
        for seed in 0..5 {
            let m = rand_matrix(8, seed);
            let k = invariant(&m);
            let expected = -8.0 / 6.0 * m.sum_entries();
            assert!((k.sum_values() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn matrix_form_matches_row_sum_form() {
        for (n, seed) in [(4, 1u64), (6, 2), (10, 3), (50, 4)] {
            let m = rand_matrix(n, seed);
            let a = invariant(&m);
            let b = invariant_matrix_form(&m);
            assert!(a.max_abs_diff(&b).unwrap() < 1e-12, "n={n}");
        }
        let z = CompatibilityMatrix::zeros(6).unwrap();
        assert_eq!(invariant_matrix_form(&z).max_abs(), 0.0);
    }

    #[test]
    fn equivalent_is_reflexive() {
        let m = rand_matrix(6, 5);
        assert!(equivalent(&m, &m, 0.0).unwrap());
    }

    #[test]
    fn equivalent_rejects_dimension_mismatch() {
        let a = rand_matrix(6, 1);
        let b = rand_matrix(8, 1);
        assert!(equivalent(&a, &b, 1e-9).is_err());
    }

    #[test]
    fn row_pattern_shift_agrees_with_enumeration() {
        // Adding t to row/column 1 only (t-pattern with nonzero sum) leaves
        // the class: invariant and enumeration must both say "not
        // equivalent". A zero-sum pattern stays in the class: both must say
        // "equivalent".
        let a = CompatibilityMatrix::constant(4, 1.0).unwrap();

        let shifted = add_row_pattern(&a, &[0.5, 0.0, 0.0, 0.0]);
        assert!(!equivalent(&a, &shifted, DEFAULT_EQUIV_TOL).unwrap());
        assert!(!equivalent_by_enumeration(&a, &shifted, 1e-9).unwrap());

        let zero_sum = add_row_pattern(&a, &[0.5, -0.2, -0.1, -0.2]);
        assert!(equivalent(&a, &zero_sum, DEFAULT_EQUIV_TOL).unwrap());
        assert!(equivalent_by_enumeration(&a, &zero_sum, 1e-9).unwrap());
    }

    #[test]
    fn equivalence_laws_within_a_class() {
        let a = rand_matrix(8, 11);
        let b = add_row_pattern(&a, &[0.3, -0.3, 0.2, -0.2, 0.5, -0.5, 0.1, -0.1]);
        let c = add_row_pattern(&a, &[1.0, 0.0, 0.0, -1.0, 0.25, -0.25, 0.0, 0.0]);
        let tol = DEFAULT_EQUIV_TOL;
        // Symmetry.
        assert!(equivalent(&a, &b, tol).unwrap());
        assert!(equivalent(&b, &a, tol).unwrap());
        // Transitivity.
        assert!(equivalent(&b, &c, tol).unwrap());
        assert!(equivalent(&a, &c, tol).unwrap());
    }

    #[test]
    fn invariant_test_matches_enumeration_on_random_pairs() {
        // Both routes must agree on equivalent and non-equivalent inputs
        // at n in {4, 6}.
        for n in [4usize, 6] {
            for seed in 0..10u64 {
                let a = rand_matrix(n, 100 + seed);
                let mut t: Vec<f64> = (0..n).map(|k| (k as f64) * 0.1 - 0.2).collect();
                let sum: f64 = t.iter().sum();
                t[0] -= sum; // zero-sum: stays in class
                let b = add_row_pattern(&a, &t);
                assert!(equivalent(&a, &b, DEFAULT_EQUIV_TOL).unwrap());
                assert!(equivalent_by_enumeration(&a, &b, 1e-9).unwrap());

                let c = rand_matrix(n, 200 + seed);
                let inv_says = equivalent(&a, &c, DEFAULT_EQUIV_TOL).unwrap();
                let enum_says = equivalent_by_enumeration(&a, &c, 1e-9).unwrap();
                assert_eq!(inv_says, enum_says);
            }
        }
    }

    #[test]
    fn variance_optimize_fixed_points() {
        let c = CompatibilityMatrix::constant(6, 2.5).unwrap();
        assert!(variance_optimize(&c).max_abs_diff(&c).unwrap() < 1e-12);

        let z = CompatibilityMatrix::zeros(6).unwrap();
        assert!(variance_optimize(&z).max_abs_diff(&z).unwrap() < 1e-12);
    }

    #[test]
    fn variance_optimize_row_sums_and_class() {
        let m = rand_matrix(6, 42);
        let x = variance_optimize(&m);

        // Row-sum optimality condition.
        let target = 5.0 * m.mu_element();
        for r in x.row_sums() {
            assert!((r - target).abs() < 1e-9, "row sum {r} != {target}");
        }

        // Same class, by both routes.
        assert!(equivalent(&m, &x, DEFAULT_EQUIV_TOL).unwrap());
        assert!(equivalent_by_enumeration(&m, &x, 1e-9).unwrap());

        // Enumerated totals match pairing by pairing.
        for s in enumerate_pairings(6).unwrap() {
            let tm = s.total_compatibility(&m).unwrap();
            let tx = s.total_compatibility(&x).unwrap();
            assert!((tm - tx).abs() < 1e-9 * tm.abs().max(1.0));
        }

        // Variance does not increase.
        assert!(x.sigma2_element() <= m.sigma2_element() + 1e-12);

        // Idempotence.
        let xx = variance_optimize(&x);
        assert!(xx.max_abs_diff(&x).unwrap() < 1e-9);
    }

    #[test]
    fn variance_optimize_is_class_level_unique() {
        let a = rand_matrix(8, 77);
        let b = {
            let mut t: Vec<f64> = (0..8).map(|k| ((k * k) % 5) as f64 * 0.2).collect();
            let sum: f64 = t.iter().sum();
            t[7] -= sum;
            add_row_pattern(&a, &t)
        };
        assert!(equivalent(&a, &b, DEFAULT_EQUIV_TOL).unwrap());
        let xa = variance_optimize(&a);
        let xb = variance_optimize(&b);
        assert!(xa.max_abs_diff(&xb).unwrap() < 1e-9);
    }

    #[test]
    fn sigma2_sum_is_a_class_invariant() {
        let m = rand_matrix(8, 13);
        let x = variance_optimize(&m);
        let a = m.stats().sigma2_sum;
        let b = x.stats().sigma2_sum;
        assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn pairing_and_adjacent_spans_fill_omega_at_n4() {
        // The 3 pairing matrices plus R_1, R_2, R_3 span the full 6-dim
        // space of symmetric hollow 4x4 matrices: rank 6 on vectorized
        // upper triangles.
        let mut basis: Vec<[f64; 6]> = Vec::new();
        for s in enumerate_pairings(4).unwrap() {
            let mut v = [0.0; 6];
            for (idx, (i, j)) in upper_pairs(4).into_iter().enumerate() {
                v[idx] = if s.partner_of(i).unwrap() == j {
                    1.0
                } else {
                    0.0
                };
            }
            basis.push(v);
        }
        for r in 1..=3usize {
            let mut v = [0.0; 6];
            for (idx, (i, j)) in upper_pairs(4).into_iter().enumerate() {
                v[idx] = if i == r || j == r { 1.0 } else { 0.0 };
            }
            basis.push(v);
        }
        assert_eq!(rank(&mut basis), 6);
    }

    fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
        (1..=n)
            .flat_map(|i| ((i + 1)..=n).map(move |j| (i, j)))
            .collect()
    }

    /// Rank by Gaussian elimination with partial pivoting.
    fn rank(rows: &mut [[f64; 6]]) -> usize {
        let mut rank = 0;
        for col in 0..6 {
            let pivot = (rank..rows.len())
                .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()));
            let Some(p) = pivot else { break };
            if rows[p][col].abs() < 1e-9 {
                continue;
            }
            rows.swap(rank, p);
            for r in (rank + 1)..rows.len() {
                let f = rows[r][col] / rows[rank][col];
                #[allow(clippy::needless_range_loop)]
                for c in col..6 {
                    rows[r][c] -= f * rows[rank][c];
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn invariant_file_roundtrip() {
        let k = invariant(&rand_matrix(6, 3));
        let mut buf = Vec::new();
        k.write_to(&mut buf).unwrap();
        let text = String::from_utf8_lossy(&buf);
        assert!(text.starts_with("n=6,kind=invariant\n"));
        let back = ClassInvariant::read_from(&buf[..]).unwrap();
        assert!(k.max_abs_diff(&back).unwrap() < 1e-12);

        // A plain matrix file is not an invariant file.
        let mut mbuf = Vec::new();
        rand_matrix(6, 3).write_to(&mut mbuf).unwrap();
        assert!(ClassInvariant::read_from(&mbuf[..]).is_err());
    }
}
