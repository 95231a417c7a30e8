//! Compatibility matrices: symmetric hollow real matrices with element
//! statistics.
//!
//! A compatibility matrix holds the pairwise benefit `C[i][j]` of pairing
//! elements `i` and `j`. It is symmetric (order of a pair is irrelevant) and
//! hollow (an element cannot pair with itself), so only the strict upper
//! triangle is stored. Element indices are 1-based in the public API to match
//! the usual notation for pairing problems; storage is 0-based internally.
//!
//! The type is immutable after construction, which enforces the symmetric
//! hollow invariants for its whole lifetime and makes it safe to share
//! across threads.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{PairError, Result};

/// Smallest supported element count.
pub const MIN_N: usize = 4;

/// Absolute tolerance used when validating symmetry and hollowness of
/// externally supplied dense data.
pub const CONSTRUCTION_TOL: f64 = 1e-12;

/// Checks that `n` is even and at least [`MIN_N`].
pub fn check_element_count(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(PairError::OddN { n });
    }
    if n < MIN_N {
        return Err(PairError::TooSmall { n, min: MIN_N });
    }
    Ok(())
}

/// Offset of 0-based `(i, j)`, `i < j`, in a packed strict upper triangle.
#[inline]
pub(crate) fn tri_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// An `n x n` symmetric hollow real matrix of pairwise compatibilities.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityMatrix {
    n: usize,
    /// Strict upper triangle, row-major: (1,2), (1,3), ..., (n-1,n).
    values: Vec<f64>,
}

/// Element and total-compatibility statistics of one matrix.
///
/// `mu_sum` and `sigma2_sum` are the mean and variance of the total
/// compatibility over all `(n-1)!!` pairings, computed in closed form
/// (no enumeration): the mean is `(n/2) * mu_element` and the variance
/// follows the row-sum identity
/// `sigma2_sum = n(n-2)/(2(n-3)) * sigma2_element
///             - 1/((n-1)(n-3)) * sum_k rowsum_k(centered)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixStats {
    /// Mean of the off-diagonal elements.
    pub mu_element: f64,
    /// Mean total compatibility over all pairings.
    pub mu_sum: f64,
    /// Population variance of the off-diagonal elements.
    pub sigma2_element: f64,
    /// Variance of the total compatibility over all pairings.
    pub sigma2_sum: f64,
}

impl CompatibilityMatrix {
    /// The zero matrix on `n` elements.
    pub fn zeros(n: usize) -> Result<Self> {
        check_element_count(n)?;
        Ok(Self {
            n,
            values: vec![0.0; n * (n - 1) / 2],
        })
    }

    /// Builds a matrix from a function over 1-based index pairs `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_element_count(n)?;
        let mut values = Vec::with_capacity(n * (n - 1) / 2);
        for i in 1..=n {
            for j in (i + 1)..=n {
                values.push(f(i, j));
            }
        }
        let m = Self { n, values };
        m.check_finite()?;
        Ok(m)
    }

    /// Builds a matrix from a packed strict upper triangle in row-major
    /// order: (1,2), (1,3), ..., (n-1,n).
    pub fn from_upper_triangle(n: usize, values: Vec<f64>) -> Result<Self> {
        check_element_count(n)?;
        let expected = n * (n - 1) / 2;
        if values.len() != expected {
            return Err(PairError::DimensionMismatch {
                left: values.len(),
                right: expected,
            });
        }
        let m = Self { n, values };
        m.check_finite()?;
        Ok(m)
    }

    /// Builds a matrix with constant value `c` on every off-diagonal entry.
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::from_fn(n, |_, _| c)
    }

    /// Validates and ingests a full dense square matrix.
    ///
    /// Rejects rows of the wrong length, asymmetry or a nonzero diagonal
    /// beyond [`CONSTRUCTION_TOL`], and non-finite entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        check_element_count(n)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(PairError::DimensionMismatch {
                    left: row.len(),
                    right: n,
                });
            }
            if !row[i].is_finite() || row[i].abs() > CONSTRUCTION_TOL {
                return Err(PairError::NonZeroDiagonal { i: i + 1 });
            }
        }
        let mut values = Vec::with_capacity(n * (n - 1) / 2);
        // Two-sided access keeps the symmetry check readable.
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in (i + 1)..n {
                let a = rows[i][j];
                let b = rows[j][i];
                if !a.is_finite() || !b.is_finite() {
                    return Err(PairError::NonFinite { i: i + 1, j: j + 1 });
                }
                if (a - b).abs() > CONSTRUCTION_TOL {
                    return Err(PairError::NotSymmetric { i: i + 1, j: j + 1 });
                }
                values.push(a);
            }
        }
        Ok(Self { n, values })
    }

    fn check_finite(&self) -> Result<()> {
        for (i, j, v) in self.entries() {
            if !v.is_finite() {
                return Err(PairError::NonFinite { i, j });
            }
        }
        Ok(())
    }

    /// Re-checks every structural invariant of the stored data.
    ///
    /// Symmetry and hollowness hold by construction (only the upper triangle
    /// exists); this verifies the element-count constraints and finiteness.
    pub fn validate(&self) -> Result<()> {
        check_element_count(self.n)?;
        self.check_finite()
    }

    /// Element count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry at 1-based `(i, j)`. Diagonal entries are zero.
    ///
    /// Panics if an index is outside `1..=n`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(
            (1..=self.n).contains(&i) && (1..=self.n).contains(&j),
            "index ({i},{j}) out of range 1..={}",
            self.n
        );
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.values[tri_index(self.n, a - 1, b - 1)]
    }

    /// Iterates the strict upper triangle as 1-based `(i, j, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (1..=n)
            .flat_map(move |i| ((i + 1)..=n).map(move |j| (i, j)))
            .zip(self.values.iter())
            .map(|((i, j), &v)| (i, j, v))
    }

    /// Sum of compatibilities over the pairs chosen by `i`'s adjacent set,
    /// i.e. the `i`-th row sum. `i` is 1-based.
    pub fn adjacent_sum(&self, i: usize) -> Result<f64> {
        if i == 0 || i > self.n {
            return Err(PairError::IndexOutOfRange {
                index: i,
                n: self.n,
            });
        }
        let mut sum = 0.0;
        for j in 1..=self.n {
            if j != i {
                sum += self.get(i, j);
            }
        }
        Ok(sum)
    }

    /// All `n` row sums at once; `row_sums()[k]` is the (k+1)-th row sum.
    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for (i, j, v) in self.entries() {
            sums[i - 1] += v;
            sums[j - 1] += v;
        }
        sums
    }

    /// Sum of the strict upper-triangle entries.
    pub fn sum_entries(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Mean of the off-diagonal elements.
    pub fn mu_element(&self) -> f64 {
        self.sum_entries() / (self.values.len() as f64)
    }

    /// Population variance of the off-diagonal elements.
    pub fn sigma2_element(&self) -> f64 {
        let mu = self.mu_element();
        let m = self.values.len() as f64;
        self.values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / m
    }

    /// All four matrix statistics.
    ///
    /// `mu_sum` is computed as `(n/2) * mu_element` and `sigma2_sum` by the
    /// row-sum variance identity; neither enumerates pairings.
    pub fn stats(&self) -> MatrixStats {
        let n = self.n as f64;
        let mu_element = self.mu_element();
        let sigma2_element = self.sigma2_element();
        let mu_sum = (n / 2.0) * mu_element;

        // Row sums of the centered matrix C - mu (J - I).
        let centered_row_sq: f64 = self
            .row_sums()
            .iter()
            .map(|r| {
                let c = r - (n - 1.0) * mu_element;
                c * c
            })
            .sum();
        // The two terms cancel exactly on constant matrices; rounding can
        // leave a negative remnant there, and a variance is never below 0.
        let sigma2_sum = (n * (n - 2.0) / (2.0 * (n - 3.0)) * sigma2_element
            - centered_row_sq / ((n - 1.0) * (n - 3.0)))
        .max(0.0);

        MatrixStats {
            mu_element,
            mu_sum,
            sigma2_element,
            sigma2_sum,
        }
    }

    /// The centered matrix `C - mu_element(C) * (J - I)`, whose element mean
    /// is zero.
    pub fn centered(&self) -> CompatibilityMatrix {
        let mu = self.mu_element();
        Self {
            n: self.n,
            values: self.values.iter().map(|v| v - mu).collect(),
        }
    }

    /// Largest absolute elementwise difference between two matrices.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(PairError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Writes the matrix in the text format: `n=<count>` on the first line,
    /// then the full dense square, one comma-separated row per line. Floats
    /// are emitted as shortest round-trip decimals.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let mut buf = String::new();
        writeln!(buf, "n={}", self.n).expect("write to string");
        for i in 1..=self.n {
            for j in 1..=self.n {
                if j > 1 {
                    buf.push(',');
                }
                write!(buf, "{}", self.get(i, j)).expect("write to string");
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

    /// Parses the text format written by [`write_to`](Self::write_to),
    /// validating symmetry and hollowness within [`CONSTRUCTION_TOL`].
    pub fn read_from(r: impl Read) -> Result<Self> {
        let mut lines = BufReader::new(r).lines();
        let header = lines.next().ok_or_else(|| parse_err(1, "empty file"))??;
        let n = parse_header(&header, 1, None)?;
        let mut rows = Vec::with_capacity(n);
        for (line_no, line) in lines.by_ref().take(n).enumerate() {
            let line = line?;
            let row = parse_row(&line, line_no + 2)?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(parse_err(rows.len() + 1, "unexpected end of file"));
        }
        Self::from_rows(&rows)
    }

    pub fn read_from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> PairError {
    PairError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a `n=<count>` header line, optionally requiring a `kind=` tag.
pub(crate) fn parse_header(header: &str, line: usize, kind: Option<&str>) -> Result<usize> {
    let mut fields = header.trim().split(',');
    let first = fields.next().unwrap_or("");
    let n: usize = first
        .strip_prefix("n=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(line, format!("expected 'n=<count>', got '{first}'")))?;
    match (kind, fields.next()) {
        (None, None) => {}
        (Some(k), Some(tag)) if tag == format!("kind={k}") => {}
        (None, Some(tag)) => {
            return Err(parse_err(line, format!("unexpected header field '{tag}'")));
        }
        (Some(k), got) => {
            return Err(parse_err(
                line,
                format!("expected 'kind={k}' tag, got '{}'", got.unwrap_or("")),
            ));
        }
    }
    Ok(n)
}

pub(crate) fn parse_row(line: &str, line_no: usize) -> Result<Vec<f64>> {
    line.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|e| parse_err(line_no, format!("bad number '{}': {e}", tok.trim())))
        })
        .collect()
}
