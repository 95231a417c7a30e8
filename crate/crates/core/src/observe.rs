//! The limited-observation setting.
//!
//! Individual compatibilities are hidden; only the total compatibility of a
//! chosen pairing can be measured. [`ObservationOracle`] models that
//! black box, [`observe_transform`] maps a known matrix to the class
//! representative with zero first row and column (the gauge an observation
//! phase naturally produces), and [`reconstruct`] recovers that same
//! representative from oracle queries alone.

use std::io::Write;

use crate::error::{PairError, Result};
use crate::matrix::CompatibilityMatrix;
use crate::pairing::Pairing;

mod guard {
    use super::*;

    /// Black box over a hidden ground-truth matrix.
    ///
    /// The hidden matrix is private to this module and the only way to learn
    /// anything about it is [`query`](ObservationOracle::query), which
    /// returns the total compatibility of a pairing and counts the call.
    /// Callers outside this module cannot reach the individual entries.
    #[derive(Debug)]
    pub struct ObservationOracle {
        hidden: CompatibilityMatrix,
        query_count: u64,
        log: Option<Vec<(Pairing, f64)>>,
    }

    impl ObservationOracle {
        pub fn new(hidden: CompatibilityMatrix) -> Self {
            Self {
                hidden,
                query_count: 0,
                log: None,
            }
        }

        /// As [`new`](Self::new), but records every query for later export.
        pub fn with_log(hidden: CompatibilityMatrix) -> Self {
            Self {
                hidden,
                query_count: 0,
                log: Some(Vec::new()),
            }
        }

        /// Element count of the hidden matrix.
        pub fn n(&self) -> usize {
            self.hidden.n()
        }

        /// Measures the total compatibility of `pairing` against the hidden
        /// matrix and increments the query counter.
        pub fn query(&mut self, pairing: &Pairing) -> Result<f64> {
            let total = pairing.total_compatibility(&self.hidden)?;
            self.query_count += 1;
            if let Some(log) = &mut self.log {
                log.push((pairing.clone(), total));
            }
            Ok(total)
        }

        /// Number of queries made so far.
        pub fn query_count(&self) -> u64 {
            self.query_count
        }

        /// Recorded queries, if logging was enabled.
        pub fn query_log(&self) -> Option<&[(Pairing, f64)]> {
            self.log.as_deref()
        }
    }
}

pub use guard::ObservationOracle;

impl ObservationOracle {
    /// Writes the query log as CSV with columns
    /// `query_index,pairing,total`; the pairing is a semicolon-separated
    /// list of `i-j` tokens. Fails if logging was not enabled.
    pub fn write_query_log_csv(&self, w: &mut impl Write) -> Result<()> {
        let log = self.query_log().ok_or_else(|| PairError::InvalidPairing {
            reason: "query logging was not enabled on this oracle".into(),
        })?;
        let mut buf = String::from("query_index,pairing,total\n");
        for (idx, (pairing, total)) in log.iter().enumerate() {
            let tokens: Vec<String> = pairing
                .pairs()
                .iter()
                .map(|(a, b)| format!("{a}-{b}"))
                .collect();
            buf.push_str(&format!("{},{},{}\n", idx, tokens.join(";"), total));
        }
        w.write_all(buf.as_bytes())?;
        Ok(())
    }
}

/// The class representative with zero first row and column:
///
/// ```text
/// T[i][j] = 0                                            if 1 in {i, j}
/// T[i][j] = C[i][j] - C[1][i] - C[1][j] + 2 r1 / (n-2)   otherwise
/// ```
///
/// where `r1` is the first row sum. The result is equivalent to the input
/// (identical totals for every pairing).
pub fn observe_transform(matrix: &CompatibilityMatrix) -> CompatibilityMatrix {
    let n = matrix.n();
    let r1 = matrix.adjacent_sum(1).expect("index 1 is always in range");
    let correction = 2.0 * r1 / (n as f64 - 2.0);
    CompatibilityMatrix::from_fn(n, |i, j| {
        if i == 1 || j == 1 {
            0.0
        } else {
            matrix.get(i, j) - matrix.get(1, i) - matrix.get(1, j) + correction
        }
    })
    .expect("same dimensions as a valid matrix")
}

/// Minimum number of observations that identify a matrix's equivalence
/// class: `(n-1)(n-2)/2`, the dimension of the span of pairing matrices.
pub fn min_observations(n: usize) -> Result<u64> {
    crate::matrix::check_element_count(n)?;
    Ok(((n - 1) * (n - 2) / 2) as u64)
}

/// 1-based slot of element `x` in the reference pairing {1,2},{3,4},...
fn slot_of(x: usize) -> usize {
    x.div_ceil(2)
}

/// Partner of element `x` in the reference pairing.
fn ref_partner(x: usize) -> usize {
    if x.is_multiple_of(2) {
        x - 1
    } else {
        x + 1
    }
}

/// Reference pairing with the listed slots replaced by explicit pairs.
fn rewired(n: usize, touched: &[usize], new_pairs: &[(usize, usize)]) -> Pairing {
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n / 2);
    for k in 1..=(n / 2) {
        if !touched.contains(&k) {
            pairs.push((2 * k - 1, 2 * k));
        }
    }
    pairs.extend_from_slice(new_pairs);
    Pairing::from_pairs(n, &pairs).expect("rewiring touches disjoint slots")
}

/// Recovers the hidden matrix's equivalence class through total-compatibility
/// queries only, returning the representative with zero first row and column
/// (the same gauge as [`observe_transform`]).
///
/// The schedule measures, relative to the reference pairing {1,2},{3,4},...,
/// first the swaps that move element 1 (which pin every pair containing
/// element 2 up to the intra-slot values), then one three-slot rewiring per
/// remaining pair, and finally a chain of reversed rewirings that separates
/// the intra-slot values. That is exactly `(n-1)(n-2)/2` queries — the
/// dimension of the span of pairing matrices — and always at most `n^2`.
///
/// `n = 4` is rejected: with only three pairings the gauge bookkeeping below
/// degenerates, and the direct transform covers that case.
// Element and slot ids double as table indices throughout.
#[allow(clippy::needless_range_loop)]
pub fn reconstruct(oracle: &mut ObservationOracle) -> Result<CompatibilityMatrix> {
    let n = oracle.n();
    if n < 6 {
        return Err(PairError::TooSmall { n, min: 6 });
    }
    let m = n / 2;

    // Unknowns, in the zero-first-row gauge E: intra-slot values
    // I[k] = E[2k-1][2k] for slots k >= 2, and every other pair among
    // {2, ..., n}. Pairs containing element 1 are zero by gauge choice,
    // which is what makes each query below a linear equation in E.
    let t0 = oracle.query(&Pairing::adjacent(n)?)?;

    // Swap element 1 with x: measures E[2][x] - I[slot(x)].
    let mut swap1 = vec![0.0; n + 1];
    for x in 3..=n {
        let q = oracle.query(&rewired(
            n,
            &[1, slot_of(x)],
            &[(2, x), (1, ref_partner(x))],
        ))?;
        swap1[x] = q - t0;
    }

    // Three-slot rewiring {a,b},{1,pa},{2,pb}: measures
    // E[a][b] - I[slot(a)] up to the known swap1 terms.
    let mut cross = std::collections::HashMap::new();
    for a in 3..=n {
        for b in (a + 1)..=n {
            if slot_of(a) == slot_of(b) {
                continue;
            }
            let q = oracle.query(&rewired(
                n,
                &[1, slot_of(a), slot_of(b)],
                &[(a, b), (1, ref_partner(a)), (2, ref_partner(b))],
            ))?;
            // q - t0 = E[a][b] + E[2][pb] - I[slot(a)] - I[slot(b)]
            //        = E[a][b] + swap1[pb] - I[slot(a)].
            cross.insert((a, b), q - t0 - swap1[ref_partner(b)]);
        }
    }

    // Reversed rewiring over consecutive slots separates I[k] - I[k+1].
    let mut delta = vec![0.0; m + 1]; // delta[k] = I[k] - I[k+1]
    for k in 2..m {
        let (a, b) = (2 * k - 1, 2 * k + 1);
        let q = oracle.query(&rewired(
            n,
            &[1, k, k + 1],
            &[(a, b), (1, ref_partner(b)), (2, ref_partner(a))],
        ))?;
        // q - t0 = E[a][b] + swap1[pa] - I[k+1], while the forward
        // measurement gave E[a][b] - I[k] = cross[(a,b)].
        let reversed = q - t0 - swap1[ref_partner(a)];
        delta[k] = reversed - cross[&(a, b)];
    }

    // The reference total pins the remaining degree of freedom:
    // t0 = sum of I[k] over slots k = 2..=m.
    let mut offset = vec![0.0; m + 1]; // I[k] - I[2]
    for k in 3..=m {
        offset[k] = offset[k - 1] - delta[k - 1];
    }
    let offset_sum: f64 = offset[2..=m].iter().sum();
    let i2 = (t0 - offset_sum) / (m as f64 - 1.0);
    let intra: Vec<f64> = (0..=m)
        .map(|k| if k >= 2 { i2 + offset[k] } else { 0.0 })
        .collect();

    CompatibilityMatrix::from_fn(n, |i, j| {
        if i == 1 {
            0.0
        } else if j == ref_partner(i) {
            intra[slot_of(i)]
        } else if i == 2 {
            swap1[j] + intra[slot_of(j)]
        } else {
            cross[&(i, j)] + intra[slot_of(i)]
        }
    })
}
