//! Pairing optimization for fully-paired systems.
//!
//! Everything needed to study and solve the problem of pairing all `n`
//! elements of a set to maximize the summed pairwise compatibility:
//!
//! - [`matrix`]: symmetric hollow compatibility matrices and their element
//!   and total-compatibility statistics.
//! - [`pairing`]: perfect matchings and total compatibility.
//! - [`equivalence`]: the conserved per-pair invariant characterizing
//!   matrices that yield identical totals for every pairing, and the
//!   closed-form transform to the minimum-variance member of a class.
//! - [`observe`]: the limited-observation setting where only totals are
//!   measurable — an observation oracle, the zero-first-row class
//!   representative, and reconstruction from oracle queries alone.
//! - [`heuristics`]: greedy construction plus pairwise 2-exchange local
//!   search (PNN + P2-opt).
//! - [`exact`]: exhaustive enumeration over all `(n-1)!!` pairings for
//!   small `n` — the ground truth everything else is checked against.
//! - [`harness`]: seeded instance generators and the three-flow experiment
//!   comparing direct combining, observation, and variance optimization.

pub mod equivalence;
pub mod error;
pub mod exact;
pub mod harness;
pub mod heuristics;
pub mod matrix;
pub mod observe;
pub mod pairing;
pub mod seed;

pub use error::{PairError, Result};
pub use matrix::{CompatibilityMatrix, MatrixStats};
pub use pairing::Pairing;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::matrix::CompatibilityMatrix;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// n=4 instance with C[1][2]=5, C[3][4]=7 and zeros elsewhere; its
    /// unique optimum is {1,2},{3,4} with total 12.
    pub fn five_seven() -> CompatibilityMatrix {
        CompatibilityMatrix::from_fn(4, |i, j| match (i, j) {
            (1, 2) => 5.0,
            (3, 4) => 7.0,
            _ => 0.0,
        })
        .unwrap()
    }

    /// Seeded matrix with i.i.d. U(0,1) off-diagonal entries.
    pub fn rand_matrix(n: usize, seed: u64) -> CompatibilityMatrix {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        CompatibilityMatrix::from_fn(n, |_, _| rng.gen::<f64>()).unwrap()
    }
}
