//! The combining phase: greedy construction plus 2-exchange local search.
//!
//! `pnn_construct` builds a pairing by visiting elements in a seeded random
//! order and always taking the best still-unpaired partner. `p2opt_refine`
//! repeatedly samples two pairs, evaluates both ways of rewiring them, and
//! accepts a rewiring only when it strictly improves the total; it stops
//! after `exchange_limit` consecutive non-improving proposals. `combine`
//! chains the two, which is the PNN+P2-opt pipeline used by the experiment
//! harness.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{PairError, Result};
use crate::matrix::CompatibilityMatrix;
use crate::pairing::Pairing;
use crate::seed::derive_seed;

// Independent RNG streams for the two stages, derived from one seed.
const PNN_STREAM: u64 = 1;
const P2OPT_STREAM: u64 = 2;

/// Parameters of the combining pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CombineConfig {
    /// Consecutive non-improving 2-exchange proposals before stopping.
    pub exchange_limit: usize,
    /// Seed for both stages; identical inputs give identical outputs.
    pub rng_seed: u64,
    /// Maximize total compatibility (default) or minimize it.
    pub maximize: bool,
}

impl Default for CombineConfig {
    fn default() -> Self {
        Self {
            exchange_limit: 600,
            rng_seed: 0,
            maximize: true,
        }
    }
}

impl CombineConfig {
    pub fn with_seed(rng_seed: u64) -> Self {
        Self {
            rng_seed,
            ..Self::default()
        }
    }
}

/// Greedy pairing construction (PNN): visit elements in a seeded random
/// order; pair each unpaired element with its best-compatibility unpaired
/// partner, ties broken by lowest index.
pub fn pnn_construct(matrix: &CompatibilityMatrix, config: &CombineConfig) -> Pairing {
    let n = matrix.n();
    let sign = if config.maximize { 1.0 } else { -1.0 };
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(&[config.rng_seed, PNN_STREAM]));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut partner = vec![usize::MAX; n];
    for &v in &order {
        if partner[v] != usize::MAX {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for (u, &pu) in partner.iter().enumerate() {
            if u == v || pu != usize::MAX {
                continue;
            }
            let score = sign * matrix.get(v + 1, u + 1);
            match best {
                Some((_, b)) if score <= b => {}
                _ => best = Some((u, score)),
            }
        }
        let (u, _) = best.expect("even element count leaves a partner");
        partner[v] = u;
        partner[u] = v;
    }
    Pairing::from_partner0(partner)
}

/// 2-exchange local refinement (P2-opt).
///
/// Samples two distinct pairs {a,b}, {c,d} uniformly, evaluates the two
/// rewirings {a,c}/{b,d} and {a,d}/{b,c}, and applies the better one if it
/// strictly improves the total. The counter of consecutive non-improving
/// proposals resets on every acceptance; the search stops when it reaches
/// `config.exchange_limit`. The returned total is never worse than the
/// input's.
pub fn p2opt_refine(
    pairing: &Pairing,
    matrix: &CompatibilityMatrix,
    config: &CombineConfig,
) -> Result<Pairing> {
    if pairing.n() != matrix.n() {
        return Err(PairError::DimensionMismatch {
            left: pairing.n(),
            right: matrix.n(),
        });
    }
    assert!(config.exchange_limit >= 1, "exchange_limit must be >= 1");
    let n = matrix.n();
    let slots = n / 2;
    let sign = if config.maximize { 1.0 } else { -1.0 };
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(&[config.rng_seed, P2OPT_STREAM]));

    let mut partner: Vec<usize> = pairing.partner0().to_vec();
    // One representative element per pair; its partner is looked up live.
    let mut heads: Vec<usize> = (0..n).filter(|&i| i < partner[i]).collect();
    let get = |i: usize, j: usize| matrix.get(i + 1, j + 1);

    #[cfg(debug_assertions)]
    let mut running_total = pairing.total_compatibility(matrix)?;

    let mut fails = 0usize;
    while fails < config.exchange_limit {
        let s1 = rng.gen_range(0..slots);
        let mut s2 = rng.gen_range(0..slots - 1);
        if s2 >= s1 {
            s2 += 1;
        }
        let a = heads[s1];
        let b = partner[a];
        let c = heads[s2];
        let d = partner[c];

        let base = get(a, b) + get(c, d);
        let keep_ac = sign * (get(a, c) + get(b, d) - base);
        let keep_ad = sign * (get(a, d) + get(b, c) - base);

        let (gain, pair_with_a) = if keep_ac >= keep_ad {
            (keep_ac, c)
        } else {
            (keep_ad, d)
        };
        if gain > 0.0 {
            let other_1 = if pair_with_a == c { d } else { c };
            partner[a] = pair_with_a;
            partner[pair_with_a] = a;
            partner[b] = other_1;
            partner[other_1] = b;
            heads[s1] = a;
            heads[s2] = b;
            fails = 0;

            #[cfg(debug_assertions)]
            {
                // Accepted moves must never make the objective worse. The
                // slack covers re-summation rounding on near-tie gains.
                let new_total =
                    Pairing::from_partner0(partner.clone()).total_compatibility(matrix)?;
                debug_assert!(sign * (new_total - running_total) > -1e-9);
                running_total = new_total;
            }
        } else {
            fails += 1;
        }
    }
    Ok(Pairing::from_partner0(partner))
}

/// The full combining pipeline: greedy construction then 2-exchange
/// refinement, both driven by `config.rng_seed`.
pub fn combine(matrix: &CompatibilityMatrix, config: &CombineConfig) -> Pairing {
    let start = pnn_construct(matrix, config);
    p2opt_refine(&start, matrix, config).expect("construction matches matrix dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force_optimum;
    use crate::testutil::{five_seven, rand_matrix};

    #[test]
    fn pnn_constant_matrix_total() {
        let c = CompatibilityMatrix::constant(6, 2.0).unwrap();
        for seed in 0..5 {
            let p = pnn_construct(&c, &CombineConfig::with_seed(seed));
            assert_eq!(p.total_compatibility(&c).unwrap(), 6.0);
        }
    }

    #[test]
    fn pnn_finds_the_obvious_pairs() {
        // Greedy always ends at {1,2},{3,4} on the 5/7 matrix, whichever
        // element it visits first.
        let m = five_seven();
        for seed in 0..20 {
            let p = pnn_construct(&m, &CombineConfig::with_seed(seed));
            assert_eq!(p.pairs(), vec![(1, 2), (3, 4)], "seed {seed}");
        }
    }

    #[test]
    fn pnn_beats_random_pairings_usually() {
        use rand::SeedableRng;
        // One fresh instance per trial. Measured with these seeds: 90/100
        // wins at n=6 (tiny instances leave random draws a real chance),
        // 97/100 at n=10. Thresholds frozen just under the measurements.
        for (n, floor) in [(6usize, 88), (10usize, 95)] {
            let mut wins = 0;
            for seed in 0..100u64 {
                let m = rand_matrix(n, 3000 + seed);
                let greedy = pnn_construct(&m, &CombineConfig::with_seed(seed));
                let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(9000 + seed);
                let random = Pairing::random(n, &mut rng).unwrap();
                if greedy.total_compatibility(&m).unwrap()
                    >= random.total_compatibility(&m).unwrap()
                {
                    wins += 1;
                }
            }
            assert!(wins >= floor, "n={n}: greedy won only {wins}/100");
        }

        // Against the mean total over all pairings the greedy wins every
        // time at these sizes.
        for seed in 0..100u64 {
            let m = rand_matrix(6, 3000 + seed);
            let greedy = pnn_construct(&m, &CombineConfig::with_seed(seed));
            assert!(greedy.total_compatibility(&m).unwrap() >= m.stats().mu_sum);
        }
    }

    #[test]
    fn p2opt_leaves_the_optimum_alone() {
        let m = five_seven();
        let optimal = Pairing::from_pairs(4, &[(1, 2), (3, 4)]).unwrap();
        let refined = p2opt_refine(&optimal, &m, &CombineConfig::with_seed(3)).unwrap();
        assert_eq!(refined, optimal);
    }

    #[test]
    fn p2opt_escapes_the_bad_start() {
        let m = five_seven();
        let bad = Pairing::from_pairs(4, &[(1, 3), (2, 4)]).unwrap();
        let refined = p2opt_refine(&bad, &m, &CombineConfig::with_seed(3)).unwrap();
        assert_eq!(refined.pairs(), vec![(1, 2), (3, 4)]);
        assert_eq!(refined.total_compatibility(&m).unwrap(), 12.0);
    }

    #[test]
    fn p2opt_constant_matrix_is_a_fixed_point() {
        let c = CompatibilityMatrix::constant(6, 1.0).unwrap();
        let start = Pairing::from_pairs(6, &[(1, 4), (2, 6), (3, 5)]).unwrap();
        let refined = p2opt_refine(&start, &c, &CombineConfig::with_seed(8)).unwrap();
        assert_eq!(refined, start);
    }

    #[test]
    fn p2opt_never_decreases_total() {
        for seed in 0..20u64 {
            let m = rand_matrix(10, 600 + seed);
            let cfg = CombineConfig::with_seed(seed);
            let start = pnn_construct(&m, &cfg);
            let before = start.total_compatibility(&m).unwrap();
            let after = p2opt_refine(&start, &m, &cfg)
                .unwrap()
                .total_compatibility(&m)
                .unwrap();
            assert!(after >= before, "seed {seed}: {after} < {before}");
        }
    }

    #[test]
    fn p2opt_dimension_mismatch() {
        let m = rand_matrix(6, 1);
        let p = Pairing::adjacent(8).unwrap();
        assert!(matches!(
            p2opt_refine(&p, &m, &CombineConfig::default()),
            Err(PairError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn outputs_are_deterministic_per_seed() {
        let m = rand_matrix(12, 777);
        let cfg = CombineConfig::with_seed(42);
        let a = combine(&m, &cfg);
        let b = combine(&m, &cfg);
        assert_eq!(a, b);

        let other = combine(&m, &CombineConfig::with_seed(43));
        // Different seeds are allowed to agree, but the outputs must be
        // valid either way.
        assert_eq!(other.pairs().len(), 6);
    }

    #[test]
    fn combine_solves_tiny_instances() {
        let m = five_seven();
        let p = combine(&m, &CombineConfig::with_seed(5));
        assert_eq!(p.total_compatibility(&m).unwrap(), 12.0);

        let c = CompatibilityMatrix::constant(8, 3.0).unwrap();
        let p = combine(&c, &CombineConfig::with_seed(5));
        assert_eq!(p.total_compatibility(&c).unwrap(), 12.0);
    }

    #[test]
    fn combine_never_beats_brute_force() {
        for seed in 0..10u64 {
            let m = rand_matrix(10, 800 + seed);
            let heuristic = combine(&m, &CombineConfig::with_seed(seed))
                .total_compatibility(&m)
                .unwrap();
            let (_, exact) = brute_force_optimum(&m).unwrap();
            assert!(heuristic <= exact + 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn minimize_mirrors_maximize_on_negated_matrix() {
        let m = rand_matrix(8, 55);
        let neg = CompatibilityMatrix::from_fn(8, |i, j| -m.get(i, j)).unwrap();
        let mut cfg = CombineConfig::with_seed(9);
        cfg.maximize = false;
        let min_pairing = combine(&m, &cfg);
        let max_pairing = combine(&neg, &CombineConfig::with_seed(9));
        assert_eq!(min_pairing, max_pairing);
    }
}
