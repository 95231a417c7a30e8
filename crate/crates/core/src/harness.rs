//! Instance generation and the three-flow experiment.
//!
//! Ground-truth matrices are drawn from a named distribution, then each
//! requested flow runs the combining pipeline on a different view of the
//! same instance:
//!
//! - flow `i`   combines on the ground truth itself,
//! - flow `ii`  combines on the observation-phase representative
//!   (zero first row/column),
//! - flow `iii` combines on the variance-optimized form of that
//!   representative.
//!
//! Performance is always scored against the ground truth as
//! `2 * total / n`, whatever matrix the combiner saw. Trial seeds derive
//! deterministically from the master seed, so flows within a trial share
//! one instance, runs are reproducible bit for bit, and parallel execution
//! cannot change the output (records are sorted before writing).

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution as _, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equivalence::variance_optimize;
use crate::error::{PairError, Result};
use crate::heuristics::{combine, CombineConfig};
use crate::matrix::CompatibilityMatrix;
use crate::observe::observe_transform;
use crate::seed::derive_seed;

/// Off-diagonal entry distribution for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// U(0,1).
    Uniform01,
    /// Poisson with mean 1.
    Poisson1,
    /// Normal with mean 0.5 and standard deviation 0.5/3, chosen so the
    /// mean matches the uniform case.
    Gaussian,
    /// Fair coin on {0, 1}.
    Binary,
    /// Every off-diagonal entry is 1; degenerate case for smoke tests.
    Constant,
}

impl Distribution {
    pub const ALL: [Distribution; 5] = [
        Distribution::Uniform01,
        Distribution::Poisson1,
        Distribution::Gaussian,
        Distribution::Binary,
        Distribution::Constant,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Distribution::Uniform01 => "uniform01",
            Distribution::Poisson1 => "poisson1",
            Distribution::Gaussian => "gaussian",
            Distribution::Binary => "binary",
            Distribution::Constant => "constant",
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Distribution {
    type Err = PairError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|d| d.tag() == s)
            .ok_or_else(|| PairError::UnknownDistribution {
                name: s.to_string(),
            })
    }
}

/// The three pipeline variants compared by the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flow {
    /// Combine on the ground truth.
    I,
    /// Observation phase, then combine.
    II,
    /// Observation phase, variance optimization, then combine.
    III,
}

impl Flow {
    pub const ALL: [Flow; 3] = [Flow::I, Flow::II, Flow::III];

    pub fn tag(self) -> &'static str {
        match self {
            Flow::I => "i",
            Flow::II => "ii",
            Flow::III => "iii",
        }
    }

    fn index(self) -> u64 {
        match self {
            Flow::I => 1,
            Flow::II => 2,
            Flow::III => 3,
        }
    }
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Flow {
    type Err = PairError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.tag() == s)
            .ok_or_else(|| PairError::Parse {
                line: 0,
                message: format!("unknown flow '{s}' (expected i, ii or iii)"),
            })
    }
}

/// Generates an instance with i.i.d. off-diagonal entries from the named
/// distribution, symmetric by construction and deterministic per seed.
pub fn generate(n: usize, distribution: Distribution, seed: u64) -> Result<CompatibilityMatrix> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    match distribution {
        Distribution::Uniform01 => CompatibilityMatrix::from_fn(n, |_, _| rng.gen::<f64>()),
        Distribution::Poisson1 => {
            let poisson = Poisson::new(1.0).expect("valid mean");
            CompatibilityMatrix::from_fn(n, |_, _| poisson.sample(&mut rng))
        }
        Distribution::Gaussian => {
            let normal = Normal::new(0.5, 0.5 / 3.0).expect("valid parameters");
            CompatibilityMatrix::from_fn(n, |_, _| normal.sample(&mut rng))
        }
        Distribution::Binary => {
            CompatibilityMatrix::from_fn(n, |_, _| if rng.gen_bool(0.5) { 1.0 } else { 0.0 })
        }
        Distribution::Constant => CompatibilityMatrix::constant(n, 1.0),
    }
}

/// One flow's outcome on one trial instance.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub n: usize,
    pub distribution: Distribution,
    pub trial_index: usize,
    pub flow: Flow,
    /// Total compatibility of the derived pairing against the ground truth.
    pub total: f64,
    /// `2 * total / n`.
    pub performance: f64,
    /// Element variance of the ground truth.
    pub sigma2_g: f64,
    /// Element variance of the observation-phase representative.
    pub sigma2_e1: f64,
    /// Element variance after variance optimization.
    pub sigma2_e2: f64,
    /// Seed the instance was generated from.
    pub seed: u64,
    pub wall_time_ms: f64,
}

/// Per-trial context threaded into [`run_flow`].
#[derive(Debug, Clone, Copy)]
pub struct FlowContext {
    pub distribution: Distribution,
    pub trial_index: usize,
    /// Seed the ground truth was generated from (recorded, not re-used).
    pub instance_seed: u64,
    /// Seed for the combining pipeline of this flow.
    pub combine_seed: u64,
    pub exchange_limit: usize,
}

/// Runs one flow on a ground-truth instance.
///
/// The combiner sees the flow's view of the instance; the reported total and
/// performance are always measured against the ground truth.
pub fn run_flow(flow: Flow, ground_truth: &CompatibilityMatrix, ctx: &FlowContext) -> TrialRecord {
    let start = Instant::now();
    let e1 = observe_transform(ground_truth);
    let e2 = variance_optimize(&e1);
    let target = match flow {
        Flow::I => ground_truth,
        Flow::II => &e1,
        Flow::III => &e2,
    };
    let config = CombineConfig {
        exchange_limit: ctx.exchange_limit,
        rng_seed: ctx.combine_seed,
        maximize: true,
    };
    let pairing = combine(target, &config);
    let total = pairing
        .total_compatibility(ground_truth)
        .expect("flow views share the instance dimension");
    TrialRecord {
        n: ground_truth.n(),
        distribution: ctx.distribution,
        trial_index: ctx.trial_index,
        flow,
        total,
        performance: 2.0 * total / ground_truth.n() as f64,
        sigma2_g: ground_truth.sigma2_element(),
        sigma2_e1: e1.sigma2_element(),
        sigma2_e2: e2.sigma2_element(),
        seed: ctx.instance_seed,
        wall_time_ms: start.elapsed().as_secs_f64() * 1000.0,
    }
}

/// Full experiment description. Serializes one-to-one to the JSON config
/// accepted by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub distribution: Distribution,
    pub flows: Vec<Flow>,
    pub exchange_limit: usize,
    pub master_seed: u64,
    pub output_path: PathBuf,
    /// Write measured wall times into the results CSV. Off by default so
    /// reruns with one master seed are byte-identical.
    #[serde(default)]
    pub include_timings: bool,
}

impl ExperimentConfig {
    /// Sweep sized to finish in minutes on a desktop.
    pub fn desk_scale() -> Self {
        Self {
            n_values: vec![20, 60, 100, 200],
            trials: 100,
            distribution: Distribution::Uniform01,
            flows: Flow::ALL.to_vec(),
            exchange_limit: 600,
            master_seed: 1,
            output_path: PathBuf::from("results.csv"),
            include_timings: false,
        }
    }

    /// The full sweep: n from 100 to 1000 in steps of 100, 100 trials.
    /// Takes hours at the top end.
    pub fn paper_scale() -> Self {
        Self {
            n_values: (1..=10).map(|k| k * 100).collect(),
            ..Self::desk_scale()
        }
    }

    pub fn from_json_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| PairError::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(PairError::Parse {
                line: 0,
                message: "trials must be at least 1".into(),
            });
        }
        if self.exchange_limit < 1 {
            return Err(PairError::Parse {
                line: 0,
                message: "exchange_limit must be at least 1".into(),
            });
        }
        if self.flows.is_empty() {
            return Err(PairError::Parse {
                line: 0,
                message: "at least one flow is required".into(),
            });
        }
        for &n in &self.n_values {
            crate::matrix::check_element_count(n)?;
        }
        Ok(())
    }
}

/// Runs every (n, trial, flow) cell of the experiment, writes the results
/// CSV and the per-(n, flow) summary CSV next to it, and returns the
/// records sorted by (n, distribution, trial, flow).
///
/// Trials execute in parallel on the current rayon pool; sorting plus
/// derived seeding make the output independent of scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let mut flows = config.flows.clone();
    flows.sort();
    flows.dedup();

    let cells: Vec<(usize, usize)> = config
        .n_values
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |t| (n, t)))
        .collect();

    let nested: Vec<Vec<TrialRecord>> = cells
        .par_iter()
        .map(|&(n, trial)| -> Result<Vec<TrialRecord>> {
            let instance_seed = derive_seed(&[config.master_seed, n as u64, trial as u64]);
            let ground_truth = generate(n, config.distribution, instance_seed)?;
            let records = flows
                .iter()
                .map(|&flow| {
                    let ctx = FlowContext {
                        distribution: config.distribution,
                        trial_index: trial,
                        instance_seed,
                        combine_seed: derive_seed(&[
                            config.master_seed,
                            n as u64,
                            trial as u64,
                            flow.index(),
                        ]),
                        exchange_limit: config.exchange_limit,
                    };
                    run_flow(flow, &ground_truth, &ctx)
                })
                .collect();
            Ok(records)
        })
        .collect::<Result<_>>()?;

    let mut records: Vec<TrialRecord> = nested.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (a.n, a.distribution, a.trial_index, a.flow).cmp(&(
            b.n,
            b.distribution,
            b.trial_index,
            b.flow,
        ))
    });

    if let Some(dir) = config.output_path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut out = std::fs::File::create(&config.output_path)?;
    write_results_csv(&records, &mut out, config.include_timings)?;
    let mut summary = std::fs::File::create(summary_path_for(&config.output_path))?;
    write_summary_csv(&summarize(&records), &mut summary)?;

    Ok(records)
}

/// Results CSV. Floats are shortest round-trip decimals; the wall-time
/// column reads 0 unless `include_timings` is set, keeping default output
/// byte-reproducible.
pub fn write_results_csv(
    records: &[TrialRecord],
    w: &mut impl Write,
    include_timings: bool,
) -> Result<()> {
    let mut buf =
        String::from("n,distribution,trial,flow,total,performance,sigma2_g,sigma2_e1,sigma2_e2,seed,wall_time_ms\n");
    for r in records {
        let wall = if include_timings { r.wall_time_ms } else { 0.0 };
        buf.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.distribution,
            r.trial_index,
            r.flow,
            r.total,
            r.performance,
            r.sigma2_g,
            r.sigma2_e1,
            r.sigma2_e2,
            r.seed,
            wall
        ));
    }
    w.write_all(buf.as_bytes())?;
    Ok(())
}

/// Mean and standard deviation of performance for one (n, distribution,
/// flow) group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub distribution: Distribution,
    pub flow: Flow,
    pub trials: usize,
    pub mean_performance: f64,
    pub std_performance: f64,
}

/// Groups records by (n, distribution, flow) and reduces each group to the
/// mean and sample standard deviation of performance.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryRow> {
    let mut groups: std::collections::BTreeMap<(usize, Distribution, Flow), Vec<f64>> =
        std::collections::BTreeMap::new();
    for r in records {
        groups
            .entry((r.n, r.distribution, r.flow))
            .or_default()
            .push(r.performance);
    }
    groups
        .into_iter()
        .map(|((n, distribution, flow), perfs)| {
            let count = perfs.len() as f64;
            let mean = perfs.iter().sum::<f64>() / count;
            let var = if perfs.len() > 1 {
                perfs.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (count - 1.0)
            } else {
                0.0
            };
            SummaryRow {
                n,
                distribution,
                flow,
                trials: perfs.len(),
                mean_performance: mean,
                std_performance: var.sqrt(),
            }
        })
        .collect()
}

pub fn write_summary_csv(rows: &[SummaryRow], w: &mut impl Write) -> Result<()> {
    let mut buf = String::from("n,distribution,flow,trials,mean_performance,std_performance\n");
    for r in rows {
        buf.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.distribution, r.flow, r.trials, r.mean_performance, r.std_performance
        ));
    }
    w.write_all(buf.as_bytes())?;
    Ok(())
}

/// `results.csv` -> `results_summary.csv`, preserving the directory.
pub fn summary_path_for(output_path: &Path) -> PathBuf {
    let stem = output_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".to_string());
    output_path.with_file_name(format!("{stem}_summary.csv"))
}
