//! Replication harness: draws a full dataset per replication, runs the
//! requested estimators on it and aggregates what the simulation tables report.

mod tables;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::graph_model::{
    generate_network, Adjacency, DisturbanceMatrix, GraphonSpec, LatentDistribution, LatentDraws, Phase, SparsityRate,
};
use crate::mediator::{draw_treatments, mediator, MediatorKind};
use crate::outcome::{true_effects_oracle, Estimands, OracleConfig, OutcomeModel};
use crate::pipeline::{EstimationData, EstimatorOptions, RankPolicy};
use crate::rng::{stream_rng, Stream};
use crate::stats::{mean, sample_std};
use crate::variance::{covers, intervals, VarianceChoice};

pub use tables::{published, reproduce_table, CellCheck, TableId, TableOptions, TableReport, PUBLISHED_REPS};

/// Default share of failed replications tolerated per estimator.
pub const DEFAULT_MAX_FAILURE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dgp {
    /// No confounding, `eps ~ U[-1, 1]`.
    Exogenous,
    /// Error `(w + eps) / 2`.
    Endogenous,
}

impl Dgp {
    pub fn model(self) -> OutcomeModel {
        match self {
            Self::Exogenous => OutcomeModel::exogenous(),
            Self::Endogenous => OutcomeModel::endogenous(),
        }
    }
}

impl fmt::Display for Dgp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exogenous => "exogenous",
            Self::Endogenous => "endogenous",
        })
    }
}

impl FromStr for Dgp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exogenous" => Ok(Self::Exogenous),
            "endogenous" => Ok(Self::Endogenous),
            other => Err(Error::InvalidConfig(format!("unknown dgp `{other}` (exogenous, endogenous)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub design: GraphonSpec,
    pub n: usize,
    pub q_pre: SparsityRate,
    pub q_post: SparsityRate,
    pub outcome: OutcomeModel,
    pub estimators: Vec<EstimatorKind>,
    pub reps: usize,
    pub seed: u64,
    pub pi: f64,
    /// `None` uses the design's rank, or the gap heuristic for custom kernels.
    pub rank: Option<RankPolicy>,
    pub variance: VarianceChoice,
    pub mediator: MediatorKind,
    pub latent: LatentDistribution,
    pub level: f64,
    pub max_failure_fraction: f64,
    /// Worker threads; `None` uses rayon's default.
    pub jobs: Option<usize>,
    /// Replications for the population-estimand oracle; `None` skips it.
    pub oracle_reps: Option<usize>,
}

impl SimConfig {
    pub fn new(design: GraphonSpec, n: usize, q: SparsityRate, dgp: Dgp) -> Self {
        Self {
            design,
            n,
            q_pre: q,
            q_post: q,
            outcome: dgp.model(),
            estimators: Vec::new(),
            reps: 1000,
            seed: 0,
            pi: 0.5,
            rank: None,
            variance: VarianceChoice::Default,
            mediator: MediatorKind::Fraction,
            latent: LatentDistribution::StandardNormal,
            level: 0.95,
            max_failure_fraction: DEFAULT_MAX_FAILURE_FRACTION,
            jobs: None,
            oracle_reps: None,
        }
    }

    pub fn with_estimators(mut self, estimators: impl IntoIterator<Item = EstimatorKind>) -> Self {
        self.estimators = estimators.into_iter().collect();
        self
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps < 1 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if self.n < 3 {
            return Err(Error::InvalidSize(format!("need at least 3 units, got {}", self.n)));
        }
        if !(self.pi > 0.0 && self.pi < 1.0) {
            return Err(Error::InvalidConfig(format!("assignment probability must lie in (0, 1), got {}", self.pi)));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidConfig(format!("confidence level must lie in (0, 1), got {}", self.level)));
        }
        if !(0.0..=1.0).contains(&self.max_failure_fraction) {
            return Err(Error::InvalidConfig("max failure fraction must lie in [0, 1]".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        self.q_pre.validate()?;
        self.q_post.validate()?;
        self.outcome.noise.validate()?;
        Ok(())
    }

    pub fn rank_policy(&self) -> RankPolicy {
        self.rank.unwrap_or_else(|| self.design.default_rank().map_or(RankPolicy::Auto, RankPolicy::Fixed))
    }

    fn needs_pre_network(&self) -> bool {
        !self.estimators.is_empty()
    }
}

/// What one estimator produced on one replication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub beta: [f64; 3],
    pub se: Option<[f64; 3]>,
    pub covered: Option<[bool; 3]>,
    pub rank: Option<usize>,
    pub ie: Option<f64>,
    pub toe: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationRecord {
    pub replication: u64,
    /// Within-sample mean and standard deviation of the mediator.
    pub mediator_mean: f64,
    pub mediator_std: f64,
    /// One entry per requested estimator, in request order; `Err` holds the
    /// failure message.
    pub estimates: Vec<(EstimatorKind, std::result::Result<EstimateRecord, String>)>,
}

/// One simulated dataset, as fed to the estimators.
#[derive(Debug, Clone)]
pub struct SimulatedData {
    pub latents: LatentDraws,
    pub t: Vec<u8>,
    pub a_pre: Adjacency,
    pub a_post: Adjacency,
    pub y: Vec<f64>,
}

/// Draws replication `rep` of `cfg` with the same streams the harness uses.
pub fn draw_dataset(cfg: &SimConfig, rep: u64) -> Result<SimulatedData> {
    cfg.validate()?;
    let n = cfg.n;
    let latents = LatentDraws::sample_with(&mut stream_rng(cfg.seed, rep, Stream::Latents), n, cfg.latent, cfg.seed)?;
    let eta = DisturbanceMatrix::sample_with(&mut stream_rng(cfg.seed, rep, Stream::Disturbances), n)?;
    let t = draw_treatments(&mut stream_rng(cfg.seed, rep, Stream::Treatments), n, cfg.pi)?;
    let a_post = generate_network(&cfg.design, Phase::Post, cfg.q_post, &latents, Some(&t), &eta)?;
    let a_pre = generate_network(&cfg.design, Phase::Pre, cfg.q_pre, &latents, None, &eta)?;
    let m = mediator(&a_post, &t, cfg.mediator)?;
    let y = cfg.outcome.generate_with(&mut stream_rng(cfg.seed, rep, Stream::Noise), &t, &m, &latents)?;
    Ok(SimulatedData { latents, t, a_pre, a_post, y })
}

/// Draws one dataset and fits every requested estimator to it. Deterministic
/// in `(cfg.seed, rep)`.
pub fn run_replication(cfg: &SimConfig, rep: u64) -> Result<ReplicationRecord> {
    let n = cfg.n;
    let latents = LatentDraws::sample_with(&mut stream_rng(cfg.seed, rep, Stream::Latents), n, cfg.latent, cfg.seed)?;
    let eta = DisturbanceMatrix::sample_with(&mut stream_rng(cfg.seed, rep, Stream::Disturbances), n)?;
    let t = draw_treatments(&mut stream_rng(cfg.seed, rep, Stream::Treatments), n, cfg.pi)?;
    let a_post = generate_network(&cfg.design, Phase::Post, cfg.q_post, &latents, Some(&t), &eta)?;
    let m = mediator(&a_post, &t, cfg.mediator)?;
    let mut record = ReplicationRecord {
        replication: rep,
        mediator_mean: mean(&m.m),
        mediator_std: sample_std(&m.m),
        estimates: Vec::with_capacity(cfg.estimators.len()),
    };
    if !cfg.needs_pre_network() {
        return Ok(record);
    }
    let a_pre = generate_network(&cfg.design, Phase::Pre, cfg.q_pre, &latents, None, &eta)?;
    drop(eta);
    let y = cfg.outcome.generate_with(&mut stream_rng(cfg.seed, rep, Stream::Noise), &t, &m, &latents)?;
    let mut data = EstimationData::new(&a_pre, &a_post, &t, &y, cfg.pi, cfg.mediator)?;
    let opts = EstimatorOptions { rank: cfg.rank_policy(), variance: cfg.variance };
    for &kind in &cfg.estimators {
        let outcome = data.estimate(kind, &opts).and_then(|est| {
            let (se, covered) = match &est.cov {
                Some(c) => {
                    let ci = intervals(&est.fit.beta_hat, &c.se, cfg.level)?;
                    (Some(c.se), Some(covers(&ci, &cfg.outcome.beta)))
                }
                None => (None, None),
            };
            Ok(EstimateRecord {
                beta: est.fit.beta_hat,
                se,
                covered,
                rank: est.rank.map(|r| r.rank),
                ie: est.effects.map(|e| e.ie),
                toe: est.effects.map(|e| e.toe),
            })
        });
        if let Err(e) = &outcome {
            log::debug!("replication {rep}: {kind} failed: {e}");
        }
        record.estimates.push((kind, outcome.map_err(|e| e.to_string())));
    }
    Ok(record)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSummary {
    pub mean: f64,
    pub std: f64,
    /// Mean standard error over replications with a variance estimate.
    pub mean_se: Option<f64>,
    pub coverage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub estimator: EstimatorKind,
    pub successes: usize,
    pub failures: usize,
    /// First failure message, if any.
    pub first_failure: Option<String>,
    /// Intercept, direct effect, spillover.
    pub coefficients: [CoefficientSummary; 3],
    pub mean_ie: Option<f64>,
    pub mean_toe: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub design: String,
    pub n: usize,
    pub q_pre: SparsityRate,
    pub q_post: SparsityRate,
    pub reps: usize,
    pub seed: u64,
    /// Mean over replications of the within-sample mediator mean.
    pub mediator_mean: f64,
    /// Mean over replications of the within-sample mediator standard deviation.
    pub mediator_std: f64,
    pub estimators: Vec<EstimatorSummary>,
    pub oracle: Option<Estimands>,
    pub elapsed_secs: f64,
}

impl SimulationReport {
    pub fn estimator(&self, kind: EstimatorKind) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|e| e.estimator == kind)
    }

    /// Errors if any estimator failed on more than `max_fraction` of the
    /// replications, or on all of them.
    pub fn check_failures(&self, max_fraction: f64) -> Result<()> {
        for e in &self.estimators {
            let total = e.successes + e.failures;
            if e.failures > 0 && (e.successes == 0 || e.failures as f64 > max_fraction * total as f64) {
                return Err(Error::AggregateFailure {
                    estimator: e.estimator.to_string(),
                    failed: e.failures,
                    total,
                });
            }
        }
        Ok(())
    }

    /// One row per estimator and coefficient.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "design", "n", "q", "reps", "estimator", "coefficient", "mean", "std", "mean_se", "coverage", "successes",
            "failures",
        ])?;
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x}"));
        for e in &self.estimators {
            for (k, c) in e.coefficients.iter().enumerate() {
                w.write_record([
                    self.design.clone(),
                    self.n.to_string(),
                    self.q_post.to_string(),
                    self.reps.to_string(),
                    e.estimator.to_string(),
                    format!("beta{k}"),
                    format!("{}", c.mean),
                    format!("{}", c.std),
                    opt(c.mean_se),
                    opt(c.coverage),
                    e.successes.to_string(),
                    e.failures.to_string(),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn summarize(kind: EstimatorKind, records: &[ReplicationRecord]) -> EstimatorSummary {
    let mut ok = Vec::new();
    let mut failures = 0;
    let mut first_failure = None;
    for r in records {
        for (k, e) in &r.estimates {
            if *k != kind {
                continue;
            }
            match e {
                Ok(e) => ok.push(e),
                Err(msg) => {
                    failures += 1;
                    first_failure.get_or_insert_with(|| msg.clone());
                }
            }
        }
    }
    let coefficients = [0, 1, 2].map(|c| {
        let betas: Vec<f64> = ok.iter().map(|e| e.beta[c]).collect();
        let ses: Vec<f64> = ok.iter().filter_map(|e| e.se.map(|s| s[c])).collect();
        let cov: Vec<f64> = ok.iter().filter_map(|e| e.covered.map(|v| f64::from(u8::from(v[c])))).collect();
        CoefficientSummary {
            mean: mean(&betas),
            std: sample_std(&betas),
            mean_se: (!ses.is_empty()).then(|| mean(&ses)),
            coverage: (!cov.is_empty()).then(|| mean(&cov)),
        }
    });
    let opt_mean = |f: &dyn Fn(&EstimateRecord) -> Option<f64>| {
        let v: Vec<f64> = ok.iter().filter_map(|e| f(e)).collect();
        (!v.is_empty()).then(|| mean(&v))
    };
    EstimatorSummary {
        estimator: kind,
        successes: ok.len(),
        failures,
        first_failure,
        coefficients,
        mean_ie: opt_mean(&|e| e.ie),
        mean_toe: opt_mean(&|e| e.toe),
    }
}

/// Aggregates replication records given in replication order.
pub fn aggregate(cfg: &SimConfig, records: &[ReplicationRecord], elapsed_secs: f64) -> SimulationReport {
    let mm: Vec<f64> = records.iter().map(|r| r.mediator_mean).collect();
    let ms: Vec<f64> = records.iter().map(|r| r.mediator_std).collect();
    SimulationReport {
        design: cfg.design.name().to_string(),
        n: cfg.n,
        q_pre: cfg.q_pre,
        q_post: cfg.q_post,
        reps: records.len(),
        seed: cfg.seed,
        mediator_mean: mean(&mm),
        mediator_std: mean(&ms),
        estimators: cfg.estimators.iter().map(|&k| summarize(k, records)).collect(),
        oracle: None,
        elapsed_secs,
    }
}

fn run_records(cfg: &SimConfig) -> Result<Vec<ReplicationRecord>> {
    let work = || (0..cfg.reps as u64).into_par_iter().map(|r| run_replication(cfg, r)).collect::<Result<Vec<_>>>();
    match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start {j} workers: {e}")))?
            .install(work),
        None => work(),
    }
}

/// Runs all replications without enforcing the failure limit.
pub fn simulate(cfg: &SimConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    let start = Instant::now();
    let records = run_records(cfg)?;
    let mut report = aggregate(cfg, &records, 0.0);
    if let Some(reps) = cfg.oracle_reps {
        let oc = OracleConfig { n: cfg.n, reps, pi: cfg.pi, seed: cfg.seed, latent: cfg.latent };
        report.oracle = Some(true_effects_oracle(&cfg.design, cfg.q_post, &cfg.outcome, &oc)?);
    }
    report.elapsed_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Runs all replications in parallel and aggregates them in replication
/// order, so the report does not depend on the number of workers.
pub fn run_simulation(cfg: &SimConfig) -> Result<SimulationReport> {
    let report = simulate(cfg)?;
    report.check_failures(cfg.max_failure_fraction)?;
    Ok(report)
}
