use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::graph_model::{GraphonSpec, SparsityRate};

use super::{simulate, Dgp, SimConfig, SimulationReport};

/// Replications behind the published tables; `scale` multiplies this.
pub const PUBLISHED_REPS: usize = 5000;

/// Rows whose published Monte Carlo std exceeds this are heavy-tailed
/// (inconsistent regimes) and are reported without a pass/fail check.
const UNSTABLE_STD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableId {
    Mediator = 1,
    Ols = 2,
    IvSparse = 3,
    IvDense = 4,
    Normalized = 6,
}

impl TableId {
    pub fn number(self) -> u8 {
        self as u8
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Self::Mediator),
            "2" => Ok(Self::Ols),
            "3" => Ok(Self::IvSparse),
            "4" => Ok(Self::IvDense),
            "6" => Ok(Self::Normalized),
            other => Err(Error::InvalidConfig(format!("unknown table `{other}` (1, 2, 3, 4, 6)"))),
        }
    }
}

// Mediator table: (design, n, [mean; q = n^-1, n^-1/2, 1], [std; same q]).
const MEDIATOR: [(u8, usize, [f64; 3], [f64; 3]); 8] = [
    (1, 200, [0.173, 0.533, 0.534], [0.367, 0.272, 0.142]),
    (2, 200, [0.282, 0.507, 0.507], [0.420, 0.199, 0.134]),
    (3, 200, [0.282, 0.521, 0.522], [0.419, 0.155, 0.020]),
    (4, 200, [0.312, 0.523, 0.523], [0.425, 0.141, 0.012]),
    (1, 800, [0.174, 0.536, 0.535], [0.369, 0.208, 0.137]),
    (2, 800, [0.284, 0.508, 0.508], [0.422, 0.170, 0.135]),
    (3, 800, [0.282, 0.521, 0.522], [0.421, 0.108, 0.012]),
    (4, 800, [0.313, 0.523, 0.523], [0.427, 0.099, 0.006]),
];

// OLS table at q = n^-1/2: (design, n, coefficient,
// [post: mean, std, s.e., coverage, pre: mean, std, coverage]).
const OLS: [(u8, usize, usize, [f64; 7]); 16] = [
    (1, 200, 1, [1.000, 0.088, 0.087, 0.941, 1.097, 0.085, 0.789]),
    (1, 200, 2, [0.500, 0.161, 0.159, 0.940, 0.326, 0.167, 0.819]),
    (2, 200, 1, [1.000, 0.092, 0.091, 0.946, 1.093, 0.083, 0.796]),
    (2, 200, 2, [0.502, 0.232, 0.228, 0.945, 0.409, 0.275, 0.937]),
    (3, 200, 1, [1.001, 0.084, 0.082, 0.941, 0.991, 0.084, 0.945]),
    (3, 200, 2, [0.506, 0.285, 0.278, 0.936, 0.412, 0.255, 0.935]),
    (4, 200, 1, [0.999, 0.082, 0.082, 0.943, 0.998, 0.083, 0.948]),
    (4, 200, 2, [0.500, 0.292, 0.288, 0.940, 0.435, 0.277, 0.943]),
    (1, 800, 1, [0.999, 0.047, 0.046, 0.945, 1.095, 0.042, 0.360]),
    (1, 800, 2, [0.502, 0.112, 0.111, 0.950, 0.355, 0.123, 0.785]),
    (2, 800, 1, [1.000, 0.049, 0.049, 0.950, 1.092, 0.042, 0.396]),
    (2, 800, 2, [0.500, 0.146, 0.143, 0.945, 0.415, 0.198, 0.929]),
    (3, 800, 1, [1.000, 0.083, 0.082, 0.942, 0.990, 0.083, 0.946]),
    (3, 800, 2, [0.496, 0.481, 0.466, 0.936, 0.406, 0.431, 0.944]),
    (4, 800, 1, [1.000, 0.040, 0.041, 0.951, 0.999, 0.041, 0.951]),
    (4, 800, 2, [0.500, 0.207, 0.206, 0.948, 0.441, 0.198, 0.942]),
];

// IV tables: (design, n, coefficient,
// [ssiv: mean, std, s.e., coverage, denoised: mean, std, s.e., coverage]).
type IvRow = (u8, usize, usize, [f64; 8]);

const IV_SPARSE: [IvRow; 16] = [
    (1, 200, 1, [1.001, 0.083, 0.089, 0.950, 1.001, 0.083, 0.087, 0.950]),
    (1, 200, 2, [0.501, 0.207, 0.215, 0.953, 0.499, 0.203, 0.214, 0.956]),
    (2, 200, 1, [0.999, 0.083, 0.087, 0.954, 1.000, 0.083, 0.082, 0.940]),
    (2, 200, 2, [0.505, 0.150, 0.157, 0.952, 0.505, 0.168, 0.210, 0.983]),
    (3, 200, 1, [0.999, 0.083, 0.083, 0.944, 0.999, 0.083, 0.083, 0.944]),
    (3, 200, 2, [0.500, 0.142, 0.146, 0.953, 0.500, 0.143, 0.149, 0.949]),
    (4, 200, 1, [1.000, 0.082, 0.084, 0.949, 1.000, 0.082, 0.084, 0.950]),
    (4, 200, 2, [0.502, 0.137, 0.142, 0.955, 0.502, 0.138, 0.145, 0.956]),
    (1, 800, 1, [1.000, 0.040, 0.044, 0.955, 1.000, 0.040, 0.042, 0.954]),
    (1, 800, 2, [0.501, 0.099, 0.101, 0.951, 0.501, 0.098, 0.097, 0.946]),
    (2, 800, 1, [1.000, 0.040, 0.042, 0.957, 1.000, 0.040, 0.042, 0.956]),
    (2, 800, 2, [0.500, 0.076, 0.076, 0.948, 0.501, 0.078, 0.081, 0.958]),
    (3, 800, 1, [1.000, 0.041, 0.041, 0.950, 1.000, 0.041, 0.041, 0.950]),
    (3, 800, 2, [0.500, 0.072, 0.071, 0.946, 0.500, 0.072, 0.072, 0.946]),
    (4, 800, 1, [1.000, 0.041, 0.041, 0.950, 1.000, 0.041, 0.041, 0.950]),
    (4, 800, 2, [0.501, 0.068, 0.069, 0.957, 0.501, 0.068, 0.069, 0.953]),
];

const IV_DENSE: [IvRow; 24] = [
    (1, 200, 1, [1.006, 0.236, 0.307, 0.980, 0.999, 0.114, 0.123, 0.945]),
    (1, 200, 2, [0.455, 1.501, 1.584, 0.950, 0.514, 0.452, 0.522, 0.974]),
    (2, 200, 1, [0.946, 0.330, 0.369, 0.972, 0.997, 0.144, 0.167, 0.952]),
    (2, 200, 2, [0.944, 2.257, 2.041, 0.959, 0.537, 0.750, 0.846, 0.978]),
    (3, 200, 1, [0.999, 0.085, 0.090, 0.939, 0.999, 0.084, 0.088, 0.940]),
    (3, 200, 2, [0.511, 0.990, 1.189, 0.963, 0.504, 0.883, 1.027, 0.963]),
    (4, 200, 1, [1.000, 0.091, 0.086, 0.950, 1.000, 0.083, 0.084, 0.950]),
    (4, 200, 2, [0.526, 1.562, 1.773, 0.976, 0.507, 0.669, 0.777, 0.973]),
    (1, 800, 1, [1.023, 0.379, 0.401, 0.989, 1.001, 0.077, 0.082, 0.947]),
    (1, 800, 2, [0.376, 2.167, 2.106, 0.947, 0.498, 0.348, 0.380, 0.966]),
    (2, 800, 1, [0.879, 1.380, 0.453, 0.973, 0.998, 0.092, 0.103, 0.953]),
    (2, 800, 2, [1.278, 8.703, 2.507, 0.957, 0.509, 0.463, 0.521, 0.971]),
    (3, 800, 1, [1.000, 0.044, 0.047, 0.949, 1.000, 0.041, 0.044, 0.949]),
    (3, 800, 2, [0.518, 0.957, 1.041, 0.952, 0.494, 0.709, 0.777, 0.961]),
    (4, 800, 1, [1.000, 0.047, 0.042, 0.948, 1.000, 0.041, 0.041, 0.948]),
    (4, 800, 2, [0.514, 1.921, 1.991, 0.973, 0.489, 0.435, 0.489, 0.969]),
    (1, 1600, 1, [1.018, 0.907, 0.908, 0.990, 1.000, 0.068, 0.071, 0.944]),
    (1, 1600, 2, [0.405, 5.250, 5.023, 0.968, 0.499, 0.320, 0.340, 0.960]),
    (2, 1600, 1, [0.800, 2.976, 3.023, 0.979, 0.999, 0.077, 0.085, 0.953]),
    (2, 1600, 2, [1.685, 17.444, 17.494, 0.916, 0.506, 0.395, 0.438, 0.967]),
    (3, 1600, 1, [1.001, 0.031, 0.030, 0.943, 1.001, 0.031, 0.030, 0.946]),
    (3, 1600, 2, [0.507, 0.876, 0.903, 0.958, 0.499, 0.579, 0.615, 0.958]),
    (4, 1600, 1, [1.000, 0.034, 0.030, 0.953, 1.000, 0.029, 0.029, 0.952]),
    (4, 1600, 2, [0.477, 2.201, 2.219, 0.970, 0.501, 0.370, 0.414, 0.970]),
];

// Normalized instrument: (design, n, coefficient,
// [mean, std] for q = n^-2/3, n^-1/3, n^-1/5).
const NORMALIZED: [(u8, usize, usize, [f64; 6]); 16] = [
    (1, 200, 1, [1.003, 0.082, 1.001, 0.099, 1.004, 0.209]),
    (1, 200, 2, [0.476, 0.192, 0.486, 0.639, 0.467, 1.367]),
    (2, 200, 1, [1.001, 0.082, 0.990, 0.131, 0.935, 0.386]),
    (2, 200, 2, [0.506, 0.229, 0.606, 0.908, 1.005, 2.528]),
    (3, 200, 1, [1.000, 0.082, 0.998, 0.084, 0.997, 0.083]),
    (3, 200, 2, [0.518, 0.164, 0.503, 0.474, 0.515, 0.759]),
    (4, 200, 1, [1.000, 0.082, 1.001, 0.087, 1.001, 0.092]),
    (4, 200, 2, [0.496, 0.211, 0.494, 0.797, 0.509, 1.701]),
    (1, 800, 1, [1.003, 0.039, 1.002, 0.113, 1.006, 0.336]),
    (1, 800, 2, [0.488, 0.115, 0.483, 0.716, 0.466, 1.937]),
    (2, 800, 1, [1.000, 0.040, 0.986, 0.135, 0.841, 2.325]),
    (2, 800, 2, [0.499, 0.149, 0.605, 0.888, 1.479, 13.681]),
    (3, 800, 1, [0.999, 0.041, 1.000, 0.041, 1.000, 0.043]),
    (3, 800, 2, [0.505, 0.105, 0.499, 0.370, 0.491, 0.637]),
    (4, 800, 1, [1.000, 0.040, 0.999, 0.043, 1.000, 0.047]),
    (4, 800, 2, [0.500, 0.142, 0.493, 0.796, 0.496, 2.075]),
];

#[derive(Debug, Clone)]
pub struct TableOptions {
    /// Multiplies the published replication count (0.2 gives 1000).
    pub scale: f64,
    /// Overrides `scale` when set.
    pub reps: Option<usize>,
    pub seed: u64,
    pub jobs: Option<usize>,
    /// Restricts the run to these designs (all when empty).
    pub designs: Vec<u8>,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self { scale: 0.2, reps: None, seed: 0, jobs: None, designs: Vec::new() }
    }
}

impl TableOptions {
    pub fn reps(&self) -> usize {
        self.reps.unwrap_or_else(|| ((PUBLISHED_REPS as f64 * self.scale).round() as usize).max(1))
    }

    fn includes(&self, design: u8) -> bool {
        self.designs.is_empty() || self.designs.contains(&design)
    }
}

/// One published number next to its reproduction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCheck {
    pub design: u8,
    pub n: usize,
    pub q: String,
    /// `mediator` for the mediator table, else the estimator name.
    pub series: String,
    /// `beta1`/`beta2`, or `M`.
    pub coefficient: String,
    pub statistic: String,
    pub published: f64,
    pub reproduced: f64,
    /// Absent for heavy-tailed rows, which are shown but not checked.
    pub tolerance: Option<f64>,
    pub within: Option<bool>,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableReport {
    pub table: u8,
    pub reps: usize,
    pub seed: u64,
    pub cells: Vec<CellCheck>,
    pub runs: Vec<SimulationReport>,
    pub elapsed_secs: f64,
}

impl TableReport {
    pub fn run(&self, design: u8, n: usize, q: SparsityRate) -> Option<&SimulationReport> {
        let name = GraphonSpec::from_design_number(design).ok()?.name().to_string();
        self.runs.iter().find(|r| r.design == name && r.n == n && r.q_post == q)
    }

    pub fn checked(&self) -> impl Iterator<Item = &CellCheck> {
        self.cells.iter().filter(|c| c.within.is_some())
    }

    pub fn all_within(&self) -> bool {
        self.checked().all(|c| c.within == Some(true))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "table", "design", "n", "q", "series", "coefficient", "statistic", "published", "reproduced", "tolerance",
            "within", "failures",
        ])?;
        for c in &self.cells {
            w.write_record([
                self.table.to_string(),
                c.design.to_string(),
                c.n.to_string(),
                c.q.clone(),
                c.series.clone(),
                c.coefficient.clone(),
                c.statistic.clone(),
                format!("{:.4}", c.published),
                format!("{:.4}", c.reproduced),
                c.tolerance.map_or(String::new(), |t| format!("{t:.4}")),
                c.within.map_or(String::new(), |b| b.to_string()),
                c.failures.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let checked = self.checked().count();
        let ok = self.checked().filter(|c| c.within == Some(true)).count();
        let _ = writeln!(s, "# Table {} ({} replications, seed {})\n", self.table, self.reps, self.seed);
        let _ = writeln!(s, "{ok} of {checked} checked cells within tolerance; {:.1} s.\n", self.elapsed_secs);
        s.push_str("| design | n | q | series | coef | stat | published | reproduced | tolerance | ok |\n");
        s.push_str("|---|---|---|---|---|---|---|---|---|---|\n");
        for c in &self.cells {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {:.3} | {:.3} | {} | {} |",
                c.design,
                c.n,
                c.q,
                c.series,
                c.coefficient,
                c.statistic,
                c.published,
                c.reproduced,
                c.tolerance.map_or("-".into(), |t| format!("±{t:.3}")),
                match c.within {
                    Some(true) => "yes",
                    Some(false) => "NO",
                    None => "-",
                }
            );
        }
        s
    }

    /// Writes `table{id}.csv` and `table{id}.md` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("table{}.csv", self.table));
        let md_path = dir.join(format!("table{}.md", self.table));
        fs::write(&csv_path, self.to_csv()?)?;
        fs::write(&md_path, self.to_markdown())?;
        Ok((csv_path, md_path))
    }
}

/// Widens a tolerance calibrated at 1000 replications for smaller runs.
fn widen(reps: usize) -> f64 {
    (1000.0 / reps as f64).sqrt().max(1.0)
}

struct Checker {
    reps: usize,
    cells: Vec<CellCheck>,
}

#[derive(Clone, Copy)]
enum Tol {
    Abs(f64),
    Rel(f64),
    Unchecked,
}

impl Checker {
    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, design: u8, n: usize, q: &str, series: &str, coef: &str, stat: &str, published: f64, got: f64, tol: Tol, failures: usize) {
        let f = widen(self.reps);
        let tolerance = match tol {
            Tol::Abs(t) => Some(t * f),
            Tol::Rel(r) => Some(r * f * published.abs()),
            Tol::Unchecked => None,
        };
        self.cells.push(CellCheck {
            design,
            n,
            q: q.to_string(),
            series: series.to_string(),
            coefficient: coef.to_string(),
            statistic: stat.to_string(),
            published,
            reproduced: got,
            tolerance,
            within: tolerance.map(|t| got.is_finite() && (got - published).abs() <= t),
            failures,
        });
    }

    /// Mean, std, and optionally s.e. and coverage of one coefficient.
    #[allow(clippy::too_many_arguments)]
    fn coefficient(
        &mut self,
        design: u8,
        n: usize,
        q: &str,
        report: &SimulationReport,
        kind: EstimatorKind,
        coef: usize,
        published: &[f64],
        coverage_tol: f64,
    ) {
        let Some(s) = report.estimator(kind) else { return };
        let c = &s.coefficients[coef];
        let name = format!("beta{coef}");
        let series = kind.name();
        let heavy = published[1] > UNSTABLE_STD;
        let mean_base = if coef == 1 { 0.02 } else { 0.03 };
        let mc = 3.0 * published[1] / (self.reps as f64).sqrt();
        let tol = |t: Tol| if heavy { Tol::Unchecked } else { t };
        self.push(design, n, q, series, &name, "mean", published[0], c.mean, tol(Tol::Abs(f64::max(mean_base, mc))), s.failures);
        self.push(design, n, q, series, &name, "std", published[1], c.std, tol(Tol::Rel(0.15)), s.failures);
        match published.len() {
            4 => {
                self.push(design, n, q, series, &name, "se", published[2], c.mean_se.unwrap_or(f64::NAN), tol(Tol::Rel(0.15)), s.failures);
                self.push(design, n, q, series, &name, "coverage", published[3], c.coverage.unwrap_or(f64::NAN), tol(Tol::Abs(coverage_tol)), s.failures);
            }
            3 => {
                self.push(design, n, q, series, &name, "coverage", published[2], c.coverage.unwrap_or(f64::NAN), tol(Tol::Abs(coverage_tol)), s.failures);
            }
            _ => {}
        }
    }
}

fn power(e: f64) -> SparsityRate {
    SparsityRate::PowerOfN(e)
}

fn config(design: u8, n: usize, q: SparsityRate, dgp: Dgp, estimators: &[EstimatorKind], opts: &TableOptions) -> Result<SimConfig> {
    let mut cfg = SimConfig::new(GraphonSpec::from_design_number(design)?, n, q, dgp)
        .with_estimators(estimators.iter().copied())
        .with_reps(opts.reps())
        .with_seed(opts.seed);
    cfg.jobs = opts.jobs;
    Ok(cfg)
}

/// Runs the configurations behind one published simulation table and lines
/// the reproduced numbers up against the published ones.
pub fn reproduce_table(id: TableId, opts: &TableOptions) -> Result<TableReport> {
    let start = std::time::Instant::now();
    let reps = opts.reps();
    let mut ck = Checker { reps, cells: Vec::new() };
    let mut runs = Vec::new();
    match id {
        TableId::Mediator => {
            let qs = [(power(-1.0), "n^-1"), (power(-0.5), "n^-1/2"), (SparsityRate::Constant(1.0), "const:1")];
            for &(d, n, means, stds) in MEDIATOR.iter().filter(|r| opts.includes(r.0)) {
                for (k, (q, label)) in qs.iter().enumerate() {
                    let r = simulate(&config(d, n, *q, Dgp::Exogenous, &[], opts)?)?;
                    ck.push(d, n, label, "mediator", "M", "mean", means[k], r.mediator_mean, Tol::Abs(0.02), 0);
                    ck.push(d, n, label, "mediator", "M", "std", stds[k], r.mediator_std, Tol::Rel(0.15), 0);
                    runs.push(r);
                }
            }
        }
        TableId::Ols => {
            let ests = [EstimatorKind::Ols, EstimatorKind::OlsPre];
            for pair in OLS.chunks(2).filter(|p| opts.includes(p[0].0)) {
                let (d, n) = (pair[0].0, pair[0].1);
                let r = simulate(&config(d, n, power(-0.5), Dgp::Exogenous, &ests, opts)?)?;
                for &(_, _, coef, v) in pair {
                    ck.coefficient(d, n, "n^-1/2", &r, EstimatorKind::Ols, coef, &v[..4], 0.03);
                    ck.coefficient(d, n, "n^-1/2", &r, EstimatorKind::OlsPre, coef, &v[4..], 0.03);
                }
                runs.push(r);
            }
        }
        TableId::IvSparse | TableId::IvDense => {
            let (rows, q, label, cov_tol): (&[IvRow], _, _, _) = if id == TableId::IvSparse {
                (&IV_SPARSE, SparsityRate::LogOverLogLogOverN, "loglog", 0.03)
            } else {
                (&IV_DENSE, power(-0.2), "n^-1/5", 0.04)
            };
            let ests = [EstimatorKind::Ssiv, EstimatorKind::DenoisedSsiv];
            for pair in rows.chunks(2).filter(|p| opts.includes(p[0].0)) {
                let (d, n) = (pair[0].0, pair[0].1);
                let r = simulate(&config(d, n, q, Dgp::Endogenous, &ests, opts)?)?;
                for &(_, _, coef, v) in pair {
                    ck.coefficient(d, n, label, &r, EstimatorKind::Ssiv, coef, &v[..4], cov_tol);
                    ck.coefficient(d, n, label, &r, EstimatorKind::DenoisedSsiv, coef, &v[4..], cov_tol);
                }
                runs.push(r);
            }
        }
        TableId::Normalized => {
            let qs = [(power(-2.0 / 3.0), "n^-2/3"), (power(-1.0 / 3.0), "n^-1/3"), (power(-0.2), "n^-1/5")];
            let ests = [EstimatorKind::NormalizedSsiv];
            for pair in NORMALIZED.chunks(2).filter(|p| opts.includes(p[0].0)) {
                let (d, n) = (pair[0].0, pair[0].1);
                for (k, (q, label)) in qs.iter().enumerate() {
                    let r = simulate(&config(d, n, *q, Dgp::Endogenous, &ests, opts)?)?;
                    for &(_, _, coef, v) in pair {
                        ck.coefficient(d, n, label, &r, EstimatorKind::NormalizedSsiv, coef, &v[2 * k..2 * k + 2], 0.0);
                    }
                    runs.push(r);
                }
            }
        }
    }
    Ok(TableReport {
        table: id.number(),
        reps,
        seed: opts.seed,
        cells: ck.cells,
        runs,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Published value of one statistic, for callers that check shapes rather
/// than individual cells. `statistic` is `mean`, `std`, `se` or `coverage`.
pub fn published(id: TableId, design: u8, n: usize, coef: usize, series: EstimatorKind, statistic: &str, q_index: usize) -> Option<f64> {
    let stat = ["mean", "std", "se", "coverage"].iter().position(|s| *s == statistic)?;
    match id {
        TableId::Ols => {
            let row = OLS.iter().find(|r| r.0 == design && r.1 == n && r.2 == coef)?;
            match (series, stat) {
                (EstimatorKind::Ols, s) => Some(row.3[s]),
                (EstimatorKind::OlsPre, 0 | 1) => Some(row.3[4 + stat]),
                (EstimatorKind::OlsPre, 3) => Some(row.3[6]),
                _ => None,
            }
        }
        TableId::IvSparse | TableId::IvDense => {
            let rows: &[IvRow] = if id == TableId::IvSparse { &IV_SPARSE } else { &IV_DENSE };
            let row = rows.iter().find(|r| r.0 == design && r.1 == n && r.2 == coef)?;
            match series {
                EstimatorKind::Ssiv => Some(row.3[stat]),
                EstimatorKind::DenoisedSsiv => Some(row.3[4 + stat]),
                _ => None,
            }
        }
        TableId::Normalized => {
            let row = NORMALIZED.iter().find(|r| r.0 == design && r.1 == n && r.2 == coef)?;
            (stat < 2 && q_index < 3).then(|| row.3[2 * q_index + stat])
        }
        TableId::Mediator => {
            let row = MEDIATOR.iter().find(|r| r.0 == design && r.1 == n)?;
            match stat {
                0 => row.2.get(q_index).copied(),
                1 => row.3.get(q_index).copied(),
                _ => None,
            }
        }
    }
}
