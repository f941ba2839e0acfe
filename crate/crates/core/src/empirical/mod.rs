//! Panel-network data: a units file plus pre- and post-intervention edge
//! lists, and the estimator battery run on it.
//!
//! The units file is a CSV with a header whose first two columns are the unit
//! id and the 0/1 treatment; every further column is a numeric outcome, with
//! empty, `NA`, `NaN`, `.` or `null` marking a missing value. Edge files hold
//! one undirected link per row as two id columns and carry no header unless
//! [`LoadOptions::edge_header`] is set. Lines starting with `#` are ignored.

mod estimate;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph_model::{Adjacency, LatentDistribution, LatentDraws};
use crate::mediator::{draw_treatments, mediator, MediatorKind};
use crate::montecarlo::{draw_dataset, SimConfig};
use crate::outcome::OutcomeModel;
use crate::rng::{stream_rng, Stream};

pub use estimate::{estimate_all, estimate_columns, stars, EmpiricalOptions, EmpiricalRow, EmpiricalTable, RowFit};

const MISSING: [&str; 6] = ["", "na", "nan", ".", "null", "n/a"];

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Declared assignment probability; inferred from the sample when absent.
    pub pi: Option<f64>,
    /// Skip the first row of each edge file.
    pub edge_header: bool,
}

/// How an edge file was read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct EdgeFileSummary {
    pub rows: usize,
    pub self_loops: usize,
    /// Rows naming a pair already seen, in either orientation.
    pub duplicates: usize,
    pub edges: usize,
}

/// Links kept, broken and formed between the two networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinkTurnover {
    pub pre: usize,
    pub post: usize,
    pub kept: usize,
    pub broken: usize,
    pub formed: usize,
}

impl LinkTurnover {
    pub fn between(pre: &Adjacency, post: &Adjacency) -> Self {
        let kept = pre.edges().filter(|&(i, j)| post.contains(i, j)).count();
        Self {
            pre: pre.edge_count(),
            post: post.edge_count(),
            kept,
            broken: pre.edge_count() - kept,
            formed: post.edge_count() - kept,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PanelDataset {
    pub ids: Vec<String>,
    pub t: Vec<u8>,
    /// Outcome columns in file order; missing values are NaN.
    pub outcomes: Vec<(String, Vec<f64>)>,
    pub a_pre: Adjacency,
    pub a_post: Adjacency,
    pub pi: Option<f64>,
    pub pre_summary: EdgeFileSummary,
    pub post_summary: EdgeFileSummary,
}

impl PartialEq for PanelDataset {
    fn eq(&self, other: &Self) -> bool {
        let same_column = |a: &[f64], b: &[f64]| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y || (x.is_nan() && y.is_nan()))
        };
        self.ids == other.ids
            && self.t == other.t
            && self.a_pre == other.a_pre
            && self.a_post == other.a_post
            && self.pi == other.pi
            && self.outcomes.len() == other.outcomes.len()
            && self.outcomes.iter().zip(&other.outcomes).all(|(a, b)| a.0 == b.0 && same_column(&a.1, &b.1))
    }
}

fn reader(path: &Path, has_headers: bool) -> Result<csv::Reader<fs::File>> {
    Ok(csv::ReaderBuilder::new()
        .has_headers(has_headers)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)?)
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, message: message.into() }
}

fn record_line(rec: &csv::StringRecord) -> usize {
    rec.position().map_or(0, |p| p.line() as usize)
}

fn parse_value(field: &str) -> Option<f64> {
    if MISSING.contains(&field.to_ascii_lowercase().as_str()) {
        Some(f64::NAN)
    } else {
        field.parse().ok()
    }
}

struct Units {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    t: Vec<u8>,
    outcomes: Vec<(String, Vec<f64>)>,
}

fn read_units(path: &Path) -> Result<Units> {
    let mut rdr = reader(path, true)?;
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(parse_error(path, 1, "units header needs an id column and a treatment column"));
    }
    let names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let mut units = Units {
        ids: Vec::new(),
        index: HashMap::new(),
        t: Vec::new(),
        outcomes: names.into_iter().map(|n| (n, Vec::new())).collect(),
    };
    for rec in rdr.records() {
        let rec = rec?;
        let line = record_line(&rec);
        if rec.len() != header.len() {
            return Err(parse_error(path, line, format!("{} fields, header has {}", rec.len(), header.len())));
        }
        let id = rec[0].to_string();
        if id.is_empty() {
            return Err(parse_error(path, line, "empty unit id"));
        }
        let t = match &rec[1] {
            "0" => 0,
            "1" => 1,
            other => return Err(parse_error(path, line, format!("treatment must be 0 or 1, got `{other}`"))),
        };
        for (k, (name, col)) in units.outcomes.iter_mut().enumerate() {
            let v = parse_value(&rec[k + 2])
                .ok_or_else(|| parse_error(path, line, format!("outcome `{name}` is not a number: `{}`", &rec[k + 2])))?;
            col.push(v);
        }
        if units.index.insert(id.clone(), units.ids.len()).is_some() {
            return Err(parse_error(path, line, format!("duplicate unit id `{id}`")));
        }
        units.ids.push(id);
        units.t.push(t);
    }
    if units.ids.is_empty() {
        return Err(parse_error(path, 1, "no units"));
    }
    Ok(units)
}

fn read_edges(path: &Path, index: &HashMap<String, usize>, header: bool) -> Result<(Adjacency, EdgeFileSummary)> {
    let mut rdr = reader(path, header)?;
    let mut pairs = Vec::new();
    let mut summary = EdgeFileSummary::default();
    for rec in rdr.records() {
        let rec = rec?;
        let line = record_line(&rec);
        if rec.len() < 2 {
            return Err(parse_error(path, line, "edge rows need two unit ids"));
        }
        summary.rows += 1;
        let resolve = |id: &str| {
            index.get(id).copied().ok_or_else(|| Error::ReferentialIntegrity {
                path: path.to_path_buf(),
                line,
                id: id.to_string(),
            })
        };
        let (i, j) = (resolve(&rec[0])?, resolve(&rec[1])?);
        if i == j {
            log::warn!("{}:{line}: self-loop on `{}` dropped", path.display(), &rec[0]);
            summary.self_loops += 1;
            continue;
        }
        pairs.push((i.min(j), i.max(j)));
    }
    let rows = pairs.len();
    pairs.sort_unstable();
    pairs.dedup();
    summary.duplicates = rows - pairs.len();
    summary.edges = pairs.len();
    Ok((Adjacency::from_edges(index.len(), pairs)?, summary))
}

/// Reads and validates a panel dataset.
pub fn load_dataset(units: &Path, pre_edges: &Path, post_edges: &Path, opts: &LoadOptions) -> Result<PanelDataset> {
    if let Some(pi) = opts.pi {
        crate::estimators::check_pi(pi)?;
    }
    let u = read_units(units)?;
    let (a_pre, pre_summary) = read_edges(pre_edges, &u.index, opts.edge_header)?;
    let (a_post, post_summary) = read_edges(post_edges, &u.index, opts.edge_header)?;
    Ok(PanelDataset { ids: u.ids, t: u.t, outcomes: u.outcomes, a_pre, a_post, pi: opts.pi, pre_summary, post_summary })
}

impl PanelDataset {
    /// Assembles a dataset from in-memory parts; edges are read from the graphs.
    pub fn from_parts(
        ids: Vec<String>,
        t: Vec<u8>,
        outcomes: Vec<(String, Vec<f64>)>,
        a_pre: Adjacency,
        a_post: Adjacency,
        pi: Option<f64>,
    ) -> Result<Self> {
        let n = ids.len();
        crate::graph_model::check_treatments(&t, n)?;
        if a_pre.n() != n || a_post.n() != n || outcomes.iter().any(|(_, c)| c.len() != n) {
            return Err(Error::InvalidInput(format!("dataset parts disagree on the number of units ({n})")));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::InvalidInput(format!("duplicate unit id `{dup}`")));
        }
        let summary = |a: &Adjacency| EdgeFileSummary { rows: a.edge_count(), edges: a.edge_count(), ..Default::default() };
        Ok(Self { pre_summary: summary(&a_pre), post_summary: summary(&a_post), ids, t, outcomes, a_pre, a_post, pi })
    }

    /// A dataset drawn from the simulation model, with one outcome column `y`
    /// and the configured assignment probability declared.
    pub fn from_simulation(cfg: &SimConfig, rep: u64) -> Result<Self> {
        let d = draw_dataset(cfg, rep)?;
        let ids = (0..cfg.n).map(|i| format!("u{i}")).collect();
        Self::from_parts(ids, d.t, vec![("y".into(), d.y)], d.a_pre, d.a_post, Some(cfg.pi))
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn outcome(&self, name: &str) -> Result<&[f64]> {
        self.outcomes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_slice())
            .ok_or_else(|| Error::InvalidConfig(format!("no outcome column `{name}`")))
    }

    pub fn turnover(&self) -> LinkTurnover {
        LinkTurnover::between(&self.a_pre, &self.a_post)
    }

    /// Share of treated units.
    pub fn treated_share(&self) -> f64 {
        self.t.iter().map(|&t| f64::from(t)).sum::<f64>() / self.n() as f64
    }

    /// Writes the units file and both edge files; reloading them gives back
    /// an equal dataset.
    pub fn save(&self, units: &Path, pre_edges: &Path, post_edges: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(units)?;
        let mut header = vec!["id".to_string(), "t".to_string()];
        header.extend(self.outcomes.iter().map(|(n, _)| n.clone()));
        w.write_record(&header)?;
        for i in 0..self.n() {
            let mut row = vec![self.ids[i].clone(), self.t[i].to_string()];
            row.extend(self.outcomes.iter().map(|(_, c)| if c[i].is_nan() { String::new() } else { c[i].to_string() }));
            w.write_record(&row)?;
        }
        w.flush()?;
        for (path, a) in [(pre_edges, &self.a_pre), (post_edges, &self.a_post)] {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
            for (i, j) in a.edges() {
                w.write_record([&self.ids[i], &self.ids[j]])?;
            }
            w.flush()?;
        }
        Ok(())
    }

    /// Saves as `units.csv`, `pre_edges.csv` and `post_edges.csv` in `dir`.
    pub fn save_dir(&self, dir: &Path) -> Result<[PathBuf; 3]> {
        fs::create_dir_all(dir)?;
        let paths = ["units.csv", "pre_edges.csv", "post_edges.csv"].map(|f| dir.join(f));
        self.save(&paths[0], &paths[1], &paths[2])?;
        Ok(paths)
    }

    /// Reorders units by `perm` (unit `i` moves to position `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput("not a permutation of the units".into()));
        }
        let move_vec = |v: &[f64]| {
            let mut out = vec![0.0; n];
            for (i, &x) in v.iter().enumerate() {
                out[perm[i]] = x;
            }
            out
        };
        let mut ids = vec![String::new(); n];
        let mut t = vec![0; n];
        for i in 0..n {
            ids[perm[i]] = self.ids[i].clone();
            t[perm[i]] = self.t[i];
        }
        Ok(Self {
            ids,
            t,
            outcomes: self.outcomes.iter().map(|(name, c)| (name.clone(), move_vec(c))).collect(),
            a_pre: self.a_pre.permuted(perm),
            a_post: self.a_post.permuted(perm),
            ..self.clone()
        })
    }
}

/// Shape of a synthetic panel.
#[derive(Debug, Clone)]
pub struct SyntheticPanel {
    pub units: usize,
    pub pre_edges: usize,
    pub broken: usize,
    pub formed: usize,
    pub pi: f64,
    pub model: OutcomeModel,
    pub seed: u64,
}

impl Default for SyntheticPanel {
    /// 915 households, 328 baseline links of which 255 break while 256 new
    /// ones form, leaving 329 at endline.
    fn default() -> Self {
        Self { units: 915, pre_edges: 328, broken: 255, formed: 256, pi: 0.5, model: OutcomeModel::endogenous(), seed: 0 }
    }
}

impl SyntheticPanel {
    /// Baseline links are uniform over pairs; new links favour treated
    /// endpoints (acceptance `(1 + T_i + T_j) / 3`). Outcomes follow `model`
    /// with the post-intervention treated fraction as mediator.
    pub fn generate(&self) -> Result<PanelDataset> {
        let n = self.units;
        let pairs = n * n.saturating_sub(1) / 2;
        if n < 2 || self.broken > self.pre_edges || self.pre_edges + self.formed > pairs {
            return Err(Error::InvalidConfig(format!(
                "cannot place {} baseline and {} new links among {n} units",
                self.pre_edges, self.formed
            )));
        }
        let t = draw_treatments(&mut stream_rng(self.seed, 0, Stream::Treatments), n, self.pi)?;
        let mut rng = stream_rng(self.seed, 0, Stream::Disturbances);
        let mut taken = std::collections::HashSet::new();
        let mut draw_pair = |rng: &mut crate::rng::SimRng, accept: &dyn Fn(usize, usize) -> f64| loop {
            let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
            let key = (i.min(j), i.max(j));
            if i != j && !taken.contains(&key) && rng.random::<f64>() < accept(i, j) {
                taken.insert(key);
                return key;
            }
        };
        let pre: Vec<(usize, usize)> = (0..self.pre_edges).map(|_| draw_pair(&mut rng, &|_, _| 1.0)).collect();
        let treated = |i: usize, j: usize| (1.0 + f64::from(t[i]) + f64::from(t[j])) / 3.0;
        let formed: Vec<(usize, usize)> = (0..self.formed).map(|_| draw_pair(&mut rng, &treated)).collect();
        let mut kept = pre.clone();
        for k in (1..kept.len()).rev() {
            kept.swap(k, rng.random_range(0..=k));
        }
        kept.truncate(self.pre_edges - self.broken);
        let a_pre = Adjacency::from_edges(n, pre)?;
        let a_post = Adjacency::from_edges(n, kept.into_iter().chain(formed))?;
        let latents =
            LatentDraws::sample_with(&mut stream_rng(self.seed, 0, Stream::Latents), n, LatentDistribution::default(), self.seed)?;
        let m = mediator(&a_post, &t, MediatorKind::Fraction)?;
        let y = self.model.generate_with(&mut stream_rng(self.seed, 0, Stream::Noise), &t, &m, &latents)?;
        let width = n.to_string().len();
        let ids = (1..=n).map(|i| format!("hh{i:0width$}")).collect();
        PanelDataset::from_parts(ids, t, vec![("y".into(), y)], a_pre, a_post, Some(self.pi))
    }
}

/// The default 915-unit synthetic panel.
pub fn synthetic_panel(seed: u64) -> Result<PanelDataset> {
    SyntheticPanel { seed, ..SyntheticPanel::default() }.generate()
}
