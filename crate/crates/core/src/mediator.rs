//! Exposure mappings built from the post-intervention network, and a Monte
//! Carlo diagnostic for whether the neighbor-treated probability `xi_i`
//! varies across units.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Bernoulli, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_model::{check_treatments, Adjacency, GraphonSpec, LatentDistribution, LatentDraws, Phase};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MediatorKind {
    /// Share of neighbors that are treated (0 for isolated units).
    #[default]
    Fraction,
    /// Number of treated neighbors.
    Count,
    /// Indicator of at least one treated neighbor.
    Any,
}

impl fmt::Display for MediatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fraction => "fraction",
            Self::Count => "count",
            Self::Any => "any",
        })
    }
}

impl FromStr for MediatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fraction" => Ok(Self::Fraction),
            "count" => Ok(Self::Count),
            "any" => Ok(Self::Any),
            other => Err(Error::InvalidConfig(format!("unknown mediator `{other}` (fraction, count, any)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MediatorVector {
    pub m: Vec<f64>,
    pub kind: MediatorKind,
}

impl MediatorVector {
    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }
}

fn treated_neighbors(a: &Adjacency, t: &[u8], i: usize) -> usize {
    a.neighbors(i).iter().filter(|&&j| t[j as usize] == 1).count()
}

/// Mediator of the requested kind.
pub fn mediator(a_post: &Adjacency, t: &[u8], kind: MediatorKind) -> Result<MediatorVector> {
    check_treatments(t, a_post.n())?;
    let m = (0..a_post.n())
        .map(|i| {
            let k = treated_neighbors(a_post, t, i);
            match kind {
                MediatorKind::Fraction => match a_post.degree(i) {
                    0 => 0.0,
                    d => k as f64 / d as f64,
                },
                MediatorKind::Count => k as f64,
                MediatorKind::Any => f64::from(u8::from(k > 0)),
            }
        })
        .collect();
    Ok(MediatorVector { m, kind })
}

/// `M_i = sum_j A_ij T_j / sum_j A_ij`, with 0/0 read as 0.
pub fn fraction_treated(a_post: &Adjacency, t: &[u8]) -> Result<MediatorVector> {
    mediator(a_post, t, MediatorKind::Fraction)
}

pub fn count_treated(a_post: &Adjacency, t: &[u8]) -> Result<MediatorVector> {
    mediator(a_post, t, MediatorKind::Count)
}

pub fn any_treated(a_post: &Adjacency, t: &[u8]) -> Result<MediatorVector> {
    mediator(a_post, t, MediatorKind::Any)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XiCase {
    /// `Var(xi_i) > 0`: the network response depends on own latent/treatment.
    CaseA,
    /// `xi_i` is (numerically) constant at the assignment probability.
    CaseB,
    Ambiguous,
}

impl fmt::Display for XiCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CaseA => "case_a",
            Self::CaseB => "case_b",
            Self::Ambiguous => "ambiguous",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiDiagnostic {
    /// Estimate of `Var(xi_i)`, clamped at zero.
    pub var_xi_estimate: f64,
    /// The unclamped estimate (can be slightly negative under the null).
    pub raw_estimate: f64,
    pub mc_std_error: f64,
    pub case_label: XiCase,
    pub mean_xi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiOptions {
    /// Outer draws of `(w_i, T_i)`; at least 100.
    pub reps: usize,
    /// Inner draws of a prospective neighbor `(w_j, T_j)` per estimate.
    pub inner_draws: usize,
    pub pi: f64,
    pub latent: LatentDistribution,
    pub seed: u64,
}

impl Default for XiOptions {
    fn default() -> Self {
        Self { reps: 1000, inner_draws: 10_000, pi: 0.5, latent: LatentDistribution::StandardNormal, seed: 0 }
    }
}

/// Labels an estimate by how many standard errors it sits above zero.
fn classify(raw: f64, se: f64) -> XiCase {
    if se == 0.0 {
        return if raw > 0.0 { XiCase::CaseA } else { XiCase::CaseB };
    }
    let z = raw / se;
    if z <= 2.0 {
        XiCase::CaseB
    } else if z <= 3.0 {
        XiCase::Ambiguous
    } else {
        XiCase::CaseA
    }
}

/// Estimates `Var(xi_i)` where
/// `xi_i = E[A_ij T_j | T_i, w_i] / E[A_ij | T_i, w_i]`.
///
/// For each outer draw of `(w_i, T_i)` two independent inner averages over
/// `(w_j, T_j)` are formed; the covariance of the two across outer draws is
/// unbiased for `Var(xi_i)` because the inner noise of the halves is
/// independent. The sparsity scale cancels in the ratio and so is not an input.
pub fn estimate_var_xi(spec: &GraphonSpec, opts: &XiOptions) -> Result<XiDiagnostic> {
    if opts.reps < 100 {
        return Err(Error::InvalidConfig(format!("need at least 100 outer draws, got {}", opts.reps)));
    }
    if opts.inner_draws < 2 {
        return Err(Error::InvalidConfig("need at least 2 inner draws".into()));
    }
    if !(opts.pi > 0.0 && opts.pi < 1.0) {
        return Err(Error::InvalidConfig(format!("assignment probability must lie in (0, 1), got {}", opts.pi)));
    }
    let bern = Bernoulli::new(opts.pi).expect("pi in (0,1)");
    let mut rng = stream_rng(opts.seed, 0, Stream::Diagnostic);
    let m = opts.inner_draws;
    let mut halves = Vec::with_capacity(opts.reps);
    for _ in 0..opts.reps {
        // unit 0 is the focal unit, 1..=2m are two batches of candidate neighbors
        let latents = LatentDraws::sample_with(&mut rng, 2 * m + 1, opts.latent, opts.seed)?;
        let t: Vec<u8> = (0..=2 * m).map(|_| u8::from(bern.sample(&mut rng))).collect();
        let kernel = spec.prepare(Phase::Post, &latents.w);
        let mut est = [0.0; 2];
        for (h, e) in est.iter_mut().enumerate() {
            let (mut num, mut den) = (0.0, 0.0);
            for j in (1 + h * m)..(1 + (h + 1) * m) {
                let g = kernel.value(0, t[0], j, t[j]);
                num += g * f64::from(t[j]);
                den += g;
            }
            // a unit that cannot link has no neighbors to be treated; fall back to pi
            *e = if den > 0.0 { num / den } else { opts.pi };
        }
        halves.push(est);
    }
    let r = halves.len() as f64;
    let mean_a = halves.iter().map(|h| h[0]).sum::<f64>() / r;
    let mean_b = halves.iter().map(|h| h[1]).sum::<f64>() / r;
    let products: Vec<f64> = halves.iter().map(|h| (h[0] - mean_a) * (h[1] - mean_b)).collect();
    let raw = products.iter().sum::<f64>() / (r - 1.0);
    let mean_p = products.iter().sum::<f64>() / r;
    let var_p = products.iter().map(|p| (p - mean_p).powi(2)).sum::<f64>() / (r - 1.0);
    let se = (var_p / r).sqrt();
    Ok(XiDiagnostic {
        var_xi_estimate: raw.max(0.0),
        raw_estimate: raw,
        mc_std_error: se,
        case_label: classify(raw, se),
        mean_xi: 0.5 * (mean_a + mean_b),
    })
}

/// Draws i.i.d. Bernoulli(pi) treatments.
pub fn draw_treatments<R: Rng + ?Sized>(rng: &mut R, n: usize, pi: f64) -> Result<Vec<u8>> {
    let bern = Bernoulli::new(pi)
        .map_err(|_| Error::InvalidConfig(format!("assignment probability must lie in [0, 1], got {pi}")))?;
    Ok((0..n).map(|_| u8::from(bern.sample(rng))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_model::CustomKernel;

    fn path3() -> Adjacency {
        Adjacency::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn path_graph_enumeration() {
        let t = [1, 0, 1];
        assert_eq!(fraction_treated(&path3(), &t).unwrap().m, vec![0.0, 1.0, 0.0]);
        assert_eq!(count_treated(&path3(), &t).unwrap().m, vec![0.0, 2.0, 0.0]);
        assert_eq!(any_treated(&path3(), &t).unwrap().m, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn isolated_unit_is_zero() {
        let a = Adjacency::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(fraction_treated(&a, &[1, 1, 1]).unwrap().m[2], 0.0);
    }

    #[test]
    fn all_treated() {
        let a = Adjacency::from_edges(5, [(0, 1), (1, 2), (3, 1)]).unwrap();
        let m = fraction_treated(&a, &[1; 5]).unwrap().m;
        assert_eq!(m, vec![1.0, 1.0, 1.0, 1.0, 0.0]);
        assert_eq!(count_treated(&a, &[0; 5]).unwrap().m, vec![0.0; 5]);
    }

    #[test]
    fn complete_graph_counts() {
        let k4 = Adjacency::complete(4);
        assert_eq!(count_treated(&k4, &[1, 1, 0, 0]).unwrap().m, vec![1.0, 1.0, 2.0, 2.0]);
    }

    #[test]
    fn rejects_non_binary() {
        assert!(matches!(fraction_treated(&path3(), &[1, 2, 0]), Err(Error::InvalidInput(_))));
        assert!(fraction_treated(&path3(), &[1, 0]).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(classify(0.0, 1.0), XiCase::CaseB);
        assert_eq!(classify(-3.0, 1.0), XiCase::CaseB);
        assert_eq!(classify(2.5, 1.0), XiCase::Ambiguous);
        assert_eq!(classify(3.5, 1.0), XiCase::CaseA);
    }

    #[test]
    fn treatment_free_network_is_case_b() {
        let spec = GraphonSpec::Custom(CustomKernel::treatment_free("flat", |a: f64, b: f64| {
            1.0 / (1.0 + (-(a + b)).exp())
        }));
        let opts = XiOptions { reps: 300, inner_draws: 2000, seed: 4, ..XiOptions::default() };
        let d = estimate_var_xi(&spec, &opts).unwrap();
        assert_eq!(d.case_label, XiCase::CaseB);
        assert!(d.raw_estimate.abs() <= 2.0 * d.mc_std_error);
        assert!((d.mean_xi - 0.5).abs() < 0.01);
    }

    #[test]
    fn too_few_reps() {
        let opts = XiOptions { reps: 50, ..XiOptions::default() };
        assert!(estimate_var_xi(&GraphonSpec::Sbm3, &opts).is_err());
    }
}
