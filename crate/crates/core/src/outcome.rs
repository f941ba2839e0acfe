//! Partially linear outcome model and Monte Carlo values of the causal
//! estimands for simulated designs.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_model::{
    check_treatments, DisturbanceMatrix, GraphonSpec, LatentDistribution, LatentDraws, Phase, SparsityRate,
};
use crate::mediator::{draw_treatments, MediatorVector};
use crate::rng::{stream_rng, Stream};
use crate::stats::{mean, sample_std};

/// The confounding component `lambda(w)` of the outcome.
#[derive(Clone, Default)]
pub enum Confounder {
    #[default]
    Zero,
    /// `w / 2`.
    HalfW,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Confounder {
    #[inline]
    pub fn eval(&self, w: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::HalfW => 0.5 * w,
            Self::Custom(f) => f(w),
        }
    }
}

impl fmt::Debug for Confounder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string())
    }
}

impl fmt::Display for Confounder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Zero => "zero",
            Self::HalfW => "half-w",
            Self::Custom(_) => "custom",
        })
    }
}

impl FromStr for Confounder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "zero" => Ok(Self::Zero),
            "half-w" => Ok(Self::HalfW),
            other => Err(Error::InvalidConfig(format!("unknown confounder map `{other}` (zero, half-w)"))),
        }
    }
}

/// Idiosyncratic outcome noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Noise {
    None,
    Uniform { low: f64, high: f64 },
    Normal { sd: f64 },
}

impl Noise {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Uniform { low, high } if !(low.is_finite() && high.is_finite() && low < high) => {
                Err(Error::InvalidConfig(format!("uniform noise needs low < high, got [{low}, {high}]")))
            }
            Self::Normal { sd } if !(sd.is_finite() && sd >= 0.0) => {
                Err(Error::InvalidConfig(format!("normal noise needs sd >= 0, got {sd}")))
            }
            _ => Ok(()),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Uniform { low, high } => Uniform::new(low, high).expect("validated").sample(rng),
            Self::Normal { sd } => Normal::new(0.0, sd).expect("validated").sample(rng),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::None | Self::Normal { .. } => 0.0,
            Self::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Uniform { low, high } => (high - low).powi(2) / 12.0,
            Self::Normal { sd } => sd * sd,
        }
    }
}

impl fmt::Display for Noise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => write!(f, "none"),
            Self::Uniform { low, high } => write!(f, "uniform:{low}:{high}"),
            Self::Normal { sd } => write!(f, "normal:{sd}"),
        }
    }
}

impl FromStr for Noise {
    type Err = Error;

    /// Accepts `none`, `uniform:<low>:<high>` and `normal:<sd>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |x: &str| x.parse::<f64>().map_err(|_| Error::InvalidConfig(format!("bad number `{x}` in `{s}`")));
        let noise = match parts.as_slice() {
            ["none"] => Self::None,
            ["uniform", lo, hi] => Self::Uniform { low: num(lo)?, high: num(hi)? },
            ["normal", sd] => Self::Normal { sd: num(sd)? },
            _ => return Err(Error::InvalidConfig(format!("unknown noise `{s}`"))),
        };
        noise.validate()?;
        Ok(noise)
    }
}

/// `Y_i = beta0 + beta1 T_i + beta2 M_i + lambda(w_i) + eps_i`.
#[derive(Debug, Clone)]
pub struct OutcomeModel {
    pub beta: [f64; 3],
    pub confounder: Confounder,
    pub noise: Noise,
}

impl OutcomeModel {
    /// No confounding, `eps ~ U[-1, 1]`, `beta = (1, 1, 0.5)`.
    pub fn exogenous() -> Self {
        Self { beta: [1.0, 1.0, 0.5], confounder: Confounder::Zero, noise: Noise::Uniform { low: -1.0, high: 1.0 } }
    }

    /// Error `(w + eps) / 2` with `eps ~ U[-1, 1]`, `beta = (1, 1, 0.5)`.
    pub fn endogenous() -> Self {
        Self { beta: [1.0, 1.0, 0.5], confounder: Confounder::HalfW, noise: Noise::Uniform { low: -0.5, high: 0.5 } }
    }

    #[inline]
    pub fn systematic(&self, t: f64, m: f64, w: f64) -> f64 {
        self.beta[0] + self.beta[1] * t + self.beta[2] * m + self.confounder.eval(w)
    }

    /// Monte Carlo mean of `lambda(w)` with its standard error; the model
    /// assumes this is zero under the latent law.
    pub fn confounder_mean(&self, latent: LatentDistribution, draws: usize, seed: u64) -> Result<(f64, f64)> {
        let mut rng = stream_rng(seed, 0, Stream::Diagnostic);
        let w = LatentDraws::sample_with(&mut rng, draws, latent, seed)?;
        let vals: Vec<f64> = w.w.iter().map(|&x| self.confounder.eval(x)).collect();
        Ok((mean(&vals), sample_std(&vals) / (vals.len() as f64).sqrt()))
    }

    pub fn generate_with<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        t: &[u8],
        m: &MediatorVector,
        w: &LatentDraws,
    ) -> Result<Vec<f64>> {
        let n = t.len();
        check_treatments(t, n)?;
        if m.len() != n || w.len() != n {
            return Err(Error::InvalidInput(format!(
                "length mismatch: {n} treatments, {} mediator values, {} latents",
                m.len(),
                w.len()
            )));
        }
        self.noise.validate()?;
        Ok((0..n).map(|i| self.systematic(f64::from(t[i]), m.m[i], w.w[i]) + self.noise.draw(rng)).collect())
    }
}

/// Draws outcomes with noise from the stream keyed by `seed`.
pub fn generate_outcomes(
    model: &OutcomeModel,
    t: &[u8],
    m: &MediatorVector,
    w: &LatentDraws,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = stream_rng(seed, 0, Stream::Noise);
    model.generate_with(&mut rng, t, m, w)
}

/// Total, direct, indirect and spillover effects.
///
/// The `_by_t` arrays hold the effect evaluated at own treatment `t = 0, 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimands {
    pub toe: f64,
    pub de: f64,
    pub ie: f64,
    pub se: f64,
    pub de_by_t: [f64; 2],
    pub ie_by_t: [f64; 2],
    pub se_by_t: [f64; 2],
    /// `E[M | T = 1] - E[M | T = 0]` (or its sample analog).
    pub mediator_contrast: f64,
    /// Standard error of `ie` (Monte Carlo error for the oracle, plug-in
    /// sampling error for fitted effects when available, else NaN).
    pub ie_std_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub n: usize,
    /// At least 200.
    pub reps: usize,
    pub pi: f64,
    pub seed: u64,
    pub latent: LatentDistribution,
}

impl OracleConfig {
    pub fn new(n: usize, reps: usize, seed: u64) -> Self {
        Self { n, reps, pi: 0.5, seed, latent: LatentDistribution::StandardNormal }
    }
}

/// Population estimands for a simulated design under the fraction mediator.
///
/// `DE = beta1` and `SE = beta2` are analytic. The mediator contrast is
/// estimated by toggling each unit's own treatment and regenerating only that
/// unit's post-intervention links against the unchanged disturbances, which
/// is the exact counterfactual network for that unit.
pub fn true_effects_oracle(
    spec: &GraphonSpec,
    q: SparsityRate,
    model: &OutcomeModel,
    cfg: &OracleConfig,
) -> Result<Estimands> {
    if cfg.reps < 200 {
        return Err(Error::InvalidConfig(format!("oracle needs at least 200 replications, got {}", cfg.reps)));
    }
    if !(cfg.pi > 0.0 && cfg.pi < 1.0) {
        return Err(Error::InvalidConfig(format!("assignment probability must lie in (0, 1), got {}", cfg.pi)));
    }
    q.validate()?;
    model.noise.validate()?;
    let n = cfg.n;
    let scale = q.resolve(n);
    // per replication: [contrast, de(0), de(1), ie(0), ie(1)]
    let mut per_rep = Vec::with_capacity(cfg.reps);
    for rep in 0..cfg.reps as u64 {
        let mut rng_w = stream_rng(cfg.seed, rep, Stream::Latents);
        let latents = LatentDraws::sample_with(&mut rng_w, n, cfg.latent, cfg.seed)?;
        let eta = DisturbanceMatrix::sample_with(&mut stream_rng(cfg.seed, rep, Stream::Disturbances), n)?;
        let t = draw_treatments(&mut stream_rng(cfg.seed, rep, Stream::Treatments), n, cfg.pi)?;
        let mut noise_rng = stream_rng(cfg.seed, rep, Stream::Oracle);
        let kernel = spec.prepare(Phase::Post, &latents.w);
        let mut acc = [0.0; 5];
        for i in 0..n {
            let mut m_own = [0.0; 2];
            for (own, slot) in m_own.iter_mut().enumerate() {
                let (mut deg, mut treated) = (0usize, 0usize);
                for j in (0..n).filter(|&j| j != i) {
                    if eta.get(i, j) <= scale * kernel.value(i, own as u8, j, t[j]) {
                        deg += 1;
                        treated += usize::from(t[j]);
                    }
                }
                *slot = if deg == 0 { 0.0 } else { treated as f64 / deg as f64 };
            }
            let w = latents.w[i];
            let eps = model.noise.draw(&mut noise_rng);
            let y = |own: f64, m: f64| model.systematic(own, m, w) + eps;
            acc[0] += m_own[1] - m_own[0];
            for own in 0..2 {
                acc[1 + own] += y(1.0, m_own[own]) - y(0.0, m_own[own]);
                acc[3 + own] += y(own as f64, m_own[1]) - y(own as f64, m_own[0]);
            }
        }
        per_rep.push(acc.map(|a| a / n as f64));
    }
    let col = |k: usize| per_rep.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let contrast = col(0);
    let reps = cfg.reps as f64;
    let b = model.beta;
    let ie = b[2] * mean(&contrast);
    Ok(Estimands {
        toe: b[1] + ie,
        de: b[1],
        ie,
        se: b[2],
        de_by_t: [mean(&col(1)), mean(&col(2))],
        ie_by_t: [mean(&col(3)), mean(&col(4))],
        se_by_t: [b[2], b[2]],
        mediator_contrast: mean(&contrast),
        ie_std_error: b[2].abs() * sample_std(&contrast) / reps.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_model::CustomKernel;
    use crate::mediator::MediatorKind;

    #[test]
    fn noiseless_evaluation() {
        let model = OutcomeModel { noise: Noise::None, ..OutcomeModel::exogenous() };
        let m = MediatorVector { m: vec![0.4], kind: MediatorKind::Fraction };
        let w = LatentDraws { w: vec![0.3], seed: 0 };
        let y = generate_outcomes(&model, &[1], &m, &w, 0).unwrap();
        assert!((y[0] - 2.2).abs() < 1e-15);
    }

    #[test]
    fn endogenous_error_variance() {
        // Var((w + eps)/2) = 1/4 + 1/12 for w ~ N(0,1), eps ~ U[-1,1].
        let model = OutcomeModel::endogenous();
        let n = 200_000;
        let lat = crate::graph_model::sample_latents(n, 9, LatentDistribution::StandardNormal).unwrap();
        let m = MediatorVector { m: vec![0.0; n], kind: MediatorKind::Fraction };
        let y = generate_outcomes(&model, &vec![0; n], &m, &lat, 3).unwrap();
        let u: Vec<f64> = y.iter().map(|v| v - 1.0).collect();
        let v = sample_std(&u).powi(2);
        assert!((v - (0.25 + 1.0 / 12.0)).abs() < 0.005, "{v}");
        assert!((model.noise.variance() + 0.25 - (0.25 + 1.0 / 12.0)).abs() < 1e-15);
    }

    #[test]
    fn confounder_has_mean_zero() {
        let (m, se) = OutcomeModel::endogenous().confounder_mean(LatentDistribution::StandardNormal, 100_000, 1).unwrap();
        assert!(m.abs() < 4.0 * se, "{m} +- {se}");
    }

    #[test]
    fn parses_flags() {
        assert_eq!("uniform:-1:1".parse::<Noise>().unwrap(), Noise::Uniform { low: -1.0, high: 1.0 });
        assert!("uniform:1:1".parse::<Noise>().is_err());
        assert!(matches!("half-w".parse::<Confounder>().unwrap(), Confounder::HalfW));
        assert!("w2".parse::<Confounder>().is_err());
    }

    #[test]
    fn treatment_free_network_has_no_indirect_effect() {
        let spec = GraphonSpec::Custom(CustomKernel::treatment_free("flat", |_: f64, _: f64| 0.3));
        let est = true_effects_oracle(&spec, SparsityRate::Constant(1.0), &OutcomeModel::exogenous(), &OracleConfig::new(40, 200, 1))
            .unwrap();
        assert_eq!(est.ie, 0.0);
        assert_eq!(est.toe, 1.0);
        assert_eq!(est.se, 0.5);
        assert_eq!(est.de, 1.0);
    }

    #[test]
    fn oracle_needs_reps() {
        let r = true_effects_oracle(&GraphonSpec::Sbm3, SparsityRate::Constant(1.0), &OutcomeModel::exogenous(), &OracleConfig::new(20, 10, 1));
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }
}
