//! Runs one estimator end to end on a single dataset: mediator, instrument,
//! fit, covariance and effect decomposition.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{
    build_normalized_ssiv, build_ssiv, denoise, effects_from_fit, eigendecompose, ie_std_error, instrumented_fit,
    ols_fit, select_rank, DesignMatrix, EigenBasis, EstimatorKind, FitResult, InstrumentVector, RankChoice,
    MAX_AUTO_RANK,
};
use crate::graph_model::{check_treatments, Adjacency};
use crate::mediator::{mediator, MediatorKind, MediatorVector};
use crate::outcome::Estimands;
use crate::variance::{
    denoised_variance, hc_variance, naive_iv_variance, ssiv_variance, CovarianceEstimate, VarianceChoice,
};

/// How the denoising rank is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankPolicy {
    Fixed(usize),
    /// Largest relative eigen-gap among ranks 1..=8.
    #[default]
    Auto,
}

impl fmt::Display for RankPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Fixed(r) => write!(f, "{r}"),
            Self::Auto => f.write_str("auto"),
        }
    }
}

impl FromStr for RankPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(Self::Auto),
            other => other
                .parse::<usize>()
                .ok()
                .filter(|&r| r > 0)
                .map(Self::Fixed)
                .ok_or_else(|| Error::InvalidConfig(format!("rank must be a positive integer or `auto`, got `{other}`"))),
        }
    }
}

impl Serialize for RankPolicy {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RankPolicy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Int(usize),
            Str(String),
        }
        match Wire::deserialize(d)? {
            Wire::Int(r) => Ok(Self::Fixed(r)),
            Wire::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EstimatorOptions {
    pub rank: RankPolicy,
    pub variance: VarianceChoice,
}


#[derive(Debug, Clone, PartialEq)]
pub struct Estimation {
    pub fit: FitResult,
    /// Absent for the normalized instrument, which has no variance formula,
    /// unless the naive HC sandwich was requested.
    pub cov: Option<CovarianceEstimate>,
    /// Absent unless the mediator is the treated fraction.
    pub effects: Option<Estimands>,
    pub rank: Option<RankChoice>,
}

/// One dataset prepared for estimation. Units with a non-finite outcome are
/// dropped from the regression; mediators and instruments still use every
/// unit's treatment, while the variance and the eigenbasis use the
/// pre-intervention subgraph on the analyzed units.
pub struct EstimationData<'a> {
    a_pre: &'a Adjacency,
    t_full: &'a [u8],
    keep: Vec<usize>,
    a_pre_sub: Cow<'a, Adjacency>,
    t: Vec<u8>,
    y: Vec<f64>,
    m_post: MediatorVector,
    pi: f64,
    basis: Option<EigenBasis>,
}

fn select<T: Copy>(v: &[T], keep: &[usize]) -> Vec<T> {
    keep.iter().map(|&i| v[i]).collect()
}

impl<'a> EstimationData<'a> {
    pub fn new(
        a_pre: &'a Adjacency,
        a_post: &'a Adjacency,
        t: &'a [u8],
        y: &[f64],
        pi: f64,
        mediator_kind: MediatorKind,
    ) -> Result<Self> {
        let n = a_pre.n();
        if a_post.n() != n || y.len() != n {
            return Err(Error::InvalidInput(format!(
                "sizes disagree: pre network {n}, post network {}, outcomes {}",
                a_post.n(),
                y.len()
            )));
        }
        check_treatments(t, n)?;
        crate::estimators::check_pi(pi)?;
        let keep: Vec<usize> = (0..n).filter(|&i| y[i].is_finite()).collect();
        let a_pre_sub = if keep.len() == n { Cow::Borrowed(a_pre) } else { Cow::Owned(a_pre.induced(&keep)) };
        let m_full = mediator(a_post, t, mediator_kind)?;
        Ok(Self {
            a_pre,
            t_full: t,
            t: select(t, &keep),
            y: select(y, &keep),
            m_post: MediatorVector { m: select(&m_full.m, &keep), kind: mediator_kind },
            keep,
            a_pre_sub,
            pi,
            basis: None,
        })
    }

    pub fn analyzed(&self) -> usize {
        self.keep.len()
    }

    pub fn dropped(&self) -> usize {
        self.a_pre.n() - self.keep.len()
    }

    pub fn mediator(&self) -> &MediatorVector {
        &self.m_post
    }

    pub fn treatments(&self) -> &[u8] {
        &self.t
    }

    fn restrict(&self, z: InstrumentVector) -> InstrumentVector {
        if self.keep.len() == self.t_full.len() {
            z
        } else {
            InstrumentVector { z: select(&z.z, &self.keep), ..z }
        }
    }

    fn basis(&mut self, k: usize) -> Result<&EigenBasis> {
        let k = k.min(self.a_pre_sub.n());
        if self.basis.as_ref().is_none_or(|b| b.k() < k) {
            self.basis = Some(eigendecompose(&self.a_pre_sub, k)?);
        }
        Ok(self.basis.as_ref().expect("just computed"))
    }

    /// Selects the rank for the denoised instrument, computing eigenpairs as needed.
    pub fn rank(&mut self, policy: RankPolicy) -> Result<RankChoice> {
        let needed = match policy {
            RankPolicy::Fixed(r) => r,
            RankPolicy::Auto => MAX_AUTO_RANK + 1,
        };
        let n = self.a_pre_sub.n();
        if let RankPolicy::Fixed(r) = policy {
            if r > n {
                return Err(Error::InvalidConfig(format!("rank {r} exceeds the network size {n}")));
            }
        }
        let basis = self.basis(needed)?;
        select_rank(basis, match policy {
            RankPolicy::Fixed(r) => Some(r),
            RankPolicy::Auto => None,
        })
    }

    pub fn estimate(&mut self, kind: EstimatorKind, opts: &EstimatorOptions) -> Result<Estimation> {
        let naive = opts.variance == VarianceChoice::NaiveHc;
        let (fit, cov, m_used, rank) = match kind {
            EstimatorKind::Ols | EstimatorKind::OlsPre => {
                let m = if kind == EstimatorKind::Ols {
                    self.m_post.clone()
                } else {
                    let full = mediator(self.a_pre, self.t_full, self.m_post.kind)?;
                    MediatorVector { m: select(&full.m, &self.keep), kind: self.m_post.kind }
                };
                let x = DesignMatrix::new(&self.t, &m)?;
                let mut fit = ols_fit(&x, &self.y)?;
                fit.estimator = kind;
                let cov = hc_variance(&x, &fit.residuals)?;
                (fit, Some(cov), m, None)
            }
            EstimatorKind::Ssiv | EstimatorKind::NormalizedSsiv => {
                let x = DesignMatrix::new(&self.t, &self.m_post)?;
                let z = if kind == EstimatorKind::Ssiv {
                    build_ssiv(self.a_pre, self.t_full, self.pi)?
                } else {
                    build_normalized_ssiv(self.a_pre, self.t_full)?
                };
                let z = self.restrict(z);
                let fit = instrumented_fit(&x, &self.t, &self.y, &z)?;
                let zm = DesignMatrix::instruments(&self.t, &z)?;
                let cov = match (kind, naive) {
                    (_, true) => Some(naive_iv_variance(&zm, &x, &fit.residuals)?),
                    (EstimatorKind::Ssiv, false) => {
                        Some(ssiv_variance(&self.a_pre_sub, &zm, &x, &fit.residuals, self.pi)?)
                    }
                    _ => None,
                };
                (fit, cov, self.m_post.clone(), None)
            }
            EstimatorKind::DenoisedSsiv => {
                let choice = self.rank(opts.rank)?;
                let z = self.restrict(build_ssiv(self.a_pre, self.t_full, self.pi)?);
                let basis = self.basis(choice.rank)?.clone();
                let z = denoise(&z, &basis, choice.rank)?;
                let x = DesignMatrix::new(&self.t, &self.m_post)?;
                let fit = instrumented_fit(&x, &self.t, &self.y, &z)?;
                let zm = DesignMatrix::instruments(&self.t, &z)?;
                let cov = if naive {
                    naive_iv_variance(&zm, &x, &fit.residuals)?
                } else {
                    denoised_variance(&self.a_pre_sub, &basis, choice.rank, &zm, &x, &fit.residuals, self.pi)?
                };
                (fit, Some(cov), self.m_post.clone(), Some(choice))
            }
        };
        let effects = if m_used.kind == MediatorKind::Fraction {
            let mut e = effects_from_fit(&fit, &self.t, &m_used)?;
            if let Some(c) = &cov {
                e.ie_std_error = ie_std_error(c.v[(2, 2)], e.mediator_contrast);
            }
            Some(e)
        } else {
            None
        };
        Ok(Estimation { fit, cov, effects, rank })
    }
}
