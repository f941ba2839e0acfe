//! Covariance estimators: HC for OLS, the dependence-aware shift-share IV
//! estimator, and its projected-residual version for the denoised instrument.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{sandwich, DesignMatrix, EigenBasis, FitResult};
use crate::graph_model::Adjacency;
use crate::stats::std_normal_quantile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceFlavor {
    HcOls,
    Ssiv,
    Denoised,
    /// HC sandwich applied to an IV fit, ignoring network dependence.
    NaiveHc,
}

impl fmt::Display for VarianceFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::HcOls => "hc",
            Self::Ssiv => "ssiv",
            Self::Denoised => "denoised",
            Self::NaiveHc => "naive-hc",
        })
    }
}

/// Variance choice on the command line: the estimator's own flavor, or the
/// naive HC sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceChoice {
    #[default]
    Default,
    NaiveHc,
}

impl fmt::Display for VarianceChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Default => "default",
            Self::NaiveHc => "naive-hc",
        })
    }
}

impl FromStr for VarianceChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "default" => Ok(Self::Default),
            "naive-hc" => Ok(Self::NaiveHc),
            other => Err(Error::InvalidConfig(format!("unknown variance `{other}` (default, naive-hc)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceEstimate {
    pub v: Matrix3<f64>,
    pub flavor: VarianceFlavor,
    pub se: [f64; 3],
}

impl CovarianceEstimate {
    fn new(v: Matrix3<f64>, flavor: VarianceFlavor) -> Self {
        let se = [0, 1, 2].map(|k| v[(k, k)].max(0.0).sqrt());
        Self { v, flavor, se }
    }
}

fn check_lengths(x: &DesignMatrix, residuals: &[f64]) -> Result<()> {
    if residuals.len() != x.n() {
        return Err(Error::InvalidInput(format!("{} residuals for {} units", residuals.len(), x.n())));
    }
    Ok(())
}

fn check_network(a_pre: &Adjacency, x: &DesignMatrix) -> Result<()> {
    if a_pre.n() != x.n() {
        return Err(Error::InvalidInput(format!("network has {} units but the design has {}", a_pre.n(), x.n())));
    }
    Ok(())
}

/// `sum_i w_i a_i a_i'` for weights `w`.
fn weighted_gram(a: &DesignMatrix, w: &[f64]) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for (r, &wi) in a.rows().iter().zip(w) {
        for p in 0..3 {
            for q in 0..3 {
                m[(p, q)] += wi * r[p] * r[q];
            }
        }
    }
    m
}

fn singular(column: &'static str) -> Error {
    Error::SingularDesign { column }
}

/// `(X'X)^{-1} X' diag(u^2) X (X'X)^{-1}`.
pub fn hc_variance(x: &DesignMatrix, residuals: &[f64]) -> Result<CovarianceEstimate> {
    check_lengths(x, residuals)?;
    let u2: Vec<f64> = residuals.iter().map(|u| u * u).collect();
    let v = sandwich(&x.cross(x), &weighted_gram(x, &u2)).ok_or(singular("M"))?;
    Ok(CovarianceEstimate::new(v, VarianceFlavor::HcOls))
}

/// HC sandwich for an arbitrary `n x k` design.
pub fn hc_sandwich(x: &DMatrix<f64>, residuals: &[f64]) -> Result<DMatrix<f64>> {
    if residuals.len() != x.nrows() {
        return Err(Error::InvalidInput(format!("{} residuals for {} rows", residuals.len(), x.nrows())));
    }
    let xtx = x.transpose() * x;
    let mut meat = DMatrix::zeros(x.ncols(), x.ncols());
    for (i, u) in residuals.iter().enumerate() {
        let row = x.row(i);
        meat += row.transpose() * row * (u * u);
    }
    let lu = xtx.full_piv_lu();
    let left = lu.solve(&meat).ok_or(singular("intercept"))?;
    let v = lu.solve(&left.transpose()).ok_or(singular("intercept"))?.transpose();
    Ok((&v + v.transpose()) * 0.5)
}

/// HC sandwich for an IV fit: `(Z'X)^{-1} Z' diag(u^2) Z (X'Z)^{-1}`.
pub fn naive_iv_variance(z: &DesignMatrix, x: &DesignMatrix, residuals: &[f64]) -> Result<CovarianceEstimate> {
    check_lengths(x, residuals)?;
    let u2: Vec<f64> = residuals.iter().map(|u| u * u).collect();
    let v = sandwich(&z.cross(x), &weighted_gram(z, &u2)).ok_or(singular("M"))?;
    Ok(CovarianceEstimate::new(v, VarianceFlavor::NaiveHc))
}

/// Numerator covariance for the shift-share instrument. Entry `(2,3)` is
/// `pi(1-pi) sum_ij a_ij u_i u_j` and `(3,3)` is
/// `pi(1-pi) sum_i (sum_j a_ij u_j)^2`.
fn ssiv_numerator(a_pre: &Adjacency, residuals: &[f64], pi: f64) -> Matrix3<f64> {
    let s: f64 = residuals.iter().map(|u| u * u).sum();
    let mut cross = 0.0;
    let mut quad = 0.0;
    for i in 0..a_pre.n() {
        let nu: f64 = a_pre.neighbors(i).iter().map(|&j| residuals[j as usize]).sum();
        cross += residuals[i] * nu;
        quad += nu * nu;
    }
    let k = pi * (1.0 - pi);
    Matrix3::new(s, pi * s, 0.0, pi * s, pi * s, k * cross, 0.0, k * cross, k * quad)
}

fn check_pi(pi: f64) -> Result<()> {
    if pi > 0.0 && pi < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("assignment probability must lie in (0, 1), got {pi}")))
    }
}

/// Dependence-aware covariance of the shift-share IV estimator.
pub fn ssiv_variance(
    a_pre: &Adjacency,
    z: &DesignMatrix,
    x: &DesignMatrix,
    residuals: &[f64],
    pi: f64,
) -> Result<CovarianceEstimate> {
    check_lengths(x, residuals)?;
    check_network(a_pre, x)?;
    check_pi(pi)?;
    let v = sandwich(&z.cross(x), &ssiv_numerator(a_pre, residuals, pi)).ok_or(singular("M"))?;
    Ok(CovarianceEstimate::new(v, VarianceFlavor::Ssiv))
}

/// Residuals with their projection on the leading eigenvectors removed.
#[derive(Debug, Clone, PartialEq)]
pub struct DenoisedResiduals {
    /// `mu_k = sum_i u_i psi_k[i]`.
    pub mu_hat: Vec<f64>,
    /// `eta_i = u_i - sum_k mu_k psi_k[i]`.
    pub eta_hat: Vec<f64>,
}

pub fn project_residuals(basis: &EigenBasis, r: usize, residuals: &[f64]) -> Result<DenoisedResiduals> {
    if r > basis.k() {
        return Err(Error::InvalidConfig(format!("rank {r} exceeds the {} computed eigenpairs", basis.k())));
    }
    if basis.n() != residuals.len() {
        return Err(Error::InvalidInput(format!(
            "eigenbasis has {} rows but there are {} residuals",
            basis.n(),
            residuals.len()
        )));
    }
    let mut eta = residuals.to_vec();
    let mut mu = Vec::with_capacity(r);
    for k in 0..r {
        let psi = basis.vectors.column(k);
        let m: f64 = psi.iter().zip(residuals).map(|(p, u)| p * u).sum();
        eta.iter_mut().zip(psi.iter()).for_each(|(e, p)| *e -= m * p);
        mu.push(m);
    }
    Ok(DenoisedResiduals { mu_hat: mu, eta_hat: eta })
}

/// Covariance of the denoised shift-share IV estimator. The instrument block
/// is `pi(1-pi) sum_i deg_i eta_i^2`; its cross terms with the intercept and
/// treatment vanish.
pub fn denoised_variance(
    a_pre: &Adjacency,
    basis: &EigenBasis,
    r: usize,
    z: &DesignMatrix,
    x: &DesignMatrix,
    residuals: &[f64],
    pi: f64,
) -> Result<CovarianceEstimate> {
    check_lengths(x, residuals)?;
    check_network(a_pre, x)?;
    check_pi(pi)?;
    let proj = project_residuals(basis, r, residuals)?;
    let s: f64 = residuals.iter().map(|u| u * u).sum();
    let quad: f64 = proj.eta_hat.iter().enumerate().map(|(i, e)| a_pre.degree(i) as f64 * e * e).sum();
    let num = Matrix3::new(s, pi * s, 0.0, pi * s, pi * s, 0.0, 0.0, 0.0, pi * (1.0 - pi) * quad);
    let v = sandwich(&z.cross(x), &num).ok_or(singular("M"))?;
    Ok(CovarianceEstimate::new(v, VarianceFlavor::Denoised))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Normal-theory intervals `beta_k +- z_{1-a/2} se_k`.
pub fn confidence_interval(fit: &FitResult, cov: &CovarianceEstimate, level: f64) -> Result<[Interval; 3]> {
    intervals(&fit.beta_hat, &cov.se, level)
}

pub fn intervals(beta: &[f64; 3], se: &[f64; 3], level: f64) -> Result<[Interval; 3]> {
    let z = critical_value(level)?;
    Ok([0, 1, 2].map(|k| Interval { lower: beta[k] - z * se[k], upper: beta[k] + z * se[k] }))
}

pub fn critical_value(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidConfig(format!("confidence level must lie in (0, 1), got {level}")));
    }
    Ok(std_normal_quantile(0.5 + level / 2.0))
}

pub fn covers(intervals: &[Interval; 3], truth: &[f64; 3]) -> [bool; 3] {
    [0, 1, 2].map(|k| intervals[k].contains(truth[k]))
}
