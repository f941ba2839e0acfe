use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{Error, FirstStage, Result};
use crate::graph_model::Adjacency;
use crate::mediator::fraction_treated;

use super::design::{equilibrated_rcond, solve3, DesignMatrix};
use super::instruments::{InstrumentKind, InstrumentVector};
use super::EstimatorKind;

/// Below this reciprocal condition number a cross-product matrix is treated
/// as singular.
pub const RCOND_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstrumentMeta {
    pub kind: InstrumentKind,
    pub pi: Option<f64>,
    pub rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// `(beta_0, beta_1, beta_2)`: intercept, direct effect, spillover.
    pub beta_hat: [f64; 3],
    /// `Y - X beta_hat`.
    pub residuals: Vec<f64>,
    pub estimator: EstimatorKind,
    pub instrument: Option<InstrumentMeta>,
    /// 2-norm condition number of the equilibrated `X'X` or `Z'X`.
    pub condition_number: f64,
    /// `X'X` for OLS, `Z'X` for IV.
    pub bread: Matrix3<f64>,
}

fn check_outcome(x: &DesignMatrix, y: &[f64]) -> Result<()> {
    if y.len() != x.n() {
        return Err(Error::InvalidInput(format!("{} outcomes for {} units", y.len(), x.n())));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("outcome of unit {i} is not finite")));
    }
    Ok(())
}

/// Least squares of `y` on `(1, T, M)`.
pub fn ols_fit(x: &DesignMatrix, y: &[f64]) -> Result<FitResult> {
    check_outcome(x, y)?;
    x.check_full_rank()?;
    let xtx = x.cross(x);
    let rcond = equilibrated_rcond(&xtx);
    if rcond < RCOND_FLOOR {
        return Err(Error::SingularDesign { column: "M" });
    }
    let beta = solve3(&xtx, &x.cross_vec(y)).ok_or(Error::SingularDesign { column: "M" })?;
    let beta_hat = [beta[0], beta[1], beta[2]];
    Ok(FitResult {
        residuals: x.residuals(y, &beta_hat),
        beta_hat,
        estimator: EstimatorKind::Ols,
        instrument: None,
        condition_number: 1.0 / rcond,
        bread: xtx,
    })
}

/// Least squares with the mediator built from the pre-intervention network.
pub fn ols_fit_pre_network(a_pre: &Adjacency, t: &[u8], y: &[f64]) -> Result<FitResult> {
    let m = fraction_treated(a_pre, t)?;
    let x = DesignMatrix::new(t, &m)?;
    let mut fit = ols_fit(&x, y)?;
    fit.estimator = EstimatorKind::OlsPre;
    Ok(fit)
}

fn first_stage(x: &DesignMatrix, z: &DesignMatrix, rcond: f64) -> FirstStage {
    let t = x.column(1);
    let m = x.column(2);
    let zc = z.column(2);
    let resid = |v: &[f64]| -> Vec<f64> {
        // residual of v on (1, T) is v minus its arm mean
        let mut sums = [0.0; 2];
        let mut counts = [0.0; 2];
        for (&ti, &vi) in t.iter().zip(v) {
            let a = usize::from(ti > 0.5);
            sums[a] += vi;
            counts[a] += 1.0;
        }
        t.iter()
            .zip(v)
            .map(|(&ti, &vi)| {
                let a = usize::from(ti > 0.5);
                vi - if counts[a] > 0.0 { sums[a] / counts[a] } else { 0.0 }
            })
            .collect()
    };
    let rm = resid(&m);
    let rz = resid(&zc);
    let mz: f64 = rm.iter().zip(&rz).map(|(a, b)| a * b).sum();
    let zz: f64 = rz.iter().map(|a| a * a).sum();
    let mm: f64 = rm.iter().map(|a| a * a).sum();
    let coef = if zz > 0.0 { mz / zz } else { 0.0 };
    let partial_r2 = if zz > 0.0 && mm > 0.0 { mz * mz / (zz * mm) } else { 0.0 };
    FirstStage { coef, partial_r2, rcond }
}

/// Just-identified IV: solves `Z'X beta = Z'y`. The result is labeled as the
/// plain shift-share estimator; [`instrumented_fit`] sets the proper label.
pub fn iv_fit(x: &DesignMatrix, z: &DesignMatrix, y: &[f64]) -> Result<FitResult> {
    check_outcome(x, y)?;
    if z.n() != x.n() {
        return Err(Error::InvalidInput(format!("{} instrument rows for {} units", z.n(), x.n())));
    }
    x.check_full_rank()?;
    let zx = z.cross(x);
    let rcond = equilibrated_rcond(&zx);
    if rcond < RCOND_FLOOR {
        return Err(Error::WeakInstrument(first_stage(x, z, rcond)));
    }
    let beta = solve3(&zx, &z.cross_vec(y)).ok_or_else(|| Error::WeakInstrument(first_stage(x, z, 0.0)))?;
    let beta_hat = [beta[0], beta[1], beta[2]];
    Ok(FitResult {
        residuals: x.residuals(y, &beta_hat),
        beta_hat,
        estimator: EstimatorKind::Ssiv,
        instrument: None,
        condition_number: 1.0 / rcond,
        bread: zx,
    })
}

/// IV with instruments `(1, T, z)` built from an [`InstrumentVector`].
pub fn instrumented_fit(x: &DesignMatrix, t: &[u8], y: &[f64], z: &InstrumentVector) -> Result<FitResult> {
    let zm = DesignMatrix::instruments(t, z)?;
    let mut fit = iv_fit(x, &zm, y)?;
    fit.estimator = match z.kind {
        InstrumentKind::Ssiv => EstimatorKind::Ssiv,
        InstrumentKind::NormalizedSsiv => EstimatorKind::NormalizedSsiv,
        InstrumentKind::DenoisedSsiv => EstimatorKind::DenoisedSsiv,
    };
    fit.instrument = Some(InstrumentMeta { kind: z.kind, pi: z.pi, rank: z.rank });
    Ok(fit)
}
