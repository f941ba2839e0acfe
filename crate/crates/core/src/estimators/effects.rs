use crate::error::{Error, Result};
use crate::mediator::{MediatorKind, MediatorVector};
use crate::outcome::Estimands;

use super::fit::FitResult;

/// Difference in mean mediator between treated and control units.
pub fn mediator_contrast(t: &[u8], m: &[f64]) -> Result<f64> {
    if t.len() != m.len() {
        return Err(Error::InvalidInput(format!("{} treatments for {} mediator values", t.len(), m.len())));
    }
    let mut sums = [0.0; 2];
    let mut counts = [0usize; 2];
    for (&ti, &mi) in t.iter().zip(m) {
        sums[usize::from(ti)] += mi;
        counts[usize::from(ti)] += 1;
    }
    for arm in [0u8, 1] {
        if counts[usize::from(arm)] == 0 {
            return Err(Error::UndefinedContrast { arm });
        }
    }
    Ok(sums[1] / counts[1] as f64 - sums[0] / counts[0] as f64)
}

/// Plug-in effect decomposition: `DE = beta_1`, `SE = beta_2`,
/// `IE = beta_2 * (mean M | T=1 - mean M | T=0)`, `ToE = DE + IE`.
///
/// `ie_std_error` is NaN; use [`ie_std_error`] with a covariance estimate.
pub fn effects_from_fit(fit: &FitResult, t: &[u8], m: &MediatorVector) -> Result<Estimands> {
    if m.kind != MediatorKind::Fraction {
        return Err(Error::InvalidInput(format!(
            "the effect decomposition needs the fraction mediator, got `{}`",
            m.kind
        )));
    }
    let contrast = mediator_contrast(t, &m.m)?;
    let de = fit.beta_hat[1];
    let se = fit.beta_hat[2];
    let ie = se * contrast;
    Ok(Estimands {
        toe: de + ie,
        de,
        ie,
        se,
        de_by_t: [de, de],
        ie_by_t: [ie, ie],
        se_by_t: [se, se],
        mediator_contrast: contrast,
        ie_std_error: f64::NAN,
    })
}

/// Delta-method standard error of `beta_2 * contrast` treating the
/// contrast as fixed.
pub fn ie_std_error(var_beta2: f64, contrast: f64) -> f64 {
    contrast.abs() * var_beta2.max(0.0).sqrt()
}
