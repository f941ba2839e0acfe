//! OLS and shift-share IV estimators of the direct and spillover
//! coefficients, and the plug-in effect decomposition.

mod design;
mod effects;
mod eigen;
mod fit;
mod instruments;
mod rank;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use design::{DesignMatrix, COLUMN_NAMES};
pub(crate) use design::sandwich;
pub use effects::{effects_from_fit, ie_std_error, mediator_contrast};
pub use eigen::{eigendecompose, eigendecompose_with, EigenBasis, EigenMethod, DENSE_FALLBACK_LIMIT, FULL_SOLVER_LIMIT};
pub use fit::{instrumented_fit, iv_fit, ols_fit, ols_fit_pre_network, FitResult, InstrumentMeta, RCOND_FLOOR};
pub(crate) use instruments::check_pi;
pub use instruments::{build_denoised_ssiv, build_normalized_ssiv, build_ssiv, denoise, InstrumentKind, InstrumentVector};
pub use rank::{select_rank, RankChoice, MAX_AUTO_RANK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    /// OLS with the post-intervention mediator.
    Ols,
    /// OLS with the mediator computed on the pre-intervention network.
    OlsPre,
    Ssiv,
    NormalizedSsiv,
    DenoisedSsiv,
}

impl EstimatorKind {
    pub const ALL: [Self; 5] = [Self::Ols, Self::OlsPre, Self::Ssiv, Self::NormalizedSsiv, Self::DenoisedSsiv];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ols => "ols",
            Self::OlsPre => "ols-pre",
            Self::Ssiv => "ssiv",
            Self::NormalizedSsiv => "normalized-ssiv",
            Self::DenoisedSsiv => "denoised-ssiv",
        }
    }

    pub fn is_iv(self) -> bool {
        matches!(self, Self::Ssiv | Self::NormalizedSsiv | Self::DenoisedSsiv)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "unknown estimator `{s}` (ols, ols-pre, ssiv, normalized-ssiv, denoised-ssiv)"
            ))
        })
    }
}
