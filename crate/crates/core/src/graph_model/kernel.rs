use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::stats::std_normal_cdf;

/// Which network a kernel describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Pre,
    Post,
}

pub type PreKernelFn = dyn Fn(f64, f64) -> f64 + Send + Sync;
pub type PostKernelFn = dyn Fn(f64, f64, u8, u8) -> f64 + Send + Sync;

/// A user-supplied pair of kernels. Both must be symmetric in the unit
/// arguments and return values in [0, 1].
#[derive(Clone)]
pub struct CustomKernel {
    pub name: String,
    pre: Arc<PreKernelFn>,
    post: Arc<PostKernelFn>,
}

impl CustomKernel {
    pub fn new(
        name: impl Into<String>,
        pre: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        post: impl Fn(f64, f64, u8, u8) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), pre: Arc::new(pre), post: Arc::new(post) }
    }

    /// A kernel whose post-intervention network ignores treatments.
    pub fn treatment_free(
        name: impl Into<String>,
        kernel: impl Fn(f64, f64) -> f64 + Send + Sync + Clone + 'static,
    ) -> Self {
        let post = kernel.clone();
        Self::new(name, kernel, move |a, b, _, _| post(a, b))
    }

    /// Constant kernel `c` in both phases.
    pub fn constant(c: f64) -> Self {
        Self::new(format!("const-{c}"), move |_, _| c, move |_, _, _, _| c)
    }
}

impl fmt::Debug for CustomKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomKernel").field("name", &self.name).finish_non_exhaustive()
    }
}

/// Link-probability kernels for the pre- and post-intervention networks.
#[derive(Debug, Clone)]
pub enum GraphonSpec {
    /// Three-block stochastic block model on `Phi(w)`; treated units move to
    /// the middle block after the intervention.
    Sbm3,
    /// Homophily on `Phi(w)`, with treated units' positions collapsing to 0.
    HomophilyD2,
    /// Beta model with treatment shifts `T_i + T_j + T_i T_j`.
    Beta,
    /// Homophily on `Phi(w (1 - T))`.
    HomophilyD4,
    Custom(CustomKernel),
}

const SBM_WITHIN: [f64; 3] = [3.0 / 5.0, 1.0 / 3.0, 1.0 / 2.0];
const SBM_BETWEEN: f64 = 1.0 / 5.0;

#[inline]
fn sbm_block(u: f64) -> u8 {
    if u <= 1.0 / 3.0 {
        0
    } else if u <= 2.0 / 3.0 {
        1
    } else {
        2
    }
}

#[inline]
fn sbm_value(a: u8, b: u8) -> f64 {
    if a == b {
        SBM_WITHIN[a as usize]
    } else {
        SBM_BETWEEN
    }
}

#[inline]
fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl GraphonSpec {
    pub fn name(&self) -> &str {
        match self {
            Self::Sbm3 => "sbm3",
            Self::HomophilyD2 => "homophily-d2",
            Self::Beta => "beta",
            Self::HomophilyD4 => "homophily-d4",
            Self::Custom(k) => &k.name,
        }
    }

    /// Design number (1-4) of the built-in simulation designs.
    pub fn design_number(&self) -> Option<u8> {
        match self {
            Self::Sbm3 => Some(1),
            Self::HomophilyD2 => Some(2),
            Self::Beta => Some(3),
            Self::HomophilyD4 => Some(4),
            Self::Custom(_) => None,
        }
    }

    pub fn from_design_number(d: u8) -> Result<Self> {
        match d {
            1 => Ok(Self::Sbm3),
            2 => Ok(Self::HomophilyD2),
            3 => Ok(Self::Beta),
            4 => Ok(Self::HomophilyD4),
            _ => Err(Error::InvalidConfig(format!("unknown design number {d}"))),
        }
    }

    /// Low-rank truncation used for the denoised instrument of each built-in design.
    pub fn default_rank(&self) -> Option<usize> {
        match self {
            Self::Sbm3 => Some(3),
            Self::HomophilyD2 | Self::Beta | Self::HomophilyD4 => Some(2),
            Self::Custom(_) => None,
        }
    }

    /// Evaluates the kernel on raw latent values. Self-pairs are the caller's
    /// responsibility; see [`PreparedKernel::probability`].
    pub fn value(&self, phase: Phase, wi: f64, wj: f64, ti: u8, tj: u8) -> f64 {
        let (ti, tj) = match phase {
            Phase::Pre => (0, 0),
            Phase::Post => (ti, tj),
        };
        let (fi, fj) = (f64::from(1 - ti), f64::from(1 - tj));
        match self {
            Self::Sbm3 => match phase {
                Phase::Pre => sbm_value(sbm_block(std_normal_cdf(wi)), sbm_block(std_normal_cdf(wj))),
                Phase::Post => sbm_value(
                    sbm_block(std_normal_cdf(wi * fi)),
                    sbm_block(std_normal_cdf(wj * fj)),
                ),
            },
            Self::HomophilyD2 => {
                let d = std_normal_cdf(wi) * fi - std_normal_cdf(wj) * fj;
                1.0 - d * d
            }
            Self::Beta => {
                let (a, b) = (f64::from(ti), f64::from(tj));
                logistic(std_normal_cdf(wi) + std_normal_cdf(wj) + a + b + a * b)
            }
            Self::HomophilyD4 => {
                let d = std_normal_cdf(wi * fi) - std_normal_cdf(wj * fj);
                1.0 - d * d
            }
            Self::Custom(k) => match phase {
                Phase::Pre => (k.pre)(wi, wj),
                Phase::Post => (k.post)(wi, wj, ti, tj),
            },
        }
    }

    /// Precomputes per-unit features so that pair evaluations are cheap.
    pub fn prepare<'a>(&'a self, phase: Phase, w: &'a [f64]) -> PreparedKernel<'a> {
        let phis = || w.iter().map(|&x| std_normal_cdf(x)).collect::<Vec<_>>();
        let feature = match (self, phase) {
            (Self::Sbm3, Phase::Pre) => {
                let g: Vec<u8> = phis().into_iter().map(sbm_block).collect();
                Features::Block([g.clone(), g])
            }
            (Self::Sbm3, Phase::Post) => {
                let g0: Vec<u8> = phis().into_iter().map(sbm_block).collect();
                // Phi(0) = 1/2 sits in the middle block.
                let g1 = vec![sbm_block(0.5); w.len()];
                Features::Block([g0, g1])
            }
            (Self::HomophilyD2 | Self::HomophilyD4, Phase::Pre) => {
                let x = phis();
                Features::Position([x.clone(), x])
            }
            (Self::HomophilyD2, Phase::Post) => Features::Position([phis(), vec![0.0; w.len()]]),
            (Self::HomophilyD4, Phase::Post) => Features::Position([phis(), vec![0.5; w.len()]]),
            (Self::Beta, Phase::Pre) => {
                let a: Vec<f64> = phis().into_iter().map(|p| (-p).exp()).collect();
                Features::Beta { scale: [a.clone(), a], interaction: false }
            }
            (Self::Beta, Phase::Post) => {
                let p = phis();
                let a0 = p.iter().map(|x| (-x).exp()).collect();
                let a1 = p.iter().map(|x| (-x - 1.0).exp()).collect();
                Features::Beta { scale: [a0, a1], interaction: true }
            }
            (Self::Custom(k), _) => Features::Custom { kernel: k, w },
        };
        PreparedKernel { feature, phase }
    }
}

impl fmt::Display for GraphonSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphonSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sbm3" | "1" => Ok(Self::Sbm3),
            "homophily-d2" | "2" => Ok(Self::HomophilyD2),
            "beta" | "3" => Ok(Self::Beta),
            "homophily-d4" | "4" => Ok(Self::HomophilyD4),
            other => Err(Error::InvalidConfig(format!(
                "unknown design `{other}` (expected sbm3, homophily-d2, beta or homophily-d4)"
            ))),
        }
    }
}

/// Kernel value checked for binary treatments and the unit interval.
pub fn kernel_value(spec: &GraphonSpec, phase: Phase, wi: f64, wj: f64, ti: u8, tj: u8) -> Result<f64> {
    if ti > 1 || tj > 1 {
        return Err(Error::InvalidInput(format!("treatments must be 0 or 1, got ({ti}, {tj})")));
    }
    let v = spec.value(phase, wi, wj, ti, tj);
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidConfig(format!("kernel `{}` returned {v} outside [0, 1]", spec.name())));
    }
    Ok(v)
}

enum Features<'a> {
    Block([Vec<u8>; 2]),
    Position([Vec<f64>; 2]),
    Beta { scale: [Vec<f64>; 2], interaction: bool },
    Custom { kernel: &'a CustomKernel, w: &'a [f64] },
}

/// A kernel bound to one latent draw, indexed by unit and treatment state.
pub struct PreparedKernel<'a> {
    feature: Features<'a>,
    phase: Phase,
}

impl PreparedKernel<'_> {
    /// Kernel value for units `i != j` with treatments `ti`, `tj` (ignored
    /// for the pre-intervention phase).
    #[inline]
    pub fn value(&self, i: usize, ti: u8, j: usize, tj: u8) -> f64 {
        let (ti, tj) = match self.phase {
            Phase::Pre => (0usize, 0usize),
            Phase::Post => (ti as usize, tj as usize),
        };
        match &self.feature {
            Features::Block(g) => sbm_value(g[ti][i], g[tj][j]),
            Features::Position(x) => {
                let d = x[ti][i] - x[tj][j];
                1.0 - d * d
            }
            Features::Beta { scale, interaction } => {
                let mut e = scale[ti][i] * scale[tj][j];
                if *interaction && ti == 1 && tj == 1 {
                    e *= std::f64::consts::E.recip();
                }
                1.0 / (1.0 + e)
            }
            Features::Custom { kernel, w } => match self.phase {
                Phase::Pre => (kernel.pre)(w[i], w[j]),
                Phase::Post => (kernel.post)(w[i], w[j], ti as u8, tj as u8),
            },
        }
    }

    /// Same as [`value`](Self::value) but 0 on the diagonal.
    #[inline]
    pub fn probability(&self, i: usize, ti: u8, j: usize, tj: u8) -> f64 {
        if i == j {
            0.0
        } else {
            self.value(i, ti, j, tj)
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }
}
