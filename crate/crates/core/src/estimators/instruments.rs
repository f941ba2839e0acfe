use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_model::{check_treatments, Adjacency};

use super::eigen::{eigendecompose, EigenBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstrumentKind {
    Ssiv,
    NormalizedSsiv,
    DenoisedSsiv,
}

impl fmt::Display for InstrumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ssiv => "ssiv",
            Self::NormalizedSsiv => "normalized-ssiv",
            Self::DenoisedSsiv => "denoised-ssiv",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstrumentVector {
    pub z: Vec<f64>,
    pub kind: InstrumentKind,
    pub pi: Option<f64>,
    pub rank: Option<usize>,
}

pub(crate) fn check_pi(pi: f64) -> Result<()> {
    if pi > 0.0 && pi < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("assignment probability must lie in (0, 1), got {pi}")))
    }
}

/// Shift-share instrument `z_i = sum_j A_pre_ij (T_j - pi)`.
pub fn build_ssiv(a_pre: &Adjacency, t: &[u8], pi: f64) -> Result<InstrumentVector> {
    check_treatments(t, a_pre.n())?;
    check_pi(pi)?;
    let centered: Vec<f64> = t.iter().map(|&x| f64::from(x) - pi).collect();
    Ok(InstrumentVector { z: a_pre.matvec(&centered), kind: InstrumentKind::Ssiv, pi: Some(pi), rank: None })
}

/// Share of pre-intervention neighbors that are treated, 0 for isolated units.
pub fn build_normalized_ssiv(a_pre: &Adjacency, t: &[u8]) -> Result<InstrumentVector> {
    check_treatments(t, a_pre.n())?;
    let z = (0..a_pre.n())
        .map(|i| {
            let nb = a_pre.neighbors(i);
            if nb.is_empty() {
                0.0
            } else {
                nb.iter().filter(|&&j| t[j as usize] == 1).count() as f64 / nb.len() as f64
            }
        })
        .collect();
    Ok(InstrumentVector { z, kind: InstrumentKind::NormalizedSsiv, pi: None, rank: None })
}

/// Shift-share instrument with its projection on the leading `r`
/// eigenvectors of `A_pre` removed.
pub fn build_denoised_ssiv(a_pre: &Adjacency, t: &[u8], pi: f64, r: usize) -> Result<InstrumentVector> {
    let basis = eigendecompose(a_pre, r)?;
    let z = build_ssiv(a_pre, t, pi)?;
    denoise(&z, &basis, r)
}

/// Removes the projection of `z` on the first `r` columns of `basis`.
pub fn denoise(z: &InstrumentVector, basis: &EigenBasis, r: usize) -> Result<InstrumentVector> {
    if r > basis.k() {
        return Err(Error::InvalidConfig(format!("rank {r} exceeds the {} computed eigenpairs", basis.k())));
    }
    if basis.n() != z.z.len() {
        return Err(Error::InvalidInput(format!(
            "eigenbasis has {} rows but the instrument has {}",
            basis.n(),
            z.z.len()
        )));
    }
    let mut out = z.z.clone();
    for k in 0..r {
        let psi = basis.vectors.column(k);
        let c: f64 = psi.iter().zip(&out).map(|(p, x)| p * x).sum();
        out.iter_mut().zip(psi.iter()).for_each(|(x, p)| *x -= c * p);
    }
    Ok(InstrumentVector { z: out, kind: InstrumentKind::DenoisedSsiv, pi: z.pi, rank: Some(r) })
}
