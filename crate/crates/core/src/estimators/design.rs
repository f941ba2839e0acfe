use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::graph_model::check_treatments;
use crate::mediator::MediatorVector;

use super::instruments::InstrumentVector;

/// An `n x 3` regressor or instrument matrix stored by rows. For regressors
/// the columns are `(1, T, M)`; for instruments `(1, T, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: Vec<[f64; 3]>,
}

pub const COLUMN_NAMES: [&str; 3] = ["intercept", "T", "M"];

impl DesignMatrix {
    /// Regressors `(1, T, M)`.
    pub fn new(t: &[u8], m: &MediatorVector) -> Result<Self> {
        check_treatments(t, t.len())?;
        Self::from_third_column(t, &m.m)
    }

    /// Instruments `(1, T, z)`.
    pub fn instruments(t: &[u8], z: &InstrumentVector) -> Result<Self> {
        check_treatments(t, t.len())?;
        Self::from_third_column(t, &z.z)
    }

    fn from_third_column(t: &[u8], third: &[f64]) -> Result<Self> {
        if third.len() != t.len() {
            return Err(Error::InvalidInput(format!(
                "length mismatch: {} treatments vs {} entries in the third column",
                t.len(),
                third.len()
            )));
        }
        Ok(Self { rows: t.iter().zip(third).map(|(&ti, &v)| [1.0, f64::from(ti), v]).collect() })
    }

    /// Builds from raw rows without validating the column layout.
    pub fn from_rows(rows: Vec<[f64; 3]>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[[f64; 3]] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[k]).collect()
    }

    /// Rows restricted to `keep`.
    pub fn select(&self, keep: &[usize]) -> Self {
        Self { rows: keep.iter().map(|&i| self.rows[i]).collect() }
    }

    /// `self' other`.
    pub fn cross(&self, other: &Self) -> Matrix3<f64> {
        let mut m = Matrix3::zeros();
        for (a, b) in self.rows.iter().zip(&other.rows) {
            for r in 0..3 {
                for c in 0..3 {
                    m[(r, c)] += a[r] * b[c];
                }
            }
        }
        m
    }

    /// `self' y`.
    pub fn cross_vec(&self, y: &[f64]) -> Vector3<f64> {
        let mut v = Vector3::zeros();
        for (a, &yi) in self.rows.iter().zip(y) {
            for r in 0..3 {
                v[r] += a[r] * yi;
            }
        }
        v
    }

    /// `y - self * beta`.
    pub fn residuals(&self, y: &[f64], beta: &[f64; 3]) -> Vec<f64> {
        self.rows.iter().zip(y).map(|(r, &yi)| yi - (r[0] * beta[0] + r[1] * beta[1] + r[2] * beta[2])).collect()
    }

    /// Names the first column that makes the regressors rank deficient:
    /// a constant `T` or `M`, or an `M` that is an affine function of `T`.
    pub(crate) fn check_full_rank(&self) -> Result<()> {
        let n = self.rows.len();
        if n < 3 {
            return Err(Error::InvalidSize(format!("need at least 3 observations, got {n}")));
        }
        let t = self.column(1);
        let m = self.column(2);
        if is_constant(&t) {
            return Err(Error::SingularDesign { column: COLUMN_NAMES[1] });
        }
        if is_constant(&m) {
            return Err(Error::SingularDesign { column: COLUMN_NAMES[2] });
        }
        let (rss, tss) = residual_on_intercept_and(&t, &m);
        if rss <= 1e-12 * tss {
            return Err(Error::SingularDesign { column: COLUMN_NAMES[2] });
        }
        Ok(())
    }
}

fn is_constant(xs: &[f64]) -> bool {
    let first = xs[0];
    xs.iter().all(|&x| x == first)
}

/// Residual and total sums of squares of `y` regressed on `(1, x)`.
pub(crate) fn residual_on_intercept_and(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let rss = if sxx > 0.0 { syy - sxy * sxy / sxx } else { syy };
    (rss.max(0.0), syy)
}

/// Reciprocal 2-norm condition number of `m` after scaling rows and columns
/// to unit length.
pub(crate) fn equilibrated_rcond(m: &Matrix3<f64>) -> f64 {
    let mut s = *m;
    for r in 0..3 {
        let norm = s.row(r).norm();
        if norm > 0.0 {
            s.row_mut(r).scale_mut(1.0 / norm);
        }
    }
    for c in 0..3 {
        let norm = s.column(c).norm();
        if norm > 0.0 {
            s.column_mut(c).scale_mut(1.0 / norm);
        }
    }
    let sv = s.singular_values();
    let max = sv.max();
    if max == 0.0 {
        0.0
    } else {
        sv.min() / max
    }
}

/// Solves `a x = b` with a fully pivoted LU factorization.
pub(crate) fn solve3(a: &Matrix3<f64>, b: &Vector3<f64>) -> Option<Vector3<f64>> {
    a.full_piv_lu().solve(b)
}

/// `a^{-1} mid a^{-T}` via two pivoted solves, symmetrized.
pub(crate) fn sandwich(a: &Matrix3<f64>, mid: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    let lu = a.full_piv_lu();
    let left = lu.solve(mid)?;
    let v = lu.solve(&left.transpose())?.transpose();
    Some((v + v.transpose()) * 0.5)
}
