//! Leading (algebraically largest) eigenpairs of a symmetric adjacency matrix.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph_model::Adjacency;
use crate::rng::{stream_rng, Stream};

/// Below this size the dense solver is always used.
pub const FULL_SOLVER_LIMIT: usize = 512;
/// Above this size the dense fallback is refused (memory and time).
pub const DENSE_FALLBACK_LIMIT: usize = 6000;

const LANCZOS_TOL: f64 = 1e-12;
const EIGEN_SEED: u64 = 0x5eed_e16e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    Auto,
    Full,
    Lanczos,
}

/// Top-`k` eigenpairs with eigenvalues in descending order and unit-norm
/// eigenvectors as columns. Each vector's first entry exceeding `1e-9` in
/// magnitude is positive.
///
/// With repeated eigenvalues only the spanned subspace is unique.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    /// Hash of the matrix the basis was computed from.
    pub fingerprint: u64,
}

impl EigenBasis {
    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i).iter().copied().collect()
    }

    /// Leading `k` eigenpairs of a dense symmetric matrix.
    pub fn from_symmetric(m: &DMatrix<f64>, k: usize) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::InvalidInput(format!("matrix is {}x{}, not square", n, m.ncols())));
        }
        check_k(n, k)?;
        let mut h = DefaultHasher::new();
        for v in m.iter() {
            v.to_bits().hash(&mut h);
        }
        full_decomposition(m.clone(), k, h.finish())
    }

    /// Restricts to the first `r` eigenpairs.
    pub fn truncated(&self, r: usize) -> Self {
        let r = r.min(self.k());
        Self {
            values: self.values[..r].to_vec(),
            vectors: self.vectors.columns(0, r).into_owned(),
            fingerprint: self.fingerprint,
        }
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::InvalidConfig(format!("requested {k} eigenpairs of a {n}x{n} matrix")));
    }
    Ok(())
}

pub(crate) fn fingerprint(a: &Adjacency) -> u64 {
    let mut h = DefaultHasher::new();
    a.n().hash(&mut h);
    for (i, j) in a.edges() {
        (i, j).hash(&mut h);
    }
    h.finish()
}

fn normalize_sign(v: &mut [f64]) {
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-9) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn dense_of(a: &Adjacency) -> DMatrix<f64> {
    let n = a.n();
    let mut m = DMatrix::zeros(n, n);
    for (i, j) in a.edges() {
        m[(i, j)] = 1.0;
        m[(j, i)] = 1.0;
    }
    m
}

fn sorted_eigen(m: DMatrix<f64>) -> Option<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 100 * n.max(10))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Some((values, vectors))
}

fn full_decomposition(m: DMatrix<f64>, k: usize, fingerprint: u64) -> Result<EigenBasis> {
    let n = m.nrows();
    let (values, vectors) =
        sorted_eigen(m).ok_or(Error::NumericFailure { iterations: 100 * n.max(10), residual: f64::NAN })?;
    let mut out = DMatrix::zeros(n, k);
    for c in 0..k {
        let mut v: Vec<f64> = vectors.column(c).iter().copied().collect();
        normalize_sign(&mut v);
        out.set_column(c, &nalgebra::DVector::from_vec(v));
    }
    Ok(EigenBasis { values: values[..k].to_vec(), vectors: out, fingerprint })
}

/// Leading `k` eigenpairs of the adjacency matrix.
pub fn eigendecompose(a: &Adjacency, k: usize) -> Result<EigenBasis> {
    eigendecompose_with(a, k, EigenMethod::Auto)
}

pub fn eigendecompose_with(a: &Adjacency, k: usize, method: EigenMethod) -> Result<EigenBasis> {
    let n = a.n();
    check_k(n, k)?;
    let fp = fingerprint(a);
    let use_full = match method {
        EigenMethod::Full => true,
        EigenMethod::Lanczos => false,
        EigenMethod::Auto => n <= FULL_SOLVER_LIMIT || 4 * k >= n,
    };
    if use_full {
        return full_decomposition(dense_of(a), k, fp);
    }
    match lanczos(a, k) {
        Ok((values, vectors)) => Ok(EigenBasis { values, vectors, fingerprint: fp }),
        Err(e) if n <= DENSE_FALLBACK_LIMIT => {
            log::warn!("Lanczos did not converge ({e}); falling back to the dense solver");
            full_decomposition(dense_of(a), k, fp)
        }
        Err(e) => Err(e),
    }
}

/// Orthogonalizes `w` against the first `m` columns of `basis` (two passes).
fn reorthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for v in basis {
            let c: f64 = v.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(v).for_each(|(x, vi)| *x -= c * vi);
        }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Lanczos with full reorthogonalization. The Krylov space is extended until
/// the residual bound `|beta_m s_{m,i}|` of each of the top `k` Ritz pairs is
/// below `LANCZOS_TOL * max|theta|`. An invariant subspace is escaped by
/// restarting from a fresh random direction orthogonal to the current basis.
fn lanczos(a: &Adjacency, k: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.n();
    let max_dim = n.min(4 * k + 400);
    let mut rng = stream_rng(EIGEN_SEED, n as u64, Stream::Eigen);
    let mut random_unit = |basis: &[Vec<f64>]| -> Option<Vec<f64>> {
        for _ in 0..3 {
            let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            reorthogonalize(&mut v, basis);
            let nv = norm(&v);
            if nv > 1e-8 {
                v.iter_mut().for_each(|x| *x /= nv);
                return Some(v);
            }
        }
        None
    };

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_dim);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_dim);
    let mut beta: Vec<f64> = Vec::with_capacity(max_dim);
    basis.push(random_unit(&[]).expect("n >= 1"));
    let mut w = vec![0.0; n];
    let mut last_residual = f64::INFINITY;
    let check_every = 8;

    loop {
        let j = basis.len() - 1;
        a.matvec_into(&basis[j], &mut w);
        let aj: f64 = basis[j].iter().zip(&w).map(|(x, y)| x * y).sum();
        alpha.push(aj);
        reorthogonalize(&mut w, &basis);
        let bj = norm(&w);
        let m = basis.len();
        let exhausted = m == max_dim;
        let scale = alpha.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
        let breakdown = bj <= 1e-10 * scale;

        // a breakdown before the space is exhausted means an invariant subspace
        // was found; eigenvalues outside it may be missing, so restart first
        let must_restart = breakdown && m < n && !exhausted;
        if m >= k && !must_restart && (m % check_every == 0 || exhausted || m == n) {
            let tri = DMatrix::from_fn(m, m, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let (theta, s) = sorted_eigen(tri).ok_or(Error::NumericFailure { iterations: m, residual: f64::NAN })?;
            let theta_scale = theta[0].abs().max(theta[m - 1].abs()).max(1e-300);
            let worst = (0..k).map(|i| (bj * s[(m - 1, i)]).abs()).fold(0.0, f64::max);
            last_residual = worst / theta_scale;
            if worst <= LANCZOS_TOL * theta_scale || m == n {
                let mut vectors = DMatrix::zeros(n, k);
                for i in 0..k {
                    let mut y = vec![0.0; n];
                    for (l, v) in basis.iter().enumerate() {
                        let c = s[(l, i)];
                        y.iter_mut().zip(v).for_each(|(yy, vv)| *yy += c * vv);
                    }
                    let ny = norm(&y);
                    y.iter_mut().for_each(|x| *x /= ny);
                    normalize_sign(&mut y);
                    vectors.set_column(i, &nalgebra::DVector::from_vec(y));
                }
                return Ok((theta[..k].to_vec(), vectors));
            }
        }
        if exhausted {
            return Err(Error::NumericFailure { iterations: m, residual: last_residual });
        }
        if breakdown {
            match random_unit(&basis) {
                Some(v) => {
                    beta.push(0.0);
                    basis.push(v);
                }
                None => return Err(Error::NumericFailure { iterations: m, residual: last_residual }),
            }
        } else {
            beta.push(bj);
            basis.push(w.iter().map(|x| x / bj).collect());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_model::{generate_network, sample_disturbances, sample_latents, GraphonSpec, LatentDistribution, Phase};

    fn sbm(n: usize, seed: u64) -> Adjacency {
        let lat = sample_latents(n, seed, LatentDistribution::StandardNormal).unwrap();
        let eta = sample_disturbances(n, seed).unwrap();
        generate_network(&GraphonSpec::Sbm3, Phase::Pre, crate::graph_model::SparsityRate::Constant(0.5), &lat, None, &eta).unwrap()
    }

    #[test]
    fn complete_graph_spectrum() {
        let b = eigendecompose(&Adjacency::complete(6), 2).unwrap();
        assert!((b.values[0] - 5.0).abs() < 1e-12);
        assert!((b.values[1] + 1.0).abs() < 1e-12);
        let v = b.vector(0);
        for x in v {
            assert!((x - 1.0 / 6f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let a = sbm(300, 7);
        let full = eigendecompose_with(&a, 4, EigenMethod::Full).unwrap();
        let lan = eigendecompose_with(&a, 4, EigenMethod::Lanczos).unwrap();
        for i in 0..4 {
            assert!((full.values[i] - lan.values[i]).abs() < 1e-9 * full.values[0]);
            let d: f64 = full.vector(i).iter().zip(lan.vector(i)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(d < 1e-8, "vector {i} differs by {d}");
        }
    }

    #[test]
    fn lanczos_escapes_invariant_subspace() {
        // two disjoint triangles plus isolated units: many repeated eigenvalues
        let a = Adjacency::from_edges(20, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let lan = eigendecompose_with(&a, 2, EigenMethod::Lanczos).unwrap();
        assert!((lan.values[0] - 2.0).abs() < 1e-10);
        assert!((lan.values[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn orthonormal_columns() {
        let b = eigendecompose(&sbm(120, 3), 5).unwrap();
        let g = b.vectors.transpose() * &b.vectors;
        assert!((g - DMatrix::identity(5, 5)).amax() < 1e-10);
    }

    #[test]
    fn rejects_bad_k() {
        assert!(eigendecompose(&Adjacency::complete(4), 0).is_err());
        assert!(eigendecompose(&Adjacency::complete(4), 5).is_err());
    }
}
