//! Brute-force reference implementations and random small instances shared by
//! the integration tests. Everything here works on dense `Vec<Vec<f64>>`
//! matrices with explicit loops and a cofactor 3x3 inverse.

#![allow(dead_code)]

pub mod properties;

use netiv::estimators::{
    build_ssiv, denoise, eigendecompose, iv_fit, ols_fit, DesignMatrix, FitResult,
};
use netiv::graph_model::Adjacency;
use netiv::mediator::{mediator, MediatorKind};
use netiv::variance::{denoised_variance, hc_variance, ssiv_variance, CovarianceEstimate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type M3 = [[f64; 3]; 3];

pub fn inverse3(m: &M3) -> M3 {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let cof = [
        [c(1, 2, 1, 2), -c(1, 2, 0, 2), c(1, 2, 0, 1)],
        [-c(0, 2, 1, 2), c(0, 2, 0, 2), -c(0, 2, 0, 1)],
        [c(0, 1, 1, 2), -c(0, 1, 0, 2), c(0, 1, 0, 1)],
    ];
    let det = m[0][0] * cof[0][0] + m[0][1] * cof[0][1] + m[0][2] * cof[0][2];
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            inv[i][j] = cof[j][i] / det;
        }
    }
    inv
}

pub fn mul3(a: &M3, b: &M3) -> M3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn transpose3(a: &M3) -> M3 {
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = a[j][i];
        }
    }
    t
}

/// `sum_i a_i b_i'` over rows.
pub fn cross(a: &[[f64; 3]], b: &[[f64; 3]]) -> M3 {
    let mut out = [[0.0; 3]; 3];
    for (ra, rb) in a.iter().zip(b) {
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] += ra[i] * rb[j];
            }
        }
    }
    out
}

pub fn solve_normal(a: &[[f64; 3]], x: &[[f64; 3]], y: &[f64]) -> [f64; 3] {
    let inv = inverse3(&cross(a, x));
    let mut ay = [0.0; 3];
    for (r, &yi) in a.iter().zip(y) {
        for k in 0..3 {
            ay[k] += r[k] * yi;
        }
    }
    let mut beta = [0.0; 3];
    for i in 0..3 {
        for k in 0..3 {
            beta[i] += inv[i][k] * ay[k];
        }
    }
    beta
}

/// `B^{-1} meat B^{-T}` with `B = a'x`.
pub fn sandwich(a: &[[f64; 3]], x: &[[f64; 3]], meat: &M3) -> M3 {
    let inv = inverse3(&cross(a, x));
    mul3(&mul3(&inv, meat), &transpose3(&inv))
}

pub fn residuals(x: &[[f64; 3]], y: &[f64], beta: &[f64; 3]) -> Vec<f64> {
    x.iter().zip(y).map(|(r, &yi)| yi - (r[0] * beta[0] + r[1] * beta[1] + r[2] * beta[2])).collect()
}

pub fn hc_meat(a: &[[f64; 3]], u: &[f64]) -> M3 {
    let mut meat = [[0.0; 3]; 3];
    for (r, &ui) in a.iter().zip(u) {
        for i in 0..3 {
            for j in 0..3 {
                meat[i][j] += ui * ui * r[i] * r[j];
            }
        }
    }
    meat
}

/// Shift-share meat by explicit double and triple sums over the dense graph.
pub fn ssiv_meat(adj: &[Vec<f64>], u: &[f64], pi: f64) -> M3 {
    let n = u.len();
    let s: f64 = u.iter().map(|v| v * v).sum();
    let k = pi * (1.0 - pi);
    let mut c = 0.0;
    for i in 0..n {
        for j in 0..n {
            c += adj[i][j] * u[i] * u[j];
        }
    }
    let mut d = 0.0;
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                d += adj[i][j] * adj[i][l] * u[j] * u[l];
            }
        }
    }
    [[s, pi * s, 0.0], [pi * s, pi * s, k * c], [0.0, k * c, k * d]]
}

/// Top-`r` eigenvectors (largest eigenvalues first) from nalgebra's dense
/// symmetric solver.
pub fn top_eigenvectors(adj: &[Vec<f64>], r: usize) -> Vec<Vec<f64>> {
    let n = adj.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| adj[i][j]);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    order.iter().take(r).map(|&k| eig.eigenvectors.column(k).iter().copied().collect()).collect()
}

/// `(I - Psi Psi') v` with the projector formed explicitly.
pub fn project_out(psi: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut acc = v[i];
            for j in 0..n {
                let p: f64 = psi.iter().map(|e| e[i] * e[j]).sum();
                acc -= p * v[j];
            }
            acc
        })
        .collect()
}

pub fn denoised_meat(adj: &[Vec<f64>], psi: &[Vec<f64>], u: &[f64], pi: f64) -> M3 {
    let s: f64 = u.iter().map(|v| v * v).sum();
    let eta = project_out(psi, u);
    let d: f64 = (0..u.len()).map(|i| adj[i].iter().sum::<f64>() * eta[i] * eta[i]).sum();
    [[s, pi * s, 0.0], [pi * s, pi * s, 0.0], [0.0, 0.0, pi * (1.0 - pi) * d]]
}

/// A small random instance with both arms present and a mediator that is
/// not affine in the treatment.
pub struct Instance {
    pub n: usize,
    pub adj: Vec<Vec<f64>>,
    pub a: Adjacency,
    pub t: Vec<u8>,
    pub m: Vec<f64>,
    pub y: Vec<f64>,
    pub pi: f64,
    pub r: usize,
}

impl Instance {
    pub fn x(&self) -> Vec<[f64; 3]> {
        (0..self.n).map(|i| [1.0, f64::from(self.t[i]), self.m[i]]).collect()
    }

    /// `z_i = sum_j a_ij (t_j - pi)`.
    pub fn z(&self) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.adj[i][j] * (f64::from(self.t[j]) - self.pi)).sum()).collect()
    }

    pub fn instruments(&self, z: &[f64]) -> Vec<[f64; 3]> {
        (0..self.n).map(|i| [1.0, f64::from(self.t[i]), z[i]]).collect()
    }
}

fn well_conditioned(x: &[[f64; 3]], z: &[[f64; 3]]) -> bool {
    let b = cross(z, x);
    let inv = inverse3(&b);
    let norm = |m: &M3| m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let cond = norm(&b) * norm(&inv);
    cond.is_finite() && cond < 1e6
}

/// Draws until the instance admits well-conditioned OLS, SSIV and denoised
/// SSIV fits, so that a 1e-10 comparison is meaningful.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.random_range(5..=12);
        let p = rng.random_range(0.3..0.8);
        let mut adj = vec![vec![0.0; n]; n];
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < p {
                    adj[i][j] = 1.0;
                    adj[j][i] = 1.0;
                    edges.push((i, j));
                }
            }
        }
        let t: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<bool>())).collect();
        let a = Adjacency::from_edges(n, edges).unwrap();
        let m = mediator(&a, &t, MediatorKind::Fraction).unwrap().m;
        let y: Vec<f64> = (0..n)
            .map(|i| 1.0 + f64::from(t[i]) + 0.5 * m[i] + rng.random_range(-1.0..1.0))
            .collect();
        let pi = rng.random_range(0.2..0.8);
        let r = rng.random_range(1..=2);
        let inst = Instance { n, adj, a, t, m, y, pi, r };
        let x = inst.x();
        let psi = top_eigenvectors(&inst.adj, r);
        let ok = well_conditioned(&x, &x)
            && well_conditioned(&x, &inst.instruments(&inst.z()))
            && well_conditioned(&x, &inst.instruments(&project_out(&psi, &inst.z())))
            && eigen_gap(&inst.adj, r) > 1e-3;
        if ok {
            return inst;
        }
    }
}

/// Gap below the `r`-th eigenvalue; the truncated basis is unique only when
/// it is positive.
fn eigen_gap(adj: &[Vec<f64>], r: usize) -> f64 {
    let n = adj.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| adj[i][j]);
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev[r - 1] - ev[r]
}

/// What the library computes on an instance.
pub struct LibraryResults {
    pub ols: FitResult,
    pub ols_hc: CovarianceEstimate,
    pub iv: FitResult,
    pub iv_var: CovarianceEstimate,
    pub de: FitResult,
    pub de_var: CovarianceEstimate,
}

pub fn library(inst: &Instance) -> LibraryResults {
    let mv = mediator(&inst.a, &inst.t, MediatorKind::Fraction).unwrap();
    let x = DesignMatrix::new(&inst.t, &mv).unwrap();
    let ols = ols_fit(&x, &inst.y).unwrap();
    let ols_hc = hc_variance(&x, &ols.residuals).unwrap();
    let z = build_ssiv(&inst.a, &inst.t, inst.pi).unwrap();
    let zm = DesignMatrix::instruments(&inst.t, &z).unwrap();
    let iv = iv_fit(&x, &zm, &inst.y).unwrap();
    let iv_var = ssiv_variance(&inst.a, &zm, &x, &iv.residuals, inst.pi).unwrap();
    let basis = eigendecompose(&inst.a, inst.r).unwrap();
    let zd = denoise(&z, &basis, inst.r).unwrap();
    let zdm = DesignMatrix::instruments(&inst.t, &zd).unwrap();
    let de = iv_fit(&x, &zdm, &inst.y).unwrap();
    let de_var = denoised_variance(&inst.a, &basis, inst.r, &zdm, &x, &de.residuals, inst.pi).unwrap();
    LibraryResults { ols, ols_hc, iv, iv_var, de, de_var }
}

/// `|a - b| <= tol * max(|b|, scale)` with `scale` the largest reference
/// magnitude, so entries near zero are judged on the matrix's scale.
pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * y.abs().max(scale).max(1e-300))
}

pub fn flat(m: &M3) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

pub fn flat_na(m: &nalgebra::Matrix3<f64>) -> Vec<f64> {
    (0..3).flat_map(|i| (0..3).map(move |j| m[(i, j)])).collect()
}

/// Compares every library quantity with its brute-force counterpart and
/// returns the names of those that disagree.
pub fn oracle_mismatches(inst: &Instance, tol: f64) -> Vec<&'static str> {
    let lib = library(inst);
    let x = inst.x();
    let mut bad = Vec::new();

    let b_ols = solve_normal(&x, &x, &inst.y);
    if !close(&lib.ols.beta_hat, &b_ols, tol) {
        bad.push("ols_fit");
    }
    let u_ols = residuals(&x, &inst.y, &b_ols);
    if !close(&flat_na(&lib.ols_hc.v), &flat(&sandwich(&x, &x, &hc_meat(&x, &u_ols))), tol) {
        bad.push("hc_variance");
    }

    let zm = inst.instruments(&inst.z());
    let b_iv = solve_normal(&zm, &x, &inst.y);
    if !close(&lib.iv.beta_hat, &b_iv, tol) {
        bad.push("iv_fit");
    }
    let u_iv = residuals(&x, &inst.y, &b_iv);
    if !close(&flat_na(&lib.iv_var.v), &flat(&sandwich(&zm, &x, &ssiv_meat(&inst.adj, &u_iv, inst.pi))), tol) {
        bad.push("ssiv_variance");
    }

    let psi = top_eigenvectors(&inst.adj, inst.r);
    let zd = inst.instruments(&project_out(&psi, &inst.z()));
    let b_de = solve_normal(&zd, &x, &inst.y);
    if !close(&lib.de.beta_hat, &b_de, tol) {
        bad.push("iv_fit (denoised)");
    }
    let u_de = residuals(&x, &inst.y, &b_de);
    let v_de = sandwich(&zd, &x, &denoised_meat(&inst.adj, &psi, &u_de, inst.pi));
    if !close(&flat_na(&lib.de_var.v), &flat(&v_de), tol) {
        bad.push("denoised_variance");
    }
    bad
}
