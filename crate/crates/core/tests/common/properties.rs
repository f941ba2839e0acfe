//! Randomized invariant checks, each driven by a proptest runner so that the
//! integration tests and the acceptance target exercise the same properties.

use netiv::estimators::{build_ssiv, denoise, eigendecompose, eigendecompose_with, iv_fit, DesignMatrix, EigenMethod, EstimatorKind};
use netiv::graph_model::{
    generate_network, sample_disturbances, sample_latents, Adjacency, GraphonSpec, LatentDistribution, Phase,
    SparsityRate,
};
use netiv::mediator::{mediator, MediatorKind};
use netiv::montecarlo::{simulate, Dgp, SimConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const CASES: u32 = 256;

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

fn treatments(n: usize, bits: u64) -> Vec<u8> {
    (0..n).map(|i| ((bits >> (i % 64)) & 1) as u8).collect()
}

fn network(design: u8, n: usize, q: f64, seed: u64, t: &[u8], phase: Phase) -> Adjacency {
    let spec = GraphonSpec::from_design_number(design).unwrap();
    let lat = sample_latents(n, seed, LatentDistribution::StandardNormal).unwrap();
    let eta = sample_disturbances(n, seed ^ 0x5eed).unwrap();
    generate_network(&spec, phase, SparsityRate::Constant(q), &lat, Some(t), &eta).unwrap()
}

pub fn adjacency_symmetric_loopless(cases: u32) -> Result<(), String> {
    let strat = (1u8..=4, 2usize..40, 0.0f64..=1.0, any::<u64>(), any::<u64>());
    report(runner(cases).run(&strat, |(design, n, q, seed, bits)| {
        let t = treatments(n, bits);
        for phase in [Phase::Pre, Phase::Post] {
            let d = network(design, n, q, seed, &t, phase).to_dense();
            for i in 0..n {
                prop_assert_eq!(d[i][i], 0);
                for j in 0..n {
                    prop_assert_eq!(d[i][j], d[j][i]);
                }
            }
        }
        Ok(())
    }))
}

pub fn edges_monotone_in_q(cases: u32) -> Result<(), String> {
    let strat = (1u8..=4, 2usize..40, 0.0f64..=1.0, 0.0f64..=1.0, any::<u64>(), any::<u64>());
    report(runner(cases).run(&strat, |(design, n, q1, q2, seed, bits)| {
        let (lo, hi) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        let t = treatments(n, bits);
        let sparse = network(design, n, lo, seed, &t, Phase::Post);
        let dense = network(design, n, hi, seed, &t, Phase::Post);
        for (i, j) in sparse.edges() {
            prop_assert!(dense.contains(i, j), "edge ({i}, {j}) lost at q={hi}");
        }
        Ok(())
    }))
}

/// Orthogonality of the denoised instrument to the removed eigenvectors and
/// `|z_denoised| <= |z|`.
pub fn denoised_orthogonal_and_shorter(cases: u32) -> Result<(), String> {
    let strat = (1u8..=4, 6usize..40, any::<u64>(), any::<u64>(), 0.1f64..0.9, 1usize..=3);
    report(runner(cases).run(&strat, |(design, n, seed, bits, pi, r)| {
        let t = treatments(n, bits);
        let a = network(design, n, 0.8, seed, &t, Phase::Pre);
        let z = build_ssiv(&a, &t, pi).unwrap();
        let basis = eigendecompose(&a, r).unwrap();
        let zd = denoise(&z, &basis, r).unwrap();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = norm(&z.z).max(1.0);
        for k in 0..r {
            let dot: f64 = basis.vectors.column(k).iter().zip(&zd.z).map(|(p, v)| p * v).sum();
            prop_assert!(dot.abs() < 1e-8 * scale, "component {k}: {dot}");
        }
        prop_assert!(norm(&zd.z) <= norm(&z.z) * (1.0 + 1e-12));
        Ok(())
    }))
}

pub fn iv_residuals_orthogonal(cases: u32) -> Result<(), String> {
    let strat = (1u8..=4, 8usize..40, any::<u64>(), any::<u64>(), proptest::collection::vec(-1.0f64..1.0, 40));
    report(runner(cases).run(&strat, |(design, n, seed, bits, noise)| {
        let t = treatments(n, bits);
        if !(t.contains(&0) && t.contains(&1)) {
            return Err(TestCaseError::reject("one arm is empty"));
        }
        let a_pre = network(design, n, 0.7, seed, &t, Phase::Pre);
        let a_post = network(design, n, 0.7, seed, &t, Phase::Post);
        let m = mediator(&a_post, &t, MediatorKind::Fraction).unwrap();
        let x = DesignMatrix::new(&t, &m).unwrap();
        let z = DesignMatrix::instruments(&t, &build_ssiv(&a_pre, &t, 0.5).unwrap()).unwrap();
        let y: Vec<f64> = (0..n).map(|i| 1.0 + f64::from(t[i]) + 0.5 * m.m[i] + noise[i]).collect();
        if let Ok(fit) = iv_fit(&x, &z, &y) {
            let zu = z.cross_vec(&fit.residuals);
            let scale = (0..3).map(|k| z.column(k).iter().map(|v| v.abs()).sum::<f64>()).fold(1.0, f64::max);
            for k in 0..3 {
                prop_assert!(zu[k].abs() < 1e-8 * scale, "column {k}: {}", zu[k]);
            }
        }
        Ok(())
    }))
}

/// `|A - V diag(l) V'|_F / |A|_F` below 1e-8 for both solvers.
pub fn eigen_reconstruction(cases: u32) -> Result<(), String> {
    let strat = (1u8..=4, 2usize..30, 0.1f64..=1.0, any::<u64>(), any::<u64>(), any::<bool>());
    report(runner(cases).run(&strat, |(design, n, q, seed, bits, lanczos)| {
        let t = treatments(n, bits);
        let a = network(design, n, q, seed, &t, Phase::Post);
        let method = if lanczos { EigenMethod::Lanczos } else { EigenMethod::Full };
        let basis = eigendecompose_with(&a, n, method).unwrap();
        prop_assert!(basis.values.windows(2).all(|w| w[0] >= w[1]));
        let d = a.to_dense();
        let (mut err, mut total) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                let rec: f64 = (0..n).map(|k| basis.values[k] * basis.vectors[(i, k)] * basis.vectors[(j, k)]).sum();
                err += (rec - f64::from(d[i][j])).powi(2);
                total += f64::from(d[i][j]);
            }
        }
        let rel = err.sqrt() / total.sqrt().max(1.0);
        prop_assert!(rel < 1e-8, "relative error {rel}");
        Ok(())
    }))
}

/// Same seed, same numbers, whether one worker or several run the replications.
pub fn deterministic_across_jobs(cases: u32) -> Result<(), String> {
    let strat = (1u8..=4, any::<u64>());
    report(runner(cases).run(&strat, |(design, seed)| {
        let base = SimConfig::new(GraphonSpec::from_design_number(design).unwrap(), 30, SparsityRate::Constant(0.6), Dgp::Endogenous)
            .with_estimators([EstimatorKind::Ols, EstimatorKind::Ssiv])
            .with_reps(3)
            .with_seed(seed);
        let runs: Vec<_> = [Some(1), Some(3), Some(1)]
            .into_iter()
            .map(|jobs| simulate(&SimConfig { jobs, ..base.clone() }).unwrap())
            .collect();
        for other in &runs[1..] {
            prop_assert_eq!(runs[0].mediator_mean.to_bits(), other.mediator_mean.to_bits());
            for (x, y) in runs[0].estimators.iter().zip(&other.estimators) {
                for k in 0..3 {
                    prop_assert_eq!(x.coefficients[k].mean.to_bits(), y.coefficients[k].mean.to_bits());
                    prop_assert_eq!(x.coefficients[k].std.to_bits(), y.coefficients[k].std.to_bits());
                }
            }
        }
        Ok(())
    }))
}

pub type Property = (&'static str, fn(u32) -> Result<(), String>);

pub const ALL: [Property; 6] = [
    ("adjacency symmetric with zero diagonal", adjacency_symmetric_loopless),
    ("edge set monotone in q", edges_monotone_in_q),
    ("denoised instrument orthogonal and shorter", denoised_orthogonal_and_shorter),
    ("IV residuals orthogonal to instruments", iv_residuals_orthogonal),
    ("eigendecomposition reconstructs", eigen_reconstruction),
    ("deterministic under seeds and workers", deterministic_across_jobs),
];
