//! Monte Carlo run of the estimator battery on one design, printing bias,
//! spread, mean standard error and coverage per coefficient.
//!
//! ```text
//! cargo run --release --example simulate -- [design] [n] [q] [reps]
//! cargo run --release --example simulate -- homophily-d2 400 loglog 200
//! ```

use netiv::estimators::EstimatorKind;
use netiv::graph_model::{GraphonSpec, SparsityRate};
use netiv::montecarlo::{simulate, Dgp, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let design: GraphonSpec = arg(0, "sbm3").parse()?;
    let n: usize = arg(1, "200").parse()?;
    let q: SparsityRate = arg(2, "loglog").parse()?;
    let reps: usize = arg(3, "200").parse()?;

    let cfg = SimConfig::new(design, n, q, Dgp::Endogenous)
        .with_estimators(EstimatorKind::ALL)
        .with_reps(reps)
        .with_seed(1);
    let report = simulate(&cfg)?;

    println!("{} n={n} q={q}: {reps} replications in {:.1} s", report.design, report.elapsed_secs);
    println!("mediator mean {:.3}, std {:.3}\n", report.mediator_mean, report.mediator_std);
    println!("| estimator | coef | mean | std | mean s.e. | coverage | failures |");
    println!("|---|---|---|---|---|---|---|");
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
    for s in &report.estimators {
        for k in 1..3 {
            let c = &s.coefficients[k];
            println!(
                "| {} | beta{k} | {:.3} | {:.3} | {} | {} | {} |",
                s.estimator,
                c.mean,
                c.std,
                fmt(c.mean_se),
                fmt(c.coverage),
                s.failures
            );
        }
    }
    Ok(())
}
