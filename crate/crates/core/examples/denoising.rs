//! Spectrum of a pre-intervention network, the rank picked by the largest
//! relative eigen-gap, and how much of the shift-share instrument lies in
//! the removed leading eigenspace.
//!
//! ```text
//! cargo run --release --example denoising -- [design] [n] [q]
//! ```

use netiv::estimators::{build_ssiv, denoise, eigendecompose, select_rank, MAX_AUTO_RANK};
use netiv::graph_model::{GraphonSpec, SparsityRate};
use netiv::montecarlo::{draw_dataset, Dgp, SimConfig};

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let design: GraphonSpec = arg(0, "sbm3").parse()?;
    let n: usize = arg(1, "800").parse()?;
    let q: SparsityRate = arg(2, "n^-0.2").parse()?;

    let data = draw_dataset(&SimConfig::new(design.clone(), n, q, Dgp::Endogenous).with_seed(3), 0)?;
    let basis = eigendecompose(&data.a_pre, MAX_AUTO_RANK + 1)?;
    println!("{design} n={n} q={q}, {} pre links", data.a_pre.edge_count());
    println!("leading eigenvalues: {:.2?}", basis.values);

    let choice = select_rank(&basis, None)?;
    println!(
        "chosen rank {} (relative gap {:.3}{})",
        choice.rank,
        choice.relative_gap,
        if choice.degenerate { ", degenerate spectrum" } else { "" }
    );
    if let Some(r) = design.default_rank() {
        println!("design rank {r}");
    }

    let z = build_ssiv(&data.a_pre, &data.t, 0.5)?;
    for r in 1..=basis.k() {
        let zd = denoise(&z, &basis, r)?;
        println!("r={r}: |z_denoised| / |z| = {:.3}", norm(&zd.z) / norm(&z.z));
    }
    Ok(())
}
