//! Draws one pre/post network pair from a design, reports degrees and link
//! turnover, and optionally writes the panel files that `estimate_panel`
//! reads.
//!
//! ```text
//! cargo run --example gen_network -- [design] [n] [q] [out-dir]
//! ```

use std::path::PathBuf;

use netiv::empirical::PanelDataset;
use netiv::graph_model::{GraphonSpec, SparsityRate};
use netiv::montecarlo::{Dgp, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let design: GraphonSpec = arg(0, "homophily-d4").parse()?;
    let n: usize = arg(1, "300").parse()?;
    let q: SparsityRate = arg(2, "n^-0.5").parse()?;

    let cfg = SimConfig::new(design, n, q, Dgp::Endogenous).with_seed(7);
    let ds = PanelDataset::from_simulation(&cfg, 0)?;

    for (name, a) in [("pre", &ds.a_pre), ("post", &ds.a_post)] {
        let deg = a.degrees();
        let isolated = deg.iter().filter(|&&d| d == 0).count();
        let max = deg.iter().max().copied().unwrap_or(0);
        println!(
            "{name:>4}: {} links, mean degree {:.2}, max {max}, {isolated} isolated",
            a.edge_count(),
            2.0 * a.edge_count() as f64 / n as f64
        );
    }
    let t = ds.turnover();
    println!("turnover: {} kept, {} broken, {} formed", t.kept, t.broken, t.formed);
    println!("treated share {:.3}", ds.treated_share());

    if let Some(dir) = args.get(3).map(PathBuf::from) {
        for p in ds.save_dir(&dir)? {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}
