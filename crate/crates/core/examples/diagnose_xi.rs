//! Estimates the variance of the neighbor treated-share `xi_i` for each
//! design. A variance near zero means the spillover coefficient is only
//! weakly identified by the shift-share instrument.
//!
//! ```text
//! cargo run --release --example diagnose_xi -- [reps] [inner-draws]
//! ```

use netiv::graph_model::GraphonSpec;
use netiv::mediator::{estimate_var_xi, XiOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let reps: usize = args.next().as_deref().unwrap_or("1000").parse()?;
    let inner_draws: usize = args.next().as_deref().unwrap_or("4000").parse()?;
    let opts = XiOptions { reps, inner_draws, ..XiOptions::default() };
    for d in 1..=4 {
        let spec = GraphonSpec::from_design_number(d)?;
        let x = estimate_var_xi(&spec, &opts)?;
        println!(
            "{spec:>13}: Var(xi) {:.3e} (s.e. {:.1e}), mean xi {:.3} -> {}",
            x.var_xi_estimate, x.mc_std_error, x.mean_xi, x.case_label
        );
    }
    Ok(())
}
