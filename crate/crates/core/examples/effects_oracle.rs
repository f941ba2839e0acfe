//! Population direct, indirect, spillover and total effects for each design
//! next to the plug-in decomposition from a single OLS fit.
//!
//! ```text
//! cargo run --release --example effects_oracle -- [n]
//! ```

use netiv::estimators::{effects_from_fit, ols_fit, DesignMatrix};
use netiv::graph_model::{GraphonSpec, SparsityRate};
use netiv::mediator::{mediator, MediatorKind};
use netiv::montecarlo::{draw_dataset, Dgp, SimConfig};
use netiv::outcome::{true_effects_oracle, OracleConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).as_deref().unwrap_or("200").parse()?;
    let q = SparsityRate::power(-0.5)?;
    println!("| design | | DE | IE | SE | ToE | M contrast |");
    println!("|---|---|---|---|---|---|---|");
    for d in 1..=4 {
        let spec = GraphonSpec::from_design_number(d)?;
        let truth = true_effects_oracle(&spec, q, &Dgp::Exogenous.model(), &OracleConfig::new(n, 300, 5))?;

        let data = draw_dataset(&SimConfig::new(spec.clone(), n, q, Dgp::Exogenous).with_seed(6), 0)?;
        let m = mediator(&data.a_post, &data.t, MediatorKind::Fraction)?;
        let fit = ols_fit(&DesignMatrix::new(&data.t, &m)?, &data.y)?;
        let est = effects_from_fit(&fit, &data.t, &m)?;

        for (label, e) in [("oracle", &truth), ("plug-in", &est)] {
            println!(
                "| {spec} | {label} | {:.3} | {:.4} | {:.3} | {:.3} | {:.4} |",
                e.de, e.ie, e.se, e.toe, e.mediator_contrast
            );
        }
    }
    Ok(())
}
