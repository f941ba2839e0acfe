//! Fits every estimator to panel-network data and prints the coefficient
//! table with the effect decomposition. Without arguments it uses a
//! synthetic village-sized panel.
//!
//! ```text
//! cargo run --example estimate_panel -- [units.csv pre_edges.csv post_edges.csv]
//! ```

use std::path::Path;

use netiv::empirical::{estimate_columns, load_dataset, synthetic_panel, EmpiricalOptions, LoadOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let ds = match args.as_slice() {
        [units, pre, post] => load_dataset(Path::new(units), Path::new(pre), Path::new(post), &LoadOptions::default())?,
        [] => synthetic_panel(3)?,
        _ => return Err("expected no arguments or three file paths".into()),
    };
    let t = ds.turnover();
    println!(
        "{} units, {} treated; links {} pre, {} post ({} kept, {} broken, {} formed)\n",
        ds.n(),
        ds.t.iter().filter(|&&v| v == 1).count(),
        t.pre,
        t.post,
        t.kept,
        t.broken,
        t.formed
    );
    let outcomes: Vec<String> = ds.outcomes.iter().map(|(name, _)| name.clone()).collect();
    for table in estimate_columns(&ds, &outcomes, &EmpiricalOptions::default()) {
        match table {
            Ok(t) => println!("{}", t.to_markdown()),
            Err(e) => eprintln!("skipped: {e}"),
        }
    }
    Ok(())
}
