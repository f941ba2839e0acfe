//! Reproduces one of the published simulation tables and prints the
//! comparison as markdown.
//!
//! ```text
//! cargo run --release --example reproduce_table -- 3 0.2 [designs...] [out-dir]
//! ```

use std::path::PathBuf;

use netiv::montecarlo::{reproduce_table, TableId, TableOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let id: TableId = args.next().as_deref().unwrap_or("1").parse()?;
    let scale: f64 = args.next().as_deref().unwrap_or("0.02").parse()?;
    let mut designs = Vec::new();
    let mut out = None;
    for a in args {
        match a.parse::<u8>() {
            Ok(d) => designs.push(d),
            Err(_) => out = Some(PathBuf::from(a)),
        }
    }
    let opts = TableOptions { scale, designs, ..TableOptions::default() };
    let report = reproduce_table(id, &opts)?;
    println!("{}", report.to_markdown());
    if let Some(dir) = out {
        let (csv, md) = report.write(&dir)?;
        eprintln!("wrote {} and {}", csv.display(), md.display());
    }
    Ok(())
}
