//! Tabulate the flag curvature of an entry over its classification grid as
//! CSV on stdout (the library counterpart of `finslerlab grid-dump`).
//!
//! ```text
//! cargo run --release --example curvature_grid -- exs1_special > k.csv
//! ```

use finslerlab::catalog;
use finslerlab::curvature::flag_curvature;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let id = std::env::args().nth(1).unwrap_or_else(|| "exs1_special".to_string());
    let entry = catalog::get_default(&id)?;
    println!("r,s,K");
    for at in entry.grid_points() {
        match flag_curvature(&entry.profile, at) {
            Ok(k) => println!("{},{},{}", at.r, at.s, k),
            Err(e) => eprintln!("({}, {}): {e}", at.r, at.s),
        }
    }
    Ok(())
}
