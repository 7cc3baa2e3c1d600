//! Classify every catalog entry at its default parameters and compare with
//! the expected verdicts.
//!
//! ```text
//! cargo run --release --example catalog_suite
//! ```

use std::time::Instant;

use finslerlab::catalog;

fn main() {
    let mut failures = 0;
    for id in catalog::ids() {
        let start = Instant::now();
        let entry = match catalog::get_default(id) {
            Ok(e) => e,
            Err(e) => {
                println!("{id:<14} build error: {e}");
                failures += 1;
                continue;
            }
        };
        let tol = entry.tolerances();
        let report = entry.classify_with(&tol);
        let verdicts: Vec<String> = report
            .verdicts
            .iter()
            .map(|v| format!("{}={}({:.1e})", v.name, v.status.as_str(), v.residual))
            .collect();
        let mism = entry.mismatches(&report, &tol);
        if !mism.is_empty() {
            failures += 1;
        }
        println!(
            "{id:<14} {:>6.2}s {} K={} {}",
            start.elapsed().as_secs_f64(),
            verdicts.join(" "),
            report.k.as_ref().map_or("-".to_string(), |k| format!("{:.6}", k.mean)),
            if mism.is_empty() { "ok".to_string() } else { format!("MISMATCH {mism:?}") }
        );
    }
    std::process::exit(if failures == 0 { 0 } else { 1 });
}
