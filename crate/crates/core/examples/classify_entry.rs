//! Classify one catalog entry and inspect the per-point curvature scalars.
//!
//! ```text
//! cargo run --release --example classify_entry -- example02 c=2
//! ```

use std::collections::BTreeMap;

use finslerlab::catalog;
use finslerlab::curvature::curvature_sample;
use finslerlab::RsPoint;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let id = args.next().unwrap_or_else(|| "example02".to_string());
    let params: BTreeMap<String, String> = args
        .filter_map(|a| a.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect();
    let entry = catalog::get(&id, &params)?;
    let tol = entry.tolerances();
    let report = entry.classify_with(&tol);

    println!("{} ({} grid points)", entry.id, report.grid.points);
    for v in &report.verdicts {
        println!("  {:<17} {:<12} residual {:.3e}", v.name, v.status.as_str(), v.residual);
    }
    if let Some(k) = report.k {
        println!("  K = {:.8} (spread {:.1e})", k.mean, k.spread);
    }
    let mism = entry.mismatches(&report, &tol);
    println!("  expected verdicts {}", if mism.is_empty() { "matched" } else { "did NOT match" });

    let (a, b) = entry.grid.r_values(&entry.profile.domain).iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let r = 0.5 * (a + b);
    println!("\n  s/r      phi          Q            P            K");
    for sigma in [-0.6, -0.2, 0.2, 0.6] {
        let at = RsPoint::new(r, sigma * r)?;
        match curvature_sample(&entry.profile, at) {
            Ok(c) => println!("  {sigma:>4}  {:>12.6} {:>12.6} {:>12.6} {:>12.6}", c.phi, c.q, c.p, c.k),
            Err(e) => println!("  {sigma:>4}  error: {e}"),
        }
    }
    Ok(())
}
