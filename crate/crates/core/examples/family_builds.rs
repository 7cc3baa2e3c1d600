//! Build metrics from generator data by quadrature and classify them:
//! a Douglas build with g = -1/r (reproduces a constant-curvature closed form)
//! and a non-Douglas build with k = 1.
//!
//! ```text
//! cargo run --release --example family_builds
//! ```

use finslerlab::catalog;
use finslerlab::families::{build_profile, gauge_free_combination, EtaFunction, FamilyKind, FamilySpec, GFunction};
use finslerlab::{classify, GridSpec, RsPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut douglas = FamilySpec::new(FamilyKind::Theorem2);
    douglas.g = GFunction::InvRNeg;
    douglas.eta = EtaFunction::Sqrt { c: 1.0 };
    douglas.r_range = (0.2, 2.0);
    let built = build_profile(&douglas)?;
    let closed = catalog::get_default("example02")?.profile;
    println!("Douglas build vs closed form:");
    for &(r, s) in &[(0.5, 0.3), (1.0, -0.7), (1.8, 1.2)] {
        let at = RsPoint::new(r, s)?;
        println!("  ({r}, {s}): built {:.12}  closed {:.12}", built.phi(at)?, closed.phi(at)?);
    }

    let mut nd = FamilySpec::new(FamilyKind::Theorem1);
    nd.k = 1.0;
    nd.r_range = (0.5, 1.5);
    let p = build_profile(&nd)?;
    // the gauge-free combination only sees η, not the base points
    let g = gauge_free_combination(&p, 1.0, 0.3)?;
    println!("\nnon-Douglas k = 1: sqrt(t)(phi - s phi_s) at (1, 0.3) = {g:.10}");

    let coarse = GridSpec {
        n_r: 8,
        n_sigma: 8,
        ..GridSpec::default()
    };
    for (name, prof) in [("douglas build", &built), ("k = 1 build", &p)] {
        let report = classify(prof, &coarse.points(&prof.domain));
        let v: Vec<String> = report
            .verdicts
            .iter()
            .map(|v| format!("{}={}", v.name, v.status.as_str()))
            .collect();
        println!("{name}: {}", v.join(" "));
        if let Some(k) = report.k {
            println!("  K = {:.6}", k.mean);
        }
    }
    Ok(())
}
