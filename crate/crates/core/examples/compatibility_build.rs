//! Recover a metric from prescribed spray data (P, Q). Compatible data
//! integrates to a constant-curvature metric; a perturbed P is refused.
//!
//! ```text
//! cargo run --release --example compatibility_build
//! ```

use finslerlab::families::{
    build_theorem3_profile, cond_u_residual, FamilyError, GFunction, HFunction, PFunction, Theorem3Data,
    Theorem3Options,
};
use finslerlab::{classify, GridSpec, RsPoint};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Theorem3Data::ex10(1.0);
    let at = RsPoint::new(0.8, 0.3)?;
    println!("compatibility residual at {at:?}: {:.2e}", cond_u_residual(&data, at)?);

    let opts = Theorem3Options {
        grid: GridSpec {
            n_r: 8,
            n_sigma: 8,
            ..GridSpec::default()
        },
        ..Theorem3Options::default()
    };
    let profile = build_theorem3_profile(&data, &opts)?;
    let report = classify(&profile, &opts.grid.points(&profile.domain));
    for v in &report.verdicts {
        println!("  {:<17} {}", v.name, v.status.as_str());
    }
    if let Some(k) = report.k {
        println!("  constant K = {:.6} (the scale depends on the base-point normalization)", k.mean);
    }

    let bad = Theorem3Data {
        p: PFunction::Exs1Shape {
            h: HFunction::One,
            c: 1.0,
            sign: 1.0,
        },
        g: GFunction::InvRNeg,
    };
    match build_theorem3_profile(&bad, &opts) {
        Err(FamilyError::CompatibilityFailure { residual, at }) => {
            println!("perturbed data refused: residual {residual:.2e} at {at:?}")
        }
        other => println!("unexpected: {:?}", other.map(|p| p.name.clone())),
    }
    Ok(())
}
