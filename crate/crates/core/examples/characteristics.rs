//! Integrate characteristic curves of the transport equations and check the
//! conserved quantities along them.
//!
//! ```text
//! cargo run --release --example characteristics
//! ```

use finslerlab::families::{characteristic_flow, kappa_relation, transport_invariant, FamilyKind, FamilySpec};
use finslerlab::RsPoint;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for k in [0.5, 1.0, 2.0] {
        let mut spec = FamilySpec::new(FamilyKind::Theorem1);
        spec.k = k;
        let mut worst_inv = 0.0f64;
        let mut worst_kappa = 0.0f64;
        for i in 0..5 {
            let start = RsPoint::new(1.0, 0.1 + 0.12 * i as f64)?;
            let v0 = transport_invariant(&spec, start)?;
            let k0 = kappa_relation(k, start.r, start.s);
            let curve = characteristic_flow(&spec, start, 1.3, 1e-3)?;
            for p in &curve.points {
                worst_inv = worst_inv.max(((transport_invariant(&spec, *p)? - v0) / v0).abs());
                worst_kappa = worst_kappa.max((kappa_relation(k, p.r, p.s) - k0).abs());
            }
        }
        println!("k = {k}: max relative invariant drift {worst_inv:.1e}, kappa relation drift {worst_kappa:.1e}");
    }
    Ok(())
}
