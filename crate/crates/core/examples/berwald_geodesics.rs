//! Geodesics of the projectively flat Berwald-type entry are straight lines
//! (up to parametrization). Integrates random starts in the unit ball and
//! reports the worst normalized distance from the initial line.
//!
//! ```text
//! cargo run --release --example berwald_geodesics
//! ```

use finslerlab::catalog;
use finslerlab::spray::{integrate_geodesic, straightness_deviation};
use rand::{rngs::StdRng, Rng, SeedableRng};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = StdRng::seed_from_u64(7);
    for sign in ["plus", "minus"] {
        let params = [("sign".to_string(), sign.to_string())].into_iter().collect();
        let entry = catalog::get("berwald", &params)?;
        let mut worst = 0.0f64;
        let mut exits = 0;
        for _ in 0..10 {
            let x0: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.4..0.4)).collect();
            let y0: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let traj = integrate_geodesic(&entry.profile, &x0, &y0, 0.3, 1e-3)?;
            if traj.exit.is_some() {
                exits += 1;
            }
            worst = worst.max(straightness_deviation(&traj.states));
        }
        println!("berwald sign={sign:<5} max deviation {worst:.2e} ({exits} early exits)");
    }
    Ok(())
}
