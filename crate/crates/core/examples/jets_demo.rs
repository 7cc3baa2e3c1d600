//! Taylor-jet arithmetic: exact partial derivatives of a composite expression
//! compared with hand-derived values and a central difference.
//!
//! ```text
//! cargo run --example jets_demo
//! ```

use finslerlab::{Jet2, Var};

fn f(r: f64, s: f64) -> f64 {
    (r * r - s * s).sqrt() * (r * s).exp()
}

fn main() -> Result<(), finslerlab::JetError> {
    let base = (1.2, 0.4);
    let r = Jet2::variable(Var::R, base);
    let s = Jet2::variable(Var::S, base);
    let jet = (r * r - s * s).sqrt()? * (r * s).exp();

    let (r0, s0) = base;
    let w = (r0 * r0 - s0 * s0).sqrt();
    let e = (r0 * s0).exp();
    // ∂_r by hand: (r/w + s w) e^{rs}
    let exact_r = (r0 / w + s0 * w) * e;
    let h = 1e-5;
    let fd_r = (f(r0 + h, s0) - f(r0 - h, s0)) / (2.0 * h);
    let fd_ss = (f(r0, s0 + h) - 2.0 * f(r0, s0) + f(r0, s0 - h)) / (h * h);

    println!("value        {:.15}", jet.value());
    println!("d/dr  jet    {:.15}  by hand {:.15}  fd {:.10}", jet.partial(1, 0), exact_r, fd_r);
    println!("d2/ds2 jet   {:.12}  fd {:.6}", jet.partial(0, 2), fd_ss);
    println!("all partials up to total order 4:");
    for i in 0..=4 {
        let row: Vec<String> = (0..=4 - i).map(|j| format!("{:>14.6e}", jet.partial(i, j))).collect();
        println!("  d_r^{i}: {}", row.join(" "));
    }
    Ok(())
}
