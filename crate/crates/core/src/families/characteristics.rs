//! Characteristic curves `(r, X(r))` of the transport fields.
//!
//! Non-Douglas field (parameter k), with `t = r² − X²`:
//! `X′ = (r/X)[1 − (t/r⁴)(t − (kX − √t)²)]`.
//! Douglas field: `X′ = (r/X)[1 − t(2g + fX²)]`.
//! The invariants handed to `η` are constant along these curves.

use serde::Serialize;

use super::{FamilyError, FamilyKind, FamilySpec};
use crate::metric::{MetricProfile, RsPoint};
use crate::spray::{compute_q, SprayError};

/// An integrated curve. Integration stops early on a domain exit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacteristicCurve {
    pub points: Vec<RsPoint>,
    /// Why integration stopped before `r_end`, if it did.
    pub exit: Option<String>,
    /// Step indices where the non-Douglas arctan argument jumped by more than π/2.
    pub flagged_steps: Vec<usize>,
}

impl CharacteristicCurve {
    pub fn completed(&self) -> bool {
        self.exit.is_none()
    }
}

fn field(spec: &FamilySpec, r: f64, x: f64) -> f64 {
    let t = r * r - x * x;
    match spec.kind {
        FamilyKind::Theorem1 => {
            let k = spec.k;
            let d = k * x - t.sqrt();
            (r / x) * (1.0 - (t / r.powi(4)) * (t - d * d))
        }
        FamilyKind::Theorem2 | FamilyKind::Theorem3 => {
            let g = spec.g.value(r);
            let f = spec.g.f_value(r);
            (r / x) * (1.0 - t * (2.0 * g + f * x * x))
        }
    }
}

fn arctan_arg(k: f64, r: f64, x: f64) -> f64 {
    (k - (1.0 + k * k) * x / (r * r - x * x).sqrt()).atan()
}

fn interior(r: f64, x: f64) -> Option<String> {
    if !(r > 0.0) {
        Some(format!("r = {r} left r > 0"))
    } else if !(x * x < r * r) {
        Some(format!("X^2 >= r^2 at r = {r}, X = {x}"))
    } else if x == 0.0 || !x.is_finite() {
        Some(format!("X reached 0 at r = {r}"))
    } else {
        None
    }
}

/// Classical RK4 with a fixed step toward `r_end` (the last step is shortened).
pub fn characteristic_flow(
    spec: &FamilySpec,
    start: RsPoint,
    r_end: f64,
    step: f64,
) -> Result<CharacteristicCurve, FamilyError> {
    if !(step > 0.0) {
        return Err(FamilyError::InvalidSpec(format!("step = {step} must be positive")));
    }
    if let Some(why) = interior(start.r, start.s) {
        return Err(FamilyError::Domain(why));
    }
    let n = ((r_end - start.r).abs() / step).ceil() as usize;
    let h = if n == 0 { 0.0 } else { (r_end - start.r) / n as f64 };
    let v = |r: f64, x: f64| field(spec, r, x);
    let mut pts = vec![start];
    let mut flagged = Vec::new();
    let mut exit = None;
    let (mut r, mut x) = (start.r, start.s);
    let mut prev_arg = arctan_arg(spec.k, r, x);
    for i in 0..n {
        let k1 = v(r, x);
        let k2 = v(r + 0.5 * h, x + 0.5 * h * k1);
        let k3 = v(r + 0.5 * h, x + 0.5 * h * k2);
        let k4 = v(r + h, x + h * k3);
        let xn = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let rn = if i + 1 == n { r_end } else { r + h };
        if let Some(why) = interior(rn, xn).or_else(|| {
            (xn.signum() != x.signum() || !(k1 + k2 + k3 + k4).is_finite())
                .then(|| format!("X crossed 0 near r = {rn}"))
        }) {
            exit = Some(why);
            break;
        }
        if spec.kind == FamilyKind::Theorem1 {
            let a = arctan_arg(spec.k, rn, xn);
            if (a - prev_arg).abs() > std::f64::consts::FRAC_PI_2 {
                flagged.push(i);
            }
            prev_arg = a;
        }
        r = rn;
        x = xn;
        pts.push(RsPoint { r, s: x });
    }
    Ok(CharacteristicCurve {
        points: pts,
        exit,
        flagged_steps: flagged,
    })
}

/// `½ln((1+k²)κ²+2κ+1) + k·atan(((1+k²)κ+1)/k) − (1+k²)ln r`,
/// `κ = kX/√(r²−X²) − 1`; conserved along non-Douglas characteristics.
pub fn kappa_relation(k: f64, r: f64, x: f64) -> f64 {
    let kk = 1.0 + k * k;
    let kappa = k * x / (r * r - x * x).sqrt() - 1.0;
    let at = if k == 0.0 { 0.0 } else { k * ((kk * kappa + 1.0) / k).atan() };
    0.5 * (kk * kappa * kappa + 2.0 * kappa + 1.0).ln() + at - kk * r.ln()
}

/// `(r²−s²)^{3/2}(Q_s − sQ_ss)`: `k` for non-Douglas builds, 0 for Douglas ones.
pub fn qss_invariant(profile: &MetricProfile, at: RsPoint) -> Result<f64, SprayError> {
    let q = compute_q(profile, at)?;
    Ok(crate::curvature::qss_from(&q, at))
}
