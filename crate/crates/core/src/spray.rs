//! Spray scalars `Q`, `P`, the spray `Gⁱ = |y|P yⁱ + |y|²Q xⁱ` and geodesics.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::jets::{Jet2, JetError, Var};
use crate::metric::{to_rs, MetricError, MetricProfile, RsPoint};
use crate::report::fmt_f64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SprayError {
    #[error("r = 0: spray scalars are undefined")]
    ZeroRadius,
    #[error("Q denominator φ − sφ_s + (r²−s²)φ_ss = {m2:e} is not positive at (r, s) = ({}, {})", at.r, at.s)]
    SingularDenominator { at: RsPoint, m2: f64 },
    #[error("φ = {phi:e} is not positive at (r, s) = ({}, {})", at.r, at.s)]
    NonpositivePhi { at: RsPoint, phi: f64 },
    #[error("initial state is outside the domain: {0}")]
    OutsideDomain(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("jet arithmetic failed at (r, s) = ({}, {}): {source}", at.r, at.s)]
    Jet { at: RsPoint, source: JetError },
}

/// `Q`, `P` (order-2 jets) with the φ jet they came from.
#[derive(Clone, Debug)]
pub struct SprayData {
    pub at: RsPoint,
    pub phi: Jet2,
    pub q: Jet2,
    pub p: Jet2,
}

fn jet_err(at: RsPoint) -> impl Fn(JetError) -> SprayError {
    move |source| SprayError::Jet { at, source }
}

/// Q from a φ jet of order `n` (result has order `n − 2`).
pub fn q_from_phi(phi: &Jet2, at: RsPoint) -> Result<Jet2, SprayError> {
    if at.r <= 0.0 {
        return Err(SprayError::ZeroRadius);
    }
    let base = phi.base();
    let r = Jet2::variable(Var::R, base);
    let s = Jet2::variable(Var::S, base);
    let ps = phi.d_s();
    let pr = phi.d_r();
    let pss = ps.d_s();
    let prs = pr.d_s();
    let t = r * r - s * s;
    let den = *phi - s * ps + t * pss;
    let m2 = den.value();
    if !(m2 > 0.0) {
        return Err(SprayError::SingularDenominator { at, m2 });
    }
    let num = r * pss - pr + s * prs;
    num.div(&(2.0 * r * den)).map_err(jet_err(at))
}

/// P from a φ jet and its Q jet.
pub fn p_from_phi(phi: &Jet2, q: &Jet2, at: RsPoint) -> Result<Jet2, SprayError> {
    if !(phi.value() > 0.0) {
        return Err(SprayError::NonpositivePhi {
            at,
            phi: phi.value(),
        });
    }
    let base = phi.base();
    let r = Jet2::variable(Var::R, base);
    let s = Jet2::variable(Var::S, base);
    let ps = phi.d_s();
    let pr = phi.d_r();
    let t = r * r - s * s;
    let e = jet_err(at);
    let first = (r * ps + s * pr).div(&(2.0 * r * *phi)).map_err(&e)?;
    let second = (*q * (s * *phi + t * ps)).div(phi).map_err(&e)?;
    Ok(first - second)
}

pub fn compute_q(profile: &MetricProfile, at: RsPoint) -> Result<Jet2, SprayError> {
    let phi = profile.jet(at, 4)?;
    q_from_phi(&phi, at)
}

pub fn compute_p(profile: &MetricProfile, at: RsPoint) -> Result<Jet2, SprayError> {
    let phi = profile.jet(at, 4)?;
    let q = q_from_phi(&phi, at)?;
    p_from_phi(&phi, &q, at)
}

pub fn spray_data(profile: &MetricProfile, at: RsPoint) -> Result<SprayData, SprayError> {
    let phi = profile.jet(at, 4)?;
    let q = q_from_phi(&phi, at)?;
    let p = p_from_phi(&phi, &q, at)?;
    Ok(SprayData { at, phi, q, p })
}

/// Values of `(Q, P)` only (order-2 φ jets). No domain check beyond r > 0.
fn qp_values(profile: &MetricProfile, at: RsPoint) -> Result<(f64, f64), SprayError> {
    let phi = profile.jet_unchecked(at, 2)?;
    let q = q_from_phi(&phi, at)?;
    let p = p_from_phi(&phi, &q, at)?;
    Ok((q.value(), p.value()))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn spray_coefficients(
    profile: &MetricProfile,
    x: &[f64],
    y: &[f64],
) -> Result<Vec<f64>, SprayError> {
    let at = to_rs(x, y)?;
    profile.domain.check(at)?;
    spray_unchecked(profile, x, y, at)
}

fn spray_unchecked(
    profile: &MetricProfile,
    x: &[f64],
    y: &[f64],
    at: RsPoint,
) -> Result<Vec<f64>, SprayError> {
    let (q, p) = qp_values(profile, at)?;
    let ny = norm(y);
    Ok(x.iter()
        .zip(y)
        .map(|(xi, yi)| ny * p * yi + ny * ny * q * xi)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitReason {
    DomainExit { t: f64, reason: String },
    Singular { t: f64, reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub states: Vec<GeodesicState>,
    /// Per-step local error estimate from step halving (`‖Δ‖/15`).
    pub local_errors: Vec<f64>,
    pub exit: Option<ExitReason>,
}

impl Trajectory {
    pub fn max_local_error(&self) -> f64 {
        self.local_errors.iter().cloned().fold(0.0, f64::max)
    }
}

const MIN_RADIUS: f64 = 1e-6;

enum StepFail {
    Exit(String),
    Singular(String),
}

fn rhs(profile: &MetricProfile, z: &[f64], n: usize) -> Result<Vec<f64>, StepFail> {
    let (x, y) = z.split_at(n);
    let at = to_rs(x, y).map_err(|e| StepFail::Exit(e.to_string()))?;
    if at.r < MIN_RADIUS {
        return Err(StepFail::Exit(format!("r = {:e} below {MIN_RADIUS:e}", at.r)));
    }
    if let Some(reason) = profile.domain.violation(at.r, at.s) {
        // s = 0 is allowed along geodesics
        if !(at.s == 0.0 && reason == "s != 0") {
            return Err(StepFail::Exit(reason));
        }
    }
    let g = spray_unchecked(profile, x, y, at).map_err(|e| match e {
        SprayError::Metric(m) => StepFail::Exit(m.to_string()),
        other => StepFail::Singular(other.to_string()),
    })?;
    let mut out = Vec::with_capacity(2 * n);
    out.extend_from_slice(y);
    out.extend(g.iter().map(|v| -2.0 * v));
    Ok(out)
}

fn axpy(z: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    z.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn rk4(profile: &MetricProfile, z: &[f64], h: f64, n: usize) -> Result<Vec<f64>, StepFail> {
    let k1 = rhs(profile, z, n)?;
    let k2 = rhs(profile, &axpy(z, 0.5 * h, &k1), n)?;
    let k3 = rhs(profile, &axpy(z, 0.5 * h, &k2), n)?;
    let k4 = rhs(profile, &axpy(z, h, &k3), n)?;
    Ok((0..z.len())
        .map(|i| z[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Fixed-step RK4 for `ẋ = y`, `ẏ = −2G(x, y)`.
pub fn integrate_geodesic(
    profile: &MetricProfile,
    x0: &[f64],
    y0: &[f64],
    t_end: f64,
    step: f64,
) -> Result<Trajectory, SprayError> {
    if !(step > 0.0) || !(t_end >= 0.0) {
        return Err(SprayError::OutsideDomain(format!(
            "step must be positive and t_end non-negative (got {step}, {t_end})"
        )));
    }
    let n = x0.len();
    let at = to_rs(x0, y0)?;
    if at.r < MIN_RADIUS {
        return Err(SprayError::OutsideDomain(format!("r = {:e} below {MIN_RADIUS:e}", at.r)));
    }
    if let Some(reason) = profile.domain.violation(at.r, at.s) {
        if !(at.s == 0.0 && reason == "s != 0") {
            return Err(SprayError::OutsideDomain(reason));
        }
    }
    let mut z: Vec<f64> = x0.iter().chain(y0).cloned().collect();
    // singular spray at the start is an error, not a flagged exit
    if let Err(StepFail::Singular(m)) = rhs(profile, &z, n) {
        return Err(SprayError::OutsideDomain(m));
    }
    let n_steps = (t_end / step).round().max(0.0) as usize;
    let mut states = vec![GeodesicState {
        x: x0.to_vec(),
        y: y0.to_vec(),
        t: 0.0,
    }];
    let mut local_errors = Vec::with_capacity(n_steps);
    let mut exit = None;
    for k in 0..n_steps {
        let t = k as f64 * step;
        let full = rk4(profile, &z, step, n);
        let halves = rk4(profile, &z, 0.5 * step, n).and_then(|h| rk4(profile, &h, 0.5 * step, n));
        match (full, halves) {
            (Ok(a), Ok(b)) => {
                let d: f64 = a.iter().zip(&b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
                local_errors.push(d / 15.0);
                z = a;
                let (x, y) = z.split_at(n);
                states.push(GeodesicState {
                    x: x.to_vec(),
                    y: y.to_vec(),
                    t: (k + 1) as f64 * step,
                });
            }
            (Err(StepFail::Exit(reason)), _) | (_, Err(StepFail::Exit(reason))) => {
                exit = Some(ExitReason::DomainExit { t, reason });
                break;
            }
            (Err(StepFail::Singular(reason)), _) | (_, Err(StepFail::Singular(reason))) => {
                exit = Some(ExitReason::Singular { t, reason });
                break;
            }
        }
    }
    Ok(Trajectory {
        states,
        local_errors,
        exit,
    })
}

fn line_distance(p: &[f64], x0: &[f64], u: &[f64]) -> f64 {
    let v: Vec<f64> = p.iter().zip(x0).map(|(a, b)| a - b).collect();
    let along: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
    let perp: Vec<f64> = v.iter().zip(u).map(|(a, b)| a - along * b).collect();
    norm(&perp)
}

fn path_length(states: &[GeodesicState]) -> f64 {
    states
        .windows(2)
        .map(|w| {
            let d: Vec<f64> = w[1].x.iter().zip(&w[0].x).map(|(a, b)| a - b).collect();
            norm(&d)
        })
        .sum()
}

/// Pointwise distances to the initial line, divided by the path length.
pub fn deviations(states: &[GeodesicState]) -> Vec<f64> {
    let Some(first) = states.first() else {
        return Vec::new();
    };
    let ny = norm(&first.y);
    let u: Vec<f64> = first.y.iter().map(|v| v / ny).collect();
    let len = path_length(states);
    states
        .iter()
        .map(|st| {
            if len > 0.0 {
                line_distance(&st.x, &first.x, &u) / len
            } else {
                0.0
            }
        })
        .collect()
}

/// Largest distance from the trajectory to the line `x(0) + τ y(0)`,
/// normalized by the polyline length.
pub fn straightness_deviation(states: &[GeodesicState]) -> f64 {
    deviations(states).into_iter().fold(0.0, f64::max)
}

/// CSV with columns `t, x_1..x_n, y_1..y_n, deviation`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.states.first().map_or(0, |s| s.x.len());
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",x_{i}");
    }
    for i in 1..=n {
        let _ = write!(out, ",y_{i}");
    }
    out.push_str(",deviation\n");
    for (st, dev) in traj.states.iter().zip(deviations(&traj.states)) {
        out.push_str(&fmt_f64(st.t));
        for v in st.x.iter().chain(&st.y) {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        out.push(',');
        out.push_str(&fmt_f64(dev));
        out.push('\n');
    }
    out
}
