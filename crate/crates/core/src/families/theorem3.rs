//! Profiles recovered from prescribed spray data `(P, Q)`.
//!
//! With `t = r² − s²`,
//!
//! ```text
//! U = [t(sP_s − 2P) − s(1 + sP)] / [t(2Q − sQ_s) − sP − 1]
//! ```
//!
//! and `(ln φ)_s = (U − s)/t`, `(ln φ)_r = (2r(P + UQ) − r(U − s)/t)/s`.
//! The gradient is curl-free exactly when the compatibility residual
//! `s[sU_r + (1 − 2tQ)rU_s] − r[1 + 2t(sQ_s − Q)]U − 2rt(sP_s − P)` vanishes.
//! `ln φ` is then a path integral from a fixed base point: first along the ray
//! `s = σ_b r`, then along s at fixed r.

use std::sync::Arc;

use rayon::prelude::*;

use super::generators::{GFunction, PFunction};
use super::FamilyError;
use crate::jets::{Jet2, JetError};
use crate::metric::{
    margins, Constraint, DomainSpec, EvalError, GridSpec, MetricProfile, ParamValue, Params, Provenance, RsPoint,
};
use crate::quadrature::simpson;

/// Spray data for the construction: `P` directly, `Q` in Douglas form from `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem3Data {
    pub p: PFunction,
    pub g: GFunction,
}

impl Theorem3Data {
    /// The ex10 data: `g = −1/r` and the matching `P` branch.
    pub fn ex10(sign: f64) -> Self {
        Theorem3Data {
            p: PFunction::ex10(sign),
            g: GFunction::InvRNeg,
        }
    }

    pub fn q_jet(&self, r: &Jet2, s: &Jet2) -> Result<Jet2, JetError> {
        self.g.q_jet(r, s)
    }

    pub fn p_jet(&self, r: &Jet2, s: &Jet2) -> Result<Jet2, JetError> {
        self.p.eval(r, s)
    }

    /// Jet of `U`; one order lower than the inputs.
    pub fn u_jet(&self, r: &Jet2, s: &Jet2) -> Result<Jet2, JetError> {
        let p = self.p_jet(r, s)?;
        let q = self.q_jet(r, s)?;
        u_from(&p, &q, r, s)
    }

    /// `(ln φ)_r` and `(ln φ)_s` jets.
    pub fn log_gradient(&self, r: &Jet2, s: &Jet2) -> Result<(Jet2, Jet2), JetError> {
        let p = self.p_jet(r, s)?;
        let q = self.q_jet(r, s)?;
        let u = u_from(&p, &q, r, s)?;
        let t = *r * *r - *s * *s;
        let a_s = (u - *s).div(&t)?;
        let w = 2.0 * *r * (p + u * q);
        let a_r = (w - *r * a_s).div(s)?;
        Ok((a_r, a_s))
    }
}

fn u_from(p: &Jet2, q: &Jet2, r: &Jet2, s: &Jet2) -> Result<Jet2, JetError> {
    let t = *r * *r - *s * *s;
    let ps = p.d_s();
    let qs = q.d_s();
    let num = t * (*s * ps - 2.0 * *p) - *s * (1.0 + *s * *p);
    let den = t * (2.0 * *q - *s * qs) - *s * *p - 1.0;
    num.div(&den)
}

fn lifts(at: RsPoint, order: usize) -> (Jet2, Jet2) {
    Jet2::lift_pair(at.r, at.s, order)
}

pub fn compute_u(data: &Theorem3Data, at: RsPoint) -> Result<f64, FamilyError> {
    let (r, s) = lifts(at, 1);
    Ok(data.u_jet(&r, &s)?.value())
}

pub fn cond_u_residual(data: &Theorem3Data, at: RsPoint) -> Result<f64, FamilyError> {
    let (r, s) = lifts(at, 2);
    let p = data.p_jet(&r, &s)?;
    let q = data.q_jet(&r, &s)?;
    let u = u_from(&p, &q, &r, &s)?;
    let (rv, sv, t) = (at.r, at.s, at.t());
    let (q0, qs) = (q.value(), q.partial(0, 1));
    let (p0, ps) = (p.value(), p.partial(0, 1));
    let (u0, ur, us) = (u.value(), u.partial(1, 0), u.partial(0, 1));
    Ok(sv * (sv * ur + (1.0 - 2.0 * t * q0) * rv * us)
        - rv * (1.0 + 2.0 * t * (sv * qs - q0)) * u0
        - 2.0 * rv * t * (sv * ps - p0))
}

/// Options for [`build_theorem3_profile`].
#[derive(Clone, Debug)]
pub struct Theorem3Options {
    pub r_range: (f64, f64),
    /// Radius of the base point; midpoint of the range when `None`.
    pub r_base: Option<f64>,
    /// `s_base = s_base_fraction · r`.
    pub s_base_fraction: f64,
    pub quadrature_tol: f64,
    /// Largest accepted compatibility residual on the grid.
    pub compat_tol: f64,
    pub grid: GridSpec,
}

impl Default for Theorem3Options {
    fn default() -> Self {
        Theorem3Options {
            r_range: (0.2, 2.0),
            r_base: None,
            s_base_fraction: 0.5,
            quadrature_tol: 1e-11,
            compat_tol: 1e-4,
            grid: GridSpec::default(),
        }
    }
}

struct LogPhi {
    data: Theorem3Data,
    r_b: f64,
    sigma_b: f64,
    tol: f64,
}

impl LogPhi {
    fn grad_values(&self, r: f64, s: f64) -> Result<(f64, f64), JetError> {
        let (rj, sj) = Jet2::lift_pair(r, s, 1);
        let (a, b) = self.data.log_gradient(&rj, &sj)?;
        Ok((a.value(), b.value()))
    }

    fn value(&self, r: f64, s: f64) -> Result<f64, FamilyError> {
        let sb = self.sigma_b;
        let ray = simpson(
            |rho| match self.grad_values(rho, sb * rho) {
                Ok((ar, as_)) => ar + sb * as_,
                Err(_) => f64::NAN,
            },
            self.r_b,
            r,
            self.tol,
        )?;
        let line = simpson(
            |u| self.grad_values(r, u).map(|g| g.1).unwrap_or(f64::NAN),
            sb * r,
            s,
            self.tol,
        )?;
        Ok(ray + line)
    }

    fn phi(&self, r: &Jet2, s: &Jet2) -> Result<Jet2, FamilyError> {
        let (rv, sv) = (r.value(), s.value());
        let order = r.order().min(s.order());
        let inner = order.max(1);
        let (rl, sl) = Jet2::lift_pair(rv, sv, inner);
        let (a_r, a_s) = self.data.log_gradient(&rl, &sl)?;
        let ln = Jet2::from_gradient(self.value(rv, sv)?, &a_r, &a_s)?;
        let phi = ln.exp().truncate(order);
        Ok(phi.substitute(r, s)?)
    }
}

/// Build φ from `(P, Q)`; refuses when the compatibility residual exceeds
/// `compat_tol` anywhere on the grid, and checks positivity afterwards.
pub fn build_theorem3_profile(data: &Theorem3Data, opts: &Theorem3Options) -> Result<MetricProfile, FamilyError> {
    let (a, b) = opts.r_range;
    let domain = DomainSpec::new(a, b)
        .with(Constraint::StrictCone)
        .with(Constraint::NonZeroS);
    let grid = opts.grid.points(&domain);
    let worst = grid
        .par_iter()
        .map(|&at| cond_u_residual(data, at).map(|v| (v.abs(), at)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold((0.0f64, None), |(m, w), (v, at)| if v > m || v.is_nan() { (v, Some(at)) } else { (m, w) });
    if let (res, Some(at)) = worst {
        if !(res <= opts.compat_tol) {
            return Err(FamilyError::CompatibilityFailure { residual: res, at });
        }
    }
    let r_b = opts.r_base.unwrap_or(0.5 * (a + b));
    let lp = Arc::new(LogPhi {
        data: data.clone(),
        r_b,
        sigma_b: opts.s_base_fraction,
        tol: opts.quadrature_tol,
    });
    let mut params = Params::new();
    params.insert("p".into(), ParamValue::Name(data.p.describe()));
    params.insert("g".into(), ParamValue::Name(data.g.describe()));
    params.insert("r_base".into(), ParamValue::Number(r_b));
    params.insert("s_base_fraction".into(), ParamValue::Number(opts.s_base_fraction));
    let profile = MetricProfile::new(
        "theorem3",
        params,
        domain,
        Provenance::Quadrature,
        move |r, s| {
            lp.phi(r, s).map_err(|e| match e {
                FamilyError::Jet(j) => EvalError::Jet(j),
                FamilyError::Quadrature(q) => EvalError::Quadrature(q),
                other => EvalError::Other(other.to_string()),
            })
        },
    );
    for &at in &grid {
        let m = margins(&profile, at).map_err(|e| FamilyError::Domain(e.to_string()))?;
        for (name, v) in ["m0", "m1", "m2"].iter().zip(m) {
            if !(v > 0.0) {
                return Err(FamilyError::PositivityFailure {
                    margin: name.to_string(),
                    value: v,
                    at,
                });
            }
        }
    }
    Ok(profile)
}
