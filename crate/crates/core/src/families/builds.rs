//! Profiles of the form `φ = s(h(r) − ∫_{s0}^{s} η(ψ(r,u))/(u²√(r²−u²)) du)`.
//!
//! The s-integral is rescaled with `u = rτ`, so that
//! `J(r, σ) = ∫_{σ0}^{σ} H(r, τ) dτ` with `H = η(ψ(r, rτ))/(r²τ²√(1−τ²))`.
//! The r-Taylor coefficients of `J` are integrated as a vector (exact
//! differentiation under the integral sign); its σ-derivatives are those of
//! `H` at the endpoint. Composing with `σ = s/r` yields the φ jet.
//!
//! Two antiderivatives are offered. `BasePoint` integrates from `±σ0`, which
//! leaves a term `c(r)|s|` relative to any smooth closed form. `FinitePart`
//! (Douglas invariants only, where `H` is even in τ) adds the odd correction
//! `sign(σ)·[−a/σ0 + ∫_0^{σ0}(H − a/τ²)dτ]`, `a = lim τ²H`, so that the result
//! is the odd antiderivative regular through `σ = 0` after removing the pole.

use std::sync::Arc;

use super::generators::{EtaFunction, HFunction};
use super::transforms::TransformPair;
use super::{Antiderivative, FamilyError, FamilyKind, FamilySpec};
use crate::jets::{Jet2, JetError, Var, MAX_ORDER, N_COEFFS};
use crate::metric::{Constraint, DomainSpec, EvalError, MetricProfile, ParamValue, Params, Provenance};
use crate::quadrature::simpson_vec;

/// The argument handed to `η`.
#[derive(Clone, Debug)]
pub enum Invariant {
    /// `r^{2(k²+1)}(r²−s²)e^{2k·atan(k − (1+k²)s/√(r²−s²))}/(k²s² − 2ks√(r²−s²) + r²)`.
    NonDouglas { k: f64 },
    /// `(r²−s²)/(T − (r²−s²)T̄)`, the negated transport invariant.
    Transport { pair: Arc<TransformPair> },
}

impl Invariant {
    pub fn from_spec(spec: &FamilySpec) -> Result<Self, FamilyError> {
        match spec.kind {
            FamilyKind::Theorem1 => Ok(Invariant::NonDouglas { k: spec.k }),
            FamilyKind::Theorem2 | FamilyKind::Theorem3 => Ok(Invariant::Transport {
                pair: Arc::new(TransformPair::build(
                    &spec.g,
                    spec.r_range,
                    spec.r0(),
                    spec.quadrature_tol,
                )?),
            }),
        }
    }

    /// Jet of the η-argument at `(r, s)`. For the transport case the
    /// transform jets are supplied by the caller (they depend on r only).
    pub fn jet(&self, r: &Jet2, s: &Jet2, transforms: Option<&(Jet2, Jet2)>) -> Result<Jet2, FamilyError> {
        let t = *r * *r - *s * *s;
        match self {
            Invariant::NonDouglas { k } => Ok(non_douglas(*k, r, s)?),
            Invariant::Transport { pair } => {
                let (tt, tb) = match transforms {
                    Some(p) => *p,
                    None => pair.jets(r)?,
                };
                Ok(t.div(&(tt - t * tb))?)
            }
        }
    }

    pub fn value(&self, r: f64, s: f64) -> Result<f64, FamilyError> {
        let (rj, sj) = Jet2::lift_pair(r, s, 0);
        Ok(self.jet(&rj, &sj, None)?.value())
    }
}

pub(crate) fn non_douglas(k: f64, r: &Jet2, s: &Jet2) -> Result<Jet2, JetError> {
    let t = *r * *r - *s * *s;
    let rt = t.sqrt()?;
    let arg = k - (1.0 + k * k) * s.div(&rt)?;
    let num = r.powf(2.0 * (k * k + 1.0))? * t * (2.0 * k * arg.atan()).exp();
    let den = k * k * *s * *s - 2.0 * k * *s * rt + *r * *r;
    num.div(&den)
}

/// `E(r, τ) = τ²H(r, τ) = η(ψ(r, rτ))/(r²√(1−τ²))`.
fn e_integrand(
    inv: &Invariant,
    eta: &EtaFunction,
    r: &Jet2,
    tau: &Jet2,
    transforms: Option<&(Jet2, Jet2)>,
) -> Result<Jet2, FamilyError> {
    let u = *r * *tau;
    let arg = inv.jet(r, &u, transforms)?;
    let e = eta.eval(&arg)?;
    Ok(e.div(&(*r * *r * (1.0 - *tau * *tau).sqrt()?))?)
}

/// Integrand `H(r, τ)` as a jet (both coordinates lifted as given).
fn h_integrand(
    inv: &Invariant,
    eta: &EtaFunction,
    r: &Jet2,
    tau: &Jet2,
    transforms: Option<&(Jet2, Jet2)>,
) -> Result<Jet2, FamilyError> {
    Ok(e_integrand(inv, eta, r, tau, transforms)?.div(&(*tau * *tau))?)
}

/// Below this τ the regularized integrand is extrapolated in τ² (cancellation).
const TAU_CUT: f64 = 0.02;

/// Shared evaluator for the two integral constructions.
pub(crate) struct IntegralEvaluator {
    pub inv: Invariant,
    pub eta: EtaFunction,
    pub h: HFunction,
    pub s0_fraction: f64,
    pub tol: f64,
    pub antiderivative: Antiderivative,
}

impl IntegralEvaluator {
    /// Jet of φ at the base point of the lifts `(r, s)`.
    pub fn phi(&self, r: &Jet2, s: &Jet2) -> Result<Jet2, FamilyError> {
        let rv = r.value();
        let sv = s.value();
        let order = r.order().min(s.order());
        if !(rv > 0.0) {
            return Err(FamilyError::Domain(format!("r = {rv} must be positive")));
        }
        let sigma = sv / rv;
        if sigma == 0.0 || sigma.abs() >= 1.0 {
            return Err(FamilyError::Domain(format!(
                "s/r = {sigma} must satisfy 0 < |s/r| < 1"
            )));
        }
        let sigma0 = self.s0_fraction * sigma.signum();
        let transforms = match &self.inv {
            Invariant::Transport { pair } => Some(pair.jets_at(rv, order)?),
            Invariant::NonDouglas { .. } => None,
        };
        let node = |tau: f64| -> Result<[f64; MAX_ORDER + 1], FamilyError> {
            let base = (rv, tau);
            let rj = Jet2::variable_with_order(Var::R, base, order);
            let tj = Jet2::constant(tau, base);
            let tr = transforms.map(|(a, b)| (a.rebased(base), b.rebased(base)));
            let hj = h_integrand(&self.inv, &self.eta, &rj, &tj, tr.as_ref())?;
            let mut out = [0.0; MAX_ORDER + 1];
            for (i, o) in out.iter_mut().enumerate() {
                *o = hj.taylor(i, 0);
            }
            Ok(out)
        };
        // relative accuracy per component; |H| peaks at the end nearest τ = 0
        let end = node(sigma)?;
        let scale: [f64; MAX_ORDER + 1] = std::array::from_fn(|i| (end[i] * sigma).abs().max(1.0));
        let mut quad = simpson_vec(
            |tau| node(tau).map(|v| std::array::from_fn::<f64, { MAX_ORDER + 1 }, _>(|i| v[i] / scale[i])),
            sigma0,
            sigma,
            self.tol,
        )?;
        for (q, k) in quad.iter_mut().zip(scale) {
            *q *= k;
        }
        if self.antiderivative == Antiderivative::FinitePart {
            let c = self.finite_part(rv, order, transforms)?;
            for (q, ci) in quad.iter_mut().zip(c) {
                *q += sigma.signum() * ci;
            }
        }
        let base = (rv, sigma);
        let mut j = Jet2::from_taylor(base, order, [0.0; N_COEFFS]);
        if order >= 1 {
            let rj = Jet2::variable_with_order(Var::R, base, order - 1);
            let tj = Jet2::variable_with_order(Var::S, base, order - 1);
            let tr = transforms.map(|(a, b)| (a.truncate(order - 1).rebased(base), b.truncate(order - 1).rebased(base)));
            let hend = h_integrand(&self.inv, &self.eta, &rj, &tj, tr.as_ref())?;
            for d in 1..=order {
                for jj in 1..=d {
                    let i = d - jj;
                    j.set_taylor(i, jj, hend.taylor(i, jj - 1) / jj as f64);
                }
            }
        }
        for (i, q) in quad.iter().enumerate().take(order + 1) {
            j.set_taylor(i, 0, *q);
        }
        let sig = s.div(r)?;
        let jc = j.substitute(r, &sig)?;
        Ok(*s * (self.h.eval(r)? - jc))
    }

    /// r-Taylor coefficients of `−a/σ0 + ∫_0^{σ0}(E(τ) − E(0))/τ² dτ`.
    fn finite_part(
        &self,
        rv: f64,
        order: usize,
        transforms: Option<(Jet2, Jet2)>,
    ) -> Result<[f64; MAX_ORDER + 1], FamilyError> {
        let e_vec = |tau: f64| -> Result<[f64; MAX_ORDER + 1], FamilyError> {
            let base = (rv, tau);
            let rj = Jet2::variable_with_order(Var::R, base, order);
            let tj = Jet2::constant(tau, base);
            let tr = transforms.map(|(a, b)| (a.rebased(base), b.rebased(base)));
            let ej = e_integrand(&self.inv, &self.eta, &rj, &tj, tr.as_ref())?;
            let mut out = [0.0; MAX_ORDER + 1];
            for (i, o) in out.iter_mut().enumerate().take(order + 1) {
                *o = ej.taylor(i, 0);
            }
            Ok(out)
        };
        let e0 = e_vec(0.0)?;
        let diff = |tau: f64| -> Result<[f64; MAX_ORDER + 1], FamilyError> {
            let e = e_vec(tau)?;
            Ok(std::array::from_fn(|i| (e[i] - e0[i]) / (tau * tau)))
        };
        // Below τc the difference quotient is fitted as A + Bτ² + Cτ⁴ through
        // τc, 2τc, 3τc and integrated exactly; Simpson covers the rest.
        let s0 = self.s0_fraction;
        let tc = TAU_CUT.min(s0 / 3.0);
        let (d1, d2, d3) = (diff(tc)?, diff(2.0 * tc)?, diff(3.0 * tc)?);
        let x2 = tc * tc;
        let head: [f64; MAX_ORDER + 1] = std::array::from_fn(|i| {
            // Newton form in x = τ² at nodes x2, 4x2, 9x2
            let f01 = (d2[i] - d1[i]) / (3.0 * x2);
            let f12 = (d3[i] - d2[i]) / (5.0 * x2);
            let c = (f12 - f01) / (8.0 * x2);
            let b = f01 - c * 5.0 * x2;
            let a = d1[i] - b * x2 - c * x2 * x2;
            a * tc + b * tc.powi(3) / 3.0 + c * tc.powi(5) / 5.0
        });
        // per-component scaling keeps the tolerance relative: the r-Taylor
        // coefficients grow like r^-i and their cancellation noise with them
        let scale: [f64; MAX_ORDER + 1] = std::array::from_fn(|i| e0[i].abs().max(1.0));
        let tail = simpson_vec(
            |tau| diff(tau).map(|d| std::array::from_fn::<f64, { MAX_ORDER + 1 }, _>(|i| d[i] / scale[i])),
            tc,
            s0,
            self.tol,
        )?;
        let reg: [f64; MAX_ORDER + 1] = std::array::from_fn(|i| head[i] + tail[i] * scale[i]);
        Ok(std::array::from_fn(|i| reg[i] - e0[i] / s0))
    }
}

fn domain(spec: &FamilySpec) -> DomainSpec {
    DomainSpec::new(spec.r_range.0, spec.r_range.1)
        .with(Constraint::StrictCone)
        .with(Constraint::NonZeroS)
}

fn params(spec: &FamilySpec) -> Params {
    let mut p = Params::new();
    p.insert("kind".into(), ParamValue::Name(spec.kind.as_str().into()));
    match spec.kind {
        FamilyKind::Theorem1 => {
            p.insert("k".into(), ParamValue::Number(spec.k));
        }
        _ => {
            p.insert("g".into(), ParamValue::Name(spec.g.describe()));
        }
    }
    p.insert("eta".into(), ParamValue::Name(spec.eta.describe()));
    p.insert("h".into(), ParamValue::Name(spec.h.describe()));
    p.insert("s0_fraction".into(), ParamValue::Number(spec.base_points.s0_fraction));
    p.insert("antiderivative".into(), ParamValue::Name(spec.antiderivative().as_str().into()));
    p
}

fn integral_profile(spec: &FamilySpec, inv: Invariant) -> MetricProfile {
    let ev = Arc::new(IntegralEvaluator {
        inv,
        eta: spec.eta.clone(),
        h: spec.h.clone(),
        s0_fraction: spec.base_points.s0_fraction,
        tol: spec.quadrature_tol,
        antiderivative: spec.antiderivative(),
    });
    MetricProfile::new(
        spec.display_name(),
        params(spec),
        domain(spec),
        Provenance::Quadrature,
        move |r, s| {
            ev.phi(r, s).map_err(|e| match e {
                FamilyError::Jet(j) => EvalError::Jet(j),
                FamilyError::Quadrature(q) => EvalError::Quadrature(q),
                other => EvalError::Other(other.to_string()),
            })
        },
    )
}

/// Douglas profile from `g`, `η`, `h`.
pub fn build_theorem2_profile(spec: &FamilySpec) -> Result<MetricProfile, FamilyError> {
    if spec.kind != FamilyKind::Theorem2 {
        return Err(FamilyError::InvalidSpec(format!(
            "expected kind theorem2, got {}",
            spec.kind.as_str()
        )));
    }
    spec.validate()?;
    let inv = Invariant::from_spec(spec)?;
    Ok(integral_profile(spec, inv))
}

/// Non-Douglas profile with parameter `k`.
pub fn build_theorem1_profile(spec: &FamilySpec) -> Result<MetricProfile, FamilyError> {
    if spec.kind != FamilyKind::Theorem1 {
        return Err(FamilyError::InvalidSpec(format!(
            "expected kind theorem1, got {}",
            spec.kind.as_str()
        )));
    }
    spec.validate()?;
    Ok(integral_profile(spec, Invariant::NonDouglas { k: spec.k }))
}

/// `√(r²−s²)(φ − sφ_s)`, which equals `η(ψ)` for the integral constructions.
pub fn gauge_free_combination(profile: &MetricProfile, r: f64, s: f64) -> Result<f64, FamilyError> {
    let at = crate::metric::RsPoint::new(r, s).map_err(|e| FamilyError::Domain(e.to_string()))?;
    let j = profile
        .jet(at, 1)
        .map_err(|e| FamilyError::Domain(e.to_string()))?;
    Ok(at.t().sqrt() * (j.value() - s * j.partial(0, 1)))
}

#[cfg(test)]
mod tests {
    use super::super::generators::GFunction;
    use super::super::BasePoints;
    use super::*;

    fn spec(kind: FamilyKind) -> FamilySpec {
        FamilySpec {
            kind,
            name: None,
            g: GFunction::Zero,
            k: 0.0,
            h: HFunction::Zero,
            eta: EtaFunction::Identity,
            p: None,
            r_range: (0.3, 1.5),
            base_points: BasePoints::default(),
            quadrature_tol: 1e-11,
            antiderivative: None,
        }
    }

    #[test]
    fn k_zero_collapses() {
        let (r, s) = Jet2::lift_pair(0.9, 0.4, 2);
        let v = non_douglas(0.0, &r, &s).unwrap();
        assert!((v.value() - (0.81 - 0.16)).abs() < 1e-14);
        assert!((v.partial(0, 1) + 0.8).abs() < 1e-13);
    }

    #[test]
    fn identity_holds_for_built_profile() {
        let mut sp = spec(FamilyKind::Theorem1);
        sp.k = 1.0;
        let p = build_theorem1_profile(&sp).unwrap();
        for &(r, s) in &[(0.8, 0.3), (1.2, -0.5), (0.5, 0.1)] {
            let lhs = gauge_free_combination(&p, r, s).unwrap();
            let rhs = Invariant::NonDouglas { k: 1.0 }.value(r, s).unwrap();
            assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn r_partials_match_differences() {
        let mut sp = spec(FamilyKind::Theorem2);
        sp.g = GFunction::InvRNeg;
        sp.eta = EtaFunction::Sqrt { c: 1.0 };
        let p = build_theorem2_profile(&sp).unwrap();
        let at = crate::metric::RsPoint::new(0.9, 0.35).unwrap();
        let j = p.jet(at, 4).unwrap();
        let h = 1e-4;
        let f = |r: f64, s: f64| p.jet(crate::metric::RsPoint::new(r, s).unwrap(), 0).unwrap().value();
        let dr = (f(0.9 + h, 0.35) - f(0.9 - h, 0.35)) / (2.0 * h);
        let ds = (f(0.9, 0.35 + h) - f(0.9, 0.35 - h)) / (2.0 * h);
        let drs = (f(0.9 + h, 0.35 + h) - f(0.9 + h, 0.35 - h) - f(0.9 - h, 0.35 + h) + f(0.9 - h, 0.35 - h))
            / (4.0 * h * h);
        assert!((j.partial(1, 0) - dr).abs() < 1e-6, "{} vs {dr}", j.partial(1, 0));
        assert!((j.partial(0, 1) - ds).abs() < 1e-6);
        assert!((j.partial(1, 1) - drs).abs() < 1e-4);
    }

    #[test]
    fn finite_part_reproduces_closed_forms() {
        use crate::catalog;
        use crate::metric::RsPoint;
        let mut sp = spec(FamilyKind::Theorem2);
        sp.g = GFunction::InvRNeg;
        sp.eta = EtaFunction::Sqrt { c: 1.0 };
        sp.r_range = (0.2, 2.0);
        let built = build_theorem2_profile(&sp).unwrap();
        let cf = catalog::get_default("example02").unwrap().profile;
        sp.g = GFunction::Zero;
        sp.eta = EtaFunction::ErfFamily {
            m: 1,
            epsilon: 1.0,
            gamma: 1.0,
        };
        let built_erf = build_theorem2_profile(&sp).unwrap();
        let cf_erf = catalog::get_default("erf_family").unwrap().profile;
        for &(r, s) in &[(0.5, 0.2), (1.3, -0.9), (0.3, 0.01), (1.9, 1.8)] {
            let at = RsPoint::new(r, s).unwrap();
            let (a, b) = (built.jet(at, 2).unwrap(), cf.jet(at, 2).unwrap());
            let (c, d) = (built_erf.jet(at, 2).unwrap(), cf_erf.jet(at, 2).unwrap());
            for (i, j) in [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (2, 0)] {
                assert!((a.partial(i, j) - b.partial(i, j)).abs() < 1e-8, "exs1 ({i},{j}) at {at:?}");
                let scale = d.partial(i, j).abs().max(1.0);
                assert!((c.partial(i, j) - d.partial(i, j)).abs() < 1e-8 * scale, "erf ({i},{j}) at {at:?}");
            }
        }
    }

    #[test]
    fn base_point_builds_differ_by_gauge_on_each_half() {
        let mut sp = spec(FamilyKind::Theorem2);
        sp.eta = EtaFunction::Sqrt { c: 1.0 };
        sp.antiderivative = Some(Antiderivative::BasePoint);
        let p1 = build_theorem2_profile(&sp).unwrap();
        sp.base_points.s0_fraction = 0.3;
        let p2 = build_theorem2_profile(&sp).unwrap();
        let ratio = |r: f64, s: f64| {
            let at = crate::metric::RsPoint::new(r, s).unwrap();
            (p1.phi(at).unwrap() - p2.phi(at).unwrap()) / s
        };
        for sign in [1.0, -1.0] {
            let a = ratio(1.0, sign * 0.2);
            let b = ratio(1.0, sign * 0.8);
            assert!((a - b).abs() < 1e-8);
        }
    }
}
