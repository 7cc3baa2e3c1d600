//! The transforms `T(r)`, `T̄(r)` of a Douglas generator `g`.
//!
//! ```text
//! T(r)  = exp(−∫_{r0}^r 4u g/(1 − 2u²g) du) / (1 − 2r²g)²
//! T̄(r) = 4 ∫_{r0}^r (g′ + 2u g²)/(1 − 2u²g) · T(u) du
//! ```
//!
//! Closed forms are used for the registry entries that have one; they differ
//! from the quadrature pair by a constant factor on `T` (and the matching
//! factor plus an additive constant on `T̄`), which leaves the invariant
//! `(r²−s²)/((r²−s²)T̄ − T)` a function of the quadrature one.

use serde::Serialize;

use super::generators::GFunction;
use super::FamilyError;
use crate::jets::{Jet2, Var};
use crate::quadrature::simpson;

const SINGULAR_EPS: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformProvenance {
    ClosedForm,
    Quadrature,
}

#[derive(Clone, Debug)]
pub struct TransformPair {
    pub g: GFunction,
    pub r0: f64,
    pub tol: f64,
    pub provenance: TransformProvenance,
}

/// `1 − 2r²g(r)`.
fn denom(g: &GFunction, r: f64) -> f64 {
    1.0 - 2.0 * r * r * g.value(r)
}

/// Reject ranges where `1 − 2r²g` vanishes or changes sign.
pub fn check_nonsingular(g: &GFunction, a: f64, b: f64) -> Result<(), FamilyError> {
    let n = 4000;
    let mut prev: Option<f64> = None;
    for k in 0..=n {
        let r = a + (b - a) * k as f64 / n as f64;
        let d = denom(g, r);
        if !d.is_finite() || d.abs() < SINGULAR_EPS || prev.is_some_and(|p| p.signum() != d.signum()) {
            return Err(FamilyError::SingularIntegrand {
                r,
                detail: format!("1 - 2r^2 g(r) = {d:e} vanishes on [{a}, {b}] for g = {}", g.describe()),
            });
        }
        prev = Some(d);
    }
    Ok(())
}

impl TransformPair {
    /// Closed form when the generator has one, quadrature otherwise.
    pub fn build(g: &GFunction, r_range: (f64, f64), r0: f64, tol: f64) -> Result<Self, FamilyError> {
        let provenance = match g {
            GFunction::Zero | GFunction::Const { .. } | GFunction::InvRNeg => TransformProvenance::ClosedForm,
            GFunction::Polynomial { .. } => TransformProvenance::Quadrature,
        };
        Self::with_provenance(g, r_range, r0, tol, provenance)
    }

    /// Always integrate numerically.
    pub fn quadrature(g: &GFunction, r_range: (f64, f64), r0: f64, tol: f64) -> Result<Self, FamilyError> {
        Self::with_provenance(g, r_range, r0, tol, TransformProvenance::Quadrature)
    }

    fn with_provenance(
        g: &GFunction,
        r_range: (f64, f64),
        r0: f64,
        tol: f64,
        provenance: TransformProvenance,
    ) -> Result<Self, FamilyError> {
        let lo = r_range.0.min(r0);
        let hi = r_range.1.max(r0);
        check_nonsingular(g, lo, hi)?;
        Ok(TransformPair {
            g: g.clone(),
            r0,
            tol,
            provenance,
        })
    }

    /// Analytic `T′/T = (4rg + 4r²g′)/(1 − 2r²g)`.
    pub fn log_derivative(&self, r: f64) -> f64 {
        let g = self.g.value(r);
        let gp = self.g.deriv_value(r);
        (4.0 * r * g + 4.0 * r * r * gp) / (1.0 - 2.0 * r * r * g)
    }

    fn integral_i1(&self, r: f64) -> Result<f64, FamilyError> {
        let g = &self.g;
        Ok(simpson(
            |u| 4.0 * u * g.value(u) / (1.0 - 2.0 * u * u * g.value(u)),
            self.r0,
            r,
            self.tol,
        )?)
    }

    fn t_quad(&self, r: f64) -> Result<f64, FamilyError> {
        let d = denom(&self.g, r);
        Ok((-self.integral_i1(r)?).exp() / (d * d))
    }

    pub fn t(&self, r: f64) -> Result<f64, FamilyError> {
        match (self.provenance, &self.g) {
            (TransformProvenance::ClosedForm, GFunction::Zero | GFunction::InvRNeg) => Ok(1.0),
            (TransformProvenance::ClosedForm, GFunction::Const { c }) => Ok(1.0 / (1.0 - 2.0 * c * r * r).abs()),
            _ => self.t_quad(r),
        }
    }

    pub fn t_bar(&self, r: f64) -> Result<f64, FamilyError> {
        match (self.provenance, &self.g) {
            (TransformProvenance::ClosedForm, GFunction::Zero) => Ok(0.0),
            (TransformProvenance::ClosedForm, GFunction::InvRNeg) => Ok(-4.0 / r),
            (TransformProvenance::ClosedForm, GFunction::Const { c }) => Ok(2.0 * c / (1.0 - 2.0 * c * r * r)),
            _ => {
                let g = &self.g;
                // the inner T(u) is itself a quadrature; its error feeds the outer one
                let inner_tol = 0.1 * self.tol;
                let outer = simpson(
                    |u| {
                        let gu = g.value(u);
                        let d = 1.0 - 2.0 * u * u * gu;
                        let i1 = simpson(
                            |v| 4.0 * v * g.value(v) / (1.0 - 2.0 * v * v * g.value(v)),
                            self.r0,
                            u,
                            inner_tol,
                        )
                        .unwrap_or(f64::NAN);
                        let tu = (-i1).exp() / (d * d);
                        4.0 * (g.deriv_value(u) + 2.0 * u * gu * gu) / d * tu
                    },
                    self.r0,
                    r,
                    self.tol,
                )?;
                Ok(outer)
            }
        }
    }

    /// Jets of `T` and `T̄` at the base of `r`, which must be a pure r-lift.
    pub fn jets(&self, r: &Jet2) -> Result<(Jet2, Jet2), FamilyError> {
        let rv = r.value();
        let g = self.g.eval(r)?;
        let gp = self.g.deriv(r)?;
        let d = 1.0 - 2.0 * *r * *r * g;
        match (self.provenance, &self.g) {
            (TransformProvenance::ClosedForm, GFunction::Zero) => Ok((
                Jet2::constant(1.0, r.base()),
                Jet2::constant(0.0, r.base()),
            )),
            (TransformProvenance::ClosedForm, GFunction::InvRNeg) => {
                Ok((Jet2::constant(1.0, r.base()), -4.0 * r.recip()?))
            }
            (TransformProvenance::ClosedForm, GFunction::Const { c }) => {
                let sign = d.value().signum();
                Ok(((sign * d).recip()?, Jet2::constant(2.0 * c, r.base()).div(&d)?))
            }
            _ => {
                let lt_prime = (4.0 * *r * g + 4.0 * *r * *r * gp).div(&d)?;
                let lt = Jet2::antiderivative_r(self.t_quad(rv)?.ln(), &lt_prime);
                let t = lt.exp();
                let tb_prime = 4.0 * (gp + 2.0 * *r * g * g).div(&d)? * t;
                let tb = Jet2::antiderivative_r(self.t_bar(rv)?, &tb_prime);
                Ok((t.truncate(r.order()), tb.truncate(r.order())))
            }
        }
    }

    /// Jets at a bare radius (base `(r, 0)`).
    pub fn jets_at(&self, r: f64, order: usize) -> Result<(Jet2, Jet2), FamilyError> {
        self.jets(&Jet2::variable_with_order(Var::R, (r, 0.0), order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let z = TransformPair::build(&GFunction::Zero, (0.1, 1.0), 0.5, 1e-10).unwrap();
        assert_eq!((z.t(0.3).unwrap(), z.t_bar(0.3).unwrap()), (1.0, 0.0));
        let inv = TransformPair::build(&GFunction::InvRNeg, (0.2, 2.0), 1.0, 1e-10).unwrap();
        assert_eq!(inv.t(0.7).unwrap(), 1.0);
        assert!((inv.t_bar(0.5).unwrap() + 8.0).abs() < 1e-15);
        let half = TransformPair::build(&GFunction::Const { c: 0.5 }, (0.05, 0.9), 0.5, 1e-10).unwrap();
        assert!((half.t(0.5).unwrap() - 1.0 / 0.75).abs() < 1e-15);
        assert!((half.t_bar(0.5).unwrap() - 1.0 / 0.75).abs() < 1e-15);
    }

    #[test]
    fn quadrature_matches_closed_form_up_to_normalization() {
        let g = GFunction::Const { c: 0.5 };
        let q = TransformPair::quadrature(&g, (0.05, 0.9), 0.5, 1e-11).unwrap();
        let c = TransformPair::build(&g, (0.05, 0.9), 0.5, 1e-11).unwrap();
        let lambda = q.t(0.5).unwrap() / c.t(0.5).unwrap();
        let shift = q.t_bar(0.5).unwrap() - lambda * c.t_bar(0.5).unwrap();
        for r in [0.1, 0.3, 0.7, 0.85] {
            assert!((q.t(r).unwrap() / c.t(r).unwrap() - lambda).abs() < 1e-9);
            let tb = lambda * c.t_bar(r).unwrap() + shift;
            assert!((q.t_bar(r).unwrap() - tb).abs() < 1e-8, "r = {r}");
        }
    }

    #[test]
    fn jets_match_values() {
        let g = GFunction::Polynomial {
            coeffs: vec![0.2, -0.1],
        };
        let p = TransformPair::build(&g, (0.2, 1.2), 0.6, 1e-11).unwrap();
        let (t, tb) = p.jets_at(0.8, 4).unwrap();
        let h = 1e-4;
        let d_t = (p.t(0.8 + h).unwrap() - p.t(0.8 - h).unwrap()) / (2.0 * h);
        let d_tb = (p.t_bar(0.8 + h).unwrap() - p.t_bar(0.8 - h).unwrap()) / (2.0 * h);
        assert!((t.partial(1, 0) - d_t).abs() < 1e-6);
        assert!((tb.partial(1, 0) - d_tb).abs() < 1e-6);
    }

    #[test]
    fn singular_range_rejected() {
        // 1 − 2r²·(1/2) vanishes at r = 1
        let e = TransformPair::build(&GFunction::Const { c: 0.5 }, (0.5, 1.5), 0.7, 1e-10).unwrap_err();
        assert!(matches!(e, FamilyError::SingularIntegrand { .. }));
    }
}
