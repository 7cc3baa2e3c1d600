//! Metric profiles built from generator data.
//!
//! * [`transforms`]: `T`, `T̄` of a Douglas generator `g`.
//! * [`builds`]: the integral constructions `φ = s(h − ∫η(ψ)/(u²√(r²−u²)))`,
//!   with `ψ` the transport invariant (Douglas) or the non-Douglas invariant.
//! * [`theorem3`]: φ recovered from spray data `(P, Q)`.
//! * [`characteristics`]: characteristic curves of the transport fields.

pub mod builds;
pub mod characteristics;
pub mod generators;
pub mod theorem3;
pub mod transforms;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{Status, Tolerances};
use crate::jets::{Jet2, JetError};
use crate::metric::{GridSpec, MetricError, MetricProfile, PositivityReport, RsPoint};
use crate::quadrature::QuadratureError;

pub use builds::{build_theorem1_profile, build_theorem2_profile, gauge_free_combination, Invariant};
pub use characteristics::{characteristic_flow, kappa_relation, qss_invariant, CharacteristicCurve};
pub use generators::{EtaFunction, GFunction, HFunction, PFunction};
pub use theorem3::{build_theorem3_profile, compute_u, cond_u_residual, Theorem3Data, Theorem3Options};
pub use transforms::{check_nonsingular, TransformPair, TransformProvenance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("singular integrand at r = {r}: {detail}")]
    SingularIntegrand { r: f64, detail: String },
    #[error("quadrature failed: {0}")]
    Quadrature(#[from] QuadratureError),
    #[error("jet arithmetic failed: {0}")]
    Jet(#[from] JetError),
    #[error("outside the construction domain: {0}")]
    Domain(String),
    #[error("invalid family spec: {0}")]
    InvalidSpec(String),
    #[error("compatibility residual {residual:e} at (r, s) = ({}, {}) exceeds tolerance", at.r, at.s)]
    CompatibilityFailure { residual: f64, at: RsPoint },
    #[error("built profile is not positive: {margin} = {value:e} at (r, s) = ({}, {})", at.r, at.s)]
    PositivityFailure { margin: String, value: f64, at: RsPoint },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Non-Douglas construction with parameter `k`.
    Theorem1,
    /// Douglas construction from `g`.
    Theorem2,
    /// Construction from spray data `(P, Q)`.
    Theorem3,
}

impl FamilyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyKind::Theorem1 => "theorem1",
            FamilyKind::Theorem2 => "theorem2",
            FamilyKind::Theorem3 => "theorem3",
        }
    }
}

fn half() -> f64 {
    0.5
}

fn default_tol() -> f64 {
    1e-10
}

fn default_range() -> (f64, f64) {
    (0.3, 1.5)
}

/// Which antiderivative of the s-integrand the integral builds use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Antiderivative {
    /// Integrate from `±s0`; differs from smooth closed forms by `c(r)|s|`.
    BasePoint,
    /// Odd antiderivative with the `1/τ²` pole removed (Douglas invariants).
    FinitePart,
}

impl Antiderivative {
    pub fn as_str(self) -> &'static str {
        match self {
            Antiderivative::BasePoint => "base_point",
            Antiderivative::FinitePart => "finite_part",
        }
    }
}

/// Base points of the quadratures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasePoints {
    /// Lower limit of the `T`, `T̄` integrals; midpoint of the r-range if absent.
    #[serde(default)]
    pub r0: Option<f64>,
    /// The s-integrals start at `s0 = s0_fraction · r · sign(s)`.
    #[serde(default = "half")]
    pub s0_fraction: f64,
    /// Base ray `s = s_base_fraction · r` of the theorem3 path integral.
    #[serde(default = "half")]
    pub s_base_fraction: f64,
}

impl Default for BasePoints {
    fn default() -> Self {
        BasePoints {
            r0: None,
            s0_fraction: 0.5,
            s_base_fraction: 0.5,
        }
    }
}

/// Recipe for a family build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub g: GFunction,
    #[serde(default)]
    pub k: f64,
    #[serde(default)]
    pub h: HFunction,
    #[serde(default)]
    pub eta: EtaFunction,
    /// Spray scalar `P` for theorem3.
    #[serde(default)]
    pub p: Option<PFunction>,
    #[serde(default = "default_range")]
    pub r_range: (f64, f64),
    #[serde(default)]
    pub base_points: BasePoints,
    #[serde(default = "default_tol")]
    pub quadrature_tol: f64,
    /// Defaults to `finite_part` for theorem2 and `base_point` for theorem1.
    #[serde(default)]
    pub antiderivative: Option<Antiderivative>,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind) -> Self {
        FamilySpec {
            kind,
            name: None,
            g: GFunction::Zero,
            k: 0.0,
            h: HFunction::Zero,
            eta: EtaFunction::Identity,
            p: None,
            r_range: default_range(),
            base_points: BasePoints::default(),
            quadrature_tol: default_tol(),
            antiderivative: None,
        }
    }

    pub fn antiderivative(&self) -> Antiderivative {
        self.antiderivative.unwrap_or(match self.kind {
            FamilyKind::Theorem1 => Antiderivative::BasePoint,
            _ => Antiderivative::FinitePart,
        })
    }

    pub fn r0(&self) -> f64 {
        self.base_points
            .r0
            .unwrap_or(0.5 * (self.r_range.0 + self.r_range.1))
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.as_str().to_string())
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        let (a, b) = self.r_range;
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(FamilyError::InvalidSpec(format!(
                "r_range ({a}, {b}) must satisfy 0 < a < b"
            )));
        }
        let f = self.base_points.s0_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(FamilyError::InvalidSpec(format!("s0_fraction = {f} must lie in (0, 1)")));
        }
        let f = self.base_points.s_base_fraction;
        if !(f > -1.0 && f < 1.0 && f != 0.0) {
            return Err(FamilyError::InvalidSpec(format!(
                "s_base_fraction = {f} must satisfy 0 < |s_base_fraction| < 1"
            )));
        }
        if !(self.quadrature_tol >= 1e-14 && self.quadrature_tol.is_finite()) {
            return Err(FamilyError::InvalidSpec(format!(
                "quadrature_tol = {:e} must be >= 1e-14",
                self.quadrature_tol
            )));
        }
        match self.kind {
            FamilyKind::Theorem1 => {
                if !self.k.is_finite() {
                    return Err(FamilyError::InvalidSpec("k must be finite".into()));
                }
                if self.antiderivative() == Antiderivative::FinitePart && self.k != 0.0 {
                    return Err(FamilyError::InvalidSpec(
                        "finite_part needs an integrand even in s; use base_point for k != 0".into(),
                    ));
                }
            }
            FamilyKind::Theorem2 | FamilyKind::Theorem3 => {
                let r0 = self.r0();
                check_nonsingular(&self.g, a.min(r0), b.max(r0))?;
            }
        }
        Ok(())
    }

    pub fn theorem3_data(&self) -> Theorem3Data {
        Theorem3Data {
            p: self.p.clone().unwrap_or_default(),
            g: self.g.clone(),
        }
    }
}

/// The invariant handed to `η`: `t/(tT̄ − T)` for theorem2/3 (negative on the
/// usual ranges), the non-Douglas invariant for theorem1.
pub fn transport_invariant(spec: &FamilySpec, at: RsPoint) -> Result<f64, FamilyError> {
    let t = at.t();
    if !(t > 0.0) {
        return Err(FamilyError::Domain(format!(
            "|s| < r required, got (r, s) = ({}, {})",
            at.r, at.s
        )));
    }
    let inv = Invariant::from_spec(spec)?;
    let v = inv.value(at.r, at.s)?;
    let v = match spec.kind {
        FamilyKind::Theorem1 => v,
        _ => -v,
    };
    if !v.is_finite() {
        return Err(FamilyError::Domain(format!(
            "singular invariant at (r, s) = ({}, {})",
            at.r, at.s
        )));
    }
    Ok(v)
}

/// Margins `eta_decreasing = −(√(r²−s²)/s)·∂_s η(ψ)` and
/// `eta_positive = η(ψ)/√(r²−s²)`, the positivity route for the integral builds.
pub fn eta_monotonicity_check(spec: &FamilySpec, grid: &[RsPoint]) -> PositivityReport {
    let inv = match Invariant::from_spec(spec) {
        Ok(i) => i,
        Err(e) => {
            return PositivityReport::from_samples(
                &["eta_decreasing", "eta_positive"],
                vec![Err(e.to_string())],
            )
        }
    };
    let samples = grid
        .par_iter()
        .map(|&at| {
            let (r, s) = Jet2::lift_pair(at.r, at.s, 1);
            let arg = inv.jet(&r, &s, None).map_err(|e| e.to_string())?;
            let e = spec.eta.eval(&arg).map_err(|e| e.to_string())?;
            let rt = at.t().sqrt();
            let dec = -(rt / at.s) * e.partial(0, 1);
            Ok((at, vec![dec, e.value() / rt]))
        })
        .collect();
    PositivityReport::from_samples(&["eta_decreasing", "eta_positive"], samples)
}

/// Dispatch on `spec.kind`.
pub fn build_profile(spec: &FamilySpec) -> Result<MetricProfile, FamilyError> {
    match spec.kind {
        FamilyKind::Theorem1 => build_theorem1_profile(spec),
        FamilyKind::Theorem2 => build_theorem2_profile(spec),
        FamilyKind::Theorem3 => {
            spec.validate()?;
            let opts = Theorem3Options {
                r_range: spec.r_range,
                r_base: spec.base_points.r0,
                s_base_fraction: spec.base_points.s_base_fraction,
                quadrature_tol: spec.quadrature_tol,
                ..Theorem3Options::default()
            };
            let mut p = build_theorem3_profile(&spec.theorem3_data(), &opts)?;
            if let Some(n) = &spec.name {
                p.name = n.clone();
            }
            Ok(p)
        }
    }
}

/// A family config file: the spec plus optional verification settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub family: FamilySpec,
    /// Replaces the provenance-based defaults when present.
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    /// Expected verdicts; any mismatch is reported.
    #[serde(default)]
    pub expected: BTreeMap<String, Status>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
}

impl FamilyConfig {
    pub fn from_json(text: &str) -> Result<Self, FamilyError> {
        let cfg: FamilyConfig =
            serde_json::from_str(text).map_err(|e| FamilyError::InvalidSpec(e.to_string()))?;
        cfg.family.validate()?;
        if let Some(t) = &cfg.tolerances {
            t.validate().map_err(FamilyError::InvalidSpec)?;
        }
        for k in cfg.expected.keys() {
            if !crate::curvature::VERDICTS.contains(&k.as_str()) {
                return Err(FamilyError::InvalidSpec(format!("unknown verdict '{k}' in expected")));
            }
        }
        Ok(cfg)
    }
}
