//! Spherically symmetric profiles `F(x, y) = |y| φ(|x|, ⟨x,y⟩/|y|)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jets::{Jet2, JetError};
use crate::quadrature::QuadratureError;

const CONE_SLACK: f64 = 1e-14;

/// Failure inside a profile evaluator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("tangent vector has zero length")]
    ZeroTangent,
    #[error("x and y have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("|s| = {} exceeds r = {r}", s.abs())]
    OutsideCone { r: f64, s: f64 },
    #[error("(r, s) = ({r}, {s}) is outside the domain: {reason}")]
    OutsideDomain { r: f64, s: f64, reason: String },
    #[error("non-finite {quantity} at (r, s) = ({}, {})", at.r, at.s)]
    NonFinite { at: RsPoint, quantity: &'static str },
    #[error("evaluation failed at (r, s) = ({}, {}): {source}", at.r, at.s)]
    Eval { at: RsPoint, source: EvalError },
}

/// The reduced coordinates `r = |x|`, `s = ⟨x,y⟩/|y|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RsPoint {
    pub r: f64,
    pub s: f64,
}

impl RsPoint {
    /// Checked constructor: `r ≥ 0`, `|s| ≤ r` with a 1e-14 clamp.
    pub fn new(r: f64, s: f64) -> Result<Self, MetricError> {
        if !(r >= 0.0) || !s.is_finite() || !r.is_finite() {
            return Err(MetricError::OutsideCone { r, s });
        }
        let slack = CONE_SLACK * r.max(1.0);
        if s.abs() > r + slack {
            return Err(MetricError::OutsideCone { r, s });
        }
        Ok(RsPoint {
            r,
            s: s.clamp(-r, r),
        })
    }

    /// `r² − s²`.
    pub fn t(&self) -> f64 {
        (self.r - self.s) * (self.r + self.s)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

/// Reduce `(x, y)` to `(r, s)`.
pub fn to_rs(x: &[f64], y: &[f64]) -> Result<RsPoint, MetricError> {
    if x.len() != y.len() {
        return Err(MetricError::DimensionMismatch(x.len(), y.len()));
    }
    let ny = norm(y);
    if ny == 0.0 {
        return Err(MetricError::ZeroTangent);
    }
    RsPoint::new(norm(x), dot(x, y) / ny)
}

/// Named restriction of the `(r, s)` domain.
#[derive(Clone)]
pub enum Constraint {
    /// `s ≠ 0`.
    NonZeroS,
    /// `|s| < r` strictly.
    StrictCone,
    Custom {
        description: String,
        predicate: Arc<dyn Fn(f64, f64) -> bool + Send + Sync>,
    },
}

impl Constraint {
    pub fn custom(
        description: impl Into<String>,
        predicate: impl Fn(f64, f64) -> bool + Send + Sync + 'static,
    ) -> Self {
        Constraint::Custom {
            description: description.into(),
            predicate: Arc::new(predicate),
        }
    }

    pub fn holds(&self, r: f64, s: f64) -> bool {
        match self {
            Constraint::NonZeroS => s != 0.0,
            Constraint::StrictCone => s.abs() < r,
            Constraint::Custom { predicate, .. } => predicate(r, s),
        }
    }

    pub fn description(&self) -> String {
        match self {
            Constraint::NonZeroS => "s != 0".into(),
            Constraint::StrictCone => "|s| < r".into(),
            Constraint::Custom { description, .. } => description.clone(),
        }
    }
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Constraint({})", self.description())
    }
}

#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub constraints: Vec<Constraint>,
}

impl DomainSpec {
    pub fn new(r_min: f64, r_max: f64) -> Self {
        assert!(0.0 <= r_min && r_min < r_max, "invalid r-range [{r_min}, {r_max}]");
        DomainSpec {
            r_min,
            r_max,
            constraints: Vec::new(),
        }
    }

    pub fn with(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    /// First violated condition, if any.
    pub fn violation(&self, r: f64, s: f64) -> Option<String> {
        if r < self.r_min || r > self.r_max {
            return Some(format!("r outside [{}, {}]", self.r_min, self.r_max));
        }
        if s.abs() > r {
            return Some("|s| > r".into());
        }
        self.constraints
            .iter()
            .find(|c| !c.holds(r, s))
            .map(|c| c.description())
    }

    pub fn contains(&self, r: f64, s: f64) -> bool {
        self.violation(r, s).is_none()
    }

    pub fn check(&self, p: RsPoint) -> Result<(), MetricError> {
        match self.violation(p.r, p.s) {
            None => Ok(()),
            Some(reason) => Err(MetricError::OutsideDomain {
                r: p.r,
                s: p.s,
                reason,
            }),
        }
    }

    pub fn describe(&self) -> Vec<String> {
        self.constraints.iter().map(|c| c.description()).collect()
    }
}

/// Tensor-product verification grid in `(r, σ = s/r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n_r: usize,
    pub n_sigma: usize,
    pub sigma_max: f64,
    pub sigma_gap: f64,
    /// Overrides the profile's r-range when set.
    pub r_range: Option<(f64, f64)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n_r: 24,
            n_sigma: 24,
            sigma_max: 0.95,
            sigma_gap: 0.05,
            r_range: None,
        }
    }
}

/// `n` Chebyshev nodes on `[a, b]`, ascending.
pub fn chebyshev_nodes(n: usize, a: f64, b: f64) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    let mut v: Vec<f64> = (0..n)
        .map(|k| {
            let c = ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos();
            0.5 * (a + b) - 0.5 * (b - a) * c
        })
        .collect();
    v.sort_by(|p, q| p.total_cmp(q));
    v
}

impl GridSpec {
    pub fn with_r_range(mut self, a: f64, b: f64) -> Self {
        self.r_range = Some((a, b));
        self
    }

    /// Interior r-values: Chebyshev nodes on `[a+δ, b−δ]`, δ = 1% of the range.
    pub fn r_values(&self, domain: &DomainSpec) -> Vec<f64> {
        let (a, b) = self.r_range.unwrap_or((domain.r_min, domain.r_max));
        let d = 1e-2 * (b - a);
        chebyshev_nodes(self.n_r, a + d, b - d)
    }

    pub fn sigma_values(&self) -> Vec<f64> {
        chebyshev_nodes(self.n_sigma, -self.sigma_max, self.sigma_max)
            .into_iter()
            .filter(|s| s.abs() >= self.sigma_gap)
            .collect()
    }

    /// Grid points, r-major, skipping anything the domain excludes.
    pub fn points(&self, domain: &DomainSpec) -> Vec<RsPoint> {
        let sig = self.sigma_values();
        let mut out = Vec::with_capacity(self.n_r * sig.len());
        for r in self.r_values(domain) {
            for &q in &sig {
                let s = q * r;
                if domain.contains(r, s) {
                    out.push(RsPoint { r, s });
                }
            }
        }
        out
    }

    /// Points grouped by r-line.
    pub fn lines(&self, domain: &DomainSpec) -> Vec<(f64, Vec<f64>)> {
        group_lines(&self.points(domain))
    }
}

/// Group r-major points into `(r, s-values)` lines.
pub fn group_lines(points: &[RsPoint]) -> Vec<(f64, Vec<f64>)> {
    let mut out: Vec<(f64, Vec<f64>)> = Vec::new();
    for p in points {
        match out.last_mut() {
            Some((r, ss)) if *r == p.r => ss.push(p.s),
            _ => out.push((p.r, vec![p.s])),
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Closed-form evaluator; jets are exact.
    Analytic,
    /// Some quantity comes from numerical quadrature.
    Quadrature,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Name(String),
}

impl From<f64> for ParamValue {
    fn from(v: f64) -> Self {
        ParamValue::Number(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Name(v.to_string())
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Number(v) => write!(f, "{v}"),
            ParamValue::Name(s) => f.write_str(s),
        }
    }
}

pub type Params = BTreeMap<String, ParamValue>;

/// `φ` as a map from `(r, s)` lifts to a jet.
pub type PhiFn = dyn Fn(&Jet2, &Jet2) -> Result<Jet2, EvalError> + Send + Sync;

/// An evaluable profile with its working domain.
#[derive(Clone)]
pub struct MetricProfile {
    pub name: String,
    pub params: Params,
    pub domain: DomainSpec,
    pub provenance: Provenance,
    eval: Arc<PhiFn>,
}

impl fmt::Debug for MetricProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricProfile")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

impl MetricProfile {
    pub fn new(
        name: impl Into<String>,
        params: Params,
        domain: DomainSpec,
        provenance: Provenance,
        eval: impl Fn(&Jet2, &Jet2) -> Result<Jet2, EvalError> + Send + Sync + 'static,
    ) -> Self {
        MetricProfile {
            name: name.into(),
            params,
            domain,
            provenance,
            eval: Arc::new(eval),
        }
    }

    pub fn from_arc(
        name: impl Into<String>,
        params: Params,
        domain: DomainSpec,
        provenance: Provenance,
        eval: Arc<PhiFn>,
    ) -> Self {
        MetricProfile {
            name: name.into(),
            params,
            domain,
            provenance,
            eval,
        }
    }

    pub fn evaluator(&self) -> Arc<PhiFn> {
        Arc::clone(&self.eval)
    }

    /// Jet of φ at `at` to the given order, without a domain check.
    pub fn jet_unchecked(&self, at: RsPoint, order: usize) -> Result<Jet2, MetricError> {
        let (r, s) = Jet2::lift_pair(at.r, at.s, order);
        let j = (self.eval)(&r, &s).map_err(|source| MetricError::Eval { at, source })?;
        if !j.is_finite() {
            return Err(MetricError::NonFinite { at, quantity: "phi jet" });
        }
        Ok(j)
    }

    /// Jet of φ at `at`; the point must lie in the domain.
    pub fn jet(&self, at: RsPoint, order: usize) -> Result<Jet2, MetricError> {
        self.domain.check(at)?;
        self.jet_unchecked(at, order)
    }

    pub fn phi(&self, at: RsPoint) -> Result<f64, MetricError> {
        Ok(self.jet(at, 0)?.value())
    }
}

/// `F(x, y) = |y| φ(r, s)`.
pub fn eval_f(profile: &MetricProfile, x: &[f64], y: &[f64]) -> Result<f64, MetricError> {
    let at = to_rs(x, y)?;
    Ok(norm(y) * profile.phi(at)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub at: RsPoint,
    pub margin: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarginMin {
    pub name: &'static str,
    pub min: f64,
}

/// Pointwise margins over a grid; violations are data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    pub points: usize,
    pub margins: Vec<MarginMin>,
    pub violations: Vec<Violation>,
    pub failed_points: Vec<String>,
    pub positive: bool,
}

impl PositivityReport {
    pub fn min(&self, name: &str) -> Option<f64> {
        self.margins.iter().find(|m| m.name == name).map(|m| m.min)
    }

    /// Assemble from per-point margin vectors (named by `names`).
    pub fn from_samples(
        names: &[&'static str],
        samples: Vec<Result<(RsPoint, Vec<f64>), String>>,
    ) -> Self {
        let mut mins = vec![f64::INFINITY; names.len()];
        let mut violations = Vec::new();
        let mut failed = Vec::new();
        let points = samples.len();
        for s in samples {
            match s {
                Ok((at, vals)) => {
                    for (k, v) in vals.iter().enumerate() {
                        mins[k] = mins[k].min(*v);
                        if !(*v > 0.0) {
                            violations.push(Violation {
                                at,
                                margin: names[k],
                                value: *v,
                            });
                        }
                    }
                }
                Err(e) => failed.push(e),
            }
        }
        let positive = points > 0 && failed.is_empty() && violations.is_empty();
        PositivityReport {
            points,
            margins: names
                .iter()
                .zip(mins)
                .map(|(name, min)| MarginMin { name, min })
                .collect(),
            violations,
            failed_points: failed,
            positive,
        }
    }
}

/// Margins `m0 = φ`, `m1 = φ − sφ_s`, `m2 = m1 + (r²−s²)φ_ss` at one point.
pub fn margins(profile: &MetricProfile, at: RsPoint) -> Result<[f64; 3], MetricError> {
    let j = profile.jet(at, 2)?;
    let m0 = j.value();
    let m1 = m0 - at.s * j.partial(0, 1);
    let m2 = m1 + at.t() * j.partial(0, 2);
    Ok([m0, m1, m2])
}

pub fn positivity_check(profile: &MetricProfile, grid: &[RsPoint]) -> PositivityReport {
    let samples: Vec<_> = grid
        .par_iter()
        .map(|&at| {
            margins(profile, at)
                .map(|m| (at, m.to_vec()))
                .map_err(|e| e.to_string())
        })
        .collect();
    PositivityReport::from_samples(&["m0", "m1", "m2"], samples)
}
