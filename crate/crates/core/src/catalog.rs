//! Closed-form example metrics with their expected classification.
//!
//! Each entry carries a parameter schema, a domain, a default grid, and the
//! verdicts (and flag curvature, where known) that [`crate::classify`] should
//! reproduce. Parameters arrive as strings (command line) and are validated
//! against the schema.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::curvature::{classify_with, ClassificationReport, Status, Tolerances, VERDICTS};
use crate::families::generators::HFunction;
use crate::families::theorem3::{build_theorem3_profile, Theorem3Data, Theorem3Options};
use crate::families::transforms::TransformPair;
use crate::families::{FamilyError, GFunction};
use crate::jets::{Jet2, JetError};
use crate::metric::{
    Constraint, DomainSpec, EvalError, GridSpec, MetricProfile, ParamValue, Params, Provenance, RsPoint,
};
use crate::report::csv_cell;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry '{0}' (see `catalog list`)")]
    UnknownEntry(String),
    #[error("entry '{entry}' has no parameter '{param}'")]
    UnknownParam { entry: String, param: String },
    #[error("parameter '{param}' = {value} is outside {range}")]
    ParamOutOfRange { param: String, value: String, range: String },
    #[error("invalid value '{value}' for parameter '{param}': {reason}")]
    InvalidParam { param: String, value: String, reason: String },
    #[error("building the entry failed: {0}")]
    Build(#[from] FamilyError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ParamKind {
    Number { default: f64, min: f64, max: f64 },
    Integer { default: i64, min: i64, max: i64 },
    /// One of `options`, or a bare number when `allow_number` is set.
    Choice {
        default: &'static str,
        options: &'static [&'static str],
        allow_number: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamSchema {
    pub name: &'static str,
    #[serde(flatten)]
    pub kind: ParamKind,
    pub description: &'static str,
}

impl ParamSchema {
    fn default_value(&self) -> ParamValue {
        match &self.kind {
            ParamKind::Number { default, .. } => ParamValue::Number(*default),
            ParamKind::Integer { default, .. } => ParamValue::Number(*default as f64),
            ParamKind::Choice { default, .. } => ParamValue::Name(default.to_string()),
        }
    }

    fn parse(&self, raw: &str) -> Result<ParamValue, CatalogError> {
        let bad = |reason: &str| CatalogError::InvalidParam {
            param: self.name.into(),
            value: raw.into(),
            reason: reason.into(),
        };
        match &self.kind {
            ParamKind::Number { min, max, .. } => {
                let v: f64 = raw.trim().parse().map_err(|_| bad("expected a number"))?;
                if !(v.is_finite() && v >= *min && v <= *max) {
                    return Err(CatalogError::ParamOutOfRange {
                        param: self.name.into(),
                        value: raw.into(),
                        range: format!("[{min}, {max}]"),
                    });
                }
                Ok(ParamValue::Number(v))
            }
            ParamKind::Integer { min, max, .. } => {
                let v: i64 = raw.trim().parse().map_err(|_| bad("expected an integer"))?;
                if v < *min || v > *max {
                    return Err(CatalogError::ParamOutOfRange {
                        param: self.name.into(),
                        value: raw.into(),
                        range: format!("{min}..={max}"),
                    });
                }
                Ok(ParamValue::Number(v as f64))
            }
            ParamKind::Choice {
                options, allow_number, ..
            } => {
                if options.contains(&raw) {
                    Ok(ParamValue::Name(raw.into()))
                } else if *allow_number {
                    match raw.trim().parse::<f64>() {
                        Ok(v) if v.is_finite() => Ok(ParamValue::Number(v)),
                        _ => Err(bad(&format!("expected a number or one of {options:?}"))),
                    }
                } else {
                    Err(bad(&format!("expected one of {options:?}")))
                }
            }
        }
    }
}

/// Validated parameter values.
#[derive(Clone, Debug, Default)]
pub struct Resolved(BTreeMap<String, ParamValue>);

impl Resolved {
    fn num(&self, k: &str) -> f64 {
        match self.0.get(k) {
            Some(ParamValue::Number(v)) => *v,
            _ => f64::NAN,
        }
    }

    fn int(&self, k: &str) -> i64 {
        self.num(k) as i64
    }

    fn choice(&self, k: &str) -> ParamValue {
        self.0.get(k).cloned().unwrap_or(ParamValue::Name(String::new()))
    }

    fn sign(&self) -> f64 {
        match self.choice("sign") {
            ParamValue::Name(n) if n == "minus" => -1.0,
            _ => 1.0,
        }
    }

    /// `h` from its CLI spelling, with `c` feeding `exs1_special`.
    fn h(&self) -> HFunction {
        let c = self.0.get("c").map(|_| self.num("c")).unwrap_or(1.0);
        match self.choice("h") {
            ParamValue::Number(v) => HFunction::Const { c: v },
            ParamValue::Name(n) => HFunction::from_cli(&n, c).unwrap_or_default(),
        }
    }

    pub fn params(&self) -> Params {
        self.0.clone()
    }
}

type Expected = (BTreeMap<String, Status>, Option<f64>);

struct EntryDef {
    id: &'static str,
    anchor: &'static str,
    provenance: Provenance,
    params: fn() -> Vec<ParamSchema>,
    domain: fn(&Resolved) -> DomainSpec,
    /// Grid r-range when narrower than the domain.
    grid_r_range: Option<(f64, f64)>,
    build: fn(&Resolved, DomainSpec) -> Result<MetricProfile, CatalogError>,
    expected: fn(&Resolved) -> Expected,
}

/// A resolved entry, ready for classification.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub anchor: String,
    pub profile: MetricProfile,
    /// Expected verdicts; verdicts not listed are not asserted.
    pub expected: BTreeMap<String, Status>,
    /// Expected constant flag curvature.
    pub expected_k: Option<f64>,
    pub grid: GridSpec,
}

/// A verdict (or K) that did not come out as expected.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mismatch {
    pub name: String,
    pub expected: String,
    pub observed: String,
}

impl CatalogEntry {
    pub fn grid_points(&self) -> Vec<RsPoint> {
        self.grid.points(&self.profile.domain)
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances::for_provenance(self.profile.provenance)
    }

    pub fn classify(&self) -> ClassificationReport {
        self.classify_with(&self.tolerances())
    }

    pub fn classify_with(&self, tol: &Tolerances) -> ClassificationReport {
        classify_with(&self.profile, &self.grid_points(), tol)
    }

    /// Compare a report against the expectations; K is compared to the
    /// `constant` tolerance when a constant verdict passed.
    pub fn mismatches(&self, report: &ClassificationReport, tol: &Tolerances) -> Vec<Mismatch> {
        let mut out = Vec::new();
        for (name, want) in &self.expected {
            let got = report.status(name);
            if got != Some(*want) {
                out.push(Mismatch {
                    name: name.clone(),
                    expected: want.as_str().into(),
                    observed: got.map_or("missing", |s| s.as_str()).into(),
                });
            }
        }
        if let Some(k) = self.expected_k {
            match &report.k {
                Some(stats) if (stats.mean - k).abs() < tol.constant.max(tol.k_spread) => {}
                Some(stats) => out.push(Mismatch {
                    name: "K".into(),
                    expected: format!("{k}"),
                    observed: format!("{}", stats.mean),
                }),
                None if self.expected.get("constant_flag") == Some(&Status::Pass) => {}
                None => out.push(Mismatch {
                    name: "K".into(),
                    expected: format!("{k}"),
                    observed: "not constant".into(),
                }),
            }
        }
        out
    }
}

/// Manifest row for `catalog list`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntryDescriptor {
    pub id: &'static str,
    pub anchor: &'static str,
    pub provenance: Provenance,
    pub params: Vec<ParamSchema>,
    pub domain: DomainDescription,
    /// Expectations at the default parameters.
    pub expected: BTreeMap<String, Status>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub expected_k: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainDescription {
    pub r_min: f64,
    pub r_max: f64,
    pub constraints: Vec<String>,
}

// ---------------------------------------------------------------- schemas

fn p_c() -> ParamSchema {
    ParamSchema {
        name: "c",
        kind: ParamKind::Number {
            default: 1.0,
            min: 1e-3,
            max: 1e3,
        },
        description: "positive scale factor",
    }
}

fn p_eps() -> ParamSchema {
    p_eps_default(1.0)
}

fn p_eps_default(default: f64) -> ParamSchema {
    ParamSchema {
        name: "epsilon",
        kind: ParamKind::Number {
            default,
            min: 0.0,
            max: 1e3,
        },
        description: "additive constant in eta",
    }
}

fn p_gamma() -> ParamSchema {
    ParamSchema {
        name: "gamma",
        kind: ParamKind::Number {
            default: 1.0,
            min: 0.0,
            max: 1e3,
        },
        description: "weight of the power term in eta",
    }
}

fn p_h(default: &'static str) -> ParamSchema {
    ParamSchema {
        name: "h",
        kind: ParamKind::Choice {
            default,
            options: &["zero", "one", "exs1_special", "ex10", "berwald_plus", "berwald_minus"],
            allow_number: true,
        },
        description: "gauge function h(r) multiplying s (a name or a constant)",
    }
}

fn p_sign() -> ParamSchema {
    ParamSchema {
        name: "sign",
        kind: ParamKind::Choice {
            default: "plus",
            options: &["plus", "minus"],
            allow_number: false,
        },
        description: "branch selector",
    }
}

fn no_params() -> Vec<ParamSchema> {
    Vec::new()
}

// ---------------------------------------------------------------- helpers

fn ball() -> DomainSpec {
    DomainSpec::new(0.0, 0.99)
}

fn expect(items: &[(&str, Status)]) -> BTreeMap<String, Status> {
    items.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn analytic(
    id: &str,
    p: &Resolved,
    domain: DomainSpec,
    f: impl Fn(&Jet2, &Jet2) -> Result<Jet2, JetError> + Send + Sync + 'static,
) -> MetricProfile {
    MetricProfile::new(id, p.params(), domain, Provenance::Analytic, move |r, s| {
        f(r, s).map_err(EvalError::Jet)
    })
}

fn exs1_root(r: &Jet2, s: &Jet2) -> Result<Jet2, JetError> {
    let t = *r * *r - *s * *s;
    (*r * (*r + 4.0 * t)).sqrt()?.div(&(*r * (1.0 + 4.0 * *r)))
}

use Status::{Fail, Pass};

// ---------------------------------------------------------------- entries

fn euclid_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    Ok(analytic("euclid", p, d, |r, _s| Ok(Jet2::constant(1.0, r.base()))))
}

fn all_pass(_: &Resolved) -> Expected {
    (
        expect(&[
            ("finsler_positive", Pass),
            ("douglas", Pass),
            ("scalar_flag", Pass),
            ("constant_flag", Pass),
            ("projectively_flat", Pass),
        ]),
        Some(0.0),
    )
}

fn berwald_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let sign = p.sign();
    Ok(analytic("berwald", p, d, move |r, s| {
        let a = 1.0 - *r * *r;
        let w = a + *s * *s;
        let rw = w.sqrt()?;
        let n = rw + sign * *s;
        (n * n).div(&(a * a * rw))
    }))
}

fn ex001_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let eps = p.num("epsilon");
    Ok(analytic("ex001", p, d, move |r, s| {
        let a = 1.0 - *r * *r;
        let w = a + *s * *s;
        let (r2, s2) = (*r * *r, *s * *s);
        let (a2, s4) = (a * a, s2 * s2);
        let (a3, s6) = (a2 * a, s4 * s2);
        let (a4, s8) = (a2 * a2, s4 * s4);
        let num = 35.0 * a4 * r2
            + 35.0 * a4 * s2
            + 280.0 * a3 * r2 * s2
            + 70.0 * a3 * s4
            + 560.0 * a2 * r2 * s4
            + 56.0 * a2 * s6
            + 448.0 * a * r2 * s6
            + 16.0 * a * s8
            + 128.0 * r2 * s8;
        let den = 35.0 * a4 * a * w.powf(3.5)?;
        let tail = eps * (a + 2.0 * s2).div(&(a2 * w.sqrt()?))?;
        Ok(num.div(&den)? + tail)
    }))
}

fn pf_scalar(_: &Resolved) -> Expected {
    (
        expect(&[
            ("douglas", Pass),
            ("scalar_flag", Pass),
            ("constant_flag", Fail),
            ("projectively_flat", Pass),
        ]),
        None,
    )
}

fn binom(m: i64, i: i64) -> f64 {
    (0..i).fold(1.0, |acc, k| acc * (m - k) as f64 / (k + 1) as f64)
}

/// `s·∫u^{2k}e^{−u²}du` for `k = −1, 0, …, kmax` (antiderivatives chosen so
/// that the recursion closes).
fn erf_moments(s: &Jet2, kmax: i64) -> Vec<Jet2> {
    let e = (-1.0 * *s * *s).exp();
    let sqpi = PI.sqrt();
    let mut out = vec![-1.0 * e - sqpi * *s * s.erf()];
    if kmax >= 0 {
        out.push(0.5 * sqpi * *s * s.erf());
    }
    let mut s2k = Jet2::constant(1.0, s.base());
    for k in 1..=kmax {
        s2k = s2k * *s * *s;
        let prev = out[k as usize];
        out.push(-0.5 * s2k * e + (2 * k - 1) as f64 / 2.0 * prev);
    }
    out
}

fn erf_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let (m, eps, gamma, h) = (p.int("m"), p.num("epsilon"), p.num("gamma"), p.h());
    Ok(analytic("erf_family", p, d, move |r, s| {
        let moments = erf_moments(s, m - 1);
        let r2 = *r * *r;
        let mut sum = eps * moments[0];
        for i in 0..=m {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sum += (gamma * sign * binom(m, i)) * r2.powi((m - i) as i32)? * moments[i as usize];
        }
        Ok(*s * h.eval(r)? - r2.exp() * sum)
    }))
}

fn artanh_domain(_: &Resolved) -> DomainSpec {
    DomainSpec::new(1.5, 4.0).with(Constraint::custom("r^2 - s^2 > 1.1", |r, s| r * r - s * s > 1.1))
}

fn artanh_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let (eps, gamma, h) = (p.num("epsilon"), p.num("gamma"), p.h());
    Ok(analytic("artanh_m0", p, d, move |r, s| {
        let t = *r * *r - *s * *s;
        let am = (*r * *r - 1.0).sqrt()?;
        let ap = (*r * *r + 1.0).sqrt()?;
        let v = t.arcoth()? - *s * s.div(&am)?.artanh()?.div(&am)? + *s * s.div(&ap)?.artanh()?.div(&ap)?;
        Ok(*s * h.eval(r)? + gamma * v + eps)
    }))
}

fn douglas_scalar_not_flat(_: &Resolved) -> Expected {
    (
        expect(&[
            ("douglas", Pass),
            ("scalar_flag", Pass),
            ("constant_flag", Fail),
            ("projectively_flat", Fail),
        ]),
        None,
    )
}

/// `φ = γr²√W/D² + γs²T/(D²√W) + ε√W/D` with `D = T − r²T̄`, `W = T − (r²−s²)T̄`.
fn corn1_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let (eps, gamma) = (p.num("epsilon"), p.num("gamma"));
    Ok(analytic("corn1", p, d, move |r, s| {
        let tt = (1.0 - *r * *r).recip()?;
        let tb = tt;
        let t = *r * *r - *s * *s;
        let dd = tt - *r * *r * tb;
        let w = tt - t * tb;
        let rw = w.sqrt()?;
        let d2 = dd * dd;
        Ok(gamma * (*r * *r * rw).div(&d2)? + gamma * (*s * *s * tt).div(&(d2 * rw))? + eps * rw.div(&dd)?)
    }))
}

fn corn2_g(p: &Resolved) -> GFunction {
    match p.choice("g") {
        ParamValue::Number(c) if c == 0.0 => GFunction::Zero,
        ParamValue::Number(c) => GFunction::Const { c },
        ParamValue::Name(n) => match n.as_str() {
            "zero" => GFunction::Zero,
            "inv_r_neg" => GFunction::InvRNeg,
            _ => GFunction::Const { c: 0.5 },
        },
    }
}

fn corn2_domain(p: &Resolved) -> DomainSpec {
    match corn2_g(p) {
        GFunction::Const { c } if c > 0.0 => DomainSpec::new(0.0, 0.99 / (2.0 * c).sqrt()),
        GFunction::InvRNeg => DomainSpec::new(0.2, 2.0),
        _ => DomainSpec::new(0.0, 2.0),
    }
}

fn corn2_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let (eps, h, g) = (p.num("epsilon"), p.h(), corn2_g(p));
    let pair = TransformPair::build(&g, (d.r_min.max(1e-3), d.r_max), 0.5 * (d.r_min + d.r_max), 1e-10)?;
    let mut prof = analytic("corn2", p, d, move |r, s| {
        let (tt, b) = pair.jets(&r.truncate(r.order())).map_err(|e| match e {
            FamilyError::Jet(j) => j,
            other => JetError::Domain {
                function: "transform",
                value: match other {
                    FamilyError::SingularIntegrand { r, .. } => r,
                    _ => f64::NAN,
                },
            },
        })?;
        let t = *r * *r - *s * *s;
        let dd = tt - *r * *r * b;
        let w = tt - t * b;
        let (r2, s2) = (*r * *r, *s * *s);
        let (r4, s4) = (r2 * r2, s2 * s2);
        let num = 8.0 * b * b * r4 * s4 + 12.0 * b * dd * r4 * s2 + 4.0 * b * dd * r2 * s4
            + dd * dd * (3.0 * r4 + 6.0 * r2 * s2 - s4);
        let den = 3.0 * dd * dd * dd * w.powf(1.5)?;
        Ok(*s * h.eval(r)? + num.div(&den)? + eps * w.sqrt()?.div(&dd)?)
    });
    prof.params.insert("g".into(), ParamValue::Name(corn2_g(p).describe()));
    Ok(prof)
}

fn corn2_expected(p: &Resolved) -> Expected {
    let flat = if corn2_g(p) == GFunction::Zero { Pass } else { Fail };
    (
        expect(&[
            ("douglas", Pass),
            ("scalar_flag", Pass),
            ("constant_flag", Fail),
            ("projectively_flat", flat),
        ]),
        None,
    )
}

fn exs1_domain(_: &Resolved) -> DomainSpec {
    DomainSpec::new(0.2, 2.0)
}

fn exs1_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let (c, h) = (p.num("c"), p.h());
    Ok(analytic("exs1", p, d, move |r, s| Ok(*s * h.eval(r)? + c * exs1_root(r, s)?)))
}

fn exs1_expected(p: &Resolved) -> Expected {
    let c = p.num("c");
    let k = match p.h() {
        HFunction::Zero => Some(-4.0 / (c * c)),
        HFunction::Exs1Special { .. } => Some(-1.0 / (c * c)),
        _ => None,
    };
    let mut e = expect(&[("douglas", Pass), ("scalar_flag", Pass), ("projectively_flat", Fail)]);
    e.insert("constant_flag".into(), if k.is_some() { Pass } else { Fail });
    (e, k)
}

fn example02_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let c = p.num("c");
    Ok(analytic("example02", p, d, move |r, s| Ok(c * exs1_root(r, s)?)))
}

fn constant_expected(k: f64) -> Expected {
    (
        expect(&[
            ("finsler_positive", Pass),
            ("douglas", Pass),
            ("scalar_flag", Pass),
            ("constant_flag", Pass),
            ("projectively_flat", Fail),
        ]),
        Some(k),
    )
}

fn example02_expected(p: &Resolved) -> Expected {
    let c = p.num("c");
    constant_expected(-4.0 / (c * c))
}

fn exs1_special_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let c = p.num("c");
    let h = HFunction::Exs1Special { c };
    Ok(analytic("exs1_special", p, d, move |r, s| Ok(*s * h.eval(r)? + c * exs1_root(r, s)?)))
}

fn exs1_special_expected(p: &Resolved) -> Expected {
    let c = p.num("c");
    constant_expected(-1.0 / (c * c))
}

fn g_minus2_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let (c, h) = (p.num("c"), p.h());
    Ok(analytic("g_minus2", p, d, move |r, s| {
        let t = *r * *r - *s * *s;
        let v = (1.0 + 4.0 * t).div(&(1.0 + 4.0 * *r * *r))?;
        Ok(*s * h.eval(r)? + c * v.sqrt()?)
    }))
}

fn douglas_scalar(_: &Resolved) -> Expected {
    (expect(&[("douglas", Pass), ("scalar_flag", Pass)]), None)
}

fn ex10_sqrt_jet(sign: f64, r: &Jet2, s: &Jet2) -> Result<Jet2, JetError> {
    let t = *r * *r - *s * *s;
    let a = 4.0 * *r + 1.0;
    let b = 2.0 * *r + 1.0;
    let root = (*r * (*r + 4.0 * t)).sqrt()?;
    let rad = a.recip()? + (sign * 4.0) * (root * *s).div(&(*r * b * a * a))?
        - (4.0 * (4.0 * *r * *r + 3.0 * *r + 1.0) * *s * *s).div(&(*r * b * b * a * a))?;
    rad.sqrt()
}

fn ex10_sqrt_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let sign = p.sign();
    Ok(analytic("ex10_sqrt", p, d, move |r, s| ex10_sqrt_jet(sign, r, s)))
}

fn ex10_expected(_: &Resolved) -> Expected {
    (
        expect(&[
            ("finsler_positive", Pass),
            ("douglas", Pass),
            ("scalar_flag", Pass),
            ("constant_flag", Pass),
        ]),
        Some(-1.0),
    )
}

/// Base point where the spray-data build is normalized to `ex10_sqrt`.
const EX10_BASE: (f64, f64) = (1.1, 0.55);

fn ex10_exp_build(p: &Resolved, d: DomainSpec) -> Result<MetricProfile, CatalogError> {
    let sign = p.sign();
    let opts = Theorem3Options {
        r_range: (d.r_min, d.r_max),
        r_base: Some(EX10_BASE.0),
        s_base_fraction: EX10_BASE.1 / EX10_BASE.0,
        ..Theorem3Options::default()
    };
    let built = build_theorem3_profile(&Theorem3Data::ex10(sign), &opts)?;
    let (rb, sb) = Jet2::lift_pair(EX10_BASE.0, EX10_BASE.1, 0);
    let lambda = ex10_sqrt_jet(sign, &rb, &sb).map_err(FamilyError::Jet)?.value();
    let inner = built.evaluator();
    let mut params = p.params();
    params.insert("normalization".into(), ParamValue::Number(lambda));
    Ok(MetricProfile::from_arc(
        "ex10_exp",
        params,
        built.domain.clone(),
        Provenance::Quadrature,
        Arc::new(move |r: &Jet2, s: &Jet2| Ok(lambda * inner(r, s)?)),
    ))
}

fn registry() -> Vec<EntryDef> {
    fn c_only() -> Vec<ParamSchema> {
        vec![p_c()]
    }
    fn sign_only() -> Vec<ParamSchema> {
        vec![p_sign()]
    }
    vec![
        EntryDef {
            id: "euclid",
            anchor: "Euclidean baseline, phi = 1; every curvature vanishes",
            provenance: Provenance::Analytic,
            params: no_params,
            domain: |_| DomainSpec::new(0.0, 10.0),
            grid_r_range: None,
            build: euclid_build,
            expected: all_pass,
        },
        EntryDef {
            id: "berwald",
            anchor: "projectively flat Berwald metric on the unit ball, K = 0",
            provenance: Provenance::Analytic,
            params: sign_only,
            domain: |_| ball(),
            grid_r_range: Some((0.05, 0.9)),
            build: berwald_build,
            expected: all_pass,
        },
        EntryDef {
            id: "ex001",
            anchor: "rational projectively flat metric on the unit ball from eta = u^3 + eps u, u = sqrt(x)/(1-x)^(3/2)",
            provenance: Provenance::Analytic,
            params: || vec![p_eps()],
            domain: |_| ball(),
            // φ ~ (1 − r²)⁻⁵; R2 roundoff reaches 1e-6 beyond r ≈ 0.87
            grid_r_range: Some((0.05, 0.85)),
            build: ex001_build,
            expected: pf_scalar,
        },
        EntryDef {
            id: "erf_family",
            anchor: "projectively flat erf family, eta = sqrt(x)(gamma x^m + eps) e^x, g = 0",
            provenance: Provenance::Analytic,
            params: || {
                vec![
                    ParamSchema {
                        name: "m",
                        kind: ParamKind::Integer {
                            default: 1,
                            min: 0,
                            max: 4,
                        },
                        description: "power of x in eta",
                    },
                    p_eps(),
                    p_gamma(),
                    p_h("zero"),
                ]
            },
            domain: |_| DomainSpec::new(0.1, 2.0),
            grid_r_range: None,
            build: erf_build,
            expected: pf_scalar,
        },
        EntryDef {
            id: "artanh_m0",
            anchor: "artanh family with m = 0 outside the unit ball, eta = sqrt(x)(gamma artanh x + eps)",
            provenance: Provenance::Analytic,
            // ε = 1 leaves φ negative near r² − s² = 1.1
            params: || vec![p_eps_default(10.0), p_gamma(), p_h("zero")],
            domain: artanh_domain,
            grid_r_range: None,
            build: artanh_build,
            expected: pf_scalar,
        },
        EntryDef {
            id: "corn1",
            anchor: "non-projectively-flat Douglas metric with g = 1/2, T = Tbar = 1/(1-r^2)",
            provenance: Provenance::Analytic,
            params: || vec![p_eps(), p_gamma()],
            domain: |_| ball(),
            grid_r_range: Some((0.05, 0.9)),
            build: corn1_build,
            expected: douglas_scalar_not_flat,
        },
        EntryDef {
            id: "corn2",
            anchor: "Douglas family with eta = sqrt(x)(x^2 + eps) and selectable g",
            provenance: Provenance::Analytic,
            params: || {
                vec![
                    ParamSchema {
                        name: "g",
                        kind: ParamKind::Choice {
                            default: "half",
                            options: &["half", "zero", "inv_r_neg"],
                            allow_number: true,
                        },
                        description: "Douglas generator g(r): a name or a constant",
                    },
                    p_eps(),
                    p_h("zero"),
                ]
            },
            domain: corn2_domain,
            grid_r_range: None,
            build: corn2_build,
            expected: corn2_expected,
        },
        EntryDef {
            id: "exs1",
            anchor: "phi = h(r) s + c sqrt(r(r + 4(r^2-s^2)))/(r(1+4r)), g = -1/r",
            provenance: Provenance::Analytic,
            params: || vec![p_h("one"), p_c()],
            domain: exs1_domain,
            grid_r_range: None,
            build: exs1_build,
            expected: exs1_expected,
        },
        EntryDef {
            id: "example02",
            anchor: "exs1 shape with h = 0: constant flag curvature K = -4/c^2",
            provenance: Provenance::Analytic,
            params: c_only,
            domain: exs1_domain,
            grid_r_range: None,
            build: example02_build,
            expected: example02_expected,
        },
        EntryDef {
            id: "exs1_special",
            anchor: "exs1 shape with h = 2c/((1+2r)(1+4r)): constant flag curvature K = -1/c^2",
            provenance: Provenance::Analytic,
            params: c_only,
            domain: exs1_domain,
            grid_r_range: None,
            build: exs1_special_build,
            expected: exs1_special_expected,
        },
        EntryDef {
            id: "g_minus2",
            anchor: "g = -2 example read as phi = h s + c sqrt((1 + 4(r^2-s^2))/(1 + 4r^2))",
            provenance: Provenance::Analytic,
            params: || vec![p_h("zero"), p_c()],
            domain: |_| DomainSpec::new(0.1, 2.0),
            grid_r_range: None,
            build: g_minus2_build,
            expected: douglas_scalar,
        },
        EntryDef {
            id: "ex10_sqrt",
            anchor: "square-root closed form of the metric recovered from exs1 spray data, K = -1",
            provenance: Provenance::Analytic,
            params: sign_only,
            domain: exs1_domain,
            grid_r_range: None,
            build: ex10_sqrt_build,
            expected: ex10_expected,
        },
        EntryDef {
            id: "ex10_exp",
            anchor: "the same metric built by path integration from (P, Q), normalized at (r, s) = (1.1, 0.55)",
            provenance: Provenance::Quadrature,
            params: sign_only,
            domain: exs1_domain,
            grid_r_range: None,
            build: ex10_exp_build,
            expected: ex10_expected,
        },
    ]
}

fn find(id: &str) -> Result<EntryDef, CatalogError> {
    registry()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| CatalogError::UnknownEntry(id.into()))
}

fn resolve(def: &EntryDef, raw: &BTreeMap<String, String>) -> Result<Resolved, CatalogError> {
    let schema = (def.params)();
    for k in raw.keys() {
        if !schema.iter().any(|p| p.name == k) {
            return Err(CatalogError::UnknownParam {
                entry: def.id.into(),
                param: k.clone(),
            });
        }
    }
    let mut out = BTreeMap::new();
    for p in &schema {
        let v = match raw.get(p.name) {
            Some(s) => p.parse(s)?,
            None => p.default_value(),
        };
        out.insert(p.name.to_string(), v);
    }
    Ok(Resolved(out))
}

/// Ids of all entries, in manifest order.
pub fn ids() -> Vec<&'static str> {
    registry().iter().map(|e| e.id).collect()
}

/// Resolve an entry with the given (string) parameters; missing ones take defaults.
pub fn get(id: &str, params: &BTreeMap<String, String>) -> Result<CatalogEntry, CatalogError> {
    let def = find(id)?;
    let res = resolve(&def, params)?;
    let domain = (def.domain)(&res);
    let mut grid = GridSpec::default();
    if let Some((a, b)) = def.grid_r_range {
        grid = grid.with_r_range(a, b);
    }
    let profile = (def.build)(&res, domain)?;
    let (expected, expected_k) = (def.expected)(&res);
    debug_assert!(expected.keys().all(|k| VERDICTS.contains(&k.as_str())));
    Ok(CatalogEntry {
        id: def.id.into(),
        anchor: def.anchor.into(),
        profile,
        expected,
        expected_k,
        grid,
    })
}

/// Entry with default parameters.
pub fn get_default(id: &str) -> Result<CatalogEntry, CatalogError> {
    get(id, &BTreeMap::new())
}

pub fn list() -> Vec<EntryDescriptor> {
    registry()
        .into_iter()
        .map(|def| {
            let res = resolve(&def, &BTreeMap::new()).expect("defaults are valid");
            let d = (def.domain)(&res);
            let (expected, expected_k) = (def.expected)(&res);
            EntryDescriptor {
                id: def.id,
                anchor: def.anchor,
                provenance: def.provenance,
                params: (def.params)(),
                domain: DomainDescription {
                    r_min: d.r_min,
                    r_max: d.r_max,
                    constraints: d.describe(),
                },
                expected,
                expected_k,
            }
        })
        .collect()
}

pub fn manifest_json() -> String {
    crate::report::to_json(&list())
}

pub fn manifest_csv() -> String {
    let mut out = String::from("id,provenance,r_min,r_max,params,expected,anchor\n");
    for d in list() {
        let params: Vec<String> = d
            .params
            .iter()
            .map(|p| format!("{}={}", p.name, p.default_value()))
            .collect();
        let expected: Vec<String> = d
            .expected
            .iter()
            .map(|(k, v)| format!("{k}={}", v.as_str()))
            .collect();
        let prov = match d.provenance {
            Provenance::Analytic => "analytic",
            Provenance::Quadrature => "quadrature",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            d.id,
            prov,
            d.domain.r_min,
            d.domain.r_max,
            csv_cell(&params.join(";")),
            csv_cell(&expected.join(";")),
            csv_cell(d.anchor)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::builds::gauge_free_combination;
    use crate::families::generators::EtaFunction;

    fn params(kv: &[(&str, &str)]) -> BTreeMap<String, String> {
        kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn listing() {
        let l = list();
        assert!(l.len() >= 12);
        assert!(l.iter().any(|d| d.id == "example02"));
        assert!(l.iter().all(|d| !d.anchor.is_empty()));
        assert!(manifest_csv().lines().count() == l.len() + 1);
    }

    #[test]
    fn param_errors() {
        assert!(matches!(get_default("nope"), Err(CatalogError::UnknownEntry(_))));
        assert!(matches!(
            get("example02", &params(&[("c", "-1")])),
            Err(CatalogError::ParamOutOfRange { .. })
        ));
        assert!(matches!(
            get("example02", &params(&[("zz", "1")])),
            Err(CatalogError::UnknownParam { .. })
        ));
        assert!(matches!(
            get("berwald", &params(&[("sign", "sideways")])),
            Err(CatalogError::InvalidParam { .. })
        ));
    }

    /// `√(r²−s²)(φ − sφ_s)` against `η` of the invariant, at a few points.
    fn check_eta(entry: &CatalogEntry, eta: impl Fn(f64) -> f64, inv: impl Fn(f64, f64) -> f64) {
        let pts = entry.grid_points();
        assert!(!pts.is_empty());
        for at in pts.iter().step_by(37) {
            let lhs = gauge_free_combination(&entry.profile, at.r, at.s).unwrap();
            let rhs = eta(inv(at.r, at.s));
            assert!(
                (lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0),
                "{}: {lhs} vs {rhs} at {at:?}",
                entry.id
            );
        }
    }

    fn eta_fn(e: EtaFunction) -> impl Fn(f64) -> f64 {
        move |x| e.value(x).unwrap()
    }

    fn t(r: f64, s: f64) -> f64 {
        r * r - s * s
    }

    #[test]
    fn projectively_flat_entries_match_their_eta() {
        check_eta(&get_default("ex001").unwrap(), eta_fn(EtaFunction::Ex001 { epsilon: 1.0 }), t);
        for m in 0..3 {
            let e = get(
                "erf_family",
                &params(&[("m", &m.to_string()), ("gamma", "0.7"), ("epsilon", "1.3")]),
            )
            .unwrap();
            let eta = EtaFunction::ErfFamily {
                m,
                epsilon: 1.3,
                gamma: 0.7,
            };
            check_eta(&e, eta_fn(eta), t);
        }
        let eta = EtaFunction::ArtanhFamily {
            m: 0,
            epsilon: 10.0,
            gamma: 1.0,
        };
        check_eta(&get_default("artanh_m0").unwrap(), eta_fn(eta), t);
    }

    #[test]
    fn douglas_entries_match_their_eta() {
        // g = 1/2 with T = T̄ = 1/(1 − r²): the invariant is t(1 − r²)/(1 − t)
        let half = |r: f64, s: f64| t(r, s) * (1.0 - r * r) / (1.0 - t(r, s));
        let e = get("corn1", &params(&[("gamma", "0.5"), ("epsilon", "2")])).unwrap();
        check_eta(&e, |x: f64| x.sqrt() * (0.5 * x + 2.0), half);
        let e = get("corn2", &params(&[("epsilon", "0.3")])).unwrap();
        check_eta(&e, |x: f64| x.sqrt() * (x * x + 0.3), half);
        // g = −1/r: T = 1, T̄ = −4/r
        let inv = |r: f64, s: f64| t(r, s) / (1.0 + 4.0 * t(r, s) / r);
        let e = get("corn2", &params(&[("g", "inv_r_neg"), ("h", "one")])).unwrap();
        check_eta(&e, |x: f64| x.sqrt() * (x * x + 1.0), inv);
        let e = get("exs1", &params(&[("c", "2")])).unwrap();
        check_eta(&e, |x: f64| 2.0 * x.sqrt(), inv);
    }

    #[test]
    fn ex10_closed_form_is_real_on_domain() {
        for sign in ["plus", "minus"] {
            let e = get("ex10_sqrt", &params(&[("sign", sign)])).unwrap();
            for at in e.grid_points() {
                assert!(e.profile.phi(at).unwrap() > 0.0);
            }
        }
    }
}
