//! Curvature functionals R1–R4, flag curvature and grid classification.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jets::{Jet2, Var};
use crate::metric::{
    group_lines, to_rs, MetricProfile, Params, PositivityReport, Provenance, RsPoint,
};
use crate::report::SCHEMA_VERSION;
use crate::spray::{p_from_phi, q_from_phi, spray_data, SprayData, SprayError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("Douglas fit on r = {r} needs at least 4 distinct s values, got {got}")]
    InsufficientPoints { r: f64, got: usize },
    #[error(transparent)]
    Spray(#[from] SprayError),
}

/// `R1 = P² − (sP_r + rP_s)/r + 2Q[1 + sP + (r²−s²)P_s]` as a jet of order 1.
pub fn compute_r1(sd: &SprayData) -> Jet2 {
    let base = sd.p.base();
    let r = Jet2::variable(Var::R, base);
    let s = Jet2::variable(Var::S, base);
    let p = sd.p;
    let q = sd.q;
    let pr = p.d_r();
    let ps = p.d_s();
    let t = r * r - s * s;
    let inv_r = r.recip().expect("spray data has r > 0");
    p * p - (s * pr + r * ps) * inv_r + 2.0 * q * (1.0 + s * p + t * ps)
}

pub fn compute_r2(sd: &SprayData) -> f64 {
    r2_from_q(&sd.q, sd.at)
}

/// R2 needs only the Q jet (order ≥ 2), so it is defined wherever Q is.
pub fn r2_from_q(q: &Jet2, at: RsPoint) -> f64 {
    let (r, s) = (at.r, at.s);
    let t = at.t();
    let (q0, qr, qs) = (q.value(), q.partial(1, 0), q.partial(0, 1));
    let (qrs, qss) = (q.partial(1, 1), q.partial(0, 2));
    2.0 * q0 * (2.0 * q0 - s * qs) + (2.0 * qr - s * qrs - r * qss) / r + t * (2.0 * q0 * qss - qs * qs)
}

pub fn compute_r3(sd: &SprayData) -> f64 {
    let (r, s) = (sd.at.r, sd.at.s);
    let t = sd.at.t();
    let q0 = sd.q.value();
    let p = &sd.p;
    let (p0, pr, ps) = (p.value(), p.partial(1, 0), p.partial(0, 1));
    let (prs, pss) = (p.partial(1, 1), p.partial(0, 2));
    ((t * 2.0 * q0 - 1.0) * r * pss - s * prs + pr + r * 2.0 * q0 * (p0 - s * ps)) / r
}

/// `R4 = ½(3R3 − ∂_s R1)` from the spray jets.
pub fn r4_from(sd: &SprayData) -> f64 {
    0.5 * (3.0 * compute_r3(sd) - compute_r1(sd).partial(0, 1))
}

pub fn compute_r4(profile: &MetricProfile, at: RsPoint) -> Result<f64, SprayError> {
    Ok(r4_from(&spray_data(profile, at)?))
}

pub fn flag_curvature(profile: &MetricProfile, at: RsPoint) -> Result<f64, SprayError> {
    let sd = spray_data(profile, at)?;
    let phi = sd.phi.value();
    Ok(compute_r1(&sd).value() / (phi * phi))
}

/// `(r²−s²)^{3/2}(Q_s − sQ_ss)`.
pub fn qss_from(q: &Jet2, at: RsPoint) -> f64 {
    at.t().powf(1.5) * (q.partial(0, 1) - at.s * q.partial(0, 2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureSample {
    pub at: RsPoint,
    pub phi: f64,
    pub q: f64,
    pub p: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub k: f64,
}

pub fn curvature_sample(profile: &MetricProfile, at: RsPoint) -> Result<CurvatureSample, SprayError> {
    let sd = spray_data(profile, at)?;
    Ok(sample_from(&sd))
}

pub fn sample_from(sd: &SprayData) -> CurvatureSample {
    let r1 = compute_r1(sd);
    let phi = sd.phi.value();
    let r3 = compute_r3(sd);
    CurvatureSample {
        at: sd.at,
        phi,
        q: sd.q.value(),
        p: sd.p.value(),
        r1: r1.value(),
        r2: compute_r2(sd),
        r3,
        r4: 0.5 * (3.0 * r3 - r1.partial(0, 1)),
        k: r1.value() / (phi * phi),
    }
}

/// Least-squares fit `Q ≈ ĝ + ŝ²f̂/2` on one r-line.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DouglasFit {
    pub r: f64,
    pub g_hat: f64,
    pub f_hat: f64,
    pub residual: f64,
    pub q_max: f64,
    /// `(2g′ + 4rg²)/(r − 2r³g)` with `g′` from neighbouring lines.
    pub f_predicted: Option<f64>,
}

/// Fit from `(s, Q)` samples.
pub fn fit_line(r: f64, samples: &[(f64, f64)]) -> Result<DouglasFit, CurvatureError> {
    let mut distinct: Vec<f64> = samples.iter().map(|p| p.0).collect();
    distinct.sort_by(|a, b| a.total_cmp(b));
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(CurvatureError::InsufficientPoints {
            r,
            got: distinct.len(),
        });
    }
    let n = samples.len() as f64;
    let (mut sz, mut szz, mut sq, mut szq) = (0.0, 0.0, 0.0, 0.0);
    for &(s, q) in samples {
        let z = 0.5 * s * s;
        sz += z;
        szz += z * z;
        sq += q;
        szq += z * q;
    }
    let det = n * szz - sz * sz;
    let (g, f) = if det.abs() > 0.0 {
        ((szz * sq - sz * szq) / det, (n * szq - sz * sq) / det)
    } else {
        (sq / n, 0.0)
    };
    let mut residual = 0.0f64;
    let mut q_max = 0.0f64;
    for &(s, q) in samples {
        residual = residual.max((q - g - 0.5 * s * s * f).abs());
        q_max = q_max.max(q.abs());
    }
    Ok(DouglasFit {
        r,
        g_hat: g,
        f_hat: f,
        residual,
        q_max,
        f_predicted: None,
    })
}

pub fn douglas_fit(profile: &MetricProfile, r: f64, s_line: &[f64]) -> Result<DouglasFit, CurvatureError> {
    let samples = s_line
        .iter()
        .map(|&s| {
            let at = RsPoint::new(r, s).map_err(SprayError::from)?;
            let phi = profile.jet(at, 2).map_err(SprayError::from)?;
            Ok((s, q_from_phi(&phi, at)?.value()))
        })
        .collect::<Result<Vec<_>, CurvatureError>>()?;
    fit_line(r, &samples)
}

/// Derivative at `x` of the quadratic through three points.
fn lagrange_d1(xs: [f64; 3], ys: [f64; 3], x: f64) -> f64 {
    let [a, b, c] = xs;
    ys[0] * ((x - b) + (x - c)) / ((a - b) * (a - c))
        + ys[1] * ((x - a) + (x - c)) / ((b - a) * (b - c))
        + ys[2] * ((x - a) + (x - b)) / ((c - a) * (c - b))
}

/// Fill `f_predicted` from finite differences of `ĝ` across lines.
pub fn predict_f(fits: &mut [DouglasFit]) {
    let n = fits.len();
    if n < 2 {
        return;
    }
    let rs: Vec<f64> = fits.iter().map(|f| f.r).collect();
    let gs: Vec<f64> = fits.iter().map(|f| f.g_hat).collect();
    for i in 0..n {
        let gp = if n == 2 {
            (gs[1] - gs[0]) / (rs[1] - rs[0])
        } else {
            let j = i.clamp(1, n - 2);
            lagrange_d1([rs[j - 1], rs[j], rs[j + 1]], [gs[j - 1], gs[j], gs[j + 1]], rs[i])
        };
        let (r, g) = (rs[i], gs[i]);
        let den = r - 2.0 * r * r * r * g;
        fits[i].f_predicted = if den.abs() > 1e-12 {
            Some((2.0 * gp + 4.0 * r * g * g) / den)
        } else {
            None
        };
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }

    fn combine(items: &[Status]) -> Status {
        if items.contains(&Status::Fail) {
            Status::Fail
        } else if items.contains(&Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    }
}

/// Pass below `tol`, inconclusive up to `max(100·tol, 1e-4)` or when points
/// are missing, fail above.
pub fn threshold_status(residual: f64, tol: f64, incomplete: bool) -> Status {
    if !residual.is_finite() {
        return Status::Inconclusive;
    }
    if residual < tol {
        if incomplete {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    } else if residual < (100.0 * tol).max(1e-4) {
        Status::Inconclusive
    } else {
        Status::Fail
    }
}

/// Classification thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Bound on max |R2|.
    pub scalar: f64,
    /// Bound on max |R3|.
    pub constant: f64,
    /// Bound on the spread of K.
    pub k_spread: f64,
    /// Relative Douglas residual bound (scaled by max(1, |Q|∞)).
    pub douglas: f64,
    /// Bound on |ĝ|, |f̂| for projective flatness.
    pub flat: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::analytic()
    }
}

impl Tolerances {
    pub fn analytic() -> Self {
        Tolerances {
            scalar: 1e-6,
            constant: 1e-6,
            k_spread: 1e-6,
            douglas: 1e-8,
            flat: 1e-8,
        }
    }

    pub fn quadrature() -> Self {
        Tolerances {
            scalar: 1e-3,
            constant: 1e-3,
            k_spread: 1e-3,
            ..Self::analytic()
        }
    }

    pub fn for_provenance(p: Provenance) -> Self {
        match p {
            Provenance::Analytic => Self::analytic(),
            Provenance::Quadrature => Self::quadrature(),
        }
    }

    /// Every tolerance must be at least 1e-14.
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("scalar", self.scalar),
            ("constant", self.constant),
            ("k_spread", self.k_spread),
            ("douglas", self.douglas),
            ("flat", self.flat),
        ] {
            if !(v >= 1e-14) || !v.is_finite() {
                return Err(format!("tolerance {name} = {v:e} must be a finite value >= 1e-14"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KStats {
    pub mean: f64,
    /// `max |K − mean|`.
    pub spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridDescription {
    pub points: usize,
    pub r_lines: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub failed_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub schema: u32,
    pub name: String,
    pub params: Params,
    pub provenance: Provenance,
    pub grid: GridDescription,
    pub verdicts: Vec<Verdict>,
    pub residuals: BTreeMap<String, f64>,
    /// Present only when the constant-curvature verdict passes.
    #[serde(rename = "K")]
    pub k: Option<KStats>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub k_observed: Option<KStats>,
    #[serde(skip)]
    pub douglas: Vec<DouglasFit>,
    #[serde(skip)]
    pub positivity: PositivityReport,
    #[serde(skip)]
    pub samples: Vec<PointEval>,
}

impl ClassificationReport {
    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn status(&self, name: &str) -> Option<Status> {
        self.verdict(name).map(|v| v.status)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.get(name).copied()
    }
}

pub const VERDICTS: [&str; 5] = [
    "finsler_positive",
    "douglas",
    "scalar_flag",
    "constant_flag",
    "projectively_flat",
];

/// Everything computed at one grid point. Later stages are `None` when an
/// earlier one failed.
#[derive(Clone, Debug, PartialEq)]
pub struct PointEval {
    pub at: RsPoint,
    pub margins: Option<[f64; 3]>,
    pub q: Option<f64>,
    pub r2: Option<f64>,
    pub qss: Option<f64>,
    pub sample: Option<CurvatureSample>,
    pub error: Option<String>,
}

pub fn eval_point(profile: &MetricProfile, at: RsPoint) -> PointEval {
    let mut out = PointEval {
        at,
        margins: None,
        q: None,
        r2: None,
        qss: None,
        sample: None,
        error: None,
    };
    let phi = match profile.jet(at, 4) {
        Ok(j) => j,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    let m0 = phi.value();
    let m1 = m0 - at.s * phi.partial(0, 1);
    out.margins = Some([m0, m1, m1 + at.t() * phi.partial(0, 2)]);
    let q = match q_from_phi(&phi, at) {
        Ok(q) => q,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    out.q = Some(q.value());
    out.qss = Some(qss_from(&q, at));
    match p_from_phi(&phi, &q, at) {
        Ok(p) => {
            let sd = SprayData { at, phi, q, p };
            let smp = sample_from(&sd);
            out.r2 = Some(smp.r2);
            out.sample = Some(smp);
        }
        Err(e) => {
            out.r2 = Some(r2_from_q(&q, at));
            out.error = Some(e.to_string());
        }
    }
    out
}

fn max_abs(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

/// Classify on the given points (r-major) with default tolerances for the
/// profile's provenance.
pub fn classify(profile: &MetricProfile, grid: &[RsPoint]) -> ClassificationReport {
    classify_with(profile, grid, &Tolerances::for_provenance(profile.provenance))
}

pub fn classify_with(profile: &MetricProfile, grid: &[RsPoint], tol: &Tolerances) -> ClassificationReport {
    let evals: Vec<PointEval> = grid.par_iter().map(|&at| eval_point(profile, at)).collect();
    assemble_report(profile, evals, tol)
}

pub fn assemble_report(profile: &MetricProfile, evals: Vec<PointEval>, tol: &Tolerances) -> ClassificationReport {
    let n = evals.len();
    let mut notes: Vec<String> = Vec::new();
    let errors: Vec<String> = evals
        .iter()
        .filter_map(|e| e.error.as_ref().map(|m| m.clone()))
        .collect();
    let failed_points = errors.len();
    if failed_points > 0 {
        notes.push(format!("{failed_points} of {n} points failed; first: {}", errors[0]));
    }

    // positivity
    let pos_samples = evals
        .iter()
        .map(|e| match e.margins {
            Some(m) => Ok((e.at, m.to_vec())),
            None => Err(e.error.clone().unwrap_or_default()),
        })
        .collect();
    let positivity = PositivityReport::from_samples(&["m0", "m1", "m2"], pos_samples);
    let min_margin = positivity
        .margins
        .iter()
        .map(|m| m.min)
        .fold(f64::INFINITY, f64::min);
    let pos_status = if positivity.points == 0 {
        Status::Inconclusive
    } else if !positivity.violations.is_empty() {
        Status::Fail
    } else if !positivity.failed_points.is_empty() {
        Status::Inconclusive
    } else {
        Status::Pass
    };

    // Douglas fits per r-line
    let points: Vec<RsPoint> = evals.iter().map(|e| e.at).collect();
    let mut fits = Vec::new();
    let mut q_missing = false;
    let mut idx = 0;
    for (r, ss) in group_lines(&points) {
        let line = &evals[idx..idx + ss.len()];
        idx += ss.len();
        let samples: Vec<(f64, f64)> = line.iter().filter_map(|e| e.q.map(|q| (e.at.s, q))).collect();
        if samples.len() < line.len() {
            q_missing = true;
        }
        match fit_line(r, &samples) {
            Ok(f) => fits.push(f),
            Err(e) => {
                q_missing = true;
                notes.push(e.to_string());
            }
        }
    }
    predict_f(&mut fits);
    let q_inf = evals.iter().filter_map(|e| e.q).fold(0.0f64, |m, q| m.max(q.abs()));
    let douglas_res = max_abs(fits.iter().map(|f| f.residual));
    let douglas_tol = tol.douglas * q_inf.max(1.0);
    let douglas_status = if fits.is_empty() {
        Status::Inconclusive
    } else {
        threshold_status(douglas_res, douglas_tol, q_missing)
    };
    let flat_res = max_abs(fits.iter().flat_map(|f| [f.g_hat, f.f_hat]));
    let flat_status = Status::combine(&[douglas_status, threshold_status(flat_res, tol.flat, q_missing)]);
    let f_consistency = max_abs(
        fits.iter()
            .filter_map(|f| f.f_predicted.map(|p| (p - f.f_hat) / f.f_hat.abs().max(1.0))),
    );

    // scalar / constant
    let r2_vals: Vec<f64> = evals.iter().filter_map(|e| e.r2).collect();
    let r2_missing = r2_vals.len() < n;
    let r2_max = max_abs(r2_vals.iter().copied());
    let scalar_status = if r2_vals.is_empty() {
        Status::Inconclusive
    } else {
        threshold_status(r2_max, tol.scalar, r2_missing)
    };
    let samples: Vec<&CurvatureSample> = evals.iter().filter_map(|e| e.sample.as_ref()).collect();
    let full_missing = samples.len() < n;
    let r3_max = max_abs(samples.iter().map(|s| s.r3));
    let r4_max = max_abs(samples.iter().map(|s| s.r4));
    let k_observed = if samples.is_empty() {
        None
    } else {
        let mean = samples.iter().map(|s| s.k).sum::<f64>() / samples.len() as f64;
        let spread = max_abs(samples.iter().map(|s| s.k - mean));
        Some(KStats { mean, spread })
    };
    let const_status = match k_observed {
        None => Status::Inconclusive,
        Some(ks) => Status::combine(&[
            scalar_status,
            threshold_status(r3_max, tol.constant, full_missing),
            threshold_status(ks.spread, tol.k_spread, full_missing),
        ]),
    };
    let qss_vals: Vec<f64> = evals.iter().filter_map(|e| e.qss).collect();

    let mut residuals = BTreeMap::new();
    residuals.insert("douglas_max".to_string(), douglas_res);
    residuals.insert("flat_max".to_string(), flat_res);
    residuals.insert("f_consistency_max".to_string(), f_consistency);
    residuals.insert("q_max".to_string(), q_inf);
    residuals.insert("r2_max".to_string(), r2_max);
    residuals.insert("r3_max".to_string(), r3_max);
    residuals.insert("r4_max".to_string(), r4_max);
    residuals.insert("min_margin".to_string(), min_margin);
    if !qss_vals.is_empty() {
        let lo = qss_vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = qss_vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        residuals.insert("qss_min".to_string(), lo);
        residuals.insert("qss_max".to_string(), hi);
    }
    if let Some(ks) = k_observed {
        residuals.insert("k_mean".to_string(), ks.mean);
        residuals.insert("k_spread".to_string(), ks.spread);
    }

    let verdicts = vec![
        Verdict {
            name: VERDICTS[0].into(),
            status: pos_status,
            residual: min_margin,
            tolerance: 0.0,
        },
        Verdict {
            name: VERDICTS[1].into(),
            status: douglas_status,
            residual: douglas_res,
            tolerance: douglas_tol,
        },
        Verdict {
            name: VERDICTS[2].into(),
            status: scalar_status,
            residual: r2_max,
            tolerance: tol.scalar,
        },
        Verdict {
            name: VERDICTS[3].into(),
            status: const_status,
            residual: r3_max,
            tolerance: tol.constant,
        },
        Verdict {
            name: VERDICTS[4].into(),
            status: flat_status,
            residual: flat_res,
            tolerance: tol.flat,
        },
    ];
    let (r_min, r_max) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
        (a.min(p.r), b.max(p.r))
    });
    ClassificationReport {
        schema: SCHEMA_VERSION,
        name: profile.name.clone(),
        params: profile.params.clone(),
        provenance: profile.provenance,
        grid: GridDescription {
            points: n,
            r_lines: fits.len(),
            r_min,
            r_max,
            failed_points,
        },
        verdicts,
        residuals,
        k: if const_status == Status::Pass { k_observed } else { None },
        notes,
        k_observed,
        douglas: fits,
        positivity,
        samples: evals,
    }
}

/// `Rⁱⱼ = R1(|y|²δ − y⊗y) + |y|R2 xⁱ(|y|xʲ − s yʲ) + R4 yⁱ(|y|xʲ − s yʲ)`.
pub fn riemann_assemble(profile: &MetricProfile, x: &[f64], y: &[f64]) -> Result<Vec<Vec<f64>>, SprayError> {
    let at = to_rs(x, y)?;
    profile.domain.check(at)?;
    let sd = spray_data(profile, at)?;
    let r1 = compute_r1(&sd);
    let (r1v, r2, r4) = (r1.value(), compute_r2(&sd), 0.5 * (3.0 * compute_r3(&sd) - r1.partial(0, 1)));
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let n = x.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            let w = ny * x[j] - at.s * y[j];
            m[i][j] = r1v * (ny * ny * delta - y[i] * y[j]) + ny * r2 * x[i] * w + r4 * y[i] * w;
        }
    }
    Ok(m)
}
