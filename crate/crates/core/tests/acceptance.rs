//! The acceptance criteria, one PASS/FAIL line each. The test fails if any
//! criterion fails; every criterion still runs and reports.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use finslerlab::catalog::{self, CatalogEntry};
use finslerlab::curvature::{curvature_sample, qss_from, r2_from_q, Tolerances};
use finslerlab::families::{
    build_profile, build_theorem3_profile, characteristic_flow, cond_u_residual, gauge_free_combination,
    kappa_relation, transport_invariant, EtaFunction, FamilyKind, FamilySpec, GFunction, HFunction,
    Theorem3Data, Theorem3Options, TransformPair,
};
use finslerlab::metric::{GridSpec, MetricProfile, RsPoint};
use finslerlab::spray::{compute_q, integrate_geodesic, straightness_deviation, SprayError};
use finslerlab::curvature::classify_with;
use finslerlab::Status;
use rand::{rngs::StdRng, Rng, SeedableRng};
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn params(kv: &[(&str, &str)]) -> BTreeMap<String, String> {
    kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn entry(id: &str, kv: &[(&str, &str)]) -> Result<CatalogEntry, String> {
    catalog::get(id, &params(kv)).map_err(|e| format!("{id}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, budget: Duration, what: &str) -> Result<Duration, String> {
    let el = start.elapsed();
    ensure(el < budget, || format!("{what} took {el:.2?}, budget {budget:?}"))?;
    Ok(el)
}

/// Per-point |K − k|, max |R2|, max |R3| over an entry's default grid.
fn constant_k_check(e: &CatalogEntry, k: f64) -> Result<String, String> {
    let pts = e.grid_points();
    let samples: Vec<_> = pts
        .par_iter()
        .map(|&at| curvature_sample(&e.profile, at).map_err(|err| format!("{at:?}: {err}")))
        .collect::<Result<_, _>>()?;
    let dk = samples.iter().map(|c| (c.k - k).abs()).fold(0.0, f64::max);
    let r2 = samples.iter().map(|c| c.r2.abs()).fold(0.0, f64::max);
    let r3 = samples.iter().map(|c| c.r3.abs()).fold(0.0, f64::max);
    let mean = samples.iter().map(|c| c.k).sum::<f64>() / samples.len() as f64;
    ensure(dk < 1e-6 && r2 < 1e-6 && r3 < 1e-6, || {
        format!("{}: max|K-({k})| = {dk:e}, max|R2| = {r2:e}, max|R3| = {r3:e}", e.id)
    })?;
    Ok(format!("mean K = {mean:.9}, max|dK| = {dk:.1e}, max|R2| = {r2:.1e}, max|R3| = {r3:.1e}"))
}

fn grid_is_default(e: &CatalogEntry, r: (f64, f64)) -> Result<(), String> {
    let g = &e.grid;
    ensure(
        g.n_r == 24 && g.n_sigma == 24 && (g.sigma_max - 0.95).abs() < 1e-12 && (g.sigma_gap - 0.05).abs() < 1e-12,
        || format!("{}: unexpected grid {g:?}", e.id),
    )?;
    let dom = &e.profile.domain;
    let (a, b) = g.r_range.unwrap_or((dom.r_min, dom.r_max));
    ensure((a - r.0).abs() < 1e-12 && (b - r.1).abs() < 1e-12, || {
        format!("{}: r-range ({a}, {b}) instead of {r:?}", e.id)
    })
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let e = entry("example02", &[("c", "1")])?;
    grid_is_default(&e, (0.2, 2.0))?;
    let msg = constant_k_check(&e, -4.0)?;
    let el = within(start, Duration::from_secs(5), "example02")?;
    Ok(format!("{msg} in {el:.2?}"))
}

fn criterion2() -> Outcome {
    let start = Instant::now();
    let e = entry("exs1_special", &[("c", "1")])?;
    grid_is_default(&e, (0.2, 2.0))?;
    let msg = constant_k_check(&e, -1.0)?;
    let el = within(start, Duration::from_secs(5), "exs1_special")?;
    Ok(format!("{msg} in {el:.2?}"))
}

fn criterion3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20240611);
    let mut worst_k = 0.0f64;
    let mut worst_dev = 0.0f64;
    for sign in ["plus", "minus"] {
        let e = entry("berwald", &[("sign", sign)])?;
        let (a, b) = e.grid.r_range.ok_or("berwald grid has no r-range")?;
        ensure((a - 0.05).abs() < 1e-12 && (b - 0.9).abs() < 1e-12, || format!("grid r-range ({a}, {b})"))?;
        for at in e.grid_points() {
            let c = curvature_sample(&e.profile, at).map_err(|err| err.to_string())?;
            worst_k = worst_k.max(c.k.abs());
        }
        let mut done = 0;
        while done < 20 {
            // interior start with |x| ≤ 0.5; short run keeps |x| < 0.9
            let x0: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.3..0.3)).collect();
            let y0: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let traj = integrate_geodesic(&e.profile, &x0, &y0, 0.2, 1e-3).map_err(|err| err.to_string())?;
            ensure(traj.states.len() > 20, || format!("trajectory from {x0:?} stopped at once: {:?}", traj.exit))?;
            worst_dev = worst_dev.max(straightness_deviation(&traj.states));
            done += 1;
        }
    }
    ensure(worst_k < 1e-6, || format!("max|K| = {worst_k:e}"))?;
    ensure(worst_dev < 1e-6, || format!("max straightness deviation {worst_dev:e}"))?;
    Ok(format!("max|K| = {worst_k:.1e}, max deviation over 40 geodesics = {worst_dev:.1e}"))
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let suite: Vec<(&str, Vec<(&str, &str)>)> = vec![
        ("ex001", vec![]),
        ("erf_family", vec![("m", "0")]),
        ("erf_family", vec![("m", "1")]),
        ("erf_family", vec![("m", "2")]),
        ("artanh_m0", vec![]),
        ("corn1", vec![]),
        ("corn2", vec![("g", "half")]),
        ("exs1", vec![]),
        ("g_minus2", vec![]),
    ];
    let mut lines = Vec::new();
    for (id, kv) in &suite {
        let e = entry(id, kv)?;
        let tol = Tolerances::for_provenance(e.profile.provenance).scalar;
        let bound = if tol > 1e-5 { 1e-3 } else { 1e-6 };
        // R2 needs only Q, not φ > 0, so every grid point is evaluated
        let r2 = e
            .grid_points()
            .par_iter()
            .map(|&at| compute_q(&e.profile, at).map(|q| r2_from_q(&q, at).abs()).map_err(|err| format!("{id}: {err}")))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .fold(0.0, f64::max);
        ensure(r2 < bound, || format!("{id} {kv:?}: max|R2| = {r2:e} >= {bound:e}"))?;
        lines.push(format!("{id}{}={r2:.0e}", kv.first().map_or(String::new(), |(k, v)| format!("[{k}={v}]"))));
    }
    let el = within(start, Duration::from_secs(30), "scalar suite")?;
    Ok(format!("{} in {el:.2?}", lines.join(" ")))
}

fn douglas_entries() -> Vec<(&'static str, Vec<(&'static str, &'static str)>)> {
    catalog::list()
        .into_iter()
        .filter(|d| d.expected.get("douglas") == Some(&Status::Pass))
        .map(|d| (d.id, vec![]))
        .chain([("corn2", vec![("g", "half")]), ("corn2", vec![("g", "inv_r_neg")])])
        .collect()
}

fn criterion5() -> Outcome {
    let mut worst = (0.0f64, String::new());
    let ids = douglas_entries();
    for (id, kv) in &ids {
        let e = entry(id, kv)?;
        let report = e.classify();
        ensure(!report.douglas.is_empty(), || format!("{id}: no Douglas fits"))?;
        for fit in &report.douglas {
            if fit.residual > worst.0 {
                worst = (fit.residual, id.to_string());
            }
        }
    }
    ensure(worst.0 < 1e-8, || format!("Douglas residual {:e} on {}", worst.0, worst.1))?;

    let mut spec = FamilySpec::new(FamilyKind::Theorem1);
    spec.k = 1.0;
    spec.r_range = (0.3, 1.5);
    let p = build_profile(&spec).map_err(|e| e.to_string())?;
    let grid = GridSpec::default().points(&p.domain);
    let report = classify_with(&p, &grid, &Tolerances::quadrature());
    let max_fit = report.douglas.iter().map(|f| f.residual).fold(0.0, f64::max);
    ensure(max_fit > 1e-3, || format!("theorem1 k=1 Douglas residual only {max_fit:e}"))?;
    let qss: Vec<f64> = grid
        .par_iter()
        .map(|&at| compute_q(&p, at).map(|q| qss_from(&q, at)).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let dev = qss.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    ensure(dev < 1e-6, || format!("qss deviates from 1 by {dev:e}"))?;
    Ok(format!(
        "{} Douglas entries max residual {:.1e}; k=1 build: max fit residual {max_fit:.2}, |qss-1| <= {dev:.1e}",
        ids.len(),
        worst.0
    ))
}

fn criterion6() -> Outcome {
    let flat = [
        ("euclid", vec![]),
        ("berwald", vec![("sign", "plus")]),
        ("berwald", vec![("sign", "minus")]),
        ("ex001", vec![]),
        ("erf_family", vec![("m", "0")]),
        ("erf_family", vec![("m", "1")]),
        ("erf_family", vec![("m", "2")]),
        ("artanh_m0", vec![]),
    ];
    let mut worst = 0.0f64;
    for (id, kv) in &flat {
        let e = entry(id, kv)?;
        let report = e.classify();
        for fit in &report.douglas {
            worst = worst.max(fit.g_hat.abs()).max(fit.f_hat.abs());
        }
        ensure(report.status("projectively_flat") == Some(Status::Pass), || {
            format!("{id}: projectively_flat = {:?}", report.status("projectively_flat"))
        })?;
    }
    ensure(worst < 1e-8, || format!("max |g_hat|, |f_hat| = {worst:e}"))?;
    for id in ["corn1", "example02"] {
        let s = entry(id, &[])?.classify().status("projectively_flat");
        ensure(s == Some(Status::Fail), || format!("{id}: projectively_flat = {s:?}"))?;
    }
    Ok(format!("g = 0 entries: max |g_hat|, |f_hat| = {worst:.1e}; corn1, example02 not flat"))
}

fn criterion7() -> Outcome {
    let mut worst_inv = 0.0f64;
    let mut worst_kappa = 0.0f64;
    let mut curves = 0;
    for k in [0.5, 1.0, 2.0] {
        let mut spec = FamilySpec::new(FamilyKind::Theorem1);
        spec.k = k;
        for i in 0..10 {
            let start = RsPoint::new(1.0, 0.05 + 0.07 * i as f64).map_err(|e| e.to_string())?;
            let v0 = transport_invariant(&spec, start).map_err(|e| e.to_string())?;
            let k0 = kappa_relation(k, start.r, start.s);
            let curve = characteristic_flow(&spec, start, 1.25, 2.5e-4).map_err(|e| e.to_string())?;
            ensure(curve.points.len() > 50, || format!("k={k}, start {start:?}: curve too short ({:?})", curve.exit))?;
            ensure(curve.flagged_steps.is_empty(), || format!("k={k}: arctan branch jump on curve {i}"))?;
            for p in &curve.points {
                let v = transport_invariant(&spec, *p).map_err(|e| e.to_string())?;
                worst_inv = worst_inv.max(((v - v0) / v0).abs());
                worst_kappa = worst_kappa.max((kappa_relation(k, p.r, p.s) - k0).abs());
            }
            curves += 1;
        }
    }
    ensure(worst_inv < 1e-6, || format!("invariant varies by {worst_inv:e} (relative)"))?;
    ensure(worst_kappa < 1e-6, || format!("kappa relation drifts by {worst_kappa:e}"))?;
    Ok(format!("{curves} curves: invariant drift {worst_inv:.1e}, kappa drift {worst_kappa:.1e}"))
}

fn criterion8() -> Outcome {
    let data = Theorem3Data::ex10(1.0);
    let opts = Theorem3Options::default();
    let dom = finslerlab::metric::DomainSpec::new(opts.r_range.0, opts.r_range.1);
    let grid = opts.grid.points(&dom);
    let worst = grid
        .iter()
        .map(|&at| cond_u_residual(&data, at).map(f64::abs))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(worst < 1e-4, || format!("condU residual {worst:e}"))?;
    let p = build_theorem3_profile(&data, &opts).map_err(|e| e.to_string())?;
    let mut tol = Tolerances::quadrature();
    tol.constant = 1e-3;
    let report = classify_with(&p, &grid, &tol);
    for v in ["finsler_positive", "constant_flag"] {
        ensure(report.status(v) == Some(Status::Pass), || format!("{v} = {:?}", report.status(v)))?;
    }
    let k = report.k.ok_or("no K statistics")?;
    Ok(format!("max condU residual {worst:.1e}; built profile positive, K = {:.6} (spread {:.1e})", k.mean, k.spread))
}

// ---------------------------------------------------------------- oracles

fn phi_value(p: &MetricProfile, r: f64, s: f64) -> f64 {
    p.jet_unchecked(RsPoint { r, s }, 0).map(|j| j.value()).unwrap_or(f64::NAN)
}

fn jet_partial(p: &MetricProfile, r: f64, s: f64, i: usize, j: usize) -> f64 {
    p.jet_unchecked(RsPoint { r, s }, i + j).map(|jt| jt.partial(i, j)).unwrap_or(f64::NAN)
}

/// Central difference of `f` along r (dir 0) or s (dir 1), with two levels of
/// Richardson extrapolation over the steps h, h/2, h/4.
fn richardson(f: impl Fn(f64, f64) -> f64, r: f64, s: f64, dir: usize, h: f64) -> f64 {
    let d = |h: f64| {
        let (dr, ds) = if dir == 0 { (h, 0.0) } else { (0.0, h) };
        (f(r + dr, s + ds) - f(r - dr, s - ds)) / (2.0 * h)
    };
    let (d0, d1, d2) = (d(h), d(0.5 * h), d(0.25 * h));
    let e1 = (4.0 * d1 - d0) / 3.0;
    let e2 = (4.0 * d2 - d1) / 3.0;
    (16.0 * e2 - e1) / 15.0
}

/// Second partials straight from values: 5-point stencils at h and h/2,
/// Richardson-combined.
fn value_second(p: &MetricProfile, r: f64, s: f64, i: usize, j: usize, h: f64) -> f64 {
    let f = |a: f64, b: f64| phi_value(p, a, b);
    let at_step = |h: f64| {
        let d2 = |dir: usize| {
            let e = |k: f64| if dir == 0 { f(r + k * h, s) } else { f(r, s + k * h) };
            (-e(2.0) + 16.0 * e(1.0) - 30.0 * e(0.0) + 16.0 * e(-1.0) - e(-2.0)) / (12.0 * h * h)
        };
        match (i, j) {
            (2, 0) => d2(0),
            (0, 2) => d2(1),
            _ => {
                let g = |a: f64| {
                    (-f(a, s + 2.0 * h) + 8.0 * f(a, s + h) - 8.0 * f(a, s - h) + f(a, s - 2.0 * h)) / (12.0 * h)
                };
                (-g(r + 2.0 * h) + 8.0 * g(r + h) - 8.0 * g(r - h) + g(r - 2.0 * h)) / (12.0 * h)
            }
        }
    };
    (16.0 * at_step(0.5 * h) - at_step(h)) / 15.0
}

/// Worst scaled discrepancy between jet partials and finite differences:
/// orders 1–2 from values, orders 3–4 by differencing the next-lower jet partial.
fn jet_vs_fd(p: &MetricProfile, at: RsPoint) -> (f64, f64) {
    let h = 1e-3;
    let full = match p.jet(at, 4) {
        Ok(j) => j,
        Err(_) => return (f64::NAN, f64::NAN),
    };
    let (r, s) = (at.r, at.s);
    let mut low = 0.0f64;
    let mut high = 0.0f64;
    for order in 1..=4usize {
        let scale = (0..=order)
            .map(|i| full.partial(i, order - i).abs())
            .fold(full.value().abs(), f64::max)
            .max(1e-300);
        for i in 0..=order {
            let j = order - i;
            let fd = match order {
                1 => richardson(|a, b| phi_value(p, a, b), r, s, if i == 1 { 0 } else { 1 }, h),
                2 => value_second(p, r, s, i, j, h),
                _ => {
                    let (di, dj, dir) = if i > 0 { (i - 1, j, 0) } else { (i, j - 1, 1) };
                    richardson(|a, b| jet_partial(p, a, b, di, dj), r, s, dir, h)
                }
            };
            let err = (full.partial(i, j) - fd).abs() / fd.abs().max(1e-3 * scale);
            if order <= 3 {
                low = low.max(err);
            } else {
                high = high.max(err);
            }
        }
    }
    (low, high)
}

fn oracle_jets() -> Result<String, String> {
    let mut worst = (0.0f64, 0.0f64, String::new());
    let mut points = 0;
    for id in catalog::ids() {
        let e = entry(id, &[])?;
        if e.profile.provenance != finslerlab::metric::Provenance::Analytic {
            continue;
        }
        let pts = e.grid_points();
        let errs: Vec<(f64, f64)> = pts.par_iter().map(|&at| jet_vs_fd(&e.profile, at)).collect();
        for (at, (lo, hi)) in pts.iter().zip(errs) {
            ensure(lo.is_finite() && hi.is_finite(), || format!("{id}: evaluation failed at {at:?}"))?;
            if lo > worst.0 || hi > worst.1 {
                worst = (worst.0.max(lo), worst.1.max(hi), format!("{id} at ({:.3}, {:.3})", at.r, at.s));
            }
        }
        points += pts.len();
    }
    ensure(worst.0 <= 1e-5 && worst.1 <= 1e-3, || {
        format!("jet vs FD: orders<=3 {:e}, order 4 {:e} ({})", worst.0, worst.1, worst.2)
    })?;
    Ok(format!("jets vs FD on {points} points: {:.1e} (<=3), {:.1e} (4)", worst.0, worst.1))
}

fn oracle_r4() -> Result<String, String> {
    let h = 1e-4;
    let mut worst = 0.0f64;
    let mut skipped = 0usize;
    for id in catalog::ids() {
        let e = entry(id, &[])?;
        if e.profile.provenance != finslerlab::metric::Provenance::Analytic {
            continue;
        }
        let pts = e.grid_points();
        // None: φ ≤ 0 near the point, where P (hence R1) is not defined
        let errs: Vec<Result<Option<f64>, SprayError>> = pts
            .par_iter()
            .map(|&at| {
                let r1 = |s: f64| curvature_sample(&e.profile, RsPoint { r: at.r, s }).map(|c| c.r1);
                // central differences at h, h/2, h/4 with two Richardson levels:
                // near a zero of φ, P and R1 vary on scales close to h
                let diff = |h: f64| -> Result<f64, SprayError> { Ok((r1(at.s + h)? - r1(at.s - h)?) / (2.0 * h)) };
                let (c, d0, d1, d2) = match (curvature_sample(&e.profile, at), diff(h), diff(0.5 * h), diff(0.25 * h)) {
                    (Ok(c), Ok(a), Ok(b), Ok(d)) => (c, a, b, d),
                    (Err(SprayError::NonpositivePhi { .. }), ..)
                    | (_, Err(SprayError::NonpositivePhi { .. }), ..)
                    | (_, _, Err(SprayError::NonpositivePhi { .. }), _)
                    | (.., Err(SprayError::NonpositivePhi { .. })) => return Ok(None),
                    (Err(err), ..) | (_, Err(err), ..) | (_, _, Err(err), _) | (.., Err(err)) => return Err(err),
                };
                let e1 = (4.0 * d1 - d0) / 3.0;
                let e2 = (4.0 * d2 - d1) / 3.0;
                let expect = 0.5 * (3.0 * c.r3 - (16.0 * e2 - e1) / 15.0);
                Ok(Some((c.r4 - expect).abs() / expect.abs().max(1.0)))
            })
            .collect();
        for v in errs {
            match v.map_err(|err| format!("{id}: {err}"))? {
                Some(x) => worst = worst.max(x),
                None => skipped += 1,
            }
        }
    }
    ensure(worst < 1e-4, || format!("R4 vs difference of R1: {worst:e}"))?;
    Ok(format!("R4 vs FD of R1: {worst:.1e} ({skipped} points with phi <= 0 skipped)"))
}

fn oracle_transforms() -> Result<String, String> {
    // g given by value and derivative, independently of the generator code
    let cases: Vec<(GFunction, Box<dyn Fn(f64) -> (f64, f64)>)> = vec![
        (GFunction::Const { c: 0.3 }, Box::new(|_| (0.3, 0.0))),
        (GFunction::InvRNeg, Box::new(|r: f64| (-1.0 / r, 1.0 / (r * r)))),
        (
            GFunction::Polynomial { coeffs: vec![0.1, -0.4, 0.2] },
            Box::new(|r: f64| (0.1 - 0.4 * r + 0.2 * r * r, -0.4 + 0.4 * r)),
        ),
    ];
    let mut worst = 0.0f64;
    for (g, gv) in &cases {
        let pair = TransformPair::quadrature(g, (0.3, 1.2), 0.7, 1e-12).map_err(|e| e.to_string())?;
        for k in 0..12 {
            let r = 0.35 + 0.07 * k as f64;
            let h = 1e-3;
            let lt = |x: f64| pair.t(x).map(f64::ln).unwrap_or(f64::NAN);
            let fd = (-lt(r + 2.0 * h) + 8.0 * lt(r + h) - 8.0 * lt(r - h) + lt(r - 2.0 * h)) / (12.0 * h);
            let (gr, gp) = gv(r);
            let d = 1.0 - 2.0 * r * r * gr;
            let expect = -4.0 * r * gr / d + 2.0 * (4.0 * r * gr + 2.0 * r * r * gp) / d;
            worst = worst.max((fd - expect).abs());
        }
    }
    ensure(worst < 1e-6, || format!("T'/T identity off by {worst:e}"))?;
    Ok(format!("T'/T identity: {worst:.1e}"))
}

fn oracle_dual() -> Result<String, String> {
    let mut worst = 0.0f64;
    let cases: Vec<(&str, GFunction, EtaFunction, HFunction)> = vec![
        ("exs1", GFunction::InvRNeg, EtaFunction::Sqrt { c: 1.0 }, HFunction::One),
        ("ex001", GFunction::Zero, EtaFunction::Ex001 { epsilon: 1.0 }, HFunction::Zero),
        (
            "erf_family",
            GFunction::Zero,
            EtaFunction::ErfFamily { m: 1, epsilon: 1.0, gamma: 1.0 },
            HFunction::Zero,
        ),
    ];
    for (id, g, eta, h) in cases {
        let e = entry(id, &[])?;
        let pts = e.grid_points();
        let (a, b) = pts.iter().fold((f64::MAX, 0.0f64), |(a, b), p| (a.min(p.r), b.max(p.r)));
        let mut spec = FamilySpec::new(FamilyKind::Theorem2);
        spec.g = g;
        spec.eta = eta;
        spec.h = h;
        spec.r_range = (a, b);
        let built = build_profile(&spec).map_err(|err| format!("{id}: {err}"))?;
        let errs: Vec<Result<f64, String>> = pts
            .par_iter()
            .map(|at| {
                let x = gauge_free_combination(&e.profile, at.r, at.s).map_err(|err| err.to_string())?;
                let y = gauge_free_combination(&built, at.r, at.s).map_err(|err| err.to_string())?;
                Ok((x - y).abs() / x.abs().max(1.0))
            })
            .collect();
        for v in errs {
            worst = worst.max(v.map_err(|err| format!("{id}: {err}"))?);
        }
    }
    ensure(worst < 1e-6, || format!("dual construction differs by {worst:e}"))?;
    Ok(format!("dual construction: {worst:.1e}"))
}

fn criterion9() -> Outcome {
    let start = Instant::now();
    let parts = [oracle_jets()?, oracle_r4()?, oracle_transforms()?, oracle_dual()?];
    let el = within(start, Duration::from_secs(60), "oracle suites")?;
    Ok(format!("{} in {el:.2?}", parts.join("; ")))
}

// Runs without the libtest harness so the PASS/FAIL lines are always shown.
fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 constant curvature, example02", criterion1),
        ("2 constant curvature, exs1_special", criterion2),
        ("3 flat reproduction, berwald", criterion3),
        ("4 scalar-flag suite", criterion4),
        ("5 Douglas / non-Douglas separation", criterion5),
        ("6 projective-flatness detection", criterion6),
        ("7 characteristic invariance", criterion7),
        ("8 compatibility-condition build", criterion8),
        ("9 oracle suites", criterion9),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                println!("FAIL criterion {name}: {msg}");
                failed.push(name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
