//! Property-based checks of algebraic identities and symmetries.

use finslerlab::catalog::{self, CatalogEntry};
use finslerlab::curvature::riemann_assemble;
use finslerlab::families::{build_profile, Antiderivative, EtaFunction, FamilyKind, FamilySpec};
use finslerlab::metric::{eval_f, to_rs, Provenance};
use finslerlab::spray::{compute_p, compute_q, integrate_geodesic, spray_coefficients};
use finslerlab::{Jet2, RsPoint, Status, Var};
use proptest::prelude::*;

fn analytic_entries() -> Vec<CatalogEntry> {
    catalog::list()
        .into_iter()
        .filter(|d| d.provenance == Provenance::Analytic)
        .map(|d| catalog::get_default(d.id).unwrap())
        .collect()
}

/// Rotation matrix from a (not necessarily unit) quaternion.
fn rotation(q: [f64; 4]) -> [[f64; 3]; 3] {
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn apply(m: &[[f64; 3]; 3], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// A tangent state `(x, y)` realizing a grid point, with |y| = `len`.
fn state(at: RsPoint, len: f64) -> (Vec<f64>, Vec<f64>) {
    let c = at.s / at.r;
    let x = vec![at.r, 0.0, 0.0];
    let y = vec![len * c, len * (1.0 - c * c).sqrt(), 0.0];
    (x, y)
}

fn quaternion() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0).prop_filter("non-degenerate", |q| q.iter().map(|v| v * v).sum::<f64>() > 0.1)
}

/// Quadratic polynomial coefficients in (dr, ds): 1, dr, ds, dr², dr ds, ds².
fn quad_jet(a: &[f64; 6], base: (f64, f64)) -> Jet2 {
    let dr = Jet2::variable(Var::R, base) - base.0;
    let ds = Jet2::variable(Var::S, base) - base.1;
    a[0] + a[1] * dr + a[2] * ds + a[3] * dr * dr + a[4] * dr * ds + a[5] * ds * ds
}

/// Coefficients `c[i][j]` of dr^i ds^j for the product of two quadratics.
fn quad_product(a: &[f64; 6], b: &[f64; 6]) -> [[f64; 5]; 5] {
    let pow = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
    let mut c = [[0.0; 5]; 5];
    for (p, &(i1, j1)) in pow.iter().enumerate() {
        for (q, &(i2, j2)) in pow.iter().enumerate() {
            c[i1 + i2][j1 + j2] += a[p] * b[q];
        }
    }
    c
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn jet_product_matches_polynomial_product(
        a in prop::array::uniform6(-2.0f64..2.0),
        b in prop::array::uniform6(-2.0f64..2.0),
        r0 in 0.1f64..3.0,
        s0 in -1.0f64..1.0,
    ) {
        let base = (r0, s0);
        let prod = quad_jet(&a, base) * quad_jet(&b, base);
        let c = quad_product(&a, &b);
        let scale = c.iter().flatten().fold(1e-300f64, |m, v| m.max(v.abs()));
        for i in 0..=4 {
            for j in 0..=(4 - i) {
                let expect = c[i][j] * factorial(i) * factorial(j);
                let got = prod.partial(i, j);
                prop_assert!((got - expect).abs() <= 1e-12 * scale * factorial(i) * factorial(j),
                    "({i},{j}): {got} vs {expect}");
            }
        }
    }

    #[test]
    fn jet_quotient_undoes_product(
        a in prop::array::uniform6(-2.0f64..2.0),
        b in prop::array::uniform6(-1.0f64..1.0),
        r0 in 0.1f64..3.0,
        s0 in -1.0f64..1.0,
    ) {
        let base = (r0, s0);
        let mut b = b;
        b[0] = 3.0 + b[0];
        let f = quad_jet(&a, base);
        let g = quad_jet(&b, base);
        let back = (f * g).div(&g).unwrap();
        for i in 0..=4 {
            for j in 0..=(4 - i) {
                let scale = f.partial(i, j).abs().max(factorial(i) * factorial(j));
                prop_assert!((back.partial(i, j) - f.partial(i, j)).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn lifts_are_bit_exact(r in -10.0f64..10.0, s in -10.0f64..10.0) {
        let (jr, js) = Jet2::lift_pair(r, s, 4);
        prop_assert_eq!(jr.value().to_bits(), r.to_bits());
        prop_assert_eq!(js.value().to_bits(), s.to_bits());
        prop_assert_eq!(jr.partial(1, 0), 1.0);
        prop_assert_eq!(js.partial(0, 1), 1.0);
        prop_assert_eq!(jr.partial(0, 1), 0.0);
    }

    #[test]
    fn to_rs_respects_cauchy_schwarz(x in prop::array::uniform3(-5.0f64..5.0), y in prop::array::uniform3(-5.0f64..5.0)) {
        prop_assume!(y.iter().any(|v| v.abs() > 1e-6));
        let at = to_rs(&x, &y).unwrap();
        prop_assert!(at.s.abs() <= at.r);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn metrics_are_homogeneous_and_rotation_invariant(
        pick in 0usize..10_000,
        lambda in 1e-3f64..10.0,
        len in 0.1f64..5.0,
        q in quaternion(),
    ) {
        for e in analytic_entries() {
            let pts = e.grid_points();
            let at = pts[pick % pts.len()];
            let (x, y) = state(at, len);
            let f = eval_f(&e.profile, &x, &y).unwrap();
            let ly: Vec<f64> = y.iter().map(|v| lambda * v).collect();
            let fl = eval_f(&e.profile, &x, &ly).unwrap();
            prop_assert!((fl - lambda * f).abs() <= 1e-12 * (lambda * f).abs().max(1e-300), "{}: {fl} vs {}", e.id, lambda * f);
            let m = rotation(q);
            let fr = eval_f(&e.profile, &apply(&m, &x), &apply(&m, &y)).unwrap();
            prop_assert!((fr - f).abs() <= 1e-10 * f.abs(), "{}: rotated {fr} vs {f}", e.id);
        }
    }

    #[test]
    fn spray_is_two_homogeneous(pick in 0usize..10_000, k in -6i32..6, len in 0.2f64..3.0) {
        // powers of two scale y exactly, so (r, s) is bit-identical; a general
        // λ moves s by an ulp, which P amplifies near the artanh_m0 boundary
        let lambda = 2f64.powi(k);
        for e in analytic_entries() {
            let pts = e.grid_points();
            let at = pts[pick % pts.len()];
            let (x, y) = state(at, len);
            let g = match spray_coefficients(&e.profile, &x, &y) {
                Ok(g) => g,
                // P is undefined where φ ≤ 0 (exs1 with its default h)
                Err(_) => continue,
            };
            let ly: Vec<f64> = y.iter().map(|v| lambda * v).collect();
            let gl = spray_coefficients(&e.profile, &x, &ly).unwrap();
            // the two spray terms |y|P y and |y|²Q x can cancel; measure against their size
            let q = compute_q(&e.profile, at).unwrap().value();
            let p = compute_p(&e.profile, at).unwrap().value();
            let scale = lambda * lambda * len * len * (p.abs() + q.abs() * at.r);
            for (a, b) in gl.iter().zip(&g) {
                prop_assert!((a - lambda * lambda * b).abs() <= 1e-13 * scale, "{}: {a} vs {}", e.id, lambda * lambda * b);
            }
        }
    }

    #[test]
    fn riemann_operator_annihilates_y(pick in 0usize..10_000, len in 0.2f64..3.0, q in quaternion()) {
        let m = rotation(q);
        for e in analytic_entries() {
            let pts = e.grid_points();
            let at = pts[pick % pts.len()];
            let (x, y) = state(at, len);
            let (x, y) = (apply(&m, &x), apply(&m, &y));
            let Ok(rm) = riemann_assemble(&e.profile, &x, &y) else { continue };
            let norm_r = rm.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
            let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ry: Vec<f64> = rm.iter().map(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum()).collect();
            let nry = ry.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!(nry <= 1e-9 * norm_r * ny + 1e-300, "{}: |Ry| = {nry}, |R| = {norm_r}", e.id);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    /// Builds that differ only in the s-integral base point differ by s·Δh(r).
    #[test]
    fn base_point_changes_are_pure_gauge(frac in 0.2f64..0.8, r in 0.4f64..1.4) {
        let mut spec = FamilySpec::new(FamilyKind::Theorem2);
        spec.eta = EtaFunction::ErfFamily { m: 1, epsilon: 1.0, gamma: 1.0 };
        spec.r_range = (0.3, 1.5);
        spec.antiderivative = Some(Antiderivative::BasePoint);
        let p1 = build_profile(&spec).unwrap();
        spec.base_points.s0_fraction = frac;
        let p2 = build_profile(&spec).unwrap();
        for sign in [1.0, -1.0] {
            let ratio = |sigma: f64| {
                let at = RsPoint::new(r, sign * sigma * r).unwrap();
                (p1.phi(at).unwrap() - p2.phi(at).unwrap()) / at.s
            };
            let (a, b, c) = (ratio(0.1), ratio(0.5), ratio(0.9));
            prop_assert!((a - b).abs() < 1e-8 && (b - c).abs() < 1e-8, "{a} {b} {c}");
        }
    }
}

#[test]
fn euclid_geodesics_reverse_exactly() {
    let e = catalog::get_default("euclid").unwrap();
    let x0 = [0.3, -0.2, 0.5];
    let y0 = [0.4, 0.1, -0.7];
    let back: Vec<f64> = y0.iter().map(|v| -v).collect();
    let fwd = integrate_geodesic(&e.profile, &x0, &y0, 1.0, 1e-2).unwrap();
    let rev = integrate_geodesic(&e.profile, &x0, &back, 1.0, 1e-2).unwrap();
    assert_eq!(fwd.states.len(), rev.states.len());
    for (a, b) in fwd.states.iter().zip(&rev.states) {
        for k in 0..3 {
            assert!(((a.x[k] - x0[k]) + (b.x[k] - x0[k])).abs() < 1e-14);
        }
    }
}

#[test]
fn geodesic_integrator_is_fourth_order() {
    let e = catalog::get_default("example02").unwrap();
    let x0 = [1.0, 0.2, 0.0];
    let y0 = [0.3, 1.0, 0.2];
    let end = |h: f64| integrate_geodesic(&e.profile, &x0, &y0, 0.5, h).unwrap().states.last().unwrap().x.clone();
    let reference = end(1e-3 / 8.0);
    let err = |h: f64| {
        end(h).iter().zip(&reference).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    };
    let (e1, e2) = (err(1e-2), err(5e-3));
    assert!(e1 / e2 >= 8.0, "halving reduced the error only by {}", e1 / e2);
}

#[test]
fn classification_implications_hold() {
    for id in catalog::ids() {
        let e = catalog::get_default(id).unwrap();
        let report = e.classify();
        if report.status("constant_flag") == Some(Status::Pass) {
            assert_eq!(report.status("scalar_flag"), Some(Status::Pass), "{id}");
        }
        if report.status("projectively_flat") == Some(Status::Pass) {
            assert_eq!(report.status("douglas"), Some(Status::Pass), "{id}");
        }
    }
}
