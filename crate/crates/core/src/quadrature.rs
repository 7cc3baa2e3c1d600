//! Adaptive Simpson quadrature, scalar and fixed-size vector valued.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand is not finite at u = {at}")]
    NonFinite { at: f64 },
    #[error("adaptive Simpson did not reach tolerance {tol:e} on [{a}, {b}]")]
    NoConvergence { a: f64, b: f64, tol: f64 },
    #[error("integrand evaluation failed at u = {at}: {message}")]
    Integrand { at: f64, message: String },
}

const MAX_DEPTH: u32 = 48;

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    let v = simpson_vec::<1, _, String>(|u| Ok([f(u)]), a, b, tol)?;
    Ok(v[0])
}

/// Integrate a vector-valued integrand componentwise. The error test uses the
/// largest component error. Integrand failures abort the integral.
pub fn simpson_vec<const N: usize, F, E>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<[f64; N], QuadratureError>
where
    F: Fn(f64) -> Result<[f64; N], E>,
    E: std::fmt::Display,
{
    if a == b {
        return Ok([0.0; N]);
    }
    let eval = |u: f64| -> Result<[f64; N], QuadratureError> {
        let v = f(u).map_err(|e| QuadratureError::Integrand {
            at: u,
            message: e.to_string(),
        })?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(QuadratureError::NonFinite { at: u });
        }
        Ok(v)
    };
    let fa = eval(a)?;
    let fb = eval(b)?;
    let m = 0.5 * (a + b);
    let fm = eval(m)?;
    let whole = simpson_rule(a, b, &fa, &fm, &fb);
    // a few forced levels so narrow features are not skipped
    recurse(&eval, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, 3)
}

fn simpson_rule<const N: usize>(a: f64, b: f64, fa: &[f64; N], fm: &[f64; N], fb: &[f64; N]) -> [f64; N] {
    let w = (b - a) / 6.0;
    let mut out = [0.0; N];
    for k in 0..N {
        out[k] = w * (fa[k] + 4.0 * fm[k] + fb[k]);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn recurse<const N: usize, G>(
    eval: &G,
    a: f64,
    b: f64,
    fa: [f64; N],
    fm: [f64; N],
    fb: [f64; N],
    whole: [f64; N],
    tol: f64,
    depth: u32,
    forced: u32,
) -> Result<[f64; N], QuadratureError>
where
    G: Fn(f64) -> Result<[f64; N], QuadratureError>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval(lm)?;
    let frm = eval(rm)?;
    let left = simpson_rule(a, m, &fa, &flm, &fm);
    let right = simpson_rule(m, b, &fm, &frm, &fb);
    let mut err = 0.0f64;
    for k in 0..N {
        err = err.max((left[k] + right[k] - whole[k]).abs());
    }
    if forced == 0 && err <= 15.0 * tol {
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = left[k] + right[k] + (left[k] + right[k] - whole[k]) / 15.0;
        }
        return Ok(out);
    }
    if depth == 0 {
        return Err(QuadratureError::NoConvergence { a, b, tol });
    }
    let forced = forced.saturating_sub(1);
    let l = recurse(eval, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, forced)?;
    let r = recurse(eval, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, forced)?;
    let mut out = [0.0; N];
    for k in 0..N {
        out[k] = l[k] + r[k];
    }
    Ok(out)
}
