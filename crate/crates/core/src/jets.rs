//! Truncated bivariate Taylor arithmetic in `(r, s)`.
//!
//! A [`Jet2`] carries every mixed partial of a scalar function up to total
//! order four at one base point. Arithmetic and the elementary/special
//! functions propagate those partials exactly (up to rounding), so every
//! derivative that the spray and curvature formulas need comes out of plain
//! function evaluation.
//!
//! Internally the coefficients are normalized Taylor coefficients
//! `∂^{i+j}f / (i! j! ∂r^i ∂s^j)`; [`Jet2::partial`] converts back to raw
//! partials.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

/// Maximum total order carried by a jet.
pub const MAX_ORDER: usize = 4;
/// Number of coefficients in the order-4 triangle.
pub const N_COEFFS: usize = 15;

const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];
const DIVISOR_EPS: f64 = 1e-14;

#[inline]
const fn idx(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

/// Which coordinate a variable lift represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    R,
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Elementary and special functions available on jets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transcendental {
    Sqrt,
    Exp,
    Ln,
    Atan,
    Artanh,
    Arcoth,
    Erf,
    Sin,
    Cos,
}

impl Transcendental {
    pub fn name(self) -> &'static str {
        match self {
            Transcendental::Sqrt => "sqrt",
            Transcendental::Exp => "exp",
            Transcendental::Ln => "ln",
            Transcendental::Atan => "atan",
            Transcendental::Artanh => "artanh",
            Transcendental::Arcoth => "arcoth",
            Transcendental::Erf => "erf",
            Transcendental::Sin => "sin",
            Transcendental::Cos => "cos",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division by a jet whose value {value:e} vanishes")]
    DivisionByZero { value: f64 },
    #[error("jet base points differ: {left:?} vs {right:?}")]
    BasePointMismatch { left: (f64, f64), right: (f64, f64) },
    #[error("{function} is undefined at {value}")]
    Domain { function: &'static str, value: f64 },
}

/// Truncated Taylor expansion of a scalar function of `(r, s)`.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    base: (f64, f64),
    order: u8,
    c: [f64; N_COEFFS],
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet2")
            .field("base", &self.base)
            .field("order", &self.order)
            .field("partials", &self.partials())
            .finish()
    }
}

impl Jet2 {
    /// Constant `value` at `base`: zero partials, full order.
    pub fn constant(value: f64, base: (f64, f64)) -> Self {
        let mut c = [0.0; N_COEFFS];
        c[0] = value;
        Jet2 {
            base,
            order: MAX_ORDER as u8,
            c,
        }
    }

    /// Variable lift at `base`: the value of the chosen coordinate with a unit
    /// first partial along it.
    pub fn variable(which: Var, base: (f64, f64)) -> Self {
        Self::variable_with_order(which, base, MAX_ORDER)
    }

    pub fn variable_with_order(which: Var, base: (f64, f64), order: usize) -> Self {
        let order = order.min(MAX_ORDER);
        let mut c = [0.0; N_COEFFS];
        match which {
            Var::R => {
                c[0] = base.0;
                if order >= 1 {
                    c[idx(1, 0)] = 1.0;
                }
            }
            Var::S => {
                c[0] = base.1;
                if order >= 1 {
                    c[idx(0, 1)] = 1.0;
                }
            }
        }
        Jet2 {
            base,
            order: order as u8,
            c,
        }
    }

    /// Lift a single coordinate value. The other coordinate of the base point
    /// is set to zero.
    pub fn lift_var(which: Var, value: f64) -> Self {
        let base = match which {
            Var::R => (value, 0.0),
            Var::S => (0.0, value),
        };
        Self::variable(which, base)
    }

    /// Both variable lifts at `(r, s)`.
    pub fn lift_pair(r: f64, s: f64, order: usize) -> (Jet2, Jet2) {
        (
            Self::variable_with_order(Var::R, (r, s), order),
            Self::variable_with_order(Var::S, (r, s), order),
        )
    }

    /// Build from raw partials `partials[i][j] = ∂^{i+j}f/∂r^i∂s^j` (entries
    /// with `i + j > order` are ignored).
    pub fn from_partials(base: (f64, f64), order: usize, partials: &[[f64; 5]; 5]) -> Self {
        let order = order.min(MAX_ORDER);
        let mut c = [0.0; N_COEFFS];
        for d in 0..=order {
            for j in 0..=d {
                let i = d - j;
                c[idx(i, j)] = partials[i][j] / (FACT[i] * FACT[j]);
            }
        }
        Jet2 {
            base,
            order: order as u8,
            c,
        }
    }

    pub(crate) fn from_taylor(base: (f64, f64), order: usize, c: [f64; N_COEFFS]) -> Self {
        let mut j = Jet2 {
            base,
            order: order.min(MAX_ORDER) as u8,
            c,
        };
        j.clear_above_order();
        j
    }

    fn clear_above_order(&mut self) {
        let ord = self.order as usize;
        for d in (ord + 1)..=MAX_ORDER {
            for j in 0..=d {
                self.c[idx(d - j, j)] = 0.0;
            }
        }
    }

    pub fn base(&self) -> (f64, f64) {
        self.base
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Normalized Taylor coefficient `∂^{i+j}f/(i! j!)`.
    pub fn taylor(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order as usize {
            return 0.0;
        }
        self.c[idx(i, j)]
    }

    /// Raw partial `∂^{i+j}f/∂r^i∂s^j`. Zero beyond the jet's order.
    pub fn partial(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order as usize {
            return 0.0;
        }
        self.c[idx(i, j)] * FACT[i] * FACT[j]
    }

    /// All raw partials as a 5×5 array (`[i][j]`, zero where `i + j` exceeds
    /// the order).
    pub fn partials(&self) -> [[f64; 5]; 5] {
        let mut out = [[0.0; 5]; 5];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                if i + j <= MAX_ORDER {
                    *v = self.partial(i, j);
                }
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    /// Truncate to a lower order.
    pub fn truncate(&self, order: usize) -> Self {
        let mut j = *self;
        j.order = order.min(self.order as usize) as u8;
        j.clear_above_order();
        j
    }

    /// Re-tag the base point without touching coefficients.
    pub(crate) fn rebased(&self, base: (f64, f64)) -> Self {
        let mut j = *self;
        j.base = base;
        j
    }

    /// Partial derivative in `r` as a jet of one lower order.
    pub fn d_r(&self) -> Self {
        self.derivative(Var::R)
    }

    /// Partial derivative in `s` as a jet of one lower order.
    pub fn d_s(&self) -> Self {
        self.derivative(Var::S)
    }

    pub fn derivative(&self, which: Var) -> Self {
        let ord = self.order as usize;
        let mut c = [0.0; N_COEFFS];
        if ord == 0 {
            // derivative information is absent; the result carries order 0
            // with value 0 only if nothing is known, so flag with NaN
            c[0] = f64::NAN;
            return Jet2 {
                base: self.base,
                order: 0,
                c,
            };
        }
        for d in 0..ord {
            for j in 0..=d {
                let i = d - j;
                c[idx(i, j)] = match which {
                    Var::R => (i + 1) as f64 * self.c[idx(i + 1, j)],
                    Var::S => (j + 1) as f64 * self.c[idx(i, j + 1)],
                };
            }
        }
        Jet2 {
            base: self.base,
            order: (ord - 1) as u8,
            c,
        }
    }

    fn check_base(&self, other: &Jet2) -> Result<(), JetError> {
        if self.base == other.base {
            Ok(())
        } else {
            Err(JetError::BasePointMismatch {
                left: self.base,
                right: other.base,
            })
        }
    }

    fn zip(&self, other: &Jet2, f: impl Fn(f64, f64) -> f64) -> Jet2 {
        let order = self.order.min(other.order);
        let mut c = [0.0; N_COEFFS];
        for (k, v) in c.iter_mut().enumerate() {
            *v = f(self.c[k], other.c[k]);
        }
        Jet2::from_taylor(self.base, order as usize, c)
    }

    fn mul_unchecked(&self, other: &Jet2) -> Jet2 {
        let ord = self.order.min(other.order) as usize;
        let mut c = [0.0; N_COEFFS];
        for d in 0..=ord {
            for j in 0..=d {
                let i = d - j;
                let mut acc = 0.0;
                for k in 0..=i {
                    for l in 0..=j {
                        acc += self.c[idx(k, l)] * other.c[idx(i - k, j - l)];
                    }
                }
                c[idx(i, j)] = acc;
            }
        }
        Jet2 {
            base: self.base,
            order: ord as u8,
            c,
        }
    }

    pub fn try_add(&self, other: &Jet2) -> Result<Jet2, JetError> {
        self.check_base(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Jet2) -> Result<Jet2, JetError> {
        self.check_base(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn try_mul(&self, other: &Jet2) -> Result<Jet2, JetError> {
        self.check_base(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// Checked quotient. Fails when the divisor's value is within 1e-14 of 0.
    pub fn div(&self, other: &Jet2) -> Result<Jet2, JetError> {
        self.check_base(other)?;
        Ok(self.mul_unchecked(&other.recip()?))
    }

    pub fn arith(op: ArithOp, a: &Jet2, b: &Jet2) -> Result<Jet2, JetError> {
        match op {
            ArithOp::Add => a.try_add(b),
            ArithOp::Sub => a.try_sub(b),
            ArithOp::Mul => a.try_mul(b),
            ArithOp::Div => a.div(b),
        }
    }

    pub fn recip(&self) -> Result<Jet2, JetError> {
        let x = self.value();
        if x.abs() <= DIVISOR_EPS || !x.is_finite() {
            return Err(JetError::DivisionByZero { value: x });
        }
        let inv = 1.0 / x;
        let d = [inv, -inv * inv, 2.0 * inv.powi(3), -6.0 * inv.powi(4), 24.0 * inv.powi(5)];
        Ok(self.compose(&d))
    }

    /// Integer power by repeated multiplication (negative powers go through
    /// the reciprocal).
    pub fn powi(&self, n: i32) -> Result<Jet2, JetError> {
        let base = if n < 0 { self.recip()? } else { *self };
        let mut out = Jet2::constant(1.0, self.base);
        let mut p = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul_unchecked(&p);
            }
            e >>= 1;
            if e > 0 {
                p = p.mul_unchecked(&p);
            }
        }
        Ok(out.truncate(base.order()))
    }

    /// Real power `x^p` for `x > 0`.
    pub fn powf(&self, p: f64) -> Result<Jet2, JetError> {
        let x = self.value();
        if !(x > 0.0) {
            return Err(JetError::Domain {
                function: "powf",
                value: x,
            });
        }
        let mut d = [0.0; 5];
        let mut coef = 1.0;
        for (k, dk) in d.iter_mut().enumerate() {
            *dk = coef * x.powf(p - k as f64);
            coef *= p - k as f64;
        }
        Ok(self.compose(&d))
    }

    pub fn sqrt(&self) -> Result<Jet2, JetError> {
        let x = self.value();
        if !(x > 0.0) {
            return Err(JetError::Domain {
                function: "sqrt",
                value: x,
            });
        }
        let r = x.sqrt();
        let d = [
            r,
            0.5 / r,
            -0.25 / (x * r),
            0.375 / (x * x * r),
            -0.9375 / (x * x * x * r),
        ];
        Ok(self.compose(&d))
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value().exp();
        self.compose(&[e; 5])
    }

    pub fn ln(&self) -> Result<Jet2, JetError> {
        let x = self.value();
        if !(x > 0.0) {
            return Err(JetError::Domain {
                function: "ln",
                value: x,
            });
        }
        let inv = 1.0 / x;
        let d = [
            x.ln(),
            inv,
            -inv * inv,
            2.0 * inv.powi(3),
            -6.0 * inv.powi(4),
        ];
        Ok(self.compose(&d))
    }

    pub fn atan(&self) -> Jet2 {
        let x = self.value();
        let q = 1.0 / (1.0 + x * x);
        let d = [
            x.atan(),
            q,
            -2.0 * x * q * q,
            (6.0 * x * x - 2.0) * q.powi(3),
            24.0 * x * (1.0 - x * x) * q.powi(4),
        ];
        self.compose(&d)
    }

    fn inverse_hyperbolic_derivs(x: f64, value: f64) -> [f64; 5] {
        let q = 1.0 / (1.0 - x * x);
        [
            value,
            q,
            2.0 * x * q * q,
            (2.0 + 6.0 * x * x) * q.powi(3),
            24.0 * x * (1.0 + x * x) * q.powi(4),
        ]
    }

    /// Inverse hyperbolic tangent, `|x| < 1`.
    pub fn artanh(&self) -> Result<Jet2, JetError> {
        let x = self.value();
        if !(x.abs() < 1.0) {
            return Err(JetError::Domain {
                function: "artanh",
                value: x,
            });
        }
        Ok(self.compose(&Self::inverse_hyperbolic_derivs(x, x.atanh())))
    }

    /// Inverse hyperbolic cotangent `½ ln((x+1)/(x−1))`, `|x| > 1`. Shares
    /// the derivative `1/(1−x²)` with [`Jet2::artanh`].
    pub fn arcoth(&self) -> Result<Jet2, JetError> {
        let x = self.value();
        if !(x.abs() > 1.0) || !x.is_finite() {
            return Err(JetError::Domain {
                function: "arcoth",
                value: x,
            });
        }
        let v = 0.5 * ((x + 1.0) / (x - 1.0)).ln();
        Ok(self.compose(&Self::inverse_hyperbolic_derivs(x, v)))
    }

    pub fn erf(&self) -> Jet2 {
        let x = self.value();
        let g = std::f64::consts::FRAC_2_SQRT_PI * (-x * x).exp();
        let d = [
            libm::erf(x),
            g,
            -2.0 * x * g,
            (4.0 * x * x - 2.0) * g,
            (12.0 * x - 8.0 * x * x * x) * g,
        ];
        self.compose(&d)
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        self.compose(&[s, c, -s, -c, s])
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = self.value().sin_cos();
        self.compose(&[c, -s, -c, s, c])
    }

    pub fn transcend(f: Transcendental, a: &Jet2) -> Result<Jet2, JetError> {
        match f {
            Transcendental::Sqrt => a.sqrt(),
            Transcendental::Exp => Ok(a.exp()),
            Transcendental::Ln => a.ln(),
            Transcendental::Atan => Ok(a.atan()),
            Transcendental::Artanh => a.artanh(),
            Transcendental::Arcoth => a.arcoth(),
            Transcendental::Erf => Ok(a.erf()),
            Transcendental::Sin => Ok(a.sin()),
            Transcendental::Cos => Ok(a.cos()),
        }
    }

    /// Apply a univariate function given its derivatives `f^(k)(a₀)`,
    /// `k = 0..=4`, at the jet's value `a₀`.
    pub fn compose(&self, derivs: &[f64; 5]) -> Jet2 {
        let ord = self.order as usize;
        let mut delta = *self;
        delta.c[0] = 0.0;
        let mut out = Jet2::constant(derivs[0], self.base).truncate(ord);
        let mut power = Jet2::constant(1.0, self.base).truncate(ord);
        for (k, dk) in derivs.iter().enumerate().take(ord + 1).skip(1) {
            power = power.mul_unchecked(&delta);
            let w = dk / FACT[k];
            for (o, p) in out.c.iter_mut().zip(power.c.iter()) {
                *o += w * p;
            }
        }
        out
    }

    /// Substitute jets `u`, `v` for the two coordinates of `self`: returns
    /// the jet of `f(u, v)` where `f` is the function expanded by `self` about
    /// its base point. `u` and `v` must share a base point.
    pub fn substitute(&self, u: &Jet2, v: &Jet2) -> Result<Jet2, JetError> {
        u.check_base(v)?;
        let ord = (self.order.min(u.order).min(v.order)) as usize;
        let mut du = *u;
        du.c[0] -= self.base.0;
        let mut dv = *v;
        dv.c[0] -= self.base.1;
        if du.c[0].abs() > 1e-12 * (1.0 + self.base.0.abs())
            || dv.c[0].abs() > 1e-12 * (1.0 + self.base.1.abs())
        {
            return Err(JetError::BasePointMismatch {
                left: self.base,
                right: (u.value(), v.value()),
            });
        }
        du.c[0] = 0.0;
        dv.c[0] = 0.0;
        let one = Jet2::constant(1.0, u.base).truncate(ord);
        let mut pu = [one; MAX_ORDER + 1];
        let mut pv = [one; MAX_ORDER + 1];
        for k in 1..=ord {
            pu[k] = pu[k - 1].mul_unchecked(&du);
            pv[k] = pv[k - 1].mul_unchecked(&dv);
        }
        let mut out = Jet2::constant(0.0, u.base).truncate(ord);
        for d in 0..=ord {
            for j in 0..=d {
                let i = d - j;
                let w = self.c[idx(i, j)];
                if w == 0.0 {
                    continue;
                }
                let term = pu[i].mul_unchecked(&pv[j]);
                for (o, t) in out.c.iter_mut().zip(term.c.iter()) {
                    *o += w * t;
                }
            }
        }
        Ok(out)
    }

    /// Evaluate the Taylor polynomial at displacement `(dr, ds)` from the base.
    pub fn eval_taylor(&self, dr: f64, ds: f64) -> f64 {
        let ord = self.order as usize;
        let mut acc = 0.0;
        for d in 0..=ord {
            for j in 0..=d {
                let i = d - j;
                acc += self.c[idx(i, j)] * dr.powi(i as i32) * ds.powi(j as i32);
            }
        }
        acc
    }

    /// Jet of `F(r)` for a function of `r` alone, given `F(r₀)` and the jet of
    /// `F′` at the same base point. The result has one more order than
    /// `deriv`, capped at 4.
    pub fn antiderivative_r(value: f64, deriv: &Jet2) -> Jet2 {
        let ord = (deriv.order as usize + 1).min(MAX_ORDER);
        let mut c = [0.0; N_COEFFS];
        c[0] = value;
        for i in 1..=ord {
            c[idx(i, 0)] = deriv.c[idx(i - 1, 0)] / i as f64;
        }
        Jet2::from_taylor(deriv.base, ord, c)
    }

    /// Assemble a jet from its value and its gradient jets (`∂_r f`, `∂_s f`).
    /// Pure-`r` coefficients come from `d_r`, everything with an `s` factor
    /// from `d_s`; this is exact when the gradient is curl-free.
    pub fn from_gradient(value: f64, d_r: &Jet2, d_s: &Jet2) -> Result<Jet2, JetError> {
        d_r.check_base(d_s)?;
        let ord = ((d_r.order.min(d_s.order)) as usize + 1).min(MAX_ORDER);
        let mut c = [0.0; N_COEFFS];
        c[0] = value;
        for d in 1..=ord {
            for j in 0..=d {
                let i = d - j;
                c[idx(i, j)] = if j == 0 {
                    d_r.c[idx(i - 1, 0)] / i as f64
                } else {
                    d_s.c[idx(i, j - 1)] / j as f64
                };
            }
        }
        Ok(Jet2::from_taylor(d_r.base, ord, c))
    }

    pub(crate) fn set_taylor(&mut self, i: usize, j: usize, v: f64) {
        if i + j <= self.order as usize {
            self.c[idx(i, j)] = v;
        }
    }
}

fn assert_same_base(a: &Jet2, b: &Jet2) {
    assert!(
        a.base == b.base,
        "jet base points differ: {:?} vs {:?}",
        a.base,
        b.base
    );
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        assert_same_base(&self, &rhs);
        self.zip(&rhs, |a, b| a + b)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        assert_same_base(&self, &rhs);
        self.zip(&rhs, |a, b| a - b)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        assert_same_base(&self, &rhs);
        self.mul_unchecked(&rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        for v in self.c.iter_mut() {
            *v = -*v;
        }
        self
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(mut self, rhs: f64) -> Jet2 {
        for v in self.c.iter_mut() {
            *v *= rhs;
        }
        self
    }
}

impl std::ops::Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: f64) -> Jet2 {
        self * (1.0 / rhs)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        -rhs + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs * self
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet2 {
    fn sub_assign(&mut self, rhs: Jet2) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet2 {
    fn mul_assign(&mut self, rhs: Jet2) {
        *self = *self * rhs;
    }
}
