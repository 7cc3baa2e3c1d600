//! Named generator functions selectable from configuration files.

use serde::{Deserialize, Serialize};

use crate::jets::{Jet2, JetError, Var};

fn one() -> f64 {
    1.0
}

fn plus() -> f64 {
    1.0
}

fn horner(coeffs: &[f64], x: &Jet2) -> Jet2 {
    let mut acc = Jet2::constant(0.0, x.base());
    for c in coeffs.iter().rev() {
        acc = acc * *x + *c;
    }
    acc
}

fn horner_deriv(coeffs: &[f64], x: &Jet2) -> Jet2 {
    let d: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| i as f64 * c)
        .collect();
    horner(&d, x)
}

/// The Douglas generator `g(r)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum GFunction {
    #[default]
    Zero,
    Const {
        c: f64,
    },
    /// `g = −1/r`.
    InvRNeg,
    /// `g = Σ aᵢ rⁱ`.
    Polynomial {
        coeffs: Vec<f64>,
    },
}

impl GFunction {
    pub fn eval(&self, r: &Jet2) -> Result<Jet2, JetError> {
        let b = r.base();
        Ok(match self {
            GFunction::Zero => Jet2::constant(0.0, b),
            GFunction::Const { c } => Jet2::constant(*c, b),
            GFunction::InvRNeg => -r.recip()?,
            GFunction::Polynomial { coeffs } => horner(coeffs, r),
        })
    }

    /// `g′` with full jet order.
    pub fn deriv(&self, r: &Jet2) -> Result<Jet2, JetError> {
        let b = r.base();
        Ok(match self {
            GFunction::Zero | GFunction::Const { .. } => Jet2::constant(0.0, b),
            GFunction::InvRNeg => r.powi(-2)?,
            GFunction::Polynomial { coeffs } => horner_deriv(coeffs, r),
        })
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(&Jet2::constant(r, (r, 0.0)))
            .map(|j| j.value())
            .unwrap_or(f64::NAN)
    }

    pub fn deriv_value(&self, r: f64) -> f64 {
        self.deriv(&Jet2::constant(r, (r, 0.0)))
            .map(|j| j.value())
            .unwrap_or(f64::NAN)
    }

    /// `f = (2g′ + 4rg²)/(r − 2r³g)`.
    pub fn f_value(&self, r: f64) -> f64 {
        let g = self.value(r);
        (2.0 * self.deriv_value(r) + 4.0 * r * g * g) / (r - 2.0 * r * r * r * g)
    }

    /// Jet of `f` in r.
    pub fn f_jet(&self, r: &Jet2) -> Result<Jet2, JetError> {
        let g = self.eval(r)?;
        let gp = self.deriv(r)?;
        (2.0 * gp + 4.0 * *r * g * g).div(&(*r - 2.0 * *r * *r * *r * g))
    }

    /// Douglas-form `Q = g + s²(g′ + 2rg²)/(r − 2r³g)`.
    pub fn q_jet(&self, r: &Jet2, s: &Jet2) -> Result<Jet2, JetError> {
        Ok(self.eval(r)? + 0.5 * self.f_jet(r)? * *s * *s)
    }

    pub fn describe(&self) -> String {
        match self {
            GFunction::Zero => "zero".into(),
            GFunction::Const { c } => format!("const({c})"),
            GFunction::InvRNeg => "inv_r_neg".into(),
            GFunction::Polynomial { coeffs } => format!("polynomial({coeffs:?})"),
        }
    }
}

/// The gauge function `h(r)` multiplying `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum HFunction {
    #[default]
    Zero,
    One,
    Const {
        c: f64,
    },
    /// `2c/((1+2r)(1+4r))`.
    Exs1Special {
        #[serde(default = "one")]
        c: f64,
    },
    /// `−2(3r+1)/(r(1+2r)(1+4r))`.
    Ex10,
    /// `±2/(1−r²)²`.
    Berwald {
        #[serde(default = "plus")]
        sign: f64,
    },
    Polynomial {
        coeffs: Vec<f64>,
    },
}

impl HFunction {
    pub fn eval(&self, r: &Jet2) -> Result<Jet2, JetError> {
        let b = r.base();
        Ok(match self {
            HFunction::Zero => Jet2::constant(0.0, b),
            HFunction::One => Jet2::constant(1.0, b),
            HFunction::Const { c } => Jet2::constant(*c, b),
            HFunction::Exs1Special { c } => {
                Jet2::constant(2.0 * c, b).div(&((1.0 + 2.0 * *r) * (1.0 + 4.0 * *r)))?
            }
            HFunction::Ex10 => {
                (-2.0 * (3.0 * *r + 1.0)).div(&(*r * (1.0 + 2.0 * *r) * (1.0 + 4.0 * *r)))?
            }
            HFunction::Berwald { sign } => {
                let a = 1.0 - *r * *r;
                Jet2::constant(2.0 * sign.signum(), b).div(&(a * a))?
            }
            HFunction::Polynomial { coeffs } => horner(coeffs, r),
        })
    }

    pub fn describe(&self) -> String {
        match self {
            HFunction::Zero => "zero".into(),
            HFunction::One => "one".into(),
            HFunction::Const { c } => format!("const({c})"),
            HFunction::Exs1Special { c } => format!("exs1_special({c})"),
            HFunction::Ex10 => "ex10".into(),
            HFunction::Berwald { sign } => format!("berwald({sign})"),
            HFunction::Polynomial { coeffs } => format!("polynomial({coeffs:?})"),
        }
    }

    /// Parse a bare name used on the command line (`zero`, `one`, a number,
    /// `exs1_special`, `ex10`).
    pub fn from_cli(value: &str, c: f64) -> Option<HFunction> {
        match value {
            "zero" => Some(HFunction::Zero),
            "one" => Some(HFunction::One),
            "exs1_special" => Some(HFunction::Exs1Special { c }),
            "ex10" => Some(HFunction::Ex10),
            "berwald_plus" => Some(HFunction::Berwald { sign: 1.0 }),
            "berwald_minus" => Some(HFunction::Berwald { sign: -1.0 }),
            other => other.parse::<f64>().ok().map(|c| HFunction::Const { c }),
        }
    }
}

/// The profile-shaping function `η`, applied to the (positive) invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum EtaFunction {
    #[default]
    Identity,
    /// `c√x`.
    Sqrt {
        #[serde(default = "one")]
        c: f64,
    },
    /// `c xᵐ`.
    Power {
        m: i32,
        #[serde(default = "one")]
        c: f64,
    },
    /// `√x (xᵐ + ε)`.
    SqrtPower {
        m: i32,
        #[serde(default = "one")]
        epsilon: f64,
    },
    /// `√x (γxᵐ + ε) eˣ`.
    ErfFamily {
        m: i32,
        #[serde(default = "one")]
        epsilon: f64,
        #[serde(default = "one")]
        gamma: f64,
    },
    /// `√x (γxᵐ·½ln|(1+x)/(1−x)| + ε)`.
    ArtanhFamily {
        m: i32,
        #[serde(default = "one")]
        epsilon: f64,
        #[serde(default = "one")]
        gamma: f64,
    },
    /// `√x/(1−x)^{3/2}`.
    ThreeHalves,
    /// `u³ + εu` with `u = √x/(1−x)^{3/2}`.
    Ex001 {
        #[serde(default = "one")]
        epsilon: f64,
    },
    Polynomial {
        coeffs: Vec<f64>,
    },
}

impl EtaFunction {
    pub fn eval(&self, x: &Jet2) -> Result<Jet2, JetError> {
        Ok(match self {
            EtaFunction::Identity => *x,
            EtaFunction::Sqrt { c } => *c * x.sqrt()?,
            EtaFunction::Power { m, c } => *c * x.powi(*m)?,
            EtaFunction::SqrtPower { m, epsilon } => x.sqrt()? * (x.powi(*m)? + *epsilon),
            EtaFunction::ErfFamily { m, epsilon, gamma } => {
                x.sqrt()? * (*gamma * x.powi(*m)? + *epsilon) * x.exp()
            }
            EtaFunction::ArtanhFamily { m, epsilon, gamma } => {
                let at = if x.value().abs() < 1.0 { x.artanh()? } else { x.arcoth()? };
                x.sqrt()? * (*gamma * x.powi(*m)? * at + *epsilon)
            }
            EtaFunction::ThreeHalves => three_halves(x)?,
            EtaFunction::Ex001 { epsilon } => {
                let u = three_halves(x)?;
                u * u * u + *epsilon * u
            }
            EtaFunction::Polynomial { coeffs } => horner(coeffs, x),
        })
    }

    pub fn value(&self, x: f64) -> Result<f64, JetError> {
        Ok(self.eval(&Jet2::constant(x, (x, 0.0)))?.value())
    }

    pub fn describe(&self) -> String {
        match self {
            EtaFunction::Identity => "identity".into(),
            EtaFunction::Sqrt { c } => format!("sqrt(c={c})"),
            EtaFunction::Power { m, c } => format!("power(m={m}, c={c})"),
            EtaFunction::SqrtPower { m, epsilon } => format!("sqrt_power(m={m}, epsilon={epsilon})"),
            EtaFunction::ErfFamily { m, epsilon, gamma } => {
                format!("erf_family(m={m}, epsilon={epsilon}, gamma={gamma})")
            }
            EtaFunction::ArtanhFamily { m, epsilon, gamma } => {
                format!("artanh_family(m={m}, epsilon={epsilon}, gamma={gamma})")
            }
            EtaFunction::ThreeHalves => "three_halves".into(),
            EtaFunction::Ex001 { epsilon } => format!("ex001(epsilon={epsilon})"),
            EtaFunction::Polynomial { coeffs } => format!("polynomial({coeffs:?})"),
        }
    }
}

fn three_halves(x: &Jet2) -> Result<Jet2, JetError> {
    let w = 1.0 - *x;
    x.sqrt()?.div(&(w * w.sqrt()?))
}

/// Spray scalar `P(r, s)` fed to the compatibility-condition construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum PFunction {
    #[default]
    Zero,
    /// `h(r)s + σc√(r(r+4(r²−s²)))/(r(1+4r))`.
    Exs1Shape {
        #[serde(default)]
        h: HFunction,
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "plus")]
        sign: f64,
    },
}

impl PFunction {
    /// The data used for the ex10 construction.
    pub fn ex10(sign: f64) -> Self {
        PFunction::Exs1Shape {
            h: HFunction::Ex10,
            c: 1.0,
            sign,
        }
    }

    pub fn eval(&self, r: &Jet2, s: &Jet2) -> Result<Jet2, JetError> {
        Ok(match self {
            PFunction::Zero => Jet2::constant(0.0, r.base()),
            PFunction::Exs1Shape { h, c, sign } => {
                let t = *r * *r - *s * *s;
                let root = (*r * (*r + 4.0 * t)).sqrt()?;
                h.eval(r)? * *s + (sign.signum() * c) * root.div(&(*r * (1.0 + 4.0 * *r)))?
            }
        })
    }

    pub fn describe(&self) -> String {
        match self {
            PFunction::Zero => "zero".into(),
            PFunction::Exs1Shape { h, c, sign } => {
                format!("exs1_shape(h={}, c={c}, sign={sign})", h.describe())
            }
        }
    }
}

/// r-only lift helper for generator evaluation at a bare radius.
pub fn r_lift(r: f64) -> Jet2 {
    Jet2::lift_var(Var::R, r)
}
