//! Exponent-scaled complex arithmetic.
//!
//! The transfer-function formulas combine hyperbolic functions whose
//! magnitudes grow like `exp(|Re z| * l)`, while every physically meaningful
//! result is a ratio of such terms. [`ScaledComplex`] represents a value as
//! `mantissa * exp(exponent)` with a real exponent carried separately, so
//! products and ratios of huge hyperbolics never overflow `f64`.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A complex value stored as `mantissa * exp(exponent)`.
#[derive(Clone, Copy, Debug)]
pub struct ScaledComplex {
    mantissa: Complex64,
    exponent: f64,
}

/// Renormalization window for the mantissa magnitude; wide enough that
/// individual multiplies cannot overflow.
const NORM_LO: f64 = 1e-100;
const NORM_HI: f64 = 1e100;

impl ScaledComplex {
    pub fn new(mantissa: Complex64, exponent: f64) -> Self {
        Self { mantissa, exponent }.normalized()
    }

    pub fn zero() -> Self {
        Self {
            mantissa: Complex64::new(0.0, 0.0),
            exponent: 0.0,
        }
    }

    pub fn one() -> Self {
        Self {
            mantissa: Complex64::new(1.0, 0.0),
            exponent: 0.0,
        }
    }

    pub fn from_complex(value: Complex64) -> Self {
        Self {
            mantissa: value,
            exponent: 0.0,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        let mag = self.mantissa.norm();
        if mag == 0.0 {
            self.exponent = 0.0;
        } else if !(NORM_LO..=NORM_HI).contains(&mag) && mag.is_finite() {
            let shift = mag.ln();
            self.mantissa /= mag;
            self.exponent += shift;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.norm() == 0.0
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn ln_norm(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.norm().ln() + self.exponent
        }
    }

    /// Collapse to a plain complex number. Overflows to infinity if the
    /// magnitude exceeds the `f64` range.
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.exponent.exp()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.mantissa * factor, self.exponent)
    }
}

impl Add for ScaledComplex {
    type Output = ScaledComplex;
    fn add(self, rhs: ScaledComplex) -> ScaledComplex {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        // shift the smaller term onto the larger exponent so the
        // rescaling factor is always <= 1 (underflows harmlessly)
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        ScaledComplex::new(
            big.mantissa + small.mantissa * (small.exponent - big.exponent).exp(),
            big.exponent,
        )
    }
}

impl Sub for ScaledComplex {
    type Output = ScaledComplex;
    fn sub(self, rhs: ScaledComplex) -> ScaledComplex {
        self + (-rhs)
    }
}

impl Neg for ScaledComplex {
    type Output = ScaledComplex;
    fn neg(self) -> ScaledComplex {
        ScaledComplex {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, rhs: ScaledComplex) -> ScaledComplex {
        ScaledComplex::new(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Div for ScaledComplex {
    type Output = ScaledComplex;
    fn div(self, rhs: ScaledComplex) -> ScaledComplex {
        ScaledComplex::new(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

/// Threshold on |Re w| above which sinh/cosh switch from the library
/// implementation to the explicit `exp` form. Below it the exponentials
/// would cancel; above it they are separated by at least e^2.
const EXP_FORM_THRESHOLD: f64 = 1.0;

/// sinh(w) in scaled form, valid for arbitrarily large |Re w|.
pub fn sinh_scaled(w: Complex64) -> ScaledComplex {
    if w.re.abs() <= EXP_FORM_THRESHOLD {
        return ScaledComplex::from_complex(w.sinh());
    }
    // sinh is odd; reduce to u = Re w > 0:
    // sinh(u + iv) = e^u/2 * (e^{iv} - e^{-2u} e^{-iv})
    let sign = if w.re < 0.0 { -1.0 } else { 1.0 };
    let u = w.re.abs();
    let v = sign * w.im;
    let eiv = Complex64::new(v.cos(), v.sin());
    let small = (-2.0 * u).exp() * eiv.conj();
    ScaledComplex::new(sign * 0.5 * (eiv - small), u)
}

/// cosh(w) in scaled form, valid for arbitrarily large |Re w|.
pub fn cosh_scaled(w: Complex64) -> ScaledComplex {
    if w.re.abs() <= EXP_FORM_THRESHOLD {
        return ScaledComplex::from_complex(w.cosh());
    }
    let u = w.re.abs();
    let v = if w.re < 0.0 { -w.im } else { w.im };
    let eiv = Complex64::new(v.cos(), v.sin());
    let small = (-2.0 * u).exp() * eiv.conj();
    ScaledComplex::new(0.5 * (eiv + small), u)
}

/// tanh(w) without internal overflow: for large |Re w| the value is computed
/// from exp(-2|Re w|) directly.
pub fn tanh_stable(w: Complex64) -> Complex64 {
    if w.re.abs() <= EXP_FORM_THRESHOLD {
        return w.tanh();
    }
    let sign = if w.re < 0.0 { -1.0 } else { 1.0 };
    let e = (Complex64::new(-2.0 * w.re.abs(), -2.0 * sign * w.im)).exp();
    sign * (1.0 - e) / (1.0 + e)
}
