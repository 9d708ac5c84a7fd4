//! Closed-form displacement and output transfer functions of the damped
//! string, for uniform and left-boundary forcing.
//!
//! The displacement transfer function G(x, s) maps the Laplace-transformed
//! input to the displacement at location x; the output transfer function H(s)
//! maps it to the average displacement over the string. Both are built from
//! the auxiliary quantities z, beta1, beta2, gamma, eta, which combine
//! hyperbolics of z*p and z*(l-p); all hyperbolics are evaluated in
//! exponent-scaled form so nothing overflows in the right half-plane.

mod gauss;
mod series;

use num_complex::Complex64;
use std::fmt;

use crate::params::{Damper, Forcing, StringParams};
use crate::scaled::{cosh_scaled, sinh_scaled, tanh_stable, ScaledComplex};

pub use gauss::gauss_legendre;
pub use series::Z_SWITCH;

/// Relative floor for |eta|; below it the evaluation point is treated as a
/// pole of the transfer function (scale-free detection).
const ETA_GUARD: f64 = 1e-13;

/// Pole guard for the tanh-based limit formulas: |cosh| below this multiple
/// of |sinh| means the evaluation point sits on an undamped resonance.
const COSH_GUARD: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalError {
    /// The direct formula is singular here (s(s+d) = 0 or eta ~ 0); the
    /// caller should use a limit or series path.
    SingularPoint { s: Complex64 },
    /// eta vanishes non-removably: a genuine pole, e.g. an undamped
    /// resonance in the d = 0 limit.
    PoleEncountered { s: Complex64 },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::SingularPoint { s } => {
                write!(f, "transfer function singular at s = {s}")
            }
            EvalError::PoleEncountered { s } => {
                write!(f, "transfer function pole at s = {s}")
            }
        }
    }
}

impl std::error::Error for EvalError {}

/// The quantities of the closed-form solution, in exponent-scaled form so
/// they stay representable for |Re z|*l up to 1e4 and beyond.
#[derive(Clone, Copy, Debug)]
pub struct AuxQuantities {
    /// z = sqrt((s^2 + d s)/k), principal branch (or its negation when
    /// requested; every downstream value is even in z).
    pub z: Complex64,
    pub beta1: ScaledComplex,
    pub beta2: ScaledComplex,
    pub gamma: ScaledComplex,
    pub eta: ScaledComplex,
}

/// Principal square root z(s) = sqrt((s^2 + d s)/k).
pub fn principal_root(s: Complex64, params: &StringParams) -> Complex64 {
    ((s * s + params.internal_damping * s) / params.stiffness).sqrt()
}

fn aux_with_root(s: Complex64, z: Complex64, params: &StringParams, damper: &Damper) -> AuxQuantities {
    let k = params.stiffness;
    let l = params.length;
    let p = damper.position;
    let q = l - p;
    let gs = ScaledComplex::from_complex(damper.gain * s);
    let kz = ScaledComplex::from_complex(k * z);

    let sh_l = sinh_scaled(z * l);
    let sh_p = sinh_scaled(z * p);
    let sh_q = sinh_scaled(z * q);
    let sh_hl = sinh_scaled(z * l / 2.0);
    let sh_hp = sinh_scaled(z * p / 2.0);
    let sh_hq = sinh_scaled(z * q / 2.0);

    let two = Complex64::new(2.0, 0.0);
    let kz_shhl2 = kz * sh_hl * sh_hl;
    let beta1 = kz_shhl2.scale(two) + (gs * sh_q * sh_hp * sh_hp).scale(two);
    let beta2 = kz_shhl2.scale(two) + (gs * sh_p * sh_hq * sh_hq).scale(two);
    let gamma = kz_shhl2.scale(2.0 * two) + (gs * sh_hl * sh_hp * sh_hq).scale(4.0 * two);
    let eta = kz * sh_l + gs * sh_p * sh_q;

    AuxQuantities {
        z,
        beta1,
        beta2,
        gamma,
        eta,
    }
}

/// z, beta1, beta2, gamma, eta at the Laplace point `s`.
pub fn aux_quantities(s: Complex64, params: &StringParams, damper: &Damper) -> AuxQuantities {
    aux_with_root(s, principal_root(s, params), params, damper)
}

/// Same as [`aux_quantities`] with the opposite square-root branch; exposed
/// so branch invariance can be checked from outside the crate.
pub fn aux_quantities_negated_root(
    s: Complex64,
    params: &StringParams,
    damper: &Damper,
) -> AuxQuantities {
    aux_with_root(s, -principal_root(s, params), params, damper)
}

/// ln of the eta pole-guard scale: |k z sinh(z l)| + |g s sinh(z p) sinh(z q)|.
fn eta_guard_ln(s: Complex64, z: Complex64, params: &StringParams, damper: &Damper) -> f64 {
    let t1 = sinh_scaled(z * params.length)
        .scale(params.stiffness * z)
        .ln_norm();
    let t2 = (sinh_scaled(z * damper.position) * sinh_scaled(z * (params.length - damper.position)))
        .scale(damper.gain * s)
        .ln_norm();
    // ln(e^t1 + e^t2)
    let m = t1.max(t2);
    if m == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        m + ((t1 - m).exp() + (t2 - m).exp()).ln()
    }
}

fn eta_is_degenerate(aux: &AuxQuantities, s: Complex64, params: &StringParams, damper: &Damper) -> bool {
    aux.eta.ln_norm() < ETA_GUARD.ln() + eta_guard_ln(s, aux.z, params, damper)
}

/// Displacement transfer function for uniform forcing, evaluated with an
/// explicit root branch (results are even in z).
pub fn uniform_g_with_root(
    x: f64,
    s: Complex64,
    z: Complex64,
    params: &StringParams,
    damper: &Damper,
) -> Result<Complex64, EvalError> {
    assert!(
        (0.0..=params.length).contains(&x),
        "sample point x = {x} outside the string"
    );
    let denom = s * s + params.internal_damping * s;
    if denom == Complex64::new(0.0, 0.0) {
        return Err(EvalError::SingularPoint { s });
    }
    let aux = aux_with_root(s, z, params, damper);
    if eta_is_degenerate(&aux, s, params, damper) {
        return Err(EvalError::SingularPoint { s });
    }
    // x == p is assigned to the left branch; continuity makes the choice
    // observationally irrelevant
    let bracket = if x <= damper.position {
        ScaledComplex::one() - cosh_scaled(z * x) + aux.beta1 * sinh_scaled(z * x) / aux.eta
    } else {
        let y = params.length - x;
        ScaledComplex::one() - cosh_scaled(z * y) + aux.beta2 * sinh_scaled(z * y) / aux.eta
    };
    Ok(bracket.value() / denom)
}

/// Displacement transfer function G(x, s) for uniform forcing.
pub fn uniform_g(
    x: f64,
    s: Complex64,
    params: &StringParams,
    damper: &Damper,
) -> Result<Complex64, EvalError> {
    uniform_g_with_root(x, s, principal_root(s, params), params, damper)
}

/// Output transfer function for uniform forcing with an explicit root branch.
pub fn uniform_h_with_root(
    s: Complex64,
    z: Complex64,
    params: &StringParams,
    damper: &Damper,
) -> Result<Complex64, EvalError> {
    if z.norm() * params.length < Z_SWITCH {
        return series::uniform_h_series(s, z, params, damper);
    }
    let aux = aux_with_root(s, z, params, damper);
    if eta_is_degenerate(&aux, s, params, damper) {
        return Err(EvalError::PoleEncountered { s });
    }
    let zl = ScaledComplex::from_complex(z * params.length);
    let ratio = (aux.gamma / (zl * aux.eta)).value();
    Ok((1.0 - ratio) / (s * s + params.internal_damping * s))
}

/// Output transfer function H(s) for uniform forcing: the average of G over
/// the string. Near z = 0 (including s = 0 and s = -d, both removable) the
/// evaluation switches to a truncated-series form.
pub fn uniform_h(s: Complex64, params: &StringParams, damper: &Damper) -> Result<Complex64, EvalError> {
    uniform_h_with_root(s, principal_root(s, params), params, damper)
}

/// Displacement transfer function for boundary forcing with an explicit root
/// branch.
pub fn boundary_g_with_root(
    x: f64,
    s: Complex64,
    z: Complex64,
    params: &StringParams,
    damper: &Damper,
) -> Result<Complex64, EvalError> {
    assert!(
        (0.0..=params.length).contains(&x),
        "sample point x = {x} outside the string"
    );
    if s * s + params.internal_damping * s == Complex64::new(0.0, 0.0) {
        return Err(EvalError::SingularPoint { s });
    }
    let aux = aux_with_root(s, z, params, damper);
    if eta_is_degenerate(&aux, s, params, damper) {
        return Err(EvalError::SingularPoint { s });
    }
    let kz = ScaledComplex::from_complex(params.stiffness * z);
    let wave = kz * sinh_scaled(z * (params.length - x));
    let num = if x <= damper.position {
        let gs = ScaledComplex::from_complex(damper.gain * s);
        wave + gs * sinh_scaled(z * (damper.position - x)) * sinh_scaled(z * (params.length - damper.position))
    } else {
        wave
    };
    Ok((num / aux.eta).value())
}

/// Displacement transfer function G(x, s) for boundary forcing; G(0, s) = 1
/// and G(l, s) = 0.
pub fn boundary_g(
    x: f64,
    s: Complex64,
    params: &StringParams,
    damper: &Damper,
) -> Result<Complex64, EvalError> {
    boundary_g_with_root(x, s, principal_root(s, params), params, damper)
}

/// Output transfer function for boundary forcing with an explicit root branch.
pub fn boundary_h_with_root(
    s: Complex64,
    z: Complex64,
    params: &StringParams,
    damper: &Damper,
) -> Result<Complex64, EvalError> {
    if z.norm() * params.length < Z_SWITCH {
        return series::boundary_h_series(s, z, params, damper);
    }
    let aux = aux_with_root(s, z, params, damper);
    if eta_is_degenerate(&aux, s, params, damper) {
        return Err(EvalError::PoleEncountered { s });
    }
    let zl = ScaledComplex::from_complex(z * params.length);
    Ok((aux.beta1 / (zl * aux.eta)).value())
}

/// Output transfer function H(s) = beta1/(z l eta) for boundary forcing;
/// H(0) = 1/2 via the series path.
pub fn boundary_h(s: Complex64, params: &StringParams, damper: &Damper) -> Result<Complex64, EvalError> {
    boundary_h_with_root(s, principal_root(s, params), params, damper)
}

/// Output transfer function for the requested forcing.
pub fn transfer_h(
    s: Complex64,
    params: &StringParams,
    damper: &Damper,
    forcing: Forcing,
) -> Result<Complex64, EvalError> {
    match forcing {
        Forcing::Uniform => uniform_h(s, params, damper),
        Forcing::BoundaryLeft => boundary_h(s, params, damper),
    }
}

/// Displacement transfer function for the requested forcing.
pub fn transfer_g(
    x: f64,
    s: Complex64,
    params: &StringParams,
    damper: &Damper,
    forcing: Forcing,
) -> Result<Complex64, EvalError> {
    match forcing {
        Forcing::Uniform => uniform_g(x, s, params, damper),
        Forcing::BoundaryLeft => boundary_g(x, s, params, damper),
    }
}

/// Limiting cases of the output transfer function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitCase {
    /// s -> 0: l^2/(12 k) for uniform forcing, 1/2 for boundary forcing.
    AtZero,
    /// g = 0 (equivalently p -> 0 or p -> l): tanh-form closed expressions.
    NoDamping,
    /// g -> infinity: the damper pins the string at p.
    InfiniteGain,
}

/// Closed-form limit expressions of H. For `AtZero` the Laplace point is
/// ignored.
pub fn limit_h(
    s: Complex64,
    params: &StringParams,
    damper: &Damper,
    forcing: Forcing,
    which: LimitCase,
) -> Result<Complex64, EvalError> {
    let l = params.length;
    let k = params.stiffness;
    let z = principal_root(s, params);
    let small = z.norm() * l < Z_SWITCH;
    match (which, forcing) {
        (LimitCase::AtZero, Forcing::Uniform) => Ok(Complex64::new(l * l / (12.0 * k), 0.0)),
        (LimitCase::AtZero, Forcing::BoundaryLeft) => Ok(Complex64::new(0.5, 0.0)),
        (LimitCase::NoDamping, Forcing::Uniform) => {
            if small {
                return Ok(series::uniform_no_damping_series(z, params));
            }
            check_tanh_pole(s, z * l / 2.0)?;
            let w = z * l;
            Ok((w - 2.0 * tanh_stable(w / 2.0)) / (w * (s * s + params.internal_damping * s)))
        }
        (LimitCase::NoDamping, Forcing::BoundaryLeft) => {
            if small {
                return Ok(series::boundary_tanh_series(z, l, l));
            }
            check_tanh_pole(s, z * l / 2.0)?;
            Ok(tanh_stable(z * l / 2.0) / (z * l))
        }
        (LimitCase::InfiniteGain, Forcing::Uniform) => {
            if small {
                return Ok(series::uniform_infinite_gain_series(z, params, damper));
            }
            let (p, q) = (damper.position, l - damper.position);
            check_tanh_pole(s, z * p / 2.0)?;
            check_tanh_pole(s, z * q / 2.0)?;
            let w = z * l;
            let t = 2.0 * (tanh_stable(z * p / 2.0) + tanh_stable(z * q / 2.0));
            Ok((w - t) / (w * (s * s + params.internal_damping * s)))
        }
        (LimitCase::InfiniteGain, Forcing::BoundaryLeft) => {
            if small {
                return Ok(series::boundary_tanh_series(z, damper.position, l));
            }
            check_tanh_pole(s, z * damper.position / 2.0)?;
            Ok(tanh_stable(z * damper.position / 2.0) / (z * l))
        }
    }
}

/// The limit formulas are built from tanh(w); they are singular where
/// cosh(w) vanishes (undamped resonances when d = 0).
fn check_tanh_pole(s: Complex64, w: Complex64) -> Result<(), EvalError> {
    let ch = cosh_scaled(w);
    let sh = sinh_scaled(w);
    if ch.ln_norm() < COSH_GUARD.ln() + sh.ln_norm() {
        return Err(EvalError::SingularPoint { s });
    }
    Ok(())
}

/// Independent evaluation of H(s) as the average of G over the string by
/// composite Gauss-Legendre quadrature on [0, p] and [p, l], where G is
/// smooth. Converges to `uniform_h`/`boundary_h` as `n_points` grows; kept
/// as a cross-check oracle for the closed forms.
pub fn h_from_g_quadrature(
    s: Complex64,
    params: &StringParams,
    damper: &Damper,
    forcing: Forcing,
    n_points: usize,
) -> Result<Complex64, EvalError> {
    assert!(n_points >= 16, "need at least 16 quadrature points");
    let (nodes, weights) = gauss_legendre(n_points);
    let g = |x: f64| transfer_g(x, s, params, damper, forcing);
    let mut total = Complex64::new(0.0, 0.0);
    if damper.position > 0.0 {
        total += gauss::integrate(&nodes, &weights, 0.0, damper.position, g)?;
    }
    if damper.position < params.length {
        total += gauss::integrate(&nodes, &weights, damper.position, params.length, g)?;
    }
    Ok(total / params.length)
}

#[cfg(test)]
mod tests;
