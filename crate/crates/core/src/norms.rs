//! H-infinity and H2 norms of a scalar frequency response.
//!
//! The response of the damped string is a comb of resonance peaks spaced
//! roughly `pi*sqrt(k)/l` apart, so naive uniform sampling misses peaks and
//! naive quadrature misses their mass. The H-infinity search scans with a
//! modal-spacing-aware density and then refines every competitive local
//! maximum by golden-section search; the H2 integral uses adaptive
//! Gauss-Kronrod panels seeded finer than the modal spacing, plus a
//! closed-form tail bound fitted over the last modal periods.

use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;

use crate::analytic::EvalError;
use crate::params::{Forcing, StringParams};

/// A scalar transfer function restricted to the imaginary axis: maps a
/// frequency `omega >= 0` to `H(i*omega)`. Conjugate symmetry is assumed, so
/// negative frequencies are never requested.
pub trait FrequencyResponse: Sync {
    fn evaluate(&self, omega: f64) -> Result<Complex64, EvalError>;
}

impl<F> FrequencyResponse for F
where
    F: Fn(f64) -> Result<Complex64, EvalError> + Sync,
{
    fn evaluate(&self, omega: f64) -> Result<Complex64, EvalError> {
        self(omega)
    }
}

/// Asymptotic decay class of |H(i*omega)| used for the truncation tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailDecay {
    /// |H| ~ C/omega (boundary forcing).
    InverseOmega,
    /// |H| ~ C/omega^2 (uniform forcing).
    InverseOmegaSq,
}

/// Tuning parameters for the norm computations.
#[derive(Clone, Copy, Debug)]
pub struct NormConfig {
    /// Truncation frequency of scans and quadrature.
    pub omega_max: f64,
    /// Relative tolerance of the adaptive H2 quadrature.
    pub quad_rel_tol: f64,
    /// H-infinity scan density per modal spacing.
    pub peak_samples_per_mode: usize,
    /// Golden-section iterations per refined maximum.
    pub refine_iters: usize,
    /// Tail decay class beyond `omega_max`.
    pub tail_decay: TailDecay,
    /// Initial uniform panel count of the H2 quadrature.
    pub seed_panels: usize,
    /// Hard cap on adaptive panels before NormDiverged is reported.
    pub max_panels: usize,
    /// Width of the tail-fit window as a fraction of `omega_max`.
    pub tail_fit_fraction: f64,
    /// Local maxima within this factor of the best scanned sample are
    /// refined by golden-section search.
    pub refine_threshold: f64,
}

/// Modal spacings covered by the default truncation frequency. Fifty
/// spacings suffice for uniform forcing, but the boundary response decays
/// only like 1/omega, and a strong damper near an endpoint pushes response
/// mass to the stub resonances near pi*sqrt(k)/p; one hundred spacings keep
/// those inside the integration range for every cell of the figure grids.
const DEFAULT_OMEGA_MAX_MODES: f64 = 100.0;

impl NormConfig {
    /// Defaults tied to the modal spacing of a concrete string, with the
    /// tail class read off the large-frequency behavior of each forcing.
    pub fn for_params(params: &StringParams, forcing: Forcing) -> Self {
        let spacing = params.modal_spacing();
        let omega_max = DEFAULT_OMEGA_MAX_MODES * spacing;
        NormConfig {
            omega_max,
            quad_rel_tol: 1e-6,
            peak_samples_per_mode: 8,
            refine_iters: 60,
            tail_decay: match forcing {
                Forcing::Uniform => TailDecay::InverseOmegaSq,
                Forcing::BoundaryLeft => TailDecay::InverseOmega,
            },
            seed_panels: (DEFAULT_OMEGA_MAX_MODES as usize) * 4,
            max_panels: 40_000,
            tail_fit_fraction: 10.0 / DEFAULT_OMEGA_MAX_MODES,
            refine_threshold: 0.4,
        }
    }

    pub fn validate(&self) -> Result<(), NormError> {
        if !(self.omega_max > 0.0)
            || !(self.quad_rel_tol > 0.0 && self.quad_rel_tol <= 1e-2)
            || self.peak_samples_per_mode < 8
        {
            return Err(NormError::InvalidConfig);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormError {
    /// The norm does not exist (pole on the axis) or the quadrature could
    /// not resolve it within the panel budget.
    Diverged { detail: String },
    InvalidConfig,
    Eval(EvalError),
}

impl fmt::Display for NormError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormError::Diverged { detail } => write!(f, "norm diverged: {detail}"),
            NormError::InvalidConfig => write!(f, "invalid norm configuration"),
            NormError::Eval(e) => write!(f, "response evaluation failed: {e}"),
        }
    }
}

impl std::error::Error for NormError {}

impl From<EvalError> for NormError {
    fn from(e: EvalError) -> Self {
        NormError::Eval(e)
    }
}

/// H-infinity norm value together with the frequency attaining it.
#[derive(Clone, Copy, Debug)]
pub struct HinfResult {
    pub value: f64,
    pub argmax_omega: f64,
}

/// Supremum of |H(i*omega)| over [0, omega_max].
///
/// Scans with at least `peak_samples_per_mode` points per modal spacing
/// (omega = 0 always included as a candidate), then golden-section refines
/// every competitive interior local maximum. Reports divergence when one
/// sample towers over the median by more than 1/quad_rel_tol.
pub fn hinf_norm(
    resp: &dyn FrequencyResponse,
    params: &StringParams,
    cfg: &NormConfig,
) -> Result<HinfResult, NormError> {
    cfg.validate()?;
    let spacing = params.modal_spacing();
    let n = ((cfg.omega_max / spacing).ceil() as usize) * cfg.peak_samples_per_mode + 1;
    let step = cfg.omega_max / (n - 1) as f64;

    let mag: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| magnitude_or_inf(resp, i as f64 * step))
        .collect();

    // pole-on-axis detection: a diverging sample dwarfs the median
    let mut sorted: Vec<f64> = mag.iter().copied().filter(|m| m.is_finite()).collect();
    if sorted.is_empty() {
        return Err(NormError::Diverged {
            detail: "response not finite anywhere on the scan".into(),
        });
    }
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let peak = *sorted.last().unwrap();
    if mag.iter().any(|m| !m.is_finite()) || peak > median / cfg.quad_rel_tol {
        return Err(NormError::Diverged {
            detail: format!("scan peak {peak:.3e} exceeds median {median:.3e} beyond 1/tol"),
        });
    }

    let mut best = mag[0];
    let mut best_omega = 0.0;
    if mag[n - 1] > best {
        best = mag[n - 1];
        best_omega = cfg.omega_max;
    }
    for i in 1..n - 1 {
        if mag[i] >= mag[i - 1] && mag[i] >= mag[i + 1] && mag[i] > best {
            best = mag[i];
            best_omega = i as f64 * step;
        }
    }

    // refine every local maximum that could contend with the best sample
    let cutoff = best * cfg.refine_threshold;
    let refined: Vec<(f64, f64)> = (1..n - 1)
        .into_par_iter()
        .filter(|&i| mag[i] >= mag[i - 1] && mag[i] >= mag[i + 1] && mag[i] >= cutoff)
        .map(|i| {
            golden_section_max(
                |w| magnitude_or_inf(resp, w),
                (i - 1) as f64 * step,
                (i + 1) as f64 * step,
                cfg.refine_iters,
            )
        })
        .collect();
    for (value, omega) in refined {
        if value > best {
            best = value;
            best_omega = omega;
        }
    }
    // a pole on the axis reveals itself under refinement even when the
    // coarse scan straddles it
    if !best.is_finite() || best > median / cfg.quad_rel_tol {
        return Err(NormError::Diverged {
            detail: format!("refined peak {best:.3e} exceeds median {median:.3e} beyond 1/tol"),
        });
    }
    Ok(HinfResult {
        value: best,
        argmax_omega: best_omega,
    })
}

fn magnitude_or_inf(resp: &dyn FrequencyResponse, omega: f64) -> f64 {
    match resp.evaluate(omega) {
        Ok(v) => v.norm(),
        Err(_) => f64::INFINITY,
    }
}

/// Golden-section maximization on [a, b]; returns (max, argmax).
fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (fc, c)
    } else {
        (fd, d)
    }
}

/// H2 norm: sqrt((1/pi) * (int_0^omega_max |H(i w)|^2 dw + tail)).
///
/// The conjugate-symmetry factor 2 and the 1/(2 pi) of the definition
/// combine into 1/pi. The tail is the closed-form integral of the fitted
/// asymptote C/omega or C/omega^2, with C^2 fitted as the integral mean of
/// |H omega^decay|^2 over the last `tail_fit_fraction` of the range (a
/// single-point fit is useless against an oscillating comb).
pub fn h2_norm(resp: &dyn FrequencyResponse, cfg: &NormConfig) -> Result<f64, NormError> {
    cfg.validate()?;
    let body = adaptive_squared_integral(resp, 0.0, cfg.omega_max, cfg)?;
    let tail = tail_bound(resp, cfg)?;
    Ok(((body + tail) / std::f64::consts::PI).sqrt())
}

/// The tail term of [`h2_norm`], exposed for truncation-error reporting.
pub fn tail_bound(resp: &dyn FrequencyResponse, cfg: &NormConfig) -> Result<f64, NormError> {
    let window = cfg.tail_fit_fraction * cfg.omega_max;
    let lo = cfg.omega_max - window;
    let decay = match cfg.tail_decay {
        TailDecay::InverseOmega => 1,
        TailDecay::InverseOmegaSq => 2,
    };
    // fixed 16-panel GK pass over the fit window
    let mut c2_integral = 0.0;
    let nw = 16;
    for i in 0..nw {
        let a = lo + window * i as f64 / nw as f64;
        let b = lo + window * (i + 1) as f64 / nw as f64;
        let (val, _) = gk15(
            &|w: f64| {
                let m = magnitude_or_inf(resp, w);
                m * m * w.powi(2 * decay)
            },
            a,
            b,
        );
        c2_integral += val;
    }
    if !c2_integral.is_finite() {
        return Err(NormError::Diverged {
            detail: "tail window contains a pole".into(),
        });
    }
    let c2 = c2_integral / window;
    Ok(match cfg.tail_decay {
        TailDecay::InverseOmega => c2 / cfg.omega_max,
        TailDecay::InverseOmegaSq => c2 / (3.0 * cfg.omega_max.powi(3)),
    })
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Adaptive Gauss-Kronrod integral of |H(i w)|^2 over [lo, hi]: uniform seed
/// panels, then worst-panel bisection until the summed error estimate meets
/// `quad_rel_tol` or the panel budget is exhausted. The final sum runs in
/// left-to-right panel order so the result is independent of evaluation
/// order.
fn adaptive_squared_integral(
    resp: &dyn FrequencyResponse,
    lo: f64,
    hi: f64,
    cfg: &NormConfig,
) -> Result<f64, NormError> {
    let f = |w: f64| {
        let m = magnitude_or_inf(resp, w);
        m * m
    };
    let seeds = cfg.seed_panels.max(16);
    let width = (hi - lo) / seeds as f64;
    let mut panels: Vec<Panel> = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let a = lo + i as f64 * width;
            let b = lo + (i + 1) as f64 * width;
            let (value, error) = gk15(&f, a, b);
            Panel { a, b, value, error }
        })
        .collect();

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if !total.is_finite() {
            return Err(NormError::Diverged {
                detail: "integrand not finite (pole on the imaginary axis)".into(),
            });
        }
        if err <= cfg.quad_rel_tol * total.abs() {
            break;
        }
        if panels.len() >= cfg.max_panels {
            return Err(NormError::Diverged {
                detail: format!(
                    "H2 quadrature did not reach tolerance {} within {} panels",
                    cfg.quad_rel_tol, cfg.max_panels
                ),
            });
        }
        // split the worst panel; ties broken by position for determinism
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.error.total_cmp(&y.error).then(y.a.total_cmp(&x.a)))
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        let (v1, e1) = gk15(&f, a, mid);
        let (v2, e2) = gk15(&f, mid, b);
        panels[worst] = Panel {
            a,
            b: mid,
            value: v1,
            error: e1,
        };
        panels.push(Panel {
            a: mid,
            b,
            value: v2,
            error: e2,
        });
    }
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(panels.iter().map(|p| p.value).sum())
}

/// 15-point Gauss-Kronrod rule on [a, b]; returns (integral, error estimate).
fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    // nodes on [0, 1] side of the symmetric 15-point Kronrod rule
    const XGK: [f64; 8] = [
        0.991455371120813,
        0.949107912342759,
        0.864864423359769,
        0.741531185599394,
        0.586087235467691,
        0.405845151377397,
        0.207784955007898,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
    ];
    const WG: [f64; 4] = [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
    ];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_mid = f(mid);
    let mut fv = [0.0; 14];
    let mut kronrod = WGK[7] * f_mid;
    let mut gauss = WG[3] * f_mid;
    let mut resabs = WGK[7] * f_mid.abs();
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(mid - x);
        let f2 = f(mid + x);
        fv[j] = f1;
        fv[7 + j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (f_mid - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[7 + j] - mean).abs());
    }
    resabs *= half.abs();
    resasc *= half.abs();
    let value = kronrod * half;
    // QUADPACK-style rescale: the raw Gauss/Kronrod difference grossly
    // overestimates the Kronrod error on smooth panels
    let raw = ((kronrod - gauss) * half).abs();
    let mut err = raw;
    if resasc != 0.0 && raw != 0.0 {
        let scale = (200.0 * raw / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}
