//! Grid sweeps and local minimization of the damping criteria over damper
//! position and viscosity.

use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;

use crate::analytic::{self, EvalError};
use crate::discrete::{discrete_tf, discretize, DiscreteError, SecondOrderSystem};
use crate::norms::{h2_norm, hinf_norm, FrequencyResponse, NormConfig, NormError};
use crate::params::{Damper, Forcing, ModelError, StringParams};

/// Damping criterion to evaluate or minimize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    H2,
    Hinf,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::H2 => write!(f, "h2"),
            Criterion::Hinf => write!(f, "hinf"),
        }
    }
}

/// Transfer-function backend: the closed forms or a finite-difference grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Analytic,
    Discrete { n: usize },
}

/// Rectangular sweep: linear in position, logarithmic in gain.
#[derive(Clone, Copy, Debug)]
pub struct SweepSpec {
    /// (lo, hi, count), spaced linearly; `lo = 0` and `hi = length` are
    /// admitted (the damper is inert there).
    pub p_range: (f64, f64, usize),
    /// (lo, hi, count), spaced logarithmically; requires lo > 0.
    pub g_range: (f64, f64, usize),
    pub criterion: Criterion,
    pub forcing: Forcing,
    pub backend: Backend,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridCell {
    pub p: f64,
    pub g: f64,
    pub value: f64,
}

/// Criterion values over the sweep grid; `values[i][j]` belongs to
/// `(g_values[i], p_values[j])`. Cells whose norm diverged hold
/// `f64::INFINITY`.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub p_values: Vec<f64>,
    pub g_values: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub min_cell: GridCell,
    pub max_cell: GridCell,
}

#[derive(Clone, Debug)]
pub enum OptimError {
    InvalidSpec(String),
    Model(ModelError),
    Discrete(DiscreteError),
    /// Every start exhausted its iteration budget; carries the best point
    /// seen so far.
    NoConvergence(Box<OptimResult>),
}

impl fmt::Display for OptimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimError::InvalidSpec(msg) => write!(f, "invalid specification: {msg}"),
            OptimError::Model(e) => write!(f, "{e}"),
            OptimError::Discrete(e) => write!(f, "{e}"),
            OptimError::NoConvergence(best) => write!(
                f,
                "no start converged; best value {} at ({}, {})",
                best.value, best.p_star, best.g_star
            ),
        }
    }
}

impl std::error::Error for OptimError {}

impl From<ModelError> for OptimError {
    fn from(e: ModelError) -> Self {
        OptimError::Model(e)
    }
}

impl From<DiscreteError> for OptimError {
    fn from(e: DiscreteError) -> Self {
        OptimError::Discrete(e)
    }
}

struct AnalyticResponse {
    params: StringParams,
    damper: Damper,
    forcing: Forcing,
}

impl FrequencyResponse for AnalyticResponse {
    fn evaluate(&self, omega: f64) -> Result<Complex64, EvalError> {
        analytic::transfer_h(
            Complex64::new(0.0, omega),
            &self.params,
            &self.damper,
            self.forcing,
        )
    }
}

struct DiscreteResponse {
    sys: SecondOrderSystem,
}

impl FrequencyResponse for DiscreteResponse {
    fn evaluate(&self, omega: f64) -> Result<Complex64, EvalError> {
        let s = Complex64::new(0.0, omega);
        discrete_tf(&self.sys, s).map_err(|_| EvalError::PoleEncountered { s })
    }
}

/// Evaluate one criterion value for a concrete damper.
pub fn evaluate_criterion(
    criterion: Criterion,
    forcing: Forcing,
    backend: Backend,
    params: &StringParams,
    damper: &Damper,
    cfg: &NormConfig,
) -> Result<f64, OptimError> {
    let resp: Box<dyn FrequencyResponse> = match backend {
        Backend::Analytic => Box::new(AnalyticResponse {
            params: *params,
            damper: *damper,
            forcing,
        }),
        Backend::Discrete { n } => Box::new(DiscreteResponse {
            sys: discretize(n, params, damper, forcing)?,
        }),
    };
    let value = match criterion {
        Criterion::H2 => h2_norm(resp.as_ref(), cfg),
        Criterion::Hinf => hinf_norm(resp.as_ref(), params, cfg).map(|r| r.value),
    };
    match value {
        Ok(v) => Ok(v),
        // a pole on the axis in one cell is data, not a failure
        Err(NormError::Diverged { .. } | NormError::Eval(_)) => Ok(f64::INFINITY),
        Err(NormError::InvalidConfig) => {
            Err(OptimError::InvalidSpec("invalid norm configuration".into()))
        }
    }
}

/// Evaluate the criterion at every cell of the grid. Cells are independent
/// and run in parallel; the aggregation order is fixed, so the result is
/// deterministic.
pub fn sweep(
    spec: &SweepSpec,
    params: &StringParams,
    cfg: &NormConfig,
) -> Result<SweepResult, OptimError> {
    let (p_lo, p_hi, np) = spec.p_range;
    let (g_lo, g_hi, ng) = spec.g_range;
    if !(0.0 <= p_lo && p_lo <= p_hi && p_hi <= params.length) || np < 2 {
        return Err(OptimError::InvalidSpec(format!(
            "position range [{p_lo}, {p_hi}] x {np} invalid for length {}",
            params.length
        )));
    }
    if !(0.0 < g_lo && g_lo <= g_hi) || ng < 2 {
        return Err(OptimError::InvalidSpec(format!(
            "gain range [{g_lo}, {g_hi}] x {ng} invalid (need 0 < lo <= hi)"
        )));
    }
    if let Backend::Discrete { n } = spec.backend {
        // surface grid errors before burning through the whole sweep
        discretize(n, params, &Damper::new(p_lo.max(1e-9), g_lo)?, spec.forcing)?;
    }

    let p_values: Vec<f64> = (0..np)
        .map(|j| p_lo + (p_hi - p_lo) * j as f64 / (np - 1) as f64)
        .collect();
    let ratio = g_hi / g_lo;
    let g_values: Vec<f64> = (0..ng)
        .map(|i| g_lo * ratio.powf(i as f64 / (ng - 1) as f64))
        .collect();

    let flat: Result<Vec<f64>, OptimError> = (0..np * ng)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / np, idx % np);
            let damper = Damper::new(p_values[j], g_values[i])?;
            evaluate_criterion(
                spec.criterion,
                spec.forcing,
                spec.backend,
                params,
                &damper,
                cfg,
            )
        })
        .collect();
    let flat = flat?;

    let values: Vec<Vec<f64>> = flat.chunks(np).map(|row| row.to_vec()).collect();
    let mut min_cell = GridCell {
        p: p_values[0],
        g: g_values[0],
        value: f64::INFINITY,
    };
    let mut max_cell = GridCell {
        p: p_values[0],
        g: g_values[0],
        value: f64::NEG_INFINITY,
    };
    for (i, row) in values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v < min_cell.value {
                min_cell = GridCell {
                    p: p_values[j],
                    g: g_values[i],
                    value: v,
                };
            }
            if v > max_cell.value {
                max_cell = GridCell {
                    p: p_values[j],
                    g: g_values[i],
                    value: v,
                };
            }
        }
    }
    Ok(SweepResult {
        p_values,
        g_values,
        values,
        min_cell,
        max_cell,
    })
}

/// Search box for [`minimize`].
#[derive(Clone, Copy, Debug)]
pub struct OptimBounds {
    pub p: (f64, f64),
    pub g: (f64, f64),
}

#[derive(Clone, Copy, Debug)]
pub struct OptimResult {
    pub p_star: f64,
    pub g_star: f64,
    pub value: f64,
    pub evaluations: u64,
    pub converged: bool,
}

/// A 5x5 grid of starting points strictly inside the bounds, gain
/// log-spaced.
pub fn default_starts(bounds: &OptimBounds) -> Vec<(f64, f64)> {
    let mut starts = Vec::with_capacity(25);
    for i in 0..5 {
        let fi = (i as f64 + 0.5) / 5.0;
        let p = bounds.p.0 + (bounds.p.1 - bounds.p.0) * fi;
        for j in 0..5 {
            let fj = (j as f64 + 0.5) / 5.0;
            let g = bounds.g.0 * (bounds.g.1 / bounds.g.0).powf(fj);
            starts.push((p, g));
        }
    }
    starts
}

const SIMPLEX_DIAMETER_TOL: f64 = 1e-4;
const MAX_ITERS_PER_START: u64 = 400;

/// Multi-start Nelder-Mead minimization of a damping criterion over
/// (position, gain); the gain is optimized in log-space. A start counts as
/// converged when its simplex diameter in (p, ln g) drops below 1e-4.
pub fn minimize(
    criterion: Criterion,
    forcing: Forcing,
    params: &StringParams,
    bounds: &OptimBounds,
    starts: &[(f64, f64)],
    cfg: &NormConfig,
) -> Result<OptimResult, OptimError> {
    if starts.is_empty() {
        return Err(OptimError::InvalidSpec("need at least one start".into()));
    }
    if !(0.0 <= bounds.p.0 && bounds.p.0 <= bounds.p.1 && bounds.p.1 <= params.length) {
        return Err(OptimError::InvalidSpec(format!(
            "position bounds [{}, {}] invalid",
            bounds.p.0, bounds.p.1
        )));
    }
    if !(0.0 < bounds.g.0 && bounds.g.0 <= bounds.g.1) {
        return Err(OptimError::InvalidSpec(format!(
            "gain bounds [{}, {}] invalid",
            bounds.g.0, bounds.g.1
        )));
    }

    let eval = |p: f64, g: f64| -> f64 {
        match Damper::new(p, g) {
            Ok(d) => evaluate_criterion(criterion, forcing, Backend::Analytic, params, &d, cfg)
                .unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    };

    let p_fixed = bounds.p.0 == bounds.p.1;
    let g_fixed = bounds.g.0 == bounds.g.1;
    if p_fixed && g_fixed {
        let value = eval(bounds.p.0, bounds.g.0);
        return Ok(OptimResult {
            p_star: bounds.p.0,
            g_star: bounds.g.0,
            value,
            evaluations: 1,
            converged: true,
        });
    }

    let lo = [bounds.p.0, bounds.g.0.ln()];
    let hi = [bounds.p.1, bounds.g.1.ln()];
    let objective = |x: &[f64]| -> f64 {
        for d in 0..2 {
            if x[d] < lo[d] || x[d] > hi[d] {
                return f64::INFINITY;
            }
        }
        eval(x[0], x[1].exp())
    };

    let runs: Vec<(Vec<f64>, f64, u64, bool)> = starts
        .par_iter()
        .map(|&(p0, g0)| {
            let x0 = [p0.clamp(lo[0], hi[0]), g0.ln().clamp(lo[1], hi[1])];
            let mut free_dims = Vec::new();
            if !p_fixed {
                free_dims.push(0);
            }
            if !g_fixed {
                free_dims.push(1);
            }
            nelder_mead(&objective, &x0, &lo, &hi, &free_dims)
        })
        .collect();

    let mut evaluations: u64 = runs.iter().map(|r| r.2).sum();
    let mut best: Option<&(Vec<f64>, f64, u64, bool)> = None;
    for run in &runs {
        let better = match best {
            None => true,
            Some(b) => run.1 < b.1,
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.unwrap();
    let converged = runs.iter().any(|r| r.3) && best.1.is_finite();

    let p_star = best.0[0];
    let g_star = best.0[1].exp();
    let value = eval(p_star, g_star);
    evaluations += 1;
    let result = OptimResult {
        p_star,
        g_star,
        value,
        evaluations,
        converged,
    };
    if !converged {
        return Err(OptimError::NoConvergence(Box::new(result)));
    }
    Ok(result)
}

/// Nelder-Mead over the free coordinates of `x0` with reflection 1,
/// expansion 2, contraction 1/2 and shrink 1/2. Returns (point, value,
/// evaluations, converged).
fn nelder_mead(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    x0: &[f64; 2],
    lo: &[f64; 2],
    hi: &[f64; 2],
    free_dims: &[usize],
) -> (Vec<f64>, f64, u64, bool) {
    let dim = free_dims.len();
    let mut evals: u64 = 0;
    let mut count_eval = |x: &[f64; 2]| -> f64 {
        evals += 1;
        f(x)
    };

    // initial simplex: step 15% of each free range, pointed inward
    let mut vertices: Vec<[f64; 2]> = vec![*x0];
    for &d in free_dims {
        let mut v = *x0;
        let span = hi[d] - lo[d];
        let step = 0.15 * span;
        v[d] = if v[d] + step <= hi[d] { v[d] + step } else { v[d] - step };
        vertices.push(v);
    }
    let mut values: Vec<f64> = vertices.iter().map(|v| count_eval(v)).collect();

    let mut converged = false;
    for _ in 0..MAX_ITERS_PER_START {
        // order ascending by value
        let mut idx: Vec<usize> = (0..vertices.len()).collect();
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let ordered: Vec<[f64; 2]> = idx.iter().map(|&i| vertices[i]).collect();
        let ordered_vals: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
        vertices = ordered;
        values = ordered_vals;

        let diameter = vertices
            .iter()
            .flat_map(|a| {
                vertices.iter().map(move |b| {
                    free_dims
                        .iter()
                        .map(|&d| (a[d] - b[d]).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
            })
            .fold(0.0, f64::max);
        if diameter < SIMPLEX_DIAMETER_TOL {
            converged = true;
            break;
        }

        let worst = dim;
        let mut centroid = [0.0; 2];
        centroid.copy_from_slice(x0);
        for &d in free_dims {
            centroid[d] = vertices[..worst].iter().map(|v| v[d]).sum::<f64>() / worst as f64;
        }

        let blend = |from: &[f64; 2], towards: &[f64; 2], t: f64| -> [f64; 2] {
            let mut out = *from;
            for &d in free_dims {
                out[d] = from[d] + t * (towards[d] - from[d]);
            }
            out
        };

        // reflect the worst vertex through the centroid
        let reflected = blend(&centroid, &vertices[worst], -1.0);
        let f_r = count_eval(&reflected);
        if f_r < values[0] {
            let expanded = blend(&centroid, &vertices[worst], -2.0);
            let f_e = count_eval(&expanded);
            if f_e < f_r {
                vertices[worst] = expanded;
                values[worst] = f_e;
            } else {
                vertices[worst] = reflected;
                values[worst] = f_r;
            }
        } else if f_r < values[worst - 1] {
            vertices[worst] = reflected;
            values[worst] = f_r;
        } else {
            let contracted = if f_r < values[worst] {
                blend(&centroid, &vertices[worst], -0.5)
            } else {
                blend(&centroid, &vertices[worst], 0.5)
            };
            let f_c = count_eval(&contracted);
            if f_c < values[worst].min(f_r) {
                vertices[worst] = contracted;
                values[worst] = f_c;
            } else {
                // shrink towards the best vertex
                let best = vertices[0];
                for i in 1..=worst {
                    vertices[i] = blend(&vertices[i], &best, 0.5);
                    values[i] = count_eval(&vertices[i]);
                }
            }
        }
    }

    let mut best_i = 0;
    for i in 1..values.len() {
        if values[i] < values[best_i] {
            best_i = i;
        }
    }
    (vertices[best_i].to_vec(), values[best_i], evals, converged)
}
