//! Finite-difference semi-discretization of the damped string.
//!
//! A uniform grid with `n` subintervals turns the PDE into
//! `M q'' + (d I + (g/h) e_k e_k^T) q' + K q = B u` over the `n - 1` interior
//! nodes, with `K` the scaled second-difference matrix and the damper applied
//! at the node nearest its position. The transfer function is evaluated with
//! one tridiagonal solve plus a Sherman-Morrison rank-one correction (O(n)
//! per point), and an independent H2 value comes from the controllability
//! Lyapunov equation of the first-order realization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt;

use crate::analytic::{self, EvalError};
use crate::params::{Damper, Forcing, StringParams};

#[derive(Clone, Debug, PartialEq)]
pub enum DiscreteError {
    /// Fewer than 4 subintervals.
    InvalidGrid(usize),
    /// The tridiagonal factorization of s^2 M + s D + K broke down.
    SingularPencil,
    /// The first-order realization is not asymptotically stable.
    UnstableSystem,
    /// H2 of a system with direct feedthrough is infinite; compute the
    /// quadrature H2 of the truncated response instead.
    FeedthroughNonzero,
    /// The real Schur iteration did not converge.
    SchurFailed,
    /// The analytic reference value could not be evaluated.
    Analytic(EvalError),
}

impl fmt::Display for DiscreteError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscreteError::InvalidGrid(n) => write!(f, "grid needs at least 4 subintervals, got {n}"),
            DiscreteError::SingularPencil => write!(f, "singular pencil s^2 M + s D + K"),
            DiscreteError::UnstableSystem => write!(f, "first-order realization is unstable"),
            DiscreteError::FeedthroughNonzero => {
                write!(f, "H2 undefined for nonzero feedthrough (boundary forcing)")
            }
            DiscreteError::SchurFailed => write!(f, "real Schur decomposition failed"),
            DiscreteError::Analytic(e) => write!(f, "analytic reference failed: {e}"),
        }
    }
}

impl std::error::Error for DiscreteError {}

impl From<EvalError> for DiscreteError {
    fn from(e: EvalError) -> Self {
        DiscreteError::Analytic(e)
    }
}

/// The discretized second-order system. The mass matrix is the identity, the
/// stiffness matrix is the symmetric tridiagonal `k/h^2 * {-1, 2, -1}` and
/// the damping matrix is `d I` plus the rank-one damper term
/// `(g/h) e_k e_k^T`; only the scalars are stored.
#[derive(Clone, Debug)]
pub struct SecondOrderSystem {
    n: usize,
    h: f64,
    stiffness_coeff: f64,
    internal_damping: f64,
    damper_node: usize,
    damper_gain_scaled: f64,
    input: Vec<f64>,
    output: Vec<f64>,
    feedthrough: f64,
}

impl SecondOrderSystem {
    /// Number of interior nodes (matrix dimension).
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    /// Number of subintervals.
    pub fn subintervals(&self) -> usize {
        self.n
    }

    pub fn grid_step(&self) -> f64 {
        self.h
    }

    /// 1-based interior node index carrying the damper.
    pub fn damper_node(&self) -> usize {
        self.damper_node
    }

    /// g/h, the rank-one damping weight.
    pub fn damper_gain_scaled(&self) -> f64 {
        self.damper_gain_scaled
    }

    pub fn input(&self) -> &[f64] {
        &self.input
    }

    pub fn output(&self) -> &[f64] {
        &self.output
    }

    pub fn feedthrough(&self) -> f64 {
        self.feedthrough
    }

    /// Dense stiffness matrix K (for oracles and the Lyapunov solve).
    pub fn dense_stiffness(&self) -> DMatrix<f64> {
        let m = self.dim();
        let mut k = DMatrix::zeros(m, m);
        for i in 0..m {
            k[(i, i)] = 2.0 * self.stiffness_coeff;
            if i + 1 < m {
                k[(i, i + 1)] = -self.stiffness_coeff;
                k[(i + 1, i)] = -self.stiffness_coeff;
            }
        }
        k
    }

    /// Dense damping matrix D = d I + (g/h) e_k e_k^T.
    pub fn dense_damping(&self) -> DMatrix<f64> {
        let m = self.dim();
        let mut d = DMatrix::from_diagonal_element(m, m, self.internal_damping);
        let idx = self.damper_node - 1;
        d[(idx, idx)] += self.damper_gain_scaled;
        d
    }
}

/// Build the finite-difference system on `n` subintervals (`h = l/n`). The
/// damper lands on the nearest interior node, which caps the position
/// resolution at `h` - exactly the limitation the continuous model removes.
pub fn discretize(
    n: usize,
    params: &StringParams,
    damper: &Damper,
    forcing: Forcing,
) -> Result<SecondOrderSystem, DiscreteError> {
    if n < 4 {
        return Err(DiscreteError::InvalidGrid(n));
    }
    let m = n - 1;
    let h = params.length / n as f64;
    let damper_node = ((damper.position / h).round() as usize).clamp(1, m);
    let (input, output, feedthrough) = match forcing {
        Forcing::Uniform => (vec![1.0; m], vec![1.0 / n as f64; m], 0.0),
        Forcing::BoundaryLeft => {
            let mut b = vec![0.0; m];
            b[0] = params.stiffness / (h * h);
            // trapezoidal average: interior weights h/l, boundary node
            // q_0 = u contributes (h/2)/l directly to the output
            (b, vec![1.0 / n as f64; m], h / (2.0 * params.length))
        }
    };
    Ok(SecondOrderSystem {
        n,
        h,
        stiffness_coeff: params.stiffness / (h * h),
        internal_damping: params.internal_damping,
        damper_node,
        damper_gain_scaled: damper.gain / h,
        input,
        output,
        feedthrough,
    })
}

/// Solve the complex symmetric tridiagonal system with constant
/// off-diagonal `off` and diagonal `diag` for several right-hand sides
/// living in `rhs` columns. Plain Thomas elimination; the complex shift off
/// the real axis keeps the pivots away from zero.
fn tridiag_solve(
    diag: &[Complex64],
    off: Complex64,
    rhs: &mut [Vec<Complex64>],
) -> Result<(), DiscreteError> {
    let m = diag.len();
    let scale = diag.iter().map(|d| d.norm()).fold(2.0 * off.norm(), f64::max);
    let mut main = diag.to_vec();
    for i in 1..m {
        let pivot = main[i - 1];
        if !pivot.is_finite() || pivot.norm() < 1e-15 * scale {
            return Err(DiscreteError::SingularPencil);
        }
        let w = off / pivot;
        main[i] -= w * off;
        for r in rhs.iter_mut() {
            let prev = r[i - 1];
            r[i] -= w * prev;
        }
    }
    let last = main[m - 1];
    if !last.is_finite() || last.norm() < 1e-15 * scale {
        return Err(DiscreteError::SingularPencil);
    }
    for r in rhs.iter_mut() {
        r[m - 1] /= last;
        for i in (0..m - 1).rev() {
            let next = r[i + 1];
            r[i] = (r[i] - off * next) / main[i];
        }
    }
    Ok(())
}

/// Transfer function C (s^2 M + s D + K)^{-1} B + feedthrough of the
/// discretized system, via one tridiagonal solve and a Sherman-Morrison
/// rank-one update for the damper term.
pub fn discrete_tf(sys: &SecondOrderSystem, s: Complex64) -> Result<Complex64, DiscreteError> {
    let m = sys.dim();
    let shift = s * s + sys.internal_damping * s;
    let diag: Vec<Complex64> = (0..m)
        .map(|_| shift + 2.0 * sys.stiffness_coeff)
        .collect();
    let off = Complex64::new(-sys.stiffness_coeff, 0.0);

    let b: Vec<Complex64> = sys.input.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let idx = sys.damper_node - 1;
    let coupling = s * sys.damper_gain_scaled;

    let x = if coupling.norm() == 0.0 {
        let mut rhs = [b];
        tridiag_solve(&diag, off, &mut rhs)?;
        let [x] = rhs;
        x
    } else {
        let mut unit = vec![Complex64::new(0.0, 0.0); m];
        unit[idx] = Complex64::new(1.0, 0.0);
        let mut rhs = [b, unit];
        tridiag_solve(&diag, off, &mut rhs)?;
        let [x0, w] = rhs;
        let denom = 1.0 + coupling * w[idx];
        if denom.norm() < 1e-15 * (1.0 + (coupling * w[idx]).norm()) {
            return Err(DiscreteError::SingularPencil);
        }
        let factor = coupling * x0[idx] / denom;
        x0.iter().zip(&w).map(|(&xi, &wi)| xi - factor * wi).collect()
    };

    let mut y = Complex64::new(sys.feedthrough, 0.0);
    for (c, xi) in sys.output.iter().zip(&x) {
        y += c * xi;
    }
    Ok(y)
}

/// H2 norm of the discrete system from the controllability Gramian of the
/// companion realization `[0 I; -K -D]` (exact for M = I). Rejects systems
/// with direct feedthrough, whose H2 is infinite.
pub fn discrete_h2_lyapunov(sys: &SecondOrderSystem) -> Result<f64, DiscreteError> {
    if sys.feedthrough != 0.0 {
        return Err(DiscreteError::FeedthroughNonzero);
    }
    let m = sys.dim();
    let dim = 2 * m;
    let mut a = DMatrix::zeros(dim, dim);
    for i in 0..m {
        a[(i, m + i)] = 1.0;
    }
    let k = sys.dense_stiffness();
    let d = sys.dense_damping();
    for i in 0..m {
        for j in 0..m {
            a[(m + i, j)] = -k[(i, j)];
            a[(m + i, m + j)] = -d[(i, j)];
        }
    }

    let schur = nalgebra::linalg::Schur::try_new(a, 1e-12, 100_000)
        .ok_or(DiscreteError::SchurFailed)?;
    let (q, t) = schur.unpack();

    let blocks = quasi_blocks(&t);
    for &(start, size) in &blocks {
        let stable = if size == 1 {
            t[(start, start)] < 0.0
        } else {
            let tr = t[(start, start)] + t[(start + 1, start + 1)];
            let det = t[(start, start)] * t[(start + 1, start + 1)]
                - t[(start, start + 1)] * t[(start + 1, start)];
            tr < 0.0 && det > 0.0
        };
        if !stable {
            return Err(DiscreteError::UnstableSystem);
        }
    }

    // S = Q^T b b^T Q is rank one
    let mut b_full = DVector::zeros(dim);
    for i in 0..m {
        b_full[m + i] = sys.input[i];
    }
    let u = q.transpose() * &b_full;
    let s_mat = &u * u.transpose();

    let y = solve_quasi_lyapunov(&t, &blocks, &s_mat)?;

    let mut c_full = DVector::zeros(dim);
    for i in 0..m {
        c_full[i] = sys.output[i];
    }
    let v = q.transpose() * c_full;
    let h2sq = (v.transpose() * &y * &v)[(0, 0)];
    Ok(h2sq.max(0.0).sqrt())
}

/// Diagonal block structure (start, size) of a real quasi-triangular matrix.
fn quasi_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    blocks
}

/// Solve T Y + Y T^T = -S for quasi-triangular T by block back-substitution
/// (Bartels-Stewart). Blocks are processed from the bottom-right corner so
/// every right-hand-side term is already known.
fn solve_quasi_lyapunov(
    t: &DMatrix<f64>,
    blocks: &[(usize, usize)],
    s: &DMatrix<f64>,
) -> Result<DMatrix<f64>, DiscreteError> {
    let n = t.nrows();
    let mut y = DMatrix::zeros(n, n);
    for &(bi, ni) in blocks.iter().rev() {
        for &(bj, nj) in blocks.iter().rev() {
            let i_end = bi + ni;
            let j_end = bj + nj;
            // R = -S_ij - sum_{k>i} T_ik Y_kj - sum_{k>j} Y_ik T_jk^T
            let mut r = -s.view((bi, bj), (ni, nj)).clone_owned();
            if i_end < n {
                r -= t.view((bi, i_end), (ni, n - i_end)) * y.view((i_end, bj), (n - i_end, nj));
            }
            if j_end < n {
                r -= y.view((bi, j_end), (ni, n - j_end))
                    * t.view((bj, j_end), (nj, n - j_end)).transpose();
            }
            // small Sylvester solve: (I (x) T_ii + T_jj (x) I) vec(Y_ij) = vec(R)
            let tii = t.view((bi, bi), (ni, ni));
            let tjj = t.view((bj, bj), (nj, nj));
            let sz = ni * nj;
            let mut mat = DMatrix::zeros(sz, sz);
            for col in 0..nj {
                for row in 0..ni {
                    let eq = col * ni + row;
                    for kk in 0..ni {
                        mat[(eq, col * ni + kk)] += tii[(row, kk)];
                    }
                    for kk in 0..nj {
                        mat[(eq, kk * ni + row)] += tjj[(col, kk)];
                    }
                }
            }
            let mut rhs = DVector::zeros(sz);
            for col in 0..nj {
                for row in 0..ni {
                    rhs[col * ni + row] = r[(row, col)];
                }
            }
            let sol = mat
                .lu()
                .solve(&rhs)
                .ok_or(DiscreteError::SingularPencil)?;
            for col in 0..nj {
                for row in 0..ni {
                    y[(bi + row, bj + col)] = sol[col * ni + row];
                }
            }
        }
    }
    Ok(y)
}

/// One row of a grid-refinement study: the discrete transfer function
/// against the analytic one at a fixed Laplace point.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub discrete_value: Complex64,
    pub analytic_value: Complex64,
    pub abs_error: f64,
}

/// Evaluate |H_n(s) - H(s)| across grid resolutions.
pub fn convergence_study(
    params: &StringParams,
    damper: &Damper,
    forcing: Forcing,
    s: Complex64,
    n_list: &[usize],
) -> Result<Vec<ConvergenceRow>, DiscreteError> {
    let reference = analytic::transfer_h(s, params, damper, forcing)?;
    n_list
        .par_iter()
        .map(|&n| {
            let sys = discretize(n, params, damper, forcing)?;
            let hn = discrete_tf(&sys, s)?;
            Ok(ConvergenceRow {
                n,
                h: sys.grid_step(),
                discrete_value: hn,
                analytic_value: reference,
                abs_error: (hn - reference).norm(),
            })
        })
        .collect()
}

/// Least-squares slope of log(error) against log(h); `None` with fewer than
/// two usable rows.
pub fn fitted_order(rows: &[ConvergenceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.abs_error > 0.0)
        .map(|r| (r.h.ln(), r.abs_error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{h2_norm, NormConfig};

    fn paper() -> (StringParams, Damper) {
        (
            StringParams::new(10.0, 0.08, 1.0).unwrap(),
            Damper::new(4.5, 10.0).unwrap(),
        )
    }

    #[test]
    fn rejects_tiny_grids() {
        let (params, damper) = paper();
        assert!(matches!(
            discretize(3, &params, &damper, Forcing::Uniform),
            Err(DiscreteError::InvalidGrid(3))
        ));
    }

    #[test]
    fn stencil_scaling_and_node_choice() {
        let (params, damper) = paper();
        let sys = discretize(4, &params, &damper, Forcing::Uniform).unwrap();
        assert_eq!(sys.grid_step(), 2.5);
        let k = sys.dense_stiffness();
        assert!((k[(0, 0)] - 0.32).abs() < 1e-15);
        assert!((k[(0, 1)] + 0.16).abs() < 1e-15);

        let sys = discretize(100, &params, &damper, Forcing::Uniform).unwrap();
        assert_eq!(sys.damper_node(), 45);
    }

    #[test]
    fn averaging_weights() {
        let (params, damper) = paper();
        let sys = discretize(100, &params, &damper, Forcing::Uniform).unwrap();
        let interior: f64 = sys.output().iter().sum();
        assert!((interior - 99.0 / 100.0).abs() < 1e-13);
        assert_eq!(sys.feedthrough(), 0.0);

        // boundary forcing: interior trapezoid weights plus the two h/(2l)
        // boundary weights add up to exactly 1
        let sys = discretize(100, &params, &damper, Forcing::BoundaryLeft).unwrap();
        let interior: f64 = sys.output().iter().sum();
        let h = sys.grid_step();
        let full = interior + 2.0 * h / (2.0 * params.length);
        assert!((full - 1.0).abs() < 1e-13);
        assert!((sys.feedthrough() - h / (2.0 * params.length)).abs() < 1e-18);
        assert!((sys.input()[0] - params.stiffness / (h * h)).abs() < 1e-12);
    }

    #[test]
    fn zero_gain_ignores_damper_node() {
        let params = StringParams::new(10.0, 0.08, 1.0).unwrap();
        let s = Complex64::new(0.0, 1.0);
        let a = discretize(64, &params, &Damper::new(2.0, 0.0).unwrap(), Forcing::Uniform).unwrap();
        let b = discretize(64, &params, &Damper::new(7.0, 0.0).unwrap(), Forcing::Uniform).unwrap();
        let ha = discrete_tf(&a, s).unwrap();
        let hb = discrete_tf(&b, s).unwrap();
        assert_eq!(ha, hb);
    }

    #[test]
    fn matches_dense_lu_oracle() {
        let (params, damper) = paper();
        for (n, forcing) in [
            (100, Forcing::Uniform),
            (100, Forcing::BoundaryLeft),
            (200, Forcing::Uniform),
            (200, Forcing::BoundaryLeft),
        ] {
            let sys = discretize(n, &params, &damper, forcing).unwrap();
            let s = Complex64::new(0.0, 1.0);
            let fast = discrete_tf(&sys, s).unwrap();

            let m = sys.dim();
            let k = sys.dense_stiffness();
            let d = sys.dense_damping();
            let mut a = DMatrix::<Complex64>::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    a[(i, j)] = Complex64::new(k[(i, j)], 0.0) + s * d[(i, j)];
                }
                a[(i, i)] += s * s;
            }
            let b = DVector::from_iterator(m, sys.input().iter().map(|&v| Complex64::new(v, 0.0)));
            let x = a.lu().solve(&b).unwrap();
            let mut y = Complex64::new(sys.feedthrough(), 0.0);
            for i in 0..m {
                y += sys.output()[i] * x[i];
            }
            assert!(
                (fast - y).norm() <= 1e-12 * y.norm(),
                "{forcing}: {} vs {}",
                fast,
                y
            );
        }
    }

    #[test]
    fn static_value_converges_at_second_order() {
        let (params, damper) = paper();
        let zero = Complex64::new(0.0, 0.0);
        let mut errors = Vec::new();
        for n in [500usize, 1000] {
            let sys = discretize(n, &params, &damper, Forcing::Uniform).unwrap();
            let v = discrete_tf(&sys, zero).unwrap();
            errors.push((v.re - 100.0 / 12.0).abs());
            assert!(v.im.abs() < 1e-14);
        }
        let ratio = errors[0] / errors[1];
        assert!((3.8..=4.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn conjugate_symmetry() {
        let (params, damper) = paper();
        let sys = discretize(80, &params, &damper, Forcing::BoundaryLeft).unwrap();
        for s in [Complex64::new(0.0, 2.0), Complex64::new(0.4, 5.5)] {
            let h = discrete_tf(&sys, s).unwrap();
            let hc = discrete_tf(&sys, s.conj()).unwrap();
            assert!((hc - h.conj()).norm() < 1e-13 * h.norm());
        }
    }

    #[test]
    fn lyapunov_matches_quadrature_h2() {
        let (params, damper) = paper();
        let sys = discretize(50, &params, &damper, Forcing::Uniform).unwrap();
        let lyap = discrete_h2_lyapunov(&sys).unwrap();
        let cfg = NormConfig::for_params(&params, Forcing::Uniform);
        let resp = move |omega: f64| {
            discrete_tf(&sys, Complex64::new(0.0, omega))
                .map_err(|_| EvalError::PoleEncountered {
                    s: Complex64::new(0.0, omega),
                })
        };
        let quad = h2_norm(&resp, &cfg).unwrap();
        assert!(
            (lyap - quad).abs() <= 0.005 * quad,
            "lyapunov {lyap} vs quadrature {quad}"
        );
    }

    #[test]
    fn stronger_internal_damping_lowers_h2() {
        let damper = Damper::new(5.0, 0.0).unwrap();
        let mild = StringParams::new(10.0, 0.5, 1.0).unwrap();
        let strong = StringParams::new(10.0, 5.0, 1.0).unwrap();
        let h2_mild = discrete_h2_lyapunov(
            &discretize(30, &mild, &damper, Forcing::Uniform).unwrap(),
        )
        .unwrap();
        let h2_strong = discrete_h2_lyapunov(
            &discretize(30, &strong, &damper, Forcing::Uniform).unwrap(),
        )
        .unwrap();
        assert!(h2_strong < h2_mild);
    }

    #[test]
    fn zero_input_gives_zero_h2() {
        let (params, damper) = paper();
        let mut sys = discretize(20, &params, &damper, Forcing::Uniform).unwrap();
        sys.input = vec![0.0; sys.dim()];
        let h2 = discrete_h2_lyapunov(&sys).unwrap();
        assert!(h2.abs() < 1e-12);
    }

    #[test]
    fn feedthrough_rejected() {
        let (params, damper) = paper();
        let sys = discretize(20, &params, &damper, Forcing::BoundaryLeft).unwrap();
        assert!(matches!(
            discrete_h2_lyapunov(&sys),
            Err(DiscreteError::FeedthroughNonzero)
        ));
    }

    #[test]
    fn undamped_system_reported_unstable() {
        let params = StringParams::new(10.0, 0.0, 1.0).unwrap();
        let damper = Damper::new(4.5, 0.0).unwrap();
        let sys = discretize(16, &params, &damper, Forcing::Uniform).unwrap();
        assert!(matches!(
            discrete_h2_lyapunov(&sys),
            Err(DiscreteError::UnstableSystem)
        ));
    }

    #[test]
    fn convergence_errors_shrink_quadratically() {
        let params = StringParams::new(10.0, 0.08, 1.0).unwrap();
        let damper = Damper::new(4.5, 0.0).unwrap();
        let rows = convergence_study(
            &params,
            &damper,
            Forcing::Uniform,
            Complex64::new(0.0, 1.0),
            &[25, 50, 100, 200],
        )
        .unwrap();
        let order = fitted_order(&rows).unwrap();
        assert!((1.8..=2.2).contains(&order), "order {order}");
        // repeated n gives identical errors
        let again = convergence_study(
            &params,
            &damper,
            Forcing::Uniform,
            Complex64::new(0.0, 1.0),
            &[100, 100],
        )
        .unwrap();
        assert_eq!(again[0].abs_error, again[1].abs_error);
    }

    #[test]
    fn node_aligned_damper_converges_monotonically() {
        let params = StringParams::new(10.0, 0.08, 1.0).unwrap();
        let damper = Damper::new(5.0, 10.0).unwrap();
        let rows = convergence_study(
            &params,
            &damper,
            Forcing::Uniform,
            Complex64::new(0.0, 1.0),
            &[10, 20, 40, 80],
        )
        .unwrap();
        for w in rows.windows(2) {
            assert!(
                w[1].abs_error < w[0].abs_error,
                "error rose from n={} to n={}",
                w[0].n,
                w[1].n
            );
        }
    }
}
