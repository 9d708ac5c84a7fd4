//! Command-line front end for the damped-string analysis: frequency-response
//! data, H2/H-infinity norms, parameter sweeps, damper optimization and
//! continuous-vs-discrete comparison, all as plot-ready CSV/JSON.

mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use output::RunManifest;
use wavedamp::analytic::{self, EvalError};
use wavedamp::discrete;
use wavedamp::norms::{hinf_norm, NormConfig, NormError};
use wavedamp::optimize::{
    self, Backend, Criterion, OptimBounds, OptimError, SweepSpec,
};
use wavedamp::{Damper, Forcing, StringParams};

const EXIT_USAGE: u8 = 2;
const EXIT_POLE: u8 = 3;
const EXIT_DIVERGED: u8 = 4;
const EXIT_NO_CONVERGENCE: u8 = 5;

#[derive(Parser)]
#[command(name = "wavedamp", version, about = "Damped-string transfer functions, norms and damper placement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ForcingArg {
    Uniform,
    Boundary,
}

impl From<ForcingArg> for Forcing {
    fn from(f: ForcingArg) -> Forcing {
        match f {
            ForcingArg::Uniform => Forcing::Uniform,
            ForcingArg::Boundary => Forcing::BoundaryLeft,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    H2,
    Hinf,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Criterion {
        match c {
            CriterionArg::H2 => Criterion::H2,
            CriterionArg::Hinf => Criterion::Hinf,
        }
    }
}

#[derive(Args)]
struct PhysicalArgs {
    /// String length l
    #[arg(long, default_value_t = 10.0)]
    length: f64,
    /// Internal damping coefficient d
    #[arg(long, default_value_t = 0.08)]
    damping: f64,
    /// Stiffness k
    #[arg(long, default_value_t = 1.0)]
    stiffness: f64,
}

impl PhysicalArgs {
    fn params(&self) -> Result<StringParams, CliError> {
        StringParams::new(self.length, self.damping, self.stiffness)
            .map_err(|e| CliError::usage(format!("{e}")))
    }

    fn manifest_entries(&self) -> Vec<(String, String)> {
        vec![
            ("length".into(), self.length.to_string()),
            ("damping".into(), self.damping.to_string()),
            ("stiffness".into(), self.stiffness.to_string()),
        ]
    }
}

#[derive(Args)]
struct DamperArgs {
    /// Damper position p
    #[arg(long, default_value_t = 4.5)]
    pos: f64,
    /// Damper viscosity (gain) g
    #[arg(long, default_value_t = 10.0)]
    gain: f64,
}

impl DamperArgs {
    fn damper(&self, params: &StringParams) -> Result<Damper, CliError> {
        let d = Damper::new(self.pos, self.gain).map_err(|e| CliError::usage(format!("{e}")))?;
        d.validate_for(params)
            .map_err(|e| CliError::usage(format!("{e}")))?;
        Ok(d)
    }
}

#[derive(Args)]
struct NormArgs {
    /// Truncation frequency (rad/s); default 400 modal spacings
    #[arg(long)]
    omega_max: Option<f64>,
    /// Relative tolerance of the H2 quadrature
    #[arg(long)]
    quad_rel_tol: Option<f64>,
    /// Scan density of the H-infinity search
    #[arg(long)]
    peak_samples_per_mode: Option<usize>,
    /// Golden-section iterations per refined peak
    #[arg(long)]
    refine_iters: Option<usize>,
}

impl NormArgs {
    fn config(&self, params: &StringParams, forcing: Forcing) -> NormConfig {
        let mut cfg = NormConfig::for_params(params, forcing);
        if let Some(w) = self.omega_max {
            // keep the seed-panel width tied to the modal spacing
            let per_mode = cfg.seed_panels as f64 / cfg.omega_max;
            cfg.omega_max = w;
            cfg.seed_panels = ((per_mode * w).ceil() as usize).max(16);
        }
        if let Some(t) = self.quad_rel_tol {
            cfg.quad_rel_tol = t;
        }
        if let Some(n) = self.peak_samples_per_mode {
            cfg.peak_samples_per_mode = n;
        }
        if let Some(n) = self.refine_iters {
            cfg.refine_iters = n;
        }
        cfg
    }
}

fn parse_backend(text: &str) -> Result<Backend, CliError> {
    if text == "analytic" {
        return Ok(Backend::Analytic);
    }
    if let Some(n) = text.strip_prefix("discrete:") {
        let n: usize = n
            .parse()
            .map_err(|_| CliError::usage(format!("invalid grid size in backend '{text}'")))?;
        return Ok(Backend::Discrete { n });
    }
    Err(CliError::usage(format!(
        "backend must be 'analytic' or 'discrete:N', got '{text}'"
    )))
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate |H(i omega)| and its phase over a frequency grid
    Bode {
        #[arg(long, value_enum)]
        forcing: ForcingArg,
        #[command(flatten)]
        physical: PhysicalArgs,
        #[command(flatten)]
        damper: DamperArgs,
        #[arg(long, default_value_t = 0.01)]
        omega_min: f64,
        #[arg(long, default_value_t = 100.0)]
        omega_max: f64,
        #[arg(long, default_value_t = 500)]
        points: usize,
        /// Log-spaced frequency grid
        #[arg(long)]
        log_freq: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute one H2 or H-infinity norm value
    Norm {
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        #[arg(long, value_enum)]
        forcing: ForcingArg,
        #[command(flatten)]
        physical: PhysicalArgs,
        #[command(flatten)]
        damper: DamperArgs,
        /// 'analytic' or 'discrete:N'
        #[arg(long, default_value = "analytic")]
        backend: String,
        #[command(flatten)]
        norm: NormArgs,
        /// Write the JSON here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the criterion over a position x gain grid
    Sweep {
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        #[arg(long, value_enum)]
        forcing: ForcingArg,
        #[command(flatten)]
        physical: PhysicalArgs,
        #[arg(long)]
        p_min: Option<f64>,
        #[arg(long)]
        p_max: Option<f64>,
        #[arg(long, default_value_t = 50)]
        p_count: usize,
        #[arg(long)]
        g_min: Option<f64>,
        #[arg(long)]
        g_max: Option<f64>,
        #[arg(long, default_value_t = 50)]
        g_count: usize,
        #[arg(long, default_value = "analytic")]
        backend: String,
        #[command(flatten)]
        norm: NormArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Minimize the criterion over damper position and viscosity
    Optimize {
        #[arg(long, value_enum)]
        criterion: CriterionArg,
        #[arg(long, value_enum)]
        forcing: ForcingArg,
        #[command(flatten)]
        physical: PhysicalArgs,
        #[arg(long)]
        p_min: Option<f64>,
        #[arg(long)]
        p_max: Option<f64>,
        #[arg(long)]
        g_min: Option<f64>,
        #[arg(long)]
        g_max: Option<f64>,
        #[command(flatten)]
        norm: NormArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the discretized transfer function against the closed form
    Compare {
        #[arg(long, value_enum)]
        forcing: ForcingArg,
        #[command(flatten)]
        physical: PhysicalArgs,
        #[command(flatten)]
        damper: DamperArgs,
        /// Frequency omega; the comparison point is s = i*omega
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Grid sizes, repeatable: --n 25 --n 50
        #[arg(long = "n", required = true)]
        n_values: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: String) -> Self {
        CliError {
            code: EXIT_USAGE,
            message,
        }
    }

    fn io(e: std::io::Error) -> Self {
        CliError {
            code: 1,
            message: format!("i/o error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("WAVEDAMP_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Bode {
            forcing,
            physical,
            damper,
            omega_min,
            omega_max,
            points,
            log_freq,
            out,
        } => cmd_bode(
            forcing.into(),
            &physical,
            &damper,
            omega_min,
            omega_max,
            points,
            log_freq,
            &out,
        ),
        Command::Norm {
            criterion,
            forcing,
            physical,
            damper,
            backend,
            norm,
            out,
        } => cmd_norm(
            criterion.into(),
            forcing.into(),
            &physical,
            &damper,
            &backend,
            &norm,
            out.as_deref(),
        ),
        Command::Sweep {
            criterion,
            forcing,
            physical,
            p_min,
            p_max,
            p_count,
            g_min,
            g_max,
            g_count,
            backend,
            norm,
            out,
        } => cmd_sweep(
            criterion.into(),
            forcing.into(),
            &physical,
            (p_min, p_max, p_count),
            (g_min, g_max, g_count),
            &backend,
            &norm,
            &out,
        ),
        Command::Optimize {
            criterion,
            forcing,
            physical,
            p_min,
            p_max,
            g_min,
            g_max,
            norm,
            out,
        } => cmd_optimize(
            criterion.into(),
            forcing.into(),
            &physical,
            (p_min, p_max),
            (g_min, g_max),
            &norm,
            out.as_deref(),
        ),
        Command::Compare {
            forcing,
            physical,
            damper,
            omega,
            n_values,
            out,
        } => cmd_compare(forcing.into(), &physical, &damper, omega, &n_values, &out),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bode(
    forcing: Forcing,
    physical: &PhysicalArgs,
    damper_args: &DamperArgs,
    omega_min: f64,
    omega_max: f64,
    points: usize,
    log_freq: bool,
    out: &std::path::Path,
) -> Result<(), CliError> {
    if points == 0 {
        return Err(CliError::usage("--points must be positive".into()));
    }
    if !(omega_min.is_finite() && omega_max.is_finite() && omega_min >= 0.0 && omega_max > omega_min)
    {
        return Err(CliError::usage(format!(
            "invalid frequency range [{omega_min}, {omega_max}]"
        )));
    }
    if log_freq && omega_min <= 0.0 {
        return Err(CliError::usage(
            "--log-freq requires a positive --omega-min".into(),
        ));
    }
    let params = physical.params()?;
    let damper = damper_args.damper(&params)?;

    let grid: Vec<f64> = if points == 1 {
        vec![omega_min]
    } else if log_freq {
        let ratio = omega_max / omega_min;
        (0..points)
            .map(|i| omega_min * ratio.powf(i as f64 / (points - 1) as f64))
            .collect()
    } else {
        (0..points)
            .map(|i| omega_min + (omega_max - omega_min) * i as f64 / (points - 1) as f64)
            .collect()
    };

    let mut manifest_params = physical.manifest_entries();
    manifest_params.extend([
        ("forcing".into(), forcing.to_string()),
        ("pos".into(), damper_args.pos.to_string()),
        ("gain".into(), damper_args.gain.to_string()),
        ("omega_min".into(), omega_min.to_string()),
        ("omega_max".into(), omega_max.to_string()),
        ("points".into(), points.to_string()),
        ("log_freq".into(), log_freq.to_string()),
    ]);
    let manifest = RunManifest::new("bode", manifest_params);

    let mut rows = Vec::with_capacity(grid.len());
    for &omega in &grid {
        let s = Complex64::new(0.0, omega);
        match analytic::transfer_h(s, &params, &damper, forcing) {
            Ok(h) => rows.push((omega, h.norm(), h.arg())),
            Err(EvalError::PoleEncountered { .. } | EvalError::SingularPoint { .. }) => {
                return Err(CliError {
                    code: EXIT_POLE,
                    message: format!("transfer function pole at omega = {omega}"),
                });
            }
        }
    }

    let mut w = output::csv_writer(out, &manifest, "omega,magnitude,phase").map_err(CliError::io)?;
    for (omega, mag, phase) in rows {
        writeln!(w, "{omega},{mag},{phase}").map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)?;
    output::write_sidecar(out, &manifest).map_err(CliError::io)?;
    Ok(())
}

#[derive(Serialize)]
struct NormConfigOut {
    omega_max: f64,
    quad_rel_tol: f64,
    peak_samples_per_mode: usize,
    refine_iters: usize,
    tail_decay: String,
}

impl From<&NormConfig> for NormConfigOut {
    fn from(cfg: &NormConfig) -> Self {
        NormConfigOut {
            omega_max: cfg.omega_max,
            quad_rel_tol: cfg.quad_rel_tol,
            peak_samples_per_mode: cfg.peak_samples_per_mode,
            refine_iters: cfg.refine_iters,
            tail_decay: format!("{:?}", cfg.tail_decay),
        }
    }
}

#[derive(Serialize)]
struct NormOutput {
    criterion: String,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    argmax_omega: Option<f64>,
    config: NormConfigOut,
    manifest: RunManifest,
}

fn cmd_norm(
    criterion: Criterion,
    forcing: Forcing,
    physical: &PhysicalArgs,
    damper_args: &DamperArgs,
    backend_text: &str,
    norm_args: &NormArgs,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let params = physical.params()?;
    let damper = damper_args.damper(&params)?;
    let backend = parse_backend(backend_text)?;
    let cfg = norm_args.config(&params, forcing);

    let mut manifest_params = physical.manifest_entries();
    manifest_params.extend([
        ("criterion".into(), criterion.to_string()),
        ("forcing".into(), forcing.to_string()),
        ("pos".into(), damper_args.pos.to_string()),
        ("gain".into(), damper_args.gain.to_string()),
        ("backend".into(), backend_text.to_string()),
    ]);
    let manifest = RunManifest::new("norm", manifest_params);

    let (value, argmax_omega) = match criterion {
        Criterion::Hinf => {
            let resp = move |omega: f64| {
                analytic::transfer_h(Complex64::new(0.0, omega), &params, &damper, forcing)
            };
            let result = match backend {
                Backend::Analytic => hinf_norm(&resp, &params, &cfg),
                Backend::Discrete { n } => {
                    let sys = discrete::discretize(n, &params, &damper, forcing)
                        .map_err(|e| CliError::usage(format!("{e}")))?;
                    let resp = move |omega: f64| {
                        let s = Complex64::new(0.0, omega);
                        discrete::discrete_tf(&sys, s)
                            .map_err(|_| EvalError::PoleEncountered { s })
                    };
                    hinf_norm(&resp, &params, &cfg)
                }
            };
            let r = result.map_err(|e| norm_error(e, &cfg))?;
            (r.value, Some(r.argmax_omega))
        }
        Criterion::H2 => {
            let value = optimize::evaluate_criterion(
                Criterion::H2,
                forcing,
                backend,
                &params,
                &damper,
                &cfg,
            )
            .map_err(|e| CliError::usage(format!("{e}")))?;
            if value.is_infinite() {
                return Err(norm_error(
                    NormError::Diverged {
                        detail: "H2 integral diverges".into(),
                    },
                    &cfg,
                ));
            }
            (value, None)
        }
    };

    let payload = NormOutput {
        criterion: criterion.to_string(),
        value,
        argmax_omega,
        config: NormConfigOut::from(&cfg),
        manifest,
    };
    emit_json(&payload, out)
}

fn norm_error(e: NormError, cfg: &NormConfig) -> CliError {
    CliError {
        code: EXIT_DIVERGED,
        message: format!(
            "{e} (omega_max = {}, quad_rel_tol = {}, peak_samples_per_mode = {})",
            cfg.omega_max, cfg.quad_rel_tol, cfg.peak_samples_per_mode
        ),
    }
}

fn emit_json<T: Serialize>(payload: &T, out: Option<&std::path::Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(payload).expect("serializable payload");
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(CliError::io),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CellOut {
    p: f64,
    g: f64,
    value: f64,
}

#[derive(Serialize)]
struct SweepSidecar {
    min_cell: CellOut,
    max_cell: CellOut,
    manifest: RunManifest,
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    criterion: Criterion,
    forcing: Forcing,
    physical: &PhysicalArgs,
    p_range: (Option<f64>, Option<f64>, usize),
    g_range: (Option<f64>, Option<f64>, usize),
    backend_text: &str,
    norm_args: &NormArgs,
    out: &std::path::Path,
) -> Result<(), CliError> {
    let params = physical.params()?;
    let backend = parse_backend(backend_text)?;
    let cfg = norm_args.config(&params, forcing);

    // figure-axis defaults: uniform forcing exploits mirror symmetry
    let (p_lo_default, p_hi_default, g_hi_default) = match forcing {
        Forcing::Uniform => (0.0, params.length / 2.0, 1000.0),
        Forcing::BoundaryLeft => (0.0, params.length, 100.0),
    };
    let p_lo = p_range.0.unwrap_or(p_lo_default);
    let p_hi = p_range.1.unwrap_or(p_hi_default);
    let g_lo = g_range.0.unwrap_or(0.1);
    let g_hi = g_range.1.unwrap_or(g_hi_default);

    let spec = SweepSpec {
        p_range: (p_lo, p_hi, p_range.2),
        g_range: (g_lo, g_hi, g_range.2),
        criterion,
        forcing,
        backend,
    };
    let result = optimize::sweep(&spec, &params, &cfg).map_err(|e| CliError::usage(format!("{e}")))?;

    let mut manifest_params = physical.manifest_entries();
    manifest_params.extend([
        ("criterion".into(), criterion.to_string()),
        ("forcing".into(), forcing.to_string()),
        ("backend".into(), backend_text.to_string()),
        ("p_min".into(), p_lo.to_string()),
        ("p_max".into(), p_hi.to_string()),
        ("p_count".into(), p_range.2.to_string()),
        ("g_min".into(), g_lo.to_string()),
        ("g_max".into(), g_hi.to_string()),
        ("g_count".into(), g_range.2.to_string()),
    ]);
    let manifest = RunManifest::new("sweep", manifest_params);

    let mut w = output::csv_writer(out, &manifest, "p,g,value").map_err(CliError::io)?;
    for (i, &g) in result.g_values.iter().enumerate() {
        for (j, &p) in result.p_values.iter().enumerate() {
            let v = result.values[i][j];
            if v.is_finite() {
                writeln!(w, "{p},{g},{v}").map_err(CliError::io)?;
            } else {
                writeln!(w, "{p},{g},inf").map_err(CliError::io)?;
            }
        }
    }
    w.flush().map_err(CliError::io)?;

    let sidecar = SweepSidecar {
        min_cell: CellOut {
            p: result.min_cell.p,
            g: result.min_cell.g,
            value: result.min_cell.value,
        },
        max_cell: CellOut {
            p: result.max_cell.p,
            g: result.max_cell.g,
            value: result.max_cell.value,
        },
        manifest,
    };
    output::write_sidecar(out, &sidecar).map_err(CliError::io)?;
    Ok(())
}

#[derive(Serialize)]
struct OptimOutput {
    criterion: String,
    forcing: String,
    p_star: f64,
    g_star: f64,
    value: f64,
    evaluations: u64,
    converged: bool,
    manifest: RunManifest,
}

fn cmd_optimize(
    criterion: Criterion,
    forcing: Forcing,
    physical: &PhysicalArgs,
    p_bounds: (Option<f64>, Option<f64>),
    g_bounds: (Option<f64>, Option<f64>),
    norm_args: &NormArgs,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let params = physical.params()?;
    let cfg = norm_args.config(&params, forcing);

    let (p_defaults, g_hi_default) = match forcing {
        Forcing::Uniform => ((0.02 * params.length, 0.5 * params.length), 1000.0),
        Forcing::BoundaryLeft => ((0.02 * params.length, 0.98 * params.length), 100.0),
    };
    let bounds = OptimBounds {
        p: (
            p_bounds.0.unwrap_or(p_defaults.0),
            p_bounds.1.unwrap_or(p_defaults.1),
        ),
        g: (g_bounds.0.unwrap_or(0.1), g_bounds.1.unwrap_or(g_hi_default)),
    };
    let starts = optimize::default_starts(&bounds);

    let mut manifest_params = physical.manifest_entries();
    manifest_params.extend([
        ("criterion".into(), criterion.to_string()),
        ("forcing".into(), forcing.to_string()),
        ("p_min".into(), bounds.p.0.to_string()),
        ("p_max".into(), bounds.p.1.to_string()),
        ("g_min".into(), bounds.g.0.to_string()),
        ("g_max".into(), bounds.g.1.to_string()),
        ("starts".into(), starts.len().to_string()),
    ]);
    let manifest = RunManifest::new("optimize", manifest_params);

    let outcome = optimize::minimize(criterion, forcing, &params, &bounds, &starts, &cfg);
    let (result, code) = match outcome {
        Ok(r) => (r, None),
        Err(OptimError::NoConvergence(best)) => (*best, Some(EXIT_NO_CONVERGENCE)),
        Err(e) => return Err(CliError::usage(format!("{e}"))),
    };

    let payload = OptimOutput {
        criterion: criterion.to_string(),
        forcing: forcing.to_string(),
        p_star: result.p_star,
        g_star: result.g_star,
        value: result.value,
        evaluations: result.evaluations,
        converged: result.converged,
        manifest,
    };
    emit_json(&payload, out)?;
    match code {
        None => Ok(()),
        Some(code) => Err(CliError {
            code,
            message: "no optimizer start converged".into(),
        }),
    }
}

fn cmd_compare(
    forcing: Forcing,
    physical: &PhysicalArgs,
    damper_args: &DamperArgs,
    omega: f64,
    n_values: &[usize],
    out: &std::path::Path,
) -> Result<(), CliError> {
    let params = physical.params()?;
    let damper = damper_args.damper(&params)?;
    let s = Complex64::new(0.0, omega);

    let rows = discrete::convergence_study(&params, &damper, forcing, s, n_values)
        .map_err(|e| CliError::usage(format!("{e}")))?;

    let mut manifest_params = physical.manifest_entries();
    manifest_params.extend([
        ("forcing".into(), forcing.to_string()),
        ("pos".into(), damper_args.pos.to_string()),
        ("gain".into(), damper_args.gain.to_string()),
        ("omega".into(), omega.to_string()),
        (
            "n_values".into(),
            n_values
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(" "),
        ),
    ]);
    let manifest = RunManifest::new("compare", manifest_params);

    let mut w =
        output::csv_writer(out, &manifest, "n,h,abs_error,analytic").map_err(CliError::io)?;
    for row in &rows {
        let a = row.analytic_value;
        writeln!(
            w,
            "{},{},{},{}{}{}i",
            row.n,
            row.h,
            row.abs_error,
            a.re,
            if a.im < 0.0 { "-" } else { "+" },
            a.im.abs()
        )
        .map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)?;
    output::write_sidecar(out, &manifest).map_err(CliError::io)?;

    let distinct: std::collections::BTreeSet<usize> = n_values.iter().copied().collect();
    if distinct.len() >= 2 {
        if let Some(order) = discrete::fitted_order(&rows) {
            println!("fitted order: {order:.3}");
        }
    }
    Ok(())
}
