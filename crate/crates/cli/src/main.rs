mod args;
mod output;

use std::fmt::Write as _;
use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use tomrep::coin_rep::coins_from_density;
use tomrep::density::DensityMatrix;
use tomrep::evolution::{
    affine_system, chart_from_density, chart_len, density_from_chart, kinetic_evolve_sampled, stationary_spectrum,
    HamiltonianMatrix,
};
use tomrep::qubit::{
    angles_from_probs, bloch_from_probs, classify_state, density_from_probs, QubitProbabilities, StateClass,
};
use tomrep::states::{PureState, StateSpec};
use tomrep::tomography::{
    clipped_count, density_from_tomogram, tomogram_from_psi_with, EmpiricalTomogram,
    SymplecticTomogram, TomogramMethod,
};
use tomrep::transitions::{born_probability_states, gaussian_transition, tomographic_transition, TransitionResult};
use tomrep::Error;

use output::{emit, fmt_f64, to_json, CONVENTIONS};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Agreement required between transition routes.
const BORN_TOMOGRAPHIC_TOL: f64 = 1e-4;
const BORN_GAUSSIAN_TOL: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "tomrep", version, about = "Probability representation of quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symplectic tomogram of a pure state on an X grid, as CSV.
    Tomogram(TomogramArgs),
    /// Density matrix and coins recovered from a tomogram, as JSON.
    Reconstruct(ReconstructArgs),
    /// Coin-chart trajectory under a Hamiltonian, as CSV.
    Evolve(EvolveArgs),
    /// Energies and stationary chart vectors, as JSON.
    Spectrum(SpectrumArgs),
    /// Transition probability between two pure states by several routes, as JSON.
    Transition(TransitionArgs),
    /// Qubit density matrix, Bloch vector and angles from (p1, p2, p3), as JSON.
    Qubit(QubitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Quadrature,
}

#[derive(Args)]
struct TomogramArgs {
    /// State specification, e.g. '{"type":"fock","n":1}'.
    #[arg(long)]
    state: String,
    /// `circle:k` or `mu,nu[;mu,nu...]`.
    #[arg(long, default_value = "circle:8", allow_hyphen_values = true)]
    frames: String,
    /// `start:stop:count`.
    #[arg(long = "X", default_value = "-5:5:101", allow_hyphen_values = true)]
    x: String,
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long, conflicts_with = "csv", required_unless_present = "csv")]
    state: Option<String>,
    /// Sampled tomogram with header X,mu,nu,w.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long = "N", default_value_t = 8)]
    n: usize,
    /// Largest accepted trace and Hermiticity residual.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    /// Affine flow of the chart vector.
    Probability,
    /// Von Neumann equation for the density matrix.
    Kinetic,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long, conflicts_with = "probs", required_unless_present = "probs")]
    state: Option<String>,
    /// Initial chart vector (N² − 1 comma-separated entries).
    #[arg(long, allow_hyphen_values = true)]
    probs: Option<String>,
    /// Truncation; with --probs it is inferred from the vector length.
    #[arg(long = "N")]
    n: Option<usize>,
    /// `oscillator` or `diag:e0,e1,...`.
    #[arg(long, default_value = "oscillator", allow_hyphen_values = true)]
    hamiltonian: String,
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long, default_value_t = 100)]
    record_every: usize,
    #[arg(long, value_enum, default_value = "probability")]
    route: Route,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Oscillator Hamiltonian truncated at --N levels.
    #[arg(long, conflicts_with = "diag", required_unless_present = "diag", requires = "n")]
    oscillator: bool,
    #[arg(long = "N")]
    n: Option<usize>,
    /// Diagonal Hamiltonian `e0,e1,...`.
    #[arg(long, allow_hyphen_values = true)]
    diag: Option<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TransitionArgs {
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    /// Comma-separated subset of born, tomographic, gaussian.
    #[arg(long, default_value = "born,tomographic")]
    methods: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct QubitArgs {
    /// `p1,p2,p3`.
    #[arg(long)]
    probs: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Range { .. }
            | Error::InvalidState(_)
            | Error::InvalidFrame { .. }
            | Error::NonNormalizable { .. }
            | Error::UndefinedAngle(_)
            | Error::Domain(_)
            | Error::InvalidInput(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("i/o: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Errors raised while post-processing computed data are quality failures,
/// whatever their kind.
fn numeric(e: Error) -> Failure {
    Failure::Numeric(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("tomrep: {}", f.message());
        return ExitCode::from(f.code());
    }
    let result = match cli.command {
        Command::Tomogram(a) => cmd_tomogram(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Transition(a) => cmd_transition(a),
        Command::Qubit(a) => cmd_qubit(a),
    };
    let clipped = clipped_count();
    if clipped > 0 {
        eprintln!("tomrep: warning: {clipped} slightly negative tomogram values clipped to zero");
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tomrep: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var("TOMREP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| usage(format!("TOMREP_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| usage(format!("thread pool: {e}")))
}

fn resolve(spec: &str) -> Result<(StateSpec, PureState), Failure> {
    let spec = args::parse_state(spec).map_err(usage)?;
    let state = spec.resolve()?;
    Ok((spec, state))
}

fn check_dim(n: usize) -> Outcome {
    if n < 2 {
        return Err(usage(format!("N must be at least 2, got {n}")));
    }
    Ok(())
}

fn cmd_tomogram(a: TomogramArgs) -> Outcome {
    let (_, state) = resolve(&a.state)?;
    let frames = args::parse_frames(&a.frames).map_err(usage)?;
    let xs = args::parse_range(&a.x).map_err(usage)?;
    let method = match a.method {
        MethodArg::Auto => TomogramMethod::Auto,
        MethodArg::Quadrature => TomogramMethod::Quadrature,
    };
    let tomogram = SymplecticTomogram::from(&state);
    let columns: Vec<Vec<f64>> = frames
        .par_iter()
        .map(|f| match method {
            TomogramMethod::Auto => tomogram.evaluate_grid(&xs, f),
            TomogramMethod::Quadrature => xs
                .iter()
                .map(|&x| tomogram_from_psi_with(&state, x, f, TomogramMethod::Quadrature))
                .collect(),
        })
        .collect::<tomrep::Result<_>>()?;

    let mut csv = String::new();
    writeln!(csv, "# {CONVENTIONS}").unwrap();
    writeln!(csv, "X,mu,nu,w").unwrap();
    for (f, col) in frames.iter().zip(&columns) {
        for (&x, &w) in xs.iter().zip(col) {
            writeln!(csv, "{},{},{},{}", fmt_f64(x), fmt_f64(f.mu), fmt_f64(f.nu), fmt_f64(w)).unwrap();
        }
        eprintln!(
            "frame ({:.6}, {:.6}): normalization residual on grid {:.3e}",
            f.mu,
            f.nu,
            (trapezoid(&xs, col) - 1.0).abs()
        );
    }
    emit(a.output.as_deref(), &csv)?;
    Ok(())
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2).zip(ys.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

fn matrix_json(rho: &DensityMatrix) -> Value {
    let dim = rho.dim();
    Value::Array(
        (0..dim)
            .map(|i| (0..dim).map(|j| complex_json(rho.get(i, j))).collect())
            .collect(),
    )
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn cmd_reconstruct(a: ReconstructArgs) -> Outcome {
    check_dim(a.n)?;
    if !(a.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let tomogram = match (&a.state, &a.csv) {
        (Some(s), _) => SymplecticTomogram::from(&resolve(s)?.1),
        (None, Some(path)) => {
            let file = File::open(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            SymplecticTomogram::Empirical(EmpiricalTomogram::from_csv(file)?)
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    let (rho, trace, herm, tail, failure) = match density_from_tomogram(&tomogram, a.n) {
        Ok(r) => (r.rho, r.trace_residual, r.hermiticity_residual, r.tail, None),
        Err(Error::PartialResult { what, residual, partial }) => {
            let rho = *partial;
            let trace = (rho.trace() - 1.0).norm();
            let herm = rho.hermiticity_residual();
            let msg = format!("{what} did not converge (residual {residual:e})");
            (rho, trace, herm, residual, Some(Failure::Numeric(msg)))
        }
        Err(e) => return Err(e.into()),
    };
    let coins = if herm <= tomrep::coin_rep::COIN_TOL {
        coins_from_density(&rho).map_err(numeric).map(|c| serde_json::to_value(c).unwrap())
    } else {
        Err(Failure::Numeric(format!("reconstructed matrix is not Hermitian (residual {herm:e})")))
    };
    let doc = json!({
        "N": a.n,
        "rho": matrix_json(&rho),
        "coins": coins.as_ref().ok().cloned().unwrap_or(Value::Null),
        "residuals": {"trace": trace, "hermiticity": herm, "tail": tail},
        "conventions": CONVENTIONS,
    });
    emit(a.output.as_deref(), &to_json(&doc)?)?;
    if let Some(f) = failure {
        return Err(f);
    }
    coins?;
    if trace > a.tol || herm > a.tol {
        return Err(Failure::Numeric(format!(
            "residuals exceed tolerance {:e}: trace {trace:e}, hermiticity {herm:e}",
            a.tol
        )));
    }
    Ok(())
}

fn parse_hamiltonian(spec: &str, dim: usize) -> Result<HamiltonianMatrix, Failure> {
    if spec == "oscillator" {
        return Ok(HamiltonianMatrix::oscillator(dim));
    }
    let Some(list) = spec.strip_prefix("diag:") else {
        return Err(usage(format!("unknown Hamiltonian '{spec}'")));
    };
    let e = args::parse_list(list).map_err(usage)?;
    if e.len() != dim {
        return Err(usage(format!("diagonal Hamiltonian has {} entries, state has N = {dim}", e.len())));
    }
    Ok(HamiltonianMatrix::diagonal(&e)?)
}

fn chart_labels(dim: usize) -> Vec<String> {
    let mut v: Vec<String> = (0..dim - 1).map(|n| format!("p3_{n}")).collect();
    for n in 0..dim {
        for np in n + 1..dim {
            v.push(format!("p1_{n}_{np}"));
            v.push(format!("p2_{n}_{np}"));
        }
    }
    v
}

fn cmd_evolve(a: EvolveArgs) -> Outcome {
    if !(a.step > 0.0) || !a.t_end.is_finite() || a.t_end < 0.0 {
        return Err(usage("--step must be positive and --t-end non-negative"));
    }
    if a.record_every == 0 {
        return Err(usage("--record-every must be at least 1"));
    }
    let (rho0, dim) = match (&a.state, &a.probs) {
        (Some(s), _) => {
            let dim = a.n.unwrap_or(24);
            check_dim(dim)?;
            (resolve(s)?.1.density_matrix(dim)?, dim)
        }
        (None, Some(p)) => {
            let pi = args::parse_list(p).map_err(usage)?;
            let dim = ((pi.len() + 1) as f64).sqrt().round() as usize;
            if chart_len(dim) != pi.len() {
                return Err(usage(format!("{} chart entries do not match any N (need N^2 - 1)", pi.len())));
            }
            if let Some(n) = a.n {
                if n != dim {
                    return Err(usage(format!("--N {n} disagrees with chart length (N = {dim})")));
                }
            }
            check_dim(dim)?;
            (density_from_chart(&pi, dim)?, dim)
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    rho0.check_physical(1e-8)?;
    let h = parse_hamiltonian(&a.hamiltonian, dim)?;
    let rows: Vec<(f64, Vec<f64>)> = match a.route {
        Route::Probability => {
            let sys = affine_system(&h)?;
            sys.evolve(&chart_from_density(&rho0), (0.0, a.t_end), a.step, a.record_every)?
        }
        Route::Kinetic => {
            let tr = kinetic_evolve_sampled(&rho0, &h, (0.0, a.t_end), a.step, a.record_every)?;
            tr.times.iter().copied().zip(tr.chart()).collect()
        }
    };
    let mut csv = String::new();
    writeln!(csv, "# {CONVENTIONS}; chart = p3 for n < N-1, then (p1, p2) per pair n < n'").unwrap();
    writeln!(csv, "t,{}", chart_labels(dim).join(",")).unwrap();
    for (t, pi) in &rows {
        let cells: Vec<String> = std::iter::once(*t).chain(pi.iter().copied()).map(fmt_f64).collect();
        writeln!(csv, "{}", cells.join(",")).unwrap();
    }
    emit(a.output.as_deref(), &csv)?;
    Ok(())
}

fn cmd_spectrum(a: SpectrumArgs) -> Outcome {
    let h = match (&a.diag, a.n) {
        (Some(d), _) => {
            let e = args::parse_list(d).map_err(usage)?;
            check_dim(e.len())?;
            HamiltonianMatrix::diagonal(&e)?
        }
        (None, Some(n)) => {
            check_dim(n)?;
            HamiltonianMatrix::oscillator(n)
        }
        (None, None) => unreachable!("clap requires a Hamiltonian"),
    };
    let spectrum = stationary_spectrum(&h)?;
    emit(a.output.as_deref(), &to_json(&spectrum)?)?;
    Ok(())
}

#[derive(Serialize)]
struct Delta {
    methods: [&'static str; 2],
    delta: f64,
    tolerance: f64,
    ok: bool,
}

fn cmd_transition(a: TransitionArgs) -> Outcome {
    let (spec_a, sa) = resolve(&a.a)?;
    let (spec_b, sb) = resolve(&a.b)?;
    let mut methods: Vec<&'static str> = Vec::new();
    for m in a.methods.split(',').map(str::trim) {
        let name = match m {
            "born" => "born",
            "tomographic" => "tomographic",
            "gaussian" | "gaussian-closed" => "gaussian",
            _ => return Err(usage(format!("unknown method '{m}'"))),
        };
        if !methods.contains(&name) {
            methods.push(name);
        }
    }
    let mut results: Vec<(&'static str, TransitionResult)> = Vec::new();
    for &m in &methods {
        let r = match m {
            "born" => born_probability_states(&sa, &sb)?,
            "tomographic" => tomographic_transition(&SymplecticTomogram::from(&sa), &SymplecticTomogram::from(&sb))?,
            _ => match (&sa, &sb) {
                (PureState::Gaussian(g1), PureState::Gaussian(g2)) => gaussian_transition(g1, g2)?,
                _ => return Err(usage("the gaussian method needs two Gaussian states")),
            },
        };
        results.push((m, r));
    }
    let get = |name: &str| results.iter().find(|(m, _)| *m == name).map(|(_, r)| r.probability);
    let mut deltas = Vec::new();
    for (x, y, tol) in [
        ("born", "tomographic", BORN_TOMOGRAPHIC_TOL),
        ("born", "gaussian", BORN_GAUSSIAN_TOL),
        ("gaussian", "tomographic", BORN_TOMOGRAPHIC_TOL),
    ] {
        if let (Some(p), Some(q)) = (get(x), get(y)) {
            let delta = (p - q).abs();
            deltas.push(Delta {
                methods: [x, y],
                delta,
                tolerance: tol,
                ok: delta <= tol,
            });
        }
    }
    let result_map: serde_json::Map<String, Value> = results
        .iter()
        .map(|(m, r)| (m.to_string(), serde_json::to_value(r).unwrap()))
        .collect();
    let doc = json!({
        "a": spec_a,
        "b": spec_b,
        "results": result_map,
        "deltas": deltas,
        "conventions": CONVENTIONS,
    });
    emit(a.output.as_deref(), &to_json(&doc)?)?;
    if let Some(d) = deltas.iter().find(|d| !d.ok) {
        return Err(Failure::Numeric(format!(
            "{} and {} disagree by {:e} (tolerance {:e})",
            d.methods[0], d.methods[1], d.delta, d.tolerance
        )));
    }
    Ok(())
}

fn cmd_qubit(a: QubitArgs) -> Outcome {
    let v = args::parse_list(&a.probs).map_err(usage)?;
    if v.len() != 3 {
        return Err(usage(format!("--probs needs three values, got {}", v.len())));
    }
    let p = QubitProbabilities::new(v[0], v[1], v[2])?;
    let class = classify_state(&p);
    let bloch = bloch_from_probs(&p);
    let density = density_from_probs(&p).ok().map(|r| {
        let m = r.matrix();
        Value::Array(
            (0..2)
                .map(|i| (0..2).map(|j| complex_json(m[(i, j)])).collect())
                .collect(),
        )
    });
    let angles = angles_from_probs(&p).ok();
    let doc = json!({
        "probs": p,
        "bloch": bloch,
        "density": density,
        "angles": angles,
        "classification": class,
        "conventions": "qubit: rho[0][0] = p3, rho[1][0] = (p1 - 1/2) + i (p2 - 1/2); bloch = 2p - 1",
    });
    emit(a.output.as_deref(), &to_json(&doc)?)?;
    if class.class == StateClass::Invalid {
        return Err(usage(format!(
            "point lies outside the quantum ball: squared radius {} > 1/4",
            class.radius_sq
        )));
    }
    Ok(())
}
