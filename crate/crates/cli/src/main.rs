//! Command-line front end for the two-level-atom phase-switch simulator.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on computation errors.
//! On any error no bytes of the data artifact are written.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use phase_switch::core::{
    self, AtomParams, CavityParams, SwitchingIntensity,
};
use phase_switch::dynamics::{self, DriveSignal, IntegratorConfig};
use phase_switch::sweep::{self, Grid, GridAxis};
use phase_switch::Error as PhysError;

#[derive(Parser)]
#[command(
    name = "phase-switch",
    version,
    about = "Nonlinear pi phase switch of a two-level atom in a one-sided cavity",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady-state solution under a constant drive
    Steady(SteadyArgs),
    /// Integrate the Bloch equations under a time-dependent drive
    Simulate(SimulateArgs),
    /// Response and noise curves over the scaled input intensity
    Sweep(SweepArgs),
    /// Linear (weak-drive) response, optionally scanned over beta
    Linear(LinearArgs),
    /// Bad-cavity parameter reduction Gamma = g^2/kappa
    Params(ParamsArgs),
    /// Two-photon pulse feasibility against the switching intensity
    PulseCheck(PulseCheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SharedArgs {
    /// Cavity-mediated dipole decay rate Gamma
    #[arg(long, default_value_t = 1.0)]
    big_gamma: f64,
    /// Transverse decay rate gamma to non-cavity modes
    #[arg(long, default_value_t = 0.0)]
    gamma_loss: f64,
    /// Output format (default: json for single-point commands, csv for
    /// sweeps and trajectories)
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output path (default: standard output)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct SteadyArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Input intensity |b_in|^2
    #[arg(long, conflicts_with_all = ["bin_re", "bin_im"])]
    intensity: Option<f64>,
    /// Real part of the input amplitude b_in
    #[arg(long)]
    bin_re: Option<f64>,
    /// Imaginary part of the input amplitude b_in
    #[arg(long, requires = "bin_re")]
    bin_im: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DriveKind {
    Constant,
    Square,
    Gaussian,
    Steps,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Drive envelope
    #[arg(long, value_enum, default_value_t = DriveKind::Constant)]
    drive: DriveKind,
    /// Constant-drive intensity |b_in|^2
    #[arg(long)]
    intensity: Option<f64>,
    /// Photon number carried by a pulse
    #[arg(long)]
    photons: Option<f64>,
    /// Pulse duration T
    #[arg(long)]
    duration: Option<f64>,
    /// Pulse center time (default: T/2 for square, T for gaussian)
    #[arg(long)]
    center: Option<f64>,
    /// Step sequence as "t:re:im;t:re:im;..."
    #[arg(long)]
    steps: Option<String>,
    /// Integration horizon (default: 20/Gamma)
    #[arg(long)]
    t_max: Option<f64>,
    /// Integration step (default: 1e-3/Gamma)
    #[arg(long)]
    dt: Option<f64>,
    /// Record every k-th step
    #[arg(long, default_value_t = 1)]
    stride: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Grid minimum on the log10[4|b_in|^2/Gamma] axis
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    grid_min: f64,
    /// Grid maximum
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    grid_max: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 201)]
    points: usize,
}

#[derive(Args)]
struct LinearArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Spontaneous-emission ratio beta (overrides --gamma-loss)
    #[arg(long, conflicts_with_all = ["gamma_loss", "beta_sweep"])]
    beta: Option<f64>,
    /// Scan beta over a grid: <min> <max> <points>
    #[arg(long, num_args = 3, value_names = ["MIN", "MAX", "POINTS"], conflicts_with = "gamma_loss")]
    beta_sweep: Option<Vec<String>>,
}

#[derive(Args)]
struct ParamsArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Dipole coupling rate g
    #[arg(long)]
    g: f64,
    /// Cavity damping rate kappa
    #[arg(long)]
    kappa: f64,
}

#[derive(Args)]
struct PulseCheckArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Pulse duration T
    #[arg(long)]
    duration: f64,
}

enum CliError {
    Usage(String),
    Compute(String),
}

impl From<PhysError> for CliError {
    fn from(e: PhysError) -> Self {
        match e {
            PhysError::InvalidParameter(_) | PhysError::Domain(_) | PhysError::Usage(_) => {
                CliError::Usage(e.to_string())
            }
            PhysError::InvalidState(_) | PhysError::Integration { .. } => {
                CliError::Compute(e.to_string())
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (shared, result) = match &cli.command {
        Command::Steady(args) => (&args.shared, run_steady(args)),
        Command::Simulate(args) => (&args.shared, run_simulate(args)),
        Command::Sweep(args) => (&args.shared, run_sweep(args)),
        Command::Linear(args) => (&args.shared, run_linear(args)),
        Command::Params(args) => (&args.shared, run_params(args)),
        Command::PulseCheck(args) => (&args.shared, run_pulse_check(args)),
    };
    let artifact = match result {
        Ok(artifact) => artifact,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match &shared.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, artifact) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{artifact}"),
    }
    ExitCode::SUCCESS
}

fn atom_params(shared: &SharedArgs) -> Result<AtomParams, CliError> {
    Ok(AtomParams::new(shared.big_gamma, shared.gamma_loss)?)
}

fn format_or(shared: &SharedArgs, default: Format) -> Format {
    shared.format.unwrap_or(default)
}

fn pretty(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("json serialization");
    s.push('\n');
    s
}

fn run_steady(args: &SteadyArgs) -> Result<String, CliError> {
    let params = atom_params(&args.shared)?;
    let b_in = match (args.intensity, args.bin_re) {
        (Some(intensity), None) => {
            if !(intensity.is_finite() && intensity >= 0.0) {
                return Err(CliError::Usage(format!(
                    "--intensity must be non-negative, got {intensity}"
                )));
            }
            Complex64::new(intensity.sqrt(), 0.0)
        }
        (None, Some(re)) => Complex64::new(re, args.bin_im.unwrap_or(0.0)),
        (None, None) => {
            return Err(CliError::Usage(
                "steady requires --intensity or --bin-re/--bin-im".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflict"),
    };
    let sol = core::steady_state(&params, b_in)?;

    let metadata = json!({
        "big_gamma": args.shared.big_gamma,
        "gamma_loss": args.shared.gamma_loss,
        "intensity": args.intensity,
        "bin_re": args.bin_re,
        "bin_im": args.bin_im,
    });
    match format_or(&args.shared, Format::Json) {
        Format::Json => Ok(pretty(json!({
            "sigma_minus_re": sol.state.sigma_minus.re,
            "sigma_minus_im": sol.state.sigma_minus.im,
            "sigma_z": sol.state.sigma_z,
            "b_out_re": sol.b_out.re,
            "b_out_im": sol.b_out.im,
            "p_noise": sol.p_noise,
            "metadata": metadata,
        }))),
        Format::Csv => Ok(format!(
            "sigma_minus_re,sigma_minus_im,sigma_z,b_out_re,b_out_im,p_noise\n{},{},{},{},{},{}\n",
            sol.state.sigma_minus.re,
            sol.state.sigma_minus.im,
            sol.state.sigma_z,
            sol.b_out.re,
            sol.b_out.im,
            sol.p_noise
        )),
    }
}

fn parse_steps(spec: &str) -> Result<Vec<(f64, Complex64)>, CliError> {
    spec.split(';')
        .filter(|part| !part.is_empty())
        .map(|part| {
            let fields: Vec<&str> = part.split(':').collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(CliError::Usage(format!(
                    "step entry '{part}' must be t:re or t:re:im"
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    CliError::Usage(format!("cannot parse '{s}' in step entry '{part}'"))
                })
            };
            let t = parse(fields[0])?;
            let re = parse(fields[1])?;
            let im = if fields.len() == 3 { parse(fields[2])? } else { 0.0 };
            Ok((t, Complex64::new(re, im)))
        })
        .collect()
}

fn run_simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let params = atom_params(&args.shared)?;

    let require = |flag: &str, value: Option<f64>| {
        value.ok_or_else(|| {
            CliError::Usage(format!("--drive {:?} requires {flag}", args.drive))
        })
    };
    let drive = match args.drive {
        DriveKind::Constant => {
            if args.photons.is_some() || args.duration.is_some() {
                return Err(CliError::Usage(
                    "--photons/--duration only apply to pulsed drives".into(),
                ));
            }
            DriveSignal::constant_intensity(require("--intensity", args.intensity)?)?
        }
        DriveKind::Square => {
            let duration = require("--duration", args.duration)?;
            let photons = require("--photons", args.photons)?;
            let center = args.center.unwrap_or(duration / 2.0);
            DriveSignal::square_pulse(center, duration, photons)?
        }
        DriveKind::Gaussian => {
            let duration = require("--duration", args.duration)?;
            let photons = require("--photons", args.photons)?;
            let center = args.center.unwrap_or(duration);
            DriveSignal::gaussian_pulse(center, duration, photons)?
        }
        DriveKind::Steps => {
            let spec = args.steps.as_deref().ok_or_else(|| {
                CliError::Usage("--drive steps requires --steps".into())
            })?;
            DriveSignal::steps(parse_steps(spec)?)?
        }
    };

    let t_max = args.t_max.unwrap_or(20.0 / args.shared.big_gamma);
    let dt = args.dt.unwrap_or(1e-3 / args.shared.big_gamma);
    let config = IntegratorConfig::new(t_max).with_step(dt).with_stride(args.stride);
    let record =
        dynamics::integrate(&params, &drive, &phase_switch::core::BlochState::ground(), &config)?;
    let audit = dynamics::energy_audit(&record)?;

    match format_or(&args.shared, Format::Csv) {
        Format::Csv => Ok(record.to_csv()),
        Format::Json => {
            let samples: Vec<serde_json::Value> = record
                .samples
                .iter()
                .map(|s| {
                    json!({
                        "t": s.t,
                        "sigma_minus_re": s.state.sigma_minus.re,
                        "sigma_minus_im": s.state.sigma_minus.im,
                        "sigma_z": s.state.sigma_z,
                        "b_in_re": s.b_in.re,
                        "b_in_im": s.b_in.im,
                        "b_out_re": s.b_out.re,
                        "b_out_im": s.b_out.im,
                        "p_noise": s.p_noise,
                        "residual": s.residual,
                    })
                })
                .collect();
            Ok(pretty(json!({
                "metadata": {
                    "big_gamma": args.shared.big_gamma,
                    "gamma_loss": args.shared.gamma_loss,
                    "t_max": t_max,
                    "dt": dt,
                    "stride": args.stride,
                },
                "converged": record.converged,
                "budget": {
                    "input": record.budget.input,
                    "output": record.budget.output,
                    "noise": record.budget.noise,
                    "loss": record.budget.loss,
                },
                "audit": {
                    "max_residual": audit.max_residual,
                    "rms_residual": audit.rms_residual,
                    "closure_defect": audit.closure_defect,
                },
                "samples": samples,
            })))
        }
    }
}

fn run_sweep(args: &SweepArgs) -> Result<String, CliError> {
    let params = atom_params(&args.shared)?;
    let grid = Grid::new(GridAxis::Log10ScaledIntensity, args.grid_min, args.grid_max, args.points)?;
    let rows = sweep::response_sweep(&params, &grid)?;
    match format_or(&args.shared, Format::Csv) {
        Format::Csv => Ok(sweep::response_sweep_to_csv(&rows)),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("json serialization");
            s.push('\n');
            Ok(s)
        }
    }
}

fn run_linear(args: &LinearArgs) -> Result<String, CliError> {
    if let Some(spec) = &args.beta_sweep {
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("cannot parse '{s}' in --beta-sweep")))
        };
        let min = parse(&spec[0])?;
        let max = parse(&spec[1])?;
        let points: usize = spec[2]
            .parse()
            .map_err(|_| CliError::Usage(format!("cannot parse '{}' as point count", spec[2])))?;
        let grid = Grid::new(GridAxis::Beta, min, max, points)?;
        let rows = sweep::beta_sweep(&grid, args.shared.big_gamma)?;
        return match format_or(&args.shared, Format::Csv) {
            Format::Csv => Ok(sweep::beta_sweep_to_csv(&rows)),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&rows).expect("json serialization");
                s.push('\n');
                Ok(s)
            }
        };
    }

    let params = match args.beta {
        Some(beta) => AtomParams::from_beta(args.shared.big_gamma, beta)?,
        None => atom_params(&args.shared)?,
    };
    let ratio = core::linear_response(&params);
    let result = json!({
        "beta": params.beta(),
        "linear_ratio": ratio,
        "intensity_ratio": ratio * ratio,
        "metadata": {
            "big_gamma": args.shared.big_gamma,
            "gamma_loss": params.gamma_loss(),
            "beta": args.beta,
        },
    });
    match format_or(&args.shared, Format::Json) {
        Format::Json => Ok(pretty(result)),
        Format::Csv => Ok(format!(
            "beta,linear_ratio,intensity_ratio\n{},{},{}\n",
            params.beta(),
            ratio,
            ratio * ratio
        )),
    }
}

fn run_params(args: &ParamsArgs) -> Result<String, CliError> {
    let cavity = CavityParams::new(args.g, args.kappa)?;
    let eff = core::effective_gamma(cavity);
    let result = json!({
        "big_gamma": eff.big_gamma,
        "coupling_ratio": eff.coupling_ratio,
        "bad_cavity_ok": eff.bad_cavity_ok,
        "metadata": { "g": args.g, "kappa": args.kappa },
    });
    match format_or(&args.shared, Format::Json) {
        Format::Json => Ok(pretty(result)),
        Format::Csv => Ok(format!(
            "big_gamma,coupling_ratio,bad_cavity_ok\n{},{},{}\n",
            eff.big_gamma, eff.coupling_ratio, eff.bad_cavity_ok
        )),
    }
}

fn run_pulse_check(args: &PulseCheckArgs) -> Result<String, CliError> {
    let params = atom_params(&args.shared)?;
    let check = core::two_photon_pulse_check(&params, args.duration)?;
    let switching = core::switching_intensity(&params);
    let result = json!({
        "average_intensity": check.average_intensity,
        "switching_intensity": check.switching_intensity,
        "exceeds": check.exceeds,
        "generalized_switching_intensity": match switching {
            SwitchingIntensity::Crossing { intensity } => json!(intensity),
            SwitchingIntensity::NoCrossing => json!("no-crossing"),
        },
        "metadata": {
            "big_gamma": args.shared.big_gamma,
            "gamma_loss": args.shared.gamma_loss,
            "duration": args.duration,
        },
    });
    match format_or(&args.shared, Format::Json) {
        Format::Json => Ok(pretty(result)),
        Format::Csv => Ok(format!(
            "average_intensity,switching_intensity,exceeds\n{},{},{}\n",
            check.average_intensity, check.switching_intensity, check.exceeds
        )),
    }
}
