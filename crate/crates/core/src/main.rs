use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use hamlift::config::RunConfig;
use hamlift::correspondence::{PropagationMethod, Propagator};
use hamlift::grid::WaveFunction;
use hamlift::hamiltonian_flow::{
    banyaga_reconstruct, integrate_variational, BanyagaOptions, FlowFamily, FlowMap, LinearFamily, Method, Trajectory,
};
use hamlift::io::{complex_matrix_json, emit, real_matrix_json, to_json_string, write_kernel_csv, write_trajectory_csv, write_wavefunction_csv};
use hamlift::phase_space::{symplectic_residual, PhaseSpacePoint, QuadraticGeneratingFunction};
use hamlift::verify::run_verification;
use hamlift::weyl::{hermiticity_residual, symbol_by_name, symbol_to_kernel, CovarianceRecord, TauParameter};
use hamlift::HamliftError;
use serde_json::json;

/// Hamiltonian flows, their quantization on a grid, and checks of the
/// classical–quantum correspondence.
#[derive(Parser, Debug)]
#[command(name = "hamlift", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Reduced Planck constant; overrides the config and HAMLIFT_HBAR.
    #[arg(long, global = true)]
    hbar: Option<f64>,
    /// Number of grid points.
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Integrator or propagation steps, depending on the command.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// `rk4`/`symplectic_leapfrog` for classical commands,
    /// `eigensolve`/`split_step`/`metaplectic` for `propagate`.
    #[arg(long, global = true)]
    method: Option<String>,
    /// Seed for randomly generated probe states.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate Hamilton's equations and write the trajectory as CSV.
    Flow {
        /// Initial point `x,p`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0")]
        z0: Vec<f64>,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        t: f64,
        /// Append the energy `H(z, t)` as column `E`.
        #[arg(long)]
        energy: bool,
    },
    /// Integrate the variational equation and write `S(t)` as JSON.
    Jacobian {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0")]
        z0: Vec<f64>,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        t: f64,
    },
    /// Rebuild the Hamiltonian of a linear flow family and sample it.
    Banyaga {
        /// `rotation`, `shear` or `identity`.
        #[arg(long, default_value = "rotation")]
        family: String,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
    },
    /// Quantize a named symbol and summarize the operator as JSON.
    Quantize {
        #[arg(long, default_value = "xp")]
        symbol: String,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        /// Write the kernel as CSV instead of the JSON summary.
        #[arg(long)]
        kernel_csv: bool,
    },
    /// Propagate a coherent state and write the wavefunction as CSV.
    Propagate {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0")]
        z0: Vec<f64>,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        t: f64,
    },
    /// Measure symplectic covariance of a τ-quantized symbol.
    Covariance {
        #[arg(long, default_value = "xp")]
        symbol: String,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        /// Generating function `P,L,Q`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,1,0")]
        w: Vec<f64>,
    },
    /// Run the verification suite; exits 1 when any check fails.
    Verify,
}

enum Failure {
    Usage(HamliftError),
    Runtime(HamliftError),
    Checks,
}

impl From<HamliftError> for Failure {
    fn from(e: HamliftError) -> Self {
        match e {
            HamliftError::Config { .. } | HamliftError::InvalidArgument(_) | HamliftError::Io(_) => Failure::Usage(e),
            other => Failure::Runtime(other),
        }
    }
}

fn load_config(common: &Common) -> hamlift::Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.apply_env()?;
    if let Some(h) = common.hbar {
        cfg.hbar = h;
    }
    if let Some(n) = common.grid_n {
        cfg.grid.n = n;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(s) = common.steps {
        cfg.integrator.steps = s;
        cfg.propagation.steps = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn point(z: &[f64]) -> hamlift::Result<PhaseSpacePoint> {
    match z {
        [x, p] => Ok(PhaseSpacePoint::new1(*x, *p)),
        _ => Err(HamliftError::InvalidArgument(format!("expected a point `x,p`, got {} values", z.len()))),
    }
}

fn integrator(common: &Common, cfg: &RunConfig) -> hamlift::Result<Method> {
    common.method.as_deref().map_or(Ok(cfg.integrator.method), str::parse)
}

fn json_bytes(value: &impl serde::Serialize) -> hamlift::Result<Vec<u8>> {
    to_json_string(value).map(String::into_bytes)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let common = &cli.common;
    let cfg = load_config(common)?;
    let out = common.out.as_deref();
    match &cli.command {
        Command::Flow { z0, t, energy } => {
            let z0 = point(z0)?;
            let h = cfg.classical()?;
            let traj = if *t == 0.0 {
                Trajectory { times: vec![0.0], states: vec![z0.to_vector()] }
            } else {
                FlowMap::new(h.clone(), 0.0, *t, cfg.integrator.steps)
                    .with_method(integrator(common, &cfg)?)
                    .trajectory(&z0.to_vector())?
            };
            let energies = if *energy {
                Some(traj.times.iter().zip(&traj.states).map(|(&s, z)| h.eval(z, s)).collect::<hamlift::Result<Vec<_>>>()?)
            } else {
                None
            };
            let mut buf = Vec::new();
            write_trajectory_csv(&mut buf, &traj, energies.as_deref())?;
            emit(out, &buf)?;
        }
        Command::Jacobian { z0, t } => {
            if integrator(common, &cfg)? != Method::Rk4 {
                return Err(Failure::Usage(HamliftError::InvalidArgument("the variational equation is integrated with rk4".into())));
            }
            let z0 = point(z0)?;
            let traj = integrate_variational(&cfg.classical()?, &z0, 0.0, *t, cfg.integrator.steps)?;
            let s = traj.final_jacobian();
            let report = json!({
                "base_point": [z0.x[0], z0.p[0]],
                "time": t,
                "steps": cfg.integrator.steps,
                "final_state": traj.final_state().iter().copied().collect::<Vec<_>>(),
                "jacobian": real_matrix_json(s),
                "symplectic_residual": symplectic_residual(s)?,
            });
            emit(out, &json_bytes(&report)?)?;
        }
        Command::Banyaga { family, t } => {
            let fam: Arc<dyn FlowFamily> = Arc::new(match family.as_str() {
                "rotation" => LinearFamily::rotation(),
                "shear" => LinearFamily::shear(),
                "identity" => LinearFamily::identity(1),
                other => {
                    return Err(Failure::Usage(HamliftError::InvalidArgument(format!(
                        "unknown family `{other}` (expected rotation, shear or identity)"
                    ))))
                }
            });
            let h = banyaga_reconstruct(fam, None, BanyagaOptions::default())?;
            let mut samples = Vec::new();
            for i in -4..=4 {
                for j in -4..=4 {
                    let z = nalgebra::DVector::from_vec(vec![0.5 * i as f64, 0.5 * j as f64]);
                    samples.push(json!({"x": z[0], "p": z[1], "h": h.eval(&z, *t)?}));
                }
            }
            emit(out, &json_bytes(&json!({"family": family, "time": t, "samples": samples}))?)?;
        }
        Command::Quantize { symbol, tau, kernel_csv } => {
            let grid = cfg.grid()?;
            let a = symbol_by_name(symbol)?;
            let kernel = symbol_to_kernel(&a, TauParameter::new(*tau)?, &grid);
            if *kernel_csv {
                let mut buf = Vec::new();
                write_kernel_csv(&mut buf, &kernel)?;
                emit(out, &buf)?;
            } else {
                let m = kernel.operator_matrix();
                let c = grid.len() / 2;
                let block = m.view((c - 2, c - 2), (5, 5)).into_owned();
                let report = json!({
                    "symbol": symbol,
                    "tau": tau,
                    "n_points": grid.len(),
                    "hbar": grid.hbar(),
                    "hermiticity_residual": hermiticity_residual(&m),
                    "center_rows": c - 2,
                    "center_block": complex_matrix_json(&block),
                });
                emit(out, &json_bytes(&report)?)?;
            }
        }
        Command::Propagate { z0, t } => {
            let grid = cfg.grid()?;
            let z0 = point(z0)?;
            let method = common.method.as_deref().map_or(Ok(cfg.propagation.method), str::parse::<PropagationMethod>)?;
            let psi = WaveFunction::coherent(grid, z0.x[0], z0.p[0])?;
            let out_psi = Propagator::new(cfg.quantum()?, grid, method, cfg.propagation.steps)?.propagate(&psi, *t)?;
            let mut buf = Vec::new();
            write_wavefunction_csv(&mut buf, &out_psi)?;
            emit(out, &buf)?;
        }
        Command::Covariance { symbol, tau, w } => {
            let [p, l, q] = w.as_slice() else {
                return Err(Failure::Usage(HamliftError::InvalidArgument(format!(
                    "expected `P,L,Q`, got {} values",
                    w.len()
                ))));
            };
            let w = QuadraticGeneratingFunction::new1(*p, *l, *q)?;
            let record = CovarianceRecord::measure(&symbol_by_name(symbol)?, &w, TauParameter::new(*tau)?, &cfg.grid()?)?;
            emit(out, &json_bytes(&record)?)?;
        }
        Command::Verify => {
            let report = run_verification(&cfg);
            emit(out, &json_bytes(&report)?)?;
            if !report.passed {
                return Err(Failure::Checks);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.common.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => {
            eprintln!("hamlift: verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("hamlift: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("hamlift: {e}");
            ExitCode::from(2)
        }
    }
}
