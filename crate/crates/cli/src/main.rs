use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use smoothperc_cli::{run, CliError, Command, KernelSpec, RunRequest, EXIT_DATA, EXIT_USAGE};
use smoothperc_core::{Algorithm, SolverConfig};

/// Hard-margin kernel perceptron solvers with primal and dual certificates.
///
/// Exit status: 0 primal certificate (or feasible), 1 dual certificate (or
/// infeasible), 2 iteration limit, 3 invalid input, 64 usage error.
#[derive(Parser)]
#[command(name = "smoothperc", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run one solver.
    Solve(Opts),
    /// Find a primal separator or an epsilon dual certificate.
    Certify(Opts),
    /// Compute the reference minimum G-norm over the simplex.
    Margin(Opts),
    /// Race every applicable solver on one instance.
    Bench(Opts),
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum KernelKind {
    Linear,
    Poly,
    Rbf,
    Precomputed,
}

#[derive(Args)]
struct Opts {
    /// Headerless CSV: label (-1 or +1), then features.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "linear")]
    kernel: KernelKind,
    /// Polynomial degree [default: 2].
    #[arg(long)]
    degree: Option<u32>,
    /// Polynomial offset [default: 1].
    #[arg(long)]
    offset: Option<f64>,
    /// RBF bandwidth [default: 1].
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Raw n x n kernel matrix (CSV) for --kernel precomputed.
    #[arg(long)]
    gram: Option<PathBuf>,
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Dual accuracy for nvn, snkpvn and isnkpvn.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    /// Dual threshold for snkpvn [default: epsilon].
    #[arg(long)]
    delta: Option<f64>,
    /// Outer shrink factor for isnkpvn.
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
    /// JSON-lines trace file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Record every n-th iteration [default: 1 with --trace].
    #[arg(long)]
    trace_every: Option<usize>,
    /// Seed of the synthetic bench instance.
    #[arg(long)]
    seed: Option<u64>,
}

impl Opts {
    fn into_request(self, command: Command) -> Result<RunRequest, CliError> {
        let usage = |msg: &str| Err(CliError::Usage(msg.to_owned()));
        if self.kernel != KernelKind::Poly && (self.degree.is_some() || self.offset.is_some()) {
            return usage("--degree and --offset require --kernel poly");
        }
        if self.kernel != KernelKind::Rbf && self.bandwidth.is_some() {
            return usage("--bandwidth requires --kernel rbf");
        }
        if self.kernel != KernelKind::Precomputed && self.gram.is_some() {
            return usage("--gram requires --kernel precomputed");
        }
        let kernel = match self.kernel {
            KernelKind::Linear => KernelSpec::Linear,
            KernelKind::Poly => KernelSpec::Polynomial {
                degree: self.degree.unwrap_or(2),
                offset: self.offset.unwrap_or(1.0),
            },
            KernelKind::Rbf => KernelSpec::Rbf {
                bandwidth: self.bandwidth.unwrap_or(1.0),
            },
            KernelKind::Precomputed => match self.gram {
                Some(gram_path) => KernelSpec::Precomputed { gram_path },
                None => return usage("--kernel precomputed requires --gram"),
            },
        };
        let trace_every = match (&self.trace, self.trace_every) {
            (Some(_), None) => 1,
            (_, Some(0)) => return usage("--trace-every must be at least 1"),
            (_, every) => every.unwrap_or(0),
        };
        let request = RunRequest {
            command,
            data_path: self.data,
            kernel,
            algorithm: self.algorithm,
            config: SolverConfig {
                max_iterations: self.max_iter,
                dual_epsilon: self.epsilon,
                gamma: self.gamma,
                trace_every,
            },
            delta: self.delta,
            trace_path: self.trace,
            seed: self.seed,
        };
        request.validate()?;
        Ok(request)
    }
}

fn execute(cli: Cli) -> anyhow::Result<u8> {
    let (command, opts) = match cli.command {
        Sub::Solve(o) => (Command::Solve, o),
        Sub::Certify(o) => (Command::Certify, o),
        Sub::Margin(o) => (Command::Margin, o),
        Sub::Bench(o) => (Command::Bench, o),
    };
    let request = opts.into_request(command)?;
    let result = run(&request)?;
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer(&mut stdout, &result).context("writing result")?;
    writeln!(stdout).context("writing result")?;
    eprintln!("{}", result.summary());
    Ok(result.exit_status())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<CliError>()
                .map_or(EXIT_DATA, CliError::exit_code);
            ExitCode::from(code)
        }
    }
}
