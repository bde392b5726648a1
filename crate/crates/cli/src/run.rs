use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use smoothperc_core::oracle::reference_min_gnorm;
use smoothperc_core::solvers::{
    isnkpvn, nkp, normalized_perceptron, nvn, perceptron, snkp, snkpvn,
};
use smoothperc_core::{
    check_certificate, synth, Algorithm, Certificate, Dataset, GramMatrix, Kernel, Outcome,
    SimplexVector, SolveOutcome, SolverConfig,
};

use crate::error::{CliError, Result};
use crate::io::{load_dataset, load_gram, load_labels, write_trace};

/// Tolerance of the `margin` command; kept above the ~1e-8 rounding floor of
/// `||p||_G` so that infeasible inputs are reported as such.
pub const MARGIN_TOLERANCE: f64 = 1e-7;

/// Size of the synthetic instance `bench` generates when no data file is given.
pub const BENCH_POINTS: usize = 32;
pub const BENCH_DIM: usize = 3;
pub const BENCH_MIN_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Certify,
    Margin,
    Bench,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Certify => "certify",
            Command::Margin => "margin",
            Command::Bench => "bench",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    Linear,
    Polynomial { degree: u32, offset: f64 },
    Rbf { bandwidth: f64 },
    Precomputed { gram_path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub command: Command,
    /// Optional only for `bench`, which then generates a seeded instance.
    pub data_path: Option<PathBuf>,
    pub kernel: KernelSpec,
    /// Required by `solve`; ignored elsewhere.
    pub algorithm: Option<Algorithm>,
    pub config: SolverConfig,
    /// Dual threshold of `snkpvn`; defaults to `config.dual_epsilon`.
    pub delta: Option<f64>,
    /// For `bench`, one file per algorithm: `<stem>.<algorithm>.<ext>`.
    pub trace_path: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunRequest {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            data_path: None,
            kernel: KernelSpec::Linear,
            algorithm: None,
            config: SolverConfig::default(),
            delta: None,
            trace_path: None,
            seed: None,
        }
    }

    /// Rejects flag combinations that make no sense for the command.
    pub fn validate(&self) -> Result<()> {
        let usage = |msg: &str| Err(CliError::Usage(msg.to_owned()));
        match self.command {
            Command::Solve => match self.algorithm {
                None => return usage("solve requires --algorithm"),
                Some(a) if a.is_linear_only() && self.kernel != KernelSpec::Linear => {
                    return usage("the perceptron baselines only support --kernel linear")
                }
                Some(a) if self.delta.is_some() && a != Algorithm::Snkpvn => {
                    return usage("--delta only applies to snkpvn")
                }
                Some(_) => {}
            },
            _ if self.algorithm.is_some() => return usage("--algorithm only applies to solve"),
            Command::Certify | Command::Margin if self.delta.is_some() => {
                return usage("--delta only applies to snkpvn")
            }
            _ => {}
        }
        if self.command != Command::Bench && self.seed.is_some() {
            return usage("--seed only applies to bench");
        }
        if self.command == Command::Bench && self.seed.is_some() && self.data_path.is_some() {
            return usage("--seed and --data are mutually exclusive");
        }
        if self.command != Command::Bench && self.data_path.is_none() {
            return usage("--data is required");
        }
        if self.command == Command::Margin && self.trace_path.is_some() {
            return usage("margin does not produce a trace");
        }
        if self.config.trace_every > 0 && self.trace_path.is_none() {
            return usage("--trace-every requires --trace");
        }
        if let Some(delta) = self.delta {
            if !(delta > 0.0 && delta.is_finite()) {
                return usage("--delta must be positive");
            }
        }
        if self.command == Command::Certify && self.config.dual_epsilon <= 0.0 {
            return usage("certify requires --epsilon > 0");
        }
        self.config
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub command: String,
    /// Solver name, `oracle` for `margin`, `race` for `bench`.
    pub algorithm: String,
    /// `primal`, `dual` or `limit`; `feasible` or `infeasible` for `margin`.
    pub outcome_kind: String,
    pub iterations: usize,
    /// `alpha` for primal and limit outcomes, `p` for dual ones.
    pub certificate: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_gnorm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_decision: Option<f64>,
    /// Reference margin estimate; only for `margin`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub epsilon: f64,
    pub wall_time_ms: f64,
    /// One entry per algorithm; only for `bench`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub race: Vec<RunResult>,
}

impl RunResult {
    /// 0 primal (or feasible), 1 dual (or infeasible), 2 iteration limit.
    pub fn exit_status(&self) -> u8 {
        match self.outcome_kind.as_str() {
            "dual" | "infeasible" => 1,
            "limit" => 2,
            _ => 0,
        }
    }

    pub fn summary(&self) -> String {
        if !self.race.is_empty() {
            return self
                .race
                .iter()
                .map(RunResult::summary)
                .collect::<Vec<_>>()
                .join("\n");
        }
        let detail = match (self.margin, self.certificate_gnorm, self.min_decision) {
            (Some(m), _, _) => format!("margin estimate {m:.6}"),
            (None, Some(g), _) => format!("certificate G-norm {g:.3e}"),
            (None, None, Some(d)) => format!("min decision value {d:.3e}"),
            _ => String::new(),
        };
        format!(
            "{}: {} after {} iterations, {detail} ({:.3} ms)",
            self.algorithm, self.outcome_kind, self.iterations, self.wall_time_ms
        )
    }
}

enum Instance {
    Features(Dataset, Kernel),
    Precomputed(GramMatrix),
}

impl Instance {
    fn load(request: &RunRequest) -> Result<Self> {
        let kernel = match &request.kernel {
            KernelSpec::Precomputed { gram_path } => {
                let data = request
                    .data_path
                    .as_deref()
                    .ok_or_else(|| CliError::Usage("--data is required".into()))?;
                let labels = load_labels(data)?;
                return Ok(Instance::Precomputed(load_gram(gram_path, &labels)?));
            }
            KernelSpec::Linear => Kernel::Linear,
            KernelSpec::Polynomial { degree, offset } => Kernel::Polynomial {
                degree: *degree,
                offset: *offset,
            },
            KernelSpec::Rbf { bandwidth } => Kernel::Rbf {
                bandwidth: *bandwidth,
            },
        };
        kernel.validate()?;
        let data = match &request.data_path {
            Some(path) => load_dataset(path)?,
            None => synth::planted_separable(
                &mut synth::rng(request.seed.unwrap_or(0)),
                BENCH_POINTS,
                BENCH_DIM,
                BENCH_MIN_MARGIN,
            ),
        };
        Ok(Instance::Features(data, kernel))
    }

    fn gram(&self) -> Result<GramMatrix> {
        match self {
            Instance::Features(data, kernel) => Ok(GramMatrix::build(data, kernel)?),
            Instance::Precomputed(g) => Ok(g.clone()),
        }
    }

    fn data(&self) -> Option<&Dataset> {
        match self {
            Instance::Features(data, Kernel::Linear) => Some(data),
            _ => None,
        }
    }
}

/// Runs one command. Traces are written before returning.
pub fn run(request: &RunRequest) -> Result<RunResult> {
    request.validate()?;
    let instance = Instance::load(request)?;
    let g = instance.gram()?;
    match request.command {
        Command::Solve => {
            let algorithm = request.algorithm.expect("validated");
            solve_one(
                request,
                &instance,
                &g,
                algorithm,
                request.trace_path.as_deref(),
            )
        }
        Command::Certify => solve_one(
            request,
            &instance,
            &g,
            Algorithm::Isnkpvn,
            request.trace_path.as_deref(),
        ),
        Command::Margin => {
            let start = Instant::now();
            let report = reference_min_gnorm(&g, MARGIN_TOLERANCE)?;
            Ok(RunResult {
                command: Command::Margin.name().into(),
                algorithm: "oracle".into(),
                outcome_kind: if report.feasible {
                    "feasible"
                } else {
                    "infeasible"
                }
                .into(),
                iterations: report.iterations,
                certificate: report.minimizer.into_vec(),
                certificate_gnorm: Some(report.margin_estimate),
                min_decision: None,
                margin: Some(report.margin_estimate),
                epsilon: MARGIN_TOLERANCE,
                wall_time_ms: elapsed_ms(start),
                race: Vec::new(),
            })
        }
        Command::Bench => {
            let start = Instant::now();
            let mut race = Vec::new();
            for algorithm in Algorithm::ALL {
                if algorithm.is_linear_only() && instance.data().is_none() {
                    continue;
                }
                let trace = request
                    .trace_path
                    .as_deref()
                    .map(|p| per_algorithm_path(p, algorithm));
                race.push(solve_one(
                    request,
                    &instance,
                    &g,
                    algorithm,
                    trace.as_deref(),
                )?);
            }
            Ok(RunResult {
                command: Command::Bench.name().into(),
                algorithm: "race".into(),
                outcome_kind: "race".into(),
                iterations: race.iter().map(|r| r.iterations).sum(),
                certificate: Vec::new(),
                certificate_gnorm: None,
                min_decision: None,
                margin: None,
                epsilon: request.config.dual_epsilon,
                wall_time_ms: elapsed_ms(start),
                race,
            })
        }
    }
}

/// `dir/trace.jsonl` becomes `dir/trace.<algorithm>.jsonl`.
pub fn per_algorithm_path(path: &Path, algorithm: Algorithm) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{algorithm}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{algorithm}"),
    };
    path.with_file_name(name)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn solve_one(
    request: &RunRequest,
    instance: &Instance,
    g: &GramMatrix,
    algorithm: Algorithm,
    trace_path: Option<&Path>,
) -> Result<RunResult> {
    let config = &request.config;
    let start = Instant::now();
    let out: SolveOutcome = match algorithm {
        Algorithm::Perceptron | Algorithm::NormalizedPerceptron => {
            let data = instance.data().ok_or_else(|| {
                CliError::Usage("the perceptron baselines only support --kernel linear".into())
            })?;
            if algorithm == Algorithm::Perceptron {
                perceptron(data, config)?
            } else {
                normalized_perceptron(data, config)?
            }
        }
        Algorithm::Nkp => nkp(g, config)?,
        Algorithm::Snkp => snkp(g, config)?,
        Algorithm::Nvn => nvn(g, config)?,
        Algorithm::Snkpvn => {
            let delta = request.delta.unwrap_or(config.dual_epsilon);
            snkpvn(g, &SimplexVector::uniform(g.size()), delta, config)?
        }
        Algorithm::Isnkpvn => isnkpvn(g, config)?,
    };
    let wall_time_ms = elapsed_ms(start);
    if let Some(path) = trace_path {
        write_trace(path, &out.trace)?;
    }
    let mut outcome_kind = out.outcome.kind().to_owned();
    let (certificate, certificate_gnorm, min_decision) = match out.outcome {
        Outcome::Primal { alpha } => {
            let min = g
                .decision_values(&alpha)?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            (alpha, None, Some(min))
        }
        Outcome::Dual { p, g_norm } => (p.into_vec(), Some(g_norm), None),
        // Solvers without a dual test can stop on an iterate that is already
        // an epsilon certificate; report what the final vector proves.
        Outcome::Limit { last, alpha } => match check_certificate(g, &alpha, config.dual_epsilon) {
            Ok(Certificate::DualEpsilon { g_norm, .. }) => {
                outcome_kind = "dual".into();
                (alpha, Some(g_norm), None)
            }
            Ok(Certificate::PrimalFeasible { min_decision, .. }) => {
                outcome_kind = "primal".into();
                (alpha, None, Some(min_decision))
            }
            Err(_) => (alpha, None, Some(last.min_decision)),
        },
    };
    Ok(RunResult {
        command: request.command.name().into(),
        algorithm: algorithm.name().into(),
        outcome_kind,
        iterations: out.iterations,
        certificate,
        certificate_gnorm,
        min_decision,
        margin: None,
        epsilon: config.dual_epsilon,
        wall_time_ms,
        race: Vec::new(),
    })
}
