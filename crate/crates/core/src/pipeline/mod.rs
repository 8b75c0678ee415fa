//! End-to-end runs: load or synthesize → normalize → optional left sketch
//! `X̌ = ŘᵀX` → right sketch `B = X̌R` → solve → k-NN graph → spectral
//! clustering → accuracy, plus grid sweeps over `(n, seed)`.
//!
//! Seeds: `Ř` uses `seed`, `R` uses `seed ⊕ 1`, k-means restarts derive
//! from `seed`. Synthetic data has its own seed inside [`SynthSpec`].

mod config;
mod sweep;

pub use config::{AffinitySpec, InputSpec, PipelineConfig, SynthSpec};
pub use sweep::{run_sweep, write_sweep_csv, SweepRow};

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{self, DataMatrix, MatrixFormat, SubspaceModel};
use crate::error::{invalid, Error};
use crate::eval::{accuracy, EvalReport, Stage, StageTimer};
use crate::graph::{build_affinity_binary, build_affinity_heat, AffinityKind};
use crate::linalg::derive_seed;
use crate::sketch::{apply_left, apply_right, SketchDescriptor, SketchOperator};
use crate::solvers::{self, SolveDiagnostics};
use crate::spectral::{spectral_cluster_with_embedding, ClusterAssignment};

/// Stream id of the k-means seed derived from the master seed.
const KMEANS_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

impl ErrorKind {
    /// Process exit code for the CLI.
    pub fn exit_code(self) -> i32 {
        match self {
            Self::Config => 2,
            Self::Data => 3,
            Self::Numerical => 4,
        }
    }

    fn of(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::DegenerateBound { .. } => Self::Config,
            Error::Numerical(_) => Self::Numerical,
            _ => Self::Data,
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Config => "config",
            Self::Data => "data",
            Self::Numerical => "numerical",
        })
    }
}

/// A failed run: the stage, the error class and the config that failed.
#[derive(Debug)]
pub struct PipelineError {
    pub stage: &'static str,
    pub kind: ErrorKind,
    pub config: Box<PipelineConfig>,
    pub source: Error,
}

impl PipelineError {
    fn new(stage: &'static str, cfg: &PipelineConfig, source: Error) -> Self {
        Self {
            stage,
            kind: ErrorKind::of(&source),
            config: Box::new(cfg.clone()),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let echo = serde_json::to_string(&self.config).unwrap_or_default();
        write!(f, "{} error in stage `{}`: {}\nconfig: {echo}", self.kind, self.stage, self.source)
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

/// Everything written to `{run_id}.report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run_id: String,
    pub config: PipelineConfig,
    /// `Ř` first when a left sketch was used, then `R`.
    pub sketches: Vec<SketchDescriptor>,
    pub solver: SolveDiagnostics,
    pub graph: GraphSummary,
    /// Smallest Laplacian eigenvalues used for the embedding.
    pub eigenvalues: Vec<f64>,
    pub inertia: f64,
    pub eval: EvalReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub edges: usize,
    pub kind: AffinityKind,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub assignment: ClusterAssignment,
    pub report: RunReport,
    /// Files written, empty without `output_dir`.
    pub files: Vec<PathBuf>,
}

type PResult<T> = std::result::Result<T, PipelineError>;

/// Validates, loads the input, runs, and writes artifacts if `output_dir`
/// is set.
pub fn run_pipeline(cfg: &PipelineConfig) -> PResult<RunOutcome> {
    cfg.validate().map_err(|e| PipelineError::new("config", cfg, e))?;
    let data = load_input(cfg)?;
    let mut outcome = run_pipeline_on_data(cfg, &data)?;
    if let Some(dir) = &cfg.output_dir {
        outcome.files = write_artifacts(dir, &outcome).map_err(|e| PipelineError::new("output", cfg, e))?;
    }
    Ok(outcome)
}

/// Reads or synthesizes the input and applies column normalization.
pub fn load_input(cfg: &PipelineConfig) -> PResult<DataMatrix> {
    let err = |e| PipelineError::new("load", cfg, e);
    let raw = match &cfg.input {
        InputSpec::File { path, format } => {
            let format = match format {
                Some(f) => *f,
                None => MatrixFormat::from_path(path, false)
                    .ok_or_else(|| err(invalid(format!("cannot infer the format of {}", path.display()))))?,
            };
            data::load_matrix(path, format).map_err(err)?
        }
        InputSpec::Synth(s) => synthesize(s).map_err(err)?,
    };
    if cfg.normalize {
        data::normalize_columns(&raw).map_err(|e| PipelineError::new("normalize", cfg, e))
    } else {
        Ok(raw)
    }
}

/// Draws the data set described by `s`.
pub fn synthesize(s: &SynthSpec) -> crate::Result<DataMatrix> {
    let dims = vec![s.subspace_dim; s.subspaces];
    let model = SubspaceModel::random_linear(s.ambient_dim, &dims, s.noise_std, s.seed)?;
    let counts = vec![s.points_per_subspace; s.subspaces];
    data::generate_union_of_subspaces(&model, &counts, derive_seed(s.seed, 1))
}

/// Runs every compute stage on already loaded (and normalized) data.
pub fn run_pipeline_on_data(cfg: &PipelineConfig, data: &DataMatrix) -> PResult<RunOutcome> {
    let cfg_err = |e| PipelineError::new("config", cfg, e);
    cfg.validate().map_err(cfg_err)?;
    let x = data.values();
    let (big_d, big_n) = (x.nrows(), x.ncols());
    if let Some(d) = cfg.d {
        config::check_reduced_dim(d, big_d).map_err(cfg_err)?;
    }
    if cfg.knn >= big_n {
        return Err(cfg_err(invalid(format!("knn = {} needs more than {big_n} points", cfg.knn))));
    }
    if cfg.clusters > big_n {
        return Err(cfg_err(invalid(format!("{} clusters for {big_n} points", cfg.clusters))));
    }

    let mut timer = StageTimer::new();
    let (reduced, b, sketches) = timer
        .time(Stage::Sketch, || -> crate::Result<_> {
            let mut sketches = Vec::new();
            let reduced = match cfg.d {
                Some(d) => {
                    let left = SketchOperator::new(cfg.dim_sketch, big_d, d, cfg.seed)?;
                    sketches.push(left.descriptor().clone());
                    Some(apply_left(&left, x)?)
                }
                None => None,
            };
            let right = SketchOperator::new(cfg.sketch, big_n, cfg.n, cfg.seed ^ 1)?;
            sketches.push(right.descriptor().clone());
            let b = apply_right(reduced.as_ref().unwrap_or(x), &right)?;
            Ok((reduced, b, sketches))
        })
        .map_err(|e| PipelineError::new("sketch", cfg, e))?;
    let target = reduced.as_ref().unwrap_or(x);

    let solver_cfg = cfg.solver_config();
    let coeffs = timer
        .time(Stage::Solve, || solvers::solve(cfg.method, target, &b, &solver_cfg))
        .map_err(|e| PipelineError::new("solve", cfg, e))?;

    let graph = timer
        .time(Stage::Graph, || match cfg.affinity.bandwidth() {
            None => build_affinity_binary(&coeffs.values, cfg.knn),
            Some(bw) => build_affinity_heat(&coeffs.values, cfg.knn, bw),
        })
        .map_err(|e| PipelineError::new("graph", cfg, e))?;

    let kmeans_seed = derive_seed(cfg.seed, KMEANS_STREAM);
    let (assignment, embedding) = timer
        .time(Stage::Spectral, || {
            spectral_cluster_with_embedding(&graph, cfg.clusters, kmeans_seed, &cfg.spectral)
        })
        .map_err(|e| PipelineError::new("spectral", cfg, e))?;

    let acc = match data.labels() {
        Some(truth) => Some(accuracy(&assignment.labels, truth).map_err(|e| PipelineError::new("eval", cfg, e))?),
        None => None,
    };
    let report = RunReport {
        run_id: cfg.run_id(),
        config: cfg.clone(),
        sketches,
        solver: coeffs.diagnostics,
        graph: GraphSummary {
            edges: graph.num_edges(),
            kind: graph.kind,
        },
        eigenvalues: embedding.eigenvalues,
        inertia: assignment.inertia,
        eval: EvalReport {
            accuracy: acc,
            wall_time_s: timer.times(),
            n: cfg.n,
            d: cfg.d,
            k: cfg.knn,
            lambda: cfg.lambda,
            seed: cfg.seed,
        },
    };
    Ok(RunOutcome {
        assignment,
        report,
        files: Vec::new(),
    })
}

/// `{run_id}.assignments.csv`, `{run_id}.assignments.json`, `{run_id}.report.json`.
pub fn write_artifacts(dir: &Path, outcome: &RunOutcome) -> crate::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let id = &outcome.report.run_id;
    let csv_path = dir.join(format!("{id}.assignments.csv"));
    let json_path = dir.join(format!("{id}.assignments.json"));
    let report_path = dir.join(format!("{id}.report.json"));

    let mut out = BufWriter::new(File::create(&csv_path)?);
    outcome.assignment.write_csv(&mut out)?;
    out.flush()?;

    let mut out = BufWriter::new(File::create(&json_path)?);
    serde_json::to_writer(&mut out, &outcome.assignment)?;
    out.flush()?;

    let mut out = BufWriter::new(File::create(&report_path)?);
    serde_json::to_writer_pretty(&mut out, &outcome.report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(vec![csv_path, json_path, report_path])
}
