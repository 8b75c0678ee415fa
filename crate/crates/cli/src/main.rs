//! `sketchsc`: run the sketched subspace clustering pipeline from the
//! command line.
//!
//! ```text
//! sketchsc run   --synth K=5,D=50,d=5,per=200,noise=0.01 --n 100 --lambda 1000 --K 5 --normalize --out runs/
//! sketchsc sweep --config base.json --n-values 10,20,40 --seeds 0,1,2 --out runs/
//! sketchsc synth --synth K=3,D=20,d=3,per=50 --output data.csv
//! ```
//!
//! Exit codes: 0 ok, 2 config error, 3 data error, 4 numerical failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sketchsc::data::{save_matrix, MatrixFormat};
use sketchsc::pipeline::{
    run_pipeline, run_sweep, synthesize, write_sweep_csv, AffinitySpec, ErrorKind, InputSpec, PipelineConfig,
    PipelineError, SynthSpec,
};
use sketchsc::{Method, SketchKind};

#[derive(Parser)]
#[command(name = "sketchsc", version, about = "Sketched subspace clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline once and print the report.
    Run(RunArgs),
    /// Run a grid over sketch sizes and seeds; prints CSV.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        n_values: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
    },
    /// Write a synthetic union-of-subspaces data set with labels.
    Synth {
        #[arg(long)]
        synth: SynthSpec,
        /// Output path; the extension picks the format (csv, mtx, bin).
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Base config (JSON); flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Data file (csv, mtx/mm, bin/sksc).
    #[arg(long, conflicts_with = "synth")]
    input: Option<PathBuf>,
    /// The CSV input carries an integer label in its last column.
    #[arg(long, requires = "input")]
    labels: bool,
    /// Synthetic input, e.g. `K=5,D=50,d=5,per=200,noise=0.01,seed=0`.
    #[arg(long)]
    synth: Option<SynthSpec>,
    #[arg(long)]
    method: Option<Method>,
    /// Columns of the right sketch.
    #[arg(long)]
    n: Option<usize>,
    /// Reduced dimension; enables the left sketch.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    sketch: Option<SketchKind>,
    #[arg(long)]
    dim_sketch: Option<SketchKind>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    nu0: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    nu_max: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Neighbours per point in the affinity graph [default: 5].
    #[arg(long)]
    knn: Option<usize>,
    /// `binary` or `heat`.
    #[arg(long)]
    affinity: Option<String>,
    /// Heat-kernel bandwidth: a positive number or `auto`.
    #[arg(long)]
    sigma: Option<String>,
    /// Number of clusters.
    #[arg(long = "K")]
    clusters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    normalize: bool,
    /// Directory for assignments and reports.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure before the pipeline starts; always a config or data error.
struct Fail {
    kind: ErrorKind,
    message: String,
}

impl Fail {
    fn config(message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Config,
            message: message.into(),
        }
    }
}

impl From<PipelineError> for Fail {
    fn from(e: PipelineError) -> Self {
        Self {
            kind: e.kind,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.kind.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Fail> {
    match command {
        Command::Run(args) => {
            let cfg = build_config(args, None)?;
            let outcome = run_pipeline(&cfg)?;
            let json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
            println!("{json}");
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Sweep { run, n_values, seeds } => {
            let cfg = build_config(run, n_values.first().copied())?;
            let rows = run_sweep(&cfg, &n_values, &seeds)?;
            write_sweep_csv(&rows, io::stdout().lock()).map_err(io_fail)?;
            if let Some(dir) = &cfg.output_dir {
                let path = dir.join(format!("{}.sweep.csv", cfg.run_id()));
                std::fs::create_dir_all(dir).map_err(|e| io_fail(e.into()))?;
                let file = File::create(&path).map_err(|e| io_fail(e.into()))?;
                write_sweep_csv(&rows, BufWriter::new(file)).map_err(io_fail)?;
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Synth { synth, output } => {
            let format = MatrixFormat::from_path(&output, true)
                .ok_or_else(|| Fail::config(format!("cannot infer a format for {}", output.display())))?;
            let data = synthesize(&synth).map_err(|e| Fail::config(e.to_string()))?;
            save_matrix(&data, &output, format).map_err(io_fail)?;
            let mut err = io::stderr().lock();
            let _ = writeln!(err, "wrote {} points of dimension {} to {}", data.len(), data.dim(), output.display());
            Ok(())
        }
    }
}

fn io_fail(e: sketchsc::Error) -> Fail {
    Fail {
        kind: ErrorKind::Data,
        message: e.to_string(),
    }
}

fn read_config(path: &Path) -> Result<PipelineConfig, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail::config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail::config(format!("{}: {e}", path.display())))
}

/// `sweep_n` stands in for `--n` when the sweep supplies the sizes.
fn build_config(a: RunArgs, sweep_n: Option<usize>) -> Result<PipelineConfig, Fail> {
    let input = match (a.input, a.synth) {
        (Some(path), None) => {
            let format = if a.labels { Some(MatrixFormat::Csv { labels: true }) } else { None };
            Some(InputSpec::File { path, format })
        }
        (None, Some(s)) => Some(InputSpec::Synth(s)),
        _ => None,
    };
    let mut cfg = match a.config {
        Some(path) => read_config(&path)?,
        None => {
            let missing = |what: &str| Fail::config(format!("{what} is required without --config"));
            PipelineConfig::new(
                input.clone().ok_or_else(|| missing("--input or --synth"))?,
                a.method.unwrap_or(Method::SketchLsr),
                a.n.or(sweep_n).ok_or_else(|| missing("--n"))?,
                a.lambda.ok_or_else(|| missing("--lambda"))?,
                a.knn.unwrap_or(5),
                a.clusters.ok_or_else(|| missing("--K"))?,
            )
        }
    };
    if let Some(v) = input {
        cfg.input = v;
    }
    if let Some(v) = a.method {
        cfg.method = v;
    }
    if let Some(v) = a.n {
        cfg.n = v;
    }
    if a.d.is_some() {
        cfg.d = a.d;
    }
    if let Some(v) = a.sketch {
        cfg.sketch = v;
    }
    if let Some(v) = a.dim_sketch {
        cfg.dim_sketch = v;
    }
    if let Some(v) = a.lambda {
        cfg.lambda = v;
    }
    cfg.nu0 = a.nu0.or(cfg.nu0);
    cfg.p = a.p.or(cfg.p);
    cfg.nu_max = a.nu_max.or(cfg.nu_max);
    cfg.tol = a.tol.or(cfg.tol);
    cfg.max_iter = a.max_iter.or(cfg.max_iter);
    if let Some(v) = a.knn {
        cfg.knn = v;
    }
    if let Some(v) = a.clusters {
        cfg.clusters = v;
    }
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if a.normalize {
        cfg.normalize = true;
    }
    if a.out.is_some() {
        cfg.output_dir = a.out;
    }
    cfg.affinity = affinity(a.affinity.as_deref(), a.sigma.as_deref(), cfg.affinity)?;
    Ok(cfg)
}

fn affinity(kind: Option<&str>, sigma: Option<&str>, current: AffinitySpec) -> Result<AffinitySpec, Fail> {
    let sigma = match sigma {
        None => None,
        Some(s) if s.eq_ignore_ascii_case("auto") => Some(None),
        Some(s) => Some(Some(
            s.parse::<f64>().map_err(|_| Fail::config(format!("--sigma must be a number or `auto`, got {s:?}")))?,
        )),
    };
    match (kind, sigma) {
        (Some("binary"), None) => Ok(AffinitySpec::Binary),
        (Some("binary"), Some(_)) => Err(Fail::config("--sigma only applies to --affinity heat")),
        (Some("heat"), s) | (None, s @ Some(_)) => Ok(AffinitySpec::Heat {
            sigma: s.unwrap_or(match current {
                AffinitySpec::Heat { sigma } => sigma,
                AffinitySpec::Binary => None,
            }),
        }),
        (Some(other), _) => Err(Fail::config(format!("--affinity must be `binary` or `heat`, got {other:?}"))),
        (None, None) => Ok(current),
    }
}
