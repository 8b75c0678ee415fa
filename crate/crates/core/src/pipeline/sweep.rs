use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{load_input, run_pipeline_on_data, PipelineConfig, PipelineError};
use crate::error::{invalid, Result};

/// One `(n, seed)` cell of a sweep. Failed runs keep `status` as the error
/// text and leave the metrics empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub seed: u64,
    pub accuracy: Option<f64>,
    pub t_sketch: Option<f64>,
    pub t_solve: Option<f64>,
    pub t_graph: Option<f64>,
    pub t_spectral: Option<f64>,
    pub status: String,
}

/// One run per `(n, seed)`; the input is loaded once. Rows come back
/// sorted by `(n, seed)` regardless of scheduling.
pub fn run_sweep(cfg: &PipelineConfig, n_values: &[usize], seeds: &[u64]) -> std::result::Result<Vec<SweepRow>, PipelineError> {
    if n_values.is_empty() || seeds.is_empty() {
        return Err(PipelineError::new("config", cfg, invalid("sweep needs at least one n and one seed")));
    }
    cfg.validate().map_err(|e| PipelineError::new("config", cfg, e))?;
    let data = load_input(cfg)?;
    let grid: Vec<(usize, u64)> = n_values.iter().flat_map(|&n| seeds.iter().map(move |&s| (n, s))).collect();
    let mut rows: Vec<SweepRow> = grid
        .into_par_iter()
        .map(|(n, seed)| {
            let mut run = cfg.clone();
            run.n = n;
            run.seed = seed;
            run.output_dir = None;
            match run_pipeline_on_data(&run, &data) {
                Ok(out) => {
                    let t = out.report.eval.wall_time_s;
                    SweepRow {
                        n,
                        seed,
                        accuracy: out.report.eval.accuracy,
                        t_sketch: Some(t.sketch),
                        t_solve: Some(t.solve),
                        t_graph: Some(t.graph),
                        t_spectral: Some(t.spectral),
                        status: "ok".into(),
                    }
                }
                Err(e) => SweepRow {
                    n,
                    seed,
                    accuracy: None,
                    t_sketch: None,
                    t_solve: None,
                    t_graph: None,
                    t_spectral: None,
                    status: format!("{} error in {}: {}", e.kind, e.stage, e.source),
                },
            }
        })
        .collect();
    rows.sort_by_key(|r| (r.n, r.seed));
    Ok(rows)
}

/// CSV with header `n,seed,accuracy,t_sketch,t_solve,t_graph,t_spectral,status`.
pub fn write_sweep_csv(rows: &[SweepRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| std::io::Error::other(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
