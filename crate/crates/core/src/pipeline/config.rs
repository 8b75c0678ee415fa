use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::MatrixFormat;
use crate::error::{invalid, Error, Result};
use crate::graph::Bandwidth;
use crate::sketch::SketchKind;
use crate::solvers::{Method, SolverConfig};
use crate::spectral::SpectralOptions;

/// Synthetic union of `subspaces` random linear subspaces of equal dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub subspaces: usize,
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub points_per_subspace: usize,
    pub noise_std: f64,
    pub seed: u64,
}

impl fmt::Display for SynthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K={},D={},d={},per={},noise={},seed={}",
            self.subspaces, self.ambient_dim, self.subspace_dim, self.points_per_subspace, self.noise_std, self.seed
        )
    }
}

/// Parses `K=5,D=50,d=5,per=200,noise=0.01,seed=0`. `noise` and `seed`
/// default to 0.
impl FromStr for SynthSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut k, mut big_d, mut d, mut per) = (None, None, None, None);
        let (mut noise, mut seed) = (0.0, 0);
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value in synth spec, got {part:?}")))?;
            let bad = |_| invalid(format!("bad value for {key}: {value:?}"));
            match key.trim() {
                "K" => k = Some(value.parse().map_err(bad)?),
                "D" => big_d = Some(value.parse().map_err(bad)?),
                "d" => d = Some(value.parse().map_err(bad)?),
                "per" | "N_k" => per = Some(value.parse().map_err(bad)?),
                "noise" => noise = value.parse().map_err(|_| invalid(format!("bad noise {value:?}")))?,
                "seed" => seed = value.parse().map_err(bad)?,
                other => return Err(invalid(format!("unknown synth key {other:?}"))),
            }
        }
        let need = |v: Option<usize>, name: &str| v.ok_or_else(|| invalid(format!("synth spec is missing {name}")));
        Ok(Self {
            subspaces: need(k, "K")?,
            ambient_dim: need(big_d, "D")?,
            subspace_dim: need(d, "d")?,
            points_per_subspace: need(per, "per")?,
            noise_std: noise,
            seed,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InputSpec {
    File {
        path: PathBuf,
        /// Guessed from the extension when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        format: Option<MatrixFormat>,
    },
    Synth(SynthSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AffinitySpec {
    Binary,
    /// `sigma: None` picks the median k-NN distance.
    Heat {
        #[serde(default)]
        sigma: Option<f64>,
    },
}

impl AffinitySpec {
    pub fn bandwidth(self) -> Option<Bandwidth> {
        match self {
            Self::Binary => None,
            Self::Heat { sigma: Some(s) } => Some(Bandwidth::Fixed(s)),
            Self::Heat { sigma: None } => Some(Bandwidth::Auto),
        }
    }
}

fn rademacher() -> SketchKind {
    SketchKind::Rademacher
}

fn binary() -> AffinitySpec {
    AffinitySpec::Binary
}

/// Everything a run depends on. Two runs with equal configs (ignoring
/// `output_dir`) produce the same assignments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: InputSpec,
    pub method: Method,
    /// Columns of the right sketch `R` (`N × n`).
    pub n: usize,
    /// Rows kept by the left sketch `Ř` (`D × d`); absent means no left sketch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default = "rademacher")]
    pub sketch: SketchKind,
    #[serde(default = "rademacher")]
    pub dim_sketch: SketchKind,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    pub knn: usize,
    #[serde(default = "binary")]
    pub affinity: AffinitySpec,
    pub clusters: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub normalize: bool,
    #[serde(default)]
    pub spectral: SpectralOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl PipelineConfig {
    /// Defaults for everything but the input and the required sizes.
    pub fn new(input: InputSpec, method: Method, n: usize, lambda: f64, knn: usize, clusters: usize) -> Self {
        Self {
            input,
            method,
            n,
            d: None,
            sketch: SketchKind::Rademacher,
            dim_sketch: SketchKind::Rademacher,
            lambda,
            nu0: None,
            p: None,
            nu_max: None,
            tol: None,
            max_iter: None,
            knn,
            affinity: AffinitySpec::Binary,
            clusters,
            seed: 0,
            normalize: false,
            spectral: SpectralOptions::default(),
            output_dir: None,
        }
    }

    /// Method defaults with any explicit knobs applied on top.
    pub fn solver_config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::for_method(self.method, self.lambda);
        if let Some(v) = self.nu0 {
            cfg.nu0 = v;
            if self.method == Method::SketchSsc {
                cfg.nu_max = v;
            }
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.nu_max {
            cfg.nu_max = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        cfg
    }

    /// Checks that need no data.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n must be ≥ 1"));
        }
        if self.d == Some(0) {
            return Err(invalid("d must be ≥ 1"));
        }
        if self.knn == 0 {
            return Err(invalid("knn must be ≥ 1"));
        }
        if self.clusters == 0 {
            return Err(invalid("the number of clusters must be ≥ 1"));
        }
        if let AffinitySpec::Heat { sigma: Some(s) } = self.affinity {
            if s.is_nan() || s <= 0.0 {
                return Err(invalid(format!("sigma must be positive, got {s}")));
            }
        }
        if let InputSpec::Synth(s) = &self.input {
            if s.subspaces == 0 || s.ambient_dim == 0 || s.subspace_dim == 0 || s.points_per_subspace == 0 {
                return Err(invalid("synth sizes must all be ≥ 1"));
            }
            if s.subspace_dim > s.ambient_dim {
                return Err(invalid(format!(
                    "subspace dimension {} exceeds ambient dimension {}",
                    s.subspace_dim, s.ambient_dim
                )));
            }
            if s.noise_std.is_nan() || s.noise_std < 0.0 {
                return Err(invalid("noise must be ≥ 0"));
            }
            if let Some(d) = self.d {
                check_reduced_dim(d, s.ambient_dim)?;
            }
        }
        self.solver_config().validate()
    }

    /// First 16 hex digits of the SHA-256 of the config JSON, with
    /// `output_dir` left out.
    pub fn run_id(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub(crate) fn check_reduced_dim(d: usize, big_d: usize) -> Result<()> {
    if d > big_d {
        return Err(invalid(format!("d = {d} exceeds the data dimension D = {big_d}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PipelineConfig {
        let synth = "K=3,D=20,d=3,per=30,noise=0.01,seed=4".parse().unwrap();
        PipelineConfig::new(InputSpec::Synth(synth), Method::SketchLsr, 10, 100.0, 5, 3)
    }

    #[test]
    fn synth_spec_round_trip() {
        let s: SynthSpec = "K=5,D=50,d=5,per=200,noise=0.01,seed=7".parse().unwrap();
        assert_eq!(s.subspaces, 5);
        assert_eq!(s.noise_std, 0.01);
        assert_eq!(s.to_string().parse::<SynthSpec>().unwrap(), s);
        assert!("K=5,D=50".parse::<SynthSpec>().is_err());
        assert!("K=5,D=50,d=5,per=2,bogus=1".parse::<SynthSpec>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut c = cfg();
        c.d = Some(8);
        c.affinity = AffinitySpec::Heat { sigma: Some(0.3) };
        c.tol = Some(1e-9);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<PipelineConfig>(&json).unwrap(), c);
    }

    #[test]
    fn minimal_json() {
        let json = r#"{"input":{"kind":"file","path":"x.csv"},"method":"ssc","n":20,"lambda":10,"knn":4,"clusters":2}"#;
        let c: PipelineConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.sketch, SketchKind::Rademacher);
        assert_eq!(c.affinity, AffinitySpec::Binary);
        assert_eq!(c.solver_config(), SolverConfig::ssc(10.0));
    }

    #[test]
    fn run_id_ignores_output_dir() {
        let a = cfg();
        let mut b = cfg();
        b.output_dir = Some("/tmp/elsewhere".into());
        assert_eq!(a.run_id(), b.run_id());
        assert_eq!(a.run_id().len(), 16);
        b.seed = 1;
        assert_ne!(a.run_id(), b.run_id());
    }

    #[test]
    fn validation() {
        assert!(cfg().validate().is_ok());
        let mut c = cfg();
        c.d = Some(21);
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.n = 0;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.lambda = -1.0;
        assert!(c.validate().is_err());
    }
}
