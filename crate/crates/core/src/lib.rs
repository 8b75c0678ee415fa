//! Sketched subspace clustering.
//!
//! Data are stored as columns of a `D × N` matrix. A random sketch `R`
//! (`N × n`, `n ≪ N`) compresses the data into a dictionary `B = XR`, one of
//! three regularized regressions produces an `n × N` coefficient matrix `A`
//! with `X ≈ BA`, and a mutual k-nearest-neighbour graph on the columns of
//! `A` is clustered spectrally.
//!
//! | module       | contents                                                  |
//! |--------------|-----------------------------------------------------------|
//! | [`data`]     | union-of-subspaces synthesis, normalization, matrix I/O   |
//! | [`sketch`]   | Rademacher, Gaussian, sparse-embedding and Hadamard sketches |
//! | [`solvers`]  | Sketch-LSR (closed form), Sketch-SSC (ADMM), Sketch-LRR (ALM) |
//! | [`graph`]    | exact k-NN sets, binary / heat-kernel affinity graphs     |
//! | [`spectral`] | unnormalized Laplacian, trailing eigenvectors, k-means    |
//! | [`eval`]     | clustering accuracy, preservation and bound checks, timing |
//! | [`pipeline`] | end-to-end runs, n-sweeps, report emission                |

pub mod data;
pub mod error;
pub mod eval;
pub mod graph;
pub mod linalg;
pub mod pipeline;
pub mod sketch;
pub mod sparse;
pub mod spectral;
pub mod solvers;

pub use error::{Error, Result};

pub use data::{DataMatrix, MatrixFormat, SubspaceModel};
pub use graph::{AffinityGraph, AffinityKind, Bandwidth};
pub use pipeline::{PipelineConfig, PipelineError, RunOutcome};
pub use sketch::{SketchDescriptor, SketchKind, SketchOperator};
pub use solvers::{CoefficientMatrix, Method, SolveDiagnostics, SolverConfig};
pub use spectral::{ClusterAssignment, SpectralEmbedding};
