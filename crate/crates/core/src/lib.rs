//! Adjacency spectra of simple graphs, algorithmic-complexity estimates of
//! their adjacency matrices, and the statistics relating the two.
//!
//! Every randomized routine takes an explicit seed; see [`rng`].

pub mod analysis;
pub mod complexity;
pub mod ctm;
pub mod graph;
pub mod rng;
pub mod spectra;

pub use analysis::{AnalysisError, CorrelationReport, GraphClassSample, SweepModel, SweepResult};
pub use complexity::{
    Boundary, ComplexityError, ComplexityScore, Estimator, EstimatorConfig, EstimatorKind, Fallback,
};
pub use ctm::{BlockKey, CtmConfig, CtmError, CtmTable};
pub use graph::{BitMatrix, Family, FamilyKind, Graph, GraphError, IntMatrix, Labeling};
pub use spectra::{
    Normalization, QuantileMethod, RankSelector, SpectraError, SpectraSignature, Spectrum,
};
