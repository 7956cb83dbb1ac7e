//! Eigenvalue-versus-complexity correlation within graph classes and the
//! evolving-network experiments.

mod correlate;
mod stats;
mod sweep;

use thiserror::Error;

use crate::complexity::ComplexityError;
use crate::graph::GraphError;
use crate::spectra::SpectraError;

pub use correlate::{
    correlate_class, write_correlation_csv, ClassMember, CorrelationReport, CorrelationRow,
    GraphClassSample,
};
pub use stats::{p_value, pearson, permutation_p_value, PValue, DEFAULT_PERMUTATIONS, P_FLOOR};
pub use sweep::{
    density_grid, er_density_sweep, growth_experiment, write_sweep_csv, StepComplexity, SweepModel,
    SweepResult, SweepSettings,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("a series has zero variance; correlation is undefined")]
    DegenerateCorrelation,
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Complexity(#[from] ComplexityError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
