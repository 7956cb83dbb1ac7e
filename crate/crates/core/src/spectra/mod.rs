//! Adjacency spectra, edge-count normalization, spectra signatures and
//! eigenvalue trajectories.

mod jacobi;
mod signature;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BitMatrix, Graph, IntMatrix};

pub use jacobi::{eigenvalues_symmetric, eigenvalues_with_budget, DEFAULT_TOL, MAX_SWEEPS};
pub use signature::{
    eigen_trajectories, flatness, spectra_signature, write_signature_csv, BoxSummary,
    EigenTrajectories, Flatness, QuantileMethod, SignatureStep, SpectraSignature, TrajectoryPoint,
    DEFAULT_FLATNESS_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error(
        "eigen solver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})"
    )]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("cannot normalize by edge count: graph has no edges")]
    UndefinedNormalization,
    #[error("rank {rank} is out of range for a spectrum of length {len}")]
    RankOutOfRange { rank: String, len: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, SpectraError> {
        if data.len() != rows * cols {
            return Err(SpectraError::InvalidMatrix(format!(
                "{} values do not fill {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.data
            .chunks(self.cols.max(1))
            .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl From<&BitMatrix> for DenseMatrix {
    fn from(m: &BitMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m
                .cells()
                .iter()
                .map(|&b| if b { 1.0 } else { 0.0 })
                .collect(),
        }
    }
}

impl From<&IntMatrix> for DenseMatrix {
    fn from(m: &IntMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.cells().iter().map(|&v| v as f64).collect(),
        }
    }
}

/// Real eigenvalues sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn from_unsorted(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn largest(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn smallest(&self) -> Option<f64> {
        self.values.last().copied()
    }

    pub fn at(&self, rank: RankSelector) -> Result<f64, SpectraError> {
        Ok(self.values[rank.index(self.len())?])
    }

    pub fn scaled(&self, divisor: f64) -> Spectrum {
        Spectrum {
            values: self.values.iter().map(|v| v / divisor).collect(),
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// What eigenvalues and complexities are divided by before comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Normalization {
    #[default]
    Edges,
    TwiceEdges,
}

impl Normalization {
    pub fn divisor(self, edge_count: usize) -> Option<f64> {
        match (self, edge_count) {
            (_, 0) => None,
            (Normalization::Edges, m) => Some(m as f64),
            (Normalization::TwiceEdges, m) => Some(2.0 * m as f64),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Normalization::Edges => "edges",
            Normalization::TwiceEdges => "twice_edges",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Normalization {
    type Err = SpectraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edges" => Ok(Normalization::Edges),
            "twice_edges" | "twice-edges" => Ok(Normalization::TwiceEdges),
            other => Err(SpectraError::InvalidParameter(format!(
                "unknown normalization {other:?}"
            ))),
        }
    }
}

/// Position in a descending spectrum.
///
/// `Rank(k)` counts from the top starting at 1, so `Rank(1)` is `Largest`
/// and `Rank(2)` is `Second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RankSelector {
    Largest,
    Second,
    Smallest,
    Rank(usize),
}

impl RankSelector {
    pub fn index(self, len: usize) -> Result<usize, SpectraError> {
        let idx = match self {
            RankSelector::Largest => Some(0),
            RankSelector::Second => Some(1),
            RankSelector::Smallest => len.checked_sub(1),
            RankSelector::Rank(k) => k.checked_sub(1),
        };
        idx.filter(|&i| i < len)
            .ok_or_else(|| SpectraError::RankOutOfRange {
                rank: self.label(),
                len,
            })
    }

    pub fn label(self) -> String {
        match self {
            RankSelector::Largest => "largest".into(),
            RankSelector::Second => "second".into(),
            RankSelector::Smallest => "smallest".into(),
            RankSelector::Rank(k) => format!("rank_{k}"),
        }
    }
}

impl FromStr for RankSelector {
    type Err = SpectraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "largest" | "first" => Ok(RankSelector::Largest),
            "second" => Ok(RankSelector::Second),
            "smallest" | "last" => Ok(RankSelector::Smallest),
            other => other
                .strip_prefix("rank_")
                .unwrap_or(other)
                .parse::<usize>()
                .ok()
                .filter(|&k| k >= 1)
                .map(RankSelector::Rank)
                .ok_or_else(|| SpectraError::InvalidParameter(format!("unknown rank {other:?}"))),
        }
    }
}

/// Adjacency spectrum of `g`.
pub fn spectrum(g: &Graph) -> Result<Spectrum, SpectraError> {
    eigenvalues_symmetric(&DenseMatrix::from(&g.adjacency()), DEFAULT_TOL)
}

/// Adjacency spectrum divided by `|E|`.
pub fn normalized_spectrum(g: &Graph) -> Result<Spectrum, SpectraError> {
    normalized_spectrum_with(g, Normalization::Edges)
}

pub fn normalized_spectrum_with(g: &Graph, norm: Normalization) -> Result<Spectrum, SpectraError> {
    let divisor = norm
        .divisor(g.edge_count())
        .ok_or(SpectraError::UndefinedNormalization)?;
    Ok(spectrum(g)?.scaled(divisor))
}
