use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{p_value, pearson};
use super::AnalysisError;
use crate::complexity::{k_graph_with, Estimator, EstimatorConfig};
use crate::graph::Graph;
use crate::spectra::{normalized_spectrum_with, Normalization, RankSelector, Spectrum};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMember {
    pub id: String,
    pub graph: Graph,
    pub complexity: f64,
    /// Edge-normalized, descending.
    pub spectrum: Spectrum,
}

/// Graphs of one class with complexity and spectrum under one divisor.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphClassSample {
    pub class: String,
    pub estimator: EstimatorConfig,
    pub normalization: Normalization,
    members: Vec<ClassMember>,
}

impl GraphClassSample {
    /// Scores each graph; every graph needs at least one edge.
    pub fn build(
        class: impl Into<String>,
        graphs: Vec<(String, Graph)>,
        est: &Estimator,
        norm: Normalization,
    ) -> Result<Self, AnalysisError> {
        let members = graphs
            .into_par_iter()
            .map(|(id, graph)| {
                let complexity = k_graph_with(&graph, est, norm)?.normalized()?;
                let spectrum = normalized_spectrum_with(&graph, norm)?;
                Ok(ClassMember {
                    id,
                    graph,
                    complexity,
                    spectrum,
                })
            })
            .collect::<Result<Vec<_>, AnalysisError>>()?;
        Ok(Self {
            class: class.into(),
            estimator: est.config,
            normalization: norm,
            members,
        })
    }

    /// Sample from precomputed values, for callers that score graphs themselves.
    pub fn from_members(
        class: impl Into<String>,
        estimator: EstimatorConfig,
        normalization: Normalization,
        members: Vec<ClassMember>,
    ) -> Self {
        Self {
            class: class.into(),
            estimator,
            normalization,
            members,
        }
    }

    pub fn members(&self) -> &[ClassMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub rank: RankSelector,
    /// Absent when the row is degenerate.
    pub rho: Option<f64>,
    pub p_value: Option<f64>,
    pub exact_fit: bool,
    pub n_graphs: usize,
    /// One of the two series has zero variance, so the eigenvalue carries
    /// no information about complexity within this class.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub class: String,
    pub estimator: EstimatorConfig,
    pub normalization: Normalization,
    /// Always "two-tailed".
    pub tails: String,
    pub rows: Vec<CorrelationRow>,
}

/// Pearson correlation of normalized complexity against each ranked
/// normalized eigenvalue across the class.
pub fn correlate_class(
    sample: &GraphClassSample,
    ranks: &[RankSelector],
) -> Result<CorrelationReport, AnalysisError> {
    let n = sample.len();
    if n < 3 {
        return Err(AnalysisError::InvalidParameter(format!(
            "class {} has {n} graphs; correlation needs at least 3",
            sample.class
        )));
    }
    let complexity: Vec<f64> = sample.members.iter().map(|m| m.complexity).collect();
    let mut rows = Vec::with_capacity(ranks.len());
    for &rank in ranks {
        let eig = sample
            .members
            .iter()
            .map(|m| m.spectrum.at(rank))
            .collect::<Result<Vec<_>, _>>()?;
        let row = match pearson(&complexity, &eig) {
            Ok(rho) => {
                let p = p_value(rho, n)?;
                CorrelationRow {
                    rank,
                    rho: Some(rho),
                    p_value: Some(p.p),
                    exact_fit: p.exact_fit,
                    n_graphs: n,
                    degenerate: false,
                }
            }
            Err(AnalysisError::DegenerateCorrelation) => CorrelationRow {
                rank,
                rho: None,
                p_value: None,
                exact_fit: false,
                n_graphs: n,
                degenerate: true,
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(CorrelationReport {
        class: sample.class.clone(),
        estimator: sample.estimator,
        normalization: sample.normalization,
        tails: "two-tailed".into(),
        rows,
    })
}

/// `class,rank_label,rho,p_value,n_graphs,degenerate_flag,estimator,d,normalization`
pub fn write_correlation_csv<W: Write>(
    reports: &[CorrelationReport],
    out: &mut W,
) -> io::Result<()> {
    writeln!(
        out,
        "class,rank_label,rho,p_value,n_graphs,degenerate_flag,estimator,d,normalization"
    )?;
    for rep in reports {
        for row in &rep.rows {
            let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                rep.class,
                row.rank.label(),
                opt(row.rho),
                opt(row.p_value),
                row.n_graphs,
                row.degenerate,
                rep.estimator.kind,
                rep.estimator.d,
                rep.normalization
            )?;
        }
    }
    Ok(())
}
