use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{normalized_spectrum_with, spectrum, Normalization, RankSelector, SpectraError};
use crate::graph::Graph;

/// Relative interquartile range at or below which a step counts as flat.
pub const DEFAULT_FLATNESS_TOL: f64 = 1e-6;

/// Sample quantile rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum QuantileMethod {
    /// Linear interpolation between order statistics at `h = (n - 1) p`
    /// (Hyndman-Fan type 7).
    #[default]
    Linear,
    /// Smallest order statistic whose empirical CDF reaches `p` (type 1).
    NearestRank,
}

impl QuantileMethod {
    pub fn name(self) -> &'static str {
        match self {
            QuantileMethod::Linear => "type7",
            QuantileMethod::NearestRank => "type1",
        }
    }

    /// Quantile `p` of ascending-sorted, non-empty `sorted`.
    pub fn quantile(self, sorted: &[f64], p: f64) -> f64 {
        let n = sorted.len();
        match self {
            QuantileMethod::Linear => {
                let h = (n - 1) as f64 * p;
                let lo = h.floor() as usize;
                let hi = (lo + 1).min(n - 1);
                sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
            }
            QuantileMethod::NearestRank => {
                let k = (n as f64 * p).ceil() as usize;
                sorted[k.clamp(1, n) - 1]
            }
        }
    }
}

impl fmt::Display for QuantileMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuantileMethod {
    type Err = SpectraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "type7" | "linear" => Ok(QuantileMethod::Linear),
            "type1" | "nearest" => Ok(QuantileMethod::NearestRank),
            other => Err(SpectraError::InvalidParameter(format!(
                "unknown quantile method {other:?}"
            ))),
        }
    }
}

/// Five-number summary of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub count: usize,
}

impl BoxSummary {
    pub fn from_values(values: &[f64], method: QuantileMethod) -> Option<BoxSummary> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(BoxSummary {
            min: sorted[0],
            q1: method.quantile(&sorted, 0.25),
            median: method.quantile(&sorted, 0.5),
            q3: method.quantile(&sorted, 0.75),
            max: sorted[sorted.len() - 1],
            count: sorted.len(),
        })
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }

    pub fn range(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureStep {
    pub param: f64,
    pub n: usize,
    pub m_edges: usize,
    pub summary: BoxSummary,
    /// Edge-normalized eigenvalues, descending.
    pub spectrum: Vec<f64>,
}

impl SignatureStep {
    pub fn new(
        param: f64,
        m_edges: usize,
        normalized: Vec<f64>,
        method: QuantileMethod,
    ) -> Result<Self, SpectraError> {
        let summary = BoxSummary::from_values(&normalized, method).ok_or_else(|| {
            SpectraError::InvalidParameter("signature step has an empty spectrum".into())
        })?;
        Ok(Self {
            param,
            n: normalized.len(),
            m_edges,
            summary,
            spectrum: normalized,
        })
    }
}

/// Box summaries of edge-normalized spectra along a sequence of graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraSignature {
    pub quantile_method: QuantileMethod,
    pub normalization: Normalization,
    steps: Vec<SignatureStep>,
}

impl SpectraSignature {
    /// Checks that step parameters strictly increase.
    pub fn from_steps(
        steps: Vec<SignatureStep>,
        quantile_method: QuantileMethod,
        normalization: Normalization,
    ) -> Result<Self, SpectraError> {
        if let Some(w) = steps.windows(2).find(|w| w[1].param <= w[0].param) {
            return Err(SpectraError::InvalidParameter(format!(
                "step parameters must strictly increase ({} then {})",
                w[0].param, w[1].param
            )));
        }
        Ok(Self {
            quantile_method,
            normalization,
            steps,
        })
    }

    pub fn steps(&self) -> &[SignatureStep] {
        &self.steps
    }
}

/// Signature of `(step parameter, graph)` pairs. Every graph needs an edge.
pub fn spectra_signature(
    seq: &[(f64, Graph)],
    method: QuantileMethod,
    norm: Normalization,
) -> Result<SpectraSignature, SpectraError> {
    let steps = seq
        .par_iter()
        .map(|(param, g)| {
            let spec = normalized_spectrum_with(g, norm)?;
            SignatureStep::new(*param, g.edge_count(), spec.values().to_vec(), method)
        })
        .collect::<Result<Vec<_>, _>>()?;
    SpectraSignature::from_steps(steps, method, norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub param: f64,
    pub raw: f64,
    pub normalized: f64,
    /// Standard error of `raw` over trials; zero for a single graph.
    pub raw_std_err: f64,
}

/// Per-rank eigenvalue series over a shared parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenTrajectories {
    pub ranks: Vec<RankSelector>,
    pub series: Vec<Vec<TrajectoryPoint>>,
}

impl EigenTrajectories {
    pub fn series_for(&self, rank: RankSelector) -> Option<&[TrajectoryPoint]> {
        self.ranks
            .iter()
            .position(|&r| r == rank)
            .map(|i| self.series[i].as_slice())
    }
}

pub fn eigen_trajectories(
    sweep: &[(f64, Graph)],
    ranks: &[RankSelector],
    norm: Normalization,
) -> Result<EigenTrajectories, SpectraError> {
    let per_point = sweep
        .par_iter()
        .map(|(param, g)| {
            let raw = spectrum(g)?;
            let divisor = norm
                .divisor(g.edge_count())
                .ok_or(SpectraError::UndefinedNormalization)?;
            ranks
                .iter()
                .map(|&rank| {
                    let v = raw.at(rank)?;
                    Ok(TrajectoryPoint {
                        param: *param,
                        raw: v,
                        normalized: v / divisor,
                        raw_std_err: 0.0,
                    })
                })
                .collect::<Result<Vec<_>, SpectraError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let series = (0..ranks.len())
        .map(|r| per_point.iter().map(|pts| pts[r]).collect())
        .collect();
    Ok(EigenTrajectories {
        ranks: ranks.to_vec(),
        series,
    })
}

/// Relative spread of each signature step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flatness {
    /// `iqr / (max - min)` per step; zero when the step has a single value.
    pub relative_iqr: Vec<f64>,
    pub tol: f64,
    /// Every step in the trailing half of the sequence has relative IQR
    /// at most `tol`: the bulk of the spectrum collapsed onto one value.
    pub low_information: bool,
}

pub fn flatness(sig: &SpectraSignature, tol: f64) -> Flatness {
    let relative_iqr: Vec<f64> = sig
        .steps()
        .iter()
        .map(|s| {
            let range = s.summary.range();
            if range > 0.0 {
                s.summary.iqr() / range
            } else {
                0.0
            }
        })
        .collect();
    let tail = &relative_iqr[relative_iqr.len() / 2..];
    let low_information = !tail.is_empty() && tail.iter().all(|&r| r <= tol);
    Flatness {
        relative_iqr,
        tol,
        low_information,
    }
}

/// Writes `step_param,n,m_edges,stat_min,q1,median,q3,stat_max,lambda_1..`;
/// shorter spectra leave trailing lambda cells empty.
pub fn write_signature_csv<W: Write>(sig: &SpectraSignature, out: &mut W) -> io::Result<()> {
    let width = sig.steps().iter().map(|s| s.n).max().unwrap_or(0);
    write!(out, "step_param,n,m_edges,stat_min,q1,median,q3,stat_max")?;
    for i in 1..=width {
        write!(out, ",lambda_{i}")?;
    }
    writeln!(out)?;
    for s in sig.steps() {
        let b = &s.summary;
        write!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.param, s.n, s.m_edges, b.min, b.q1, b.median, b.q3, b.max
        )?;
        for i in 0..width {
            match s.spectrum.get(i) {
                Some(v) => write!(out, ",{v}")?,
                None => write!(out, ",")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}
