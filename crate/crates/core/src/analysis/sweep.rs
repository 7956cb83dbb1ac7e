use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::complexity::{Estimator, EstimatorConfig};
use crate::graph::{generate_ba, generate_er, generate_family, generate_ws, FamilyKind, Graph};
use crate::rng::stream_rng;
use crate::spectra::{
    spectrum, EigenTrajectories, Normalization, QuantileMethod, RankSelector, SignatureStep,
    SpectraSignature, TrajectoryPoint,
};

/// Graph model driven along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepModel {
    /// G(n, p) over a grid of edge probabilities.
    ErDensity { n: usize },
    /// A deterministic family over a size grid.
    Family(FamilyKind),
    /// Watts-Strogatz over a size grid.
    Ws { k: usize, beta: f64 },
    /// Barabasi-Albert over a size grid; one stream, so each step extends
    /// the previous network.
    Ba { m_attach: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct SweepSettings<'a, 't> {
    pub ranks: &'a [RankSelector],
    pub normalization: Normalization,
    pub quantile: QuantileMethod,
    /// Complexity per step is skipped when absent.
    pub estimator: Option<&'a Estimator<'t>>,
}

impl<'a, 't> SweepSettings<'a, 't> {
    pub fn new(ranks: &'a [RankSelector]) -> Self {
        Self {
            ranks,
            normalization: Normalization::Edges,
            quantile: QuantileMethod::Linear,
            estimator: None,
        }
    }

    pub fn with_estimator(mut self, est: &'a Estimator<'t>) -> Self {
        self.estimator = Some(est);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepComplexity {
    /// Means over trials.
    pub raw_bits: f64,
    pub normalized_bits: f64,
    /// Total over trials.
    pub fallback_blocks: usize,
}

/// Trajectories, signature and complexity over one shared grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub model: SweepModel,
    pub seed: u64,
    pub trials: usize,
    pub estimator: Option<EstimatorConfig>,
    pub trajectories: EigenTrajectories,
    pub signature: SpectraSignature,
    /// Empty when no estimator was configured, else one entry per step.
    pub complexity: Vec<StepComplexity>,
}

struct Trial {
    edges: usize,
    raw: Vec<f64>,
    divisor: f64,
    bits: Option<(f64, usize)>,
}

fn run_trial(g: &Graph, settings: &SweepSettings) -> Result<Trial, AnalysisError> {
    let divisor = settings
        .normalization
        .divisor(g.edge_count())
        .ok_or(crate::spectra::SpectraError::UndefinedNormalization)?;
    let raw = spectrum(g)?.values().to_vec();
    let bits = match settings.estimator {
        Some(est) => {
            let s = est.estimate_matrix(&g.adjacency())?;
            Some((s.bits, s.fallback_blocks))
        }
        None => None,
    };
    Ok(Trial {
        edges: g.edge_count(),
        raw,
        divisor,
        bits,
    })
}

fn mean(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = xs.clone().count();
    xs.sum::<f64>() / n as f64
}

fn std_err(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs.iter().copied());
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    (var / xs.len() as f64).sqrt()
}

/// Aggregates per-step trials, in grid order, into a result.
fn assemble(
    model: SweepModel,
    seed: u64,
    params: &[f64],
    steps: Vec<Vec<Trial>>,
    settings: &SweepSettings,
) -> Result<SweepResult, AnalysisError> {
    let trials = steps.first().map_or(0, Vec::len);
    let mut series = vec![Vec::with_capacity(params.len()); settings.ranks.len()];
    let mut sig_steps = Vec::with_capacity(params.len());
    let mut complexity = Vec::new();
    for (&param, step) in params.iter().zip(&steps) {
        for (r, &rank) in settings.ranks.iter().enumerate() {
            let mut raw = Vec::with_capacity(step.len());
            let mut normalized = Vec::with_capacity(step.len());
            for t in step {
                let v = t.raw[rank.index(t.raw.len())?];
                raw.push(v);
                normalized.push(v / t.divisor);
            }
            series[r].push(TrajectoryPoint {
                param,
                raw: mean(raw.iter().copied()),
                normalized: mean(normalized.iter().copied()),
                raw_std_err: std_err(&raw),
            });
        }
        // elementwise mean of the sorted normalized spectra
        let n = step[0].raw.len();
        let spec: Vec<f64> = (0..n)
            .map(|i| mean(step.iter().map(move |t| t.raw[i] / t.divisor)))
            .collect();
        let edges = mean(step.iter().map(|t| t.edges as f64)).round() as usize;
        sig_steps.push(SignatureStep::new(param, edges, spec, settings.quantile)?);
        if settings.estimator.is_some() {
            let bits: Vec<(f64, usize, f64)> = step
                .iter()
                .map(|t| {
                    let (b, f) = t.bits.expect("estimator ran");
                    (b, f, t.divisor)
                })
                .collect();
            complexity.push(StepComplexity {
                raw_bits: mean(bits.iter().map(|b| b.0)),
                normalized_bits: mean(bits.iter().map(|b| b.0 / b.2)),
                fallback_blocks: bits.iter().map(|b| b.1).sum(),
            });
        }
    }
    Ok(SweepResult {
        model,
        seed,
        trials,
        estimator: settings.estimator.map(|e| e.config),
        trajectories: EigenTrajectories {
            ranks: settings.ranks.to_vec(),
            series,
        },
        signature: SpectraSignature::from_steps(
            sig_steps,
            settings.quantile,
            settings.normalization,
        )?,
        complexity,
    })
}

/// Stream of trial `trial` at grid point `point`; independent of the trial
/// count, so extra trials leave earlier ones untouched.
fn trial_stream(point: usize, trial: usize) -> u64 {
    ((point as u64) << 32) | trial as u64
}

/// G(n, p) at each edge probability of `grid`, `trials` graphs per point.
pub fn er_density_sweep(
    n: usize,
    grid: &[f64],
    trials: usize,
    seed: u64,
    settings: &SweepSettings,
) -> Result<SweepResult, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::InvalidParameter(
            "trials must be >= 1".into(),
        ));
    }
    if let Some(p) = grid.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(AnalysisError::InvalidParameter(format!(
            "densities must lie in (0, 1], got {p}"
        )));
    }
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|i| (0..trials).map(move |t| (i, t)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(i, t)| {
            let g = generate_er(n, grid[i], &mut stream_rng(seed, trial_stream(i, t)))?;
            run_trial(&g, settings)
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let mut it = results.into_iter();
    let steps: Vec<Vec<Trial>> = (0..grid.len())
        .map(|_| it.by_ref().take(trials).collect())
        .collect();
    assemble(SweepModel::ErDensity { n }, seed, grid, steps, settings)
}

/// `points` evenly spaced densities ending at 1.
pub fn density_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|i| i as f64 / points as f64).collect()
}

/// One graph per size of an increasing `sizes` grid.
pub fn growth_experiment(
    model: SweepModel,
    sizes: &[usize],
    seed: u64,
    settings: &SweepSettings,
) -> Result<SweepResult, AnalysisError> {
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AnalysisError::InvalidParameter(
            "size grid must increase".into(),
        ));
    }
    let graphs = sizes
        .par_iter()
        .map(|&n| {
            let mut rng = stream_rng(seed, 0);
            let g = match model {
                SweepModel::Family(kind) => generate_family(kind.with_size(n))?,
                SweepModel::Ws { k, beta } => generate_ws(n, k, beta, &mut rng)?,
                SweepModel::Ba { m_attach } => generate_ba(n, m_attach, &mut rng)?,
                SweepModel::ErDensity { .. } => {
                    return Err(AnalysisError::InvalidParameter(
                        "density sweeps use er_density_sweep".into(),
                    ))
                }
            };
            Ok(vec![run_trial(&g, settings)?])
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let params: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    assemble(model, seed, &params, graphs, settings)
}

/// Signature columns, then `raw_bits,normalized_bits` (empty without an
/// estimator), then `<rank>_raw,<rank>_raw_se,<rank>_normalized` per rank,
/// then `lambda_1..`.
pub fn write_sweep_csv<W: Write>(res: &SweepResult, out: &mut W) -> io::Result<()> {
    let steps = res.signature.steps();
    let width = steps.iter().map(|s| s.n).max().unwrap_or(0);
    write!(
        out,
        "step_param,n,m_edges,stat_min,q1,median,q3,stat_max,raw_bits,normalized_bits"
    )?;
    for rank in &res.trajectories.ranks {
        let l = rank.label();
        write!(out, ",{l}_raw,{l}_raw_se,{l}_normalized")?;
    }
    for i in 1..=width {
        write!(out, ",lambda_{i}")?;
    }
    writeln!(out)?;
    for (i, s) in steps.iter().enumerate() {
        let b = &s.summary;
        write!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.param, s.n, s.m_edges, b.min, b.q1, b.median, b.q3, b.max
        )?;
        match res.complexity.get(i) {
            Some(c) => write!(out, ",{},{}", c.raw_bits, c.normalized_bits)?,
            None => write!(out, ",,")?,
        }
        for series in &res.trajectories.series {
            let p = series[i];
            write!(out, ",{},{},{}", p.raw, p.raw_std_err, p.normalized)?;
        }
        for j in 0..width {
            match s.spectrum.get(j) {
                Some(v) => write!(out, ",{v}")?,
                None => write!(out, ",")?,
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{flatness, DEFAULT_FLATNESS_TOL};

    const RANKS: [RankSelector; 3] = [
        RankSelector::Largest,
        RankSelector::Second,
        RankSelector::Smallest,
    ];

    #[test]
    fn density_one_is_complete() {
        let res = er_density_sweep(12, &[0.5, 1.0], 2, 1, &SweepSettings::new(&RANKS)).unwrap();
        let last = &res.signature.steps()[1];
        assert_eq!(last.m_edges, 66);
        assert!((last.spectrum[0] - 11.0 / 66.0).abs() < 1e-12);
        assert!(last.spectrum[1..]
            .iter()
            .all(|v| (v + 1.0 / 66.0).abs() < 1e-12));
        let top = res.trajectories.series_for(RankSelector::Largest).unwrap()[1];
        assert!((top.raw - 11.0).abs() < 1e-9 && top.raw_std_err < 1e-9);
    }

    #[test]
    fn trials_are_reproducible_and_nested() {
        let s = SweepSettings::new(&RANKS);
        let grid = [0.3, 0.6];
        let a = er_density_sweep(15, &grid, 1, 9, &s).unwrap();
        assert_eq!(a, er_density_sweep(15, &grid, 1, 9, &s).unwrap());
        let raw0 = |r: &SweepResult| r.trajectories.series[0][0].raw;
        let b = er_density_sweep(15, &grid, 3, 9, &s).unwrap();
        // the first trial is shared, the average moves
        let single = er_density_sweep(15, &grid, 1, 9, &s).unwrap();
        assert_eq!(raw0(&single), raw0(&a));
        assert_eq!(a.signature.steps().len(), b.signature.steps().len());
        assert!(b.trajectories.series[0][0].raw_std_err > 0.0);
    }

    #[test]
    fn rejects_bad_grids() {
        let s = SweepSettings::new(&RANKS);
        assert!(er_density_sweep(10, &[0.0, 0.5], 1, 0, &s).is_err());
        assert!(er_density_sweep(10, &[0.5], 0, 0, &s).is_err());
        assert!(growth_experiment(SweepModel::Family(FamilyKind::Path), &[5, 4], 0, &s).is_err());
    }

    #[test]
    fn complete_growth_is_flat() {
        let sizes: Vec<usize> = (3..=30).collect();
        let res = growth_experiment(
            SweepModel::Family(FamilyKind::Complete),
            &sizes,
            0,
            &SweepSettings::new(&RANKS),
        )
        .unwrap();
        for s in res.signature.steps() {
            let m = (s.n * (s.n - 1) / 2) as f64;
            assert!((s.spectrum[0] - (s.n as f64 - 1.0) / m).abs() < 1e-12);
        }
        assert!(flatness(&res.signature, DEFAULT_FLATNESS_TOL).low_information);
    }

    #[test]
    fn ba_growth_edge_counts() {
        let sizes: Vec<usize> = (1..=10).map(|i| 10 * i).collect();
        let res = growth_experiment(
            SweepModel::Ba { m_attach: 4 },
            &sizes,
            3,
            &SweepSettings::new(&RANKS),
        )
        .unwrap();
        for s in res.signature.steps() {
            assert_eq!(s.m_edges, 10 + 4 * (s.n - 5));
        }
    }

    #[test]
    fn complexity_columns() {
        let est = Estimator::entropy(2);
        let s = SweepSettings::new(&RANKS).with_estimator(&est);
        let res = er_density_sweep(10, &[0.5, 1.0], 2, 4, &s).unwrap();
        assert_eq!(res.complexity.len(), 2);
        let mut out = Vec::new();
        write_sweep_csv(&res, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with("step_param,n,m_edges,stat_min,q1,median,q3,stat_max,raw_bits,normalized_bits,largest_raw,"));
        assert!(header.ends_with(",lambda_10"));
        assert_eq!(text.lines().count(), 3);
    }
}
