//! Complexity estimates for adjacency matrices: block decomposition over a
//! coding-theorem table, a block-entropy baseline, the minimum over vertex
//! labelings and the adjacency/Laplacian comparison.

mod bdm;

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ctm::CtmTable;
use crate::graph::{BitMatrix, Graph, Labeling};
use crate::spectra::Normalization;

pub use bdm::{
    bdm, bdm_of_blocks, cell_entropy_bits, decompose, BdmEstimate, BlockContribution, Boundary,
    Fallback, KmSource,
};

/// Largest vertex count [`k_unlabeled`] accepts by default (8! labelings).
pub const DEFAULT_UNLABELED_CAP: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexityError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("block {rows}x{cols} {pattern} is not in the table")]
    MissingBlock {
        rows: usize,
        cols: usize,
        pattern: String,
    },
    #[error("a {rows}x{cols} matrix has no complete {d}x{d} block")]
    EmptyDecomposition { rows: usize, cols: usize, d: usize },
    #[error("cannot normalize by edge count: graph has no edges")]
    UndefinedNormalization,
    #[error("{n} vertices exceeds the brute-force labeling cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("the bdm estimator needs a CTM table")]
    MissingTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimatorKind {
    Bdm,
    Entropy,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Bdm => "bdm",
            EstimatorKind::Entropy => "entropy",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = ComplexityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bdm" => Ok(EstimatorKind::Bdm),
            "entropy" => Ok(EstimatorKind::Entropy),
            other => Err(ComplexityError::InvalidParameter(format!(
                "unknown estimator {other:?}"
            ))),
        }
    }
}

/// Estimator settings without the table itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    pub d: usize,
    pub boundary: Boundary,
    pub fallback: Fallback,
}

/// Configured estimator, borrowing the table when it needs one.
#[derive(Debug, Clone, Copy)]
pub struct Estimator<'t> {
    pub config: EstimatorConfig,
    table: Option<&'t CtmTable>,
}

impl<'t> Estimator<'t> {
    pub fn bdm(table: &'t CtmTable, d: usize) -> Self {
        Self {
            config: EstimatorConfig {
                kind: EstimatorKind::Bdm,
                d,
                boundary: Boundary::Discard,
                fallback: Fallback::EntropyBits,
            },
            table: Some(table),
        }
    }

    pub fn entropy(d: usize) -> Self {
        Self {
            config: EstimatorConfig {
                kind: EstimatorKind::Entropy,
                d,
                boundary: Boundary::Discard,
                fallback: Fallback::EntropyBits,
            },
            table: None,
        }
    }

    pub fn from_config(
        config: EstimatorConfig,
        table: Option<&'t CtmTable>,
    ) -> Result<Self, ComplexityError> {
        if config.kind == EstimatorKind::Bdm && table.is_none() {
            return Err(ComplexityError::MissingTable);
        }
        Ok(Self { config, table })
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.config.boundary = boundary;
        self
    }

    pub fn with_fallback(mut self, fallback: Fallback) -> Self {
        self.config.fallback = fallback;
        self
    }

    pub fn table(&self) -> Option<&'t CtmTable> {
        self.table
    }

    /// Raw bits and fallback count for `m`.
    pub fn estimate_matrix(&self, m: &BitMatrix) -> Result<MatrixScore, ComplexityError> {
        let c = &self.config;
        match c.kind {
            EstimatorKind::Bdm => {
                let table = self.table.ok_or(ComplexityError::MissingTable)?;
                let est = bdm(m, c.d, table, c.boundary, c.fallback)?;
                Ok(MatrixScore {
                    bits: est.bits,
                    fallback_blocks: est.fallback_blocks(),
                })
            }
            EstimatorKind::Entropy => Ok(MatrixScore {
                bits: entropy_estimate(m, c.d, c.boundary)?,
                fallback_blocks: 0,
            }),
        }
    }
}

/// Block size to use with `table`: the largest of 4, 3, 2 whose square shape
/// the table covers, or 2 when none is covered.
pub fn default_block_size(table: &CtmTable) -> usize {
    [4, 3, 2]
        .into_iter()
        .find(|&d| table.covers((d, d)))
        .unwrap_or(2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixScore {
    pub bits: f64,
    pub fallback_blocks: usize,
}

/// Block-entropy baseline: Shannon entropy of the empirical distribution of
/// `d x d` blocks, times the number of blocks.
pub fn entropy_estimate(
    m: &BitMatrix,
    d: usize,
    boundary: Boundary,
) -> Result<f64, ComplexityError> {
    let blocks = decompose(m, d, boundary)?;
    let total: usize = blocks.values().sum();
    let h: f64 = blocks
        .values()
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum();
    Ok(h * total as f64)
}

/// Complexity of a graph's adjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityScore {
    pub raw_bits: f64,
    /// `raw_bits` over the normalization divisor; absent for edgeless graphs.
    pub normalized_bits: Option<f64>,
    pub estimator: EstimatorKind,
    pub fallback_blocks: usize,
}

impl ComplexityScore {
    pub fn normalized(&self) -> Result<f64, ComplexityError> {
        self.normalized_bits
            .ok_or(ComplexityError::UndefinedNormalization)
    }
}

fn score(
    g: &Graph,
    m: &BitMatrix,
    est: &Estimator,
    norm: Normalization,
) -> Result<ComplexityScore, ComplexityError> {
    let s = est.estimate_matrix(m)?;
    Ok(ComplexityScore {
        raw_bits: s.bits,
        normalized_bits: norm.divisor(g.edge_count()).map(|div| s.bits / div),
        estimator: est.config.kind,
        fallback_blocks: s.fallback_blocks,
    })
}

pub fn k_graph(g: &Graph, est: &Estimator) -> Result<ComplexityScore, ComplexityError> {
    k_graph_with(g, est, Normalization::Edges)
}

pub fn k_graph_with(
    g: &Graph,
    est: &Estimator,
    norm: Normalization,
) -> Result<ComplexityScore, ComplexityError> {
    score(g, &g.adjacency(), est, norm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledScore {
    pub score: ComplexityScore,
    /// A labeling attaining the minimum; among ties the one whose relabeled
    /// adjacency has the lexicographically smallest bit string.
    pub labeling: Labeling,
    pub canonical: Graph,
}

/// Minimum of [`k_graph`] over all `n!` relabelings of `g`.
pub fn k_unlabeled(
    g: &Graph,
    est: &Estimator,
    cap: usize,
) -> Result<UnlabeledScore, ComplexityError> {
    let n = g.vertex_count();
    if n > cap {
        return Err(ComplexityError::CapExceeded { n, cap });
    }
    let mut labeling = Labeling::identity(n);
    let mut best: Option<(f64, String, UnlabeledScore)> = None;
    loop {
        let relabeled = g.relabel(&labeling).expect("labeling length matches");
        let adjacency = relabeled.adjacency();
        let s = score(&relabeled, &adjacency, est, Normalization::Edges)?;
        let bits = adjacency.to_bit_string();
        let better = match &best {
            None => true,
            Some((b, key, _)) => s.raw_bits < *b || (s.raw_bits == *b && bits < *key),
        };
        if better {
            best = Some((
                s.raw_bits,
                bits,
                UnlabeledScore {
                    score: s,
                    labeling: labeling.clone(),
                    canonical: relabeled,
                },
            ));
        }
        if !labeling.next_permutation() {
            break;
        }
    }
    Ok(best.expect("at least one labeling").2)
}

/// Binary image of the Laplacian: the off-diagonal (adjacency) pattern with
/// the binary expansion of each vertex degree appended below as extra rows,
/// least significant bit first. Edgeless graphs get no extra rows.
pub fn laplacian_bits(g: &Graph) -> BitMatrix {
    let degrees = g.degrees();
    let max = degrees.iter().copied().max().unwrap_or(0);
    let width = (usize::BITS - max.leading_zeros()) as usize;
    let mut rows = BitMatrix::zeros(width, g.vertex_count());
    for (v, d) in degrees.into_iter().enumerate() {
        for b in 0..width {
            rows.set(b, v, (d >> b) & 1 == 1);
        }
    }
    g.adjacency()
        .vstack(&rows)
        .expect("degree rows share the column count")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplacianGap {
    pub k_adjacency: f64,
    pub k_laplacian: f64,
    pub gap: f64,
}

pub fn laplacian_complexity_gap(
    g: &Graph,
    est: &Estimator,
) -> Result<LaplacianGap, ComplexityError> {
    let k_adjacency = est.estimate_matrix(&g.adjacency())?.bits;
    let k_laplacian = est.estimate_matrix(&laplacian_bits(g))?.bits;
    Ok(LaplacianGap {
        k_adjacency,
        k_laplacian,
        gap: (k_laplacian - k_adjacency).abs(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityRow {
    pub graph_id: String,
    pub n: usize,
    pub m_edges: usize,
    pub score: ComplexityScore,
}

/// `graph_id,n,m_edges,estimator,d,boundary,raw_bits,normalized_bits,fallback_blocks`
pub fn write_complexity_csv<W: Write>(
    rows: &[ComplexityRow],
    config: &EstimatorConfig,
    out: &mut W,
) -> io::Result<()> {
    writeln!(
        out,
        "graph_id,n,m_edges,estimator,d,boundary,raw_bits,normalized_bits,fallback_blocks"
    )?;
    for r in rows {
        let normalized = r
            .score
            .normalized_bits
            .map(|v| v.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.graph_id,
            r.n,
            r.m_edges,
            config.kind,
            config.d,
            config.boundary,
            r.score.raw_bits,
            normalized,
            r.score.fallback_blocks
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctm::{build_ctm_table, BlockKey, CtmConfig, Provenance, TableEntry};
    use crate::graph::{generate_family, Family};
    use std::collections::BTreeMap;

    fn small_table() -> CtmTable {
        let mut cfg = CtmConfig::exhaustive(2, 200);
        cfg.shapes = crate::ctm::ShapeFilter::All;
        build_ctm_table(&cfg).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(
            entropy_estimate(&BitMatrix::zeros(8, 8), 4, Boundary::Discard).unwrap(),
            0.0
        );
        assert_eq!(
            entropy_estimate(&BitMatrix::zeros(5, 5), 1, Boundary::Discard).unwrap(),
            0.0
        );
        let two = BitMatrix::from_rows(&["0011", "0011", "0000", "0011"]).unwrap();
        // blocks: 00/00, 11/11, 00/00, 00/11 -> three distinct, not the 2+2 case
        let half = BitMatrix::from_rows(&["0011", "0011", "1100", "1100"]).unwrap();
        assert_eq!(entropy_estimate(&half, 2, Boundary::Discard).unwrap(), 4.0);
        assert!(entropy_estimate(&two, 2, Boundary::Discard).unwrap() > 4.0);
        let mut checker = BitMatrix::zeros(8, 8);
        for r in 0..8 {
            for c in 0..8 {
                checker.set(r, c, (r + c) % 2 == 1);
            }
        }
        assert_eq!(
            entropy_estimate(&checker, 4, Boundary::Discard).unwrap(),
            0.0
        );
    }

    #[test]
    fn bdm_sees_structure_entropy_does_not() {
        let mut checker = BitMatrix::zeros(8, 8);
        for r in 0..8 {
            for c in 0..8 {
                checker.set(r, c, (r + c) % 2 == 1);
            }
        }
        let zero = BitMatrix::zeros(8, 8);
        let t: BTreeMap<BlockKey, TableEntry> = [
            (BlockKey::of(&zero.sub_block(0, 0, 4, 4)), 3.0),
            (BlockKey::of(&checker.sub_block(0, 0, 4, 4)), 11.0),
        ]
        .into_iter()
        .map(|(k, v)| {
            (
                k,
                TableEntry {
                    km_bits: v,
                    count: None,
                },
            )
        })
        .collect();
        let t = CtmTable::from_entries(t, Provenance::default()).unwrap();
        let e = |m: &BitMatrix| entropy_estimate(m, 4, Boundary::Discard).unwrap();
        assert_eq!(e(&zero), e(&checker));
        let b = |m: &BitMatrix| {
            bdm(m, 4, &t, Boundary::Discard, Fallback::Error)
                .unwrap()
                .bits
        };
        assert!(b(&checker) > b(&zero));
    }

    #[test]
    fn k_graph_examples() {
        let table = small_table();
        let est = Estimator::bdm(&table, 2);
        let empty = k_graph(&Graph::empty(4), &est).unwrap();
        assert!(empty.raw_bits.is_finite());
        assert_eq!(
            empty.normalized(),
            Err(ComplexityError::UndefinedNormalization)
        );

        let k8 = generate_family(Family::Complete(8)).unwrap();
        let s = k_graph(&k8, &est).unwrap();
        let direct = bdm(
            &k8.adjacency(),
            2,
            &table,
            Boundary::Discard,
            Fallback::EntropyBits,
        )
        .unwrap();
        assert_eq!(s.raw_bits, direct.bits);
        assert_eq!(s.normalized_bits, Some(direct.bits / 28.0));
        let twice = k_graph_with(&k8, &est, Normalization::TwiceEdges).unwrap();
        assert_eq!(twice.normalized_bits, Some(direct.bits / 56.0));
    }

    #[test]
    fn bdm_needs_table() {
        let cfg = Estimator::entropy(2).config;
        let bdm_cfg = EstimatorConfig {
            kind: EstimatorKind::Bdm,
            ..cfg
        };
        assert!(matches!(
            Estimator::from_config(bdm_cfg, None),
            Err(ComplexityError::MissingTable)
        ));
        assert!(Estimator::from_config(cfg, None).is_ok());
    }

    #[test]
    fn unlabeled_minimum() {
        let table = small_table();
        let est = Estimator::bdm(&table, 2);
        let k5 = generate_family(Family::Complete(5)).unwrap();
        let u = k_unlabeled(&k5, &est, DEFAULT_UNLABELED_CAP).unwrap();
        assert_eq!(u.score.raw_bits, k_graph(&k5, &est).unwrap().raw_bits);

        // exhaustive oracle over all 24 labelings of P_4
        let p4 = generate_family(Family::Path(4)).unwrap();
        let u = k_unlabeled(&p4, &est, DEFAULT_UNLABELED_CAP).unwrap();
        let mut l = Labeling::identity(4);
        let mut min = f64::INFINITY;
        loop {
            let v = k_graph(&p4.relabel(&l).unwrap(), &est).unwrap().raw_bits;
            assert!(v >= u.score.raw_bits);
            min = min.min(v);
            if !l.next_permutation() {
                break;
            }
        }
        assert_eq!(min, u.score.raw_bits);
        assert_eq!(k_graph(&u.canonical, &est).unwrap().raw_bits, min);
        assert_eq!(p4.relabel(&u.labeling).unwrap(), u.canonical);

        let big = generate_family(Family::Path(9)).unwrap();
        assert_eq!(
            k_unlabeled(&big, &est, DEFAULT_UNLABELED_CAP),
            Err(ComplexityError::CapExceeded { n: 9, cap: 8 })
        );
    }

    #[test]
    fn laplacian_image() {
        let k3 = generate_family(Family::Complete(3)).unwrap();
        let m = laplacian_bits(&k3);
        // degree 2 = 0b10 over two rows
        assert_eq!(m.to_rows(), vec!["011", "101", "110", "000", "111"]);
        assert_eq!(laplacian_bits(&Graph::empty(3)), BitMatrix::zeros(3, 3));
    }

    #[test]
    fn laplacian_gap_examples() {
        let table = small_table();
        let est = Estimator::bdm(&table, 2);
        let empty = laplacian_complexity_gap(&Graph::empty(3), &est).unwrap();
        assert_eq!(empty.gap, 0.0);
        let k3 = generate_family(Family::Complete(3)).unwrap();
        assert!(laplacian_complexity_gap(&k3, &est).unwrap().gap.is_finite());
    }

    #[test]
    fn complexity_csv() {
        let rows = vec![ComplexityRow {
            graph_id: "g0".into(),
            n: 3,
            m_edges: 0,
            score: ComplexityScore {
                raw_bits: 1.5,
                normalized_bits: None,
                estimator: EstimatorKind::Entropy,
                fallback_blocks: 0,
            },
        }];
        let mut out = Vec::new();
        write_complexity_csv(&rows, &Estimator::entropy(2).config, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "graph_id,n,m_edges,estimator,d,boundary,raw_bits,normalized_bits,fallback_blocks\n\
             g0,3,0,entropy,2,discard,1.5,,0\n"
        );
    }
}
