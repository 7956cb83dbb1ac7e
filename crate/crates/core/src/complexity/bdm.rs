use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ComplexityError;
use crate::ctm::{BlockKey, CtmTable};
use crate::graph::BitMatrix;

/// What to do with rows and columns left over when the side is not a
/// multiple of the block size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Boundary {
    #[default]
    Discard,
    /// Keep the remainder as smaller blocks, looked up under their own shape.
    IncludePartial,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Discard => "discard",
            Boundary::IncludePartial => "include-partial",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Boundary {
    type Err = ComplexityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "discard" => Ok(Boundary::Discard),
            "include-partial" | "partial" => Ok(Boundary::IncludePartial),
            other => Err(ComplexityError::InvalidParameter(format!(
                "unknown boundary policy {other:?}"
            ))),
        }
    }
}

/// Handling of blocks the table has never seen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Fallback {
    Error,
    /// Cell entropy of the block plus the table's largest value.
    #[default]
    EntropyBits,
}

impl Fallback {
    pub fn name(self) -> &'static str {
        match self {
            Fallback::Error => "error",
            Fallback::EntropyBits => "entropy-bits",
        }
    }
}

impl fmt::Display for Fallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fallback {
    type Err = ComplexityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "error" => Ok(Fallback::Error),
            "entropy-bits" | "entropy" => Ok(Fallback::EntropyBits),
            other => Err(ComplexityError::InvalidParameter(format!(
                "unknown fallback policy {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KmSource {
    Table,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockContribution {
    pub rows: usize,
    pub cols: usize,
    pub pattern: String,
    pub multiplicity: usize,
    pub km_bits: f64,
    pub source: KmSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BdmEstimate {
    pub bits: f64,
    pub d: usize,
    pub boundary: Boundary,
    pub fallback: Fallback,
    /// Distinct blocks in key order.
    pub blocks: Vec<BlockContribution>,
}

impl BdmEstimate {
    pub fn fallback_blocks(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.source == KmSource::Fallback)
            .count()
    }

    pub fn block_count(&self) -> usize {
        self.blocks.iter().map(|b| b.multiplicity).sum()
    }
}

/// Non-overlapping `d x d` tiling from the top-left, row-major, grouped into
/// distinct patterns with multiplicities.
pub fn decompose(
    m: &BitMatrix,
    d: usize,
    boundary: Boundary,
) -> Result<BTreeMap<BlockKey, usize>, ComplexityError> {
    if d == 0 {
        return Err(ComplexityError::InvalidParameter(
            "block size must be >= 1".into(),
        ));
    }
    let mut blocks = BTreeMap::new();
    for r0 in (0..m.rows()).step_by(d) {
        for c0 in (0..m.cols()).step_by(d) {
            let h = d.min(m.rows() - r0);
            let w = d.min(m.cols() - c0);
            if (h < d || w < d) && boundary == Boundary::Discard {
                continue;
            }
            *blocks
                .entry(BlockKey::of(&m.sub_block(r0, c0, h, w)))
                .or_insert(0) += 1;
        }
    }
    if blocks.is_empty() {
        return Err(ComplexityError::EmptyDecomposition {
            rows: m.rows(),
            cols: m.cols(),
            d,
        });
    }
    Ok(blocks)
}

/// Shannon entropy of the cell values of a block, times its area.
pub fn cell_entropy_bits(key: &BlockKey) -> f64 {
    let area = key.pattern.len();
    let ones = key.pattern.bytes().filter(|&b| b == b'1').count();
    let h = |k: usize| {
        if k == 0 {
            0.0
        } else {
            let p = k as f64 / area as f64;
            -p * p.log2()
        }
    };
    area as f64 * (h(ones) + h(area - ones))
}

/// `Σ_u log2(n_u) + km(r_u)` over a block multiset. Terms are added in key
/// order, so the result depends only on the multiset.
pub fn bdm_of_blocks(
    blocks: &BTreeMap<BlockKey, usize>,
    table: &CtmTable,
    d: usize,
    boundary: Boundary,
    fallback: Fallback,
) -> Result<BdmEstimate, ComplexityError> {
    let mut bits = 0.0;
    let mut contributions = Vec::with_capacity(blocks.len());
    for (key, &multiplicity) in blocks {
        let (km_bits, source) = match table.get(key) {
            Some(e) => (e.km_bits, KmSource::Table),
            None => match fallback {
                Fallback::Error => {
                    return Err(ComplexityError::MissingBlock {
                        rows: key.rows,
                        cols: key.cols,
                        pattern: key.pattern.clone(),
                    })
                }
                Fallback::EntropyBits => {
                    (cell_entropy_bits(key) + table.max_km(), KmSource::Fallback)
                }
            },
        };
        bits += (multiplicity as f64).log2() + km_bits;
        contributions.push(BlockContribution {
            rows: key.rows,
            cols: key.cols,
            pattern: key.pattern.clone(),
            multiplicity,
            km_bits,
            source,
        });
    }
    Ok(BdmEstimate {
        bits,
        d,
        boundary,
        fallback,
        blocks: contributions,
    })
}

/// Block decomposition estimate of `m` with `d x d` blocks.
pub fn bdm(
    m: &BitMatrix,
    d: usize,
    table: &CtmTable,
    boundary: Boundary,
    fallback: Fallback,
) -> Result<BdmEstimate, ComplexityError> {
    if d < 2 {
        return Err(ComplexityError::InvalidParameter(format!(
            "block size must be >= 2, got {d}"
        )));
    }
    let blocks = decompose(m, d, boundary)?;
    bdm_of_blocks(&blocks, table, d, boundary, fallback)
}
