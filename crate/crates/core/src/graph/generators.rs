//! Deterministic graph families and seeded random models.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};
use crate::rng::below;

/// A family name without its size parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Complete,
    Cycle,
    Path,
    Star,
    Wheel,
    Fan,
    Grid,
    Crown,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 8] = [
        FamilyKind::Complete,
        FamilyKind::Cycle,
        FamilyKind::Path,
        FamilyKind::Star,
        FamilyKind::Wheel,
        FamilyKind::Fan,
        FamilyKind::Grid,
        FamilyKind::Crown,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Complete => "complete",
            FamilyKind::Cycle => "cycle",
            FamilyKind::Path => "path",
            FamilyKind::Star => "star",
            FamilyKind::Wheel => "wheel",
            FamilyKind::Fan => "fan",
            FamilyKind::Grid => "grid",
            FamilyKind::Crown => "crown",
        }
    }

    /// Member of a growing sequence. Grids grow as `size x size` squares.
    pub fn with_size(self, size: usize) -> Family {
        match self {
            FamilyKind::Complete => Family::Complete(size),
            FamilyKind::Cycle => Family::Cycle(size),
            FamilyKind::Path => Family::Path(size),
            FamilyKind::Star => Family::Star(size),
            FamilyKind::Wheel => Family::Wheel(size),
            FamilyKind::Fan => Family::Fan(size),
            FamilyKind::Grid => Family::Grid {
                rows: size,
                cols: size,
            },
            FamilyKind::Crown => Family::Crown(size),
        }
    }

    /// Smallest valid size parameter.
    pub fn min_size(self) -> usize {
        match self {
            FamilyKind::Complete | FamilyKind::Path | FamilyKind::Grid => 1,
            FamilyKind::Star | FamilyKind::Crown => 2,
            FamilyKind::Cycle | FamilyKind::Fan => 3,
            FamilyKind::Wheel => 4,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| GraphError::InvalidParameter(format!("unknown family {s:?}")))
    }
}

/// A family member with its size parameters.
///
/// `Wheel(n)` is a cycle on `n - 1` vertices plus a hub joined to all of them,
/// `Fan(n)` the same over a path, `Star(n)` a hub with `n - 1` leaves, and
/// `Crown(n)` is `K_{n,n}` minus a perfect matching on `2n` vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Complete(usize),
    Cycle(usize),
    Path(usize),
    Star(usize),
    Wheel(usize),
    Fan(usize),
    Grid { rows: usize, cols: usize },
    Crown(usize),
}

impl Family {
    pub fn kind(&self) -> FamilyKind {
        match self {
            Family::Complete(_) => FamilyKind::Complete,
            Family::Cycle(_) => FamilyKind::Cycle,
            Family::Path(_) => FamilyKind::Path,
            Family::Star(_) => FamilyKind::Star,
            Family::Wheel(_) => FamilyKind::Wheel,
            Family::Fan(_) => FamilyKind::Fan,
            Family::Grid { .. } => FamilyKind::Grid,
            Family::Crown(_) => FamilyKind::Crown,
        }
    }
}

fn check_min(kind: FamilyKind, size: usize) -> Result<(), GraphError> {
    if size < kind.min_size() {
        return Err(GraphError::InvalidParameter(format!(
            "{kind} graphs need size >= {}, got {size}",
            kind.min_size()
        )));
    }
    Ok(())
}

fn build(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Graph {
    let mut g = Graph::empty(n);
    for (u, v) in edges {
        g.insert_edge(u, v)
            .expect("generator emitted an invalid edge");
    }
    g
}

pub fn generate_family(family: Family) -> Result<Graph, GraphError> {
    match family {
        Family::Complete(n) => {
            check_min(FamilyKind::Complete, n)?;
            Ok(build(
                n,
                (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))),
            ))
        }
        Family::Cycle(n) => {
            check_min(FamilyKind::Cycle, n)?;
            Ok(build(n, (0..n).map(|u| (u, (u + 1) % n))))
        }
        Family::Path(n) => {
            check_min(FamilyKind::Path, n)?;
            Ok(build(n, (1..n).map(|u| (u - 1, u))))
        }
        Family::Star(n) => {
            check_min(FamilyKind::Star, n)?;
            Ok(build(n, (1..n).map(|u| (0, u))))
        }
        Family::Wheel(n) => {
            check_min(FamilyKind::Wheel, n)?;
            let rim = n - 1;
            let cycle = (0..rim).map(move |i| (1 + i, 1 + (i + 1) % rim));
            Ok(build(n, (1..n).map(|u| (0, u)).chain(cycle)))
        }
        Family::Fan(n) => {
            check_min(FamilyKind::Fan, n)?;
            let path = (2..n).map(|u| (u - 1, u));
            Ok(build(n, (1..n).map(|u| (0, u)).chain(path)))
        }
        Family::Grid { rows, cols } => {
            if rows < 1 || cols < 1 {
                return Err(GraphError::InvalidParameter(format!(
                    "grid graphs need rows, cols >= 1, got {rows}x{cols}"
                )));
            }
            let id = move |r: usize, c: usize| r * cols + c;
            let horizontal =
                (0..rows).flat_map(move |r| (1..cols).map(move |c| (id(r, c - 1), id(r, c))));
            let vertical =
                (1..rows).flat_map(move |r| (0..cols).map(move |c| (id(r - 1, c), id(r, c))));
            Ok(build(rows * cols, horizontal.chain(vertical)))
        }
        Family::Crown(n) => {
            check_min(FamilyKind::Crown, n)?;
            let edges =
                (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, n + j)));
            Ok(build(2 * n, edges))
        }
    }
}

/// G(n, p): each of the `n(n-1)/2` pairs, visited in `(min, max)` order,
/// is kept independently with probability `p`.
pub fn generate_er<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidParameter(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                g.insert_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

/// Watts-Strogatz small world.
///
/// Starts from the ring lattice joining each vertex to its `k/2` successors.
/// Edges are then visited lattice-distance-major (`j = 1..=k/2`, then
/// `u = 0..n`), and with probability `beta` edge `{u, u+j}` is replaced by
/// `{u, w}` for `w` uniform among the current non-neighbors of `u`. Edges are
/// moved, never dropped, so the count stays `nk/2`.
pub fn generate_ws<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    beta: f64,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    if !k.is_multiple_of(2) || k >= n {
        return Err(GraphError::InvalidParameter(format!(
            "neighbor count k must be even and below n, got k={k}, n={n}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(GraphError::InvalidParameter(format!(
            "rewiring probability must lie in [0, 1], got {beta}"
        )));
    }
    let half = k / 2;
    let mut g = build(
        n,
        (1..=half).flat_map(|j| (0..n).map(move |u| (u, (u + j) % n))),
    );
    for j in 1..=half {
        for u in 0..n {
            if rng.random::<f64>() >= beta {
                continue;
            }
            let candidates: Vec<usize> = (0..n).filter(|&w| w != u && !g.has_edge(u, w)).collect();
            if candidates.is_empty() {
                continue;
            }
            let w = candidates[below(rng, candidates.len())];
            g.remove_edge(u, (u + j) % n);
            g.insert_edge(u, w)?;
        }
    }
    Ok(g)
}

/// Barabasi-Albert preferential attachment.
///
/// Seeds a clique on `m_attach + 1` vertices; each later vertex picks
/// `m_attach` distinct targets, one draw at a time without replacement, with
/// probability proportional to current degree. A single stream drives the
/// whole process, so `generate_ba(n1, ..)` is the prefix of `generate_ba(n2, ..)`
/// for `n1 < n2` under the same stream.
pub fn generate_ba<R: Rng + ?Sized>(
    n: usize,
    m_attach: usize,
    rng: &mut R,
) -> Result<Graph, GraphError> {
    if m_attach < 1 || n <= m_attach {
        return Err(GraphError::InvalidParameter(format!(
            "need m_attach >= 1 and n > m_attach, got n={n}, m_attach={m_attach}"
        )));
    }
    let seed = m_attach + 1;
    let mut g = build(
        n,
        (0..seed).flat_map(|u| (u + 1..seed).map(move |v| (u, v))),
    );
    let mut degree = vec![0usize; n];
    degree[..seed].fill(m_attach);
    let mut picked = Vec::with_capacity(m_attach);
    for v in seed..n {
        picked.clear();
        for _ in 0..m_attach {
            let total: usize = (0..v)
                .filter(|u| !picked.contains(u))
                .map(|u| degree[u])
                .sum();
            let mut r = below(rng, total);
            let target = (0..v)
                .filter(|u| !picked.contains(u))
                .find(|&u| {
                    if r < degree[u] {
                        true
                    } else {
                        r -= degree[u];
                        false
                    }
                })
                .expect("draw lies within total degree");
            picked.push(target);
        }
        for &u in &picked {
            g.insert_edge(u, v)?;
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    Ok(g)
}
