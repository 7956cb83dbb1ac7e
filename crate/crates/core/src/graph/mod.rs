//! Simple undirected graphs, vertex labelings and the matrices derived from them.

mod generators;
pub mod io;
mod matrix;

use std::collections::BTreeSet;

pub use generators::{generate_ba, generate_er, generate_family, generate_ws, Family, FamilyKind};
pub use matrix::{BitMatrix, IntMatrix};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A simple undirected loop-free graph on vertices `0..n`.
///
/// Edges are stored once as `(min, max)` pairs, so iteration order is the
/// canonical `(min, max)` lexicographic order used by the serializers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: BTreeSet::new(),
        }
    }

    /// Builds a graph, rejecting loops, out-of-range endpoints and duplicates
    /// (`(1, 0)` duplicates `(0, 1)`).
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            if !g.insert_edge(u, v)? {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        Ok(g)
    }

    /// Inserts `{u, v}`. Returns `false` if the edge was already present.
    pub fn insert_edge(&mut self, u: usize, v: usize) -> Result<bool, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if u >= self.n || v >= self.n {
            return Err(GraphError::VertexOutOfRange { u, v, n: self.n });
        }
        Ok(self.edges.insert((u.min(v), u.max(v))))
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        self.edges.remove(&(u.min(v), u.max(v)))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == u {
                Some(b)
            } else if b == u {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn adjacency(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            m.set(u, v, true);
            m.set(v, u, true);
        }
        m
    }

    /// `L = D - A`.
    pub fn laplacian(&self) -> IntMatrix {
        let mut l = IntMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            l.set(u, v, -1);
            l.set(v, u, -1);
        }
        for (i, d) in self.degrees().into_iter().enumerate() {
            l.set(i, i, d as i64);
        }
        l
    }

    /// Maps every edge `{u, v}` to `{l(u), l(v)}`.
    pub fn relabel(&self, labeling: &Labeling) -> Result<Graph, GraphError> {
        if labeling.len() != self.n {
            return Err(GraphError::InvalidParameter(format!(
                "labeling has length {} but graph has {} vertices",
                labeling.len(),
                self.n
            )));
        }
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (labeling.get(u), labeling.get(v));
                (a.min(b), a.max(b))
            })
            .collect();
        Ok(Graph { n: self.n, edges })
    }
}

/// A permutation of `0..n`, read as the new label of each vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Labeling(Vec<usize>);

impl Labeling {
    pub fn new(perm: Vec<usize>) -> Result<Self, GraphError> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(GraphError::InvalidParameter(format!(
                    "{perm:?} is not a permutation of 0..{}",
                    perm.len()
                )));
            }
        }
        Ok(Self(perm))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn reverse(n: usize) -> Self {
        Self((0..n).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, vertex: usize) -> usize {
        self.0[vertex]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Advances to the next permutation in lexicographic order; returns
    /// `false` (leaving `self` untouched) once the last one is reached.
    pub fn next_permutation(&mut self) -> bool {
        let v = &mut self.0;
        if v.len() < 2 {
            return false;
        }
        let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
            return false;
        };
        let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
        v.swap(i, j);
        v[i + 1..].reverse();
        true
    }
}
