//! Frameworks and tensegrities: rigidity matrices, equilibrium stresses, PSD stress
//! sequences through facial reduction, rigidity verdicts, graph classifiers, and instance
//! generators.

mod chordal;
mod generate;
mod matrix;
mod pebble;
mod stress;

use std::collections::HashSet;

use thiserror::Error;

use crate::facial::FacialError;
use crate::numerics::{to_f64, Rational};

pub use chordal::{bakonyi_johnson_check, is_chordal, lex_bfs, maximal_cliques, perfect_elimination_order};
pub use generate::{gen_chordal, gen_ladder_sdp, gen_laman, gen_maximal_planar, random_generic_config, MAX_GEN_N};
pub use matrix::{
    affine_flex_dim, equilibrium_stress_basis, infinitesimal_verdict, rigidity_map, rigidity_map_exact, rigidity_matrix,
    rigidity_matrix_exact, stress_matrix_exact, stress_matrix_from, Infinitesimal,
};
pub use pebble::{is_laman, laman_excess, laman_sparse, pebble_independent_edges};
pub use stress::{
    a_priori_bound, edm_completion_system, framework_sd, psd_stress_sequence, rigidity_verdicts, RigidityVerdict, StressLevel,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Bar,
    /// May shorten; equilibrium stress ω ≥ 0.
    Cable,
    /// May lengthen; equilibrium stress ω ≤ 0.
    Strut,
}

impl EdgeKind {
    /// +1 for cables, −1 for struts, 0 for bars.
    pub fn sign(self) -> i32 {
        match self {
            EdgeKind::Bar => 0,
            EdgeKind::Cable => 1,
            EdgeKind::Strut => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EdgeKind::Bar => "bar",
            EdgeKind::Cable => "cable",
            EdgeKind::Strut => "strut",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bar" => Some(EdgeKind::Bar),
            "cable" => Some(EdgeKind::Cable),
            "strut" => Some(EdgeKind::Strut),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RigidityError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degenerate framework: {0}")]
    Degenerate(String),
    #[error("range form gives sd {range} but nullspace form gives {nullspace}")]
    FormsDisagree { range: usize, nullspace: usize },
    #[error(transparent)]
    Facial(#[from] FacialError),
}

/// Simple undirected graph with edges kept in insertion order, each stored as (i, j), i < j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub kinds: Vec<EdgeKind>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, RigidityError> {
        Self::with_kinds(n, edges.iter().map(|&(i, j)| (i, j, EdgeKind::Bar)).collect::<Vec<_>>().as_slice())
    }

    pub fn with_kinds(n: usize, edges: &[(usize, usize, EdgeKind)]) -> Result<Self, RigidityError> {
        let mut seen = HashSet::new();
        let mut g = Graph { n, edges: Vec::with_capacity(edges.len()), kinds: Vec::with_capacity(edges.len()) };
        for &(i, j, kind) in edges {
            if i >= n || j >= n {
                return Err(RigidityError::Invalid(format!("edge ({i}, {j}) out of range for {n} vertices")));
            }
            if i == j {
                return Err(RigidityError::Invalid(format!("loop at vertex {i}")));
            }
            let e = (i.min(j), i.max(j));
            if !seen.insert(e) {
                return Err(RigidityError::Invalid(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            g.edges.push(e);
            g.kinds.push(kind);
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Graph::new(n, &edges).expect("complete graph is simple")
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edge_index(i, j).is_some()
    }

    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        let e = (i.min(j), i.max(j));
        self.edges.iter().position(|&f| f == e)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    /// Pairs i < j that are not edges.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let set: HashSet<(usize, usize)> = self.edges.iter().copied().collect();
        (0..self.n).flat_map(|i| (i + 1..self.n).map(move |j| (i, j))).filter(|e| !set.contains(e)).collect()
    }

    pub fn is_tensegrity(&self) -> bool {
        self.kinds.iter().any(|k| *k != EdgeKind::Bar)
    }

    /// Add an edge; errors on duplicates, loops, or out-of-range vertices.
    pub fn add_edge(&mut self, i: usize, j: usize, kind: EdgeKind) -> Result<(), RigidityError> {
        let mut list: Vec<(usize, usize, EdgeKind)> = self.edges.iter().zip(&self.kinds).map(|(&(a, b), &k)| (a, b, k)).collect();
        list.push((i, j, kind));
        *self = Graph::with_kinds(self.n, &list)?;
        Ok(())
    }
}

/// A graph with one point per vertex in dimension 2 or 3; coordinates are exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct Framework {
    pub graph: Graph,
    pub dim: usize,
    pub coords: Vec<Vec<Rational>>,
    /// Where the instance came from (generator name, file), if known.
    pub provenance: Option<String>,
}

impl Framework {
    pub fn new(graph: Graph, dim: usize, coords: Vec<Vec<Rational>>) -> Result<Self, RigidityError> {
        if dim != 2 && dim != 3 {
            return Err(RigidityError::Invalid(format!("dimension {dim} is not 2 or 3")));
        }
        if coords.len() != graph.n || coords.iter().any(|p| p.len() != dim) {
            return Err(RigidityError::Invalid(format!("expected {} points of dimension {dim}", graph.n)));
        }
        Ok(Framework { graph, dim, coords, provenance: None })
    }

    pub fn from_f64(graph: Graph, dim: usize, coords: &[Vec<f64>]) -> Result<Self, RigidityError> {
        let exact = coords
            .iter()
            .map(|p| {
                p.iter()
                    .map(|x| Rational::from_float(*x).ok_or_else(|| RigidityError::Invalid(format!("non-finite coordinate {x}"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(graph, dim, exact)
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = Some(provenance.into());
        self
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        self.coords.iter().map(|p| p.iter().map(to_f64).collect()).collect()
    }

    /// Edges whose endpoints coincide.
    pub fn zero_length_edges(&self) -> Vec<usize> {
        self.graph.edges.iter().enumerate().filter(|(_, &(i, j))| self.coords[i] == self.coords[j]).map(|(k, _)| k).collect()
    }

    pub(crate) fn refuse_degenerate(&self) -> Result<(), RigidityError> {
        let bad = self.zero_length_edges();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(RigidityError::Degenerate(format!("{} zero-length edge(s), first {:?}", bad.len(), self.graph.edges[bad[0]])))
        }
    }
}
