//! Directed graphs describing which single-step moves are allowed.
//!
//! Every vertex carries a self-loop: the walker may always stay put. Edges are
//! stored both as sorted successor lists and as a membership set.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    vertex_count: usize,
    successors: Vec<Vec<usize>>,
    edges: HashSet<(usize, usize)>,
}

impl DirectedGraph {
    /// Builds a graph from `(from, to)` pairs. Self-loops are added for every
    /// vertex and duplicate edges are collapsed.
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if vertex_count == 0 {
            return Err(Error::InvalidArgument(
                "graph needs at least one vertex".into(),
            ));
        }
        let mut set: HashSet<(usize, usize)> = (0..vertex_count).map(|n| (n, n)).collect();
        for (from, to) in edges {
            for index in [from, to] {
                if index >= vertex_count {
                    return Err(Error::IndexOutOfRange {
                        index,
                        vertex_count,
                    });
                }
            }
            set.insert((from, to));
        }
        let mut successors = vec![Vec::new(); vertex_count];
        for &(from, to) in &set {
            successors[from].push(to);
        }
        for s in &mut successors {
            s.sort_unstable();
        }
        Ok(Self {
            vertex_count,
            successors,
            edges: set,
        })
    }

    /// Every ordered pair is an edge.
    pub fn complete(vertex_count: usize) -> Result<Self> {
        let pairs = (0..vertex_count).flat_map(|n| (0..vertex_count).map(move |m| (n, m)));
        Self::new(vertex_count, pairs.collect::<Vec<_>>())
    }

    /// Undirected cycle `0 - 1 - ... - (L-1) - 0` with self-loops.
    pub fn cycle(vertex_count: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for n in 0..vertex_count {
            let next = (n + 1) % vertex_count;
            edges.push((n, next));
            edges.push((next, n));
        }
        Self::new(vertex_count, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// True when the walker may move from `from` to `to` in one step.
    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    pub fn successors(&self, n: usize) -> &[usize] {
        &self.successors[n]
    }

    /// All edges in lexicographic `(from, to)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(from, succ)| succ.iter().map(move |&to| (from, to)))
    }

    /// Edges that are not self-loops, in lexicographic order.
    pub fn proper_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges().filter(|(from, to)| from != to)
    }

    /// Strongly connected components (Tarjan), each sorted ascending.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        tarjan(&self.successors)
    }

    /// True iff every edge `n -> m` has a directed return path `m ~> n`,
    /// i.e. both endpoints of every edge share a strongly connected component.
    pub fn is_reversible(&self) -> bool {
        let mut component = vec![0usize; self.vertex_count];
        for (id, comp) in self.strongly_connected_components().iter().enumerate() {
            for &v in comp {
                component[v] = id;
            }
        }
        self.edges().all(|(from, to)| component[from] == component[to])
    }

    /// Replaces each vertex `n` by `internal_dims[n]` vertices `(n, k)`, with an
    /// edge `(n, k) -> (m, l)` for every `n -> m` and every pair `k, l`.
    pub fn expand_internal(&self, internal_dims: &[usize]) -> Result<(DirectedGraph, ExpansionMap)> {
        let map = ExpansionMap::new(internal_dims.to_vec())?;
        if map.base_vertex_count() != self.vertex_count {
            return Err(Error::Dimension {
                expected: self.vertex_count,
                got: internal_dims.len(),
            });
        }
        let mut edges = Vec::new();
        for (n, m) in self.edges() {
            for k in 0..internal_dims[n] {
                for l in 0..internal_dims[m] {
                    edges.push((map.offsets[n] + k, map.offsets[m] + l));
                }
            }
        }
        let expanded = DirectedGraph::new(map.expanded_vertex_count(), edges)?;
        Ok((expanded, map))
    }
}

fn tarjan(successors: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = successors.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next_index = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        // (vertex, position in its successor list)
        let mut call_stack = vec![(root, 0usize)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call_stack.last_mut() {
            if *pos < successors[v].len() {
                let w = successors[v][*pos];
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call_stack.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call_stack.pop();
            if let Some(&(parent, _)) = call_stack.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components
}

/// Row-major flattening of `(vertex, internal state)` pairs:
/// `(n, k) -> offset(n) + k` with `offset(n) = dims[0] + ... + dims[n-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ExpansionMapRepr", into = "ExpansionMapRepr")]
pub struct ExpansionMap {
    internal_dims: Vec<usize>,
    offsets: Vec<usize>,
    expanded_vertex_count: usize,
}

impl ExpansionMap {
    pub fn new(internal_dims: Vec<usize>) -> Result<Self> {
        if internal_dims.is_empty() {
            return Err(Error::InvalidArgument("no internal dimensions given".into()));
        }
        if let Some(n) = internal_dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidArgument(format!(
                "vertex {n} has internal dimension 0"
            )));
        }
        let mut offsets = Vec::with_capacity(internal_dims.len());
        let mut total = 0;
        for &d in &internal_dims {
            offsets.push(total);
            total += d;
        }
        Ok(Self {
            internal_dims,
            offsets,
            expanded_vertex_count: total,
        })
    }

    pub fn base_vertex_count(&self) -> usize {
        self.internal_dims.len()
    }

    pub fn expanded_vertex_count(&self) -> usize {
        self.expanded_vertex_count
    }

    pub fn internal_dims(&self) -> &[usize] {
        &self.internal_dims
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn index(&self, vertex: usize, internal: usize) -> Result<usize> {
        let dim = *self.internal_dims.get(vertex).ok_or(Error::IndexOutOfRange {
            index: vertex,
            vertex_count: self.base_vertex_count(),
        })?;
        if internal >= dim {
            return Err(Error::IndexOutOfRange {
                index: internal,
                vertex_count: dim,
            });
        }
        Ok(self.offsets[vertex] + internal)
    }

    /// Inverse of [`ExpansionMap::index`].
    pub fn locate(&self, flat: usize) -> Result<(usize, usize)> {
        if flat >= self.expanded_vertex_count {
            return Err(Error::IndexOutOfRange {
                index: flat,
                vertex_count: self.expanded_vertex_count,
            });
        }
        // offsets are strictly increasing since every dim is >= 1
        let vertex = self.offsets.partition_point(|&o| o <= flat) - 1;
        Ok((vertex, flat - self.offsets[vertex]))
    }

    /// `P_n = sum_k P_(n,k)`.
    pub fn aggregate_probability(&self, expanded: &[f64]) -> Result<Vec<f64>> {
        if expanded.len() != self.expanded_vertex_count {
            return Err(Error::Dimension {
                expected: self.expanded_vertex_count,
                got: expanded.len(),
            });
        }
        Ok(self
            .offsets
            .iter()
            .zip(&self.internal_dims)
            .map(|(&o, &d)| expanded[o..o + d].iter().sum())
            .collect())
    }

    /// `J_mn = sum_{k,l} J_(m,l),(n,k)`: block sums of the expanded matrix.
    pub fn aggregate_current(&self, expanded: &RMatrix) -> Result<RMatrix> {
        let size = self.expanded_vertex_count;
        if expanded.nrows() != size || expanded.ncols() != size {
            return Err(Error::Dimension {
                expected: size,
                got: if expanded.nrows() != size {
                    expanded.nrows()
                } else {
                    expanded.ncols()
                },
            });
        }
        let base = self.base_vertex_count();
        let mut out = RMatrix::zeros(base, base);
        for m in 0..base {
            for n in 0..base {
                let block = expanded.view(
                    (self.offsets[m], self.offsets[n]),
                    (self.internal_dims[m], self.internal_dims[n]),
                );
                out[(m, n)] = block.sum();
            }
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct ExpansionMapRepr {
    base_vertex_count: usize,
    internal_dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl From<ExpansionMap> for ExpansionMapRepr {
    fn from(map: ExpansionMap) -> Self {
        Self {
            base_vertex_count: map.base_vertex_count(),
            internal_dims: map.internal_dims,
            offsets: map.offsets,
        }
    }
}

impl TryFrom<ExpansionMapRepr> for ExpansionMap {
    type Error = Error;

    fn try_from(repr: ExpansionMapRepr) -> Result<Self> {
        let map = ExpansionMap::new(repr.internal_dims)?;
        if repr.base_vertex_count != map.base_vertex_count() || repr.offsets != map.offsets {
            return Err(Error::Format(
                "expansion map offsets disagree with internal_dims".into(),
            ));
        }
        Ok(map)
    }
}
