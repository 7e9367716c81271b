//! Local probability flows: the source/sink network, its max flow, the
//! linear-programming route, and the four flow conditions.
//!
//! A flow matrix `f[(m, n)]` is the probability moved along `n -> m` in one
//! step (`f[(n, n)]` is what stays at `n`). It is valid for `P -> P'` when
//!
//! * `Flow1`: every entry is nonnegative,
//! * `Flow2`: entries off the edge set vanish,
//! * `Flow3`: column `n` sums to `P_n`,
//! * `Flow4`: row `m` sums to `P'_m`.

mod lp;
mod maxflow;
mod network;

pub use lp::{solve_flow_lp, Objective};
pub use maxflow::{edmonds_karp, extract_flow_matrix, max_flow, MaxFlow, RESIDUAL_TOL};
pub use network::{build_flow_network, capacity_mode, ArcKind, CapacityMode, FlowArc, FlowNetwork};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::linalg::RMatrix;
use crate::report::Report;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    matrix: RMatrix,
    graph: DirectedGraph,
}

impl FlowMatrix {
    /// Wraps `matrix` after a shape check. The flow conditions are not
    /// enforced here; run [`verify_flow`] for that.
    pub fn new(matrix: RMatrix, graph: DirectedGraph) -> Result<Self> {
        let n = graph.vertex_count();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: if matrix.nrows() != n {
                    matrix.nrows()
                } else {
                    matrix.ncols()
                },
            });
        }
        Ok(Self { matrix, graph })
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `sum_n f_nn`.
    pub fn stationary(&self) -> f64 {
        self.matrix.trace()
    }

    /// Column sums, i.e. the initial distribution this flow accounts for.
    pub fn outflow(&self) -> Vec<f64> {
        self.matrix.column_iter().map(|c| c.sum()).collect()
    }

    /// Row sums, i.e. the final distribution this flow produces.
    pub fn inflow(&self) -> Vec<f64> {
        self.matrix.row_iter().map(|r| r.sum()).collect()
    }
}

/// Checks Flow1–Flow4 for `f` against `P`, `P'` and `graph`, reporting the
/// worst violation of each. Errors only on shape mismatches.
pub fn verify_flow(
    f: &FlowMatrix,
    p: &[f64],
    p_prime: &[f64],
    graph: &DirectedGraph,
    tol: f64,
) -> Result<Report> {
    let n = graph.vertex_count();
    if f.vertex_count() != n {
        return Err(Error::Dimension {
            expected: n,
            got: f.vertex_count(),
        });
    }
    for v in [p, p_prime] {
        if v.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: v.len(),
            });
        }
    }
    let m = f.matrix();

    let negativity = m.iter().map(|&x| (-x).max(0.0)).fold(0.0, f64::max);
    let mut off_graph = 0.0f64;
    for to in 0..n {
        for from in 0..n {
            if !graph.has_edge(from, to) {
                off_graph = off_graph.max(m[(to, from)].abs());
            }
        }
    }
    let column = f
        .outflow()
        .iter()
        .zip(p)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let row = f
        .inflow()
        .iter()
        .zip(p_prime)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let mut report = Report::default();
    report.push("Flow1", negativity, tol);
    report.push("Flow2", off_graph, tol);
    report.push("Flow3", column, tol);
    report.push("Flow4", row, tol);
    Ok(report)
}
