use super::network::check_distribution;
use super::FlowMatrix;
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::linalg::RMatrix;
use crate::simplex::{self, LpOutcome, StandardLp};
use crate::DEFAULT_TOL;

/// Objective for [`solve_flow_lp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Objective {
    /// Maximize `sum_n f_nn`, the probability that stays put. This rules out
    /// probability moving both ways along the same pair of edges.
    #[default]
    MaxStationary,
    /// Any feasible flow.
    None,
}

/// Finds a local flow for `P -> P'` on `graph` by linear programming.
///
/// Variables are `f_e` for each edge `e` (in [`DirectedGraph::edges`] order).
/// Constraints are the `N` column sums and the first `N - 1` row sums; the
/// last row sum is implied by normalization and is checked afterwards.
pub fn solve_flow_lp(
    p: &[f64],
    p_prime: &[f64],
    graph: &DirectedGraph,
    objective: Objective,
) -> Result<FlowMatrix> {
    let n = graph.vertex_count();
    check_distribution("initial distribution", p, n)?;
    check_distribution("final distribution", p_prime, n)?;

    let edges: Vec<(usize, usize)> = graph.edges().collect();
    let mut constraints = vec![vec![0.0; edges.len()]; 2 * n - 1];
    for (j, &(from, to)) in edges.iter().enumerate() {
        constraints[from][j] = 1.0;
        if to < n - 1 {
            constraints[n + to][j] = 1.0;
        }
    }
    let rhs: Vec<f64> = p.iter().chain(&p_prime[..n - 1]).copied().collect();
    let cost = edges
        .iter()
        .map(|(from, to)| match objective {
            Objective::MaxStationary if from == to => 1.0,
            _ => 0.0,
        })
        .collect();

    let lp = StandardLp {
        objective: cost,
        constraints,
        rhs,
    };
    let x = match simplex::solve(&lp)? {
        LpOutcome::Optimal { x, .. } => x,
        LpOutcome::Infeasible { residual } => {
            return Err(Error::Infeasible(format!(
                "flow constraints cannot be met (phase-one residual {residual:e})"
            )))
        }
        // the feasible set is a bounded polytope
        LpOutcome::Unbounded => unreachable!("flow polytope is bounded"),
    };

    let mut f = RMatrix::zeros(n, n);
    for (&(from, to), v) in edges.iter().zip(x) {
        f[(to, from)] = v;
    }
    let last_row: f64 = f.row(n - 1).sum();
    if (last_row - p_prime[n - 1]).abs() > DEFAULT_TOL {
        return Err(Error::Infeasible(format!(
            "dropped row-sum constraint misses P'[{}] by {:e}",
            n - 1,
            (last_row - p_prime[n - 1]).abs()
        )));
    }
    FlowMatrix::new(f, graph.clone())
}
