//! Probability currents and stochastic transition matrices, and conversions
//! between them and flow matrices.
//!
//! The current `J[(m, n)] = f[(m, n)] - f[(n, m)]` is the net probability
//! moved from `n` to `m`. A valid current satisfies the continuity equation
//! `P'_n - P_n + sum_m J[(m, n)] = 0` and the flux bound
//! `sum_{m : J[(m, n)] > 0} J[(m, n)] <= P_n`.

use crate::error::{Error, Result};
use crate::flow::FlowMatrix;
use crate::graph::DirectedGraph;
use crate::linalg::RMatrix;
use crate::report::Report;
use crate::{DEFAULT_TOL, ZERO_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentMatrix {
    matrix: RMatrix,
    graph: DirectedGraph,
}

impl CurrentMatrix {
    /// Wraps an externally supplied matrix after a shape check. Antisymmetry
    /// and edge support are checked by [`verify_current`].
    pub fn new(matrix: RMatrix, graph: DirectedGraph) -> Result<Self> {
        check_square(&matrix, &graph)?;
        Ok(Self { matrix, graph })
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    /// `sum_m J[(m, n)]` for each `n`: net probability leaving `n`.
    pub fn net_outflow(&self) -> Vec<f64> {
        self.matrix.column_iter().map(|c| c.sum()).collect()
    }
}

/// Column-stochastic `S[(m, n)] = P(m | n)` supported on the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    matrix: RMatrix,
    graph: DirectedGraph,
}

impl StochasticMatrix {
    /// Accepts a nonnegative matrix whose columns sum to 1 (within 1e-9) and
    /// which vanishes (to 1e-12) off the edge set.
    pub fn new(matrix: RMatrix, graph: DirectedGraph) -> Result<Self> {
        check_square(&matrix, &graph)?;
        let n = graph.vertex_count();
        for from in 0..n {
            let col = matrix.column(from);
            if let Some(v) = col.iter().find(|v| **v < -ZERO_TOL) {
                return Err(Error::Normalization {
                    what: "stochastic matrix".into(),
                    detail: format!("negative entry {v} in column {from}"),
                });
            }
            let total = col.sum();
            if (total - 1.0).abs() > DEFAULT_TOL {
                return Err(Error::Normalization {
                    what: "stochastic matrix".into(),
                    detail: format!("column {from} sums to {total}"),
                });
            }
            for to in 0..n {
                if col[to].abs() > ZERO_TOL && !graph.has_edge(from, to) {
                    return Err(Error::EdgeViolation {
                        from,
                        to,
                        magnitude: col[to].abs(),
                    });
                }
            }
        }
        Ok(Self { matrix, graph })
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.matrix
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    /// `P'_m = sum_n S[(m, n)] P_n`.
    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        let n = self.graph.vertex_count();
        if p.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: p.len(),
            });
        }
        Ok((0..n)
            .map(|m| (0..n).map(|k| self.matrix[(m, k)] * p[k]).sum())
            .collect())
    }
}

fn check_square(matrix: &RMatrix, graph: &DirectedGraph) -> Result<()> {
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
    Ok(())
}

fn check_len(v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: v.len(),
        });
    }
    Ok(())
}

/// `J = f - f^T`, antisymmetric by construction with a zero diagonal.
pub fn current_from_flow(f: &FlowMatrix) -> CurrentMatrix {
    let n = f.vertex_count();
    let m = f.matrix();
    let mut j = RMatrix::zeros(n, n);
    for a in 0..n {
        for b in (a + 1)..n {
            let net = m[(a, b)] - m[(b, a)];
            j[(a, b)] = net;
            j[(b, a)] = -net;
        }
    }
    CurrentMatrix {
        matrix: j,
        graph: f.graph().clone(),
    }
}

/// Checks a current against `P`, `P'` and the graph. The positive set
/// `m*` for the flux bound at `n` is `{m : J[(m, n)] > tol}`.
pub fn verify_current(
    current: &CurrentMatrix,
    p: &[f64],
    p_prime: &[f64],
    graph: &DirectedGraph,
    tol: f64,
) -> Result<Report> {
    let n = graph.vertex_count();
    check_square(current.matrix(), graph)?;
    check_len(p, n)?;
    check_len(p_prime, n)?;
    let j = current.matrix();

    let mut antisymmetry = 0.0f64;
    let mut support = 0.0f64;
    for to in 0..n {
        for from in 0..n {
            antisymmetry = antisymmetry.max((j[(to, from)] + j[(from, to)]).abs());
            if !graph.has_edge(from, to) {
                support = support.max(j[(to, from)].max(0.0));
            }
        }
    }
    let outflow = current.net_outflow();
    let continuity = (0..n)
        .map(|v| (p_prime[v] - p[v] + outflow[v]).abs())
        .fold(0.0, f64::max);
    let flux = (0..n)
        .map(|from| {
            let out: f64 = j.column(from).iter().filter(|&&x| x > tol).sum();
            (out - p[from]).max(0.0)
        })
        .fold(0.0, f64::max);

    let mut report = Report::default();
    report.push("antisymmetry", antisymmetry, tol);
    report.push("edge_support", support, tol);
    report.push("continuity", continuity, tol);
    report.push("flux_bound", flux, tol);
    Ok(report)
}

/// Builds a flow from a current:
/// `f[(m, n)] = J[(m, n)]` where `J[(m, n)] > 0` and `m != n`,
/// `f[(n, n)] = P_n - sum_{m*} J[(m*, n)]`, zero elsewhere.
///
/// Entries of `J` at or below 1e-12 count as zero. Fails with
/// [`Error::Infeasible`] when the flux bound is violated by more than 1e-9 at
/// some vertex (small violations are clamped), and with
/// [`Error::EdgeViolation`] when a positive entry has no matching edge.
pub fn flow_from_current(current: &CurrentMatrix, p: &[f64], graph: &DirectedGraph) -> Result<FlowMatrix> {
    let n = graph.vertex_count();
    check_square(current.matrix(), graph)?;
    check_len(p, n)?;
    let j = current.matrix();
    let mut f = RMatrix::zeros(n, n);
    for from in 0..n {
        let mut out = 0.0;
        for to in 0..n {
            let x = j[(to, from)];
            if to == from || x <= ZERO_TOL {
                continue;
            }
            if !graph.has_edge(from, to) {
                return Err(Error::EdgeViolation {
                    from,
                    to,
                    magnitude: x,
                });
            }
            f[(to, from)] = x;
            out += x;
        }
        let stay = p[from] - out;
        if stay < -DEFAULT_TOL {
            return Err(Error::Infeasible(format!(
                "current moves {out} out of vertex {from}, which only holds {}",
                p[from]
            )));
        }
        f[(from, from)] = stay.max(0.0);
    }
    FlowMatrix::new(f, graph.clone())
}

/// `P(m | n) = f[(m, n)] / P_n`, with a delta column when `P_n <= 1e-12`.
///
/// The divisor is the column sum of `f`, which equals `P_n` for any flow that
/// satisfies Flow3; using it keeps every column exactly stochastic even when
/// the flow's column sums carry solver rounding.
pub fn stochastic_from_flow(f: &FlowMatrix, p: &[f64]) -> Result<StochasticMatrix> {
    let n = f.vertex_count();
    check_len(p, n)?;
    let m = f.matrix();
    let mut s = RMatrix::zeros(n, n);
    for from in 0..n {
        let col_sum: f64 = m.column(from).iter().map(|x| x.max(0.0)).sum();
        if p[from] <= ZERO_TOL || col_sum <= ZERO_TOL {
            s[(from, from)] = 1.0;
            continue;
        }
        for to in 0..n {
            s[(to, from)] = m[(to, from)].max(0.0) / col_sum;
        }
    }
    Ok(StochasticMatrix {
        matrix: s,
        graph: f.graph().clone(),
    })
}

/// `f[(m, n)] = P(m | n) P_n`.
pub fn flow_from_stochastic(s: &StochasticMatrix, p: &[f64]) -> Result<FlowMatrix> {
    let n = s.graph.vertex_count();
    check_len(p, n)?;
    let f = RMatrix::from_fn(n, n, |to, from| s.matrix[(to, from)] * p[from]);
    FlowMatrix::new(f, s.graph.clone())
}

/// Checks a stochastic matrix: nonnegativity, unit column sums, edge support,
/// and that it maps `P` to `P'`.
pub fn verify_stochastic(
    s: &StochasticMatrix,
    p: &[f64],
    p_prime: &[f64],
    graph: &DirectedGraph,
    tol: f64,
) -> Result<Report> {
    let n = graph.vertex_count();
    check_square(s.matrix(), graph)?;
    check_len(p_prime, n)?;
    let m = s.matrix();
    let negativity = m.iter().map(|&x| (-x).max(0.0)).fold(0.0, f64::max);
    let columns = m
        .column_iter()
        .map(|c| (c.sum() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut support = 0.0f64;
    for to in 0..n {
        for from in 0..n {
            if !graph.has_edge(from, to) {
                support = support.max(m[(to, from)].abs());
            }
        }
    }
    let image = s.apply(p)?;
    let reproduce = image
        .iter()
        .zip(p_prime)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let mut report = Report::default();
    report.push("nonnegative", negativity, tol);
    report.push("column_stochastic", columns, tol);
    report.push("edge_support", support, tol);
    report.push("reproduces_final", reproduce, tol);
    Ok(report)
}
