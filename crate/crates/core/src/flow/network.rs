use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::linalg::RMatrix;
use crate::quantum::WalkOperator;
use crate::{DEFAULT_TOL, ZERO_TOL};

/// How the middle layer of a [`FlowNetwork`] is capacitated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapacityMode {
    /// `C_mn = 1` on edges `n -> m`, 0 elsewhere.
    #[default]
    Unit,
    /// `C_mn = |U_mn|`; any resulting flow also satisfies `f_mn <= |U_mn|`.
    Amplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcKind {
    Source { vertex: usize },
    Transition { from: usize, to: usize },
    Sink { vertex: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowArc {
    pub tail: usize,
    pub head: usize,
    pub capacity: f64,
    pub kind: ArcKind,
}

/// Three-layer network: `source -> left_n` with capacity `P_n`,
/// `left_n -> right_m` with capacity `C_mn`, `right_m -> sink` with capacity
/// `P'_m`. A unit flow through it is a local probability flow.
///
/// Node ids: source `0`, `left_n = 1 + n`, `right_m = 1 + N + m`,
/// sink `2N + 1`. Source and sink arcs are always present (possibly with zero
/// capacity); middle arcs exist only where `C_mn > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowNetwork {
    graph: DirectedGraph,
    initial: Vec<f64>,
    fin: Vec<f64>,
    capacities: RMatrix,
    mode: CapacityMode,
    arcs: Vec<FlowArc>,
}

impl FlowNetwork {
    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn node_count(&self) -> usize {
        2 * self.vertex_count() + 2
    }

    pub fn source(&self) -> usize {
        0
    }

    pub fn sink(&self) -> usize {
        2 * self.vertex_count() + 1
    }

    pub fn left(&self, n: usize) -> usize {
        1 + n
    }

    pub fn right(&self, m: usize) -> usize {
        1 + self.vertex_count() + m
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    /// Source-side capacities `P`.
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// Sink-side capacities `P'`.
    pub fn final_probabilities(&self) -> &[f64] {
        &self.fin
    }

    /// `C[(m, n)]`, the capacity of `left_n -> right_m`.
    pub fn capacities(&self) -> &RMatrix {
        &self.capacities
    }

    pub fn mode(&self) -> CapacityMode {
        self.mode
    }

    pub fn arcs(&self) -> &[FlowArc] {
        &self.arcs
    }

    fn assemble(
        graph: DirectedGraph,
        initial: Vec<f64>,
        fin: Vec<f64>,
        capacities: RMatrix,
        mode: CapacityMode,
    ) -> Self {
        let n = graph.vertex_count();
        let mut arcs = Vec::with_capacity(2 * n + graph.edge_count());
        for (v, &p) in initial.iter().enumerate() {
            arcs.push(FlowArc {
                tail: 0,
                head: 1 + v,
                capacity: p,
                kind: ArcKind::Source { vertex: v },
            });
        }
        for from in 0..n {
            for to in 0..n {
                let capacity = capacities[(to, from)];
                if capacity > 0.0 {
                    arcs.push(FlowArc {
                        tail: 1 + from,
                        head: 1 + n + to,
                        capacity,
                        kind: ArcKind::Transition { from, to },
                    });
                }
            }
        }
        for (v, &p) in fin.iter().enumerate() {
            arcs.push(FlowArc {
                tail: 1 + n + v,
                head: 2 * n + 1,
                capacity: p,
                kind: ArcKind::Sink { vertex: v },
            });
        }
        Self {
            graph,
            initial,
            fin,
            capacities,
            mode,
            arcs,
        }
    }
}

/// Checks that `p` has length `n`, no negative entries, and sums to 1 within 1e-9.
pub(crate) fn check_distribution(what: &str, p: &[f64], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: p.len(),
        });
    }
    if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| **v < -ZERO_TOL || !v.is_finite()) {
        return Err(Error::Normalization {
            what: what.into(),
            detail: format!("entry {i} is {v}"),
        });
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::Normalization {
            what: what.into(),
            detail: format!("entries sum to {total}"),
        });
    }
    Ok(())
}

/// Builds the unit-capacity network for the step `P -> P'` on `graph`.
pub fn build_flow_network(p: &[f64], p_prime: &[f64], graph: &DirectedGraph) -> Result<FlowNetwork> {
    let n = graph.vertex_count();
    check_distribution("initial distribution", p, n)?;
    check_distribution("final distribution", p_prime, n)?;
    let capacities = RMatrix::from_fn(n, n, |to, from| {
        if graph.has_edge(from, to) {
            1.0
        } else {
            0.0
        }
    });
    Ok(FlowNetwork::assemble(
        graph.clone(),
        p.iter().map(|v| v.max(0.0)).collect(),
        p_prime.iter().map(|v| v.max(0.0)).collect(),
        capacities,
        CapacityMode::Unit,
    ))
}

/// Rebuilds the middle layer of `net` under `mode`. Amplitude mode needs the
/// step's unitary, whose support must lie inside the network's graph.
pub fn capacity_mode(
    net: &FlowNetwork,
    mode: CapacityMode,
    operator: Option<&WalkOperator>,
) -> Result<FlowNetwork> {
    let n = net.vertex_count();
    let capacities = match mode {
        CapacityMode::Unit => RMatrix::from_fn(n, n, |to, from| {
            if net.graph.has_edge(from, to) {
                1.0
            } else {
                0.0
            }
        }),
        CapacityMode::Amplitude => {
            let op = operator.ok_or_else(|| {
                Error::InvalidArgument("amplitude capacities need the walk operator".into())
            })?;
            if op.dim() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: op.dim(),
                });
            }
            let u = op.matrix();
            let mut c = RMatrix::zeros(n, n);
            for to in 0..n {
                for from in 0..n {
                    let magnitude = u[(to, from)].norm();
                    if magnitude <= ZERO_TOL {
                        continue;
                    }
                    if !net.graph.has_edge(from, to) {
                        return Err(Error::EdgeViolation {
                            from,
                            to,
                            magnitude,
                        });
                    }
                    c[(to, from)] = magnitude;
                }
            }
            c
        }
    };
    Ok(FlowNetwork::assemble(
        net.graph.clone(),
        net.initial.clone(),
        net.fin.clone(),
        capacities,
        mode,
    ))
}
