use std::collections::VecDeque;

use super::network::{ArcKind, FlowNetwork};
use super::FlowMatrix;
use crate::error::{Error, Result};
use crate::linalg::RMatrix;
use crate::{DEFAULT_TOL, ZERO_TOL};

/// Residual capacities at or below this are treated as saturated.
pub const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MaxFlow {
    pub value: f64,
    /// Flow on each arc, aligned with [`FlowNetwork::arcs`].
    pub arc_flows: Vec<f64>,
}

/// Shortest-augmenting-path max flow (Edmonds–Karp) on an arc list.
///
/// The number of augmentations is `O(V E)` independent of the capacity values,
/// so real-valued capacities terminate. Returns the flow value and the flow on
/// each input arc.
pub fn edmonds_karp(
    node_count: usize,
    arcs: &[(usize, usize, f64)],
    source: usize,
    sink: usize,
) -> (f64, Vec<f64>) {
    // residual edge 2i is arc i, 2i + 1 its reverse
    let mut head = Vec::with_capacity(2 * arcs.len());
    let mut residual = Vec::with_capacity(2 * arcs.len());
    let mut adjacency = vec![Vec::new(); node_count];
    for (i, &(tail, to, cap)) in arcs.iter().enumerate() {
        head.push(to);
        residual.push(cap.max(0.0));
        head.push(tail);
        residual.push(0.0);
        adjacency[tail].push(2 * i);
        adjacency[to].push(2 * i + 1);
    }

    let mut value = 0.0;
    let mut parent_edge = vec![usize::MAX; node_count];
    loop {
        parent_edge.iter_mut().for_each(|p| *p = usize::MAX);
        let mut queue = VecDeque::from([source]);
        let mut reached = false;
        'bfs: while let Some(v) = queue.pop_front() {
            for &e in &adjacency[v] {
                let w = head[e];
                if w != source && parent_edge[w] == usize::MAX && residual[e] > RESIDUAL_TOL {
                    parent_edge[w] = e;
                    if w == sink {
                        reached = true;
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
        }
        if !reached {
            break;
        }

        let mut bottleneck = f64::INFINITY;
        let mut v = sink;
        while v != source {
            let e = parent_edge[v];
            bottleneck = bottleneck.min(residual[e]);
            v = head[e ^ 1];
        }
        let mut v = sink;
        while v != source {
            let e = parent_edge[v];
            residual[e] -= bottleneck;
            residual[e ^ 1] += bottleneck;
            v = head[e ^ 1];
        }
        value += bottleneck;
    }

    let flows = arcs
        .iter()
        .enumerate()
        .map(|(i, &(_, _, cap))| residual[2 * i + 1].clamp(0.0, cap.max(0.0)))
        .collect();
    (value, flows)
}

/// Maximum source-to-sink flow of `net`.
pub fn max_flow(net: &FlowNetwork) -> MaxFlow {
    let arcs: Vec<_> = net
        .arcs()
        .iter()
        .map(|a| (a.tail, a.head, a.capacity))
        .collect();
    let (value, arc_flows) = edmonds_karp(net.node_count(), &arcs, net.source(), net.sink());
    MaxFlow { value, arc_flows }
}

/// Reads `f[(m, n)]` off the middle arcs `left_n -> right_m`.
///
/// Fails with [`Error::Infeasible`] unless the flow carries a full unit of
/// probability (to within 1e-9); a smaller max flow means no graph-local
/// step can take `P` to `P'`.
pub fn extract_flow_matrix(net: &FlowNetwork, flow: &MaxFlow) -> Result<FlowMatrix> {
    if flow.arc_flows.len() != net.arcs().len() {
        return Err(Error::Dimension {
            expected: net.arcs().len(),
            got: flow.arc_flows.len(),
        });
    }
    if flow.value < 1.0 - DEFAULT_TOL {
        return Err(Error::Infeasible(format!(
            "maximum flow is {} < 1",
            flow.value
        )));
    }
    let n = net.vertex_count();
    let mut f = RMatrix::zeros(n, n);
    for (arc, &amount) in net.arcs().iter().zip(&flow.arc_flows) {
        if let ArcKind::Transition { from, to } = arc.kind {
            f[(to, from)] = if (-ZERO_TOL..0.0).contains(&amount) {
                0.0
            } else {
                amount
            };
        }
    }
    FlowMatrix::new(f, net.graph().clone())
}
