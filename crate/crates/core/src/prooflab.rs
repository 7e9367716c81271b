//! Exhaustive checks of why the flow network always carries one unit.
//!
//! Every minimal cut of the three-layer network is described by two vertex
//! sets: `A`, the vertices whose source arcs are kept, and `B`, the vertices
//! whose sink arcs are kept. Such a cut must also remove every middle arc from
//! `A` to `B`, so its value is
//!
//! ```text
//! sum_{n not in A} P_n + sum_{m not in B} P'_m + sum_{n in A, m in B} C_mn
//! ```
//!
//! and the max flow is at least one iff
//! `sum_A P_n + sum_B P'_m <= 1 + sum_{A x B} C_mn` for all `A, B`. When no
//! edge crosses from `A` to `B`, the left side is `<psi|Pi_A + Pi_B|psi>` for
//! orthogonal projectors `Pi_A = sum_A |n><n|` and `Pi_B = sum_B U^dag|m><m|U`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::linalg::{hermiticity_defect, idempotency_defect, CMatrix};
use crate::quantum::{PureState, WalkOperator};
use crate::DEFAULT_TOL;

/// Default vertex cap for [`min_cut_brute`] (`4^N` cuts).
pub const MIN_CUT_CAP: usize = 12;

/// Default vertex cap for [`projector_sweep`].
pub const PROJECTOR_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CutSpec {
    /// Vertices whose source arc is kept.
    pub a: Vec<usize>,
    /// Vertices whose sink arc is kept.
    pub b: Vec<usize>,
}

impl CutSpec {
    pub fn new(mut a: Vec<usize>, mut b: Vec<usize>) -> Self {
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        Self { a, b }
    }

    fn from_masks(a: u64, b: u64, n: usize) -> Self {
        Self {
            a: (0..n).filter(|&i| a >> i & 1 == 1).collect(),
            b: (0..n).filter(|&i| b >> i & 1 == 1).collect(),
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        for &v in self.a.iter().chain(&self.b) {
            if v >= n {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    vertex_count: n,
                });
            }
        }
        Ok(())
    }
}

pub fn cut_value(spec: &CutSpec, net: &FlowNetwork) -> Result<f64> {
    let n = net.vertex_count();
    spec.check(n)?;
    let mut in_a = vec![false; n];
    let mut in_b = vec![false; n];
    spec.a.iter().for_each(|&v| in_a[v] = true);
    spec.b.iter().for_each(|&v| in_b[v] = true);

    let p = net.initial();
    let pp = net.final_probabilities();
    let c = net.capacities();
    let mut value = 0.0;
    for v in 0..n {
        if !in_a[v] {
            value += p[v];
        }
        if !in_b[v] {
            value += pp[v];
        }
    }
    for &from in &spec.a {
        for &to in &spec.b {
            value += c[(to, from)];
        }
    }
    Ok(value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinCut {
    pub value: f64,
    pub spec: CutSpec,
}

#[derive(Debug, Clone, PartialEq)]
struct Sweep {
    min: MinCut,
    /// max over cuts of `sum_A P + sum_B P' - 1 - sum_{A x B} C`
    max_excess: f64,
    cuts: u64,
}

fn sweep(net: &FlowNetwork, cap: usize) -> Result<Sweep> {
    let n = net.vertex_count();
    if n > cap || n > 31 {
        return Err(Error::TooLarge {
            vertices: n,
            cap: cap.min(31),
        });
    }
    let p = net.initial();
    let pp = net.final_probabilities();
    let c = net.capacities();
    let total_pp: f64 = pp.iter().sum();
    let subsets = 1u64 << n;

    // partial[b] = sum_{m in b} d[m], built from the lowest set bit
    let mut partial = vec![0.0f64; subsets as usize];
    let mut weight = vec![0.0f64; n];
    let mut best = MinCut {
        value: f64::INFINITY,
        spec: CutSpec::default(),
    };
    let mut best_masks = (0u64, 0u64);
    let mut max_excess = f64::NEG_INFINITY;

    for a in 0..subsets {
        let mut kept_p = 0.0;
        let mut cut_p = 0.0;
        for (v, &pv) in p.iter().enumerate() {
            if a >> v & 1 == 1 {
                kept_p += pv;
            } else {
                cut_p += pv;
            }
        }
        for (m, w) in weight.iter_mut().enumerate() {
            *w = (0..n).filter(|&k| a >> k & 1 == 1).map(|k| c[(m, k)]).sum();
        }
        // keeping sink arc m swaps P'_m in the cut for the A -> m capacities
        for b in 1..subsets {
            let low = b.trailing_zeros() as usize;
            partial[b as usize] = partial[(b & (b - 1)) as usize] + weight[low] - pp[low];
        }
        for b in 0..subsets {
            let d = partial[b as usize];
            let value = cut_p + total_pp + d;
            if value < best.value {
                best.value = value;
                best_masks = (a, b);
            }
            // sum_A P + sum_B P' - 1 - sum C = kept_p - d - 1
            max_excess = max_excess.max(kept_p - d - 1.0);
        }
    }
    best.spec = CutSpec::from_masks(best_masks.0, best_masks.1, n);
    Ok(Sweep {
        min: best,
        max_excess,
        cuts: subsets * subsets,
    })
}

/// Minimum over all `(A, B)` cuts, for networks with at most
/// [`MIN_CUT_CAP`] vertices per layer.
pub fn min_cut_brute(net: &FlowNetwork) -> Result<MinCut> {
    min_cut_brute_capped(net, MIN_CUT_CAP)
}

pub fn min_cut_brute_capped(net: &FlowNetwork, cap: usize) -> Result<MinCut> {
    Ok(sweep(net, cap)?.min)
}

/// Largest excess `sum_A P + sum_B P' - (1 + sum_{A x B} C_mn)` over all
/// `(A, B)`; nonpositive exactly when every cut has value at least one.
pub fn cut_inequality_excess(net: &FlowNetwork, cap: usize) -> Result<f64> {
    Ok(sweep(net, cap)?.max_excess)
}

/// Number of `(A, B)` pairs enumerated for an `n`-vertex network.
pub fn cut_count(n: usize) -> u64 {
    1u64 << (2 * n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorBound {
    /// `<psi|Pi_A + Pi_B|psi>`.
    pub lhs: f64,
    /// `Pi_A + Pi_B` is Hermitian and idempotent to within 1e-9.
    pub is_projector: bool,
    pub idempotency_defect: f64,
    pub hermiticity_defect: f64,
    /// `max |(Pi_A Pi_B)_ij|`.
    pub cross_term: f64,
}

/// Evaluates the projector form of the cut inequality for a cut with no
/// edge from `A` to `B`.
pub fn projector_bound(psi: &PureState, op: &WalkOperator, spec: &CutSpec) -> Result<ProjectorBound> {
    let n = op.dim();
    if psi.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: psi.dim(),
        });
    }
    spec.check(n)?;
    for &from in &spec.a {
        for &to in &spec.b {
            if op.graph().has_edge(from, to) {
                return Err(Error::InvalidCut { from, to });
            }
        }
    }

    let one = Complex64::new(1.0, 0.0);
    let mut pi_a = CMatrix::zeros(n, n);
    for &v in &spec.a {
        pi_a[(v, v)] = one;
    }
    let mut keep_b = CMatrix::zeros(n, n);
    for &v in &spec.b {
        keep_b[(v, v)] = one;
    }
    let u = op.matrix();
    let pi_b = u.adjoint() * keep_b * u;
    let total = &pi_a + &pi_b;

    let amps = psi.amplitudes();
    let lhs = (amps.adjoint() * &total * amps)[(0, 0)].re;
    let idempotency = idempotency_defect(&total);
    let hermiticity = hermiticity_defect(&total);
    let cross_term = (&pi_a * &pi_b).iter().map(|x| x.norm()).fold(0.0, f64::max);
    Ok(ProjectorBound {
        lhs,
        is_projector: idempotency <= DEFAULT_TOL && hermiticity <= DEFAULT_TOL,
        idempotency_defect: idempotency,
        hermiticity_defect: hermiticity,
        cross_term,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorSweep {
    pub cuts_checked: u64,
    pub max_lhs: f64,
    pub max_idempotency_defect: f64,
    pub max_hermiticity_defect: f64,
    pub max_cross_term: f64,
    pub all_projectors: bool,
}

/// Runs [`projector_bound`] on every `(A, B)` with no edge from `A` to `B`.
pub fn projector_sweep(psi: &PureState, op: &WalkOperator, cap: usize) -> Result<ProjectorSweep> {
    let n = op.dim();
    if n > cap || n > 31 {
        return Err(Error::TooLarge {
            vertices: n,
            cap: cap.min(31),
        });
    }
    let successors: Vec<u64> = (0..n)
        .map(|v| op.graph().successors(v).iter().fold(0u64, |m, &w| m | 1 << w))
        .collect();
    let full = (1u64 << n) - 1;
    let mut out = ProjectorSweep {
        cuts_checked: 0,
        max_lhs: f64::NEG_INFINITY,
        max_idempotency_defect: 0.0,
        max_hermiticity_defect: 0.0,
        max_cross_term: 0.0,
        all_projectors: true,
    };
    for a in 0..=full {
        let reach = (0..n)
            .filter(|&v| a >> v & 1 == 1)
            .fold(0u64, |m, v| m | successors[v]);
        let allowed = full & !reach;
        // every submask of `allowed`, including the empty set
        let mut b = allowed;
        loop {
            let bound = projector_bound(psi, op, &CutSpec::from_masks(a, b, n))?;
            out.cuts_checked += 1;
            out.max_lhs = out.max_lhs.max(bound.lhs);
            out.max_idempotency_defect = out.max_idempotency_defect.max(bound.idempotency_defect);
            out.max_hermiticity_defect = out.max_hermiticity_defect.max(bound.hermiticity_defect);
            out.max_cross_term = out.max_cross_term.max(bound.cross_term);
            out.all_projectors &= bound.is_projector;
            if b == 0 {
                break;
            }
            b = (b - 1) & allowed;
        }
    }
    Ok(out)
}
