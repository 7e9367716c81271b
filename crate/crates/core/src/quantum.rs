//! Quantum states, graph-local evolutions and single-step dynamics.
//!
//! Matrices are indexed `U[(m, n)] = <m|U|n>`, so column `n` is where the
//! basis state `|n>` goes and a nonzero `U[(m, n)]` requires the edge `n -> m`.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, ExpansionMap};
use crate::linalg::{hermiticity_defect, max_abs_diff, unitarity_defect, CMatrix, CVector};
use crate::{DEFAULT_TOL, ZERO_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("state has no amplitudes".into()));
        }
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::Normalization {
                what: "pure state".into(),
                detail: format!("sum |a_n|^2 = {norm}"),
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_slice(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    /// Basis state `|n>` in dimension `dim`.
    pub fn basis(dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::IndexOutOfRange {
                index: n,
                vertex_count: dim,
            });
        }
        let mut v = CVector::zeros(dim);
        v[n] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `P_n = |<n|psi>|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn to_density(&self) -> DensityState {
        DensityState {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    matrix: CMatrix,
}

impl DensityState {
    /// Accepts a Hermitian, unit-trace, positive semidefinite matrix
    /// (each checked to within 1e-9).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > DEFAULT_TOL {
            return Err(Error::Normalization {
                what: "density matrix".into(),
                detail: format!("not Hermitian, max |rho - rho^dag| = {herm:e}"),
            });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > DEFAULT_TOL || trace.im.abs() > DEFAULT_TOL {
            return Err(Error::Normalization {
                what: "density matrix".into(),
                detail: format!("trace = {trace}"),
            });
        }
        let min_eig = min_eigenvalue(&matrix);
        if min_eig < -DEFAULT_TOL {
            return Err(Error::Normalization {
                what: "density matrix".into(),
                detail: format!("negative eigenvalue {min_eig:e}"),
            });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Diagonal of rho, with rounding-level negatives clamped to zero.
    pub fn probabilities(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|d| d.re.max(0.0)).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.matrix)
    }
}

fn min_eigenvalue(matrix: &CMatrix) -> f64 {
    let hermitian = (matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(hermitian)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityState),
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(s) => s.dim(),
            QuantumState::Mixed(s) => s.dim(),
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        match self {
            QuantumState::Pure(s) => s.probabilities(),
            QuantumState::Mixed(s) => s.probabilities(),
        }
    }
}

/// A unitary whose support respects a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkOperator {
    matrix: CMatrix,
    graph: DirectedGraph,
}

impl WalkOperator {
    /// Checks `U^dag U = I` (to 1e-9) and `|U[(m, n)]| <= 1e-12` for every
    /// missing edge `n -> m`.
    pub fn validate(matrix: CMatrix, graph: DirectedGraph) -> Result<Self> {
        check_shape(&matrix, &graph)?;
        let defect = unitarity_defect(&matrix);
        if defect > DEFAULT_TOL {
            return Err(Error::NotUnitary { defect });
        }
        check_locality(&matrix, &graph)?;
        Ok(Self { matrix, graph })
    }

    /// Uses the support of `matrix` (plus self-loops) as the graph.
    pub fn from_support(matrix: CMatrix) -> Result<Self> {
        let graph = support_graph(std::slice::from_ref(&matrix))?;
        Self::validate(matrix, graph)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `|psi'> = U |psi>`.
    pub fn step(&self, psi: &PureState) -> Result<PureState> {
        if psi.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: psi.dim(),
            });
        }
        Ok(PureState {
            amplitudes: &self.matrix * &psi.amplitudes,
        })
    }

    /// `rho' = U rho U^dag`.
    pub fn step_density(&self, rho: &DensityState) -> Result<DensityState> {
        QuantumChannel::from_unitary(self).step(rho)
    }
}

/// Free-function form of [`WalkOperator::validate`].
pub fn validate_unitary(matrix: CMatrix, graph: &DirectedGraph) -> Result<WalkOperator> {
    WalkOperator::validate(matrix, graph.clone())
}

pub fn step_pure(op: &WalkOperator, psi: &PureState) -> Result<PureState> {
    op.step(psi)
}

pub fn step_channel(channel: &QuantumChannel, rho: &DensityState) -> Result<DensityState> {
    channel.step(rho)
}

/// A trace-preserving Kraus map whose operators all respect a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<CMatrix>,
    graph: DirectedGraph,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>, graph: DirectedGraph) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::InvalidArgument("channel needs at least one Kraus operator".into()));
        };
        let n = first.nrows();
        let mut sum = CMatrix::zeros(n, n);
        for k in &kraus {
            check_shape(k, &graph)?;
            check_locality(k, &graph)?;
            sum += k.adjoint() * k;
        }
        let defect = max_abs_diff(&sum, &CMatrix::identity(n, n));
        if defect > DEFAULT_TOL {
            return Err(Error::NotTracePreserving { defect });
        }
        Ok(Self { kraus, graph })
    }

    pub fn from_unitary(op: &WalkOperator) -> Self {
        Self {
            kraus: vec![op.matrix.clone()],
            graph: op.graph.clone(),
        }
    }

    /// Applies `op` and then dephases with strength `p`: Kraus operators
    /// `sqrt(1-p) U` and `sqrt(p) Z U`, `Z = diag((-1)^n)`.
    pub fn dephased(op: &WalkOperator, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("dephasing strength {p} not in [0, 1]")));
        }
        let n = op.dim();
        let z = CMatrix::from_fn(n, n, |r, c| {
            if r != c {
                Complex64::new(0.0, 0.0)
            } else if r % 2 == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(-1.0, 0.0)
            }
        });
        let keep = op.matrix.map(|x| x * (1.0 - p).sqrt());
        let flip = (&z * &op.matrix).map(|x| x * p.sqrt());
        Self::new(vec![keep, flip], op.graph.clone())
    }

    /// Random-unitary channel: applies `ops[i]` with probability `weights[i]`.
    /// The graph is the union of the operators' graphs.
    pub fn mixed_unitary(ops: &[(f64, WalkOperator)]) -> Result<Self> {
        let Some((_, first)) = ops.first() else {
            return Err(Error::InvalidArgument("mixture needs at least one operator".into()));
        };
        let total: f64 = ops.iter().map(|(w, _)| w).sum();
        if ops.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::Normalization {
                what: "mixture weights".into(),
                detail: format!("weights must be nonnegative and sum to 1, got sum {total}"),
            });
        }
        let dim = first.dim();
        let mut edges = Vec::new();
        for (_, op) in ops {
            if op.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: op.dim(),
                });
            }
            edges.extend(op.graph.edges());
        }
        let graph = DirectedGraph::new(dim, edges)?;
        let kraus = ops
            .iter()
            .map(|(w, op)| op.matrix.map(|x| x * w.sqrt()))
            .collect();
        Self::new(kraus, graph)
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `rho' = sum_i K_i rho K_i^dag`, Hermitian-symmetrized to remove rounding skew.
    pub fn step(&self, rho: &DensityState) -> Result<DensityState> {
        if rho.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: rho.dim(),
            });
        }
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for k in &self.kraus {
            out += k * &rho.matrix * k.adjoint();
        }
        let matrix = (&out + out.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(DensityState { matrix })
    }
}

/// Graph whose edges are the union of the supports of `matrices`, plus self-loops.
pub fn support_graph(matrices: &[CMatrix]) -> Result<DirectedGraph> {
    let Some(first) = matrices.first() else {
        return Err(Error::InvalidArgument("no matrices given".into()));
    };
    let n = first.nrows();
    let mut edges = Vec::new();
    for m in matrices {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: m.nrows().max(m.ncols()),
            });
        }
        for to in 0..n {
            for from in 0..n {
                if m[(to, from)].norm() > ZERO_TOL {
                    edges.push((from, to));
                }
            }
        }
    }
    DirectedGraph::new(n, edges)
}

fn check_shape(matrix: &CMatrix, graph: &DirectedGraph) -> Result<()> {
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

/// First entry (row-major) that is nonzero across a missing edge.
fn check_locality(matrix: &CMatrix, graph: &DirectedGraph) -> Result<()> {
    let n = graph.vertex_count();
    for to in 0..n {
        for from in 0..n {
            let magnitude = matrix[(to, from)].norm();
            if magnitude > ZERO_TOL && !graph.has_edge(from, to) {
                return Err(Error::EdgeViolation {
                    from,
                    to,
                    magnitude,
                });
            }
        }
    }
    Ok(())
}

/// Boundary handling for [`coined_line_walk`]. Only the periodic line is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftRule {
    #[default]
    Cyclic,
}

/// Coined walk on an `positions`-cycle with a two-dimensional coin, as a walk
/// on the expanded graph (each site split into coin states 0 and 1).
///
/// One step is `S (I ⊗ C)`: the coin acts on the internal state, then coin
/// state 0 moves one site left and coin state 1 one site right. Expanded index
/// of `(site, coin)` is `2 * site + coin`.
pub fn coined_line_walk(
    positions: usize,
    coin: &CMatrix,
    shift: ShiftRule,
) -> Result<(WalkOperator, ExpansionMap)> {
    let ShiftRule::Cyclic = shift;
    if positions < 2 {
        return Err(Error::InvalidArgument(format!(
            "coined walk needs at least 2 positions, got {positions}"
        )));
    }
    if coin.nrows() != 2 || coin.ncols() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: coin.nrows().max(coin.ncols()),
        });
    }
    let defect = unitarity_defect(coin);
    if defect > DEFAULT_TOL {
        return Err(Error::NotUnitary { defect });
    }

    let base = DirectedGraph::cycle(positions)?;
    let (graph, map) = base.expand_internal(&vec![2; positions])?;
    let dim = map.expanded_vertex_count();
    let mut u = CMatrix::zeros(dim, dim);
    for site in 0..positions {
        let left = (site + positions - 1) % positions;
        let right = (site + 1) % positions;
        for k in 0..2 {
            let col = map.index(site, k)?;
            u[(map.index(left, 0)?, col)] += coin[(0, k)];
            u[(map.index(right, 1)?, col)] += coin[(1, k)];
        }
    }
    let op = WalkOperator::validate(u, graph)?;
    Ok((op, map))
}

/// `(1/sqrt 2) [[1, 1], [1, -1]]`.
pub fn hadamard() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
        ],
    )
}
