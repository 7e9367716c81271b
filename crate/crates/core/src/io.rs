//! JSON file formats.
//!
//! * graph: `{"vertices": N, "edges": [[from, to], ...]}`; self-loops may be
//!   omitted and are added on load.
//! * complex matrix: `{"rows": R, "cols": C, "data": [[re, im], ...]}`,
//!   row-major. A state vector is a matrix with `cols = 1` (or `cols`
//!   omitted); a density matrix has `rows = cols`.
//! * operator: a complex matrix (unitary) or `{"kraus": [matrix, ...]}`.
//! * real matrix: array of rows, `[[f00, f01, ...], [f10, ...], ...]`.
//! * expansion map: `{"base_vertex_count": N, "internal_dims": [...], "offsets": [...]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::linalg::{CMatrix, CVector, RMatrix};
use crate::quantum::{DensityState, PureState, QuantumChannel, QuantumState, WalkOperator};
use crate::certify::Evolution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphFile {
    pub fn from_graph(g: &DirectedGraph) -> Self {
        Self {
            vertices: g.vertex_count(),
            edges: g.edges().map(|(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<DirectedGraph> {
        DirectedGraph::new(self.vertices, self.edges.iter().map(|e| (e[0], e[1])))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrixFile {
    pub rows: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub data: Vec<[f64; 2]>,
}

impl ComplexMatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let z = m[(r, c)];
                data.push([z.re, z.im]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: Some(m.ncols()),
            data,
        }
    }

    pub fn from_vector(v: &CVector) -> Self {
        Self::from_matrix(&CMatrix::from_column_slice(v.len(), 1, v.as_slice()))
    }

    pub fn cols(&self) -> usize {
        self.cols.unwrap_or(1)
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let cols = self.cols();
        if self.data.len() != self.rows * cols {
            return Err(Error::Format(format!(
                "{}x{} matrix needs {} entries, found {}",
                self.rows,
                cols,
                self.rows * cols,
                self.data.len()
            )));
        }
        let entries: Vec<Complex64> = self.data.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        Ok(CMatrix::from_row_slice(self.rows, cols, &entries))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorFile {
    Kraus { kraus: Vec<ComplexMatrixFile> },
    Unitary(ComplexMatrixFile),
}

impl OperatorFile {
    /// Validates the operator against `graph`.
    pub fn to_evolution(&self, graph: &DirectedGraph) -> Result<Evolution> {
        match self {
            OperatorFile::Unitary(m) => Ok(Evolution::Unitary(WalkOperator::validate(
                m.to_matrix()?,
                graph.clone(),
            )?)),
            OperatorFile::Kraus { kraus } => {
                let ops = kraus.iter().map(|k| k.to_matrix()).collect::<Result<Vec<_>>>()?;
                Ok(Evolution::Channel(QuantumChannel::new(ops, graph.clone())?))
            }
        }
    }

    pub fn from_evolution(evolution: &Evolution) -> Self {
        match evolution {
            Evolution::Unitary(op) => OperatorFile::Unitary(ComplexMatrixFile::from_matrix(op.matrix())),
            Evolution::Channel(ch) => OperatorFile::Kraus {
                kraus: ch.kraus().iter().map(ComplexMatrixFile::from_matrix).collect(),
            },
        }
    }
}

pub fn state_from_file(file: &ComplexMatrixFile) -> Result<QuantumState> {
    let m = file.to_matrix()?;
    if m.ncols() == 1 {
        Ok(QuantumState::Pure(PureState::new(m.column(0).into_owned())?))
    } else if m.ncols() == m.nrows() {
        Ok(QuantumState::Mixed(DensityState::new(m)?))
    } else {
        Err(Error::Format(format!(
            "state must be a column vector or a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

pub fn state_to_file(state: &QuantumState) -> ComplexMatrixFile {
    match state {
        QuantumState::Pure(psi) => ComplexMatrixFile::from_vector(psi.amplitudes()),
        QuantumState::Mixed(rho) => ComplexMatrixFile::from_matrix(rho.matrix()),
    }
}

pub fn real_matrix_to_rows(m: &RMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn real_matrix_from_rows(rows: &[Vec<f64>]) -> Result<RMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::Format(format!(
            "ragged matrix: row of length {} in a {ncols}-column matrix",
            bad.len()
        )));
    }
    Ok(RMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

/// Parses JSON text into `T`, mapping failures to [`Error::Format`].
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn parse_graph(text: &str) -> Result<DirectedGraph> {
    parse::<GraphFile>(text)?.to_graph()
}
