//! Discrete-time quantum walks on directed graphs, together with the
//! machinery to certify that each step conserves probability locally.
//!
//! A single step `ψ → Uψ` (or `ρ → Σ K ρ K†`) moves probability from the
//! distribution `P` to `P'`. A *local flow* is a nonnegative matrix `f` with
//! `f[m][n] > 0` only along edges `n → m`, column sums `P` and row sums `P'`.
//! The [`flow`] module builds the layered source/sink network whose unit max
//! flow is such an `f`, and also solves for one by linear programming. The
//! [`current`] module converts flows to antisymmetric currents and column
//! stochastic matrices and back, and [`prooflab`] brute-forces the cut
//! inequalities that make the max flow equal to one.

pub mod certify;
pub mod current;
pub mod error;
pub mod flow;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod prooflab;
pub mod quantum;
pub mod report;
pub mod simplex;
pub mod testkit;

pub use certify::{certify_step, CertifyOptions, Solver, StepCertificate};
pub use current::{CurrentMatrix, StochasticMatrix};
pub use error::{Error, Result};
pub use flow::{CapacityMode, FlowMatrix, FlowNetwork, Objective};
pub use graph::{DirectedGraph, ExpansionMap};
pub use linalg::{CMatrix, CVector, RMatrix};
pub use report::{Check, Report};
pub use quantum::{DensityState, PureState, QuantumChannel, QuantumState, WalkOperator};

/// Default tolerance for normalization, unitarity and flow verification.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Magnitude below which a matrix entry counts as a structural zero.
pub const ZERO_TOL: f64 = 1e-12;
