//! One-step certification: given `P`, `P'` and the graph, find a local flow,
//! derive the current and stochastic matrix, and verify all three.

use crate::current::{
    current_from_flow, stochastic_from_flow, verify_current, verify_stochastic, CurrentMatrix,
    StochasticMatrix,
};
use crate::error::{Error, Result};
use crate::flow::{
    build_flow_network, capacity_mode, extract_flow_matrix, max_flow, solve_flow_lp, verify_flow,
    CapacityMode, FlowMatrix, Objective,
};
use crate::graph::DirectedGraph;
use crate::quantum::{QuantumChannel, QuantumState, WalkOperator};
use crate::report::Report;
use crate::DEFAULT_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    #[default]
    MaxFlow,
    Lp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    pub solver: Solver,
    pub capacity: CapacityMode,
    pub objective: Objective,
    pub tol: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            solver: Solver::MaxFlow,
            capacity: CapacityMode::Unit,
            objective: Objective::MaxStationary,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepCertificate {
    pub p: Vec<f64>,
    pub p_prime: Vec<f64>,
    /// Present when the max-flow solver was used.
    pub max_flow_value: Option<f64>,
    pub flow: FlowMatrix,
    pub current: CurrentMatrix,
    pub stochastic: StochasticMatrix,
    pub flow_report: Report,
    pub current_report: Report,
    pub stochastic_report: Report,
}

impl StepCertificate {
    pub fn passed(&self) -> bool {
        self.flow_report.passed() && self.current_report.passed() && self.stochastic_report.passed()
    }
}

/// Finds and verifies a local flow for `P -> P'` on `graph`.
///
/// `operator` is only consulted for amplitude capacities. Returns
/// [`Error::Infeasible`] when no local flow exists; verification failures of a
/// flow that was found are reported in the certificate, not as errors.
pub fn certify_step(
    p: &[f64],
    p_prime: &[f64],
    graph: &DirectedGraph,
    operator: Option<&WalkOperator>,
    opts: &CertifyOptions,
) -> Result<StepCertificate> {
    let (flow, max_flow_value) = match opts.solver {
        Solver::MaxFlow => {
            let mut net = build_flow_network(p, p_prime, graph)?;
            if opts.capacity == CapacityMode::Amplitude {
                net = capacity_mode(&net, CapacityMode::Amplitude, operator)?;
            }
            let mf = max_flow(&net);
            (extract_flow_matrix(&net, &mf)?, Some(mf.value))
        }
        Solver::Lp => {
            if opts.capacity == CapacityMode::Amplitude {
                return Err(Error::InvalidArgument(
                    "amplitude capacities are only supported by the max-flow solver".into(),
                ));
            }
            (solve_flow_lp(p, p_prime, graph, opts.objective)?, None)
        }
    };
    let current = current_from_flow(&flow);
    let stochastic = stochastic_from_flow(&flow, p)?;
    let flow_report = verify_flow(&flow, p, p_prime, graph, opts.tol)?;
    let current_report = verify_current(&current, p, p_prime, graph, opts.tol)?;
    let stochastic_report = verify_stochastic(&stochastic, p, p_prime, graph, opts.tol)?;
    Ok(StepCertificate {
        p: p.to_vec(),
        p_prime: p_prime.to_vec(),
        max_flow_value,
        flow,
        current,
        stochastic,
        flow_report,
        current_report,
        stochastic_report,
    })
}

/// Single-step dynamics: a unitary walk or a Kraus channel.
#[derive(Debug, Clone, PartialEq)]
pub enum Evolution {
    Unitary(WalkOperator),
    Channel(QuantumChannel),
}

impl Evolution {
    pub fn graph(&self) -> &DirectedGraph {
        match self {
            Evolution::Unitary(op) => op.graph(),
            Evolution::Channel(ch) => ch.graph(),
        }
    }

    pub fn dim(&self) -> usize {
        self.graph().vertex_count()
    }

    pub fn operator(&self) -> Option<&WalkOperator> {
        match self {
            Evolution::Unitary(op) => Some(op),
            Evolution::Channel(_) => None,
        }
    }

    pub fn apply(&self, state: &QuantumState) -> Result<QuantumState> {
        match (self, state) {
            (Evolution::Unitary(op), QuantumState::Pure(psi)) => Ok(QuantumState::Pure(op.step(psi)?)),
            (Evolution::Unitary(op), QuantumState::Mixed(rho)) => {
                Ok(QuantumState::Mixed(op.step_density(rho)?))
            }
            (Evolution::Channel(ch), QuantumState::Pure(psi)) => {
                Ok(QuantumState::Mixed(ch.step(&psi.to_density())?))
            }
            (Evolution::Channel(ch), QuantumState::Mixed(rho)) => Ok(QuantumState::Mixed(ch.step(rho)?)),
        }
    }
}

/// Steps a state forward, certifying each step.
#[derive(Debug, Clone)]
pub struct Simulation {
    evolution: Evolution,
    state: QuantumState,
    opts: CertifyOptions,
    steps_taken: usize,
}

impl Simulation {
    pub fn new(evolution: Evolution, state: QuantumState, opts: CertifyOptions) -> Result<Self> {
        if state.dim() != evolution.dim() {
            return Err(Error::Dimension {
                expected: evolution.dim(),
                got: state.dim(),
            });
        }
        if opts.capacity == CapacityMode::Amplitude && evolution.operator().is_none() {
            return Err(Error::InvalidArgument(
                "amplitude capacities need a unitary walk operator".into(),
            ));
        }
        Ok(Self {
            evolution,
            state,
            opts,
            steps_taken: 0,
        })
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Applies one step and certifies it. The state advances even if the
    /// certificate reports a failure.
    pub fn step(&mut self) -> Result<StepCertificate> {
        let next = self.evolution.apply(&self.state)?;
        let p = self.state.probabilities();
        let p_prime = next.probabilities();
        self.state = next;
        self.steps_taken += 1;
        certify_step(
            &p,
            &p_prime,
            self.evolution.graph(),
            self.evolution.operator(),
            &self.opts,
        )
    }
}
