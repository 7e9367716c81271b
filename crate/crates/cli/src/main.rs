//! `qwalk`: certify local probability flows for quantum-walk steps.
//!
//! Exit status: 0 success, 1 verification failure, 2 input or usage error.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qwalk_flow::certify::{Evolution, Simulation};
use qwalk_flow::current::{current_from_flow, verify_current};
use qwalk_flow::flow::{build_flow_network, capacity_mode, max_flow, verify_flow};
use qwalk_flow::io::{
    parse, parse_graph, real_matrix_from_rows, real_matrix_to_rows, state_from_file, state_to_file,
    ComplexMatrixFile, GraphFile, OperatorFile,
};
use qwalk_flow::prooflab::{
    cut_inequality_excess, cut_count, min_cut_brute_capped, projector_sweep, ProjectorSweep, MIN_CUT_CAP,
    PROJECTOR_CAP,
};
use qwalk_flow::{
    CapacityMode, CertifyOptions, DirectedGraph, FlowMatrix, Objective, QuantumState, Report, Solver,
    StepCertificate, DEFAULT_TOL,
};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "qwalk", version, about = "Local probability flows for discrete-time quantum walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a supplied flow matrix against one step of the walk.
    Verify {
        #[command(flatten)]
        inputs: Inputs,
        /// Flow matrix as a JSON array of rows, `f[m][n]` = probability moved n -> m.
        #[arg(long)]
        flow: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Construct and certify a flow for one step.
    Flow {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Run several steps, certifying each one.
    Simulate {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Expand every vertex into an internal register of the given size.
    Expand {
        #[arg(long)]
        graph: String,
        /// Internal dimension per vertex, comma separated.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        dims: Vec<usize>,
        /// Destination of the expanded graph.
        #[arg(long, default_value = "-")]
        out: String,
        /// Destination of the index map; omitted means not written.
        #[arg(long)]
        map_out: Option<String>,
    },
    /// Brute-force the cut inequalities behind the max-flow argument.
    Prooflab {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum, default_value_t = CapacityArg::Unit)]
        capacity: CapacityArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Largest vertex count for the exhaustive min-cut sweep.
        #[arg(long, default_value_t = MIN_CUT_CAP)]
        max_cut_n: usize,
        /// Largest vertex count for the projector sweep.
        #[arg(long, default_value_t = PROJECTOR_CAP)]
        max_projector_n: usize,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Args, Debug)]
struct Inputs {
    #[arg(long)]
    graph: String,
    /// Unitary matrix or `{"kraus": [...]}`.
    #[arg(long)]
    operator: String,
    /// State vector (`cols` 1) or density matrix.
    #[arg(long)]
    state: String,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = SolverArg::Maxflow)]
    solver: SolverArg,
    #[arg(long, value_enum, default_value_t = CapacityArg::Unit)]
    capacity: CapacityArg,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::MaxStationary)]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SolverArg {
    Maxflow,
    Lp,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CapacityArg {
    Unit,
    Amplitude,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ObjectiveArg {
    MaxStationary,
    None,
}

impl From<CapacityArg> for CapacityMode {
    fn from(c: CapacityArg) -> Self {
        match c {
            CapacityArg::Unit => CapacityMode::Unit,
            CapacityArg::Amplitude => CapacityMode::Amplitude,
        }
    }
}

impl SolveArgs {
    fn options(&self) -> anyhow::Result<CertifyOptions> {
        check_tol(self.tol)?;
        Ok(CertifyOptions {
            solver: match self.solver {
                SolverArg::Maxflow => Solver::MaxFlow,
                SolverArg::Lp => Solver::Lp,
            },
            capacity: self.capacity.into(),
            objective: match self.objective {
                ObjectiveArg::MaxStationary => Objective::MaxStationary,
                ObjectiveArg::None => Objective::None,
            },
            tol: self.tol,
        })
    }
}

/// Outcome of a command that ran to completion on valid input.
enum Status {
    Ok,
    Failed,
}

fn check_tol(tol: f64) -> anyhow::Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        bail!("--tol must be positive, got {tol}");
    }
    Ok(())
}

fn read_input(path: &str) -> anyhow::Result<String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).context("reading stdin")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn write_output(path: &str, value: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    if path == "-" {
        std::io::stdout().write_all(text.as_bytes())?;
    } else {
        fs::write(Path::new(path), text).with_context(|| format!("writing {path}"))?;
    }
    Ok(())
}

struct Loaded {
    graph: DirectedGraph,
    evolution: Evolution,
    state: QuantumState,
}

fn load(inputs: &Inputs) -> anyhow::Result<Loaded> {
    let stdin_uses = [&inputs.graph, &inputs.operator, &inputs.state]
        .iter()
        .filter(|p| p.as_str() == "-")
        .count();
    if stdin_uses > 1 {
        bail!("at most one input may be read from stdin");
    }
    let graph = parse_graph(&read_input(&inputs.graph)?).context("graph file")?;
    let evolution = parse::<OperatorFile>(&read_input(&inputs.operator)?)
        .and_then(|op| op.to_evolution(&graph))
        .context("operator file")?;
    let state = parse::<ComplexMatrixFile>(&read_input(&inputs.state)?)
        .and_then(|s| state_from_file(&s))
        .context("state file")?;
    if state.dim() != graph.vertex_count() {
        bail!(
            "state has dimension {} but the graph has {} vertices",
            state.dim(),
            graph.vertex_count()
        );
    }
    Ok(Loaded {
        graph,
        evolution,
        state,
    })
}

fn reports_json(flow: &Report, current: &Report, stochastic: Option<&Report>) -> Value {
    let mut out = json!({ "flow": flow, "current": current });
    if let Some(s) = stochastic {
        out["stochastic"] = json!(s);
    }
    out
}

fn certificate_json(step: Option<usize>, cert: &StepCertificate) -> Value {
    let mut out = json!({
        "P": cert.p,
        "P_prime": cert.p_prime,
        "max_flow_value": cert.max_flow_value,
        "f": real_matrix_to_rows(cert.flow.matrix()),
        "J": real_matrix_to_rows(cert.current.matrix()),
        "S": real_matrix_to_rows(cert.stochastic.matrix()),
        "reports": reports_json(&cert.flow_report, &cert.current_report, Some(&cert.stochastic_report)),
        "passed": cert.passed(),
    });
    if let Some(t) = step {
        out["step"] = json!(t);
    }
    out
}

fn is_infeasible(err: &qwalk_flow::Error) -> bool {
    matches!(err, qwalk_flow::Error::Infeasible(_))
}

fn cmd_verify(inputs: &Inputs, flow_path: &str, tol: f64, out: &str) -> anyhow::Result<Status> {
    check_tol(tol)?;
    let loaded = load(inputs)?;
    let rows: Vec<Vec<f64>> = parse(&read_input(flow_path)?).context("flow file")?;
    let matrix = real_matrix_from_rows(&rows).context("flow file")?;
    let flow = FlowMatrix::new(matrix, loaded.graph.clone()).context("flow file")?;

    let p = loaded.state.probabilities();
    let p_prime = loaded.evolution.apply(&loaded.state)?.probabilities();
    let flow_report = verify_flow(&flow, &p, &p_prime, &loaded.graph, tol)?;
    let current_report = verify_current(&current_from_flow(&flow), &p, &p_prime, &loaded.graph, tol)?;
    let passed = flow_report.passed() && current_report.passed();
    write_output(
        out,
        &json!({
            "P": p,
            "P_prime": p_prime,
            "reports": reports_json(&flow_report, &current_report, None),
            "passed": passed,
        }),
    )?;
    Ok(if passed { Status::Ok } else { Status::Failed })
}

fn cmd_flow(inputs: &Inputs, solve: &SolveArgs, out: &str) -> anyhow::Result<Status> {
    let opts = solve.options()?;
    let loaded = load(inputs)?;
    let mut sim = Simulation::new(loaded.evolution, loaded.state, opts)?;
    match sim.step() {
        Ok(cert) => {
            write_output(out, &certificate_json(None, &cert))?;
            Ok(if cert.passed() { Status::Ok } else { Status::Failed })
        }
        Err(e) if is_infeasible(&e) => {
            write_output(out, &json!({ "passed": false, "error": e.to_string() }))?;
            eprintln!("qwalk: {e}");
            Ok(Status::Failed)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_simulate(inputs: &Inputs, solve: &SolveArgs, steps: usize, out: &str) -> anyhow::Result<Status> {
    let opts = solve.options()?;
    if steps == 0 {
        bail!("--steps must be at least 1");
    }
    let loaded = load(inputs)?;
    let mut sim = Simulation::new(loaded.evolution, loaded.state, opts)?;
    let mut records = Vec::with_capacity(steps);
    let mut failure = None;
    for t in 0..steps {
        match sim.step() {
            Ok(cert) => {
                let passed = cert.passed();
                records.push(certificate_json(Some(t), &cert));
                if !passed {
                    failure = Some((t, "verification failed".to_string()));
                    break;
                }
            }
            Err(e) if is_infeasible(&e) => {
                failure = Some((t, e.to_string()));
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let mut report = json!({
        "steps": records,
        "passed": failure.is_none(),
        "final_state": state_to_file(sim.state()),
    });
    if let Some((t, reason)) = &failure {
        report["failed_step"] = json!(t);
        report["error"] = json!(reason);
        eprintln!("qwalk: step {t}: {reason}");
    }
    write_output(out, &report)?;
    Ok(if failure.is_none() { Status::Ok } else { Status::Failed })
}

fn cmd_expand(graph: &str, dims: &[usize], out: &str, map_out: Option<&str>) -> anyhow::Result<Status> {
    let base = parse_graph(&read_input(graph)?).context("graph file")?;
    if dims.len() != base.vertex_count() {
        bail!(
            "--dims has {} entries but the graph has {} vertices",
            dims.len(),
            base.vertex_count()
        );
    }
    let (expanded, map) = base.expand_internal(dims)?;
    write_output(out, &GraphFile::from_graph(&expanded))?;
    if let Some(path) = map_out {
        write_output(path, &map)?;
    }
    Ok(Status::Ok)
}

fn cmd_prooflab(
    inputs: &Inputs,
    capacity: CapacityArg,
    tol: f64,
    max_cut_n: usize,
    max_projector_n: usize,
    out: &str,
) -> anyhow::Result<Status> {
    check_tol(tol)?;
    let loaded = load(inputs)?;
    let n = loaded.graph.vertex_count();
    if n > max_cut_n {
        bail!("{n} vertices exceed --max-cut-n {max_cut_n}");
    }
    let p = loaded.state.probabilities();
    let p_prime = loaded.evolution.apply(&loaded.state)?.probabilities();
    let mut net = build_flow_network(&p, &p_prime, &loaded.graph)?;
    if let CapacityArg::Amplitude = capacity {
        let op = loaded
            .evolution
            .operator()
            .ok_or_else(|| anyhow!("amplitude capacities need a unitary operator"))?;
        net = capacity_mode(&net, CapacityMode::Amplitude, Some(op))?;
    }
    let flow_value = max_flow(&net).value;
    let cut = min_cut_brute_capped(&net, max_cut_n)?;
    let excess = cut_inequality_excess(&net, max_cut_n)?;
    let crosscheck = (cut.value - flow_value).abs() <= tol;
    let inequality_holds = excess <= tol;

    // the projector form needs a pure state and a unitary step
    let sweep: Option<ProjectorSweep> = match (&loaded.state, loaded.evolution.operator()) {
        (QuantumState::Pure(psi), Some(op)) if n <= max_projector_n => {
            Some(projector_sweep(psi, op, max_projector_n)?)
        }
        _ => None,
    };
    let projector_ok = sweep.as_ref().is_none_or(|s| {
        s.max_idempotency_defect <= tol && s.max_hermiticity_defect <= tol && s.max_lhs <= 1.0 + tol
    });
    let passed = crosscheck && inequality_holds && projector_ok;
    write_output(
        out,
        &json!({
            "cuts_checked": cut_count(n),
            "min_cut": cut.value,
            "argmin_A": cut.spec.a,
            "argmin_B": cut.spec.b,
            "max_flow": flow_value,
            "maxflow_crosscheck": crosscheck,
            "max_cut_excess": excess,
            "cut_inequality_holds": inequality_holds,
            "projector_sweep": sweep,
            "passed": passed,
        }),
    )?;
    Ok(if passed { Status::Ok } else { Status::Failed })
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    match cli.command {
        Command::Verify {
            inputs,
            flow,
            tol,
            out,
        } => cmd_verify(&inputs, &flow, tol, &out),
        Command::Flow { inputs, solve, out } => cmd_flow(&inputs, &solve, &out),
        Command::Simulate {
            inputs,
            solve,
            steps,
            out,
        } => cmd_simulate(&inputs, &solve, steps, &out),
        Command::Expand {
            graph,
            dims,
            out,
            map_out,
        } => cmd_expand(&graph, &dims, &out, map_out.as_deref()),
        Command::Prooflab {
            inputs,
            capacity,
            tol,
            max_cut_n,
            max_projector_n,
            out,
        } => cmd_prooflab(&inputs, capacity, tol, max_cut_n, max_projector_n, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qwalk: {e:#}");
            ExitCode::from(2)
        }
    }
}
