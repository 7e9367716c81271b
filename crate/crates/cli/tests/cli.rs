use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use num_complex::Complex64;
use qwalk_flow::io::{ComplexMatrixFile, GraphFile, OperatorFile};
use qwalk_flow::quantum::{coined_line_walk, hadamard, ShiftRule};
use qwalk_flow::{CMatrix, CVector, DirectedGraph};
use serde_json::Value;
use tempfile::TempDir;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk")).args(args).output().unwrap()
}

fn qwalk_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_out(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn write(&self, name: &str, value: &impl serde::Serialize) -> String {
        self.write_raw(name, &serde_json::to_string(value).unwrap())
    }

    fn write_raw(&self, name: &str, text: &str) -> String {
        let path = self.path(name);
        std::fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_string()
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    /// Writes graph, operator and state files; returns their paths.
    fn problem(&self, graph: &DirectedGraph, op: &CMatrix, state: &[Complex64]) -> [String; 3] {
        [
            self.write("graph.json", &GraphFile::from_graph(graph)),
            self.write("op.json", &OperatorFile::Unitary(ComplexMatrixFile::from_matrix(op))),
            self.write("state.json", &ComplexMatrixFile::from_vector(&CVector::from_column_slice(state))),
        ]
    }
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    serde_json::from_value(v.clone()).unwrap()
}

fn vector(v: &Value) -> Vec<f64> {
    serde_json::from_value(v.clone()).unwrap()
}

fn check_named<'a>(report: &'a Value, name: &str) -> &'a Value {
    report
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["condition"] == name)
        .unwrap_or_else(|| panic!("no check named {name} in {report}"))
}

fn three_cycle_shift() -> CMatrix {
    let mut u = CMatrix::zeros(3, 3);
    u[(1, 0)] = c(1.0, 0.0);
    u[(2, 1)] = c(1.0, 0.0);
    u[(0, 2)] = c(1.0, 0.0);
    u
}

#[test]
fn verify_accepts_identity_flow() {
    let ws = Workspace::new();
    let g = DirectedGraph::new(2, []).unwrap();
    let [graph, op, state] = ws.problem(&g, &CMatrix::identity(2, 2), &[c(0.6, 0.0), c(0.0, 0.8)]);
    let flow = ws.write("flow.json", &vec![vec![0.36, 0.0], vec![0.0, 0.64]]);
    let out = qwalk(&["verify", "--graph", &graph, "--operator", &op, "--state", &state, "--flow", &flow]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_out(&out);
    assert_eq!(report["passed"], true);
    assert_eq!(report["reports"]["flow"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_reports_negative_flow() {
    let ws = Workspace::new();
    let g = DirectedGraph::complete(2).unwrap();
    let [graph, op, state] = ws.problem(&g, &CMatrix::identity(2, 2), &[c(1.0, 0.0), c(0.0, 0.0)]);
    // column sums (1, 0) and row sums (1, 0), but with a negative entry
    let flow = ws.write("flow.json", &vec![vec![1.1, 0.0], vec![-0.1, 0.0]]);
    let out = qwalk(&["verify", "--graph", &graph, "--operator", &op, "--state", &state, "--flow", &flow]);
    assert_eq!(code(&out), 1);
    let report = json_out(&out);
    assert_eq!(report["passed"], false);
    let flow1 = check_named(&report["reports"]["flow"], "Flow1");
    assert_eq!(flow1["pass"], false);
    assert!((flow1["max_violation"].as_f64().unwrap() - 0.1).abs() < 1e-15);
    assert_eq!(check_named(&report["reports"]["flow"], "Flow3")["pass"], true);
}

#[test]
fn malformed_input_exits_two() {
    let ws = Workspace::new();
    let g = DirectedGraph::new(2, []).unwrap();
    let [_, op, state] = ws.problem(&g, &CMatrix::identity(2, 2), &[c(1.0, 0.0), c(0.0, 0.0)]);
    let bad = ws.write_raw("bad.json", "{\"vertices\": 2, \"edges\": [");
    let flow = ws.write("flow.json", &vec![vec![1.0, 0.0], vec![0.0, 0.0]]);
    let out = qwalk(&["verify", "--graph", &bad, "--operator", &op, "--state", &state, "--flow", &flow]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("graph file"));

    let missing = ws.path("absent.json");
    let out = qwalk(&["flow", "--graph", missing.to_str().unwrap(), "--operator", &op, "--state", &state]);
    assert_eq!(code(&out), 2);
    let out = qwalk(&["flow", "--bogus"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn flow_from_stdin() {
    let ws = Workspace::new();
    let g = DirectedGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    let [_, op, state] = ws.problem(&g, &three_cycle_shift(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let graph_text = serde_json::to_string(&GraphFile::from_graph(&g)).unwrap();
    let out = qwalk_stdin(&["flow", "--graph", "-", "--operator", &op, "--state", &state], &graph_text);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let cert = json_out(&out);
    assert_eq!(matrix(&cert["f"])[1][0], 1.0);
    assert_eq!(cert["max_flow_value"], 1.0);

    let out = qwalk(&["flow", "--graph", "-", "--operator", "-", "--state", &state]);
    assert_eq!(code(&out), 2);
}

#[test]
fn simulate_identity_has_diagonal_flows_and_no_current() {
    let ws = Workspace::new();
    let g = DirectedGraph::complete(3).unwrap();
    let amps = [c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)];
    let [graph, op, state] = ws.problem(&g, &CMatrix::identity(3, 3), &amps);
    for solver in ["maxflow", "lp"] {
        let out = qwalk(&[
            "simulate", "--graph", &graph, "--operator", &op, "--state", &state, "--steps", "5", "--solver", solver,
        ]);
        assert_eq!(code(&out), 0);
        let run = json_out(&out);
        let steps = run["steps"].as_array().unwrap();
        assert_eq!(steps.len(), 5);
        for rec in steps {
            let p = vector(&rec["P"]);
            let f = matrix(&rec["f"]);
            let j = matrix(&rec["J"]);
            for m in 0..3 {
                for n in 0..3 {
                    let expected = if m == n { p[n] } else { 0.0 };
                    assert!((f[m][n] - expected).abs() < 1e-12, "{solver}: f = {f:?}");
                    assert_eq!(j[m][n], 0.0);
                }
            }
        }
    }
}

#[test]
fn simulate_three_cycle_returns_to_start() {
    let ws = Workspace::new();
    let g = DirectedGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    let [graph, op, state] = ws.problem(&g, &three_cycle_shift(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let out_path = ws.path("run.json");
    let out = qwalk(&[
        "simulate", "--graph", &graph, "--operator", &op, "--state", &state, "--steps", "3", "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let run: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let steps = run["steps"].as_array().unwrap();
    for (t, rec) in steps.iter().enumerate() {
        let f = matrix(&rec["f"]);
        // all probability sits on vertex t and moves along t -> t+1
        assert_eq!(f[(t + 1) % 3][t], 1.0);
        assert_eq!(f.iter().flatten().sum::<f64>(), 1.0);
    }
    assert_eq!(vector(&steps[2]["P_prime"]), vec![1.0, 0.0, 0.0]);
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.nrows() * b.nrows(), a.ncols() * b.ncols(), |r, col| {
        a[(r / b.nrows(), col / b.ncols())] * b[(r % b.nrows(), col % b.ncols())]
    })
}

#[test]
fn simulate_hadamard_walk_matches_dense_oracle() {
    let sites = 16;
    let (op, _) = coined_line_walk(sites, &hadamard(), ShiftRule::Cyclic).unwrap();
    let ws = Workspace::new();
    let mut amps = vec![c(0.0, 0.0); 2 * sites];
    amps[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[1] = c(0.0, std::f64::consts::FRAC_1_SQRT_2);
    let [graph, op_path, state] = ws.problem(op.graph(), op.matrix(), &amps);
    let out = qwalk(&[
        "simulate", "--graph", &graph, "--operator", &op_path, "--state", &state, "--steps", "50",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let run = json_out(&out);
    assert_eq!(run["passed"], true);

    // dense oracle: shift (left on coin 0, right on coin 1) times I (x) H
    let one = c(1.0, 0.0);
    let left = CMatrix::from_fn(sites, sites, |r, k| if r == (k + sites - 1) % sites { one } else { c(0.0, 0.0) });
    let right = CMatrix::from_fn(sites, sites, |r, k| if r == (k + 1) % sites { one } else { c(0.0, 0.0) });
    let mut up = CMatrix::zeros(2, 2);
    up[(0, 0)] = one;
    let mut down = CMatrix::zeros(2, 2);
    down[(1, 1)] = one;
    let dense = (kron(&left, &up) + kron(&right, &down)) * kron(&CMatrix::identity(sites, sites), &hadamard());
    let mut psi = CVector::from_column_slice(&amps);

    for rec in run["steps"].as_array().unwrap() {
        let p = vector(&rec["P"]);
        let next = &dense * &psi;
        let p_prime = vector(&rec["P_prime"]);
        for k in 0..2 * sites {
            assert!((p[k] - psi[k].norm_sqr()).abs() < 1e-12);
            assert!((p_prime[k] - next[k].norm_sqr()).abs() < 1e-12);
        }
        let j = matrix(&rec["J"]);
        for n in 0..2 * sites {
            let net: f64 = (0..2 * sites).map(|m| j[m][n]).sum();
            assert!((p_prime[n] - p[n] + net).abs() < 1e-9);
        }
        psi = next;
    }
}

#[test]
fn solvers_agree_on_pass_fail() {
    let ws = Workspace::new();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
    let [graph, op, state] = ws.problem(&DirectedGraph::complete(2).unwrap(), &u, &[c(1.0, 0.0), c(0.0, 0.0)]);
    let mut outcomes = Vec::new();
    for solver in ["maxflow", "lp"] {
        let out = qwalk(&[
            "simulate", "--graph", &graph, "--operator", &op, "--state", &state, "--steps", "4", "--solver", solver,
        ]);
        outcomes.push((code(&out), json_out(&out)["passed"].clone()));
    }
    assert_eq!(outcomes[0], outcomes[1]);
    assert_eq!(outcomes[0].0, 0);
}

#[test]
fn nonlocal_operator_exits_two_before_stepping() {
    let ws = Workspace::new();
    let g = DirectedGraph::new(3, [(0, 1), (1, 2)]).unwrap();
    let [graph, op, state] = ws.problem(&g, &three_cycle_shift(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let out = qwalk(&["simulate", "--graph", &graph, "--operator", &op, "--state", &state, "--steps", "2"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("operator"));
}

#[test]
fn usage_errors_exit_two() {
    let ws = Workspace::new();
    let g = DirectedGraph::complete(2).unwrap();
    let [graph, op, state] = ws.problem(&g, &CMatrix::identity(2, 2), &[c(1.0, 0.0), c(0.0, 0.0)]);
    let base = ["simulate", "--graph", &graph, "--operator", &op, "--state", &state];
    for extra in [
        &["--steps", "0"][..],
        &["--tol", "-1"],
        &["--solver", "simplex"],
        &["--solver", "lp", "--capacity", "amplitude"],
    ] {
        let args: Vec<&str> = base.iter().copied().chain(extra.iter().copied()).collect();
        assert_eq!(code(&qwalk(&args)), 2, "{extra:?}");
    }
}

#[test]
fn kraus_channel_simulation() {
    let ws = Workspace::new();
    let g = DirectedGraph::complete(2).unwrap();
    let s = 0.5f64.sqrt();
    let k0 = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
    let k1 = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)]);
    let graph = ws.write("graph.json", &GraphFile::from_graph(&g));
    let op = ws.write(
        "op.json",
        &OperatorFile::Kraus {
            kraus: vec![ComplexMatrixFile::from_matrix(&k0), ComplexMatrixFile::from_matrix(&k1)],
        },
    );
    let state = ws.write("state.json", &ComplexMatrixFile::from_vector(&CVector::from_column_slice(&[c(1.0, 0.0), c(0.0, 0.0)])));
    let out = qwalk(&["simulate", "--graph", &graph, "--operator", &op, "--state", &state, "--steps", "3"]);
    assert_eq!(code(&out), 0);
    let run = json_out(&out);
    for x in vector(&run["steps"][0]["P_prime"]) {
        assert!((x - 0.5).abs() < 1e-15);
    }
    assert_eq!(run["final_state"]["cols"], 2);

    let amp = qwalk(&[
        "simulate", "--graph", &graph, "--operator", &op, "--state", &state, "--capacity", "amplitude",
    ]);
    assert_eq!(code(&amp), 2);
}

fn expand(ws: &Workspace, graph: &str, dims: &str) -> (Output, PathBuf) {
    let map = ws.path("map.json");
    let out = qwalk(&["expand", "--graph", graph, "--dims", dims, "--map-out", map.to_str().unwrap()]);
    (out, map)
}

#[test]
fn expand_two_vertex_line() {
    let ws = Workspace::new();
    let graph = ws.write("line.json", &GraphFile::from_graph(&DirectedGraph::new(2, [(0, 1), (1, 0)]).unwrap()));
    let (out, map_path) = expand(&ws, &graph, "2,2");
    assert_eq!(code(&out), 0);
    let expanded: GraphFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(expanded.vertices, 4);
    // every internal state of a vertex reaches every internal state of itself and its neighbour
    assert_eq!(expanded.edges.len(), 16);
    let map: Value = serde_json::from_str(&std::fs::read_to_string(map_path).unwrap()).unwrap();
    assert_eq!(map["internal_dims"], serde_json::json!([2, 2]));
    assert_eq!(map["offsets"], serde_json::json!([0, 2]));

    let path = DirectedGraph::new(3, [(0, 1)]).unwrap();
    let graph = ws.write("path.json", &GraphFile::from_graph(&path));
    let (out, _) = expand(&ws, &graph, "1,2,1");
    let expanded: GraphFile = serde_json::from_slice(&out.stdout).unwrap();
    let g = expanded.to_graph().unwrap();
    assert!(g.has_edge(0, 1) && g.has_edge(0, 2) && !g.has_edge(1, 0) && !g.has_edge(2, 3));
}

#[test]
fn expand_with_unit_dims_is_identity() {
    let ws = Workspace::new();
    let original = GraphFile::from_graph(&DirectedGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap());
    let graph = ws.write("g.json", &original);
    let (out, _) = expand(&ws, &graph, "1,1,1");
    assert_eq!(code(&out), 0);
    let expanded: GraphFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(expanded, original);
}

#[test]
fn expand_with_missing_dims_exits_two() {
    let ws = Workspace::new();
    let graph = ws.write("g.json", &GraphFile::from_graph(&DirectedGraph::complete(3).unwrap()));
    let (out, map) = expand(&ws, &graph, "2,2");
    assert_eq!(code(&out), 2);
    assert!(!Path::new(&map).exists());
    let (out, _) = expand(&ws, &graph, "2,0,2");
    assert_eq!(code(&out), 2);
}

#[test]
fn prooflab_reports_min_cut_and_projectors() {
    let ws = Workspace::new();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u = CMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]);
    let [graph, op, state] = ws.problem(&DirectedGraph::complete(2).unwrap(), &u, &[c(0.6, 0.0), c(0.0, 0.8)]);
    let out = qwalk(&["prooflab", "--graph", &graph, "--operator", &op, "--state", &state]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let lab = json_out(&out);
    assert!((lab["min_cut"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(lab["maxflow_crosscheck"], true);
    assert_eq!(lab["cut_inequality_holds"], true);
    assert_eq!(lab["cuts_checked"], 16);
    assert_eq!(lab["projector_sweep"]["all_projectors"], true);

    let out = qwalk(&["prooflab", "--graph", &graph, "--operator", &op, "--state", &state, "--max-cut-n", "1"]);
    assert_eq!(code(&out), 2);
    let out = qwalk(&[
        "prooflab", "--graph", &graph, "--operator", &op, "--state", &state, "--max-projector-n", "1",
    ]);
    assert_eq!(code(&out), 0);
    assert!(json_out(&out)["projector_sweep"].is_null());
}

#[test]
fn simulate_aborts_at_first_failing_step() {
    let sites = 4;
    let (op, _) = coined_line_walk(sites, &hadamard(), ShiftRule::Cyclic).unwrap();
    let ws = Workspace::new();
    let mut amps = vec![c(0.0, 0.0); 2 * sites];
    amps[0] = c(0.6, 0.0);
    amps[3] = c(0.0, 0.8);
    let [graph, op_path, state] = ws.problem(op.graph(), op.matrix(), &amps);
    // rounding in P' alone exceeds a tolerance this small
    let out = qwalk(&[
        "simulate", "--graph", &graph, "--operator", &op_path, "--state", &state, "--steps", "10", "--tol", "1e-300",
    ]);
    assert_eq!(code(&out), 1);
    let run = json_out(&out);
    assert_eq!(run["passed"], false);
    let failed = run["failed_step"].as_u64().unwrap() as usize;
    let steps = run["steps"].as_array().unwrap();
    assert_eq!(steps.len(), failed + 1);
    assert_eq!(steps[failed]["passed"], false);
}
