//! Cross-checks against independent computations: exhaustive enumeration of
//! LP vertices, dense Kronecker-product walk matrices, and LP feasibility.

use nalgebra::DMatrix;
use num_complex::Complex64;
use qwalk_flow::flow::{build_flow_network, extract_flow_matrix, max_flow, solve_flow_lp, verify_flow, Objective};
use qwalk_flow::graph::DirectedGraph;
use qwalk_flow::linalg::{max_abs_diff, CMatrix, RMatrix};
use qwalk_flow::prooflab::{cut_inequality_excess, min_cut_brute, MIN_CUT_CAP};
use qwalk_flow::quantum::{coined_line_walk, hadamard, PureState, ShiftRule};
use qwalk_flow::testkit::random_instance;
use qwalk_flow::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn k_subsets(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        if idx[i] == i + n - k {
            return;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Best stationary probability over all basic feasible solutions of
/// `{f >= 0 : column sums = P, first N-1 row sums = P'}`.
fn vertex_enumeration_optimum(g: &DirectedGraph, p: &[f64], pp: &[f64]) -> f64 {
    let n = g.vertex_count();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let rows = 2 * n - 1;
    let a: DMatrix<f64> = DMatrix::from_fn(rows, edges.len(), |r, j| {
        let (from, to) = edges[j];
        if (r < n && from == r) || (r >= n && to == r - n) {
            1.0
        } else {
            0.0
        }
    });
    let b = nalgebra::DVector::from_iterator(rows, p.iter().chain(&pp[..n - 1]).copied());
    let rank = a.rank(1e-9);
    assert_eq!(rank, rows, "test graphs are connected");

    let mut best = f64::NEG_INFINITY;
    let mut vertices = 0;
    k_subsets(edges.len(), rank, |cols| {
        let basis = DMatrix::from_fn(rows, rank, |r, c| a[(r, cols[c])]);
        let lu = basis.clone().lu();
        if basis.determinant().abs() < 1e-9 {
            return;
        }
        let Some(x) = lu.solve(&b) else { return };
        if x.iter().any(|&v| v < -1e-12) {
            return;
        }
        vertices += 1;
        let value: f64 = cols
            .iter()
            .zip(x.iter())
            .filter(|(&j, _)| edges[j].0 == edges[j].1)
            .map(|(_, v)| v)
            .sum();
        best = best.max(value);
    });
    assert!(vertices > 0);
    best
}

#[test]
fn k_subsets_counts() {
    let mut count = 0;
    k_subsets(6, 3, |_| count += 1);
    assert_eq!(count, 20);
    let mut all = Vec::new();
    k_subsets(3, 2, |s| all.push(s.to_vec()));
    assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
}

#[test]
fn lp_optimum_matches_vertex_enumeration() {
    // feasible instances on the 6-cycle: random flows define (P, P')
    let g = DirectedGraph::cycle(6).unwrap();
    let edges: Vec<_> = g.edges().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..4 {
        let mut f = RMatrix::zeros(6, 6);
        for &(from, to) in &edges {
            if rng.random_bool(0.7) {
                f[(to, from)] = rng.random::<f64>();
            }
        }
        f /= f.sum();
        let p: Vec<f64> = f.column_iter().map(|c| c.sum()).collect();
        let pp: Vec<f64> = f.row_iter().map(|r| r.sum()).collect();

        let expected = vertex_enumeration_optimum(&g, &p, &pp);
        let lp = solve_flow_lp(&p, &pp, &g, Objective::MaxStationary).unwrap();
        assert!(verify_flow(&lp, &p, &pp, &g, 1e-9).unwrap().passed());
        assert!(
            (lp.stationary() - expected).abs() < 1e-9,
            "simplex {} vs enumeration {expected}",
            lp.stationary()
        );
    }
}

#[test]
fn max_flow_value_matches_lp_feasibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut infeasible = 0;
    for trial in 0..200 {
        let n = 5;
        let (g, p, pp) = if trial % 2 == 0 {
            // from a graph-local step: always feasible
            let inst = random_instance(&mut rng, n, 0.2);
            (inst.operator.graph().clone(), inst.p(), inst.p_prime())
        } else {
            // arbitrary distributions on a sparse random graph
            let edges: Vec<_> = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|_| rng.random_bool(0.15))
                .collect();
            let g = DirectedGraph::new(n, edges).unwrap();
            let mut draw = || {
                let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect::<Vec<_>>()
            };
            (g, draw(), draw())
        };
        let net = build_flow_network(&p, &pp, &g).unwrap();
        let mf = max_flow(&net);
        let lp = solve_flow_lp(&p, &pp, &g, Objective::None);
        let flow_ok = mf.value >= 1.0 - 1e-9;
        assert_eq!(flow_ok, lp.is_ok(), "trial {trial}: max flow {} vs LP {lp:?}", mf.value);
        if !flow_ok {
            infeasible += 1;
            assert!(matches!(extract_flow_matrix(&net, &mf), Err(Error::Infeasible(_))));
            assert!(matches!(lp, Err(Error::Infeasible(_))));
        }
        // the brute-force min cut agrees either way
        let cut = min_cut_brute(&net).unwrap();
        assert!((cut.value - mf.value).abs() < 1e-9);
        if trial % 2 == 0 {
            assert!(cut_inequality_excess(&net, MIN_CUT_CAP).unwrap() <= 1e-9);
        }
    }
    assert!(infeasible > 0, "sparse trials should include infeasible pairs");
}

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.nrows() * b.nrows(), a.ncols() * b.ncols(), |r, c| {
        a[(r / b.nrows(), c / b.ncols())] * b[(r % b.nrows(), c % b.ncols())]
    })
}

/// `S (I ⊗ H)` built from Kronecker products of shift matrices and coin projectors.
fn dense_hadamard_walk(l: usize) -> CMatrix {
    let one = Complex64::new(1.0, 0.0);
    let left = CMatrix::from_fn(l, l, |r, c| if r == (c + l - 1) % l { one } else { Complex64::default() });
    let right = CMatrix::from_fn(l, l, |r, c| if r == (c + 1) % l { one } else { Complex64::default() });
    let mut up = CMatrix::zeros(2, 2);
    up[(0, 0)] = one;
    let mut down = CMatrix::zeros(2, 2);
    down[(1, 1)] = one;
    let shift = kron(&left, &up) + kron(&right, &down);
    shift * kron(&CMatrix::identity(l, l), &hadamard())
}

#[test]
fn coined_walk_matches_dense_kronecker_oracle() {
    for l in [2, 3, 4, 16] {
        let (op, _) = coined_line_walk(l, &hadamard(), ShiftRule::Cyclic).unwrap();
        assert!(max_abs_diff(op.matrix(), &dense_hadamard_walk(l)) < 1e-15, "L = {l}");
    }
}

#[test]
fn coined_walk_two_steps_on_sixteen_cycle() {
    let dense = dense_hadamard_walk(16);
    let (op, map) = coined_line_walk(16, &hadamard(), ShiftRule::Cyclic).unwrap();
    let start = PureState::basis(32, map.index(0, 0).unwrap()).unwrap();

    let psi = op.step(&op.step(&start).unwrap()).unwrap();
    let via_walk = map.aggregate_probability(&psi.probabilities()).unwrap();

    let two = &dense * &dense;
    let amps = two.column(map.index(0, 0).unwrap());
    let dense_p: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let via_dense = map.aggregate_probability(&dense_p).unwrap();

    // frozen from the dense oracle: 1/4 at sites 14 and 2, 1/2 at site 0
    let mut frozen = [0.0; 16];
    frozen[14] = 0.25;
    frozen[0] = 0.5;
    frozen[2] = 0.25;
    for site in 0..16 {
        assert!((via_dense[site] - frozen[site]).abs() < 1e-15);
        assert!((via_walk[site] - frozen[site]).abs() < 1e-15);
    }
}
