//! Seeded random instances: unitaries, states and the graphs they induce.
//!
//! Graphs are read off the support of a random unitary (plus self-loops)
//! rather than the other way round, so every instance is graph-local by
//! construction.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{CMatrix, CVector};
use crate::quantum::{DensityState, PureState, WalkOperator};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
}

/// Haar-random `n x n` unitary (QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal divided out).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random 2x2 unitary acting on basis states `i` and `j`, identity elsewhere.
fn two_level<R: Rng + ?Sized>(rng: &mut R, n: usize, i: usize, j: usize) -> CMatrix {
    let theta = rng.random_range(0.1..PI / 2.0 - 0.1);
    let (s, c) = theta.sin_cos();
    let (a, b, g) = (phase(rng), phase(rng), phase(rng));
    let mut u = CMatrix::identity(n, n);
    u[(i, i)] = a * c;
    u[(i, j)] = -a * b * s;
    u[(j, i)] = g * s;
    u[(j, j)] = g * b * c;
    u
}

fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut p = CMatrix::zeros(n, n);
    for (from, &to) in perm.iter().enumerate() {
        p[(to, from)] = Complex64::new(1.0, 0.0);
    }
    p
}

/// Random unitary with structured support: a Haar unitary, a permuted
/// product of a few two-level rotations, or a permuted block-diagonal Haar
/// unitary. Permutations make the induced graph directed.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    if n == 1 {
        return CMatrix::from_element(1, 1, phase(rng));
    }
    match rng.random_range(0..3) {
        0 => haar_unitary(rng, n),
        1 => {
            let mut u = CMatrix::from_diagonal(&CVector::from_fn(n, |_, _| phase(rng)));
            for _ in 0..rng.random_range(1..=n) {
                let i = rng.random_range(0..n);
                let mut j = rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                u = two_level(rng, n, i, j) * u;
            }
            if rng.random_bool(0.5) {
                u = permutation(rng, n) * u;
            }
            u
        }
        _ => {
            let mut u = CMatrix::zeros(n, n);
            let mut start = 0;
            while start < n {
                let size = rng.random_range(1..=(n - start).min(3));
                let block = haar_unitary(rng, size);
                u.view_mut((start, start), (size, size)).copy_from(&block);
                start += size;
            }
            permutation(rng, n) * u
        }
    }
}

/// Normalized complex Gaussian state. Each amplitude is zeroed with
/// probability `zero_fraction` (at least one stays nonzero).
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize, zero_fraction: f64) -> PureState {
    let keep = rng.random_range(0..n);
    let mut v = CVector::from_fn(n, |i, _| {
        if i != keep && rng.random_bool(zero_fraction) {
            Complex64::new(0.0, 0.0)
        } else {
            gaussian(rng)
        }
    });
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    PureState::new(v).expect("normalized by construction")
}

/// Random mixed state of the given rank (`rho = A A^dag / tr`).
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> DensityState {
    let a = CMatrix::from_fn(n, rank.max(1), |_, _| gaussian(rng));
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    DensityState::new(rho / tr).expect("positive by construction")
}

/// A graph-local walk and an initial state.
#[derive(Debug, Clone)]
pub struct Instance {
    pub operator: WalkOperator,
    pub state: PureState,
}

impl Instance {
    pub fn p(&self) -> Vec<f64> {
        self.state.probabilities()
    }

    pub fn p_prime(&self) -> Vec<f64> {
        self.operator
            .step(&self.state)
            .expect("dimensions agree")
            .probabilities()
    }
}

/// Random unitary on `n` vertices, graph = its support plus self-loops,
/// and a random state with a fraction `zero_fraction` of vanishing amplitudes.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, zero_fraction: f64) -> Instance {
    let u = random_unitary(rng, n);
    let operator = WalkOperator::from_support(u).expect("random unitary is unitary");
    let state = random_state(rng, n, zero_fraction);
    Instance { operator, state }
}
