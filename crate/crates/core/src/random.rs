//! Random states and unitaries for oracle suites and property tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::measures::XState;
use crate::state::{BellDiagonalParams, DensityMatrix};

fn gaussian_c<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Full-rank state from the Hilbert–Schmidt (Ginibre) ensemble.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian_c(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::from_raw(m.map(|v| v / tr)).expect("dimension is 2 or 4")
}

/// Product of two independent random single-qubit states.
pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R) -> (DensityMatrix, DensityMatrix, DensityMatrix) {
    let a = random_state(rng, 2);
    let b = random_state(rng, 2);
    let ab = a.tensor(&b).expect("qubits");
    (a, b, ab)
}

/// Haar-random 2×2 unitary.
pub fn random_unitary2<R: Rng + ?Sized>(rng: &mut R) -> DMatrix<Complex64> {
    let mut q = [0.0f64; 4];
    for v in q.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [a, b, c, d] = q.map(|v| v / n);
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let u = DMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(a, b), Complex64::new(c, d), Complex64::new(-c, d), Complex64::new(a, -b)],
    );
    u.map(|v| v * phase)
}

fn simplex_weights<R: Rng + ?Sized, const N: usize>(rng: &mut R) -> [f64; N] {
    let mut w = [0.0; N];
    for v in w.iter_mut() {
        *v = -(1.0 - rng.random::<f64>()).ln();
    }
    let s: f64 = w.iter().sum();
    w.map(|v| v / s)
}

/// Bell-diagonal parameters drawn uniformly from the tetrahedron of valid states.
pub fn random_bell_diagonal<R: Rng + ?Sized>(rng: &mut R) -> BellDiagonalParams {
    let [psi_m, phi_m, phi_p, psi_p] = simplex_weights::<R, 4>(rng);
    let m1 = phi_p + psi_p - phi_m - psi_m;
    let m2 = phi_m + psi_p - phi_p - psi_m;
    let m3 = phi_p + phi_m - psi_p - psi_m;
    BellDiagonalParams::new(m1.clamp(-1.0, 1.0), m2.clamp(-1.0, 1.0), m3.clamp(-1.0, 1.0))
        .unwrap_or(BellDiagonalParams { m1: 0.0, m2: 0.0, m3: 0.0 })
}

/// X state with diagonal `(a, b, b, d)` and random complex coherences within
/// the positivity bounds.
pub fn random_x_state<R: Rng + ?Sized>(rng: &mut R) -> XState {
    let [a, b2, d] = simplex_weights::<R, 3>(rng);
    let b = 0.5 * b2;
    let z = Complex64::from_polar(
        (a * d).sqrt() * rng.random::<f64>(),
        rng.random_range(0.0..std::f64::consts::TAU),
    );
    let w = Complex64::from_polar(b * rng.random::<f64>(), rng.random_range(0.0..std::f64::consts::TAU));
    XState { a, b, d, z, w }
}
