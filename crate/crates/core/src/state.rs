//! One- and two-qubit density matrices.
//!
//! Basis ordering is `|↑⟩ = |0⟩`, `|↓⟩ = |1⟩` with `σ_z|↑⟩ = +|↑⟩`; two-qubit
//! states use `|AB⟩` in the order `|00⟩, |01⟩, |10⟩, |11⟩`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numeric::shannon_bits;
use crate::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue tolerated before a matrix stops counting as positive.
pub const PSD_TOL: f64 = -1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Pauli matrix `σ_k` with `k = 0` the identity, then x, y, z.
pub fn pauli(k: usize) -> DMatrix<Complex64> {
    let entries = match k {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("pauli index {k} out of range"),
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// Kronecker product of two square matrices.
pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (na, nb) = (a.nrows(), b.nrows());
    DMatrix::from_fn(na * nb, na * nb, |r, c| a[(r / nb, c / nb)] * b[(r % nb, c % nb)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Hermitian, unit-trace, positive semidefinite operator on one or two qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates `m` against the Hermiticity, trace and positivity tolerances.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self::from_raw(m)?;
        let diag = validate_state(&rho);
        if !diag.is_valid() {
            return Err(Error::NotAState(diag.to_string()));
        }
        Ok(rho)
    }

    /// Wraps a square 2×2 or 4×4 matrix without checking the state invariants.
    pub fn from_raw(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || !(m.nrows() == 2 || m.nrows() == 4) {
            return Err(Error::DimensionMismatch { expected: 4, got: m.nrows() });
        }
        Ok(Self { m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { m: DMatrix::identity(dim, dim).map(|v: Complex64| v / dim as f64) }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector of length 2 or 4.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let n = psi.len();
        Self::from_raw(DMatrix::from_fn(n, n, |r, c| psi[r] * psi[c].conj() / norm))
    }

    /// Single-qubit state with Bloch vector `(x, y, z)`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let m = DMatrix::from_fn(2, 2, |i, j| {
            let mut acc = pauli(0)[(i, j)];
            for (k, rk) in r.iter().enumerate() {
                acc += pauli(k + 1)[(i, j)] * *rk;
            }
            acc * 0.5
        });
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.m[(r, c)]
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// Expectation value `Tr(ρ O)`.
    pub fn expect(&self, op: &DMatrix<Complex64>) -> Complex64 {
        (&self.m * op).trace()
    }

    /// Bloch vector of a single-qubit state.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: self.dim() });
        }
        Ok([1, 2, 3].map(|k| self.expect(&pauli(k)).re))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dim() != 2 || other.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: self.dim().max(other.dim()) });
        }
        Self::from_raw(kron(&self.m, &other.m))
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &DMatrix<Complex64>) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: u.nrows() });
        }
        Self::from_raw(u * &self.m * u.adjoint())
    }

    /// Largest modulus among entries off the diagonal and anti-diagonal.
    pub fn off_x_magnitude(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                if r != c && r + c != n - 1 {
                    worst = worst.max(self.m[(r, c)].norm());
                }
            }
        }
        worst
    }
}

/// Eigenvalues of `(M + M†)/2`, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let herm = (m + m.adjoint()).map(|v| v * 0.5);
    let mut ev: Vec<f64> = if herm.nrows() == 2 {
        let a = herm[(0, 0)].re;
        let d = herm[(1, 1)].re;
        let b = herm[(0, 1)].norm();
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        vec![mean - rad, mean + rad]
    } else {
        SymmetricEigen::new(herm).eigenvalues.iter().copied().collect()
    };
    ev.sort_by(f64::total_cmp);
    ev
}

/// Defects of a candidate density matrix against its invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateDiagnostics {
    /// `max |ρ_ij - conj(ρ_ji)|`.
    pub hermiticity_defect: f64,
    /// `|Tr ρ - 1|`.
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn is_valid(&self) -> bool {
        self.hermiticity_defect <= HERMITIAN_TOL
            && self.trace_defect <= TRACE_TOL
            && self.min_eigenvalue >= PSD_TOL
    }
}

impl std::fmt::Display for StateDiagnostics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "hermiticity defect {:.3e}, trace defect {:.3e}, min eigenvalue {:.3e}",
            self.hermiticity_defect, self.trace_defect, self.min_eigenvalue
        )
    }
}

pub fn validate_state(rho: &DensityMatrix) -> StateDiagnostics {
    let m = rho.matrix();
    let n = m.nrows();
    let mut herm = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            herm = herm.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    let tr = m.trace();
    StateDiagnostics {
        hermiticity_defect: herm,
        trace_defect: ((tr.re - 1.0).powi(2) + tr.im * tr.im).sqrt(),
        min_eigenvalue: rho.eigenvalues().first().copied().unwrap_or(f64::NAN),
    }
}

/// Correlation triple `(m1, m2, m3)` of a Bell-diagonal two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellDiagonalParams {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl BellDiagonalParams {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        let p = Self { m1, m2, m3 };
        for (name, v) in [("m1", m1), ("m2", m2), ("m3", m3)] {
            if !v.is_finite() || v.abs() > 1.0 {
                return Err(Error::InvalidState(format!("{name} = {v} outside [-1, 1]")));
            }
        }
        let low = p.bell_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if low < -1e-12 {
            return Err(Error::InvalidState(format!(
                "Bell-basis eigenvalue {low:.3e} is negative for ({m1}, {m2}, {m3})"
            )));
        }
        Ok(p)
    }

    /// The one-parameter family `(1, m, -m)`.
    pub fn frozen_family(m: f64) -> Result<Self> {
        Self::new(1.0, m, -m)
    }

    /// Weights on `|Ψ⁻⟩, |Φ⁻⟩, |Φ⁺⟩, |Ψ⁺⟩`.
    pub fn bell_eigenvalues(&self) -> [f64; 4] {
        let Self { m1, m2, m3 } = *self;
        [
            (1.0 - m1 - m2 - m3) / 4.0,
            (1.0 - m1 + m2 + m3) / 4.0,
            (1.0 + m1 - m2 + m3) / 4.0,
            (1.0 + m1 + m2 - m3) / 4.0,
        ]
    }
}

/// `(I⊗I + Σ m_i σ_i⊗σ_i)/4`, assembled entrywise.
pub fn bell_diagonal_state(p: BellDiagonalParams) -> Result<DensityMatrix> {
    let p = BellDiagonalParams::new(p.m1, p.m2, p.m3)?;
    let mut m = DMatrix::from_element(4, 4, ZERO);
    let re = |v: f64| Complex64::new(v, 0.0);
    m[(0, 0)] = re((1.0 + p.m3) / 4.0);
    m[(3, 3)] = re((1.0 + p.m3) / 4.0);
    m[(1, 1)] = re((1.0 - p.m3) / 4.0);
    m[(2, 2)] = re((1.0 - p.m3) / 4.0);
    m[(0, 3)] = re((p.m1 - p.m2) / 4.0);
    m[(3, 0)] = re((p.m1 - p.m2) / 4.0);
    m[(1, 2)] = re((p.m1 + p.m2) / 4.0);
    m[(2, 1)] = re((p.m1 + p.m2) / 4.0);
    DensityMatrix::from_raw(m)
}

/// `-Tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let diag = validate_state(rho);
    if !diag.is_valid() {
        return Err(Error::NotAState(diag.to_string()));
    }
    Ok(entropy_of_eigenvalues(&rho.eigenvalues()))
}

/// Entropy in bits of a spectrum, clamping roundoff negatives to zero.
pub fn entropy_of_eigenvalues(ev: &[f64]) -> f64 {
    shannon_bits(ev.iter().map(|&p| p.max(0.0))).max(0.0)
}

pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    let m = rho.matrix();
    let reduced = DMatrix::from_fn(2, 2, |r, c| match keep {
        Subsystem::A => m[(2 * r, 2 * c)] + m[(2 * r + 1, 2 * c + 1)],
        Subsystem::B => m[(r, c)] + m[(r + 2, c + 2)],
    });
    DensityMatrix::from_raw(reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn maximally_mixed_from_zero_params() {
        let rho = bell_diagonal_state(BellDiagonalParams::new(0.0, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(rho, DensityMatrix::maximally_mixed(4));
        assert!(close(von_neumann_entropy(&rho).unwrap(), 2.0, 1e-14));
    }

    #[test]
    fn singlet_like_projector() {
        let rho = bell_diagonal_state(BellDiagonalParams::new(1.0, 1.0, -1.0).unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [ZERO, re(s), re(s), ZERO];
        let proj = DensityMatrix::pure(&psi).unwrap();
        assert!((rho.matrix() - proj.matrix()).norm() < 1e-15);
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-12);
    }

    fn re(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn frozen_family_spectrum_and_entropy() {
        let rho = bell_diagonal_state(BellDiagonalParams::frozen_family(0.1).unwrap()).unwrap();
        let ev = rho.eigenvalues();
        let expected = [0.0, 0.0, 0.45, 0.55];
        for (a, b) in ev.iter().zip(expected) {
            assert!(close(*a, b, 1e-14));
        }
        let oracle = -0.45 * 0.45f64.log2() - 0.55 * 0.55f64.log2();
        assert!(close(von_neumann_entropy(&rho).unwrap(), oracle, 1e-12));
        assert!(close(oracle, 0.99277, 1e-5));
    }

    #[test]
    fn invalid_bell_params_rejected() {
        assert!(matches!(BellDiagonalParams::new(1.0, 1.0, 1.0), Err(Error::InvalidState(_))));
        assert!(BellDiagonalParams::new(1.2, 0.0, 0.0).is_err());
    }

    #[test]
    fn bell_marginals_are_maximally_mixed() {
        let rho = bell_diagonal_state(BellDiagonalParams::new(0.3, -0.2, 0.5).unwrap()).unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&rho, keep).unwrap();
            assert!((r.matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_single_qubit() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(matches!(partial_trace(&rho, Subsystem::A), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn partial_trace_against_index_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let rho = random::random_state(&mut rng, 4);
            let m = rho.matrix();
            for keep in [Subsystem::A, Subsystem::B] {
                let got = partial_trace(&rho, keep).unwrap();
                let mut oracle = DMatrix::from_element(2, 2, ZERO);
                for a in 0..2 {
                    for a2 in 0..2 {
                        for b in 0..2 {
                            for b2 in 0..2 {
                                let v = m[(2 * a + b, 2 * a2 + b2)];
                                match keep {
                                    Subsystem::A if b == b2 => oracle[(a, a2)] += v,
                                    Subsystem::B if a == a2 => oracle[(b, b2)] += v,
                                    _ => {}
                                }
                            }
                        }
                    }
                }
                assert!((got.matrix() - oracle).norm() < 1e-14);
                assert!(close(got.trace().re, 1.0, 1e-12));
            }
        }
    }

    #[test]
    fn validate_reports_trace_defect() {
        let m = DMatrix::identity(4, 4).map(|v: Complex64| v * (1.01 / 4.0));
        let rho = DensityMatrix::from_raw(m).unwrap();
        let d = validate_state(&rho);
        assert!(close(d.trace_defect, 0.01, 1e-14));
        assert_eq!(d.hermiticity_defect, 0.0);
        assert!(!d.is_valid());
        assert!(matches!(von_neumann_entropy(&rho), Err(Error::NotAState(_))));
    }

    #[test]
    fn validate_maximally_mixed_is_clean() {
        let d = validate_state(&DensityMatrix::maximally_mixed(4));
        assert_eq!(d.hermiticity_defect, 0.0);
        assert!(d.trace_defect < 1e-16);
        assert!(close(d.min_eigenvalue, 0.25, 1e-15));
    }

    #[test]
    fn bloch_roundtrip() {
        let r = [0.3, -0.4, 0.5];
        let rho = DensityMatrix::from_bloch(r).unwrap();
        let back = rho.bloch().unwrap();
        for k in 0..3 {
            assert!(close(back[k], r[k], 1e-15));
        }
    }
}
