//! Mutual information, classical correlations and quantum discord of two
//! qubits, with measurements performed on subsystem B.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numeric::shannon_bits;
use crate::numeric::simplex::{self, SimplexOptions};
use crate::state::{
    entropy_of_eigenvalues, hermitian_eigenvalues, partial_trace, validate_state, DensityMatrix,
    Subsystem,
};
use crate::{Error, Result};

pub const DEFAULT_GRID_N: usize = 64;
/// Off-X entries below this magnitude are treated as zero.
pub const X_SHAPE_TOL: f64 = 1e-12;
/// Outcome probabilities below this contribute nothing to the conditional entropy.
const DEGENERATE_PROB: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTriple {
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
}

impl CorrelationTriple {
    pub fn from_parts(mutual_info: f64, classical: f64) -> Self {
        Self { mutual_info, classical, discord: mutual_info - classical }
    }
}

/// Projective measurement `{|1⟩⟨1|, |2⟩⟨2|}` with
/// `|1⟩ = cos θ|↑⟩ + e^{iφ} sin θ|↓⟩` and `|2⟩ = sin θ|↑⟩ - e^{iφ} cos θ|↓⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    /// Maps any `(θ, φ)` onto the canonical range `θ ∈ [0, π/2]`, `φ ∈ [0, 2π)`
    /// describing the same pair of projectors.
    pub fn canonical(theta: f64, phi: f64) -> Self {
        let mut theta = theta.rem_euclid(std::f64::consts::PI);
        let mut phi = phi;
        if theta > FRAC_PI_2 {
            theta = std::f64::consts::PI - theta;
            phi += std::f64::consts::PI;
        }
        Self { theta, phi: phi.rem_euclid(TAU) }
    }

    pub fn vectors(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = Complex64::from_polar(1.0, self.phi);
        [[Complex64::new(c, 0.0), e * s], [Complex64::new(s, 0.0), -e * c]]
    }
}

/// X-shaped two-qubit state with diagonal `(a, b, b, d)`, corner coherence
/// `z = ρ₁₄` and inner coherence `w = ρ₂₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub a: f64,
    pub b: f64,
    pub d: f64,
    pub z: Complex64,
    pub w: Complex64,
}

impl XState {
    pub fn validate(&self) -> Result<()> {
        let Self { a, b, d, z, w } = *self;
        let tol = 1e-12;
        if a < -tol || b < -tol || d < -tol {
            return Err(Error::NotAState(format!("negative population in ({a}, {b}, {d})")));
        }
        if (a + 2.0 * b + d - 1.0).abs() > tol {
            return Err(Error::NotAState(format!("trace {} ≠ 1", a + 2.0 * b + d)));
        }
        if z.norm_sqr() > a.max(0.0) * d.max(0.0) + 1e-10 || w.norm() > b + 1e-10 {
            return Err(Error::NotAState("coherence exceeds positivity bound".into()));
        }
        Ok(())
    }

    /// Extracts the X-state data when `rho` has that shape and `ρ₂₂ = ρ₃₃`.
    pub fn from_density_matrix(rho: &DensityMatrix) -> Option<Self> {
        if rho.dim() != 4 || rho.off_x_magnitude() >= X_SHAPE_TOL {
            return None;
        }
        let (b2, b3) = (rho.get(1, 1).re, rho.get(2, 2).re);
        if (b2 - b3).abs() >= X_SHAPE_TOL {
            return None;
        }
        Some(Self {
            a: rho.get(0, 0).re,
            b: 0.5 * (b2 + b3),
            d: rho.get(3, 3).re,
            z: rho.get(0, 3),
            w: rho.get(1, 2),
        })
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        self.validate()?;
        let zero = Complex64::new(0.0, 0.0);
        let mut m = DMatrix::from_element(4, 4, zero);
        m[(0, 0)] = self.a.into();
        m[(1, 1)] = self.b.into();
        m[(2, 2)] = self.b.into();
        m[(3, 3)] = self.d.into();
        m[(0, 3)] = self.z;
        m[(3, 0)] = self.z.conj();
        m[(1, 2)] = self.w;
        m[(2, 1)] = self.w.conj();
        DensityMatrix::from_raw(m)
    }

    fn spectrum(&self) -> [f64; 4] {
        let mean = 0.5 * (self.a + self.d);
        let rad = (0.25 * (self.a - self.d).powi(2) + self.z.norm_sqr()).sqrt();
        let wn = self.w.norm();
        [mean + rad, mean - rad, self.b + wn, self.b - wn]
    }
}

/// Both candidate discords of an X state and its mutual information.
///
/// `d_z` corresponds to measuring σ_z on B, `d_xy` to the optimal direction
/// in the equatorial plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XStateTerms {
    pub mutual_info: f64,
    pub d_z: f64,
    pub d_xy: f64,
}

impl XStateTerms {
    pub fn discord(&self) -> f64 {
        self.d_z.min(self.d_xy).max(0.0)
    }

    pub fn classical(&self) -> f64 {
        self.mutual_info - self.discord()
    }

    pub fn triple(&self) -> CorrelationTriple {
        CorrelationTriple::from_parts(self.mutual_info, self.classical())
    }

    /// True when the σ_z measurement is the optimal one.
    pub fn z_branch(&self) -> bool {
        self.d_z < self.d_xy
    }
}

pub fn xstate_terms(x: &XState) -> Result<XStateTerms> {
    x.validate()?;
    let XState { a, b, d, z, w } = *x;
    let s_ab = entropy_of_eigenvalues(&x.spectrum());
    let s_b = shannon_bits([a + b, b + d]);
    let s_a = s_b;
    let cond_z = shannon_bits([a, b, b, d]) - s_b;
    let m = ((a - d).powi(2) + 4.0 * (z.norm() + w.norm()).powi(2)).sqrt().min(1.0);
    let cond_xy = shannon_bits([0.5 * (1.0 + m), 0.5 * (1.0 - m)]);
    Ok(XStateTerms {
        mutual_info: (s_a + s_b - s_ab).max(0.0),
        d_z: s_b - s_ab + cond_z,
        d_xy: s_b - s_ab + cond_xy,
    })
}

/// Analytic discord of an X state: the smaller of the σ_z and equatorial
/// measurement candidates.
pub fn discord_xstate(x: &XState) -> Result<f64> {
    Ok(xstate_terms(x)?.discord())
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    let diag = validate_state(rho);
    if !diag.is_valid() {
        return Err(Error::NotAState(diag.to_string()));
    }
    Ok(())
}

pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let s_a = entropy_of_eigenvalues(&partial_trace(rho, Subsystem::A)?.eigenvalues());
    let s_b = entropy_of_eigenvalues(&partial_trace(rho, Subsystem::B)?.eigenvalues());
    let s_ab = entropy_of_eigenvalues(&rho.eigenvalues());
    Ok((s_a + s_b - s_ab).max(0.0))
}

/// Average entropy of A conditioned on the outcomes of `basis` measured on B.
pub fn conditional_entropy(rho: &DensityMatrix, basis: MeasurementBasis) -> f64 {
    let m = rho.matrix();
    let mut total = 0.0;
    for v in basis.vectors() {
        // ⟨v|_B ρ |v⟩_B, a 2×2 operator on A.
        let sigma = DMatrix::from_fn(2, 2, |a, a2| {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..2 {
                for b2 in 0..2 {
                    acc += v[b].conj() * m[(2 * a + b, 2 * a2 + b2)] * v[b2];
                }
            }
            acc
        });
        let p = sigma.trace().re;
        if p < DEGENERATE_PROB {
            continue;
        }
        let ev = hermitian_eigenvalues(&sigma.map(|x| x / p));
        total += p * entropy_of_eigenvalues(&ev);
    }
    total
}

/// Classical correlations `S(ρ_A) - min Σ_k p_k S(ρ_k)` by exhaustive search
/// over projective measurements on B.
///
/// A `grid_n × grid_n` grid over `(θ, φ)` seeds a Nelder–Mead refinement of
/// the best few grid points when `refine` is set.
pub fn classical_correlations_bruteforce(
    rho: &DensityMatrix,
    grid_n: usize,
    refine: bool,
) -> Result<(f64, MeasurementBasis)> {
    check_two_qubit(rho)?;
    if grid_n < 8 {
        return Err(Error::param("grid_n", format!("{grid_n} < 8")));
    }
    let s_a = entropy_of_eigenvalues(&partial_trace(rho, Subsystem::A)?.eigenvalues());
    let objective = |theta: f64, phi: f64| conditional_entropy(rho, MeasurementBasis { theta, phi });

    let mut samples = Vec::with_capacity(grid_n * grid_n);
    for i in 0..grid_n {
        let theta = FRAC_PI_2 * i as f64 / (grid_n - 1) as f64;
        for j in 0..grid_n {
            let phi = TAU * j as f64 / grid_n as f64;
            samples.push((objective(theta, phi), theta, phi));
        }
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut best, mut best_theta, mut best_phi) = samples[0];

    if refine {
        let opts = SimplexOptions {
            ftol: 1e-10,
            xtol: 1e-9,
            max_iter: 2_000,
            initial_step: FRAC_PI_2 / grid_n as f64,
        };
        for &(_, theta0, phi0) in samples.iter().take(3) {
            let m = simplex::minimize(|x| objective(x[0], x[1]), &[theta0, phi0], &opts);
            if m.value < best {
                best = m.value;
                best_theta = m.x[0];
                best_phi = m.x[1];
            }
        }
    }
    Ok(((s_a - best).max(0.0), MeasurementBasis::canonical(best_theta, best_phi)))
}

/// Mutual information, classical correlations and discord.
///
/// X states with `ρ₂₂ = ρ₃₃` go through the analytic formula; everything else
/// through the measurement search.
pub fn correlations(rho: &DensityMatrix) -> Result<CorrelationTriple> {
    check_two_qubit(rho)?;
    if let Some(x) = XState::from_density_matrix(rho) {
        if x.validate().is_ok() {
            return Ok(xstate_terms(&x)?.triple());
        }
    }
    let mi = mutual_information(rho)?;
    let (c, _) = classical_correlations_bruteforce(rho, DEFAULT_GRID_N, true)?;
    Ok(CorrelationTriple::from_parts(mi, c.min(mi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::state::{bell_diagonal_state, BellDiagonalParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell(m1: f64, m2: f64, m3: f64) -> DensityMatrix {
        bell_diagonal_state(BellDiagonalParams::new(m1, m2, m3).unwrap()).unwrap()
    }

    /// `Σ_j (1+(-1)^j m)/2 · log₂(1+(-1)^j m)`, written out independently.
    fn family_discord(m: f64) -> f64 {
        (1.0 + m) / 2.0 * (1.0 + m).log2() + (1.0 - m) / 2.0 * (1.0 - m).log2()
    }

    #[test]
    fn product_state_has_no_correlations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (_, _, ab) = random::random_product_state(&mut rng);
        assert!(mutual_information(&ab).unwrap().abs() < 1e-12);
        let t = correlations(&ab).unwrap();
        assert!(t.mutual_info.abs() < 1e-12 && t.classical.abs() < 1e-9 && t.discord.abs() < 1e-9);
    }

    #[test]
    fn bell_state_triple() {
        let rho = bell(1.0, 1.0, -1.0);
        let t = correlations(&rho).unwrap();
        assert!((t.mutual_info - 2.0).abs() < 1e-12);
        assert!((t.classical - 1.0).abs() < 1e-12);
        assert!((t.discord - 1.0).abs() < 1e-12);
        let (c, _) = classical_correlations_bruteforce(&rho, 16, true).unwrap();
        assert!((c - 1.0).abs() < 1e-9);
    }

    #[test]
    fn maximally_mixed_has_zero_discord() {
        let x = XState { a: 0.25, b: 0.25, d: 0.25, z: 0.0.into(), w: 0.0.into() };
        assert!(discord_xstate(&x).unwrap().abs() < 1e-15);
    }

    #[test]
    fn frozen_family_values() {
        let rho = bell(1.0, 0.1, -0.1);
        let mi = mutual_information(&rho).unwrap();
        let s_ab = -0.45 * 0.45f64.log2() - 0.55 * 0.55f64.log2();
        assert!((mi - (2.0 - s_ab)).abs() < 1e-12);
        assert!((mi - 1.00723).abs() < 1e-5);

        let x = XState::from_density_matrix(&rho).unwrap();
        let d = discord_xstate(&x).unwrap();
        assert!((d - family_discord(0.1)).abs() < 1e-12);
        assert!((d - 0.007225546).abs() < 1e-9);

        let (c, basis) = classical_correlations_bruteforce(&rho, DEFAULT_GRID_N, true).unwrap();
        assert!((c - 1.0).abs() < 1e-9, "C = {c}");
        assert!((mi - c - d).abs() < 1e-8);
        // The σ_x direction lies on the equator.
        assert!((basis.theta - std::f64::consts::FRAC_PI_4).abs() < 1e-4);
    }

    #[test]
    fn brute_force_matches_closed_form_at_time_zero() {
        for &m in &[-0.9, -0.3, 0.0, 0.45, 0.8] {
            let (c, _) = classical_correlations_bruteforce(&bell(1.0, m, -m), 32, true).unwrap();
            assert!((c - 1.0).abs() < 1e-9, "m = {m}: {c}");
        }
    }

    #[test]
    fn grid_must_be_large_enough() {
        let err = classical_correlations_bruteforce(&bell(0.2, 0.1, 0.0), 4, false).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "grid_n", .. }));
    }

    #[test]
    fn rejects_non_states() {
        let m = DMatrix::identity(4, 4).map(|v: Complex64| v * 0.3);
        let rho = DensityMatrix::from_raw(m).unwrap();
        assert!(matches!(correlations(&rho), Err(Error::NotAState(_))));
        let bad = XState { a: 0.5, b: 0.25, d: 0.0, z: 0.3.into(), w: 0.0.into() };
        assert!(discord_xstate(&bad).is_err());
    }

    #[test]
    fn canonical_basis_preserves_projectors() {
        let raw = MeasurementBasis { theta: 2.3, phi: -0.4 };
        let canon = MeasurementBasis::canonical(raw.theta, raw.phi);
        assert!((0.0..=FRAC_PI_2).contains(&canon.theta));
        let proj = |b: MeasurementBasis| {
            let v = b.vectors()[0];
            [v[0] * v[0].conj(), v[0] * v[1].conj(), v[1] * v[1].conj()]
        };
        for (p, q) in proj(raw).iter().zip(proj(canon)) {
            assert!((p - q).norm() < 1e-14);
        }
    }

    #[test]
    fn non_x_states_use_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random::random_state(&mut rng, 4);
        assert!(XState::from_density_matrix(&rho).is_none());
        let t = correlations(&rho).unwrap();
        assert!(t.discord >= -1e-9 && t.discord <= t.mutual_info + 1e-9);
        assert!(t.classical <= t.mutual_info + 1e-9);
    }
}
