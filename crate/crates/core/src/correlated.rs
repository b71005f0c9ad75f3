//! Two qubits dephased by local bosonic environments that start in a
//! correlated two-mode Gaussian state, with switchable interaction windows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::measures::CorrelationTriple;
use crate::numeric::roots::{first_crossing, linspace};
use crate::numeric::{gamma, paired_log_sum, rpow_m1_over_nu};
use crate::state::{validate_state, DensityMatrix};
use crate::{Error, Result};

/// Default qubit energy gap, in units of `ω_c`.
pub const DEFAULT_EPS: f64 = 1e-8;
/// Closeness to `c` below which a non-crossing is reported as a near miss.
pub const NEAR_MISS: f64 = 1e-9;

/// On/off windows of the two local couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionSchedule {
    pub t1_start: f64,
    pub t1_end: f64,
    pub t2_start: f64,
    pub t2_end: f64,
}

impl InteractionSchedule {
    pub fn new(t1_start: f64, t1_end: f64, t2_start: f64, t2_end: f64) -> Result<Self> {
        let s = Self { t1_start, t1_end, t2_start, t2_end };
        s.validate()?;
        Ok(s)
    }

    /// Windows `[0, 20]` and `[20, 40]`.
    pub fn short() -> Self {
        Self { t1_start: 0.0, t1_end: 20.0, t2_start: 20.0, t2_end: 40.0 }
    }

    /// Windows `[0, 100]` and `[100, 200]`.
    pub fn long() -> Self {
        Self { t1_start: 0.0, t1_end: 100.0, t2_start: 100.0, t2_end: 200.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.t1_start, self.t1_end, self.t2_start, self.t2_end];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("schedule", "times must be finite"));
        }
        if !(0.0 <= self.t1_start && self.t1_start <= self.t2_start) {
            return Err(Error::param("schedule", "need 0 ≤ t1_start ≤ t2_start"));
        }
        if !(self.t1_start < self.t1_end && self.t2_start < self.t2_end) {
            return Err(Error::param("schedule", "each window must have positive length"));
        }
        Ok(())
    }

    /// Time by which both windows have closed.
    pub fn end(&self) -> f64 {
        self.t1_end.max(self.t2_end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedEnvConfig {
    pub r: f64,
    pub n1: f64,
    pub n2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub s: f64,
    pub omega_c: f64,
    /// Qubit energy gaps, in units of `ω_c`.
    pub eps1: f64,
    pub eps2: f64,
    pub schedule: InteractionSchedule,
    pub c: f64,
}

impl CorrelatedEnvConfig {
    /// Squeezed-vacuum environments with equal couplings, `ω_c = 1` and the
    /// default energy gap.
    pub fn symmetric(r: f64, s: f64, alpha: f64, c: f64, schedule: InteractionSchedule) -> Result<Self> {
        let cfg = Self {
            r,
            n1: 0.0,
            n2: 0.0,
            alpha1: alpha,
            alpha2: alpha,
            s,
            omega_c: 1.0,
            eps1: DEFAULT_EPS,
            eps2: DEFAULT_EPS,
            schedule,
            c,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &'static str, v: f64, ok: bool, what: &str| {
            if ok && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} {what}")))
            }
        };
        check("r", self.r, self.r >= 0.0, "must be non-negative")?;
        check("n1", self.n1, self.n1 >= 0.0, "must be non-negative")?;
        check("n2", self.n2, self.n2 >= 0.0, "must be non-negative")?;
        check("alpha1", self.alpha1, self.alpha1 > 0.0, "must be positive")?;
        check("alpha2", self.alpha2, self.alpha2 > 0.0, "must be positive")?;
        check("s", self.s, self.s > 0.0, "must be positive")?;
        check("omega_c", self.omega_c, self.omega_c > 0.0, "must be positive")?;
        check("eps1", self.eps1, true, "")?;
        check("eps2", self.eps2, true, "")?;
        if !(self.c.abs() < 1.0) {
            return Err(Error::param("c", "c must lie in (-1,1)"));
        }
        self.schedule.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceElements {
    pub a: f64,
    pub b: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

pub fn covariance_elements(r: f64, n1: f64, n2: f64) -> CovarianceElements {
    let ch2 = (2.0 * r).cosh();
    let c2 = r.cosh().powi(2);
    let s2 = r.sinh().powi(2);
    let c_minus = -0.5 * (1.0 + n1 + n2) * (2.0 * r).sinh();
    CovarianceElements {
        a: 0.5 * ch2 + n1 * c2 + n2 * s2,
        b: 0.5 * ch2 + n2 * c2 + n1 * s2,
        c_plus: -c_minus,
        c_minus,
    }
}

/// Accumulated interaction times `(t₁(t), t₂(t))`.
pub fn interaction_clock(t: f64, schedule: &InteractionSchedule) -> (f64, f64) {
    let clock = |start: f64, end: f64| (t - start).clamp(0.0, end - start);
    (clock(schedule.t1_start, schedule.t1_end), clock(schedule.t2_start, schedule.t2_end))
}

/// `(1+x²)^{-s/2}(cos(s·atan x) + x·sin(s·atan x))` with `x = ω_c τ`,
/// which equals `Re[(1+ix)^{1-s}]`.
pub fn g_factor(tau: f64, s: f64, omega_c: f64) -> f64 {
    let x = omega_c * tau;
    let th = s * x.atan();
    (1.0 + x * x).powf(-0.5 * s) * (th.cos() + x * th.sin())
}

/// `Γ(s)·(Re(1+ix)^{1-s} - 1)/(1-s)`, finite through `s = 1`.
fn decay_shape(x: f64, s: f64) -> f64 {
    gamma(s) * rpow_m1_over_nu(x, 1.0 - s)
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::param("t", format!("{t} must be a finite non-negative time")))
    }
}

/// Local coherence factor `κ_j(t)` of qubit `j ∈ {1, 2}`.
pub fn local_coherence(t: f64, j: u8, cfg: &CorrelatedEnvConfig) -> Result<Complex64> {
    check_time(t)?;
    let cov = covariance_elements(cfg.r, cfg.n1, cfg.n2);
    let (t1, t2) = interaction_clock(t, &cfg.schedule);
    let (weight, alpha, tj, eps) = match j {
        1 => (cov.a, cfg.alpha1, t1, cfg.eps1),
        2 => (cov.b, cfg.alpha2, t2, cfg.eps2),
        _ => return Err(Error::param("j", format!("qubit index {j} must be 1 or 2"))),
    };
    let exponent = -8.0 * weight * alpha * decay_shape(cfg.omega_c * tj, cfg.s);
    let phase = -2.0 * eps * cfg.omega_c * t;
    Ok(Complex64::from_polar(exponent.exp(), phase))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCoherence {
    /// Product `f₁f₂f₃f₄`.
    pub f: f64,
    /// `A = -8c₋Γ(s-1)√(α₁α₂)`, absent at `s = 1` where it diverges.
    pub amplitude: Option<f64>,
}

/// Environmental cross-correlation factor `F = f₁f₂f₃f₄`.
pub fn cross_coherence(t: f64, cfg: &CorrelatedEnvConfig) -> Result<CrossCoherence> {
    check_time(t)?;
    let cov = covariance_elements(cfg.r, cfg.n1, cfg.n2);
    let (t1, t2) = interaction_clock(t, &cfg.schedule);
    let ts = cfg.schedule.t2_start;
    let wc = cfg.omega_c;
    let s = cfg.s;
    let root = (cfg.alpha1 * cfg.alpha2).sqrt();
    let q = |tau: f64| decay_shape(wc * tau, s);
    // A·[g(T₁) - g(T₂) - g(T₃) + g(T₄)], with the constant parts of g cancelling.
    let log_f = 8.0 * cov.c_minus * root * (q(t1 + t2 + ts) - q(t1 + ts) - q(t2 + ts) + q(ts));
    let amplitude = (s != 1.0).then(|| -8.0 * cov.c_minus * gamma(s - 1.0) * root);
    Ok(CrossCoherence { f: log_f.exp(), amplitude })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherencePair {
    pub kappa12: Complex64,
    pub lambda12: Complex64,
}

pub fn coherence_pair(t: f64, cfg: &CorrelatedEnvConfig) -> Result<CoherencePair> {
    cfg.validate()?;
    let k1 = local_coherence(t, 1, cfg)?;
    let k2 = local_coherence(t, 2, cfg)?;
    let f = cross_coherence(t, cfg)?.f;
    Ok(CoherencePair { kappa12: k1 * k2 * f, lambda12: k1 * k2.conj() / f })
}

/// Reduced two-qubit state at time `t`.
pub fn rho_correlated(t: f64, cfg: &CorrelatedEnvConfig) -> Result<DensityMatrix> {
    let p = coherence_pair(t, cfg)?;
    let c = cfg.c;
    let hi = 0.25 * (1.0 + c);
    let lo = 0.25 * (1.0 - c);
    let mut m = nalgebra::DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
    m[(0, 0)] = hi.into();
    m[(3, 3)] = hi.into();
    m[(1, 1)] = lo.into();
    m[(2, 2)] = lo.into();
    m[(0, 3)] = p.kappa12 * hi;
    m[(3, 0)] = (p.kappa12 * hi).conj();
    m[(1, 2)] = p.lambda12 * lo;
    m[(2, 1)] = (p.lambda12 * lo).conj();
    let rho = DensityMatrix::from_raw(m)?;
    let diag = validate_state(&rho);
    if !diag.is_valid() {
        return Err(Error::NotAState(format!("t = {t}: {diag}")));
    }
    Ok(rho)
}

/// `½|(κ₁₂+Λ₁₂) + c(κ₁₂-Λ₁₂)|`.
pub fn transition_lhs(p: &CoherencePair, c: f64) -> f64 {
    0.5 * ((p.kappa12 + p.lambda12) + c * (p.kappa12 - p.lambda12)).norm()
}

/// Mutual information and classical correlations from the coherence
/// functions.
pub fn correlations_correlated(t: f64, cfg: &CorrelatedEnvConfig) -> Result<CorrelationTriple> {
    let p = coherence_pair(t, cfg)?;
    let c = cfg.c;
    let chi = c.abs().max(transition_lhs(&p, c)).min(1.0);
    let mi = paired_log_sum(c)
        + 0.5 * (1.0 + c) * paired_log_sum(p.kappa12.norm().min(1.0))
        + 0.5 * (1.0 - c) * paired_log_sum(p.lambda12.norm().min(1.0));
    Ok(CorrelationTriple::from_parts(mi, paired_log_sum(chi)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorrelatedTransition {
    At { time: f64, bracket: (f64, f64) },
    /// No crossing; `min_gap` is the smallest sampled `lhs - c`.
    Never { min_gap: f64 },
    /// No crossing, but the gap came within [`NEAR_MISS`] of zero.
    NearMiss { min_gap: f64, at: f64 },
}

impl CorrelatedTransition {
    pub fn time(&self) -> Option<f64> {
        match self {
            CorrelatedTransition::At { time, .. } => Some(*time),
            _ => None,
        }
    }
}

/// First solution of `½|(κ₁₂+Λ₁₂) + c(κ₁₂-Λ₁₂)| = c` on `[0, horizon]`.
pub fn correlated_transition_time(cfg: &CorrelatedEnvConfig, horizon: f64) -> Result<CorrelatedTransition> {
    if !(cfg.c > 0.0 && cfg.c < 1.0) {
        return Err(Error::param("c", "c must lie in (0,1)"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param("horizon", format!("{horizon} must be positive")));
    }
    cfg.validate()?;
    let n = (20.0 * cfg.omega_c * horizon).ceil().clamp(2000.0, 20_000.0) as usize;
    let mut grid = linspace(0.0, horizon, n);
    // Window edges are kinks of the gap; sample them exactly.
    let sch = cfg.schedule;
    grid.extend([sch.t1_start, sch.t1_end, sch.t2_start, sch.t2_end].into_iter().filter(|&t| t < horizon));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut failure = None;
    let scan = first_crossing(
        |t| match coherence_pair(t, cfg) {
            Ok(p) => transition_lhs(&p, cfg.c) - cfg.c,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        &grid,
        1e-10 / cfg.omega_c,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(match scan.root {
        Some((time, bracket)) => CorrelatedTransition::At { time, bracket },
        None if scan.min_value <= NEAR_MISS => CorrelatedTransition::NearMiss { min_gap: scan.min_value, at: scan.argmin },
        None => CorrelatedTransition::Never { min_gap: scan.min_value },
    })
}

/// Fock amplitudes `√(1-u²)·uⁿ`, `u = tanh r`, of the two-mode squeezed vacuum.
pub fn squeezed_vacuum_amplitudes(r: f64, n_max: usize) -> Vec<f64> {
    let u = r.tanh();
    let norm = (1.0 - u * u).sqrt();
    (0..=n_max).map(|n| norm * u.powi(n as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{self, MapElements, OhmicDephasing, TempMode};
    use crate::measures;
    use crate::pair;
    use crate::state::{bell_diagonal_state, BellDiagonalParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(r: f64, s: f64, schedule: InteractionSchedule) -> CorrelatedEnvConfig {
        CorrelatedEnvConfig::symmetric(r, s, 0.2, 0.1, schedule).unwrap()
    }

    /// Direct transcription of the printed coherence function, away from s = 1.
    fn kappa_direct(t: f64, j: u8, c: &CorrelatedEnvConfig) -> Complex64 {
        let cov = covariance_elements(c.r, c.n1, c.n2);
        let (t1, t2) = interaction_clock(t, &c.schedule);
        let (w, a, tj, e) = if j == 1 { (cov.a, c.alpha1, t1, c.eps1) } else { (cov.b, c.alpha2, t2, c.eps2) };
        let x = c.omega_c * tj;
        let p = 1.0 - c.s;
        let br = 2.0 - Complex64::new(1.0, -x).powf(p) - Complex64::new(1.0, x).powf(p);
        (Complex64::new(0.0, -2.0 * e * t) - 4.0 * w * a * gamma(c.s - 1.0) * br).exp()
    }

    fn f_direct(t: f64, c: &CorrelatedEnvConfig) -> f64 {
        let cov = covariance_elements(c.r, c.n1, c.n2);
        let amp = -8.0 * cov.c_minus * gamma(c.s - 1.0) * (c.alpha1 * c.alpha2).sqrt();
        let (t1, t2) = interaction_clock(t, &c.schedule);
        let ts = c.schedule.t2_start;
        let g = |tau| g_factor(tau, c.s, c.omega_c);
        (amp * (g(t1 + t2 + ts) - g(t1 + ts) - g(t2 + ts) + g(ts))).exp()
    }

    #[test]
    fn covariance_values() {
        let v = covariance_elements(0.0, 0.0, 0.0);
        assert_eq!((v.a, v.b, v.c_minus), (0.5, 0.5, 0.0));
        let v = covariance_elements(1.0, 0.0, 0.0);
        assert!((v.a - 1.881098).abs() < 1e-6 && (v.b - v.a).abs() < 1e-15);
        assert!((v.c_minus + 1.813431).abs() < 1e-6 && v.c_plus == -v.c_minus);
        let v = covariance_elements(0.7, 2.0, 2.0);
        assert!((v.a - v.b).abs() < 1e-15 && v.a >= 0.5);
    }

    #[test]
    fn clock() {
        let s = InteractionSchedule::short();
        assert_eq!(interaction_clock(0.0, &s), (0.0, 0.0));
        assert_eq!(interaction_clock(30.0, &s), (20.0, 10.0));
        assert_eq!(interaction_clock(55.0, &s), (20.0, 20.0));
        assert!(InteractionSchedule::new(5.0, 10.0, 2.0, 8.0).is_err());
        assert!(InteractionSchedule::new(0.0, 0.0, 2.0, 8.0).is_err());
    }

    #[test]
    fn g_factor_properties() {
        assert_eq!(g_factor(0.0, 2.5, 1.0), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let tau = rng.random_range(0.0..1e3);
            assert!((g_factor(tau, 1.0, 1.0) - 1.0).abs() < 1e-12);
        }
        assert!(g_factor(1e8, 2.5, 1.0).abs() < 1e-10);
        for &x in &[0.3, 5.0, 80.0] {
            let re = Complex64::new(1.0, x).powf(1.0 - 2.5).re;
            assert!((g_factor(x, 2.5, 1.0) - re).abs() < 1e-14);
        }
    }

    #[test]
    fn stable_forms_match_direct_transcription() {
        for &s in &[0.5, 2.5, 3.7] {
            for &r in &[0.0, 0.5, 1.0] {
                let c = cfg(r, s, InteractionSchedule::short());
                for &t in &[0.0, 7.0, 20.0, 31.0, 60.0] {
                    for j in [1, 2] {
                        let a = local_coherence(t, j, &c).unwrap();
                        let b = kappa_direct(t, j, &c);
                        assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()), "s {s} r {r} t {t}");
                    }
                    let f = cross_coherence(t, &c).unwrap().f;
                    assert!((f / f_direct(t, &c) - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn s_equal_one_limits() {
        let c = cfg(0.0, 1.0, InteractionSchedule::short());
        for &t in &[3.0, 12.0] {
            let k = local_coherence(t, 1, &c).unwrap().norm();
            assert!((k - (1.0 + t * t).powf(-0.4)).abs() < 1e-12);
            for &ds in &[1e-5, -1e-5] {
                let near = cfg(0.0, 1.0 + ds, InteractionSchedule::short());
                assert!((local_coherence(t, 1, &near).unwrap().norm() - k).abs() < 1e-4 * k);
            }
        }
        // F as the limit of ε-shifted evaluations.
        let at = cfg(0.5, 1.0, InteractionSchedule::short());
        for &t in &[10.0, 25.0, 38.0] {
            let exact = cross_coherence(t, &at).unwrap().f;
            let est = |e: f64| {
                let up = f_direct(t, &cfg(0.5, 1.0 + e, InteractionSchedule::short())).ln();
                let dn = f_direct(t, &cfg(0.5, 1.0 - e, InteractionSchedule::short())).ln();
                0.5 * (up + dn)
            };
            let (e4, e5) = (est(1e-4), est(1e-5));
            assert!((e4 - e5).abs() < 1e-6 * e5.abs().max(1e-3));
            assert!((exact.ln() - e5).abs() < 1e-7 * e5.abs().max(1.0), "{} vs {e5}", exact.ln());
            assert!(cross_coherence(t, &at).unwrap().amplitude.is_none());
        }
    }

    #[test]
    fn trivial_limits() {
        let c = cfg(0.0, 2.5, InteractionSchedule::short());
        assert_eq!(cross_coherence(13.0, &c).unwrap().f, 1.0);
        let c = cfg(1.0, 2.5, InteractionSchedule::short());
        assert_eq!(cross_coherence(0.0, &c).unwrap().f, 1.0);
        let p = coherence_pair(0.0, &c).unwrap();
        assert_eq!(p.kappa12, Complex64::new(1.0, 0.0));
        // Second qubit untouched before its window opens.
        assert!((local_coherence(15.0, 2, &c).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn squeezing_speeds_local_decay() {
        let a = local_coherence(10.0, 1, &cfg(0.0, 2.5, InteractionSchedule::short())).unwrap().norm();
        let b = local_coherence(10.0, 1, &cfg(1.0, 2.5, InteractionSchedule::short())).unwrap().norm();
        assert!(b < a);
    }

    #[test]
    fn initial_state_is_bell_diagonal() {
        let c = cfg(0.7, 2.5, InteractionSchedule::short());
        let rho = rho_correlated(0.0, &c).unwrap();
        let want = bell_diagonal_state(BellDiagonalParams::new(1.0, -0.1, 0.1).unwrap()).unwrap();
        assert!((rho.matrix() - want.matrix()).iter().all(|v| v.norm() < 1e-15));
        let t = correlations_correlated(0.0, &c).unwrap();
        assert!((t.classical - 1.0).abs() < 1e-15);
        assert!((t.mutual_info - 1.0 - paired_log_sum(0.1)).abs() < 1e-15);
    }

    #[test]
    fn f_cancels_in_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let c = CorrelatedEnvConfig {
                r: rng.random_range(0.0..1.5),
                n1: rng.random_range(0.0..1.0),
                n2: rng.random_range(0.0..1.0),
                alpha1: rng.random_range(0.01..0.5),
                alpha2: rng.random_range(0.01..0.5),
                s: rng.random_range(0.5..5.0),
                omega_c: 1.0,
                eps1: 1e-3,
                eps2: 2e-3,
                schedule: InteractionSchedule::short(),
                c: rng.random_range(0.01..0.9),
            };
            let t = rng.random_range(0.0..50.0);
            let p = coherence_pair(t, &c).unwrap();
            let k1 = local_coherence(t, 1, &c).unwrap().norm();
            let k2 = local_coherence(t, 2, &c).unwrap().norm();
            assert!(((p.kappa12 * p.lambda12).norm() - (k1 * k2).powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_forms_match_measurement_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..12 {
            let c = CorrelatedEnvConfig::symmetric(
                rng.random_range(0.0..1.5),
                rng.random_range(0.5..5.0),
                rng.random_range(0.01..0.5),
                rng.random_range(0.01..0.9),
                InteractionSchedule::short(),
            )
            .unwrap();
            let t = rng.random_range(0.0..45.0);
            let closed = correlations_correlated(t, &c).unwrap();
            let rho = rho_correlated(t, &c).unwrap();
            let mi = measures::mutual_information(&rho).unwrap();
            let (cl, _) = measures::classical_correlations_bruteforce(&rho, 32, true).unwrap();
            assert!((closed.mutual_info - mi).abs() < 1e-6);
            assert!((closed.discord - (mi - cl)).abs() < 1e-6, "{closed:?} vs {}", mi - cl);
        }
    }

    #[test]
    fn uncorrelated_environments_factorize() {
        for &s in &[1.0, 2.5] {
            let c = cfg(0.0, s, InteractionSchedule::short());
            // |κ_j| = e^{-Γ_z} of a zero-temperature bath with coupling 4α.
            let bath = OhmicDephasing::new(4.0 * c.alpha1, s, c.omega_c, TempMode::ZeroT).unwrap();
            let rho0 = bell_diagonal_state(BellDiagonalParams::new(1.0, -c.c, c.c).unwrap()).unwrap();
            for &t in &[5.0, 20.0, 27.0, 50.0] {
                let (t1, t2) = interaction_clock(t, &c.schedule);
                let local = |tj: f64, eps: f64| MapElements {
                    eta_par: 1.0,
                    eta_perp: (-channel::big_gamma_z_quadrature(tj, &bath).unwrap()).exp(),
                    kappa: 0.0,
                    phase: 2.0 * eps * t,
                };
                let want = pair::evolve_generic_pair(&rho0, &local(t1, c.eps1), &local(t2, c.eps2)).unwrap();
                let got = rho_correlated(t, &c).unwrap();
                assert!((got.matrix() - want.matrix()).iter().all(|v| v.norm() <= 1e-8));
            }
        }
    }

    #[test]
    fn transitions() {
        let short = InteractionSchedule::short();
        let t = |r| correlated_transition_time(&cfg(r, 1.0, short), 40.0).unwrap().time().unwrap();
        let (t0, t5, t10) = (t(0.0), t(0.5), t(1.0));
        assert!(t10 < t5 && t5 < t0, "{t10} {t5} {t0}");
        let inv = correlated_transition_time(&cfg(0.0, 2.5, InteractionSchedule::long()), 200.0).unwrap();
        assert!(matches!(inv, CorrelatedTransition::Never { .. }), "{inv:?}");
        let lost = correlated_transition_time(&cfg(1.0, 2.5, InteractionSchedule::long()), 200.0).unwrap();
        assert!(lost.time().is_some());
        let near_one = CorrelatedEnvConfig::symmetric(0.0, 2.5, 0.2, 0.999999, short).unwrap();
        assert!(correlated_transition_time(&near_one, 40.0).unwrap().time().unwrap() < 0.05);
        let bad = CorrelatedEnvConfig::symmetric(0.0, 2.5, 0.2, -0.1, short).unwrap();
        assert!(correlated_transition_time(&bad, 40.0).is_err());
    }

    #[test]
    fn amplitudes() {
        assert_eq!(squeezed_vacuum_amplitudes(0.0, 3), vec![1.0, 0.0, 0.0, 0.0]);
        let a = squeezed_vacuum_amplitudes(1.0, 40);
        let u = 1f64.tanh();
        assert!((a[1] / a[0] - 0.761594).abs() < 1e-6);
        let sum: f64 = a.iter().map(|x| x * x).sum();
        assert!((sum - (1.0 - u.powi(82))).abs() < 1e-14);
    }

    #[test]
    fn states_stay_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..30 {
            let c = CorrelatedEnvConfig::symmetric(
                rng.random_range(0.0..1.5),
                rng.random_range(0.5..5.0),
                rng.random_range(0.01..0.5),
                rng.random_range(-0.9..0.9),
                InteractionSchedule::long(),
            )
            .unwrap();
            for &t in &[0.0, 50.0, 100.0, 150.0, 250.0] {
                let rho = rho_correlated(t, &c).unwrap();
                let d = validate_state(&rho);
                assert!(d.min_eigenvalue >= -1e-10 && d.trace_defect <= 1e-12);
            }
        }
    }
}
