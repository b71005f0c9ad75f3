//! Single-qubit dynamical map for a qubit coupled to a Lorentzian
//! dissipation/heating reservoir and an ohmic-class dephasing reservoir.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numeric::ode::{self, OdeOptions};
use crate::numeric::quad::{self, QuadOptions};
use crate::numeric::{gamma, rpow_m1_over_nu, rpow_m1_over_nu_minus_one};
use crate::state::{validate_state, DensityMatrix};
use crate::{Error, Result};

/// Below this modulus the reservoir correlation function is treated as a zero.
pub const POLE_MODULUS: f64 = 1e-300;
/// Spectral integrals are cut at this multiple of the cutoff frequency.
pub const SPECTRAL_CUTOFF: f64 = 40.0;
const ASYMPTOTIC_SWITCH: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianReservoir {
    pub gamma0: f64,
    pub lambda: f64,
    pub delta: f64,
    pub n_photons: f64,
}

impl LorentzianReservoir {
    pub fn new(gamma0: f64, lambda: f64, delta: f64, n_photons: f64) -> Result<Self> {
        let r = Self { gamma0, lambda, delta, n_photons };
        r.validate()?;
        Ok(r)
    }

    /// Reservoir specified by `R = γ₀/λ`, with `Δ` in units of `λ`.
    pub fn from_ratio(ratio: f64, lambda: f64, delta_over_lambda: f64, n_photons: f64) -> Result<Self> {
        Self::new(ratio * lambda, lambda, delta_over_lambda * lambda, n_photons)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return Err(Error::param("gamma0", format!("{} must be positive", self.gamma0)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::param("lambda", format!("{} must be positive", self.lambda)));
        }
        if !self.delta.is_finite() {
            return Err(Error::param("delta", "must be finite"));
        }
        if !(self.n_photons >= 0.0 && self.n_photons.is_finite()) {
            return Err(Error::param("n_photons", format!("{} must be non-negative", self.n_photons)));
        }
        Ok(())
    }

    pub fn ratio(&self) -> f64 {
        self.gamma0 / self.lambda
    }

    fn z(&self) -> Complex64 {
        Complex64::new(self.lambda, -self.delta)
    }

    fn d(&self) -> Complex64 {
        let z = self.z();
        (z * z - 2.0 * self.gamma0 * self.lambda).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TempMode {
    /// High-temperature limit with `scale = 2k_BT/ħω_c`.
    HighT { scale: f64 },
    /// Full `coth(ω/2ω_T)` weight with thermal frequency `ω_T = k_BT/ħ`.
    GeneralT { omega_t: f64 },
    ZeroT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OhmicDephasing {
    pub alpha: f64,
    pub s: f64,
    pub omega_c: f64,
    pub temp_mode: TempMode,
}

impl OhmicDephasing {
    pub fn new(alpha: f64, s: f64, omega_c: f64, temp_mode: TempMode) -> Result<Self> {
        let d = Self { alpha, s, omega_c, temp_mode };
        d.validate()?;
        Ok(d)
    }

    pub fn high_t(alpha: f64, s: f64, omega_c: f64, scale: f64) -> Result<Self> {
        Self::new(alpha, s, omega_c, TempMode::HighT { scale })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", format!("{} must be positive", self.alpha)));
        }
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(Error::param("s", format!("{} must be positive", self.s)));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::param("omega_c", format!("{} must be positive", self.omega_c)));
        }
        match self.temp_mode {
            TempMode::HighT { scale } if !(scale >= 1.0 && scale.is_finite()) => {
                Err(Error::param("scale", format!("{scale} must be at least 1")))
            }
            TempMode::GeneralT { omega_t } if !(omega_t > 0.0 && omega_t.is_finite()) => {
                Err(Error::param("omega_t", format!("{omega_t} must be positive")))
            }
            _ => Ok(()),
        }
    }

    /// `α·2k_BT/ħω_c` in high-temperature mode.
    pub fn high_t_amplitude(&self) -> Option<f64> {
        match self.temp_mode {
            TempMode::HighT { scale } => Some(self.alpha * scale),
            _ => None,
        }
    }

    pub fn spectral_density(&self, w: f64) -> f64 {
        let x = w / self.omega_c;
        self.alpha * self.omega_c * x.powf(self.s) * (-x).exp()
    }

    /// Thermal weight multiplying `J(ω)` in the dephasing rate.
    fn thermal_weight(&self, w: f64) -> f64 {
        match self.temp_mode {
            TempMode::ZeroT => 1.0,
            TempMode::HighT { scale } => scale * self.omega_c / w,
            TempMode::GeneralT { omega_t } => {
                let y = w / (2.0 * omega_t);
                if y > 20.0 {
                    1.0
                } else {
                    1.0 / y.tanh()
                }
            }
        }
    }

    /// Upper bound on `∫_{Ω}^∞ J(ω)W(ω)/ω^p dω` past the spectral cutoff `Ω`.
    fn tail_bound(&self, power: i32) -> f64 {
        let wmax = SPECTRAL_CUTOFF * self.omega_c;
        let w_bound = match self.temp_mode {
            TempMode::HighT { scale } => scale * self.omega_c / wmax,
            TempMode::GeneralT { omega_t } => 1.0 + 2.0 * omega_t / wmax,
            TempMode::ZeroT => 1.0,
        };
        // ∫_X^∞ x^k e^{-x} dx ≤ 2 X^k e^{-X} once X > 2k.
        let k = (self.s - power as f64).max(0.0);
        let x = SPECTRAL_CUTOFF;
        self.alpha * self.omega_c.powi(2 - power) * w_bound * 2.0 * x.powf(k) * (-x).exp()
    }
}

/// Single-qubit map in Bloch form acting on `(1, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapElements {
    pub eta_par: f64,
    pub eta_perp: f64,
    pub kappa: f64,
    pub phase: f64,
}

impl MapElements {
    pub const IDENTITY: MapElements = MapElements { eta_par: 1.0, eta_perp: 1.0, kappa: 0.0, phase: 0.0 };

    /// The 4×4 real matrix acting on `(1, x, y, z)`.
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let (s, c) = self.phase.sin_cos();
        let p = self.eta_perp;
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, p * c, -p * s, 0.0],
            [0.0, p * s, p * c, 0.0],
            [self.kappa, 0.0, 0.0, self.eta_par],
        ]
    }

    pub fn apply_bloch(&self, r: [f64; 3]) -> [f64; 3] {
        let (s, c) = self.phase.sin_cos();
        [
            self.eta_perp * (c * r[0] - s * r[1]),
            self.eta_perp * (s * r[0] + c * r[1]),
            self.kappa + self.eta_par * r[2],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KappaForm {
    /// `κ = -(1 - e^{-Γ})/(2N+1)`, relaxing to the thermal steady state.
    #[default]
    Repaired,
    /// `κ = (e^{Γ} - 1)/(2N+1)`, the expression with the inner sign flipped.
    Literal,
}

fn sinhc(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0))
    } else {
        x.sinh() / x
    }
}

/// `tanh(x)/x`, computed without overflow for large `Re x`.
fn tanhc(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        let x2 = x * x;
        1.0 - x2 / 3.0 + x2 * x2 * (2.0 / 15.0)
    } else {
        let sign = if x.re >= 0.0 { 1.0 } else { -1.0 };
        let e = (-2.0 * sign * x).exp();
        sign * (1.0 - e) / (1.0 + e) / x
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::param("t", format!("{t} must be a finite non-negative time")))
    }
}

/// Natural logarithm of `C(t)/C(0)`.
pub fn ln_c_ratio(t: f64, res: &LorentzianReservoir) -> Result<Complex64> {
    check_time(t)?;
    let z = res.z();
    let d = res.d();
    let x = d * (0.5 * t);
    if x.re > ASYMPTOTIC_SWITCH {
        let q = z / d;
        let lead = (d - z) * (0.5 * t) + (0.5 * (1.0 + q)).ln();
        let corr = (-d * t).exp() * (1.0 - q) / (1.0 + q);
        Ok(lead + (1.0 + corr).ln())
    } else {
        Ok(-z * (0.5 * t) + (x.cosh() + z * (0.5 * t) * sinhc(x)).ln())
    }
}

/// `C(t)/C(0) = e^{-(λ-iΔ)t/2}(cosh(dt/2) + (λ-iΔ)/d · sinh(dt/2))`.
pub fn c_ratio(t: f64, res: &LorentzianReservoir) -> Result<Complex64> {
    Ok(ln_c_ratio(t, res)?.exp())
}

fn ensure_no_pole(t: f64, ln_c: Complex64) -> Result<()> {
    if ln_c.re < POLE_MODULUS.ln() || !ln_c.re.is_finite() {
        Err(Error::PoleEncountered { t, modulus: ln_c.re.exp() })
    } else {
        Ok(())
    }
}

/// `f(t) = -2 Re(Ċ/C)`, from the analytic derivative of the closed form.
pub fn f_rate(t: f64, res: &LorentzianReservoir) -> Result<f64> {
    ensure_no_pole(t, ln_c_ratio(t, res)?)?;
    let z = res.z();
    let x = res.d() * (0.5 * t);
    // tanh(dt/2)/d
    let th = tanhc(x) * (0.5 * t);
    let ratio = th / (1.0 + z * th);
    Ok(2.0 * res.gamma0 * res.lambda * ratio.re)
}

/// `Γ(t) = -(2N+1) ln|C(t)/C(0)|²`.
pub fn big_gamma(t: f64, res: &LorentzianReservoir) -> Result<f64> {
    let ln_c = ln_c_ratio(t, res)?;
    ensure_no_pole(t, ln_c)?;
    Ok(-(2.0 * res.n_photons + 1.0) * 2.0 * ln_c.re)
}

pub fn kappa(t: f64, res: &LorentzianReservoir) -> Result<f64> {
    kappa_with(t, res, KappaForm::Repaired)
}

pub fn kappa_with(t: f64, res: &LorentzianReservoir, form: KappaForm) -> Result<f64> {
    let g = big_gamma(t, res)?;
    let n = 2.0 * res.n_photons + 1.0;
    Ok(match form {
        KappaForm::Repaired => (-g).exp_m1() / n,
        KappaForm::Literal => g.exp_m1() / n,
    })
}

fn spectral_quad_opts(t: f64, deph: &OhmicDephasing) -> QuadOptions {
    let phase_span = SPECTRAL_CUTOFF * deph.omega_c * t;
    let panels = (phase_span / std::f64::consts::PI).ceil().clamp(4.0, 40_000.0) as usize;
    QuadOptions { initial_panels: panels, max_intervals: 200_000, ..QuadOptions::default() }
}

fn spectral_integral<F: Fn(f64) -> f64>(integrand: F, t: f64, deph: &OhmicDephasing, tail: f64) -> Result<f64> {
    let opts = spectral_quad_opts(t, deph);
    let r = quad::integrate(integrand, 0.0, SPECTRAL_CUTOFF * deph.omega_c, &opts)?;
    if r.error + tail > opts.abs_tol.max(opts.rel_tol * r.value.abs()) * 10.0 {
        return Err(Error::QuadratureFailure {
            tolerance: opts.abs_tol,
            estimate: r.error + tail,
            intervals: r.intervals,
        });
    }
    Ok(r.value)
}

/// Dephasing rate `γ_z(t) = ∫ J(ω) W(ω) sin(ωt)/ω dω` by adaptive quadrature.
pub fn gamma_z_rate(t: f64, deph: &OhmicDephasing) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let f = |w: f64| {
        if w <= 0.0 {
            return 0.0;
        }
        deph.spectral_density(w) * deph.thermal_weight(w) * (w * t).sin() / w
    };
    spectral_integral(f, t, deph, deph.tail_bound(1))
}

/// Closed-form high-temperature rate, `-Aω_c Γ(s-1) Im[(1+iω_c t)^{1-s}]`.
pub fn gamma_z_rate_high_t(t: f64, deph: &OhmicDephasing) -> Option<f64> {
    let amp = deph.high_t_amplitude()?;
    let x = deph.omega_c * t;
    let s = deph.s;
    let l = crate::numeric::ln_one_plus_ix(x);
    let im = ((1.0 - s) * l).exp().im;
    // Γ(s-1)·(1+ix)^{1-s} has a removable singularity at s = 1.
    let gi = if (s - 1.0).abs() < 1e-8 { -l.im } else { gamma(s - 1.0) * im };
    Some(-amp * deph.omega_c * gi)
}

/// `Γ_z(t) = ∫ J(ω) W(ω) (1 - cos ωt)/ω² dω` by quadrature, for any mode.
pub fn big_gamma_z_quadrature(t: f64, deph: &OhmicDephasing) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let f = |w: f64| {
        if w <= 0.0 {
            return 0.0;
        }
        let h = (0.5 * w * t).sin();
        deph.spectral_density(w) * deph.thermal_weight(w) * 2.0 * h * h / (w * w)
    };
    spectral_integral(f, t, deph, 2.0 * deph.tail_bound(2))
}

/// Decoherence exponent `Γ_z(t) = ∫₀ᵗ γ_z`.
///
/// High-temperature mode uses the closed form; the expression is evaluated
/// so that it stays finite through `s = 2` and `s = 1`.
pub fn big_gamma_z(t: f64, deph: &OhmicDephasing) -> Result<f64> {
    check_time(t)?;
    let Some(amp) = deph.high_t_amplitude() else {
        return big_gamma_z_quadrature(t, deph);
    };
    let x = deph.omega_c * t;
    let s = deph.s;
    let nu = 2.0 - s;
    let value = if (s - 2.0).abs() <= (s - 1.0).abs() {
        // AΓ(s-1)·[1 - Re(1+ix)^{2-s}]/(s-2)
        amp * gamma(s) / (s - 1.0) * rpow_m1_over_nu(x, nu)
    } else {
        amp * gamma(s) / (s - 2.0) * rpow_m1_over_nu_minus_one(x, nu)
    };
    Ok(value)
}

/// `lim_{t→∞} Γ_z(t)` when finite.
pub fn gamma_z_asymptote(deph: &OhmicDephasing) -> Result<Option<f64>> {
    let s = deph.s;
    match deph.temp_mode {
        TempMode::HighT { scale } => Ok((s > 2.0).then(|| deph.alpha * scale * gamma(s - 2.0))),
        TempMode::ZeroT => Ok((s > 1.0).then(|| deph.alpha * gamma(s - 1.0))),
        TempMode::GeneralT { omega_t } => {
            if s <= 2.0 {
                return Ok(None);
            }
            // coth(y) = 1/y + (coth(y) - 1/y); the first piece integrates in closed form.
            let leading = deph.alpha * 2.0 * omega_t / deph.omega_c * gamma(s - 2.0);
            let f = |w: f64| {
                if w <= 0.0 {
                    return 0.0;
                }
                let y = w / (2.0 * omega_t);
                let rest = if y < 1e-4 { y / 3.0 - y.powi(3) / 45.0 } else { deph.thermal_weight(w) - 1.0 / y };
                deph.spectral_density(w) * rest / (w * w)
            };
            Ok(Some(leading + spectral_integral(f, 0.0, deph, deph.tail_bound(2))?))
        }
    }
}

/// Map elements for the channel stack at time `t`.
///
/// A missing reservoir contributes `Γ = 0`, a missing dephasing bath `Γ_z = 0`.
pub fn map_elements(
    t: f64,
    res: Option<&LorentzianReservoir>,
    deph: Option<&OhmicDephasing>,
    omega: f64,
) -> Result<MapElements> {
    map_elements_with(t, res, deph, omega, KappaForm::Repaired)
}

pub fn map_elements_with(
    t: f64,
    res: Option<&LorentzianReservoir>,
    deph: Option<&OhmicDephasing>,
    omega: f64,
    form: KappaForm,
) -> Result<MapElements> {
    check_time(t)?;
    let (g, k) = match res {
        Some(r) => (big_gamma(t, r)?, kappa_with(t, r, form)?),
        None => (0.0, 0.0),
    };
    let gz = match deph {
        Some(d) => big_gamma_z(t, d)?,
        None => 0.0,
    };
    Ok(MapElements { eta_par: (-g).exp(), eta_perp: (-0.5 * g - gz).exp(), kappa: k, phase: omega * t })
}

pub fn apply_map(rho: &DensityMatrix, m: &MapElements) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho.dim() });
    }
    DensityMatrix::from_bloch(m.apply_bloch(rho.bloch()?))
}

/// Integrates the time-local master equation directly.
///
/// Rates are `γ₁/2 = N f`, `γ₂/2 = (N+1) f` and `γ_z` from [`gamma_z_rate`];
/// the Lamb-shift term is dropped.
pub fn master_equation_oracle(
    rho0: &DensityMatrix,
    t: f64,
    res: Option<&LorentzianReservoir>,
    deph: Option<&OhmicDephasing>,
    omega: f64,
) -> Result<DensityMatrix> {
    check_time(t)?;
    if rho0.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho0.dim() });
    }
    let diag = validate_state(rho0);
    if !diag.is_valid() {
        return Err(Error::NotAState(diag.to_string()));
    }
    let y0: Vec<f64> = (0..4).flat_map(|k| {
        let v = rho0.get(k / 2, k % 2);
        [v.re, v.im]
    }).collect();

    let rhs = |time: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        let (half_g1, half_g2) = match res {
            Some(r) => {
                let f = f_rate(time, r)?;
                (r.n_photons * f, (r.n_photons + 1.0) * f)
            }
            None => (0.0, 0.0),
        };
        let gz = match deph {
            Some(d) => gamma_z_rate(time, d)?,
            None => 0.0,
        };
        let rho = |k: usize| Complex64::new(y[2 * k], y[2 * k + 1]);
        let (r00, r01, r10, r11) = (rho(0), rho(1), rho(2), rho(3));
        let i = Complex64::i();
        // σ₊ = |↑⟩⟨↓| raises index 1 to index 0.
        let d00 = half_g1 * r11 - half_g2 * r00;
        let d11 = -d00;
        let decay = 0.5 * (half_g1 + half_g2) + gz;
        let d01 = -i * omega * r01 - decay * r01;
        let d10 = i * omega * r10 - decay * r10;
        for (k, v) in [d00, d01, d10, d11].into_iter().enumerate() {
            dy[2 * k] = v.re;
            dy[2 * k + 1] = v.im;
        }
        Ok(())
    };
    let opts = OdeOptions::default();
    let y = ode::integrate(rhs, &y0, 0.0, t, &opts)?;
    let m = DMatrix::from_fn(2, 2, |r, c| Complex64::new(y[2 * (2 * r + c)], y[2 * (2 * r + c) + 1]));
    DensityMatrix::from_raw(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn weak(delta: f64, n: f64) -> LorentzianReservoir {
        LorentzianReservoir::from_ratio(0.01, 1.0, delta, n).unwrap()
    }

    fn high_t(s: f64, amp: f64) -> OhmicDephasing {
        OhmicDephasing::high_t(amp, s, 1.0, 1.0).unwrap()
    }

    /// Direct textbook evaluation of the closed form.
    fn c_direct(t: f64, res: &LorentzianReservoir) -> Complex64 {
        let z = res.z();
        let d = res.d();
        (-z * t / 2.0).exp() * ((d * t / 2.0).cosh() + z / d * (d * t / 2.0).sinh())
    }

    #[test]
    fn c_ratio_starts_at_one() {
        let r = weak(0.0, 0.0);
        assert_eq!(c_ratio(0.0, &r).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(f_rate(0.0, &r).unwrap(), 0.0);
        assert_eq!(big_gamma(0.0, &r).unwrap(), 0.0);
        assert_eq!(kappa(0.0, &r).unwrap(), 0.0);
    }

    #[test]
    fn c_ratio_matches_direct_form() {
        for &(ratio, delta) in &[(0.01, 0.0), (0.01, 50.0), (5.0, 0.0), (0.3, 2.0)] {
            let r = LorentzianReservoir::from_ratio(ratio, 1.0, delta, 0.0).unwrap();
            for &t in &[0.1, 1.0, 7.5, 30.0] {
                let a = c_ratio(t, &r).unwrap();
                let b = c_direct(t, &r);
                assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()), "{ratio} {delta} {t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn critical_damping_is_continuous() {
        let crit = LorentzianReservoir::new(0.5, 1.0, 0.0, 0.0).unwrap();
        assert!(crit.d().norm() < 1e-15);
        let near = LorentzianReservoir::new(0.5 + 1e-9, 1.0, 0.0, 0.0).unwrap();
        for &t in &[0.5, 3.0, 12.0] {
            assert!((c_ratio(t, &crit).unwrap() - c_ratio(t, &near).unwrap()).norm() < 1e-7);
            assert!((f_rate(t, &crit).unwrap() - f_rate(t, &near).unwrap()).abs() < 1e-7);
        }
    }

    #[test]
    fn f_rate_matches_finite_difference() {
        for &delta in &[0.0, 50.0, 3.0] {
            let r = weak(delta, 0.0);
            for &t in &[0.3, 2.0, 9.0] {
                let h = 1e-5;
                let lp = ln_c_ratio(t + h, &r).unwrap().re;
                let lm = ln_c_ratio(t - h, &r).unwrap().re;
                let fd = -2.0 * (lp - lm) / (2.0 * h);
                assert!((f_rate(t, &r).unwrap() - fd).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn markov_plateau() {
        let r = LorentzianReservoir::from_ratio(1e-4, 1.0, 0.0, 0.0).unwrap();
        let f = f_rate(50.0, &r).unwrap();
        assert!((f / r.gamma0 - 1.0).abs() < 0.01);
    }

    #[test]
    fn markov_limit_of_modulus() {
        let r = weak(0.0, 0.0);
        for &t in &[20.0, 60.0, 150.0] {
            let m2 = c_ratio(t, &r).unwrap().norm_sqr();
            let fit = (-r.gamma0 * t).exp();
            assert!((m2 / fit - 1.0).abs() < 0.02, "t = {t}: {m2} vs {fit}");
        }
    }

    #[test]
    fn detuned_rate_turns_negative() {
        let r = weak(50.0, 0.0);
        let min = (1..4000).map(|k| f_rate(k as f64 * 0.005, &r).unwrap()).fold(f64::INFINITY, f64::min);
        assert!(min < 0.0);
    }

    #[test]
    fn strong_coupling_has_poles() {
        // Zeros of C(t) for Δ = 0 and large R.
        let r = LorentzianReservoir::from_ratio(50.0, 1.0, 0.0, 0.0).unwrap();
        let d = r.d();
        assert!(d.re.abs() < 1e-12);
        let omega = d.im.abs();
        // cos(ωt/2) + (λ/ω) sin(ωt/2) = 0
        let t0 = 2.0 * (std::f64::consts::PI - (omega / r.lambda).atan()) / omega;
        assert!(c_ratio(t0, &r).unwrap().norm() < 1e-12);
        match f_rate(t0, &r) {
            Err(Error::PoleEncountered { .. }) => {}
            Ok(f) => assert!(f.abs() > 1e6, "f = {f}"),
            Err(e) => panic!("{e:?}"),
        }
        let exact = LorentzianReservoir::new(0.0, 1.0, 0.0, 0.0);
        assert!(exact.is_err());
    }

    #[test]
    fn gamma_scales_with_photon_number() {
        let r0 = weak(0.0, 0.0);
        let r10 = weak(0.0, 10.0);
        for &t in &[0.5, 5.0, 40.0] {
            let g0 = big_gamma(t, &r0).unwrap();
            assert!((g0 + 2.0 * c_ratio(t, &r0).unwrap().norm().ln() * 1.0 * 1.0 - 0.0).abs() < 1e-12 + 1e-12 * g0);
            assert!((big_gamma(t, &r10).unwrap() - 21.0 * g0).abs() < 1e-12 * (1.0 + g0));
            assert!(g0 >= 0.0);
        }
    }

    #[test]
    fn big_gamma_is_integral_of_rates() {
        let r = weak(50.0, 3.0);
        let t = 4.0;
        let q = quad::integrate(|u| (2.0 * r.n_photons + 1.0) * f_rate(u, &r).unwrap(), 0.0, t, &QuadOptions {
            initial_panels: 64,
            ..QuadOptions::default()
        })
        .unwrap();
        assert!((q.value - big_gamma(t, &r).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn kappa_agrees_with_g_integral() {
        // κ = 1 - e^{-Γ}(1 + 2G), G = ∫ e^{Γ} γ₂/2.
        let r = weak(2.0, 2.0);
        for &t in &[0.7, 3.0, 15.0] {
            let g_int = quad::integrate(
                |u| big_gamma(u, &r).unwrap().exp() * (r.n_photons + 1.0) * f_rate(u, &r).unwrap(),
                0.0,
                t,
                &QuadOptions { initial_panels: 32, ..QuadOptions::default() },
            )
            .unwrap()
            .value;
            let k9 = 1.0 - (-big_gamma(t, &r).unwrap()).exp() * (1.0 + 2.0 * g_int);
            assert!((k9 - kappa(t, &r).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn kappa_limits() {
        let r0 = LorentzianReservoir::from_ratio(0.5, 1.0, 0.0, 0.0).unwrap();
        assert!((kappa(400.0, &r0).unwrap() + 1.0).abs() < 1e-9);
        let r10 = LorentzianReservoir::from_ratio(0.5, 1.0, 0.0, 10.0).unwrap();
        assert!((kappa(400.0, &r10).unwrap() + 1.0 / 21.0).abs() < 1e-12);
        let lit = kappa_with(400.0, &r10, KappaForm::Literal).unwrap();
        assert!(lit > 1.0);
    }

    #[test]
    fn high_t_rate_sign_structure() {
        let grid: Vec<f64> = (1..=2000).map(|k| k as f64 * 0.05).collect();
        let min_rate = |s: f64| {
            let d = high_t(s, 1.0);
            grid.iter().map(|&t| gamma_z_rate_high_t(t, &d).unwrap()).fold(f64::INFINITY, f64::min)
        };
        assert!(min_rate(3.5) < 0.0);
        assert!(min_rate(2.5) >= 0.0);
        assert!(min_rate(3.0) >= -1e-10);
    }

    #[test]
    fn high_t_rate_quadrature_matches_closed_form() {
        for &s in &[0.5, 1.0, 2.5, 3.5, 4.0] {
            let d = high_t(s, 1.0);
            for &t in &[0.0, 0.4, 3.0, 25.0] {
                let q = gamma_z_rate(t, &d).unwrap();
                let c = gamma_z_rate_high_t(t, &d).unwrap();
                assert!((q - c).abs() < 1e-8, "s = {s}, t = {t}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn big_gamma_z_closed_form_matches_quadrature() {
        for &s in &[0.6, 1.0, 1.5, 1.9995, 2.0, 2.0004, 2.5, 3.0, 3.5, 4.0] {
            let d = high_t(s, 0.7);
            for &t in &[0.0, 0.3, 2.0, 17.0, 50.0] {
                let c = big_gamma_z(t, &d).unwrap();
                let q = big_gamma_z_quadrature(t, &d).unwrap();
                assert!((c - q).abs() < 1e-8, "s = {s}, t = {t}: {c} vs {q}");
            }
        }
    }

    #[test]
    fn big_gamma_z_literal_form() {
        // α·scale·Γ(s-2)·(1 - (1+x²)^{(2-s)/2} cos((s-2) atan x))
        let d = high_t(3.5, 1.0);
        for &x in &[0.5f64, 4.0, 30.0] {
            let s: f64 = 3.5;
            let lit = gamma(s - 2.0) * (1.0 - (1.0 + x * x).powf((2.0 - s) / 2.0) * ((s - 2.0) * x.atan()).cos());
            assert!((big_gamma_z(x, &d).unwrap() - lit).abs() < 1e-13);
        }
    }

    #[test]
    fn asymptotes() {
        let pi_sqrt = std::f64::consts::PI.sqrt();
        assert!((gamma_z_asymptote(&high_t(2.5, 1.0)).unwrap().unwrap() - pi_sqrt).abs() < 1e-12);
        assert!((gamma_z_asymptote(&high_t(3.5, 1.0)).unwrap().unwrap() - 0.5 * pi_sqrt).abs() < 1e-12);
        assert!(gamma_z_asymptote(&high_t(2.0, 1.0)).unwrap().is_none());
        assert!((big_gamma_z(1e7, &high_t(2.5, 1.0)).unwrap() - pi_sqrt).abs() < 1e-3);
        let zero = OhmicDephasing::new(0.2, 3.0, 1.0, TempMode::ZeroT).unwrap();
        assert!((gamma_z_asymptote(&zero).unwrap().unwrap() - 0.2).abs() < 1e-12);
        let gen = OhmicDephasing::new(0.2, 3.0, 1.0, TempMode::GeneralT { omega_t: 5.0 }).unwrap();
        let a = gamma_z_asymptote(&gen).unwrap().unwrap();
        let late = big_gamma_z(60.0, &gen).unwrap();
        assert!((a - late).abs() < 1e-3 * a, "{a} vs {late}");
    }

    #[test]
    fn general_t_approaches_high_t() {
        let s = 2.5;
        let omega_t = 500.0;
        let gen = OhmicDephasing::new(0.01, s, 1.0, TempMode::GeneralT { omega_t }).unwrap();
        let hi = OhmicDephasing::high_t(0.01, s, 1.0, 2.0 * omega_t).unwrap();
        let t = 3.0;
        let a = big_gamma_z(t, &gen).unwrap();
        let b = big_gamma_z(t, &hi).unwrap();
        assert!((a / b - 1.0).abs() < 1e-3);
    }

    #[test]
    fn map_identity_at_zero() {
        let r = weak(50.0, 10.0);
        let d = high_t(2.5, 1.0);
        let m = map_elements(0.0, Some(&r), Some(&d), 0.3).unwrap();
        assert_eq!(m, MapElements::IDENTITY);
    }

    #[test]
    fn dephasing_only_map() {
        let d = high_t(2.5, 1.0);
        let m = map_elements(2.0, None, Some(&d), 0.0).unwrap();
        assert_eq!(m.eta_par, 1.0);
        assert_eq!(m.kappa, 0.0);
        assert!((m.eta_perp - (-big_gamma_z(2.0, &d).unwrap()).exp()).abs() < 1e-15);
    }

    #[test]
    fn exponent_identity() {
        let r = weak(50.0, 1.0);
        let d = high_t(3.5, 1.0);
        for &t in &[0.1, 1.0, 10.0] {
            let m = map_elements(t, Some(&r), Some(&d), 0.0).unwrap();
            let gz = big_gamma_z(t, &d).unwrap();
            assert!((m.eta_perp.powi(2) - m.eta_par * (-2.0 * gz).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn map_matches_master_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..6 {
            let r = LorentzianReservoir::from_ratio(
                rng.random_range(0.005..0.5),
                1.0,
                rng.random_range(0.0..20.0),
                rng.random_range(0.0..3.0),
            )
            .unwrap();
            let d = high_t(rng.random_range(1.5..4.0), rng.random_range(0.01..0.5));
            let omega = rng.random_range(0.0..2.0);
            let t = rng.random_range(0.1..6.0);
            let m = map_elements(t, Some(&r), Some(&d), omega).unwrap();
            for _ in 0..3 {
                let rho0 = random::random_state(&mut rng, 2);
                let a = apply_map(&rho0, &m).unwrap().bloch().unwrap();
                let b = master_equation_oracle(&rho0, t, Some(&r), Some(&d), omega).unwrap().bloch().unwrap();
                for k in 0..3 {
                    assert!((a[k] - b[k]).abs() < 1e-6, "{a:?} vs {b:?}");
                }
            }
        }
    }

    #[test]
    fn ground_state_is_fixed_at_zero_temperature() {
        let r = weak(50.0, 0.0);
        let ground = DensityMatrix::from_bloch([0.0, 0.0, -1.0]).unwrap();
        for &t in &[1.0, 10.0] {
            let out = master_equation_oracle(&ground, t, Some(&r), None, 0.0).unwrap();
            assert!((out.get(1, 1).re - 1.0).abs() < 1e-12);
            assert!((out.trace().re - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_rates_give_free_rotation() {
        let rho0 = DensityMatrix::from_bloch([0.6, 0.0, 0.2]).unwrap();
        let tiny = LorentzianReservoir::new(1e-300, 1.0, 0.0, 0.0).unwrap();
        let out = master_equation_oracle(&rho0, 1.0, Some(&tiny), None, 0.5).unwrap().bloch().unwrap();
        assert!((out[0] - 0.6 * 0.5f64.cos()).abs() < 1e-9);
        assert!((out[1] - 0.6 * 0.5f64.sin()).abs() < 1e-9);
        assert!((out[2] - 0.2).abs() < 1e-12);
    }

    #[test]
    fn thermal_steady_state() {
        let r = LorentzianReservoir::from_ratio(0.5, 1.0, 0.0, 10.0).unwrap();
        let rho0 = DensityMatrix::from_bloch([0.0, 0.0, 1.0]).unwrap();
        let out = master_equation_oracle(&rho0, 30.0, Some(&r), None, 0.0).unwrap().bloch().unwrap();
        assert!((out[2] + 1.0 / 21.0).abs() < 1e-8);
    }

    #[test]
    fn invalid_parameters() {
        assert!(LorentzianReservoir::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(LorentzianReservoir::new(1.0, 1.0, 0.0, -1.0).is_err());
        assert!(OhmicDephasing::high_t(0.1, 2.5, 1.0, 0.5).is_err());
        assert!(OhmicDephasing::new(0.1, 0.0, 1.0, TempMode::ZeroT).is_err());
        assert!(f_rate(-1.0, &weak(0.0, 0.0)).is_err());
    }
}
