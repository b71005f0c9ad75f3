//! Two qubits evolving under identical, independent local channels.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{self, LorentzianReservoir, MapElements, OhmicDephasing};
use crate::measures::{self, CorrelationTriple, XState};
use crate::numeric::paired_log_sum;
use crate::numeric::roots::{first_crossing, linspace};
use crate::state::{kron, pauli, validate_state, BellDiagonalParams, DensityMatrix};
use crate::{Error, Result};

/// Default search window for transition times, in units of `1/ω_c`.
pub const DEFAULT_HORIZON: f64 = 200.0;
/// Searches past the horizon stop once the window exceeds this many `1/ω_c`.
const EXTENDED_HORIZON_LIMIT: f64 = 1e12;
const BELL_TOL: f64 = 1e-12;
/// Branch gaps below this are treated as ties.
pub const GAP_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelStack {
    pub res: Option<LorentzianReservoir>,
    pub deph: Option<OhmicDephasing>,
    #[serde(default)]
    pub omega: f64,
}

impl ChannelStack {
    pub fn new(res: Option<LorentzianReservoir>, deph: Option<OhmicDephasing>, omega: f64) -> Result<Self> {
        if res.is_none() && deph.is_none() {
            return Err(Error::param("channel", "at least one reservoir is required"));
        }
        if let Some(r) = &res {
            r.validate()?;
        }
        if let Some(d) = &deph {
            d.validate()?;
        }
        if !omega.is_finite() {
            return Err(Error::param("omega", "must be finite"));
        }
        Ok(Self { res, deph, omega })
    }

    pub fn dephasing(deph: OhmicDephasing) -> Result<Self> {
        Self::new(None, Some(deph), 0.0)
    }

    pub fn thermal(res: LorentzianReservoir) -> Result<Self> {
        Self::new(Some(res), None, 0.0)
    }

    pub fn combined(res: LorentzianReservoir, deph: OhmicDephasing) -> Result<Self> {
        Self::new(Some(res), Some(deph), 0.0)
    }

    /// `β = ω_c/λ` when both reservoirs are present.
    pub fn beta(&self) -> Option<f64> {
        Some(self.deph?.omega_c / self.res?.lambda)
    }

    pub fn is_dephasing_only(&self) -> bool {
        self.res.is_none()
    }

    pub fn map(&self, t: f64) -> Result<MapElements> {
        channel::map_elements(t, self.res.as_ref(), self.deph.as_ref(), self.omega)
    }
}

/// `T_ij = Tr[ρ σ_i⊗σ_j]` with `σ₀ = I`.
pub fn correlation_tensor(rho: &DensityMatrix) -> Result<[[f64; 4]; 4]> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho.dim() });
    }
    let mut t = [[0.0; 4]; 4];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = rho.expect(&kron(&pauli(i), &pauli(j))).re;
        }
    }
    Ok(t)
}

pub fn from_correlation_tensor(t: &[[f64; 4]; 4]) -> Result<DensityMatrix> {
    let mut m = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
    for (i, row) in t.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if *v != 0.0 {
                m += kron(&pauli(i), &pauli(j)).map(|x| x * (0.25 * v));
            }
        }
    }
    DensityMatrix::from_raw(m)
}

/// Recovers `(m₁, m₂, m₃)` when `rho` is Bell-diagonal.
pub fn bell_params_of(rho: &DensityMatrix) -> Option<BellDiagonalParams> {
    if rho.dim() != 4 || rho.off_x_magnitude() > BELL_TOL {
        return None;
    }
    let g = |r, c| rho.get(r, c);
    let same_outer = (g(0, 0) - g(3, 3)).norm() <= BELL_TOL;
    let same_inner = (g(1, 1) - g(2, 2)).norm() <= BELL_TOL;
    if !same_outer || !same_inner || g(0, 3).im.abs() > BELL_TOL || g(1, 2).im.abs() > BELL_TOL {
        return None;
    }
    let m3 = (g(0, 0) + g(3, 3) - g(1, 1) - g(2, 2)).re;
    let m1 = 2.0 * (g(0, 3) + g(1, 2)).re;
    let m2 = 2.0 * (g(1, 2) - g(0, 3)).re;
    BellDiagonalParams::new(m1, m2, m3).ok()
}

/// Closed-form evolution of a Bell-diagonal state under the local map `m`
/// applied to both qubits.
pub fn evolve_bell_diagonal(p: BellDiagonalParams, m: &MapElements) -> Result<DensityMatrix> {
    let BellDiagonalParams { m1, m2, m3 } = p;
    let k = m.kappa;
    let pz = m.eta_par * m.eta_par * m3;
    let perp2 = m.eta_perp * m.eta_perp;
    let re = |v: f64| Complex64::new(v, 0.0);
    let mut r = DMatrix::from_element(4, 4, re(0.0));
    r[(0, 0)] = re(0.25 * ((1.0 + k) * (1.0 + k) + pz));
    r[(1, 1)] = re(0.25 * (1.0 - k * k - pz));
    r[(2, 2)] = r[(1, 1)];
    r[(3, 3)] = re(0.25 * ((1.0 - k) * (1.0 - k) + pz));
    let corner = Complex64::from_polar(0.25 * (m1 - m2) * perp2, -2.0 * m.phase);
    r[(0, 3)] = corner;
    r[(3, 0)] = corner.conj();
    r[(1, 2)] = re(0.25 * (m1 + m2) * perp2);
    r[(2, 1)] = r[(1, 2)];
    DensityMatrix::from_raw(r)
}

/// Applies `Λ⊗Λ` to an arbitrary two-qubit state through its correlation tensor.
pub fn evolve_generic(rho: &DensityMatrix, m: &MapElements) -> Result<DensityMatrix> {
    evolve_generic_pair(rho, m, m)
}

/// Applies `Λ_A⊗Λ_B` with possibly different local maps.
pub fn evolve_generic_pair(rho: &DensityMatrix, ma: &MapElements, mb: &MapElements) -> Result<DensityMatrix> {
    let t = correlation_tensor(rho)?;
    let (la, lb) = (ma.matrix(), mb.matrix());
    let mut out = [[0.0; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for a in 0..4 {
                if la[i][a] == 0.0 {
                    continue;
                }
                for b in 0..4 {
                    acc += la[i][a] * t[a][b] * lb[j][b];
                }
            }
            *v = acc;
        }
    }
    // The identity component is exactly 1 for any trace-one input.
    out[0][0] = 1.0;
    from_correlation_tensor(&out)
}

pub fn evolve_pair(rho0: &DensityMatrix, t: f64, ch: &ChannelStack) -> Result<DensityMatrix> {
    if rho0.dim() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: rho0.dim() });
    }
    let diag = validate_state(rho0);
    if !diag.is_valid() {
        return Err(Error::NotAState(diag.to_string()));
    }
    let m = ch.map(t)?;
    match bell_params_of(rho0) {
        Some(p) => evolve_bell_diagonal(p, &m),
        None => evolve_generic(rho0, &m),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTrace {
    pub times: Vec<f64>,
    pub triples: Vec<CorrelationTriple>,
    pub transition_time: Option<f64>,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::param("times", "empty time grid"));
    }
    if times[0] < 0.0 || !times.iter().all(|t| t.is_finite()) {
        return Err(Error::param("times", "times must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("times", "times must be strictly increasing"));
    }
    Ok(())
}

/// Closed-form triple for the `(1, m, -m)` family under pure dephasing with
/// `e = e^{-2Γ_z}`.
pub fn dephasing_triple(m: f64, e: f64) -> CorrelationTriple {
    let chi = e.max(m.abs());
    let mi = paired_log_sum(m) + paired_log_sum(e);
    CorrelationTriple::from_parts(mi, paired_log_sum(chi))
}

/// X-state terms of the evolved `(1, m, -m)` state.
pub fn family_terms(m: f64, t: f64, ch: &ChannelStack) -> Result<measures::XStateTerms> {
    let rho = evolve_bell_diagonal(BellDiagonalParams::frozen_family(m)?, &ch.map(t)?)?;
    let x = XState::from_density_matrix(&rho)
        .ok_or_else(|| Error::NotAState("evolved state lost its X shape".into()))?;
    measures::xstate_terms(&x)
}

/// First time at which the optimal measurement switches between the
/// equatorial and σ_z branches, searched on `times`.
pub fn branch_switch_time(m: f64, times: &[f64], ch: &ChannelStack) -> Result<Option<f64>> {
    check_times(times)?;
    let gap = |t: f64| family_terms(m, t, ch).map(|x| x.d_z - x.d_xy);
    let start = gap(times[0])?;
    let sign = if start >= 0.0 { 1.0 } else { -1.0 };
    let mut failure = None;
    let scan = first_crossing(
        |t| match gap(t) {
            // Vanishing gaps carry no branch information (e.g. product states).
            Ok(v) if v.abs() < GAP_FLOOR => f64::MIN_POSITIVE,
            Ok(v) => sign * v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        times,
        1e-10 * times.last().copied().unwrap_or(1.0).max(1.0),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(scan.root.map(|(t, _)| t))
}

/// Correlation dynamics of the `(1, m, -m)` family.
pub fn correlation_trace(m: f64, times: &[f64], ch: &ChannelStack) -> Result<CorrelationTrace> {
    if !(m.abs() < 1.0) {
        return Err(Error::param("m", "m must lie in (-1,1)"));
    }
    check_times(times)?;
    let triples: Vec<CorrelationTriple> = if ch.is_dephasing_only() {
        let deph = ch.deph.expect("dephasing-only stack");
        times
            .par_iter()
            .map(|&t| Ok(dephasing_triple(m, (-2.0 * channel::big_gamma_z(t, &deph)?).exp())))
            .collect::<Result<_>>()?
    } else {
        times.par_iter().map(|&t| Ok(family_terms(m, t, ch)?.triple())).collect::<Result<_>>()?
    };
    let last = *times.last().expect("non-empty");
    let transition_time = if ch.is_dephasing_only() {
        let deph = ch.deph.expect("dephasing-only stack");
        if m == 0.0 {
            None
        } else {
            deph.validate()?;
            if last > 0.0 { crossing_in(m.abs(), &deph, 0.0, last)? } else { None }
        }
    } else {
        branch_switch_time(m, times, ch)?
    };
    Ok(CorrelationTrace { times: times.to_vec(), triples, transition_time })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DephasingTransition {
    /// First solution of `e^{-2Γ_z(t)} = m`.
    At { time: f64, beyond_horizon: bool },
    /// `e^{-2Γ_z} > m` on the whole horizon and in the long-time limit.
    Never { asymptote: f64 },
}

impl DephasingTransition {
    pub fn time(&self) -> Option<f64> {
        match self {
            DephasingTransition::At { time, .. } => Some(*time),
            DephasingTransition::Never { .. } => None,
        }
    }
}

fn grid_points(span: f64, omega_c: f64) -> usize {
    (20.0 * omega_c * span).ceil().clamp(2000.0, 20_000.0) as usize
}

/// First crossing of `e^{-2Γ_z(t)} = m` on `[lo, hi]`, if any.
fn crossing_in(m: f64, deph: &OhmicDephasing, lo: f64, hi: f64) -> Result<Option<f64>> {
    let target = m.ln();
    let grid = linspace(lo, hi, grid_points(hi - lo, deph.omega_c));
    let mut failure = None;
    let scan = first_crossing(
        |t| match channel::big_gamma_z(t, deph) {
            Ok(g) => -2.0 * g - target,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        &grid,
        1e-10 / deph.omega_c,
    );
    match failure {
        Some(e) => Err(e),
        None => Ok(scan.root.map(|(t, _)| t)),
    }
}

/// Solves `e^{-2Γ_z(t)} = m` for the first crossing.
///
/// When no crossing lies in `[0, horizon]` the long-time value of `Γ_z`
/// decides: either the crossing is certified never to happen, or the search
/// continues on doubling windows past the horizon.
pub fn dephasing_transition_time(m: f64, deph: &OhmicDephasing, horizon: f64) -> Result<DephasingTransition> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::param("m", "m must lie in (0,1)"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param("horizon", format!("{horizon} must be positive")));
    }
    deph.validate()?;
    let search = |lo: f64, hi: f64| crossing_in(m, deph, lo, hi);
    if let Some(time) = search(0.0, horizon)? {
        return Ok(DephasingTransition::At { time, beyond_horizon: false });
    }
    let asymptote = channel::gamma_z_asymptote(deph)?;
    if let Some(a) = asymptote {
        let limit = -2.0 * a - m.ln();
        if limit > 0.0 {
            return Ok(DephasingTransition::Never { asymptote: a });
        }
        if limit == 0.0 {
            return Err(Error::Inconclusive(format!("m = {m} equals the long-time coherence e^(-2Γ_z(∞))")));
        }
    }
    let mut lo = horizon;
    while lo * deph.omega_c < EXTENDED_HORIZON_LIMIT {
        let hi = 2.0 * lo;
        if let Some(time) = search(lo, hi)? {
            return Ok(DephasingTransition::At { time, beyond_horizon: true });
        }
        lo = hi;
    }
    Err(Error::Inconclusive(format!("no crossing for m = {m} before t = {lo}")))
}
