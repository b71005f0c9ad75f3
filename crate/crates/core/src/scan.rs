//! Classification of parameter points as time-invariant or frozen, and
//! two-dimensional region maps built from those classifications.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::OhmicDephasing;
use crate::correlated::{self, CorrelatedEnvConfig, CorrelatedTransition, InteractionSchedule};
use crate::pair::{self, DephasingTransition};
use crate::{Error, Result};

pub const MIN_GRID: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassKind {
    TimeInvariant,
    Frozen { transition_time: f64 },
    Inconclusive,
}

impl ClassKind {
    pub fn label(&self) -> &'static str {
        match self {
            ClassKind::TimeInvariant => "time_invariant",
            ClassKind::Frozen { .. } => "frozen",
            ClassKind::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Evidence {
    /// Long-time limit of the decoherence exponent, when finite.
    pub asymptote: Option<f64>,
    /// Grid bracket of the reported crossing.
    pub bracket: Option<(f64, f64)>,
    /// Smallest sampled distance from the transition condition.
    pub min_gap: Option<f64>,
    /// First crossing of the finite-time condition, when it differs from the
    /// long-time verdict.
    pub transient_crossing: Option<f64>,
    /// Set when the crossing lies past the search horizon.
    pub beyond_horizon: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: ClassKind,
    pub horizon: f64,
    pub evidence: Evidence,
}

impl Classification {
    pub fn is_time_invariant(&self) -> bool {
        self.kind == ClassKind::TimeInvariant
    }

    pub fn transition_time(&self) -> Option<f64> {
        match self.kind {
            ClassKind::Frozen { transition_time } => Some(transition_time),
            _ => None,
        }
    }

    fn inconclusive(horizon: f64, note: String) -> Self {
        Self { kind: ClassKind::Inconclusive, horizon, evidence: Evidence { note: Some(note), ..Evidence::default() } }
    }
}

/// How the dephasing model decides time invariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DephasingCriterion {
    /// Compares `m` with the long-time coherence `e^{-2Γ_z(∞)}`.
    #[default]
    LongTime,
    /// Uses the first finite-time solution of `e^{-2Γ_z(t)} = m`.
    Strict,
}

/// High-temperature dephasing bath with `α·2k_BT/ħω_c = normalization` and
/// `ω_c = 1`.
pub fn normalized_bath(s: f64, normalization: f64) -> Result<OhmicDephasing> {
    OhmicDephasing::high_t(normalization, s, 1.0, 1.0)
}

pub fn classify_dephasing(
    s: f64,
    m: f64,
    normalization: f64,
    horizon: f64,
    criterion: DephasingCriterion,
) -> Result<Classification> {
    let deph = normalized_bath(s, normalization)?;
    classify_dephasing_bath(&deph, m, horizon, criterion)
}

pub fn classify_dephasing_bath(
    deph: &OhmicDephasing,
    m: f64,
    horizon: f64,
    criterion: DephasingCriterion,
) -> Result<Classification> {
    let found = match pair::dephasing_transition_time(m, deph, horizon) {
        Err(Error::Inconclusive(note)) => return Ok(Classification::inconclusive(horizon, note)),
        other => other?,
    };
    let asymptote = crate::channel::gamma_z_asymptote(deph)?;
    let mut evidence = Evidence { asymptote, ..Evidence::default() };
    let kind = match (found, criterion) {
        (DephasingTransition::Never { .. }, _) => ClassKind::TimeInvariant,
        (DephasingTransition::At { time, beyond_horizon }, DephasingCriterion::Strict) => {
            evidence.beyond_horizon = beyond_horizon;
            ClassKind::Frozen { transition_time: time }
        }
        (DephasingTransition::At { time, beyond_horizon }, DephasingCriterion::LongTime) => {
            match asymptote {
                Some(a) if (-2.0 * a).exp() > m => {
                    evidence.transient_crossing = Some(time);
                    ClassKind::TimeInvariant
                }
                _ => {
                    evidence.beyond_horizon = beyond_horizon;
                    ClassKind::Frozen { transition_time: time }
                }
            }
        }
    };
    Ok(Classification { kind, horizon, evidence })
}

pub fn classify_correlated(cfg: &CorrelatedEnvConfig, horizon: f64) -> Result<Classification> {
    let out = correlated::correlated_transition_time(cfg, horizon)?;
    let (kind, evidence) = match out {
        CorrelatedTransition::At { time, bracket } => {
            (ClassKind::Frozen { transition_time: time }, Evidence { bracket: Some(bracket), ..Evidence::default() })
        }
        CorrelatedTransition::Never { min_gap } => {
            (ClassKind::TimeInvariant, Evidence { min_gap: Some(min_gap), ..Evidence::default() })
        }
        CorrelatedTransition::NearMiss { min_gap, at } => (
            ClassKind::Inconclusive,
            Evidence {
                min_gap: Some(min_gap),
                note: Some(format!("condition approached within {min_gap:e} at t = {at}")),
                ..Evidence::default()
            },
        ),
    };
    Ok(Classification { kind, horizon, evidence })
}

/// A named parameter axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    /// Excludes `lo`, sampling `(lo, hi]` in `n` equal steps.
    #[serde(default)]
    pub open_lower: bool,
}

impl AxisSpec {
    pub fn closed(name: &str, lo: f64, hi: f64, n: usize) -> Self {
        Self { name: name.into(), lo, hi, n, open_lower: false }
    }

    pub fn open_lower(name: &str, lo: f64, hi: f64, n: usize) -> Self {
        Self { name: name.into(), lo, hi, n, open_lower: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_GRID {
            return Err(Error::param("grid", format!("axis {} has {} < {MIN_GRID} points", self.name, self.n)));
        }
        if !(self.lo.is_finite() && self.hi.is_finite() && self.hi > self.lo) {
            return Err(Error::param("grid", format!("axis {} has empty range [{}, {}]", self.name, self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        if self.open_lower {
            (1..=self.n).map(|k| if k == self.n { self.hi } else { self.lo + span * k as f64 / self.n as f64 }).collect()
        } else {
            let d = (self.n - 1) as f64;
            (0..self.n).map(|k| if k + 1 == self.n { self.hi } else { self.lo + span * k as f64 / d }).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Cells stored row by row: `cells[iy * nx + ix]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap<C> {
    pub x_axis: Axis,
    pub y_axis: Axis,
    pub cells: Vec<C>,
    pub metadata: BTreeMap<String, f64>,
}

impl<C> RegionMap<C> {
    pub fn nx(&self) -> usize {
        self.x_axis.values.len()
    }

    pub fn ny(&self) -> usize {
        self.y_axis.values.len()
    }

    pub fn get(&self, ix: usize, iy: usize) -> &C {
        &self.cells[iy * self.nx() + ix]
    }

    /// `(x, y, cell)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, &C)> {
        let nx = self.nx();
        self.cells.iter().enumerate().map(move |(k, c)| (self.x_axis.values[k % nx], self.y_axis.values[k / nx], c))
    }
}

/// Evaluates `classifier(x, y)` on every grid point in parallel. Cell order
/// is fixed by the grid, so the result does not depend on the thread count.
pub fn region_scan_2d<F>(
    x: &AxisSpec,
    y: &AxisSpec,
    fixed: BTreeMap<String, f64>,
    horizon: f64,
    classifier: F,
) -> Result<RegionMap<Classification>>
where
    F: Fn(f64, f64) -> Result<Classification> + Sync,
{
    x.validate()?;
    y.validate()?;
    let xs = x.values();
    let ys = y.values();
    let nx = xs.len();
    let cells = (0..xs.len() * ys.len())
        .into_par_iter()
        .map(|k| {
            let (xv, yv) = (xs[k % nx], ys[k / nx]);
            classifier(xv, yv).unwrap_or_else(|e| Classification::inconclusive(horizon, e.to_string()))
        })
        .collect();
    let mut metadata = fixed;
    metadata.insert("horizon".into(), horizon);
    Ok(RegionMap {
        x_axis: Axis { name: x.name.clone(), values: xs },
        y_axis: Axis { name: y.name.clone(), values: ys },
        cells,
        metadata,
    })
}

/// Time-invariance map over ohmicity `s` (x) and initial-state parameter `m` (y).
pub fn dephasing_region(
    s_axis: &AxisSpec,
    m_axis: &AxisSpec,
    normalization: f64,
    horizon: f64,
    criterion: DephasingCriterion,
) -> Result<RegionMap<Classification>> {
    let fixed = BTreeMap::from([("normalization".to_string(), normalization)]);
    region_scan_2d(s_axis, m_axis, fixed, horizon, |s, m| classify_dephasing(s, m, normalization, horizon, criterion))
}

/// The four correlated-environment maps, each sweeping two of `(s, c, r, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelatedPanel {
    /// `s` against `c` at `α = 0.2`, `r = 0.5`.
    OhmicityState,
    /// `r` against `c` at `α = 0.2`, `s = 2.5`.
    SqueezingState,
    /// `r` against `s` at `α = 0.2`, `c = 0.1`.
    SqueezingOhmicity,
    /// `α` against `c` at `s = 2.5`, `r = 0.5`.
    CouplingState,
}

impl CorrelatedPanel {
    pub const ALL: [CorrelatedPanel; 4] = [
        CorrelatedPanel::OhmicityState,
        CorrelatedPanel::SqueezingState,
        CorrelatedPanel::SqueezingOhmicity,
        CorrelatedPanel::CouplingState,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            CorrelatedPanel::OhmicityState => "a",
            CorrelatedPanel::SqueezingState => "b",
            CorrelatedPanel::SqueezingOhmicity => "c",
            CorrelatedPanel::CouplingState => "d",
        }
    }

    /// Default axes with `n` points each.
    pub fn axes(&self, n: usize) -> (AxisSpec, AxisSpec) {
        let c_axis = AxisSpec::open_lower("c", 0.0, 0.5, n);
        let r_axis = AxisSpec::closed("r", 0.0, 1.5, n);
        let s_axis = AxisSpec::closed("s", 0.5, 5.0, n);
        match self {
            CorrelatedPanel::OhmicityState => (s_axis, c_axis),
            CorrelatedPanel::SqueezingState => (r_axis, c_axis),
            CorrelatedPanel::SqueezingOhmicity => (r_axis, s_axis),
            CorrelatedPanel::CouplingState => (AxisSpec::open_lower("alpha", 0.0, 0.5, n), c_axis),
        }
    }

    /// Fixed `(s, c, r, α)` values; the swept ones are overwritten per cell.
    pub fn fixed(&self) -> BTreeMap<String, f64> {
        let pairs: &[(&str, f64)] = match self {
            CorrelatedPanel::OhmicityState => &[("alpha", 0.2), ("r", 0.5)],
            CorrelatedPanel::SqueezingState => &[("alpha", 0.2), ("s", 2.5)],
            CorrelatedPanel::SqueezingOhmicity => &[("alpha", 0.2), ("c", 0.1)],
            CorrelatedPanel::CouplingState => &[("s", 2.5), ("r", 0.5)],
        };
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn config(&self, x: f64, y: f64, schedule: InteractionSchedule) -> Result<CorrelatedEnvConfig> {
        let (s, c, r, alpha) = match self {
            CorrelatedPanel::OhmicityState => (x, y, 0.5, 0.2),
            CorrelatedPanel::SqueezingState => (2.5, y, x, 0.2),
            CorrelatedPanel::SqueezingOhmicity => (y, 0.1, x, 0.2),
            CorrelatedPanel::CouplingState => (2.5, y, 0.5, x),
        };
        CorrelatedEnvConfig::symmetric(r, s, alpha, c, schedule)
    }
}

pub fn correlated_region(
    panel: CorrelatedPanel,
    x_axis: &AxisSpec,
    y_axis: &AxisSpec,
    schedule: InteractionSchedule,
    horizon: f64,
) -> Result<RegionMap<Classification>> {
    let mut fixed = panel.fixed();
    fixed.insert("t1_start".into(), schedule.t1_start);
    fixed.insert("t1_end".into(), schedule.t1_end);
    fixed.insert("t2_start".into(), schedule.t2_start);
    fixed.insert("t2_end".into(), schedule.t2_end);
    region_scan_2d(x_axis, y_axis, fixed, horizon, |x, y| classify_correlated(&panel.config(x, y, schedule)?, horizon))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandscapeLabel {
    /// Before the transition: classical correlations decay, discord is frozen.
    ClassicalDecoherence,
    /// After the transition: discord decays, classical correlations are frozen.
    QuantumDecoherence,
    /// No transition at any time for this ohmicity.
    TimeInvariant,
    Inconclusive,
}

impl LandscapeLabel {
    pub fn label(&self) -> &'static str {
        match self {
            LandscapeLabel::ClassicalDecoherence => "classical_decoherence",
            LandscapeLabel::QuantumDecoherence => "quantum_decoherence",
            LandscapeLabel::TimeInvariant => "time_invariant",
            LandscapeLabel::Inconclusive => "inconclusive",
        }
    }
}

/// Decoherence regime on the `(s, ω_c t)` plane for fixed `m`.
pub fn decoherence_landscape(
    s_axis: &AxisSpec,
    t_axis: &AxisSpec,
    m: f64,
    normalization: f64,
) -> Result<RegionMap<LandscapeLabel>> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::param("m", "m must lie in (0,1)"));
    }
    s_axis.validate()?;
    t_axis.validate()?;
    let ss = s_axis.values();
    let ts = t_axis.values();
    let horizon = t_axis.hi;
    let columns: Vec<Option<Option<f64>>> = ss
        .par_iter()
        .map(|&s| {
            let deph = normalized_bath(s, normalization).ok()?;
            match pair::dephasing_transition_time(m, &deph, horizon).ok()? {
                DephasingTransition::At { time, .. } => Some(Some(time)),
                DephasingTransition::Never { .. } => Some(None),
            }
        })
        .collect();
    let nx = ss.len();
    let cells = (0..nx * ts.len())
        .map(|k| {
            let t = ts[k / nx];
            match columns[k % nx] {
                None => LandscapeLabel::Inconclusive,
                Some(None) => LandscapeLabel::TimeInvariant,
                Some(Some(tt)) if t < tt => LandscapeLabel::ClassicalDecoherence,
                Some(Some(_)) => LandscapeLabel::QuantumDecoherence,
            }
        })
        .collect();
    let metadata = BTreeMap::from([("m".to_string(), m), ("normalization".to_string(), normalization)]);
    Ok(RegionMap {
        x_axis: Axis { name: s_axis.name.clone(), values: ss },
        y_axis: Axis { name: t_axis.name.clone(), values: ts },
        cells,
        metadata,
    })
}
