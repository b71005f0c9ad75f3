//! Randomized oracle suites comparing closed forms against independent
//! numerical routes.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{self, KappaForm, LorentzianReservoir, MapElements, OhmicDephasing, TempMode};
use crate::correlated::{self, CorrelatedEnvConfig, InteractionSchedule};
use crate::measures::{self, XState};
use crate::pair::{self, ChannelStack};
use crate::random;
use crate::state::{bell_diagonal_state, BellDiagonalParams};
use crate::Result;

pub const DEFAULT_SEED: u64 = 20140101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Analytic X-state discord against the brute-force measurement search.
    Discord,
    /// Single-qubit map against direct integration of the master equation.
    Map,
    /// Closed-form rates, exponents and correlation curves against quadrature
    /// and the generic correlation routine.
    ClosedForms,
    /// Uncorrelated environments against two independent dephasing channels.
    Factorization,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Discord, Suite::Map, Suite::ClosedForms, Suite::Factorization];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Discord => "discord",
            Suite::Map => "map",
            Suite::ClosedForms => "closed-forms",
            Suite::Factorization => "factorization",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name || format!("{s:?}").eq_ignore_ascii_case(name))
    }

    pub fn default_cases(&self) -> usize {
        match self {
            Suite::Discord => 1000,
            Suite::Map => 50,
            Suite::ClosedForms => 200,
            Suite::Factorization => 50,
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Suite::Discord | Suite::Map => 1e-6,
            Suite::ClosedForms => 1e-7,
            Suite::Factorization => 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub seed: u64,
    /// Case count; each suite's default when absent.
    pub n: Option<usize>,
    /// Form of the thermal dissipation term used by the map suite.
    pub kappa_form: KappaForm,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, n: None, kappa_form: KappaForm::Repaired }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    /// Case index of the largest deviation.
    pub worst_case: usize,
    /// Cases where either route returned an error.
    pub errors: Vec<String>,
    pub elapsed_secs: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.max_deviation <= self.tolerance
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<13} cases={:<5} max_dev={:.3e} tol={:.0e} time={:.2}s",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite.name(),
            self.cases,
            self.max_deviation,
            self.tolerance,
            self.elapsed_secs
        )?;
        if let Some(e) = self.errors.first() {
            write!(f, " errors={} first: {e}", self.errors.len())?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }
}

pub fn run(suites: &[Suite], cfg: &ValidationConfig) -> ValidationReport {
    ValidationReport { seed: cfg.seed, suites: suites.iter().map(|s| run_suite(*s, cfg)).collect() }
}

pub fn run_suite(suite: Suite, cfg: &ValidationConfig) -> SuiteReport {
    let n = cfg.n.unwrap_or_else(|| suite.default_cases());
    let start = Instant::now();
    let case = |k: usize| -> Result<f64> {
        // One stream per case keeps results independent of scheduling.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(k as u64 + 1);
        match suite {
            Suite::Discord => discord_case(&mut rng, k),
            Suite::Map => map_case(&mut rng, cfg.kappa_form),
            Suite::ClosedForms => closed_form_case(&mut rng, k),
            Suite::Factorization => factorization_case(&mut rng),
        }
    };
    let outcomes: Vec<Result<f64>> = (0..n).into_par_iter().map(case).collect();
    let mut report = SuiteReport {
        suite,
        cases: n,
        tolerance: suite.tolerance(),
        max_deviation: 0.0,
        worst_case: 0,
        errors: Vec::new(),
        elapsed_secs: 0.0,
    };
    for (k, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(d) if d.is_nan() => report.errors.push(format!("case {k}: NaN deviation")),
            Ok(d) if d > report.max_deviation => {
                report.max_deviation = d;
                report.worst_case = k;
            }
            Ok(_) => {}
            Err(e) => report.errors.push(format!("case {k}: {e}")),
        }
    }
    report.elapsed_secs = start.elapsed().as_secs_f64();
    report
}

fn discord_case(rng: &mut ChaCha8Rng, k: usize) -> Result<f64> {
    let x = if k % 2 == 0 {
        let p = random::random_bell_diagonal(rng);
        XState::from_density_matrix(&bell_diagonal_state(p)?).expect("Bell-diagonal states are X states")
    } else {
        random::random_x_state(rng)
    };
    let analytic = measures::discord_xstate(&x)?;
    let rho = x.to_density_matrix()?;
    let (c, _) = measures::classical_correlations_bruteforce(&rho, measures::DEFAULT_GRID_N, true)?;
    let brute = measures::mutual_information(&rho)? - c;
    Ok((analytic - brute).abs())
}

fn random_bath(rng: &mut ChaCha8Rng) -> Result<OhmicDephasing> {
    let alpha = rng.random_range(0.001..0.1);
    let s = rng.random_range(0.5..4.5);
    match rng.random_range(0..3) {
        0 => OhmicDephasing::high_t(alpha, s, 1.0, rng.random_range(1.0..10.0)),
        1 => OhmicDephasing::new(alpha, s, 1.0, TempMode::GeneralT { omega_t: rng.random_range(0.1..3.0) }),
        _ => OhmicDephasing::new(alpha, s, 1.0, TempMode::ZeroT),
    }
}

fn map_case(rng: &mut ChaCha8Rng, form: KappaForm) -> Result<f64> {
    let res = LorentzianReservoir::from_ratio(
        rng.random_range(0.005..0.5),
        1.0,
        rng.random_range(0.0..20.0),
        rng.random_range(0.0..5.0),
    )?;
    let deph = random_bath(rng)?;
    let omega = rng.random_range(0.0..2.0);
    let t = rng.random_range(0.1..5.0);
    let rho0 = random::random_state(rng, 2);
    let m = channel::map_elements_with(t, Some(&res), Some(&deph), omega, form)?;
    let got = channel::apply_map(&rho0, &m)?;
    let want = channel::master_equation_oracle(&rho0, t, Some(&res), Some(&deph), omega)?;
    Ok((got.matrix() - want.matrix()).iter().map(|v| v.norm()).fold(0.0, f64::max))
}

fn closed_form_case(rng: &mut ChaCha8Rng, k: usize) -> Result<f64> {
    let t = rng.random_range(0.05..30.0);
    match k % 3 {
        0 => {
            let d = OhmicDephasing::high_t(rng.random_range(0.01..0.5), rng.random_range(0.5..5.0), 1.0, 1.0)?;
            let closed = channel::big_gamma_z(t, &d)?;
            let quad = channel::big_gamma_z_quadrature(t, &d)?;
            Ok((closed - quad).abs() / (1.0 + quad.abs()))
        }
        1 => {
            let d = OhmicDephasing::high_t(rng.random_range(0.01..0.5), rng.random_range(0.5..5.0), 1.0, 1.0)?;
            let closed = channel::gamma_z_rate_high_t(t, &d).expect("high-temperature bath");
            let quad = channel::gamma_z_rate(t, &d)?;
            Ok((closed - quad).abs() / (1.0 + quad.abs()))
        }
        _ => {
            let m = rng.random_range(0.01..0.99);
            let deph = random_bath(rng)?;
            let ch = ChannelStack::dephasing(deph)?;
            let closed = pair::dephasing_triple(m, (-2.0 * channel::big_gamma_z(t, &deph)?).exp());
            let rho = pair::evolve_pair(&bell_diagonal_state(BellDiagonalParams::frozen_family(m)?)?, t, &ch)?;
            let generic = measures::correlations(&rho)?;
            Ok([
                closed.mutual_info - generic.mutual_info,
                closed.classical - generic.classical,
                closed.discord - generic.discord,
            ]
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max))
        }
    }
}

fn factorization_case(rng: &mut ChaCha8Rng) -> Result<f64> {
    let s = rng.random_range(0.5..4.0);
    let alpha = rng.random_range(0.01..0.3);
    let c = rng.random_range(0.01..0.9);
    let schedule = if rng.random_bool(0.5) { InteractionSchedule::short() } else { InteractionSchedule::long() };
    let mut cfg = CorrelatedEnvConfig::symmetric(0.0, s, alpha, c, schedule)?;
    cfg.eps1 = rng.random_range(0.0..0.5);
    cfg.eps2 = rng.random_range(0.0..0.5);
    let t = rng.random_range(0.0..schedule.end() * 1.2);
    let bath = OhmicDephasing::new(4.0 * alpha, s, cfg.omega_c, TempMode::ZeroT)?;
    let (t1, t2) = correlated::interaction_clock(t, &schedule);
    let local = |tj: f64, eps: f64| -> Result<MapElements> {
        Ok(MapElements {
            eta_par: 1.0,
            eta_perp: (-channel::big_gamma_z_quadrature(tj, &bath)?).exp(),
            kappa: 0.0,
            phase: 2.0 * eps * cfg.omega_c * t,
        })
    };
    let rho0 = bell_diagonal_state(BellDiagonalParams::new(1.0, -c, c)?)?;
    let want = pair::evolve_generic_pair(&rho0, &local(t1, cfg.eps1)?, &local(t2, cfg.eps2)?)?;
    let got = correlated::rho_correlated(t, &cfg)?;
    Ok((got.matrix() - want.matrix()).iter().map(|v| v.norm()).fold(0.0, f64::max))
}
