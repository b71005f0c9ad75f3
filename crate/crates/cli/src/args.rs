use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use discord_core::channel::{KappaForm, LorentzianReservoir, OhmicDephasing, TempMode};
use discord_core::correlated::{CorrelatedEnvConfig, InteractionSchedule, DEFAULT_EPS};
use discord_core::numeric::roots::linspace;
use discord_core::pair::ChannelStack;
use discord_core::scan::DephasingCriterion;
use discord_core::validation::DEFAULT_SEED;
use discord_core::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Parser)]
#[command(name = "discord", version, about = "Correlation dynamics of two qubits in open environments")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sweeps (all cores by default).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for randomized validation suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Dataset format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Replays the run recorded in a metadata file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

/// The part of an invocation that determines its output, as recorded in
/// metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Run {
    pub seed: u64,
    pub format: Format,
    pub command: Command,
}

impl Run {
    pub fn new(seed: Option<u64>, format: Option<Format>, command: Command) -> Self {
        Run { seed: seed.unwrap_or(DEFAULT_SEED), format: format.unwrap_or(Format::Csv), command }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Correlation dynamics I, C, D on a time grid.
    Trace(TraceArgs),
    /// Sudden-transition time, or time invariance.
    Transition(TransitionArgs),
    /// Two-parameter classification map.
    Scan(ScanArgs),
    /// Datasets behind one of the figure presets (1-7).
    Figure(FigureArgs),
    /// Randomized oracle suites.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Dephasing,
    Thermal,
    Combined,
    Correlated,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Dephasing => "dephasing",
            ModelKind::Thermal => "thermal",
            ModelKind::Combined => "combined",
            ModelKind::Correlated => "correlated",
        }
    }

    pub fn units(&self) -> &'static str {
        match self {
            ModelKind::Dephasing | ModelKind::Correlated => "omega_c t",
            ModelKind::Thermal | ModelKind::Combined => "lambda t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Temperature {
    /// `coth(ω/2ω_T) ≈ 2ω_T/ω`, set by `--temp-scale`.
    High,
    /// Full `coth(ω/2ω_T)`, set by `--omega-t`.
    General,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    /// Qubit 1 on `[0,20]`, qubit 2 on `[20,40]`.
    Short,
    /// Qubit 1 on `[0,100]`, qubit 2 on `[100,200]`.
    Long,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "dephasing")]
    pub model: ModelKind,
    /// Initial-state parameter of the `(1, m, -m)` family.
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    pub m: f64,
    /// Ohmicity of the dephasing bath.
    #[arg(long, default_value_t = 2.5)]
    pub s: f64,
    /// Dephasing coupling.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "high")]
    pub temperature: Temperature,
    /// `2k_BT/ħω_c` in the high-temperature form.
    #[arg(long = "temp-scale", default_value_t = 100.0)]
    pub temp_scale: f64,
    /// `k_BT/ħ` in units of `ω_c`, for the general form.
    #[arg(long = "omega-t", default_value_t = 1.0)]
    pub omega_t: f64,
    /// Coupling ratio `γ₀/λ` of the Lorentzian reservoir.
    #[arg(long = "R", default_value_t = 0.01)]
    pub ratio: f64,
    /// Detuning in units of `λ`.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delta: f64,
    /// Mean photon number.
    #[arg(long = "N", default_value_t = 0.0)]
    pub n_photons: f64,
    /// `ω_c/λ` when both channels act.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Qubit frequency, in the model's time unit.
    #[arg(long, default_value_t = 0.0)]
    pub omega: f64,
    /// Two-mode squeezing of the correlated environments.
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Initial-state parameter of the correlated model.
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    pub c: f64,
    /// Qubit energy gap of the correlated model, in units of `ω_c`.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "short")]
    pub schedule: ScheduleKind,
    /// Explicit windows `t1_start,t1_end,t2_start,t2_end`, overriding `--schedule`.
    #[arg(long, value_delimiter = ',', num_args = 4)]
    pub windows: Option<Vec<f64>>,
}

impl ModelArgs {
    pub fn bath(&self, omega_c: f64) -> Result<OhmicDephasing> {
        let mode = match self.temperature {
            Temperature::High => TempMode::HighT { scale: self.temp_scale },
            Temperature::General => TempMode::GeneralT { omega_t: self.omega_t },
            Temperature::Zero => TempMode::ZeroT,
        };
        OhmicDephasing::new(self.alpha, self.s, omega_c, mode)
    }

    pub fn reservoir(&self) -> Result<LorentzianReservoir> {
        LorentzianReservoir::from_ratio(self.ratio, 1.0, self.delta, self.n_photons)
    }

    pub fn stack(&self) -> Result<ChannelStack> {
        match self.model {
            ModelKind::Dephasing => ChannelStack::new(None, Some(self.bath(1.0)?), self.omega),
            ModelKind::Thermal => ChannelStack::new(Some(self.reservoir()?), None, self.omega),
            ModelKind::Combined => ChannelStack::new(Some(self.reservoir()?), Some(self.bath(self.beta)?), self.omega),
            ModelKind::Correlated => Err(Error::param("model", "correlated model has no local channel stack")),
        }
    }

    pub fn schedule(&self) -> Result<InteractionSchedule> {
        match &self.windows {
            Some(w) if w.len() == 4 => InteractionSchedule::new(w[0], w[1], w[2], w[3]),
            Some(w) => Err(Error::param("windows", format!("expected 4 values, got {}", w.len()))),
            None => Ok(match self.schedule {
                ScheduleKind::Short => InteractionSchedule::short(),
                ScheduleKind::Long => InteractionSchedule::long(),
            }),
        }
    }

    pub fn correlated(&self) -> Result<CorrelatedEnvConfig> {
        let mut cfg = CorrelatedEnvConfig::symmetric(self.r, self.s, self.alpha, self.c, self.schedule()?)?;
        cfg.eps1 = self.eps;
        cfg.eps2 = self.eps;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parameters that describe the chosen model, for metadata.
    pub fn params(&self) -> Result<serde_json::Value> {
        let json = |v: serde_json::Result<serde_json::Value>| v.expect("model parameters serialize");
        Ok(match self.model {
            ModelKind::Dephasing => serde_json::json!({ "m": self.m, "omega": self.omega, "dephasing": json(serde_json::to_value(self.bath(1.0)?)) }),
            ModelKind::Thermal => serde_json::json!({ "m": self.m, "omega": self.omega, "reservoir": json(serde_json::to_value(self.reservoir()?)) }),
            ModelKind::Combined => serde_json::json!({
                "m": self.m,
                "omega": self.omega,
                "beta": self.beta,
                "reservoir": json(serde_json::to_value(self.reservoir()?)),
                "dephasing": json(serde_json::to_value(self.bath(self.beta)?)),
            }),
            ModelKind::Correlated => json(serde_json::to_value(self.correlated()?)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    pub tmin: f64,
    #[arg(long, default_value_t = 12.0)]
    pub tmax: f64,
    /// Number of sample times.
    #[arg(long, default_value_t = 2000)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "linear")]
    pub spacing: Spacing,
}

impl GridArgs {
    pub fn times(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::param("points", "at least 2 sample times are required"));
        }
        if !(self.tmin >= 0.0 && self.tmax > self.tmin && self.tmax.is_finite()) {
            return Err(Error::param("tmax", format!("time range [{}, {}] is empty or negative", self.tmin, self.tmax)));
        }
        Ok(match self.spacing {
            Spacing::Linear => linspace(self.tmin, self.tmax, self.points - 1),
            Spacing::Log => {
                if self.tmin <= 0.0 {
                    return Err(Error::param("tmin", "log spacing needs tmin > 0"));
                }
                let (a, b) = (self.tmin.ln(), self.tmax.ln());
                let n = (self.points - 1) as f64;
                let mut ts: Vec<f64> = (0..self.points).map(|k| (a + (b - a) * k as f64 / n).exp()).collect();
                ts[0] = self.tmin;
                ts[self.points - 1] = self.tmax;
                ts
            }
        })
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TraceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Output file stem.
    #[arg(long, default_value = "trace")]
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionArg {
    LongTime,
    Strict,
}

impl From<CriterionArg> for DephasingCriterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::LongTime => DephasingCriterion::LongTime,
            CriterionArg::Strict => DephasingCriterion::Strict,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TransitionArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Search window, in the model's time unit.
    #[arg(long, default_value_t = 200.0)]
    pub horizon: f64,
    /// Sampling points for the branch-switch search of thermal models.
    #[arg(long, default_value_t = 20000)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "long-time")]
    pub criterion: CriterionArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Decoherence regimes over `(s, ω_c t)` at fixed `m`.
    Fig2a,
    /// Time-invariance over `(s, m)`.
    Fig2b,
    /// Correlated environments over `(s, c)`.
    Fig7a,
    /// Correlated environments over `(r, c)`.
    Fig7b,
    /// Correlated environments over `(r, s)`.
    Fig7c,
    /// Correlated environments over `(α, c)`.
    Fig7d,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScanArgs {
    #[arg(long, value_enum, default_value = "fig2b")]
    pub preset: Preset,
    #[arg(long = "x-lo", allow_hyphen_values = true)]
    pub x_lo: Option<f64>,
    #[arg(long = "x-hi", allow_hyphen_values = true)]
    pub x_hi: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub nx: usize,
    #[arg(long = "y-lo", allow_hyphen_values = true)]
    pub y_lo: Option<f64>,
    #[arg(long = "y-hi", allow_hyphen_values = true)]
    pub y_hi: Option<f64>,
    #[arg(long, default_value_t = 64)]
    pub ny: usize,
    /// `α·2k_BT/ħω_c` for the dephasing presets.
    #[arg(long, default_value_t = 1.0)]
    pub normalization: f64,
    /// Initial-state parameter for the regime map.
    #[arg(long, default_value_t = 0.1)]
    pub m: f64,
    #[arg(long, default_value_t = 200.0)]
    pub horizon: f64,
    #[arg(long, value_enum, default_value = "long-time")]
    pub criterion: CriterionArg,
    #[arg(long, default_value = "scan")]
    pub name: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FigureArgs {
    /// Figure number.
    #[arg(value_parser = clap::value_parser!(u8).range(1..=7))]
    pub n: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KappaArg {
    Repaired,
    Literal,
}

impl From<KappaArg> for KappaForm {
    fn from(k: KappaArg) -> Self {
        match k {
            KappaArg::Repaired => KappaForm::Repaired,
            KappaArg::Literal => KappaForm::Literal,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ValidateArgs {
    /// Suites to run (discord, map, closed-forms, factorization); all by default.
    #[arg(long = "suite")]
    pub suites: Vec<String>,
    /// Cases per suite.
    #[arg(long)]
    pub n: Option<usize>,
    /// Form of the thermal dissipation term fed to the map suite.
    #[arg(long = "kappa-form", value_enum, default_value = "repaired")]
    pub kappa_form: KappaArg,
}
