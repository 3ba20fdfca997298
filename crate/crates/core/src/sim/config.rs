//! Scenario configuration: JSON documents with defaults and validation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::presets;
use crate::channel::Geometry;
use crate::error::{Error, Result};
use crate::rate::RadioParams;
use crate::scheduler::{
    exhaustive_count, SearchMode, SolveControls, TaskSpec, DEFAULT_ETA_GRID_POINTS, DEFAULT_EXHAUSTIVE_BUDGET,
    DEFAULT_RANDOM_DRAWS,
};

/// Environment variable overriding the configured seed.
pub const SEED_ENV: &str = "IRSMEC_SEED";

/// Default fixed total data size of the `L1_of_fixed_sum` sweep, in bits.
pub const DEFAULT_SUM_DATA_BITS: f64 = 6.7e6;

/// Mean SNR below which a link cannot carry a task in reasonable time.
const MIN_LINK_SNR: f64 = 1e-6;

/// Quantity varied along a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    /// Common data size of both users, in bits.
    L0,
    /// Data size of user 1 in bits, user 2 getting the rest of
    /// `sum_data_bits`.
    #[serde(rename = "L1_of_fixed_sum")]
    L1OfFixedSum,
    /// Elements per subsurface.
    M,
    /// Number of subsurfaces.
    N,
    /// Computation intensity of user 1, cycles/bit.
    C1,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    #[serde(default = "default_sum_bits")]
    pub sum_data_bits: f64,
}

fn default_sum_bits() -> f64 {
    DEFAULT_SUM_DATA_BITS
}

/// Schemes that can be requested in `benchmarks`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    /// Time-sharing NOMA with the configured solver mode.
    Timeshare,
    /// Time-sharing NOMA with the η line search.
    TimeshareEta,
    /// Time-sharing NOMA with the best of a few random phase vectors.
    RandomPhase,
    Tdma,
    Noma,
    /// Adds the IRS-free counterparts of `timeshare`, `tdma` and `noma`.
    NoIrsVariants,
}

/// Knobs of the phase search other than the mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSettings {
    #[serde(default = "default_budget")]
    pub exhaustive_budget: usize,
    #[serde(default = "default_eta_points")]
    pub eta_grid_points: usize,
    #[serde(default = "default_random_draws")]
    pub random_draws: usize,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            exhaustive_budget: DEFAULT_EXHAUSTIVE_BUDGET,
            eta_grid_points: DEFAULT_ETA_GRID_POINTS,
            random_draws: DEFAULT_RANDOM_DRAWS,
        }
    }
}

fn default_budget() -> usize {
    DEFAULT_EXHAUSTIVE_BUDGET
}
fn default_eta_points() -> usize {
    DEFAULT_ETA_GRID_POINTS
}
fn default_random_draws() -> usize {
    DEFAULT_RANDOM_DRAWS
}

/// A complete Monte-Carlo scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub geometry: Geometry,
    #[serde(default = "default_n")]
    pub n_subsurfaces: usize,
    #[serde(default = "default_m")]
    pub elements_per_subsurface: usize,
    #[serde(default = "default_q")]
    pub phase_levels: u32,
    #[serde(default = "default_radio")]
    pub radio: RadioParams,
    #[serde(default = "default_task")]
    pub task: TaskSpec,
    #[serde(default = "default_mode")]
    pub solver_mode: SearchMode,
    #[serde(default)]
    pub search: SearchSettings,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Reuse each trial's channel stream at every sweep point, so that sweep
    /// points are compared on the same realizations.
    #[serde(default = "default_paired")]
    pub paired_sweep: bool,
    /// Worker threads; `None` uses every available core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default = "default_benchmarks")]
    pub benchmarks: Vec<Benchmark>,
}

fn default_n() -> usize {
    5
}
fn default_m() -> usize {
    20
}
fn default_q() -> u32 {
    4
}
fn default_mode() -> SearchMode {
    SearchMode::Exhaustive
}
fn default_trials() -> usize {
    500
}
fn default_seed() -> u64 {
    1
}
fn default_paired() -> bool {
    true
}
fn default_benchmarks() -> Vec<Benchmark> {
    vec![Benchmark::Timeshare, Benchmark::Tdma, Benchmark::Noma]
}

pub fn default_radio() -> RadioParams {
    RadioParams {
        bandwidth_hz: 250e3,
        noise_density_dbm_hz: -140.0,
        max_power_dbm: [5.0, 5.0],
    }
}

pub fn default_task() -> TaskSpec {
    TaskSpec {
        data_bits: [1e6, 1e6],
        cycles_per_bit: [300.0, 300.0],
        cloud_freq_hz: 5e9,
    }
}

/// System dimensions and task at one sweep point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub value: Option<f64>,
    pub n_subsurfaces: usize,
    pub elements_per_subsurface: usize,
    pub task: TaskSpec,
}

impl ScenarioConfig {
    /// Parses a JSON document and validates it.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::config(origin, e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads a config file, or a shipped preset when `source` names one and
    /// is not an existing path.
    pub fn load(source: &str) -> Result<Self> {
        let path = Path::new(source);
        if !path.exists() {
            if let Some(text) = presets::preset(source) {
                return Self::from_json(text, &format!("preset:{source}"));
            }
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text, source)
    }

    /// Replaces the seed with `IRSMEC_SEED` when that variable is set.
    pub fn apply_env_seed(&mut self) -> Result<()> {
        if let Ok(raw) = std::env::var(SEED_ENV) {
            self.seed = raw
                .trim()
                .parse()
                .map_err(|_| Error::config(SEED_ENV, format!("expected an unsigned 64-bit integer, got {raw:?}")))?;
        }
        Ok(())
    }

    pub fn controls(&self) -> SolveControls {
        SolveControls {
            levels: self.phase_levels,
            exhaustive_budget: self.search.exhaustive_budget,
            eta_grid_points: self.search.eta_grid_points,
            random_draws: self.search.random_draws,
            random_seed: 0,
        }
    }

    /// Every sweep point in order; a single point without a sweep.
    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        let base = SweepPoint {
            value: None,
            n_subsurfaces: self.n_subsurfaces,
            elements_per_subsurface: self.elements_per_subsurface,
            task: self.task.clone(),
        };
        let Some(sweep) = &self.sweep else {
            return vec![base];
        };
        sweep
            .values
            .iter()
            .map(|&v| {
                let mut p = base.clone();
                p.value = Some(v);
                match sweep.variable {
                    SweepVariable::L0 => p.task.data_bits = [v, v],
                    SweepVariable::L1OfFixedSum => p.task.data_bits = [v, sweep.sum_data_bits - v],
                    SweepVariable::M => p.elements_per_subsurface = v as usize,
                    SweepVariable::N => p.n_subsurfaces = v as usize,
                    SweepVariable::C1 => p.task.cycles_per_bit[0] = v,
                }
                p
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.radio.validate()?;
        self.task.validate()?;
        if self.elements_per_subsurface == 0 {
            return Err(Error::config("elements_per_subsurface", "must be >= 1"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be >= 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers", "must be >= 1 when given"));
        }
        if self.benchmarks.is_empty() {
            return Err(Error::config("benchmarks", "must name at least one scheme"));
        }
        if self.search.eta_grid_points < 2 {
            return Err(Error::config("search.eta_grid_points", "must be >= 2"));
        }
        if self.search.random_draws == 0 {
            return Err(Error::config("search.random_draws", "must be >= 1"));
        }
        if let Some(sweep) = &self.sweep {
            validate_sweep(sweep)?;
        }
        for point in self.sweep_points() {
            point.task.validate().map_err(|e| relabel(e, "sweep.values"))?;
            if point.elements_per_subsurface == 0 {
                return Err(Error::config("sweep.values", "M must be >= 1"));
            }
            self.check_budget(point.n_subsurfaces)?;
            self.check_link_budget(&point)?;
        }
        Ok(())
    }

    fn uses_exhaustive(&self) -> bool {
        let timeshare = self.benchmarks.contains(&Benchmark::Timeshare) || self.benchmarks.contains(&Benchmark::Noma);
        self.solver_mode == SearchMode::Exhaustive && timeshare
    }

    fn check_budget(&self, n: usize) -> Result<()> {
        if !self.uses_exhaustive() {
            return Ok(());
        }
        if self.phase_levels == 0 {
            return Err(Error::config(
                "phase_levels",
                "exhaustive search needs a discrete grid (phase_levels >= 1)",
            ));
        }
        let count = exhaustive_count(n, self.phase_levels);
        if count > self.search.exhaustive_budget as f64 {
            return Err(Error::config(
                "solver_mode",
                format!(
                    "{count} phase vectors exceed search.exhaustive_budget = {}; use \"eta\"",
                    self.search.exhaustive_budget
                ),
            ));
        }
        Ok(())
    }

    /// Rejects scenarios whose best-case mean SNR is so low that a TDMA
    /// rate would be essentially zero.
    fn check_link_budget(&self, point: &SweepPoint) -> Result<()> {
        let gains = self.geometry.link_gains()?;
        let noise = self.radio.noise_power_w();
        let powers = self.radio.max_power_w();
        for (k, power) in powers.iter().enumerate() {
            // fully coherent combining of the mean amplitudes
            let reflected = point.n_subsurfaces as f64
                * (point.elements_per_subsurface as f64 * gains.user_irs[k] * gains.irs_ap).sqrt();
            let amplitude = gains.user_ap[k].sqrt() + reflected;
            let snr = power * amplitude * amplitude / noise;
            if !(snr >= MIN_LINK_SNR) {
                return Err(Error::config(
                    format!("radio.max_power_dbm[{k}]"),
                    format!(
                        "mean SNR of user {} is {snr:e}; its TDMA rate would be near zero",
                        k + 1
                    ),
                ));
            }
        }
        Ok(())
    }
}

fn relabel(error: Error, path: &str) -> Error {
    match error {
        Error::Config { path: inner, message } => Error::Config {
            path: path.to_string(),
            message: format!("{inner}: {message}"),
        },
        other => other,
    }
}

fn validate_sweep(sweep: &Sweep) -> Result<()> {
    if sweep.values.is_empty() {
        return Err(Error::config("sweep.values", "must not be empty"));
    }
    for (i, v) in sweep.values.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::config(format!("sweep.values[{i}]"), "must be finite"));
        }
        if matches!(sweep.variable, SweepVariable::M | SweepVariable::N) && !(v.fract() == 0.0 && *v >= 0.0) {
            return Err(Error::config(
                format!("sweep.values[{i}]"),
                "must be a non-negative integer",
            ));
        }
        if sweep.variable == SweepVariable::L1OfFixedSum && !(*v <= sweep.sum_data_bits) {
            return Err(Error::config(
                format!("sweep.values[{i}]"),
                format!("exceeds sweep.sum_data_bits = {}", sweep.sum_data_bits),
            ));
        }
    }
    if sweep.values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::config("sweep.values", "must be strictly increasing"));
    }
    if !(sweep.sum_data_bits.is_finite() && sweep.sum_data_bits >= 0.0) {
        return Err(Error::config("sweep.sum_data_bits", "must be finite and >= 0"));
    }
    Ok(())
}
