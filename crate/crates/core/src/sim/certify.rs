//! Randomized comparison of the closed forms against the oracles.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::experiment::trial_rng;
use crate::channel::{sample_channels, tdma_optimal_phase, PhaseVector, USERS};
use crate::error::Result;
use crate::oracle::{exhaustive_p1_oracle, grid_oracle_p4, lp_oracle_p2, power_grid_oracle_p3};
use crate::rate::{RateTuple, UserOrder};
use crate::scheduler::{solve_p1, time_division_finite, time_division_infinite, SearchMode, SolveControls, TaskSpec};

/// Relative tolerance of every suite.
pub const TOLERANCE: f64 = 1e-9;
/// Grid steps of the finite-capacity oracle.
pub const FINITE_GRID_RESOLUTION: usize = 100_000;
/// Power levels per axis of the full-power check.
pub const POWER_GRID: usize = 50;
/// Grid steps of the inner oracle inside the full-instance check.
pub const SEARCH_GRID_RESOLUTION: usize = 2_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub instances: usize,
    /// Largest relative deviation beyond the oracle's own error bound.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub failures: usize,
    pub passed: bool,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            instances: 0,
            max_deviation: 0.0,
            tolerance: TOLERANCE,
            failures: 0,
            passed: true,
        }
    }

    fn record(&mut self, deviation: f64) {
        self.instances += 1;
        // NaN counts as a failure
        if !(deviation <= self.tolerance) {
            self.failures += 1;
            self.passed = false;
        }
        if deviation > self.max_deviation || deviation.is_nan() {
            self.max_deviation = deviation;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

impl fmt::Display for CertifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            writeln!(
                f,
                "{:<8} {:<10} instances={:<6} max_deviation={:.3e} tolerance={:.0e} failures={}",
                if s.passed { "PASS" } else { "FAIL" },
                s.name,
                s.instances,
                s.max_deviation,
                s.tolerance,
                s.failures
            )?;
        }
        write!(
            f,
            "{}",
            if self.passed {
                "all suites passed"
            } else {
                "certification FAILED"
            }
        )
    }
}

/// `|a − b|` in excess of `bound`, relative to `scale`.
fn excess(a: f64, b: f64, bound: f64, scale: f64) -> f64 {
    ((a - b).abs() - bound).max(0.0) / scale.abs().max(f64::MIN_POSITIVE)
}

/// Random bits and positional rates; NOMA rates never exceed the TDMA
/// rates, and occasionally a data size or NOMA rate is zero.
pub fn random_rate_instance<R: Rng + ?Sized>(rng: &mut R) -> ([f64; USERS], RateTuple) {
    let mut bits = [0.0; USERS];
    let mut td = [0.0; USERS];
    let mut no = [0.0; USERS];
    for k in 0..USERS {
        bits[k] = if rng.random_bool(0.05) {
            0.0
        } else {
            rng.random_range(0.1e6..8e6)
        };
        td[k] = rng.random_range(0.2e6..6e6);
        no[k] = if rng.random_bool(0.05) {
            0.0
        } else {
            td[k] * rng.random_range(0.0..1.0)
        };
    }
    (
        bits,
        RateTuple {
            td,
            no,
            decoding_order: UserOrder::Forward,
        },
    )
}

/// Infinite-capacity closed form against the LP oracle.
pub fn certify_infinite(rng: &mut ChaCha8Rng, instances: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("infinite");
    for _ in 0..instances {
        let (bits, rates) = random_rate_instance(rng);
        let closed = time_division_infinite(bits, &rates)?;
        let oracle = lp_oracle_p2(bits, &rates)?;
        report.record(excess(
            closed.sum_delay,
            oracle.sum_delay,
            oracle.error_bound,
            oracle.sum_delay,
        ));
    }
    Ok(report)
}

/// Compute times for the `i`-th finite-capacity instance: random, just
/// either side of the pure-TDMA boundary, inside the kink region, or zero.
pub fn finite_compute_times<R: Rng + ?Sized>(
    rng: &mut R,
    i: usize,
    bits: [f64; USERS],
    rates: &RateTuple,
) -> [f64; USERS] {
    let solo2 = bits[1] / rates.td[1];
    let t2c = rng.random_range(0.0..1.0);
    match i % 4 {
        0 => [rng.random_range(0.0..2.0 * solo2 + 0.1), t2c],
        1 => {
            let eps = if i % 8 == 1 { 1e-9 } else { -1e-9 };
            [solo2 * (1.0 + eps), t2c]
        }
        2 => {
            let lo = if rates.no[0] > 0.0 {
                ((bits[1] - bits[0] / rates.no[0] * rates.no[1]) / rates.td[1]).max(0.0)
            } else {
                0.0
            };
            let hi = solo2.max(lo);
            [if hi > lo { rng.random_range(lo..hi) } else { lo }, t2c]
        }
        _ => [0.0, 0.0],
    }
}

/// Finite-capacity closed form against the grid oracle.
pub fn certify_finite(rng: &mut ChaCha8Rng, instances: usize, resolution: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("finite");
    for i in 0..instances {
        let (bits, mut rates) = random_rate_instance(rng);
        if i % 4 == 2 {
            // kink instances need a non-negative priority
            let f = rng.random_range(0.5..1.0);
            rates.no = [rates.td[0] * f, rates.td[1] * rng.random_range(1.0 - f..1.0)];
        }
        let compute = finite_compute_times(rng, i, bits, &rates);
        let closed = time_division_finite(bits, &rates, compute)?;
        let oracle = grid_oracle_p4(bits, &rates, compute, resolution)?;
        report.record(excess(
            closed.sum_delay,
            oracle.sum_delay,
            oracle.error_bound,
            oracle.sum_delay,
        ));
    }
    Ok(report)
}

fn random_phases<R: Rng + ?Sized>(rng: &mut R, n: usize, levels: u32) -> Result<PhaseVector> {
    if levels == 0 {
        let phases: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        return Ok(PhaseVector::continuous(&phases));
    }
    let q: Vec<u32> = (0..n).map(|_| rng.random_range(0..levels)).collect();
    PhaseVector::from_levels(&q, levels)
}

/// Full powers against the power grid, user 1 decoded first, on channels
/// drawn from the scenario. Every tenth instance drops the IRS.
pub fn certify_full_power(config: &ScenarioConfig, rng: &mut ChaCha8Rng, instances: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("full_power");
    let gains = config.geometry.link_gains()?;
    for i in 0..instances {
        let mut channels = sample_channels(&gains, config.n_subsurfaces, config.elements_per_subsurface, rng);
        if i % 10 == 9 {
            channels = channels.without_irs();
        }
        let n = channels.n_subsurfaces();
        let phases = random_phases(rng, n, config.phase_levels)?;
        let own = [0, 1].map(|k| tdma_optimal_phase(&channels, k, config.phase_levels));
        let result = power_grid_oracle_p3(
            &channels,
            &phases,
            [&own[0], &own[1]],
            &config.radio,
            config.task.data_bits,
            UserOrder::Forward,
            POWER_GRID,
        )?;
        let deviation = if result.objective > 0.0 {
            (result.objective - result.full_power_objective) / result.objective
        } else {
            0.0
        };
        report.record(deviation);
    }
    Ok(report)
}

/// Exhaustive solver against full enumeration on tiny instances
/// (`N = 1..4`, two phase levels), alternating finite and infinite cloud
/// capacity.
pub fn certify_exhaustive(config: &ScenarioConfig, rng: &mut ChaCha8Rng, instances: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("exhaustive");
    let gains = config.geometry.link_gains()?;
    let controls = SolveControls::new(2);
    for i in 0..instances {
        let n = 1 + i % 4;
        let channels = sample_channels(&gains, n, config.elements_per_subsurface, rng);
        let task = TaskSpec {
            cloud_freq_hz: if i % 2 == 0 {
                config.task.cloud_freq_hz
            } else {
                f64::INFINITY
            },
            ..config.task.clone()
        };
        let solved = solve_p1(&channels, &task, &config.radio, SearchMode::Exhaustive, &controls)?;
        let (oracle, bound) = exhaustive_p1_oracle(&channels, &task, &config.radio, 2, SEARCH_GRID_RESOLUTION)?;
        report.record(excess(solved.delay_sum, oracle.delay_sum, bound, oracle.delay_sum));
    }
    Ok(report)
}

/// Runs all four suites with `instances` samples each. Suites draw from
/// independent streams of the config seed.
pub fn certify(config: &ScenarioConfig, instances: usize) -> Result<CertifyReport> {
    let suites = vec![
        certify_infinite(&mut trial_rng(config.seed, u32::MAX as usize, 0), instances)?,
        certify_finite(
            &mut trial_rng(config.seed, u32::MAX as usize, 1),
            instances,
            FINITE_GRID_RESOLUTION,
        )?,
        certify_full_power(config, &mut trial_rng(config.seed, u32::MAX as usize, 2), instances)?,
        certify_exhaustive(config, &mut trial_rng(config.seed, u32::MAX as usize, 3), instances)?,
    ];
    let passed = suites.iter().all(|s| s.passed);
    Ok(CertifyReport {
        seed: config.seed,
        suites,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_instance_report() {
        let config = ScenarioConfig::load("symmetric").unwrap();
        let report = certify(&config, 1).unwrap();
        assert_eq!(report.suites.len(), 4);
        assert!(report.suites.iter().all(|s| s.instances == 1));
        let text = report.to_string();
        assert!(text.contains("infinite"));
    }

    #[test]
    fn nan_deviation_fails() {
        let mut s = SuiteReport::new("x");
        s.record(f64::NAN);
        assert!(!s.passed);
        assert!(s.max_deviation.is_nan());
    }
}
