//! Monte-Carlo driver with common random numbers across schemes.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Benchmark, ScenarioConfig, SweepPoint};
use crate::channel::{sample_channels, ChannelSet};
use crate::error::{Error, Result};
use crate::scheduler::{noma_benchmark, solve_p1, tdma_benchmark, Schedule, SearchMode};

/// A scheme evaluated on every trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Timeshare,
    TimeshareEta,
    RandomPhase,
    Tdma,
    Noma,
    TimeshareNoIrs,
    TdmaNoIrs,
    NomaNoIrs,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Timeshare => "timeshare",
            Scheme::TimeshareEta => "timeshare_eta",
            Scheme::RandomPhase => "random_phase",
            Scheme::Tdma => "tdma",
            Scheme::Noma => "noma",
            Scheme::TimeshareNoIrs => "timeshare_no_irs",
            Scheme::TdmaNoIrs => "tdma_no_irs",
            Scheme::NomaNoIrs => "noma_no_irs",
        }
    }

    /// Schemes requested by a benchmark list, in canonical order.
    pub fn from_benchmarks(benchmarks: &[Benchmark]) -> Vec<Scheme> {
        let has = |b| benchmarks.contains(&b);
        let mut out = Vec::new();
        for (b, s) in [
            (Benchmark::Timeshare, Scheme::Timeshare),
            (Benchmark::TimeshareEta, Scheme::TimeshareEta),
            (Benchmark::RandomPhase, Scheme::RandomPhase),
            (Benchmark::Tdma, Scheme::Tdma),
            (Benchmark::Noma, Scheme::Noma),
        ] {
            if has(b) {
                out.push(s);
            }
        }
        if has(Benchmark::NoIrsVariants) {
            for (b, s) in [
                (Benchmark::Timeshare, Scheme::TimeshareNoIrs),
                (Benchmark::Tdma, Scheme::TdmaNoIrs),
                (Benchmark::Noma, Scheme::NomaNoIrs),
            ] {
                if has(b) {
                    out.push(s);
                }
            }
        }
        out
    }
}

/// Every scheme's schedule on one channel realization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub sweep_index: usize,
    pub sweep_value: Option<f64>,
    pub trial: usize,
    pub results: Vec<(Scheme, Schedule)>,
}

impl TrialOutcome {
    pub fn schedule(&self, scheme: Scheme) -> Option<&Schedule> {
        self.results.iter().find(|(s, _)| *s == scheme).map(|(_, r)| r)
    }
}

/// One aggregated line of output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub sweep_value: Option<f64>,
    pub scheme: String,
    pub mean_delay_s: f64,
    pub stderr_s: f64,
    pub mean_tno_fraction: f64,
    pub trials: usize,
}

/// Random stream of one trial: the config seed with a stream id built from
/// the sweep and trial indices.
pub fn trial_rng(seed: u64, sweep_index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((sweep_index as u64) << 32) | trial as u64);
    rng
}

fn run_trial(
    config: &ScenarioConfig,
    schemes: &[Scheme],
    point: &SweepPoint,
    sweep_index: usize,
    trial: usize,
) -> Result<TrialOutcome> {
    let gains = config.geometry.link_gains()?;
    let stream = if config.paired_sweep { 0 } else { sweep_index };
    let mut rng = trial_rng(config.seed, stream, trial);
    let channels = sample_channels(&gains, point.n_subsurfaces, point.elements_per_subsurface, &mut rng);
    let mut controls = config.controls();
    controls.random_seed = rng.next_u64();
    let bare: ChannelSet = channels.without_irs();

    let task = &point.task;
    let radio = &config.radio;
    let mode = config.solver_mode;
    let results = schemes
        .iter()
        .map(|&scheme| {
            let schedule = match scheme {
                Scheme::Timeshare => solve_p1(&channels, task, radio, mode, &controls),
                Scheme::TimeshareEta => solve_p1(&channels, task, radio, SearchMode::Eta, &controls),
                Scheme::RandomPhase => solve_p1(&channels, task, radio, SearchMode::Random, &controls),
                Scheme::Tdma => tdma_benchmark(&channels, task, radio, controls.levels),
                Scheme::Noma => noma_benchmark(&channels, task, radio, mode, &controls),
                Scheme::TimeshareNoIrs => solve_p1(&bare, task, radio, mode, &controls),
                Scheme::TdmaNoIrs => tdma_benchmark(&bare, task, radio, controls.levels),
                Scheme::NomaNoIrs => noma_benchmark(&bare, task, radio, mode, &controls),
            };
            schedule.map(|s| (scheme, s))
        })
        .collect::<Result<_>>()?;
    Ok(TrialOutcome {
        sweep_index,
        sweep_value: point.value,
        trial,
        results,
    })
}

/// Runs every (sweep point, trial) pair on a pool of `config.workers`
/// threads. Outcomes come back ordered by sweep point, then trial, and do
/// not depend on the worker count.
pub fn run_trials(config: &ScenarioConfig) -> Result<Vec<TrialOutcome>> {
    config.validate()?;
    let schemes = Scheme::from_benchmarks(&config.benchmarks);
    let points = config.sweep_points();
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|s| (0..config.trials).map(move |t| (s, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        jobs.par_iter()
            .map(|&(s, t)| run_trial(config, &schemes, &points[s], s, t))
            .collect()
    })
}

/// Mean, standard error and mean NOMA share per (sweep point, scheme).
pub fn aggregate(config: &ScenarioConfig, outcomes: &[TrialOutcome]) -> Vec<ResultRow> {
    let schemes = Scheme::from_benchmarks(&config.benchmarks);
    let mut rows = Vec::new();
    for (index, point) in config.sweep_points().iter().enumerate() {
        let trials: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.sweep_index == index).collect();
        for &scheme in &schemes {
            let schedules: Vec<&Schedule> = trials.iter().filter_map(|o| o.schedule(scheme)).collect();
            let n = schedules.len();
            if n == 0 {
                continue;
            }
            let delays: Vec<f64> = schedules.iter().map(|s| s.delay_sum).collect();
            let mean = delays.iter().sum::<f64>() / n as f64;
            let stderr = if n > 1 {
                let var = delays.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            } else {
                0.0
            };
            let tno = schedules.iter().map(|s| s.time_division.noma_fraction()).sum::<f64>() / n as f64;
            rows.push(ResultRow {
                sweep_value: point.value,
                scheme: scheme.name().to_string(),
                mean_delay_s: mean,
                stderr_s: stderr,
                mean_tno_fraction: tno,
                trials: n,
            });
        }
    }
    rows
}

/// Runs all trials and aggregates them.
pub fn run_experiment(config: &ScenarioConfig) -> Result<Vec<ResultRow>> {
    let outcomes = run_trials(config)?;
    Ok(aggregate(config, &outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(trials: usize) -> ScenarioConfig {
        let mut c = ScenarioConfig::load("symmetric").unwrap();
        c.trials = trials;
        c.benchmarks = vec![
            Benchmark::Timeshare,
            Benchmark::Tdma,
            Benchmark::Noma,
            Benchmark::NoIrsVariants,
        ];
        c
    }

    #[test]
    fn scheme_order_is_canonical() {
        let s = Scheme::from_benchmarks(&[Benchmark::NoIrsVariants, Benchmark::Noma, Benchmark::Timeshare]);
        assert_eq!(
            s,
            vec![
                Scheme::Timeshare,
                Scheme::Noma,
                Scheme::TimeshareNoIrs,
                Scheme::NomaNoIrs
            ]
        );
    }

    #[test]
    fn trial_streams_differ() {
        let a = trial_rng(1, 0, 0).next_u64();
        assert_ne!(a, trial_rng(1, 0, 1).next_u64());
        assert_ne!(a, trial_rng(1, 1, 0).next_u64());
        assert_eq!(a, trial_rng(1, 0, 0).next_u64());
    }

    #[test]
    fn rows_cover_points_and_schemes() {
        let c = config(3);
        let outcomes = run_trials(&c).unwrap();
        let points = c.sweep_points().len();
        assert_eq!(outcomes.len(), 3 * points);
        let rows = aggregate(&c, &outcomes);
        assert_eq!(rows.len(), points * 6);
        for r in &rows {
            assert_eq!(r.trials, 3);
            assert!((0.0..=1.0).contains(&r.mean_tno_fraction));
            assert!(r.stderr_s >= 0.0);
        }
    }

    #[test]
    fn paired_sweep_reuses_channels() {
        let mut c = ScenarioConfig::load("asymmetric_intensity").unwrap();
        c.trials = 2;
        let rates = |c: &ScenarioConfig| -> Vec<[f64; 2]> {
            run_trials(c)
                .unwrap()
                .iter()
                .map(|o| o.schedule(Scheme::Tdma).unwrap().rates.td)
                .collect()
        };
        let paired = rates(&c);
        assert_eq!(paired[0], paired[2]);
        assert_ne!(paired[0], paired[1]);
        c.paired_sweep = false;
        let independent = rates(&c);
        assert_eq!(independent[0], paired[0]);
        assert_ne!(independent[0], independent[2]);
    }

    #[test]
    fn single_trial_has_zero_stderr() {
        let mut c = config(1);
        c.sweep = None;
        let rows = run_experiment(&c).unwrap();
        assert!(rows.iter().all(|r| r.stderr_s == 0.0 && r.sweep_value.is_none()));
    }
}
