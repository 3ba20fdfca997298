//! Outer search over scheduling order, decoding order and NOMA phases.

use std::borrow::Cow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::candidates::{
    phase_candidates_eta, phase_candidates_exhaustive, phase_candidates_random, ExhaustivePhases,
    DEFAULT_ETA_GRID_POINTS, DEFAULT_EXHAUSTIVE_BUDGET,
};
use super::division::{time_division_finite, time_division_infinite, transfer_time};
use super::{compute_delays, Schedule, TaskSpec, TimeDivision};
use crate::channel::{effective_gain, tdma_optimal_phase, ChannelSet, PhaseVector, USERS};
use crate::error::{Error, Result};
use crate::rate::{noma_priority, noma_rates, tdma_rate, RadioParams, RateTuple, UserOrder};

pub const DEFAULT_RANDOM_DRAWS: usize = 5;

/// How NOMA phase candidates are generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Every vector of the discrete grid.
    Exhaustive,
    /// Line search between the two users' TDMA phases, then quantization.
    Eta,
    /// Best of a few uniform random grid vectors.
    Random,
}

/// Knobs of the phase search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveControls {
    /// Phase levels `Q` (0 = unquantized).
    pub levels: u32,
    pub exhaustive_budget: usize,
    pub eta_grid_points: usize,
    pub random_draws: usize,
    pub random_seed: u64,
}

impl SolveControls {
    pub fn new(levels: u32) -> Self {
        SolveControls {
            levels,
            exhaustive_budget: DEFAULT_EXHAUSTIVE_BUDGET,
            eta_grid_points: DEFAULT_ETA_GRID_POINTS,
            random_draws: DEFAULT_RANDOM_DRAWS,
            random_seed: 0,
        }
    }
}

/// Quantities shared by every candidate: full powers, the TDMA rates at
/// each user's own optimal phase, and the compute times.
struct Setup {
    powers: [f64; USERS],
    tdma_phases: [PhaseVector; USERS],
    r_td: [f64; USERS],
    compute: [f64; USERS],
    bits: [f64; USERS],
    infinite: bool,
}

fn setup(channels: &ChannelSet, task: &TaskSpec, params: &RadioParams, levels: u32) -> Result<Setup> {
    let powers = params.max_power_w();
    let tdma_phases = [0, 1].map(|k| tdma_optimal_phase(channels, k, levels));
    let mut r_td = [0.0; USERS];
    for k in 0..USERS {
        let gain = effective_gain(channels, k, &tdma_phases[k])?;
        r_td[k] = tdma_rate(powers[k], gain, params);
        if !(r_td[k] > 0.0) {
            return Err(Error::ZeroTdmaRate { user: k });
        }
    }
    Ok(Setup {
        powers,
        tdma_phases,
        r_td,
        compute: task.compute_times(),
        bits: task.data_bits,
        infinite: task.is_infinite_capacity(),
    })
}

enum Candidates {
    Grid(ExhaustivePhases),
    List(Vec<PhaseVector>),
}

impl Candidates {
    fn len(&self) -> usize {
        match self {
            Candidates::Grid(g) => g.count(),
            Candidates::List(v) => v.len(),
        }
    }

    fn get(&self, index: usize) -> Cow<'_, PhaseVector> {
        match self {
            Candidates::Grid(g) => Cow::Owned(g.vector_at(index)),
            Candidates::List(v) => Cow::Borrowed(&v[index]),
        }
    }
}

fn candidates(channels: &ChannelSet, setup: &Setup, mode: SearchMode, controls: &SolveControls) -> Result<Candidates> {
    let n = channels.n_subsurfaces();
    Ok(match mode {
        SearchMode::Exhaustive => Candidates::Grid(phase_candidates_exhaustive(
            n,
            controls.levels,
            controls.exhaustive_budget,
        )?),
        SearchMode::Eta => Candidates::List(phase_candidates_eta(
            &setup.tdma_phases[0],
            &setup.tdma_phases[1],
            controls.eta_grid_points,
            controls.levels,
        )?),
        SearchMode::Random => {
            if controls.random_draws == 0 {
                return Err(Error::Domain("random search needs at least one draw".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(controls.random_seed);
            Candidates::List(phase_candidates_random(
                n,
                controls.levels,
                controls.random_draws,
                &mut rng,
            ))
        }
    })
}

/// Division, sum delay and λ of one positional evaluation.
type Evaluation = Option<(TimeDivision, f64, f64)>;

#[derive(Clone, Copy, Debug)]
struct Best {
    delay: f64,
    order: UserOrder,
    decoding: UserOrder,
    index: usize,
    division: TimeDivision,
    lambda: f64,
    r_no: [f64; USERS],
}

impl Best {
    fn precedes(&self, other: &Best) -> bool {
        match self.delay.total_cmp(&other.delay) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => {
                (self.order, self.decoding, self.index) < (other.order, other.decoding, other.index)
            }
        }
    }
}

fn pick(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.precedes(&a) { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

fn permute<T: Copy>(values: [T; USERS], order: UserOrder) -> [T; USERS] {
    order.users().map(|k| values[k])
}

/// Evaluates every (candidate, decoding order, scheduling order) triple and
/// keeps the minimum delay. Ties go to the smaller
/// (scheduling order, decoding order, candidate index).
fn search<F>(
    channels: &ChannelSet,
    setup: &Setup,
    params: &RadioParams,
    candidates: &Candidates,
    evaluate: F,
) -> Result<Option<Best>>
where
    F: Fn(&Setup, [f64; USERS], &RateTuple, [f64; USERS]) -> Result<Evaluation> + Sync,
{
    (0..candidates.len())
        .into_par_iter()
        .with_min_len(32)
        .map(|index| -> Result<Option<Best>> {
            let phases = candidates.get(index);
            let gains = [
                effective_gain(channels, 0, &phases)?,
                effective_gain(channels, 1, &phases)?,
            ];
            let mut best = None;
            for decoding in UserOrder::ALL {
                let r_no = noma_rates(setup.powers, gains, decoding, params);
                let rates = RateTuple {
                    td: setup.r_td,
                    no: r_no,
                    decoding_order: decoding,
                };
                for order in UserOrder::ALL {
                    let evaluation = evaluate(
                        setup,
                        permute(setup.bits, order),
                        &rates.permuted(order),
                        permute(setup.compute, order),
                    )?;
                    if let Some((division, delay, lambda)) = evaluation {
                        best = pick(
                            best,
                            Some(Best {
                                delay,
                                order,
                                decoding,
                                index,
                                division,
                                lambda,
                                r_no,
                            }),
                        );
                    }
                }
            }
            Ok(best)
        })
        .try_reduce(|| None, |a, b| Ok(pick(a, b)))
}

fn into_schedule(setup: &Setup, best: Best, phases: PhaseVector) -> Schedule {
    let compute = permute(setup.compute, best.order);
    let delays = compute_delays(&best.division, compute);
    Schedule {
        scheduling_order: best.order,
        decoding_order: best.decoding,
        phases,
        powers: setup.powers,
        rates: RateTuple {
            td: setup.r_td,
            no: best.r_no,
            decoding_order: best.decoding,
        },
        lambda: best.lambda,
        time_division: best.division,
        delay_first: delays.first,
        delay_sum: delays.sum,
        waiting_time: delays.waiting,
        compute_times: compute,
    }
}

fn time_sharing(setup: &Setup, bits: [f64; USERS], rates: &RateTuple, compute: [f64; USERS]) -> Result<Evaluation> {
    if setup.infinite {
        let s = time_division_infinite(bits, rates)?;
        Ok(Some((s.division, s.sum_delay, s.lambda)))
    } else {
        let s = time_division_finite(bits, rates, compute)?;
        Ok(Some((s.division, s.sum_delay, s.lambda)))
    }
}

/// Minimum-delay schedule for the time-sharing NOMA scheme.
///
/// Powers are fixed at their maxima, TDMA rates use each user's optimal
/// phase, and the NOMA phase is chosen from the candidates of `mode`.
pub fn solve_p1(
    channels: &ChannelSet,
    task: &TaskSpec,
    params: &RadioParams,
    mode: SearchMode,
    controls: &SolveControls,
) -> Result<Schedule> {
    let setup = setup(channels, task, params, controls.levels)?;
    let candidates = candidates(channels, &setup, mode, controls)?;
    let best = search(channels, &setup, params, &candidates, time_sharing)?
        .ok_or_else(|| Error::Domain("no phase candidates to evaluate".into()))?;
    let phases = candidates.get(best.index).into_owned();
    Ok(into_schedule(&setup, best, phases))
}

/// Pure NOMA: both users start in the NOMA slot and the user that still has
/// data finishes alone (`t_td_first = 0`).
pub fn noma_benchmark(
    channels: &ChannelSet,
    task: &TaskSpec,
    params: &RadioParams,
    mode: SearchMode,
    controls: &SolveControls,
) -> Result<Schedule> {
    let setup = setup(channels, task, params, controls.levels)?;
    let candidates = candidates(channels, &setup, mode, controls)?;
    let best = search(channels, &setup, params, &candidates, |_, bits, rates, compute| {
        let t_no = transfer_time(bits[0], rates.no[0]);
        if !t_no.is_finite() {
            return Ok(None);
        }
        let rest = bits[1] - t_no * rates.no[1];
        if rest < -1e-12 * bits[1].max(1.0) {
            return Ok(None);
        }
        let division = TimeDivision {
            t_td_first: 0.0,
            t_no,
            t_td_second: rest.max(0.0) / rates.td[1],
        };
        let delay = compute_delays(&division, compute).sum;
        Ok(Some((division, delay, noma_priority(rates)?)))
    })?
    .ok_or_else(|| Error::Domain("no feasible pure-NOMA schedule".into()))?;
    let phases = candidates.get(best.index).into_owned();
    Ok(into_schedule(&setup, best, phases))
}

/// Pure TDMA: no NOMA slot, best scheduling order.
pub fn tdma_benchmark(channels: &ChannelSet, task: &TaskSpec, params: &RadioParams, levels: u32) -> Result<Schedule> {
    let setup = setup(channels, task, params, levels)?;
    let mut best: Option<Best> = None;
    for order in UserOrder::ALL {
        let bits = permute(setup.bits, order);
        let r_td = permute(setup.r_td, order);
        let division = TimeDivision {
            t_td_first: bits[0] / r_td[0],
            t_no: 0.0,
            t_td_second: bits[1] / r_td[1],
        };
        let delay = compute_delays(&division, permute(setup.compute, order)).sum;
        best = pick(
            best,
            Some(Best {
                delay,
                order,
                decoding: UserOrder::Forward,
                index: 0,
                division,
                lambda: f64::NAN,
                r_no: [0.0; USERS],
            }),
        );
    }
    let best = best.expect("two orders evaluated");
    let phases = PhaseVector::zeros(channels.n_subsurfaces(), levels);
    let mut schedule = into_schedule(&setup, best, phases);
    schedule.lambda = 0.0;
    Ok(schedule)
}
