//! Brute-force re-solvers used to certify the closed forms.
//!
//! Every inner problem is parametrized by the NOMA duration `t_no`: the data
//! equalities fix both solo slots as affine functions of `t_no`, leaving a
//! one-dimensional search over `[0, t_max]`. Nothing here calls the
//! time-division formulas of [`crate::scheduler`].

use serde::{Deserialize, Serialize};

use crate::channel::{effective_gain, ChannelSet, PhaseVector, USERS};
use crate::error::{Error, Result};
use crate::rate::{noma_rates, tdma_rate, RadioParams, RateTuple, UserOrder};
use crate::scheduler::{compute_delays, Schedule, TaskSpec, TimeDivision};

/// Safety grid of the LP oracle on top of its two endpoints.
pub const LP_GRID_POINTS: usize = 10_000;

/// Largest phase grid the full-instance oracle will enumerate.
pub const ENUMERATION_BUDGET: usize = 10_000;

/// A division found by search, with the accuracy guaranteed by the search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    pub division: TimeDivision,
    pub sum_delay: f64,
    /// Upper bound on `sum_delay − true optimum`.
    pub error_bound: f64,
}

/// Largest feasible NOMA duration. A user with zero NOMA rate places no
/// bound; if neither user does, the slot is useless and `t_max = 0`.
fn noma_upper_limit(bits: [f64; USERS], no: [f64; USERS]) -> f64 {
    let mut limit = f64::INFINITY;
    for k in 0..USERS {
        if no[k] > 0.0 {
            limit = limit.min(bits[k] / no[k]);
        }
    }
    if limit.is_finite() {
        limit
    } else {
        0.0
    }
}

fn check_td(rates: &RateTuple) -> Result<()> {
    for (user, &r) in rates.td.iter().enumerate() {
        if !(r > 0.0) {
            return Err(Error::ZeroTdmaRate { user });
        }
    }
    Ok(())
}

/// Division for a given `t_no`, solo slots clipped at zero.
fn division_at(bits: [f64; USERS], rates: &RateTuple, t_no: f64) -> TimeDivision {
    let solo = |k: usize| ((bits[k] - t_no * rates.no[k]) / rates.td[k]).max(0.0);
    TimeDivision {
        t_td_first: solo(0),
        t_no,
        t_td_second: solo(1),
    }
}

/// Sum delay at a given NOMA duration: the sum of the three slots plus the
/// idle wait for the first user's computation and the second user's
/// computation. Positional arguments.
pub fn p4_objective(bits: [f64; USERS], rates: &RateTuple, compute_times: [f64; USERS], t_no: f64) -> f64 {
    let d = division_at(bits, rates, t_no);
    d.t_td_first + d.t_no + d.t_td_second + (compute_times[0] - d.t_td_second).max(0.0) + compute_times[1]
}

fn grid_point(i: usize, points: usize, upper: f64) -> f64 {
    if i == points {
        upper
    } else {
        upper * i as f64 / points as f64
    }
}

/// Minimizes the sum transmission time over the NOMA segment.
///
/// The objective is affine in `t_no`, so the better endpoint is exact; a
/// uniform grid is scanned as well and can only tie it.
pub fn lp_oracle_p2(bits: [f64; USERS], rates: &RateTuple) -> Result<OracleSolution> {
    check_td(rates)?;
    let upper = noma_upper_limit(bits, rates.no);
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=LP_GRID_POINTS {
        let t = grid_point(i, LP_GRID_POINTS, upper);
        let value = p4_objective(bits, rates, [0.0, 0.0], t);
        if value < best.0 {
            best = (value, t);
        }
    }
    Ok(OracleSolution {
        division: division_at(bits, rates, best.1),
        sum_delay: best.0,
        error_bound: 0.0,
    })
}

/// Minimizes the finite-capacity sum delay over a uniform `t_no` grid with
/// `resolution` steps, plus both endpoints and the point where the second
/// solo slot equals the first user's computing time.
///
/// `error_bound` is the largest slope magnitude of the piecewise-affine
/// objective times the grid step.
pub fn grid_oracle_p4(
    bits: [f64; USERS],
    rates: &RateTuple,
    compute_times: [f64; USERS],
    resolution: usize,
) -> Result<OracleSolution> {
    check_td(rates)?;
    if resolution == 0 {
        return Err(Error::Domain("grid oracle needs a positive resolution".into()));
    }
    let upper = noma_upper_limit(bits, rates.no);
    let mut points: Vec<f64> = (0..=resolution).map(|i| grid_point(i, resolution, upper)).collect();
    if rates.no[1] > 0.0 {
        let kink = (bits[1] - compute_times[0] * rates.td[1]) / rates.no[1];
        if (0.0..=upper).contains(&kink) {
            points.push(kink);
        }
    }
    let mut best = (f64::INFINITY, 0.0);
    for t in points {
        let value = p4_objective(bits, rates, compute_times, t);
        if value < best.0 {
            best = (value, t);
        }
    }
    let a = [0, 1].map(|k| rates.no[k] / rates.td[k]);
    // slope with the second solo slot longer / shorter than the first
    // user's computing time
    let slope = (1.0 - a[0] - a[1]).abs().max((1.0 - a[0]).abs());
    Ok(OracleSolution {
        division: division_at(bits, rates, best.1),
        sum_delay: best.0,
        error_bound: slope * upper / resolution as f64,
    })
}

/// Most negative normalized second difference of the finite-capacity
/// objective along a uniform `t_no` grid; zero certifies discrete convexity.
pub fn convexity_defect(bits: [f64; USERS], rates: &RateTuple, compute_times: [f64; USERS], resolution: usize) -> f64 {
    let upper = noma_upper_limit(bits, rates.no);
    let values: Vec<f64> = (0..=resolution)
        .map(|i| p4_objective(bits, rates, compute_times, grid_point(i, resolution, upper)))
        .collect();
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    values
        .windows(3)
        .map(|w| ((w[0] + w[2] - 2.0 * w[1]) / scale).min(0.0))
        .fold(0.0, f64::min)
}

/// Result of the power-grid search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerGridResult {
    /// Maximizing powers in watts.
    pub powers: [f64; USERS],
    pub objective: f64,
    /// Objective at the full-power corner.
    pub full_power_objective: f64,
}

/// Infinite-capacity delay reduction obtained by the NOMA slot:
/// `max(λ, 0) · min(L₁/r₁ⁿᵒ, L₂/r₂ⁿᵒ)`, with `L/0 = +∞` inside the min and
/// zero when no NOMA slot is worth opening.
///
/// `td` are the TDMA rates; `no` are user-indexed NOMA rates.
pub fn noma_delay_reduction(bits: [f64; USERS], td: [f64; USERS], no: [f64; USERS]) -> f64 {
    let lambda = no[0] / td[0] + no[1] / td[1] - 1.0;
    if lambda <= 0.0 {
        return 0.0;
    }
    let duration = [0, 1]
        .map(|k| {
            if no[k] > 0.0 {
                bits[k] / no[k]
            } else if bits[k] == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    lambda * duration
}

/// Scans a `grid × grid` lattice on `[0, P₁] × [0, P₂]` for the NOMA powers
/// maximizing [`noma_delay_reduction`]. TDMA rates are those of each user's
/// `tdma_phases` at full power.
#[allow(clippy::too_many_arguments)]
pub fn power_grid_oracle_p3(
    channels: &ChannelSet,
    phases: &PhaseVector,
    tdma_phases: [&PhaseVector; USERS],
    params: &RadioParams,
    bits: [f64; USERS],
    decoding_order: UserOrder,
    grid: usize,
) -> Result<PowerGridResult> {
    if grid < 2 {
        return Err(Error::Domain("power grid needs at least 2 points per axis".into()));
    }
    let max_power = params.max_power_w();
    let mut td = [0.0; USERS];
    for k in 0..USERS {
        td[k] = tdma_rate(max_power[k], effective_gain(channels, k, tdma_phases[k])?, params);
        if !(td[k] > 0.0) {
            return Err(Error::ZeroTdmaRate { user: k });
        }
    }
    let gains = [
        effective_gain(channels, 0, phases)?,
        effective_gain(channels, 1, phases)?,
    ];
    let level = |k: usize, i: usize| {
        if i == grid - 1 {
            max_power[k]
        } else {
            max_power[k] * i as f64 / (grid - 1) as f64
        }
    };
    let mut best = PowerGridResult {
        powers: [0.0, 0.0],
        objective: f64::NEG_INFINITY,
        full_power_objective: 0.0,
    };
    for i in 0..grid {
        for j in 0..grid {
            let powers = [level(0, i), level(1, j)];
            let no = noma_rates(powers, gains, decoding_order, params);
            let value = noma_delay_reduction(bits, td, no);
            if value > best.objective {
                best.objective = value;
                best.powers = powers;
            }
            if i == grid - 1 && j == grid - 1 {
                best.full_power_objective = value;
            }
        }
    }
    Ok(best)
}

/// Full enumeration of a small instance: every grid phase vector for the
/// NOMA slot, both decoding orders and both scheduling orders, each inner
/// problem solved by [`grid_oracle_p4`]. TDMA rates come from enumerating
/// the same grid for the best single-user gain.
pub fn exhaustive_p1_oracle(
    channels: &ChannelSet,
    task: &TaskSpec,
    params: &RadioParams,
    levels: u32,
    resolution: usize,
) -> Result<(Schedule, f64)> {
    if levels == 0 {
        return Err(Error::Domain("oracle needs a discrete grid".into()));
    }
    let n = channels.n_subsurfaces();
    let count = (levels as f64).powi(n as i32);
    if count > ENUMERATION_BUDGET as f64 {
        return Err(Error::BudgetExceeded {
            candidates: count,
            budget: ENUMERATION_BUDGET,
        });
    }
    let grid: Vec<PhaseVector> = (0..count as usize)
        .map(|mut index| {
            let mut q = vec![0u32; n];
            for slot in &mut q {
                *slot = (index % levels as usize) as u32;
                index /= levels as usize;
            }
            PhaseVector::from_levels(&q, levels)
        })
        .collect::<Result<_>>()?;
    let gains: Vec<[f64; USERS]> = grid
        .iter()
        .map(|p| Ok([effective_gain(channels, 0, p)?, effective_gain(channels, 1, p)?]))
        .collect::<Result<_>>()?;

    let powers = params.max_power_w();
    let mut td = [0.0; USERS];
    for k in 0..USERS {
        let best_gain = gains.iter().map(|g| g[k]).fold(0.0, f64::max);
        td[k] = tdma_rate(powers[k], best_gain, params);
        if !(td[k] > 0.0) {
            return Err(Error::ZeroTdmaRate { user: k });
        }
    }
    let compute = task.compute_times();

    let mut best: Option<(Schedule, f64)> = None;
    for (phases, g) in grid.iter().zip(&gains) {
        for decoding in UserOrder::ALL {
            let no = noma_rates(powers, *g, decoding, params);
            for order in UserOrder::ALL {
                let [a, b] = order.users();
                let positional = RateTuple {
                    td: [td[a], td[b]],
                    no: [no[a], no[b]],
                    decoding_order: decoding,
                };
                let pos_bits = [task.data_bits[a], task.data_bits[b]];
                let pos_compute = [compute[a], compute[b]];
                let s = grid_oracle_p4(pos_bits, &positional, pos_compute, resolution)?;
                if best.as_ref().is_some_and(|(b, _)| b.delay_sum <= s.sum_delay) {
                    continue;
                }
                let delays = compute_delays(&s.division, pos_compute);
                let lambda = no[0] / td[0] + no[1] / td[1] - 1.0;
                best = Some((
                    Schedule {
                        scheduling_order: order,
                        decoding_order: decoding,
                        phases: phases.clone(),
                        powers,
                        rates: RateTuple {
                            td,
                            no,
                            decoding_order: decoding,
                        },
                        lambda,
                        time_division: s.division,
                        delay_first: delays.first,
                        delay_sum: s.sum_delay,
                        waiting_time: delays.waiting,
                        compute_times: pos_compute,
                    },
                    s.error_bound,
                ));
            }
        }
    }
    Ok(best.expect("at least one phase vector"))
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use super::*;

    fn rates(no: [f64; 2], td: [f64; 2]) -> RateTuple {
        RateTuple {
            td,
            no,
            decoding_order: UserOrder::Forward,
        }
    }

    #[test]
    fn lp_worked_instances() {
        let s = lp_oracle_p2([4.0, 4.0], &rates([1.5, 1.0], [2.0, 2.0])).unwrap();
        assert_relative_eq!(s.sum_delay, 10.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(s.division.t_no, 8.0 / 3.0);

        let s = lp_oracle_p2([4.0, 4.0], &rates([0.5, 0.8], [2.0, 2.0])).unwrap();
        assert_eq!(s.division.t_no, 0.0);
        assert_eq!(s.sum_delay, 4.0);

        let s = lp_oracle_p2([3.0, 0.0], &rates([1.5, 1.0], [2.0, 2.0])).unwrap();
        assert_eq!(s.division.t_no, 0.0);
        assert_eq!(s.sum_delay, 1.5);
    }

    #[test]
    fn grid_worked_instances() {
        let r = rates([1.5, 1.0], [2.0, 2.0]);
        let s = grid_oracle_p4([4.0, 4.0], &r, [1.0, 1.0], 1000).unwrap();
        assert_relative_eq!(s.sum_delay, 4.5, max_relative = 1e-15);
        assert_relative_eq!(s.division.t_no, 2.0, max_relative = 1e-15);

        let s = grid_oracle_p4([4.0, 4.0], &r, [3.0, 1.0], 1000).unwrap();
        assert_eq!(s.division.t_no, 0.0);
        assert_eq!(s.sum_delay, 6.0);

        let g = grid_oracle_p4([4.0, 4.0], &r, [0.0, 0.0], LP_GRID_POINTS).unwrap();
        let l = lp_oracle_p2([4.0, 4.0], &r).unwrap();
        assert_eq!(g.sum_delay, l.sum_delay);
        assert_eq!(g.division, l.division);
    }

    #[test]
    fn zero_power_reduction_is_zero() {
        assert_eq!(noma_delay_reduction([1.0, 1.0], [2.0, 2.0], [0.0, 0.0]), 0.0);
    }

    proptest! {
        #[test]
        fn objective_is_discretely_convex(
            l1 in 0.0f64..10.0, l2 in 0.0f64..10.0,
            td1 in 0.1f64..5.0, td2 in 0.1f64..5.0,
            f1 in 0.0f64..1.0, f2 in 0.0f64..1.0,
            c1 in 0.0f64..5.0, c2 in 0.0f64..5.0,
        ) {
            let r = rates([td1 * f1, td2 * f2], [td1, td2]);
            prop_assert!(convexity_defect([l1, l2], &r, [c1, c2], 500) >= -1e-12);
        }
    }
}
