//! Closed-form optimal time divisions for fixed rates.

use serde::{Deserialize, Serialize};

use super::TimeDivision;
use crate::channel::USERS;
use crate::error::{Error, Result};
use crate::rate::{noma_priority, RateTuple};

/// Negative components down to this many seconds (scaled by the problem's
/// time scale when that exceeds one second) are rounding noise.
const NEGATIVE_SLACK: f64 = 1e-12;

/// `L / r` with `0/r = 0` and `L/0 = +∞` for `L > 0`.
pub(crate) fn transfer_time(bits: f64, rate: f64) -> f64 {
    if bits == 0.0 {
        0.0
    } else if rate == 0.0 {
        f64::INFINITY
    } else {
        bits / rate
    }
}

fn guard(component: &'static str, value: f64, scale: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NEGATIVE_SLACK * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::Inconsistent { component, value })
    }
}

fn solo_times(bits: [f64; USERS], rates: &RateTuple) -> [f64; USERS] {
    [0, 1].map(|k| bits[k] / rates.td[k])
}

/// Optimal division with negligible cloud computing time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfiniteSolution {
    pub division: TimeDivision,
    pub lambda: f64,
    pub sum_delay: f64,
}

/// Threshold rule on the NOMA priority: a non-negative priority fills the
/// NOMA slot until one user is done, otherwise both users go solo.
///
/// `bits` and `rates` are positional (index 0 scheduled first).
pub fn time_division_infinite(bits: [f64; USERS], rates: &RateTuple) -> Result<InfiniteSolution> {
    let lambda = noma_priority(rates)?;
    let solo = solo_times(bits, rates);
    let scale = solo[0].max(solo[1]);
    let t_no_max = transfer_time(bits[0], rates.no[0]).min(transfer_time(bits[1], rates.no[1]));

    let (division, sum_delay) = if lambda >= 0.0 {
        let t_no = t_no_max;
        let done = [0, 1].map(|k| transfer_time(bits[k], rates.no[k]) == t_no);
        // the user finished inside the NOMA slot has no solo slot; setting it
        // directly avoids cancellation in `L − t·r`
        let t_td = [0, 1].map(|k| {
            if done[k] {
                0.0
            } else {
                (bits[k] - t_no * rates.no[k]) / rates.td[k]
            }
        });
        let division = TimeDivision {
            t_td_first: guard("t_td_first", t_td[0], scale)?,
            t_no,
            t_td_second: guard("t_td_second", t_td[1], scale)?,
        };
        (division, solo[0] + solo[1] - lambda * t_no)
    } else {
        let division = TimeDivision {
            t_td_first: solo[0],
            t_no: 0.0,
            t_td_second: solo[1],
        };
        (division, solo[0] + solo[1])
    };
    Ok(InfiniteSolution {
        division,
        lambda,
        sum_delay,
    })
}

/// Which branch of the finite-capacity rule applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiniteCase {
    /// The first user's computing time covers the second user's solo upload.
    ComputeBound,
    /// Negative NOMA priority.
    NegativePriority,
    /// NOMA slot used; the second solo slot is at least the first user's
    /// computing time.
    Noma,
}

/// Optimal division with finite cloud capacity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteSolution {
    pub division: TimeDivision,
    pub lambda: f64,
    pub sum_delay: f64,
    pub case: FiniteCase,
}

/// Optimal division when the first-scheduled user's cloud computing can
/// overlap the second user's upload.
///
/// All arguments are positional. Optimality relies on
/// `rates.no[0] <= rates.td[0]`, which holds whenever the TDMA rate uses the
/// user's optimal phase at the same power.
pub fn time_division_finite(
    bits: [f64; USERS],
    rates: &RateTuple,
    compute_times: [f64; USERS],
) -> Result<FiniteSolution> {
    let lambda = noma_priority(rates)?;
    let solo = solo_times(bits, rates);
    let [t1c, t2c] = compute_times;
    let scale = solo[0].max(solo[1]).max(t1c);

    let case = if t1c >= solo[1] {
        FiniteCase::ComputeBound
    } else if lambda < 0.0 {
        FiniteCase::NegativePriority
    } else {
        FiniteCase::Noma
    };

    if case != FiniteCase::Noma {
        let division = TimeDivision {
            t_td_first: solo[0],
            t_no: 0.0,
            t_td_second: solo[1],
        };
        return Ok(FiniteSolution {
            division,
            lambda,
            sum_delay: solo[0] + t1c.max(solo[1]) + t2c,
            case,
        });
    }

    let (t_td_first, t_no, t_td_second) = if rates.no[1] == 0.0 {
        // λ ≥ 0 forces r₁ⁿᵒ = r₁ᵗᵈ: the NOMA slot gains nothing
        (solo[0], 0.0, solo[1])
    } else {
        let first_done = transfer_time(bits[0], rates.no[0]);
        let t2 = (bits[1] - first_done * rates.no[1]) / rates.td[1];
        if t2 >= t1c {
            // the first user finishes inside the NOMA slot
            (0.0, first_done, t2)
        } else {
            let t_no = guard("t_no", (bits[1] - t1c * rates.td[1]) / rates.no[1], scale)?;
            let t1 = (bits[0] - t_no * rates.no[0]) / rates.td[0];
            (guard("t_td_first", t1, scale)?, t_no, t1c)
        }
    };
    let t_td_second = guard("t_td_second", t_td_second, scale)?;
    Ok(FiniteSolution {
        division: TimeDivision {
            t_td_first,
            t_no,
            t_td_second,
        },
        lambda,
        sum_delay: t_td_first + t_no + t_td_second + t2c,
        case,
    })
}
