//! Time division, delay accounting and the outer schedule search.
//!
//! Inside this module, two-element arrays of per-user quantities passed to
//! the time-division functions are positional: index 0 is the user scheduled
//! first. [`solve_p1`] owns the mapping from scheduling order to users.

mod candidates;
mod division;
mod solve;

use serde::{Deserialize, Serialize};

use crate::channel::{PhaseVector, USERS};
use crate::error::{Error, Result};
use crate::rate::{RateTuple, UserOrder};

pub use candidates::{
    exhaustive_count, phase_candidates_eta, phase_candidates_exhaustive, phase_candidates_random, ExhaustivePhases,
    DEFAULT_ETA_GRID_POINTS, DEFAULT_EXHAUSTIVE_BUDGET,
};
pub use division::{time_division_finite, time_division_infinite, FiniteCase, FiniteSolution, InfiniteSolution};
pub use solve::{noma_benchmark, solve_p1, tdma_benchmark, SearchMode, SolveControls, DEFAULT_RANDOM_DRAWS};

/// Per-user task description and the cloud CPU frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub data_bits: [f64; USERS],
    pub cycles_per_bit: [f64; USERS],
    /// Cloud CPU frequency in Hz; `f64::INFINITY` for unlimited capacity.
    #[serde(with = "cloud_freq")]
    pub cloud_freq_hz: f64,
}

impl TaskSpec {
    pub fn is_infinite_capacity(&self) -> bool {
        self.cloud_freq_hz.is_infinite()
    }

    /// Cloud computing time of every user, indexed by user.
    pub fn compute_times(&self) -> [f64; USERS] {
        [0, 1].map(|k| task_compute_time(self.data_bits[k], self.cycles_per_bit[k], self.cloud_freq_hz))
    }

    pub fn validate(&self) -> Result<()> {
        for k in 0..USERS {
            if !(self.data_bits[k].is_finite() && self.data_bits[k] >= 0.0) {
                return Err(Error::config(format!("task.data_bits[{k}]"), "must be finite and >= 0"));
            }
            if !(self.cycles_per_bit[k].is_finite() && self.cycles_per_bit[k] >= 0.0) {
                return Err(Error::config(
                    format!("task.cycles_per_bit[{k}]"),
                    "must be finite and >= 0",
                ));
            }
        }
        if !(self.cloud_freq_hz > 0.0) {
            return Err(Error::config("task.cloud_freq_hz", "must be > 0 or \"inf\""));
        }
        Ok(())
    }
}

mod cloud_freq {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*value)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) if matches!(t.as_str(), "inf" | "infinite" | "infinity") => Ok(f64::INFINITY),
            Repr::Text(t) => Err(de::Error::custom(format!(
                "expected a frequency in Hz or \"inf\", got {t:?}"
            ))),
        }
    }
}

/// Cloud computing time `C·L/F`; zero for infinite capacity.
pub fn task_compute_time(bits: f64, cycles_per_bit: f64, cloud_freq_hz: f64) -> f64 {
    if cloud_freq_hz.is_infinite() {
        return 0.0;
    }
    cycles_per_bit * bits / cloud_freq_hz
}

/// Transmission time split, positional in scheduling order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeDivision {
    /// Solo slot of the first-scheduled user.
    pub t_td_first: f64,
    /// Shared NOMA slot.
    pub t_no: f64,
    /// Solo slot of the second-scheduled user.
    pub t_td_second: f64,
}

impl TimeDivision {
    pub fn total(&self) -> f64 {
        self.t_td_first + self.t_no + self.t_td_second
    }

    /// Share of the transmission time spent in the NOMA slot.
    pub fn noma_fraction(&self) -> f64 {
        let total = self.total();
        if total > 0.0 {
            self.t_no / total
        } else {
            0.0
        }
    }
}

/// Completion times of a time division.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Delays {
    /// Completion time of the first-scheduled user.
    pub first: f64,
    /// Completion time of the second-scheduled user, i.e. the sum delay.
    pub sum: f64,
    /// Idle time of the second user's data waiting for the cloud.
    pub waiting: f64,
}

/// Completion times for a division and positional compute times.
pub fn compute_delays(division: &TimeDivision, compute_times: [f64; USERS]) -> Delays {
    let TimeDivision {
        t_td_first,
        t_no,
        t_td_second,
    } = *division;
    let waiting = (compute_times[0] - t_td_second).max(0.0);
    Delays {
        first: t_td_first + t_no + compute_times[0],
        sum: t_td_first + t_no + t_td_second + waiting + compute_times[1],
        waiting,
    }
}

/// A complete offloading decision with its delay breakdown.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub scheduling_order: UserOrder,
    pub decoding_order: UserOrder,
    /// IRS configuration used during the NOMA slot.
    pub phases: PhaseVector,
    /// Transmit powers in watts, indexed by user.
    pub powers: [f64; USERS],
    /// Rates at the chosen configuration, indexed by user.
    pub rates: RateTuple,
    pub lambda: f64,
    pub time_division: TimeDivision,
    pub delay_first: f64,
    pub delay_sum: f64,
    pub waiting_time: f64,
    /// Cloud computing times in scheduling order.
    pub compute_times: [f64; USERS],
}
