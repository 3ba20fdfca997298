//! Achievable TDMA and SIC-NOMA rates and the NOMA priority.

use serde::{Deserialize, Serialize};

use crate::channel::USERS;
use crate::error::{Error, Result};

/// Converts a power level in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Radio constants. Powers and noise stay in dBm here and are converted to
/// watts through the accessor methods.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    pub bandwidth_hz: f64,
    pub noise_density_dbm_hz: f64,
    pub max_power_dbm: [f64; USERS],
}

impl RadioParams {
    /// Receiver noise power `σ²` in watts.
    pub fn noise_power_w(&self) -> f64 {
        dbm_to_watts(self.noise_density_dbm_hz) * self.bandwidth_hz
    }

    pub fn max_power_w(&self) -> [f64; USERS] {
        self.max_power_dbm.map(dbm_to_watts)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(Error::config("radio.bandwidth_hz", "must be positive and finite"));
        }
        if !self.noise_density_dbm_hz.is_finite() {
            return Err(Error::config("radio.noise_density_dbm_hz", "must be finite"));
        }
        for (k, p) in self.max_power_dbm.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::config(format!("radio.max_power_dbm[{k}]"), "must be finite"));
            }
        }
        Ok(())
    }
}

/// An ordering of the two users: scheduling order or SIC decoding order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserOrder {
    /// User 1 before user 2.
    Forward,
    /// User 2 before user 1.
    Reverse,
}

impl UserOrder {
    /// Both orders, `Forward` first.
    pub const ALL: [UserOrder; 2] = [UserOrder::Forward, UserOrder::Reverse];

    /// User indices in order.
    pub fn users(self) -> [usize; USERS] {
        match self {
            UserOrder::Forward => [0, 1],
            UserOrder::Reverse => [1, 0],
        }
    }

    pub fn first(self) -> usize {
        self.users()[0]
    }

    pub fn second(self) -> usize {
        self.users()[1]
    }
}

/// TDMA and NOMA rates in bits/s for one phase/power/decoding choice,
/// indexed by user.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTuple {
    pub td: [f64; USERS],
    pub no: [f64; USERS],
    /// Which user's signal is decoded first.
    pub decoding_order: UserOrder,
}

impl RateTuple {
    /// Re-indexes the tuple so that index 0 is `order.first()`.
    pub fn permuted(&self, order: UserOrder) -> RateTuple {
        match order {
            UserOrder::Forward => *self,
            UserOrder::Reverse => RateTuple {
                td: [self.td[1], self.td[0]],
                no: [self.no[1], self.no[0]],
                decoding_order: match self.decoding_order {
                    UserOrder::Forward => UserOrder::Reverse,
                    UserOrder::Reverse => UserOrder::Forward,
                },
            },
        }
    }
}

fn shannon(bandwidth: f64, snr: f64) -> f64 {
    bandwidth * (1.0 + snr).log2()
}

/// Interference-free rate `B · log₂(1 + p·f/σ²)`.
pub fn tdma_rate(power: f64, gain: f64, params: &RadioParams) -> f64 {
    shannon(params.bandwidth_hz, power * gain / params.noise_power_w())
}

/// SIC rates indexed by user. The first-decoded user sees the other as
/// noise; the second is decoded interference-free.
pub fn noma_rates(
    powers: [f64; USERS],
    gains: [f64; USERS],
    decoding_order: UserOrder,
    params: &RadioParams,
) -> [f64; USERS] {
    let noise = params.noise_power_w();
    let snr = [0, 1].map(|k| powers[k] * gains[k] / noise);
    let [first, second] = decoding_order.users();
    let mut rates = [0.0; USERS];
    rates[first] = shannon(params.bandwidth_hz, snr[first] / (snr[second] + 1.0));
    rates[second] = shannon(params.bandwidth_hz, snr[second]);
    rates
}

/// NOMA priority `λ = r₁ⁿᵒ/r₁ᵗᵈ + r₂ⁿᵒ/r₂ᵗᵈ − 1`.
pub fn noma_priority(rates: &RateTuple) -> Result<f64> {
    for (user, &r) in rates.td.iter().enumerate() {
        if !(r > 0.0) {
            return Err(Error::ZeroTdmaRate { user });
        }
    }
    Ok(rates.no[0] / rates.td[0] + rates.no[1] / rates.td[1] - 1.0)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use super::*;

    fn params() -> RadioParams {
        RadioParams {
            bandwidth_hz: 250e3,
            noise_density_dbm_hz: -140.0,
            max_power_dbm: [5.0, 5.0],
        }
    }

    /// Noise density of 30 dBm/Hz is exactly 1 W/Hz.
    fn unit_params() -> RadioParams {
        RadioParams {
            bandwidth_hz: 250e3,
            noise_density_dbm_hz: 30.0,
            max_power_dbm: [30.0, 30.0],
        }
    }

    #[test]
    fn unit_conversions() {
        assert_eq!(dbm_to_watts(30.0), 1.0);
        assert_relative_eq!(dbm_to_watts(5.0), 3.1622776601683795e-3, max_relative = 1e-15);
        assert_relative_eq!(params().noise_power_w(), 1e-17 * 250e3, max_relative = 1e-12);
    }

    #[test]
    fn tdma_rate_examples() {
        let p = unit_params();
        let sigma2 = p.noise_power_w();
        assert_eq!(tdma_rate(sigma2, 1.0, &p), 250e3);
        assert_eq!(tdma_rate(0.0, 5.0, &p), 0.0);
        assert_eq!(tdma_rate(15.0 * sigma2, 1.0, &p), 1.0e6);
        let q = params();
        assert_relative_eq!(
            tdma_rate(15.0 * q.noise_power_w(), 1.0, &q),
            1.0e6,
            max_relative = 1e-15
        );
    }

    #[test]
    fn noma_rate_examples() {
        let p = unit_params();
        let sigma2 = p.noise_power_w();
        let r = noma_rates([sigma2, 0.0], [3.0, 1.0], UserOrder::Forward, &p);
        assert_eq!(r, [tdma_rate(sigma2, 3.0, &p), 0.0]);

        // S_first = 3, S_second = 1
        let r = noma_rates([3.0 * sigma2, sigma2], [1.0, 1.0], UserOrder::Forward, &p);
        assert_relative_eq!(r[0], 250e3 * 2.5f64.log2(), max_relative = 1e-15);
        assert_relative_eq!(r[1], 250e3, max_relative = 1e-15);
        let swapped = noma_rates([sigma2, 3.0 * sigma2], [1.0, 1.0], UserOrder::Reverse, &p);
        assert_eq!(swapped, [r[1], r[0]]);
    }

    #[test]
    fn priority_examples() {
        let rates = RateTuple {
            td: [2.0, 2.0],
            no: [1.5, 1.0],
            decoding_order: UserOrder::Forward,
        };
        assert_relative_eq!(noma_priority(&rates).unwrap(), 0.25);
        let same = RateTuple {
            td: [3.0, 7.0],
            no: [3.0, 7.0],
            decoding_order: UserOrder::Forward,
        };
        assert_eq!(noma_priority(&same).unwrap(), 1.0);
        let dead = RateTuple {
            td: [0.0, 1.0],
            no: [0.0, 1.0],
            decoding_order: UserOrder::Forward,
        };
        assert!(matches!(noma_priority(&dead), Err(Error::ZeroTdmaRate { user: 0 })));
    }

    #[test]
    fn permutation_swaps_indices() {
        let rates = RateTuple {
            td: [1.0, 2.0],
            no: [3.0, 4.0],
            decoding_order: UserOrder::Forward,
        };
        let p = rates.permuted(UserOrder::Reverse);
        assert_eq!(p.td, [2.0, 1.0]);
        assert_eq!(p.no, [4.0, 3.0]);
        assert_eq!(p.decoding_order, UserOrder::Reverse);
        assert_eq!(p.permuted(UserOrder::Reverse), rates);
    }

    proptest! {
        #[test]
        fn sum_rate_identity(s1 in 0.0f64..1e4, s2 in 0.0f64..1e4, reverse in any::<bool>()) {
            let p = unit_params();
            let sigma2 = p.noise_power_w();
            let order = if reverse { UserOrder::Reverse } else { UserOrder::Forward };
            let r = noma_rates([s1 * sigma2, s2 * sigma2], [1.0, 1.0], order, &p);
            let sum = 250e3 * (1.0 + s1 + s2).log2();
            prop_assert!((r[0] + r[1] - sum).abs() <= 1e-9 * sum.max(1.0));
            // interference penalty on the first-decoded user
            let first = order.first();
            prop_assert!(r[first] <= tdma_rate([s1, s2][first] * sigma2, 1.0, &p) * (1.0 + 1e-12));
        }

        #[test]
        fn interference_monotonicity(s1 in 0.01f64..1e3, s2 in 0.01f64..1e3, bump in 1.0f64..10.0) {
            let p = unit_params();
            let sigma2 = p.noise_power_w();
            let base = noma_rates([s1 * sigma2, s2 * sigma2], [1.0, 1.0], UserOrder::Forward, &p);
            let louder = noma_rates([s1 * sigma2, s2 * bump * sigma2], [1.0, 1.0], UserOrder::Forward, &p);
            prop_assert!(louder[0] <= base[0]);
            let other = noma_rates([s1 * bump * sigma2, s2 * sigma2], [1.0, 1.0], UserOrder::Forward, &p);
            prop_assert_eq!(other[1], base[1]);
        }

        #[test]
        fn priority_positive_without_irs(g1 in 1e-3f64..1e3, g2 in 1e-3f64..1e3, p1 in 1e-3f64..10.0, p2 in 1e-3f64..10.0, reverse in any::<bool>()) {
            // without reflection both schemes see the same gains
            let p = unit_params();
            let sigma2 = p.noise_power_w();
            let order = if reverse { UserOrder::Reverse } else { UserOrder::Forward };
            let powers = [p1 * sigma2, p2 * sigma2];
            let gains = [g1, g2];
            let rates = RateTuple {
                td: [tdma_rate(powers[0], g1, &p), tdma_rate(powers[1], g2, &p)],
                no: noma_rates(powers, gains, order, &p),
                decoding_order: order,
            };
            prop_assert!(noma_priority(&rates).unwrap() > 0.0);
        }
    }
}
