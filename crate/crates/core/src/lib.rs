//! Delay-optimal scheduling for a two-user, IRS-assisted mobile edge
//! computing uplink with time-sharing NOMA.
//!
//! * [`channel`]: geometry, fading realizations, phase quantization.
//! * [`rate`]: TDMA and SIC-NOMA rates and the NOMA priority.
//! * [`scheduler`]: closed-form time divisions and the phase/order search.
//! * [`oracle`]: brute-force re-solvers for certification.
//! * [`sim`]: scenario configs, Monte-Carlo experiments and result output.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod oracle;
pub mod rate;
pub mod scheduler;
pub mod sim;

pub use error::{Error, Result};
