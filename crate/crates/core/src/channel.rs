//! Channel model for the two-user / IRS / AP geometry.
//!
//! The effective uplink channel of user `k` under IRS phases `ω` is
//!
//! ```text
//! g_k = Σ_n c_{k,n} e^{jω_n} + h_{d,k},    c_{k,n} = conj(h[n]) · h_{r,k}[n]
//! ```
//!
//! where `h` is the IRS→AP channel and `h_{r,k}` the user→IRS channel. Each
//! IRS subsurface groups `M` elements that share one phase, so `h_{r,k}[n]`
//! is the coherent sum of `M` independent element channels.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of users sharing the uplink.
pub const USERS: usize = 2;

pub type Point = [f64; 2];

/// Node positions and large-scale propagation constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub ap_position: Point,
    pub irs_position: Point,
    pub user_positions: [Point; USERS],
    #[serde(default = "default_exponent_user_ap")]
    pub pathloss_exponent_user_ap: f64,
    #[serde(default = "default_exponent_reflected")]
    pub pathloss_exponent_user_irs: f64,
    #[serde(default = "default_exponent_reflected")]
    pub pathloss_exponent_irs_ap: f64,
    /// Channel power gain at 1 m, in dB.
    #[serde(default = "default_ref_gain_db")]
    pub ref_gain_db: f64,
}

fn default_exponent_user_ap() -> f64 {
    3.2
}

fn default_exponent_reflected() -> f64 {
    2.6
}

fn default_ref_gain_db() -> f64 {
    -30.0
}

/// Linear path-loss values of every link in a [`Geometry`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkGains {
    pub user_ap: [f64; USERS],
    pub user_irs: [f64; USERS],
    pub irs_ap: f64,
}

fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Geometry {
    pub fn user_ap_distance(&self, user: usize) -> f64 {
        distance(self.user_positions[user], self.ap_position)
    }

    pub fn user_irs_distance(&self, user: usize) -> f64 {
        distance(self.user_positions[user], self.irs_position)
    }

    pub fn irs_ap_distance(&self) -> f64 {
        distance(self.irs_position, self.ap_position)
    }

    /// Checks the positivity and exponent-range invariants.
    pub fn validate(&self) -> Result<()> {
        let mut distances = vec![("irs_position", self.irs_ap_distance())];
        for user in 0..USERS {
            distances.push(("user_positions", self.user_ap_distance(user)));
            distances.push(("user_positions", self.user_irs_distance(user)));
        }
        for (field, d) in distances {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::config(
                    format!("geometry.{field}"),
                    format!("pairwise distance must be positive and finite, got {d}"),
                ));
            }
        }
        let exponents = [
            ("pathloss_exponent_user_ap", self.pathloss_exponent_user_ap),
            ("pathloss_exponent_user_irs", self.pathloss_exponent_user_irs),
            ("pathloss_exponent_irs_ap", self.pathloss_exponent_irs_ap),
        ];
        for (field, e) in exponents {
            if !(1.5..=6.0).contains(&e) {
                return Err(Error::config(
                    format!("geometry.{field}"),
                    format!("exponent must lie in [1.5, 6], got {e}"),
                ));
            }
        }
        if !self.ref_gain_db.is_finite() {
            return Err(Error::config("geometry.ref_gain_db", "must be finite"));
        }
        Ok(())
    }

    pub fn link_gains(&self) -> Result<LinkGains> {
        let mut user_ap = [0.0; USERS];
        let mut user_irs = [0.0; USERS];
        for user in 0..USERS {
            user_ap[user] = path_loss(
                self.user_ap_distance(user),
                self.pathloss_exponent_user_ap,
                self.ref_gain_db,
            )?;
            user_irs[user] = path_loss(
                self.user_irs_distance(user),
                self.pathloss_exponent_user_irs,
                self.ref_gain_db,
            )?;
        }
        let irs_ap = path_loss(self.irs_ap_distance(), self.pathloss_exponent_irs_ap, self.ref_gain_db)?;
        Ok(LinkGains {
            user_ap,
            user_irs,
            irs_ap,
        })
    }
}

/// Linear power gain `10^(ref_gain_db/10) · distance^(-exponent)`.
pub fn path_loss(distance: f64, exponent: f64, ref_gain_db: f64) -> Result<f64> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::Domain(format!(
            "path loss needs a positive distance, got {distance}"
        )));
    }
    Ok(10f64.powf(ref_gain_db / 10.0) * distance.powf(-exponent))
}

/// All baseband channels of one fading realization.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSet {
    direct: [Complex64; USERS],
    user_to_irs: [Vec<Complex64>; USERS],
    irs_to_ap: Vec<Complex64>,
    cascaded: [Vec<Complex64>; USERS],
}

impl ChannelSet {
    /// Builds a channel set and derives the cascaded coefficients.
    pub fn new(
        direct: [Complex64; USERS],
        user_to_irs: [Vec<Complex64>; USERS],
        irs_to_ap: Vec<Complex64>,
    ) -> Result<Self> {
        let n = irs_to_ap.len();
        for h_r in &user_to_irs {
            if h_r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: h_r.len(),
                });
            }
        }
        let cascaded = [0, 1].map(|k| {
            irs_to_ap
                .iter()
                .zip(&user_to_irs[k])
                .map(|(h, h_r)| h.conj() * h_r)
                .collect()
        });
        Ok(ChannelSet {
            direct,
            user_to_irs,
            irs_to_ap,
            cascaded,
        })
    }

    pub fn n_subsurfaces(&self) -> usize {
        self.irs_to_ap.len()
    }

    pub fn direct(&self, user: usize) -> Complex64 {
        self.direct[user]
    }

    pub fn user_to_irs(&self, user: usize) -> &[Complex64] {
        &self.user_to_irs[user]
    }

    pub fn irs_to_ap(&self) -> &[Complex64] {
        &self.irs_to_ap
    }

    /// Coefficients multiplying `e^{jω_n}` in the effective channel of `user`.
    pub fn cascaded(&self, user: usize) -> &[Complex64] {
        &self.cascaded[user]
    }

    /// The same realization with the IRS removed (`N = 0`).
    pub fn without_irs(&self) -> ChannelSet {
        ChannelSet {
            direct: self.direct,
            user_to_irs: [Vec::new(), Vec::new()],
            irs_to_ap: Vec::new(),
            cascaded: [Vec::new(), Vec::new()],
        }
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(scale * re, scale * im)
}

/// Draws one Rayleigh realization of every channel in the geometry.
///
/// Draw order is fixed (direct links, user→IRS element channels per user,
/// IRS→AP), so a seeded `rng` reproduces the same [`ChannelSet`].
pub fn sample_channels<R: Rng + ?Sized>(
    gains: &LinkGains,
    n_subsurfaces: usize,
    elements_per_subsurface: usize,
    rng: &mut R,
) -> ChannelSet {
    let direct = [0, 1].map(|k| complex_gaussian(rng, gains.user_ap[k]));
    let user_to_irs = [0, 1].map(|k| {
        (0..n_subsurfaces)
            .map(|_| {
                (0..elements_per_subsurface)
                    .map(|_| complex_gaussian(rng, gains.user_irs[k]))
                    .sum()
            })
            .collect::<Vec<Complex64>>()
    });
    let irs_to_ap = (0..n_subsurfaces)
        .map(|_| complex_gaussian(rng, gains.irs_ap))
        .collect();
    ChannelSet::new(direct, user_to_irs, irs_to_ap).expect("lengths agree by construction")
}

/// IRS phase configuration. `levels == 0` means unquantized phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    phases: Vec<f64>,
    levels: u32,
}

fn wrap_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can round up to TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

fn step(levels: u32) -> f64 {
    TAU / levels as f64
}

impl PhaseVector {
    /// Phases given as grid indices `q`, i.e. `ω_n = q_n · 2π/Q`.
    pub fn from_levels(indices: &[u32], levels: u32) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Domain("grid indices need levels >= 1".into()));
        }
        if let Some(bad) = indices.iter().find(|&&q| q >= levels) {
            return Err(Error::Domain(format!(
                "grid index {bad} out of range for {levels} levels"
            )));
        }
        let delta = step(levels);
        Ok(PhaseVector {
            phases: indices.iter().map(|&q| q as f64 * delta).collect(),
            levels,
        })
    }

    /// Unquantized phases, wrapped into `[0, 2π)`.
    pub fn continuous(phases: &[f64]) -> Self {
        PhaseVector {
            phases: phases.iter().map(|&p| wrap_angle(p)).collect(),
            levels: 0,
        }
    }

    pub fn zeros(n: usize, levels: u32) -> Self {
        PhaseVector {
            phases: vec![0.0; n],
            levels,
        }
    }

    /// Validates arbitrary angles against the `levels` grid.
    pub fn new(phases: Vec<f64>, levels: u32) -> Result<Self> {
        if levels == 0 {
            return Ok(Self::continuous(&phases));
        }
        let delta = step(levels);
        let mut indices = Vec::with_capacity(phases.len());
        for p in phases {
            let q = (wrap_angle(p) / delta).round();
            let snapped = q * delta;
            if (wrap_angle(p) - snapped).abs() > 1e-9 {
                return Err(Error::Domain(format!("phase {p} is not a multiple of 2π/{levels}")));
            }
            indices.push((q as u32) % levels);
        }
        Self::from_levels(&indices, levels)
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }
}

/// Grid index nearest to `angle` on the `levels`-point grid (circular
/// distance, ties toward the smaller index).
pub fn quantize_level(angle: f64, levels: u32) -> u32 {
    assert!(levels >= 1, "quantization needs at least one level");
    let delta = step(levels);
    let a = wrap_angle(angle);
    let lo = ((a / delta).floor() as u32).min(levels - 1);
    let hi = (lo + 1) % levels;
    let d_lo = a - lo as f64 * delta;
    let d_hi = (lo + 1) as f64 * delta - a;
    if d_hi < d_lo {
        hi
    } else if d_hi == d_lo {
        lo.min(hi)
    } else {
        lo
    }
}

/// Nearest grid phase to `angle`. `levels == 0` only wraps the angle.
pub fn quantize_phase(angle: f64, levels: u32) -> f64 {
    if levels == 0 {
        return wrap_angle(angle);
    }
    quantize_level(angle, levels) as f64 * step(levels)
}

/// Complex effective channel `Σ_n c_{k,n} e^{jω_n} + h_{d,k}`.
pub fn effective_channel(channels: &ChannelSet, user: usize, phases: &PhaseVector) -> Result<Complex64> {
    let c = channels.cascaded(user);
    if c.len() != phases.len() {
        return Err(Error::DimensionMismatch {
            expected: c.len(),
            found: phases.len(),
        });
    }
    Ok(reflected_sum(c, phases.phases()) + channels.direct(user))
}

fn reflected_sum(c: &[Complex64], phases: &[f64]) -> Complex64 {
    c.iter()
        .zip(phases)
        .map(|(c, &w)| c * Complex64::from_polar(1.0, w))
        .sum()
}

/// Effective channel power gain `|g_k|²`.
pub fn effective_gain(channels: &ChannelSet, user: usize, phases: &PhaseVector) -> Result<f64> {
    effective_channel(channels, user, phases).map(|g| g.norm_sqr())
}

/// Per-term alignment rule: each reflected term is rotated onto the direct
/// channel's phase, then quantized independently.
pub fn aligned_phase(channels: &ChannelSet, user: usize, levels: u32) -> PhaseVector {
    let reference = channels.direct(user).arg();
    aligned_to(channels.cascaded(user), reference, levels)
}

fn aligned_to(c: &[Complex64], reference: f64, levels: u32) -> PhaseVector {
    let phases = c.iter().map(|c| quantize_phase(reference - c.arg(), levels)).collect();
    PhaseVector { phases, levels }
}

/// Phase vector maximizing `effective_gain` for a single user over the
/// `levels` grid.
///
/// An optimal configuration aligns every term to the phase `φ` of the
/// optimal resultant, so the optimum is `aligned_to(φ)` for some `φ`. That
/// configuration only changes when `φ − ∠c_n` crosses a quantization
/// boundary, which leaves at most `N·Q` distinct candidates; all of them are
/// scored. The direct-channel alignment is scored first and kept on ties.
/// Continuous mode (`levels == 0`) is exact alignment.
pub fn tdma_optimal_phase(channels: &ChannelSet, user: usize, levels: u32) -> PhaseVector {
    let c = channels.cascaded(user);
    let h_d = channels.direct(user);
    if levels <= 1 {
        return aligned_phase(channels, user, levels);
    }
    let delta = step(levels);
    let mut breakpoints: Vec<f64> = c
        .iter()
        .filter(|c| c.norm_sqr() > 0.0)
        .flat_map(|c| {
            let base = c.arg();
            (0..levels).map(move |q| wrap_angle(base + (q as f64 + 0.5) * delta))
        })
        .collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();

    let mut best = aligned_phase(channels, user, levels);
    let mut best_gain = (reflected_sum(c, best.phases()) + h_d).norm_sqr();
    for (i, &b) in breakpoints.iter().enumerate() {
        let next = breakpoints.get(i + 1).copied().unwrap_or(breakpoints[0] + TAU);
        let candidate = aligned_to(c, 0.5 * (b + next), levels);
        let gain = (reflected_sum(c, candidate.phases()) + h_d).norm_sqr();
        if gain > best_gain {
            best_gain = gain;
            best = candidate;
        }
    }
    best
}
