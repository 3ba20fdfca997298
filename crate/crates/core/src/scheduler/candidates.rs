//! NOMA phase candidates: full grid enumeration, the η-linearized line
//! search, and uniform random draws.

use std::collections::HashSet;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{quantize_phase, PhaseVector};
use crate::error::{Error, Result};

pub const DEFAULT_EXHAUSTIVE_BUDGET: usize = 1_000_000;
pub const DEFAULT_ETA_GRID_POINTS: usize = 101;

/// Magnitude below which an η-combination of two unit phasors counts as
/// cancelled; `e^{jπ}` is not exactly `-1` in floating point.
const CANCELLED: f64 = 1e-12;

/// `levels^n` as a float, so that huge grids do not overflow.
pub fn exhaustive_count(n: usize, levels: u32) -> f64 {
    (levels as f64).powi(n as i32)
}

/// Every grid vector in odometer order (last subsurface varies fastest).
#[derive(Clone, Debug)]
pub struct ExhaustivePhases {
    n: usize,
    levels: u32,
    count: usize,
    next: usize,
}

impl ExhaustivePhases {
    pub fn count(&self) -> usize {
        self.count
    }

    /// The `index`-th vector of the enumeration.
    pub fn vector_at(&self, mut index: usize) -> PhaseVector {
        let mut q = vec![0u32; self.n];
        for slot in q.iter_mut().rev() {
            *slot = (index % self.levels as usize) as u32;
            index /= self.levels as usize;
        }
        PhaseVector::from_levels(&q, self.levels).expect("digits are below levels")
    }
}

impl Iterator for ExhaustivePhases {
    type Item = PhaseVector;

    fn next(&mut self) -> Option<PhaseVector> {
        if self.next >= self.count {
            return None;
        }
        let v = self.vector_at(self.next);
        self.next += 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.count - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for ExhaustivePhases {}

/// All `levels^n` grid vectors, refusing grids larger than `budget`.
pub fn phase_candidates_exhaustive(n: usize, levels: u32, budget: usize) -> Result<ExhaustivePhases> {
    if levels == 0 {
        return Err(Error::Domain(
            "exhaustive search needs a discrete grid (levels >= 1)".into(),
        ));
    }
    let count = exhaustive_count(n, levels);
    if count > budget as f64 {
        return Err(Error::BudgetExceeded {
            candidates: count,
            budget,
        });
    }
    Ok(ExhaustivePhases {
        n,
        levels,
        count: count as usize,
        next: 0,
    })
}

/// Quantized angles of `η·e^{jθ₁} + (1−η)·e^{jθ₂}` for `η` on a uniform
/// grid over `[0, 1]`, duplicates removed (first occurrence kept).
///
/// An element whose combination vanishes keeps its `θ₁` phase.
pub fn phase_candidates_eta(
    theta1: &PhaseVector,
    theta2: &PhaseVector,
    grid_points: usize,
    levels: u32,
) -> Result<Vec<PhaseVector>> {
    if grid_points < 2 {
        return Err(Error::Domain(format!(
            "eta search needs at least 2 grid points, got {grid_points}"
        )));
    }
    if theta1.len() != theta2.len() {
        return Err(Error::DimensionMismatch {
            expected: theta1.len(),
            found: theta2.len(),
        });
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for i in 0..grid_points {
        let eta = i as f64 / (grid_points - 1) as f64;
        let phases: Vec<f64> = theta1
            .phases()
            .iter()
            .zip(theta2.phases())
            .map(|(&a, &b)| {
                let z = eta * Complex64::from_polar(1.0, a) + (1.0 - eta) * Complex64::from_polar(1.0, b);
                let angle = if z.norm() <= CANCELLED { a } else { z.arg() };
                quantize_phase(angle, levels)
            })
            .collect();
        let key: Vec<u64> = phases.iter().map(|p| p.to_bits()).collect();
        if seen.insert(key) {
            out.push(PhaseVector::new(phases, levels)?);
        }
    }
    Ok(out)
}

/// `draws` independent uniform phase vectors on the grid (uniform angles
/// when `levels == 0`).
pub fn phase_candidates_random<R: Rng + ?Sized>(n: usize, levels: u32, draws: usize, rng: &mut R) -> Vec<PhaseVector> {
    (0..draws)
        .map(|_| {
            if levels == 0 {
                let phases: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
                PhaseVector::continuous(&phases)
            } else {
                let q: Vec<u32> = (0..n).map(|_| rng.random_range(0..levels)).collect();
                PhaseVector::from_levels(&q, levels).expect("indices drawn below levels")
            }
        })
        .collect()
}

#[cfg(test)]
fn level_indices(v: &PhaseVector) -> Vec<u32> {
    v.phases()
        .iter()
        .map(|&p| crate::channel::quantize_level(p, v.levels()))
        .collect()
}
