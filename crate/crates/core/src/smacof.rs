//! Localized stress majorization.
//!
//! One iteration sweeps the vertices in ascending order and moves each to
//! the `d^-2`-weighted average of its target positions
//! `x_j + d_ij * (x_i - x_j) / |x_i - x_j|`. Every move minimizes a convex
//! majorant of the vertex's stress terms, so stress never increases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;
use crate::layout::{Layout, Point};
use crate::sgd::{random_direction, RunOutcome, DEFAULT_JITTER};
use crate::stress::stress;

/// Seed for the jitter RNG; majorization itself draws no randomness.
const JITTER_SEED: u64 = 0x05ee_d0f5_ac0f;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmacofConfig {
    pub max_iterations: usize,
    /// Stop once `(prev - cur) / prev` drops below this.
    pub rel_tolerance: f64,
    pub jitter_epsilon: f64,
}

impl Default for SmacofConfig {
    fn default() -> Self {
        SmacofConfig {
            max_iterations: 500,
            rel_tolerance: 1e-6,
            jitter_epsilon: DEFAULT_JITTER,
        }
    }
}

impl SmacofConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if !(self.rel_tolerance > 0.0) {
            return Err(Error::InvalidConfig("rel_tolerance must be positive".into()));
        }
        if !(self.jitter_epsilon > 0.0) {
            return Err(Error::InvalidConfig("jitter_epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// Majorizing position for vertex `i` with all other vertices fixed.
pub fn vertex_update(i: usize, x: &Layout, d: &DistanceMatrix) -> Result<Point> {
    x.check_len(d.len())?;
    if x.len() < 2 {
        return Err(Error::TooFewVertices {
            required: 2,
            found: x.len(),
        });
    }
    target(i, x.points(), d.row(i))
}

fn target(i: usize, pts: &[Point], row: &[f64]) -> Result<Point> {
    let xi = pts[i];
    let mut num = Point::ORIGIN;
    let mut den = 0.0;
    for (j, (&xj, &dij)) in pts.iter().zip(row).enumerate() {
        if j == i {
            continue;
        }
        let diff = xi - xj;
        let dist = diff.norm();
        if dist == 0.0 {
            return Err(Error::CoincidentPoints(i, j));
        }
        let w = 1.0 / (dij * dij);
        num += (xj + diff * (dij / dist)) * w;
        den += w;
    }
    Ok(num * (1.0 / den))
}

fn sweep<R: Rng + ?Sized>(pts: &mut [Point], d: &DistanceMatrix, jitter_epsilon: f64, rng: &mut R) {
    for i in 0..pts.len() {
        let row = d.row(i);
        let next = loop {
            match target(i, pts, row) {
                Ok(p) => break p,
                Err(_) => {
                    // Coincides with another vertex; push it off along a random direction.
                    let kick = random_direction(rng) * jitter_epsilon;
                    pts[i] += kick;
                }
            }
        };
        pts[i] = next;
    }
}

/// One sweep over all vertices in ascending order, each seeing the
/// already-updated positions of its predecessors.
pub fn smacof_iteration(x: &mut Layout, d: &DistanceMatrix) -> Result<()> {
    x.check_len(d.len())?;
    if x.len() < 2 {
        return Err(Error::TooFewVertices {
            required: 2,
            found: x.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(JITTER_SEED);
    sweep(x.points_mut(), d, DEFAULT_JITTER, &mut rng);
    Ok(())
}

/// Iterates until the relative stress decrease falls below the tolerance
/// or the iteration cap is reached.
pub fn run_smacof(d: &DistanceMatrix, init: &Layout, cfg: &SmacofConfig) -> Result<RunOutcome> {
    run_smacof_observed(d, init, cfg, |_, _| {})
}

/// Like [`run_smacof`], calling `observe` with the 1-based iteration number
/// and the layout after each iteration.
pub fn run_smacof_observed<F>(
    d: &DistanceMatrix,
    init: &Layout,
    cfg: &SmacofConfig,
    mut observe: F,
) -> Result<RunOutcome>
where
    F: FnMut(usize, &Layout),
{
    init.check_len(d.len())?;
    cfg.validate()?;
    if init.len() < 2 {
        return Err(Error::TooFewVertices {
            required: 2,
            found: init.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(JITTER_SEED);
    let mut x = init.clone();
    let mut prev = stress(&x, d)?;
    let mut stresses = vec![prev];
    for iteration in 1..=cfg.max_iterations {
        sweep(x.points_mut(), d, cfg.jitter_epsilon, &mut rng);
        let cur = stress(&x, d)?;
        stresses.push(cur);
        observe(iteration, &x);
        if prev == 0.0 || (prev - cur) / prev < cfg.rel_tolerance {
            break;
        }
        prev = cur;
    }
    Ok(RunOutcome {
        layout: x,
        stresses,
    })
}
