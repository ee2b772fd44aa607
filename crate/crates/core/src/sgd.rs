//! Stress minimization by stochastic gradient descent over vertex pairs.
//!
//! Each iteration visits every unordered pair once, in a fresh random order,
//! and moves the two endpoints symmetrically toward their target distance.
//! The step width decays exponentially over a fixed number of iterations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::DistanceMatrix;
use crate::layout::{Layout, Point};
use crate::stress::stress;

pub const DEFAULT_ITERATIONS: usize = 15;
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_JITTER: f64 = 1e-6;

/// Exponentially decaying step width `eta(t) = eta_max * exp(-lambda * t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    t_max: usize,
    eta_max: f64,
    eta_min: f64,
    lambda: f64,
}

impl Schedule {
    pub fn new(t_max: usize, eta_max: f64, eta_min: f64) -> Result<Schedule> {
        if t_max == 0 {
            return Err(Error::InvalidConfig("schedule needs at least one iteration".into()));
        }
        if !(eta_min > 0.0 && eta_min.is_finite() && eta_max.is_finite()) || eta_min > eta_max {
            return Err(Error::InvalidConfig(format!(
                "step widths must satisfy 0 < eta_min <= eta_max, got {eta_min} and {eta_max}"
            )));
        }
        let lambda = if t_max > 1 {
            (eta_max / eta_min).ln() / (t_max - 1) as f64
        } else {
            0.0
        };
        Ok(Schedule {
            t_max,
            eta_max,
            eta_min,
            lambda,
        })
    }

    /// Starts with every pair capped (`eta_max = d_max^2`) and ends at
    /// `eta_min = epsilon * d_min^2`.
    pub fn for_distances(d: &DistanceMatrix, t_max: usize, epsilon: f64) -> Result<Schedule> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
        }
        let d_max = d.max_distance().max(1.0);
        let d_min = d.min_distance().max(f64::MIN_POSITIVE.sqrt());
        let eta_max = d_max * d_max;
        let eta_min = (epsilon * d_min * d_min).min(eta_max);
        Schedule::new(t_max, eta_max, eta_min)
    }

    pub fn t_max(&self) -> usize {
        self.t_max
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }

    pub fn eta_min(&self) -> f64 {
        self.eta_min
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eta(&self, t: usize) -> Result<f64> {
        if t >= self.t_max {
            return Err(Error::IterationOutOfRange {
                t,
                t_max: self.t_max,
            });
        }
        Ok(self.eta_max * (-self.lambda * t as f64).exp())
    }

    /// Weighted, capped step width `min(1, eta(t) / d^2)`.
    pub fn mu(&self, t: usize, d: f64) -> Result<f64> {
        Ok(capped_step(self.eta(t)?, d))
    }
}

#[inline]
pub fn capped_step(eta: f64, d: f64) -> f64 {
    (eta / (d * d)).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdConfig {
    pub schedule: Schedule,
    pub seed: u64,
    pub jitter_epsilon: f64,
}

impl SgdConfig {
    /// Default schedule for `d` with the given seed.
    pub fn for_distances(d: &DistanceMatrix, seed: u64) -> Result<SgdConfig> {
        Ok(SgdConfig {
            schedule: Schedule::for_distances(d, DEFAULT_ITERATIONS, DEFAULT_EPSILON)?,
            seed,
            jitter_epsilon: DEFAULT_JITTER,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.jitter_epsilon > 0.0) {
            return Err(Error::InvalidConfig("jitter_epsilon must be positive".into()));
        }
        Ok(())
    }
}

/// Moves `x_i` and `x_j` symmetrically along their connecting line so that
/// their distance approaches `d`; with `mu = 1` it becomes exactly `d`.
#[inline]
pub fn pair_update(xi: Point, xj: Point, d: f64, mu: f64) -> Result<(Point, Point)> {
    let diff = xi - xj;
    let dist = diff.norm();
    if dist == 0.0 {
        return Err(Error::CoincidentPoints(0, 1));
    }
    let half = diff * (0.5 * mu * (dist - d) / dist);
    Ok((xi - half, xj + half))
}

/// Unit vector with a uniformly random angle.
pub(crate) fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Point {
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let (s, c) = angle.sin_cos();
    Point::new(c, s)
}

pub(crate) fn sgd_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Refills `pairs` with all `i < j` pairs in lexicographic order, so each
/// iteration's permutation depends on the RNG state alone.
fn fill_pairs(pairs: &mut Vec<(u32, u32)>, n: usize) {
    pairs.clear();
    pairs.reserve(n * n.saturating_sub(1) / 2);
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            pairs.push((i, j));
        }
    }
}

fn sweep<R: Rng + ?Sized>(
    pts: &mut [Point],
    d: &DistanceMatrix,
    eta: f64,
    jitter_epsilon: f64,
    pairs: &mut Vec<(u32, u32)>,
    rng: &mut R,
) {
    fill_pairs(pairs, pts.len());
    pairs.shuffle(rng);
    for &(i, j) in pairs.iter() {
        let (i, j) = (i as usize, j as usize);
        let dij = d.get(i, j);
        let mu = capped_step(eta, dij);
        let mut diff = pts[i] - pts[j];
        let mut dist = diff.norm();
        if dist == 0.0 {
            let kick = random_direction(rng) * jitter_epsilon;
            pts[i] += kick;
            pts[j] -= kick;
            diff = pts[i] - pts[j];
            dist = diff.norm();
        }
        let half = diff * (0.5 * mu * (dist - dij) / dist);
        pts[i] -= half;
        pts[j] += half;
    }
}

/// One SGD iteration at schedule step `t`: every pair is updated once in a
/// random order drawn from `rng`, using the current positions.
pub fn sgd_iteration<R: Rng + ?Sized>(
    x: &mut Layout,
    d: &DistanceMatrix,
    schedule: &Schedule,
    t: usize,
    jitter_epsilon: f64,
    rng: &mut R,
) -> Result<()> {
    x.check_len(d.len())?;
    let eta = schedule.eta(t)?;
    let mut pairs = Vec::new();
    sweep(x.points_mut(), d, eta, jitter_epsilon, &mut pairs, rng);
    Ok(())
}

/// Final layout and stress trace of a solver run. `stresses[0]` is the
/// stress of the initial layout, followed by one entry per iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub layout: Layout,
    pub stresses: Vec<f64>,
}

impl RunOutcome {
    pub fn final_stress(&self) -> f64 {
        *self.stresses.last().expect("trace holds the initial stress")
    }
}

pub fn run_sgd(d: &DistanceMatrix, init: &Layout, cfg: &SgdConfig) -> Result<RunOutcome> {
    run_sgd_observed(d, init, cfg, cfg.schedule.t_max(), |_, _| {})
}

/// Runs the first `steps` iterations of the schedule, calling `observe`
/// with the 1-based iteration number and the layout after each iteration.
pub fn run_sgd_observed<F>(
    d: &DistanceMatrix,
    init: &Layout,
    cfg: &SgdConfig,
    steps: usize,
    mut observe: F,
) -> Result<RunOutcome>
where
    F: FnMut(usize, &Layout),
{
    init.check_len(d.len())?;
    cfg.validate()?;
    if steps > cfg.schedule.t_max() {
        return Err(Error::IterationOutOfRange {
            t: steps,
            t_max: cfg.schedule.t_max(),
        });
    }
    let mut rng = sgd_rng(cfg.seed);
    let mut x = init.clone();
    let mut pairs = Vec::new();
    let mut stresses = Vec::with_capacity(steps + 1);
    stresses.push(stress(&x, d)?);
    for t in 0..steps {
        let eta = cfg.schedule.eta(t)?;
        sweep(x.points_mut(), d, eta, cfg.jitter_epsilon, &mut pairs, &mut rng);
        stresses.push(stress(&x, d)?);
        observe(t + 1, &x);
    }
    Ok(RunOutcome {
        layout: x,
        stresses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{all_pairs_shortest_paths, generate, Family};

    fn dist(f: Family) -> DistanceMatrix {
        all_pairs_shortest_paths(&generate(f).unwrap()).unwrap()
    }

    #[test]
    fn eta_endpoints_and_midpoint() {
        let s = Schedule::new(3, 4.0, 1.0).unwrap();
        assert_eq!(s.eta(0).unwrap(), 4.0);
        assert!((s.eta(2).unwrap() - 1.0).abs() < 1e-12);
        let closed_form = 4.0 * (-(4.0f64).ln() / 2.0).exp();
        assert!((s.eta(1).unwrap() - closed_form).abs() < 1e-15);
        assert!((s.eta(1).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(s.eta(3), Err(Error::IterationOutOfRange { t: 3, t_max: 3 })));
    }

    #[test]
    fn single_iteration_schedule() {
        let s = Schedule::new(1, 5.0, 0.1).unwrap();
        assert_eq!(s.lambda(), 0.0);
        assert_eq!(s.eta(0).unwrap(), 5.0);
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::new(0, 1.0, 1.0).is_err());
        assert!(Schedule::new(5, 1.0, 2.0).is_err());
        assert!(Schedule::new(5, 1.0, 0.0).is_err());
    }

    #[test]
    fn default_schedule_caps_every_pair_at_first_step() {
        let d = dist(Family::Grid { rows: 4, cols: 5 });
        let s = Schedule::for_distances(&d, 15, 0.01).unwrap();
        assert_eq!(s.eta_max(), 49.0);
        assert!((s.eta_min() - 0.01).abs() < 1e-15);
        assert!((s.eta(14).unwrap() - 0.01).abs() < 1e-9 * 0.01);
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                assert_eq!(s.mu(0, d.get(i, j)).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn mu_examples() {
        assert_eq!(capped_step(5.0, 1.0), 1.0);
        assert!((capped_step(5.0, 10.0) - 0.05).abs() < 1e-15);
        assert_eq!(capped_step(1.0, 1.0), 1.0);
    }

    #[test]
    fn pair_update_examples() {
        let (a, b) = pair_update(Point::new(0.0, 0.0), Point::new(2.0, 0.0), 1.0, 1.0).unwrap();
        assert_eq!((a, b), (Point::new(0.5, 0.0), Point::new(1.5, 0.0)));

        // delta = ((1 - 3) / 1) * (-1, 0) = (2, 0)
        let (a, b) = pair_update(Point::new(0.0, 0.0), Point::new(1.0, 0.0), 3.0, 1.0).unwrap();
        assert_eq!((a, b), (Point::new(-1.0, 0.0), Point::new(2.0, 0.0)));
        assert_eq!(a.distance(b), 3.0);

        let xi = Point::new(0.3, -1.0);
        let xj = Point::new(2.0, 4.0);
        assert_eq!(pair_update(xi, xj, 2.0, 0.0).unwrap(), (xi, xj));

        assert!(pair_update(xi, xi, 1.0, 1.0).is_err());
    }

    #[test]
    fn k2_single_iteration_is_exact() {
        let d = dist(Family::Path(2));
        let x0 = Layout::from_coords(&[(0.1, 0.2), (0.7, 0.4)]).unwrap();
        let cfg = SgdConfig {
            schedule: Schedule::new(1, 1.0, 1.0).unwrap(),
            seed: 3,
            jitter_epsilon: DEFAULT_JITTER,
        };
        let out = run_sgd(&d, &x0, &cfg).unwrap();
        assert_eq!(out.stresses.len(), 2);
        assert!(out.final_stress() < 1e-24);
        let p = out.layout.points();
        assert!((p[0].distance(p[1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_are_jittered() {
        let d = dist(Family::Path(3));
        let x0 = Layout::from_coords(&[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]).unwrap();
        let cfg = SgdConfig::for_distances(&d, 1).unwrap();
        let out = run_sgd(&d, &x0, &cfg).unwrap();
        assert!(out.layout.points().iter().all(|p| p.is_finite()));
        assert!(out.final_stress() < out.stresses[0]);
    }

    #[test]
    fn p3_iteration_reduces_stress() {
        let d = dist(Family::Path(3));
        let s = Schedule::new(1, 4.0, 4.0).unwrap();
        for seed in 0..10 {
            let mut x = crate::init::random_init(3, seed).unwrap();
            let before = stress(&x, &d).unwrap();
            let mut rng = sgd_rng(seed);
            sgd_iteration(&mut x, &d, &s, 0, DEFAULT_JITTER, &mut rng).unwrap();
            assert!(stress(&x, &d).unwrap() < before, "seed {seed}");
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let d = dist(Family::Grid { rows: 5, cols: 5 });
        let x0 = crate::init::random_init(25, 9).unwrap();
        let cfg = SgdConfig::for_distances(&d, 42).unwrap();
        let a = run_sgd(&d, &x0, &cfg).unwrap();
        let b = run_sgd(&d, &x0, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.stresses.len(), 16);
        let other = run_sgd(&d, &x0, &SgdConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.layout, other.layout);
    }

    #[test]
    fn observed_prefix_matches_full_run() {
        let d = dist(Family::Cycle(12));
        let x0 = crate::init::random_init(12, 1).unwrap();
        let cfg = SgdConfig::for_distances(&d, 5).unwrap();
        let full = run_sgd(&d, &x0, &cfg).unwrap();
        let mut seen = Vec::new();
        let part = run_sgd_observed(&d, &x0, &cfg, 6, |t, _| seen.push(t)).unwrap();
        assert_eq!(seen, (1..=6).collect::<Vec<_>>());
        assert_eq!(&full.stresses[..7], &part.stresses[..]);
        assert!(run_sgd_observed(&d, &x0, &cfg, 16, |_, _| {}).is_err());
    }
}
