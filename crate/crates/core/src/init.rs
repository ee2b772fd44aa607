//! Initial layouts: uniform random, classical MDS and PivotMDS.
//!
//! Both spectral initializers extract the two dominant eigenvectors by
//! power iteration with deflation. Each eigenvector is normalized so that
//! its first nonzero component is positive.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{DistanceMatrix, Graph};
use crate::layout::{Layout, Point};

/// Stream id separating the initializer's draws from the solver RNG of the
/// same seed.
const INIT_STREAM: u64 = 1;
/// Start vector seed for power iteration.
const POWER_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

pub const DEFAULT_PIVOTS: usize = 100;

/// `n` points drawn uniformly from the unit square.
pub fn random_init(n: usize, seed: u64) -> Result<Layout> {
    if n == 0 {
        return Err(Error::TooFewVertices {
            required: 1,
            found: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INIT_STREAM);
    let points = (0..n)
        .map(|_| Point::new(rng.gen::<f64>(), rng.gen::<f64>()))
        .collect();
    Ok(Layout::from_points_unchecked(points))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    /// Convergence threshold on the change of the unit eigenvector.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            tolerance: 1e-9,
            max_iterations: 100_000,
        }
    }
}

/// Symmetric matrix-vector product `y = A v` over a dense backing store.
trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[f64], out: &mut [f64]);
    /// Frobenius norm, used to recognise numerically vanishing products.
    fn scale(&self) -> f64;
}

struct Dense<'a> {
    n: usize,
    data: &'a [f64],
}

impl SymmetricOperator for Dense<'_> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (row, o) in self.data.chunks_exact(self.n).zip(out.iter_mut()) {
            *o = dot(row, v);
        }
    }

    fn scale(&self) -> f64 {
        dot(self.data, self.data).sqrt()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for u in against {
        let c = dot(v, u);
        v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
    }
}

/// Flip `v` so its first component that is not numerically zero is positive.
fn fix_sign(v: &mut [f64]) {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(&first) = v.iter().find(|x| x.abs() > 1e-10 * scale) {
        if first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

struct Eigenpair {
    value: f64,
    vector: Vec<f64>,
}

/// Dominant (by magnitude) eigenpairs of a symmetric operator. On failure
/// the partially converged pairs are returned in the error slot.
fn dominant_eigenpairs<A: SymmetricOperator>(
    a: &A,
    count: usize,
    cfg: &PowerConfig,
) -> std::result::Result<Vec<Eigenpair>, (usize, Vec<Eigenpair>)> {
    let n = a.dim();
    let floor = 1e-12 * a.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut found: Vec<Eigenpair> = Vec::with_capacity(count);
    let mut failed_at = None;
    for _ in 0..count {
        let basis: Vec<Vec<f64>> = found.iter().map(|p| p.vector.clone()).collect();
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        orthogonalize(&mut v, &basis);
        normalize(&mut v);
        let mut next = vec![0.0; n];
        let mut value = 0.0;
        let mut converged = false;
        for _ in 0..cfg.max_iterations {
            a.apply(&v, &mut next);
            orthogonalize(&mut next, &basis);
            value = dot(&v, &next);
            if normalize(&mut next) <= floor {
                // v lies in the null space of the deflated operator
                value = 0.0;
                converged = true;
                break;
            }
            // Negative eigenvalues flip the iterate each step.
            let sign = if value < 0.0 { -1.0 } else { 1.0 };
            let change = next
                .iter()
                .zip(&v)
                .map(|(a, b)| (a * sign - b).powi(2))
                .sum::<f64>()
                .sqrt();
            std::mem::swap(&mut v, &mut next);
            if change < cfg.tolerance {
                converged = true;
                break;
            }
        }
        if converged && value != 0.0 {
            a.apply(&v, &mut next);
            value = dot(&v, &next);
        }
        found.push(Eigenpair { value, vector: v });
        if !converged {
            failed_at = Some(cfg.max_iterations);
        }
    }
    match failed_at {
        None => Ok(found),
        Some(it) => Err((it, found)),
    }
}

fn layout_from_columns(cols: &[Vec<f64>]) -> Layout {
    let n = cols[0].len();
    let second = |i: usize| cols.get(1).map_or(0.0, |c| c[i]);
    Layout::from_points_unchecked((0..n).map(|i| Point::new(cols[0][i], second(i))).collect())
}

fn scaled_columns(pairs: Vec<Eigenpair>) -> Vec<Vec<f64>> {
    pairs
        .into_iter()
        .map(|mut p| {
            fix_sign(&mut p.vector);
            let s = p.value.max(0.0).sqrt();
            p.vector.iter_mut().for_each(|x| *x *= s);
            p.vector
        })
        .collect()
}

/// Classical scaling: top two eigenvectors of the double-centered squared
/// distance matrix, each scaled by the square root of its eigenvalue.
pub fn classical_mds(d: &DistanceMatrix) -> Result<Layout> {
    classical_mds_with(d, &PowerConfig::default())
}

pub fn classical_mds_with(d: &DistanceMatrix, cfg: &PowerConfig) -> Result<Layout> {
    let n = d.len();
    if n < 2 {
        return Err(Error::TooFewVertices {
            required: 2,
            found: n,
        });
    }
    let b = double_centered_gram(d);
    let op = Dense { n, data: &b };
    match dominant_eigenpairs(&op, 2, cfg) {
        Ok(pairs) => Ok(layout_from_columns(&scaled_columns(pairs))),
        Err((iterations, pairs)) => Err(Error::NotConverged {
            iterations,
            partial: Box::new(layout_from_columns(&scaled_columns(pairs))),
        }),
    }
}

/// `B = -1/2 J D^2 J` with `J` the centering matrix.
fn double_centered_gram(d: &DistanceMatrix) -> Vec<f64> {
    let n = d.len();
    let mut sq = vec![0.0; n * n];
    for i in 0..n {
        for (j, &v) in d.row(i).iter().enumerate() {
            sq[i * n + j] = v * v;
        }
    }
    let row_mean: Vec<f64> = sq.chunks_exact(n).map(|r| r.iter().sum::<f64>() / n as f64).collect();
    let grand = row_mean.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            // symmetric: column means equal row means
            sq[i * n + j] = -0.5 * (sq[i * n + j] - row_mean[i] - row_mean[j] + grand);
        }
    }
    sq
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PivotConfig {
    pub pivots: usize,
    pub seed: u64,
    pub power_tolerance: f64,
    pub power_max_iters: usize,
}

impl PivotConfig {
    pub fn new(pivots: usize, seed: u64) -> PivotConfig {
        let power = PowerConfig::default();
        PivotConfig {
            pivots,
            seed,
            power_tolerance: power.tolerance,
            power_max_iters: power.max_iterations,
        }
    }
}

impl Default for PivotConfig {
    fn default() -> Self {
        PivotConfig::new(DEFAULT_PIVOTS, 0)
    }
}

/// Max-min pivot selection: the first pivot is drawn from `seed`, every
/// further pivot maximizes its BFS distance to the chosen set (ties go to
/// the lowest index). Returns the pivots and their distance columns.
pub fn select_pivots(g: &Graph, k: usize, seed: u64) -> Result<(Vec<usize>, Vec<Vec<f64>>)> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::TooFewVertices {
            required: 1,
            found: 0,
        });
    }
    let k = k.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INIT_STREAM);
    let mut pivots = Vec::with_capacity(k);
    let mut columns = Vec::with_capacity(k);
    let mut nearest = vec![f64::INFINITY; n];
    let mut next = rng.gen_range(0..n);
    for _ in 0..k {
        pivots.push(next);
        let mut col = Vec::with_capacity(n);
        for (v, hops) in g.bfs(next).into_iter().enumerate() {
            let h = hops.ok_or(Error::Disconnected(next, v))? as f64;
            nearest[v] = nearest[v].min(h);
            col.push(h);
        }
        columns.push(col);
        let mut best = 0;
        for v in 1..n {
            if nearest[v] > nearest[best] {
                best = v;
            }
        }
        next = best;
    }
    Ok((pivots, columns))
}

/// PivotMDS: classical scaling approximated from BFS distances to `k`
/// pivots. With `k = n` it coincides with [`classical_mds`].
pub fn pivot_mds(g: &Graph, cfg: &PivotConfig) -> Result<Layout> {
    let n = g.vertex_count();
    if n < 2 {
        return Err(Error::TooFewVertices {
            required: 2,
            found: n,
        });
    }
    if cfg.pivots == 0 {
        return Err(Error::InvalidConfig("pivot count must be positive".into()));
    }
    if cfg.pivots > n {
        log::warn!("{} pivots requested for {} vertices; using {}", cfg.pivots, n, n);
    }
    let (pivots, columns) = select_pivots(g, cfg.pivots, cfg.seed)?;
    let k = pivots.len();

    // c[i][p] for vertex i and pivot p, stored row-major n x k
    let mut c = vec![0.0; n * k];
    let mut col_mean = vec![0.0; k];
    for (p, col) in columns.iter().enumerate() {
        col_mean[p] = col.iter().map(|h| h * h).sum::<f64>() / n as f64;
    }
    let mut row_mean = vec![0.0; n];
    for i in 0..n {
        row_mean[i] = columns.iter().map(|col| col[i] * col[i]).sum::<f64>() / k as f64;
    }
    let grand = col_mean.iter().sum::<f64>() / k as f64;
    for i in 0..n {
        for p in 0..k {
            let sq = columns[p][i] * columns[p][i];
            c[i * k + p] = -0.5 * (sq - col_mean[p] - row_mean[i] + grand);
        }
    }

    // C^T C, k x k
    let mut ctc = vec![0.0; k * k];
    for row in c.chunks_exact(k) {
        for p in 0..k {
            let rp = row[p];
            if rp == 0.0 {
                continue;
            }
            for q in p..k {
                ctc[p * k + q] += rp * row[q];
            }
        }
    }
    for p in 0..k {
        for q in 0..p {
            ctc[p * k + q] = ctc[q * k + p];
        }
    }

    let power = PowerConfig {
        tolerance: cfg.power_tolerance,
        max_iterations: cfg.power_max_iters,
    };
    let op = Dense { n: k, data: &ctc };
    let (pairs, failure) = match dominant_eigenpairs(&op, 2.min(k), &power) {
        Ok(p) => (p, None),
        Err((it, p)) => (p, Some(it)),
    };

    let stretch = (n as f64 / k as f64).sqrt();
    let mut cols = Vec::with_capacity(pairs.len());
    for pair in pairs {
        // u = C v / sigma is the left singular vector
        let mut u: Vec<f64> = c.chunks_exact(k).map(|row| dot(row, &pair.vector)).collect();
        let sigma = normalize(&mut u);
        // Sign of the underlying eigenvalue of B, read off the pivot rows.
        let alignment: f64 = pivots
            .iter()
            .zip(&pair.vector)
            .map(|(&p, &v)| u[p] * v)
            .sum();
        fix_sign(&mut u);
        let lambda = if alignment > 0.0 { sigma * stretch } else { 0.0 };
        let s = lambda.sqrt();
        u.iter_mut().for_each(|x| *x *= s);
        cols.push(u);
    }
    if cols.len() < 2 {
        cols.push(vec![0.0; n]);
    }
    let layout = layout_from_columns(&cols);
    match failure {
        None => Ok(layout),
        Some(iterations) => Err(Error::NotConverged {
            iterations,
            partial: Box::new(layout),
        }),
    }
}
