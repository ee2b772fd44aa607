use rayon::prelude::*;

use super::Graph;
use crate::error::{Error, Result};

/// Dense symmetric matrix of target distances, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps a full row-major `n x n` matrix. The matrix must be symmetric
    /// with a zero diagonal and positive off-diagonal entries.
    pub fn from_dense(n: usize, data: Vec<f64>) -> Result<DistanceMatrix> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidConfig(format!("d({i},{i}) must be zero")));
            }
            for j in i + 1..n {
                let d = data[i * n + j];
                if d != data[j * n + i] {
                    return Err(Error::InvalidConfig(format!(
                        "distance matrix not symmetric at ({i},{j})"
                    )));
                }
                if !(d.is_finite() && d > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "d({i},{j}) = {d} must be positive and finite"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Stress weight `d(i,j)^-2`; only meaningful for `i != j`.
    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let d = self.get(i, j);
        1.0 / (d * d)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Largest off-diagonal entry (0 when `n < 2`).
    pub fn max_distance(&self) -> f64 {
        self.off_diagonal().fold(0.0, f64::max)
    }

    /// Smallest off-diagonal entry (0 when `n < 2`).
    pub fn min_distance(&self) -> f64 {
        let m = self.off_diagonal().fold(f64::INFINITY, f64::min);
        if m.is_finite() {
            m
        } else {
            0.0
        }
    }

    fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| self.get(i, j)))
    }
}

/// Hop-count distances between all vertex pairs, one BFS per source.
///
/// Fails with [`Error::Disconnected`] if some pair is unreachable.
pub fn all_pairs_shortest_paths(g: &Graph) -> Result<DistanceMatrix> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::TooFewVertices {
            required: 1,
            found: 0,
        });
    }
    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(n)
        .enumerate()
        .try_for_each(|(source, row)| {
            for (target, hops) in g.bfs(source).into_iter().enumerate() {
                match hops {
                    Some(h) => row[target] = h as f64,
                    None => return Err(Error::Disconnected(source, target)),
                }
            }
            Ok(())
        })?;
    Ok(DistanceMatrix { n, data })
}
