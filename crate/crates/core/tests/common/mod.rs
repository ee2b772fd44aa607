#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stresslayout::{Graph, Layout, Point};

/// Random connected graph: a random spanning tree plus extra random edges.
pub fn random_connected_graph(n: usize, extra: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for v in 1..n {
        pairs.push((rng.gen_range(0..v), v));
    }
    if n > 1 {
        for _ in 0..extra {
            pairs.push((rng.gen_range(0..n), rng.gen_range(0..n)));
        }
    }
    Graph::from_edges(n, pairs)
}

pub fn random_layout(n: usize, scale: f64, seed: u64) -> Layout {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
    Layout::new(
        (0..n)
            .map(|_| Point::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
            .collect(),
    )
    .unwrap()
}

/// Floyd-Warshall hop distances, `INFINITY` when unreachable.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b) in g.edges() {
        d[a][b] = 1.0;
        d[b][a] = 1.0;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Stress evaluated term by term, independent of the library's summation.
pub fn naive_stress(x: &Layout, d: &[Vec<f64>]) -> f64 {
    let p = x.points();
    let mut s = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let dist = ((p[i].x - p[j].x).powi(2) + (p[i].y - p[j].y).powi(2)).sqrt();
            s += (dist - d[i][j]).powi(2) / (d[i][j] * d[i][j]);
        }
    }
    s
}

pub fn rigid_motion(x: &Layout, angle: f64, reflect: bool, shift: Point) -> Layout {
    let (s, c) = angle.sin_cos();
    Layout::new(
        x.points()
            .iter()
            .map(|p| {
                let y = if reflect { -p.y } else { p.y };
                Point::new(c * p.x - s * y + shift.x, s * p.x + c * y + shift.y)
            })
            .collect(),
    )
    .unwrap()
}
