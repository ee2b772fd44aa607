//! Simple undirected graphs, their construction and the shortest-path
//! distances used as layout targets.

mod distance;
mod parse;

use std::collections::{BTreeSet, VecDeque};
use std::path::Path;
use std::str::FromStr;

pub use distance::{all_pairs_shortest_paths, DistanceMatrix};
pub use parse::{parse_edge_list, parse_matrix_market};

use crate::error::{Error, Result};

/// A simple undirected graph on the vertices `0..n`.
///
/// Edges are stored once as `(i, j)` with `i < j`, sorted lexicographically.
/// Adjacency lists are sorted and symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an arbitrary list of vertex pairs. Self-loops are
    /// dropped and duplicates (in either orientation) merged.
    ///
    /// Panics if an endpoint is `>= n`; parsers check indices before calling.
    pub fn from_edges<I>(n: usize, pairs: I) -> Graph
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (a, b) in pairs {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for n = {n}");
            if a != b {
                set.insert((a.min(b), a.max(b)));
            }
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            n,
            edges,
            adjacency,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Hop distances from `source` to every vertex; `None` marks unreachable.
    pub fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or_default();
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Connected components, each as an ascending vertex list, ordered by
    /// their smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut members = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                members.push(u);
                for &v in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().len() == 1
    }

    /// Subgraph induced by `vertices` (ascending), reindexed in that order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (new, &old) in vertices.iter().enumerate() {
            index[old] = new;
        }
        let pairs = self
            .edges
            .iter()
            .filter(|&&(a, b)| index[a] != usize::MAX && index[b] != usize::MAX)
            .map(|&(a, b)| (index[a], index[b]));
        Graph::from_edges(vertices.len(), pairs)
    }
}

/// The induced subgraph on the largest connected component. Among equally
/// large components the one containing the smallest vertex id wins.
/// Vertices keep their relative order.
pub fn largest_connected_component(g: &Graph) -> Graph {
    let mut best: Option<Vec<usize>> = None;
    for comp in g.components() {
        if best.as_ref().is_none_or(|b| comp.len() > b.len()) {
            best = Some(comp);
        }
    }
    match best {
        Some(vertices) => g.induced_subgraph(&vertices),
        None => Graph::from_edges(0, []),
    }
}

/// On-disk graph formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    MatrixMarket,
    EdgeList,
}

impl Format {
    /// `.mtx` files are Matrix Market, everything else an edge list.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => Format::MatrixMarket,
            _ => Format::EdgeList,
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Format, String> {
        match s {
            "mtx" => Ok(Format::MatrixMarket),
            "edges" => Ok(Format::EdgeList),
            other => Err(format!("unknown format `{other}` (expected mtx or edges)")),
        }
    }
}

pub fn parse_graph(text: &str, format: Format) -> Result<Graph> {
    let g = match format {
        Format::MatrixMarket => parse_matrix_market(text)?,
        Format::EdgeList => parse_edge_list(text)?,
    };
    Ok(g)
}

/// Reads a graph file, inferring the format from the extension unless one
/// is given.
pub fn read_graph(path: &Path, format: Option<Format>) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text, format.unwrap_or_else(|| Format::from_path(path)))
}

/// Standard synthetic graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Path(usize),
    /// Requires at least 3 vertices.
    Cycle(usize),
    Grid { rows: usize, cols: usize },
    Complete(usize),
}

impl Family {
    /// Short identifier such as `grid_10x10`.
    pub fn name(&self) -> String {
        match *self {
            Family::Path(n) => format!("path_{n}"),
            Family::Cycle(n) => format!("cycle_{n}"),
            Family::Grid { rows, cols } => format!("grid_{rows}x{cols}"),
            Family::Complete(n) => format!("complete_{n}"),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    /// Parses the identifiers produced by [`Family::name`].
    fn from_str(s: &str) -> std::result::Result<Family, String> {
        let bad = || format!("unknown graph family `{s}` (expected e.g. path_10, cycle_10, grid_4x5, complete_6)");
        let (kind, size) = s.split_once('_').ok_or_else(bad)?;
        let num = |t: &str| t.parse::<usize>().map_err(|_| bad());
        match kind {
            "path" => Ok(Family::Path(num(size)?)),
            "cycle" => Ok(Family::Cycle(num(size)?)),
            "complete" => Ok(Family::Complete(num(size)?)),
            "grid" => {
                let (r, c) = size.split_once('x').ok_or_else(bad)?;
                Ok(Family::Grid {
                    rows: num(r)?,
                    cols: num(c)?,
                })
            }
            _ => Err(bad()),
        }
    }
}

pub fn generate(family: Family) -> Result<Graph> {
    let positive = |what: &str, v: usize| {
        if v == 0 {
            Err(Error::InvalidSize(format!("{what} must be positive")))
        } else {
            Ok(())
        }
    };
    match family {
        Family::Path(n) => {
            positive("path length", n)?;
            Ok(Graph::from_edges(n, (1..n).map(|i| (i - 1, i))))
        }
        Family::Cycle(n) => {
            if n < 3 {
                return Err(Error::InvalidSize(format!(
                    "cycle needs at least 3 vertices, got {n}"
                )));
            }
            Ok(Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))))
        }
        Family::Grid { rows, cols } => {
            positive("grid rows", rows)?;
            positive("grid cols", cols)?;
            let id = |r: usize, c: usize| r * cols + c;
            let mut pairs = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        pairs.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        pairs.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            Ok(Graph::from_edges(rows * cols, pairs))
        }
        Family::Complete(n) => {
            positive("complete graph size", n)?;
            let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            Ok(Graph::from_edges(n, pairs))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_simple(g: &Graph) {
        for v in 0..g.vertex_count() {
            assert!(!g.neighbors(v).contains(&v));
            for &u in g.neighbors(v) {
                assert!(g.neighbors(u).contains(&v));
            }
        }
    }

    #[test]
    fn format_inference() {
        assert_eq!(Format::from_path(Path::new("a/1138_bus.mtx")), Format::MatrixMarket);
        assert_eq!(Format::from_path(Path::new("g.MTX")), Format::MatrixMarket);
        assert_eq!(Format::from_path(Path::new("g.txt")), Format::EdgeList);
        assert_eq!("edges".parse::<Format>(), Ok(Format::EdgeList));
        assert!("csv".parse::<Format>().is_err());
    }

    #[test]
    fn read_graph_reports_io_errors() {
        let err = read_graph(Path::new("/nonexistent/graph.mtx"), None).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn from_edges_normalizes() {
        let g = Graph::from_edges(3, [(1, 0), (0, 1), (2, 2), (2, 1)]);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_simple(&g);
    }

    #[test]
    fn generators() {
        let p = generate(Family::Path(3)).unwrap();
        assert_eq!(p.edges(), &[(0, 1), (1, 2)]);

        let c = generate(Family::Cycle(3)).unwrap();
        assert_eq!(c.edge_count(), 3);
        assert!((0..3).all(|v| c.degree(v) == 2));

        let g = generate(Family::Grid { rows: 2, cols: 2 }).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));

        let k = generate(Family::Complete(5)).unwrap();
        assert_eq!(k.edge_count(), 10);

        for g in [p, c, g, k] {
            assert_simple(&g);
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in [
            Family::Path(7),
            Family::Cycle(100),
            Family::Grid { rows: 10, cols: 3 },
            Family::Complete(4),
        ] {
            assert_eq!(f.name().parse::<Family>(), Ok(f));
        }
        for bad in ["grid_10", "path", "star_5", "cycle_x"] {
            assert!(bad.parse::<Family>().is_err(), "{bad}");
        }
    }

    #[test]
    fn generator_rejects_zero_sizes() {
        assert!(generate(Family::Path(0)).is_err());
        assert!(generate(Family::Cycle(2)).is_err());
        assert!(generate(Family::Grid { rows: 0, cols: 3 }).is_err());
        assert!(generate(Family::Complete(0)).is_err());
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let g = generate(Family::Grid { rows: 3, cols: 4 }).unwrap();
        assert_eq!(largest_connected_component(&g), g);
    }

    #[test]
    fn lcc_picks_largest() {
        // {0,3} and {1,2,4}
        let g = Graph::from_edges(5, [(0, 3), (1, 2), (2, 4)]);
        let lcc = largest_connected_component(&g);
        assert_eq!(lcc.vertex_count(), 3);
        assert_eq!(lcc.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn lcc_tie_prefers_smallest_vertex() {
        // {1,2} and {0,3}, both size 2
        let g = Graph::from_edges(4, [(1, 2), (3, 0)]);
        let comps = g.components();
        assert_eq!(comps, vec![vec![0, 3], vec![1, 2]]);
        let lcc = largest_connected_component(&g);
        assert_eq!(lcc.vertex_count(), 2);
        assert_eq!(lcc.edges(), &[(0, 1)]);
    }

    #[test]
    fn lcc_of_empty_graph() {
        let g = Graph::from_edges(0, []);
        assert_eq!(largest_connected_component(&g).vertex_count(), 0);
        assert!(!g.is_connected());
    }
}
