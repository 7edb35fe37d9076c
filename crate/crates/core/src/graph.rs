//! Weighted directed graphs and their in-degree Laplacians.
//!
//! Orientation convention: adjacency entry `(i, j)` holds the weight of the
//! edge `j → i`, so row sums of the adjacency matrix are in-degrees and the
//! Laplacian `L = D − A` is the in-degree Laplacian. Every row of `L` sums
//! to zero.

use std::collections::BTreeMap;

use faer::{Mat, MatRef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::kron;

/// A weighted directed graph on vertices `0..order`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    order: usize,
    edges: BTreeMap<(usize, usize), f64>,
}

impl DirectedGraph {
    /// Builds a graph from `(src, dst, weight)` triples.
    ///
    /// Rejects self-loops, repeated ordered pairs, out-of-range vertices and
    /// weights that are not strictly positive and finite.
    pub fn new(order: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidGraph("order must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (src, dst, w) in edges {
            if src >= order || dst >= order {
                return Err(Error::InvalidGraph(format!(
                    "edge {src}->{dst} out of range for order {order}"
                )));
            }
            if src == dst {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {src}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge {src}->{dst} has invalid weight {w}"
                )));
            }
            if map.insert((src, dst), w).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge {src}->{dst}")));
            }
        }
        Ok(Self { order, edges: map })
    }

    /// Graph with both `a → b` and `b → a` (same weight) for every listed pair.
    pub fn undirected(
        order: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let both: Vec<_> = edges
            .into_iter()
            .flat_map(|(a, b, w)| [(a, b, w), (b, a, w)])
            .collect();
        Self::new(order, both)
    }

    pub fn edgeless(order: usize) -> Result<Self> {
        Self::new(order, [])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(src, dst, weight)` in lexicographic `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(s, d), &w)| (s, d, w))
    }

    pub fn weight(&self, src: usize, dst: usize) -> Option<f64> {
        self.edges.get(&(src, dst)).copied()
    }

    /// True when every edge has a reverse edge of identical weight.
    pub fn is_undirected(&self) -> bool {
        self.edges().all(|(s, d, w)| self.weight(d, s) == Some(w))
    }

    /// Adjacency matrix with `a(i, j)` = weight of `j → i`.
    pub fn adjacency(&self) -> Mat<f64> {
        let mut a = Mat::zeros(self.order, self.order);
        for (s, d, w) in self.edges() {
            a[(d, s)] = w;
        }
        a
    }

    pub fn in_degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.order];
        for (_, d, w) in self.edges() {
            deg[d] += w;
        }
        deg
    }

    /// In-degree Laplacian `D − A`.
    pub fn laplacian(&self) -> Mat<f64> {
        let mut l = Mat::zeros(self.order, self.order);
        for (s, d, w) in self.edges() {
            l[(d, s)] -= w;
            l[(d, d)] += w;
        }
        l
    }
}

/// Cartesian product `g1 □ g2`; vertex `(v1, v2)` is flattened to `v1·N2 + v2`.
pub fn cartesian_product(g1: &DirectedGraph, g2: &DirectedGraph) -> DirectedGraph {
    let (n1, n2) = (g1.order(), g2.order());
    let mut edges = BTreeMap::new();
    for (s, d, w) in g1.edges() {
        for v2 in 0..n2 {
            edges.insert((s * n2 + v2, d * n2 + v2), w);
        }
    }
    for (s, d, w) in g2.edges() {
        for v1 in 0..n1 {
            edges.insert((v1 * n2 + s, v1 * n2 + d), w);
        }
    }
    DirectedGraph {
        order: n1 * n2,
        edges,
    }
}

/// `L1 ⊗ I_{N2} + I_{N1} ⊗ L2` without building the product graph.
pub fn product_laplacian(l1: MatRef<'_, f64>, l2: MatRef<'_, f64>) -> Mat<f64> {
    assert_eq!(l1.nrows(), l1.ncols(), "l1 must be square");
    assert_eq!(l2.nrows(), l2.ncols(), "l2 must be square");
    let (n1, n2) = (l1.nrows(), l2.nrows());
    let a = kron(l1, Mat::<f64>::identity(n2, n2).as_ref());
    let b = kron(Mat::<f64>::identity(n1, n1).as_ref(), l2);
    a + b
}

/// Unweighted directed path `0 → 1 → … → n−1`.
pub fn directed_line_graph(n: usize) -> Result<DirectedGraph> {
    DirectedGraph::new(n, (1..n).map(|i| (i - 1, i, 1.0)))
}

/// Unweighted directed cycle `0 → 1 → … → n−1 → 0`.
pub fn directed_cycle(n: usize) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::InvalidGraph(
            "a cycle needs at least two vertices".into(),
        ));
    }
    if n == 2 {
        return DirectedGraph::new(2, [(0, 1, 1.0), (1, 0, 1.0)]);
    }
    DirectedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)))
}

/// Distance used to rank neighbors in [`knn_graph_with_metric`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    /// Euclidean distance on the raw coordinate pair.
    #[default]
    Euclidean,
    /// Great-circle distance, reading coordinates as (longitude, latitude) in degrees.
    Haversine,
}

impl DistanceMetric {
    pub fn distance(self, a: (f64, f64), b: (f64, f64)) -> f64 {
        match self {
            DistanceMetric::Euclidean => (a.0 - b.0).hypot(a.1 - b.1),
            DistanceMetric::Haversine => {
                let (lon1, lat1) = (a.0.to_radians(), a.1.to_radians());
                let (lon2, lat2) = (b.0.to_radians(), b.1.to_radians());
                let h = ((lat2 - lat1) / 2.0).sin().powi(2)
                    + lat1.cos() * lat2.cos() * ((lon2 - lon1) / 2.0).sin().powi(2);
                2.0 * h.sqrt().min(1.0).asin()
            }
        }
    }
}

/// k-nearest-neighbor graph with Euclidean distance. See [`knn_graph_with_metric`].
pub fn knn_graph(
    coords: &[(f64, f64)],
    k: usize,
    weight_lo: f64,
    weight_hi: f64,
    seed: u64,
) -> Result<DirectedGraph> {
    knn_graph_with_metric(
        coords,
        k,
        weight_lo,
        weight_hi,
        seed,
        DistanceMetric::Euclidean,
    )
}

/// For every vertex `v`, adds an edge from each of its `k` nearest neighbors
/// into `v`. Distance ties are broken by the lower vertex index. Weights are
/// drawn i.i.d. uniform on `[weight_lo, weight_hi]` in order of `v`, then
/// neighbor rank, from a generator seeded with `seed`.
pub fn knn_graph_with_metric(
    coords: &[(f64, f64)],
    k: usize,
    weight_lo: f64,
    weight_hi: f64,
    seed: u64,
    metric: DistanceMetric,
) -> Result<DirectedGraph> {
    let n = coords.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must satisfy 1 <= k < {n} (number of points)"
        )));
    }
    if !(weight_lo.is_finite()
        && weight_hi.is_finite()
        && 0.0 < weight_lo
        && weight_lo <= weight_hi)
    {
        return Err(Error::InvalidArgument(format!(
            "weight range [{weight_lo}, {weight_hi}] must be positive and ordered"
        )));
    }
    if let Some(i) = coords
        .iter()
        .position(|p| !(p.0.is_finite() && p.1.is_finite()))
    {
        return Err(Error::InvalidArgument(format!(
            "point {i} has non-finite coordinates"
        )));
    }
    for i in 0..n {
        for j in i + 1..n {
            if coords[i] == coords[j] {
                return Err(Error::InvalidArgument(format!(
                    "points {i} and {j} coincide"
                )));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n * k);
    for v in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|&u| u != v)
            .map(|u| (metric.distance(coords[v], coords[u]), u))
            .collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, u) in others.iter().take(k) {
            let w = if weight_lo == weight_hi {
                weight_lo
            } else {
                rng.gen_range(weight_lo..=weight_hi)
            };
            edges.push((u, v, w));
        }
    }
    DirectedGraph::new(n, edges)
}
