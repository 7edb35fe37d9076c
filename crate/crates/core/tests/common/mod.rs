//! Reference computations for the integration tests. Nothing here calls the
//! crate's linear algebra; matrices are plain row-major `Vec<Vec<f64>>`.

#![allow(dead_code)]

use product_gft::graph::DirectedGraph;
use product_gft::signal::ProductSignal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random directed graph: each ordered pair is an edge with probability `p`,
/// weights uniform on `[0.1, 2]`.
pub fn random_directed(rng: &mut ChaCha8Rng, n: usize, p: f64) -> DirectedGraph {
    let mut edges = Vec::new();
    for s in 0..n {
        for d in 0..n {
            if s != d && rng.gen_bool(p) {
                edges.push((s, d, rng.gen_range(0.1..2.0)));
            }
        }
    }
    DirectedGraph::new(n, edges).unwrap()
}

pub fn random_undirected(rng: &mut ChaCha8Rng, n: usize, p: f64) -> DirectedGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b, rng.gen_range(0.1..2.0)));
            }
        }
    }
    DirectedGraph::undirected(n, edges).unwrap()
}

pub fn random_signal(rng: &mut ChaCha8Rng, n1: usize, n2: usize) -> ProductSignal {
    ProductSignal::from_fn(n1, n2, |_, _| rng.gen_range(-1.0..1.0))
}

/// `D − A` with `a[dst][src] = w`, assembled from the edge list.
pub fn laplacian(g: &DirectedGraph) -> Dense {
    let n = g.order();
    let mut l = vec![vec![0.0; n]; n];
    for (s, d, w) in g.edges() {
        l[d][s] -= w;
        l[d][d] += w;
    }
    l
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![0.0; ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn add(a: &Dense, b: &Dense) -> Dense {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect()
}

pub fn transpose(a: &Dense) -> Dense {
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j]).collect())
        .collect()
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

/// `L1 ⊗ I + I ⊗ L2`.
pub fn product_laplacian(l1: &Dense, l2: &Dense) -> Dense {
    add(
        &kron(l1, &identity(l2.len())),
        &kron(&identity(l1.len()), l2),
    )
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

/// Square roots of the eigenvalues of `MᵀM`, ascending.
///
/// Cyclic Jacobi rotations diagonalize `MᵀM` by acting on the columns of `M`
/// (one-sided form), so the small eigenvalues are not lost to squaring.
pub fn singular_values_oracle(m: &Dense) -> Vec<f64> {
    let n = m[0].len();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for row in &a {
                    alpha += row[p] * row[p];
                    beta += row[q] * row[q];
                    gamma += row[p] * row[q];
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = (0..n)
        .map(|j| a.iter().map(|row| row[j] * row[j]).sum::<f64>().sqrt())
        .collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi, ascending.
#[allow(clippy::needless_range_loop)]
pub fn symmetric_eigenvalues_oracle(s: &Dense) -> Vec<f64> {
    let n = s.len();
    let mut a = s.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off.sqrt() < 1e-15 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for k in 0..n {
                    let (x, y) = (a[k][p], a[k][q]);
                    a[k][p] = c * x - sn * y;
                    a[k][q] = sn * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (a[p][k], a[q][k]);
                    a[p][k] = c * x - sn * y;
                    a[q][k] = sn * x + c * y;
                }
            }
        }
    }
    let mut e: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Column `k` of a `faer` matrix as a `Vec`.
pub fn col(m: faer::MatRef<'_, f64>, k: usize) -> Vec<f64> {
    (0..m.nrows()).map(|r| m[(r, k)]).collect()
}

pub fn dense(m: faer::MatRef<'_, f64>) -> Dense {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}
