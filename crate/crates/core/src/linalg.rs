//! Small dense helpers shared by the transforms.

use faer::{Mat, MatRef};

/// Kronecker product `a ⊗ b`.
pub fn kron(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Mat<f64> {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = Mat::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let s = a[(i, j)];
            if s == 0.0 {
                continue;
            }
            for q in 0..bc {
                for p in 0..br {
                    out[(i * br + p, j * bc + q)] = s * b[(p, q)];
                }
            }
        }
    }
    out
}

/// Maximum absolute row sum.
pub fn inf_norm(m: MatRef<'_, f64>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖m − mᵀ‖_∞` for a square matrix.
pub fn asymmetry(m: MatRef<'_, f64>) -> f64 {
    let n = m.nrows();
    (0..n)
        .map(|i| (0..n).map(|j| (m[(i, j)] - m[(j, i)]).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    worst
}

pub fn frobenius(m: MatRef<'_, f64>) -> f64 {
    m.norm_l2()
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_finite(m: MatRef<'_, f64>) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].is_finite()))
}

/// Column vector view of a slice as an `n × 1` matrix.
pub(crate) fn column(x: &[f64]) -> Mat<f64> {
    Mat::from_fn(x.len(), 1, |i, _| x[i])
}

pub(crate) fn column_to_vec(m: MatRef<'_, f64>) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, 0)]).collect()
}

/// Perfect-shuffle permutation relating the two vertex flattenings of a
/// product of orders `n1` and `n2`: entry `v1·n2 + v2` maps to `v2·n1 + v1`.
pub fn perfect_shuffle(n1: usize, n2: usize) -> Vec<usize> {
    let mut perm = vec![0; n1 * n2];
    for v1 in 0..n1 {
        for v2 in 0..n2 {
            perm[v1 * n2 + v2] = v2 * n1 + v1;
        }
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_of_identities_is_identity() {
        let k = kron(
            Mat::<f64>::identity(2, 2).as_ref(),
            Mat::<f64>::identity(3, 3).as_ref(),
        );
        assert_eq!(
            max_abs_diff(k.as_ref(), Mat::<f64>::identity(6, 6).as_ref()),
            0.0
        );
    }

    #[test]
    fn kron_block_layout() {
        let a = Mat::from_fn(2, 2, |i, j| (1 + 2 * i + j) as f64);
        let b = Mat::from_fn(1, 2, |_, j| (j + 1) as f64 * 10.0);
        let k = kron(a.as_ref(), b.as_ref());
        assert_eq!((k.nrows(), k.ncols()), (2, 4));
        assert_eq!(k[(0, 0)], 10.0);
        assert_eq!(k[(0, 3)], 2.0 * 20.0);
        assert_eq!(k[(1, 2)], 4.0 * 10.0);
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut p = perfect_shuffle(3, 4);
        p.sort_unstable();
        assert_eq!(p, (0..12).collect::<Vec<_>>());
    }
}
