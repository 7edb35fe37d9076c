//! Ascending singular value and symmetric eigen decompositions.
//!
//! The factorizations themselves come from `faer`; this module fixes the
//! conventions the transforms depend on:
//!
//! * values are sorted in nondecreasing order;
//! * each pair `(u_k, v_k)` is flipped so the largest-magnitude entry of
//!   `u_k` is positive (ties go to the lowest index);
//! * singular values at or below [`zero_tolerance`] are set to zero and the
//!   matching right vectors, which the factorization leaves unconstrained,
//!   are rotated inside the right null space to best align with the left
//!   vectors (orthogonal Procrustes, which reduces to sign alignment of the
//!   projected `u_k` for a one-dimensional null space);
//! * symmetric positive semi-definite inputs take the eigendecomposition
//!   path, and the resulting basis shares one matrix for `U` and `V`.

use std::ops::Range;

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, inf_norm, is_finite};

/// Relative threshold below which a singular value counts as zero.
pub const ZERO_REL_TOL: f64 = 1e-10;
/// Absolute zero threshold used when every singular value vanishes.
pub const ZERO_ABS_TOL: f64 = 1e-12;
/// Relative width of a degenerate group of singular values.
pub const GROUP_REL_TOL: f64 = 1e-9;
/// Default symmetry tolerance, relative to `‖m‖_∞`.
pub const SYM_REL_TOL: f64 = 1e-12;
/// Negative eigenvalues down to `-NEG_CLAMP_TOL·max(1, ‖s‖_∞)` are rounding noise.
pub const NEG_CLAMP_TOL: f64 = 1e-10;
/// Eigenvalues below `-NEG_FAIL_TOL·max(1, ‖s‖_∞)` mean the input is indefinite.
pub const NEG_FAIL_TOL: f64 = 1e-8;

pub fn zero_tolerance(sigma_max: f64) -> f64 {
    if sigma_max > 0.0 {
        ZERO_REL_TOL * sigma_max
    } else {
        ZERO_ABS_TOL
    }
}

pub fn group_tolerance(sigma_max: f64) -> f64 {
    GROUP_REL_TOL * sigma_max.max(1.0)
}

/// Splits a nondecreasing sequence into maximal runs whose consecutive
/// differences are at most `tol`.
pub fn degenerate_groups(values: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tol {
            if k > start {
                groups.push(start..k);
            }
            start = k;
        }
    }
    groups
}

/// An ascending SVD `m = U Σ Vᵀ`.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    left: Mat<f64>,
    // `None` for the symmetric path, where V is U.
    right: Option<Mat<f64>>,
    singular_values: Vec<f64>,
}

impl SpectralBasis {
    pub(crate) fn symmetric(left: Mat<f64>, values: Vec<f64>) -> Self {
        Self {
            left,
            right: None,
            singular_values: values,
        }
    }

    fn identity(n: usize) -> Self {
        Self::symmetric(Mat::identity(n, n), vec![0.0; n])
    }

    pub fn order(&self) -> usize {
        self.singular_values.len()
    }

    pub fn left(&self) -> MatRef<'_, f64> {
        self.left.as_ref()
    }

    pub fn right(&self) -> MatRef<'_, f64> {
        self.right.as_ref().unwrap_or(&self.left).as_ref()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// True when the basis came from the symmetric path and `U` and `V` are one matrix.
    pub fn is_symmetric(&self) -> bool {
        self.right.is_none()
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    pub fn zero_tol(&self) -> f64 {
        zero_tolerance(self.sigma_max())
    }

    pub fn group_tol(&self) -> f64 {
        group_tolerance(self.sigma_max())
    }

    pub fn groups(&self) -> Vec<Range<usize>> {
        degenerate_groups(&self.singular_values, self.group_tol())
    }

    /// `U Σ Vᵀ`.
    pub fn reconstruct(&self) -> Mat<f64> {
        let s = &self.singular_values;
        let scaled = Mat::from_fn(self.order(), self.order(), |i, k| self.left[(i, k)] * s[k]);
        scaled * self.right().transpose()
    }
}

/// Ascending SVD of a square matrix.
///
/// With `tol_sym = None` the symmetry tolerance is `1e-12·‖m‖_∞`. Symmetric
/// positive semi-definite inputs are routed through
/// [`sym_eig_ascending`]; everything else goes through a dense SVD.
pub fn svd_ascending(m: MatRef<'_, f64>, tol_sym: Option<f64>) -> Result<SpectralBasis> {
    check_square(m)?;
    if !is_finite(m) {
        return Err(Error::NonFinite);
    }
    let n = m.nrows();
    if all_zero(m) {
        return Ok(SpectralBasis::identity(n));
    }
    let norm = inf_norm(m);
    let tol = tol_sym.unwrap_or(SYM_REL_TOL * norm);
    if asymmetry(m) <= tol {
        let eig = m
            .self_adjoint_eigen(Side::Lower)
            .map_err(|_| Error::NoConvergence)?;
        let values: Vec<f64> = (0..n).map(|k| eig.S().column_vector()[k]).collect();
        if values[0] >= -NEG_CLAMP_TOL * norm.max(1.0) {
            return Ok(symmetric_basis(eig.U(), values));
        }
    }
    general_svd(m)
}

/// Ascending eigendecomposition of a symmetric positive semi-definite matrix.
pub fn sym_eig_ascending(s: MatRef<'_, f64>) -> Result<SpectralBasis> {
    check_square(s)?;
    if !is_finite(s) {
        return Err(Error::NonFinite);
    }
    let n = s.nrows();
    if all_zero(s) {
        return Ok(SpectralBasis::identity(n));
    }
    let norm = inf_norm(s);
    let tol = SYM_REL_TOL * norm;
    let asym = asymmetry(s);
    if asym > tol {
        return Err(Error::NotSymmetric {
            asymmetry: asym,
            tolerance: tol,
        });
    }
    let eig = s
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::NoConvergence)?;
    let values: Vec<f64> = (0..n).map(|k| eig.S().column_vector()[k]).collect();
    if values[0] < -NEG_FAIL_TOL * norm.max(1.0) {
        return Err(Error::NotPositiveSemidefinite(values[0]));
    }
    Ok(symmetric_basis(eig.U(), values))
}

fn check_square(m: MatRef<'_, f64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::ShapeMismatch {
            expected: (m.nrows().max(1), m.nrows().max(1)),
            found: (m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

fn all_zero(m: MatRef<'_, f64>) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)] == 0.0))
}

fn symmetric_basis(vectors: MatRef<'_, f64>, values: Vec<f64>) -> SpectralBasis {
    let n = values.len();
    let order = ascending_order(&values);
    let mut left = Mat::from_fn(n, n, |i, k| vectors[(i, order[k])]);
    let mut sorted: Vec<f64> = order.iter().map(|&k| values[k].max(0.0)).collect();
    let zero_tol = zero_tolerance(sorted[n - 1]);
    for s in sorted.iter_mut() {
        if *s <= zero_tol {
            *s = 0.0;
        }
    }
    for k in 0..n {
        if needs_flip(left.as_ref(), k) {
            for i in 0..n {
                left[(i, k)] = -left[(i, k)];
            }
        }
    }
    SpectralBasis::symmetric(left, sorted)
}

fn general_svd(m: MatRef<'_, f64>) -> Result<SpectralBasis> {
    let n = m.nrows();
    let svd = m.svd().map_err(|_| Error::NoConvergence)?;
    let raw: Vec<f64> = (0..n).map(|k| svd.S().column_vector()[k]).collect();
    let order = ascending_order(&raw);
    let (u, v) = (svd.U(), svd.V());
    let mut left = Mat::from_fn(n, n, |i, k| u[(i, order[k])]);
    let mut right = Mat::from_fn(n, n, |i, k| v[(i, order[k])]);
    let mut values: Vec<f64> = order.iter().map(|&k| raw[k].max(0.0)).collect();

    for k in 0..n {
        if needs_flip(left.as_ref(), k) {
            for i in 0..n {
                left[(i, k)] = -left[(i, k)];
                right[(i, k)] = -right[(i, k)];
            }
        }
    }

    let zero_tol = zero_tolerance(values[n - 1]);
    let nullity = values.iter().take_while(|&&s| s <= zero_tol).count();
    if nullity > 0 {
        values[..nullity].fill(0.0);
        align_null_space(left.as_ref(), &mut right, nullity)?;
    }

    Ok(SpectralBasis {
        left,
        right: Some(right),
        singular_values: values,
    })
}

/// Replaces the first `z` columns of `right` by the orthonormal basis of
/// their span that maximizes `Σ u_kᵀ v_k`.
fn align_null_space(left: MatRef<'_, f64>, right: &mut Mat<f64>, z: usize) -> Result<()> {
    let n = left.nrows();
    let uz = left.subcols(0, z);
    let vz = right.as_ref().subcols(0, z).to_owned();
    let cross = vz.transpose() * uz;
    let polar = cross.svd().map_err(|_| Error::NoConvergence)?;
    let rotation = polar.U() * polar.V().transpose();
    let aligned = &vz * &rotation;
    for k in 0..z {
        for i in 0..n {
            right[(i, k)] = aligned[(i, k)];
        }
    }
    Ok(())
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    order
}

/// Whether column `k` must be negated so its pivot entry is positive.
fn needs_flip(m: MatRef<'_, f64>, k: usize) -> bool {
    let col = m.col(k);
    let max_abs = col.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    if max_abs == 0.0 {
        return false;
    }
    // near-equal magnitudes count as ties so rounding cannot move the pivot
    let pivot = col
        .iter()
        .position(|x| x.abs() >= max_abs * (1.0 - 1e-9))
        .unwrap_or(0);
    col[pivot] < 0.0
}
