//! Signals on a Cartesian product graph.

use faer::{Mat, MatRef};

use crate::error::{Error, Result};

/// A signal on `G1 □ G2` stored as an `N2 × N1` matrix.
///
/// Column `i` is the `G2`-signal at vertex `i` of `G1` (for spatio-temporal
/// data: rows are stations, columns are hours). `vec` stacks columns, so the
/// flat index of entry `(v2, v1)` is `v1·N2 + v2`, matching the vertex
/// flattening of [`crate::graph::cartesian_product`].
#[derive(Debug, Clone)]
pub struct ProductSignal {
    values: Mat<f64>,
}

impl ProductSignal {
    /// Wraps an `N2 × N1` matrix.
    pub fn new(values: Mat<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(n1: usize, n2: usize) -> Self {
        Self::new(Mat::zeros(n2, n1))
    }

    pub fn from_fn(n1: usize, n2: usize, f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::new(Mat::from_fn(n2, n1, f))
    }

    /// Inverse of [`ProductSignal::to_vec`].
    pub fn from_vec(n1: usize, n2: usize, x: &[f64]) -> Result<Self> {
        if x.len() != n1 * n2 {
            return Err(Error::LengthMismatch {
                expected: n1 * n2,
                found: x.len(),
            });
        }
        Ok(Self::new(Mat::from_fn(n2, n1, |r, c| x[c * n2 + r])))
    }

    /// Column-stacked vectorization.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.values.nrows() * self.values.ncols());
        for c in 0..self.values.ncols() {
            for r in 0..self.values.nrows() {
                out.push(self.values[(r, c)]);
            }
        }
        out
    }

    /// Order of the first factor (number of columns).
    pub fn n1(&self) -> usize {
        self.values.ncols()
    }

    /// Order of the second factor (number of rows).
    pub fn n2(&self) -> usize {
        self.values.nrows()
    }

    pub fn as_mat(&self) -> MatRef<'_, f64> {
        self.values.as_ref()
    }

    pub fn into_mat(self) -> Mat<f64> {
        self.values
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.norm_l2()
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &ProductSignal) -> Result<f64> {
        self.check_shape(other.n1(), other.n2())?;
        Ok((&self.values - &other.values).norm_l2())
    }

    pub(crate) fn check_shape(&self, n1: usize, n2: usize) -> Result<()> {
        if self.n1() != n1 || self.n2() != n2 {
            return Err(Error::ShapeMismatch {
                expected: (n2, n1),
                found: (self.n2(), self.n1()),
            });
        }
        Ok(())
    }
}

impl PartialEq for ProductSignal {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}
