//! The transform built from the SVD of the full product Laplacian
//! `L□ = L1 ⊗ I + I ⊗ L2`.
//!
//! With `L□ = U Σ Vᵀ` (ascending), a signal `x` on the product graph maps to
//! the pair `z1 = (U + V)ᵀx / 2`, `z2 = (U − V)ᵀx / 2`, and back through
//! `x = (U(z1 + z2) + V(z1 − z2)) / 2`. Both directions preserve energy.

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::factor::pair_order;
use crate::graph::{product_laplacian, DirectedGraph};
use crate::linalg::{asymmetry, column, column_to_vec, frobenius, inf_norm};
use crate::signal::ProductSignal;
use crate::spectral::{svd_ascending, sym_eig_ascending, SpectralBasis, SYM_REL_TOL};

/// Output of the forward transform: first and second components.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumPair {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl SpectrumPair {
    pub fn zeros(n: usize) -> Self {
        Self {
            first: vec![0.0; n],
            second: vec![0.0; n],
        }
    }

    pub fn energy(&self) -> f64 {
        self.first.iter().chain(&self.second).map(|v| v * v).sum()
    }
}

/// Upper bound on a bandlimiting error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    /// The cut-off frequency is zero, so the bound carries no information.
    Vacuous,
}

impl Bound {
    pub fn value(self) -> Option<f64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Vacuous => None,
        }
    }

    pub(crate) fn from_parts(numerator: f64, cutoff: f64, zero_tol: f64) -> Self {
        if cutoff <= zero_tol {
            Bound::Vacuous
        } else {
            Bound::Finite(numerator / (2.0 * cutoff))
        }
    }
}

/// Precomputed data for the full-Laplacian transform on `G1 □ G2`.
#[derive(Debug, Clone)]
pub struct SquarePlan {
    l1: Mat<f64>,
    l2: Mat<f64>,
    basis: SpectralBasis,
}

impl SquarePlan {
    /// Builds the plan, taking the factor-eigendecomposition shortcut when
    /// both graphs are undirected.
    pub fn new(g1: &DirectedGraph, g2: &DirectedGraph) -> Result<Self> {
        Self::from_laplacians(g1.laplacian(), g2.laplacian())
    }

    /// Always factors the assembled `N × N` Laplacian, even for undirected inputs.
    pub fn dense(g1: &DirectedGraph, g2: &DirectedGraph) -> Result<Self> {
        let (l1, l2) = (g1.laplacian(), g2.laplacian());
        let basis = svd_ascending(product_laplacian(l1.as_ref(), l2.as_ref()).as_ref(), None)?;
        Ok(Self { l1, l2, basis })
    }

    pub fn from_laplacians(l1: Mat<f64>, l2: Mat<f64>) -> Result<Self> {
        check_square(l1.as_ref())?;
        check_square(l2.as_ref())?;
        if is_symmetric(l1.as_ref()) && is_symmetric(l2.as_ref()) {
            if let (Ok(e1), Ok(e2)) = (
                sym_eig_ascending(l1.as_ref()),
                sym_eig_ascending(l2.as_ref()),
            ) {
                let basis = kronecker_eigenbasis(&e1, &e2);
                return Ok(Self { l1, l2, basis });
            }
        }
        let basis = svd_ascending(product_laplacian(l1.as_ref(), l2.as_ref()).as_ref(), None)?;
        Ok(Self { l1, l2, basis })
    }

    pub fn n1(&self) -> usize {
        self.l1.nrows()
    }

    pub fn n2(&self) -> usize {
        self.l2.nrows()
    }

    pub fn order(&self) -> usize {
        self.n1() * self.n2()
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    /// Frequencies `σ_0 ≤ … ≤ σ_{N−1}`.
    pub fn frequencies(&self) -> &[f64] {
        self.basis.singular_values()
    }

    pub fn laplacians(&self) -> (MatRef<'_, f64>, MatRef<'_, f64>) {
        (self.l1.as_ref(), self.l2.as_ref())
    }

    pub fn forward(&self, x: &[f64]) -> Result<SpectrumPair> {
        self.check_len(x.len())?;
        let xc = column(x);
        let ux = column_to_vec((self.basis.left().transpose() * &xc).as_ref());
        if self.basis.is_symmetric() {
            let n = ux.len();
            return Ok(SpectrumPair {
                first: ux,
                second: vec![0.0; n],
            });
        }
        let vx = column_to_vec((self.basis.right().transpose() * &xc).as_ref());
        Ok(SpectrumPair {
            first: ux.iter().zip(&vx).map(|(a, b)| (a + b) / 2.0).collect(),
            second: ux.iter().zip(&vx).map(|(a, b)| (a - b) / 2.0).collect(),
        })
    }

    pub fn inverse(&self, z: &SpectrumPair) -> Result<Vec<f64>> {
        self.check_len(z.first.len())?;
        self.check_len(z.second.len())?;
        let sum: Vec<f64> = z.first.iter().zip(&z.second).map(|(a, b)| a + b).collect();
        let diff: Vec<f64> = z.first.iter().zip(&z.second).map(|(a, b)| a - b).collect();
        let left = self.basis.left() * column(&sum);
        let right = self.basis.right() * column(&diff);
        Ok((0..self.order())
            .map(|i| (left[(i, 0)] + right[(i, 0)]) / 2.0)
            .collect())
    }

    /// Low-frequency component `½ Σ_{k<m} (u_k u_kᵀ + v_k v_kᵀ) x`.
    ///
    /// Uses exactly the first `m` columns of the basis; only cuts between
    /// degenerate groups are independent of the basis chosen inside a group.
    pub fn bandlimit(&self, x: &[f64], m: usize) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        self.check_bandwidth(m)?;
        let xc = column(x);
        let u = self.basis.left().subcols(0, m);
        let v = self.basis.right().subcols(0, m);
        let pu = u * (u.transpose() * &xc);
        let pv = v * (v.transpose() * &xc);
        Ok((0..self.order())
            .map(|i| (pu[(i, 0)] + pv[(i, 0)]) / 2.0)
            .collect())
    }

    /// `(‖L□x‖ + ‖L□ᵀx‖) / (2σ_{m−1})`, an upper bound on `‖x − x_m‖`.
    pub fn bound(&self, x: &[f64], m: usize) -> Result<Bound> {
        self.check_len(x.len())?;
        self.check_bandwidth(m)?;
        let xm = ProductSignal::from_vec(self.n1(), self.n2(), x)?;
        let xm = xm.as_mat();
        let lx = xm * self.l1.transpose() + &self.l2 * xm;
        let ltx = xm * &self.l1 + self.l2.transpose() * xm;
        let cutoff = self.frequencies()[m - 1];
        Ok(Bound::from_parts(
            frobenius(lx.as_ref()) + frobenius(ltx.as_ref()),
            cutoff,
            self.basis.zero_tol(),
        ))
    }

    /// The looser four-term form of [`SquarePlan::bound`], with the product
    /// Laplacian split into its two Kronecker terms.
    pub fn loose_bound(&self, x: &[f64], m: usize) -> Result<Bound> {
        self.check_len(x.len())?;
        self.check_bandwidth(m)?;
        let xm = ProductSignal::from_vec(self.n1(), self.n2(), x)?;
        let cutoff = self.frequencies()[m - 1];
        Ok(Bound::from_parts(
            four_term_numerator(xm.as_mat(), self.l1.as_ref(), self.l2.as_ref()),
            cutoff,
            self.basis.zero_tol(),
        ))
    }

    /// Bandlimits a matrix-form signal.
    pub fn bandlimit_signal(&self, x: &ProductSignal, m: usize) -> Result<ProductSignal> {
        x.check_shape(self.n1(), self.n2())?;
        let out = self.bandlimit(&x.to_vec(), m)?;
        ProductSignal::from_vec(self.n1(), self.n2(), &out)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.order() {
            return Err(Error::LengthMismatch {
                expected: self.order(),
                found: len,
            });
        }
        Ok(())
    }

    fn check_bandwidth(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.order() {
            return Err(Error::BandwidthOutOfRange { m, n: self.order() });
        }
        Ok(())
    }
}

/// `‖X L1ᵀ‖ + ‖X L1‖ + ‖L2 X‖ + ‖L2ᵀ X‖`, i.e. the four Kronecker terms
/// `‖(L1 ⊗ I)x‖ + ‖(L1ᵀ ⊗ I)x‖ + ‖(I ⊗ L2)x‖ + ‖(I ⊗ L2ᵀ)x‖` for `x = vec X`.
pub(crate) fn four_term_numerator(
    x: MatRef<'_, f64>,
    l1: MatRef<'_, f64>,
    l2: MatRef<'_, f64>,
) -> f64 {
    frobenius((x * l1.transpose()).as_ref())
        + frobenius((x * l1).as_ref())
        + frobenius((l2 * x).as_ref())
        + frobenius((l2.transpose() * x).as_ref())
}

fn check_square(l: MatRef<'_, f64>) -> Result<()> {
    if l.nrows() != l.ncols() || l.nrows() == 0 {
        return Err(Error::ShapeMismatch {
            expected: (l.nrows(), l.nrows()),
            found: (l.nrows(), l.ncols()),
        });
    }
    Ok(())
}

fn is_symmetric(l: MatRef<'_, f64>) -> bool {
    asymmetry(l) <= SYM_REL_TOL * inf_norm(l)
}

/// Basis of `L□` for symmetric factors: columns `w1_i ⊗ w2_j` ordered by
/// `(λ1_i + λ2_j, i, j)`.
fn kronecker_eigenbasis(e1: &SpectralBasis, e2: &SpectralBasis) -> SpectralBasis {
    let (n1, n2) = (e1.order(), e2.order());
    let order = pair_order(e1.singular_values(), e2.singular_values());
    let (w1, w2) = (e1.left(), e2.left());
    let basis = Mat::from_fn(n1 * n2, order.len(), |row, k| {
        let p = &order[k];
        w1[(row / n2, p.i)] * w2[(row % n2, p.j)]
    });
    SpectralBasis::symmetric(basis, order.iter().map(|p| p.mu).collect())
}
