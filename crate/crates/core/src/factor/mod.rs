//! The transform built from the SVDs of the two factor Laplacians.
//!
//! With `L1 = U1 Σ1 V1ᵀ` and `L2 = U2 Σ2 V2ᵀ`, the product bases are
//! `U⊗ = U1 ⊗ U2` and `V⊗ = V1 ⊗ V2`. They are never materialized on the
//! hot paths: for `x = vec X` with `X` of shape `N2 × N1`,
//! `(U1 ⊗ U2)ᵀ x = vec(U2ᵀ X U1)`, so the forward transform is two small
//! matrix products per basis (and likewise for the inverse).
//!
//! Frequency pairs `(σ1_i, σ2_j)` are ordered by `μ = σ1_i + σ2_j`, ties by
//! `(i, j)`. The band of the first `M` frequencies contains every pair whose
//! sum equals one of `μ_0 … μ_{M−1}` up to the tie tolerance, so it may hold
//! more than `M` pairs.

mod compare;

pub use compare::{compare_transforms, CutDistance, DivergenceReport};

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::linalg::kron;
use crate::signal::ProductSignal;
use crate::spectral::{svd_ascending, zero_tolerance, SpectralBasis};
use crate::square::{four_term_numerator, Bound};

/// Relative tolerance for treating two frequency sums as equal.
pub const TIE_REL_TOL: f64 = 1e-9;

/// A frequency pair `(σ1_i, σ2_j)` with its sum `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPair {
    pub i: usize,
    pub j: usize,
    pub mu: f64,
}

/// All pairs sorted by `(σ1_i + σ2_j, i, j)`.
pub fn pair_order(s1: &[f64], s2: &[f64]) -> Vec<FrequencyPair> {
    let mut pairs: Vec<FrequencyPair> = s1
        .iter()
        .enumerate()
        .flat_map(|(i, a)| {
            s2.iter()
                .enumerate()
                .map(move |(j, b)| FrequencyPair { i, j, mu: a + b })
        })
        .collect();
    pairs.sort_by(|p, q| {
        p.mu.total_cmp(&q.mu)
            .then(p.i.cmp(&q.i))
            .then(p.j.cmp(&q.j))
    });
    pairs
}

/// The pairs retained when bandlimiting to the first `M` frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSet {
    pub pairs: Vec<(usize, usize)>,
    /// `μ_{M−1}`.
    pub cutoff: f64,
}

impl BandSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i, j))
    }
}

/// Both spectral components in matrix form, each `N2 × N1` with entry
/// `(j, i)` belonging to the pair `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSpectrum {
    pub first: Mat<f64>,
    pub second: Mat<f64>,
}

/// Precomputed data for the factor-basis transform on `G1 □ G2`.
#[derive(Debug, Clone)]
pub struct FactorPlan {
    l1: Mat<f64>,
    l2: Mat<f64>,
    basis1: SpectralBasis,
    basis2: SpectralBasis,
    pairs: Vec<FrequencyPair>,
}

impl FactorPlan {
    pub fn new(g1: &DirectedGraph, g2: &DirectedGraph) -> Result<Self> {
        Self::from_laplacians(g1.laplacian(), g2.laplacian())
    }

    pub fn from_laplacians(l1: Mat<f64>, l2: Mat<f64>) -> Result<Self> {
        let basis1 = svd_ascending(l1.as_ref(), None)?;
        let basis2 = svd_ascending(l2.as_ref(), None)?;
        let pairs = pair_order(basis1.singular_values(), basis2.singular_values());
        Ok(Self {
            l1,
            l2,
            basis1,
            basis2,
            pairs,
        })
    }

    pub fn n1(&self) -> usize {
        self.basis1.order()
    }

    pub fn n2(&self) -> usize {
        self.basis2.order()
    }

    pub fn order(&self) -> usize {
        self.n1() * self.n2()
    }

    pub fn factor_bases(&self) -> (&SpectralBasis, &SpectralBasis) {
        (&self.basis1, &self.basis2)
    }

    pub fn laplacians(&self) -> (MatRef<'_, f64>, MatRef<'_, f64>) {
        (self.l1.as_ref(), self.l2.as_ref())
    }

    /// Frequency pairs in ascending order of `μ`.
    pub fn pair_order(&self) -> &[FrequencyPair] {
        &self.pairs
    }

    /// `μ_0 ≤ … ≤ μ_{N−1}`.
    pub fn frequencies(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.mu).collect()
    }

    pub fn mu_max(&self) -> f64 {
        self.pairs.last().map_or(0.0, |p| p.mu)
    }

    pub fn tie_tol(&self) -> f64 {
        TIE_REL_TOL * self.mu_max().max(1.0)
    }

    pub fn zero_tol(&self) -> f64 {
        zero_tolerance(self.mu_max())
    }

    /// Forward transform via two-sided products: `Y = U2ᵀ X U1`,
    /// `Ỹ = V2ᵀ X V1`, components `(Y + Ỹ)/2` and `(Y − Ỹ)/2`.
    pub fn forward(&self, x: &ProductSignal) -> Result<FactorSpectrum> {
        x.check_shape(self.n1(), self.n2())?;
        let x = x.as_mat();
        let y = self.basis2.left().transpose() * (x * self.basis1.left());
        if self.basis1.is_symmetric() && self.basis2.is_symmetric() {
            let (r, c) = (y.nrows(), y.ncols());
            return Ok(FactorSpectrum {
                first: y,
                second: Mat::zeros(r, c),
            });
        }
        let yt = self.basis2.right().transpose() * (x * self.basis1.right());
        Ok(FactorSpectrum {
            first: Mat::from_fn(y.nrows(), y.ncols(), |r, c| (y[(r, c)] + yt[(r, c)]) / 2.0),
            second: Mat::from_fn(y.nrows(), y.ncols(), |r, c| (y[(r, c)] - yt[(r, c)]) / 2.0),
        })
    }

    /// Inverse transform: `X = (U2 (Z1 + Z2) U1ᵀ + V2 (Z1 − Z2) V1ᵀ) / 2`.
    pub fn inverse(&self, z: &FactorSpectrum) -> Result<ProductSignal> {
        for m in [&z.first, &z.second] {
            if (m.nrows(), m.ncols()) != (self.n2(), self.n1()) {
                return Err(Error::ShapeMismatch {
                    expected: (self.n2(), self.n1()),
                    found: (m.nrows(), m.ncols()),
                });
            }
        }
        let sum = &z.first + &z.second;
        let diff = &z.first - &z.second;
        let w = self.basis2.left() * (&sum * self.basis1.left().transpose());
        let wt = self.basis2.right() * (&diff * self.basis1.right().transpose());
        Ok(ProductSignal::new(Mat::from_fn(
            w.nrows(),
            w.ncols(),
            |r, c| (w[(r, c)] + wt[(r, c)]) / 2.0,
        )))
    }

    /// Number of pairs in the band of the first `m` frequencies.
    pub fn band_len(&self, m: usize) -> Result<usize> {
        self.check_bandwidth(m)?;
        let limit = self.pairs[m - 1].mu + self.tie_tol();
        Ok(m + self.pairs[m..].iter().take_while(|p| p.mu <= limit).count())
    }

    pub fn select_band(&self, m: usize) -> Result<BandSet> {
        let len = self.band_len(m)?;
        Ok(BandSet {
            pairs: self.pairs[..len].iter().map(|p| (p.i, p.j)).collect(),
            cutoff: self.pairs[m - 1].mu,
        })
    }

    /// Bandlimits by zeroing every coefficient outside the band and inverting.
    pub fn bandlimit(&self, x: &ProductSignal, m: usize) -> Result<ProductSignal> {
        let len = self.band_len(m)?;
        let mut z = self.forward(x)?;
        let mut keep = Mat::<f64>::zeros(self.n2(), self.n1());
        for p in &self.pairs[..len] {
            keep[(p.j, p.i)] = 1.0;
        }
        for c in 0..self.n1() {
            for r in 0..self.n2() {
                if keep[(r, c)] == 0.0 {
                    z.first[(r, c)] = 0.0;
                    z.second[(r, c)] = 0.0;
                }
            }
        }
        self.inverse(&z)
    }

    /// Bandlimits as the explicit sum of rank-one terms
    /// `½ Σ (u2_jᵀ X u1_i) u2_j u1_iᵀ + (v2_jᵀ X v1_i) v2_j v1_iᵀ` over the band.
    ///
    /// Slower than [`FactorPlan::bandlimit`]; kept as a cross-check.
    pub fn bandlimit_rank_one(&self, x: &ProductSignal, m: usize) -> Result<ProductSignal> {
        x.check_shape(self.n1(), self.n2())?;
        let band = self.select_band(m)?;
        let xm = x.as_mat();
        let (u1, v1) = (self.basis1.left(), self.basis1.right());
        let (u2, v2) = (self.basis2.left(), self.basis2.right());
        let mut out = Mat::<f64>::zeros(self.n2(), self.n1());
        for &(i, j) in &band.pairs {
            let cu = bilinear(u2, j, xm, u1, i);
            let cv = bilinear(v2, j, xm, v1, i);
            for c in 0..self.n1() {
                for r in 0..self.n2() {
                    out[(r, c)] +=
                        0.5 * (cu * u2[(r, j)] * u1[(c, i)] + cv * v2[(r, j)] * v1[(c, i)]);
                }
            }
        }
        Ok(ProductSignal::new(out))
    }

    /// Four-term bound on `‖X − X_m‖_F` divided by `2μ_{m−1}`.
    pub fn bound(&self, x: &ProductSignal, m: usize) -> Result<Bound> {
        x.check_shape(self.n1(), self.n2())?;
        self.check_bandwidth(m)?;
        let numerator = four_term_numerator(x.as_mat(), self.l1.as_ref(), self.l2.as_ref());
        Ok(Bound::from_parts(
            numerator,
            self.pairs[m - 1].mu,
            self.zero_tol(),
        ))
    }

    /// Spectrum flattened into pair order: entry `k` belongs to `pair_order()[k]`.
    pub fn in_pair_order(&self, z: &FactorSpectrum) -> (Vec<f64>, Vec<f64>) {
        self.pairs
            .iter()
            .map(|p| (z.first[(p.j, p.i)], z.second[(p.j, p.i)]))
            .unzip()
    }

    /// Materialized `U1 ⊗ U2` and `V1 ⊗ V2` (columns in Kronecker order).
    pub fn kronecker_bases(&self) -> (Mat<f64>, Mat<f64>) {
        (
            kron(self.basis1.left(), self.basis2.left()),
            kron(self.basis1.right(), self.basis2.right()),
        )
    }

    fn check_bandwidth(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.order() {
            return Err(Error::BandwidthOutOfRange { m, n: self.order() });
        }
        Ok(())
    }
}

/// `a[:, j]ᵀ X b[:, i]`.
fn bilinear(a: MatRef<'_, f64>, j: usize, x: MatRef<'_, f64>, b: MatRef<'_, f64>, i: usize) -> f64 {
    let mut sum = 0.0;
    for c in 0..x.ncols() {
        for r in 0..x.nrows() {
            sum += a[(r, j)] * x[(r, c)] * b[(c, i)];
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{directed_cycle, directed_line_graph};
    use crate::linalg::max_abs_diff;

    fn p2() -> DirectedGraph {
        DirectedGraph::new(2, [(0, 1, 1.0)]).unwrap()
    }

    fn und_p2() -> DirectedGraph {
        DirectedGraph::undirected(2, [(0, 1, 1.0)]).unwrap()
    }

    fn sample(n1: usize, n2: usize, seed: u64) -> ProductSignal {
        ProductSignal::from_fn(n1, n2, |r, c| {
            ((r * 7 + c * 3) as f64 + 0.3 * seed as f64).cos()
        })
    }

    #[test]
    fn edgeless_pairs_are_zero() {
        let e = DirectedGraph::edgeless(3).unwrap();
        let plan = FactorPlan::new(&e, &e).unwrap();
        assert!(plan.frequencies().iter().all(|&m| m == 0.0));
        assert_eq!(plan.pair_order().len(), 9);
    }

    #[test]
    fn directed_p2_with_undirected_p2() {
        let plan = FactorPlan::new(&p2(), &und_p2()).unwrap();
        let mu = plan.frequencies();
        let s2 = 2f64.sqrt();
        for (got, want) in mu.iter().zip([0.0, s2, 2.0, 2.0 + s2]) {
            assert!((got - want).abs() < 1e-12);
        }
        let band = plan.select_band(2).unwrap();
        assert_eq!(band.pairs, vec![(0, 0), (1, 0)]);
    }

    #[test]
    fn cycles_match_closed_form() {
        let plan =
            FactorPlan::new(&directed_cycle(3).unwrap(), &directed_cycle(4).unwrap()).unwrap();
        let mut want: Vec<f64> = (0..3)
            .flat_map(|i| {
                (0..4).map(move |j| {
                    2.0 * (std::f64::consts::PI * i as f64 / 3.0).sin().abs()
                        + 2.0 * (std::f64::consts::PI * j as f64 / 4.0).sin().abs()
                })
            })
            .collect();
        want.sort_by(f64::total_cmp);
        for (got, want) in plan.frequencies().iter().zip(&want) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn tie_at_cut_enlarges_band() {
        // P2 with weight 1/√2 has singular values {0, 1}
        let g = DirectedGraph::new(2, [(0, 1, 0.5f64.sqrt())]).unwrap();
        let plan = FactorPlan::new(&g, &g).unwrap();
        let band = plan.select_band(2).unwrap();
        assert_eq!(band.len(), 3);
        assert!(band.contains(0, 0) && band.contains(0, 1) && band.contains(1, 0));
        assert_eq!(plan.select_band(4).unwrap().len(), 4);
    }

    #[test]
    fn forward_zero_and_undirected() {
        let plan = FactorPlan::new(&p2(), &directed_cycle(3).unwrap()).unwrap();
        let z = plan.forward(&ProductSignal::zeros(2, 3)).unwrap();
        assert_eq!(z.first, Mat::<f64>::zeros(3, 2));
        assert_eq!(z.second, Mat::<f64>::zeros(3, 2));

        let und = FactorPlan::new(
            &und_p2(),
            &DirectedGraph::undirected(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap(),
        )
        .unwrap();
        let x = sample(2, 3, 1);
        let z = und.forward(&x).unwrap();
        assert_eq!(z.second, Mat::<f64>::zeros(3, 2));
        let (b1, b2) = und.factor_bases();
        let direct = b2.left().transpose() * x.as_mat() * b1.left();
        assert!(max_abs_diff(z.first.as_ref(), direct.as_ref()) < 1e-14);
    }

    #[test]
    fn inverse_single_mode() {
        let plan = FactorPlan::new(
            &directed_line_graph(3).unwrap(),
            &directed_cycle(4).unwrap(),
        )
        .unwrap();
        let (i, j) = (2, 1);
        let mut e = Mat::<f64>::zeros(4, 3);
        e[(j, i)] = 1.0;
        let x = plan
            .inverse(&FactorSpectrum {
                first: e.clone(),
                second: e,
            })
            .unwrap();
        let (b1, b2) = plan.factor_bases();
        for c in 0..3 {
            for r in 0..4 {
                assert!((x.as_mat()[(r, c)] - b2.left()[(r, j)] * b1.left()[(c, i)]).abs() < 1e-14);
            }
        }
        assert_eq!(
            plan.inverse(&FactorSpectrum {
                first: Mat::zeros(4, 3),
                second: Mat::zeros(4, 3)
            })
            .unwrap(),
            ProductSignal::zeros(3, 4)
        );
    }

    #[test]
    fn shape_errors() {
        let plan = FactorPlan::new(&p2(), &directed_cycle(3).unwrap()).unwrap();
        assert!(matches!(
            plan.forward(&ProductSignal::zeros(3, 2)),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            plan.select_band(0),
            Err(Error::BandwidthOutOfRange { .. })
        ));
        assert!(matches!(
            plan.select_band(7),
            Err(Error::BandwidthOutOfRange { .. })
        ));
    }

    #[test]
    fn bandlimit_paths_agree() {
        let plan = FactorPlan::new(
            &directed_line_graph(4).unwrap(),
            &directed_cycle(3).unwrap(),
        )
        .unwrap();
        let x = sample(4, 3, 2);
        for m in 1..=12 {
            let fast = plan.bandlimit(&x, m).unwrap();
            let slow = plan.bandlimit_rank_one(&x, m).unwrap();
            assert!(
                max_abs_diff(fast.as_mat(), slow.as_mat()) < 1e-12,
                "m = {m}"
            );
        }
        let full = plan.bandlimit(&x, 12).unwrap();
        assert!(max_abs_diff(full.as_mat(), x.as_mat()) < 1e-12);
    }

    #[test]
    fn constant_signal_on_undirected_factors() {
        let g2 = DirectedGraph::undirected(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let plan = FactorPlan::new(&und_p2(), &g2).unwrap();
        let x = ProductSignal::from_fn(2, 3, |_, _| 2.5);
        let low = plan.bandlimit(&x, 1).unwrap();
        assert!(max_abs_diff(low.as_mat(), x.as_mat()) < 1e-12);
        assert_eq!(
            plan.bound(&x, 2).unwrap().value().map(|b| b < 1e-12),
            Some(true)
        );
        assert_eq!(plan.bound(&x, 1).unwrap(), Bound::Vacuous);
    }
}
