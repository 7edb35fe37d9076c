//! Side-by-side comparison of the two transforms on one graph pair.

use faer::Mat;
use serde::Serialize;

use super::FactorPlan;
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, norm2};
use crate::signal::ProductSignal;
use crate::square::SquarePlan;

/// Distance between the two band operators at one cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutDistance {
    /// Number of product frequencies kept (a whole degenerate group boundary).
    pub m: usize,
    /// Number of factor pairs in the matching band.
    pub band_len: usize,
    /// Frobenius distance between `½(U_M U_Mᵀ + V_M V_Mᵀ)` and the factor band operator.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceReport {
    /// Max over samples of `‖ℱ□x − ℱ⊗x‖ / ‖x‖`, factor coefficients taken in pair order.
    pub coefficient_divergence: f64,
    /// Max over samples of `‖z2‖ / ‖x‖` for the full-Laplacian transform.
    pub square_second_component: f64,
    /// Max over samples of `‖z2‖ / ‖x‖` for the factor transform.
    pub otimes_second_component: f64,
    pub cuts: Vec<CutDistance>,
}

impl DivergenceReport {
    pub fn max_projector_distance(&self) -> f64 {
        self.cuts.iter().map(|c| c.distance).fold(0.0, f64::max)
    }
}

/// Compares the transforms on `samples` and the band operators at every
/// cut between degenerate groups of the product frequencies.
///
/// Band operators are materialized as `N × N` matrices, so this is meant for
/// small graphs.
pub fn compare_transforms(
    sq: &SquarePlan,
    ot: &FactorPlan,
    samples: &[ProductSignal],
) -> Result<DivergenceReport> {
    if sq.n1() != ot.n1() || sq.n2() != ot.n2() {
        return Err(Error::PlanMismatch);
    }
    let (a1, a2) = sq.laplacians();
    let (b1, b2) = ot.laplacians();
    if max_abs_diff(a1, b1) != 0.0 || max_abs_diff(a2, b2) != 0.0 {
        return Err(Error::PlanMismatch);
    }

    let mut report = DivergenceReport {
        coefficient_divergence: 0.0,
        square_second_component: 0.0,
        otimes_second_component: 0.0,
        cuts: Vec::new(),
    };
    for x in samples {
        let norm = x.frobenius_norm();
        if norm == 0.0 {
            continue;
        }
        let zs = sq.forward(&x.to_vec())?;
        let (first, second) = ot.in_pair_order(&ot.forward(x)?);
        let diff: Vec<f64> = zs
            .first
            .iter()
            .zip(&first)
            .chain(zs.second.iter().zip(&second))
            .map(|(a, b)| a - b)
            .collect();
        report.coefficient_divergence = report.coefficient_divergence.max(norm2(&diff) / norm);
        report.square_second_component =
            report.square_second_component.max(norm2(&zs.second) / norm);
        report.otimes_second_component = report.otimes_second_component.max(norm2(&second) / norm);
    }
    report.cuts = projector_distances(sq, ot)?;
    Ok(report)
}

fn projector_distances(sq: &SquarePlan, ot: &FactorPlan) -> Result<Vec<CutDistance>> {
    let n = sq.order();
    let n2 = sq.n2();
    let (u, v) = (sq.basis().left(), sq.basis().right());
    let (f1, f2) = ot.factor_bases();
    let (u1, v1, u2, v2) = (f1.left(), f1.right(), f2.left(), f2.right());
    let pairs = ot.pair_order();

    // Running difference of the two band operators, updated as the cut grows.
    let mut diff = Mat::<f64>::zeros(n, n);
    let (mut done_sq, mut done_ot) = (0, 0);
    let mut cuts = Vec::new();
    for group in sq.basis().groups() {
        let m = group.end;
        let band_len = ot.band_len(m)?;
        let us = u.subcols(done_sq, m - done_sq);
        let vs = v.subcols(done_sq, m - done_sq);
        diff += (us * us.transpose() + vs * vs.transpose()) * faer::Scale(0.5);
        let new = &pairs[done_ot..band_len];
        let ku = Mat::from_fn(n, new.len(), |row, k| {
            u1[(row / n2, new[k].i)] * u2[(row % n2, new[k].j)]
        });
        let kv = Mat::from_fn(n, new.len(), |row, k| {
            v1[(row / n2, new[k].i)] * v2[(row % n2, new[k].j)]
        });
        diff -= (&ku * ku.transpose() + &kv * kv.transpose()) * faer::Scale(0.5);
        done_sq = m;
        done_ot = band_len;
        cuts.push(CutDistance {
            m,
            band_len,
            distance: diff.norm_l2(),
        });
    }
    Ok(cuts)
}
