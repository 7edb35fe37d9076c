mod common;

use common::*;
use faer::Mat;
use product_gft::factor::FactorPlan;
use product_gft::signal::ProductSignal;
use product_gft::spectral::{svd_ascending, sym_eig_ascending};
use product_gft::square::SquarePlan;
use proptest::prelude::*;

fn shapes() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=5, 2usize..=5, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn svd_factors_and_is_orthonormal((n1, _n2, seed) in shapes()) {
        let mut r = rng(seed);
        let g = random_directed(&mut r, n1 + 2, 0.4);
        let l = g.laplacian();
        let b = svd_ascending(l.as_ref(), None).unwrap();
        let s = b.singular_values();
        prop_assert!(s.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(s.iter().all(|&v| v >= 0.0));
        let resid = (b.reconstruct() - &l).norm_l2();
        prop_assert!(resid <= 1e-10 * l.norm_l2().max(1.0));
        let n = l.nrows();
        for m in [b.left(), b.right()] {
            let gram = m.transpose() * m;
            let err = (gram - Mat::<f64>::identity(n, n)).norm_l2();
            prop_assert!(err <= 1e-10, "orthonormality error {err}");
        }
    }

    #[test]
    fn symmetric_eigenvalues_match_jacobi((n, _n2, seed) in shapes()) {
        let mut r = rng(seed);
        let g = random_undirected(&mut r, n + 3, 0.5);
        let got = sym_eig_ascending(g.laplacian().as_ref()).unwrap();
        let want = symmetric_eigenvalues_oracle(&laplacian(&g));
        for (a, b) in got.singular_values().iter().zip(&want) {
            prop_assert!((a - b.max(0.0)).abs() <= 1e-10);
        }
    }

    #[test]
    fn both_transforms_invert((n1, n2, seed) in shapes()) {
        let mut r = rng(seed);
        let g1 = random_directed(&mut r, n1, 0.5);
        let g2 = random_directed(&mut r, n2, 0.5);
        let x = random_signal(&mut r, n1, n2);
        let xv = x.to_vec();
        let sq = SquarePlan::new(&g1, &g2).unwrap();
        let back = sq.inverse(&sq.forward(&xv).unwrap()).unwrap();
        prop_assert!(norm(&sub(&back, &xv)) <= 1e-10 * norm(&xv));
        let ot = FactorPlan::new(&g1, &g2).unwrap();
        let back = ot.inverse(&ot.forward(&x).unwrap()).unwrap();
        prop_assert!(back.distance(&x).unwrap() <= 1e-10 * x.frobenius_norm());
    }

    #[test]
    fn masked_bandlimit_matches_rank_one_sum((n1, n2, seed) in shapes(), frac in 0.0f64..1.0) {
        let mut r = rng(seed);
        let g1 = random_directed(&mut r, n1, 0.5);
        let g2 = random_directed(&mut r, n2, 0.5);
        let x = random_signal(&mut r, n1, n2);
        let plan = FactorPlan::new(&g1, &g2).unwrap();
        let m = 1 + (frac * (n1 * n2) as f64) as usize;
        let m = m.min(n1 * n2);
        let fast = plan.bandlimit(&x, m).unwrap();
        let slow = plan.bandlimit_rank_one(&x, m).unwrap();
        prop_assert!(fast.distance(&slow).unwrap() <= 1e-10 * x.frobenius_norm().max(1.0));
    }

    #[test]
    fn band_is_every_pair_up_to_the_cutoff((n1, n2, seed) in shapes(), frac in 0.0f64..1.0) {
        let mut r = rng(seed);
        // Unit weights make repeated pair sums common.
        let g1 = random_directed(&mut r, n1, 0.5);
        let g1 = product_gft::graph::DirectedGraph::new(n1, g1.edges().map(|(s, d, _)| (s, d, 1.0))).unwrap();
        let g2 = product_gft::graph::directed_cycle(n2).unwrap();
        let plan = FactorPlan::new(&g1, &g2).unwrap();
        let m = (1 + (frac * (n1 * n2) as f64) as usize).min(n1 * n2);
        let band = plan.select_band(m).unwrap();
        let order = plan.pair_order();
        for p in &order[..m] {
            prop_assert!(band.contains(p.i, p.j));
        }
        let (b1, b2) = plan.factor_bases();
        let cutoff = order[m - 1].mu;
        let tol = plan.tie_tol();
        let mut expected = 0;
        for i in 0..n1 {
            for j in 0..n2 {
                let mu = b1.singular_values()[i] + b2.singular_values()[j];
                if mu <= cutoff + tol {
                    expected += 1;
                    prop_assert!(band.contains(i, j));
                }
            }
        }
        prop_assert_eq!(band.len(), expected);
    }

    #[test]
    fn undirected_transforms_agree((n1, n2, seed) in shapes()) {
        let mut r = rng(seed);
        let g1 = random_undirected(&mut r, n1, 0.6);
        let g2 = random_undirected(&mut r, n2, 0.6);
        let x = random_signal(&mut r, n1, n2);
        let sq = SquarePlan::new(&g1, &g2).unwrap();
        let ot = FactorPlan::new(&g1, &g2).unwrap();
        let zs = sq.forward(&x.to_vec()).unwrap();
        let (first, second) = ot.in_pair_order(&ot.forward(&x).unwrap());
        prop_assert!(norm(&sub(&zs.first, &first)) <= 1e-9 * x.frobenius_norm());
        prop_assert!(norm(&second) <= 1e-10 * x.frobenius_norm());
        for m in [1, n1 * n2 / 2, n1 * n2] {
            let m = m.max(1);
            if ot.band_len(m).unwrap() == m {
                let a = sq.bandlimit_signal(&x, m).unwrap();
                let b = ot.bandlimit(&x, m).unwrap();
                prop_assert!(a.distance(&b).unwrap() <= 1e-9 * x.frobenius_norm());
            }
        }
    }

    #[test]
    fn square_transform_matches_dense_oracle((n1, n2, seed) in (2usize..=4, 2usize..=4, any::<u64>())) {
        let mut r = rng(seed);
        let g1 = random_directed(&mut r, n1, 0.5);
        let g2 = random_directed(&mut r, n2, 0.5);
        let plan = SquarePlan::new(&g1, &g2).unwrap();
        let lp = product_laplacian(&laplacian(&g1), &laplacian(&g2));
        let want = singular_values_oracle(&lp);
        for (a, b) in plan.frequencies().iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
        // L□ v_k = σ_k u_k column by column.
        let (u, v) = (plan.basis().left(), plan.basis().right());
        for k in 0..n1 * n2 {
            let lv = matvec(&lp, &col(v, k));
            let su: Vec<f64> = col(u, k).iter().map(|x| x * plan.frequencies()[k]).collect();
            prop_assert!(norm(&sub(&lv, &su)) <= 1e-10 * (1.0 + plan.frequencies()[k]));
        }
    }
}

#[test]
fn isolated_vertices_share_one_zero_group() {
    let g1 = product_gft::graph::DirectedGraph::edgeless(3).unwrap();
    let g2 = product_gft::graph::directed_line_graph(2).unwrap();
    let sq = SquarePlan::new(&g1, &g2).unwrap();
    assert_eq!(sq.frequencies().iter().filter(|&&s| s == 0.0).count(), 3);
    assert_eq!(sq.basis().groups()[0], 0..3);
    let x = ProductSignal::from_fn(3, 2, |r, c| (r + 2 * c) as f64 - 1.5);
    let back = sq.inverse(&sq.forward(&x.to_vec()).unwrap()).unwrap();
    assert!(norm(&sub(&back, &x.to_vec())) < 1e-12);
}
