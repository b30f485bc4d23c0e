mod common;

use common::certified_model;
use proptest::prelude::*;
use qswitch_core::certificate::{
    argmin_with_ties, compute_l_bounds, compute_modulation_bound, distance_constants, DriftTable, LyapunovCertificate,
    TOL_TIE,
};
use qswitch_core::operator::trace_product_re;
use qswitch_core::sampling::{random_density, random_pure, rng_from_seed};

fn model_params() -> impl Strategy<Value = (u64, usize, usize, usize)> {
    (any::<u64>(), 2usize..=4, 2usize..=3).prop_flat_map(|(seed, n, m)| (Just(seed), Just(n), 1..n, Just(m)))
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn certificate_is_sound((seed, n, ds, m) in model_params()) {
        let Some(model) = certified_model(seed, n, ds, m) else { return Err(TestCaseError::reject("no certificate")) };
        prop_assert!(model.cert.c > 0.0);
        prop_assert!(model.cert.soundness_residual(&model.bank, &model.d).unwrap() <= 1e-9);
    }

    #[test]
    fn sampled_states_see_the_certified_drift((seed, n, ds, m) in model_params()) {
        let Some(model) = certified_model(seed, n, ds, m) else { return Err(TestCaseError::reject("no certificate")) };
        let table = DriftTable::new(&model.bank, &model.cert.k).unwrap();
        let mut rng = rng_from_seed(seed ^ 0xa5a5);
        for i in 0..200 {
            let rho = if i % 2 == 0 { random_density(&mut rng, n) } else { random_pure(&mut rng, n) };
            let (min, _) = table.min_drift(&rho);
            prop_assert!(min <= -model.cert.c * table.value(&rho) + 1e-8);
        }
    }

    #[test]
    fn drift_table_matches_direct_evaluation((seed, n, ds, m) in model_params()) {
        let Some(model) = certified_model(seed, n, ds, m) else { return Err(TestCaseError::reject("no certificate")) };
        let table = DriftTable::new(&model.bank, &model.cert.k).unwrap();
        let rho = random_density(&mut rng_from_seed(seed), n);
        for (j, g) in model.bank.generators().iter().enumerate() {
            let direct = trace_product_re(&model.cert.k, &g.apply(&rho).unwrap());
            prop_assert!((table.drift(j, &rho) - direct).abs() <= 1e-10);
        }
    }

    #[test]
    fn scaling_k_changes_nothing_but_the_modulation_bound((seed, n, ds, m) in model_params(), s in 0.01f64..100.0) {
        let Some(model) = certified_model(seed, n, ds, m) else { return Err(TestCaseError::reject("no certificate")) };
        let (bank, d, cert) = (&model.bank, &model.d, &model.cert);
        let scaled = LyapunovCertificate::from_k_r(bank, d, cert.gamma.clone(), cert.k_r.scale(s)).unwrap();
        prop_assert!(rel_close(scaled.c, cert.c, 1e-9));
        let b0 = compute_l_bounds(bank, d, cert, 0.3).unwrap();
        let b1 = compute_l_bounds(bank, d, &scaled, 0.3).unwrap();
        prop_assert!(rel_close(b0.t_d, b1.t_d, 1e-9));
        for (x, y) in b0.l.iter().zip(&b1.l).chain(b0.l2.iter().zip(&b1.l2)) {
            prop_assert!(rel_close(*x, *y, 1e-9));
        }
        let m0 = compute_modulation_bound(bank, &cert.k).unwrap().m_bar;
        let m1 = compute_modulation_bound(bank, &scaled.k).unwrap().m_bar;
        prop_assert!(rel_close(m1, s * m0, 1e-9));
        let t0 = DriftTable::new(bank, &cert.k).unwrap();
        let t1 = DriftTable::new(bank, &scaled.k).unwrap();
        let mut rng = rng_from_seed(seed ^ 0x5a5a);
        for _ in 0..50 {
            let rho = random_density(&mut rng, n);
            let drifts = t0.drifts(&rho);
            let (min, _) = argmin_with_ties(&drifts);
            let near_tie = drifts.iter().filter(|&&v| v <= min + 1e3 * TOL_TIE).count() > 1;
            if !near_tie {
                prop_assert_eq!(t0.min_drift(&rho).1, t1.min_drift(&rho).1);
            }
        }
    }

    #[test]
    fn dwell_bound_decreases_with_epsilon((seed, n, ds, m) in model_params()) {
        let Some(model) = certified_model(seed, n, ds, m) else { return Err(TestCaseError::reject("no certificate")) };
        let grid: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
        let t_d: Vec<f64> = grid
            .iter()
            .map(|&e| compute_l_bounds(&model.bank, &model.d, &model.cert, e).unwrap().t_d)
            .collect();
        prop_assert!(t_d.iter().all(|&t| t > 0.0));
        for w in t_d.windows(2) {
            prop_assert!(w[1] < w[0], "{:?}", t_d);
        }
    }

    #[test]
    fn distance_is_sandwiched_by_the_lyapunov_value((seed, n, ds, m) in model_params()) {
        let Some(model) = certified_model(seed, n, ds, m) else { return Err(TestCaseError::reject("no certificate")) };
        let (c1, c2) = distance_constants(&model.cert.k_r, n).unwrap();
        let mut rng = rng_from_seed(seed ^ 0x3c3c);
        for i in 0..200 {
            let rho = if i % 2 == 0 { random_density(&mut rng, n) } else { random_pure(&mut rng, n) };
            let v = trace_product_re(&model.cert.k, &rho);
            let dist = model.d.subspace_distance(&rho);
            prop_assert!(c1 * v <= dist + 1e-12, "c1 V = {} > d_S = {}", c1 * v, dist);
            prop_assert!(dist <= c2 * v.max(0.0).sqrt() + 1e-12, "d_S = {} > c2 √V = {}", dist, c2 * v.sqrt());
        }
    }

    #[test]
    fn argmin_breaks_ties_to_the_smallest_index(values in prop::collection::vec(-10.0f64..10.0, 1..8), tie in any::<prop::sample::Index>()) {
        let mut values = values;
        let (min, idx) = argmin_with_ties(&values);
        prop_assert!(values.iter().all(|&v| v >= min));
        prop_assert_eq!(values[idx], min);
        prop_assert!(values[..idx].iter().all(|&v| v > min + TOL_TIE));
        // plant a tie after the minimum: the earlier index must still win
        let j = tie.index(values.len());
        if j > idx {
            values[j] = min + 0.5 * TOL_TIE;
            prop_assert_eq!(argmin_with_ties(&values).1, idx);
        }
    }
}

#[test]
fn random_invariant_banks_are_mostly_certifiable() {
    let mut certified = 0;
    for seed in 0..100u64 {
        let n = 2 + (seed % 3) as usize;
        let ds = 1 + (seed / 3) as usize % (n - 1);
        certified += usize::from(certified_model(seed, n, ds, 2).is_some());
    }
    assert!(certified >= 80, "only {certified} of 100 random banks certified");
}
