//! Property-based invariants across the library: special-function
//! recurrences, change-of-variables identities, sampler bounds, and exact
//! bookkeeping identities.

use grasp::data::{GroupLayout, Standardization};
use grasp::prior::{
    corr_gigg, corr_grasp, log_density_log_scale, log_density_scale, ShrinkagePriorKind,
};
use grasp::randdist::{draw_beta, draw_gamma, RngStream};
use grasp::sim::evaluate;
use grasp::specfun::{digamma, log_beta, logistic, trigamma};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;

fn positive_shape() -> impl Strategy<Value = f64> {
    // Log-uniform over a wide but numerically comfortable range.
    (-3.0f64..3.0).prop_map(|e| e.exp())
}

proptest! {
    #[test]
    fn digamma_satisfies_its_recurrence(x in 0.01f64..60.0) {
        let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
        let rhs = 1.0 / x;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
    }

    #[test]
    fn trigamma_satisfies_its_recurrence(x in 0.01f64..60.0) {
        let lhs = trigamma(x).unwrap() - trigamma(x + 1.0).unwrap();
        let rhs = 1.0 / (x * x);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
    }

    #[test]
    fn log_beta_is_symmetric_and_matches_the_unit_case(
        a in positive_shape(),
        b in positive_shape(),
    ) {
        let ab = log_beta(a, b).unwrap();
        let ba = log_beta(b, a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-10 * ab.abs().max(1.0));
        let unit = log_beta(a, 1.0).unwrap();
        prop_assert!((unit + a.ln()).abs() <= 1e-10 * a.ln().abs().max(1.0));
    }

    #[test]
    fn logistic_halves_sum_to_one(x in -30.0f64..30.0) {
        let s = logistic(x) + logistic(-x);
        prop_assert!((s - 1.0).abs() <= 1e-12);
        prop_assert!(logistic(x) > 0.0 && logistic(x) < 1.0);
    }

    #[test]
    fn scale_and_log_scale_densities_agree(
        xi in -5.0f64..5.0,
        pick in 0usize..4,
        a in positive_shape(),
        b in positive_shape(),
    ) {
        let kind = match pick {
            0 => ShrinkagePriorKind::Lasso,
            1 => ShrinkagePriorKind::Horseshoe,
            2 => ShrinkagePriorKind::StudentT { dof: a },
            _ => ShrinkagePriorKind::BetaPrime { a, b },
        };
        let lhs = log_density_log_scale(kind, xi).unwrap();
        let rhs = log_density_scale(kind, xi.exp()).unwrap() + xi;
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
    }

    #[test]
    fn correlation_formulas_stay_inside_the_open_unit_interval(
        a in positive_shape(),
        b in positive_shape(),
        a_g in positive_shape(),
        b_g in positive_shape(),
    ) {
        let grasp = corr_grasp(a, b, a_g, b_g).unwrap();
        prop_assert!(grasp > 0.0 && grasp < 1.0);
        let swapped = corr_grasp(b, a, a_g, b_g).unwrap();
        prop_assert_eq!(grasp, swapped);
        let gigg = corr_gigg(a_g, b_g).unwrap();
        prop_assert!(gigg > 0.0 && gigg < 1.0);
    }

    #[test]
    fn random_streams_replay_and_branch(seed in any::<u64>(), index in 0u64..1000) {
        let mut first = RngStream::new(seed).substream(index);
        let mut second = RngStream::new(seed).substream(index);
        let a: [u64; 4] = std::array::from_fn(|_| first.gen());
        let b: [u64; 4] = std::array::from_fn(|_| second.gen());
        prop_assert_eq!(a, b);
        let mut sibling = RngStream::new(seed).substream(index + 1);
        let c: [u64; 4] = std::array::from_fn(|_| sibling.gen());
        prop_assert_ne!(a, c);
    }

    #[test]
    fn variate_draws_respect_their_supports(
        seed in any::<u64>(),
        shape in 0.05f64..20.0,
        scale in 0.05f64..20.0,
    ) {
        let mut rng = RngStream::new(seed);
        for _ in 0..4 {
            let g = draw_gamma(&mut rng, shape, scale).unwrap();
            prop_assert!(g > 0.0 && g.is_finite());
            let u = draw_beta(&mut rng, shape, scale).unwrap();
            prop_assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn stratified_errors_always_sum_exactly(
        values in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..40),
        null_every in 1usize..5,
    ) {
        let truth = DVector::from_iterator(
            values.len(),
            values
                .iter()
                .enumerate()
                .map(|(i, &(t, _))| if i % null_every == 0 { 0.0 } else { t }),
        );
        let estimate = DVector::from_iterator(values.len(), values.iter().map(|&(_, e)| e));
        let report = evaluate(&estimate, &truth).unwrap();
        prop_assert_eq!(report.oa, report.z0 + report.nz0);
        prop_assert!(report.z0 >= 0.0 && report.nz0 >= 0.0);
        let perfect = evaluate(&truth, &truth).unwrap();
        prop_assert_eq!(perfect.oa, 0.0);
    }

    #[test]
    fn group_layouts_partition_their_coefficients(
        sizes in prop::collection::vec(1usize..6, 1..6),
    ) {
        let mut ids = Vec::new();
        for (g, &size) in sizes.iter().enumerate() {
            ids.extend(std::iter::repeat(g).take(size));
        }
        let layout = GroupLayout::new(ids).unwrap();
        prop_assert_eq!(layout.groups(), sizes.len());
        prop_assert_eq!(layout.sizes(), sizes.clone());
        let mut seen = 0;
        for g in 0..layout.groups() {
            for &j in layout.members(g) {
                prop_assert_eq!(layout.group_of(j), g);
                seen += 1;
            }
        }
        prop_assert_eq!(seen, layout.coefficients());
    }

    #[test]
    fn original_scale_mapping_is_a_pure_rescaling(
        coef in -10.0f64..10.0,
        x_sd in 0.1f64..10.0,
        y_sd in 0.1f64..10.0,
    ) {
        let std = Standardization {
            x_means: vec![0.4],
            x_sds: vec![x_sd],
            y_mean: -1.0,
            y_sd,
        };
        let mapped = std.coef_to_original(0, coef);
        prop_assert!((mapped * x_sd / y_sd - coef).abs() <= 1e-12 * coef.abs().max(1.0));
    }
}
