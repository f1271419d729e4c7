//! Property tests for the algebraic invariants: exp/log round trips, the
//! groupoid axioms on arbitrary coordinates, cycle preservation under jet
//! variations, and linearity of the differential in the variation tuple.

use nalgebra::DVector;
use proptest::prelude::*;

use varfield::groupoid::Groupoid;
use varfield::jet::{directional_derivative, make_jet, tangent_lift_derivative, vary_jet};
use varfield::lagrangian::quadratic_edge_lagrangian;

fn small_coeff() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL.prop_map(|x| (x % 1.0) * 0.8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_log_inverts_exp(a in small_coeff(), b in small_coeff(), c in small_coeff()) {
        let g = Groupoid::so3();
        let xi = DVector::from_vec(vec![a, b, c]);
        prop_assume!(xi.norm() < std::f64::consts::PI - 0.2);
        let rot = g.exp_group(&xi).unwrap();
        let back = g.log_group(&rot).unwrap();
        prop_assert!((&back.coeffs - &xi).norm() < g.tol.exp_tol);
        // and the round trip through the group again
        let rot2 = g.exp_group(&back.coeffs).unwrap();
        prop_assert!(g.element_distance(&rot, &rot2) < g.tol.exp_tol);
    }

    #[test]
    fn pair_groupoid_axioms_hold_for_arbitrary_points(
        q in prop::collection::vec(small_coeff(), 8),
    ) {
        let g = Groupoid::pair_rn(2);
        let p = |i: usize| g.base_point(vec![q[2 * i], q[2 * i + 1]]).unwrap();
        let a = g.pair(&p(0), &p(1)).unwrap();
        let b = g.pair(&p(1), &p(2)).unwrap();
        let c = g.pair(&p(2), &p(3)).unwrap();
        let left = g.compose(&g.compose(&a, &b).unwrap(), &c).unwrap();
        let right = g.compose(&a, &g.compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left.to_vec(), right.to_vec());
        let inv = g.inverse(&a).unwrap();
        let unit = g.compose(&a, &inv).unwrap();
        prop_assert_eq!(unit.to_vec(), g.identity(&p(0)).to_vec());
    }

    #[test]
    fn varied_jets_always_close(
        corners in prop::collection::vec(small_coeff(), 4),
        velocity in prop::collection::vec(small_coeff(), 4),
        t in -0.5f64..0.5,
    ) {
        let g = Groupoid::pair_rn(1);
        let mk = |i: usize| g.base_point(vec![corners[i]]).unwrap();
        let components: Vec<_> = (0..4)
            .map(|i| g.pair(&mk(i), &mk((i + 1) % 4)).unwrap())
            .collect();
        let jet = make_jet(&g, components).unwrap();
        let vectors: Vec<_> = (1..=4)
            .map(|i| {
                g.algebroid_vector(g.alpha(jet.component(i)), vec![velocity[i - 1]])
                    .unwrap()
            })
            .collect();
        // make_jet inside vary_jet re-checks the cycle condition
        prop_assert!(vary_jet(&g, &jet, &vectors, t).is_ok());
    }

    #[test]
    fn differential_is_linear_in_the_tuple(
        corners in prop::collection::vec(small_coeff(), 4),
        v in prop::collection::vec(small_coeff(), 4),
        w in prop::collection::vec(small_coeff(), 4),
        scale in -2.0f64..2.0,
    ) {
        let g = Groupoid::pair_rn(1);
        let lagrangian = quadratic_edge_lagrangian(&g, 4, vec![1.0, -0.5, 0.7, 1.3], 0.4)
            .unwrap()
            .without_exact();
        let mk = |i: usize| g.base_point(vec![corners[i]]).unwrap();
        let components: Vec<_> = (0..4)
            .map(|i| g.pair(&mk(i), &mk((i + 1) % 4)).unwrap())
            .collect();
        let jet = make_jet(&g, components).unwrap();
        let vec_at = |coeffs: &[f64], i: usize, s: f64| {
            g.algebroid_vector(g.alpha(jet.component(i)), vec![s * coeffs[i - 1]])
                .unwrap()
        };
        let combined: Vec<_> = (1..=4)
            .map(|i| {
                g.algebroid_vector(
                    g.alpha(jet.component(i)),
                    vec![v[i - 1] + scale * w[i - 1]],
                )
                .unwrap()
            })
            .collect();
        let lhs = directional_derivative(&g, &lagrangian, &jet, &combined).unwrap();
        let mut rhs = 0.0;
        for i in 1..=4 {
            rhs += tangent_lift_derivative(&g, &lagrangian, &jet, i, &vec_at(&v, i, 1.0)).unwrap();
            rhs += tangent_lift_derivative(&g, &lagrangian, &jet, i, &vec_at(&w, i, scale)).unwrap();
        }
        prop_assert!((lhs - rhs).abs() < 1e-6 * (1.0 + lhs.abs()));
    }
}
