use levy_rinv_core::inverse::{evans_construct, level_trace, thinned_ladder_construct};
use levy_rinv_core::resolvent::hitting_transform;
use levy_rinv_core::{JumpLaw, LevyModel, SamplePath, SimConfig};
use proptest::prelude::*;

fn law() -> impl Strategy<Value = JumpLaw> {
    prop_oneof![
        (0.05f64..0.95, 0.5f64..4.0, 0.5f64..4.0).prop_map(|(p_up, rate_up, rate_down)| {
            JumpLaw::TwoSidedExponential { p_up, rate_up, rate_down }
        }),
        (0.5f64..4.0).prop_map(|rate| JumpLaw::ExponentialNegative { rate }),
        (-2.0f64..2.0, 0.1f64..0.9)
            .prop_filter("nonzero size", |(y, _)| y.abs() > 1e-3)
            .prop_map(|(y, p)| JumpLaw::atoms(vec![(y, p), (-0.5, 1.0 - p)])),
    ]
}

fn model() -> impl Strategy<Value = LevyModel> {
    prop_oneof![
        (-2.0f64..2.0, 0.1f64..4.0).prop_map(|(mu, s2)| LevyModel::brownian(mu, s2).unwrap()),
        (-2.0f64..2.0, 0.1f64..4.0, 0.1f64..3.0, law())
            .prop_map(|(mu, s2, rate, law)| LevyModel::jump_diffusion(mu, s2, rate, law).unwrap()),
        (0.1f64..3.0, 0.1f64..3.0, law()).prop_map(|(b, rate, law)| LevyModel::bounded_variation(b, rate, law).unwrap()),
    ]
}

fn jump_diffusion() -> LevyModel {
    LevyModel::jump_diffusion(
        0.2,
        1.0,
        1.0,
        JumpLaw::TwoSidedExponential {
            p_up: 0.5,
            rate_up: 2.0,
            rate_down: 2.0,
        },
    )
    .unwrap()
}

proptest! {
    #[test]
    fn psi_is_conjugate_symmetric(m in model(), lam in -50.0f64..50.0) {
        let a = m.char_exponent(lam);
        let b = m.char_exponent(-lam);
        prop_assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn psi_has_nonnegative_real_part(m in model(), lam in -200.0f64..200.0) {
        prop_assert!(m.char_exponent(lam).re >= -1e-12);
    }

    #[test]
    fn symmetric_models_have_real_even_psi(s2 in 0.0f64..4.0, rate in 0.1f64..3.0, r in 0.5f64..4.0, lam in -20.0f64..20.0) {
        let law = JumpLaw::TwoSidedExponential { p_up: 0.5, rate_up: r, rate_down: r };
        let m = LevyModel::new(0.0, s2, levy_rinv_core::JumpSpec::compound_poisson(rate, law)).unwrap();
        let a = m.char_exponent(lam);
        prop_assert!(a.im.abs() <= 1e-12 * (1.0 + a.norm()));
        prop_assert!((a - m.char_exponent(-lam)).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn simulation_is_deterministic(m in model(), seed in any::<u64>(), stream in 0u64..1000) {
        let cfg = SimConfig::new(1e-2, 5.0, seed, stream);
        let a = SamplePath::simulate(&m, &cfg).unwrap();
        let b = SamplePath::simulate(&m, &cfg).unwrap();
        prop_assert_eq!(a.nodes(), b.nodes());
        prop_assert_eq!(a.nodes()[0].right, 0.0);
    }

    #[test]
    fn running_supremum_dominates_and_increases(m in model(), seed in any::<u64>()) {
        let p = SamplePath::simulate(&m, &SimConfig::new(1e-2, 5.0, seed, 0)).unwrap();
        let sup = p.running_supremum();
        let vals = p.grid_values();
        prop_assert!(sup.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(sup.iter().zip(&vals).all(|(s, v)| s >= v));
    }

    #[test]
    fn right_inverses_are_nondecreasing(seed in any::<u64>()) {
        let m = jump_diffusion();
        let mut p = SamplePath::lazy(&m, &SimConfig::new(1e-3, 30.0, seed, 0)).unwrap();
        for k in [
            evans_construct(&mut p, 6, 3, 1.0).unwrap(),
            thinned_ladder_construct(&mut p, 6, 6, 1.0).unwrap(),
            level_trace(&mut p, 6, 1.0, &mut ()).unwrap(),
        ] {
            prop_assert!(k.k.windows(2).all(|w| w[1] >= w[0]), "{:?}", k.method);
            prop_assert_eq!(k.k[0], 0.0);
        }
    }

    #[test]
    fn level_trace_hits_its_levels(seed in any::<u64>()) {
        let m = jump_diffusion();
        let mut p = SamplePath::lazy(&m, &SimConfig::new(1e-3, 30.0, seed, 0)).unwrap();
        let k = level_trace(&mut p, 5, 1.0, &mut ()).unwrap();
        for (x, t) in k.levels() {
            prop_assert!((p.value_at(t) - x).abs() < 1e-9, "X({t}) = {} at level {x}", p.value_at(t));
        }
    }

    #[test]
    fn evans_increases_with_depth_towards_level_trace(seed in any::<u64>()) {
        // coarse chains can hit a level on the way down after an upward jump
        let m = jump_diffusion();
        let mut p = SamplePath::lazy(&m, &SimConfig::new(1e-3, 30.0, seed, 0)).unwrap();
        let exact = level_trace(&mut p, 5, 1.0, &mut ()).unwrap();
        let coarse = evans_construct(&mut p, 5, 0, 1.0).unwrap();
        let fine = evans_construct(&mut p, 5, 3, 1.0).unwrap();
        for ((a, b), c) in coarse.k.iter().zip(&fine.k).zip(&exact.k) {
            prop_assert!(*a <= b + 1e-9 && *b <= c + 1e-9, "{a} {b} {c}");
        }
    }

    #[test]
    fn hitting_transform_is_a_probability(mu in -1.0f64..1.0, q in 0.1f64..3.0, x in -3.0f64..3.0) {
        let m = LevyModel::brownian(mu, 1.0).unwrap();
        let h = hitting_transform(&m, q, x).unwrap();
        prop_assert!((0.0..=1.0).contains(&h));
        // closed form e^{−|x|(√(μ²+2q) ∓ μ)}
        let r = (mu * mu + 2.0 * q).sqrt();
        let exact = (-(x.abs()) * (r - mu * x.signum())).exp();
        prop_assert!((h - exact).abs() < 1e-6, "{h} {exact}");
    }
}
