use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use orlicz_ext::conditions::{
    a1omega_to_a1_constant, check_a0, check_a1, check_a1_omega, check_a2, sample_balls, sample_points, Perturbation,
};
use orlicz_ext::domain::{sample_pairs, shapes};
use orlicz_ext::phi::{Field, GrowthFunction};
use orlicz_ext::PhiFunction;

/// Smooth families with spatially varying inverse.
fn family() -> impl Strategy<Value = PhiFunction<f64>> {
    prop_oneof![
        (1.5f64..3.0, -0.4f64..0.4, -0.4f64..0.4).prop_map(|(a, b, c)| {
            PhiFunction::variable_exponent(Field::expr(&format!("{a} + {b}*x1 + {c}*x2")).unwrap())
        }),
        (0.1f64..3.0).prop_map(|s| {
            PhiFunction::double_phase(2.0, 3.0, Field::expr(&format!("{s}*(1 + x1)")).unwrap()).unwrap()
        }),
        (1.0f64..4.0).prop_map(|p| PhiFunction::power(p).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn beta_conditions_are_monotone_in_beta(phi in family(), seed in 0u64..1000, beta in 0.05f64..0.99, s in 0.1f64..1.0) {
        let d = shapes::l_shape(0.125f64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = sample_points(&d, 40, &mut rng);
        let balls = sample_balls(&d, 24, 48, &mut rng);
        let pairs = sample_pairs(&d, 3.0, 40, &mut rng);
        let ts = [1.0, 3.0, 10.0, 100.0];
        let lower = beta * s;
        let verdicts = |b: f64| {
            [
                check_a0(&phi, &pts, b).unwrap().verdict,
                check_a1(&phi, &balls, 8, b).unwrap().verdict,
                check_a1_omega(&phi, &pairs, &ts, b).unwrap().verdict,
                check_a2(&phi, 10.0, &Perturbation::Const(0.5), b, &pairs, 8).unwrap().verdict,
            ]
        };
        for (hi, lo) in verdicts(beta).into_iter().zip(verdicts(lower)) {
            prop_assert!(!hi || lo);
        }
    }

    #[test]
    fn a1_omega_on_balls_gives_a1(phi in family(), seed in 0u64..1000) {
        let d = shapes::unit_disk(0.1f64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let balls = sample_balls(&d, 12, 30, &mut rng);
        // largest beta passing (A1)_Omega on every ball's own pairs and t range
        let mut beta = 1.0f64;
        for b in &balls {
            if b.points.len() > 1 {
                let r = check_a1_omega(&phi, &b.pairs(), &b.t_grid(8), 0.5).unwrap();
                beta = beta.min(r.best_constant);
            }
        }
        let beta = (beta * (1.0 - 1e-9)).min(0.999);
        for b in &balls {
            if b.points.len() > 1 {
                prop_assert!(check_a1_omega(&phi, &b.pairs(), &b.t_grid(8), beta).unwrap().verdict);
            }
        }
        let b1 = a1omega_to_a1_constant(beta, 2).unwrap();
        let r = check_a1(&phi, &balls, 8, b1).unwrap();
        prop_assert!(r.verdict, "{:?}", r.witnesses.first());
    }

    #[test]
    fn witnesses_violate_their_inequality(seed in 0u64..1000, steep in 2.0f64..8.0, beta in 0.5f64..0.99) {
        let d = shapes::unit_square(0.05f64).unwrap();
        let phi = PhiFunction::variable_exponent(Field::expr(&format!("1.5 + {steep}*x1*x1")).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let balls = sample_balls(&d, 32, 64, &mut rng);
        let r = check_a1(&phi, &balls, 16, beta).unwrap();
        for w in &r.witnesses {
            let t = w.t.unwrap();
            let ix = phi.inverse(w.x, t, 1e-13).unwrap();
            let iy = phi.inverse(w.y.unwrap(), t, 1e-13).unwrap();
            prop_assert!(beta * ix > iy * (1.0 + 1e-9), "{} vs {}", beta * ix, iy);
        }
        let pairs = sample_pairs(&d, 2.0, 64, &mut rng);
        let r = check_a1_omega(&phi, &pairs, &[1.0, 10.0, 1e3], beta).unwrap();
        for w in &r.witnesses {
            let t = w.t.unwrap();
            let (x, y) = (w.x, w.y.unwrap());
            let decay = beta.powf(x.dist(&y) * t.sqrt() + 1.0);
            let lhs = decay * phi.inverse(x, t, 1e-13).unwrap();
            prop_assert!(lhs > phi.inverse(y, t, 1e-13).unwrap() * (1.0 + 1e-9));
        }
    }
}
