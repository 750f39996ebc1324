use std::sync::Arc;

use proptest::prelude::*;

use orlicz_ext::domain::shapes;
use orlicz_ext::phi::{check_equivalence, luxemburg_norm, modular, Field, GrowthFunction};
use orlicz_ext::scalar::log_space;
use orlicz_ext::{GridFunction, PhiFunction, Point, RasterDomain};

const TOL: f64 = 1e-10;

fn family() -> impl Strategy<Value = PhiFunction<f64>> {
    prop_oneof![
        (0.5f64..6.0).prop_map(|p| PhiFunction::power(p).unwrap()),
        (1.0f64..3.0, 0.0f64..2.0, 0.0f64..3.0).prop_map(|(p, dq, a)| {
            PhiFunction::double_phase(p, p + dq, Field::Const(a)).unwrap()
        }),
        Just(PhiFunction::variable_exponent(Field::expr("2 + x1/2 + x2*x2/4").unwrap())),
        Just(PhiFunction::orlicz_expr("t^2*ln(e+t)").unwrap()),
        Just(PhiFunction::orlicz_expr("max(t, t^3)").unwrap()),
    ]
}

fn x() -> impl Strategy<Value = Point<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Point(a, b))
}

fn tau() -> impl Strategy<Value = f64> {
    (-8.0f64..8.0).prop_map(|e| 10f64.powf(e))
}

fn grid() -> Arc<RasterDomain<f64>> {
    Arc::new(shapes::l_shape(1.0 / 12.0).unwrap())
}

/// Random field on the L-shape, not identically zero.
fn field() -> impl Strategy<Value = GridFunction<f64>> {
    let d = grid();
    let n = d.len();
    (prop::collection::vec(-3.0f64..3.0, n), 0.01f64..100.0).prop_map(move |(v, s)| {
        let mut v: Vec<f64> = v.into_iter().map(|a| a * s).collect();
        v[d.inside_cells().next().unwrap()] = s;
        GridFunction::from_values(d.clone(), v).unwrap()
    })
}

fn phi_at(phi: &PhiFunction<f64>, x: Point<f64>, t: f64) -> f64 {
    phi.eval(x, t).unwrap().to_real()
}

proptest! {
    #[test]
    fn inverse_is_monotone(phi in family(), x in x(), a in tau(), b in tau()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(phi.inverse(x, lo, TOL).unwrap() <= phi.inverse(x, hi, TOL).unwrap());
    }

    #[test]
    fn inverse_is_the_infimum(phi in family(), x in x(), tau in tau(), s in 0.0f64..1.0) {
        let inv = phi.inverse(x, tau, TOL).unwrap();
        let below = inv * (1.0 - TOL) * s;
        let above = inv * (1.0 + TOL) / s.max(1e-3);
        prop_assert!(phi_at(&phi, x, below) < tau, "phi({below}) >= {tau}");
        prop_assert!(phi_at(&phi, x, above) >= tau, "phi({above}) < {tau}");
    }

    #[test]
    fn round_trip_on_strictly_increasing_families(
        p in 1.0f64..4.0, dq in 0.0f64..2.0, a in 0.01f64..3.0, x in x(), tau in tau(), dp in any::<bool>(),
    ) {
        let phi = if dp {
            PhiFunction::double_phase(p, p + dq, Field::Const(a)).unwrap()
        } else {
            PhiFunction::power(p).unwrap()
        };
        let inv = phi.inverse(x, tau, TOL).unwrap();
        let back = phi_at(&phi, x, inv);
        // relative error tol in t is at most (p + dq) tol in phi
        prop_assert!((back - tau).abs() <= (p + dq) * TOL * tau * 1.01, "{back} vs {tau}");
    }

    #[test]
    fn norm_is_homogeneous(phi in family(), u in field(), c in prop::sample::select(vec![0.5f64, 2.0, 10.0])) {
        let a = luxemburg_norm(&phi, &u, TOL).unwrap();
        let b = luxemburg_norm(&phi, &u.scaled(c), TOL).unwrap();
        prop_assert!((b / (c * a) - 1.0).abs() <= TOL * 1.01, "{b} vs {c} * {a}");
    }

    #[test]
    fn norm_is_the_unit_ball_gauge(phi in family(), u in field(), s in 1e-6f64..0.5) {
        let n = luxemburg_norm(&phi, &u, TOL).unwrap();
        let outside = modular(&phi, &u.scaled(1.0 / (n * (1.0 + TOL) * (1.0 + s)))).unwrap();
        let inside = modular(&phi, &u.scaled(1.0 / (n * (1.0 - TOL) * (1.0 - s)))).unwrap();
        prop_assert!(outside.to_real() <= 1.0);
        prop_assert!(inside.to_real() > 1.0);
    }

    #[test]
    fn equivalent_functions_have_comparable_norms(p in 1.0f64..4.0, c in 0.2f64..5.0, a in 0.1f64..4.0, u in field()) {
        let pts = vec![Point(0.0, 0.0)];
        let ts = log_space(1e-6, 1e6, 49);
        // c t^p against t^p: L = max(c, 1/c)^{1/p}. t^2 + a t^3 against
        // max(t^2, a t^3): worst at a t = 1/L, where L^2 = 1 + 1/L.
        let mut plastic = 1.3f64;
        for _ in 0..60 {
            plastic -= (plastic.powi(3) - plastic - 1.0) / (3.0 * plastic * plastic - 1.0);
        }
        let pairs = [
            (
                PhiFunction::power(p).unwrap(),
                PhiFunction::orlicz_expr(&format!("{c}*t^{p}")).unwrap(),
                c.max(1.0 / c).powf(1.0 / p),
            ),
            (
                PhiFunction::double_phase(2.0, 3.0, Field::Const(a)).unwrap(),
                PhiFunction::orlicz_expr(&format!("max(t^2, {a}*t^3)")).unwrap(),
                plastic,
            ),
        ];
        for (phi, psi, l) in &pairs {
            let l = l * (1.0 + 1e-9);
            let r = check_equivalence(phi, psi, l, &pts, &ts).unwrap();
            prop_assert!(r.verdict && r.best_constant <= l);
            let (np, nq) = (luxemburg_norm(phi, &u, TOL).unwrap(), luxemburg_norm(psi, &u, TOL).unwrap());
            let slack = 1.0 + 2.0 * TOL;
            prop_assert!(nq / l <= np * slack && np <= l * nq * slack, "{np} {nq} {l}");
        }
    }
}
