use std::sync::Arc;

use proptest::prelude::*;

use orlicz_ext::domain::edt::distance_to_inside;
use orlicz_ext::domain::shapes;
use orlicz_ext::sobolev::{
    default_collar_width, g_reduction, weighted_l1, weighted_norm, whitney_decompose, ExtensionOperator, Weight,
    WhitneyDecomposition,
};
use orlicz_ext::{GridFunction, RasterDomain};

fn setup() -> (Arc<RasterDomain<f64>>, Arc<WhitneyDecomposition<f64>>) {
    let d = Arc::new(shapes::l_shape(1.0 / 16.0).unwrap());
    let w = Arc::new(whitney_decompose(d.clone(), default_collar_width(&d)).unwrap());
    (d, w)
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn restriction_linearity_and_locality(
        (u, v) in values(shapes::l_shape(1.0f64 / 16.0).unwrap().len()).prop_flat_map(|u| {
            let n = u.len();
            (Just(u), values(n))
        }),
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
    ) {
        let (d, w) = setup();
        let op = ExtensionOperator::new(w.clone());
        let u = GridFunction::from_values(d.clone(), u).unwrap();
        let v = GridFunction::from_values(d.clone(), v).unwrap();
        let (lu, lv) = (op.apply(&u).unwrap(), op.apply(&v).unwrap());
        for k in d.inside_cells() {
            prop_assert_eq!(lu.values()[w.to_grid(k)], u.values()[k]);
        }
        let mix = op.apply(&u.combine(a, &v, b).unwrap()).unwrap();
        for k in 0..mix.values().len() {
            let want = a * lu.values()[k] + b * lv.values()[k];
            prop_assert!((mix.values()[k] - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
        let dist = distance_to_inside(w.grid());
        let band = 2.0 * w.collar_width() + d.h();
        for (k, &r) in dist.iter().enumerate() {
            if r > band {
                prop_assert_eq!(lu.values()[k], 0.0);
            }
        }
    }

    #[test]
    fn weighted_norm_equals_l1_of_g(seed_vals in values(shapes::disk((0.0, 0.0), 1.0, 1.0f64 / 16.0).unwrap().len()), c in 0.1f64..10.0, k in 0u32..2) {
        let d = Arc::new(shapes::disk((0.0, 0.0), 1.0, 1.0 / 16.0).unwrap());
        let u = GridFunction::from_values(d.clone(), seed_vals).unwrap().with_derivatives(1);
        let full = Arc::new(RasterDomain::full(d.origin(), d.h(), d.nx(), d.ny()).unwrap());
        for w in [
            Weight::constant(full.clone(), c).unwrap(),
            Weight::from_fn(full.clone(), |p| (p.norm() + 1e-3).powf(-0.5)).unwrap(),
        ] {
            let lhs = weighted_norm(&u, &w, k).unwrap();
            let rhs = weighted_l1(&g_reduction(&u, k).unwrap(), &w).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs, "{lhs} vs {rhs}");
        }
    }
}
