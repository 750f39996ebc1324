use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::conditions::ConstantBundle;
use crate::domain::{shapes, RasterDomain};
use crate::extension::ExtensionOptions;
use crate::phi::{Field, GridFunction, PhiFunction};

fn disk(h: f64) -> (Arc<RasterDomain<f64>>, Arc<WhitneyDecomposition<f64>>) {
    let d = Arc::new(shapes::unit_disk(h).unwrap());
    let w = Arc::new(whitney_decompose(d.clone(), default_collar_width(&d)).unwrap());
    (d, w)
}

fn quick() -> ExtensionOptions {
    ExtensionOptions {
        samples: 64,
        t_points: 16,
        ..ExtensionOptions::default()
    }
}

#[test]
fn restriction_and_linearity() {
    let (d, w) = disk(1.0 / 32.0);
    let op = ExtensionOperator::new(w.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut rand_fn = || {
        let vals: Vec<f64> = (0..d.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        GridFunction::from_values(d.clone(), vals).unwrap()
    };
    let (u, v) = (rand_fn(), rand_fn());
    let (lu, lv) = (op.apply(&u).unwrap(), op.apply(&v).unwrap());
    for k in d.inside_cells() {
        assert_eq!(lu.values()[w.to_grid(k)], u.values()[k]);
    }
    let (a, b) = (0.7, -2.3);
    let mix = op.apply(&u.combine(a, &v, b).unwrap()).unwrap();
    let err = mix
        .values()
        .iter()
        .zip(lu.values().iter().zip(lv.values()))
        .map(|(m, (x, y))| (m - (a * x + b * y)).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-12, "{err}");
}

#[test]
fn constant_is_kept_on_collar_and_vanishes_beyond() {
    let (d, w) = disk(1.0 / 32.0);
    let op = ExtensionOperator::new(w.clone());
    let lu = op.apply(&GridFunction::from_fn(d.clone(), |_| 1.0)).unwrap();
    let g = w.grid();
    let collar = w.collar_width();
    for k in 0..g.len() {
        let dist = w.cell_dist[k];
        let v = lu.values()[k];
        if g.is_inside(k) || dist <= collar {
            assert!((v - 1.0).abs() < 1e-12, "cell {k}: {v} at distance {dist}");
        } else if dist >= 2.0 * collar {
            assert_eq!(v, 0.0);
        } else {
            assert!((0.0..=1.0 + 1e-12).contains(&v));
        }
    }
    let zero = op.apply(&GridFunction::zeros(d.clone())).unwrap();
    assert!(zero.values().iter().all(|&v| v == 0.0));
}

#[test]
fn zero_function_has_zero_ratio() {
    let (d, w) = disk(1.0 / 16.0);
    let phi = PhiFunction::power(2.0).unwrap();
    let r = extend(&GridFunction::zeros(d), w, &phi, &phi).unwrap();
    assert_eq!(r.ratio, 0.0);
    assert_eq!(r.norm_u, 0.0);
}

#[test]
fn constant_ratio_is_stable_under_refinement() {
    // psi = phi = t^2 everywhere isolates the taper cost
    let phi = PhiFunction::power(2.0).unwrap();
    let ratios: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0]
        .iter()
        .map(|&h| {
            let (d, w) = disk(h);
            extend(&GridFunction::from_fn(d, |_| 1.0), w, &phi, &phi).unwrap().ratio
        })
        .collect();
    // closed form: ||Lambda 1||_{L^2} over |x| < 2 plus ||d_1 chi|| + ||d_2 chi||,
    // each sqrt(int |chi'|^2 / 2) over the band 1.5 < |x| < 2
    let band = {
        let n = 100_000;
        let (r0, r1) = (1.5f64, 2.0f64);
        let mut acc = 0.0;
        for i in 0..n {
            let r = r0 + (i as f64 + 0.5) / n as f64 * (r1 - r0);
            let s = (r1 - r) / (r1 - r0);
            let ds = 6.0 * s * (1.0 - s) / (r1 - r0);
            acc += ds * ds * 2.0 * std::f64::consts::PI * r;
        }
        (acc * (r1 - r0) / n as f64).sqrt()
    };
    let values = {
        let n = 100_000;
        let (r0, r1) = (1.5f64, 2.0f64);
        let mut acc = 0.0;
        for i in 0..n {
            let r = r0 + (i as f64 + 0.5) / n as f64 * (r1 - r0);
            let s = (r1 - r) / (r1 - r0);
            let chi = s * s * (3.0 - 2.0 * s);
            acc += chi * chi * 2.0 * std::f64::consts::PI * r;
        }
        (std::f64::consts::PI * r0 * r0 + acc * (r1 - r0) / n as f64).sqrt()
    };
    let want = (values + 2f64.sqrt() * band) / std::f64::consts::PI.sqrt();
    for w in ratios.windows(2) {
        assert!(w[1] <= 1.1 * w[0], "{ratios:?}");
    }
    assert!((ratios[2] / want - 1.0).abs() < 0.05, "{ratios:?} vs {want}");
}

#[test]
fn interior_data_extends_to_near_zero() {
    let (d, w) = disk(1.0 / 32.0);
    let op = ExtensionOperator::new(w.clone());
    let u = GridFunction::from_fn(d.clone(), |p| {
        let r = p.norm();
        if r < 0.4 {
            (1.0 - r / 0.4).powi(3)
        } else {
            0.0
        }
    });
    let lu = op.apply(&u).unwrap();
    for &k in op.support() {
        assert!(lu.values()[k].abs() < 1e-12);
    }
    let phi = PhiFunction::power(2.0).unwrap();
    let r = extend(&u, w, &phi, &phi).unwrap();
    assert!((r.ratio - 1.0).abs() < 0.05, "{}", r.ratio);
}

#[test]
fn operator_ignores_weights_and_cutoffs() {
    let (d, w) = disk(1.0 / 32.0);
    let op = ExtensionOperator::new(w.clone());
    let u = GridFunction::from_fn(d.clone(), |p| (2.0 * p.0).sin() + p.1);
    // a cutoff equal to one on a ball beyond the diameter leaves u unchanged
    let cut = GridFunction::from_fn(d.clone(), |p| if p.norm() < 3.0 { 1.0 } else { 0.0 });
    let uc = GridFunction::from_values(
        d.clone(),
        u.values().iter().zip(cut.values()).map(|(a, b)| a * b).collect(),
    )
    .unwrap();
    let (a, b) = (op.apply(&u).unwrap(), op.apply(&uc).unwrap());
    assert_eq!(a.values(), b.values());
    // measuring with different weights does not touch the extension
    let full = op.full_grid().clone();
    let ext = a.clone().with_derivatives(1);
    let w1 = Weight::constant(full.clone(), 1.0).unwrap();
    let w2 = Weight::from_fn(full, |p| 1.0 + p.norm()).unwrap();
    weighted_norm(&ext, &w1, 1).unwrap();
    weighted_norm(&ext, &w2, 1).unwrap();
    assert_eq!(op.apply(&u).unwrap().values(), a.values());
}

#[test]
fn mismatched_domain_is_rejected() {
    let (_, w) = disk(1.0 / 16.0);
    let other = Arc::new(shapes::unit_square(1.0 / 16.0).unwrap());
    let op = ExtensionOperator::new(w);
    assert!(op.apply(&GridFunction::zeros(other)).is_err());
}

#[test]
fn boundedness_on_disk() {
    let phi = PhiFunction::variable_exponent(Field::expr("2 + x1 / 4").unwrap());
    let bundle = ConstantBundle::new(0.5, 0.5, 1.0, 1.0, 2.25, 1.5, 0.5, 2).unwrap();
    let corpus = default_corpus();
    let report = boundedness_experiment(
        &corpus[..4],
        &|h| shapes::unit_disk(h),
        &phi,
        &bundle,
        &[1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0],
        &quick(),
    )
    .unwrap();
    assert!(report.restriction_exact);
    assert!(report.linearity_error <= 1e-12);
    assert!(report.pass, "{:?}", report.max_ratio);
}
