//! Dense (A1) scan of the dumbbell growth function along the right tower.
//!
//! Two points of a ball with `|B| <= 1` can be `2/sqrt(pi)` apart
//! vertically, so a ball straddling `y = 1` sees `phi^{-1}` ranging over
//! `[t, (1 + 2/sqrt(pi)) t]`: the sharp constant is `1/(1 + 2/sqrt(pi))`,
//! slightly below 1/2.

use orlicz_ext::conditions::{check_a1, BallSample};
use orlicz_ext::domain::shapes;
use orlicz_ext::{PhiFunction, Point};

#[test]
fn sharp_a1_constant_is_below_one_half() {
    let h = 0.01;
    let d = shapes::dumbbell(h, 4.0).unwrap();
    let phi = PhiFunction::example_dumbbell();
    let r = std::f64::consts::PI.powf(-0.5) * (1.0 - 1e-12);
    let balls: Vec<BallSample<f64>> = (0..=200)
        .map(|i| BallSample::new(&d, Point(2.0, 1.3 + i as f64 * 0.0025), r))
        .collect();
    let want = 1.0 / (1.0 + 2.0 * r);
    let scan = check_a1(&phi, &balls, 4, 0.5).unwrap();
    assert!(!scan.verdict);
    assert!((scan.best_constant - want).abs() < 2.0 * h, "{} vs {want}", scan.best_constant);
    assert!(check_a1(&phi, &balls, 4, want - 2.0 * h).unwrap().verdict);
}
