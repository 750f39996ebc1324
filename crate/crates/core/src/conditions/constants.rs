//! Explicit constants relating (A1) and (A1)_Omega.

use serde::Serialize;

use crate::domain::Curve;
use crate::error::{input_err, Result};
use crate::geometry::Point;
use crate::scalar::{one_minus, unit_ball_measure, Real};

/// Structural constants of a growth function on a quasi-convex domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstantBundle<T> {
    /// (A0) constant.
    pub beta0: T,
    /// (A1) constant.
    pub beta1: T,
    /// Constant of the almost monotonicity of `phi^{-1}` (see
    /// [`inverse_growth_constant`](super::inverse_growth_constant)).
    #[serde(rename = "L")]
    pub l: T,
    /// (aDec)_q constant.
    #[serde(rename = "Lq")]
    pub lq: T,
    pub q: T,
    /// Quasi-convexity constant.
    #[serde(rename = "K")]
    pub k: T,
    pub delta: T,
    pub n: usize,
    pub omega_n: T,
}

impl<T: Real> ConstantBundle<T> {
    /// Builds and validates a bundle; `omega_n` is computed from `n`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(beta0: T, beta1: T, l: T, lq: T, q: T, k: T, delta: T, n: usize) -> Result<Self> {
        let b = Self {
            beta0,
            beta1,
            l,
            lq,
            q,
            k,
            delta,
            n,
            omega_n: unit_ball_measure(n.max(1)),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: T| v > T::zero() && v < T::one();
        if !unit(self.beta0) || !unit(self.beta1) {
            return input_err(format!(
                "beta0 and beta1 must lie in (0,1), got {} and {}",
                self.beta0, self.beta1
            ));
        }
        for (name, v) in [("L", self.l), ("Lq", self.lq), ("K", self.k), ("q", self.q)] {
            if !(v >= T::one()) || !v.is_finite() {
                return input_err(format!("{name} must be a finite number >= 1, got {v}"));
            }
        }
        if !(self.delta > T::zero()) || !self.delta.is_finite() {
            return input_err(format!("delta must be positive, got {}", self.delta));
        }
        if self.n == 0 {
            return input_err("dimension must be at least 1");
        }
        let w: T = unit_ball_measure(self.n);
        if (self.omega_n - w).abs() > T::lit(1e-6) * w {
            return input_err("omega_n does not match the dimension");
        }
        Ok(())
    }

    /// `M = max{K, 1/omega_n}`.
    pub fn m(&self) -> T {
        self.k.max(self.omega_n.recip())
    }
}

/// (A1) constant implied by (A1)_Omega with constant `beta`:
/// `beta^{2 omega_n^{-1/n} + 1}`.
pub fn a1omega_to_a1_constant<T: Real>(beta: T, n: usize) -> Result<T> {
    if !(beta > T::zero() && beta < T::one()) {
        return input_err(format!("beta must lie in (0,1), got {beta}"));
    }
    if n == 0 {
        return input_err("dimension must be at least 1");
    }
    let w: T = unit_ball_measure(n);
    let e = T::lit(2.0) * w.powf(-T::one() / T::lit(n as f64)) + T::one();
    Ok(beta.powf(e))
}

/// `m = min_{t > 1} (delta t^{1/n} + 1) / ln t`, by golden-section search
/// in `u = ln t`. The objective is unimodal in `u` with infinite limits at
/// both ends; the upper end is pushed out while the minimum sits on it.
pub fn chain_minimum<T: Real>(delta: T, n: usize) -> T {
    let d = delta.as_f64();
    let nf = n as f64;
    let f = |u: f64| (d * (u / nf).exp() + 1.0) / u;
    let lo = (1.0f64 + 1e-9).ln();
    let mut hi = 1e12f64.ln();
    // endpoint-growth guard: the minimiser lies where the derivative
    // d e^{u/n} (u/n - 1) - 1 changes sign
    while d * (hi / nf).exp() * (hi / nf - 1.0) - 1.0 < 0.0 && hi < 1e6 {
        hi *= 2.0;
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    while (b - a) > 1e-12 * (1.0 + a.abs() + b.abs()) {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = f(e);
        }
    }
    T::lit(f(0.5 * (a + b)).min(fc).min(fe))
}

/// The constant `beta'` such that `beta^{delta t^{1/n} + 1} C^2 t < t^{1/q}`
/// for all `t > 1 / beta0` and `beta in (0, beta')`.
///
/// Returns `exp(A / m)` with `A = (1 - q)/q - 2 ln C / ln(1/beta0)` and `m`
/// from [`chain_minimum`]. When `C = q = 1` every `beta < 1` works and the
/// largest value below one is returned.
pub fn compute_beta_prime<T: Real>(delta: T, c: T, q: T, beta0: T, n: usize) -> Result<T> {
    if !(delta > T::zero()) || !delta.is_finite() {
        return input_err(format!("delta must be positive, got {delta}"));
    }
    if !(c >= T::one()) || !c.is_finite() || !(q >= T::one()) || !q.is_finite() {
        return input_err(format!("C and q must be finite and >= 1, got C = {c}, q = {q}"));
    }
    if !(beta0 > T::zero() && beta0 < T::one()) {
        return input_err(format!("beta0 must lie in (0,1), got {beta0}"));
    }
    if n == 0 {
        return input_err("dimension must be at least 1");
    }
    let (cf, qf, b0) = (c.as_f64(), q.as_f64(), beta0.as_f64());
    let a = (1.0 - qf) / qf - 2.0 * cf.ln() / (1.0 / b0).ln();
    if a == 0.0 {
        return Ok(one_minus());
    }
    let m = chain_minimum(delta, n).as_f64();
    let bp = T::lit((a / m).exp());
    Ok(bp.max(T::min_positive_value()).min(one_minus()))
}

/// An (A1)_Omega constant obtained from (A0), (A1) and the growth bound:
/// half of `min{beta1^{2 M omega_n^{1/n}}, beta0^3 / L, beta'}` with
/// `beta'` computed for `C = L / beta0`.
pub fn a1_to_a1omega_constant<T: Real>(b: &ConstantBundle<T>) -> Result<T> {
    b.validate()?;
    let nf = T::lit(b.n as f64);
    let chain = b.beta1.powf(T::lit(2.0) * b.m() * b.omega_n.powf(nf.recip()));
    let near = b.beta0.powi(3) / b.l;
    let far = compute_beta_prime(b.delta, b.l / b.beta0, b.q, b.beta0, b.n)?;
    let beta = T::lit(0.5) * chain.min(near).min(far);
    if !(beta > T::zero()) {
        return input_err("the constants underflow to zero");
    }
    Ok(beta)
}

/// Points `x_0, ..., x_N` spaced `l(gamma)/N` apart along `curve`, with `N`
/// the integer in `(M|x-y|/r, M|x-y|/r + 1]` and `r = (omega_n t)^{-1/n}`.
/// Consecutive points are at most `r` apart when `l(gamma) <= K |x - y|`.
pub fn chain_points<T: Real>(curve: &Curve<T>, t: T, bundle: &ConstantBundle<T>) -> Result<Vec<Point<T>>> {
    if !(t >= T::one()) {
        return input_err(format!("t must be >= 1, got {t}"));
    }
    let (x, y) = (curve.start(), curve.end());
    let len = curve.length();
    if len == T::zero() {
        return Ok(vec![x, y]);
    }
    let r = (bundle.omega_n * t).powf(-T::one() / T::lit(bundle.n as f64));
    let ratio = (bundle.m() * x.dist(&y) / r).as_f64();
    if !ratio.is_finite() || ratio > 1e9 {
        return input_err("too many chain points");
    }
    let n = ratio.floor() as usize + 1;
    let step = len / T::lit(n as f64);
    let mut pts: Vec<Point<T>> = (0..n).map(|i| curve.point_at(step * T::lit(i as f64))).collect();
    pts.push(y);
    Ok(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle() -> ConstantBundle<f64> {
        ConstantBundle::new(0.5, 0.6, 2.0, 1.5, 2.0, 1.2, 0.5, 2).unwrap()
    }

    #[test]
    fn a1_constant_from_a1omega() {
        // 0.5^{2/sqrt(pi) + 1}, evaluated independently
        let e = 2.0 / std::f64::consts::PI.sqrt() + 1.0;
        let want = (e * 0.5f64.ln()).exp();
        let got = a1omega_to_a1_constant(0.5f64, 2).unwrap();
        assert!((got - want).abs() < 1e-15);
        assert!((got - 0.2288).abs() < 5e-4);
        assert!(a1omega_to_a1_constant(0.999999f64, 2).unwrap() > 0.9999);
        for b in [0.1, 0.3, 0.7, 0.9] {
            assert!(a1omega_to_a1_constant(b, 3).unwrap() < b);
        }
        assert!(a1omega_to_a1_constant(1.0f64, 2).is_err());
        assert!(a1omega_to_a1_constant(0.0f64, 2).is_err());
    }

    #[test]
    fn chain_minimum_against_scan() {
        for (d, n) in [(0.1, 1), (1.0, 2), (10.0, 3), (0.1, 3)] {
            let m = chain_minimum(d, n);
            let scan = (1..200_000)
                .map(|i| {
                    let u = i as f64 * 1e-4;
                    (d * (u / n as f64).exp() + 1.0) / u
                })
                .fold(f64::INFINITY, f64::min);
            assert!(m <= scan + 1e-9 && m > scan - 1e-6, "{d} {n}: {m} vs {scan}");
        }
    }

    #[test]
    fn beta_prime_bounds() {
        assert_eq!(compute_beta_prime(1.0, 1.0, 1.0, 0.5, 2).unwrap(), one_minus::<f64>());
        let mut last = 1.0;
        for c in [1.0, 2.0, 10.0, 100.0] {
            let b = compute_beta_prime(1.0, c, 2.0, 0.5, 2).unwrap();
            assert!(b > 0.0 && b < 1.0 && b < last);
            last = b;
        }
        assert!(compute_beta_prime(0.0, 2.0, 2.0, 0.5, 2).is_err());
        assert!(compute_beta_prime(1.0, 0.5, 2.0, 0.5, 2).is_err());
        assert!(compute_beta_prime(1.0, 2.0, 2.0, 1.0, 2).is_err());
    }

    #[test]
    fn beta_prime_inequality_holds() {
        let bp = compute_beta_prime(1.0, 3.0, 2.0, 0.5, 2).unwrap();
        let beta: f64 = bp * 0.999;
        for i in 0..2000 {
            let t = 2.0 * 10f64.powf(i as f64 * 9.0 / 2000.0) * (1.0 + 1e-12);
            let lhs = (t.sqrt() + 1.0) * beta.ln() + 2.0 * 3f64.ln() + t.ln();
            assert!(lhs < t.ln() / 2.0, "t = {t}");
        }
    }

    #[test]
    fn a1omega_constant_is_in_unit_interval() {
        let b = bundle();
        let beta = a1_to_a1omega_constant(&b).unwrap();
        assert!(beta > 0.0 && beta < 0.5 * b.beta0.powi(3) / b.l + 1e-300);
        let mut bad = b;
        bad.k = 0.5;
        assert!(a1_to_a1omega_constant(&bad).is_err());
    }

    #[test]
    fn chain_spacing() {
        let b = bundle();
        let c = Curve::new(vec![Point(0.0, 0.0), Point(0.3, 0.0), Point(0.3, 0.3)]);
        for t in [1.0, 10.0, 1e4] {
            let pts = chain_points(&c, t, &b).unwrap();
            let r = (b.omega_n * t).powf(-0.5);
            let d = 0.3 * 2f64.sqrt();
            let ratio = b.m() * d / r;
            let n = pts.len() - 1;
            assert!((n as f64) > ratio && (n as f64) <= ratio + 1.0);
            assert!(pts.windows(2).all(|w| w[0].dist(&w[1]) <= c.length() / n as f64 + 1e-12));
            assert_eq!(pts[0], c.start());
            assert_eq!(*pts.last().unwrap(), c.end());
        }
        let still = Curve::new(vec![Point(1.0, 1.0)]);
        assert_eq!(chain_points(&still, 2.0, &b).unwrap().len(), 2);
    }
}
