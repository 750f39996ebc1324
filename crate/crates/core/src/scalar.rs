//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Relative tolerance used when the caller does not supply one.
    fn default_tol() -> Self;

    /// Lossy conversion from `f64`, used for literals and sampled values.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    fn default_tol() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn default_tol() -> Self {
        1e-10
    }
}

/// Neumaier-compensated accumulator. Summation order is the iteration
/// order, so results are reproducible.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp = self.comp + ((self.sum - t) + v);
        } else {
            self.comp = self.comp + ((v - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(it: I) -> T {
    let mut acc = CompensatedSum::new();
    for v in it {
        acc.add(v);
    }
    acc.value()
}

/// Lebesgue measure of the unit ball in `n` dimensions.
pub fn unit_ball_measure<T: Real>(n: usize) -> T {
    let nf = n as f64;
    let v = std::f64::consts::PI.powf(nf / 2.0) / gamma_half_int(n + 2);
    T::lit(v)
}

/// Gamma(k/2) for a positive integer k.
fn gamma_half_int(k: usize) -> f64 {
    debug_assert!(k >= 1);
    if k % 2 == 0 {
        (1..k / 2).map(|i| i as f64).product()
    } else {
        // Gamma(1/2) = sqrt(pi), Gamma(m + 1/2) = (m - 1/2) Gamma(m - 1/2)
        let mut g = std::f64::consts::PI.sqrt();
        let mut x = 0.5;
        while x + 1e-9 < k as f64 / 2.0 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// `n` logarithmically spaced values from `lo` to `hi`, both included.
pub fn log_space<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(lo > T::zero() && hi >= lo);
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / T::lit((n - 1) as f64);
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + step * T::lit(i as f64)).exp()
            }
        })
        .collect()
}

/// Largest representable value strictly below one.
pub fn one_minus<T: Real>() -> T {
    T::one() - T::epsilon() / T::lit(2.0)
}

/// C1 smoothstep on [0,1]: s^2 (3 - 2 s), clamped outside.
#[inline]
pub fn smoothstep<T: Real>(s: T) -> T {
    if s <= T::zero() {
        T::zero()
    } else if s >= T::one() {
        T::one()
    } else {
        s * s * (T::lit(3.0) - T::lit(2.0) * s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_ball_measures() {
        assert!((unit_ball_measure::<f64>(1) - 2.0).abs() < 1e-14);
        assert!((unit_ball_measure::<f64>(2) - std::f64::consts::PI).abs() < 1e-14);
        let w3 = 4.0 / 3.0 * std::f64::consts::PI;
        assert!((unit_ball_measure::<f64>(3) - w3).abs() < 1e-13);
        let w4 = std::f64::consts::PI.powi(2) / 2.0;
        assert!((unit_ball_measure::<f64>(4) - w4).abs() < 1e-13);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let vals: Vec<f64> = std::iter::once(1.0)
            .chain(std::iter::repeat(1e-16).take(10_000))
            .collect();
        let s = compensated_sum(vals.iter().copied());
        assert!((s - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn log_space_endpoints() {
        let v = log_space(1.0f64, 1e6, 7);
        assert_eq!(v.len(), 7);
        assert_eq!(v[0], 1.0);
        assert_eq!(v[6], 1e6);
        assert!((v[3] - 1e3).abs() < 1e-9);
        let w = log_space(1.0f32, 100.0, 3);
        assert!((w[1] - 10.0).abs() < 1e-4);
    }
}
