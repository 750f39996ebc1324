use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::geometry::Point;
use crate::scalar::Real;

/// Upper end of the geometric bracket search for inverses.
pub const BRACKET_CAP: f64 = 1e18;

/// A growth profile `t -> phi(t)` supplied from outside the built-in
/// families.
pub trait ProfileFn<T: Real>: Send + Sync {
    /// `phi(t)` for `t >= 0`; `+inf` is allowed.
    fn value(&self, t: T) -> T;

    /// `inf { t >= 0 : phi(t) >= tau }`.
    fn inverse(&self, tau: T, tol: T) -> Result<T> {
        bisect_inverse(|t| self.value(t), tau, tol)
    }
}

/// `phi(x, .)` frozen at one point `x`.
#[derive(Clone)]
pub enum Profile<T> {
    /// `t^p`
    Power(T),
    /// `c t`
    Linear(T),
    /// `t^p + a t^q`
    DoublePhase { p: T, q: T, a: T },
    /// Expression in `t` (and possibly `x1, x2`) evaluated at `x`.
    Expr { expr: Arc<Expr>, x: Point<T> },
    /// Piecewise linear through `(0, 0)` and `(ts[i], vs[off + i])`,
    /// continued linearly through the origin past the last node.
    Table {
        ts: Arc<Vec<T>>,
        vs: Arc<Vec<T>>,
        off: usize,
    },
    Custom(Arc<dyn ProfileFn<T>>),
}

impl<T: Real> fmt::Debug for Profile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Power(p) => write!(f, "Power({p})"),
            Profile::Linear(c) => write!(f, "Linear({c})"),
            Profile::DoublePhase { p, q, a } => write!(f, "DoublePhase({p}, {q}, {a})"),
            Profile::Expr { expr, x } => write!(f, "Expr({expr} at {x:?})"),
            Profile::Table { ts, off, .. } => write!(f, "Table({} nodes @{off})", ts.len()),
            Profile::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl<T: Real> Profile<T> {
    /// `phi(t)` with IEEE infinity standing for `+inf`. `t` must be `>= 0`.
    #[inline]
    pub fn value(&self, t: T) -> T {
        match self {
            Profile::Power(p) => t.powf(*p),
            Profile::Linear(c) => *c * t,
            Profile::DoublePhase { p, q, a } => {
                let tp = t.powf(*p);
                if *a == T::zero() {
                    tp
                } else {
                    tp + *a * t.powf(*q)
                }
            }
            Profile::Expr { expr, x } => {
                if t == T::zero() {
                    return T::zero();
                }
                expr.eval(&[x.0, x.1], t)
            }
            Profile::Table { ts, vs, off } => table_value(ts, &vs[*off..*off + ts.len()], t),
            Profile::Custom(c) => c.value(t),
        }
    }

    /// Left-inverse `inf { t >= 0 : phi(t) >= tau }`. Closed forms where
    /// available, otherwise bisection with relative tolerance `tol`.
    pub fn inverse(&self, tau: T, tol: T) -> Result<T> {
        if tau <= T::zero() {
            return Ok(T::zero());
        }
        match self {
            Profile::Power(p) => Ok(tau.powf(p.recip())),
            Profile::Linear(c) => {
                if *c > T::zero() {
                    Ok(tau / *c)
                } else {
                    Err(overflow())
                }
            }
            Profile::DoublePhase { p, q, a } => Ok(double_phase_inverse(*p, *q, *a, tau)),
            Profile::Table { ts, vs, off } => table_inverse(ts, &vs[*off..*off + ts.len()], tau),
            Profile::Custom(c) => c.inverse(tau, tol),
            Profile::Expr { .. } => bisect_inverse(|t| self.value(t), tau, tol),
        }
    }

    /// True for the closed-form families, whose inverse is exact.
    pub fn has_closed_form_inverse(&self) -> bool {
        matches!(
            self,
            Profile::Power(_) | Profile::Linear(_) | Profile::DoublePhase { .. } | Profile::Table { .. }
        )
    }
}

fn overflow() -> Error {
    Error::Overflow {
        what: "left-inverse".into(),
        cap: BRACKET_CAP,
    }
}

fn table_value<T: Real>(ts: &[T], vs: &[T], t: T) -> T {
    let n = ts.len();
    if t >= ts[n - 1] {
        return vs[n - 1] * (t / ts[n - 1]);
    }
    // first node strictly above t
    let i = ts.partition_point(|&s| s <= t);
    let (t0, v0) = if i == 0 { (T::zero(), T::zero()) } else { (ts[i - 1], vs[i - 1]) };
    v0 + (vs[i] - v0) * (t - t0) / (ts[i] - t0)
}

fn table_inverse<T: Real>(ts: &[T], vs: &[T], tau: T) -> Result<T> {
    let n = ts.len();
    if tau > vs[n - 1] {
        if vs[n - 1] <= T::zero() {
            return Err(overflow());
        }
        return Ok(tau * ts[n - 1] / vs[n - 1]);
    }
    // first node whose value reaches tau; the segment before it starts below
    let i = vs.partition_point(|&v| v < tau);
    let (t0, v0) = if i == 0 { (T::zero(), T::zero()) } else { (ts[i - 1], vs[i - 1]) };
    Ok(t0 + (ts[i] - t0) * (tau - v0) / (vs[i] - v0))
}

/// Root of `t^p + a t^q = tau` by Newton from the right; the left side is
/// convex and increasing for `1 <= p <= q`, so the iterates decrease
/// monotonically to the root.
fn double_phase_inverse<T: Real>(p: T, q: T, a: T, tau: T) -> T {
    if a == T::zero() {
        return tau.powf(p.recip());
    }
    let mut t = tau.powf(p.recip()).min((tau / a).powf(q.recip()));
    for _ in 0..100 {
        let f = t.powf(p) + a * t.powf(q) - tau;
        let df = p * t.powf(p - T::one()) + q * a * t.powf(q - T::one());
        if !(f > T::zero()) || !(df > T::zero()) {
            break;
        }
        let next = t - f / df;
        if !(next < t) {
            break;
        }
        t = next.max(T::zero());
        if f / df <= T::epsilon() * t * T::lit(4.0) {
            break;
        }
    }
    t
}

/// Generic left-inverse of a non-decreasing `f`: geometric bracket from
/// `t = 1`, capped at [`BRACKET_CAP`], then bisection on the geometric mean
/// until the bracket is relatively narrower than `tol / 2`. Returns the
/// upper end, so `f(t*) >= tau` and `f(t* (1 - tol)) < tau`.
pub fn bisect_inverse<T: Real>(f: impl Fn(T) -> T, tau: T, tol: T) -> Result<T> {
    if tau <= T::zero() {
        return Ok(T::zero());
    }
    let reach = |t: T| f(t) >= tau;
    let two = T::lit(2.0);
    let (mut lo, mut hi);
    if reach(T::one()) {
        hi = T::one();
        lo = T::lit(0.5);
        while reach(lo) {
            hi = lo;
            lo = lo / two;
            if lo < T::min_positive_value() {
                return Ok(T::zero());
            }
        }
    } else {
        lo = T::one();
        hi = two;
        while !reach(hi) {
            lo = hi;
            hi = hi * two;
            if hi > T::lit(BRACKET_CAP) {
                return Err(overflow());
            }
        }
    }
    let half_tol = tol * T::lit(0.5);
    while hi - lo > half_tol * hi {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) {
            break;
        }
        if reach(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
