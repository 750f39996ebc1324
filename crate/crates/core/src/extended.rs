//! Non-negative extended reals, `[0, +inf]`.

use std::cmp::Ordering;
use std::ops::Add;

use serde::{Serialize, Serializer};

use crate::scalar::Real;

/// A value in `[0, +inf]` with an explicit infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Extended<T> {
    pub fn zero() -> Self {
        Extended::Finite(T::zero())
    }

    /// Maps an IEEE infinity (or NaN from `inf - inf`) to `Infinite`.
    pub fn from_real(v: T) -> Self {
        if v.is_finite() {
            Extended::Finite(v)
        } else {
            Extended::Infinite
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    /// IEEE view: `Infinite` becomes `T::infinity()`.
    pub fn to_real(&self) -> T {
        match *self {
            Extended::Finite(v) => v,
            Extended::Infinite => T::infinity(),
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// `self >= tau` with infinity counting as reaching every level.
    pub fn reaches(&self, tau: T) -> bool {
        match *self {
            Extended::Finite(v) => v >= tau,
            Extended::Infinite => true,
        }
    }

    pub fn scale(self, c: T) -> Self {
        match self {
            Extended::Finite(v) => Extended::from_real(v * c),
            Extended::Infinite if c == T::zero() => Extended::zero(),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

impl<T: Real> Add for Extended<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::from_real(a + b),
            _ => Extended::Infinite,
        }
    }
}

impl<T: Real> PartialOrd for Extended<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b)?,
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
        })
    }
}

impl<T: Real> Serialize for Extended<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => v.serialize(s),
            Extended::Infinite => s.serialize_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs() {
        let a = Extended::Finite(2.0f64);
        let inf = Extended::<f64>::Infinite;
        assert_eq!(a + inf, inf);
        assert_eq!(inf + a, inf);
        assert_eq!(a.max(inf), inf);
        assert_eq!(inf.max(a), inf);
        assert_eq!(a + a, Extended::Finite(4.0));
        assert!(a < inf);
        assert!(inf.reaches(1e300));
        assert!(!a.reaches(3.0));
        assert_eq!(Extended::from_real(f64::INFINITY), inf);
    }

    #[test]
    fn serializes_infinity_as_string() {
        let v = serde_json::to_string(&Extended::<f64>::Infinite).unwrap();
        assert_eq!(v, "\"inf\"");
        let w = serde_json::to_string(&Extended::Finite(1.5f64)).unwrap();
        assert_eq!(w, "1.5");
    }
}
