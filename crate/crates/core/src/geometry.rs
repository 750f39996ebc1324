//! Planar points.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// A point of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point<T>(pub T, pub T);

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point(x, y)
    }

    pub fn from_f64(x: f64, y: f64) -> Self {
        Point(T::lit(x), T::lit(y))
    }

    #[inline]
    pub fn dist(&self, other: &Self) -> T {
        (self.0 - other.0).hypot(self.1 - other.1)
    }

    #[inline]
    pub fn dist2(&self, other: &Self) -> T {
        let (dx, dy) = (self.0 - other.0, self.1 - other.1);
        dx * dx + dy * dy
    }

    pub fn norm(&self) -> T {
        self.0.hypot(self.1)
    }

    pub fn lerp(&self, other: &Self, s: T) -> Self {
        Point(
            self.0 + (other.0 - self.0) * s,
            self.1 + (other.1 - self.1) * s,
        )
    }

    /// Lexicographic comparison used for deterministic tie-breaking.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .partial_cmp(&other.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                self.1
                    .partial_cmp(&other.1)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.0.as_f64(), self.1.as_f64())
    }
}

impl<T: Real> Add for Point<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point(self.0 + o.0, self.1 + o.1)
    }
}

impl<T: Real> Sub for Point<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point(self.0 - o.0, self.1 - o.1)
    }
}

impl<T: Real> Mul<T> for Point<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Point(self.0 * s, self.1 * s)
    }
}
