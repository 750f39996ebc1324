//! Calibration domains used by tests, the acceptance suite and the CLI.

use crate::error::Result;
use crate::geometry::Point;
use crate::scalar::Real;

use super::RasterDomain;

fn boxed<T: Real>(
    lo: (f64, f64),
    hi: (f64, f64),
    h: T,
    pred: impl Fn(f64, f64) -> bool,
) -> Result<RasterDomain<T>> {
    let hf = h.as_f64();
    let nx = ((hi.0 - lo.0) / hf - 1e-9).ceil().max(1.0) as usize;
    let ny = ((hi.1 - lo.1) / hf - 1e-9).ceil().max(1.0) as usize;
    RasterDomain::from_predicate(Point::from_f64(lo.0, lo.1), h, nx, ny, |c| {
        let (x, y) = c.to_f64();
        pred(x, y)
    })
}

pub fn disk<T: Real>(center: (f64, f64), radius: f64, h: T) -> Result<RasterDomain<T>> {
    boxed(
        (center.0 - radius, center.1 - radius),
        (center.0 + radius, center.1 + radius),
        h,
        |x, y| (x - center.0).hypot(y - center.1) < radius,
    )
}

pub fn unit_disk<T: Real>(h: T) -> Result<RasterDomain<T>> {
    disk((0.0, 0.0), 1.0, h)
}

/// Two unit disks centred at `(-1.5, 0)` and `(1.5, 0)`.
pub fn two_disks<T: Real>(h: T) -> Result<RasterDomain<T>> {
    boxed((-2.5, -1.0), (2.5, 1.0), h, |x, y| {
        (x + 1.5).hypot(y) < 1.0 || (x - 1.5).hypot(y) < 1.0
    })
}

/// The square `(0, side)^2`.
pub fn square<T: Real>(side: f64, h: T) -> Result<RasterDomain<T>> {
    boxed((0.0, 0.0), (side, side), h, |x, y| {
        x > 0.0 && x < side && y > 0.0 && y < side
    })
}

pub fn unit_square<T: Real>(h: T) -> Result<RasterDomain<T>> {
    square(1.0, h)
}

/// `(-1, 1)^2` with the closed upper-right quadrant removed.
pub fn l_shape<T: Real>(h: T) -> Result<RasterDomain<T>> {
    boxed((-1.0, -1.0), (1.0, 1.0), h, |x, y| {
        x.abs() < 1.0 && y.abs() < 1.0 && !(x >= 0.0 && y >= 0.0)
    })
}

/// Membership in the two-towers-and-bridge set: towers `(-3,-1) x (-1,inf)`
/// and `(1,3) x (-1,inf)` joined by `[-1,1] x (-1,0)`.
pub fn dumbbell_contains(x: f64, y: f64) -> bool {
    let u = -3.0 < x && x < -1.0 && y > -1.0;
    let v = 1.0 < x && x < 3.0 && y > -1.0;
    let w = (-1.0..=1.0).contains(&x) && -1.0 < y && y < 0.0;
    u || v || w
}

/// The dumbbell set cut off at height `y_top`.
pub fn dumbbell<T: Real>(h: T, y_top: f64) -> Result<RasterDomain<T>> {
    boxed((-3.0, -1.0), (3.0, y_top), h, |x, y| {
        dumbbell_contains(x, y) && y < y_top
    })
}

/// Outward cusp `{0 < x < 1, |y| < x^2}`. Rows are centred so that one
/// row of cell centres lies on the axis `y = 0`.
pub fn cusp<T: Real>(h: T) -> Result<RasterDomain<T>> {
    cusp_cut(1.0, h)
}

/// The cusp cut off at `x < x_max`, rasterised on `(0, x_max) x (-x_max^2, x_max^2)`.
/// Fine grids near the tip stay small.
pub fn cusp_cut<T: Real>(x_max: f64, h: T) -> Result<RasterDomain<T>> {
    let hf = h.as_f64();
    if !(x_max > 0.0 && x_max <= 1.0) {
        return Err(crate::Error::Input(format!("cusp cut must lie in (0, 1], got {x_max}")));
    }
    let nx = (x_max / hf - 1e-9).ceil() as usize;
    let half = (x_max * x_max / hf - 1e-9).ceil() as usize;
    let ny = 2 * half + 1;
    let oy = -(ny as f64) * hf / 2.0;
    RasterDomain::from_predicate(Point::from_f64(0.0, oy), h, nx, ny, |c| {
        let (x, y) = c.to_f64();
        x > 0.0 && x < x_max && y.abs() < x * x
    })
}

/// A wide slab `(-2, 2) x (-1, 0)`; away from its ends the top edge
/// behaves like the boundary of a half-plane.
pub fn strip<T: Real>(h: T) -> Result<RasterDomain<T>> {
    boxed((-2.0, -1.0), (2.0, 0.0), h, |x, y| {
        x.abs() < 2.0 && y > -1.0 && y < 0.0
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_have_expected_areas() {
        let h = 1.0 / 64.0;
        let area = |d: &RasterDomain<f64>| d.inside_count() as f64 * h * h;
        assert!((area(&unit_disk(h).unwrap()) - std::f64::consts::PI).abs() < 0.02);
        assert!((area(&unit_square(h).unwrap()) - 1.0).abs() < 1e-12);
        assert!((area(&l_shape(h).unwrap()) - 3.0).abs() < 1e-12);
        assert!((area(&cusp(h).unwrap()) - 2.0 / 3.0).abs() < 0.01);
        assert_eq!(two_disks(h).unwrap().n_components(), 2);
    }

    #[test]
    fn dumbbell_is_connected_and_matches_membership() {
        let d = dumbbell(0.05f64, 12.0).unwrap();
        assert_eq!(d.n_components(), 1);
        assert!(d.contains(Point(-2.0, 10.0)));
        assert!(d.contains(Point(2.0, 10.0)));
        assert!(d.contains(Point(0.0, -0.5)));
        assert!(!d.contains(Point(0.0, 0.5)));
        assert!(dumbbell_contains(2.0, 1e9));
        assert!(!dumbbell_contains(0.0, 0.0));
    }

    #[test]
    fn cusp_axis_row_reaches_tip() {
        let h = 1.0 / 128.0;
        let d = cusp(h).unwrap();
        assert!(d.contains(Point(h / 2.0, 0.0)));
        assert!(!d.contains(Point(0.1, 0.02)));
    }

    #[test]
    fn cut_cusp_agrees_with_the_full_cusp_near_the_tip() {
        let h = 1.0 / 256.0;
        let (full, cut) = (cusp(h).unwrap(), cusp_cut(0.25, h).unwrap());
        assert_eq!(cut.nx(), 64);
        for k in cut.inside_cells() {
            assert!(full.contains(cut.center_k(k)));
        }
        let near = full.inside_cells().filter(|&k| full.center_k(k).0 < 0.25).count();
        assert_eq!(near, cut.inside_count());
        assert!(cusp_cut(0.0, h).is_err());
    }
}
