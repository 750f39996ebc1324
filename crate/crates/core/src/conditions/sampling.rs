use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::Serialize;

use crate::domain::RasterDomain;
use crate::geometry::Point;
use crate::scalar::{log_space, unit_ball_measure, Real};

/// Default number of `t` values per check.
pub const DEFAULT_T_POINTS: usize = 64;
/// Default number of random balls for (A1).
pub const DEFAULT_BALLS: usize = 256;
/// Cap on the cell centres kept inside one ball.
pub const MAX_BALL_POINTS: usize = 1024;

/// A ball `B` together with the inside cell centres of `B`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallSample<T> {
    pub center: Point<T>,
    pub radius: T,
    pub points: Vec<Point<T>>,
}

impl<T: Real> BallSample<T> {
    /// Collects every inside cell centre of `domain` in the open ball.
    pub fn new(domain: &RasterDomain<T>, center: Point<T>, radius: T) -> Self {
        let h = domain.h();
        let o = domain.origin();
        let span = |c: T, o: T, n: usize| {
            let lo = ((c - radius - o) / h).floor().max(T::zero()).to_usize().unwrap_or(0);
            let hi = ((c + radius - o) / h).ceil().to_usize().unwrap_or(0).min(n);
            lo..hi
        };
        let mut points = Vec::new();
        for j in span(center.1, o.1, domain.ny()) {
            for i in span(center.0, o.0, domain.nx()) {
                let k = domain.idx(i, j);
                let p = domain.center_k(k);
                if domain.is_inside(k) && p.dist(&center) < radius {
                    points.push(p);
                }
            }
        }
        Self { center, radius, points }
    }

    /// `|B|` in the plane.
    pub fn measure(&self) -> T {
        T::PI() * self.radius * self.radius
    }

    /// Log-spaced `t` in `[1, 1/|B|]`.
    pub fn t_grid(&self, n: usize) -> Vec<T> {
        let top = self.measure().recip().max(T::one());
        log_space(T::one(), top, if top > T::one() { n } else { 1 })
    }

    /// Ordered pairs of distinct points of the ball.
    pub fn pairs(&self) -> Vec<(Point<T>, Point<T>)> {
        let mut out = Vec::with_capacity(self.points.len() * self.points.len());
        for (a, &x) in self.points.iter().enumerate() {
            for (b, &y) in self.points.iter().enumerate() {
                if a != b {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

/// Random balls with `|B| <= 1`: centres uniform over the inside cells,
/// radii log-uniform in `[h, omega_2^{-1/2}]`. Balls holding more than
/// `max_points` cell centres are thinned to a random subset.
pub fn sample_balls<T: Real>(
    domain: &RasterDomain<T>,
    n: usize,
    max_points: usize,
    rng: &mut impl Rng,
) -> Vec<BallSample<T>> {
    let cells: Vec<usize> = domain.inside_cells().collect();
    if cells.is_empty() {
        return Vec::new();
    }
    let h = domain.h().as_f64();
    let r_max = unit_ball_measure::<f64>(2).powf(-0.5);
    let (lo, hi) = (h.min(r_max).ln(), r_max.ln());
    (0..n)
        .map(|_| {
            let c = domain.center_k(cells[rng.gen_range(0..cells.len())]);
            let (dx, dy) = (rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let center = Point(c.0 + T::lit(dx * h), c.1 + T::lit(dy * h));
            // keep |B| <= 1 after rounding
            let radius = T::lit(rng.gen_range(lo..=hi).exp()).min(T::lit(r_max * (1.0 - 1e-12)));
            let mut b = BallSample::new(domain, center, radius);
            if b.points.len() > max_points {
                let mut keep = sample_indices(rng, b.points.len(), max_points).into_vec();
                keep.sort_unstable();
                b.points = keep.into_iter().map(|i| b.points[i]).collect();
            }
            b
        })
        .collect()
}

/// `n` distinct inside cell centres chosen at random (all of them when
/// `n` exceeds the count), in grid order.
pub fn sample_points<T: Real>(domain: &RasterDomain<T>, n: usize, rng: &mut impl Rng) -> Vec<Point<T>> {
    let cells: Vec<usize> = domain.inside_cells().collect();
    if n >= cells.len() {
        return cells.into_iter().map(|k| domain.center_k(k)).collect();
    }
    let mut keep = sample_indices(rng, cells.len(), n).into_vec();
    keep.sort_unstable();
    keep.into_iter().map(|i| domain.center_k(cells[i])).collect()
}

/// Log-spaced `t` values in `[1, t_max]`.
pub fn t_grid<T: Real>(t_max: T, n: usize) -> Vec<T> {
    if t_max <= T::one() {
        return vec![T::one()];
    }
    log_space(T::one(), t_max, n.max(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::shapes;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn balls_have_unit_measure_at_most() {
        let d = shapes::l_shape(1.0f64 / 32.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let balls = sample_balls(&d, 200, 64, &mut rng);
        assert_eq!(balls.len(), 200);
        for b in &balls {
            assert!(b.measure() <= 1.0);
            assert!(b.radius >= d.h() * 0.999);
            assert!(!b.points.is_empty() && b.points.len() <= 64);
            assert!(b.points.iter().all(|p| d.contains(*p) && p.dist(&b.center) < b.radius));
            let ts = b.t_grid(8);
            assert_eq!(ts[0], 1.0);
            assert!((ts[ts.len() - 1] - 1.0 / b.measure()).abs() < 1e-9 / b.measure() || ts.len() == 1);
        }
    }

    #[test]
    fn ball_collects_all_cells() {
        let d = shapes::unit_square(0.1f64).unwrap();
        let b = BallSample::new(&d, Point(0.5, 0.5), 0.15);
        let want = d.inside_cells().map(|k| d.center_k(k)).filter(|p| p.dist(&Point(0.5, 0.5)) < 0.15).count();
        assert_eq!(b.points.len(), want);
        assert_eq!(b.pairs().len(), want * (want - 1));
    }

    #[test]
    fn points_are_distinct_and_inside() {
        let d = shapes::unit_disk(0.1f64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = sample_points(&d, 50, &mut rng);
        assert_eq!(p.len(), 50);
        assert!(p.windows(2).all(|w| w[0] != w[1]));
        assert_eq!(sample_points(&d, 100_000, &mut rng).len(), d.inside_count());
    }
}
