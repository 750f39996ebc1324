use rand::Rng;
use rayon::prelude::*;

use crate::geometry::Point;
use crate::report::{Condition, ConditionReport, ReportBuilder, Witness};
use crate::scalar::Real;

use super::edt::boundary_distance;
use super::{endpoint_cells, grid_astar, intrinsic_path, pull_string, Curve, RasterDomain};

/// Random pairs of inside cell centres with `0 < |x - y| < delta`.
///
/// `x` is uniform over inside cells and `y` uniform in the disc of radius
/// `min(delta, diam)` around it, rejected until it lands inside. Pairs that
/// cannot be completed after a few tries are dropped, so fewer than `n`
/// pairs may come back for very thin domains.
pub fn sample_pairs<T: Real>(
    domain: &RasterDomain<T>,
    delta: T,
    n: usize,
    rng: &mut impl Rng,
) -> Vec<(Point<T>, Point<T>)> {
    let cells: Vec<usize> = domain.inside_cells().collect();
    let r = delta.min(domain.diameter() + domain.h()).as_f64();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let x = domain.center_k(cells[rng.gen_range(0..cells.len())]);
        for _ in 0..64 {
            let rho = r * rng.gen::<f64>().sqrt();
            let th = rng.gen::<f64>() * std::f64::consts::TAU;
            let p = Point(x.0 + T::lit(rho * th.cos()), x.1 + T::lit(rho * th.sin()));
            let Some(k) = domain.cell_of(p).filter(|&k| domain.is_inside(k)) else {
                continue;
            };
            let y = domain.center_k(k);
            let d = x.dist(&y);
            if d > T::zero() && d < delta {
                out.push((x, y));
                break;
            }
        }
    }
    out
}

/// Checks `l(gamma) <= K |x - y|` for the sampled pairs with `|x - y| < delta`,
/// using the intrinsic path as `gamma`. Endpoints are snapped to cell
/// centres. Pairs in different components fail with an infinite length.
pub fn check_quasi_convex<T: Real>(
    domain: &RasterDomain<T>,
    k: T,
    delta: T,
    pairs: &[(Point<T>, Point<T>)],
) -> ConditionReport<T> {
    let mut b = ReportBuilder::new(Condition::QuasiConvex, k)
        .param("K", k.as_f64())
        .param("delta", delta.as_f64())
        .param("h", domain.h().as_f64());
    let results: Vec<Option<(Point<T>, Point<T>, T)>> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let (ka, kb) = endpoint_cells(domain, x, y).ok()?;
            let (xs, ys) = (domain.center_k(ka), domain.center_k(kb));
            let d = xs.dist(&ys);
            if !(d < delta) || d == T::zero() {
                return None;
            }
            let len = intrinsic_path(domain, xs, ys)
                .map(|c| c.length())
                .unwrap_or(T::infinity());
            Some((xs, ys, len))
        })
        .collect();
    for (x, y, len) in results.into_iter().flatten() {
        b.samples.pairs += 1;
        let d = x.dist(&y);
        b.constant(len / d);
        if len > k * d * (T::one() + T::lit(1e-9)) {
            b.fail(Witness {
                x,
                y: Some(y),
                t: None,
                s: None,
                lhs: len,
                rhs: k * d,
            });
        }
    }
    b.finish()
}

/// A curve from `x` to `y` (snapped to cell centres) meeting the
/// (ε,δ) length and cigar bounds at grid resolution, if one exists.
///
/// The search is exhaustive over 8-connected grid paths through cells `z`
/// with `dist(z, ∂Ω) > eps |x - z| |y - z| / |x - y|` whose grid length is
/// within the length budget plus the 8-connectivity slack. `None` therefore
/// certifies that no such grid path exists.
pub fn eps_delta_curve<T: Real>(
    domain: &RasterDomain<T>,
    bdist: &[T],
    x: Point<T>,
    y: Point<T>,
    eps: T,
) -> Option<Curve<T>> {
    let (ka, kb) = endpoint_cells(domain, x, y).ok()?;
    let (x, y) = (domain.center_k(ka), domain.center_k(kb));
    let d = x.dist(&y);
    if ka == kb {
        return Some(Curve::new(vec![x]));
    }
    let cigar = |k: usize| {
        let z = domain.center_k(k);
        k == ka || k == kb || bdist[k] > eps * x.dist(&z) * y.dist(&z) / d
    };
    let max_len = d / eps;
    let budget = (max_len / domain.h()).as_f64() * GRID_SLACK;
    let cells = grid_astar(domain, ka, kb, cigar, budget)?;
    let curve = Curve::new(pull_string(domain, &cells, &cigar));
    (curve.length() <= max_len * (T::one() + T::lit(1e-9))).then_some(curve)
}

/// Headroom for the 8-connected metric, which overestimates Euclidean
/// length by at most 8.3 %.
const GRID_SLACK: f64 = 1.1;

/// Checks the (ε,δ) condition on the sampled pairs with `|x - y| < delta`.
///
/// For a failing pair the search is repeated at `eps / 2, eps / 4, ...`
/// (up to eight halvings); `best_constant` is the largest such value at
/// which every pair found a curve.
pub fn check_eps_delta<T: Real>(
    domain: &RasterDomain<T>,
    eps: T,
    delta: T,
    pairs: &[(Point<T>, Point<T>)],
) -> ConditionReport<T> {
    let bdist = boundary_distance(domain);
    let mut b = ReportBuilder::new(Condition::EpsDelta, eps)
        .param("eps", eps.as_f64())
        .param("delta", delta.as_f64())
        .param("h", domain.h().as_f64())
        .param("grid_slack", GRID_SLACK);
    b.constant(eps);
    let results: Vec<Option<(Point<T>, Point<T>, Option<T>, T)>> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let (ka, kb) = endpoint_cells(domain, x, y).ok()?;
            let (xs, ys) = (domain.center_k(ka), domain.center_k(kb));
            let d = xs.dist(&ys);
            if !(d < delta) || d == T::zero() {
                return None;
            }
            if let Some(c) = eps_delta_curve(domain, &bdist, xs, ys, eps) {
                return Some((xs, ys, Some(c.length()), eps));
            }
            let mut e = eps;
            for _ in 0..8 {
                e = e * T::lit(0.5);
                if eps_delta_curve(domain, &bdist, xs, ys, e).is_some() {
                    return Some((xs, ys, None, e));
                }
            }
            Some((xs, ys, None, T::zero()))
        })
        .collect();
    for (x, y, len, e) in results.into_iter().flatten() {
        b.samples.pairs += 1;
        b.constant(e);
        if len.is_none() {
            b.fail(Witness {
                x,
                y: Some(y),
                t: None,
                s: None,
                lhs: T::infinity(),
                rhs: x.dist(&y) / eps,
            });
        }
    }
    b.finish()
}
