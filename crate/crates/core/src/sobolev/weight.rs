use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::domain::RasterDomain;
use crate::error::{input_err, Result};
use crate::geometry::Point;
use crate::phi::{GridFunction, MultiIndex};
use crate::report::{Condition, ConditionReport, ReportBuilder, Witness};
use crate::scalar::{compensated_sum, Real};

/// Positive per-cell weight on the cells of a grid (inside or not).
#[derive(Clone, Debug)]
pub struct Weight<T> {
    grid: Arc<RasterDomain<T>>,
    values: Vec<T>,
}

impl<T: Real> Weight<T> {
    pub fn new(grid: Arc<RasterDomain<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return input_err(format!("weight has {} values, grid has {} cells", values.len(), grid.len()));
        }
        if let Some(k) = values.iter().position(|&w| !(w > T::zero()) || !w.is_finite()) {
            return input_err(format!("weight must be positive and finite, got {} at cell {k}", values[k]));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Arc<RasterDomain<T>>, c: T) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![c; n])
    }

    /// Samples `f` at every cell centre of `grid`.
    pub fn from_fn(grid: Arc<RasterDomain<T>>, f: impl Fn(Point<T>) -> T) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(grid.center_k(k))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<RasterDomain<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    fn matches(&self, d: &RasterDomain<T>) -> bool {
        let g = &self.grid;
        g.nx() == d.nx() && g.ny() == d.ny() && g.h() == d.h() && g.origin() == d.origin()
    }
}

/// `sum_{|alpha| <= k} int_Omega |d_alpha u| w dx` over the inside cells of
/// `u`'s grid. The derivative slots must be present.
pub fn weighted_norm<T: Real>(u: &GridFunction<T>, w: &Weight<T>, k: u32) -> Result<T> {
    let d = u.domain();
    if !w.matches(d) {
        return input_err("weight and function live on different grids");
    }
    let mut total = T::zero();
    for alpha in MultiIndex::up_to(2, k) {
        let Some(v) = u.derivative(&alpha) else {
            return input_err(format!("derivative {alpha} is missing"));
        };
        total = total + compensated_sum(d.inside_cells().map(|c| v[c].abs() * w.values[c])) * d.cell_area();
    }
    Ok(total)
}

/// `g = sum_{|alpha| <= k} |d_alpha u|` on `Omega`, zero elsewhere, as a
/// function on the full grid of `u`'s raster.
pub fn g_reduction<T: Real>(u: &GridFunction<T>, k: u32) -> Result<GridFunction<T>> {
    let d = u.domain();
    let slots = MultiIndex::up_to(2, k)
        .into_iter()
        .map(|a| match u.derivative(&a) {
            Some(v) => Ok(v),
            None => input_err(format!("derivative {a} is missing")),
        })
        .collect::<Result<Vec<_>>>()?;
    let g = (0..d.len())
        .map(|c| {
            if d.is_inside(c) {
                slots.iter().fold(T::zero(), |s, v| s + v[c].abs())
            } else {
                T::zero()
            }
        })
        .collect();
    let full = Arc::new(RasterDomain::full(d.origin(), d.h(), d.nx(), d.ny())?);
    GridFunction::from_values(full, g)
}

/// `int |g| w dx` over every cell of `g`'s grid.
pub fn weighted_l1<T: Real>(g: &GridFunction<T>, w: &Weight<T>) -> Result<T> {
    let d = g.domain();
    if !w.matches(d) {
        return input_err("weight and function live on different grids");
    }
    Ok(compensated_sum(d.inside_cells().map(|c| g.values()[c].abs() * w.values[c])) * d.cell_area())
}

/// Axis-aligned square of `side x side` cells with lower-left cell `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CubeSample {
    pub i: usize,
    pub j: usize,
    pub side: usize,
}

/// Random squares inside the weight's grid, sides log-uniform in cells.
pub fn sample_cubes<T: Real>(grid: &RasterDomain<T>, n: usize, rng: &mut impl Rng) -> Vec<CubeSample> {
    let max = grid.nx().min(grid.ny());
    (0..n)
        .map(|_| {
            let side = ((rng.gen::<f64>() * (max as f64).ln()).exp().floor() as usize).clamp(1, max);
            CubeSample {
                i: rng.gen_range(0..=grid.nx() - side),
                j: rng.gen_range(0..=grid.ny() - side),
                side,
            }
        })
        .collect()
}

/// Estimates `[w]_{A1}` as the largest `mean_Q w / min_Q w` over the cubes
/// and checks it against `bound`.
pub fn check_a1_weight<T: Real>(w: &Weight<T>, cubes: &[CubeSample], bound: T) -> Result<ConditionReport<T>> {
    let g = w.grid();
    let mut b = ReportBuilder::new(Condition::MuckenhouptA1, bound).param("cubes", cubes.len() as f64);
    for c in cubes {
        if c.side == 0 || c.i + c.side > g.nx() || c.j + c.side > g.ny() {
            return input_err(format!("cube {c:?} leaves the grid"));
        }
        let vals = (c.j..c.j + c.side).flat_map(|j| (c.i..c.i + c.side).map(move |i| (i, j)));
        let mut min = T::infinity();
        let sum = compensated_sum(vals.map(|(i, j)| {
            let v = w.values[g.idx(i, j)];
            min = min.min(v);
            v
        }));
        let mean = sum / T::lit((c.side * c.side) as f64);
        let ratio = mean / min;
        b.samples.evaluations += c.side * c.side;
        b.constant(ratio);
        if ratio > bound * (T::one() + T::lit(1e-12)) {
            let h = g.h();
            let o = g.origin();
            let half = T::lit(c.side as f64 / 2.0);
            b.fail(Witness {
                x: Point(o.0 + h * (T::lit(c.i as f64) + half), o.1 + h * (T::lit(c.j as f64) + half)),
                y: None,
                t: Some(h * T::lit(c.side as f64)),
                s: None,
                lhs: mean,
                rhs: bound * min,
            });
        }
    }
    Ok(b.finish())
}
