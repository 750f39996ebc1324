use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::edt::{boundary_distance, distance_to_inside};
use crate::domain::{domain_radius, RasterDomain};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Real;

/// Dyadic square of `side x side` cells with lower-left cell `(i, j)` on the
/// working grid of a [`WhitneyDecomposition`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cube {
    pub i: usize,
    pub j: usize,
    pub side: usize,
}

impl Cube {
    /// Centre in half-cell units, exact.
    fn center2(&self) -> (i64, i64) {
        ((2 * self.i + self.side) as i64, (2 * self.j + self.side) as i64)
    }

    pub fn cells(&self, nx: usize) -> impl Iterator<Item = usize> + '_ {
        (self.j..self.j + self.side).flat_map(move |j| (self.i..self.i + self.side).map(move |i| j * nx + i))
    }
}

/// Whitney cubes of `Omega` and of the outside band, on `Omega` padded by
/// enough cells to hold the band.
#[derive(Clone, Debug)]
pub struct WhitneyDecomposition<T> {
    domain: Arc<RasterDomain<T>>,
    grid: Arc<RasterDomain<T>>,
    pad: usize,
    collar: T,
    pub inside_cubes: Vec<Cube>,
    /// Outside cubes within `2W` of `Omega` (collar plus taper band).
    pub outside_cubes: Vec<Cube>,
    /// `dist(S, boundary)` per outside cube.
    pub outside_dist: Vec<T>,
    /// Inside cube matched to each outside cube.
    pub matching: Vec<usize>,
    /// Distance from each working-grid cell to the boundary.
    pub(crate) cell_dist: Vec<T>,
}

/// `W = min(rad, diam) / 2`.
pub fn default_collar_width<T: Real>(domain: &RasterDomain<T>) -> T {
    domain_radius(domain).min(domain.diameter()) / T::lit(2.0)
}

impl<T: Real> WhitneyDecomposition<T> {
    pub fn domain(&self) -> &Arc<RasterDomain<T>> {
        &self.domain
    }

    /// `Omega` padded by [`Self::pad`] cells on every side.
    pub fn grid(&self) -> &Arc<RasterDomain<T>> {
        &self.grid
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    pub fn collar_width(&self) -> T {
        self.collar
    }

    pub fn side_len(&self, c: &Cube) -> T {
        self.grid.h() * T::lit(c.side as f64)
    }

    pub fn center(&self, c: &Cube) -> Point<T> {
        let o = self.grid.origin();
        let h = self.grid.h();
        let (a, b) = c.center2();
        Point(o.0 + h * T::lit(a as f64 / 2.0), o.1 + h * T::lit(b as f64 / 2.0))
    }

    /// Working-grid index of cell `k` of `Omega`.
    pub fn to_grid(&self, k: usize) -> usize {
        let (i, j) = self.domain.ij(k);
        self.grid.idx(i + self.pad, j + self.pad)
    }

    /// Index in `Omega` of working-grid cell `g`, if it falls on `Omega`'s grid.
    pub fn to_domain(&self, g: usize) -> Option<usize> {
        let (i, j) = self.grid.ij(g);
        let (i, j) = (i.checked_sub(self.pad)?, j.checked_sub(self.pad)?);
        (i < self.domain.nx() && j < self.domain.ny()).then(|| self.domain.idx(i, j))
    }
}

/// Per-level minima of the distance maps over aligned dyadic blocks.
/// Cells of the wrong kind or beyond the grid carry `-inf`.
struct Pyramid {
    size: usize,
    inside: Vec<Vec<f64>>,
    outside: Vec<Vec<f64>>,
    on_grid: Vec<Vec<bool>>,
}

impl Pyramid {
    fn new<T: Real>(grid: &RasterDomain<T>, dist: &[T]) -> Self {
        let size = grid.nx().max(grid.ny()).next_power_of_two();
        let mut inside = vec![f64::NEG_INFINITY; size * size];
        let mut outside = vec![f64::NEG_INFINITY; size * size];
        let mut on_grid = vec![false; size * size];
        for k in 0..grid.len() {
            let (i, j) = grid.ij(k);
            let p = j * size + i;
            on_grid[p] = true;
            if grid.is_inside(k) {
                inside[p] = dist[k].as_f64();
            } else {
                outside[p] = dist[k].as_f64();
            }
        }
        let mut pyr = Self {
            size,
            inside: vec![inside],
            outside: vec![outside],
            on_grid: vec![on_grid],
        };
        let mut n = size;
        while n > 1 {
            let m = n / 2;
            let last = pyr.inside.len() - 1;
            let fold = |v: &[f64]| {
                let mut out = vec![0.0; m * m];
                for b in 0..m {
                    for a in 0..m {
                        let (p, q) = (2 * b * n + 2 * a, (2 * b + 1) * n + 2 * a);
                        out[b * m + a] = v[p].min(v[p + 1]).min(v[q]).min(v[q + 1]);
                    }
                }
                out
            };
            let (ins, outs) = (fold(&pyr.inside[last]), fold(&pyr.outside[last]));
            let g = &pyr.on_grid[last];
            let mut grid_any = vec![false; m * m];
            for b in 0..m {
                for a in 0..m {
                    let (p, q) = (2 * b * n + 2 * a, (2 * b + 1) * n + 2 * a);
                    grid_any[b * m + a] = g[p] || g[p + 1] || g[q] || g[q + 1];
                }
            }
            pyr.inside.push(ins);
            pyr.outside.push(outs);
            pyr.on_grid.push(grid_any);
            n = m;
        }
        pyr
    }

    fn levels(&self) -> usize {
        self.inside.len()
    }

    /// Visits the quadtree top-down; `accept(level, min)` decides whether a
    /// pure block is kept (`Some(true)`), dropped (`Some(false)`) or split.
    fn walk(&self, want_inside: bool, mut accept: impl FnMut(usize, f64) -> Option<bool>) -> Vec<Cube> {
        let top = self.levels() - 1;
        let mut out = Vec::new();
        let mut stack = vec![(top, 0usize, 0usize)];
        while let Some((lv, a, b)) = stack.pop() {
            let m = self.size >> lv;
            let k = b * m + a;
            if !self.on_grid[lv][k] {
                continue;
            }
            let v = if want_inside { self.inside[lv][k] } else { self.outside[lv][k] };
            if v > f64::NEG_INFINITY {
                match accept(lv, v) {
                    Some(true) => {
                        let s = 1 << lv;
                        out.push(Cube { i: a * s, j: b * s, side: s });
                        continue;
                    }
                    Some(false) => continue,
                    None => {}
                }
            } else if lv == 0 {
                continue;
            }
            // children pushed in reverse so cubes come out in z-order
            for (da, db) in [(1, 1), (0, 1), (1, 0), (0, 0)] {
                stack.push((lv - 1, 2 * a + da, 2 * b + db));
            }
        }
        out
    }
}

/// Builds the Whitney cubes of `domain` and of its complement up to
/// distance `2 collar_width`, and matches every outside cube `S` with the
/// nearest inside cube whose side lies in `[side(S)/4, 4 side(S)]` (ties go
/// to the lexicographically smallest centre).
pub fn whitney_decompose<T: Real>(domain: Arc<RasterDomain<T>>, collar_width: T) -> Result<WhitneyDecomposition<T>> {
    let h = domain.h();
    let rad = domain_radius(&domain);
    if !(rad >= h * T::lit(2.0)) {
        return Err(Error::Resolution(format!(
            "rad(Omega) = {rad} is below 2h = {} at this resolution",
            h * T::lit(2.0)
        )));
    }
    if !(collar_width > T::zero()) || !collar_width.is_finite() {
        return Err(Error::Input(format!("collar width must be positive, got {collar_width}")));
    }
    let band = collar_width * T::lit(2.0);
    let pad = (band / h).ceil().to_usize().unwrap_or(0) + 2;
    let grid = Arc::new(domain.padded(pad));

    let half = h / T::lit(2.0);
    let bd_in = boundary_distance(&grid);
    let bd_out = distance_to_inside(&grid);
    let cell_dist: Vec<T> = (0..grid.len())
        .map(|k| if grid.is_inside(k) { bd_in[k] } else { (bd_out[k] - half).max(T::zero()) })
        .collect();
    let pyr = Pyramid::new(&grid, &cell_dist);
    let hf = h.as_f64();

    let inside_cubes = pyr.walk(true, |lv, d| (lv == 0 || ((1usize << lv) as f64) * hf <= d).then_some(true));
    if inside_cubes.is_empty() {
        return Err(Error::Input("domain has no inside cells".into()));
    }
    let max_in = inside_cubes.iter().map(|c| c.side).max().unwrap_or(1);
    let bandf = band.as_f64();
    let outside_cubes = pyr.walk(false, |lv, d| {
        let s = 1usize << lv;
        if d > bandf {
            Some(false)
        } else if lv == 0 || ((s as f64) * hf <= d && s <= 4 * max_in) {
            Some(true)
        } else {
            None
        }
    });

    let matching: Vec<Option<usize>> = outside_cubes
        .par_iter()
        .map(|s| {
            let (sx, sy) = s.center2();
            let mut best: Option<(i64, (i64, i64), usize)> = None;
            for (qi, q) in inside_cubes.iter().enumerate() {
                if q.side * 4 < s.side || q.side > 4 * s.side {
                    continue;
                }
                let c = q.center2();
                let d2 = (c.0 - sx).pow(2) + (c.1 - sy).pow(2);
                let better = match best {
                    None => true,
                    Some((bd, bc, _)) => d2 < bd || (d2 == bd && c < bc),
                };
                if better {
                    best = Some((d2, c, qi));
                }
            }
            best.map(|b| b.2)
        })
        .collect();
    let mut matched = Vec::with_capacity(matching.len());
    for (s, m) in outside_cubes.iter().zip(&matching) {
        match m {
            Some(q) => matched.push(*q),
            None => {
                return Err(Error::Resolution(format!(
                    "no inside cube of comparable size for an outside cube of side {}h",
                    s.side
                )))
            }
        }
    }
    let outside_dist = outside_cubes
        .iter()
        .map(|c| c.cells(grid.nx()).map(|k| cell_dist[k]).fold(T::infinity(), T::min))
        .collect();
    Ok(WhitneyDecomposition {
        domain,
        grid,
        pad,
        collar: collar_width,
        inside_cubes,
        outside_cubes,
        outside_dist,
        matching: matched,
        cell_dist,
    })
}
