use std::fmt::Write as _;
use std::path::Path;

use crate::error::{input_err, Error, Result};
use crate::geometry::Point;
use crate::scalar::Real;

/// An open planar set sampled on a uniform cell grid.
///
/// Cell `(i, j)` covers `[ox + i h, ox + (i+1) h) x [oy + j h, oy + (j+1) h)`;
/// `j = 0` is the bottom row. Storage is row-major, `k = j * nx + i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterDomain<T> {
    origin: Point<T>,
    h: T,
    nx: usize,
    ny: usize,
    inside: Vec<bool>,
    /// 4-connected component label per cell, `u32::MAX` for outside cells.
    labels: Vec<u32>,
    n_components: usize,
}

impl<T: Real> RasterDomain<T> {
    pub fn new(origin: Point<T>, h: T, nx: usize, ny: usize, inside: Vec<bool>) -> Result<Self> {
        if h <= T::zero() || !h.is_finite() {
            return input_err("cell size must be positive");
        }
        if nx == 0 || ny == 0 || inside.len() != nx * ny {
            return input_err(format!(
                "grid {nx}x{ny} does not match {} cells",
                inside.len()
            ));
        }
        if !inside.iter().any(|&b| b) {
            return input_err("domain has no inside cells");
        }
        let (labels, n_components) = label_components(nx, ny, &inside);
        Ok(Self {
            origin,
            h,
            nx,
            ny,
            inside,
            labels,
            n_components,
        })
    }

    /// Marks a cell inside when its center satisfies `pred`.
    pub fn from_predicate(
        origin: Point<T>,
        h: T,
        nx: usize,
        ny: usize,
        pred: impl Fn(Point<T>) -> bool,
    ) -> Result<Self> {
        let mut inside = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let c = Point(
                    origin.0 + h * T::lit(i as f64 + 0.5),
                    origin.1 + h * T::lit(j as f64 + 0.5),
                );
                inside[j * nx + i] = pred(c);
            }
        }
        Self::new(origin, h, nx, ny, inside)
    }

    /// Every cell of the box is inside.
    pub fn full(origin: Point<T>, h: T, nx: usize, ny: usize) -> Result<Self> {
        Self::new(origin, h, nx, ny, vec![true; nx * ny])
    }

    pub fn origin(&self) -> Point<T> {
        self.origin
    }
    pub fn h(&self) -> T {
        self.h
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn n_components(&self) -> usize {
        self.n_components
    }
    pub fn inside_mask(&self) -> &[bool] {
        &self.inside
    }
    pub fn cell_area(&self) -> T {
        self.h * self.h
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> Point<T> {
        Point(
            self.origin.0 + self.h * T::lit(i as f64 + 0.5),
            self.origin.1 + self.h * T::lit(j as f64 + 0.5),
        )
    }

    #[inline]
    pub fn center_k(&self, k: usize) -> Point<T> {
        let (i, j) = self.ij(k);
        self.center(i, j)
    }

    #[inline]
    pub fn is_inside(&self, k: usize) -> bool {
        self.inside[k]
    }

    /// Cell index containing `p`, if `p` lies in the grid box.
    pub fn cell_of(&self, p: Point<T>) -> Option<usize> {
        let fx = ((p.0 - self.origin.0) / self.h).floor();
        let fy = ((p.1 - self.origin.1) / self.h).floor();
        if !(fx >= T::zero() && fy >= T::zero()) {
            return None;
        }
        let (i, j) = (fx.to_usize()?, fy.to_usize()?);
        (i < self.nx && j < self.ny).then(|| self.idx(i, j))
    }

    /// True when `p` falls in an inside cell.
    pub fn contains(&self, p: Point<T>) -> bool {
        self.cell_of(p).is_some_and(|k| self.inside[k])
    }

    pub fn component(&self, k: usize) -> Option<u32> {
        (self.labels[k] != u32::MAX).then_some(self.labels[k])
    }

    pub fn inside_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| self.inside[k])
    }

    pub fn inside_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    /// 4-neighbours of `k` that exist in the grid.
    pub fn neighbors4(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        let (i, j) = self.ij(k);
        let (nx, ny) = (self.nx, self.ny);
        [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)]
            .into_iter()
            .filter_map(move |(di, dj)| {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                (a >= 0 && b >= 0 && (a as usize) < nx && (b as usize) < ny)
                    .then(|| b as usize * nx + a as usize)
            })
    }

    /// Inside cell with at least one outside 4-neighbour (or touching the
    /// grid edge).
    pub fn is_boundary(&self, k: usize) -> bool {
        if !self.inside[k] {
            return false;
        }
        let (i, j) = self.ij(k);
        if i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny {
            return true;
        }
        self.neighbors4(k).any(|n| !self.inside[n])
    }

    /// Axis-aligned box `[x0, x1] x [y0, y1]` covered by the grid.
    pub fn bounds(&self) -> (Point<T>, Point<T>) {
        let hi = Point(
            self.origin.0 + self.h * T::lit(self.nx as f64),
            self.origin.1 + self.h * T::lit(self.ny as f64),
        );
        (self.origin, hi)
    }

    /// Bounding box of the inside cell centers.
    pub fn inside_bounds(&self) -> (Point<T>, Point<T>) {
        let mut lo = Point(T::infinity(), T::infinity());
        let mut hi = Point(T::neg_infinity(), T::neg_infinity());
        for k in self.inside_cells() {
            let c = self.center_k(k);
            lo = Point(lo.0.min(c.0), lo.1.min(c.1));
            hi = Point(hi.0.max(c.0), hi.1.max(c.1));
        }
        (lo, hi)
    }

    /// Largest distance between inside cell centers.
    pub fn diameter(&self) -> T {
        let hull = convex_hull(self.inside_cells().map(|k| self.center_k(k)).collect());
        let mut d = T::zero();
        for (a, p) in hull.iter().enumerate() {
            for q in &hull[a + 1..] {
                d = d.max(p.dist(q));
            }
        }
        d
    }

    /// Same set on a grid enlarged by `pad` outside cells on every side.
    pub fn padded(&self, pad: usize) -> Self {
        let (nx, ny) = (self.nx + 2 * pad, self.ny + 2 * pad);
        let mut inside = vec![false; nx * ny];
        for j in 0..self.ny {
            for i in 0..self.nx {
                inside[(j + pad) * nx + i + pad] = self.inside[self.idx(i, j)];
            }
        }
        let shift = self.h * T::lit(pad as f64);
        let origin = Point(self.origin.0 - shift, self.origin.1 - shift);
        Self::new(origin, self.h, nx, ny, inside).expect("padding preserves inside cells")
    }

    /// Same set with every cell split into `factor x factor` cells.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return input_err("refinement factor must be positive");
        }
        let (nx, ny) = (self.nx * factor, self.ny * factor);
        let inside = (0..nx * ny)
            .map(|k| self.inside[self.idx((k % nx) / factor, (k / nx) / factor)])
            .collect();
        Self::new(self.origin, self.h / T::lit(factor as f64), nx, ny, inside)
    }

    /// Parses the text format: `ORLICZ-DOMAIN v1`, then `nx ny h ox oy`,
    /// then `ny` rows of `nx` characters from `{#, .}`, top row first.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, msg: &str| Error::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let (ln, magic) = lines.next().ok_or_else(|| perr(0, "empty domain file"))?;
        if magic.trim() != "ORLICZ-DOMAIN v1" {
            return Err(perr(ln, "missing 'ORLICZ-DOMAIN v1' header"));
        }
        let (ln, dims) = lines.next().ok_or_else(|| perr(1, "missing grid line"))?;
        let f: Vec<&str> = dims.split_whitespace().collect();
        if f.len() != 5 {
            return Err(perr(ln, "expected 'nx ny h ox oy'"));
        }
        let nx: usize = f[0].parse().map_err(|_| perr(ln, "bad nx"))?;
        let ny: usize = f[1].parse().map_err(|_| perr(ln, "bad ny"))?;
        let num = |s: &str, what: &str| -> Result<T> {
            s.parse::<f64>()
                .map(T::lit)
                .map_err(|_| perr(ln, &format!("bad {what}")))
        };
        let (h, ox, oy) = (num(f[2], "h")?, num(f[3], "ox")?, num(f[4], "oy")?);
        let mut inside = vec![false; nx * ny];
        for row in 0..ny {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| perr(ln + row + 1, "too few grid rows"))?;
            let l = l.trim_end();
            if l.chars().count() != nx {
                return Err(perr(ln, &format!("row has {} cells, want {nx}", l.chars().count())));
            }
            let j = ny - 1 - row;
            for (i, c) in l.chars().enumerate() {
                inside[j * nx + i] = match c {
                    '#' => true,
                    '.' => false,
                    _ => return Err(perr(ln, &format!("unexpected cell character '{c}'"))),
                };
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(perr(ln, "trailing data after grid"));
        }
        Self::new(Point(ox, oy), h, nx, ny, inside)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("ORLICZ-DOMAIN v1\n");
        let _ = writeln!(
            s,
            "{} {} {} {} {}",
            self.nx, self.ny, self.h, self.origin.0, self.origin.1
        );
        for row in 0..self.ny {
            let j = self.ny - 1 - row;
            for i in 0..self.nx {
                s.push(if self.inside[self.idx(i, j)] { '#' } else { '.' });
            }
            s.push('\n');
        }
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

fn label_components(nx: usize, ny: usize, inside: &[bool]) -> (Vec<u32>, usize) {
    let mut labels = vec![u32::MAX; nx * ny];
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..nx * ny {
        if !inside[start] || labels[start] != u32::MAX {
            continue;
        }
        labels[start] = next;
        stack.push(start);
        while let Some(k) = stack.pop() {
            let (i, j) = (k % nx, k / nx);
            let mut push = |n: usize| {
                if inside[n] && labels[n] == u32::MAX {
                    labels[n] = next;
                    stack.push(n);
                }
            };
            if i > 0 {
                push(k - 1);
            }
            if i + 1 < nx {
                push(k + 1);
            }
            if j > 0 {
                push(k - nx);
            }
            if j + 1 < ny {
                push(k + nx);
            }
        }
        next += 1;
    }
    (labels, next as usize)
}

/// Andrew's monotone chain; returns hull vertices counter-clockwise.
pub(crate) fn convex_hull<T: Real>(mut pts: Vec<Point<T>>) -> Vec<Point<T>> {
    pts.sort_by(|a, b| a.lex_cmp(b));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &Point<T>, a: &Point<T>, b: &Point<T>| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<Point<T>> = Vec::with_capacity(2 * pts.len());
    for p in pts.iter() {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= T::zero() {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= T::zero()
        {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_and_orientation() {
        let text = "ORLICZ-DOMAIN v1\n3 2 0.5 -1 0\n#..\n.##\n";
        let d: RasterDomain<f64> = RasterDomain::parse(text).unwrap();
        // top row is j = 1
        assert!(d.is_inside(d.idx(0, 1)));
        assert!(!d.is_inside(d.idx(0, 0)));
        assert!(d.is_inside(d.idx(2, 0)));
        assert_eq!(d.n_components(), 2);
        assert_eq!(d.to_text(), text);
        assert!(d.contains(Point(-0.9, 0.9)));
        assert!(!d.contains(Point(-0.9, 0.1)));
        assert!(!d.contains(Point(5.0, 0.1)));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "ORLICZ-DOMAIN v1\n2 2 1 0 0\n##\n#x\n";
        match RasterDomain::<f64>::parse(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(RasterDomain::<f64>::parse("nope\n").is_err());
        assert!(RasterDomain::<f64>::parse("ORLICZ-DOMAIN v1\n2 1 1 0 0\n..\n").is_err());
    }

    #[test]
    fn boundary_and_padding() {
        let d = RasterDomain::<f64>::full(Point(0.0, 0.0), 1.0, 3, 3).unwrap();
        assert!(d.is_boundary(d.idx(0, 1)));
        assert!(!d.is_boundary(d.idx(1, 1)));
        let p = d.padded(2);
        assert_eq!((p.nx(), p.ny()), (7, 7));
        assert_eq!(p.inside_count(), 9);
        assert!(p.contains(Point(0.5, 0.5)));
        assert!(!p.contains(Point(-0.5, 0.5)));
        assert!((p.diameter() - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn refinement_keeps_the_set() {
        let d = crate::domain::shapes::l_shape(0.25f64).unwrap();
        let r = d.refined(4).unwrap();
        assert_eq!(r.inside_count(), 16 * d.inside_count());
        assert_eq!(r.h(), d.h() / 4.0);
        for k in r.inside_cells() {
            assert!(d.contains(r.center_k(k)));
        }
        assert!(d.refined(0).is_err());
    }
}
