use std::path::Path;
use std::sync::Arc;

use crate::domain::RasterDomain;
use crate::error::{input_err, Error, Result};
use crate::expr::Expr;
use crate::geometry::Point;
use crate::scalar::Real;

/// Per-cell samples laid out on a raster grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CellField<T> {
    origin: Point<T>,
    h: T,
    nx: usize,
    ny: usize,
    values: Vec<T>,
}

impl<T: Real> CellField<T> {
    /// `values` are row-major with `j = 0` the bottom row.
    pub fn new(origin: Point<T>, h: T, nx: usize, ny: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != nx * ny || nx == 0 || ny == 0 {
            return input_err(format!("field has {} values, grid is {nx}x{ny}", values.len()));
        }
        if !(h > T::zero()) {
            return input_err("field cell size must be positive");
        }
        Ok(Self { origin, h, nx, ny, values })
    }

    /// Samples `f` at the cell centres of `domain` (all cells, not only
    /// inside ones).
    pub fn sample(domain: &RasterDomain<T>, f: impl Fn(Point<T>) -> T) -> Self {
        let values = (0..domain.len()).map(|k| f(domain.center_k(k))).collect();
        Self {
            origin: domain.origin(),
            h: domain.h(),
            nx: domain.nx(),
            ny: domain.ny(),
            values,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn at(&self, x: Point<T>) -> Option<T> {
        let fx = ((x.0 - self.origin.0) / self.h).floor();
        let fy = ((x.1 - self.origin.1) / self.h).floor();
        if !(fx >= T::zero() && fy >= T::zero()) {
            return None;
        }
        let (i, j) = (fx.to_usize()?, fy.to_usize()?);
        (i < self.nx && j < self.ny).then(|| self.values[j * self.nx + i])
    }

    /// Parses `nx ny h` followed by `nx * ny` values, top row first.
    /// Values may be separated by whitespace or commas. The grid origin is
    /// not part of the format and is taken from `origin`.
    pub fn parse(text: &str, origin: Point<T>) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let (ln, head) = lines.next().ok_or_else(|| perr(0, "empty field file".into()))?;
        let f: Vec<&str> = head.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
        if f.len() != 3 {
            return Err(perr(ln, "expected header 'nx ny h'".into()));
        }
        let nx: usize = f[0].parse().map_err(|_| perr(ln, "bad nx".into()))?;
        let ny: usize = f[1].parse().map_err(|_| perr(ln, "bad ny".into()))?;
        let h: f64 = f[2].parse().map_err(|_| perr(ln, "bad h".into()))?;
        let mut rows = Vec::with_capacity(nx * ny);
        for (ln, l) in lines {
            for tok in l.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
                let v: f64 = tok.parse().map_err(|_| perr(ln, format!("bad value '{tok}'")))?;
                rows.push(T::lit(v));
            }
        }
        if rows.len() != nx * ny {
            return Err(perr(0, format!("expected {} values, found {}", nx * ny, rows.len())));
        }
        // flip to bottom-row-first storage
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            let row = ny - 1 - j;
            values.extend_from_slice(&rows[row * nx..(row + 1) * nx]);
        }
        Self::new(origin, T::lit(h), nx, ny, values)
    }

    pub fn load(path: impl AsRef<Path>, origin: Point<T>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, origin)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.nx, self.ny, self.h);
        for row in 0..self.ny {
            let j = self.ny - 1 - row;
            let line: Vec<String> = self.values[j * self.nx..(j + 1) * self.nx]
                .iter()
                .map(|v| format!("{v:e}"))
                .collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }
}

/// A scalar coefficient `x -> f(x)`, such as a variable exponent or the
/// double phase weight.
#[derive(Clone, Debug)]
pub enum Field<T> {
    Const(T),
    Expr(Arc<Expr>),
    Grid(Arc<CellField<T>>),
}

impl<T: Real> Field<T> {
    pub fn expr(src: &str) -> Result<Self> {
        let e = Expr::parse(src)?;
        if e.uses_t() {
            return input_err(format!("coefficient '{src}' must not depend on t"));
        }
        if e.max_spatial_var() > 2 {
            return input_err(format!("coefficient '{src}' uses more than two coordinates"));
        }
        Ok(Field::Expr(Arc::new(e)))
    }

    pub fn at(&self, x: Point<T>) -> Result<T> {
        let v = match self {
            Field::Const(c) => *c,
            Field::Expr(e) => e.eval(&[x.0, x.1], T::zero()),
            Field::Grid(g) => g.at(x).ok_or_else(|| {
                let (a, b) = x.to_f64();
                Error::OutsideDomain(a, b)
            })?,
        };
        if v.is_nan() {
            return input_err(format!("coefficient is NaN at {:?}", x.to_f64()));
        }
        Ok(v)
    }

    pub fn is_const(&self) -> bool {
        match self {
            Field::Const(_) => true,
            Field::Expr(e) => e.max_spatial_var() == 0,
            Field::Grid(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_orientation_matches_domain_files() {
        let text = "3 2 0.5\n1, 2, 3\n4 5 6\n";
        let f = CellField::<f64>::parse(text, Point(0.0, 0.0)).unwrap();
        // the first row listed is the top row
        assert_eq!(f.at(Point(0.1, 0.9)), Some(1.0));
        assert_eq!(f.at(Point(1.4, 0.1)), Some(6.0));
        assert_eq!(f.at(Point(1.6, 0.1)), None);
        let again = CellField::<f64>::parse(&f.to_text(), Point(0.0, 0.0)).unwrap();
        assert_eq!(again, f);
    }

    #[test]
    fn field_rejects_t() {
        assert!(Field::<f64>::expr("x1 + t").is_err());
        let f = Field::<f64>::expr("2 + x1*x2").unwrap();
        assert_eq!(f.at(Point(2.0, 3.0)).unwrap(), 8.0);
    }
}
