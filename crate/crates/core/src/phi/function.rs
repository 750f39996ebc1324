use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::shapes::dumbbell_contains;
use crate::domain::RasterDomain;
use crate::error::{input_err, Error, Result};
use crate::expr::Expr;
use crate::extended::Extended;
use crate::geometry::Point;
use crate::scalar::Real;

use super::field::Field;
use super::profile::Profile;

/// Where a growth function is defined.
#[derive(Clone, Debug)]
pub enum Region<T> {
    /// All of the plane.
    Everywhere,
    Raster(Arc<RasterDomain<T>>),
    /// The unbounded two-towers-and-bridge set, tested analytically.
    Dumbbell,
}

impl<T: Real> Region<T> {
    pub fn contains(&self, x: Point<T>) -> bool {
        match self {
            Region::Everywhere => x.0.is_finite() && x.1.is_finite(),
            Region::Raster(d) => d.contains(x),
            Region::Dumbbell => {
                let (a, b) = x.to_f64();
                dumbbell_contains(a, b)
            }
        }
    }

    pub fn raster(&self) -> Option<&Arc<RasterDomain<T>>> {
        match self {
            Region::Raster(d) => Some(d),
            _ => None,
        }
    }
}

/// Declared properties of a growth function. They are not verified on
/// construction; the condition checks do that.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhiFlags {
    pub convex: bool,
    pub left_continuous: bool,
    /// Exponent `p` of the declared (aInc)_p.
    pub p_lo: Option<f64>,
    /// Exponent `q` of the declared (aDec)_q.
    pub q_hi: Option<f64>,
    pub l_p: f64,
    pub l_q: f64,
}

impl Default for PhiFlags {
    fn default() -> Self {
        Self {
            convex: false,
            left_continuous: true,
            p_lo: None,
            q_hi: None,
            l_p: 1.0,
            l_q: 1.0,
        }
    }
}

/// Pointwise rule of a growth function.
#[derive(Clone, Debug)]
pub enum Family<T> {
    Power(T),
    /// x-independent `phi(t)` given by an expression in `t`.
    OrliczExpr(Arc<Expr>),
    /// x-independent `phi(t)` given by samples `(t_i, phi_i)`.
    OrliczTable { ts: Arc<Vec<T>>, vs: Arc<Vec<T>> },
    VariableExponent(Field<T>),
    DoublePhase { p: T, q: T, a: Field<T> },
    /// Per-cell samples over a common `t` grid: row `k` of `vs` holds the
    /// values for cell `k` of `grid`.
    Tabulated {
        grid: Arc<RasterDomain<T>>,
        ts: Arc<Vec<T>>,
        vs: Arc<Vec<T>>,
    },
    /// `t` when `x <= 1` or `y <= 1`, and `t / y` otherwise.
    ExampleDumbbell,
}

impl<T: Real> Family<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Power(_) => "power",
            Family::OrliczExpr(_) | Family::OrliczTable { .. } => "orlicz",
            Family::VariableExponent(_) => "variable_exponent",
            Family::DoublePhase { .. } => "double_phase",
            Family::Tabulated { .. } => "tabulated",
            Family::ExampleDumbbell => "example_dumbbell",
        }
    }
}

/// Growth functions known through their profiles `phi(x, .)`.
pub trait GrowthFunction<T: Real>: Send + Sync {
    /// `phi(x, .)`; fails when `x` is outside the region of definition.
    fn profile(&self, x: Point<T>) -> Result<Profile<T>>;

    fn contains(&self, x: Point<T>) -> bool;

    /// True when `phi(x, t)` does not depend on `x`.
    fn is_x_independent(&self) -> bool {
        false
    }

    fn eval(&self, x: Point<T>, t: T) -> Result<Extended<T>> {
        eval_phi(self, x, t)
    }

    fn inverse(&self, x: Point<T>, tau: T, tol: T) -> Result<T> {
        left_inverse(self, x, tau, tol)
    }
}

/// `phi(x, t)`.
pub fn eval_phi<T: Real, G: GrowthFunction<T> + ?Sized>(phi: &G, x: Point<T>, t: T) -> Result<Extended<T>> {
    if !(t >= T::zero()) {
        return input_err(format!("t must be non-negative, got {t}"));
    }
    let v = phi.profile(x)?.value(t);
    if v.is_nan() || v < T::zero() {
        return input_err(format!("growth function returned {v} at {:?}, t = {t}", x.to_f64()));
    }
    Ok(Extended::from_real(v))
}

/// `phi^{-1}(x, tau) = inf { t >= 0 : phi(x, t) >= tau }`.
pub fn left_inverse<T: Real, G: GrowthFunction<T> + ?Sized>(phi: &G, x: Point<T>, tau: T, tol: T) -> Result<T> {
    if !(tau >= T::zero()) {
        return input_err(format!("tau must be non-negative, got {tau}"));
    }
    if !(tol > T::zero()) {
        return input_err("tolerance must be positive");
    }
    phi.profile(x)?.inverse(tau, tol)
}

/// A weak Phi-function on a region of the plane.
#[derive(Clone, Debug)]
pub struct PhiFunction<T> {
    family: Family<T>,
    region: Region<T>,
    flags: PhiFlags,
}

impl<T: Real> PhiFunction<T> {
    fn build(family: Family<T>, flags: PhiFlags) -> Self {
        Self {
            family,
            region: Region::Everywhere,
            flags,
        }
    }

    pub fn power(p: T) -> Result<Self> {
        if !(p > T::zero()) || !p.is_finite() {
            return input_err(format!("power exponent must be positive, got {p}"));
        }
        let pf = p.as_f64();
        Ok(Self::build(
            Family::Power(p),
            PhiFlags {
                convex: pf >= 1.0,
                p_lo: Some(pf),
                q_hi: Some(pf),
                ..PhiFlags::default()
            },
        ))
    }

    /// x-independent Orlicz function from an expression in `t`.
    pub fn orlicz_expr(src: &str) -> Result<Self> {
        let e = Expr::parse(src)?;
        if e.max_spatial_var() > 0 {
            return input_err(format!("Orlicz expression '{src}' must depend on t only"));
        }
        Ok(Self::build(Family::OrliczExpr(Arc::new(e)), PhiFlags::default()))
    }

    pub fn orlicz_table(ts: Vec<T>, vs: Vec<T>) -> Result<Self> {
        validate_table(&ts, &vs)?;
        Ok(Self::build(
            Family::OrliczTable {
                ts: Arc::new(ts),
                vs: Arc::new(vs),
            },
            PhiFlags::default(),
        ))
    }

    /// `t^{p(x)}`.
    pub fn variable_exponent(p: Field<T>) -> Self {
        let mut flags = PhiFlags::default();
        if let Field::Const(c) = p {
            flags.p_lo = Some(c.as_f64());
            flags.q_hi = Some(c.as_f64());
        }
        if let Field::Grid(g) = &p {
            let (lo, hi) = g
                .values()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v.as_f64()), b.max(v.as_f64())));
            flags.p_lo = Some(lo);
            flags.q_hi = Some(hi);
        }
        Self::build(Family::VariableExponent(p), flags)
    }

    /// `t^p + a(x) t^q` with `1 <= p <= q` and `a >= 0`.
    pub fn double_phase(p: T, q: T, a: Field<T>) -> Result<Self> {
        if !(p >= T::one() && q >= p && q.is_finite()) {
            return input_err(format!("double phase needs 1 <= p <= q, got p = {p}, q = {q}"));
        }
        Ok(Self::build(
            Family::DoublePhase { p, q, a },
            PhiFlags {
                convex: true,
                p_lo: Some(p.as_f64()),
                q_hi: Some(q.as_f64()),
                ..PhiFlags::default()
            },
        ))
    }

    /// Per-cell tables on `grid`: `vs` holds `grid.len()` rows of
    /// `ts.len()` values.
    pub fn tabulated(grid: Arc<RasterDomain<T>>, ts: Vec<T>, vs: Vec<T>) -> Result<Self> {
        if vs.len() != grid.len() * ts.len() {
            return input_err(format!(
                "tabulated values: expected {} x {} entries, got {}",
                grid.len(),
                ts.len(),
                vs.len()
            ));
        }
        for k in grid.inside_cells() {
            validate_table(&ts, &vs[k * ts.len()..(k + 1) * ts.len()])?;
        }
        Ok(Self {
            family: Family::Tabulated {
                grid: grid.clone(),
                ts: Arc::new(ts),
                vs: Arc::new(vs),
            },
            region: Region::Raster(grid),
            flags: PhiFlags::default(),
        })
    }

    pub fn example_dumbbell() -> Self {
        Self {
            family: Family::ExampleDumbbell,
            region: Region::Dumbbell,
            flags: PhiFlags {
                convex: true,
                p_lo: Some(1.0),
                q_hi: Some(1.0),
                ..PhiFlags::default()
            },
        }
    }

    /// Restricts the region of definition.
    pub fn on(mut self, region: Region<T>) -> Self {
        self.region = region;
        self
    }

    pub fn on_domain(self, domain: Arc<RasterDomain<T>>) -> Self {
        self.on(Region::Raster(domain))
    }

    pub fn with_flags(mut self, flags: PhiFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn region(&self) -> &Region<T> {
        &self.region
    }

    pub fn flags(&self) -> &PhiFlags {
        &self.flags
    }
}

fn validate_table<T: Real>(ts: &[T], vs: &[T]) -> Result<()> {
    if ts.is_empty() || ts.len() != vs.len() {
        return input_err("table needs matching, non-empty t and value lists");
    }
    if !(ts[0] > T::zero()) || ts.windows(2).any(|w| !(w[1] > w[0])) {
        return input_err("table t values must be positive and strictly increasing");
    }
    if !(vs[0] >= T::zero()) || vs.windows(2).any(|w| !(w[1] >= w[0])) {
        return input_err("table values must be non-negative and non-decreasing");
    }
    if !(vs[vs.len() - 1] > T::zero()) {
        return input_err("table values must not vanish identically");
    }
    Ok(())
}

impl<T: Real> GrowthFunction<T> for PhiFunction<T> {
    fn profile(&self, x: Point<T>) -> Result<Profile<T>> {
        if !self.region.contains(x) {
            let (a, b) = x.to_f64();
            return Err(Error::OutsideDomain(a, b));
        }
        Ok(match &self.family {
            Family::Power(p) => Profile::Power(*p),
            Family::OrliczExpr(e) => Profile::Expr { expr: e.clone(), x },
            Family::OrliczTable { ts, vs } => Profile::Table {
                ts: ts.clone(),
                vs: vs.clone(),
                off: 0,
            },
            Family::VariableExponent(p) => {
                let p = p.at(x)?;
                if !(p > T::zero()) {
                    return input_err(format!("exponent {p} at {:?} is not positive", x.to_f64()));
                }
                Profile::Power(p)
            }
            Family::DoublePhase { p, q, a } => {
                let a = a.at(x)?;
                if !(a >= T::zero()) {
                    return input_err(format!("double phase weight {a} at {:?} is negative", x.to_f64()));
                }
                Profile::DoublePhase { p: *p, q: *q, a }
            }
            Family::Tabulated { grid, ts, vs } => {
                let k = grid.cell_of(x).ok_or_else(|| {
                    let (a, b) = x.to_f64();
                    Error::OutsideDomain(a, b)
                })?;
                Profile::Table {
                    ts: ts.clone(),
                    vs: vs.clone(),
                    off: k * ts.len(),
                }
            }
            Family::ExampleDumbbell => {
                if x.0 > T::one() && x.1 > T::one() {
                    Profile::Linear(x.1.recip())
                } else {
                    Profile::Linear(T::one())
                }
            }
        })
    }

    fn contains(&self, x: Point<T>) -> bool {
        self.region.contains(x)
    }

    fn is_x_independent(&self) -> bool {
        match &self.family {
            Family::Power(_) | Family::OrliczExpr(_) | Family::OrliczTable { .. } => true,
            Family::VariableExponent(p) => p.is_const(),
            Family::DoublePhase { a, .. } => a.is_const(),
            Family::Tabulated { .. } | Family::ExampleDumbbell => false,
        }
    }
}

/// Profiles of `phi` resolved once per cell of a raster, for repeated
/// quadrature. Outside cells hold `None`.
#[derive(Clone)]
pub struct LocalPhi<T> {
    profiles: Vec<Option<Profile<T>>>,
}

impl<T: Real> LocalPhi<T> {
    pub fn resolve<G: GrowthFunction<T> + ?Sized>(phi: &G, domain: &RasterDomain<T>) -> Result<Self> {
        let shared = if phi.is_x_independent() {
            let k0 = domain.inside_cells().next().expect("domain is non-empty");
            Some(phi.profile(domain.center_k(k0))?)
        } else {
            None
        };
        let profiles = (0..domain.len())
            .into_par_iter()
            .map(|k| {
                if !domain.is_inside(k) {
                    return Ok(None);
                }
                let c = domain.center_k(k);
                match &shared {
                    Some(p) if phi.contains(c) => Ok(Some(p.clone())),
                    Some(_) => {
                        let (a, b) = c.to_f64();
                        Err(Error::OutsideDomain(a, b))
                    }
                    None => phi.profile(c).map(Some),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { profiles })
    }

    #[inline]
    pub fn get(&self, k: usize) -> Option<&Profile<T>> {
        self.profiles[k].as_ref()
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_examples() {
        let p2 = PhiFunction::power(2.0).unwrap();
        assert_eq!(eval_phi(&p2, Point(5.0, -1.0), 3.0).unwrap(), Extended::Finite(9.0));
        let db = PhiFunction::<f64>::example_dumbbell();
        assert_eq!(eval_phi(&db, Point(2.0, 4.0), 8.0).unwrap(), Extended::Finite(2.0));
        assert_eq!(eval_phi(&db, Point(-2.0, 4.0), 8.0).unwrap(), Extended::Finite(8.0));
        let dp = PhiFunction::double_phase(2.0, 3.0, Field::Const(1.0)).unwrap();
        assert_eq!(eval_phi(&dp, Point(0.0, 0.0), 2.0).unwrap(), Extended::Finite(12.0));
    }

    #[test]
    fn eval_errors() {
        let db = PhiFunction::<f64>::example_dumbbell();
        assert!(matches!(eval_phi(&db, Point(0.0, 1.0), 1.0), Err(Error::OutsideDomain(..))));
        let p2 = PhiFunction::power(2.0).unwrap();
        assert!(matches!(eval_phi(&p2, Point(0.0, 0.0), -1.0), Err(Error::Input(_))));
    }

    #[test]
    fn inverse_examples() {
        let p2 = PhiFunction::power(2.0).unwrap();
        assert_relative_eq!(left_inverse(&p2, Point(0.0, 0.0), 9.0, 1e-10).unwrap(), 3.0);
        let db = PhiFunction::<f64>::example_dumbbell();
        for y in [1.5, 7.0, 1e6] {
            assert_relative_eq!(left_inverse(&db, Point(2.0, y), 1.0, 1e-10).unwrap(), y);
        }
        // oracle: bisection on t^2 + t^3 = 12 confirmed by forward evaluation
        let dp = PhiFunction::double_phase(2.0, 3.0, Field::Const(1.0)).unwrap();
        let t = left_inverse(&dp, Point(0.0, 0.0), 12.0, 1e-10).unwrap();
        assert_relative_eq!(t, 2.0, max_relative = 1e-12);
        assert_relative_eq!(t * t + t * t * t, 12.0, max_relative = 1e-12);
    }

    #[test]
    fn expression_family_uses_bisection() {
        let phi = PhiFunction::orlicz_expr("t^2*ln(e+t)").unwrap();
        let tau = 5.0;
        let t = left_inverse(&phi, Point(0.0, 0.0), tau, 1e-10).unwrap();
        let f = |s: f64| s * s * (std::f64::consts::E + s).ln();
        assert!(f(t * (1.0 + 1e-10)) >= tau && f(t * (1.0 - 1e-10)) < tau);
    }

    #[test]
    fn variable_exponent_reads_field() {
        let phi = PhiFunction::variable_exponent(Field::expr("2 + x1").unwrap());
        assert_eq!(eval_phi(&phi, Point(1.0, 0.0), 2.0).unwrap(), Extended::Finite(8.0));
        assert!(!phi.is_x_independent());
    }

    #[test]
    fn tabulated_is_per_cell() {
        let grid = Arc::new(RasterDomain::full(Point(0.0, 0.0), 1.0, 2, 1).unwrap());
        let phi = PhiFunction::tabulated(grid, vec![1.0, 2.0], vec![1.0, 4.0, 2.0, 8.0]).unwrap();
        assert_eq!(eval_phi(&phi, Point(0.5, 0.5), 2.0).unwrap(), Extended::Finite(4.0));
        assert_eq!(eval_phi(&phi, Point(1.5, 0.5), 2.0).unwrap(), Extended::Finite(8.0));
        assert_eq!(eval_phi(&phi, Point(1.5, 0.5), 1.5).unwrap(), Extended::Finite(5.0));
        assert!(eval_phi(&phi, Point(2.5, 0.5), 1.0).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(PhiFunction::<f64>::orlicz_table(vec![1.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(PhiFunction::<f64>::orlicz_table(vec![1.0, 2.0], vec![2.0, 1.0]).is_err());
        assert!(PhiFunction::<f64>::orlicz_table(vec![1.0, 2.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn single_precision_works() {
        let dp = PhiFunction::double_phase(2.0f32, 3.0, Field::Const(1.0)).unwrap();
        let t = left_inverse(&dp, Point(0.0, 0.0), 12.0, 1e-5).unwrap();
        assert!((t - 2.0).abs() < 1e-5);
    }
}
