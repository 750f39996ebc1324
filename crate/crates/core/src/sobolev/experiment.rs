use std::sync::Arc;

use serde::Serialize;

use crate::conditions::ConstantBundle;
use crate::domain::RasterDomain;
use crate::error::Result;
use crate::extension::{extend_phi_with, ExtensionOptions};
use crate::geometry::Point;
use crate::phi::{GridFunction, PhiFunction};
use crate::scalar::Real;

use super::operator::ExtensionSetup;
use super::whitney::{default_collar_width, whitney_decompose};

/// Largest allowed growth of the maximal ratio per halving of `h`.
pub const GROWTH_LIMIT: f64 = 1.1;

/// A named smooth function of the plane.
#[derive(Clone)]
pub struct TestFunction {
    pub name: &'static str,
    pub f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name)
    }
}

impl TestFunction {
    pub fn new(name: &'static str, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { name, f: Arc::new(f) }
    }

    pub fn sample<T: Real>(&self, domain: Arc<RasterDomain<T>>) -> GridFunction<T> {
        GridFunction::from_fn(domain, |p: Point<T>| {
            let (x, y) = p.to_f64();
            T::lit((self.f)(x, y))
        })
    }
}

/// Ten smooth functions: polynomials, Gaussians and oscillatory terms.
pub fn default_corpus() -> Vec<TestFunction> {
    use std::f64::consts::PI;
    vec![
        TestFunction::new("one", |_, _| 1.0),
        TestFunction::new("x1", |x, _| x),
        TestFunction::new("x2", |_, y| y),
        TestFunction::new("saddle", |x, y| x * x - y * y),
        TestFunction::new("product", |x, y| x * y),
        TestFunction::new("cubic", |x, y| x * x * x - 2.0 * x * y + y),
        TestFunction::new("gauss", |x, y| (-(x * x + y * y)).exp()),
        TestFunction::new("gauss_shifted", |x, y| (-4.0 * ((x - 0.3).powi(2) + (y + 0.2).powi(2))).exp()),
        TestFunction::new("wave", |x, y| (PI * x).sin() * (PI * y).cos()),
        TestFunction::new("ripple", |x, y| (3.0 * x + 2.0 * y).sin()),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub function: String,
    pub h: f64,
    pub ratio: f64,
    pub norm_u: f64,
    pub norm_extended: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundednessReport {
    pub rows: Vec<RatioRow>,
    /// `(h, max ratio over the corpus)` per resolution.
    pub max_ratio: Vec<(f64, f64)>,
    /// Successive quotients of `max_ratio` as `h` halves.
    pub growth: Vec<f64>,
    /// `Lambda u = u` on every inside cell, bit for bit.
    pub restriction_exact: bool,
    /// `max |Lambda(a u + b v) - a Lambda u - b Lambda v|` over the runs.
    pub linearity_error: f64,
    pub pass: bool,
}

/// Extends every corpus function at each resolution in `hs` (coarse to
/// fine, halving) and tracks the largest norm ratio. The growth function
/// `phi` is extended afresh at each resolution with `bundle` and `options`.
pub fn boundedness_experiment<T: Real>(
    corpus: &[TestFunction],
    make_domain: &dyn Fn(T) -> Result<RasterDomain<T>>,
    phi: &PhiFunction<T>,
    bundle: &ConstantBundle<T>,
    hs: &[T],
    options: &ExtensionOptions,
) -> Result<BoundednessReport> {
    let mut rows = Vec::new();
    let mut max_ratio = Vec::new();
    let mut restriction_exact = true;
    let mut linearity_error = 0.0f64;
    for &h in hs {
        let domain = Arc::new(make_domain(h)?);
        let psi = extend_phi_with(phi, domain.clone(), bundle, options.clone())?;
        let wd = Arc::new(whitney_decompose(domain.clone(), default_collar_width(&domain))?);
        let setup = ExtensionSetup::new(wd.clone(), phi, &psi)?;
        let mut best = 0.0f64;
        let mut images = Vec::with_capacity(corpus.len());
        for tf in corpus {
            let u = tf.sample(domain.clone());
            let r = setup.extend(&u)?;
            for k in domain.inside_cells() {
                restriction_exact &= r.extended.values()[wd.to_grid(k)] == u.values()[k];
            }
            best = best.max(r.ratio.as_f64());
            rows.push(RatioRow {
                function: tf.name.to_string(),
                h: h.as_f64(),
                ratio: r.ratio.as_f64(),
                norm_u: r.norm_u.as_f64(),
                norm_extended: r.norm_extended.as_f64(),
            });
            images.push((u, r.extended));
        }
        if images.len() >= 2 {
            let (a, b) = (T::lit(2.0), T::lit(-3.0));
            let (u, lu) = &images[images.len() - 1];
            let (v, lv) = &images[images.len() - 2];
            let mix = setup.operator().apply(&u.combine(a, v, b)?)?;
            for (k, m) in mix.values().iter().enumerate() {
                let want = a * lu.values()[k] + b * lv.values()[k];
                linearity_error = linearity_error.max((*m - want).abs().as_f64());
            }
        }
        max_ratio.push((h.as_f64(), best));
    }
    let growth: Vec<f64> = max_ratio.windows(2).map(|w| w[1].1 / w[0].1).collect();
    let pass = restriction_exact
        && linearity_error <= 1e-12
        && max_ratio.iter().all(|r| r.1.is_finite())
        && growth.iter().all(|&g| g <= GROWTH_LIMIT);
    Ok(BoundednessReport {
        rows,
        max_ratio,
        growth,
        restriction_exact,
        linearity_error,
        pass,
    })
}
