//! Extension of a growth function from a raster domain to the whole plane.
//!
//! Outside `Omega` the inverse is built first: for `t >= 1`
//!
//! ```text
//! F(x, t) = max( sup_{y in Y} beta^{|x-y| t^{1/2} + 1} phi^{-1}(y, t),  beta min_{y in Y} phi^{-1}(y, t) )
//! ```
//!
//! over a finite anchor set `Y` of cell centres, followed by the hull
//! `t^{1/q} max_{1 <= s <= t} F(x, s) / s^{1/q}` that restores (aDec)_q.
//! On `[0, 1]` the inverse is linear through the origin. `psi(x, .)` is the
//! exact inverse of that monotone table; inside `Omega`, `psi = phi`.

use std::collections::HashMap;
use std::sync::Arc;

use parking_lot::RwLock;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::conditions::{
    a1_to_a1omega_constant, a1omega_to_a1_constant, check_a0, check_a1, check_a2, check_a2_sweep, check_ainc_adec,
    sample_balls, sample_points, t_grid, ConstantBundle, Monotonicity, Perturbation, DEFAULT_T_POINTS,
    MAX_BALL_POINTS,
};
use crate::domain::{check_quasi_convex, sample_pairs, RasterDomain};
use crate::error::{input_err, Error, Result};
use crate::geometry::Point;
use crate::phi::{GridFunction, GrowthFunction, PhiFunction, Profile, ProfileFn};
use crate::report::ConditionReport;
use crate::scalar::{log_space, Real};

/// Settings of [`extend_phi_with`] and [`verify_extension`].
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionOptions {
    /// Anchor budget; larger sets are thinned by farthest-point sampling.
    pub max_anchors: usize,
    pub seed: u64,
    /// Table nodes per decade of `t`.
    pub nodes_per_decade: usize,
    /// Last table node; beyond it the inverse grows like `t^{1/q}`.
    pub t_top: f64,
    /// Constant `h` of the (A2) gate (extended by zero off `Omega`).
    pub a2_h: f64,
    /// β of the (A2) gate.
    pub a2_beta: f64,
    /// Points, balls and pairs drawn per check.
    pub samples: usize,
    pub t_points: usize,
    /// Largest `t` in the t grids of the checks.
    pub t_max: f64,
    /// Run the precondition gates.
    pub gates: bool,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        Self {
            max_anchors: 4096,
            seed: 0,
            nodes_per_decade: 10,
            t_top: 1e16,
            a2_h: 1.0,
            a2_beta: 0.1,
            samples: 256,
            t_points: DEFAULT_T_POINTS,
            t_max: 1e4,
            gates: true,
        }
    }
}

/// Inverse table of `psi(x, .)` at one point outside `Omega`, in logs.
#[derive(Debug)]
struct ExtProfile {
    ln_t: Arc<Vec<f64>>,
    ln_f: Vec<f64>,
    q: f64,
}

impl ExtProfile {
    fn step(&self) -> f64 {
        self.ln_t[1] - self.ln_t[0]
    }

    /// `psi^{-1}(tau)`.
    fn inv(&self, tau: f64) -> f64 {
        if !(tau > 0.0) {
            return 0.0;
        }
        let n = self.ln_t.len();
        if tau <= 1.0 {
            return tau * self.ln_f[0].exp();
        }
        let lt = tau.ln();
        if lt >= self.ln_t[n - 1] {
            return (self.ln_f[n - 1] + (lt - self.ln_t[n - 1]) / self.q).exp();
        }
        let i = ((lt / self.step()) as usize).min(n - 2);
        let s = ((lt - self.ln_t[i]) / (self.ln_t[i + 1] - self.ln_t[i])).clamp(0.0, 1.0);
        (self.ln_f[i] + s * (self.ln_f[i + 1] - self.ln_f[i])).exp()
    }

    /// `psi(s)`, the inverse function of [`Self::inv`].
    fn val(&self, s: f64) -> f64 {
        if !(s > 0.0) {
            return 0.0;
        }
        if s.is_infinite() {
            return f64::INFINITY;
        }
        let n = self.ln_t.len();
        let ls = s.ln();
        if ls <= self.ln_f[0] {
            return s / self.ln_f[0].exp();
        }
        if ls >= self.ln_f[n - 1] {
            return (self.ln_t[n - 1] + self.q * (ls - self.ln_f[n - 1])).exp();
        }
        let i = self.ln_f.partition_point(|&v| v <= ls).clamp(1, n - 1) - 1;
        let s = ((ls - self.ln_f[i]) / (self.ln_f[i + 1] - self.ln_f[i])).clamp(0.0, 1.0);
        (self.ln_t[i] + s * (self.ln_t[i + 1] - self.ln_t[i])).exp()
    }
}

struct Wrapped<T>(Arc<ExtProfile>, std::marker::PhantomData<fn() -> T>);

impl<T: Real> ProfileFn<T> for Wrapped<T> {
    fn value(&self, t: T) -> T {
        T::lit(self.0.val(t.as_f64()))
    }

    fn inverse(&self, tau: T, _tol: T) -> Result<T> {
        Ok(T::lit(self.0.inv(tau.as_f64())))
    }
}

/// Cap on memoised profiles.
const CACHE_LIMIT: usize = 1 << 18;

/// A growth function on the plane agreeing with `base` on `Omega`.
pub struct ExtendedPhi<T: Real> {
    base: PhiFunction<T>,
    domain: Arc<RasterDomain<T>>,
    bundle: ConstantBundle<T>,
    beta: T,
    anchors: Vec<Point<T>>,
    covering_radius: T,
    options: ExtensionOptions,
    ln_t: Arc<Vec<f64>>,
    /// `ln phi^{-1}(y_a, t_i)`, row per anchor.
    anchor_ln_inv: Vec<f64>,
    floor_ln: Vec<f64>,
    /// Anchors farther than `reach[i]` cannot beat the floor at `t_i`.
    reach: Vec<f64>,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    bucket_size: f64,
    far: Arc<ExtProfile>,
    cache: RwLock<HashMap<(i64, i64), Arc<ExtProfile>>>,
    gates: Vec<ConditionReport<T>>,
}

impl<T: Real> std::fmt::Debug for ExtendedPhi<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExtendedPhi")
            .field("family", &self.base.family().name())
            .field("beta", &self.beta)
            .field("anchors", &self.anchors.len())
            .finish()
    }
}

/// Summary of an extension for reports.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionSummary {
    pub family: String,
    pub beta_omega: f64,
    pub anchors: usize,
    pub covering_radius: f64,
    pub anchor_seed: u64,
    pub table_nodes: usize,
    pub reach: f64,
}

impl<T: Real> ExtendedPhi<T> {
    pub fn base(&self) -> &PhiFunction<T> {
        &self.base
    }

    pub fn domain(&self) -> &Arc<RasterDomain<T>> {
        &self.domain
    }

    pub fn bundle(&self) -> &ConstantBundle<T> {
        &self.bundle
    }

    /// The (A1)_Omega constant used in the sup formula.
    pub fn beta_omega(&self) -> T {
        self.beta
    }

    pub fn anchors(&self) -> &[Point<T>] {
        &self.anchors
    }

    /// Largest distance from an inside cell centre to the anchor set.
    pub fn covering_radius(&self) -> T {
        self.covering_radius
    }

    /// Reports of the precondition gates that were run.
    pub fn gates(&self) -> &[ConditionReport<T>] {
        &self.gates
    }

    pub fn options(&self) -> &ExtensionOptions {
        &self.options
    }

    pub fn summary(&self) -> ExtensionSummary {
        ExtensionSummary {
            family: self.base.family().name().to_string(),
            beta_omega: self.beta.as_f64(),
            anchors: self.anchors.len(),
            covering_radius: self.covering_radius.as_f64(),
            anchor_seed: self.options.seed,
            table_nodes: self.ln_t.len(),
            reach: self.bucket_size,
        }
    }

    fn bucket_of(&self, x: f64, y: f64) -> (i64, i64) {
        ((x / self.bucket_size).floor() as i64, (y / self.bucket_size).floor() as i64)
    }

    fn key(&self, x: Point<T>) -> (i64, i64) {
        let q = self.domain.h().as_f64() * 1e-6;
        let (a, b) = x.to_f64();
        ((a / q).round() as i64, (b / q).round() as i64)
    }

    fn build(&self, x: Point<T>) -> Arc<ExtProfile> {
        let (px, py) = x.to_f64();
        let (bi, bj) = self.bucket_of(px, py);
        let mut near: Vec<(usize, f64)> = Vec::new();
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(list) = self.buckets.get(&(bi + di, bj + dj)) {
                    for &a in list {
                        let (ax, ay) = self.anchors[a].to_f64();
                        let d = (px - ax).hypot(py - ay);
                        if d < self.bucket_size {
                            near.push((a, d));
                        }
                    }
                }
            }
        }
        if near.is_empty() {
            return self.far.clone();
        }
        let nt = self.ln_t.len();
        let lnb = self.beta.as_f64().ln();
        let mut ln_f = self.floor_ln.clone();
        for (i, slot) in ln_f.iter_mut().enumerate() {
            let st = (0.5 * self.ln_t[i]).exp();
            for &(a, d) in &near {
                if d < self.reach[i] {
                    let v = (d * st + 1.0) * lnb + self.anchor_ln_inv[a * nt + i];
                    if v > *slot {
                        *slot = v;
                    }
                }
            }
        }
        Arc::new(hull(self.ln_t.clone(), ln_f, self.bundle.q.as_f64()))
    }

    fn outside_profile(&self, x: Point<T>) -> Arc<ExtProfile> {
        let key = self.key(x);
        if let Some(p) = self.cache.read().get(&key) {
            return p.clone();
        }
        let p = self.build(x);
        if !Arc::ptr_eq(&p, &self.far) {
            let mut c = self.cache.write();
            if c.len() < CACHE_LIMIT {
                // concurrent builders insert identical tables
                c.entry(key).or_insert_with(|| p.clone());
            }
        }
        p
    }
}

fn hull(ln_t: Arc<Vec<f64>>, mut ln_f: Vec<f64>, q: f64) -> ExtProfile {
    let mut best = f64::NEG_INFINITY;
    for (i, v) in ln_f.iter_mut().enumerate() {
        best = best.max(*v - ln_t[i] / q);
        *v = best + ln_t[i] / q;
    }
    ExtProfile { ln_t, ln_f, q }
}

impl<T: Real> GrowthFunction<T> for ExtendedPhi<T> {
    fn profile(&self, x: Point<T>) -> Result<Profile<T>> {
        if self.domain.contains(x) {
            return self.base.profile(x);
        }
        if !(x.0.is_finite() && x.1.is_finite()) {
            return input_err("point is not finite");
        }
        Ok(Profile::Custom(Arc::new(Wrapped::<T>(self.outside_profile(x), std::marker::PhantomData))))
    }

    fn contains(&self, x: Point<T>) -> bool {
        x.0.is_finite() && x.1.is_finite()
    }
}

/// Farthest-point subsample of `cells` of size `k`, starting from a
/// random cell. Returns the chosen cells and the covering radius.
fn farthest_points<T: Real>(domain: &RasterDomain<T>, cells: &[usize], k: usize, rng: &mut impl Rng) -> (Vec<usize>, T) {
    let pts: Vec<(f64, f64)> = cells.iter().map(|&c| domain.center_k(c).to_f64()).collect();
    let mut dist = vec![f64::INFINITY; pts.len()];
    let mut chosen = Vec::with_capacity(k);
    let mut next = rng.gen_range(0..pts.len());
    let mut radius = 0.0;
    for _ in 0..k {
        chosen.push(cells[next]);
        let (cx, cy) = pts[next];
        dist.par_iter_mut().zip(pts.par_iter()).for_each(|(d, &(x, y))| {
            *d = d.min((x - cx).hypot(y - cy));
        });
        let (i, d) = dist
            .par_iter()
            .enumerate()
            .map(|(i, &d)| (i, d))
            .reduce(|| (usize::MAX, -1.0), |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a });
        radius = d;
        next = i;
    }
    chosen.sort_unstable();
    (chosen, T::lit(radius))
}

fn gate<T: Real>(r: ConditionReport<T>) -> Result<ConditionReport<T>> {
    if r.verdict {
        Ok(r)
    } else {
        Err(Error::Precondition {
            condition: r.condition.name().to_string(),
            report: Box::new(serde_json::to_value(&r)?),
        })
    }
}

/// Runs the precondition gates of the extension on `phi` over `domain`:
/// (A0) at `beta0`, (A1) at `beta1`, (A2) at the configured `h` and β for
/// each `s` of the sweep, (aDec)_q at `Lq` and (K, delta)-quasi-convexity.
/// The first failing report is returned as [`Error::Precondition`].
pub fn run_gates<T: Real>(
    phi: &PhiFunction<T>,
    domain: &RasterDomain<T>,
    bundle: &ConstantBundle<T>,
    options: &ExtensionOptions,
) -> Result<Vec<ConditionReport<T>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let pts = sample_points(domain, options.samples, &mut rng);
    let mut out = vec![gate(check_a0(phi, &pts, bundle.beta0)?)?];
    let balls = sample_balls(domain, options.samples, MAX_BALL_POINTS, &mut rng);
    out.push(gate(check_a1(phi, &balls, options.t_points, bundle.beta1)?)?);
    let diam = domain.diameter() + domain.h();
    let pairs = sample_pairs(domain, diam, options.samples, &mut rng);
    let h = Perturbation::Const(T::lit(options.a2_h));
    for r in check_a2_sweep(phi, &h, T::lit(options.a2_beta), &pairs, options.t_points)? {
        out.push(gate(r)?);
    }
    let ts = log_space(T::lit(1e-4), T::lit(options.t_max), options.t_points);
    out.push(gate(check_ainc_adec(phi, bundle.q, Monotonicity::Dec, bundle.lq, &pts, &ts)?)?);
    let qc_pairs = sample_pairs(domain, bundle.delta, options.samples, &mut rng);
    out.push(gate(check_quasi_convex(domain, bundle.k, bundle.delta, &qc_pairs))?);
    Ok(out)
}

/// Extends `phi` from `domain` to the plane with default options.
pub fn extend_phi<T: Real>(
    phi: &PhiFunction<T>,
    domain: Arc<RasterDomain<T>>,
    bundle: &ConstantBundle<T>,
) -> Result<ExtendedPhi<T>> {
    extend_phi_with(phi, domain, bundle, ExtensionOptions::default())
}

pub fn extend_phi_with<T: Real>(
    phi: &PhiFunction<T>,
    domain: Arc<RasterDomain<T>>,
    bundle: &ConstantBundle<T>,
    options: ExtensionOptions,
) -> Result<ExtendedPhi<T>> {
    bundle.validate()?;
    if bundle.n != 2 {
        return input_err("raster extension is planar (n = 2)");
    }
    if options.max_anchors == 0 || options.nodes_per_decade == 0 || !(options.t_top > 10.0) {
        return input_err("extension options out of range");
    }
    let gates = if options.gates {
        run_gates(phi, &domain, bundle, &options)?
    } else {
        Vec::new()
    };
    let beta = a1_to_a1omega_constant(bundle)?;
    let lnb = beta.as_f64().ln();

    let cells: Vec<usize> = domain.inside_cells().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0x5eed);
    let (anchor_cells, covering) = if cells.len() <= options.max_anchors {
        (cells.clone(), T::zero())
    } else {
        farthest_points(&domain, &cells, options.max_anchors, &mut rng)
    };
    let anchors: Vec<Point<T>> = anchor_cells.iter().map(|&k| domain.center_k(k)).collect();

    let decades = options.t_top.log10().ceil() as usize;
    let nt = decades * options.nodes_per_decade + 1;
    let ln_t: Arc<Vec<f64>> = Arc::new(log_space(1.0, 10f64.powi(decades as i32), nt).iter().map(|t| t.ln()).collect());

    let rows: Vec<Result<Vec<f64>>> = anchors
        .par_iter()
        .map(|&y| {
            let p = phi.profile(y)?;
            ln_t.iter()
                .map(|&lt| {
                    let v = p.inverse(T::lit(lt.exp()), T::default_tol())?.as_f64();
                    if !(v > 0.0) || !v.is_finite() {
                        return input_err(format!("phi^{{-1}} is {v} at {:?}", y.to_f64()));
                    }
                    Ok(v.ln())
                })
                .collect()
        })
        .collect();
    let mut anchor_ln_inv = Vec::with_capacity(anchors.len() * nt);
    for r in rows {
        anchor_ln_inv.extend(r?);
    }
    let mut floor_ln = vec![f64::INFINITY; nt];
    let mut top = vec![f64::NEG_INFINITY; nt];
    for row in anchor_ln_inv.chunks(nt) {
        for i in 0..nt {
            floor_ln[i] = floor_ln[i].min(row[i]);
            top[i] = top[i].max(row[i]);
        }
    }
    let reach: Vec<f64> = (0..nt)
        .map(|i| (top[i] - floor_ln[i]) / (-lnb * (0.5 * ln_t[i]).exp()))
        .collect();
    for v in floor_ln.iter_mut() {
        *v += lnb;
    }
    let bucket_size = reach.iter().cloned().fold(0.0, f64::max).max(domain.h().as_f64() * 1e-3);
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (a, y) in anchors.iter().enumerate() {
        let (x, yy) = y.to_f64();
        buckets
            .entry(((x / bucket_size).floor() as i64, (yy / bucket_size).floor() as i64))
            .or_default()
            .push(a);
    }
    let q = bundle.q.as_f64();
    let far = Arc::new(hull(ln_t.clone(), floor_ln.clone(), q));
    Ok(ExtendedPhi {
        base: phi.clone(),
        domain,
        bundle: *bundle,
        beta,
        anchors,
        covering_radius: covering,
        options,
        ln_t,
        anchor_ln_inv,
        floor_ln,
        reach,
        buckets,
        bucket_size,
        far,
        cache: RwLock::new(HashMap::new()),
        gates,
    })
}

/// Raster covering a box three times the size of the domain's inside
/// bounding box (same centre), with `cells` cells along the longer side.
pub fn verification_box<T: Real>(domain: &RasterDomain<T>, cells: usize) -> Result<RasterDomain<T>> {
    let (lo, hi) = domain.inside_bounds();
    let (w, hgt) = (hi.0 - lo.0, hi.1 - lo.1);
    let side = w.max(hgt) * T::lit(3.0);
    let c = Point((lo.0 + hi.0) / T::lit(2.0), (lo.1 + hi.1) / T::lit(2.0));
    let h = side / T::lit(cells as f64);
    let origin = Point(c.0 - side / T::lit(2.0), c.1 - side / T::lit(2.0));
    RasterDomain::full(origin, h, cells, cells)
}

/// Constants at which [`verify_extension`] tests `psi`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExtensionConstants {
    pub beta0: f64,
    pub beta1: f64,
    pub beta_omega: f64,
    pub a2_beta: f64,
    pub lq: f64,
}

/// Constants the construction provides for `psi`:
/// - (A0) with `beta beta0`;
/// - (A1)_Omega with `beta / L`, hence (A1) with `(beta/L)^{2/sqrt(pi)+1}`;
/// - (A2) with the gate's β, reduced to `beta / L` times the smallest ratio
///   `min phi^{-1} / max phi^{-1}` over `Omega` for `t` in `[1, 100]`;
/// - (aDec)_q with `Lq`.
pub fn extension_constants<T: Real>(ext: &ExtendedPhi<T>) -> Result<ExtensionConstants> {
    let b = ext.bundle();
    let beta = ext.beta_omega().as_f64();
    let l = b.l.as_f64();
    let beta_omega = beta / l;
    let beta1 = a1omega_to_a1_constant(T::lit(beta_omega), 2)?.as_f64();
    // smallest min/max ratio of phi^{-1} over the anchors for t in [1, 100]
    let nt = ext.ln_t.len();
    let upto = ext.ln_t.iter().take_while(|&&lt| lt <= 100f64.ln() + 1e-9).count();
    let spread = (0..upto)
        .map(|i| ext.floor_ln[i] - beta.ln() - ext.anchor_ln_inv.chunks(nt).map(|r| r[i]).fold(f64::NEG_INFINITY, f64::max))
        .fold(0.0, f64::min)
        .exp();
    let a2 = ext.options.a2_beta.min(beta * spread / l);
    Ok(ExtensionConstants {
        beta0: beta * b.beta0.as_f64(),
        beta1,
        beta_omega,
        a2_beta: a2,
        lq: b.lq.as_f64(),
    })
}

/// Checks (A0), (A1), (A2) at `s = 10` and (aDec)_q for `psi` on samples
/// from [`verification_box`], at the constants of [`extension_constants`].
pub fn verify_extension<T: Real>(ext: &ExtendedPhi<T>, samples: usize, seed: u64) -> Result<Vec<ConditionReport<T>>> {
    let c = extension_constants(ext)?;
    let vbox = verification_box(ext.domain(), 96)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = sample_points(&vbox, samples, &mut rng);
    let a0 = check_a0(ext, &pts, T::lit(c.beta0))?;
    let balls = sample_balls(&vbox, samples, MAX_BALL_POINTS, &mut rng);
    let a1 = check_a1(ext, &balls, ext.options.t_points, T::lit(c.beta1))?;
    let pairs = sample_pairs(&vbox, vbox.diameter() + vbox.h(), samples, &mut rng);
    let h = Perturbation::Grid(Arc::new(GridFunction::from_fn(ext.domain().clone(), |_| {
        T::lit(ext.options.a2_h)
    })));
    let a2 = check_a2(ext, T::lit(10.0), &h, T::lit(c.a2_beta), &pairs, ext.options.t_points)?;
    let ts = log_space(T::lit(1e-4), T::lit(ext.options.t_max), ext.options.t_points);
    let dec = check_ainc_adec(ext, ext.bundle().q, Monotonicity::Dec, T::lit(c.lq), &pts, &ts)?;
    Ok(vec![a0, a1, a2, dec])
}

/// Pairs of the verification box for (A1)_Omega checks of `psi`.
pub fn verification_pairs<T: Real>(ext: &ExtendedPhi<T>, n: usize, seed: u64) -> Result<(Vec<(Point<T>, Point<T>)>, Vec<T>)> {
    let vbox = verification_box(ext.domain(), 96)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = sample_pairs(&vbox, vbox.diameter() + vbox.h(), n, &mut rng);
    Ok((pairs, t_grid(T::lit(ext.options.t_max), ext.options.t_points)))
}
