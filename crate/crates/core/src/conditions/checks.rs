use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{input_err, Error, Result};
use crate::geometry::Point;
use crate::phi::{GridFunction, GrowthFunction, Profile};
use crate::report::{le_tol, Condition, ConditionReport, ReportBuilder, Witness};
use crate::scalar::{log_space, Real};

use super::sampling::BallSample;

/// Relative slack granted to every inequality, well above the inversion
/// tolerance so that reported witnesses survive re-evaluation.
pub fn check_rtol<T: Real>() -> T {
    T::default_tol() * T::lit(100.0)
}

/// `phi^{-1}(tau)` with an unreachable level mapped to `+inf`.
pub(crate) fn inverse_or_inf<T: Real>(p: &Profile<T>, tau: T) -> Result<T> {
    match p.inverse(tau, T::default_tol()) {
        Err(Error::Overflow { .. }) => Ok(T::infinity()),
        r => r,
    }
}

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if !(beta > T::zero() && beta <= T::one()) {
        return input_err(format!("beta must lie in (0,1], got {beta}"));
    }
    Ok(())
}

/// Ratio `num / den` as a β-type constant: 1 when `num >= den`.
fn ratio_constant<T: Real>(num: T, den: T) -> T {
    if num >= den {
        T::one()
    } else if den.is_infinite() || num == T::zero() {
        T::zero()
    } else {
        num / den
    }
}

/// (A0): `beta <= phi^{-1}(x, 1) <= 1/beta` at every sample point.
///
/// The equivalent form `phi(x, beta) <= 1 <= phi(x, 1/beta)` is evaluated
/// as well; points where the two forms disagree produce a warning.
pub fn check_a0<T: Real, G: GrowthFunction<T> + ?Sized>(
    phi: &G,
    points: &[Point<T>],
    beta: T,
) -> Result<ConditionReport<T>> {
    check_beta(beta)?;
    if points.is_empty() {
        return input_err("(A0) check needs at least one sample point");
    }
    let rtol = check_rtol::<T>();
    let rows: Vec<Result<(T, bool, bool)>> = points
        .par_iter()
        .map(|&x| {
            let p = phi.profile(x)?;
            let inv = inverse_or_inf(&p, T::one())?;
            let lower = p.value(beta);
            let upper = p.value(beta.recip());
            let phi_form = le_tol(lower, T::one(), rtol) && le_tol(T::one(), upper, rtol);
            let inv_form = le_tol(beta, inv, rtol) && le_tol(inv, beta.recip(), rtol);
            Ok((inv, inv_form, phi_form))
        })
        .collect();
    let mut b = ReportBuilder::new(Condition::A0, beta).param("beta", beta.as_f64());
    b.samples.points = points.len();
    b.samples.t_values = 1;
    b.samples.evaluations = 3 * points.len();
    for (&x, row) in points.iter().zip(rows) {
        let (inv, inv_ok, phi_ok) = row?;
        b.constant(ratio_constant(inv, T::one()).min(ratio_constant(T::one(), inv)));
        if !inv_ok {
            let (lhs, rhs) = if inv < beta { (beta, inv) } else { (inv, beta.recip()) };
            b.fail(Witness {
                x,
                y: None,
                t: Some(T::one()),
                s: None,
                lhs,
                rhs,
            });
        }
        if inv_ok != phi_ok {
            b.warn(format!(
                "at {:?} the inverse form {} but phi(x, beta) <= 1 <= phi(x, 1/beta) {}",
                x.to_f64(),
                if inv_ok { "holds" } else { "fails" },
                if phi_ok { "holds" } else { "fails" }
            ));
        }
    }
    Ok(b.finish())
}

/// (A1): `beta phi^{-1}(x, t) <= phi^{-1}(y, t)` for all `x, y` among the
/// cell centres of each ball and `n_t` log-spaced `t` in `[1, 1/|B|]`.
///
/// For each ball and `t` only the largest and smallest inverse matter, so
/// every pair of the ball is covered.
pub fn check_a1<T: Real, G: GrowthFunction<T> + ?Sized>(
    phi: &G,
    balls: &[BallSample<T>],
    n_t: usize,
    beta: T,
) -> Result<ConditionReport<T>> {
    check_beta(beta)?;
    if balls.iter().all(|b| b.points.is_empty()) {
        return input_err("no sampled ball meets the domain");
    }
    let rtol = check_rtol::<T>();
    type Row<T> = Vec<(T, Option<Witness<T>>)>;
    let rows: Vec<Result<Row<T>>> = balls
        .par_iter()
        .map(|ball| {
            if ball.points.is_empty() {
                return Ok(Vec::new());
            }
            let profiles = ball.points.iter().map(|&x| phi.profile(x)).collect::<Result<Vec<_>>>()?;
            let mut out = Vec::new();
            for t in ball.t_grid(n_t) {
                let mut hi = (0, T::neg_infinity());
                let mut lo = (0, T::infinity());
                for (i, p) in profiles.iter().enumerate() {
                    let v = inverse_or_inf(p, t)?;
                    if v > hi.1 {
                        hi = (i, v);
                    }
                    if v < lo.1 {
                        lo = (i, v);
                    }
                }
                let lhs = beta * hi.1;
                let w = (!le_tol(lhs, lo.1, rtol)).then(|| Witness {
                    x: ball.points[hi.0],
                    y: Some(ball.points[lo.0]),
                    t: Some(t),
                    s: None,
                    lhs,
                    rhs: lo.1,
                });
                out.push((ratio_constant(lo.1, hi.1), w));
            }
            Ok(out)
        })
        .collect();
    let mut b = ReportBuilder::new(Condition::A1, beta)
        .param("beta", beta.as_f64())
        .param("t_points", n_t as f64);
    b.samples.balls = balls.len();
    for (ball, row) in balls.iter().zip(rows) {
        let row = row?;
        b.samples.points += ball.points.len();
        b.samples.t_values += row.len();
        b.samples.evaluations += row.len() * ball.points.len();
        for (c, w) in row {
            b.constant(c);
            if let Some(w) = w {
                b.fail(w);
            }
        }
    }
    Ok(b.finish())
}

/// (A1)_Omega: `beta^{|x-y| t^{1/2} + 1} phi^{-1}(x, t) <= phi^{-1}(y, t)`
/// for each sampled pair, in both orders, and each `t >= 1` in `ts`.
pub fn check_a1_omega<T: Real, G: GrowthFunction<T> + ?Sized>(
    phi: &G,
    pairs: &[(Point<T>, Point<T>)],
    ts: &[T],
    beta: T,
) -> Result<ConditionReport<T>> {
    check_beta(beta)?;
    if ts.iter().any(|&t| !(t >= T::one())) {
        return input_err("(A1)_Omega is stated for t >= 1");
    }
    let rtol = check_rtol::<T>();
    let lnb = beta.ln();
    type Row<T> = Vec<(T, Option<Witness<T>>)>;
    let rows: Vec<Result<Row<T>>> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let (px, py) = (phi.profile(x)?, phi.profile(y)?);
            let d = x.dist(&y);
            let mut out = Vec::with_capacity(2 * ts.len());
            for &t in ts {
                let (ix, iy) = (inverse_or_inf(&px, t)?, inverse_or_inf(&py, t)?);
                let e = d * t.sqrt() + T::one();
                let decay = (e * lnb).exp();
                for (a, b, va, vb) in [(x, y, ix, iy), (y, x, iy, ix)] {
                    let lhs = decay * va;
                    let c = ratio_constant(vb, va);
                    let c = if c > T::zero() && c < T::one() { (c.ln() / e).exp() } else { c };
                    let w = (!le_tol(lhs, vb, rtol)).then(|| Witness {
                        x: a,
                        y: Some(b),
                        t: Some(t),
                        s: None,
                        lhs,
                        rhs: vb,
                    });
                    out.push((c, w));
                }
            }
            Ok(out)
        })
        .collect();
    let mut b = ReportBuilder::new(Condition::A1Omega, beta).param("beta", beta.as_f64());
    b.samples.pairs = pairs.len();
    b.samples.t_values = ts.len();
    b.samples.evaluations = 2 * pairs.len() * ts.len();
    for row in rows {
        for (c, w) in row? {
            b.constant(c);
            if let Some(w) = w {
                b.fail(w);
            }
        }
    }
    Ok(b.finish())
}

/// The function `h` of (A2): a constant, or samples on a grid extended by
/// zero off its inside cells.
#[derive(Clone, Debug)]
pub enum Perturbation<T> {
    Const(T),
    Grid(Arc<GridFunction<T>>),
}

impl<T: Real> Perturbation<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Perturbation::Const(c) => *c >= T::zero() && c.is_finite(),
            Perturbation::Grid(g) => g.values().iter().all(|v| *v >= T::zero()),
        };
        if ok {
            Ok(())
        } else {
            input_err("the (A2) function h must be non-negative and bounded")
        }
    }

    pub fn at(&self, x: Point<T>) -> T {
        match self {
            Perturbation::Const(c) => *c,
            Perturbation::Grid(g) => {
                let d = g.domain();
                match d.cell_of(x) {
                    Some(k) if d.is_inside(k) => g.values()[k],
                    _ => T::zero(),
                }
            }
        }
    }
}

/// Smallest `t` sampled by (A2) relative to `s` when `h(x) + h(y) = 0`.
pub const A2_T_FLOOR: f64 = 1e-6;

/// (A2) for a fixed `s`: `beta phi^{-1}(x, t) <= phi^{-1}(y, t)` for
/// `t in [h(x) + h(y), s]`, both orders of each pair. Pairs with an empty
/// interval are skipped. When `h(x) + h(y) = 0` the grid starts at
/// `A2_T_FLOOR * s`.
pub fn check_a2<T: Real, G: GrowthFunction<T> + ?Sized>(
    phi: &G,
    s: T,
    h: &Perturbation<T>,
    beta: T,
    pairs: &[(Point<T>, Point<T>)],
    n_t: usize,
) -> Result<ConditionReport<T>> {
    check_beta(beta)?;
    if !(s > T::zero()) || !s.is_finite() {
        return input_err(format!("s must be positive, got {s}"));
    }
    h.validate()?;
    let rtol = check_rtol::<T>();
    type Row<T> = Option<Vec<(T, Option<Witness<T>>)>>;
    let rows: Vec<Result<Row<T>>> = pairs
        .par_iter()
        .map(|&(x, y)| {
            let lo = h.at(x) + h.at(y);
            if lo > s {
                return Ok(None);
            }
            let start = if lo > T::zero() { lo } else { s * T::lit(A2_T_FLOOR) };
            let ts = if start < s { log_space(start, s, n_t.max(2)) } else { vec![s] };
            let (px, py) = (phi.profile(x)?, phi.profile(y)?);
            let mut out = Vec::with_capacity(2 * ts.len());
            for t in ts {
                let (ix, iy) = (inverse_or_inf(&px, t)?, inverse_or_inf(&py, t)?);
                for (a, b, va, vb) in [(x, y, ix, iy), (y, x, iy, ix)] {
                    let lhs = beta * va;
                    let w = (!le_tol(lhs, vb, rtol)).then(|| Witness {
                        x: a,
                        y: Some(b),
                        t: Some(t),
                        s: None,
                        lhs,
                        rhs: vb,
                    });
                    out.push((ratio_constant(vb, va), w));
                }
            }
            Ok(Some(out))
        })
        .collect();
    let mut b = ReportBuilder::new(Condition::A2, beta)
        .param("beta", beta.as_f64())
        .param("s", s.as_f64())
        .param("t_floor", A2_T_FLOOR);
    let mut skipped = 0usize;
    for row in rows {
        match row? {
            None => skipped += 1,
            Some(row) => {
                b.samples.pairs += 1;
                b.samples.evaluations += row.len();
                for (c, w) in row {
                    b.constant(c);
                    if let Some(w) = w {
                        b.fail(w);
                    }
                }
            }
        }
    }
    b.samples.t_values = n_t;
    let b = b.param("skipped_pairs", skipped as f64);
    Ok(b.finish())
}

/// Values of `s` used by [`check_a2_sweep`].
pub const A2_SWEEP: [f64; 3] = [1.0, 10.0, 100.0];

/// [`check_a2`] for each `s` in [`A2_SWEEP`].
pub fn check_a2_sweep<T: Real, G: GrowthFunction<T> + ?Sized>(
    phi: &G,
    h: &Perturbation<T>,
    beta: T,
    pairs: &[(Point<T>, Point<T>)],
    n_t: usize,
) -> Result<Vec<ConditionReport<T>>> {
    A2_SWEEP
        .iter()
        .map(|&s| check_a2(phi, T::lit(s), h, beta, pairs, n_t))
        .collect()
}

/// Direction of an almost monotonicity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    /// (aInc)_p: `phi(x, s)/s^p <= L phi(x, t)/t^p` for `s < t`.
    Inc,
    /// (aDec)_q: `phi(x, t)/t^q <= L phi(x, s)/s^q` for `s < t`.
    Dec,
}

/// (aInc)_p or (aDec)_q over all pairs `s < t` of the sampled `ts`.
pub fn check_ainc_adec<T: Real, G: GrowthFunction<T> + ?Sized>(
    phi: &G,
    exponent: T,
    mode: Monotonicity,
    l: T,
    points: &[Point<T>],
    ts: &[T],
) -> Result<ConditionReport<T>> {
    if !(exponent > T::zero()) || !exponent.is_finite() {
        return input_err(format!("exponent must be positive, got {exponent}"));
    }
    if !(l >= T::one()) {
        return input_err(format!("L must be >= 1, got {l}"));
    }
    let mut ts: Vec<T> = ts.to_vec();
    if ts.iter().any(|&t| !(t > T::zero())) {
        return input_err("t samples must be positive");
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ts.dedup();
    let rtol = check_rtol::<T>();
    type Row<T> = Vec<(T, Option<Witness<T>>)>;
    let rows: Vec<Result<Row<T>>> = points
        .par_iter()
        .map(|&x| {
            let p = phi.profile(x)?;
            let g: Vec<T> = ts.iter().map(|&t| p.value(t) / t.powf(exponent)).collect();
            let mut out = Vec::with_capacity(ts.len());
            // index of the running max (Inc) or min (Dec) of g over s < t
            let mut ext = 0usize;
            for j in 1..ts.len() {
                let better = match mode {
                    Monotonicity::Inc => g[j - 1] > g[ext],
                    Monotonicity::Dec => g[j - 1] < g[ext],
                };
                if better {
                    ext = j - 1;
                }
                let (lhs, den) = match mode {
                    Monotonicity::Inc => (g[ext], g[j]),
                    Monotonicity::Dec => (g[j], g[ext]),
                };
                let need = if lhs == den {
                    T::one()
                } else if den == T::zero() {
                    T::infinity()
                } else {
                    lhs / den
                };
                let rhs = l * den;
                let w = (!le_tol(lhs, rhs, rtol)).then(|| Witness {
                    x,
                    y: None,
                    t: Some(ts[j]),
                    s: Some(ts[ext]),
                    lhs,
                    rhs,
                });
                out.push((need, w));
            }
            Ok(out)
        })
        .collect();
    let cond = match mode {
        Monotonicity::Inc => Condition::AInc,
        Monotonicity::Dec => Condition::ADec,
    };
    let key = if mode == Monotonicity::Inc { "p" } else { "q" };
    let mut b = ReportBuilder::new(cond, l)
        .param(key, exponent.as_f64())
        .param("L", l.as_f64());
    b.samples.points = points.len();
    b.samples.t_values = ts.len();
    b.samples.evaluations = points.len() * ts.len();
    for row in rows {
        for (c, w) in row? {
            b.constant(c);
            if let Some(w) = w {
                b.fail(w);
            }
        }
    }
    Ok(b.finish())
}

/// Smallest `L >= 1` with `phi^{-1}(x,t)/t <= L phi^{-1}(x,1)` and
/// `phi^{-1}(x,1) <= L phi^{-1}(x,t)/t^{1/q}` over the samples, `t >= 1`.
pub fn inverse_growth_constant<T: Real, G: GrowthFunction<T> + ?Sized>(
    phi: &G,
    points: &[Point<T>],
    ts: &[T],
    q: T,
) -> Result<T> {
    if !(q >= T::one()) {
        return input_err(format!("q must be >= 1, got {q}"));
    }
    if ts.iter().any(|&t| !(t >= T::one())) {
        return input_err("t samples must be >= 1");
    }
    let per: Vec<Result<T>> = points
        .par_iter()
        .map(|&x| {
            let p = phi.profile(x)?;
            let one = inverse_or_inf(&p, T::one())?;
            if !(one > T::zero()) || one.is_infinite() {
                return input_err(format!("phi^{{-1}}(x, 1) = {one} at {:?}", x.to_f64()));
            }
            let mut l = T::one();
            for &t in ts {
                let v = inverse_or_inf(&p, t)?;
                l = l.max(v / t / one).max(one * t.powf(q.recip()) / v);
            }
            Ok(l)
        })
        .collect();
    let mut l = T::one();
    for v in per {
        l = l.max(v?);
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditions::sampling::{sample_balls, sample_points, t_grid};
    use crate::domain::shapes;
    use crate::phi::{Field, PhiFunction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    fn high_v(y: f64) -> Point<f64> {
        Point(2.0, y)
    }

    #[test]
    fn a0_examples() {
        let d = shapes::unit_square(0.1f64).unwrap();
        let pts = sample_points(&d, 1000, &mut rng());
        let pw = PhiFunction::power(3.0).unwrap();
        let r = check_a0(&pw, &pts, 1.0).unwrap();
        assert!(r.verdict && r.best_constant == 1.0 && r.warnings.is_empty());

        let dp = PhiFunction::double_phase(2.0, 3.0, Field::Const(1.0)).unwrap();
        let r = check_a0(&dp, &pts, 0.5).unwrap();
        // root of t^2 + t^3 = 1 by Newton from 1
        let mut t = 1.0f64;
        for _ in 0..50 {
            t -= (t * t + t * t * t - 1.0) / (2.0 * t + 3.0 * t * t);
        }
        assert!(r.verdict && (r.best_constant - t).abs() < 1e-9, "{r:?}");
        assert!((t - 0.75488).abs() < 1e-5);

        let db = PhiFunction::example_dumbbell();
        let pts = vec![Point(-2.0, 5.0), high_v(2.0), high_v(3.0)];
        let r = check_a0(&db, &pts, 0.9).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.witnesses[0].x, high_v(3.0));
        assert_eq!(r.witnesses[0].lhs, 3.0);
        assert!((r.best_constant - 1.0 / 3.0).abs() < 1e-12);
        assert!(check_a0(&pw, &[], 0.5).is_err());
    }

    #[test]
    fn a1_examples() {
        let d = shapes::l_shape(1.0f64 / 16.0).unwrap();
        let balls = sample_balls(&d, 64, 256, &mut rng());
        let orl = PhiFunction::orlicz_expr("t^2*ln(e+t)").unwrap();
        let r = check_a1(&orl, &balls, 16, 0.999).unwrap();
        assert!(r.verdict && r.best_constant == 1.0);

        let db = PhiFunction::example_dumbbell();
        let dom = shapes::dumbbell(0.05f64, 12.0).unwrap();
        let ball = BallSample::new(&dom, Point(2.0, 6.0), 0.5);
        let r = check_a1(&db, &[ball], 4, 0.99).unwrap();
        assert!(!r.verdict);
        let w = &r.witnesses[0];
        assert!(w.x.1 > w.y.unwrap().1);
        let empty = BallSample { center: Point(0.0, 0.0), radius: 0.1, points: vec![] };
        assert!(check_a1(&db, &[empty], 4, 0.5).is_err());
    }

    #[test]
    fn a1_omega_examples() {
        let pw = PhiFunction::power(2.0).unwrap();
        let pairs = vec![(Point(0.0, 0.0), Point(5.0, 1.0)), (Point(1.0, 1.0), Point(1.0, 1.0))];
        let ts = t_grid(1e6, 32);
        for beta in [0.01, 0.5, 0.99] {
            assert!(check_a1_omega(&pw, &pairs, &ts, beta).unwrap().verdict);
        }
        let db = PhiFunction::example_dumbbell();
        for beta in [0.1f64, 0.5, 0.9] {
            let y = 2.0 * beta.powi(-5);
            let r = check_a1_omega(&db, &[(Point(-2.0, y), Point(2.0, y))], &[1.0], beta).unwrap();
            assert!(!r.verdict);
            let w = &r.witnesses[0];
            assert_eq!(w.x, Point(2.0, y));
            assert!((w.lhs - 2.0).abs() < 1e-9 && w.rhs == 1.0);
        }
        assert!(check_a1_omega(&pw, &pairs, &[0.5], 0.5).is_err());
    }

    #[test]
    fn a2_examples() {
        let d = shapes::unit_disk(0.2f64).unwrap();
        let pts = sample_points(&d, 40, &mut rng());
        let pairs: Vec<_> = pts.iter().zip(pts.iter().rev()).map(|(a, b)| (*a, *b)).collect();
        let orl = PhiFunction::orlicz_expr("t^3").unwrap();
        let r = check_a2(&orl, 1.0, &Perturbation::Const(0.0), 0.99, &pairs, 16).unwrap();
        assert!(r.verdict);

        let db = PhiFunction::example_dumbbell();
        let pairs = vec![(Point(-2.0, 5.0), high_v(5.0))];
        let r = check_a2(&db, 1.0, &Perturbation::Const(0.0), 0.9, &pairs, 8).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.witnesses[0].x, high_v(5.0));

        // the interval [h(x) + h(y), s] is empty
        let r = check_a2(&db, 1.0, &Perturbation::Const(1.0), 0.9, &pairs, 8).unwrap();
        assert!(r.verdict && r.param("skipped_pairs") == Some(1.0));
        assert!(check_a2(&db, 1.0, &Perturbation::Const(-1.0), 0.9, &pairs, 8).is_err());
        assert_eq!(check_a2_sweep(&orl, &Perturbation::Const(0.0), 0.5, &pairs[..0], 4).unwrap().len(), 3);
    }

    #[test]
    fn a2_with_local_perturbation() {
        // p = 2 away from the origin, up to 3 near it; h is 1 where p differs
        let d = std::sync::Arc::new(shapes::unit_square(0.05f64).unwrap());
        let p = Field::expr("2 + max(0, 1 - 4*((x1-0.5)^2 + (x2-0.5)^2))").unwrap();
        let phi = PhiFunction::variable_exponent(p);
        let bump = GridFunction::from_fn(d.clone(), |x| {
            if (x.0 - 0.5).powi(2) + (x.1 - 0.5).powi(2) < 0.25 { 1.0 } else { 0.0 }
        });
        let pts = sample_points(&d, 60, &mut rng());
        let pairs: Vec<_> = pts.iter().zip(pts.iter().skip(1)).map(|(a, b)| (*a, *b)).collect();
        let h = Perturbation::Grid(std::sync::Arc::new(bump));
        let r = check_a2(&phi, 1.0, &h, 0.1, &pairs, 16).unwrap();
        assert!(r.verdict, "{:?}", r.witnesses.first());
    }

    #[test]
    fn growth_examples() {
        let pts = vec![Point(0.0, 0.0), Point(1.0, 2.0)];
        let ts = log_space(1e-4, 1e4, 64);
        let pw = PhiFunction::power(2.0).unwrap();
        assert!(check_ainc_adec(&pw, 2.0, Monotonicity::Inc, 1.0, &pts, &ts).unwrap().verdict);
        assert!(!check_ainc_adec(&pw, 1.5, Monotonicity::Dec, 1.0, &pts, &ts).unwrap().verdict);

        let dp = PhiFunction::double_phase(2.0, 3.0, Field::expr("x1*x1 + 0.5").unwrap()).unwrap();
        assert!(check_ainc_adec(&dp, 2.0, Monotonicity::Inc, 1.0, &pts, &ts).unwrap().verdict);
        assert!(check_ainc_adec(&dp, 3.0, Monotonicity::Dec, 1.0, &pts, &ts).unwrap().verdict);
        let r = check_ainc_adec(&dp, 2.5, Monotonicity::Dec, 1.0, &pts, &ts).unwrap();
        assert!(!r.verdict);
        let w = &r.witnesses[0];
        assert!(w.s.unwrap() < w.t.unwrap());

        let db = PhiFunction::example_dumbbell();
        let dpts = vec![Point(-2.0, 0.0), high_v(7.0)];
        assert!(check_ainc_adec(&db, 1.0, Monotonicity::Dec, 1.0, &dpts, &ts).unwrap().verdict);
    }

    #[test]
    fn growth_constant_of_inverse() {
        let pw = PhiFunction::power(2.0).unwrap();
        let ts = t_grid(1e6, 32);
        // sqrt(t)/t <= 1 and 1 <= sqrt(t)/t^{1/2}
        let l: f64 = inverse_growth_constant(&pw, &[Point(0.0, 0.0)], &ts, 2.0).unwrap();
        assert!((l - 1.0).abs() < 1e-8);
        let l = inverse_growth_constant(&pw, &[Point(0.0, 0.0)], &ts, 1.0).unwrap();
        assert!((l - 1e3).abs() < 1e-5);
    }

    #[test]
    fn witnesses_survive_reevaluation() {
        let db = PhiFunction::example_dumbbell();
        let dom = shapes::dumbbell(0.1f64, 8.0).unwrap();
        let balls = sample_balls(&dom, 64, 256, &mut rng());
        let r = check_a1(&db, &balls, 8, 0.9).unwrap();
        assert!(!r.verdict);
        for w in &r.witnesses {
            let t = w.t.unwrap();
            let ix = db.inverse(w.x, t, 1e-12).unwrap();
            let iy = db.inverse(w.y.unwrap(), t, 1e-12).unwrap();
            assert!(0.9 * ix > iy * (1.0 + 1e-6));
        }
    }
}
