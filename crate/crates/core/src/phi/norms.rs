use rayon::prelude::*;

use crate::error::{input_err, Error, Result};
use crate::extended::Extended;
use crate::geometry::Point;
use crate::report::{Condition, ConditionReport, ReportBuilder, Witness};
use crate::scalar::{CompensatedSum, Real};

use super::function::{GrowthFunction, LocalPhi};
use super::grid::{GridFunction, MultiIndex};

/// Cells per quadrature chunk. Chunk boundaries are fixed, so the
/// reduction order does not depend on the thread count.
const CHUNK: usize = 4096;

/// Bracket limits for the Luxemburg scale search.
const LAMBDA_CAP: f64 = 1e18;
const LAMBDA_FLOOR: f64 = 1e-18;

/// `sum_k phi_k(scale |v_k|) * area` over the cells with a profile.
pub(crate) fn modular_local<T: Real>(local: &LocalPhi<T>, vals: &[T], scale: T, area: T) -> Result<Extended<T>> {
    let partial: Vec<Result<Option<CompensatedSum<T>>>> = vals
        .par_chunks(CHUNK)
        .enumerate()
        .map(|(c, chunk)| {
            let mut acc = CompensatedSum::new();
            for (i, &v) in chunk.iter().enumerate() {
                if v == T::zero() {
                    continue;
                }
                let Some(p) = local.get(c * CHUNK + i) else { continue };
                let f = p.value(scale * v.abs());
                if f.is_nan() || f < T::zero() {
                    return input_err(format!("growth function returned {f} in cell {}", c * CHUNK + i));
                }
                if f.is_infinite() {
                    return Ok(None);
                }
                acc.add(f);
            }
            Ok(Some(acc))
        })
        .collect();
    let mut total = CompensatedSum::new();
    for p in partial {
        match p? {
            Some(s) => total.add(s.value()),
            None => return Ok(Extended::Infinite),
        }
    }
    Ok(Extended::from_real(total.value() * area))
}

/// `rho_phi(u) = int_Omega phi(x, |u(x)|) dx` by the midpoint rule over
/// the inside cells of `u`'s grid.
pub fn modular<T: Real, G: GrowthFunction<T> + ?Sized>(phi: &G, u: &GridFunction<T>) -> Result<Extended<T>> {
    let local = resolve(phi, u)?;
    modular_local(&local, u.values(), T::one(), u.domain().cell_area())
}

fn resolve<T: Real, G: GrowthFunction<T> + ?Sized>(phi: &G, u: &GridFunction<T>) -> Result<LocalPhi<T>> {
    LocalPhi::resolve(phi, u.domain()).map_err(|e| match e {
        Error::OutsideDomain(x, y) => Error::Input(format!(
            "grid function lives partly outside the growth function's domain, e.g. at ({x}, {y})"
        )),
        other => other,
    })
}

/// Luxemburg norm of per-cell values against resolved profiles.
///
/// Keeps a bracket `lo < hi` with `rho(v / lo) > 1 >= rho(v / hi)` and
/// shrinks it by Illinois steps on `ln rho` against `ln lambda`, falling
/// back to bisection when a side stalls. Stops once `hi / lo <= 1 + tol`
/// and returns `sqrt(lo hi)`, which meets both halves of the certificate
/// `rho(v / (l (1 + tol))) <= 1 < rho(v / (l (1 - tol)))`.
pub(crate) fn luxemburg_local<T: Real>(local: &LocalPhi<T>, vals: &[T], area: T, tol: T) -> Result<T> {
    if !(tol > T::zero() && tol < T::one()) {
        return input_err("tolerance must lie in (0, 1)");
    }
    let vmax = vals.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if vmax == T::zero() {
        return Ok(T::zero());
    }
    // g(s) = ln rho(v e^{-s}), non-increasing in s
    let g = |s: T| -> Result<T> {
        Ok(match modular_local(local, vals, (-s).exp(), area)? {
            Extended::Infinite => T::infinity(),
            Extended::Finite(r) => r.ln(),
        })
    };
    let step = T::lit(2.0).ln();
    let (cap, floor) = (T::lit(LAMBDA_CAP).ln(), T::lit(LAMBDA_FLOOR).ln());
    let s0 = vmax.ln();
    let g0 = g(s0)?;
    let (mut slo, mut glo, mut shi, mut ghi);
    if g0 > T::zero() {
        (slo, glo) = (s0, g0);
        (shi, ghi) = (s0 + step, g(s0 + step)?);
        while ghi > T::zero() {
            (slo, glo) = (shi, ghi);
            shi = shi + step;
            if shi > cap {
                return Err(Error::Overflow {
                    what: "Luxemburg norm".into(),
                    cap: LAMBDA_CAP,
                });
            }
            ghi = g(shi)?;
        }
    } else {
        (shi, ghi) = (s0, g0);
        (slo, glo) = (s0 - step, g(s0 - step)?);
        while !(glo > T::zero()) {
            (shi, ghi) = (slo, glo);
            slo = slo - step;
            if slo < floor {
                return Err(Error::Overflow {
                    what: "Luxemburg norm (lower bracket)".into(),
                    cap: LAMBDA_FLOOR,
                });
            }
            glo = g(slo)?;
        }
    }
    let target = tol.ln_1p();
    let margin = target * T::lit(0.25);
    let half = T::lit(0.5);
    // Illinois weights
    let (mut wlo, mut whi) = (T::one(), T::one());
    let mut last_side = 0i8;
    let mut stalled = 0;
    for _ in 0..200 {
        let width = shi - slo;
        if width <= target {
            break;
        }
        let secant = if glo.is_finite() && ghi.is_finite() {
            let (a, b) = (glo * wlo, ghi * whi);
            slo + width * a / (a - b)
        } else {
            slo + width * half
        };
        let mut s = if stalled >= 2 || !secant.is_finite() {
            stalled = 0;
            slo + width * half
        } else {
            secant
        };
        let m = margin.min(width * half);
        s = s.max(slo + m).min(shi - m);
        let gs = g(s)?;
        if gs > T::zero() {
            (slo, glo) = (s, gs);
            wlo = T::one();
            if last_side == 1 {
                whi = whi * half;
                stalled += 1;
            } else {
                stalled = 0;
            }
            last_side = 1;
        } else {
            (shi, ghi) = (s, gs);
            whi = T::one();
            if last_side == -1 {
                wlo = wlo * half;
                stalled += 1;
            } else {
                stalled = 0;
            }
            last_side = -1;
        }
    }
    Ok(((slo + shi) * half).exp())
}

/// `||u||_phi = inf { lambda > 0 : rho_phi(u / lambda) <= 1 }`.
pub fn luxemburg_norm<T: Real, G: GrowthFunction<T> + ?Sized>(phi: &G, u: &GridFunction<T>, tol: T) -> Result<T> {
    let local = resolve(phi, u)?;
    luxemburg_local(&local, u.values(), u.domain().cell_area(), tol)
}

/// `sum_{|alpha| <= k} ||d_alpha u||_phi`. Missing derivative slots are
/// filled by finite differences when `differentiate` is set, and are an
/// input error otherwise.
pub fn sobolev_norm<T: Real, G: GrowthFunction<T> + ?Sized>(
    phi: &G,
    u: &GridFunction<T>,
    k: u32,
    tol: T,
    differentiate: bool,
) -> Result<T> {
    Ok(sobolev_terms(phi, u, k, tol, differentiate)?.iter().map(|(_, v)| *v).sum())
}

/// The individual terms `(alpha, ||d_alpha u||_phi)` of [`sobolev_norm`].
pub fn sobolev_terms<T: Real, G: GrowthFunction<T> + ?Sized>(
    phi: &G,
    u: &GridFunction<T>,
    k: u32,
    tol: T,
    differentiate: bool,
) -> Result<Vec<(MultiIndex, T)>> {
    if k > 2 {
        return input_err(format!("Sobolev norms are supported for k <= 2, got {k}"));
    }
    let filled;
    let u = if u.has_derivatives(k) {
        u
    } else if differentiate {
        filled = u.clone().with_derivatives(k);
        &filled
    } else {
        return input_err(format!("derivatives up to order {k} are missing"));
    };
    let local = resolve(phi, u)?;
    let area = u.domain().cell_area();
    MultiIndex::up_to(2, k)
        .into_iter()
        .map(|a| {
            let v = u.derivative(&a).expect("slots checked above");
            Ok((a, luxemburg_local(&local, v, area, tol)?))
        })
        .collect()
}

/// Smallest `L >= 1` with `psi(t / L) <= phi(t) <= psi(L t)` for one
/// sample, by bisection on `ln L` up to `1e6` (infinite beyond).
fn needed_l<T: Real>(phi_t: Extended<T>, psi: &super::profile::Profile<T>, t: T) -> T {
    let ok = |l: T| {
        let lower = Extended::from_real(psi.value(t / l));
        let upper = Extended::from_real(psi.value(t * l));
        lower <= phi_t && phi_t <= upper
    };
    if ok(T::one()) {
        return T::one();
    }
    let cap = T::lit(1e6);
    if !ok(cap) {
        return T::infinity();
    }
    let (mut lo, mut hi) = (T::zero(), cap.ln());
    for _ in 0..60 {
        let mid = (lo + hi) * T::lit(0.5);
        if ok(mid.exp()) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi.exp()
}

/// Checks `psi(x, t / L) <= phi(x, t) <= psi(x, L t)` at every sampled
/// `(x, t)`. `best_constant` is the smallest `L` passing all samples.
pub fn check_equivalence<T: Real, G1, G2>(
    phi: &G1,
    psi: &G2,
    l: T,
    points: &[Point<T>],
    ts: &[T],
) -> Result<ConditionReport<T>>
where
    G1: GrowthFunction<T> + ?Sized,
    G2: GrowthFunction<T> + ?Sized,
{
    if !(l >= T::one()) {
        return input_err(format!("equivalence constant must be >= 1, got {l}"));
    }
    if points.is_empty() || ts.is_empty() {
        return input_err("equivalence check needs sample points and t values");
    }
    let mut b = ReportBuilder::new(Condition::Equivalence, l).param("L", l.as_f64());
    b.samples.points = points.len();
    b.samples.t_values = ts.len();
    type Row<T> = Vec<(T, T, Option<(T, T)>)>;
    let rows: Vec<Result<Row<T>>> = points
        .par_iter()
        .map(|&x| {
            let (pf, ps) = (phi.profile(x)?, psi.profile(x)?);
            Ok(ts
                .iter()
                .map(|&t| {
                    let ft = Extended::from_real(pf.value(t));
                    let need = needed_l(ft, &ps, t);
                    let lower = ps.value(t / l);
                    let upper = ps.value(t * l);
                    let ftr = ft.to_real();
                    let fail = if Extended::from_real(lower) > ft {
                        Some((lower, ftr))
                    } else if ft > Extended::from_real(upper) {
                        Some((ftr, upper))
                    } else {
                        None
                    };
                    (t, need, fail)
                })
                .collect())
        })
        .collect();
    for (x, row) in points.iter().zip(rows) {
        for (t, need, fail) in row? {
            b.samples.evaluations += 3;
            b.constant(need);
            if let Some((lhs, rhs)) = fail {
                b.fail(Witness {
                    x: *x,
                    y: None,
                    t: Some(t),
                    s: None,
                    lhs,
                    rhs,
                });
            }
        }
    }
    Ok(b.finish())
}
