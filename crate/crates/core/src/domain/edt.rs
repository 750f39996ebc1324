//! Exact Euclidean distance transform (Felzenszwalb-Huttenlocher).

use crate::scalar::Real;

use super::RasterDomain;

const INF: f64 = 1e20;

/// Squared distance, in cell units, from every cell centre to the nearest
/// cell with `feature[k] == true`. Cells beyond the grid edge count as
/// features when `edge_is_feature` is set.
pub fn squared_edt(nx: usize, ny: usize, feature: &[bool], edge_is_feature: bool) -> Vec<f64> {
    // one ring of padding carries the edge condition
    let (px, py) = (nx + 2, ny + 2);
    let mut f = vec![INF; px * py];
    for j in 0..py {
        for i in 0..px {
            let on_ring = i == 0 || j == 0 || i == px - 1 || j == py - 1;
            let is_feat = if on_ring {
                edge_is_feature
            } else {
                feature[(j - 1) * nx + (i - 1)]
            };
            if is_feat {
                f[j * px + i] = 0.0;
            }
        }
    }
    let mut col = vec![0.0; py.max(px)];
    let mut out = vec![0.0; py.max(px)];
    let mut v = vec![0usize; py.max(px)];
    let mut z = vec![0.0; py.max(px) + 1];
    for i in 0..px {
        for j in 0..py {
            col[j] = f[j * px + i];
        }
        dt1d(&col[..py], &mut out[..py], &mut v, &mut z);
        for j in 0..py {
            f[j * px + i] = out[j];
        }
    }
    for j in 0..py {
        dt1d(&f[j * px..(j + 1) * px], &mut out[..px], &mut v, &mut z);
        f[j * px..(j + 1) * px].copy_from_slice(&out[..px]);
    }
    let mut res = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            res[j * nx + i] = f[(j + 1) * px + i + 1];
        }
    }
    res
}

fn dt1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let parabola = |p: usize| {
            ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
        };
        let mut s = parabola(v[k]);
        // z[0] = -inf stops the scan at k = 0
        while s <= z[k] {
            k -= 1;
            s = parabola(v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, dq) in d.iter_mut().enumerate().take(n) {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let diff = q as f64 - p as f64;
        *dq = diff * diff + f[p];
    }
}

/// Per-cell estimate of `dist(center, boundary)` for inside cells: distance
/// to the nearest outside cell centre minus half a cell. Outside cells get 0.
pub fn boundary_distance<T: Real>(domain: &RasterDomain<T>) -> Vec<T> {
    let outside: Vec<bool> = domain.inside_mask().iter().map(|b| !b).collect();
    let d2 = squared_edt(domain.nx(), domain.ny(), &outside, true);
    d2.iter()
        .zip(domain.inside_mask())
        .map(|(&d2, &ins)| {
            if ins {
                domain.h() * T::lit(d2.sqrt() - 0.5)
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Distance in physical units from every cell centre to the nearest inside
/// cell centre (zero on inside cells).
pub fn distance_to_inside<T: Real>(domain: &RasterDomain<T>) -> Vec<T> {
    let d2 = squared_edt(domain.nx(), domain.ny(), domain.inside_mask(), false);
    d2.iter().map(|&d| domain.h() * T::lit(d.sqrt())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(nx: usize, ny: usize, feat: &[bool], edge: bool) -> Vec<f64> {
        let mut out = vec![f64::INFINITY; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let mut best = f64::INFINITY;
                for b in -1..=ny as i64 {
                    for a in -1..=nx as i64 {
                        let ring = a < 0 || b < 0 || a >= nx as i64 || b >= ny as i64;
                        let is_feat = if ring {
                            edge
                        } else {
                            feat[b as usize * nx + a as usize]
                        };
                        if is_feat {
                            let d = (a - i as i64).pow(2) + (b - j as i64).pow(2);
                            best = best.min(d as f64);
                        }
                    }
                }
                out[j * nx + i] = best;
            }
        }
        out
    }

    #[test]
    fn matches_brute_force() {
        let (nx, ny) = (13, 9);
        let mut state = 12345u64;
        let feat: Vec<bool> = (0..nx * ny)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 33) % 7 == 0
            })
            .collect();
        for edge in [true, false] {
            assert_eq!(squared_edt(nx, ny, &feat, edge), brute(nx, ny, &feat, edge));
        }
    }
}
