use crate::scalar::Real;

use super::{convex_hull, RasterDomain};

/// `rad(Ω)`: over the components, the smallest value of
/// `min_x max_y |x - y|` with `x, y` ranging over inside cell centres of one
/// component. The farthest point from any `x` is a hull vertex, so each
/// cell is scanned against its component's hull only.
pub fn domain_radius<T: Real>(domain: &RasterDomain<T>) -> T {
    let nc = domain.n_components();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for k in domain.inside_cells() {
        let c = domain.component(k).expect("inside cell has a label");
        members[c as usize].push(k);
    }
    members
        .iter()
        .map(|cells| {
            let hull = convex_hull(cells.iter().map(|&k| domain.center_k(k)).collect());
            cells
                .iter()
                .map(|&k| {
                    let x = domain.center_k(k);
                    hull.iter().fold(T::zero(), |m, y| m.max(x.dist(y)))
                })
                .fold(T::infinity(), T::min)
        })
        .fold(T::infinity(), T::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::shapes;

    fn brute(d: &RasterDomain<f64>) -> f64 {
        let cells: Vec<usize> = d.inside_cells().collect();
        let mut best = f64::INFINITY;
        for c in 0..d.n_components() as u32 {
            let comp: Vec<usize> = cells.iter().copied().filter(|&k| d.component(k) == Some(c)).collect();
            for &a in &comp {
                let far = comp
                    .iter()
                    .map(|&b| d.center_k(a).dist(&d.center_k(b)))
                    .fold(0.0, f64::max);
                best = best.min(far);
            }
        }
        best
    }

    #[test]
    fn known_radii() {
        let h: f64 = 1.0 / 32.0;
        assert!((domain_radius(&shapes::unit_disk(h).unwrap()) - 1.0).abs() <= h);
        assert!((domain_radius(&shapes::two_disks(h).unwrap()) - 1.0).abs() <= h);
        let sq = domain_radius(&shapes::unit_square(h).unwrap());
        assert!((sq - 0.5f64.sqrt()).abs() <= h, "{sq}");
    }

    #[test]
    fn matches_all_pairs_scan() {
        for d in [
            shapes::unit_square(0.125).unwrap(),
            shapes::l_shape(0.125).unwrap(),
            shapes::two_disks(0.25).unwrap(),
        ] {
            assert!((domain_radius(&d) - brute(&d)).abs() < 1e-12);
        }
    }
}
