use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::RasterDomain;
use crate::error::{input_err, Result};
use crate::phi::{luxemburg_local, GridFunction, GrowthFunction, LocalPhi, MultiIndex};
use crate::scalar::{smoothstep, Real};

use super::whitney::WhitneyDecomposition;

/// Dilation of the outside cubes carrying the partition of unity.
pub const DILATION: f64 = 1.5;

/// One-dimensional C¹ bump: 1 on `|r| <= 2/3`, 0 from `|r| = 1` on, where
/// `r` is measured in half-sides of the dilated cube.
fn bump(r: f64) -> f64 {
    smoothstep(3.0 * (1.0 - r.abs()))
}

/// The linear map `u -> Lambda u` of a decomposition, precomputed as a
/// sparse stencil from matched cube means to working-grid cells.
#[derive(Clone, Debug)]
pub struct ExtensionOperator<T> {
    decomposition: Arc<WhitneyDecomposition<T>>,
    full: Arc<RasterDomain<T>>,
    /// Working-grid cells with a nonzero outside value.
    cells: Vec<usize>,
    offsets: Vec<usize>,
    cubes: Vec<usize>,
    coefs: Vec<f64>,
}

impl<T: Real> ExtensionOperator<T> {
    pub fn new(decomposition: Arc<WhitneyDecomposition<T>>) -> Self {
        let w = &decomposition;
        let g = w.grid();
        let (nx, ny) = (g.nx() as i64, g.ny() as i64);
        let collar = w.collar_width().as_f64();
        // (cell, cube, weight) triples over the dilated supports
        let mut triples: Vec<(usize, usize, f64)> = w
            .outside_cubes
            .par_iter()
            .enumerate()
            .flat_map_iter(|(s, c)| {
                let half = DILATION * c.side as f64 / 2.0;
                let (cx, cy) = (c.i as f64 + c.side as f64 / 2.0, c.j as f64 + c.side as f64 / 2.0);
                let lo = |v: f64| ((v - half).floor() as i64).max(0);
                let (i0, i1) = (lo(cx), ((cx + half).ceil() as i64).min(nx));
                let (j0, j1) = (lo(cy), ((cy + half).ceil() as i64).min(ny));
                let mut out = Vec::new();
                for j in j0..j1 {
                    for i in i0..i1 {
                        let k = (j * nx + i) as usize;
                        if g.is_inside(k) {
                            continue;
                        }
                        let wt = bump((i as f64 + 0.5 - cx) / half) * bump((j as f64 + 0.5 - cy) / half);
                        if wt > 0.0 {
                            out.push((k, s, wt));
                        }
                    }
                }
                out.into_iter()
            })
            .collect();
        triples.par_sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut cells = Vec::new();
        let mut offsets = vec![0];
        let mut cubes = Vec::new();
        let mut coefs = Vec::new();
        let mut at = 0;
        while at < triples.len() {
            let k = triples[at].0;
            let end = at + triples[at..].iter().take_while(|t| t.0 == k).count();
            let d = w.cell_dist[k].as_f64();
            let taper = smoothstep((2.0 * collar - d) / collar);
            if taper > 0.0 {
                let total: f64 = triples[at..end].iter().map(|t| t.2).sum();
                cells.push(k);
                for t in &triples[at..end] {
                    cubes.push(t.1);
                    coefs.push(t.2 / total * taper);
                }
                offsets.push(cubes.len());
            }
            at = end;
        }
        let full = Arc::new(
            RasterDomain::full(g.origin(), g.h(), g.nx(), g.ny()).expect("working grid is non-empty"),
        );
        Self {
            decomposition,
            full,
            cells,
            offsets,
            cubes,
            coefs,
        }
    }

    pub fn decomposition(&self) -> &Arc<WhitneyDecomposition<T>> {
        &self.decomposition
    }

    /// The working grid with every cell inside; `Lambda u` lives here.
    pub fn full_grid(&self) -> &Arc<RasterDomain<T>> {
        &self.full
    }

    /// `Lambda u` on the full working grid (values only).
    pub fn apply(&self, u: &GridFunction<T>) -> Result<GridFunction<T>> {
        let w = &self.decomposition;
        if **u.domain() != **w.domain() {
            return input_err("function and decomposition live on different domains");
        }
        let nx = w.grid().nx();
        let vals = u.values();
        let means: Vec<f64> = w
            .outside_cubes
            .par_iter()
            .zip(&w.matching)
            .map(|(_, &q)| {
                let c = &w.inside_cubes[q];
                let sum: f64 = c
                    .cells(nx)
                    .map(|g| vals[w.to_domain(g).expect("inside cubes lie on the domain grid")].as_f64())
                    .sum();
                sum / (c.side * c.side) as f64
            })
            .collect();
        let mut out = vec![T::zero(); self.full.len()];
        for k in u.domain().inside_cells() {
            out[w.to_grid(k)] = vals[k];
        }
        let outside: Vec<f64> = (0..self.cells.len())
            .into_par_iter()
            .map(|c| {
                (self.offsets[c]..self.offsets[c + 1])
                    .map(|e| self.coefs[e] * means[self.cubes[e]])
                    .sum()
            })
            .collect();
        for (&k, v) in self.cells.iter().zip(outside) {
            out[k] = T::lit(v);
        }
        GridFunction::from_values(self.full.clone(), out)
    }

    /// Working-grid cells where `Lambda u` may be nonzero off `Omega`.
    pub fn support(&self) -> &[usize] {
        &self.cells
    }
}

/// Bookkeeping attached to an [`ExtensionResult`].
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionMeta {
    pub h: f64,
    pub collar_width: f64,
    pub partition_dilation: f64,
    pub inside_cubes: usize,
    pub outside_cubes: usize,
    pub grid: (usize, usize),
}

#[derive(Clone, Debug)]
pub struct ExtensionResult<T> {
    /// `Lambda u` on the full working grid, with first derivatives.
    pub extended: GridFunction<T>,
    /// `||Lambda u||_{W^{1,psi}} / ||u||_{W^{1,phi}(Omega)}`; 0 when `u = 0`.
    pub ratio: T,
    pub norm_u: T,
    pub norm_extended: T,
    pub meta: ExtensionMeta,
}

/// An [`ExtensionOperator`] with `phi` resolved on `Omega` and `psi` on the
/// working grid, for extending many functions.
pub struct ExtensionSetup<T> {
    op: ExtensionOperator<T>,
    phi: LocalPhi<T>,
    psi: LocalPhi<T>,
    tol: T,
}

impl<T: Real> ExtensionSetup<T> {
    pub fn new<G1, G2>(decomposition: Arc<WhitneyDecomposition<T>>, phi: &G1, psi: &G2) -> Result<Self>
    where
        G1: GrowthFunction<T> + ?Sized,
        G2: GrowthFunction<T> + ?Sized,
    {
        let op = ExtensionOperator::new(decomposition);
        let phi = LocalPhi::resolve(phi, op.decomposition.domain())?;
        let psi = LocalPhi::resolve(psi, &op.full)?;
        Ok(Self {
            op,
            phi,
            psi,
            tol: T::default_tol(),
        })
    }

    pub fn operator(&self) -> &ExtensionOperator<T> {
        &self.op
    }

    fn norm(local: &LocalPhi<T>, u: &GridFunction<T>, tol: T) -> Result<T> {
        let area = u.domain().cell_area();
        let mut total = T::zero();
        for a in MultiIndex::up_to(2, 1) {
            let v = u.derivative(&a).expect("first derivatives filled");
            total = total + luxemburg_local(local, v, area, tol)?;
        }
        Ok(total)
    }

    /// `Lambda u` and the norm ratio. Missing first derivatives of `u` are
    /// filled by finite differences.
    pub fn extend(&self, u: &GridFunction<T>) -> Result<ExtensionResult<T>> {
        let extended = self.op.apply(u)?.with_derivatives(1);
        let u1;
        let u = if u.has_derivatives(1) {
            u
        } else {
            u1 = u.clone().with_derivatives(1);
            &u1
        };
        let norm_u = Self::norm(&self.phi, u, self.tol)?;
        let norm_extended = Self::norm(&self.psi, &extended, self.tol)?;
        let ratio = if norm_u == T::zero() { T::zero() } else { norm_extended / norm_u };
        let w = self.op.decomposition();
        Ok(ExtensionResult {
            extended,
            ratio,
            norm_u,
            norm_extended,
            meta: ExtensionMeta {
                h: w.grid().h().as_f64(),
                collar_width: w.collar_width().as_f64(),
                partition_dilation: DILATION,
                inside_cubes: w.inside_cubes.len(),
                outside_cubes: w.outside_cubes.len(),
                grid: (w.grid().nx(), w.grid().ny()),
            },
        })
    }
}

/// `Lambda u` with `||Lambda u||_{W^{1,psi}(R^2)}` measured against
/// `||u||_{W^{1,phi}(Omega)}`.
pub fn extend<T: Real, G1, G2>(
    u: &GridFunction<T>,
    decomposition: Arc<WhitneyDecomposition<T>>,
    phi: &G1,
    psi: &G2,
) -> Result<ExtensionResult<T>>
where
    G1: GrowthFunction<T> + ?Sized,
    G2: GrowthFunction<T> + ?Sized,
{
    ExtensionSetup::new(decomposition, phi, psi)?.extend(u)
}
