use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::domain::RasterDomain;
use crate::error::{input_err, Result};
use crate::geometry::Point;
use crate::scalar::Real;

/// A multi-index `alpha = (a_1, ..., a_n)` with `|alpha| = a_1 + ... + a_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `e_i` in `n` dimensions.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|alpha|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// All multi-indices in `n` dimensions with `|alpha| <= k`, ordered by
    /// length and then lexicographically from the highest first entry.
    pub fn up_to(n: usize, k: u32) -> Vec<Self> {
        let mut out = Vec::new();
        for order in 0..=k {
            let mut cur = vec![0u32; n];
            compositions(order, 0, &mut cur, &mut out);
        }
        out
    }

    /// `alpha` minus one unit in its last non-zero slot, and that slot.
    fn split_last(&self) -> Option<(MultiIndex, usize)> {
        let i = self.0.iter().rposition(|&a| a > 0)?;
        let mut v = self.0.clone();
        v[i] -= 1;
        Some((MultiIndex(v), i))
    }
}

fn compositions(rem: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for a in (0..=rem).rev() {
        cur[pos] = a;
        compositions(rem - a, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Samples of `u` on the cells of a raster, plus optional derivative slots
/// `d_alpha u`. Values on outside cells are kept at zero.
#[derive(Clone, Debug)]
pub struct GridFunction<T> {
    domain: Arc<RasterDomain<T>>,
    values: Vec<T>,
    derivatives: BTreeMap<MultiIndex, Vec<T>>,
}

impl<T: Real> GridFunction<T> {
    pub fn from_values(domain: Arc<RasterDomain<T>>, mut values: Vec<T>) -> Result<Self> {
        if values.len() != domain.len() {
            return input_err(format!(
                "grid function has {} values, domain has {} cells",
                values.len(),
                domain.len()
            ));
        }
        for (k, v) in values.iter_mut().enumerate() {
            if !domain.is_inside(k) {
                *v = T::zero();
            } else if !v.is_finite() {
                return input_err(format!("non-finite value at cell {k}"));
            }
        }
        Ok(Self {
            domain,
            values,
            derivatives: BTreeMap::new(),
        })
    }

    pub fn from_fn(domain: Arc<RasterDomain<T>>, f: impl Fn(Point<T>) -> T) -> Self {
        let values = (0..domain.len())
            .map(|k| if domain.is_inside(k) { f(domain.center_k(k)) } else { T::zero() })
            .collect();
        Self {
            domain,
            values,
            derivatives: BTreeMap::new(),
        }
    }

    pub fn zeros(domain: Arc<RasterDomain<T>>) -> Self {
        let n = domain.len();
        Self {
            domain,
            values: vec![T::zero(); n],
            derivatives: BTreeMap::new(),
        }
    }

    pub fn domain(&self) -> &Arc<RasterDomain<T>> {
        &self.domain
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Slot for `d_alpha u`; `alpha = 0` is `u` itself.
    pub fn derivative(&self, alpha: &MultiIndex) -> Option<&[T]> {
        if alpha.order() == 0 {
            return Some(&self.values);
        }
        self.derivatives.get(alpha).map(|v| v.as_slice())
    }

    pub fn has_derivatives(&self, k: u32) -> bool {
        MultiIndex::up_to(2, k).iter().all(|a| self.derivative(a).is_some())
    }

    /// Installs a derivative slot (outside cells are zeroed).
    pub fn with_derivative(mut self, alpha: MultiIndex, mut values: Vec<T>) -> Result<Self> {
        if values.len() != self.domain.len() || alpha.dim() != 2 {
            return input_err("derivative slot does not match the grid");
        }
        if alpha.order() == 0 {
            return input_err("the zeroth derivative is the function itself");
        }
        for (k, v) in values.iter_mut().enumerate() {
            if !self.domain.is_inside(k) {
                *v = T::zero();
            }
        }
        self.derivatives.insert(alpha, values);
        Ok(self)
    }

    /// Fills every missing slot with `|alpha| <= k` by finite differences:
    /// central where both neighbours along the axis are inside, one-sided
    /// next to outside cells. Higher orders difference the lower slots.
    pub fn fill_derivatives(&mut self, k: u32) {
        for alpha in MultiIndex::up_to(2, k) {
            if self.derivative(&alpha).is_some() {
                continue;
            }
            let (base, axis) = alpha.split_last().expect("order >= 1");
            let src = self.derivative(&base).expect("lower orders filled first").to_vec();
            let d = difference(&self.domain, &src, axis);
            self.derivatives.insert(alpha, d);
        }
    }

    pub fn with_derivatives(mut self, k: u32) -> Self {
        self.fill_derivatives(k);
        self
    }

    /// Pointwise linear combination `a self + b other` on the same grid,
    /// including the derivative slots present in both.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if !Arc::ptr_eq(&self.domain, &other.domain) && *self.domain != *other.domain {
            return input_err("grid functions live on different grids");
        }
        let lin = |x: &[T], y: &[T]| x.iter().zip(y).map(|(&p, &q)| a * p + b * q).collect::<Vec<T>>();
        let derivatives = self
            .derivatives
            .iter()
            .filter_map(|(al, v)| other.derivatives.get(al).map(|w| (al.clone(), lin(v, w))))
            .collect();
        Ok(Self {
            domain: self.domain.clone(),
            values: lin(&self.values, &other.values),
            derivatives,
        })
    }

    /// Same values with every derivative slot dropped.
    pub fn without_derivatives(&self) -> Self {
        Self {
            domain: self.domain.clone(),
            values: self.values.clone(),
            derivatives: BTreeMap::new(),
        }
    }

    pub fn scaled(&self, c: T) -> Self {
        let sc = |v: &Vec<T>| v.iter().map(|&x| x * c).collect::<Vec<T>>();
        Self {
            domain: self.domain.clone(),
            values: sc(&self.values),
            derivatives: self.derivatives.iter().map(|(a, v)| (a.clone(), sc(v))).collect(),
        }
    }
}

/// Discrete `d/dx_axis` of per-cell samples.
pub(crate) fn difference<T: Real>(domain: &RasterDomain<T>, src: &[T], axis: usize) -> Vec<T> {
    let (nx, ny) = (domain.nx(), domain.ny());
    let h = domain.h();
    let two_h = h + h;
    let mut out = vec![T::zero(); domain.len()];
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            if !domain.is_inside(k) {
                continue;
            }
            let (minus, plus) = if axis == 0 {
                ((i > 0).then(|| k - 1), (i + 1 < nx).then(|| k + 1))
            } else {
                ((j > 0).then(|| k - nx), (j + 1 < ny).then(|| k + nx))
            };
            let minus = minus.filter(|&m| domain.is_inside(m));
            let plus = plus.filter(|&p| domain.is_inside(p));
            out[k] = match (minus, plus) {
                (Some(m), Some(p)) => (src[p] - src[m]) / two_h,
                (None, Some(p)) => (src[p] - src[k]) / h,
                (Some(m), None) => (src[k] - src[m]) / h,
                (None, None) => T::zero(),
            };
        }
    }
    out
}
