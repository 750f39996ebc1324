use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Real;

use super::RasterDomain;

/// A polyline `gamma` with its arc length.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve<T> {
    vertices: Vec<Point<T>>,
    length: T,
}

impl<T: Real> Curve<T> {
    pub fn new(vertices: Vec<Point<T>>) -> Self {
        assert!(!vertices.is_empty(), "a curve needs at least one vertex");
        let length = polyline_length(&vertices);
        Self { vertices, length }
    }

    pub fn segment(a: Point<T>, b: Point<T>) -> Self {
        Self::new(vec![a, b])
    }

    pub fn vertices(&self) -> &[Point<T>] {
        &self.vertices
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn start(&self) -> Point<T> {
        self.vertices[0]
    }

    pub fn end(&self) -> Point<T> {
        *self.vertices.last().unwrap()
    }

    /// Point at arc length `s`, clamped to `[0, length]`.
    pub fn point_at(&self, s: T) -> Point<T> {
        if s <= T::zero() {
            return self.start();
        }
        let mut acc = T::zero();
        for w in self.vertices.windows(2) {
            let seg = w[0].dist(&w[1]);
            if acc + seg >= s && seg > T::zero() {
                return w[0].lerp(&w[1], (s - acc) / seg);
            }
            acc = acc + seg;
        }
        self.end()
    }
}

pub fn polyline_length<T: Real>(v: &[Point<T>]) -> T {
    crate::scalar::compensated_sum(v.windows(2).map(|w| w[0].dist(&w[1])))
}

#[derive(Clone, Copy)]
struct Node {
    f: f64,
    k: usize,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.f == o.f && self.k == o.k
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    fn cmp(&self, o: &Self) -> Ordering {
        // min-heap on f, ties by index for determinism
        o.f.total_cmp(&self.f).then(o.k.cmp(&self.k))
    }
}

const STEPS: [(i64, i64); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

/// A* over the 8-connected grid of inside cells (diagonal steps need both
/// orthogonal neighbours inside). Works in cell units. `allowed` further
/// restricts the visitable cells; `budget` prunes nodes whose optimistic
/// total exceeds it. Returns the cell sequence from `a` to `b`.
pub(crate) fn grid_astar<T: Real>(
    domain: &RasterDomain<T>,
    a: usize,
    b: usize,
    allowed: impl Fn(usize) -> bool,
    budget: f64,
) -> Option<Vec<usize>> {
    let nx = domain.nx() as i64;
    let ny = domain.ny() as i64;
    let (bi, bj) = domain.ij(b);
    let heur = |k: usize| {
        let (i, j) = domain.ij(k);
        (i as f64 - bi as f64).hypot(j as f64 - bj as f64)
    };
    let ok = |k: usize| domain.is_inside(k) && allowed(k);
    if !ok(a) || !ok(b) {
        return None;
    }
    let mut g = std::collections::HashMap::<usize, f64>::new();
    let mut parent = std::collections::HashMap::<usize, usize>::new();
    let mut heap = BinaryHeap::new();
    g.insert(a, 0.0);
    heap.push(Node { f: heur(a), k: a });
    while let Some(Node { f, k }) = heap.pop() {
        if k == b {
            let mut path = vec![b];
            let mut cur = b;
            while cur != a {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        let gk = g[&k];
        if f > gk + heur(k) + 1e-12 {
            continue; // stale entry
        }
        let (i, j) = domain.ij(k);
        for (di, dj) in STEPS {
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            if ni < 0 || nj < 0 || ni >= nx || nj >= ny {
                continue;
            }
            let n = nj as usize * nx as usize + ni as usize;
            if !ok(n) {
                continue;
            }
            let cost = if di != 0 && dj != 0 {
                let s1 = j * nx as usize + ni as usize;
                let s2 = nj as usize * nx as usize + i;
                if !ok(s1) || !ok(s2) {
                    continue;
                }
                std::f64::consts::SQRT_2
            } else {
                1.0
            };
            let gn = gk + cost;
            if gn + heur(n) > budget + 1e-9 {
                continue;
            }
            if g.get(&n).is_none_or(|&old| gn < old - 1e-12) {
                g.insert(n, gn);
                parent.insert(n, k);
                heap.push(Node { f: gn + heur(n), k: n });
            }
        }
    }
    None
}

/// True when the segment `p -> q` stays in inside cells (sampled at h/8).
pub(crate) fn segment_inside<T: Real>(
    domain: &RasterDomain<T>,
    p: Point<T>,
    q: Point<T>,
    allowed: &impl Fn(usize) -> bool,
) -> bool {
    let len = p.dist(&q);
    let steps = (len / domain.h() * T::lit(8.0)).ceil().to_usize().unwrap_or(0).max(1);
    (0..=steps).all(|s| {
        let x = p.lerp(&q, T::lit(s as f64 / steps as f64));
        domain
            .cell_of(x)
            .is_some_and(|k| domain.is_inside(k) && allowed(k))
    })
}

/// Greedy line-of-sight shortcutting of a cell path.
pub(crate) fn pull_string<T: Real>(
    domain: &RasterDomain<T>,
    cells: &[usize],
    allowed: &impl Fn(usize) -> bool,
) -> Vec<Point<T>> {
    let pts: Vec<Point<T>> = cells.iter().map(|&k| domain.center_k(k)).collect();
    if pts.len() <= 2 {
        return pts;
    }
    let mut out = vec![pts[0]];
    let mut cur = 0;
    while cur < pts.len() - 1 {
        let mut next = cur + 1;
        while next + 1 < pts.len() && segment_inside(domain, pts[cur], pts[next + 1], allowed) {
            next += 1;
        }
        out.push(pts[next]);
        cur = next;
    }
    out
}

/// Shortest inside path between the cells containing `x` and `y`, as an
/// 8-connected grid path smoothed by line-of-sight shortcuts. Endpoints
/// are snapped to cell centres.
pub fn intrinsic_path<T: Real>(domain: &RasterDomain<T>, x: Point<T>, y: Point<T>) -> Result<Curve<T>> {
    let (ka, kb) = endpoint_cells(domain, x, y)?;
    if ka == kb {
        return Ok(Curve::new(vec![domain.center_k(ka)]));
    }
    if domain.component(ka) != domain.component(kb) {
        let ((ax, ay), (bx, by)) = (x.to_f64(), y.to_f64());
        return Err(Error::Unreachable(ax, ay, bx, by));
    }
    let cells = grid_astar(domain, ka, kb, |_| true, f64::INFINITY)
        .expect("cells in one component are connected");
    Ok(Curve::new(pull_string(domain, &cells, &|_| true)))
}

pub(crate) fn endpoint_cells<T: Real>(
    domain: &RasterDomain<T>,
    x: Point<T>,
    y: Point<T>,
) -> Result<(usize, usize)> {
    let cell = |p: Point<T>| {
        domain.cell_of(p).filter(|&k| domain.is_inside(k)).ok_or_else(|| {
            let (a, b) = p.to_f64();
            Error::OutsideDomain(a, b)
        })
    };
    Ok((cell(x)?, cell(y)?))
}
