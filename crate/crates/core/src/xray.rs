//! Discrete X-rays, data functions, tomographic instances and grids.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::lattice::{BoundingBox, Direction, Point, WeightedLatticeSet};

/// Identifies one lattice line parallel to a given direction.
///
/// In the plane the key is the exact scalar `v2*x1 - v1*x2`, constant along
/// every line parallel to `v = (v1, v2)`. In higher dimension it is the unique
/// point `p - t*v` of the line whose coordinate at the first nonzero entry `i`
/// of `v` lies in `[0, v_i)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LineKey {
    Planar(i64),
    Representative(Point),
}

impl LineKey {
    /// Key of the line through `p` parallel to `dir`.
    pub fn of(p: &Point, dir: &Direction) -> LineKey {
        let v = dir.components();
        if v.len() == 2 {
            LineKey::Planar(v[1] * p[0] - v[0] * p[1])
        } else {
            let i = v.iter().position(|&c| c != 0).expect("direction is nonzero");
            let t = p[i].div_euclid(v[i]);
            LineKey::Representative(p.offset(v, -t))
        }
    }

    /// Some lattice point of the line. Canonical for a given key.
    pub fn anchor(&self, dir: &Direction) -> Point {
        match self {
            LineKey::Representative(p) => p.clone(),
            LineKey::Planar(k) => {
                let v = dir.components();
                // v2*a - v1*b = 1, then k*(a, b) lies on the line.
                let (g, s, t) = extended_gcd(v[1], -v[0]);
                debug_assert_eq!(g, 1);
                Point::from([k * s, k * t])
            }
        }
    }
}

/// Returns `(g, s, t)` with `a*s + b*t = g = gcd(a, b) >= 0`.
pub(crate) fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// The X-ray of a function in one direction, stored as its nonzero lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataFunction {
    direction: Direction,
    lines: BTreeMap<LineKey, i64>,
}

impl DataFunction {
    pub fn new(direction: Direction) -> Self {
        DataFunction { direction, lines: BTreeMap::new() }
    }

    pub fn direction(&self) -> &Direction {
        &self.direction
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    /// Adds `value` to the line through `anchor`.
    pub fn add_at(&mut self, anchor: &Point, value: i64) -> Result<()> {
        if anchor.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: anchor.dim() });
        }
        self.add_key(LineKey::of(anchor, &self.direction), value)
    }

    pub fn add_key(&mut self, key: LineKey, value: i64) -> Result<()> {
        if value == 0 {
            return Ok(());
        }
        let slot = self.lines.entry(key.clone()).or_insert(0);
        *slot = slot.checked_add(value).ok_or(Error::Overflow("summing line values"))?;
        if *slot == 0 {
            self.lines.remove(&key);
        }
        Ok(())
    }

    /// Value on a line (zero if absent).
    pub fn value(&self, key: &LineKey) -> i64 {
        self.lines.get(key).copied().unwrap_or(0)
    }

    /// Value on the line through `p`.
    pub fn value_at(&self, p: &Point) -> i64 {
        self.value(&LineKey::of(p, &self.direction))
    }

    pub fn lines(&self) -> impl Iterator<Item = (&LineKey, i64)> + '_ {
        self.lines.iter().map(|(k, &v)| (k, v))
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn total(&self) -> i64 {
        self.lines.values().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lines.values().all(|&v| v > 0)
    }

    /// `||self - other||_1` over all lines. Both must share the direction.
    pub fn l1_distance(&self, other: &DataFunction) -> Result<i64> {
        if self.direction != other.direction {
            return Err(Error::invalid("data functions of different directions"));
        }
        let mut d = 0i64;
        for (k, &v) in &self.lines {
            d += (v - other.value(k)).abs();
        }
        for (k, &v) in &other.lines {
            if !self.lines.contains_key(k) {
                d += v.abs();
            }
        }
        Ok(d)
    }
}

/// X-ray of `psi` parallel to `dir`: the sum of weights on every line.
pub fn xray(psi: &WeightedLatticeSet, dir: &Direction) -> Result<DataFunction> {
    if psi.dim() != dir.dim() {
        return Err(Error::DimensionMismatch { expected: dir.dim(), found: psi.dim() });
    }
    let mut f = DataFunction::new(dir.clone());
    for (p, w) in psi.iter() {
        f.add_key(LineKey::of(p, dir), w)?;
    }
    Ok(f)
}

/// X-ray difference `sum_S ||X_S F1 - X_S F2||_1`.
pub fn xray_difference(f1: &WeightedLatticeSet, f2: &WeightedLatticeSet, dirs: &[Direction]) -> Result<i64> {
    if f1.dim() != f2.dim() {
        return Err(Error::DimensionMismatch { expected: f1.dim(), found: f2.dim() });
    }
    let diff = f1.combine(f2, -1)?;
    let mut total = 0i64;
    for d in dirs {
        total += xray(&diff, d)?.lines().map(|(_, v)| v.abs()).sum::<i64>();
    }
    Ok(total)
}

/// Tomographic input: one data function per direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    dim: usize,
    data: Vec<DataFunction>,
}

impl Instance {
    pub fn new(dim: usize, data: Vec<DataFunction>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if data.is_empty() {
            return Err(Error::invalid("an instance needs at least one direction"));
        }
        let mut seen = BTreeSet::new();
        for f in &data {
            if f.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: f.dim() });
            }
            if !seen.insert(f.direction().clone()) {
                return Err(Error::DuplicateDirection(f.direction().components().to_vec()));
            }
        }
        Ok(Instance { dim, data })
    }

    /// Instance made of the X-rays of `psi`.
    pub fn from_set(psi: &WeightedLatticeSet, dirs: &[Direction]) -> Result<Self> {
        let data = dirs.iter().map(|d| xray(psi, d)).collect::<Result<Vec<_>>>()?;
        Instance::new(psi.dim(), data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_directions(&self) -> usize {
        self.data.len()
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.data.iter().map(|f| f.direction().clone()).collect()
    }

    pub fn data(&self) -> &[DataFunction] {
        &self.data
    }

    /// `||f_S||_1` for every direction.
    pub fn totals(&self) -> Vec<i64> {
        self.data.iter().map(DataFunction::total).collect()
    }

    /// True if all data functions carry the same mass, a necessary condition
    /// for consistency.
    pub fn mass_consistent(&self) -> bool {
        let t = self.totals();
        t.windows(2).all(|w| w[0] == w[1])
    }

    /// Number of points every solution has, if the masses agree.
    pub fn mass(&self) -> Option<i64> {
        self.mass_consistent().then(|| self.data[0].total())
    }

    /// Sub-instance on the given direction indices, in that order.
    pub fn restrict(&self, indices: &[usize]) -> Result<Instance> {
        Instance::new(self.dim, indices.iter().map(|&i| self.data[i].clone()).collect())
    }

    /// True if `psi` has exactly these X-rays.
    pub fn is_solution(&self, psi: &WeightedLatticeSet) -> Result<bool> {
        Ok(self.mismatch(psi)? == 0)
    }

    /// `sum_S ||X_S psi - f_S||_1`.
    pub fn mismatch(&self, psi: &WeightedLatticeSet) -> Result<i64> {
        let mut total = 0;
        for f in &self.data {
            total += xray(psi, f.direction())?.l1_distance(f)?;
        }
        Ok(total)
    }
}

/// Intersection point of two lattice lines, if it is a lattice point.
/// The directions must not be parallel.
pub fn intersect_lines(a: &LineKey, da: &Direction, b: &LineKey, db: &Direction) -> Option<Point> {
    let p = a.anchor(da);
    let q = b.anchor(db);
    let (u, w) = (da.components(), db.components());
    let d = u.len();
    for i in 0..d {
        for j in (i + 1)..d {
            let det = u[i] as i128 * w[j] as i128 - u[j] as i128 * w[i] as i128;
            if det == 0 {
                continue;
            }
            // Solve s*u - t*w = q - p in coordinates i, j.
            let r = (q[i] - p[i]) as i128;
            let s_ = (q[j] - p[j]) as i128;
            let num = r * w[j] as i128 - s_ * w[i] as i128;
            if num % det != 0 {
                return None;
            }
            let s = i64::try_from(num / det).ok()?;
            let x = p.offset(u, s);
            return (LineKey::of(&x, db) == *b).then_some(x);
        }
    }
    None
}

/// Grid `G(I)`: the lattice points lying on a nonzero line of every data
/// function. Contains the support of every solution.
///
/// Requires at least two directions; with one direction the grid is a union
/// of whole lines.
pub fn grid(inst: &Instance) -> Result<BTreeSet<Point>> {
    let data = inst.data();
    if data.len() < 2 {
        return Err(Error::UnboundedGrid);
    }
    let (f0, f1) = (&data[0], &data[1]);
    let mut out = BTreeSet::new();
    for (k0, _) in f0.lines() {
        for (k1, _) in f1.lines() {
            if let Some(x) = intersect_lines(k0, f0.direction(), k1, f1.direction()) {
                if data[2..].iter().all(|f| f.value_at(&x) != 0) {
                    out.insert(x);
                }
            }
        }
    }
    Ok(out)
}

/// Grid points inside `bbox`. Works for any number of directions.
pub fn grid_in_box(inst: &Instance, bbox: &BoundingBox) -> Result<Vec<Point>> {
    if bbox.dim() != inst.dim() {
        return Err(Error::DimensionMismatch { expected: inst.dim(), found: bbox.dim() });
    }
    if inst.num_directions() >= 2 {
        Ok(grid(inst)?.into_iter().filter(|p| bbox.contains(p)).collect())
    } else {
        Ok(bbox.points().into_iter().filter(|p| inst.data()[0].value_at(p) != 0).collect())
    }
}
