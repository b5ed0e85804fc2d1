//! Lattice points, lattice directions and finitely supported integer-valued
//! functions on `Z^d`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `Z^d`. The dimension is carried at runtime.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<i64>);

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    /// `self + factor * v`, componentwise.
    pub fn offset(&self, v: &[i64], factor: i64) -> Point {
        debug_assert_eq!(self.dim(), v.len());
        Point(self.0.iter().zip(v).map(|(a, b)| a + factor * b).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        self.offset(&other.0, 1)
    }

    pub fn sub(&self, other: &Point) -> Point {
        self.offset(&other.0, -1)
    }

    pub fn dot(&self, c: &[i64]) -> i64 {
        self.0.iter().zip(c).map(|(a, b)| a * b).sum()
    }

    pub fn l1_distance(&self, other: &Point) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }

    pub fn squared_distance(&self, other: &Point) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum()
    }
}

impl Deref for Point {
    type Target = [i64];

    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl<const N: usize> From<[i64; N]> for Point {
    fn from(c: [i64; N]) -> Self {
        Point(c.to_vec())
    }
}

impl From<Vec<i64>> for Point {
    fn from(c: Vec<i64>) -> Self {
        Point(c)
    }
}

impl From<&[i64]> for Point {
    fn from(c: &[i64]) -> Self {
        Point(c.to_vec())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A reduced integer vector spanning a lattice line through the origin.
///
/// Components have gcd 1 and the first nonzero component is positive, so `v`
/// and `-v` (which span the same line) have the same representation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Direction(Vec<i64>);

impl Direction {
    /// Reduces `v` by the gcd of its components and normalises the sign.
    pub fn new(v: impl Into<Vec<i64>>) -> Result<Self> {
        let mut v: Vec<i64> = v.into();
        if v.len() < 2 {
            return Err(Error::DimensionTooSmall(v.len()));
        }
        let g = v.iter().fold(0i64, |g, &c| g.gcd(&c));
        if g == 0 {
            return Err(Error::ZeroDirection);
        }
        let lead = *v.iter().find(|&&c| c != 0).unwrap();
        let g = if lead < 0 { -g } else { g };
        v.iter_mut().for_each(|c| *c /= g);
        Ok(Direction(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    /// Componentwise positive part `max(0, v_j)`.
    pub fn plus_part(&self) -> Vec<i64> {
        self.0.iter().map(|&c| c.max(0)).collect()
    }

    /// Componentwise negative part `max(0, -v_j)`.
    pub fn minus_part(&self) -> Vec<i64> {
        self.0.iter().map(|&c| (-c).max(0)).collect()
    }

    pub fn is_axis(&self) -> bool {
        self.0.iter().filter(|&&c| c != 0).count() == 1
    }
}

impl<'de> Deserialize<'de> for Direction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        Direction::new(v).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Point::from(self.0.clone()).fmt(f)
    }
}

/// Canonical direction of the lattice line spanned by `v`.
pub fn canonical_direction(v: &[i64]) -> Result<Direction> {
    Direction::new(v.to_vec())
}

/// Parses a list of direction vectors and rejects duplicates after
/// canonicalisation.
pub fn distinct_directions(vs: &[Vec<i64>]) -> Result<Vec<Direction>> {
    let mut out: Vec<Direction> = Vec::with_capacity(vs.len());
    for v in vs {
        let d = Direction::new(v.clone())?;
        if out.contains(&d) {
            return Err(Error::DuplicateDirection(d.0));
        }
        out.push(d);
    }
    Ok(out)
}

/// A finitely supported function `Z^d -> Z`. Only nonzero weights are stored.
///
/// With all weights equal to one this is a finite lattice set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeightedLatticeSet {
    dim: usize,
    weights: BTreeMap<Point, i64>,
}

impl WeightedLatticeSet {
    pub fn new(dim: usize) -> Self {
        WeightedLatticeSet { dim, weights: BTreeMap::new() }
    }

    /// Lattice set with weight one per listed point; repeated points add up.
    pub fn from_points<P: Into<Point>>(dim: usize, points: impl IntoIterator<Item = P>) -> Result<Self> {
        let mut s = Self::new(dim);
        for p in points {
            s.add(p.into(), 1)?;
        }
        Ok(s)
    }

    pub fn from_weighted<P: Into<Point>>(
        dim: usize,
        entries: impl IntoIterator<Item = (P, i64)>,
    ) -> Result<Self> {
        let mut s = Self::new(dim);
        for (p, w) in entries {
            s.add(p.into(), w)?;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Adds `w` to the weight at `p`, dropping the entry if it becomes zero.
    pub fn add(&mut self, p: Point, w: i64) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.dim() });
        }
        if w == 0 {
            return Ok(());
        }
        match self.weights.entry(p) {
            Entry::Vacant(e) => {
                e.insert(w);
            }
            Entry::Occupied(mut e) => {
                let v = e.get().checked_add(w).ok_or(Error::Overflow("adding weights"))?;
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
        Ok(())
    }

    /// Sets the weight at `p` (zero removes the point).
    pub fn set(&mut self, p: Point, w: i64) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.dim() });
        }
        if w == 0 {
            self.weights.remove(&p);
        } else {
            self.weights.insert(p, w);
        }
        Ok(())
    }

    pub fn weight(&self, p: &Point) -> i64 {
        self.weights.get(p).copied().unwrap_or(0)
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.weights.contains_key(p)
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, i64)> + '_ {
        self.weights.iter().map(|(p, &w)| (p, w))
    }

    pub fn points(&self) -> impl Iterator<Item = &Point> + '_ {
        self.weights.keys()
    }

    /// Sum of all weights.
    pub fn total_weight(&self) -> i64 {
        self.weights.values().sum()
    }

    /// Sum of absolute weights.
    pub fn l1_norm(&self) -> i64 {
        self.weights.values().map(|w| w.abs()).sum()
    }

    /// True if every stored weight is one (codomain `{0,1}`).
    pub fn is_binary(&self) -> bool {
        self.weights.values().all(|&w| w == 1)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.values().all(|&w| w > 0)
    }

    pub fn translate(&self, u: &[i64]) -> WeightedLatticeSet {
        WeightedLatticeSet {
            dim: self.dim,
            weights: self.weights.iter().map(|(p, &w)| (p.offset(u, 1), w)).collect(),
        }
    }

    /// Pointwise `self + factor * other`.
    pub fn combine(&self, other: &WeightedLatticeSet, factor: i64) -> Result<WeightedLatticeSet> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut out = self.clone();
        for (p, w) in other.iter() {
            let w = w.checked_mul(factor).ok_or(Error::Overflow("scaling weights"))?;
            out.add(p.clone(), w)?;
        }
        Ok(out)
    }

    /// Splits `psi` into its positive and negative parts, `psi = plus - minus`.
    pub fn sign_split(&self) -> (WeightedLatticeSet, WeightedLatticeSet) {
        let mut plus = Self::new(self.dim);
        let mut minus = Self::new(self.dim);
        for (p, &w) in &self.weights {
            if w > 0 {
                plus.weights.insert(p.clone(), w);
            } else {
                minus.weights.insert(p.clone(), -w);
            }
        }
        (plus, minus)
    }

    /// Number of support points shared with `other`.
    pub fn common_points(&self, other: &WeightedLatticeSet) -> usize {
        self.points().filter(|p| other.contains(p)).count()
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut it = self.points();
        let first = it.next()?;
        let mut lo = first.clone().into_vec();
        let mut hi = lo.clone();
        for p in it {
            for (j, &c) in p.iter().enumerate() {
                lo[j] = lo[j].min(c);
                hi[j] = hi[j].max(c);
            }
        }
        Some(BoundingBox { lo: Point(lo), hi: Point(hi) })
    }
}

impl fmt::Debug for WeightedLatticeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.weights.iter()).finish()
    }
}

/// Axis-parallel box of lattice points, bounds inclusive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Point,
    pub hi: Point,
}

impl BoundingBox {
    pub fn new(lo: impl Into<Point>, hi: impl Into<Point>) -> Result<Self> {
        let (lo, hi) = (lo.into(), hi.into());
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch { expected: lo.dim(), found: hi.dim() });
        }
        if lo.iter().zip(hi.iter()).any(|(a, b)| a > b) {
            return Err(Error::invalid(format!("empty box {lo:?}..{hi:?}")));
        }
        Ok(BoundingBox { lo, hi })
    }

    /// The box `[0, n)^d`.
    pub fn cube(dim: usize, n: i64) -> Self {
        BoundingBox { lo: Point(vec![0; dim]), hi: Point(vec![n - 1; dim]) }
    }

    pub fn dim(&self) -> usize {
        self.lo.dim()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim() && p.iter().zip(self.lo.iter().zip(self.hi.iter())).all(|(c, (a, b))| a <= c && c <= b)
    }

    pub fn len(&self) -> usize {
        self.lo.iter().zip(self.hi.iter()).map(|(a, b)| (b - a + 1) as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All points of the box in lexicographic order.
    pub fn points(&self) -> Vec<Point> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for j in 0..self.dim() {
            let mut next = Vec::with_capacity(out.len() * (self.hi[j] - self.lo[j] + 1) as usize);
            for prefix in &out {
                for c in self.lo[j]..=self.hi[j] {
                    let mut p = prefix.clone();
                    p.push(c);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(Point).collect()
    }

    pub fn union(&self, other: &BoundingBox) -> BoundingBox {
        let lo = self.lo.iter().zip(other.lo.iter()).map(|(a, b)| *a.min(b)).collect();
        let hi = self.hi.iter().zip(other.hi.iter()).map(|(a, b)| *a.max(b)).collect();
        BoundingBox { lo: Point(lo), hi: Point(hi) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_direction_examples() {
        assert_eq!(canonical_direction(&[2, 4]).unwrap().components(), &[1, 2]);
        assert_eq!(canonical_direction(&[-1, 2]).unwrap().components(), &[1, -2]);
        assert_eq!(canonical_direction(&[1, 0]).unwrap().components(), &[1, 0]);
        assert_eq!(canonical_direction(&[0, -3]).unwrap().components(), &[0, 1]);
        assert_eq!(canonical_direction(&[0, 0]), Err(Error::ZeroDirection));
    }

    #[test]
    fn canonical_direction_is_idempotent() {
        for v in [[6, -9, 3], [0, -4, 2], [-5, 0, 0]] {
            let d = canonical_direction(&v).unwrap();
            assert_eq!(canonical_direction(d.components()).unwrap(), d);
        }
    }

    #[test]
    fn duplicates_after_reduction_rejected() {
        let err = distinct_directions(&[vec![1, 1], vec![-2, -2]]).unwrap_err();
        assert_eq!(err, Error::DuplicateDirection(vec![1, 1]));
    }

    #[test]
    fn zero_weights_are_not_stored() {
        let mut s = WeightedLatticeSet::new(2);
        s.add([0, 0].into(), 2).unwrap();
        s.add([0, 0].into(), -2).unwrap();
        assert!(s.is_empty());
        s.add([1, 0].into(), 0).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn sign_split_recombines() {
        let psi = WeightedLatticeSet::from_weighted(2, [([0, 0], 2), ([1, 0], -1), ([0, 1], -1)]).unwrap();
        let (plus, minus) = psi.sign_split();
        assert_eq!(plus.total_weight(), 2);
        assert_eq!(minus.total_weight(), 2);
        assert_eq!(plus.combine(&minus, -1).unwrap(), psi);
    }

    #[test]
    fn box_points_are_lexicographic() {
        let b = BoundingBox::new([0, 0], [1, 2]).unwrap();
        let pts = b.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], Point::from([0, 0]));
        assert_eq!(pts[1], Point::from([0, 1]));
        assert_eq!(pts[5], Point::from([1, 2]));
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }
}
