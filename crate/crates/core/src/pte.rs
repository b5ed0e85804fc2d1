//! Prouhet-Tarry-Escott solutions: verification, projection of switching
//! components and the Prouhet parity construction.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guard;
use crate::lattice::{Point, WeightedLatticeSet};
use crate::switching::SwitchingPair;

/// Two integer multisets claimed to agree in their first `degree` power sums.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PtePair {
    #[serde(rename = "X")]
    pub x: Vec<i64>,
    #[serde(rename = "Y")]
    pub y: Vec<i64>,
    pub degree: usize,
}

impl PtePair {
    pub fn verify(&self) -> Result<bool> {
        pte_verify(&self.x, &self.y, self.degree)
    }
}

fn sorted(v: &[i64]) -> Vec<i64> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s
}

fn power_sum(v: &[i64], j: u32) -> BigInt {
    v.iter().map(|&x| BigInt::from(x).pow(j)).sum()
}

/// Do `x` and `y` differ as multisets while sharing their `j`-th power sums
/// for `j = 1..=k`? Logs a warning when `n < k + 1`, where no solution can
/// exist.
pub fn pte_verify(x: &[i64], y: &[i64], k: usize) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("multisets of sizes {} and {}", x.len(), y.len())));
    }
    if x.len() < k + 1 {
        log::warn!("size {} is below degree + 1 = {}; no solution of this shape exists", x.len(), k + 1);
    }
    if sorted(x) == sorted(y) {
        return Ok(false);
    }
    Ok((1..=k as u32).all(|j| power_sum(x, j) == power_sum(y, j)))
}

/// The multiset `{c . x}` over the points of `m`, each repeated by its weight,
/// in increasing order.
pub fn project(m: &WeightedLatticeSet, c: &[i64]) -> Result<Vec<i64>> {
    if c.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: c.len() });
    }
    let mut out = Vec::new();
    for (p, w) in m.iter() {
        if w < 0 {
            return Err(Error::invalid(format!("negative multiplicity {w} at {p:?}")));
        }
        let v = p.dot(c);
        out.extend(std::iter::repeat_n(v, w as usize));
    }
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PteOutcome {
    Solution(PtePair),
    /// Both classes project onto the same multiset.
    Degenerate,
}

/// Projects a planar switching pair for `m + 1` directions along `c`; unless
/// the projections coincide they form a degree-`m` solution.
pub fn pte_from_switching(pair: &SwitchingPair, c: &[i64]) -> Result<PteOutcome> {
    if pair.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: pair.dim() });
    }
    if pair.directions.len() < 2 {
        return Err(Error::invalid("at least two directions are needed for a positive degree"));
    }
    if !pair.verify()? {
        return Err(Error::invalid("the pair is not a switching component for its directions"));
    }
    let x = project(&pair.plus, c)?;
    let y = project(&pair.minus, c)?;
    if x == y {
        return Ok(PteOutcome::Degenerate);
    }
    let out = PtePair { x, y, degree: pair.directions.len() - 1 };
    debug_assert!(out.verify().unwrap_or(false));
    Ok(PteOutcome::Solution(out))
}

/// Do the point multisets share all mixed moments `sum x1^j1 x2^j2` with
/// `j1 + j2 <= k`?
pub fn pte2_verify(x: &[Point], y: &[Point], k: usize) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("multisets of sizes {} and {}", x.len(), y.len())));
    }
    if let Some(p) = x.iter().chain(y).find(|p| p.dim() != 2) {
        return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
    }
    let moment = |pts: &[Point], j1: u32, j2: u32| -> BigInt {
        pts.iter().map(|p| BigInt::from(p[0]).pow(j1) * BigInt::from(p[1]).pow(j2)).sum()
    };
    for total in 0..=k as u32 {
        for j1 in 0..=total {
            if moment(x, j1, total - j1) != moment(y, j1, total - j1) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Expands a weighted set into a point multiset.
pub fn points_with_multiplicity(m: &WeightedLatticeSet) -> Vec<Point> {
    m.iter().flat_map(|(p, w)| std::iter::repeat_n(p.clone(), w.max(0) as usize)).collect()
}

/// Prouhet's solution of degree `k` and size `2^k`: the numbers
/// `0..2^(k+1)` split by the parity of their binary digit sums.
pub fn prouhet_solution(k: usize) -> Result<PtePair> {
    if k == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    guard::check("Prouhet degree", k, guard::PROUHET_DEGREE)?;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for p in 0..(1i64 << (k + 1)) {
        if p.count_ones() % 2 == 0 {
            x.push(p);
        } else {
            y.push(p);
        }
    }
    Ok(PtePair { x, y, degree: k })
}

/// Goldbach's degree-2 identity for parameters `(a, b, g, d)`.
pub fn goldbach_pair(a: i64, b: i64, g: i64, d: i64) -> PtePair {
    PtePair { x: vec![a + b + d, a + g + d, b + g + d, d], y: vec![a + d, b + d, g + d, a + b + g + d], degree: 2 }
}

/// Largest `k` for which the two multisets share power sums `1..=k`, capped
/// at `limit`; `None` if they are equal as multisets.
pub fn exact_degree(x: &[i64], y: &[i64], limit: usize) -> Option<usize> {
    if x.len() != y.len() || sorted(x) == sorted(y) {
        return None;
    }
    let mut k = 0;
    while k < limit && power_sum(x, k as u32 + 1) == power_sum(y, k as u32 + 1) {
        k += 1;
    }
    Some(k)
}
