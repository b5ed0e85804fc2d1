//! Switching components and uniqueness predicates.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::guard;
use crate::lattice::{BoundingBox, Direction, Point, WeightedLatticeSet};
use crate::search::{count_solutions, LineSystem};
use crate::xray::{grid_in_box, xray, xray_difference, Instance};

/// Two nonnegative functions with disjoint supports and equal X-rays along
/// `directions`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwitchingPair {
    pub plus: WeightedLatticeSet,
    pub minus: WeightedLatticeSet,
    pub directions: Vec<Direction>,
    /// Translation multiple used for each direction.
    pub steps: Vec<i64>,
}

impl SwitchingPair {
    /// Builds a pair from two binary sets, checking that they switch.
    pub fn from_sets(x: WeightedLatticeSet, y: WeightedLatticeSet, directions: Vec<Direction>) -> Result<Self> {
        if x.common_points(&y) != 0 {
            return Err(Error::invalid("switching classes must be disjoint"));
        }
        if !tomographically_equivalent(&x, &y, &directions)? {
            return Err(Error::invalid("the sets are not tomographically equivalent"));
        }
        Ok(SwitchingPair { plus: x, minus: y, steps: vec![0; directions.len()], directions })
    }

    pub fn dim(&self) -> usize {
        self.plus.dim()
    }

    /// Re-checks the defining invariants.
    pub fn verify(&self) -> Result<bool> {
        Ok(self.plus.is_nonnegative()
            && self.minus.is_nonnegative()
            && self.plus.common_points(&self.minus) == 0
            && self.plus.total_weight() == self.minus.total_weight()
            && tomographically_equivalent(&self.plus, &self.minus, &self.directions)?)
    }
}

/// Smallest `lambda >= 1` such that `psi` and `psi` shifted by `lambda v`
/// never carry the same sign at one point, so subtracting the shift cancels
/// nothing.
fn separating_step(psi: &WeightedLatticeSet, v: &[i64]) -> i64 {
    let mut lambda = 1;
    loop {
        let clash = psi.iter().any(|(p, w)| {
            let q = p.offset(v, -lambda);
            psi.weight(&q).signum() * w.signum() > 0
        });
        if !clash {
            return lambda;
        }
        lambda += 1;
    }
}

/// The product construction: starting from the indicator of `base`, replace
/// `psi` by `psi - psi(. - lambda_i v_i)` for each direction, then split by
/// sign. Each `lambda_i` is the smallest multiple that avoids cancellation, so
/// both classes end up with total weight `2^(m-1)`.
pub fn zonotope_switching(dirs: &[Direction], base: &Point) -> Result<SwitchingPair> {
    zonotope_impl(dirs, base, None)
}

/// The same construction with caller-chosen translation multiples. Colliding
/// translates may cancel, in which case the class totals drop below
/// `2^(m-1)`.
pub fn zonotope_switching_with_steps(dirs: &[Direction], base: &Point, steps: &[i64]) -> Result<SwitchingPair> {
    if steps.len() != dirs.len() || steps.contains(&0) {
        return Err(Error::invalid("one nonzero step per direction is required"));
    }
    zonotope_impl(dirs, base, Some(steps))
}

fn zonotope_impl(dirs: &[Direction], base: &Point, steps: Option<&[i64]>) -> Result<SwitchingPair> {
    if dirs.is_empty() {
        return Err(Error::invalid("at least one direction is required"));
    }
    for (i, d) in dirs.iter().enumerate() {
        if d.dim() != base.dim() {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: d.dim() });
        }
        if dirs[..i].contains(d) {
            return Err(Error::DuplicateDirection(d.components().to_vec()));
        }
    }
    let mut psi = WeightedLatticeSet::new(base.dim());
    psi.set(base.clone(), 1)?;
    let mut used = Vec::with_capacity(dirs.len());
    for (i, d) in dirs.iter().enumerate() {
        let lambda = match steps {
            Some(s) => s[i],
            None => separating_step(&psi, d.components()),
        };
        let shift: Vec<i64> = d.components().iter().map(|&c| c * lambda).collect();
        psi = psi.combine(&psi.translate(&shift), -1)?;
        used.push(lambda);
    }
    let (plus, minus) = psi.sign_split();
    Ok(SwitchingPair { plus, minus, directions: dirs.to_vec(), steps: used })
}

/// Do `f1` and `f2` have the same X-ray along every direction?
pub fn tomographically_equivalent(f1: &WeightedLatticeSet, f2: &WeightedLatticeSet, dirs: &[Direction]) -> Result<bool> {
    for d in dirs {
        if xray(f1, d)? != xray(f2, d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Divides the polynomial `sum_a p(a) X^a` by `X^{v+} - X^{v-}`, returning
/// quotient and remainder. Exponents must be nonnegative.
///
/// Along every fibre `a + Z v` the highest term `c X^a` is rewritten as
/// `c X^{a-v+} (X^{v+} - X^{v-}) + c X^{a-v}` while `a - v` stays in the
/// orthant; what is left at the bottom of the fibre is remainder.
pub fn divide_by_binomial(p: &WeightedLatticeSet, v: &Direction) -> Result<(WeightedLatticeSet, WeightedLatticeSet)> {
    if p.dim() != v.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: v.dim() });
    }
    if p.points().any(|a| a.iter().any(|&x| x < 0)) {
        return Err(Error::invalid("exponents must be nonnegative"));
    }
    let vc = v.components();
    let vplus = v.plus_part();
    let mut work = p.clone();
    let mut quotient = WeightedLatticeSet::new(p.dim());
    // Every step moves a term one multiple of v down its fibre, so descending
    // along the first nonzero coordinate of v always visits highest terms first.
    let lead = vc.iter().position(|&c| c != 0).expect("nonzero direction");
    let sign = vc[lead].signum();
    loop {
        let next = work
            .iter()
            .filter(|(a, _)| a.iter().zip(vc).all(|(&x, &c)| x - c >= 0))
            .max_by_key(|(a, _)| (a[lead] * sign, (*a).clone()))
            .map(|(a, w)| (a.clone(), w));
        let Some((a, c)) = next else { break };
        let q = Point::from(a.iter().zip(&vplus).map(|(&x, &y)| x - y).collect::<Vec<_>>());
        quotient.add(q, c)?;
        work.add(a.clone(), -c)?;
        work.add(a.offset(vc, -1), c)?;
    }
    Ok((quotient, work))
}

/// Hajdu-Tijdeman test: is `sum_psi X^a - sum_phi X^b` divisible by
/// `X^{v+} - X^{v-}`? Equivalent to equal X-rays along `v`.
pub fn divisibility_check(psi: &WeightedLatticeSet, phi: &WeightedLatticeSet, v: &Direction) -> Result<bool> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), found: phi.dim() });
    }
    if psi.points().chain(phi.points()).any(|a| a.iter().any(|&x| x < 0)) {
        return Err(Error::invalid("supports must lie in the nonnegative orthant"));
    }
    let diff = psi.combine(phi, -1)?;
    let (_, remainder) = divide_by_binomial(&diff, v)?;
    let divisible = remainder.is_empty();
    debug_assert_eq!(divisible, xray(psi, v)?.l1_distance(&xray(phi, v)?)? == 0);
    Ok(divisible)
}

/// Cross-ratio `(s1, s2; s3, s4)` of the slopes of four planar directions,
/// computed projectively: with `D_ij = a_i b_j - a_j b_i` it equals
/// `D13 D24 / (D23 D14)`, which also covers vertical directions.
pub fn cross_ratio(dirs: &[Direction]) -> Result<Ratio<i128>> {
    if dirs.len() != 4 {
        return Err(Error::invalid(format!("need 4 directions, found {}", dirs.len())));
    }
    for (i, d) in dirs.iter().enumerate() {
        if d.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: d.dim() });
        }
        if dirs[..i].contains(d) {
            return Err(Error::DuplicateDirection(d.components().to_vec()));
        }
    }
    let det = |i: usize, j: usize| {
        let (a, b) = (dirs[i].components(), dirs[j].components());
        i128::from(a[0]) * i128::from(b[1]) - i128::from(b[0]) * i128::from(a[1])
    };
    Ok(Ratio::new(det(0, 2) * det(1, 3), det(1, 2) * det(0, 3)))
}

/// Is the cross-ratio of the four slopes outside {4/3, 3/2, 2, 3, 4}? Such
/// direction sets determine convex lattice sets uniquely. The whole orbit
/// of the cross-ratio under reordering is tested, so the answer does not
/// depend on the order in which the directions are given.
pub fn good_four_cross_ratio(dirs: &[Direction]) -> Result<bool> {
    let l = cross_ratio(dirs)?;
    let one = Ratio::from_integer(1);
    let orbit = [l, one / l, one - l, one / (one - l), l / (l - one), (l - one) / l];
    let bad = [Ratio::new(4, 3), Ratio::new(3, 2), Ratio::from_integer(2), Ratio::from_integer(3), Ratio::from_integer(4)];
    Ok(!orbit.iter().any(|x| bad.contains(x)))
}

/// Is `f` the only binary set in `bbox` with its X-rays along `dirs`?
/// Exhaustive; the grid inside the box may hold at most
/// [`guard::SEARCH_POINTS`] points.
pub fn renyi_uniqueness_check(f: &WeightedLatticeSet, dirs: &[Direction], bbox: &BoundingBox) -> Result<bool> {
    if !f.is_binary() {
        return Err(Error::invalid("uniqueness is decided for binary sets"));
    }
    let inst = Instance::from_set(f, dirs)?;
    let candidates = grid_in_box(&inst, bbox)?;
    guard::check("grid points", candidates.len(), guard::SEARCH_POINTS)?;
    let n = count_solutions(&LineSystem::new(&inst, candidates), 2);
    let inside = f.points().all(|p| bbox.contains(p));
    Ok(if inside { n == 1 } else { n == 0 })
}

/// `Delta_S` between the two classes, 0 for a genuine pair.
pub fn pair_difference(pair: &SwitchingPair) -> Result<i64> {
    xray_difference(&pair.plus, &pair.minus, &pair.directions)
}
