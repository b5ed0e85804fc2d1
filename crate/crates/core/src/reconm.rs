//! Reconstruction from three or more directions: exhaustive search on small
//! grids, the alternating-direction heuristic and nearest-solution fitting
//! of noisy data.

use crate::error::{Error, Result};
use crate::guard;
use crate::lattice::{BoundingBox, Point, WeightedLatticeSet};
use crate::recon2::{min_weight_reconstruction, reconstruct_two_directions, Codomain};
use crate::search::{first_solution, nearest, LineSystem};
use crate::xray::{grid_in_box, Instance};

pub const DEFAULT_MAX_ROUNDS: usize = 50;

/// Lexicographically smallest binary solution supported in `bbox`, or `None`
/// if there is none.
pub fn reconstruct_bruteforce(inst: &Instance, bbox: &BoundingBox) -> Result<Option<WeightedLatticeSet>> {
    let candidates = grid_in_box(inst, bbox)?;
    guard::check("grid points", candidates.len(), guard::SEARCH_POINTS)?;
    Ok(first_solution(&LineSystem::new(inst, candidates)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternatingOutcome {
    pub set: WeightedLatticeSet,
    /// Total X-ray mismatch over the directions not in `active`.
    pub residual: i64,
    /// The pair of direction indices `set` satisfies exactly.
    pub active: (usize, usize),
    /// Attempted rounds, including the initial solve.
    pub rounds: usize,
    /// Residual after the initial solve and after each accepted round.
    pub history: Vec<i64>,
}

/// Alternating-direction heuristic.
///
/// Start from a solution for directions 0 and 1, then cycle through the
/// pairs (1,2), (2,3), ..., (m-1,0). Each round re-solves the next pair as a
/// transportation problem on its grid where a point costs its l1 distance to
/// the nearest point of the current set; the new set is kept only if the total
/// mismatch does not grow. Stops at residual 0, after `max_rounds` rounds, or
/// after a full cycle without change.
pub fn alternating_directions(inst: &Instance, max_rounds: usize) -> Result<AlternatingOutcome> {
    let m = inst.num_directions();
    if m < 2 {
        return Err(Error::invalid("the alternating heuristic needs at least two directions"));
    }
    let first = reconstruct_two_directions(&inst.restrict(&[0, 1])?, Codomain::Binary)?;
    let Some(mut current) = first else {
        let empty = WeightedLatticeSet::new(inst.dim());
        let residual = inst.mismatch(&empty)?;
        return Ok(AlternatingOutcome { set: empty, residual, active: (0, 1), rounds: 0, history: vec![residual] });
    };
    let mut residual = inst.mismatch(&current)?;
    let mut history = vec![residual];
    let mut active = (0, 1);
    let mut rounds = 1;
    let mut idle = 0;
    let mut pair = 0;
    while residual > 0 && rounds < max_rounds && idle < m {
        pair = (pair + 1) % m;
        let next = (pair, (pair + 1) % m);
        let sub = inst.restrict(&[next.0, next.1])?;
        let candidate = closest_solution(&sub, &current)?;
        rounds += 1;
        match candidate {
            Some(f) if f != current => {
                let r = inst.mismatch(&f)?;
                if r <= residual {
                    log::debug!("round {rounds}: pair {next:?}, residual {residual} -> {r}");
                    idle = if r < residual { 0 } else { idle + 1 };
                    current = f;
                    residual = r;
                    history.push(r);
                    active = next;
                } else {
                    idle += 1;
                }
            }
            _ => idle += 1,
        }
    }
    Ok(AlternatingOutcome { set: current, residual, active, rounds, history })
}

/// Binary solution of a two-direction instance closest to `target` in the
/// summed l1 displacement sense.
fn closest_solution(sub: &Instance, target: &WeightedLatticeSet) -> Result<Option<WeightedLatticeSet>> {
    min_weight_reconstruction(sub, |p| target.points().map(|q| p.l1_distance(q)).min().unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearestSolution {
    pub set: WeightedLatticeSet,
    /// `sum_S ||X_S set - f_S||_1`.
    pub distance: i64,
    /// Whether the data can be corrected, i.e. `distance <= m - 1`.
    pub correctable: bool,
}

/// Binary set in `bbox` whose X-rays fit the data best. Only box points on
/// some nonzero line are candidates (any other point just adds mismatch);
/// at most [`guard::NEAREST_POINTS`] of them are allowed.
pub fn nearest_solution_bruteforce(inst: &Instance, bbox: &BoundingBox) -> Result<NearestSolution> {
    if bbox.dim() != inst.dim() {
        return Err(Error::DimensionMismatch { expected: inst.dim(), found: bbox.dim() });
    }
    let candidates: Vec<Point> = bbox
        .points()
        .into_iter()
        .filter(|p| inst.data().iter().any(|f| f.value_at(p) != 0))
        .collect();
    guard::check("candidate points", candidates.len(), guard::NEAREST_POINTS)?;
    let (set, distance) = nearest(&LineSystem::new(inst, candidates));
    let correctable = distance < inst.num_directions() as i64;
    Ok(NearestSolution { set, distance, correctable })
}
