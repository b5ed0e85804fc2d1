//! Particle tracking: optimal couplings of known frames under Markov costs,
//! the rolling-horizon reconstruction of frames from two X-rays each, and an
//! exhaustive search for straight-line couplings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guard;
use crate::lattice::Point;
use crate::optim::{min_weight_perfect_matching, quantize, COST_SCALE};
use crate::recon2::min_weight_reconstruction;
use crate::xray::Instance;

/// `n` tracks of `t` points each; track `i` starts at point `i` of the first
/// frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackSet {
    pub tracks: Vec<Vec<Point>>,
}

impl TrackSet {
    pub fn n(&self) -> usize {
        self.tracks.len()
    }

    pub fn t(&self) -> usize {
        self.tracks.first().map_or(0, Vec::len)
    }

    /// The points at time `tau`, in track order.
    pub fn frame(&self, tau: usize) -> Vec<Point> {
        self.tracks.iter().map(|tr| tr[tau].clone()).collect()
    }

    /// Summed step costs `cost(p, q, tau)` along all tracks.
    pub fn total_cost(&self, cost: impl Fn(&Point, &Point, usize) -> f64) -> f64 {
        self.tracks.iter().map(|tr| tr.windows(2).enumerate().map(|(tau, w)| cost(&w[0], &w[1], tau)).sum::<f64>()).sum()
    }

    /// Does every track move with constant velocity?
    pub fn is_affine(&self) -> bool {
        self.tracks.iter().all(|tr| is_affine(tr))
    }

    /// Does every track stay on one line?
    pub fn is_collinear(&self) -> bool {
        self.tracks.iter().all(|tr| is_collinear(tr))
    }
}

fn check_frames(frames: &[Vec<Point>]) -> Result<(usize, usize)> {
    let Some(first) = frames.first() else {
        return Err(Error::invalid("no frames"));
    };
    let n = first.len();
    let dim = first.first().map_or(0, Point::dim);
    for (tau, f) in frames.iter().enumerate() {
        if f.len() != n {
            return Err(Error::invalid(format!("frame {tau} has {} points, frame 0 has {n}", f.len())));
        }
        if let Some(p) = f.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
    }
    Ok((n, dim))
}

/// Optimal tracking for a Markov-type objective: the coupling decomposes into
/// one minimum-weight perfect matching per consecutive pair of frames.
/// `cost(p, q, tau)` is the cost of moving from `p` in frame `tau` to `q` in
/// frame `tau + 1`; costs are quantized at [`COST_SCALE`].
pub fn markov_track(frames: &[Vec<Point>], cost: impl Fn(&Point, &Point, usize) -> f64) -> Result<TrackSet> {
    check_frames(frames)?;
    let mut tracks: Vec<Vec<Point>> = frames[0].iter().map(|p| vec![p.clone()]).collect();
    for tau in 0..frames.len() - 1 {
        let next = &frames[tau + 1];
        let mut costs = Vec::with_capacity(tracks.len());
        for tr in &tracks {
            let p = tr.last().expect("tracks are nonempty");
            costs.push(next.iter().map(|q| quantize(cost(p, q, tau), COST_SCALE)).collect::<Result<Vec<_>>>()?);
        }
        let m = min_weight_perfect_matching(&costs)?;
        for (tr, &j) in tracks.iter_mut().zip(&m.permutation) {
            tr.push(next[j].clone());
        }
    }
    Ok(TrackSet { tracks })
}

/// Squared Euclidean step length.
pub fn squared_step(p: &Point, q: &Point, _tau: usize) -> f64 {
    p.squared_distance(q) as f64
}

/// How a candidate point is weighted against the tracks built so far.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightModel {
    /// Squared distance to the nearest last track point.
    NearestPredecessor,
    /// Squared distance to the nearest constant-velocity prediction
    /// `2 p(tau) - p(tau - 1)`; the last point for tracks of length one.
    ConstantVelocity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RollingOutcome {
    /// Frames `2..=t` and the tracks through all `t` frames.
    Solved { frames: Vec<Vec<Point>>, tracks: TrackSet },
    /// The data for this frame (0 being the known first frame) admits no
    /// set of the right size.
    InfeasibleFrame(usize),
}

fn predictions(tracks: &[Vec<Point>], model: WeightModel) -> Vec<Point> {
    tracks
        .iter()
        .map(|tr| {
            let last = &tr[tr.len() - 1];
            match (model, tr.len()) {
                (WeightModel::ConstantVelocity, l) if l >= 2 => last.offset(&last.sub(&tr[l - 2]), 1),
                _ => last.clone(),
            }
        })
        .collect()
}

/// Rolling-horizon tomography. Frame `tau + 1` is reconstructed from
/// `data[tau - 1]` (two directions) as the integral solution of the
/// transportation problem whose point weights are the squared distance to the
/// nearest predicted position; tracks are then extended by a minimum-weight
/// matching of predictions to the new points. Each frame reproduces its data
/// exactly; the tracks are heuristic.
pub fn rolling_horizon(first: &[Point], data: &[Instance], model: WeightModel) -> Result<RollingOutcome> {
    let n = first.len();
    let dim = first.first().map_or(2, Point::dim);
    if let Some(p) = first.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
    }
    let mut tracks: Vec<Vec<Point>> = first.iter().map(|p| vec![p.clone()]).collect();
    let mut frames = Vec::with_capacity(data.len());
    for (k, inst) in data.iter().enumerate() {
        if inst.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: inst.dim() });
        }
        if inst.num_directions() != 2 {
            return Err(Error::invalid(format!("frame {} has {} directions, expected 2", k + 1, inst.num_directions())));
        }
        if inst.mass() != Some(n as i64) {
            return Ok(RollingOutcome::InfeasibleFrame(k + 1));
        }
        let pred = predictions(&tracks, model);
        let weight = |x: &Point| pred.iter().map(|p| x.squared_distance(p)).min().unwrap_or(0);
        let Some(set) = min_weight_reconstruction(inst, weight)? else {
            return Ok(RollingOutcome::InfeasibleFrame(k + 1));
        };
        let frame: Vec<Point> = set.points().cloned().collect();
        let costs: Vec<Vec<i64>> = pred.iter().map(|p| frame.iter().map(|q| p.squared_distance(q)).collect()).collect();
        let m = min_weight_perfect_matching(&costs)?;
        for (tr, &j) in tracks.iter_mut().zip(&m.permutation) {
            tr.push(frame[j].clone());
        }
        frames.push(frame);
    }
    Ok(RollingOutcome::Solved { frames, tracks: TrackSet { tracks } })
}

/// What counts as a straight track.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineModel {
    /// All points on one line, arbitrary spacing.
    Collinear,
    /// Affine in time: constant velocity.
    ConstantVelocity,
}

fn is_collinear(pts: &[Point]) -> bool {
    let Some(p0) = pts.first() else { return true };
    let Some(q) = pts.iter().find(|q| *q != p0) else { return true };
    let u = q.sub(p0);
    pts.iter().all(|r| {
        let v = r.sub(p0);
        (0..u.dim()).all(|a| (a + 1..u.dim()).all(|b| i128::from(u[a]) * i128::from(v[b]) == i128::from(u[b]) * i128::from(v[a])))
    })
}

fn is_affine(pts: &[Point]) -> bool {
    pts.windows(3).all(|w| w[2].sub(&w[1]) == w[1].sub(&w[0]))
}

fn admissible(track: &[Point], model: LineModel) -> bool {
    match model {
        LineModel::Collinear => is_collinear(track),
        LineModel::ConstantVelocity => is_affine(&track[track.len().saturating_sub(3)..]),
    }
}

/// A coupling in which every track is straight, or `None` if exhaustion over
/// all `(n!)^(t-1)` couplings finds none. Guarded by
/// [`guard::COUPLING_PARTICLES`] and [`guard::COUPLING_FRAMES`].
pub fn straight_line_coupling_bruteforce(frames: &[Vec<Point>], model: LineModel) -> Result<Option<TrackSet>> {
    let (n, _) = check_frames(frames)?;
    guard::check("particles", n, guard::COUPLING_PARTICLES)?;
    guard::check("frames", frames.len(), guard::COUPLING_FRAMES)?;
    let mut tracks: Vec<Vec<Point>> = frames[0].iter().map(|p| vec![p.clone()]).collect();
    let mut used = vec![false; n];
    if couple(frames, model, 1, 0, &mut tracks, &mut used) {
        Ok(Some(TrackSet { tracks }))
    } else {
        Ok(None)
    }
}

fn couple(frames: &[Vec<Point>], model: LineModel, tau: usize, i: usize, tracks: &mut [Vec<Point>], used: &mut [bool]) -> bool {
    let n = tracks.len();
    if tau == frames.len() {
        return true;
    }
    if i == n {
        return couple(frames, model, tau + 1, 0, tracks, &mut vec![false; n]);
    }
    for j in 0..n {
        if used[j] {
            continue;
        }
        tracks[i].push(frames[tau][j].clone());
        if admissible(&tracks[i], model) {
            used[j] = true;
            if couple(frames, model, tau, i + 1, tracks, used) {
                return true;
            }
            used[j] = false;
        }
        tracks[i].pop();
    }
    false
}
