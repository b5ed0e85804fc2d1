//! Two-direction problems: consistency, reconstruction, uniqueness and
//! exact counting on small grids.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::guard;
use crate::image::BinaryImage;
use crate::lattice::{BoundingBox, Point, WeightedLatticeSet};
use crate::optim::{max_flow, min_cost_flow, FlowNetwork};
use crate::search::{count_solutions, LineSystem};
use crate::xray::{grid, grid_in_box, Instance, LineKey};

/// Value set of the reconstructed function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Codomain {
    Binary,
    Natural,
}

/// Gale-Ryser test: does a binary matrix with row sums `r` and column sums
/// `c` exist?
pub fn gale_ryser_consistent(r: &[u32], c: &[u32]) -> bool {
    let total_r: u64 = r.iter().map(|&x| u64::from(x)).sum();
    let total_c: u64 = c.iter().map(|&x| u64::from(x)).sum();
    if total_r != total_c {
        return false;
    }
    let mut cs: Vec<u64> = c.iter().map(|&x| u64::from(x)).collect();
    cs.sort_unstable_by(|a, b| b.cmp(a));
    // c sorted decreasingly must be dominated by the conjugate of r.
    let mut lhs = 0u64;
    for (k, &ck) in cs.iter().enumerate() {
        lhs += ck;
        let rhs: u64 = r.iter().map(|&ri| u64::from(ri).min(k as u64 + 1)).sum();
        if lhs > rhs {
            return false;
        }
    }
    r.iter().all(|&ri| ri as usize <= c.len())
}

/// Ryser's construction. Rows are filled in input order, each putting its
/// ones into the columns with the largest remaining sums (lowest index first
/// among equals).
pub fn ryser_reconstruct(r: &[u32], c: &[u32]) -> Option<BinaryImage> {
    if !gale_ryser_consistent(r, c) {
        return None;
    }
    let mut remaining: Vec<u32> = c.to_vec();
    let mut img = BinaryImage::new(r.len(), c.len());
    let mut order: Vec<usize> = (0..c.len()).collect();
    for (i, &ri) in r.iter().enumerate() {
        order.sort_by(|&a, &b| remaining[b].cmp(&remaining[a]).then(a.cmp(&b)));
        for &j in order.iter().take(ri as usize) {
            if remaining[j] == 0 {
                return None;
            }
            remaining[j] -= 1;
            img.set(i, j, true);
        }
    }
    remaining.iter().all(|&x| x == 0).then_some(img)
}

fn require_two(inst: &Instance) -> Result<()> {
    if inst.num_directions() != 2 {
        return Err(Error::invalid(format!("expected two directions, found {}", inst.num_directions())));
    }
    Ok(())
}

/// Reconstructs a function with the given two X-rays, or `None` if none
/// exists. Row/column data take the Ryser path; everything else is solved as
/// a flow from the lines of the first direction through grid points to the
/// lines of the second.
pub fn reconstruct_two_directions(inst: &Instance, codomain: Codomain) -> Result<Option<WeightedLatticeSet>> {
    require_two(inst)?;
    let data = inst.data();
    if data.iter().any(|f| !f.is_nonnegative()) || !inst.mass_consistent() {
        return Ok(None);
    }
    if codomain == Codomain::Binary && inst.dim() == 2 {
        let dirs = inst.directions();
        let comps: Vec<&[i64]> = dirs.iter().map(|d| d.components()).collect();
        if comps == [[0, 1], [1, 0]] {
            return Ok(axis_path(inst, 0, 1));
        }
        if comps == [[1, 0], [0, 1]] {
            return Ok(axis_path(inst, 1, 0));
        }
    }
    flow_path(inst, codomain)
}

/// Ryser on axis data. `rows` indexes the data function along (0,1), whose
/// key is the first coordinate; `cols` the one along (1,0), whose key is the
/// negated second coordinate.
fn axis_path(inst: &Instance, rows: usize, cols: usize) -> Option<WeightedLatticeSet> {
    let scalar = |k: &LineKey| match k {
        LineKey::Planar(s) => *s,
        LineKey::Representative(_) => unreachable!("planar data"),
    };
    let row_keys: Vec<(i64, i64)> = inst.data()[rows].lines().map(|(k, v)| (scalar(k), v)).collect();
    let mut col_keys: Vec<(i64, i64)> = inst.data()[cols].lines().map(|(k, v)| (-scalar(k), v)).collect();
    col_keys.reverse();
    let r: Vec<u32> = row_keys.iter().map(|&(_, v)| u32::try_from(v).ok()).collect::<Option<_>>()?;
    let c: Vec<u32> = col_keys.iter().map(|&(_, v)| u32::try_from(v).ok()).collect::<Option<_>>()?;
    let img = ryser_reconstruct(&r, &c)?;
    let mut out = WeightedLatticeSet::new(2);
    for (i, &(x, _)) in row_keys.iter().enumerate() {
        for (j, &(y, _)) in col_keys.iter().enumerate() {
            if img.get(i, j) {
                out.set(Point::from([x, y]), 1).expect("planar point");
            }
        }
    }
    Some(out)
}

fn flow_path(inst: &Instance, codomain: Codomain) -> Result<Option<WeightedLatticeSet>> {
    let (f0, f1) = (&inst.data()[0], &inst.data()[1]);
    let mass = f0.total();
    let u: BTreeMap<&LineKey, usize> = f0.lines().enumerate().map(|(i, (k, _))| (k, i)).collect();
    let w: BTreeMap<&LineKey, usize> = f1.lines().enumerate().map(|(i, (k, _))| (k, i)).collect();
    let (nu, nw) = (u.len(), w.len());
    let (s, t) = (nu + nw, nu + nw + 1);
    let mut net = FlowNetwork::new(nu + nw + 2, s, t)?;
    for (i, (_, v)) in f0.lines().enumerate() {
        net.add_arc(s, i, v, 0)?;
    }
    for (j, (_, v)) in f1.lines().enumerate() {
        net.add_arc(nu + j, t, v, 0)?;
    }
    let cap = match codomain {
        Codomain::Binary => 1,
        Codomain::Natural => mass,
    };
    let points: Vec<Point> = grid(inst)?.into_iter().collect();
    let mut point_arc = Vec::with_capacity(points.len());
    for p in &points {
        let i = u[&LineKey::of(p, f0.direction())];
        let j = w[&LineKey::of(p, f1.direction())];
        point_arc.push(net.add_arc(i, nu + j, cap, 0)?);
    }
    let flow = max_flow(&net);
    if flow.value != mass {
        return Ok(None);
    }
    let mut out = WeightedLatticeSet::new(inst.dim());
    for (p, &a) in points.iter().zip(&point_arc) {
        out.set(p.clone(), flow.flows[a])?;
    }
    Ok(Some(out))
}

/// Binary solution of a two-direction instance minimising the summed
/// `weight` of its points, or `None` if the data is infeasible. Solved as a
/// min-cost transportation problem from the lines of the first direction to
/// the lines of the second with one unit arc per grid point.
pub fn min_weight_reconstruction(inst: &Instance, weight: impl Fn(&Point) -> i64) -> Result<Option<WeightedLatticeSet>> {
    require_two(inst)?;
    let (f0, f1) = (&inst.data()[0], &inst.data()[1]);
    if !f0.is_nonnegative() || !f1.is_nonnegative() || !inst.mass_consistent() {
        return Ok(None);
    }
    let u: BTreeMap<&LineKey, usize> = f0.lines().enumerate().map(|(i, (k, _))| (k, i)).collect();
    let w: BTreeMap<&LineKey, usize> = f1.lines().enumerate().map(|(i, (k, _))| (k, i)).collect();
    let nu = u.len();
    let (s, t) = (nu + w.len(), nu + w.len() + 1);
    let mut net = FlowNetwork::new(t + 1, s, t)?;
    for (i, (_, v)) in f0.lines().enumerate() {
        net.add_arc(s, i, v, 0)?;
    }
    for (j, (_, v)) in f1.lines().enumerate() {
        net.add_arc(nu + j, t, v, 0)?;
    }
    let points: Vec<Point> = grid(inst)?.into_iter().collect();
    let mut arcs = Vec::with_capacity(points.len());
    for p in &points {
        let i = u[&LineKey::of(p, f0.direction())];
        let j = w[&LineKey::of(p, f1.direction())];
        arcs.push(net.add_arc(i, nu + j, 1, weight(p))?);
    }
    let Some(flow) = min_cost_flow(&net, f0.total())? else {
        return Ok(None);
    };
    let chosen = points.iter().zip(&arcs).filter(|(_, &a)| flow.flows[a] == 1).map(|(p, _)| p.clone());
    Ok(Some(WeightedLatticeSet::from_points(inst.dim(), chosen)?))
}

/// Is the binary set `f` the only binary set with its X-rays along the two
/// directions?
///
/// Orient every grid point as an arc between its two lines: `u -> w` if the
/// point is in `f`, `w -> u` otherwise. A directed cycle alternates points in
/// and out of `f` along shared lines, and toggling it yields another set with
/// the same X-rays; conversely the difference of two solutions splits into
/// such cycles. So `f` is unique iff the digraph is acyclic.
pub fn unique2(f: &WeightedLatticeSet, dirs: &[crate::lattice::Direction]) -> Result<bool> {
    if dirs.len() != 2 {
        return Err(Error::invalid(format!("expected two directions, found {}", dirs.len())));
    }
    if !f.is_binary() {
        return Err(Error::invalid("uniqueness is decided for binary sets"));
    }
    if f.is_empty() {
        return Ok(true);
    }
    let inst = Instance::from_set(f, dirs)?;
    let (d0, d1) = (&dirs[0], &dirs[1]);
    let u: BTreeMap<LineKey, usize> = inst.data()[0].lines().enumerate().map(|(i, (k, _))| (k.clone(), i)).collect();
    let w: BTreeMap<LineKey, usize> = inst.data()[1].lines().enumerate().map(|(i, (k, _))| (k.clone(), i)).collect();
    let nu = u.len();
    let n = nu + w.len();
    let mut adj = vec![Vec::new(); n];
    for p in grid(&inst)? {
        let a = u[&LineKey::of(&p, d0)];
        let b = nu + w[&LineKey::of(&p, d1)];
        if f.contains(&p) {
            adj[a].push(b);
        } else {
            adj[b].push(a);
        }
    }
    Ok(is_acyclic(&adj))
}

fn is_acyclic(adj: &[Vec<usize>]) -> bool {
    let mut indeg = vec![0usize; adj.len()];
    for outs in adj {
        for &v in outs {
            indeg[v] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..adj.len()).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for &x in &adj[v] {
            indeg[x] -= 1;
            if indeg[x] == 0 {
                stack.push(x);
            }
        }
    }
    seen == adj.len()
}

/// Exact number of binary solutions supported in `bbox`. Refuses grids with
/// more than [`guard::SEARCH_POINTS`] points.
pub fn count_solutions_bruteforce(inst: &Instance, bbox: &BoundingBox) -> Result<u64> {
    let candidates = grid_in_box(inst, bbox)?;
    guard::check("grid points", candidates.len(), guard::SEARCH_POINTS)?;
    Ok(count_solutions(&LineSystem::new(inst, candidates), u64::MAX))
}
