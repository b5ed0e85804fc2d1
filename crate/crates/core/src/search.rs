//! Exhaustive search over binary functions on a finite candidate set.
//!
//! Candidates are sorted, and each one is decided include-first, so
//! solutions come out in increasing lexicographic order of their sorted point
//! lists. Pruning keeps, per line, the still-needed mass and the number of
//! undecided candidates left on it.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use crate::lattice::{Point, WeightedLatticeSet};
use crate::xray::{Instance, LineKey};

/// Candidate points with their line incidences, one line per direction.
pub(crate) struct LineSystem {
    pub dim: usize,
    pub points: Vec<Point>,
    /// `incidence[i]` lists the global line ids of point `i`.
    pub incidence: Vec<Vec<usize>>,
    /// Target value of every global line id.
    pub target: Vec<i64>,
}

impl LineSystem {
    /// Builds the line system of `inst` over `candidates`. Data lines that no
    /// candidate meets are kept, so unreachable mass shows up as a deficit.
    pub fn new(inst: &Instance, mut candidates: Vec<Point>) -> Self {
        candidates.sort();
        candidates.dedup();
        let mut ids: Vec<BTreeMap<LineKey, usize>> = vec![BTreeMap::new(); inst.num_directions()];
        let mut target = Vec::new();
        for (d, f) in inst.data().iter().enumerate() {
            for (k, v) in f.lines() {
                ids[d].insert(k.clone(), target.len());
                target.push(v);
            }
        }
        let mut incidence = Vec::with_capacity(candidates.len());
        for p in &candidates {
            let mut lines = Vec::with_capacity(ids.len());
            for (d, f) in inst.data().iter().enumerate() {
                let key = LineKey::of(p, f.direction());
                let id = *ids[d].entry(key).or_insert_with(|| {
                    target.push(0);
                    target.len() - 1
                });
                lines.push(id);
            }
            incidence.push(lines);
        }
        LineSystem { dim: inst.dim(), points: candidates, incidence, target }
    }

    pub fn num_lines(&self) -> usize {
        self.target.len()
    }

    fn set_of(&self, chosen: &[usize]) -> WeightedLatticeSet {
        WeightedLatticeSet::from_points(self.dim, chosen.iter().map(|&i| self.points[i].clone()))
            .expect("candidates share one dimension")
    }
}

struct Exact<'a, F> {
    sys: &'a LineSystem,
    need: Vec<i64>,
    avail: Vec<i64>,
    chosen: Vec<usize>,
    visit: F,
}

impl<F: FnMut(WeightedLatticeSet) -> ControlFlow<()>> Exact<'_, F> {
    fn run(&mut self, i: usize) -> ControlFlow<()> {
        if i == self.sys.points.len() {
            if self.need.iter().all(|&n| n == 0) {
                return (self.visit)(self.sys.set_of(&self.chosen));
            }
            return ControlFlow::Continue(());
        }
        let lines = &self.sys.incidence[i];
        for &l in lines {
            self.avail[l] -= 1;
        }
        if lines.iter().all(|&l| self.need[l] > 0) {
            for &l in lines {
                self.need[l] -= 1;
            }
            self.chosen.push(i);
            let r = self.run(i + 1);
            self.chosen.pop();
            for &l in lines {
                self.need[l] += 1;
            }
            if r.is_break() {
                for &l in lines {
                    self.avail[l] += 1;
                }
                return r;
            }
        }
        let r = if lines.iter().all(|&l| self.need[l] <= self.avail[l]) {
            self.run(i + 1)
        } else {
            ControlFlow::Continue(())
        };
        for &l in lines {
            self.avail[l] += 1;
        }
        r
    }
}

/// Visits every binary solution of the line system in lexicographic order
/// until `visit` breaks.
pub(crate) fn for_each_solution(sys: &LineSystem, visit: impl FnMut(WeightedLatticeSet) -> ControlFlow<()>) {
    let mut avail = vec![0i64; sys.num_lines()];
    for lines in &sys.incidence {
        for &l in lines {
            avail[l] += 1;
        }
    }
    let need = sys.target.clone();
    if need.iter().zip(&avail).any(|(&n, &a)| n < 0 || n > a) {
        return;
    }
    let mut state = Exact { sys, need, avail, chosen: Vec::new(), visit };
    let _ = state.run(0);
}

/// Number of solutions, stopping once `cap` have been seen.
pub(crate) fn count_solutions(sys: &LineSystem, cap: u64) -> u64 {
    let mut n = 0u64;
    for_each_solution(sys, |_| {
        n += 1;
        if n >= cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    n
}

pub(crate) fn first_solution(sys: &LineSystem) -> Option<WeightedLatticeSet> {
    let mut out = None;
    for_each_solution(sys, |s| {
        out = Some(s);
        ControlFlow::Break(())
    });
    out
}

struct Nearest<'a> {
    sys: &'a LineSystem,
    count: Vec<i64>,
    avail: Vec<i64>,
    chosen: Vec<usize>,
    best: Option<(i64, Vec<usize>)>,
}

impl Nearest<'_> {
    /// Irrevocable mismatch on line `l`: overshoot already placed, or a
    /// deficit the remaining candidates cannot cover.
    fn line_bound(&self, l: usize) -> i64 {
        let (c, t, a) = (self.count[l], self.sys.target[l], self.avail[l]);
        if c > t {
            c - t
        } else {
            (t - c - a).max(0)
        }
    }

    fn bound(&self) -> i64 {
        (0..self.sys.num_lines()).map(|l| self.line_bound(l)).sum()
    }

    fn run(&mut self, i: usize, bound: i64) {
        if let Some((b, _)) = &self.best {
            if bound >= *b {
                return;
            }
        }
        if i == self.sys.points.len() {
            self.best = Some((bound, self.chosen.clone()));
            return;
        }
        let lines = self.sys.incidence[i].clone();
        let before: i64 = lines.iter().map(|&l| self.line_bound(l)).sum();
        for &l in &lines {
            self.avail[l] -= 1;
            self.count[l] += 1;
        }
        let after: i64 = lines.iter().map(|&l| self.line_bound(l)).sum();
        self.chosen.push(i);
        self.run(i + 1, bound - before + after);
        self.chosen.pop();
        for &l in &lines {
            self.count[l] -= 1;
        }
        let after: i64 = lines.iter().map(|&l| self.line_bound(l)).sum();
        self.run(i + 1, bound - before + after);
        for &l in &lines {
            self.avail[l] += 1;
        }
    }
}

/// Binary set over the candidates minimising the total line mismatch, with
/// that mismatch. Ties go to the lexicographically smallest set.
pub(crate) fn nearest(sys: &LineSystem) -> (WeightedLatticeSet, i64) {
    let mut avail = vec![0i64; sys.num_lines()];
    for lines in &sys.incidence {
        for &l in lines {
            avail[l] += 1;
        }
    }
    let mut state = Nearest { sys, count: vec![0; sys.num_lines()], avail, chosen: Vec::new(), best: None };
    let b = state.bound();
    state.run(0, b);
    let (dist, chosen) = state.best.expect("the empty set is always a candidate");
    (sys.set_of(&chosen), dist)
}
