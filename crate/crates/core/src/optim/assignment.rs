//! Assignment of many items to few bins under per-bin count bounds.
//!
//! This is the transportation problem `min sum c[i][j] x[i][j]` with
//! `sum_j x[i][j] = 1` and `lo[j] <= sum_i x[i][j] <= hi[j]`, solved as a
//! min-cost flow `items -> bins -> T` by successive shortest paths. Items are
//! inserted one at a time; the shortest path from a new item runs over a
//! condensed residual graph on the bins (plus `T`), where the edge `j -> k`
//! moves the cheapest item currently in `j` over to `k`. With few bins each
//! augmentation costs `O(bins^3)` plus heap maintenance, independent of the
//! number of items.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacitatedAssignment {
    /// Bin of every item.
    pub assignment: Vec<usize>,
    pub cost: i64,
    /// Bin offsets `sigma` with `c[i][a(i)] - sigma[a(i)] <= c[i][k] - sigma[k]`
    /// for every item `i` and bin `k`.
    pub bin_potentials: Vec<i64>,
}

impl CapacitatedAssignment {
    pub fn counts(&self, bins: usize) -> Vec<usize> {
        let mut c = vec![0; bins];
        for &j in &self.assignment {
            c[j] += 1;
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    None,
    Start,
    Move { from: usize, item: usize },
    ToSink { from: usize },
    FromSink,
}

struct State<'a> {
    costs: &'a [Vec<i64>],
    bins: usize,
    lower: &'a [usize],
    upper: &'a [usize],
    bin_of: Vec<usize>,
    absorbed: Vec<usize>,
    to_sink: Vec<usize>,
    sink_in: usize,
    sink_demand: usize,
    // heaps[j * bins + k]: items in bin j keyed by c[i][k] - c[i][j]
    heaps: Vec<BinaryHeap<Reverse<(i64, usize)>>>,
}

impl State<'_> {
    fn place(&mut self, item: usize, bin: usize) {
        self.bin_of[item] = bin;
        let row = &self.costs[item];
        for k in 0..self.bins {
            if k != bin {
                self.heaps[bin * self.bins + k].push(Reverse((row[k] - row[bin], item)));
            }
        }
    }

    /// Cheapest item to move from `j` to `k`, discarding stale heap entries.
    fn best_move(&mut self, j: usize, k: usize) -> Option<(i64, usize)> {
        let heap = &mut self.heaps[j * self.bins + k];
        while let Some(&Reverse((key, item))) = heap.peek() {
            if self.bin_of[item] == j {
                return Some((key, item));
            }
            heap.pop();
        }
        None
    }

    /// Bellman-Ford over bins and `T` (index `bins`) from the given start distances.
    fn shortest_paths(&mut self, mut dist: Vec<i64>, mut step: Vec<Step>) -> (Vec<i64>, Vec<Step>, Vec<usize>) {
        let t = self.bins;
        let mut pred = vec![usize::MAX; t + 1];
        for _ in 0..=t {
            let mut changed = false;
            for j in 0..t {
                if dist[j] == i64::MAX {
                    continue;
                }
                for k in 0..t {
                    if k == j {
                        continue;
                    }
                    if let Some((key, item)) = self.best_move(j, k) {
                        let nd = dist[j] + key;
                        if nd < dist[k] {
                            dist[k] = nd;
                            step[k] = Step::Move { from: j, item };
                            pred[k] = j;
                            changed = true;
                        }
                    }
                }
                if self.to_sink[j] + self.lower[j] < self.upper[j] && dist[j] < dist[t] {
                    dist[t] = dist[j];
                    step[t] = Step::ToSink { from: j };
                    pred[t] = j;
                    changed = true;
                }
            }
            if dist[t] != i64::MAX {
                for k in 0..t {
                    if self.to_sink[k] > 0 && dist[t] < dist[k] {
                        dist[k] = dist[t];
                        step[k] = Step::FromSink;
                        pred[k] = t;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        (dist, step, pred)
    }

    fn insert(&mut self, item: usize) -> bool {
        let t = self.bins;
        let mut dist = vec![i64::MAX; t + 1];
        let mut step = vec![Step::None; t + 1];
        for j in 0..t {
            dist[j] = self.costs[item][j];
            step[j] = Step::Start;
        }
        let (dist, step, pred) = self.shortest_paths(dist, step);
        let target = (0..t)
            .filter(|&j| self.absorbed[j] < self.lower[j])
            .chain((self.sink_in < self.sink_demand).then_some(t))
            .filter(|&v| dist[v] != i64::MAX)
            .min_by_key(|&v| (dist[v], v));
        let Some(target) = target else {
            return false;
        };
        if target == t {
            self.sink_in += 1;
        } else {
            self.absorbed[target] += 1;
        }
        let mut v = target;
        loop {
            match step[v] {
                Step::Start => {
                    self.place(item, v);
                    break;
                }
                Step::Move { from, item: moved } => {
                    self.place(moved, v);
                    v = from;
                }
                Step::ToSink { from } => {
                    self.to_sink[from] += 1;
                    v = from;
                }
                Step::FromSink => {
                    self.to_sink[v] -= 1;
                    v = pred[v];
                }
                Step::None => unreachable!("broken predecessor chain"),
            }
        }
        true
    }
}

/// Solves the bounded assignment problem exactly. Returns `Ok(None)` when no
/// assignment meets the bounds.
pub fn capacitated_assignment(
    costs: &[Vec<i64>],
    lower: &[usize],
    upper: &[usize],
) -> Result<Option<CapacitatedAssignment>> {
    let bins = lower.len();
    if bins == 0 || upper.len() != bins {
        return Err(Error::invalid("bounds must be given for at least one bin"));
    }
    if costs.iter().any(|r| r.len() != bins) {
        return Err(Error::invalid("every cost row needs one entry per bin"));
    }
    let q = costs.len();
    let lo_sum: usize = lower.iter().sum();
    let hi_sum: usize = upper.iter().sum();
    if lower.iter().zip(upper).any(|(l, h)| l > h) || lo_sum > q || hi_sum < q {
        return Ok(None);
    }
    let mut st = State {
        costs,
        bins,
        lower,
        upper,
        bin_of: vec![usize::MAX; q],
        absorbed: vec![0; bins],
        to_sink: vec![0; bins],
        sink_in: 0,
        sink_demand: q - lo_sum,
        heaps: vec![BinaryHeap::new(); bins * bins],
    };
    for item in 0..q {
        if !st.insert(item) {
            return Ok(None);
        }
    }
    let (dist, _, _) = st.shortest_paths(vec![0; bins + 1], vec![Step::None; bins + 1]);
    let cost = st.bin_of.iter().enumerate().map(|(i, &j)| costs[i][j]).sum();
    Ok(Some(CapacitatedAssignment { assignment: st.bin_of, cost, bin_potentials: dist[..bins].to_vec() }))
}
