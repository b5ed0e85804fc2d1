//! Double resolution and noisy superresolution: binary images from k x k
//! block gray values plus fine-scale row and column sums.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::guard;
use crate::image::{col_data, row_data, sums_from_col_data, sums_from_row_data, BinaryImage, GrayImage};
use crate::optim::{max_flow, FlowNetwork};
use crate::xray::DataFunction;

/// Number of ones in every `k x k` block.
pub fn downsample(img: &BinaryImage, k: usize) -> Result<GrayImage> {
    if k == 0 || !img.rows().is_multiple_of(k) || !img.cols().is_multiple_of(k) {
        return Err(Error::invalid(format!("{}x{} image is not divisible into {k}x{k} blocks", img.rows(), img.cols())));
    }
    let (br, bc) = (img.rows() / k, img.cols() / k);
    let mut out = GrayImage::filled(br, bc, 0);
    for i in 0..img.rows() {
        for j in 0..img.cols() {
            if img.get(i, j) {
                out.set(i / k, j / k, out.get(i / k, j / k) + 1);
            }
        }
    }
    Ok(out)
}

/// A superresolution instance. Blocks in `reliable` must match their gray
/// value exactly; all others may deviate by up to `epsilon`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrInstance {
    pub k: usize,
    pub rho: GrayImage,
    pub reliable: BTreeSet<(usize, usize)>,
    pub epsilon: u32,
    pub row_sums: Vec<u32>,
    pub col_sums: Vec<u32>,
}

impl DrInstance {
    pub fn new(
        k: usize,
        rho: GrayImage,
        reliable: BTreeSet<(usize, usize)>,
        epsilon: u32,
        row_sums: Vec<u32>,
        col_sums: Vec<u32>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("block size must be positive"));
        }
        if row_sums.len() != rho.rows() * k || col_sums.len() != rho.cols() * k {
            return Err(Error::invalid(format!(
                "{} row and {} column sums for a {}x{} block image at k = {k}",
                row_sums.len(),
                col_sums.len(),
                rho.rows(),
                rho.cols()
            )));
        }
        let full = (k * k) as u32;
        if let Some(v) = rho.values().iter().find(|&&v| v > full) {
            return Err(Error::invalid(format!("gray value {v} exceeds {full}")));
        }
        if let Some(b) = reliable.iter().find(|&&(i, j)| i >= rho.rows() || j >= rho.cols()) {
            return Err(Error::invalid(format!("reliable block {b:?} outside the image")));
        }
        Ok(DrInstance { k, rho, reliable, epsilon, row_sums, col_sums })
    }

    /// Exact instance (every block reliable, no noise).
    pub fn exact(k: usize, rho: GrayImage, row_sums: Vec<u32>, col_sums: Vec<u32>) -> Result<Self> {
        let reliable = (0..rho.rows()).flat_map(|i| (0..rho.cols()).map(move |j| (i, j))).collect();
        DrInstance::new(k, rho, reliable, 0, row_sums, col_sums)
    }

    /// The exact instance generated by an image.
    pub fn from_image(img: &BinaryImage, k: usize) -> Result<Self> {
        DrInstance::exact(k, downsample(img, k)?, img.row_sums(), img.col_sums())
    }

    /// Builds an instance from fine-scale data functions along (0,1) and (1,0).
    pub fn from_data(
        k: usize,
        rho: GrayImage,
        reliable: BTreeSet<(usize, usize)>,
        epsilon: u32,
        rows: &DataFunction,
        cols: &DataFunction,
    ) -> Result<Self> {
        let r = sums_from_row_data(rows, rho.rows() * k)?;
        let c = sums_from_col_data(cols, rho.cols() * k)?;
        DrInstance::new(k, rho, reliable, epsilon, r, c)
    }

    pub fn rows(&self) -> usize {
        self.row_sums.len()
    }

    pub fn cols(&self) -> usize {
        self.col_sums.len()
    }

    pub fn row_data(&self) -> DataFunction {
        row_data(&self.row_sums)
    }

    pub fn col_data(&self) -> DataFunction {
        col_data(&self.col_sums)
    }

    /// Admissible range of ones in block `(bi, bj)`.
    pub fn block_bounds(&self, bi: usize, bj: usize) -> (u32, u32) {
        let v = self.rho.get(bi, bj);
        if self.epsilon == 0 || self.reliable.contains(&(bi, bj)) {
            (v, v)
        } else {
            (v.saturating_sub(self.epsilon), (v + self.epsilon).min((self.k * self.k) as u32))
        }
    }

    fn block_of(&self, i: usize, j: usize) -> usize {
        (i / self.k) * self.rho.cols() + j / self.k
    }

    /// Does `img` satisfy every constraint?
    pub fn is_solution(&self, img: &BinaryImage) -> bool {
        if img.rows() != self.rows() || img.cols() != self.cols() {
            return false;
        }
        if img.row_sums() != self.row_sums || img.col_sums() != self.col_sums {
            return false;
        }
        let Ok(d) = downsample(img, self.k) else { return false };
        (0..d.rows()).all(|bi| {
            (0..d.cols()).all(|bj| {
                let (lo, hi) = self.block_bounds(bi, bj);
                (lo..=hi).contains(&d.get(bi, bj))
            })
        })
    }

    /// Blocks whose bounds force all zeros or all ones.
    fn forced_pixels(&self) -> usize {
        let full = (self.k * self.k) as u32;
        let mut forced = 0;
        for bi in 0..self.rho.rows() {
            for bj in 0..self.rho.cols() {
                let (lo, hi) = self.block_bounds(bi, bj);
                if hi == 0 || lo == full {
                    forced += self.k * self.k;
                }
            }
        }
        forced
    }

    fn free_pixels(&self) -> usize {
        self.rows() * self.cols() - self.forced_pixels()
    }

    /// Cheap necessary conditions on the totals.
    fn totals_admissible(&self) -> bool {
        let r: u64 = self.row_sums.iter().map(|&x| u64::from(x)).sum();
        let c: u64 = self.col_sums.iter().map(|&x| u64::from(x)).sum();
        let (mut lo, mut hi) = (0u64, 0u64);
        for bi in 0..self.rho.rows() {
            for bj in 0..self.rho.cols() {
                let (l, h) = self.block_bounds(bi, bj);
                lo += u64::from(l);
                hi += u64::from(h);
            }
        }
        r == c
            && (lo..=hi).contains(&r)
            && self.row_sums.iter().all(|&x| x as usize <= self.cols())
            && self.col_sums.iter().all(|&x| x as usize <= self.rows())
    }
}

struct Search<'a> {
    inst: &'a DrInstance,
    img: BinaryImage,
    row_ones: Vec<u32>,
    col_ones: Vec<u32>,
    blk_ones: Vec<u32>,
    row_free: Vec<u32>,
    col_free: Vec<u32>,
    blk_free: Vec<u32>,
    blk_lo: Vec<u32>,
    blk_hi: Vec<u32>,
    /// Per block, free cells in each of its rows and columns.
    seg_row_free: Vec<u32>,
    seg_col_free: Vec<u32>,
    found: Vec<BinaryImage>,
    limit: usize,
}

impl<'a> Search<'a> {
    fn new(inst: &'a DrInstance, limit: usize) -> Self {
        let (h, w, k) = (inst.rows(), inst.cols(), inst.k);
        let nb = inst.rho.rows() * inst.rho.cols();
        let (mut blk_lo, mut blk_hi) = (Vec::with_capacity(nb), Vec::with_capacity(nb));
        for bi in 0..inst.rho.rows() {
            for bj in 0..inst.rho.cols() {
                let (l, u) = inst.block_bounds(bi, bj);
                blk_lo.push(l);
                blk_hi.push(u);
            }
        }
        Search {
            inst,
            img: BinaryImage::new(h, w),
            row_ones: vec![0; h],
            col_ones: vec![0; w],
            blk_ones: vec![0; nb],
            row_free: vec![w as u32; h],
            col_free: vec![h as u32; w],
            blk_free: vec![(k * k) as u32; nb],
            blk_lo,
            blk_hi,
            seg_row_free: vec![k as u32; nb * k],
            seg_col_free: vec![k as u32; nb * k],
            found: Vec::new(),
            limit,
        }
    }

    fn can_be(&self, i: usize, j: usize, b: usize, one: bool) -> bool {
        let inst = self.inst;
        if one {
            self.row_ones[i] < inst.row_sums[i] && self.col_ones[j] < inst.col_sums[j] && self.blk_ones[b] < self.blk_hi[b]
        } else {
            self.row_free[i] > inst.row_sums[i] - self.row_ones[i]
                && self.col_free[j] > inst.col_sums[j] - self.col_ones[j]
                && self.blk_free[b] > self.blk_lo[b].saturating_sub(self.blk_ones[b])
        }
    }

    fn set(&mut self, i: usize, j: usize, b: usize, one: bool, undo: bool) {
        let k = self.inst.k;
        let (ri, cj) = (b * k + i % k, b * k + j % k);
        if undo {
            self.row_free[i] += 1;
            self.col_free[j] += 1;
            self.blk_free[b] += 1;
            self.seg_row_free[ri] += 1;
            self.seg_col_free[cj] += 1;
            if one {
                self.row_ones[i] -= 1;
                self.col_ones[j] -= 1;
                self.blk_ones[b] -= 1;
                self.img.set(i, j, false);
            }
        } else {
            self.row_free[i] -= 1;
            self.col_free[j] -= 1;
            self.blk_free[b] -= 1;
            self.seg_row_free[ri] -= 1;
            self.seg_col_free[cj] -= 1;
            if one {
                self.row_ones[i] += 1;
                self.col_ones[j] += 1;
                self.blk_ones[b] += 1;
                self.img.set(i, j, true);
            }
        }
    }

    /// Flow relaxation over the undecided cells: rows feed row segments of
    /// blocks, blocks pass at most their remaining capacity on to column
    /// segments, which feed columns. Checked once for the ones still needed
    /// and once for the zeros still needed.
    fn relaxation_feasible(&self, ones: bool) -> bool {
        let inst = self.inst;
        let (h, w, k) = (inst.rows(), inst.cols(), inst.k);
        let (gr, gc) = (inst.rho.rows(), inst.rho.cols());
        let nb = gr * gc;
        let need_row = |i: usize| {
            let n = inst.row_sums[i] - self.row_ones[i];
            if ones {
                n
            } else {
                self.row_free[i] - n
            }
        };
        let need_col = |j: usize| {
            let n = inst.col_sums[j] - self.col_ones[j];
            if ones {
                n
            } else {
                self.col_free[j] - n
            }
        };
        let blk_cap = |b: usize| {
            if ones {
                self.blk_hi[b] - self.blk_ones[b]
            } else {
                self.blk_free[b] - self.blk_lo[b].saturating_sub(self.blk_ones[b])
            }
        };
        let total: u32 = (0..h).map(need_row).sum();
        if total != (0..w).map(need_col).sum::<u32>() {
            return false;
        }
        if total == 0 {
            return true;
        }
        // rows, columns, block in/out, row segments, column segments, s, t
        let rows0 = 0;
        let cols0 = h;
        let bin0 = h + w;
        let bout0 = bin0 + nb;
        let rseg0 = bout0 + nb;
        let cseg0 = rseg0 + nb * k;
        let s = cseg0 + nb * k;
        let t = s + 1;
        let mut net = FlowNetwork::new(t + 1, s, t).expect("distinct terminals");
        let mut add = |a: usize, b: usize, c: u32| {
            if c > 0 {
                net.add_arc(a, b, i64::from(c), 0).expect("valid arc");
            }
        };
        for i in 0..h {
            add(s, rows0 + i, need_row(i));
        }
        for j in 0..w {
            add(cols0 + j, t, need_col(j));
        }
        for b in 0..nb {
            add(bin0 + b, bout0 + b, blk_cap(b));
            let (bi, bj) = (b / gc, b % gc);
            for r in 0..k {
                let seg = b * k + r;
                add(rows0 + bi * k + r, rseg0 + seg, self.seg_row_free[seg]);
                add(rseg0 + seg, bin0 + b, self.seg_row_free[seg]);
                add(bout0 + b, cseg0 + seg, self.seg_col_free[seg]);
                add(cseg0 + seg, cols0 + bj * k + r, self.seg_col_free[seg]);
            }
        }
        max_flow(&net).value == i64::from(total)
    }

    fn run(&mut self, pos: usize) -> bool {
        let (h, w) = (self.inst.rows(), self.inst.cols());
        if pos == h * w {
            self.found.push(self.img.clone());
            return self.found.len() >= self.limit;
        }
        let (i, j) = (pos / w, pos % w);
        let b = self.inst.block_of(i, j);
        for one in [false, true] {
            if !self.can_be(i, j, b, one) {
                continue;
            }
            self.set(i, j, b, one, false);
            if self.relaxation_feasible(true) && self.relaxation_feasible(false) && self.run(pos + 1) {
                self.set(i, j, b, one, true);
                return true;
            }
            self.set(i, j, b, one, true);
        }
        false
    }
}

fn check_search_guard(inst: &DrInstance) -> Result<()> {
    if inst.k >= 3 || inst.epsilon > 0 {
        guard::check("free pixels", inst.free_pixels(), guard::SR_FREE_PIXELS)?;
    }
    Ok(())
}

/// Up to `limit` solutions in increasing lexicographic (row-major) order.
pub fn dr_solutions(inst: &DrInstance, limit: usize) -> Result<Vec<BinaryImage>> {
    check_search_guard(inst)?;
    if limit == 0 || !inst.totals_admissible() {
        return Ok(Vec::new());
    }
    let mut s = Search::new(inst, limit);
    if s.relaxation_feasible(true) && s.relaxation_feasible(false) {
        s.run(0);
    }
    Ok(s.found)
}

/// The lexicographically smallest solution, or `None` if there is none.
///
/// Depth-first over pixels in row-major order, zero first, with row, column
/// and block bounds and a flow relaxation as pruning. Complete, so `None`
/// is definitive. For `k = 2` and `epsilon = 0` no size guard applies; other
/// cases are guarded by [`guard::SR_FREE_PIXELS`].
pub fn dr_solve(inst: &DrInstance) -> Result<Option<BinaryImage>> {
    Ok(dr_solutions(inst, 1)?.into_iter().next())
}

/// Every solution, by plain enumeration of the admissible fillings of each
/// block. At most [`guard::DR_FREE_PIXELS`] pixels may lie outside blocks
/// forced to all zeros or all ones.
pub fn dr_bruteforce(inst: &DrInstance) -> Result<Vec<BinaryImage>> {
    guard::check("free pixels", inst.free_pixels(), guard::DR_FREE_PIXELS)?;
    let k = inst.k;
    let cells = k * k;
    let (gr, gc) = (inst.rho.rows(), inst.rho.cols());
    let mut patterns: Vec<Vec<u64>> = Vec::with_capacity(gr * gc);
    for bi in 0..gr {
        for bj in 0..gc {
            let (lo, hi) = inst.block_bounds(bi, bj);
            let full = (cells as u32) == lo;
            let ps: Vec<u64> = if hi == 0 {
                vec![0]
            } else if full {
                vec![(1u64 << cells) - 1]
            } else {
                (0..1u64 << cells).filter(|m| (lo..=hi).contains(&m.count_ones())).collect()
            };
            patterns.push(ps);
        }
    }
    let mut out = Vec::new();
    let mut img = BinaryImage::new(inst.rows(), inst.cols());
    let mut rows = vec![0u32; inst.rows()];
    let mut cols = vec![0u32; inst.cols()];
    enumerate_blocks(inst, &patterns, 0, &mut img, &mut rows, &mut cols, &mut out);
    out.sort_by(|a, b| a.bits().cmp(b.bits()));
    Ok(out)
}

fn enumerate_blocks(
    inst: &DrInstance,
    patterns: &[Vec<u64>],
    b: usize,
    img: &mut BinaryImage,
    rows: &mut [u32],
    cols: &mut [u32],
    out: &mut Vec<BinaryImage>,
) {
    if b == patterns.len() {
        if rows == inst.row_sums.as_slice() && cols == inst.col_sums.as_slice() {
            out.push(img.clone());
        }
        return;
    }
    let k = inst.k;
    let gc = inst.rho.cols();
    let (i0, j0) = ((b / gc) * k, (b % gc) * k);
    for &m in &patterns[b] {
        for c in 0..k * k {
            if m >> c & 1 == 1 {
                let (i, j) = (i0 + c / k, j0 + c % k);
                img.set(i, j, true);
                rows[i] += 1;
                cols[j] += 1;
            }
        }
        let ok = rows.iter().zip(&inst.row_sums).all(|(a, t)| a <= t) && cols.iter().zip(&inst.col_sums).all(|(a, t)| a <= t);
        if ok {
            enumerate_blocks(inst, patterns, b + 1, img, rows, cols, out);
        }
        for c in 0..k * k {
            if m >> c & 1 == 1 {
                let (i, j) = (i0 + c / k, j0 + c % k);
                img.set(i, j, false);
                rows[i] -= 1;
                cols[j] -= 1;
            }
        }
    }
}
