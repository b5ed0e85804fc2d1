//! Generalized balanced power diagrams (GBPDs) for polycrystalline grain
//! maps: direct cell evaluation and volume-constrained fitting.
//!
//! Grain `j` has a site `s_j`, a positive definite matrix `A_j` and an
//! additive weight `sigma_j`; a point `x` belongs to the cell of the `j`
//! minimising `||x - s_j||^2_{A_j} - sigma_j`. Grains are indexed from 0;
//! PGM output writes grain `j` as gray value `j + 1` and leaves 0 for
//! unassigned pixels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::write_pgm;
use crate::lattice::{BoundingBox, Point};
use crate::optim::{capacitated_assignment, quantize, COST_SCALE};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbpdSpec {
    pub sites: Vec<Vec<f64>>,
    pub matrices: Vec<Vec<Vec<f64>>>,
    pub weights: Vec<f64>,
}

fn determinant(m: &[Vec<f64>], k: usize) -> f64 {
    let mut a: Vec<Vec<f64>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
    let mut det = 1.0;
    for c in 0..k {
        let p = (c..k).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).expect("nonempty");
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..k {
            let f = a[r][c] / a[c][c];
            for j in c..k {
                a[r][j] -= f * a[c][j];
            }
        }
    }
    det
}

/// Symmetric with all leading principal minors positive.
fn check_matrix(m: &[Vec<f64>], d: usize, index: usize) -> Result<()> {
    if m.len() != d || m.iter().any(|r| r.len() != d) {
        return Err(Error::invalid(format!("matrix {index} is not {d}x{d}")));
    }
    for i in 0..d {
        for j in 0..i {
            let (a, b) = (m[i][j], m[j][i]);
            if !a.is_finite() || (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::invalid(format!("matrix {index} is not symmetric")));
            }
        }
    }
    if (1..=d).any(|k| determinant(m, k).partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::NotPositiveDefinite(index));
    }
    Ok(())
}

fn identity(d: usize) -> Vec<Vec<f64>> {
    (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn check_sites(sites: &[Vec<f64>], matrices: &[Vec<Vec<f64>>]) -> Result<usize> {
    let Some(first) = sites.first() else {
        return Err(Error::invalid("at least one site is required"));
    };
    let d = first.len();
    if d == 0 {
        return Err(Error::invalid("sites need at least one coordinate"));
    }
    if matrices.len() != sites.len() {
        return Err(Error::invalid(format!("{} sites but {} matrices", sites.len(), matrices.len())));
    }
    for (j, s) in sites.iter().enumerate() {
        if s.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: s.len() });
        }
        if s.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("site {j} is not finite")));
        }
        if sites[..j].contains(s) {
            return Err(Error::invalid(format!("site {j} repeats an earlier site")));
        }
        check_matrix(&matrices[j], d, j)?;
    }
    Ok(d)
}

fn ellipsoidal(x: &[f64], s: &[f64], a: &[Vec<f64>]) -> f64 {
    let v: Vec<f64> = x.iter().zip(s).map(|(p, q)| p - q).collect();
    a.iter().zip(&v).map(|(row, vi)| vi * row.iter().zip(&v).map(|(aij, vj)| aij * vj).sum::<f64>()).sum()
}

fn coords(p: &Point) -> Vec<f64> {
    p.iter().map(|&c| c as f64).collect()
}

impl GbpdSpec {
    pub fn new(sites: Vec<Vec<f64>>, matrices: Vec<Vec<Vec<f64>>>, weights: Vec<f64>) -> Result<Self> {
        let spec = GbpdSpec { sites, matrices, weights };
        spec.validate()?;
        Ok(spec)
    }

    /// Identity matrices: an ordinary power diagram.
    pub fn with_identity(sites: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let d = sites.first().map_or(0, Vec::len);
        let matrices = vec![identity(d); sites.len()];
        GbpdSpec::new(sites, matrices, weights)
    }

    pub fn validate(&self) -> Result<()> {
        check_sites(&self.sites, &self.matrices)?;
        if self.weights.len() != self.sites.len() {
            return Err(Error::invalid(format!("{} sites but {} weights", self.sites.len(), self.weights.len())));
        }
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("weights must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.sites.first().map_or(0, Vec::len)
    }

    /// `||x - s_j||^2_{A_j}`.
    pub fn distance(&self, x: &[f64], j: usize) -> f64 {
        ellipsoidal(x, &self.sites[j], &self.matrices[j])
    }

    /// The cell containing `x`; ties go to the lowest index.
    pub fn label(&self, x: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for j in 0..self.len() {
            let v = self.distance(x, j) - self.weights[j];
            if v < best.1 {
                best = (j, v);
            }
        }
        best.0
    }
}

/// Grain labels over a box of pixels, stored in the box's lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    pub domain: BoundingBox,
    pub labels: Vec<Option<usize>>,
}

impl LabelMap {
    pub fn unassigned(domain: BoundingBox) -> Self {
        let n = domain.len();
        LabelMap { domain, labels: vec![None; n] }
    }

    fn index(&self, p: &Point) -> Option<usize> {
        if !self.domain.contains(p) {
            return None;
        }
        let mut idx = 0usize;
        for j in 0..p.dim() {
            let extent = (self.domain.hi[j] - self.domain.lo[j] + 1) as usize;
            idx = idx * extent + (p[j] - self.domain.lo[j]) as usize;
        }
        Some(idx)
    }

    pub fn get(&self, p: &Point) -> Option<usize> {
        self.index(p).and_then(|i| self.labels[i])
    }

    pub fn set(&mut self, p: &Point, label: Option<usize>) -> Result<()> {
        let i = self.index(p).ok_or_else(|| Error::invalid(format!("pixel {p:?} outside the label map")))?;
        self.labels[i] = label;
        Ok(())
    }

    /// Pixel counts per grain.
    pub fn volumes(&self, grains: usize) -> Vec<usize> {
        let mut v = vec![0; grains];
        for l in self.labels.iter().flatten() {
            if *l < grains {
                v[*l] += 1;
            }
        }
        v
    }

    /// Fraction of pixels with equal labels in both maps.
    pub fn agreement(&self, other: &LabelMap) -> Result<f64> {
        if self.domain != other.domain {
            return Err(Error::invalid("label maps over different domains"));
        }
        let same = self.labels.iter().zip(&other.labels).filter(|(a, b)| a == b).count();
        Ok(same as f64 / self.labels.len() as f64)
    }

    /// Plain PGM of a planar map: rows follow the first coordinate.
    pub fn to_pgm(&self) -> Result<String> {
        if self.domain.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: self.domain.dim() });
        }
        let rows = (self.domain.hi[0] - self.domain.lo[0] + 1) as usize;
        let cols = (self.domain.hi[1] - self.domain.lo[1] + 1) as usize;
        let values: Vec<u32> = self.labels.iter().map(|l| l.map_or(0, |j| j as u32 + 1)).collect();
        let maxval = values.iter().copied().max().unwrap_or(0);
        Ok(write_pgm(cols, rows, maxval, &values))
    }
}

/// Labels every pixel of `domain` by its cell.
pub fn gbpd_assign(spec: &GbpdSpec, domain: &BoundingBox) -> Result<LabelMap> {
    spec.validate()?;
    if domain.dim() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), found: domain.dim() });
    }
    let labels = domain.points().iter().map(|p| Some(spec.label(&coords(p)))).collect();
    Ok(LabelMap { domain: domain.clone(), labels })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GbpdFit {
    /// Grain of each input pixel.
    pub labels: Vec<usize>,
    /// `sum gamma[i][labels[i]]` in unscaled units.
    pub cost: f64,
    /// Optimal objective over the quantized costs.
    pub scaled_cost: i64,
    /// Additive weights under which the fitted labels are an argmin labeling
    /// of the quantized costs, in unscaled units.
    pub sigma: Vec<f64>,
    pub scale: f64,
}

impl GbpdFit {
    /// The fitted diagram: input sites and matrices with weights `sigma`.
    pub fn spec(&self, sites: &[Vec<f64>], matrices: &[Vec<Vec<f64>>]) -> Result<GbpdSpec> {
        GbpdSpec::new(sites.to_vec(), matrices.to_vec(), self.sigma.clone())
    }

    pub fn label_map(&self, domain: &BoundingBox, pixels: &[Point]) -> Result<LabelMap> {
        let mut map = LabelMap::unassigned(domain.clone());
        for (p, &j) in pixels.iter().zip(&self.labels) {
            map.set(p, Some(j))?;
        }
        Ok(map)
    }
}

/// Assigns every pixel to one grain so that grain `j` receives between
/// `lower[j]` and `upper[j]` pixels and the summed ellipsoidal distance
/// `gamma[i][j] = ||x_i - s_j||^2_{A_j}` is minimal. Costs are quantized at
/// [`COST_SCALE`]. `Ok(None)` if the bounds admit no assignment.
pub fn gbpd_fit(
    pixels: &[Point],
    sites: &[Vec<f64>],
    matrices: &[Vec<Vec<f64>>],
    lower: &[usize],
    upper: &[usize],
) -> Result<Option<GbpdFit>> {
    gbpd_fit_scaled(pixels, sites, matrices, lower, upper, COST_SCALE)
}

pub fn gbpd_fit_scaled(
    pixels: &[Point],
    sites: &[Vec<f64>],
    matrices: &[Vec<Vec<f64>>],
    lower: &[usize],
    upper: &[usize],
    scale: f64,
) -> Result<Option<GbpdFit>> {
    let d = check_sites(sites, matrices)?;
    let l = sites.len();
    if lower.len() != l || upper.len() != l {
        return Err(Error::invalid(format!("{l} grains but {} lower and {} upper bounds", lower.len(), upper.len())));
    }
    let gamma = gamma_matrix(pixels, sites, matrices, d)?;
    let scaled: Vec<Vec<i64>> =
        gamma.iter().map(|row| row.iter().map(|&g| quantize(g, scale)).collect()).collect::<Result<_>>()?;
    let Some(a) = capacitated_assignment(&scaled, lower, upper)? else {
        return Ok(None);
    };
    let cost = a.assignment.iter().enumerate().map(|(i, &j)| gamma[i][j]).sum();
    let sigma = a.bin_potentials.iter().map(|&s| s as f64 / scale).collect();
    Ok(Some(GbpdFit { labels: a.assignment, cost, scaled_cost: a.cost, sigma, scale }))
}

/// `gamma[i][j] = ||x_i - s_j||^2_{A_j}`.
pub fn gamma_matrix(pixels: &[Point], sites: &[Vec<f64>], matrices: &[Vec<Vec<f64>>], dim: usize) -> Result<Vec<Vec<f64>>> {
    pixels
        .iter()
        .map(|p| {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
            }
            let x = coords(p);
            Ok(sites.iter().zip(matrices).map(|(s, a)| ellipsoidal(&x, s, a)).collect())
        })
        .collect()
}

/// Bounds `floor((1 - tol) v)` and `ceil((1 + tol) v)` around volumes `v`.
pub fn volume_bounds(volumes: &[usize], tol: f64) -> (Vec<usize>, Vec<usize>) {
    let lo = volumes.iter().map(|&v| ((1.0 - tol) * v as f64).floor().max(0.0) as usize).collect();
    let hi = volumes.iter().map(|&v| ((1.0 + tol) * v as f64).ceil() as usize).collect();
    (lo, hi)
}
