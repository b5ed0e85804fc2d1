//! Binary and gray-level raster images and plain (P2) PGM encoding.
//!
//! Pixel `(i, j)` (row `i`, column `j`) corresponds to the lattice point
//! `(i, j)`. Row sums are therefore the X-ray along `(0, 1)` and column sums
//! the X-ray along `(1, 0)`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lattice::{Direction, Point, WeightedLatticeSet};
use crate::xray::DataFunction;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(rows: usize, cols: usize) -> Self {
        BinaryImage { rows, cols, bits: vec![false; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged image rows"));
        }
        let bits = rows.iter().flatten().map(|&b| b != 0).collect();
        Ok(BinaryImage { rows: rows.len(), cols, bits })
    }

    /// Image whose row-major bits are the low `rows*cols` bits of `mask`
    /// (bit 0 is pixel (0,0)).
    pub fn from_mask(rows: usize, cols: usize, mask: u64) -> Self {
        let bits = (0..rows * cols).map(|b| mask >> b & 1 == 1).collect();
        BinaryImage { rows, cols, bits }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.cols + j] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn row_sums(&self) -> Vec<u32> {
        (0..self.rows).map(|i| (0..self.cols).filter(|&j| self.get(i, j)).count() as u32).collect()
    }

    pub fn col_sums(&self) -> Vec<u32> {
        (0..self.cols).map(|j| (0..self.rows).filter(|&i| self.get(i, j)).count() as u32).collect()
    }

    pub fn to_lattice_set(&self) -> WeightedLatticeSet {
        let mut s = WeightedLatticeSet::new(2);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    s.set(Point::from([i as i64, j as i64]), 1).expect("planar point");
                }
            }
        }
        s
    }

    /// Rasterises a binary lattice set into a `rows x cols` image.
    pub fn from_lattice_set(set: &WeightedLatticeSet, rows: usize, cols: usize) -> Result<Self> {
        if set.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: set.dim() });
        }
        let mut img = BinaryImage::new(rows, cols);
        for (p, w) in set.iter() {
            let (i, j) = (p[0], p[1]);
            if w != 1 || i < 0 || j < 0 || i as usize >= rows || j as usize >= cols {
                return Err(Error::invalid(format!("point {p:?} (weight {w}) outside the binary image")));
            }
            img.set(i as usize, j as usize, true);
        }
        Ok(img)
    }

    pub fn to_pgm(&self) -> String {
        let values: Vec<u32> = self.bits.iter().map(|&b| u32::from(b)).collect();
        write_pgm(self.cols, self.rows, 1, &values)
    }
}

impl std::fmt::Debug for BinaryImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryImage {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: String = (0..self.cols).map(|j| if self.get(i, j) { '#' } else { '.' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Row sums as the data function along `(0, 1)`.
pub fn row_data(sums: &[u32]) -> DataFunction {
    let mut f = DataFunction::new(Direction::new(vec![0, 1]).unwrap());
    for (i, &s) in sums.iter().enumerate() {
        f.add_at(&Point::from([i as i64, 0]), i64::from(s)).unwrap();
    }
    f
}

/// Column sums as the data function along `(1, 0)`.
pub fn col_data(sums: &[u32]) -> DataFunction {
    let mut f = DataFunction::new(Direction::new(vec![1, 0]).unwrap());
    for (j, &s) in sums.iter().enumerate() {
        f.add_at(&Point::from([0, j as i64]), i64::from(s)).unwrap();
    }
    f
}

/// Reads `n` row sums back out of a data function along `(0, 1)`.
pub fn sums_from_row_data(f: &DataFunction, n: usize) -> Result<Vec<u32>> {
    sums_from_axis_data(f, n, &[0, 1], |i| Point::from([i as i64, 0]))
}

/// Reads `n` column sums back out of a data function along `(1, 0)`.
pub fn sums_from_col_data(f: &DataFunction, n: usize) -> Result<Vec<u32>> {
    sums_from_axis_data(f, n, &[1, 0], |j| Point::from([0, j as i64]))
}

fn sums_from_axis_data(f: &DataFunction, n: usize, axis: &[i64], at: impl Fn(usize) -> Point) -> Result<Vec<u32>> {
    if f.direction().components() != axis {
        return Err(Error::invalid(format!("expected data along {axis:?}, got {:?}", f.direction())));
    }
    let sums: Vec<u32> = (0..n)
        .map(|i| u32::try_from(f.value_at(&at(i))).map_err(|_| Error::invalid("negative line value")))
        .collect::<Result<_>>()?;
    if i64::from(sums.iter().sum::<u32>()) != f.total() {
        return Err(Error::invalid("data function has lines outside the image"));
    }
    Ok(sums)
}

/// Gray-level image, e.g. the low-resolution block image of a binary picture.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrayImage {
    rows: usize,
    cols: usize,
    values: Vec<u32>,
}

impl GrayImage {
    pub fn new(rows: usize, cols: usize, values: Vec<u32>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::invalid(format!("{} values for a {rows}x{cols} image", values.len())));
        }
        Ok(GrayImage { rows, cols, values })
    }

    pub fn filled(rows: usize, cols: usize, v: u32) -> Self {
        GrayImage { rows, cols, values: vec![v; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.values[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.values[i * self.cols + j] = v;
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn to_pgm(&self, maxval: u32) -> String {
        write_pgm(self.cols, self.rows, maxval, &self.values)
    }

    pub fn from_pgm(text: &str) -> Result<(Self, u32)> {
        let pgm = parse_pgm(text)?;
        Ok((GrayImage { rows: pgm.height, cols: pgm.width, values: pgm.values }, pgm.maxval))
    }
}

/// Decoded plain PGM raster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    pub values: Vec<u32>,
}

/// Encodes row-major `values` as a plain PGM (P2). Rows are wrapped at 70
/// characters as the format recommends.
pub fn write_pgm(width: usize, height: usize, maxval: u32, values: &[u32]) -> String {
    let mut out = format!("P2\n{width} {height}\n{}\n", maxval.max(1));
    for row in values.chunks(width.max(1)) {
        let mut line = String::new();
        for v in row {
            let token = v.to_string();
            if !line.is_empty() && line.len() + token.len() + 1 > 70 {
                out.push_str(&line);
                out.push('\n');
                line.clear();
            }
            if !line.is_empty() {
                line.push(' ');
            }
            let _ = write!(line, "{token}");
        }
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parses a plain PGM (P2), accepting `#` comments.
pub fn parse_pgm(text: &str) -> Result<Pgm> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    if tokens.next() != Some("P2") {
        return Err(Error::schema("pgm", "missing P2 magic number"));
    }
    let mut header = |name: &str| -> Result<u32> {
        tokens
            .next()
            .ok_or_else(|| Error::schema("pgm", format!("missing {name}")))?
            .parse()
            .map_err(|_| Error::schema("pgm", format!("bad {name}")))
    };
    let width = header("width")? as usize;
    let height = header("height")? as usize;
    let maxval = header("maxval")?;
    let values: Vec<u32> = tokens
        .map(|t| t.parse::<u32>().map_err(|_| Error::schema("pgm", format!("bad pixel value {t:?}"))))
        .collect::<Result<_>>()?;
    if values.len() != width * height {
        return Err(Error::schema("pgm", format!("expected {} pixels, found {}", width * height, values.len())));
    }
    if let Some(v) = values.iter().find(|&&v| v > maxval) {
        return Err(Error::schema("pgm", format!("pixel value {v} exceeds maxval {maxval}")));
    }
    Ok(Pgm { width, height, maxval, values })
}
