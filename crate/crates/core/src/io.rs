//! JSON file formats for instances and lattice sets.
//!
//! Instance:
//! `{ "dim": 2, "directions": [[1,0],[0,1]], "data": [ { "direction": [1,0],
//!   "lines": [ { "anchor": [0,3], "value": 2 } ] } ] }`
//!
//! Set: `{ "dim": 2, "points": [ { "p": [x, y], "w": 1 } ] }`
//!
//! Anchors may be any point of the line on input; output always uses the
//! canonical anchor of each line, lines in key order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::lattice::{Direction, Point, WeightedLatticeSet};
use crate::superres::DrInstance;
use crate::xray::{DataFunction, Instance, LineKey};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dim: usize,
    pub directions: Vec<Vec<i64>>,
    pub data: Vec<DataFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataFile {
    pub direction: Vec<i64>,
    pub lines: Vec<LineFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineFile {
    pub anchor: Vec<i64>,
    pub value: i64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFile {
    pub dim: usize,
    pub points: Vec<PointFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFile {
    pub p: Vec<i64>,
    #[serde(default = "one")]
    pub w: i64,
}

fn one() -> i64 {
    1
}

/// An instance together with non-fatal diagnostics found while reading it.
#[derive(Debug)]
pub struct ParsedInstance {
    pub instance: Instance,
    pub warnings: Vec<String>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::schema(format!("line {} column {}", e.line(), e.column()), e.to_string())
}

fn direction_at(v: &[i64], dim: usize, path: &str) -> Result<Direction> {
    if v.len() != dim {
        return Err(Error::schema(path, format!("expected {dim} components, found {}", v.len())));
    }
    Direction::new(v.to_vec()).map_err(|e| Error::schema(path, e.to_string()))
}

pub fn parse_instance(text: &str) -> Result<ParsedInstance> {
    let file: InstanceFile = serde_json::from_str(text).map_err(json_error)?;
    instance_from_file(file)
}

pub fn instance_from_file(file: InstanceFile) -> Result<ParsedInstance> {
    let dim = file.dim;
    if dim < 2 {
        return Err(Error::schema("dim", "dimension must be at least 2"));
    }
    if file.directions.is_empty() {
        return Err(Error::schema("directions", "at least one direction is required"));
    }
    if file.directions.len() != file.data.len() {
        return Err(Error::schema(
            "data",
            format!("{} data functions for {} directions", file.data.len(), file.directions.len()),
        ));
    }
    let mut directions: Vec<Direction> = Vec::new();
    for (i, v) in file.directions.iter().enumerate() {
        let path = format!("directions[{i}]");
        let d = direction_at(v, dim, &path)?;
        if directions.contains(&d) {
            return Err(Error::schema(path, format!("duplicate direction {d:?}")));
        }
        directions.push(d);
    }
    let mut data = Vec::with_capacity(directions.len());
    for (i, (df, dir)) in file.data.iter().zip(&directions).enumerate() {
        let path = format!("data[{i}].direction");
        let d = direction_at(&df.direction, dim, &path)?;
        if &d != dir {
            return Err(Error::schema(path, format!("{d:?} does not match directions[{i}] = {dir:?}")));
        }
        let mut f = DataFunction::new(d);
        let mut seen = std::collections::BTreeSet::new();
        for (j, line) in df.lines.iter().enumerate() {
            let path = format!("data[{i}].lines[{j}].anchor");
            if line.anchor.len() != dim {
                return Err(Error::schema(path, format!("expected {dim} coordinates, found {}", line.anchor.len())));
            }
            let key = LineKey::of(&Point::from(line.anchor.clone()), dir);
            if !seen.insert(key.clone()) {
                return Err(Error::schema(path, "line listed twice"));
            }
            f.add_key(key, line.value).map_err(|e| Error::schema(format!("data[{i}].lines[{j}].value"), e.to_string()))?;
        }
        data.push(f);
    }
    let instance = Instance::new(dim, data)?;
    let mut warnings = Vec::new();
    if !instance.mass_consistent() {
        warnings.push(format!("mass mismatch: ||f_S||_1 per direction = {:?}; the instance is inconsistent", instance.totals()));
    }
    Ok(ParsedInstance { instance, warnings })
}

pub fn instance_to_file(inst: &Instance) -> InstanceFile {
    InstanceFile {
        dim: inst.dim(),
        directions: inst.directions().iter().map(|d| d.components().to_vec()).collect(),
        data: inst
            .data()
            .iter()
            .map(data_to_file)
            .collect(),
    }
}

/// Canonical pretty-printed JSON of an instance.
pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&instance_to_file(inst)).expect("serialisable") + "\n"
}

pub fn parse_set(text: &str) -> Result<WeightedLatticeSet> {
    let file: SetFile = serde_json::from_str(text).map_err(json_error)?;
    set_from_file(file)
}

pub fn set_from_file(file: SetFile) -> Result<WeightedLatticeSet> {
    let mut s = WeightedLatticeSet::new(file.dim);
    for (i, pf) in file.points.iter().enumerate() {
        if pf.p.len() != file.dim {
            return Err(Error::schema(format!("points[{i}].p"), format!("expected {} coordinates", file.dim)));
        }
        s.add(Point::from(pf.p.clone()), pf.w)?;
    }
    Ok(s)
}

pub fn set_to_file(set: &WeightedLatticeSet) -> SetFile {
    SetFile {
        dim: set.dim(),
        points: set.iter().map(|(p, w)| PointFile { p: p.coords().to_vec(), w }).collect(),
    }
}

pub fn set_to_json(set: &WeightedLatticeSet) -> String {
    serde_json::to_string_pretty(&set_to_file(set)).expect("serialisable") + "\n"
}

/// Double-resolution instance: `{ "k": 2, "rho": "P2 ...", "reliable":
/// [[0,0]], "epsilon": 0, "row_data": {...}, "col_data": {...} }`. `rho` is
/// an inline plain PGM of block values; the data functions use the instance
/// line format along `(0,1)` (rows) and `(1,0)` (columns), with image pixel
/// `(i, j)` at lattice point `(i, j)`. A missing `reliable` marks every block
/// reliable.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrFile {
    pub k: usize,
    pub rho: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reliable: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub epsilon: u32,
    pub row_data: DataFile,
    pub col_data: DataFile,
}

fn data_from_file(df: &DataFile, expected: &[i64], path: &str) -> Result<DataFunction> {
    let d = direction_at(&df.direction, 2, &format!("{path}.direction"))?;
    if d.components() != expected {
        return Err(Error::schema(format!("{path}.direction"), format!("expected {expected:?}")));
    }
    let mut f = DataFunction::new(d.clone());
    for (j, line) in df.lines.iter().enumerate() {
        if line.anchor.len() != 2 {
            return Err(Error::schema(format!("{path}.lines[{j}].anchor"), "expected 2 coordinates"));
        }
        f.add_key(LineKey::of(&Point::from(line.anchor.clone()), &d), line.value)
            .map_err(|e| Error::schema(format!("{path}.lines[{j}].value"), e.to_string()))?;
    }
    Ok(f)
}

fn data_to_file(f: &DataFunction) -> DataFile {
    DataFile {
        direction: f.direction().components().to_vec(),
        lines: f.lines().map(|(k, value)| LineFile { anchor: k.anchor(f.direction()).into_vec(), value }).collect(),
    }
}

pub fn parse_dr_instance(text: &str) -> Result<DrInstance> {
    let file: DrFile = serde_json::from_str(text).map_err(json_error)?;
    let (rho, _) = GrayImage::from_pgm(&file.rho).map_err(|e| Error::schema("rho", e.to_string()))?;
    let reliable = match &file.reliable {
        Some(list) => list.iter().map(|&[i, j]| (i, j)).collect(),
        None => (0..rho.rows()).flat_map(|i| (0..rho.cols()).map(move |j| (i, j))).collect(),
    };
    let rows = data_from_file(&file.row_data, &[0, 1], "row_data")?;
    let cols = data_from_file(&file.col_data, &[1, 0], "col_data")?;
    DrInstance::from_data(file.k, rho, reliable, file.epsilon, &rows, &cols)
}

pub fn dr_instance_to_json(inst: &DrInstance) -> String {
    let full = (inst.k * inst.k) as u32;
    let all_reliable = inst.reliable.len() == inst.rho.rows() * inst.rho.cols();
    let file = DrFile {
        k: inst.k,
        rho: inst.rho.to_pgm(full),
        reliable: (!all_reliable).then(|| inst.reliable.iter().map(|&(i, j)| [i, j]).collect()),
        epsilon: inst.epsilon,
        row_data: data_to_file(&inst.row_data()),
        col_data: data_to_file(&inst.col_data()),
    };
    serde_json::to_string_pretty(&file).expect("serialisable") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{ "dim": 2, "directions": [[1,0]],
        "data": [ { "direction": [1,0], "lines": [ { "anchor": [0,3], "value": 2 } ] } ] }"#;

    #[test]
    fn minimal_file_has_one_direction() {
        let parsed = parse_instance(MINIMAL).unwrap();
        assert_eq!(parsed.instance.num_directions(), 1);
        assert_eq!(parsed.instance.data()[0].value_at(&Point::from([17, 3])), 2);
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn zero_direction_is_a_schema_error() {
        let text = MINIMAL.replace("[[1,0]]", "[[0,0]]");
        let err = parse_instance(&text).unwrap_err();
        assert!(matches!(&err, Error::Schema { path, .. } if path == "directions[0]"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_instance("{ \"dim\": 2,\n \"directions\": [[1,0]] ,,").unwrap_err();
        assert!(matches!(&err, Error::Schema { path, .. } if path.starts_with("line 2")), "{err}");
    }

    #[test]
    fn mismatched_direction_rejected() {
        let text = MINIMAL.replace("\"direction\": [1,0]", "\"direction\": [0,1]");
        assert!(matches!(parse_instance(&text), Err(Error::Schema { .. })));
    }

    #[test]
    fn mass_mismatch_is_a_warning() {
        let text = r#"{ "dim": 2, "directions": [[1,0],[0,1]], "data": [
            { "direction": [1,0], "lines": [ { "anchor": [0,0], "value": 2 } ] },
            { "direction": [0,1], "lines": [ { "anchor": [0,0], "value": 1 } ] } ] }"#;
        let parsed = parse_instance(text).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn canonical_serialisation_is_a_fixed_point() {
        let parsed = parse_instance(MINIMAL).unwrap();
        let once = instance_to_json(&parsed.instance);
        let twice = instance_to_json(&parse_instance(&once).unwrap().instance);
        assert_eq!(once, twice);
    }

    #[test]
    fn set_round_trip() {
        let s = WeightedLatticeSet::from_weighted(2, [([0, 1], 1), ([2, -1], 3)]).unwrap();
        assert_eq!(parse_set(&set_to_json(&s)).unwrap(), s);
        let bare = parse_set(r#"{"dim":2,"points":[{"p":[1,1]}]}"#).unwrap();
        assert!(bare.is_binary());
    }

    #[test]
    fn dr_instance_round_trip() {
        use crate::image::BinaryImage;
        let img = BinaryImage::from_rows(&[vec![1, 0, 1, 1], vec![0, 1, 0, 0]]).unwrap();
        let inst = DrInstance::from_image(&img, 2).unwrap();
        let text = dr_instance_to_json(&inst);
        let back = parse_dr_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(dr_instance_to_json(&back), text);
        let mut noisy = inst.clone();
        noisy.epsilon = 1;
        noisy.reliable.remove(&(0, 1));
        assert_eq!(parse_dr_instance(&dr_instance_to_json(&noisy)).unwrap(), noisy);
    }
}
