//! Static SVG drawings of planar point sets and label maps.

use std::fmt::Write;

use tomo_core::grains::LabelMap;
use tomo_core::{Point, WeightedLatticeSet};

const UNIT: f64 = 24.0;

fn header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    )
}

/// The two classes of a switching pair: `plus` filled, `minus` hollow.
/// Lattice `(x, y)` is drawn with `y` pointing up; weights above one are
/// written next to their point.
pub fn switching_pair(plus: &WeightedLatticeSet, minus: &WeightedLatticeSet) -> String {
    let boxes: Vec<_> = [plus, minus].iter().filter_map(|s| s.bounding_box()).collect();
    let Some(bbox) = boxes.iter().cloned().reduce(|a, b| a.union(&b)) else {
        return header(UNIT, UNIT) + "</svg>\n";
    };
    let (x0, y1) = (bbox.lo[0], bbox.hi[1]);
    let width = (bbox.hi[0] - x0 + 2) as f64 * UNIT;
    let height = (y1 - bbox.lo[1] + 2) as f64 * UNIT;
    let at = |p: &Point| (((p[0] - x0 + 1) as f64) * UNIT, ((y1 - p[1] + 1) as f64) * UNIT);
    let mut s = header(width, height);
    for (set, fill) in [(plus, "black"), (minus, "white")] {
        for (p, w) in set.iter() {
            let (cx, cy) = at(p);
            let _ = writeln!(s, "  <circle cx=\"{cx}\" cy=\"{cy}\" r=\"{}\" fill=\"{fill}\" stroke=\"black\"/>", UNIT / 4.0);
            if w > 1 {
                let _ = writeln!(s, "  <text x=\"{}\" y=\"{}\" font-size=\"{}\">{w}</text>", cx + UNIT / 3.0, cy - UNIT / 3.0, UNIT / 2.0);
            }
        }
    }
    s + "</svg>\n"
}

fn color(label: usize) -> String {
    let hue = (label as f64 * 137.508) % 360.0;
    format!("hsl({hue:.1},60%,70%)")
}

/// Pixels coloured by grain with cell boundaries and sites. Pixel `(i, j)`
/// is row `i`, column `j`.
pub fn label_map(map: &LabelMap, sites: &[Vec<f64>]) -> String {
    let (lo, hi) = (&map.domain.lo, &map.domain.hi);
    let rows = hi[0] - lo[0] + 1;
    let cols = hi[1] - lo[1] + 1;
    let mut s = header(cols as f64 * UNIT, rows as f64 * UNIT);
    let label = |i: i64, j: i64| map.get(&Point::from([lo[0] + i, lo[1] + j]));
    for i in 0..rows {
        for j in 0..cols {
            let fill = label(i, j).map_or_else(|| "white".to_string(), color);
            let _ = writeln!(
                s,
                "  <rect x=\"{}\" y=\"{}\" width=\"{UNIT}\" height=\"{UNIT}\" fill=\"{fill}\"/>",
                j as f64 * UNIT,
                i as f64 * UNIT
            );
        }
    }
    let mut line = |x1: f64, y1: f64, x2: f64, y2: f64| {
        let _ = writeln!(s, "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"black\" stroke-width=\"2\"/>");
    };
    for i in 0..rows {
        for j in 0..cols {
            let (x, y) = (j as f64 * UNIT, i as f64 * UNIT);
            if j + 1 < cols && label(i, j) != label(i, j + 1) {
                line(x + UNIT, y, x + UNIT, y + UNIT);
            }
            if i + 1 < rows && label(i, j) != label(i + 1, j) {
                line(x, y + UNIT, x + UNIT, y + UNIT);
            }
        }
    }
    for site in sites.iter().filter(|c| c.len() == 2) {
        let cx = (site[1] - lo[1] as f64 + 0.5) * UNIT;
        let cy = (site[0] - lo[0] as f64 + 0.5) * UNIT;
        let _ = writeln!(s, "  <circle cx=\"{cx}\" cy=\"{cy}\" r=\"{}\" fill=\"red\"/>", UNIT / 6.0);
    }
    s + "</svg>\n"
}
