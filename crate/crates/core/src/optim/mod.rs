//! Combinatorial optimisation back ends: network flow, bipartite matching and
//! bounded assignment.

mod assignment;
mod flow;
mod matching;

pub use assignment::*;
pub use flow::*;
pub use matching::*;

use crate::error::{Error, Result};

/// Default multiplier turning real costs into integers for the exact solvers.
pub const COST_SCALE: f64 = 1_048_576.0;

/// `floor(c * scale + 1/2)`: rounds half up. Rejects non-finite costs and
/// results beyond `2^52` in magnitude.
pub fn quantize(c: f64, scale: f64) -> Result<i64> {
    if !c.is_finite() || !scale.is_finite() || scale <= 0.0 {
        return Err(Error::invalid(format!("cannot quantize cost {c} at scale {scale}")));
    }
    let v = (c * scale + 0.5).floor();
    if v.abs() > (1u64 << 52) as f64 {
        return Err(Error::Overflow("scaled cost"));
    }
    Ok(v as i64)
}
