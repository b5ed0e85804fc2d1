//! Size guards for the exponential-time search routines.
//!
//! Every brute-force entry point refuses inputs above a fixed size. The
//! environment variable `TOMO_GUARD_OVERRIDE` may raise (never lower) all
//! guards to the given value.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const ENV_OVERRIDE: &str = "TOMO_GUARD_OVERRIDE";

/// Candidate points for exact counting and reconstruction.
pub const SEARCH_POINTS: usize = 30;
/// Candidate points for nearest-solution minimisation.
pub const NEAREST_POINTS: usize = 24;
/// Free pixels for the exhaustive double-resolution oracle.
pub const DR_FREE_PIXELS: usize = 25;
/// Free pixels for the exponential superresolution path (k >= 3 or eps > 0).
pub const SR_FREE_PIXELS: usize = 144;
/// Particles and frames for straight-line coupling search.
pub const COUPLING_PARTICLES: usize = 8;
pub const COUPLING_FRAMES: usize = 5;
/// Largest Prouhet degree.
pub const PROUHET_DEGREE: usize = 20;

fn override_value() -> Option<usize> {
    static VALUE: OnceLock<Option<usize>> = OnceLock::new();
    *VALUE.get_or_init(|| std::env::var(ENV_OVERRIDE).ok().and_then(|s| s.trim().parse().ok()))
}

/// Effective limit for a guard with the given default.
pub fn limit(default: usize) -> usize {
    match override_value() {
        Some(v) if v > default => v,
        _ => default,
    }
}

pub(crate) fn check(what: &'static str, size: usize, default: usize) -> Result<()> {
    let limit = limit(default);
    if size > limit {
        Err(Error::GuardExceeded { what, size, limit })
    } else {
        Ok(())
    }
}
