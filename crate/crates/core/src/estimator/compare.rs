use serde::{Deserialize, Serialize};

use super::bartlett::AoaProfile;
use super::peaks::GridPeak;
use crate::error::{Error, Result};

/// Divergence between two profiles on the same grid. Each profile is scaled
/// to a unit maximum first, so runs with different signal levels compare on
/// shape alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileDivergence {
    pub max_abs_diff: f64,
    pub mean_abs_diff: f64,
    /// Chebyshev distance between the two peaks in grid steps, azimuth
    /// measured around the circle.
    pub peak_displacement_steps: usize,
    pub peak_a: GridPeak,
    pub peak_b: GridPeak,
}

pub fn compare_profiles(a: &AoaProfile, b: &AoaProfile) -> Result<ProfileDivergence> {
    if a.grid != b.grid {
        return Err(Error::invalid(
            "compare",
            "profiles were computed on different grids",
        ));
    }
    let scale = |p: &AoaProfile| if p.peak.magnitude > 0.0 { 1.0 / p.peak.magnitude } else { 0.0 };
    let (sa, sb) = (scale(a), scale(b));
    let (max, sum) = a
        .magnitudes
        .iter()
        .zip(&b.magnitudes)
        .map(|(x, y)| (x * sa - y * sb).abs())
        .fold((0.0f64, 0.0), |(m, s), d| (m.max(d), s + d));
    let steps = a
        .grid
        .azimuth_steps_between(a.peak.az_index, b.peak.az_index)
        .max(a.peak.polar_index.abs_diff(b.peak.polar_index));
    Ok(ProfileDivergence {
        max_abs_diff: max,
        mean_abs_diff: sum / a.magnitudes.len() as f64,
        peak_displacement_steps: steps,
        peak_a: a.peak,
        peak_b: b.peak,
    })
}
