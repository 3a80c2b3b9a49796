//! Bartlett angle-of-arrival estimation over a virtual antenna array formed by
//! the mobile node's motion.

mod bartlett;
mod compare;
mod grid;
mod peaks;
mod steering;

pub use bartlett::{
    bartlett_from_samples, bartlett_profile, AoaProfile, ArraySample, EstimatorConfig,
    EstimatorWarning,
};
pub use compare::{compare_profiles, ProfileDivergence};
pub use grid::{AngleGrid, Axis};
pub use peaks::{extract_peaks, GridPeak, DOMINANT_PEAK_SEPARATION_DEG, DOMINANT_PEAK_THRESHOLD};
pub use steering::{steering_phase, LookDirection, SteeringGrid, SteeringPower};
