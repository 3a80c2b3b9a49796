use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::AngleGrid;
use super::peaks::{extract_peaks, GridPeak};
use super::steering::{LookDirection, SteeringPower};
use crate::error::{Error, Result};
use crate::exchange::{attach_rx_poses, CsiPair, SubcarrierWindow};
use crate::trajectory::{sub, Pose};

/// One element of the virtual array: channel value and antenna position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArraySample {
    pub t_ns: u64,
    pub h: Complex64,
    pub position: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub steering: SteeringPower,
    /// Subcarrier window used to reduce each pair to its center value.
    /// `None` picks [`SubcarrierWindow::for_carrier`]-style defaults from the
    /// pair length.
    pub window: Option<SubcarrierWindow>,
    /// Collapse the polar axis to 90 deg when every sample lies in one
    /// horizontal plane.
    pub planar_fast_path: bool,
    /// How many local maxima to keep on the profile.
    pub peak_count: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            steering: SteeringPower::Squared,
            window: None,
            planar_fast_path: false,
            peak_count: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorWarning {
    /// Fewer than two array elements: the profile has no directivity.
    TooFewSamples { n_samples: usize },
    /// Trajectory shorter than two wavelengths.
    ShortAperture { path_length_m: f64, required_m: f64 },
    /// Consecutive elements further apart than half a wavelength.
    Undersampled { max_step_m: f64, limit_m: f64 },
}

impl fmt::Display for EstimatorWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorWarning::TooFewSamples { n_samples } => {
                write!(f, "only {n_samples} array sample(s); profile has no directivity")
            }
            EstimatorWarning::ShortAperture {
                path_length_m,
                required_m,
            } => write!(
                f,
                "trajectory length {path_length_m:.4} m is below two wavelengths ({required_m:.4} m)"
            ),
            EstimatorWarning::Undersampled {
                max_step_m,
                limit_m,
            } => write!(
                f,
                "sample spacing up to {max_step_m:.4} m exceeds lambda/2 = {limit_m:.4} m"
            ),
        }
    }
}

/// Bartlett spatial spectrum over an [`AngleGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct AoaProfile {
    pub grid: AngleGrid,
    /// Azimuth-major magnitudes, `grid.len()` entries.
    pub magnitudes: Vec<f64>,
    pub peak: GridPeak,
    /// Peak magnitude over total profile mass.
    pub confidence: f64,
    /// Peak magnitude over the second-highest local maximum, if there is one.
    pub peak_ratio: Option<f64>,
    /// Local maxima, strongest first; `peaks[0] == peak`.
    pub peaks: Vec<GridPeak>,
    pub n_samples: usize,
    /// Path length of the virtual array.
    pub total_displacement_m: f64,
    pub max_step_m: f64,
    pub warnings: Vec<EstimatorWarning>,
}

impl AoaProfile {
    /// Builds the derived fields (peak, confidence, peak list) from a raw
    /// magnitude matrix.
    pub fn from_magnitudes(
        grid: AngleGrid,
        magnitudes: Vec<f64>,
        n_samples: usize,
        total_displacement_m: f64,
        max_step_m: f64,
        peak_count: usize,
    ) -> Result<Self> {
        grid.validate()?;
        if magnitudes.len() != grid.len() {
            return Err(Error::invalid(
                "profile",
                format!("{} magnitudes for a {}-cell grid", magnitudes.len(), grid.len()),
            ));
        }
        if magnitudes.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::Invariant(
                "profile magnitudes must be finite and non-negative".into(),
            ));
        }
        let peaks = extract_peaks(&grid, &magnitudes, peak_count.max(2));
        let peak = peaks[0];
        let total: f64 = magnitudes.iter().sum();
        let confidence = if total > 0.0 {
            peak.magnitude / total
        } else {
            1.0 / magnitudes.len() as f64
        };
        let peak_ratio = peaks
            .get(1)
            .filter(|p| p.magnitude > 0.0)
            .map(|p| peak.magnitude / p.magnitude);
        let mut peaks = peaks;
        peaks.truncate(peak_count.max(1));
        Ok(Self {
            grid,
            magnitudes,
            peak,
            confidence,
            peak_ratio,
            peaks,
            n_samples,
            total_displacement_m,
            max_step_m,
            warnings: Vec::new(),
        })
    }

    pub fn at(&self, az: usize, pol: usize) -> f64 {
        self.magnitudes[self.grid.index(az, pol)]
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Default)]
struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    fn add(&mut self, v: Complex64) {
        self.sum.re = neumaier(self.sum.re, v.re, &mut self.carry.re);
        self.sum.im = neumaier(self.sum.im, v.im, &mut self.carry.im);
    }

    fn total(&self) -> Complex64 {
        self.sum + self.carry
    }
}

fn neumaier(sum: f64, v: f64, carry: &mut f64) -> f64 {
    let t = sum + v;
    if sum.abs() >= v.abs() {
        *carry += (sum - t) + v;
    } else {
        *carry += (v - t) + sum;
    }
    t
}

/// `F(az, pol) = |sum_t h_t a_t(az, pol)^m|^2` with displacements taken from
/// the first sample and `m` set by `steering`.
///
/// Cells are evaluated in parallel; each cell accumulates over time in order
/// with compensated summation, so the result does not depend on how the grid
/// is partitioned.
pub fn bartlett_from_samples(
    samples: &[ArraySample],
    grid: &AngleGrid,
    wavelength: f64,
    steering: SteeringPower,
    peak_count: usize,
) -> Result<AoaProfile> {
    let first = samples
        .first()
        .ok_or_else(|| Error::invalid("samples", "no array samples"))?;
    grid.validate()?;
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::invalid("wavelength", "must be positive"));
    }
    if samples
        .iter()
        .any(|s| !s.h.re.is_finite() || !s.h.im.is_finite() || s.position.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::invalid("samples", "non-finite channel value or position"));
    }

    let origin = first.position;
    let disp: Vec<[f64; 3]> = samples.iter().map(|s| sub(s.position, origin)).collect();
    let h: Vec<Complex64> = samples.iter().map(|s| s.h).collect();
    let k = -TAU * steering.exponent() / wavelength;

    let n_pol = grid.polar.count;
    let mut magnitudes = vec![0.0; grid.len()];
    magnitudes
        .par_chunks_mut(n_pol)
        .enumerate()
        .for_each(|(az, row)| {
            let az_deg = grid.azimuth.value_deg(az);
            for (pol, out) in row.iter_mut().enumerate() {
                let u = LookDirection::from_degrees(az_deg, grid.polar.value_deg(pol)).unit_vector();
                let mut acc = CompensatedSum::default();
                for (d, &hv) in disp.iter().zip(&h) {
                    let proj = u[0] * d[0] + u[1] * d[1] + u[2] * d[2];
                    let (s, c) = (k * proj).sin_cos();
                    acc.add(hv * Complex64::new(c, s));
                }
                *out = acc.total().norm_sqr();
            }
        });

    let steps: Vec<f64> = samples
        .windows(2)
        .map(|w| {
            let d = sub(w[1].position, w[0].position);
            (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
        })
        .collect();
    let path_length: f64 = steps.iter().sum();
    let max_step = steps.iter().copied().fold(0.0, f64::max);

    let mut profile = AoaProfile::from_magnitudes(
        *grid,
        magnitudes,
        samples.len(),
        path_length,
        max_step,
        peak_count,
    )?;

    if samples.len() < 2 {
        profile.warnings.push(EstimatorWarning::TooFewSamples {
            n_samples: samples.len(),
        });
    }
    if path_length < 2.0 * wavelength {
        profile.warnings.push(EstimatorWarning::ShortAperture {
            path_length_m: path_length,
            required_m: 2.0 * wavelength,
        });
    }
    if max_step > wavelength / 2.0 {
        profile.warnings.push(EstimatorWarning::Undersampled {
            max_step_m: max_step,
            limit_m: wavelength / 2.0,
        });
    }
    for w in &profile.warnings {
        log::warn!("{w}");
    }
    Ok(profile)
}

/// Reduces each pair to its center-subcarrier value, places it at the
/// nearest-in-time odometry pose and runs [`bartlett_from_samples`].
pub fn bartlett_profile(
    pairs: &[CsiPair],
    odometry: &[Pose],
    grid: &AngleGrid,
    wavelength: f64,
    config: &EstimatorConfig,
) -> Result<AoaProfile> {
    if pairs.is_empty() {
        return Err(Error::invalid("pairs", "no CSI pairs to estimate from"));
    }
    let mut pairs = pairs.to_vec();
    attach_rx_poses(&mut pairs, odometry)?;
    let samples = pairs
        .iter()
        .map(|p| {
            let window = config.window.unwrap_or_else(|| default_window(p.h_squared.len()));
            let pose = p.rx_pose.expect("attached above");
            Ok(ArraySample {
                t_ns: p.t_fwd_ns,
                h: p.center_value(window)?,
                position: pose.position(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let grid = if config.planar_fast_path && is_planar(&samples) {
        grid.with_fixed_polar(90.0)?
    } else {
        *grid
    };
    bartlett_from_samples(&samples, &grid, wavelength, config.steering, config.peak_count)
}

fn default_window(n: usize) -> SubcarrierWindow {
    let w = SubcarrierWindow::default();
    if n > w.hi {
        w
    } else {
        SubcarrierWindow {
            lo: 0,
            hi: n.saturating_sub(1),
            target: n.saturating_sub(1) as f64 / 2.0,
        }
    }
}

fn is_planar(samples: &[ArraySample]) -> bool {
    let z0 = samples[0].position[2];
    samples.iter().all(|s| (s.position[2] - z0).abs() < 1e-9)
}
