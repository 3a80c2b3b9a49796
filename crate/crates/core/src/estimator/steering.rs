//! Steering vectors of a motion-generated (virtual) antenna array.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::AngleGrid;
use crate::trajectory::SphericalDisplacement;

/// Candidate arrival direction in radians; polar is measured from +z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LookDirection {
    pub azimuth: f64,
    pub polar: f64,
}

impl LookDirection {
    pub fn from_degrees(azimuth_deg: f64, polar_deg: f64) -> Self {
        Self {
            azimuth: azimuth_deg.to_radians(),
            polar: polar_deg.to_radians(),
        }
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (sp, cp) = self.polar.sin_cos();
        let (sa, ca) = self.azimuth.sin_cos();
        [sp * ca, sp * sa, cp]
    }
}

/// Whether the array response is raised to the first or second power.
///
/// The reciprocity product travels the path twice, so its phase rate along the
/// trajectory is doubled; `Squared` matches that and is the default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteeringPower {
    Single,
    #[default]
    Squared,
}

impl SteeringPower {
    pub fn exponent(self) -> f64 {
        match self {
            SteeringPower::Single => 1.0,
            SteeringPower::Squared => 2.0,
        }
    }
}

/// `exp(-2 pi i (d / lambda) cos(gamma))` with
/// `cos(gamma) = sin(polar) sin(xi) cos(azimuth - phi) + cos(xi) cos(polar)`,
/// the angle between the look direction and the displacement.
pub fn steering_phase(
    disp: &SphericalDisplacement,
    look: LookDirection,
    wavelength: f64,
) -> Complex64 {
    let cos_gamma = look.polar.sin() * disp.polar.sin() * (look.azimuth - disp.azimuth).cos()
        + disp.polar.cos() * look.polar.cos();
    Complex64::from_polar(1.0, -TAU * disp.magnitude / wavelength * cos_gamma)
}

/// Precomputed steering entries, laid out `[sample][cell]`.
///
/// Memory grows as samples x cells, so this is meant for small grids or for
/// reusing one geometry across many CSI streams. The streaming path in
/// [`super::bartlett_from_samples`] never materializes it.
#[derive(Clone, Debug)]
pub struct SteeringGrid {
    pub grid: AngleGrid,
    pub power: SteeringPower,
    n_samples: usize,
    values: Vec<Complex64>,
}

impl SteeringGrid {
    pub fn compute(
        displacements: &[SphericalDisplacement],
        grid: &AngleGrid,
        wavelength: f64,
        power: SteeringPower,
    ) -> Self {
        let looks: Vec<LookDirection> = (0..grid.len())
            .map(|i| {
                let (a, p) = grid.cell(i);
                LookDirection::from_degrees(grid.azimuth.value_deg(a), grid.polar.value_deg(p))
            })
            .collect();
        let m = power.exponent();
        let values = displacements
            .iter()
            .flat_map(|d| {
                looks.iter().map(move |&look| {
                    let a = steering_phase(d, look, wavelength);
                    if m == 2.0 {
                        a * a
                    } else {
                        a
                    }
                })
            })
            .collect();
        Self {
            grid: *grid,
            power,
            n_samples: displacements.len(),
            values,
        }
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn entry(&self, sample: usize, cell: usize) -> Complex64 {
        self.values[sample * self.grid.len() + cell]
    }

    /// `|sum_t h_t a_t(cell)|^2` for every cell.
    pub fn project(&self, h: &[Complex64]) -> Vec<f64> {
        assert_eq!(h.len(), self.n_samples, "one channel value per sample");
        (0..self.grid.len())
            .map(|cell| {
                h.iter()
                    .enumerate()
                    .map(|(t, &v)| v * self.entry(t, cell))
                    .sum::<Complex64>()
                    .norm_sqr()
            })
            .collect()
    }
}
