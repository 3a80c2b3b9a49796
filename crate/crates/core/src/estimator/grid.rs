use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evenly spaced samples `start + i * step` for `i in 0..count`, in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub start_deg: f64,
    pub step_deg: f64,
    pub count: usize,
}

impl Axis {
    pub fn value_deg(&self, i: usize) -> f64 {
        self.start_deg + i as f64 * self.step_deg
    }

    pub fn values_deg(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.value_deg(i))
    }
}

/// Candidate arrival directions: azimuth over [-180, 180) and polar angle over
/// [0, 180] (90 = horizontal plane). Cells are stored azimuth-major, so the
/// linear index of `(az, pol)` is `az * polar.count + pol`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleGrid {
    pub azimuth: Axis,
    pub polar: Axis,
}

impl Default for AngleGrid {
    fn default() -> Self {
        Self::full(1.0).expect("1 degree divides both ranges")
    }
}

fn steps_in(range: f64, step: f64, field: &str) -> Result<usize> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid(field, "step must be positive"));
    }
    let n = range / step;
    let rounded = n.round();
    if rounded < 1.0 || (n - rounded).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::invalid(
            field,
            format!("step {step} deg does not divide {range} deg evenly"),
        ));
    }
    Ok(rounded as usize)
}

impl AngleGrid {
    /// Full sphere at `step_deg` on both axes.
    pub fn full(step_deg: f64) -> Result<Self> {
        let n_az = steps_in(360.0, step_deg, "grid.step_deg")?;
        let n_pol = steps_in(180.0, step_deg, "grid.step_deg")? + 1;
        let grid = Self {
            azimuth: Axis {
                start_deg: -180.0,
                step_deg,
                count: n_az,
            },
            polar: Axis {
                start_deg: 0.0,
                step_deg,
                count: n_pol,
            },
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Azimuth sweep at a single polar angle.
    pub fn with_fixed_polar(self, polar_deg: f64) -> Result<Self> {
        let grid = Self {
            polar: Axis {
                start_deg: polar_deg,
                step_deg: self.polar.step_deg,
                count: 1,
            },
            ..self
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.azimuth.count * self.polar.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, az: usize, pol: usize) -> usize {
        az * self.polar.count + pol
    }

    pub fn cell(&self, index: usize) -> (usize, usize) {
        (index / self.polar.count, index % self.polar.count)
    }

    pub fn validate(&self) -> Result<()> {
        let n = steps_in(360.0, self.azimuth.step_deg, "grid.azimuth.step_deg")?;
        if n != self.azimuth.count || n < 2 {
            return Err(Error::invalid(
                "grid.azimuth",
                "must cover [-180, 180) with at least two samples",
            ));
        }
        if (self.azimuth.start_deg + 180.0).abs() > 1e-9 {
            return Err(Error::invalid("grid.azimuth.start_deg", "must be -180"));
        }
        match self.polar.count {
            0 => return Err(Error::invalid("grid.polar.count", "must be >= 1")),
            1 => {
                if !(0.0..=180.0).contains(&self.polar.start_deg) {
                    return Err(Error::invalid("grid.polar.start_deg", "must lie in [0, 180]"));
                }
            }
            count => {
                let n = steps_in(180.0, self.polar.step_deg, "grid.polar.step_deg")?;
                if n + 1 != count || self.polar.start_deg.abs() > 1e-9 {
                    return Err(Error::invalid(
                        "grid.polar",
                        "must cover [0, 180] inclusive",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Offset in grid steps between two azimuth indices, going the short way
    /// around.
    pub fn azimuth_steps_between(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        d.min(self.azimuth.count - d)
    }
}
