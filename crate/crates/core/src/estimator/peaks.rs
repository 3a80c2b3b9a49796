use serde::{Deserialize, Serialize};

use super::bartlett::AoaProfile;
use super::grid::AngleGrid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPeak {
    pub az_index: usize,
    pub polar_index: usize,
    pub azimuth_deg: f64,
    pub polar_deg: f64,
    pub magnitude: f64,
}

impl GridPeak {
    fn at(grid: &AngleGrid, index: usize, magnitude: f64) -> Self {
        let (az, pol) = grid.cell(index);
        Self {
            az_index: az,
            polar_index: pol,
            azimuth_deg: grid.azimuth.value_deg(az),
            polar_deg: grid.polar.value_deg(pol),
            magnitude,
        }
    }
}

fn neighbours(grid: &AngleGrid, index: usize) -> impl Iterator<Item = usize> + '_ {
    let (az, pol) = grid.cell(index);
    let n_az = grid.azimuth.count as isize;
    let n_pol = grid.polar.count as isize;
    (-1isize..=1)
        .flat_map(move |da| (-1isize..=1).map(move |dp| (da, dp)))
        .filter(|&(da, dp)| da != 0 || dp != 0)
        .filter_map(move |(da, dp)| {
            let p = pol as isize + dp;
            if p < 0 || p >= n_pol {
                return None;
            }
            let a = (az as isize + da).rem_euclid(n_az);
            Some(grid.index(a as usize, p as usize))
        })
        .filter(move |&n| n != index)
}

/// A cell is a local maximum when no 8-neighbour (azimuth wraps, polar does
/// not) is larger, and every equal neighbour has a higher linear index. The
/// second rule makes flat plateaus report one peak, at their lowest index.
fn is_local_max(grid: &AngleGrid, magnitudes: &[f64], index: usize) -> bool {
    let v = magnitudes[index];
    neighbours(grid, index).all(|n| {
        let w = magnitudes[n];
        v > w || (v == w && index < n)
    })
}

/// Local maxima sorted by magnitude (descending, ties to the lower index),
/// truncated to `count`. The first entry is always the global argmax with the
/// lowest linear index.
pub fn extract_peaks(grid: &AngleGrid, magnitudes: &[f64], count: usize) -> Vec<GridPeak> {
    let mut idx: Vec<usize> = (0..magnitudes.len())
        .filter(|&i| is_local_max(grid, magnitudes, i))
        .collect();
    idx.sort_by(|&a, &b| magnitudes[b].total_cmp(&magnitudes[a]).then(a.cmp(&b)));
    idx.truncate(count.max(1));
    idx.into_iter()
        .map(|i| GridPeak::at(grid, i, magnitudes[i]))
        .collect()
}

impl AoaProfile {
    pub fn top_peaks(&self, count: usize) -> Vec<GridPeak> {
        extract_peaks(&self.grid, &self.magnitudes, count)
    }

    /// Lobe-level peaks: local maxima of at least `rel_threshold` times the
    /// global maximum, with weaker maxima closer than `min_separation_deg`
    /// (on either axis, azimuth measured around the circle) to an accepted one
    /// suppressed.
    pub fn dominant_peaks(&self, rel_threshold: f64, min_separation_deg: f64) -> Vec<GridPeak> {
        let all = extract_peaks(&self.grid, &self.magnitudes, self.magnitudes.len());
        let floor = rel_threshold * all[0].magnitude;
        let mut kept: Vec<GridPeak> = Vec::new();
        for p in all.into_iter().take_while(|p| p.magnitude >= floor) {
            let clear = kept.iter().all(|k| {
                let d_az = self.grid.azimuth_steps_between(k.az_index, p.az_index) as f64
                    * self.grid.azimuth.step_deg;
                let d_pol = (k.polar_deg - p.polar_deg).abs();
                d_az.max(d_pol) >= min_separation_deg
            });
            if clear {
                kept.push(p);
            }
        }
        kept
    }
}

pub const DOMINANT_PEAK_THRESHOLD: f64 = 0.5;
pub const DOMINANT_PEAK_SEPARATION_DEG: f64 = 5.0;
