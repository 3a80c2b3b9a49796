//! Line-of-sight CSI synthesis with carrier frequency offset, sampling time
//! offset and white Gaussian noise, plus reciprocity-based CFO cancellation.
//!
//! A packet sent i -> j ("forward") and its reply j -> i ("backward") see the
//! same propagation phase `d / lambda` but opposite CFO terms:
//!
//! ```text
//! h_fwd = (1/d) exp(-2 pi i (d/lambda + CFO(t_fwd) + N_i))
//! h_bwd = (1/d) exp(-2 pi i (d/lambda - CFO(t_bwd) + N_j))
//! ```
//!
//! so their product carries `-4 pi d / lambda` plus whatever CFO survives the
//! timestamp skew between the two packets.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::NANOS_PER_SECOND;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// i -> j, initiated by the mobile node.
    #[serde(rename = "fwd")]
    Forward,
    /// j -> i reply.
    #[serde(rename = "bwd")]
    Backward,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "fwd",
            Direction::Backward => "bwd",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarrierConfig {
    pub center_frequency_hz: f64,
    pub subcarrier_count: usize,
    pub subcarrier_spacing_hz: f64,
    pub channel_bandwidth_hz: f64,
    /// Fractional subcarrier index that sits exactly on the center frequency.
    pub center_subcarrier_index: f64,
}

impl Default for CarrierConfig {
    fn default() -> Self {
        Self::channel_108()
    }
}

impl CarrierConfig {
    /// 5 GHz channel 108: 5.530-5.550 GHz, 30 exported subcarriers.
    pub fn channel_108() -> Self {
        Self {
            center_frequency_hz: 5.540e9,
            subcarrier_count: 30,
            subcarrier_spacing_hz: 625e3,
            channel_bandwidth_hz: 20e6,
            center_subcarrier_index: 15.5,
        }
    }

    /// Single-tone carrier, handy when only the center frequency matters.
    pub fn single_tone(center_frequency_hz: f64) -> Self {
        Self {
            center_frequency_hz,
            subcarrier_count: 1,
            subcarrier_spacing_hz: 0.0,
            channel_bandwidth_hz: 20e6,
            center_subcarrier_index: 0.0,
        }
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.center_frequency_hz
    }

    pub fn subcarrier_frequency(&self, k: usize) -> f64 {
        self.center_frequency_hz
            + (k as f64 - self.center_subcarrier_index) * self.subcarrier_spacing_hz
    }

    pub fn subcarrier_wavelength(&self, k: usize) -> f64 {
        SPEED_OF_LIGHT / self.subcarrier_frequency(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center_frequency_hz.is_finite() && self.center_frequency_hz > 0.0) {
            return Err(Error::invalid("carrier.center_frequency_hz", "must be positive"));
        }
        if self.subcarrier_count == 0 {
            return Err(Error::invalid("carrier.subcarrier_count", "must be >= 1"));
        }
        if !(self.channel_bandwidth_hz.is_finite() && self.channel_bandwidth_hz > 0.0) {
            return Err(Error::invalid("carrier.channel_bandwidth_hz", "must be positive"));
        }
        if !(self.subcarrier_spacing_hz.is_finite() && self.subcarrier_spacing_hz >= 0.0) {
            return Err(Error::invalid("carrier.subcarrier_spacing_hz", "must be >= 0"));
        }
        let last = (self.subcarrier_count - 1) as f64;
        if !(0.0..=last).contains(&self.center_subcarrier_index) {
            return Err(Error::invalid(
                "carrier.center_subcarrier_index",
                format!("must lie in [0, {last}]"),
            ));
        }
        let lowest = self.subcarrier_frequency(0);
        if lowest <= 0.0 {
            return Err(Error::invalid(
                "carrier.subcarrier_spacing_hz",
                "subcarriers extend below 0 Hz",
            ));
        }
        Ok(())
    }
}

/// `CFO(t) = delta_f * t + c1 * sin(c2 * t)`, in cycles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CfoModel {
    pub delta_f: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CfoModel {
    pub fn paper() -> Self {
        Self {
            delta_f: 10.0,
            c1: 10_000.0,
            c2: 200.0,
        }
    }

    pub fn none() -> Self {
        Self::default()
    }

    /// Derivative in cycles per second.
    pub fn rate(&self, t: f64) -> f64 {
        self.delta_f + self.c1 * self.c2 * (self.c2 * t).cos()
    }

    /// Upper bound on `|rate(t)|` over all t.
    pub fn max_rate(&self) -> f64 {
        self.delta_f.abs() + (self.c1 * self.c2).abs()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("cfo.delta_f", self.delta_f),
            ("cfo.c1", self.c1),
            ("cfo.c2", self.c2),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(())
    }
}

pub fn cfo_phase(t: f64, model: &CfoModel) -> f64 {
    model.delta_f * t + model.c1 * (model.c2 * t).sin()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Complex WGN level relative to the instantaneous signal power. `None`
    /// disables WGN.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    /// Mean sampling time offset in seconds.
    #[serde(default)]
    pub sto_mean_s: f64,
    /// Largest forward/backward timestamp skew in seconds.
    #[serde(default)]
    pub epsilon_t_s: f64,
    /// Constant phase bias of node i, in cycles.
    #[serde(default)]
    pub node_bias_i: f64,
    /// Constant phase bias of node j, in cycles.
    #[serde(default)]
    pub node_bias_j: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::disabled()
    }
}

impl NoiseConfig {
    pub fn disabled() -> Self {
        Self {
            snr_db: None,
            sto_mean_s: 0.0,
            epsilon_t_s: 0.0,
            node_bias_i: 0.0,
            node_bias_j: 0.0,
        }
    }

    /// 3 dB SNR, 300 us mean STO, 100 ns skew.
    pub fn paper() -> Self {
        Self {
            snr_db: Some(3.0),
            sto_mean_s: 300e-6,
            epsilon_t_s: 100e-9,
            node_bias_i: 0.0,
            node_bias_j: 0.0,
        }
    }

    pub fn epsilon_t_ns(&self) -> u64 {
        (self.epsilon_t_s * NANOS_PER_SECOND).round() as u64
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(Error::invalid("noise.snr_db", "must be finite"));
            }
        }
        if !(self.sto_mean_s.is_finite() && self.sto_mean_s >= 0.0) {
            return Err(Error::invalid("noise.sto_mean_s", "must be >= 0"));
        }
        if !(self.epsilon_t_s.is_finite() && self.epsilon_t_s >= 0.0) {
            return Err(Error::invalid("noise.epsilon_t_s", "must be >= 0"));
        }
        if !(self.node_bias_i.is_finite() && self.node_bias_j.is_finite()) {
            return Err(Error::invalid("noise.node_bias", "must be finite"));
        }
        Ok(())
    }
}

fn check_distance(d: f64) -> Result<()> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "distance",
            format!("antennas must be separated, got {d} m"),
        ))
    }
}

/// `exp(-2 pi i * cycles)` with the integer part of `cycles` removed first, so
/// large CFO accumulations do not eat into the phase precision.
fn unit_phasor(cycles: f64) -> Complex64 {
    let frac = cycles.rem_euclid(1.0);
    Complex64::from_polar(1.0, -TAU * frac)
}

/// Free-space channel `(1/d) exp(-2 pi i d / lambda)`.
pub fn ideal_csi(d: f64, wavelength: f64) -> Result<Complex64> {
    check_distance(d)?;
    Ok(unit_phasor(d / wavelength) / d)
}

/// Phase of [`ideal_csi`] wrapped to (-pi, pi].
pub fn ideal_phase(d: f64, wavelength: f64) -> Result<f64> {
    check_distance(d)?;
    Ok(wrap_phase(-TAU * (d / wavelength).rem_euclid(1.0)))
}

/// Wraps into (-pi, pi].
pub fn wrap_phase(a: f64) -> f64 {
    let w = PI - (PI - a).rem_euclid(TAU);
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

fn add_wgn<R: Rng + ?Sized>(value: Complex64, snr_db: Option<f64>, rng: &mut R) -> Complex64 {
    let Some(snr_db) = snr_db else {
        return value;
    };
    let noise_power = value.norm_sqr() / 10f64.powf(snr_db / 10.0);
    let sigma = (noise_power / 2.0).sqrt();
    if sigma == 0.0 {
        return value;
    }
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    value + Complex64::new(normal.sample(rng), normal.sample(rng))
}

/// One direction's CSI at distance `d` and time `t` (seconds).
pub fn perturbed_csi<R: Rng + ?Sized>(
    direction: Direction,
    d: f64,
    t: f64,
    wavelength: f64,
    cfo: &CfoModel,
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<Complex64> {
    check_distance(d)?;
    // Each term is reduced mod 1 on its own so the CFO term is bit-identical
    // in both directions and cancels exactly in the reciprocity product.
    let path = (d / wavelength).rem_euclid(1.0);
    let offset = cfo_phase(t, cfo).rem_euclid(1.0);
    let cycles = match direction {
        Direction::Forward => path + offset + noise.node_bias_i.rem_euclid(1.0),
        Direction::Backward => path - offset + noise.node_bias_j.rem_euclid(1.0),
    };
    let clean = unit_phasor(cycles) / d;
    Ok(add_wgn(clean, noise.snr_db, rng))
}

/// Forward and backward CSI for one exchange. WGN, if enabled, is drawn
/// independently for each direction (forward first).
pub fn perturbed_csi_pair<R: Rng + ?Sized>(
    d: f64,
    t_fwd: f64,
    t_bwd: f64,
    wavelength: f64,
    cfo: &CfoModel,
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<(Complex64, Complex64)> {
    // 1 ns of slack for timestamps that went through integer nanoseconds.
    if (t_fwd - t_bwd).abs() > noise.epsilon_t_s + 1e-9 {
        return Err(Error::invalid(
            "t_bwd",
            format!(
                "forward/backward skew {} s exceeds epsilon_t {} s",
                (t_fwd - t_bwd).abs(),
                noise.epsilon_t_s
            ),
        ));
    }
    let fwd = perturbed_csi(Direction::Forward, d, t_fwd, wavelength, cfo, noise, rng)?;
    let bwd = perturbed_csi(Direction::Backward, d, t_bwd, wavelength, cfo, noise, rng)?;
    Ok((fwd, bwd))
}

/// Reciprocity product `h_fwd * h_bwd`; the CFO terms cancel when both were
/// captured at the same instant.
pub fn cancel_cfo(fwd: Complex64, bwd: Complex64) -> Result<Complex64> {
    if fwd == Complex64::new(0.0, 0.0) || bwd == Complex64::new(0.0, 0.0) {
        return Err(Error::invalid("cancel_cfo", "zero CSI value"));
    }
    Ok(fwd * bwd)
}

/// Draws per-tick (t_fwd, t_bwd) timestamps in nanoseconds.
///
/// The forward packet is delayed by an exponential STO with mean
/// `sto_mean_s`; the backward packet trails it by a uniform integer number of
/// nanoseconds in [0, epsilon_t]. The STO is resampled when it would exceed
/// half the spare gap between ticks, which keeps both streams strictly
/// increasing.
pub fn jittered_timestamps<R: Rng + ?Sized>(
    nominal_ns: &[u64],
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<Vec<(u64, u64)>> {
    noise.validate()?;
    if let Some(i) = nominal_ns.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "nominal timestamps",
            format!("not strictly increasing at index {}", i + 1),
        ));
    }
    let eps_ns = noise.epsilon_t_ns();
    let min_gap = nominal_ns
        .windows(2)
        .map(|w| w[1] - w[0])
        .min()
        .unwrap_or(u64::MAX);
    let cap_ns = min_gap.saturating_sub(eps_ns) / 2;
    let sto = if noise.sto_mean_s > 0.0 && cap_ns > 0 {
        Some(Exp::new(1.0 / (noise.sto_mean_s * NANOS_PER_SECOND)).expect("positive rate"))
    } else {
        None
    };

    let out = nominal_ns
        .iter()
        .map(|&t| {
            let offset = match &sto {
                Some(exp) => loop {
                    let draw = exp.sample(rng).round();
                    if draw < cap_ns as f64 {
                        break draw as u64;
                    }
                },
                None => 0,
            };
            let skew = if eps_ns > 0 {
                rng.random_range(0..=eps_ns)
            } else {
                0
            };
            let t_fwd = t + offset;
            (t_fwd, t_fwd + skew)
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lambda() -> f64 {
        CarrierConfig::channel_108().wavelength()
    }

    #[test]
    fn carrier_wavelength() {
        let c = CarrierConfig::channel_108();
        let expect = 299_792_458.0 / 5.54e9;
        assert!((c.wavelength() - expect).abs() / expect < 1e-12);
        assert_abs_diff_eq!(c.wavelength() / 2.0, 0.0271, epsilon = 1e-4);
        assert_eq!(c.subcarrier_frequency(15), 5.54e9 - 0.5 * 625e3);
        let span = c.subcarrier_frequency(29) - c.subcarrier_frequency(0);
        assert_abs_diff_eq!(span, 18.125e6, epsilon = 1e-3);
        c.validate().unwrap();
    }

    #[test]
    fn carrier_rejects_bad_values() {
        let mut c = CarrierConfig::channel_108();
        c.subcarrier_count = 0;
        assert!(c.validate().is_err());
        let mut c = CarrierConfig::channel_108();
        c.center_frequency_hz = -1.0;
        assert!(c.validate().is_err());
        let mut c = CarrierConfig::channel_108();
        c.center_subcarrier_index = 31.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn ideal_full_and_half_wavelength() {
        let lam = lambda();
        let h = ideal_csi(lam, lam).unwrap();
        assert_abs_diff_eq!(h.re, 1.0 / lam, epsilon = 1e-9);
        assert_abs_diff_eq!(h.im, 0.0, epsilon = 1e-9);
        let h = ideal_csi(lam / 2.0, lam).unwrap();
        assert_abs_diff_eq!(h.norm(), 2.0 / lam, epsilon = 1e-9);
        assert_abs_diff_eq!(h.re, -2.0 / lam, epsilon = 1e-9);
        assert_abs_diff_eq!(ideal_phase(lam / 2.0, lam).unwrap(), PI, epsilon = 1e-12);
    }

    #[test]
    fn ideal_matches_high_precision_oracle() {
        // 50-digit evaluation of -2 pi d / lambda at d = hypot(3.858, 0.929),
        // f = 5.540 GHz.
        let d = 3.858f64.hypot(0.929);
        assert_eq!(d, 3.968274814072231);
        let h = ideal_csi(d, lambda()).unwrap();
        assert_abs_diff_eq!(h.norm(), 0.25199867621411108097, epsilon = 1e-15);
        assert_abs_diff_eq!(h.arg(), -2.0831239963376573302, epsilon = 1e-12);
        assert_abs_diff_eq!(h.re, -0.1235316116808508319, epsilon = 1e-13);
        assert_abs_diff_eq!(h.im, -0.21964351510844992892, epsilon = 1e-13);
        assert_abs_diff_eq!(
            ideal_phase(d, lambda()).unwrap(),
            -2.0831239963376573302,
            epsilon = 1e-12
        );
    }

    #[test]
    fn ideal_rejects_colocated() {
        assert!(ideal_csi(0.0, lambda()).is_err());
        assert!(ideal_csi(-1.0, lambda()).is_err());
        assert!(ideal_csi(f64::NAN, lambda()).is_err());
    }

    #[test]
    fn cfo_examples() {
        let m = CfoModel::paper();
        assert_eq!(cfo_phase(0.0, &m), 0.0);
        let linear = CfoModel {
            delta_f: 10.0,
            c1: 0.0,
            c2: 200.0,
        };
        assert_eq!(cfo_phase(0.5, &linear), 5.0);
        // 0.1 + 10000 sin(2), evaluated at 25 digits.
        assert_abs_diff_eq!(cfo_phase(0.01, &m), 9093.074268256816953960199, epsilon = 1e-9);
        assert_abs_diff_eq!(cfo_phase(0.01, &m), 0.1 + 10000.0 * 2f64.sin(), epsilon = 1e-9);
    }

    #[test]
    fn noiseless_pair_cancels_to_squared_channel() {
        let lam = lambda();
        let d = 3.858f64.hypot(0.929);
        let noise = NoiseConfig::disabled();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (f, b) =
            perturbed_csi_pair(d, 0.37, 0.37, lam, &CfoModel::paper(), &noise, &mut rng).unwrap();
        let prod = cancel_cfo(f, b).unwrap();
        let ideal = ideal_csi(d, lam).unwrap();
        assert_abs_diff_eq!(prod.arg(), (ideal * ideal).arg(), epsilon = 1e-9);
        assert_abs_diff_eq!(prod.arg(), 2.1169373145042718166, epsilon = 1e-9);
        assert_abs_diff_eq!(prod.norm(), 1.0 / (d * d), epsilon = 1e-12);
    }

    #[test]
    fn integer_cycle_cfo_wraps_away() {
        let lam = lambda();
        let cfo = CfoModel {
            delta_f: 10.0,
            c1: 0.0,
            c2: 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (f, b) =
            perturbed_csi_pair(lam, 1.0, 1.0, lam, &cfo, &NoiseConfig::disabled(), &mut rng)
                .unwrap();
        assert_abs_diff_eq!(f.arg(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(b.arg(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn node_bias_enters_product() {
        let lam = lambda();
        let noise = NoiseConfig {
            node_bias_i: 0.1,
            node_bias_j: 0.05,
            ..NoiseConfig::disabled()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let d = 2.0;
        let (f, b) =
            perturbed_csi_pair(d, 0.2, 0.2, lam, &CfoModel::paper(), &noise, &mut rng).unwrap();
        let expect = wrap_phase(-TAU * (2.0 * d / lam + 0.15));
        assert_abs_diff_eq!(cancel_cfo(f, b).unwrap().arg(), expect, epsilon = 1e-9);
    }

    #[test]
    fn pair_rejects_excess_skew() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let noise = NoiseConfig {
            epsilon_t_s: 100e-9,
            ..NoiseConfig::disabled()
        };
        let r = perturbed_csi_pair(1.0, 0.0, 1e-6, lambda(), &CfoModel::paper(), &noise, &mut rng);
        assert!(r.is_err());
    }

    #[test]
    fn wgn_hits_target_snr() {
        let lam = lambda();
        let noise = NoiseConfig {
            snr_db: Some(3.0),
            ..NoiseConfig::disabled()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let d = 3.0;
        let clean = ideal_csi(d, lam).unwrap();
        let n = 10_000;
        let mut noise_power = 0.0;
        for _ in 0..n {
            let v =
                perturbed_csi(Direction::Forward, d, 0.0, lam, &CfoModel::none(), &noise, &mut rng)
                    .unwrap();
            noise_power += (v - clean).norm_sqr();
        }
        let snr = 10.0 * (clean.norm_sqr() / (noise_power / n as f64)).log10();
        assert!((snr - 3.0).abs() <= 0.5, "measured {snr} dB");
    }

    #[test]
    fn cancel_cfo_examples() {
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(cancel_cfo(one, one).unwrap(), one);
        for alpha in [0.1, 1.0, 3.0, -2.5] {
            let p = cancel_cfo(Complex64::from_polar(1.0, -alpha), Complex64::from_polar(1.0, alpha))
                .unwrap();
            assert_abs_diff_eq!(p.re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p.im, 0.0, epsilon = 1e-12);
        }
        assert!(cancel_cfo(Complex64::new(0.0, 0.0), one).is_err());
    }

    #[test]
    fn jitter_disabled_is_identity() {
        let nominal: Vec<u64> = (0..100).map(|k| k * 10_000_000).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = jittered_timestamps(&nominal, &NoiseConfig::disabled(), &mut rng).unwrap();
        for (t, (f, b)) in nominal.iter().zip(&out) {
            assert_eq!((t, t), (f, b));
        }
    }

    #[test]
    fn jitter_mean_and_skew_bound() {
        let nominal: Vec<u64> = (0..10_000).map(|k| k * 10_000_000).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let noise = NoiseConfig::paper();
        let out = jittered_timestamps(&nominal, &noise, &mut rng).unwrap();
        let mean = out
            .iter()
            .zip(&nominal)
            .map(|((f, _), t)| (f - t) as f64)
            .sum::<f64>()
            / nominal.len() as f64;
        assert!((mean - 300_000.0).abs() <= 30_000.0, "mean {mean} ns");
        assert!(out.iter().all(|(f, b)| b >= f && b - f <= 100));
        assert!(out.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1));
    }

    #[test]
    fn jitter_rejects_unsorted() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(jittered_timestamps(&[5, 5], &NoiseConfig::disabled(), &mut rng).is_err());
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert_abs_diff_eq!(wrap_phase(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn magnitude_law(d in 0.1f64..100.0) {
            let h = ideal_csi(d, lambda()).unwrap();
            prop_assert!((h.norm() * d - 1.0).abs() < 1e-12);
        }

        #[test]
        fn phase_periodic_in_wavelength(d in 0.1f64..50.0, k in 1u32..50) {
            let lam = lambda();
            let a = ideal_csi(d, lam).unwrap();
            let b = ideal_csi(d + k as f64 * lam, lam).unwrap();
            let diff = wrap_phase(a.arg() - b.arg());
            prop_assert!(diff.abs() < 1e-9, "diff {}", diff);
            let scaled = b * ((d + k as f64 * lam) / d);
            prop_assert!((scaled - a).norm() / a.norm() < 1e-9);
        }

        #[test]
        fn reciprocity_independent_of_cfo(
            delta_f in -1e3f64..1e3, c1 in -2e4f64..2e4, c2 in -500.0f64..500.0,
            t in 0.0f64..300.0, d in 0.5f64..20.0,
        ) {
            let lam = lambda();
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let cfo = CfoModel { delta_f, c1, c2 };
            let noise = NoiseConfig::disabled();
            let (f, b) = perturbed_csi_pair(d, t, t, lam, &cfo, &noise, &mut rng).unwrap();
            let (f0, b0) = perturbed_csi_pair(d, t, t, lam, &CfoModel::none(), &noise, &mut rng).unwrap();
            let diff = wrap_phase(cancel_cfo(f, b).unwrap().arg() - cancel_cfo(f0, b0).unwrap().arg());
            prop_assert!(diff.abs() < 1e-9, "diff {}", diff);
        }
    }
}
