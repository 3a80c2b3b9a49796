//! Round-robin forward/backward packet exchange between two nodes and the
//! frame-number pairing that turns it into CFO-free channel samples.

use std::cmp::Ordering;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{
    cancel_cfo, jittered_timestamps, perturbed_csi, CarrierConfig, CfoModel, NoiseConfig,
};
use crate::error::{Error, Result};
use crate::trajectory::{interpolate_pose, nearest_index, Pose, NANOS_PER_SECOND};

pub use crate::channel::Direction;

pub const DEFAULT_ID_I: &str = "02:00:00:00:00:01";
pub const DEFAULT_ID_J: &str = "02:00:00:00:00:02";

/// One captured packet. Serialized as a single JSONL record:
/// `{"t_ns":..,"frame":..,"src_id":"..","dir":"fwd","csi":[[re,im],..]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsiPacket {
    pub t_ns: u64,
    pub frame: u32,
    pub src_id: String,
    pub dir: Direction,
    pub csi: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsiPair {
    pub frame: u32,
    pub t_fwd_ns: u64,
    pub t_bwd_ns: u64,
    /// Per-subcarrier reciprocity product.
    pub h_squared: Vec<Complex64>,
    /// Mobile-node pose at the forward timestamp, once attached.
    pub rx_pose: Option<Pose>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExchangeOutput {
    /// Forward packets (src = node i).
    pub packets_i: Vec<CsiPacket>,
    /// Backward replies (src = node j), missing where the reply was lost.
    pub packets_j: Vec<CsiPacket>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingStats {
    pub packets_i: usize,
    pub packets_j: usize,
    pub pairs: usize,
    pub discarded: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Pairing {
    pub pairs: Vec<CsiPair>,
    pub stats: PairingStats,
}

#[derive(Clone, Debug)]
pub struct ExchangeParams<'a> {
    pub carrier: &'a CarrierConfig,
    pub cfo: &'a CfoModel,
    pub noise: &'a NoiseConfig,
    pub loss_rate: f64,
    pub id_i: &'a str,
    pub id_j: &'a str,
}

/// Runs the two-node exchange over the nominal ticks of `traj_i`.
///
/// Each tick node i sends a forward packet and node j replies unless the reply
/// is lost (independent Bernoulli with `loss_rate`). Frame numbers advance on
/// every tick, lost or not. The separation for each direction is taken from
/// both trajectories interpolated at that packet's jittered timestamp.
pub fn run_exchange<R: Rng + ?Sized>(
    traj_i: &[Pose],
    traj_j: &[Pose],
    params: &ExchangeParams<'_>,
    rng: &mut R,
) -> Result<ExchangeOutput> {
    params.carrier.validate()?;
    params.cfo.validate()?;
    params.noise.validate()?;
    if !(0.0..1.0).contains(&params.loss_rate) {
        return Err(Error::invalid("loss_rate", "must lie in [0, 1)"));
    }
    if traj_i.len() != traj_j.len() {
        return Err(Error::invalid(
            "trajectories",
            format!("length mismatch: {} vs {}", traj_i.len(), traj_j.len()),
        ));
    }
    if traj_i.iter().zip(traj_j).any(|(a, b)| a.t_ns != b.t_ns) {
        return Err(Error::invalid(
            "trajectories",
            "node timestamps differ; both nodes must share rate and duration",
        ));
    }
    if traj_i.len() > u32::MAX as usize {
        return Err(Error::invalid("trajectories", "too many ticks for u32 frames"));
    }

    let nominal: Vec<u64> = traj_i.iter().map(|p| p.t_ns).collect();
    let times = jittered_timestamps(&nominal, params.noise, rng)?;
    let wavelengths: Vec<f64> = (0..params.carrier.subcarrier_count)
        .map(|k| params.carrier.subcarrier_wavelength(k))
        .collect();

    let mut out = ExchangeOutput {
        packets_i: Vec::with_capacity(nominal.len()),
        packets_j: Vec::with_capacity(nominal.len()),
    };
    for (frame, &(t_fwd, t_bwd)) in times.iter().enumerate() {
        let frame = frame as u32;
        let d_fwd = separation(traj_i, traj_j, t_fwd);
        let csi = csi_vector(Direction::Forward, d_fwd, t_fwd, &wavelengths, params, rng)?;
        out.packets_i.push(CsiPacket {
            t_ns: t_fwd,
            frame,
            src_id: params.id_i.to_string(),
            dir: Direction::Forward,
            csi,
        });

        if params.loss_rate > 0.0 && rng.random::<f64>() < params.loss_rate {
            continue;
        }
        let d_bwd = separation(traj_i, traj_j, t_bwd);
        let csi = csi_vector(Direction::Backward, d_bwd, t_bwd, &wavelengths, params, rng)?;
        out.packets_j.push(CsiPacket {
            t_ns: t_bwd,
            frame,
            src_id: params.id_j.to_string(),
            dir: Direction::Backward,
            csi,
        });
    }
    Ok(out)
}

fn separation(traj_i: &[Pose], traj_j: &[Pose], t_ns: u64) -> f64 {
    let a = interpolate_pose(traj_i, t_ns).expect("non-empty trajectory");
    let b = interpolate_pose(traj_j, t_ns).expect("non-empty trajectory");
    a.distance_to(&b)
}

fn csi_vector<R: Rng + ?Sized>(
    direction: Direction,
    d: f64,
    t_ns: u64,
    wavelengths: &[f64],
    params: &ExchangeParams<'_>,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let t = t_ns as f64 / NANOS_PER_SECOND;
    wavelengths
        .iter()
        .map(|&lam| perturbed_csi(direction, d, t, lam, params.cfo, params.noise, rng))
        .collect()
}

/// Matches forward and backward packets by frame number.
///
/// Both streams must be sorted by frame. A frame yields a pair when it appears
/// in both streams, the timestamp skew is within `epsilon_t_ns`, and the CSI
/// vectors line up; every other frame from either stream counts as discarded.
pub fn pair_packets(fwd: &[CsiPacket], bwd: &[CsiPacket], epsilon_t_ns: u64) -> Pairing {
    let mut pairs = Vec::with_capacity(fwd.len().min(bwd.len()));
    let mut discarded = 0;
    let (mut i, mut j) = (0, 0);
    while i < fwd.len() && j < bwd.len() {
        let (a, b) = (&fwd[i], &bwd[j]);
        match a.frame.cmp(&b.frame) {
            Ordering::Less => {
                discarded += 1;
                i += 1;
            }
            Ordering::Greater => {
                discarded += 1;
                j += 1;
            }
            Ordering::Equal => {
                match make_pair(a, b, epsilon_t_ns) {
                    Some(p) => pairs.push(p),
                    None => discarded += 1,
                }
                i += 1;
                j += 1;
            }
        }
    }
    discarded += (fwd.len() - i) + (bwd.len() - j);
    let stats = PairingStats {
        packets_i: fwd.len(),
        packets_j: bwd.len(),
        pairs: pairs.len(),
        discarded,
    };
    Pairing { pairs, stats }
}

fn make_pair(fwd: &CsiPacket, bwd: &CsiPacket, epsilon_t_ns: u64) -> Option<CsiPair> {
    if fwd.t_ns.abs_diff(bwd.t_ns) > epsilon_t_ns || fwd.csi.len() != bwd.csi.len() {
        return None;
    }
    let h_squared = fwd
        .csi
        .iter()
        .zip(&bwd.csi)
        .map(|(&f, &b)| cancel_cfo(f, b))
        .collect::<Result<Vec<_>>>()
        .ok()?;
    Some(CsiPair {
        frame: fwd.frame,
        t_fwd_ns: fwd.t_ns,
        t_bwd_ns: bwd.t_ns,
        h_squared,
        rx_pose: None,
    })
}

/// Attaches the nearest-in-time odometry pose to every pair.
///
/// Fails when a pair's forward timestamp falls more than half a sampling
/// period outside the odometry stream, which means the two were not recorded
/// on the same timebase.
pub fn attach_rx_poses(pairs: &mut [CsiPair], odometry: &[Pose]) -> Result<()> {
    let (Some(first), Some(last)) = (odometry.first(), odometry.last()) else {
        return Err(Error::invalid("odometry", "empty odometry stream"));
    };
    let half_period = if odometry.len() > 1 {
        (last.t_ns - first.t_ns) / (odometry.len() as u64 - 1) / 2
    } else {
        0
    };
    for pair in pairs {
        let t = pair.t_fwd_ns;
        if t + half_period < first.t_ns || t > last.t_ns + half_period {
            return Err(Error::invalid(
                "odometry",
                format!(
                    "pair frame {} at {t} ns lies outside odometry span [{}, {}] ns",
                    pair.frame, first.t_ns, last.t_ns
                ),
            ));
        }
        let idx = nearest_index(odometry, t).expect("non-empty odometry");
        pair.rx_pose = Some(odometry[idx]);
    }
    Ok(())
}

/// Subcarrier range and fractional target for center interpolation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubcarrierWindow {
    pub lo: usize,
    pub hi: usize,
    pub target: f64,
}

impl Default for SubcarrierWindow {
    fn default() -> Self {
        Self {
            lo: 12,
            hi: 19,
            target: 15.5,
        }
    }
}

impl SubcarrierWindow {
    /// The default 12..=19 window when the carrier has room for it, otherwise
    /// every subcarrier with the carrier's own center index.
    pub fn for_carrier(carrier: &CarrierConfig) -> Self {
        let w = Self::default();
        if carrier.subcarrier_count > w.hi {
            w
        } else {
            Self {
                lo: 0,
                hi: carrier.subcarrier_count.saturating_sub(1),
                target: carrier.center_subcarrier_index,
            }
        }
    }
}

/// Least-squares line through the unwrapped phase and the log-magnitude of
/// `values[lo..=hi]`, evaluated at `target`.
///
/// A window of a single subcarrier returns that value unchanged.
pub fn interpolate_center_subcarrier(
    values: &[Complex64],
    window: SubcarrierWindow,
) -> Result<Complex64> {
    let SubcarrierWindow { lo, hi, target } = window;
    if lo == hi && hi < values.len() {
        return Ok(values[lo]);
    }
    if lo > hi || hi >= values.len() {
        return Err(Error::invalid(
            "subcarrier window",
            format!("[{lo}, {hi}] does not fit {} subcarriers", values.len()),
        ));
    }
    if !target.is_finite() {
        return Err(Error::invalid("subcarrier window", "target must be finite"));
    }
    let slice = &values[lo..=hi];
    if slice.iter().any(|v| v.norm() == 0.0 || !v.norm().is_finite()) {
        return Err(Error::invalid("subcarrier window", "zero or non-finite CSI value"));
    }

    let phases = unwrap(slice.iter().map(|v| v.arg()));
    let log_mags: Vec<f64> = slice.iter().map(|v| v.norm().ln()).collect();
    let xs: Vec<f64> = (lo..=hi).map(|k| k as f64).collect();

    let phase = fit_line(&xs, &phases, target);
    let log_mag = fit_line(&xs, &log_mags, target);
    Ok(Complex64::from_polar(log_mag.exp(), phase))
}

impl CsiPair {
    pub fn center_value(&self, window: SubcarrierWindow) -> Result<Complex64> {
        interpolate_center_subcarrier(&self.h_squared, window)
    }
}

/// Removes 2 pi jumps between consecutive phases.
pub fn unwrap(phases: impl IntoIterator<Item = f64>) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    let mut out: Vec<f64> = Vec::new();
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for p in phases {
        if let Some(q) = prev {
            let jump = p - q;
            if jump > PI {
                offset -= TAU * ((jump + PI) / TAU).floor();
            } else if jump < -PI {
                offset += TAU * ((-jump + PI) / TAU).floor();
            }
        }
        prev = Some(p);
        out.push(p + offset);
    }
    out
}

fn fit_line(xs: &[f64], ys: &[f64], at: f64) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (sxy, sxx) = xs
        .iter()
        .zip(ys)
        .fold((0.0, 0.0), |(sxy, sxx), (x, y)| {
            (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
        });
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    my + slope * (at - mx)
}
