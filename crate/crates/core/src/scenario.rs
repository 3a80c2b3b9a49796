//! Scenario configuration, presets and the end-to-end simulate/estimate
//! pipeline shared by the CLI, the tests and the benchmarks.

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{CarrierConfig, CfoModel, NoiseConfig};
use crate::datastore::ExperimentRecord;
use crate::error::{Error, Result};
use crate::estimator::{
    bartlett_profile, AngleGrid, AoaProfile, EstimatorConfig, GridPeak, SteeringPower,
    DOMINANT_PEAK_SEPARATION_DEG, DOMINANT_PEAK_THRESHOLD,
};
use crate::exchange::{
    pair_packets, run_exchange, ExchangeParams, PairingStats, SubcarrierWindow, DEFAULT_ID_I,
    DEFAULT_ID_J,
};
use crate::trajectory::{
    add_position_noise, centroid, generate_trajectory, ground_truth_bearing, to_start_frame, Pose,
    TrajectorySpec,
};

/// Separation of the static node in the mobile node's start frame.
pub const PAPER_TX_OFFSET: [f64; 2] = [3.858, 0.929];
pub const PAPER_RADIUS_M: f64 = 0.3;
pub const PAPER_DURATION_S: f64 = 10.0;
pub const PAPER_RATE_HZ: f64 = 100.0;
pub const STATIONARY_DURATIONS_S: [u32; 5] = [10, 30, 60, 120, 300];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    /// MAC-style identifier, `aa:bb:cc:dd:ee:ff`.
    pub id: String,
    #[serde(default)]
    pub odometry_noise_std_m: f64,
    pub trajectory: TrajectorySpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSettings {
    pub grid_step_deg: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polar_fixed_deg: Option<f64>,
    #[serde(default)]
    pub steering: SteeringPower,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        Self {
            grid_step_deg: 1.0,
            polar_fixed_deg: None,
            steering: SteeringPower::Squared,
        }
    }
}

impl EstimatorSettings {
    pub fn grid(&self) -> Result<AngleGrid> {
        let grid = AngleGrid::full(self.grid_step_deg)?;
        match self.polar_fixed_deg {
            Some(p) => grid.with_fixed_polar(p),
            None => Ok(grid),
        }
    }
}

/// Everything needed to reproduce one experiment. Node i is the mobile node
/// whose motion forms the array; node j is the peer it exchanges packets with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub rng_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Probability that a backward reply is lost.
    #[serde(default)]
    pub loss_rate: f64,
    pub carrier: CarrierConfig,
    pub cfo: CfoModel,
    pub noise: NoiseConfig,
    pub node_i: NodeConfig,
    pub node_j: NodeConfig,
    #[serde(default)]
    pub estimator: EstimatorSettings,
}

fn scoped(prefix: &str, err: Error) -> Error {
    match err {
        Error::InvalidParameter { field, reason } => Error::InvalidParameter {
            field: format!("{prefix}.{field}"),
            reason,
        },
        other => other,
    }
}

fn is_mac(id: &str) -> bool {
    let parts: Vec<&str> = id.split(':').collect();
    id.len() == 17
        && parts.len() == 6
        && parts
            .iter()
            .all(|p| p.len() == 2 && p.chars().all(|c| c.is_ascii_hexdigit()))
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::invalid("name", "must not be empty"));
        }
        if !(0.0..1.0).contains(&self.loss_rate) {
            return Err(Error::invalid("loss_rate", "must lie in [0, 1)"));
        }
        self.carrier.validate()?;
        self.cfo.validate()?;
        self.noise.validate()?;
        for (label, node) in [("node_i", &self.node_i), ("node_j", &self.node_j)] {
            if !is_mac(&node.id) {
                return Err(Error::invalid(
                    format!("{label}.id"),
                    format!("`{}` is not of the form aa:bb:cc:dd:ee:ff", node.id),
                ));
            }
            if !(node.odometry_noise_std_m.is_finite() && node.odometry_noise_std_m >= 0.0) {
                return Err(Error::invalid(
                    format!("{label}.odometry_noise_std_m"),
                    "must be >= 0",
                ));
            }
            node.trajectory
                .validate()
                .map_err(|e| scoped(label, e))?;
        }
        if self.node_i.id == self.node_j.id {
            return Err(Error::invalid("node_j.id", "must differ from node_i.id"));
        }
        let (a, b) = (&self.node_i.trajectory, &self.node_j.trajectory);
        if a.duration_s != b.duration_s || a.sample_rate_hz != b.sample_rate_hz {
            return Err(Error::invalid(
                "node_j.trajectory",
                "duration_s and sample_rate_hz must match node_i",
            ));
        }
        self.estimator.grid().map_err(|e| scoped("estimator", e))?;
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            Error::invalid("config", e.to_string().trim_end().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Invariant(format!("config serialization: {e}")))
    }

    /// Same scenario with STO, skew and WGN switched off (CFO kept, since it
    /// cancels).
    pub fn noiseless(mut self) -> Self {
        self.noise = NoiseConfig {
            node_bias_i: self.noise.node_bias_i,
            node_bias_j: self.noise.node_bias_j,
            ..NoiseConfig::disabled()
        };
        self
    }
}

fn paper_base(name: &str, node_i_traj: TrajectorySpec, duration_s: f64) -> ScenarioConfig {
    let tx = Pose::new(0, PAPER_TX_OFFSET[0], PAPER_TX_OFFSET[1], 0.0, 0.0);
    ScenarioConfig {
        name: name.to_string(),
        rng_seed: 1,
        output_dir: None,
        loss_rate: 0.0,
        carrier: CarrierConfig::channel_108(),
        cfo: CfoModel::paper(),
        noise: NoiseConfig::paper(),
        node_i: NodeConfig {
            id: DEFAULT_ID_I.into(),
            odometry_noise_std_m: 0.0,
            trajectory: node_i_traj,
        },
        node_j: NodeConfig {
            id: DEFAULT_ID_J.into(),
            odometry_noise_std_m: 0.0,
            trajectory: TrajectorySpec::stationary(tx, duration_s, PAPER_RATE_HZ),
        },
        estimator: EstimatorSettings::default(),
    }
}

pub fn preset_names() -> Vec<String> {
    let mut names = vec!["paper-circular".to_string(), "paper-linear".to_string()];
    names.extend(
        STATIONARY_DURATIONS_S
            .iter()
            .map(|d| format!("paper-stationary-{d}s")),
    );
    names
}

/// Built-in scenarios reproducing the two-robot experiments: channel 108,
/// 100 Hz, 10 s trajectories (0.3 m radius circle or 2 pi 0.3 m line), the
/// static peer at (3.858, 0.929) m, full CFO/STO/skew/WGN noise.
pub fn preset(name: &str) -> Option<ScenarioConfig> {
    let origin = Pose::default();
    match name {
        "paper-circular" => Some(paper_base(
            name,
            TrajectorySpec::circular(origin, PAPER_RADIUS_M, PAPER_DURATION_S, PAPER_RATE_HZ),
            PAPER_DURATION_S,
        )),
        "paper-linear" => {
            let mut cfg = paper_base(
                name,
                TrajectorySpec::linear(
                    origin,
                    TAU * PAPER_RADIUS_M,
                    PAPER_DURATION_S,
                    PAPER_RATE_HZ,
                ),
                PAPER_DURATION_S,
            );
            cfg.estimator.polar_fixed_deg = Some(90.0);
            Some(cfg)
        }
        _ => {
            let secs: u32 = name
                .strip_prefix("paper-stationary-")?
                .strip_suffix('s')?
                .parse()
                .ok()?;
            if !STATIONARY_DURATIONS_S.contains(&secs) {
                return None;
            }
            let d = secs as f64;
            Some(paper_base(
                name,
                TrajectorySpec::stationary(origin, d, PAPER_RATE_HZ),
                d,
            ))
        }
    }
}

/// Generates trajectories, odometry and the packet exchange for `config`.
///
/// Exchange and per-node odometry noise draw from separate ChaCha streams of
/// the same seed, so switching odometry noise on does not change the CSI.
pub fn simulate(config: &ScenarioConfig) -> Result<ExperimentRecord> {
    config.validate()?;
    let traj_i = generate_trajectory(&config.node_i.trajectory)?;
    let traj_j = generate_trajectory(&config.node_j.trajectory)?;

    let mut exchange_rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    exchange_rng.set_stream(0);
    let params = ExchangeParams {
        carrier: &config.carrier,
        cfo: &config.cfo,
        noise: &config.noise,
        loss_rate: config.loss_rate,
        id_i: &config.node_i.id,
        id_j: &config.node_j.id,
    };
    let exchange = run_exchange(&traj_i, &traj_j, &params, &mut exchange_rng)?;

    let mut odometry_i = traj_i;
    let mut odometry_j = traj_j;
    for (stream, node, odom) in [
        (1, &config.node_i, &mut odometry_i),
        (2, &config.node_j, &mut odometry_j),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        rng.set_stream(stream);
        add_position_noise(odom, node.odometry_noise_std_m, &mut rng)?;
    }

    Ok(ExperimentRecord {
        config: config.clone(),
        odometry_i,
        odometry_j,
        packets_i: exchange.packets_i,
        packets_j: exchange.packets_j,
        profile: None,
        summary: None,
    })
}

/// Metrics for one simulate/estimate cycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub seed: u64,
    pub ground_truth_azimuth_deg: f64,
    pub estimated_azimuth_deg: f64,
    pub estimated_polar_deg: f64,
    /// Shortest-arc difference, in [0, 180].
    pub azimuth_error_deg: f64,
    pub confidence: f64,
    #[serde(default)]
    pub peak_ratio: Option<f64>,
    pub pair_count: usize,
    pub discard_count: usize,
    #[serde(default)]
    pub dominant_peaks: Vec<GridPeak>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub runtime_s: f64,
}

impl RunSummary {
    /// Copy with the wall-clock field zeroed, for determinism comparisons.
    pub fn without_runtime(&self) -> Self {
        Self {
            runtime_s: 0.0,
            ..self.clone()
        }
    }
}

/// Shortest-arc distance between two azimuths in degrees.
pub fn azimuth_error_deg(estimate_deg: f64, truth_deg: f64) -> f64 {
    ((estimate_deg - truth_deg + 180.0).rem_euclid(360.0) - 180.0).abs()
}

/// Bearing of node j seen from the centroid of node i's trajectory, in node
/// i's start frame. For a circle this is the circle center; for a line, its
/// midpoint; for a stationary node, its position.
pub fn reference_bearing(odometry_i: &[Pose], odometry_j: &[Pose]) -> Result<f64> {
    let rx = centroid(odometry_i).ok_or_else(|| Error::invalid("odometry_i", "empty"))?;
    let tx = odometry_j
        .first()
        .ok_or_else(|| Error::invalid("odometry_j", "empty"))?;
    ground_truth_bearing(&rx, tx)
}

#[derive(Clone, Debug)]
pub struct Estimate {
    pub profile: AoaProfile,
    pub pairing: PairingStats,
    pub summary: RunSummary,
}

/// Pairs the record's packets, runs Bartlett over node i's odometry (in its
/// start frame, so azimuths are relative to the initial heading) and scores
/// the peak against [`reference_bearing`].
pub fn estimate(record: &ExperimentRecord, settings: &EstimatorSettings) -> Result<Estimate> {
    let started = Instant::now();
    let cfg = &record.config;
    let pairing = pair_packets(&record.packets_i, &record.packets_j, cfg.noise.epsilon_t_ns());
    let grid = settings.grid()?;
    let est_cfg = EstimatorConfig {
        steering: settings.steering,
        window: Some(SubcarrierWindow::for_carrier(&cfg.carrier)),
        ..EstimatorConfig::default()
    };
    let profile = bartlett_profile(
        &pairing.pairs,
        &to_start_frame(&record.odometry_i),
        &grid,
        cfg.carrier.wavelength(),
        &est_cfg,
    )?;

    let truth = reference_bearing(&record.odometry_i, &record.odometry_j)?.to_degrees();
    let summary = RunSummary {
        scenario: cfg.name.clone(),
        seed: cfg.rng_seed,
        ground_truth_azimuth_deg: truth,
        estimated_azimuth_deg: profile.peak.azimuth_deg,
        estimated_polar_deg: profile.peak.polar_deg,
        azimuth_error_deg: azimuth_error_deg(profile.peak.azimuth_deg, truth),
        confidence: profile.confidence,
        peak_ratio: profile.peak_ratio,
        pair_count: pairing.stats.pairs,
        discard_count: pairing.stats.discarded,
        dominant_peaks: profile
            .dominant_peaks(DOMINANT_PEAK_THRESHOLD, DOMINANT_PEAK_SEPARATION_DEG),
        warnings: profile.warnings.iter().map(|w| w.to_string()).collect(),
        runtime_s: started.elapsed().as_secs_f64(),
    };
    Ok(Estimate {
        profile,
        pairing: pairing.stats,
        summary,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateSummary {
    pub scenario: String,
    pub repetitions: usize,
    pub mean_azimuth_error_deg: f64,
    /// Population standard deviation.
    pub std_azimuth_error_deg: f64,
    pub max_azimuth_error_deg: f64,
    pub mean_confidence: f64,
}

pub fn aggregate(runs: &[RunSummary]) -> Option<AggregateSummary> {
    let first = runs.first()?;
    let n = runs.len() as f64;
    let mean = runs.iter().map(|r| r.azimuth_error_deg).sum::<f64>() / n;
    let var = runs
        .iter()
        .map(|r| (r.azimuth_error_deg - mean).powi(2))
        .sum::<f64>()
        / n;
    Some(AggregateSummary {
        scenario: first.scenario.clone(),
        repetitions: runs.len(),
        mean_azimuth_error_deg: mean,
        std_azimuth_error_deg: var.sqrt(),
        max_azimuth_error_deg: runs.iter().map(|r| r.azimuth_error_deg).fold(0.0, f64::max),
        mean_confidence: runs.iter().map(|r| r.confidence).sum::<f64>() / n,
    })
}
