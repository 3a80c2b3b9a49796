//! On-disk dataset layout.
//!
//! A dataset directory holds `manifest.json` plus the files it lists:
//!
//! | role              | file               | format                                   |
//! |-------------------|--------------------|------------------------------------------|
//! | `config`          | `config.toml`      | [`ScenarioConfig`]                       |
//! | `odometry_i/j`    | `odometry_*.csv`   | `t_ns,x,y,z,yaw`                         |
//! | `packets_i/j`     | `packets_*.jsonl`  | one [`CsiPacket`] per line               |
//! | `profile`         | `profile.csv`      | azimuth rows, polar columns              |
//! | `profile_summary` | `profile.json`     | [`ProfileSummary`]                       |
//! | `heatmap`         | `profile.pgm`      | binary greymap, min-max normalized       |
//!
//! Every listed file carries a SHA-256 checksum that is verified on read.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimator::{AngleGrid, AoaProfile, EstimatorWarning, GridPeak};
use crate::exchange::{CsiPacket, Direction};
use crate::scenario::{RunSummary, ScenarioConfig};
use crate::trajectory::{check_pose_stream, Pose};

pub const SCHEMA_VERSION: &str = "1.0";
pub const SCHEMA_MAJOR: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

/// Everything one simulate (and optionally estimate) run produces.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub config: ScenarioConfig,
    /// Odometry of the mobile node as reported (possibly noisy).
    pub odometry_i: Vec<Pose>,
    pub odometry_j: Vec<Pose>,
    /// Forward packets captured at node j, sent by node i.
    pub packets_i: Vec<CsiPacket>,
    /// Backward replies captured at node i, sent by node j.
    pub packets_j: Vec<CsiPacket>,
    pub profile: Option<AoaProfile>,
    pub summary: Option<RunSummary>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    /// Data rows, excluding headers.
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: String,
    pub name: String,
    pub generator: String,
    pub files: BTreeMap<String, FileEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<RunSummary>,
}

/// Scalar side of a profile, stored next to the magnitude matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub peak_azimuth_deg: f64,
    pub peak_polar_deg: f64,
    pub confidence: f64,
    #[serde(default)]
    pub peak_ratio: Option<f64>,
    pub n_samples: usize,
    pub total_displacement_m: f64,
    pub max_step_m: f64,
    pub grid: AngleGrid,
    pub peaks: Vec<GridPeak>,
    #[serde(default)]
    pub warnings: Vec<EstimatorWarning>,
}

impl ProfileSummary {
    pub fn of(p: &AoaProfile) -> Self {
        Self {
            peak_azimuth_deg: p.peak.azimuth_deg,
            peak_polar_deg: p.peak.polar_deg,
            confidence: p.confidence,
            peak_ratio: p.peak_ratio,
            n_samples: p.n_samples,
            total_displacement_m: p.total_displacement_m,
            max_step_m: p.max_step_m,
            grid: p.grid,
            peaks: p.peaks.clone(),
            warnings: p.warnings.clone(),
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Invariant(format!("json serialization: {e}"))
}

pub fn odometry_to_csv(poses: &[Pose]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if poses.is_empty() {
        w.write_record(["t_ns", "x", "y", "z", "yaw"])
            .map_err(|e| Error::Invariant(e.to_string()))?;
    }
    for p in poses {
        w.serialize(p).map_err(|e| Error::Invariant(e.to_string()))?;
    }
    w.into_inner()
        .map_err(|e| Error::Invariant(e.to_string()))
}

pub fn packets_to_jsonl(packets: &[CsiPacket]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for p in packets {
        serde_json::to_writer(&mut out, p).map_err(json_err)?;
        out.push(b'\n');
    }
    Ok(out)
}

/// Matrix CSV readable by gnuplot's `nonuniform matrix` mode: the corner
/// cell holds the column count, the first row the polar angles and the first
/// column the azimuth angles.
pub fn profile_to_csv(p: &AoaProfile) -> String {
    let g = &p.grid;
    let mut s = String::new();
    let _ = write!(s, "{}", g.polar.count);
    for v in g.polar.values_deg() {
        let _ = write!(s, ",{v:?}");
    }
    s.push('\n');
    for az in 0..g.azimuth.count {
        let _ = write!(s, "{:?}", g.azimuth.value_deg(az));
        for pol in 0..g.polar.count {
            let _ = write!(s, ",{:?}", p.at(az, pol));
        }
        s.push('\n');
    }
    s
}

/// Binary PGM, azimuth along x and polar along y.
pub fn profile_to_pgm(p: &AoaProfile) -> Vec<u8> {
    let g = &p.grid;
    let (lo, hi) = p
        .magnitudes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &m| (l.min(m), h.max(m)));
    let span = hi - lo;
    let mut out = format!("P5\n{} {}\n255\n", g.azimuth.count, g.polar.count).into_bytes();
    for pol in 0..g.polar.count {
        for az in 0..g.azimuth.count {
            let v = if span > 0.0 {
                ((p.at(az, pol) - lo) / span * 255.0).round() as u8
            } else {
                0
            };
            out.push(v);
        }
    }
    out
}

/// Writes `record` into `dir` (created if needed) and returns the manifest
/// path. Data files are written before the manifest.
pub fn write_dataset(record: &ExperimentRecord, dir: &Path) -> Result<PathBuf> {
    record.config.validate()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut files = BTreeMap::new();
    let mut put = |role: &str, name: &str, bytes: &[u8], rows: usize| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        files.insert(
            role.to_string(),
            FileEntry {
                path: name.to_string(),
                sha256: sha256_hex(bytes),
                rows,
            },
        );
        Ok(())
    };

    put("config", "config.toml", record.config.to_toml()?.as_bytes(), 1)?;
    put(
        "odometry_i",
        "odometry_i.csv",
        &odometry_to_csv(&record.odometry_i)?,
        record.odometry_i.len(),
    )?;
    put(
        "odometry_j",
        "odometry_j.csv",
        &odometry_to_csv(&record.odometry_j)?,
        record.odometry_j.len(),
    )?;
    put(
        "packets_i",
        "packets_i.jsonl",
        &packets_to_jsonl(&record.packets_i)?,
        record.packets_i.len(),
    )?;
    put(
        "packets_j",
        "packets_j.jsonl",
        &packets_to_jsonl(&record.packets_j)?,
        record.packets_j.len(),
    )?;
    if let Some(p) = &record.profile {
        put(
            "profile",
            "profile.csv",
            profile_to_csv(p).as_bytes(),
            p.grid.azimuth.count,
        )?;
        let summary = serde_json::to_vec_pretty(&ProfileSummary::of(p)).map_err(json_err)?;
        put("profile_summary", "profile.json", &summary, 1)?;
        put("heatmap", "profile.pgm", &profile_to_pgm(p), p.grid.polar.count)?;
    }

    let manifest = Manifest {
        schema_version: SCHEMA_VERSION.to_string(),
        name: record.config.name.clone(),
        generator: concat!("csisim ", env!("CARGO_PKG_VERSION")).to_string(),
        files,
        summary: record.summary.clone(),
    };
    let path = dir.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest).map_err(json_err)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Accepts either a manifest path or the dataset directory containing it.
pub fn resolve_manifest(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    }
}

fn check_schema(path: &Path, version: &str) -> Result<()> {
    let major = version.split('.').next().and_then(|m| m.parse::<u32>().ok());
    match major {
        Some(SCHEMA_MAJOR) => Ok(()),
        _ => Err(Error::SchemaVersion {
            path: path.to_path_buf(),
            found: version.to_string(),
            supported: SCHEMA_MAJOR,
        }),
    }
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let path = resolve_manifest(path);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::format(&path, e.line(), e))?;
    let version = value
        .get("schema_version")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::format(&path, 1, "missing string field `schema_version`"))?;
    check_schema(&path, version)?;
    serde_json::from_value(value).map_err(|e| Error::format(&path, 1, e))
}

struct Loaded {
    path: PathBuf,
    bytes: Vec<u8>,
}

fn load(dir: &Path, manifest: &Manifest, role: &str) -> Result<Option<Loaded>> {
    let Some(entry) = manifest.files.get(role) else {
        return Ok(None);
    };
    let name = Path::new(&entry.path);
    if name.components().count() != 1 || name.is_absolute() {
        return Err(Error::format(
            dir.join(MANIFEST_FILE),
            1,
            format!("file `{}` must be a plain name inside the dataset", entry.path),
        ));
    }
    let path = dir.join(name);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let actual = sha256_hex(&bytes);
    if !actual.eq_ignore_ascii_case(&entry.sha256) {
        return Err(Error::Checksum {
            path,
            expected: entry.sha256.clone(),
            actual,
        });
    }
    Ok(Some(Loaded { path, bytes }))
}

fn require(dir: &Path, manifest: &Manifest, role: &str) -> Result<Loaded> {
    load(dir, manifest, role)?.ok_or_else(|| {
        Error::format(
            dir.join(MANIFEST_FILE),
            1,
            format!("manifest lists no `{role}` file"),
        )
    })
}

pub fn parse_odometry(path: &Path, bytes: &[u8]) -> Result<Vec<Pose>> {
    let mut r = csv::Reader::from_reader(bytes);
    let headers = r.headers().map_err(|e| Error::format(path, 1, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["t_ns", "x", "y", "z", "yaw"] {
        return Err(Error::format(
            path,
            1,
            "header must be `t_ns,x,y,z,yaw`",
        ));
    }
    let mut poses = Vec::new();
    for (i, row) in r.deserialize::<Pose>().enumerate() {
        poses.push(row.map_err(|e| Error::format(path, i + 2, e))?);
    }
    check_pose_stream(&poses).map_err(|(i, reason)| Error::format(path, i + 2, reason))?;
    Ok(poses)
}

pub fn parse_packets(
    path: &Path,
    bytes: &[u8],
    dir: Direction,
    src_id: &str,
    subcarriers: usize,
) -> Result<Vec<CsiPacket>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::format(path, 1, e))?;
    let mut out: Vec<CsiPacket> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let p: CsiPacket = serde_json::from_str(line).map_err(|e| Error::format(path, row, e))?;
        if p.dir != dir {
            return Err(Error::format(path, row, format!("expected dir `{}`", dir.as_str())));
        }
        if p.src_id != src_id {
            return Err(Error::format(
                path,
                row,
                format!("src_id `{}` does not match configured `{src_id}`", p.src_id),
            ));
        }
        if p.csi.len() != subcarriers {
            return Err(Error::format(
                path,
                row,
                format!("{} CSI values, expected {subcarriers}", p.csi.len()),
            ));
        }
        if p.csi.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::format(path, row, "non-finite CSI value"));
        }
        if let Some(prev) = out.last() {
            if p.frame <= prev.frame || p.t_ns <= prev.t_ns {
                return Err(Error::format(
                    path,
                    row,
                    "frames and timestamps must be strictly increasing",
                ));
            }
        }
        out.push(p);
    }
    Ok(out)
}

fn parse_profile(
    csv_path: &Path,
    csv_bytes: &[u8],
    json_path: &Path,
    json_bytes: &[u8],
) -> Result<AoaProfile> {
    let summary: ProfileSummary =
        serde_json::from_slice(json_bytes).map_err(|e| Error::format(json_path, e.line(), e))?;
    let grid = summary.grid;
    grid.validate()?;
    let text = std::str::from_utf8(csv_bytes).map_err(|e| Error::format(csv_path, 1, e))?;
    let mut lines = text.lines();
    let parse = |row: usize, cell: &str| -> Result<f64> {
        cell.trim()
            .parse::<f64>()
            .map_err(|e| Error::format(csv_path, row, format!("`{cell}`: {e}")))
    };
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;

    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::format(csv_path, 1, "empty file"))?
        .split(',')
        .collect();
    if header.len() != grid.polar.count + 1 || parse(1, header[0])? != grid.polar.count as f64 {
        return Err(Error::format(csv_path, 1, "header does not match the profile grid"));
    }
    for (k, cell) in header[1..].iter().enumerate() {
        if !close(parse(1, cell)?, grid.polar.value_deg(k)) {
            return Err(Error::format(csv_path, 1, format!("polar column {k} off grid")));
        }
    }

    let mut mags = Vec::with_capacity(grid.len());
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        let cells: Vec<&str> = line.split(',').collect();
        if rows >= grid.azimuth.count || cells.len() != grid.polar.count + 1 {
            return Err(Error::format(csv_path, row, "row does not match the profile grid"));
        }
        if !close(parse(row, cells[0])?, grid.azimuth.value_deg(rows)) {
            return Err(Error::format(csv_path, row, "azimuth label off grid"));
        }
        for c in &cells[1..] {
            let v = parse(row, c)?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::format(csv_path, row, "magnitudes must be finite and >= 0"));
            }
            mags.push(v);
        }
        rows += 1;
    }
    if rows != grid.azimuth.count {
        return Err(Error::format(
            csv_path,
            rows + 2,
            format!("{rows} azimuth rows, grid has {}", grid.azimuth.count),
        ));
    }
    let mut profile = AoaProfile::from_magnitudes(
        grid,
        mags,
        summary.n_samples,
        summary.total_displacement_m,
        summary.max_step_m,
        summary.peaks.len(),
    )?;
    profile.warnings = summary.warnings;
    Ok(profile)
}

/// Loads and validates a dataset. `path` may be the manifest or its directory.
pub fn read_dataset(path: &Path) -> Result<ExperimentRecord> {
    let manifest_path = resolve_manifest(path);
    let manifest = read_manifest(&manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));

    let cfg_file = require(dir, &manifest, "config")?;
    let cfg_text =
        std::str::from_utf8(&cfg_file.bytes).map_err(|e| Error::format(&cfg_file.path, 1, e))?;
    let config = ScenarioConfig::from_toml(cfg_text)?;

    let odo_i = require(dir, &manifest, "odometry_i")?;
    let odo_j = require(dir, &manifest, "odometry_j")?;
    let pk_i = require(dir, &manifest, "packets_i")?;
    let pk_j = require(dir, &manifest, "packets_j")?;
    let n = config.carrier.subcarrier_count;

    let profile = match (
        load(dir, &manifest, "profile")?,
        load(dir, &manifest, "profile_summary")?,
    ) {
        (Some(c), Some(j)) => Some(parse_profile(&c.path, &c.bytes, &j.path, &j.bytes)?),
        (None, None) => None,
        _ => {
            return Err(Error::format(
                &manifest_path,
                1,
                "`profile` and `profile_summary` must be listed together",
            ))
        }
    };
    load(dir, &manifest, "heatmap")?;

    Ok(ExperimentRecord {
        odometry_i: parse_odometry(&odo_i.path, &odo_i.bytes)?,
        odometry_j: parse_odometry(&odo_j.path, &odo_j.bytes)?,
        packets_i: parse_packets(&pk_i.path, &pk_i.bytes, Direction::Forward, &config.node_i.id, n)?,
        packets_j: parse_packets(&pk_j.path, &pk_j.bytes, Direction::Backward, &config.node_j.id, n)?,
        config,
        profile,
        summary: manifest.summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::NoiseConfig;
    use crate::scenario::{estimate, preset, simulate, EstimatorSettings};
    use proptest::prelude::*;

    fn small(seed: u64, loss: f64, noisy: bool) -> ExperimentRecord {
        let mut cfg = preset("paper-circular").unwrap();
        cfg.rng_seed = seed;
        cfg.loss_rate = loss;
        cfg.node_i.trajectory.duration_s = 0.2;
        cfg.node_j.trajectory.duration_s = 0.2;
        cfg.node_i.odometry_noise_std_m = 0.001;
        if !noisy {
            cfg.noise = NoiseConfig::disabled();
        }
        simulate(&cfg).unwrap()
    }

    #[test]
    fn round_trip_with_profile() {
        let dir = tempfile::tempdir().unwrap();
        let mut rec = small(3, 0.2, true);
        let settings = EstimatorSettings {
            grid_step_deg: 10.0,
            ..Default::default()
        };
        let est = estimate(&rec, &settings).unwrap();
        rec.profile = Some(est.profile);
        rec.summary = Some(est.summary);
        let manifest = write_dataset(&rec, dir.path()).unwrap();
        let back = read_dataset(&manifest).unwrap();
        assert_eq!(back, rec);
        assert_eq!(read_dataset(dir.path()).unwrap(), rec);

        let pgm = fs::read(dir.path().join("profile.pgm")).unwrap();
        assert!(pgm.starts_with(b"P5\n36 19\n255\n"));
        assert_eq!(pgm.len(), b"P5\n36 19\n255\n".len() + 36 * 19);
        assert!(pgm.contains(&255));

        let summary: serde_json::Value =
            serde_json::from_slice(&fs::read(dir.path().join("profile.json")).unwrap()).unwrap();
        for key in [
            "peak_azimuth_deg",
            "peak_polar_deg",
            "confidence",
            "n_samples",
            "total_displacement_m",
        ] {
            assert!(summary.get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn config_bytes_survive_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let rec = small(1, 0.0, false);
        write_dataset(&rec, dir.path()).unwrap();
        let first = fs::read(dir.path().join("config.toml")).unwrap();
        let back = read_dataset(dir.path()).unwrap();
        let other = tempfile::tempdir().unwrap();
        write_dataset(&back, other.path()).unwrap();
        assert_eq!(fs::read(other.path().join("config.toml")).unwrap(), first);
    }

    #[test]
    fn empty_streams_are_valid() {
        let dir = tempfile::tempdir().unwrap();
        let mut rec = small(1, 0.0, false);
        rec.packets_i.clear();
        rec.packets_j.clear();
        let m = write_dataset(&rec, dir.path()).unwrap();
        let manifest = read_manifest(&m).unwrap();
        assert_eq!(manifest.files["packets_i"].rows, 0);
        assert_eq!(fs::read(dir.path().join("packets_j.jsonl")).unwrap(), b"");
        assert_eq!(read_dataset(&m).unwrap(), rec);
    }

    #[test]
    fn checksum_mismatch_detected() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&small(1, 0.0, false), dir.path()).unwrap();
        let path = dir.path().join("odometry_i.csv");
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("99999999999,0,0,0,0\n");
        fs::write(&path, text).unwrap();
        let err = read_dataset(dir.path()).unwrap_err();
        assert!(matches!(err, Error::Checksum { .. }), "{err}");
    }

    fn rewrite(dir: &Path, file: &str, edit: impl Fn(String) -> String) {
        let path = dir.join(file);
        let text = edit(fs::read_to_string(&path).unwrap());
        fs::write(&path, &text).unwrap();
        let mpath = dir.join(MANIFEST_FILE);
        let mut m = read_manifest(&mpath).unwrap();
        let role = m
            .files
            .iter()
            .find(|(_, e)| e.path == file)
            .map(|(r, _)| r.clone())
            .unwrap();
        m.files.get_mut(&role).unwrap().sha256 = sha256_hex(text.as_bytes());
        fs::write(&mpath, serde_json::to_string(&m).unwrap()).unwrap();
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&small(1, 0.0, false), dir.path()).unwrap();
        rewrite(dir.path(), "odometry_i.csv", |t| {
            let mut lines: Vec<String> = t.lines().map(String::from).collect();
            lines[3] = "30000000,abc,0,0,0".into();
            lines.join("\n") + "\n"
        });
        match read_dataset(dir.path()).unwrap_err() {
            Error::Format { row, .. } => assert_eq!(row, 4),
            e => panic!("{e}"),
        }

        let dir = tempfile::tempdir().unwrap();
        write_dataset(&small(1, 0.0, false), dir.path()).unwrap();
        rewrite(dir.path(), "packets_j.jsonl", |t| {
            let mut lines: Vec<String> = t.lines().map(String::from).collect();
            lines[2] = lines[2].replace("\"bwd\"", "\"fwd\"");
            lines.join("\n") + "\n"
        });
        match read_dataset(dir.path()).unwrap_err() {
            Error::Format { row, reason, .. } => {
                assert_eq!(row, 3);
                assert!(reason.contains("bwd"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn out_of_order_timestamps_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&small(1, 0.0, false), dir.path()).unwrap();
        rewrite(dir.path(), "odometry_j.csv", |t| {
            let mut lines: Vec<String> = t.lines().map(String::from).collect();
            lines.swap(2, 3);
            lines.join("\n") + "\n"
        });
        // line 3 now holds the later sample, so line 4 is the first to go backwards
        assert!(matches!(
            read_dataset(dir.path()).unwrap_err(),
            Error::Format { row: 4, .. }
        ));
    }

    #[test]
    fn unknown_major_version_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&small(1, 0.0, false), dir.path()).unwrap();
        let mpath = dir.path().join(MANIFEST_FILE);
        let text = fs::read_to_string(&mpath).unwrap();
        fs::write(&mpath, text.replace("\"1.0\"", "\"1.7\"")).unwrap();
        read_dataset(dir.path()).unwrap();
        fs::write(&mpath, text.replace("\"1.0\"", "\"2.0\"")).unwrap();
        let err = read_dataset(dir.path()).unwrap_err();
        assert!(matches!(err, Error::SchemaVersion { supported: 1, .. }), "{err}");
    }

    #[test]
    fn missing_file_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&small(1, 0.0, false), dir.path()).unwrap();
        fs::remove_file(dir.path().join("packets_i.jsonl")).unwrap();
        let err = read_dataset(dir.path()).unwrap_err();
        assert_eq!(err.kind(), crate::ErrorKind::Io);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn write_read_is_identity(seed in any::<u64>(), loss in 0.0f64..0.5, noisy in any::<bool>()) {
            let dir = tempfile::tempdir().unwrap();
            let rec = small(seed, loss, noisy);
            write_dataset(&rec, dir.path()).unwrap();
            prop_assert_eq!(read_dataset(dir.path()).unwrap(), rec);
        }
    }
}
