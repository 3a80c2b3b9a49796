use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use csisim_core::datastore::{read_dataset, resolve_manifest, write_dataset, ExperimentRecord};
use csisim_core::estimator::compare_profiles;
use csisim_core::scenario::{
    aggregate, estimate, preset, preset_names, simulate, AggregateSummary, EstimatorSettings,
    RunSummary, ScenarioConfig,
};
use csisim_core::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::{Cli, Command, GridArgs, ScenarioArgs};

const DEFAULT_OUTPUT: &str = "csisim-out";

pub fn dispatch(cli: Cli) -> Result<()> {
    let output = cli.output;
    match cli.command {
        Command::Presets { show } => presets(show.as_deref()),
        Command::Sim { scenario } => sim(output, &scenario),
        Command::Estimate {
            manifest,
            grid,
            into,
            json,
        } => cmd_estimate(&manifest, &grid, into.as_deref(), json),
        Command::Run {
            scenario,
            reps,
            seed_stride,
            grid,
            keep_datasets,
        } => run(output, &scenario, reps, seed_stride, &grid, keep_datasets),
        Command::Compare { a, b, json } => compare(&a, &b, json),
    }
}

fn presets(show: Option<&str>) -> Result<()> {
    match show {
        Some(name) => {
            let cfg = preset(name)
                .ok_or_else(|| Error::invalid("preset", format!("unknown preset `{name}`")))?;
            print!("{}", cfg.to_toml()?);
        }
        None => {
            for name in preset_names() {
                println!("{name}");
            }
        }
    }
    Ok(())
}

/// A config argument is a file if it exists or looks like a path, otherwise
/// a preset name.
fn load_config(args: &ScenarioArgs) -> Result<ScenarioConfig> {
    let arg = &args.config;
    let path = Path::new(arg);
    let mut cfg = if path.exists() || arg.contains(['/', '\\']) || arg.ends_with(".toml") {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ScenarioConfig::from_toml(&text)?
    } else {
        preset(arg).ok_or_else(|| {
            Error::invalid(
                "config",
                format!("`{arg}` is neither a config file nor a preset ({})", preset_names().join(", ")),
            )
        })?
    };
    if let Some(seed) = args.seed {
        cfg.rng_seed = seed;
    }
    if args.noiseless {
        cfg = cfg.noiseless();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output_root(cli_output: Option<PathBuf>, cfg: &ScenarioConfig) -> PathBuf {
    cli_output
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
}

fn settings(base: EstimatorSettings, grid: &GridArgs) -> EstimatorSettings {
    let mut s = base;
    if let Some(step) = grid.grid_step {
        s.grid_step_deg = step;
    }
    if grid.full_polar {
        s.polar_fixed_deg = None;
    }
    if grid.polar_fixed.is_some() {
        s.polar_fixed_deg = grid.polar_fixed;
    }
    if let Some(st) = grid.steering {
        s.steering = st.into();
    }
    s
}

fn sim(output: Option<PathBuf>, args: &ScenarioArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let dir = output_root(output, &cfg).join(format!("{}-s{}", cfg.name, cfg.rng_seed));
    let record = simulate(&cfg)?;
    let manifest = write_dataset(&record, &dir)?;
    log::info!(
        "{} odometry samples, {} forward / {} backward packets",
        record.odometry_i.len(),
        record.packets_i.len(),
        record.packets_j.len()
    );
    println!("{}", manifest.display());
    Ok(())
}

fn cmd_estimate(manifest: &Path, grid: &GridArgs, into: Option<&Path>, json: bool) -> Result<()> {
    let manifest = resolve_manifest(manifest);
    let mut record = read_dataset(&manifest)?;
    let s = settings(record.config.estimator, grid);
    record.config.estimator = s;
    record.config.validate()?;
    let est = estimate(&record, &s)?;
    record.profile = Some(est.profile);
    record.summary = Some(est.summary.clone());

    let dir = match into {
        Some(d) => d.to_path_buf(),
        None => manifest
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    let written = write_dataset(&record, &dir)?;
    log::info!("wrote {}", written.display());
    if json {
        println!("{}", to_json(&est.summary)?);
    } else {
        print!("{}", format_summary(&est.summary));
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Invariant(e.to_string()))
}

fn format_summary(s: &RunSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario        {} (seed {})", s.scenario, s.seed);
    let _ = writeln!(out, "ground truth    {:.3} deg", s.ground_truth_azimuth_deg);
    let _ = writeln!(
        out,
        "estimate        azimuth {:.1} deg, polar {:.1} deg",
        s.estimated_azimuth_deg, s.estimated_polar_deg
    );
    let _ = writeln!(out, "azimuth error   {:.3} deg", s.azimuth_error_deg);
    let _ = writeln!(out, "confidence      {:.3e}", s.confidence);
    let _ = writeln!(
        out,
        "pairs           {} ({} discarded)",
        s.pair_count, s.discard_count
    );
    let peaks: Vec<String> = s
        .dominant_peaks
        .iter()
        .map(|p| format!("{:.1}/{:.1}", p.azimuth_deg, p.polar_deg))
        .collect();
    let _ = writeln!(out, "dominant peaks  {}", peaks.join(", "));
    for w in &s.warnings {
        let _ = writeln!(out, "warning         {w}");
    }
    let _ = writeln!(out, "runtime         {:.2} s", s.runtime_s);
    out
}

#[derive(Serialize)]
struct RunRow<'a> {
    rep: usize,
    seed: u64,
    scenario: &'a str,
    ground_truth_azimuth_deg: f64,
    estimated_azimuth_deg: f64,
    estimated_polar_deg: f64,
    azimuth_error_deg: f64,
    confidence: f64,
    pair_count: usize,
    discard_count: usize,
    runtime_s: f64,
}

fn run_one(cfg: &ScenarioConfig, s: &EstimatorSettings) -> Result<(RunSummary, ExperimentRecord)> {
    let mut record = simulate(cfg)?;
    let est = estimate(&record, s)?;
    record.profile = Some(est.profile);
    record.summary = Some(est.summary.clone());
    Ok((est.summary, record))
}

fn run(
    output: Option<PathBuf>,
    args: &ScenarioArgs,
    reps: usize,
    stride: u64,
    grid: &GridArgs,
    keep: bool,
) -> Result<()> {
    if reps == 0 {
        return Err(Error::invalid("reps", "must be at least 1"));
    }
    let mut cfg = load_config(args)?;
    let s = settings(cfg.estimator, grid);
    cfg.estimator = s;
    cfg.validate()?;
    let dir = output_root(output, &cfg).join(format!("{}-run-s{}", cfg.name, cfg.rng_seed));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let seeds: Vec<u64> = (0..reps as u64)
        .map(|k| cfg.rng_seed.wrapping_add(k.wrapping_mul(stride)))
        .collect();
    let results: Vec<RunSummary> = seeds
        .par_iter()
        .enumerate()
        .map(|(k, &seed)| {
            let rep_cfg = ScenarioConfig {
                rng_seed: seed,
                ..cfg.clone()
            };
            let (summary, record) = run_one(&rep_cfg, &s).inspect_err(|e| {
                log::error!("repetition {k} (seed {seed}) failed: {e}");
            })?;
            if keep {
                write_dataset(&record, &dir.join(format!("rep-{k:03}")))?;
            }
            log::info!(
                "rep {k}: seed {seed}, error {:.3} deg",
                summary.azimuth_error_deg
            );
            Ok(summary)
        })
        .collect::<Result<_>>()?;

    let agg = aggregate(&results).expect("reps >= 1");
    write_runs_csv(&dir.join("runs.csv"), &results)?;
    let table = format_table(&results, &agg);
    let path = dir.join("aggregate.txt");
    fs::write(&path, &table).map_err(|e| Error::io(&path, e))?;
    let path = dir.join("aggregate.json");
    fs::write(&path, to_json(&agg)? + "\n").map_err(|e| Error::io(&path, e))?;
    print!("{table}");
    Ok(())
}

fn write_runs_csv(path: &Path, runs: &[RunSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    for (rep, r) in runs.iter().enumerate() {
        w.serialize(RunRow {
            rep,
            seed: r.seed,
            scenario: &r.scenario,
            ground_truth_azimuth_deg: r.ground_truth_azimuth_deg,
            estimated_azimuth_deg: r.estimated_azimuth_deg,
            estimated_polar_deg: r.estimated_polar_deg,
            azimuth_error_deg: r.azimuth_error_deg,
            confidence: r.confidence,
            pair_count: r.pair_count,
            discard_count: r.discard_count,
            runtime_s: r.runtime_s,
        })
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn format_table(runs: &[RunSummary], agg: &AggregateSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4} {:>20} {:>10} {:>10} {:>10} {:>10} {:>6} {:>8} {:>9}",
        "rep", "seed", "truth", "azimuth", "polar", "error", "pairs", "discard", "runtime_s"
    );
    for (k, r) in runs.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>4} {:>20} {:>10.3} {:>10.1} {:>10.1} {:>10.3} {:>6} {:>8} {:>9.2}",
            k,
            r.seed,
            r.ground_truth_azimuth_deg,
            r.estimated_azimuth_deg,
            r.estimated_polar_deg,
            r.azimuth_error_deg,
            r.pair_count,
            r.discard_count,
            r.runtime_s
        );
    }
    let _ = writeln!(
        out,
        "{}: {} reps, azimuth error mean {:.3} deg, std {:.3} deg, max {:.3} deg",
        agg.scenario,
        agg.repetitions,
        agg.mean_azimuth_error_deg,
        agg.std_azimuth_error_deg,
        agg.max_azimuth_error_deg
    );
    out
}

fn compare(a: &Path, b: &Path, json: bool) -> Result<()> {
    let load = |p: &Path| -> Result<ExperimentRecord> {
        let rec = read_dataset(p)?;
        if rec.profile.is_none() {
            return Err(Error::invalid(
                "profile",
                format!("{} has no profile; run `csisim estimate` first", p.display()),
            ));
        }
        Ok(rec)
    };
    let ra = load(a)?;
    let rb = load(b)?;
    let pa = ra.profile.as_ref().expect("checked");
    let pb = rb.profile.as_ref().expect("checked");
    let d = compare_profiles(pa, pb)?;
    if json {
        println!("{}", to_json(&d)?);
    } else {
        println!("a                  {} ({})", ra.config.name, a.display());
        println!("b                  {} ({})", rb.config.name, b.display());
        println!(
            "peak a             azimuth {:.1} deg, polar {:.1} deg",
            d.peak_a.azimuth_deg, d.peak_a.polar_deg
        );
        println!(
            "peak b             azimuth {:.1} deg, polar {:.1} deg",
            d.peak_b.azimuth_deg, d.peak_b.polar_deg
        );
        println!("peak displacement  {} grid steps", d.peak_displacement_steps);
        println!("max abs diff       {:.6}", d.max_abs_diff);
        println!("mean abs diff      {:.6}", d.mean_abs_diff);
    }
    Ok(())
}
