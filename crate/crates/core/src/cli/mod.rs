//! Command-line driver: configuration, experiment dispatch and output files.

pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::{parse_config, ExperimentKind, RisMode, RunConfig};
use output::Manifest;

use crate::error::{Error, Result};
use crate::experiments::{run_cdf, run_heatmap, HeatmapCell};
use crate::linkrate::evaluate_link;

pub const MANIFEST_FILE: &str = "manifest.txt";
/// Environment variable consulted for the output directory when neither
/// `--out` nor `output_dir` is given.
pub const OUT_DIR_ENV: &str = "RIS3D_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "ris3d-out";

pub fn read_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

fn write(dir: &Path, name: &str, body: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Runs the configured experiment, writes its CSV files and a manifest into
/// `out_dir`, and returns the written paths (manifest last).
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let start = Instant::now();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    match config.experiment {
        ExperimentKind::Cdf => {
            let variants: &[(bool, &str)] = match config.ris {
                RisMode::On => &[(true, "cdf.csv")],
                RisMode::Off => &[(false, "cdf.csv")],
                RisMode::Both => &[(true, "cdf.csv"), (false, "cdf_free.csv")],
            };
            for &(ris, name) in variants {
                let result = run_cdf(&config.cdf_spec(ris)?)?;
                write(out_dir, name, &output::cdf_csv(&result.cdf), &mut written)?;
            }
        }
        ExperimentKind::Heatmap => {
            let result = run_heatmap(&config.heatmap_spec()?)?;
            write(
                out_dir,
                "heatmap.csv",
                &output::heatmap_csv(&result.cells),
                &mut written,
            )?;
        }
        ExperimentKind::Single => {
            let p = config.single_position();
            let on = evaluate_link(&config.scenario.to_scenario(true)?, p)?;
            let off = evaluate_link(&config.scenario.to_scenario(false)?, p)?;
            let cell = HeatmapCell::from_reports(&on, &off);
            write(
                out_dir,
                "single.csv",
                &output::single_csv(&cell),
                &mut written,
            )?;
        }
    }

    let mut m = Manifest::default();
    m.push("tool", env!("CARGO_PKG_NAME"));
    m.push("version", env!("CARGO_PKG_VERSION"));
    m.push("experiment", config.experiment);
    m.push("seed", config.seed);
    m.push("ris", config.ris);
    m.push("environment", &config.scenario.environment);
    m.push("carrier_hz", config.scenario.carrier_hz);
    let files: Vec<String> = written
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    m.push("files", files.join(","));
    m.push(
        "wall_time_s",
        format!("{:.3}", start.elapsed().as_secs_f64()),
    );
    let table: toml::Table = toml::from_str(&config.to_toml()).expect("config echo parses");
    m.echo_toml("config", &table);
    write(out_dir, MANIFEST_FILE, &m.render(), &mut written)?;
    Ok(written)
}
