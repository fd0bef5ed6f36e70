//! CSV and manifest writers.
//!
//! Floats are written with 17 significant digits so every value parses back
//! to the same `f64`.

use std::fmt::Write as _;

use crate::experiments::{CdfPoint, HeatmapCell};

pub const CDF_HEADER: &str = "rate_bps_hz,cum_fraction";
pub const HEATMAP_HEADER: &str = "x_m,y_m,z_m,p_los_bu,p_los_ru,r1,r2,r3,r_avg_ris,r_avg_free,throughput_ris_mbps,throughput_free_mbps";
/// Heatmap columns plus the approximation flag.
pub const SINGLE_HEADER: &str = "x_m,y_m,z_m,p_los_bu,p_los_ru,r1,r2,r3,r_avg_ris,r_avg_free,throughput_ris_mbps,throughput_free_mbps,degenerate";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn row(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt_f64(v))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn cdf_csv(points: &[CdfPoint]) -> String {
    let mut out = String::from(CDF_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&row(&[p.value, p.fraction]));
        out.push('\n');
    }
    out
}

fn cell_values(c: &HeatmapCell) -> [f64; 12] {
    [
        c.position.x,
        c.position.y,
        c.position.z,
        c.p_los_bu,
        c.p_los_ru,
        c.r1,
        c.r2,
        c.r3,
        c.r_avg_ris,
        c.r_avg_free,
        c.throughput_ris / 1e6,
        c.throughput_free / 1e6,
    ]
}

pub fn heatmap_csv(cells: &[HeatmapCell]) -> String {
    let mut out = String::from(HEATMAP_HEADER);
    out.push('\n');
    for c in cells {
        out.push_str(&row(&cell_values(c)));
        out.push('\n');
    }
    out
}

pub fn single_csv(cell: &HeatmapCell) -> String {
    format!(
        "{SINGLE_HEADER}\n{},{}\n",
        row(&cell_values(cell)),
        u8::from(cell.degenerate)
    )
}

/// `key = value` lines; `config.*` keys echo the resolved configuration.
#[derive(Debug, Default, Clone)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn echo_toml(&mut self, prefix: &str, table: &toml::Table) {
        for (k, v) in table {
            let key = format!("{prefix}.{k}");
            match v {
                toml::Value::Table(t) => self.echo_toml(&key, t),
                other => self.push(key, other),
            }
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# ris3d run manifest\n");
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.trim().to_string(), v.to_string()))
            .collect();
        Self { entries }
    }
}
