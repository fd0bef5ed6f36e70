//! Monte Carlo CDF of the average rate over random UAV positions, and
//! RIS-assisted vs RIS-free rate maps over a ground grid.
//!
//! Positions are generated up front from the seed, then evaluated in
//! parallel; results keep generation order, so the output depends only on
//! the spec.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Position3D;
use crate::linkrate::{evaluate_link, LinkReport, Scenario};

pub const DEFAULT_CDF_SAMPLES: usize = 10_000;
pub const DEFAULT_UAV_ALTITUDE: f64 = 100.0;
pub const DEFAULT_HEATMAP_STEP: f64 = 25.0;

/// Default sampling interval per axis: `[100, 1000]` m at mmWave and
/// `[100, 2000]` m at lower carriers.
pub fn default_range(carrier_hz: f64) -> (f64, f64) {
    if carrier_hz >= 10e9 {
        (100.0, 1000.0)
    } else {
        (100.0, 2000.0)
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} range [{lo}, {hi}] is empty"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfExperimentSpec {
    pub scenario: Scenario,
    pub num_samples: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub z_fixed: f64,
    pub seed: u64,
}

impl CdfExperimentSpec {
    pub fn new(scenario: Scenario, seed: u64) -> Self {
        let range = default_range(scenario.carrier_hz);
        Self {
            scenario,
            num_samples: DEFAULT_CDF_SAMPLES,
            x_range: range,
            y_range: range,
            z_fixed: DEFAULT_UAV_ALTITUDE,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.num_samples == 0 {
            return Err(Error::invalid("CDF needs at least one sample"));
        }
        check_range("x", self.x_range)?;
        check_range("y", self.y_range)?;
        if !(self.z_fixed > 0.0 && self.z_fixed.is_finite()) {
            return Err(Error::invalid(format!(
                "UAV altitude must be positive, got {}",
                self.z_fixed
            )));
        }
        Ok(())
    }

    /// UAV positions drawn uniformly from the rectangle at `z_fixed`.
    pub fn sample_positions(&self) -> Vec<Position3D> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.num_samples)
            .map(|_| {
                let x = rng.random_range(self.x_range.0..=self.x_range.1);
                let y = rng.random_range(self.y_range.0..=self.y_range.1);
                Position3D::new(x, y, self.z_fixed)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfPoint {
    pub value: f64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdfResult {
    /// In sampling order.
    pub reports: Vec<LinkReport>,
    pub cdf: Vec<CdfPoint>,
}

impl CdfResult {
    pub fn quantile(&self, q: f64) -> f64 {
        quantile(&self.cdf, q)
    }
}

pub fn run_cdf(spec: &CdfExperimentSpec) -> Result<CdfResult> {
    spec.validate()?;
    let reports = spec
        .sample_positions()
        .par_iter()
        .map(|&p| evaluate_link(&spec.scenario, p))
        .collect::<Result<Vec<_>>>()?;
    let rates: Vec<f64> = reports.iter().map(|r| r.r_avg).collect();
    let cdf = empirical_cdf(&rates)?;
    Ok(CdfResult { reports, cdf })
}

/// Sorted `(value, rank / n)` pairs. Tied values keep distinct, increasing
/// fractions.
pub fn empirical_cdf(samples: &[f64]) -> Result<Vec<CdfPoint>> {
    if samples.is_empty() {
        return Err(Error::invalid("empirical CDF of an empty sample"));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("empirical CDF input contains NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, value)| CdfPoint {
            value,
            fraction: (i + 1) as f64 / n,
        })
        .collect())
}

/// Smallest value whose cumulative fraction reaches `q`.
pub fn quantile(cdf: &[CdfPoint], q: f64) -> f64 {
    let idx = cdf.partition_point(|p| p.fraction < q - 1e-12);
    cdf[idx.min(cdf.len() - 1)].value
}

/// One axis of a heatmap grid, `min, min + step, …` up to `max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let a = Self { min, max, step };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid(format!(
                "grid step must be positive, got {}",
                self.step
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min <= self.max) {
            return Err(Error::invalid(format!(
                "grid axis [{}, {}] is empty",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.min + i as f64 * self.step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapExperimentSpec {
    pub scenario: Scenario,
    pub x: GridAxis,
    pub y: GridAxis,
    pub z_fixed: f64,
}

impl HeatmapExperimentSpec {
    pub fn new(scenario: Scenario) -> Self {
        let (lo, hi) = default_range(scenario.carrier_hz);
        let axis = GridAxis {
            min: lo,
            max: hi,
            step: DEFAULT_HEATMAP_STEP,
        };
        Self {
            scenario,
            x: axis,
            y: axis,
            z_fixed: DEFAULT_UAV_ALTITUDE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.x.validate()?;
        self.y.validate()?;
        if !(self.z_fixed > 0.0 && self.z_fixed.is_finite()) {
            return Err(Error::invalid(format!(
                "UAV altitude must be positive, got {}",
                self.z_fixed
            )));
        }
        Ok(())
    }

    /// Row-major: y outer, x inner.
    pub fn positions(&self) -> Vec<Position3D> {
        self.y
            .values()
            .flat_map(|y| {
                self.x
                    .values()
                    .map(move |x| Position3D::new(x, y, self.z_fixed))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapCell {
    pub position: Position3D,
    pub p_los_bu: f64,
    pub p_los_ru: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r_avg_ris: f64,
    pub r_avg_free: f64,
    /// Bits/s.
    pub throughput_ris: f64,
    /// Bits/s.
    pub throughput_free: f64,
    pub degenerate: bool,
}

impl HeatmapCell {
    pub fn from_reports(ris: &LinkReport, free: &LinkReport) -> Self {
        Self {
            position: ris.uav_position,
            p_los_bu: ris.p_los_bu,
            p_los_ru: ris.p_los_ru,
            r1: ris.r1,
            r2: ris.r2,
            r3: ris.r3,
            r_avg_ris: ris.r_avg,
            r_avg_free: free.r_avg,
            throughput_ris: ris.throughput,
            throughput_free: free.throughput,
            degenerate: ris.degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapResult {
    pub nx: usize,
    pub ny: usize,
    pub bs_position: Position3D,
    /// Row-major, `ny` rows of `nx` cells.
    pub cells: Vec<HeatmapCell>,
}

impl HeatmapResult {
    pub fn cell(&self, ix: usize, iy: usize) -> &HeatmapCell {
        &self.cells[iy * self.nx + ix]
    }

    /// Ground distance from the BS of the nearest cell whose rate falls below
    /// `threshold`, or `None` when the whole grid stays at or above it.
    pub fn coverage_radius(&self, threshold: f64, with_ris: bool) -> Option<f64> {
        self.cells
            .iter()
            .filter(|c| if with_ris { c.r_avg_ris } else { c.r_avg_free } < threshold)
            .map(|c| (c.position.x - self.bs_position.x).hypot(c.position.y - self.bs_position.y))
            .min_by(f64::total_cmp)
    }

    pub fn peak_throughput_ris(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| c.throughput_ris)
            .fold(0.0, f64::max)
    }
}

pub fn run_heatmap(spec: &HeatmapExperimentSpec) -> Result<HeatmapResult> {
    spec.validate()?;
    let ris = spec.scenario.with_ris(true);
    let free = spec.scenario.with_ris(false);
    let cells = spec
        .positions()
        .par_iter()
        .map(|&p| {
            Ok(HeatmapCell::from_reports(
                &evaluate_link(&ris, p)?,
                &evaluate_link(&free, p)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HeatmapResult {
        nx: spec.x.len(),
        ny: spec.y.len(),
        bs_position: spec.scenario.bs_position,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::los::EnvironmentPreset;

    fn spec(samples: usize, seed: u64) -> CdfExperimentSpec {
        let s = Scenario::reference(28e9, EnvironmentPreset::Urban).unwrap();
        CdfExperimentSpec {
            num_samples: samples,
            ..CdfExperimentSpec::new(s, seed)
        }
    }

    #[test]
    fn cdf_of_known_samples() {
        let c = empirical_cdf(&[3.0]).unwrap();
        assert_eq!(
            c,
            vec![CdfPoint {
                value: 3.0,
                fraction: 1.0
            }]
        );
        let c = empirical_cdf(&[2.0, 1.0]).unwrap();
        assert_eq!(
            c,
            vec![
                CdfPoint {
                    value: 1.0,
                    fraction: 0.5
                },
                CdfPoint {
                    value: 2.0,
                    fraction: 1.0
                }
            ]
        );
        let ties = empirical_cdf(&[1.0, 1.0, 1.0]).unwrap();
        assert!(ties.windows(2).all(|w| w[1].fraction > w[0].fraction));
        assert!(empirical_cdf(&[]).is_err());
        assert!(empirical_cdf(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn cdf_of_uniform_draws_is_close_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..1000).map(|_| rng.random::<f64>()).collect();
        let cdf = empirical_cdf(&xs).unwrap();
        let n = cdf.len() as f64;
        let ks = cdf
            .iter()
            .enumerate()
            .map(|(i, p)| {
                (p.fraction - p.value)
                    .abs()
                    .max((i as f64 / n - p.value).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.06, "KS distance {ks}");
    }

    #[test]
    fn quantiles_pick_the_rank() {
        let cdf = empirical_cdf(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(quantile(&cdf, 0.25), 1.0);
        assert_eq!(quantile(&cdf, 0.3), 2.0);
        assert_eq!(quantile(&cdf, 1.0), 4.0);
        assert_eq!(quantile(&cdf, 0.0), 1.0);
    }

    #[test]
    fn single_sample_cdf_is_one_step() {
        let r = run_cdf(&spec(1, 3)).unwrap();
        assert_eq!(r.cdf.len(), 1);
        assert_eq!(r.cdf[0].fraction, 1.0);
        assert_eq!(r.cdf[0].value, r.reports[0].r_avg);
    }

    #[test]
    fn same_seed_same_result() {
        let a = run_cdf(&spec(200, 11)).unwrap();
        let b = run_cdf(&spec(200, 11)).unwrap();
        assert_eq!(a, b);
        let c = run_cdf(&spec(200, 12)).unwrap();
        assert_ne!(a.reports[0].uav_position, c.reports[0].uav_position);
    }

    #[test]
    fn samples_stay_in_rectangle() {
        let s = spec(500, 5);
        for p in s.sample_positions() {
            assert!((100.0..=1000.0).contains(&p.x) && (100.0..=1000.0).contains(&p.y));
            assert_eq!(p.z, 100.0);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(run_cdf(&spec(0, 1)).is_err());
        let mut s = spec(10, 1);
        s.x_range = (5.0, 5.0);
        assert!(run_cdf(&s).is_err());
        assert!(GridAxis::new(0.0, 10.0, 0.0).is_err());
        assert!(GridAxis::new(10.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn grid_axis_includes_endpoints() {
        let a = GridAxis::new(100.0, 1000.0, 25.0).unwrap();
        assert_eq!(a.len(), 37);
        let v: Vec<f64> = a.values().collect();
        assert_eq!(v[0], 100.0);
        assert_eq!(*v.last().unwrap(), 1000.0);
        assert_eq!(GridAxis::new(5.0, 5.0, 1.0).unwrap().len(), 1);
        assert_eq!(GridAxis::new(0.0, 1.0, 0.3).unwrap().len(), 4);
    }

    #[test]
    fn single_cell_heatmap_matches_evaluate_link() {
        let s = Scenario::reference(28e9, EnvironmentPreset::Urban).unwrap();
        let spec = HeatmapExperimentSpec {
            x: GridAxis::new(400.0, 400.0, 25.0).unwrap(),
            y: GridAxis::new(300.0, 300.0, 25.0).unwrap(),
            ..HeatmapExperimentSpec::new(s.clone())
        };
        let h = run_heatmap(&spec).unwrap();
        assert_eq!((h.nx, h.ny), (1, 1));
        let p = Position3D::new(400.0, 300.0, 100.0);
        let on = evaluate_link(&s.with_ris(true), p).unwrap();
        let off = evaluate_link(&s.with_ris(false), p).unwrap();
        assert_eq!(h.cells[0], HeatmapCell::from_reports(&on, &off));
    }

    #[test]
    fn heatmap_is_row_major() {
        let s = Scenario::reference(28e9, EnvironmentPreset::Suburban).unwrap();
        let spec = HeatmapExperimentSpec {
            x: GridAxis::new(100.0, 200.0, 50.0).unwrap(),
            y: GridAxis::new(100.0, 150.0, 50.0).unwrap(),
            ..HeatmapExperimentSpec::new(s)
        };
        let h = run_heatmap(&spec).unwrap();
        assert_eq!((h.nx, h.ny), (3, 2));
        assert_eq!(h.cell(2, 1).position, Position3D::new(200.0, 150.0, 100.0));
        assert_eq!(h.cell(1, 0).position, Position3D::new(150.0, 100.0, 100.0));
    }
}
