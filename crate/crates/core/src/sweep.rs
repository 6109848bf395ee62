//! Parameter sweeps over `alpha` and `q`, with CSV output.
//!
//! Figure columns follow the physical resistance `Re Z`. With
//! `Z = (4 i omega l / c^2) zeta`, `Re Z` is proportional to `-Im zeta`, so
//!
//! ```text
//! Y1        = 1 + (1-q) Im zeta_1 / Im zeta_0
//! Y2        = Y1 + (1-q)^2 Im zeta_2 / Im zeta_0
//! ratio3_re = Re Z_dif / Re Z_ref = Im zeta_dif / Im zeta_ref
//! ratio3_im = Im Z_dif / Im Z_ref = Re zeta_dif / Re zeta_ref
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinetic::{CouplingConstant, PlasmaParams};
use crate::neumann::{grid_spec_for, ImpedanceSeries, KernelMatrix, NeumannSeries};
use crate::parallel::{map_slice, Execution};
use crate::quadrature::{build_grid, GridSpec};
use crate::reference::{impedance_diffuse_with, impedance_specular_with_tolerance, BranchTracker};

pub const CSV_HEADER: [&str; 17] = [
    "alpha",
    "omega_over_nu",
    "q",
    "order",
    "re_zeta_n",
    "im_zeta_n",
    "re_sum",
    "im_sum",
    "re_zeta_ref",
    "im_zeta_ref",
    "re_zeta_dif",
    "im_zeta_dif",
    "Y1",
    "Y2",
    "ratio3_re",
    "ratio3_im",
    "status",
];

/// Environment variable naming the directory for default output files.
pub const OUTPUT_DIR_ENV: &str = "SKIN_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error("no results to write")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_count: usize,
    pub omega_over_nu: f64,
    pub q_values: Vec<f64>,
    pub max_order: usize,
    /// Fixed grid for every row; `None` adapts the grid to each `alpha`.
    pub grid: Option<GridSpec>,
    /// Relative tolerance of the reference quadratures.
    pub tolerance: f64,
    pub coupling: CouplingConstant,
    pub output_path: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            alpha_min: 1e-2,
            alpha_max: 1e4,
            alpha_count: 30,
            omega_over_nu: 1.0,
            q_values: vec![0.0],
            max_order: 2,
            grid: None,
            tolerance: 1e-10,
            coupling: CouplingConstant::default(),
            output_path: None,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, SweepError> {
        let config: SweepConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self, SweepError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |msg: String| Err(SweepError::Config(msg));
        if !(self.alpha_min > 0.0 && self.alpha_min.is_finite() && self.alpha_max.is_finite()) {
            return bad(format!(
                "alpha range must be positive and finite, got [{}, {}]",
                self.alpha_min, self.alpha_max
            ));
        }
        if self.alpha_min >= self.alpha_max {
            return bad(format!(
                "alpha_min {} must be below alpha_max {}",
                self.alpha_min, self.alpha_max
            ));
        }
        if self.alpha_count < 2 {
            return bad(format!("alpha_count must be at least 2, got {}", self.alpha_count));
        }
        if !(self.omega_over_nu >= 0.0 && self.omega_over_nu.is_finite()) {
            return bad(format!(
                "omega_over_nu must be non-negative, got {}",
                self.omega_over_nu
            ));
        }
        if self.q_values.is_empty() {
            return bad("q_values must not be empty".into());
        }
        if let Some(q) = self.q_values.iter().find(|q| !(0.0..=1.0).contains(*q)) {
            return bad(format!("q must lie in [0, 1], got {q}"));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return bad(format!("tolerance must lie in (0, 1), got {}", self.tolerance));
        }
        if let Some(grid) = &self.grid {
            grid.validate().map_err(|e| SweepError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Log-spaced `alpha` values from `alpha_min` to `alpha_max` inclusive.
    pub fn alphas(&self) -> Vec<f64> {
        let n = self.alpha_count;
        let ratio = self.alpha_max / self.alpha_min;
        (0..n)
            .map(|i| match i {
                0 => self.alpha_min,
                i if i == n - 1 => self.alpha_max,
                i => self.alpha_min * ratio.powf(i as f64 / (n - 1) as f64),
            })
            .collect()
    }

    /// `output_path`, else `sweep.csv` in `$SKIN_OUTPUT_DIR`, else in the
    /// working directory.
    pub fn resolved_output(&self) -> PathBuf {
        if let Some(p) = &self.output_path {
            return p.clone();
        }
        let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_default();
        dir.join("sweep.csv")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RowStatus {
    Ok,
    Diverging,
    Failed(String),
}

impl RowStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, RowStatus::Ok)
    }

    fn label(&self) -> String {
        match self {
            RowStatus::Ok => "ok".into(),
            RowStatus::Diverging => "diverging".into(),
            RowStatus::Failed(msg) => format!("failed: {msg}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowValues {
    pub zeta_n: Complex64,
    pub sum: Complex64,
    pub zeta_ref: Complex64,
    pub zeta_dif: Complex64,
    pub y1: f64,
    pub y2: f64,
    pub ratio3_re: f64,
    pub ratio3_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub omega_over_nu: f64,
    pub q: f64,
    pub order: usize,
    pub values: Option<RowValues>,
    pub status: RowStatus,
}

impl SweepRow {
    fn csv_record(&self) -> Vec<String> {
        let num = |x: f64| format!("{x:.11e}");
        let mut out = vec![
            num(self.alpha),
            num(self.omega_over_nu),
            num(self.q),
            self.order.to_string(),
        ];
        match &self.values {
            Some(v) => {
                for z in [v.zeta_n, v.sum, v.zeta_ref, v.zeta_dif] {
                    out.push(num(z.re));
                    out.push(num(z.im));
                }
                for x in [v.y1, v.y2, v.ratio3_re, v.ratio3_im] {
                    out.push(num(x));
                }
            }
            None => out.extend(std::iter::repeat_n(String::new(), 12)),
        }
        out.push(self.status.label());
        out
    }
}

struct AlphaResult {
    terms: Vec<Complex64>,
    zeta_ref: Complex64,
    zeta_dif: Complex64,
}

fn evaluate_alpha(config: &SweepConfig, alpha: f64) -> Result<AlphaResult, String> {
    let params = PlasmaParams::new(config.omega_over_nu, alpha, 0.0).map_err(|e| e.to_string())?;
    let spec = config.grid.clone().unwrap_or_else(|| grid_spec_for(&params));
    let grid = build_grid(&spec).map_err(|e| e.to_string())?;
    let kernel =
        KernelMatrix::build(grid, params, config.coupling, Execution::Sequential).map_err(|e| e.to_string())?;
    let series = NeumannSeries::new(&kernel, config.max_order.max(2)).map_err(|e| e.to_string())?;
    let zeta_ref = impedance_specular_with_tolerance(&params, config.tolerance).map_err(|e| e.to_string())?;
    let tracker = BranchTracker::for_params(&params).map_err(|e| e.to_string())?;
    let zeta_dif = impedance_diffuse_with(&params, &tracker, config.tolerance).map_err(|e| e.to_string())?;
    Ok(AlphaResult {
        terms: series.terms().to_vec(),
        zeta_ref,
        zeta_dif,
    })
}

fn rows_for(config: &SweepConfig, alpha: f64, result: &Result<AlphaResult, String>) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for &q in &config.q_values {
        let series = result
            .as_ref()
            .ok()
            .map(|r| ImpedanceSeries::from_terms(r.terms.clone(), q));
        for order in 0..=config.max_order {
            let (values, status) = match (result, &series) {
                (Ok(r), Some(s)) => {
                    let t = s.terms();
                    let w = 1.0 - q;
                    let y1 = 1.0 + w * t[1].im / t[0].im;
                    let y2 = y1 + w * w * t[2].im / t[0].im;
                    let values = RowValues {
                        zeta_n: t[order],
                        sum: s.partial_sums()[order],
                        zeta_ref: r.zeta_ref,
                        zeta_dif: r.zeta_dif,
                        y1,
                        y2,
                        ratio3_re: r.zeta_dif.im / r.zeta_ref.im,
                        ratio3_im: r.zeta_dif.re / r.zeta_ref.re,
                    };
                    let status = if s.is_diverging() {
                        RowStatus::Diverging
                    } else {
                        RowStatus::Ok
                    };
                    (Some(values), status)
                }
                (Err(e), _) => (None, RowStatus::Failed(e.clone())),
                (Ok(_), None) => unreachable!("series exists for every successful alpha"),
            };
            rows.push(SweepRow {
                alpha,
                omega_over_nu: config.omega_over_nu,
                q,
                order,
                values,
                status,
            });
        }
    }
    rows
}

/// Rows ordered by `alpha`, then `q` in config order, then series order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    run_sweep_with(config, Execution::best_available())
}

pub fn run_sweep_with(config: &SweepConfig, exec: Execution) -> Result<Vec<SweepRow>, SweepError> {
    config.validate()?;
    let alphas = config.alphas();
    let results = map_slice(&alphas, exec, |&a| evaluate_alpha(config, a));
    Ok(alphas
        .iter()
        .zip(&results)
        .flat_map(|(&a, r)| rows_for(config, a, r))
        .collect())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), SweepError> {
    if rows.is_empty() {
        return Err(SweepError::Empty);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

/// Write `rows` to `path`; nothing is created for an empty result.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<(), SweepError> {
    let mut buffer = Vec::new();
    write_csv(rows, &mut buffer)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, buffer)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> SweepConfig {
        SweepConfig {
            alpha_min: 0.1,
            alpha_max: 10.0,
            alpha_count: 2,
            q_values: vec![0.0, 1.0],
            ..SweepConfig::default()
        }
    }

    #[test]
    fn alphas_are_log_spaced_with_exact_ends() {
        let c = SweepConfig {
            alpha_min: 1e-2,
            alpha_max: 1e4,
            alpha_count: 7,
            ..SweepConfig::default()
        };
        let a = c.alphas();
        assert_eq!(a[0], 1e-2);
        assert_eq!(a[6], 1e4);
        assert!((a[3] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let base = SweepConfig::default();
        for bad in [
            SweepConfig {
                alpha_min: 5.0,
                alpha_max: 1.0,
                ..base.clone()
            },
            SweepConfig {
                alpha_count: 1,
                ..base.clone()
            },
            SweepConfig {
                q_values: vec![1.5],
                ..base.clone()
            },
            SweepConfig {
                q_values: vec![],
                ..base.clone()
            },
            SweepConfig {
                tolerance: 0.0,
                ..base.clone()
            },
        ] {
            assert!(matches!(bad.validate(), Err(SweepError::Config(_))), "{bad:?}");
        }
    }

    #[test]
    fn json_config_is_flat_and_strict() {
        let c = SweepConfig::from_json(r#"{"alpha_min": 0.5, "alpha_max": 2.0, "alpha_count": 3, "q_values": [0.25]}"#)
            .unwrap();
        assert_eq!(c.alpha_count, 3);
        assert_eq!(c.max_order, 2);
        assert!(SweepConfig::from_json(r#"{"alpha_minimum": 1.0}"#).is_err());
    }

    #[test]
    fn specular_rows_have_unit_ratios() {
        let rows = run_sweep(&tiny_config()).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 3);
        for row in rows.iter().filter(|r| r.q == 1.0) {
            let v = row.values.unwrap();
            assert_eq!(v.y1, 1.0);
            assert_eq!(v.y2, 1.0);
            assert!(row.status.is_ok());
        }
        let first = rows.iter().find(|r| r.q == 1.0 && r.order == 2).unwrap();
        let zero = rows
            .iter()
            .find(|r| r.alpha == first.alpha && r.q == 1.0 && r.order == 0)
            .unwrap();
        assert_eq!(first.values.unwrap().sum, zero.values.unwrap().zeta_n);
    }

    #[test]
    fn empty_results_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("none.csv");
        assert!(matches!(emit_csv(&[], &path), Err(SweepError::Empty)));
        assert!(!path.exists());
    }
}
