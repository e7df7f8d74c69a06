//! Evaluation harness: synthetic scene generation, detection scoring,
//! manifest ingestion and the sigma sweep.
//!
//! An image counts as detected when the mean absolute per-column row
//! error stays within a fraction of the vessel height (default 5%); the
//! raw error is reported alongside so other thresholds can be re-derived
//! from saved results.

pub mod synth;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cutcost::{CostMode, CostParams, GrayImage};
use crate::segment::{self, BoundaryCurve};
use crate::vessel::VesselMask;

/// Detection threshold as a fraction of the vessel height.
pub const DEFAULT_TOLERANCE_FRACTION: f64 = 0.05;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("manifest error at line {line}: {message}")]
    Manifest { line: usize, message: String },
    #[error("failed to read manifest {path}: {source}")]
    ManifestIo {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("prediction and ground truth share no defined column")]
    NoOverlap,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("failed to read ground truth {path}: {message}")]
    GroundTruthIo { path: PathBuf, message: String },
}

/// True boundary row per image column, `None` outside the vessel.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    rows: Vec<Option<u32>>,
}

#[derive(Serialize, Deserialize)]
struct GroundTruthFile {
    schema: u32,
    boundary: Vec<Option<u32>>,
}

impl GroundTruth {
    pub fn from_rows(rows: Vec<Option<u32>>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[Option<u32>] {
        &self.rows
    }

    pub fn row(&self, column: usize) -> Option<u32> {
        self.rows[column]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn save_json(&self, path: &Path) -> Result<(), EvalError> {
        let file = GroundTruthFile {
            schema: 1,
            boundary: self.rows.clone(),
        };
        let json = serde_json::to_string(&file).expect("ground truth serializes");
        std::fs::write(path, json).map_err(|e| EvalError::GroundTruthIo {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load_json(path: &Path) -> Result<Self, EvalError> {
        let text = std::fs::read_to_string(path).map_err(|e| EvalError::GroundTruthIo {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let file: GroundTruthFile =
            serde_json::from_str(&text).map_err(|e| EvalError::GroundTruthIo {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        Ok(Self {
            rows: file.boundary,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    pub detected: bool,
    pub mean_abs_row_error: f64,
}

/// Compare a predicted boundary against ground truth over the columns
/// where both are defined.
pub fn detection_score(
    pred: &BoundaryCurve,
    gt: &GroundTruth,
    mask: &VesselMask,
    tol_fraction: f64,
) -> Result<Score, EvalError> {
    if pred.len() != gt.len() || pred.len() != mask.width() {
        return Err(EvalError::Shape(format!(
            "prediction has {} columns, ground truth {}, mask {}",
            pred.len(),
            gt.len(),
            mask.width()
        )));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for x in 0..pred.len() {
        if let (Some(p), Some(g)) = (pred.row(x), gt.row(x)) {
            total += (p as f64 - g as f64).abs();
            count += 1;
        }
    }
    if count == 0 {
        return Err(EvalError::NoOverlap);
    }
    let mean_abs_row_error = total / count as f64;
    let tolerance = tol_fraction * mask.vessel_height() as f64;
    Ok(Score {
        detected: mean_abs_row_error <= tolerance,
        mean_abs_row_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaterialClass {
    Liquid,
    Solid,
}

impl FromStr for MaterialClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "liquid" => Ok(Self::Liquid),
            "solid" => Ok(Self::Solid),
            other => Err(format!("unknown material class `{other}`")),
        }
    }
}

impl fmt::Display for MaterialClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Liquid => write!(f, "liquid"),
            Self::Solid => write!(f, "solid"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub image: PathBuf,
    pub contour: PathBuf,
    pub ground_truth: PathBuf,
    pub class: MaterialClass,
}

pub const MANIFEST_HEADER: &str = "image,contour,groundtruth,class";

/// Read a line-oriented `image,contour,groundtruth,class` manifest.
/// Relative paths resolve against the manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::ManifestIo {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    let resolve = |s: &str| -> PathBuf {
        let p = Path::new(s.trim());
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        }
    };
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || (line_no == 1 && trimmed.eq_ignore_ascii_case(MANIFEST_HEADER)) {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 4 {
            return Err(EvalError::Manifest {
                line: line_no,
                message: format!("expected 4 comma-separated fields, got {}", fields.len()),
            });
        }
        let class = fields[3].parse().map_err(|message| EvalError::Manifest {
            line: line_no,
            message,
        })?;
        entries.push(ManifestEntry {
            image: resolve(fields[0]),
            contour: resolve(fields[1]),
            ground_truth: resolve(fields[2]),
            class,
        });
    }
    if entries.is_empty() {
        return Err(EvalError::Manifest {
            line: 0,
            message: "manifest lists no entries".into(),
        });
    }
    Ok(entries)
}

/// One cost-function configuration evaluated by the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepSetting {
    Exponential { sigma: f64 },
    Linear,
}

impl SweepSetting {
    fn params(&self, base: &CostParams) -> CostParams {
        match *self {
            Self::Exponential { sigma } => CostParams {
                mode: CostMode::Exponential,
                sigma,
                ..base.clone()
            },
            Self::Linear => CostParams {
                mode: CostMode::Linear,
                ..base.clone()
            },
        }
    }
}

impl fmt::Display for SweepSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exponential { sigma } => {
                if sigma.fract() == 0.0 {
                    write!(f, "{}", *sigma as i64)
                } else {
                    write!(f, "{sigma}")
                }
            }
            Self::Linear => write!(f, "linear"),
        }
    }
}

/// Per-class tallies for one sweep setting.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub setting: SweepSetting,
    pub liquids_detected: usize,
    pub liquids_total: usize,
    pub solids_detected: usize,
    pub solids_total: usize,
    pub mean_error_liquids: Option<f64>,
    pub mean_error_solids: Option<f64>,
}

impl SweepRow {
    pub fn rate_liquids(&self) -> Option<f64> {
        (self.liquids_total > 0).then(|| self.liquids_detected as f64 / self.liquids_total as f64)
    }

    pub fn rate_solids(&self) -> Option<f64> {
        (self.solids_total > 0).then(|| self.solids_detected as f64 / self.solids_total as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkippedEntry {
    pub image: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Entries that produced scores.
    pub n_images: usize,
    pub skipped: Vec<SkippedEntry>,
    pub tol_fraction: f64,
}

impl SweepReport {
    /// Aligned text table, one row per setting.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<8} {:>8} {:>8} {:>12} {:>12}\n",
            "sigma", "liquids", "solids", "err-liquids", "err-solids"
        ));
        let pct = |r: Option<f64>| match r {
            Some(r) => format!("{:.0}%", 100.0 * r),
            None => "-".into(),
        };
        let err = |e: Option<f64>| match e {
            Some(e) => format!("{e:.2}px"),
            None => "-".into(),
        };
        for row in &self.rows {
            out.push_str(&format!(
                "{:<8} {:>8} {:>8} {:>12} {:>12}\n",
                row.setting.to_string(),
                pct(row.rate_liquids()),
                pct(row.rate_solids()),
                err(row.mean_error_liquids),
                err(row.mean_error_solids),
            ));
        }
        out.push_str(&format!(
            "images: {} scored, {} skipped; tolerance {:.1}% of vessel height\n",
            self.n_images,
            self.skipped.len(),
            100.0 * self.tol_fraction
        ));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "setting,liquids_detected,liquids_total,liquids_rate,liquids_mean_error,\
             solids_detected,solids_total,solids_rate,solids_mean_error,n_images\n",
        );
        let num = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v}"));
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                row.setting,
                row.liquids_detected,
                row.liquids_total,
                num(row.rate_liquids()),
                num(row.mean_error_liquids),
                row.solids_detected,
                row.solids_total,
                num(row.rate_solids()),
                num(row.mean_error_solids),
                self.n_images,
            ));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub sigmas: Vec<f64>,
    pub include_linear: bool,
    pub tol_fraction: f64,
    pub base_params: CostParams,
    /// Worker threads for the entry pool; `None` uses all cores.
    pub workers: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            sigmas: (1..=10).map(|k| (10 * k) as f64).collect(),
            include_linear: true,
            tol_fraction: DEFAULT_TOLERANCE_FRACTION,
            base_params: CostParams::default(),
            workers: None,
        }
    }
}

impl SweepConfig {
    pub fn settings(&self) -> Vec<SweepSetting> {
        let mut settings: Vec<SweepSetting> = self
            .sigmas
            .iter()
            .map(|&sigma| SweepSetting::Exponential { sigma })
            .collect();
        if self.include_linear {
            settings.push(SweepSetting::Linear);
        }
        settings
    }
}

/// Scores for one manifest entry across all settings, or the reason it
/// was skipped.
type EntryOutcome = Result<Vec<Score>, String>;

fn evaluate_entry(
    entry: &ManifestEntry,
    settings: &[SweepSetting],
    config: &SweepConfig,
) -> EntryOutcome {
    let image = GrayImage::load(&entry.image).map_err(|e| e.to_string())?;
    let contour = GrayImage::load(&entry.contour).map_err(|e| e.to_string())?;
    let mask = VesselMask::from_contour(&contour).map_err(|e| e.to_string())?;
    let gt = GroundTruth::load_json(&entry.ground_truth).map_err(|e| e.to_string())?;
    settings
        .iter()
        .map(|setting| {
            let params = setting.params(&config.base_params);
            let labeling =
                segment::segment(&image, &mask, &params).map_err(|e| format!("{setting}: {e}"))?;
            let curve = segment::extract_boundary(&labeling, &mask);
            detection_score(&curve, &gt, &mask, config.tol_fraction)
                .map_err(|e| format!("{setting}: {e}"))
        })
        .collect()
}

/// Run the full parameter sweep over a manifest. Entries are independent
/// and processed on a bounded worker pool; aggregation is ordered, so the
/// report is deterministic.
pub fn sigma_sweep(
    entries: &[ManifestEntry],
    config: &SweepConfig,
) -> Result<SweepReport, EvalError> {
    if entries.is_empty() {
        return Err(EvalError::Manifest {
            line: 0,
            message: "manifest lists no entries".into(),
        });
    }
    let settings = config.settings();

    let run = || -> Vec<EntryOutcome> {
        use rayon::prelude::*;
        entries
            .par_iter()
            .map(|entry| evaluate_entry(entry, &settings, config))
            .collect()
    };
    let outcomes: Vec<EntryOutcome> = match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("worker pool")
            .install(run),
        None => run(),
    };

    let mut rows: Vec<SweepRow> = settings
        .iter()
        .map(|&setting| SweepRow {
            setting,
            liquids_detected: 0,
            liquids_total: 0,
            solids_detected: 0,
            solids_total: 0,
            mean_error_liquids: None,
            mean_error_solids: None,
        })
        .collect();
    let mut err_sums = vec![(0.0f64, 0usize, 0.0f64, 0usize); settings.len()];
    let mut skipped = Vec::new();
    let mut n_images = 0;

    for (entry, outcome) in entries.iter().zip(outcomes) {
        match outcome {
            Err(reason) => skipped.push(SkippedEntry {
                image: entry.image.clone(),
                reason,
            }),
            Ok(scores) => {
                n_images += 1;
                for (i, score) in scores.into_iter().enumerate() {
                    let row = &mut rows[i];
                    let sums = &mut err_sums[i];
                    match entry.class {
                        MaterialClass::Liquid => {
                            row.liquids_total += 1;
                            row.liquids_detected += score.detected as usize;
                            sums.0 += score.mean_abs_row_error;
                            sums.1 += 1;
                        }
                        MaterialClass::Solid => {
                            row.solids_total += 1;
                            row.solids_detected += score.detected as usize;
                            sums.2 += score.mean_abs_row_error;
                            sums.3 += 1;
                        }
                    }
                }
            }
        }
    }
    for (row, (liq_sum, liq_n, sol_sum, sol_n)) in rows.iter_mut().zip(err_sums) {
        row.mean_error_liquids = (liq_n > 0).then(|| liq_sum / liq_n as f64);
        row.mean_error_solids = (sol_n > 0).then(|| sol_sum / sol_n as f64);
    }

    Ok(SweepReport {
        rows,
        n_images,
        skipped,
        tol_fraction: config.tol_fraction,
    })
}
