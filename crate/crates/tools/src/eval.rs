//! Dataset evaluation harness: per-image SOR (and optional shuffled AUC)
//! over a manifest.

use std::path::Path;

use anyhow::{Context, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sara_core::metrics::{evaluate_image, shuffled_auc, FixationPoint};
use sara_core::normalize::normalize_map;
use sara_core::spectral::spectral_residual_saliency;
use sara_core::{GridConfig, NormalizeConfig, SaliencyMap};
use serde::Serialize;

use crate::manifest::{load_fixations, ManifestEntry};
use crate::raster;

/// Negative-set size cap for shuffled AUC, as a multiple of the positive
/// set.
const SAUC_NEGATIVE_FACTOR: usize = 10;

/// Harness parameters, echoed verbatim into the report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct EvalOptions {
    pub grid: GridConfig,
    /// Map normalization pass applied to the backbone output, when enabled.
    pub normalize: Option<NormalizeConfig>,
    /// Also score each map with shuffled AUC against the other images'
    /// fixations.
    pub sauc: bool,
    /// Seed for negative-set subsampling; sAUC is deterministic given the
    /// seed.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageStatus {
    /// Scored.
    Ok,
    /// Valid inputs but fewer than two fixated elements; excluded from the
    /// mean.
    Skipped,
    /// Inputs unreadable or inconsistent; excluded from the mean.
    Failed,
}

/// Outcome for one manifest entry.
#[derive(Debug, Clone, Serialize)]
pub struct ImageOutcome {
    pub id: String,
    pub status: ImageStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sauc: Option<f64>,
    /// Why the image was skipped or failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Full evaluation report: configuration echo, aggregates, per-image rows.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub config: EvalOptions,
    /// Mean SOR over scored images; absent when none scored.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_sor: Option<f64>,
    /// Mean shuffled AUC over images where it was computable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_sauc: Option<f64>,
    pub images_used: usize,
    pub images: Vec<ImageOutcome>,
}

struct LoadedEntry {
    saliency: SaliencyMap,
    sor: Option<f64>,
}

/// Loads one entry and scores its SOR.
///
/// The canvas size comes from the screenshot when present, otherwise from
/// the first mask; the backbone map is the saliency file resampled to the
/// canvas, or the built-in spectral backbone over the screenshot.
fn evaluate_entry(
    entry: &ManifestEntry,
    fixations: &[FixationPoint],
    opts: &EvalOptions,
) -> Result<LoadedEntry> {
    let (width, height) = match &entry.image {
        Some(path) => {
            let (w, h) = image::image_dimensions(path)
                .with_context(|| format!("reading {}", path.display()))?;
            (w as usize, h as usize)
        }
        None => mask_dimensions(&entry.masks_dir)?,
    };
    let mut saliency = match &entry.saliency {
        Some(path) => raster::load_saliency_map(path, width, height)?.map,
        None => {
            let path = entry.image.as_ref().expect("manifest guarantees a source");
            let (w, h, rgb) = raster::load_rgb(path)?;
            spectral_residual_saliency(w, h, &rgb)?
        }
    };
    if let Some(cfg) = &opts.normalize {
        saliency = normalize_map(&saliency, cfg)?;
    }
    let (masks, _) = raster::load_masks_dir(&entry.masks_dir, width, height)?;
    let sor = evaluate_image(&saliency, &opts.grid, &masks, fixations, None)?;
    Ok(LoadedEntry { saliency, sor })
}

/// Size of the first mask PNG in a directory, header-only.
fn mask_dimensions(dir: &Path) -> Result<(usize, usize)> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .with_context(|| format!("reading mask directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("png"))
        })
        .collect();
    paths.sort();
    let first = paths
        .first()
        .with_context(|| format!("mask directory {} contains no PNG files", dir.display()))?;
    let (w, h) = image::image_dimensions(first)
        .with_context(|| format!("reading {}", first.display()))?;
    Ok((w as usize, h as usize))
}

/// Negative set for one image: the other images' fixations, subsampled to
/// at most [`SAUC_NEGATIVE_FACTOR`] times the positive count.
fn negative_points(
    all_fixations: &[Vec<FixationPoint>],
    index: usize,
    positives: usize,
    seed: u64,
) -> Vec<(f64, f64)> {
    let mut pool: Vec<(f64, f64)> = all_fixations
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != index)
        .flat_map(|(_, fx)| fx.iter().map(|f| (f.x, f.y)))
        .collect();
    let cap = positives * SAUC_NEGATIVE_FACTOR;
    if pool.len() > cap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64));
        pool = pool.choose_multiple(&mut rng, cap).copied().collect();
    }
    pool
}

/// Evaluates every manifest entry, never aborting on a bad one.
///
/// Per-image IO or consistency failures become `failed` rows; images with
/// fewer than two fixated elements become `skipped` rows. `mean_sor`
/// averages the rest.
pub fn evaluate_dataset(entries: &[ManifestEntry], opts: &EvalOptions) -> EvalReport {
    let fixations: Vec<Vec<FixationPoint>> = entries
        .iter()
        .map(|e| load_fixations(&e.fixations).unwrap_or_default())
        .collect();

    let mut images = Vec::with_capacity(entries.len());
    for (i, entry) in entries.iter().enumerate() {
        let row = match evaluate_entry(entry, &fixations[i], opts) {
            Err(err) => ImageOutcome {
                id: entry.id.clone(),
                status: ImageStatus::Failed,
                sor: None,
                sauc: None,
                detail: Some(format!("{err:#}")),
            },
            Ok(loaded) => {
                let sauc = if opts.sauc && !fixations[i].is_empty() {
                    let positives: Vec<(f64, f64)> =
                        fixations[i].iter().map(|f| (f.x, f.y)).collect();
                    let negatives =
                        negative_points(&fixations, i, positives.len(), opts.seed);
                    if negatives.is_empty() {
                        None
                    } else {
                        shuffled_auc(&loaded.saliency, &positives, &negatives).ok()
                    }
                } else {
                    None
                };
                match loaded.sor {
                    Some(sor) => ImageOutcome {
                        id: entry.id.clone(),
                        status: ImageStatus::Ok,
                        sor: Some(sor),
                        sauc,
                        detail: None,
                    },
                    None => ImageOutcome {
                        id: entry.id.clone(),
                        status: ImageStatus::Skipped,
                        sor: None,
                        sauc,
                        detail: Some("fewer than two fixated elements".into()),
                    },
                }
            }
        };
        images.push(row);
    }

    let scored: Vec<f64> = images.iter().filter_map(|r| r.sor).collect();
    let mean_sor = if scored.is_empty() {
        None
    } else {
        Some(scored.iter().sum::<f64>() / scored.len() as f64)
    };
    let aucs: Vec<f64> = images.iter().filter_map(|r| r.sauc).collect();
    let mean_sauc = if aucs.is_empty() {
        None
    } else {
        Some(aucs.iter().sum::<f64>() / aucs.len() as f64)
    };
    EvalReport {
        config: opts.clone(),
        mean_sor,
        mean_sauc,
        images_used: scored.len(),
        images,
    }
}

impl EvalReport {
    /// Per-image rows as CSV: `id,status,sor,sauc,detail`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "status", "sor", "sauc", "detail"])?;
        for row in &self.images {
            let status = match row.status {
                ImageStatus::Ok => "ok",
                ImageStatus::Skipped => "skipped",
                ImageStatus::Failed => "failed",
            };
            w.write_record([
                row.id.as_str(),
                status,
                &row.sor.map(|v| v.to_string()).unwrap_or_default(),
                &row.sauc.map(|v| v.to_string()).unwrap_or_default(),
                row.detail.as_deref().unwrap_or(""),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}
