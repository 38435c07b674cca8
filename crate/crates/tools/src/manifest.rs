//! Dataset manifests and fixation files for batch evaluation.
//!
//! A manifest is a JSON array of entries:
//!
//! ```json
//! [
//!   {
//!     "image": "shots/img_01.png",
//!     "saliency": "maps/img_01.png",
//!     "masks_dir": "masks/img_01",
//!     "fixations": "fix/img_01.json",
//!     "depth": "depth/img_01.png"
//!   }
//! ]
//! ```
//!
//! `masks_dir` and `fixations` are required. At least one of `image`
//! (screenshot, used for the built-in backbone and overlay rendering) or
//! `saliency` (precomputed backbone map) must be present. `depth` and `id`
//! are optional; the id defaults to the stem of the image or saliency file.
//! All paths are resolved relative to the manifest's directory.
//!
//! A fixation file is a JSON array of points: `[{"t": ms, "x": px, "y": px}]`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sara_core::metrics::FixationPoint;
use serde::Deserialize;

/// One dataset image with its masks and recorded fixations.
#[derive(Debug, Clone)]
pub struct ManifestEntry {
    pub id: String,
    pub image: Option<PathBuf>,
    pub saliency: Option<PathBuf>,
    pub masks_dir: PathBuf,
    pub fixations: PathBuf,
    pub depth: Option<PathBuf>,
}

#[derive(Deserialize)]
struct EntryJson {
    id: Option<String>,
    image: Option<PathBuf>,
    saliency: Option<PathBuf>,
    masks_dir: PathBuf,
    fixations: PathBuf,
    depth: Option<PathBuf>,
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_absolute() {
        p
    } else {
        base.join(p)
    }
}

fn stem_of(p: &Path) -> Option<String> {
    p.file_stem().and_then(|s| s.to_str()).map(String::from)
}

/// Loads a manifest, resolving every path against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let entries: Vec<EntryJson> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::with_capacity(entries.len());
    for (i, e) in entries.into_iter().enumerate() {
        if e.image.is_none() && e.saliency.is_none() {
            bail!(
                "manifest entry {i} needs an \"image\" or a \"saliency\" path"
            );
        }
        let image = e.image.map(|p| resolve(base, p));
        let saliency = e.saliency.map(|p| resolve(base, p));
        let id = e
            .id
            .or_else(|| image.as_deref().and_then(stem_of))
            .or_else(|| saliency.as_deref().and_then(stem_of))
            .with_context(|| format!("manifest entry {i} has no usable id"))?;
        out.push(ManifestEntry {
            id,
            image,
            saliency,
            masks_dir: resolve(base, e.masks_dir),
            fixations: resolve(base, e.fixations),
            depth: e.depth.map(|p| resolve(base, p)),
        });
    }
    let mut ids: Vec<&str> = out.iter().map(|e| e.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(dup) = ids.windows(2).find(|w| w[0] == w[1]) {
        bail!("duplicate manifest id {:?}", dup[0]);
    }
    Ok(out)
}

#[derive(Deserialize)]
struct FixationJson {
    t: f64,
    x: f64,
    y: f64,
}

/// Loads a fixation file: a JSON array of `{"t", "x", "y"}` points.
pub fn load_fixations(path: &Path) -> Result<Vec<FixationPoint>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let points: Vec<FixationJson> =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(points
        .into_iter()
        .map(|p| FixationPoint {
            t_ms: p.t,
            x: p.x,
            y: p.y,
        })
        .collect())
}
