//! Rank overlay rendering: tint each ranked element over the screenshot or
//! the saliency map.

use anyhow::{bail, Result};
use sara_core::sara::{ElementMask, RankList};
use sara_core::SaliencyMap;

/// Fraction of the base image kept under a tinted pixel.
const BASE_WEIGHT: f64 = 0.55;

/// Color for a rank on a red-to-blue ramp; rank 1 is pure red, the last
/// rank pure blue.
fn ramp(rank: usize, total: usize) -> [u8; 3] {
    let t = if total <= 1 {
        0.0
    } else {
        (rank - 1) as f64 / (total - 1) as f64
    };
    let r = ((1.0 - t) * 255.0).round() as u8;
    let b = (t * 255.0).round() as u8;
    [r, 0, b]
}

/// Base canvas for the overlay.
pub enum OverlayBase<'a> {
    /// Interleaved 8-bit RGB screenshot.
    Rgb {
        width: usize,
        height: usize,
        data: &'a [u8],
    },
    /// Saliency map shown as gray.
    Gray(&'a SaliencyMap),
}

impl OverlayBase<'_> {
    fn dimensions(&self) -> (usize, usize) {
        match self {
            OverlayBase::Rgb { width, height, .. } => (*width, *height),
            OverlayBase::Gray(map) => (map.width(), map.height()),
        }
    }

    fn to_rgb(&self) -> Vec<u8> {
        match self {
            OverlayBase::Rgb { data, .. } => data.to_vec(),
            OverlayBase::Gray(map) => map.values().iter().flat_map(|&v| [v, v, v]).collect(),
        }
    }
}

/// Tints every ranked mask over the base: red for rank 1 shading to blue
/// for the last rank. Pixels covered by several masks take the
/// best-ranked tint. Returns interleaved RGB.
pub fn render_overlay(
    base: &OverlayBase,
    masks: &[ElementMask],
    ranks: &RankList,
) -> Result<Vec<u8>> {
    let (width, height) = base.dimensions();
    let mut rgb = base.to_rgb();
    if rgb.len() != width * height * 3 {
        bail!("base buffer does not match {width}x{height}");
    }
    let total = ranks.len();
    let mut best = vec![usize::MAX; width * height];
    for mask in masks {
        let Some(rank) = ranks.rank_of(mask.id()) else {
            continue;
        };
        if mask.width() != width || mask.height() != height {
            bail!(
                "mask {} is {}x{}, base is {width}x{height}",
                mask.id(),
                mask.width(),
                mask.height()
            );
        }
        for (x, y) in mask.iter_set() {
            let at = y * width + x;
            best[at] = best[at].min(rank);
        }
    }
    for (i, &rank) in best.iter().enumerate() {
        if rank == usize::MAX {
            continue;
        }
        let color = ramp(rank, total);
        for c in 0..3 {
            let blended = BASE_WEIGHT * f64::from(rgb[i * 3 + c])
                + (1.0 - BASE_WEIGHT) * f64::from(color[c]);
            rgb[i * 3 + c] = blended.round() as u8;
        }
    }
    Ok(rgb)
}
