//! Grid-based saliency ranking.
//!
//! The map is divided into a `k x k` grid and each segment is scored by a
//! weighted sum of four components:
//!
//! * histogram entropy of the segment's intensities (32 bins, bits, in
//!   `[0, 5]`);
//! * mean saliency, the segment's average intensity divided by 255;
//! * center bias, a Gaussian falloff of the distance between the segment
//!   center and the image center with sigma = image diagonal / 6;
//! * mean depth, when a depth map is supplied.
//!
//! Scaling all weights by one constant scales every score by the same
//! constant, so rankings depend only on the weight ratios. Segments are
//! ranked by descending score; arbitrary element masks are ranked by
//! averaging the scores of the segments each mask pixel falls in.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::map::{DepthMap, SaliencyMap};

/// Number of histogram bins used for segment entropy.
pub const ENTROPY_BINS: u32 = 32;
/// Upper bound on segment entropy in bits (`log2(ENTROPY_BINS)`).
pub const MAX_ENTROPY: f64 = 5.0;

/// Component weights for the segment score.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoreWeights {
    pub entropy: f64,
    pub saliency: f64,
    pub center_bias: f64,
    pub depth: f64,
}

impl Default for ScoreWeights {
    /// Equal weight on entropy, saliency, and center bias; depth off.
    fn default() -> Self {
        Self {
            entropy: 1.0,
            saliency: 1.0,
            center_bias: 1.0,
            depth: 0.0,
        }
    }
}

impl ScoreWeights {
    pub fn validate(&self) -> Result<()> {
        let parts = [self.entropy, self.saliency, self.center_bias, self.depth];
        if parts.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFiniteInput("score weights"));
        }
        if parts.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidConfig("score weights must be non-negative".into()));
        }
        if parts.iter().sum::<f64>() <= 0.0 {
            return Err(Error::InvalidConfig("at least one score weight must be positive".into()));
        }
        Ok(())
    }
}

/// Grid resolution and score weights for ranking.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridConfig {
    /// Number of grid rows and columns.
    pub k: usize,
    pub weights: ScoreWeights,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            k: 30,
            weights: ScoreWeights::default(),
        }
    }
}

/// One cell of the segmentation grid, in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentRect {
    pub row: usize,
    pub col: usize,
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl SegmentRect {
    /// Pixel-space center of the segment.
    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.width as f64 / 2.0,
            self.y as f64 + self.height as f64 / 2.0,
        )
    }
}

/// Splits a `width x height` map into a `k x k` grid.
///
/// Interior segments measure `(width / k) x (height / k)`; the last row and
/// column absorb the remainder, so the grid tiles the map exactly. Fails if
/// `k` is zero or exceeds the smaller dimension.
pub fn build_grid(width: usize, height: usize, k: usize) -> Result<Vec<SegmentRect>> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyInput("map dimensions"));
    }
    if k == 0 {
        return Err(Error::InvalidConfig("grid parameter k must be positive".into()));
    }
    if k > width.min(height) {
        return Err(Error::GridTooFine { k, width, height });
    }
    let base_w = width / k;
    let base_h = height / k;
    let mut rects = Vec::with_capacity(k * k);
    for row in 0..k {
        let y = row * base_h;
        let h = if row == k - 1 { height - y } else { base_h };
        for col in 0..k {
            let x = col * base_w;
            let w = if col == k - 1 { width - x } else { base_w };
            rects.push(SegmentRect {
                row,
                col,
                x,
                y,
                width: w,
                height: h,
            });
        }
    }
    Ok(rects)
}

/// Score breakdown for one grid segment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SegmentScore {
    pub row: usize,
    pub col: usize,
    /// Histogram entropy in bits, in `[0, 5]`.
    pub entropy: f64,
    /// Mean intensity divided by 255, in `[0, 1]`.
    pub mean_saliency: f64,
    /// Gaussian center falloff, in `(0, 1]`.
    pub center_bias: f64,
    /// Mean depth, in `[0, 1]`; zero when no depth map is supplied.
    pub depth: f64,
    /// Weighted sum of the four components.
    pub score: f64,
}

/// Histogram bin for an intensity, given how many levels the map may hold.
///
/// Quantized maps (32 or fewer levels) index bins directly; full-range maps
/// fold their values down so the 32 bins cover the whole intensity range.
fn entropy_bin(value: u8, levels: u32) -> usize {
    if levels <= ENTROPY_BINS {
        value as usize
    } else {
        (value as usize * ENTROPY_BINS as usize) / levels as usize
    }
}

/// Shannon entropy in bits of the intensity histogram over a segment.
fn segment_entropy(map: &SaliencyMap, rect: &SegmentRect) -> f64 {
    let mut counts = [0u32; ENTROPY_BINS as usize];
    let levels = map.levels();
    let values = map.values();
    for y in rect.y..rect.y + rect.height {
        let row = &values[y * map.width()..y * map.width() + map.width()];
        for x in rect.x..rect.x + rect.width {
            counts[entropy_bin(row[x], levels)] += 1;
        }
    }
    let total = (rect.width * rect.height) as f64;
    let mut h = 0.0;
    for &c in &counts {
        if c > 0 {
            let p = f64::from(c) / total;
            h -= p * libm::log2(p);
        }
    }
    h
}

fn segment_mean(map: &SaliencyMap, rect: &SegmentRect) -> f64 {
    let mut sum = 0u64;
    let values = map.values();
    for y in rect.y..rect.y + rect.height {
        for x in rect.x..rect.x + rect.width {
            sum += u64::from(values[y * map.width() + x]);
        }
    }
    sum as f64 / (rect.width * rect.height) as f64
}

fn depth_mean(depth: &DepthMap, rect: &SegmentRect) -> f64 {
    let mut sum = 0.0;
    for y in rect.y..rect.y + rect.height {
        for x in rect.x..rect.x + rect.width {
            sum += depth.get(x, y);
        }
    }
    sum / (rect.width * rect.height) as f64
}

fn center_bias(rect: &SegmentRect, width: usize, height: usize) -> f64 {
    let (cx, cy) = rect.center();
    let ix = width as f64 / 2.0;
    let iy = height as f64 / 2.0;
    let d2 = (cx - ix) * (cx - ix) + (cy - iy) * (cy - iy);
    let diag = libm::sqrt((width * width + height * height) as f64);
    let sigma = diag / 6.0;
    libm::exp(-d2 / (2.0 * sigma * sigma))
}

/// Scores one segment of the map.
///
/// A positive depth weight requires a depth map of matching dimensions.
pub fn score_segment(
    map: &SaliencyMap,
    rect: &SegmentRect,
    weights: &ScoreWeights,
    depth: Option<&DepthMap>,
) -> Result<SegmentScore> {
    weights.validate()?;
    if let Some(d) = depth {
        if d.width() != map.width() || d.height() != map.height() {
            return Err(Error::DimensionMismatch {
                expected: (map.width(), map.height()),
                got: (d.width(), d.height()),
            });
        }
    } else if weights.depth > 0.0 {
        return Err(Error::InvalidConfig(
            "depth weight is positive but no depth map was supplied".into(),
        ));
    }
    let entropy = segment_entropy(map, rect);
    let mean_saliency = segment_mean(map, rect) / 255.0;
    let cb = center_bias(rect, map.width(), map.height());
    let ds = depth.map_or(0.0, |d| depth_mean(d, rect));
    let score = weights.entropy * entropy
        + weights.saliency * mean_saliency
        + weights.center_bias * cb
        + weights.depth * ds;
    Ok(SegmentScore {
        row: rect.row,
        col: rect.col,
        entropy,
        mean_saliency,
        center_bias: cb,
        depth: ds,
        score,
    })
}

/// Scores every segment of the grid, in row-major order.
pub fn score_segments(
    map: &SaliencyMap,
    cfg: &GridConfig,
    depth: Option<&DepthMap>,
) -> Result<Vec<SegmentScore>> {
    let rects = build_grid(map.width(), map.height(), cfg.k)?;
    rects
        .iter()
        .map(|rect| score_segment(map, rect, &cfg.weights, depth))
        .collect()
}

/// One ranked item: rank 1 is the most salient.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankEntry {
    pub id: String,
    pub score: f64,
    pub rank: usize,
}

/// Items ordered by descending score; ranks run 1..=len with no gaps.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RankList {
    entries: Vec<RankEntry>,
}

impl RankList {
    /// Ranks scored items, breaking score ties by ascending id.
    pub fn from_scores(items: Vec<(String, f64)>) -> Self {
        let indexed = items
            .into_iter()
            .map(|(id, score)| (id, score, 0))
            .collect();
        Self::from_scores_with_tiebreak(indexed, true)
    }

    /// Ranks scored items, breaking score ties by the supplied index.
    pub(crate) fn from_scores_indexed(items: Vec<(String, f64, usize)>) -> Self {
        Self::from_scores_with_tiebreak(items, false)
    }

    fn from_scores_with_tiebreak(mut items: Vec<(String, f64, usize)>, by_id: bool) -> Self {
        items.sort_by(|a, b| {
            b.1.total_cmp(&a.1).then_with(|| {
                if by_id {
                    a.0.cmp(&b.0)
                } else {
                    a.2.cmp(&b.2)
                }
            })
        });
        let entries = items
            .into_iter()
            .enumerate()
            .map(|(i, (id, score, _))| RankEntry {
                id,
                score,
                rank: i + 1,
            })
            .collect();
        Self { entries }
    }

    /// Entries in rank order (best first).
    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rank of the item with this id, if present.
    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.id == id).map(|e| e.rank)
    }

    /// Score of the item with this id, if present.
    pub fn score_of(&self, id: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.id == id).map(|e| e.score)
    }
}

/// Ranks all grid segments of a map. Segment ids are `r{row}c{col}`; score
/// ties fall back to row-major grid order.
pub fn rank_segments(
    map: &SaliencyMap,
    cfg: &GridConfig,
    depth: Option<&DepthMap>,
) -> Result<RankList> {
    let scores = score_segments(map, cfg, depth)?;
    let items = scores
        .into_iter()
        .enumerate()
        .map(|(i, s)| (alloc::format!("r{}c{}", s.row, s.col), s.score, i))
        .collect();
    Ok(RankList::from_scores_indexed(items))
}

/// A binary pixel mask naming one interface element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementMask {
    id: String,
    width: usize,
    height: usize,
    pixels: Vec<bool>,
}

impl ElementMask {
    /// Wraps a row-major pixel mask. At least one pixel must be set.
    pub fn new(id: impl Into<String>, width: usize, height: usize, pixels: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyInput("mask dimensions"));
        }
        if pixels.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                got: pixels.len(),
            });
        }
        if !pixels.iter().any(|&p| p) {
            return Err(Error::EmptyInput("mask pixels"));
        }
        Ok(Self {
            id: id.into(),
            width,
            height,
            pixels,
        })
    }

    /// Builds a mask by evaluating a predicate at every `(x, y)`.
    pub fn from_fn(
        id: impl Into<String>,
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(id, width, height, pixels)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Whether `(x, y)` is inside the element; out-of-bounds is outside.
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height && self.pixels[y * self.width + x]
    }

    /// Whether a continuous point falls inside the element after rounding
    /// to the nearest pixel. Non-finite and out-of-bounds points are
    /// outside.
    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        if !x.is_finite() || !y.is_finite() {
            return false;
        }
        let px = libm::round(x);
        let py = libm::round(y);
        if px < 0.0 || py < 0.0 {
            return false;
        }
        self.contains(px as usize, py as usize)
    }

    /// Number of set pixels (always at least 1).
    pub fn pixel_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    /// Set pixels in row-major order.
    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let width = self.width;
        self.pixels
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(move |(i, _)| (i % width, i / width))
    }
}

/// Ranks element masks by pooling segment scores under each mask.
///
/// A mask's score is the mean segment score over its pixels, each pixel
/// contributing the score of the grid segment it falls in. Masks must match
/// the map's dimensions and carry unique ids; score ties break by ascending
/// id.
pub fn rank_masks(
    map: &SaliencyMap,
    cfg: &GridConfig,
    masks: &[ElementMask],
    depth: Option<&DepthMap>,
) -> Result<RankList> {
    if masks.is_empty() {
        return Err(Error::EmptyInput("element masks"));
    }
    for m in masks {
        if m.width() != map.width() || m.height() != map.height() {
            return Err(Error::DimensionMismatch {
                expected: (map.width(), map.height()),
                got: (m.width(), m.height()),
            });
        }
    }
    for (i, a) in masks.iter().enumerate() {
        if masks[i + 1..].iter().any(|b| a.id() == b.id()) {
            return Err(Error::InvalidConfig(alloc::format!(
                "duplicate mask id {:?}",
                a.id()
            )));
        }
    }
    let scores = score_segments(map, cfg, depth)?;
    let k = cfg.k;
    let base_w = map.width() / k;
    let base_h = map.height() / k;
    let items = masks
        .iter()
        .map(|mask| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for (x, y) in mask.iter_set() {
                let col = (x / base_w).min(k - 1);
                let row = (y / base_h).min(k - 1);
                sum += scores[row * k + col].score;
                count += 1;
            }
            (String::from(mask.id()), sum / count as f64)
        })
        .collect();
    Ok(RankList::from_scores(items))
}
