//! Ranking evaluation: Spearman correlation, salient object ranking (SOR)
//! scores, shuffled AUC, and fixation-derived ground-truth ranks.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::map::SaliencyMap;
use crate::sara::{self, ElementMask, GridConfig, RankList};
use crate::DepthMap;

/// A predicted and a ground-truth rank vector over the same items.
#[derive(Debug, Clone, PartialEq)]
pub struct RankPair {
    predicted: Vec<f64>,
    ground_truth: Vec<f64>,
}

impl RankPair {
    /// Pairs two rank (or score) vectors. Both must have the same length,
    /// at least two items, and only finite values.
    pub fn new(predicted: Vec<f64>, ground_truth: Vec<f64>) -> Result<Self> {
        if predicted.len() != ground_truth.len() {
            return Err(Error::LengthMismatch {
                expected: predicted.len(),
                got: ground_truth.len(),
            });
        }
        if predicted.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: predicted.len(),
            });
        }
        if predicted
            .iter()
            .chain(ground_truth.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFiniteInput("rank values"));
        }
        Ok(Self {
            predicted,
            ground_truth,
        })
    }

    pub fn len(&self) -> usize {
        self.predicted.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Ascending fractional ranks: the smallest value gets rank 1 and tied
/// values share the mean of the ranks they would occupy.
pub fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j+1 share their mean.
        let shared = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Descending fractional ranks: the largest value gets rank 1.
pub fn fractional_ranks_desc(values: &[f64]) -> Vec<f64> {
    let negated: Vec<f64> = values.iter().map(|&v| -v).collect();
    fractional_ranks(&negated)
}

fn has_duplicates(ranks: &[f64]) -> bool {
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).any(|w| w[0] == w[1])
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let mean_a: f64 = a.iter().sum::<f64>() / n;
    let mean_b: f64 = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        // No variation on one side: no monotone association to measure.
        return 0.0;
    }
    cov / libm::sqrt(var_a * var_b)
}

/// Spearman rank correlation coefficient.
///
/// Inputs are converted to fractional ranks first (a no-op when they already
/// are ranks). Without ties the classic sum-of-squared-differences form is
/// used; with ties the coefficient is the Pearson correlation of the rank
/// vectors. A side with zero variance yields 0.
pub fn srcc(pair: &RankPair) -> f64 {
    let a = fractional_ranks(&pair.predicted);
    let b = fractional_ranks(&pair.ground_truth);
    if has_duplicates(&a) || has_duplicates(&b) {
        return pearson(&a, &b);
    }
    let n = a.len() as f64;
    let d2: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

/// Salient object ranking score: Spearman correlation mapped to `[0, 1]`.
pub fn sor(pair: &RankPair) -> f64 {
    (srcc(pair) + 1.0) / 2.0
}

/// One detected or recorded fixation in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FixationPoint {
    pub t_ms: f64,
    pub x: f64,
    pub y: f64,
}

/// Ground-truth ranks from fixations: elements are ordered by the time of
/// the first fixation that lands inside them.
///
/// Never-fixated masks are excluded. Each entry's score is the negated
/// first-arrival time, so scores are non-increasing with rank; exact ties in
/// arrival time fall back to ascending id.
pub fn gt_ranks_from_fixations(masks: &[ElementMask], fixations: &[FixationPoint]) -> RankList {
    let mut items: Vec<(String, f64)> = Vec::new();
    for mask in masks {
        let mut first: Option<f64> = None;
        for f in fixations {
            if mask.contains_point(f.x, f.y) {
                first = Some(match first {
                    Some(t) => t.min(f.t_ms),
                    None => f.t_ms,
                });
            }
        }
        if let Some(t) = first {
            items.push((String::from(mask.id()), -t));
        }
    }
    RankList::from_scores(items)
}

/// Shuffled AUC of a saliency map against positive and negative point sets.
///
/// Both sets are sampled from the map at their rounded, clamped pixel
/// coordinates. The statistic is the rank-based AUC, with tied values
/// counted as half, so it is invariant under strictly monotone transforms
/// of the map and equals exactly 0.5 for a constant map.
pub fn shuffled_auc(
    map: &SaliencyMap,
    positives: &[(f64, f64)],
    negatives: &[(f64, f64)],
) -> Result<f64> {
    if positives.is_empty() {
        return Err(Error::EmptyInput("positive points"));
    }
    if negatives.is_empty() {
        return Err(Error::EmptyInput("negative points"));
    }
    let sample = |&(x, y): &(f64, f64)| -> Result<f64> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFiniteInput("point coordinates"));
        }
        let px = libm::round(x).clamp(0.0, (map.width() - 1) as f64) as usize;
        let py = libm::round(y).clamp(0.0, (map.height() - 1) as f64) as usize;
        Ok(f64::from(map.get(px, py)))
    };
    let mut values = Vec::with_capacity(positives.len() + negatives.len());
    for p in positives {
        values.push(sample(p)?);
    }
    for n in negatives {
        values.push(sample(n)?);
    }
    let ranks = fractional_ranks(&values);
    let p = positives.len() as f64;
    let n = negatives.len() as f64;
    let rank_sum: f64 = ranks[..positives.len()].iter().sum();
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// SOR for a single image, or `None` when fewer than two masks were fixated.
///
/// Predicted ranks come from mask ranking restricted to the fixated masks;
/// ground truth is the first-arrival order.
pub fn evaluate_image(
    map: &SaliencyMap,
    cfg: &GridConfig,
    masks: &[ElementMask],
    fixations: &[FixationPoint],
    depth: Option<&DepthMap>,
) -> Result<Option<f64>> {
    let predicted = sara::rank_masks(map, cfg, masks, depth)?;
    let gt = gt_ranks_from_fixations(masks, fixations);
    if gt.len() < 2 {
        return Ok(None);
    }
    let mut pred_scores = Vec::with_capacity(gt.len());
    let mut gt_ranks = Vec::with_capacity(gt.len());
    for entry in gt.entries() {
        // Every ground-truth id comes from `masks`, so the lookup succeeds.
        pred_scores.push(predicted.score_of(&entry.id).unwrap());
        gt_ranks.push(entry.rank as f64);
    }
    let pred_ranks = fractional_ranks_desc(&pred_scores);
    let pair = RankPair::new(pred_ranks, gt_ranks)?;
    Ok(Some(sor(&pair)))
}

/// Per-image SOR for one dataset entry.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImageSor {
    pub id: String,
    pub sor: f64,
}

/// Aggregate of per-image SOR scores.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalResult {
    pub per_image: Vec<ImageSor>,
    /// Mean SOR over scored images; `None` when nothing was scored.
    pub mean_sor: Option<f64>,
    pub images_used: usize,
}

impl EvalResult {
    pub fn from_per_image(per_image: Vec<ImageSor>) -> Self {
        let images_used = per_image.len();
        let mean_sor = if per_image.is_empty() {
            None
        } else {
            Some(per_image.iter().map(|i| i.sor).sum::<f64>() / images_used as f64)
        };
        Self {
            per_image,
            mean_sor,
            images_used,
        }
    }
}
