//! Area-of-interest attention metrics and the two-group comparison report.
//!
//! An AOI is an [`ElementMask`] naming one interface region. Metrics are
//! computed per participant from detected fixations and then averaged over
//! the group, mirroring how attention dashboards report dwell statistics.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gaze::{detect_fixations, Fixation, FixationConfig, GazeLog};
use crate::sara::ElementMask;

/// Viewing window and fixation thresholds for AOI analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AoiConfig {
    /// Length of the stimulus presentation; dwell percentages are relative
    /// to it.
    pub viewing_duration_ms: f64,
    pub fixation: FixationConfig,
}

impl Default for AoiConfig {
    fn default() -> Self {
        Self {
            viewing_duration_ms: 10_000.0,
            fixation: FixationConfig::default(),
        }
    }
}

impl AoiConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.viewing_duration_ms.is_finite() || self.viewing_duration_ms <= 0.0 {
            return Err(Error::InvalidConfig(alloc::format!(
                "viewing duration must be positive and finite, got {}",
                self.viewing_duration_ms
            )));
        }
        self.fixation.validate()
    }
}

/// Group-averaged attention metrics for one AOI.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AoiGroupMetrics {
    pub participants: usize,
    /// Mean percentage of the viewing window spent fixating the AOI.
    pub time_viewed_pct: f64,
    /// Mean number of fixations landing in the AOI.
    pub avg_fixations: f64,
    /// Percentage of participants who visited the AOI at least twice.
    pub revisitors_pct: f64,
    /// Mean number of return visits among participants who visited at all.
    pub avg_revisits: f64,
    /// Mean time of the first fixation in the AOI, in seconds; absent when
    /// nobody viewed it.
    pub avg_first_view_s: Option<f64>,
}

struct ParticipantStats {
    time_in_ms: f64,
    fixation_count: usize,
    visits: usize,
    first_view_ms: Option<f64>,
}

fn participant_stats(fixations: &[Fixation], aoi: &ElementMask) -> ParticipantStats {
    let mut time_in_ms = 0.0;
    let mut fixation_count = 0;
    let mut visits = 0;
    let mut first_view_ms = None;
    let mut previous_inside = false;
    for f in fixations {
        let inside = aoi.contains_point(f.x, f.y);
        if inside {
            time_in_ms += f.duration_ms;
            fixation_count += 1;
            if first_view_ms.is_none() {
                first_view_ms = Some(f.t_start_ms);
            }
            if !previous_inside {
                visits += 1;
            }
        }
        previous_inside = inside;
    }
    ParticipantStats {
        time_in_ms,
        fixation_count,
        visits,
        first_view_ms,
    }
}

/// Computes group metrics for one AOI, or `None` when no logs were given.
///
/// Fixations are detected over every sample in each log regardless of kind
/// (logs are single-modality in practice). A visit is a maximal run of
/// consecutive fixations inside the AOI; a participant revisits when they
/// have at least two visits.
pub fn aoi_metrics(
    logs: &[GazeLog],
    aoi: &ElementMask,
    cfg: &AoiConfig,
) -> Result<Option<AoiGroupMetrics>> {
    cfg.validate()?;
    if logs.is_empty() {
        return Ok(None);
    }
    let n = logs.len() as f64;
    let mut pct_sum = 0.0;
    let mut fix_sum = 0.0;
    let mut revisitors = 0usize;
    let mut visitors = 0usize;
    let mut revisit_sum = 0.0;
    let mut first_views_s: Vec<f64> = Vec::new();
    for log in logs {
        let fixations = detect_fixations(&log.samples, &cfg.fixation)?;
        let stats = participant_stats(&fixations, aoi);
        pct_sum += stats.time_in_ms * 100.0 / cfg.viewing_duration_ms;
        fix_sum += stats.fixation_count as f64;
        if stats.visits >= 2 {
            revisitors += 1;
        }
        if stats.visits >= 1 {
            visitors += 1;
            revisit_sum += (stats.visits - 1) as f64;
        }
        if let Some(t) = stats.first_view_ms {
            first_views_s.push(t / 1000.0);
        }
    }
    let avg_first_view_s = if first_views_s.is_empty() {
        None
    } else {
        Some(first_views_s.iter().sum::<f64>() / first_views_s.len() as f64)
    };
    Ok(Some(AoiGroupMetrics {
        participants: logs.len(),
        time_viewed_pct: pct_sum / n,
        avg_fixations: fix_sum / n,
        revisitors_pct: revisitors as f64 * 100.0 / n,
        avg_revisits: if visitors == 0 {
            0.0
        } else {
            revisit_sum / visitors as f64
        },
        avg_first_view_s,
    }))
}

/// Which group a metric favors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum MetricWinner {
    Ctrl,
    Expr,
    Tie,
}

/// Per-metric winners for one AOI comparison.
///
/// For dwell time, fixation count, revisitor share, and revisits the group
/// with the lower value wins (less attention drawn to the region). For first
/// view time and saliency rank the higher value wins (attention arrives
/// later, placement is less salient); a group that never viewed the AOI
/// wins the first-view comparison outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AoiWinners {
    pub time_viewed: MetricWinner,
    pub avg_fixations: MetricWinner,
    pub revisitors: MetricWinner,
    pub avg_revisits: MetricWinner,
    pub first_view: MetricWinner,
    pub sara_rank: MetricWinner,
}

/// Side-by-side attention metrics for one AOI across the two groups.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AoiReport {
    pub aoi_id: String,
    pub ctrl: AoiGroupMetrics,
    pub expr: AoiGroupMetrics,
    /// Saliency rank of the AOI in each interface variant, when known.
    pub sara_rank_ctrl: Option<usize>,
    pub sara_rank_expr: Option<usize>,
    pub winners: AoiWinners,
}

fn lower_wins(ctrl: f64, expr: f64) -> MetricWinner {
    if ctrl < expr {
        MetricWinner::Ctrl
    } else if expr < ctrl {
        MetricWinner::Expr
    } else {
        MetricWinner::Tie
    }
}

fn later_first_view_wins(ctrl: Option<f64>, expr: Option<f64>) -> MetricWinner {
    match (ctrl, expr) {
        (None, None) => MetricWinner::Tie,
        (None, Some(_)) => MetricWinner::Ctrl,
        (Some(_), None) => MetricWinner::Expr,
        (Some(c), Some(e)) => lower_wins(e, c),
    }
}

fn higher_rank_wins(ctrl: Option<usize>, expr: Option<usize>) -> MetricWinner {
    match (ctrl, expr) {
        (Some(c), Some(e)) if c > e => MetricWinner::Ctrl,
        (Some(c), Some(e)) if e > c => MetricWinner::Expr,
        _ => MetricWinner::Tie,
    }
}

/// Compares AOI attention between the control and experimental groups.
///
/// Both groups must contain at least one log. Saliency ranks are optional
/// context from ranking the respective interface variants; when either is
/// missing the rank comparison is a tie.
pub fn attention_shift_report(
    ctrl_logs: &[GazeLog],
    expr_logs: &[GazeLog],
    aoi: &ElementMask,
    sara_rank_ctrl: Option<usize>,
    sara_rank_expr: Option<usize>,
    cfg: &AoiConfig,
) -> Result<AoiReport> {
    if ctrl_logs.is_empty() {
        return Err(Error::EmptyInput("control group logs"));
    }
    if expr_logs.is_empty() {
        return Err(Error::EmptyInput("experimental group logs"));
    }
    let ctrl = aoi_metrics(ctrl_logs, aoi, cfg)?.unwrap();
    let expr = aoi_metrics(expr_logs, aoi, cfg)?.unwrap();
    let winners = AoiWinners {
        time_viewed: lower_wins(ctrl.time_viewed_pct, expr.time_viewed_pct),
        avg_fixations: lower_wins(ctrl.avg_fixations, expr.avg_fixations),
        revisitors: lower_wins(ctrl.revisitors_pct, expr.revisitors_pct),
        avg_revisits: lower_wins(ctrl.avg_revisits, expr.avg_revisits),
        first_view: later_first_view_wins(ctrl.avg_first_view_s, expr.avg_first_view_s),
        sara_rank: higher_rank_wins(sara_rank_ctrl, sara_rank_expr),
    };
    Ok(AoiReport {
        aoi_id: String::from(aoi.id()),
        ctrl,
        expr,
        sara_rank_ctrl,
        sara_rank_expr,
        winners,
    })
}
