//! Gaze and mouse logs, and dispersion-based fixation detection.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Self-reported participant gender.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Gender {
    Male,
    Female,
    Other,
    RatherNotSay,
}

/// Experiment arm: control sees the original interface, experimental the
/// redesigned one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum Group {
    Ctrl,
    Expr,
}

impl Group {
    pub fn as_str(&self) -> &'static str {
        match self {
            Group::Ctrl => "CTRL",
            Group::Expr => "EXPR",
        }
    }
}

/// What produced a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SampleKind {
    Gaze,
    Mouse,
    Click,
}

/// One timestamped position sample.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sample {
    pub t_ms: f64,
    pub x: f64,
    pub y: f64,
    pub kind: SampleKind,
    /// Marks blinks and moments when the pointer left the viewport. The
    /// coordinates of off-screen samples carry no meaning.
    pub off_screen: bool,
}

/// One participant's recording for one stimulus image.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GazeLog {
    pub participant_id: String,
    pub age: u32,
    pub gender: Gender,
    pub group: Group,
    /// Stimulus image id this session was recorded on.
    pub image: String,
    pub samples: Vec<Sample>,
}

impl GazeLog {
    /// Validates and wraps a recording: timestamps must be finite and
    /// non-decreasing, and on-screen samples must have finite coordinates.
    pub fn new(
        participant_id: impl Into<String>,
        age: u32,
        gender: Gender,
        group: Group,
        image: impl Into<String>,
        samples: Vec<Sample>,
    ) -> Result<Self> {
        validate_samples(&samples)?;
        Ok(Self {
            participant_id: participant_id.into(),
            age,
            gender,
            group,
            image: image.into(),
            samples,
        })
    }

    /// Samples of the given kinds, preserving order.
    pub fn samples_of_kind(&self, kinds: &[SampleKind]) -> Vec<Sample> {
        self.samples
            .iter()
            .filter(|s| kinds.contains(&s.kind))
            .copied()
            .collect()
    }
}

fn validate_samples(samples: &[Sample]) -> Result<()> {
    let mut last_t = f64::NEG_INFINITY;
    for s in samples {
        if !s.t_ms.is_finite() {
            return Err(Error::NonFiniteInput("sample timestamp"));
        }
        if s.t_ms < last_t {
            return Err(Error::InvalidConfig(
                "sample timestamps must be non-decreasing".into(),
            ));
        }
        last_t = s.t_ms;
        if !s.off_screen && (!s.x.is_finite() || !s.y.is_finite()) {
            return Err(Error::NonFiniteInput("on-screen sample coordinates"));
        }
    }
    Ok(())
}

/// A dispersion-grouped dwell at one location.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Fixation {
    pub t_start_ms: f64,
    pub duration_ms: f64,
    /// Centroid of the grouped samples.
    pub x: f64,
    pub y: f64,
}

impl Fixation {
    pub fn t_end_ms(&self) -> f64 {
        self.t_start_ms + self.duration_ms
    }
}

/// Thresholds for dispersion-based fixation detection.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FixationConfig {
    /// Maximum bounding-box dispersion `(max x - min x) + (max y - min y)`
    /// a fixation window may span, in pixels.
    pub dispersion_px: f64,
    /// Minimum window duration; a zero threshold admits single-sample
    /// fixations of zero duration.
    pub min_duration_ms: f64,
}

impl Default for FixationConfig {
    fn default() -> Self {
        Self {
            dispersion_px: 25.0,
            min_duration_ms: 100.0,
        }
    }
}

impl FixationConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.dispersion_px.is_finite() || self.dispersion_px < 0.0 {
            return Err(Error::InvalidConfig(alloc::format!(
                "dispersion must be non-negative and finite, got {}",
                self.dispersion_px
            )));
        }
        if !self.min_duration_ms.is_finite() || self.min_duration_ms < 0.0 {
            return Err(Error::InvalidConfig(alloc::format!(
                "minimum duration must be non-negative and finite, got {}",
                self.min_duration_ms
            )));
        }
        Ok(())
    }
}

/// Detects fixations with the dispersion-threshold (I-DT) algorithm.
///
/// A window starting at a sample grows while the bounding-box dispersion of
/// its positions stays at or below `dispersion_px`. When the window can no
/// longer grow, it becomes a fixation if it spans at least
/// `min_duration_ms`; its position is the centroid of the window and its
/// duration is last sample time minus first. Otherwise the window start
/// advances by one sample. Off-screen samples never join a window, so a
/// blink or a pointer leaving the viewport splits dwells on both sides of
/// the gap. The sample kind is ignored; filter beforehand when only one
/// modality should contribute.
pub fn detect_fixations(samples: &[Sample], cfg: &FixationConfig) -> Result<Vec<Fixation>> {
    cfg.validate()?;
    validate_samples(samples)?;
    let mut fixations = Vec::new();
    let mut run: Vec<&Sample> = Vec::new();
    for s in samples {
        if s.off_screen {
            detect_in_run(&run, cfg, &mut fixations);
            run.clear();
        } else {
            run.push(s);
        }
    }
    detect_in_run(&run, cfg, &mut fixations);
    Ok(fixations)
}

fn detect_in_run(run: &[&Sample], cfg: &FixationConfig, out: &mut Vec<Fixation>) {
    let n = run.len();
    let mut i = 0;
    while i < n {
        let mut min_x = run[i].x;
        let mut max_x = run[i].x;
        let mut min_y = run[i].y;
        let mut max_y = run[i].y;
        let mut j = i + 1;
        while j < n {
            let nx_min = min_x.min(run[j].x);
            let nx_max = max_x.max(run[j].x);
            let ny_min = min_y.min(run[j].y);
            let ny_max = max_y.max(run[j].y);
            if (nx_max - nx_min) + (ny_max - ny_min) > cfg.dispersion_px {
                break;
            }
            min_x = nx_min;
            max_x = nx_max;
            min_y = ny_min;
            max_y = ny_max;
            j += 1;
        }
        let duration = run[j - 1].t_ms - run[i].t_ms;
        if duration >= cfg.min_duration_ms {
            let count = (j - i) as f64;
            let cx = run[i..j].iter().map(|s| s.x).sum::<f64>() / count;
            let cy = run[i..j].iter().map(|s| s.y).sum::<f64>() / count;
            out.push(Fixation {
                t_start_ms: run[i].t_ms,
                duration_ms: duration,
                x: cx,
                y: cy,
            });
            i = j;
        } else {
            i += 1;
        }
    }
}
