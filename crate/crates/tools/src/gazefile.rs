//! JSON gaze-log files.
//!
//! A log file holds one recording object or an array of them:
//!
//! ```json
//! {
//!   "participant": {"id": "p01", "age": 24, "gender": "female", "group": "CTRL"},
//!   "image": "img_01",
//!   "samples": [
//!     {"t": 0, "x": 512.0, "y": 300.0, "kind": "gaze"},
//!     {"t": 16, "x": -1.0, "y": -1.0, "kind": "mouse"}
//!   ]
//! }
//! ```
//!
//! `gender` is one of `male`, `female`, `other`, `rather_not_say`; `group`
//! is `CTRL` or `EXPR`; `kind` is `gaze`, `mouse`, or `click` (all three
//! case-insensitive). Timestamps are milliseconds and must be
//! non-decreasing. A sample with any negative coordinate, or with
//! `"off_screen": true` set explicitly, is kept but flagged off-screen so
//! blinks and pointer exits split fixations without losing the timeline.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sara_core::gaze::{GazeLog, Gender, Group, Sample, SampleKind};
use serde::Deserialize;

#[derive(Deserialize)]
struct ParticipantJson {
    id: String,
    age: u32,
    gender: String,
    group: String,
}

#[derive(Deserialize)]
struct SampleJson {
    t: f64,
    x: f64,
    y: f64,
    kind: String,
    #[serde(default)]
    off_screen: bool,
}

#[derive(Deserialize)]
struct LogJson {
    participant: ParticipantJson,
    image: String,
    samples: Vec<SampleJson>,
}


fn parse_gender(s: &str) -> Result<Gender> {
    match s.to_ascii_lowercase().as_str() {
        "male" => Ok(Gender::Male),
        "female" => Ok(Gender::Female),
        "other" => Ok(Gender::Other),
        "rather_not_say" => Ok(Gender::RatherNotSay),
        other => bail!("unknown gender {other:?} (expected male, female, other, rather_not_say)"),
    }
}

fn parse_group(s: &str) -> Result<Group> {
    match s.to_ascii_uppercase().as_str() {
        "CTRL" => Ok(Group::Ctrl),
        "EXPR" => Ok(Group::Expr),
        other => bail!("unknown group {other:?} (expected CTRL or EXPR)"),
    }
}

fn parse_kind(s: &str) -> Result<SampleKind> {
    match s.to_ascii_lowercase().as_str() {
        "gaze" => Ok(SampleKind::Gaze),
        "mouse" => Ok(SampleKind::Mouse),
        "click" => Ok(SampleKind::Click),
        other => bail!("unknown sample kind {other:?} (expected gaze, mouse, click)"),
    }
}

fn into_log(json: LogJson) -> Result<GazeLog> {
    let gender = parse_gender(&json.participant.gender)
        .with_context(|| format!("participant {}", json.participant.id))?;
    let group = parse_group(&json.participant.group)
        .with_context(|| format!("participant {}", json.participant.id))?;
    let samples: Vec<Sample> = json
        .samples
        .into_iter()
        .map(|s| {
            let kind = parse_kind(&s.kind)?;
            Ok(Sample {
                t_ms: s.t,
                x: s.x,
                y: s.y,
                kind,
                off_screen: s.off_screen || s.x < 0.0 || s.y < 0.0,
            })
        })
        .collect::<Result<_>>()
        .with_context(|| format!("participant {}", json.participant.id))?;
    GazeLog::new(
        json.participant.id.clone(),
        json.participant.age,
        gender,
        group,
        json.image,
        samples,
    )
    .with_context(|| format!("participant {}", json.participant.id))
}

/// Parses one gaze-log file holding a single recording.
pub fn parse_gaze_log(path: &Path) -> Result<GazeLog> {
    let mut logs = parse_gaze_file(path)?;
    if logs.len() != 1 {
        bail!(
            "{} holds {} recordings, expected exactly one",
            path.display(),
            logs.len()
        );
    }
    Ok(logs.pop().unwrap())
}

/// Parses one gaze-log file holding a single recording or an array of them.
pub fn parse_gaze_file(path: &Path) -> Result<Vec<GazeLog>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    // Sniff the shape instead of using an untagged enum so schema errors
    // keep serde's field names and line numbers.
    let is_array = text.trim_start().starts_with('[');
    let jsons: Vec<LogJson> = if is_array {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    } else {
        vec![serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?]
    };
    jsons
        .into_iter()
        .map(|j| into_log(j).with_context(|| format!("in {}", path.display())))
        .collect()
}

/// Loads every recording under a path.
///
/// A file is parsed directly; a directory contributes every `*.json` inside
/// it, in filename order.
pub fn load_gaze_logs(path: &Path) -> Result<Vec<GazeLog>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .with_context(|| format!("reading log directory {}", path.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("json"))
            })
            .collect();
        files.sort();
        if files.is_empty() {
            bail!("log directory {} contains no JSON files", path.display());
        }
        let mut logs = Vec::new();
        for file in files {
            logs.extend(parse_gaze_file(&file)?);
        }
        Ok(logs)
    } else {
        parse_gaze_file(path)
    }
}
