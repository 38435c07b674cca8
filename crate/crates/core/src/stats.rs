//! Nonparametric group comparisons for demographic attention analysis.
//!
//! Coordinates from gaze or click logs rarely satisfy normality, so group
//! differences are tested with rank-based methods: Kruskal-Wallis across
//! age bins (with an epsilon-squared effect size), Mann-Whitney U for two
//! groups, and Levene's test as the variance-homogeneity check run before
//! Kruskal-Wallis.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gaze::{GazeLog, Group, SampleKind};
use crate::metrics::fractional_ranks;
use crate::special::{chi_square_sf, f_dist_sf, normal_cdf};

/// Labeled groups of one-dimensional samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSamples {
    labels: Vec<String>,
    groups: Vec<Vec<f64>>,
}

impl GroupedSamples {
    /// Builds grouped samples; labels must be unique, every group non-empty,
    /// and every value finite.
    pub fn new(labels: Vec<String>, groups: Vec<Vec<f64>>) -> Result<Self> {
        if labels.len() != groups.len() {
            return Err(Error::LengthMismatch {
                expected: labels.len(),
                got: groups.len(),
            });
        }
        if groups.is_empty() {
            return Err(Error::EmptyInput("groups"));
        }
        for (i, a) in labels.iter().enumerate() {
            for b in labels.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::InvalidConfig(format!("duplicate group label {a:?}")));
                }
            }
        }
        for (label, group) in labels.iter().zip(&groups) {
            if group.is_empty() {
                return Err(Error::InvalidConfig(format!("group {label:?} is empty")));
            }
            if group.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteInput("group sample"));
            }
        }
        Ok(Self { labels, groups })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn groups(&self) -> &[Vec<f64>] {
        &self.groups
    }

    pub fn total_len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }
}

/// Outcome of one hypothesis test.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Epsilon-squared for Kruskal-Wallis; absent for the other tests.
    pub effect_size: Option<f64>,
    pub significant: bool,
    pub alpha: f64,
    pub warnings: Vec<String>,
}

impl TestResult {
    fn new(statistic: f64, p_value: f64, effect_size: Option<f64>, alpha: f64) -> Self {
        Self {
            statistic,
            p_value,
            effect_size,
            significant: p_value < alpha,
            alpha,
            warnings: Vec::new(),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::OutOfRange("alpha must lie in (0, 1)"));
    }
    Ok(())
}

/// Sum of t^3 - t over tie groups in a sorted slice.
fn tie_term(sorted: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        total += t * t * t - t;
        i = j;
    }
    total
}

/// Epsilon-squared effect size for a Kruskal-Wallis H over n observations,
/// clamped to [0, 1].
pub fn epsilon_squared(h: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if !h.is_finite() || h < 0.0 {
        return Err(Error::OutOfRange("H statistic must be finite and non-negative"));
    }
    let n = n as f64;
    let eps = h * (n + 1.0) / (n * n - 1.0);
    Ok(eps.clamp(0.0, 1.0))
}

/// Kruskal-Wallis H test across two or more groups.
///
/// H is computed on pooled fractional ranks with the standard tie
/// correction; the p-value is the chi-squared upper tail with g - 1 degrees
/// of freedom. The chi-squared approximation thins out for small samples,
/// so a warning is attached below 15 total observations.
pub fn kruskal_wallis(samples: &GroupedSamples, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let g = samples.groups().len();
    if g < 2 {
        return Err(Error::InsufficientData { needed: 2, got: g });
    }
    let n = samples.total_len();
    if n < 3 {
        return Err(Error::InsufficientData { needed: 3, got: n });
    }
    let pooled: Vec<f64> = samples.groups().iter().flatten().copied().collect();
    let ranks = fractional_ranks(&pooled);
    let nf = n as f64;
    let mut h = 0.0;
    let mut offset = 0;
    for group in samples.groups() {
        let len = group.len();
        let sum: f64 = ranks[offset..offset + len].iter().sum();
        h += sum * sum / len as f64;
        offset += len;
    }
    h = 12.0 / (nf * (nf + 1.0)) * h - 3.0 * (nf + 1.0);
    let mut sorted = pooled;
    sorted.sort_by(f64::total_cmp);
    let correction = 1.0 - tie_term(&sorted) / (nf * nf * nf - nf);
    let h = if correction <= 0.0 { 0.0 } else { h / correction };
    let p = if correction <= 0.0 {
        1.0
    } else {
        chi_square_sf(h.max(0.0), (g - 1) as f64)
    };
    let h = h.max(0.0);
    let mut result = TestResult::new(h, p, Some(epsilon_squared(h, n)?), alpha);
    if n < 15 {
        result.warnings.push(format!(
            "chi-squared approximation is unreliable below 15 observations (got {n})"
        ));
    }
    Ok(result)
}

/// Number of combinations C(n, k) as f64.
fn combinations(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Exhaustive walk over assignments of pooled ranks to group A, counting
/// those whose min(U_a, U_b) stays within a threshold.
struct ExactEnumeration<'a> {
    ranks: &'a [f64],
    na: usize,
    nb: usize,
    threshold: f64,
    hits: f64,
}

impl ExactEnumeration<'_> {
    /// Recurses over choices of `need` more ranks starting at `start`, with
    /// `rank_sum` accumulated so far.
    fn count(&mut self, start: usize, need: usize, rank_sum: f64) {
        if need == 0 {
            let ua = rank_sum - (self.na * (self.na + 1)) as f64 / 2.0;
            let ub = (self.na * self.nb) as f64 - ua;
            if ua.min(ub) <= self.threshold {
                self.hits += 1.0;
            }
            return;
        }
        if self.ranks.len() - start < need {
            return;
        }
        self.count(start + 1, need - 1, rank_sum + self.ranks[start]);
        self.count(start + 1, need, rank_sum);
    }
}

/// Largest per-group size for which the exact Mann-Whitney null distribution
/// is enumerated instead of using the normal approximation.
pub const MANN_WHITNEY_EXACT_LIMIT: usize = 12;

/// Two-sided Mann-Whitney U test.
///
/// The statistic is min(U_a, U_b). When both groups have at most
/// [`MANN_WHITNEY_EXACT_LIMIT`] observations the p-value is exact: the share
/// of rank assignments whose min-U is at most the observed one. Larger
/// samples use the tie-corrected normal approximation with a 0.5 continuity
/// correction.
pub fn mann_whitney_u(a: &[f64], b: &[f64], alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("mann-whitney group"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("mann-whitney sample"));
    }
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = fractional_ranks(&pooled);
    let rank_sum_a: f64 = ranks[..na].iter().sum();
    let ua = rank_sum_a - (na * (na + 1)) as f64 / 2.0;
    let ub = (na * nb) as f64 - ua;
    let u = ua.min(ub);
    let p = if na <= MANN_WHITNEY_EXACT_LIMIT && nb <= MANN_WHITNEY_EXACT_LIMIT {
        let mut walk = ExactEnumeration {
            ranks: &ranks,
            na,
            nb,
            threshold: u + 1e-9,
            hits: 0.0,
        };
        walk.count(0, na, 0.0);
        walk.hits / combinations(n, na)
    } else {
        let nf = n as f64;
        let mu = (na * nb) as f64 / 2.0;
        let mut sorted = pooled;
        sorted.sort_by(f64::total_cmp);
        let var = (na * nb) as f64 / 12.0 * ((nf + 1.0) - tie_term(&sorted) / (nf * (nf - 1.0)));
        if var <= 0.0 {
            1.0
        } else {
            let z = (u - mu + 0.5) / libm::sqrt(var);
            (2.0 * normal_cdf(z)).min(1.0)
        }
    };
    Ok(TestResult::new(u, p, None, alpha))
}

/// Levene's test for equality of variances (mean-centered).
///
/// Requires at least two groups with at least two observations each. The
/// p-value is the F upper tail with (g - 1, N - g) degrees of freedom.
pub fn levene(samples: &GroupedSamples, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    let g = samples.groups().len();
    if g < 2 {
        return Err(Error::InsufficientData { needed: 2, got: g });
    }
    for (label, group) in samples.labels().iter().zip(samples.groups()) {
        if group.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "group {label:?} needs at least 2 observations for a variance test"
            )));
        }
    }
    let n = samples.total_len() as f64;
    let mut deviations: Vec<Vec<f64>> = Vec::with_capacity(g);
    for group in samples.groups() {
        let mean: f64 = group.iter().sum::<f64>() / group.len() as f64;
        deviations.push(group.iter().map(|v| (v - mean).abs()).collect());
    }
    let grand: f64 =
        deviations.iter().flatten().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for dev in &deviations {
        let mean: f64 = dev.iter().sum::<f64>() / dev.len() as f64;
        num += dev.len() as f64 * (mean - grand) * (mean - grand);
        den += dev.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>();
    }
    let gf = g as f64;
    let (w, p) = if den == 0.0 {
        if num == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY, 0.0)
        }
    } else {
        let w = (n - gf) / (gf - 1.0) * num / den;
        (w, f_dist_sf(w, gf - 1.0, n - gf))
    };
    Ok(TestResult::new(w, p, None, alpha))
}

/// Half-open-free inclusive age bins used for demographic splits.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AgeBins {
    ranges: Vec<(u32, u32)>,
}

impl Default for AgeBins {
    fn default() -> Self {
        Self {
            ranges: vec![(13, 20), (21, 35), (36, 50), (51, 70)],
        }
    }
}

impl AgeBins {
    /// Builds bins from inclusive (low, high) ranges; ranges must be ordered,
    /// non-overlapping, and non-empty.
    pub fn new(ranges: Vec<(u32, u32)>) -> Result<Self> {
        if ranges.is_empty() {
            return Err(Error::EmptyInput("age bins"));
        }
        let mut prev_high = None;
        for &(lo, hi) in &ranges {
            if lo > hi {
                return Err(Error::InvalidConfig(format!("age bin {lo}-{hi} is empty")));
            }
            if let Some(p) = prev_high {
                if lo <= p {
                    return Err(Error::InvalidConfig(format!(
                        "age bin {lo}-{hi} overlaps the previous bin"
                    )));
                }
            }
            prev_high = Some(hi);
        }
        Ok(Self { ranges })
    }

    pub fn ranges(&self) -> &[(u32, u32)] {
        &self.ranges
    }

    pub fn label(&self, index: usize) -> String {
        let (lo, hi) = self.ranges[index];
        format!("{lo}-{hi}")
    }

    /// Index of the bin containing `age`, if any.
    pub fn bin_of(&self, age: u32) -> Option<usize> {
        self.ranges.iter().position(|&(lo, hi)| age >= lo && age <= hi)
    }
}

/// Coordinate axis of a demographic comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Axis {
    X,
    Y,
}

/// Configuration for the demographic report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DemographicConfig {
    pub bins: AgeBins,
    pub alpha: f64,
    /// Restrict samples to clicks; when false every on-screen sample counts.
    pub clicks_only: bool,
}

impl Default for DemographicConfig {
    fn default() -> Self {
        Self {
            bins: AgeBins::default(),
            alpha: 0.05,
            clicks_only: true,
        }
    }
}

/// Per-bin sample counts backing one axis comparison.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BinSummary {
    pub label: String,
    pub participants: usize,
    pub samples: usize,
}

/// Test outcomes for one coordinate axis.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AxisOutcome {
    /// Variance check; `None` when it could not run (a bin had one sample).
    pub levene: Option<TestResult>,
    /// Age-bin comparison; `None` when fewer than two bins had data or the
    /// sample was too small for the test.
    pub kruskal_wallis: Option<TestResult>,
    pub bins: Vec<BinSummary>,
    pub warnings: Vec<String>,
}

/// Demographic comparison for one image: both axes tested across age bins.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DemographicReport {
    pub image: String,
    /// Group shared by every analyzed log, when they agree.
    pub group: Option<Group>,
    pub x: AxisOutcome,
    pub y: AxisOutcome,
}

struct BinnedCoords {
    labels: Vec<String>,
    participants: Vec<usize>,
    x: Vec<Vec<f64>>,
    y: Vec<Vec<f64>>,
    warnings: Vec<String>,
}

fn bin_coordinates(logs: &[GazeLog], image: &str, cfg: &DemographicConfig) -> BinnedCoords {
    let nbins = cfg.bins.ranges().len();
    let mut x: Vec<Vec<f64>> = vec![Vec::new(); nbins];
    let mut y: Vec<Vec<f64>> = vec![Vec::new(); nbins];
    let mut participants = vec![0usize; nbins];
    let mut warnings = Vec::new();
    for log in logs {
        if log.image != image {
            continue;
        }
        let Some(bin) = cfg.bins.bin_of(log.age) else {
            warnings.push(format!(
                "participant {:?} (age {}) falls outside every age bin",
                log.participant_id, log.age
            ));
            continue;
        };
        let mut contributed = false;
        for s in &log.samples {
            if s.off_screen {
                continue;
            }
            if cfg.clicks_only && s.kind != SampleKind::Click {
                continue;
            }
            x[bin].push(s.x);
            y[bin].push(s.y);
            contributed = true;
        }
        if contributed {
            participants[bin] += 1;
        }
    }
    // Drop empty bins so the tests only see populated groups.
    let mut labels = Vec::new();
    let mut kept_participants = Vec::new();
    let mut kept_x = Vec::new();
    let mut kept_y = Vec::new();
    for i in 0..nbins {
        if x[i].is_empty() {
            warnings.push(format!("age bin {} has no samples and was dropped", cfg.bins.label(i)));
            continue;
        }
        labels.push(cfg.bins.label(i));
        kept_participants.push(participants[i]);
        kept_x.push(core::mem::take(&mut x[i]));
        kept_y.push(core::mem::take(&mut y[i]));
    }
    BinnedCoords {
        labels,
        participants: kept_participants,
        x: kept_x,
        y: kept_y,
        warnings,
    }
}

fn axis_outcome(
    labels: &[String],
    participants: &[usize],
    groups: Vec<Vec<f64>>,
    alpha: f64,
    mut warnings: Vec<String>,
) -> Result<AxisOutcome> {
    let bins: Vec<BinSummary> = labels
        .iter()
        .zip(participants)
        .zip(&groups)
        .map(|((label, &p), g)| BinSummary {
            label: label.clone(),
            participants: p,
            samples: g.len(),
        })
        .collect();
    if groups.len() < 2 {
        warnings.push(String::from(
            "fewer than two populated age bins; tests skipped",
        ));
        return Ok(AxisOutcome {
            levene: None,
            kruskal_wallis: None,
            bins,
            warnings,
        });
    }
    let samples = GroupedSamples::new(labels.to_vec(), groups)?;
    let levene_result = match levene(&samples, alpha) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("variance test skipped: {e}"));
            None
        }
    };
    let kw = match kruskal_wallis(&samples, alpha) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("rank test skipped: {e}"));
            None
        }
    };
    Ok(AxisOutcome {
        levene: levene_result,
        kruskal_wallis: kw,
        bins,
        warnings,
    })
}

/// Runs the demographic comparison for one image over both axes.
///
/// Logs for other images are ignored. With `clicks_only` set, only click
/// samples enter the comparison; off-screen samples never do. Bins with no
/// samples are dropped with a warning, and when fewer than two bins remain
/// the tests for that axis are skipped.
pub fn demographic_report(
    logs: &[GazeLog],
    image: &str,
    cfg: &DemographicConfig,
) -> Result<DemographicReport> {
    check_alpha(cfg.alpha)?;
    if logs.is_empty() {
        return Err(Error::EmptyInput("gaze logs"));
    }
    let binned = bin_coordinates(logs, image, cfg);
    let mut group = None;
    let mut mixed = false;
    for log in logs.iter().filter(|l| l.image == image) {
        match group {
            None => group = Some(log.group),
            Some(g) if g != log.group => mixed = true,
            _ => {}
        }
    }
    let mut x_warnings = binned.warnings.clone();
    if mixed {
        x_warnings.push(String::from(
            "logs mix control and experimental groups; report covers both",
        ));
    }
    let x = axis_outcome(
        &binned.labels,
        &binned.participants,
        binned.x,
        cfg.alpha,
        x_warnings,
    )?;
    let y = axis_outcome(
        &binned.labels,
        &binned.participants,
        binned.y,
        cfg.alpha,
        Vec::new(),
    )?;
    Ok(DemographicReport {
        image: String::from(image),
        group: if mixed { None } else { group },
        x,
        y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaze::{Gender, Sample};
    use alloc::string::ToString;

    fn grouped(groups: &[&[f64]]) -> GroupedSamples {
        GroupedSamples::new(
            (0..groups.len()).map(|i| format!("g{i}")).collect(),
            groups.iter().map(|g| g.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn grouped_samples_validation() {
        assert!(GroupedSamples::new(vec![], vec![]).is_err());
        assert!(GroupedSamples::new(vec!["a".into()], vec![vec![]]).is_err());
        assert!(
            GroupedSamples::new(vec!["a".into(), "a".into()], vec![vec![1.0], vec![2.0]]).is_err()
        );
        assert!(GroupedSamples::new(vec!["a".into()], vec![vec![f64::NAN]]).is_err());
        assert!(GroupedSamples::new(vec!["a".into()], vec![vec![1.0], vec![2.0]]).is_err());
    }

    #[test]
    fn kruskal_wallis_matches_reference_tie_free() {
        // Two clearly shifted groups of three.
        let s = grouped(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let r = kruskal_wallis(&s, 0.05).unwrap();
        assert!((r.statistic - 27.0 / 7.0).abs() < 1e-12);
        assert!((r.p_value - 0.049534613435626915).abs() < 1e-12);
        assert!((r.effect_size.unwrap() - 27.0 / 35.0).abs() < 1e-12);
        assert!(r.significant);
        assert_eq!(r.warnings.len(), 1, "small-sample warning expected");
    }

    #[test]
    fn kruskal_wallis_matches_reference_with_ties() {
        let s = grouped(&[
            &[1.0, 2.0, 2.0, 3.0][..],
            &[2.0, 4.0, 5.0][..],
            &[5.0, 6.0, 7.0, 8.0][..],
        ]);
        let r = kruskal_wallis(&s, 0.05).unwrap();
        assert!((r.statistic - 7.656976744186047).abs() < 1e-12);
        assert!((r.p_value - 0.0217424573066283).abs() < 1e-12);
    }

    #[test]
    fn kruskal_wallis_all_equal_collapses() {
        let s = grouped(&[&[2.0, 2.0, 2.0], &[2.0, 2.0]]);
        let r = kruskal_wallis(&s, 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.significant);
    }

    #[test]
    fn kruskal_wallis_needs_two_groups_and_three_values() {
        let one = grouped(&[&[1.0, 2.0, 3.0]]);
        assert!(kruskal_wallis(&one, 0.05).is_err());
        let tiny = grouped(&[&[1.0], &[2.0]]);
        assert!(kruskal_wallis(&tiny, 0.05).is_err());
    }

    /// Four shifted uniform groups of about 62 observations each, generated
    /// by a fixed-seed splitmix64 stream; reference statistics were frozen
    /// from an independent implementation.
    #[test]
    fn kruskal_wallis_matches_reference_at_scale() {
        fn splitmix64(state: &mut u64) -> u64 {
            *state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = *state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^ (z >> 31)
        }
        let mut state = 1u64;
        let sizes = [63usize, 62, 63, 62];
        let shifts = [0.0, 0.0, 0.0, 135.0];
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for (size, shift) in sizes.iter().zip(shifts) {
            let mut g = Vec::with_capacity(*size);
            for _ in 0..*size {
                let v = (splitmix64(&mut state) >> 11) as f64 / 9007199254740992.0;
                g.push(v * 800.0 + shift);
            }
            groups.push(g);
        }
        assert!((groups[0][0] - 453.2492601378247).abs() < 1e-9);
        assert!((groups[0][1] - 596.6254058101609).abs() < 1e-9);
        assert!((groups[0][2] - 776.802202869437).abs() < 1e-9);
        assert!((groups[3][0] - 368.6100319623286).abs() < 1e-9);
        assert!((groups[3][1] - 189.19939814482956).abs() < 1e-9);
        let s = GroupedSamples::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            groups,
        )
        .unwrap();
        let r = kruskal_wallis(&s, 0.05).unwrap();
        assert!((r.statistic - 10.432860851524765).abs() < 1e-10);
        assert!((r.p_value - 0.015223326088453448).abs() < 1e-12);
        assert!((r.effect_size.unwrap() - 0.041899039564356484).abs() < 1e-12);
        assert!(r.significant);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn epsilon_squared_bounds() {
        assert_eq!(epsilon_squared(0.0, 10).unwrap(), 0.0);
        assert_eq!(epsilon_squared(1e6, 10).unwrap(), 1.0);
        assert!(epsilon_squared(1.0, 1).is_err());
        assert!(epsilon_squared(-1.0, 10).is_err());
    }

    #[test]
    fn mann_whitney_exact_small_cases() {
        // Perfect separation of 2 vs 2: min-U = 0, which 2 of the 6
        // assignments achieve.
        let r = mann_whitney_u(&[1.0, 2.0], &[3.0, 4.0], 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 2.0 / 6.0).abs() < 1e-15);
        assert_eq!(r.effect_size, None);

        // Identical groups: U = n^2 / 2, every assignment is at least as
        // extreme.
        let r = mann_whitney_u(&[5.0, 5.0, 5.0], &[5.0, 5.0, 5.0], 0.05).unwrap();
        assert_eq!(r.statistic, 4.5);
        assert!((r.p_value - 1.0).abs() < 1e-15);

        // Single observations: both assignments tie on min-U.
        let r = mann_whitney_u(&[1.0], &[2.0], 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn mann_whitney_asymptotic_matches_reference() {
        // 7 + 8 observations with a tie triple spanning the groups; forced
        // through the normal approximation path by the reference as well.
        let a = [1.0, 4.0, 2.5, 6.0, 8.0, 2.5, 9.0];
        let b = [3.0, 5.0, 7.0, 2.5, 10.0, 11.0, 12.0, 13.0];
        let pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
        let ranks = fractional_ranks(&pooled);
        let rank_sum_a: f64 = ranks[..a.len()].iter().sum();
        let ua = rank_sum_a - (a.len() * (a.len() + 1)) as f64 / 2.0;
        let u = ua.min((a.len() * b.len()) as f64 - ua);
        assert_eq!(u, 14.0);
        let nf = pooled.len() as f64;
        let mu = (a.len() * b.len()) as f64 / 2.0;
        let mut sorted = pooled;
        sorted.sort_by(f64::total_cmp);
        let var = (a.len() * b.len()) as f64 / 12.0
            * ((nf + 1.0) - tie_term(&sorted) / (nf * (nf - 1.0)));
        let z = (u - mu + 0.5) / libm::sqrt(var);
        let p = (2.0 * normal_cdf(z)).min(1.0);
        assert!((p - 0.11689718760591972).abs() < 1e-14);
    }

    #[test]
    fn mann_whitney_identical_large_groups() {
        // 13 + 13 identical values: variance of U is zero, p = 1.
        let a = [7.0; 13];
        let b = [7.0; 13];
        let r = mann_whitney_u(&a, &b, 0.05).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert!(!r.significant);
    }

    #[test]
    fn mann_whitney_rejects_bad_input() {
        assert!(mann_whitney_u(&[], &[1.0], 0.05).is_err());
        assert!(mann_whitney_u(&[1.0], &[f64::NAN], 0.05).is_err());
        assert!(mann_whitney_u(&[1.0], &[2.0], 1.5).is_err());
    }

    #[test]
    fn levene_matches_reference() {
        let s = grouped(&[&[1.0, 5.0, 3.0, 7.0, 2.0], &[2.0, 2.1, 1.9, 2.05, 2.2]]);
        let r = levene(&s, 0.05).unwrap();
        assert!((r.statistic - 14.147931466778102).abs() < 1e-10);
        assert!((r.p_value - 0.005533451448909228).abs() < 1e-12);
        assert!(r.significant);
        assert_eq!(r.effect_size, None);
    }

    #[test]
    fn levene_degenerate_spreads() {
        // Both groups have zero spread: W = 0, p = 1.
        let s = grouped(&[&[3.0, 3.0], &[5.0, 5.0]]);
        let r = levene(&s, 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);

        // Constant deviations within groups but different between them
        // (values chosen so the per-group means are exact in binary).
        let s = grouped(&[&[1.0, 5.0], &[3.0, 3.5]]);
        let r = levene(&s, 0.05).unwrap();
        assert!(r.statistic.is_infinite());
        assert_eq!(r.p_value, 0.0);
    }

    #[test]
    fn levene_is_scale_invariant() {
        let base = [
            &[1.0, 5.0, 3.0, 7.0, 2.0][..],
            &[2.0, 2.1, 1.9, 2.05, 2.2][..],
        ];
        let doubled: Vec<Vec<f64>> = base
            .iter()
            .map(|g| g.iter().map(|v| v * 2.0).collect())
            .collect();
        let r1 = levene(&grouped(&base), 0.05).unwrap();
        let r2 = levene(
            &GroupedSamples::new(vec!["g0".into(), "g1".into()], doubled).unwrap(),
            0.05,
        )
        .unwrap();
        assert_eq!(r1.statistic, r2.statistic);
        assert_eq!(r1.p_value, r2.p_value);
    }

    #[test]
    fn levene_needs_two_per_group() {
        let s = grouped(&[&[1.0], &[2.0, 3.0]]);
        assert!(levene(&s, 0.05).is_err());
    }

    #[test]
    fn age_bins_lookup_and_validation() {
        let bins = AgeBins::default();
        assert_eq!(bins.bin_of(13), Some(0));
        assert_eq!(bins.bin_of(20), Some(0));
        assert_eq!(bins.bin_of(21), Some(1));
        assert_eq!(bins.bin_of(70), Some(3));
        assert_eq!(bins.bin_of(12), None);
        assert_eq!(bins.bin_of(71), None);
        assert_eq!(bins.label(1), "21-35");
        assert!(AgeBins::new(vec![(20, 13)]).is_err());
        assert!(AgeBins::new(vec![(13, 20), (18, 30)]).is_err());
        assert!(AgeBins::new(vec![]).is_err());
    }

    fn click(t_ms: f64, x: f64, y: f64) -> Sample {
        Sample {
            t_ms,
            x,
            y,
            kind: SampleKind::Click,
            off_screen: false,
        }
    }

    fn click_log(id: &str, age: u32, image: &str, coords: &[(f64, f64)]) -> GazeLog {
        let samples = coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| click(i as f64 * 100.0, x, y))
            .collect();
        GazeLog::new(id, age, Gender::Other, Group::Ctrl, image, samples).unwrap()
    }

    #[test]
    fn demographic_report_runs_both_axes() {
        let mut logs = Vec::new();
        // Young participants click left, older participants click right.
        for i in 0..4 {
            let x = 100.0 + i as f64;
            logs.push(click_log(
                &format!("y{i}"),
                16,
                "img",
                &[(x, 200.0), (x + 1.0, 210.0)],
            ));
        }
        for i in 0..4 {
            let x = 500.0 + i as f64;
            logs.push(click_log(
                &format!("o{i}"),
                40,
                "img",
                &[(x, 205.0), (x + 1.0, 215.0)],
            ));
        }
        let report = demographic_report(&logs, "img", &DemographicConfig::default()).unwrap();
        assert_eq!(report.image, "img");
        assert_eq!(report.group, Some(Group::Ctrl));
        let x = report.x.kruskal_wallis.as_ref().unwrap();
        assert!(x.significant, "x separation should be detected");
        let y = report.y.kruskal_wallis.as_ref().unwrap();
        assert!(!y.significant, "y coordinates overlap");
        assert_eq!(report.x.bins.len(), 2);
        assert_eq!(report.x.bins[0].label, "13-20");
        assert_eq!(report.x.bins[0].participants, 4);
        assert_eq!(report.x.bins[0].samples, 8);
        // Two default bins were empty and dropped.
        assert_eq!(
            report
                .x
                .warnings
                .iter()
                .filter(|w| w.contains("dropped"))
                .count(),
            2
        );
        assert!(report.x.levene.is_some());
    }

    #[test]
    fn demographic_report_skips_tests_with_one_bin() {
        let logs = vec![click_log("a", 25, "img", &[(10.0, 10.0), (20.0, 20.0)])];
        let report = demographic_report(&logs, "img", &DemographicConfig::default()).unwrap();
        assert!(report.x.kruskal_wallis.is_none());
        assert!(report.x.levene.is_none());
        assert!(report
            .x
            .warnings
            .iter()
            .any(|w| w.contains("fewer than two")));
    }

    #[test]
    fn demographic_report_filters_by_image_and_kind() {
        let mut gaze_only = click_log("a", 25, "img", &[(10.0, 10.0)]);
        gaze_only.samples[0].kind = SampleKind::Gaze;
        let other_image = click_log("b", 40, "other", &[(600.0, 400.0)]);
        let logs = vec![gaze_only, other_image];
        let report = demographic_report(&logs, "img", &DemographicConfig::default()).unwrap();
        // The gaze sample is excluded by clicks_only and the other log is a
        // different image, so every bin is empty.
        assert!(report.x.bins.is_empty());
        assert!(report.x.kruskal_wallis.is_none());

        let loose = DemographicConfig {
            clicks_only: false,
            ..DemographicConfig::default()
        };
        let report = demographic_report(&logs, "img", &loose).unwrap();
        assert_eq!(report.x.bins.len(), 1);
    }

    #[test]
    fn demographic_report_warns_on_out_of_range_age() {
        let logs = vec![
            click_log("a", 90, "img", &[(10.0, 10.0)]),
            click_log("b", 25, "img", &[(20.0, 20.0)]),
        ];
        let report = demographic_report(&logs, "img", &DemographicConfig::default()).unwrap();
        assert!(report
            .x
            .warnings
            .iter()
            .any(|w| w.contains("outside every age bin")));
        assert_eq!(report.x.bins.len(), 1);
    }

    #[test]
    fn demographic_report_variance_skip_is_soft() {
        // Bins populated but one has a single sample: Levene errors, KW runs.
        let logs = vec![
            click_log("a", 16, "img", &[(10.0, 10.0)]),
            click_log("b", 40, "img", &[(500.0, 400.0), (510.0, 410.0)]),
        ];
        let report = demographic_report(&logs, "img", &DemographicConfig::default()).unwrap();
        assert!(report.x.levene.is_none());
        assert!(report.x.kruskal_wallis.is_some());
        assert!(report
            .x
            .warnings
            .iter()
            .any(|w| w.contains("variance test skipped")));
    }

    #[test]
    fn mixed_groups_share_a_warning() {
        let mut a = click_log("a", 16, "img", &[(10.0, 10.0)]);
        a.group = Group::Ctrl;
        let mut b = click_log("b", 40, "img", &[(500.0, 400.0)]);
        b.group = Group::Expr;
        let report = demographic_report(&[a, b], "img", &DemographicConfig::default()).unwrap();
        assert_eq!(report.group, None);
        assert!(report.x.warnings.iter().any(|w| w.contains("mix")));
    }

    #[test]
    fn significance_flag_respects_alpha() {
        let s = grouped(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let strict = kruskal_wallis(&s, 0.01).unwrap();
        assert!(!strict.significant);
        let loose = kruskal_wallis(&s, 0.05).unwrap();
        assert!(loose.significant);
        assert_eq!(strict.statistic, loose.statistic);
    }

    #[test]
    fn small_groups_consistent_with_pairwise_test() {
        // With two clearly separated groups of 8, Kruskal-Wallis and
        // Mann-Whitney must agree on significance.
        let a: Vec<f64> = (0..8).map(|i| 10.0 + i as f64).collect();
        let b: Vec<f64> = (0..8).map(|i| 100.0 + i as f64).collect();
        let s = GroupedSamples::new(vec!["a".into(), "b".into()], vec![a.clone(), b.clone()])
            .unwrap();
        let kw = kruskal_wallis(&s, 0.05).unwrap();
        let mwu = mann_whitney_u(&a, &b, 0.05).unwrap();
        assert!(kw.significant);
        assert!(mwu.significant);
    }

    #[test]
    fn grouped_total_len_and_accessors() {
        let s = grouped(&[&[1.0, 2.0], &[3.0]]);
        assert_eq!(s.total_len(), 3);
        assert_eq!(s.labels(), &["g0".to_string(), "g1".to_string()]);
        assert_eq!(s.groups()[1], vec![3.0]);
    }
}
