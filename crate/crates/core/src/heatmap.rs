//! Gaussian attention heatmaps from fixations or raw samples.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gaze::{Fixation, Sample};
use crate::map::SaliencyMap;

/// Gaussian kernels are cut off at this many standard deviations.
const TRUNCATION_SIGMAS: f64 = 4.0;

/// One attention point with a non-negative weight.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightedPoint {
    pub x: f64,
    pub y: f64,
    pub weight: f64,
}

/// Renders weighted points as a sum of truncated Gaussians.
///
/// Every point adds `weight * exp(-d^2 / (2 sigma^2))` to each pixel within
/// `4 sigma` of it; pixels further away receive exactly nothing. The
/// accumulated field is min-max stretched to `[0, 255]`. No points (or only
/// zero-weight points) give an all-zero map. Points are accumulated in a
/// canonical order, so the output is identical for any permutation of the
/// input. Points outside the map still contribute the part of their kernel
/// that overlaps it.
pub fn build_heatmap(
    points: &[WeightedPoint],
    width: usize,
    height: usize,
    sigma_px: f64,
) -> Result<SaliencyMap> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyInput("map dimensions"));
    }
    if !sigma_px.is_finite() || sigma_px <= 0.0 {
        return Err(Error::InvalidConfig(alloc::format!(
            "sigma must be positive and finite, got {sigma_px}"
        )));
    }
    for p in points {
        if !p.x.is_finite() || !p.y.is_finite() || !p.weight.is_finite() {
            return Err(Error::NonFiniteInput("heatmap point"));
        }
        if p.weight < 0.0 {
            return Err(Error::OutOfRange("heatmap point weight below zero"));
        }
    }

    let mut sorted: Vec<WeightedPoint> = points.to_vec();
    sorted.sort_by(|a, b| {
        a.x.total_cmp(&b.x)
            .then(a.y.total_cmp(&b.y))
            .then(a.weight.total_cmp(&b.weight))
    });

    let radius = TRUNCATION_SIGMAS * sigma_px;
    let r2 = radius * radius;
    let inv_two_sigma2 = 1.0 / (2.0 * sigma_px * sigma_px);
    let mut field = vec![0.0f64; width * height];
    for p in &sorted {
        if p.weight == 0.0 {
            continue;
        }
        let x_lo = libm::ceil(p.x - radius).max(0.0) as usize;
        let x_hi = libm::floor(p.x + radius).min((width - 1) as f64);
        let y_lo = libm::ceil(p.y - radius).max(0.0) as usize;
        let y_hi = libm::floor(p.y + radius).min((height - 1) as f64);
        if x_hi < 0.0 || y_hi < 0.0 || p.x - radius > (width - 1) as f64 || p.y - radius > (height - 1) as f64 {
            continue;
        }
        let (x_hi, y_hi) = (x_hi as usize, y_hi as usize);
        for py in y_lo..=y_hi {
            let dy = py as f64 - p.y;
            for px in x_lo..=x_hi {
                let dx = px as f64 - p.x;
                let d2 = dx * dx + dy * dy;
                if d2 <= r2 {
                    field[py * width + px] += p.weight * libm::exp(-d2 * inv_two_sigma2);
                }
            }
        }
    }

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &field {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let values: Vec<u8> = if hi == lo {
        vec![0; width * height]
    } else {
        field
            .iter()
            .map(|&v| libm::round((v - lo) / (hi - lo) * 255.0) as u8)
            .collect()
    };
    SaliencyMap::new(width, height, values)
}

/// Heatmap of fixations, each weighted by its duration.
pub fn heatmap_from_fixations(
    fixations: &[Fixation],
    width: usize,
    height: usize,
    sigma_px: f64,
) -> Result<SaliencyMap> {
    let points: Vec<WeightedPoint> = fixations
        .iter()
        .map(|f| WeightedPoint {
            x: f.x,
            y: f.y,
            weight: f.duration_ms,
        })
        .collect();
    build_heatmap(&points, width, height, sigma_px)
}

/// Heatmap of raw on-screen samples, each with unit weight.
pub fn heatmap_from_samples(
    samples: &[Sample],
    width: usize,
    height: usize,
    sigma_px: f64,
) -> Result<SaliencyMap> {
    let points: Vec<WeightedPoint> = samples
        .iter()
        .filter(|s| !s.off_screen)
        .map(|s| WeightedPoint {
            x: s.x,
            y: s.y,
            weight: 1.0,
        })
        .collect();
    build_heatmap(&points, width, height, sigma_px)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaze::SampleKind;

    fn pt(x: f64, y: f64, weight: f64) -> WeightedPoint {
        WeightedPoint { x, y, weight }
    }

    #[test]
    fn no_points_gives_all_zero() {
        let m = build_heatmap(&[], 8, 8, 5.0).unwrap();
        assert!(m.values().iter().all(|&v| v == 0));
        let m = build_heatmap(&[pt(4.0, 4.0, 0.0)], 8, 8, 5.0).unwrap();
        assert!(m.values().iter().all(|&v| v == 0));
    }

    #[test]
    fn single_point_peaks_at_its_pixel() {
        let m = build_heatmap(&[pt(10.0, 10.0, 1.0)], 21, 21, 3.0).unwrap();
        assert_eq!(m.get(10, 10), 255);
        assert!(m.get(12, 10) < 255);
        assert!(m.get(12, 10) > 0);
        // Symmetric falloff around the center.
        assert_eq!(m.get(8, 10), m.get(12, 10));
        assert_eq!(m.get(10, 8), m.get(10, 12));
        // Beyond the 4-sigma cutoff (12 px) nothing accumulates.
        assert_eq!(m.get(0, 0), 0);
    }

    #[test]
    fn permutation_invariance_is_exact() {
        let a = [
            pt(3.2, 4.1, 2.0),
            pt(17.9, 2.3, 1.5),
            pt(9.0, 9.0, 0.25),
            pt(3.2, 4.1, 1.0),
        ];
        let b = [a[2], a[0], a[3], a[1]];
        let c = [a[3], a[1], a[0], a[2]];
        let ma = build_heatmap(&a, 24, 16, 4.0).unwrap();
        let mb = build_heatmap(&b, 24, 16, 4.0).unwrap();
        let mc = build_heatmap(&c, 24, 16, 4.0).unwrap();
        assert_eq!(ma, mb);
        assert_eq!(ma, mc);
    }

    #[test]
    fn uniform_weight_scaling_changes_nothing() {
        let pts = [pt(5.0, 5.0, 1.0), pt(15.0, 10.0, 3.0)];
        let doubled = [pt(5.0, 5.0, 2.0), pt(15.0, 10.0, 6.0)];
        let a = build_heatmap(&pts, 20, 20, 4.0).unwrap();
        let b = build_heatmap(&doubled, 20, 20, 4.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn off_map_points_contribute_their_overlap() {
        let m = build_heatmap(&[pt(-2.0, 4.0, 1.0)], 16, 9, 3.0).unwrap();
        // The kernel tail reaches into the left edge.
        assert!(m.get(0, 4) > 0);
        let far = build_heatmap(&[pt(-100.0, 4.0, 1.0)], 16, 9, 3.0).unwrap();
        assert!(far.values().iter().all(|&v| v == 0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(build_heatmap(&[], 0, 4, 3.0).is_err());
        assert!(build_heatmap(&[], 4, 4, 0.0).is_err());
        assert!(build_heatmap(&[pt(f64::NAN, 0.0, 1.0)], 4, 4, 3.0).is_err());
        assert!(build_heatmap(&[pt(0.0, 0.0, -1.0)], 4, 4, 3.0).is_err());
    }

    #[test]
    fn fixation_duration_sets_relative_brightness() {
        let fixations = [
            Fixation {
                t_start_ms: 0.0,
                duration_ms: 900.0,
                x: 5.0,
                y: 10.0,
            },
            Fixation {
                t_start_ms: 1000.0,
                duration_ms: 300.0,
                x: 35.0,
                y: 10.0,
            },
        ];
        let m = heatmap_from_fixations(&fixations, 41, 21, 2.5).unwrap();
        assert_eq!(m.get(5, 10), 255);
        let secondary = m.get(35, 10);
        assert!(secondary > 0 && secondary < 255);
    }

    #[test]
    fn samples_heatmap_skips_off_screen() {
        let on = Sample {
            t_ms: 0.0,
            x: 8.0,
            y: 8.0,
            kind: SampleKind::Mouse,
            off_screen: false,
        };
        let off = Sample {
            t_ms: 5.0,
            x: f64::NAN,
            y: f64::NAN,
            kind: SampleKind::Mouse,
            off_screen: true,
        };
        let m = heatmap_from_samples(&[on, off], 17, 17, 2.0).unwrap();
        assert_eq!(m.get(8, 8), 255);
    }
}
