//! Map conditioning: Gaussian smoothing, contrast stretch, and intensity
//! quantization.
//!
//! Noisy backbone saliency maps rank poorly because near-duplicate peaks
//! scatter segment scores. This pass smooths the map, stretches it to the
//! full intensity range, then collapses it to a small number of levels so
//! segment statistics compare coarse attention mass instead of pixel noise.
//! Every stage is monotone, so the relative ordering of intensities is
//! preserved while their count shrinks.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::filter;
use crate::map::SaliencyMap;

/// Parameters for [`normalize_map`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormalizeConfig {
    /// Gaussian kernel size in pixels; must be odd.
    pub kernel_size: usize,
    /// Gaussian standard deviation in pixels.
    pub sigma: f64,
    /// Low end of the contrast stretch.
    pub out_min: u8,
    /// High end of the contrast stretch.
    pub out_max: u8,
    /// Integer divisor applied after the stretch; 8 maps 0..=255 to 32
    /// levels.
    pub divisor: u8,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        Self {
            kernel_size: 31,
            sigma: 5.0,
            out_min: 0,
            out_max: 255,
            divisor: 8,
        }
    }
}

impl NormalizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kernel_size == 0 || self.kernel_size.is_multiple_of(2) {
            return Err(Error::InvalidConfig(alloc::format!(
                "kernel size must be odd and positive, got {}",
                self.kernel_size
            )));
        }
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::InvalidConfig(alloc::format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        if self.out_min >= self.out_max {
            return Err(Error::InvalidConfig(alloc::format!(
                "output range [{}, {}] must be increasing",
                self.out_min, self.out_max
            )));
        }
        if self.divisor == 0 {
            return Err(Error::InvalidConfig("divisor must be positive".into()));
        }
        Ok(())
    }

    /// Number of levels the quantized output may hold.
    pub fn levels(&self) -> u32 {
        u32::from(self.out_max / self.divisor) + 1
    }
}

/// Smooths, contrast-stretches, and quantizes a saliency map.
///
/// The three stages run in order:
///
/// 1. separable Gaussian blur (reflected borders);
/// 2. min-max stretch to `[out_min, out_max]`, rounding to the nearest
///    intensity; a flat map (max = min) collapses to `out_min` everywhere;
/// 3. integer division by `divisor`.
///
/// The result carries `levels = out_max / divisor + 1`, so with the default
/// configuration the output holds at most 32 distinct values.
pub fn normalize_map(map: &SaliencyMap, cfg: &NormalizeConfig) -> Result<SaliencyMap> {
    cfg.validate()?;
    let kernel = filter::gaussian_kernel(cfg.kernel_size, cfg.sigma)?;
    let smoothed = filter::convolve_separable(&map.to_f64(), map.width(), map.height(), &kernel)?;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &smoothed {
        lo = lo.min(v);
        hi = hi.max(v);
    }

    let span = f64::from(cfg.out_max) - f64::from(cfg.out_min);
    let quantized: Vec<u8> = if hi == lo {
        alloc::vec![cfg.out_min / cfg.divisor; smoothed.len()]
    } else {
        smoothed
            .iter()
            .map(|&v| {
                let stretched = f64::from(cfg.out_min) + (v - lo) / (hi - lo) * span;
                let rounded = libm::round(stretched).clamp(0.0, 255.0) as u8;
                rounded / cfg.divisor
            })
            .collect()
    };
    SaliencyMap::with_levels(map.width(), map.height(), quantized, cfg.levels())
}
