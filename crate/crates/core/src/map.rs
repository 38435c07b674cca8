//! Saliency and depth map containers.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::filter;

/// Number of representable intensities in an unquantized 8-bit map.
pub const FULL_LEVELS: u32 = 256;

/// A single-channel 8-bit saliency map.
///
/// `levels` records how many distinct intensities the map may legally hold
/// (256 for raw backbone output, 32 after quantization). Every stored value
/// is strictly below `levels`; constructors enforce this so the histogram
/// entropy stage can bin values without re-checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaliencyMap {
    width: usize,
    height: usize,
    values: Vec<u8>,
    levels: u32,
}

impl SaliencyMap {
    /// Wraps a row-major buffer of raw 8-bit intensities (`levels` = 256).
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self> {
        Self::with_levels(width, height, values, FULL_LEVELS)
    }

    /// Wraps a buffer that holds at most `levels` distinct intensities.
    ///
    /// `levels` must lie in `2..=256` and every value must be strictly below
    /// it.
    pub fn with_levels(width: usize, height: usize, values: Vec<u8>, levels: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyInput("map dimensions"));
        }
        if values.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                got: values.len(),
            });
        }
        if !(2..=FULL_LEVELS).contains(&levels) {
            return Err(Error::InvalidConfig(alloc::format!(
                "levels must be in 2..=256, got {levels}"
            )));
        }
        if levels < FULL_LEVELS && values.iter().any(|&v| u32::from(v) >= levels) {
            return Err(Error::OutOfRange("map value at or above the declared level count"));
        }
        Ok(Self {
            width,
            height,
            values,
            levels,
        })
    }

    /// A map filled with a single intensity.
    pub fn constant(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, alloc::vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Upper bound (exclusive) on stored intensities.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Row-major intensity buffer.
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Intensity at `(x, y)`. Panics when the coordinate is out of bounds.
    pub fn get(&self, x: usize, y: usize) -> u8 {
        assert!(x < self.width && y < self.height, "coordinate out of bounds");
        self.values[y * self.width + x]
    }

    /// The buffer as `f64`, for filtering.
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| f64::from(v)).collect()
    }

    /// Bilinearly resamples to new dimensions.
    ///
    /// Interpolation never leaves the input range, so the level invariant is
    /// preserved and resampling to the same size is the identity.
    pub fn resampled(&self, width: usize, height: usize) -> Result<Self> {
        if width == self.width && height == self.height {
            return Ok(self.clone());
        }
        let resized =
            filter::resize_bilinear(&self.to_f64(), self.width, self.height, width, height)?;
        let values = resized
            .iter()
            .map(|&v| libm::round(v).clamp(0.0, 255.0) as u8)
            .collect();
        Self::with_levels(width, height, values, self.levels)
    }
}

/// A per-pixel depth map with values in `[0, 1]` (0 = nearest).
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl DepthMap {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyInput("map dimensions"));
        }
        if values.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::OutOfRange("depth value outside [0, 1]"));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Builds a depth map from 8-bit gray values, scaled by 1/255.
    pub fn from_gray(width: usize, height: usize, gray: &[u8]) -> Result<Self> {
        let values = gray.iter().map(|&v| f64::from(v) / 255.0).collect();
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Depth at `(x, y)`. Panics when the coordinate is out of bounds.
    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.width && y < self.height, "coordinate out of bounds");
        self.values[y * self.width + x]
    }

    /// Bilinearly resamples to new dimensions; interpolation keeps `[0, 1]`.
    pub fn resampled(&self, width: usize, height: usize) -> Result<Self> {
        if width == self.width && height == self.height {
            return Ok(self.clone());
        }
        let resized =
            filter::resize_bilinear(&self.values, self.width, self.height, width, height)?;
        let values = resized.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
        Self::new(width, height, values)
    }
}

/// Rec. 601 luma of an RGB triple (inputs and output in `[0, 255]`).
pub fn rec601_luma(r: f64, g: f64, b: f64) -> f64 {
    0.299 * r + 0.587 * g + 0.114 * b
}

/// Rec. 601 luma of an 8-bit RGB triple, rounded to the nearest intensity.
pub fn luma_u8(r: u8, g: u8, b: u8) -> u8 {
    libm::round(rec601_luma(f64::from(r), f64::from(g), f64::from(b))).clamp(0.0, 255.0) as u8
}
