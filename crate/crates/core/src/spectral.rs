//! Spectral residual saliency backbone.
//!
//! A self-contained frequency-domain saliency detector: the log-amplitude
//! spectrum of the image is compared against its local average, and the
//! difference (the spectral residual) is transformed back to image space.
//! Regions whose spectral signature deviates from the statistical
//! regularity of the scene light up. The result is a raw 8-bit saliency map
//! suitable as ranking input when no external backbone map is available.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fft::{self, Cx};
use crate::filter;
use crate::map::{rec601_luma, SaliencyMap};

/// Floor added to spectrum amplitudes before taking the logarithm.
const AMPLITUDE_FLOOR: f64 = 1e-12;
/// Box filter radius for the local average of the log spectrum (3x3).
const RESIDUAL_RADIUS: usize = 1;
/// Gaussian kernel applied to the squared reconstruction.
const SMOOTH_KERNEL: usize = 11;
const SMOOTH_SIGMA: f64 = 2.5;
/// Residual analysis runs at most at this scale per axis. The method is
/// scale-sensitive by design: at input resolution, large uniform shapes
/// dominate the spectrum and exact spectral zeros (from axis-aligned
/// synthetic content) distort the residual, while a coarse scale keeps
/// proto-objects a few pixels wide.
const WORK_SIZE: usize = 64;

/// Computes a spectral residual saliency map from a luma grid.
///
/// `luma` is row-major with values in `[0, 255]`. Steps:
///
/// 1. downscale to at most 64 pixels per axis (the method's working scale);
/// 2. forward 2-D FFT;
/// 3. log-amplitude `L = ln(|F| + 1e-12)` and phase;
/// 4. residual `R = L - box3x3(L)`;
/// 5. inverse FFT of `exp(R)` recombined with the original phase;
/// 6. squared magnitude, Gaussian smoothing, upscale back to the input
///    size, min-max stretch to `[0, 255]`.
///
/// A constant image has no residual structure and returns an all-zero map.
pub fn spectral_residual_from_luma(width: usize, height: usize, luma: &[f64]) -> Result<SaliencyMap> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyInput("image dimensions"));
    }
    if luma.len() != width * height {
        return Err(Error::LengthMismatch {
            expected: width * height,
            got: luma.len(),
        });
    }
    if luma.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("luma values"));
    }

    let n = width * height;
    let first = luma[0];
    if n == 1 || luma.iter().all(|&v| v == first) {
        return SaliencyMap::new(width, height, vec![0; n]);
    }

    let work_w = width.min(WORK_SIZE);
    let work_h = height.min(WORK_SIZE);
    let work = if (work_w, work_h) == (width, height) {
        luma.to_vec()
    } else {
        filter::resize_bilinear(luma, width, height, work_w, work_h)?
    };

    let mut freq: Vec<Cx> = work.iter().map(|&v| Cx::new(v, 0.0)).collect();
    fft::dft2(&mut freq, work_w, work_h, false);

    let log_amp: Vec<f64> = freq.iter().map(|c| libm::log(c.abs() + AMPLITUDE_FLOOR)).collect();
    let local_avg = filter::box_filter(&log_amp, work_w, work_h, RESIDUAL_RADIUS)?;

    for (i, c) in freq.iter_mut().enumerate() {
        let residual = log_amp[i] - local_avg[i];
        let phase = c.arg();
        let mag = libm::exp(residual);
        *c = Cx::new(mag * libm::cos(phase), mag * libm::sin(phase));
    }
    fft::dft2(&mut freq, work_w, work_h, true);

    let energy: Vec<f64> = freq.iter().map(|c| c.re * c.re + c.im * c.im).collect();
    let kernel = filter::gaussian_kernel(SMOOTH_KERNEL, SMOOTH_SIGMA)?;
    let smooth = filter::convolve_separable(&energy, work_w, work_h, &kernel)?;
    let smooth = if (work_w, work_h) == (width, height) {
        smooth
    } else {
        filter::resize_bilinear(&smooth, work_w, work_h, width, height)?
    };

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &smooth {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let values: Vec<u8> = if hi == lo {
        vec![0; n]
    } else {
        smooth
            .iter()
            .map(|&v| libm::round((v - lo) / (hi - lo) * 255.0) as u8)
            .collect()
    };
    SaliencyMap::new(width, height, values)
}

/// Computes a spectral residual saliency map from interleaved 8-bit RGB.
///
/// The image is converted to Rec. 601 luma first.
pub fn spectral_residual_saliency(width: usize, height: usize, rgb: &[u8]) -> Result<SaliencyMap> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyInput("image dimensions"));
    }
    if rgb.len() != 3 * width * height {
        return Err(Error::LengthMismatch {
            expected: 3 * width * height,
            got: rgb.len(),
        });
    }
    let luma: Vec<f64> = rgb
        .chunks_exact(3)
        .map(|px| rec601_luma(f64::from(px[0]), f64::from(px[1]), f64::from(px[2])))
        .collect();
    spectral_residual_from_luma(width, height, &luma)
}
