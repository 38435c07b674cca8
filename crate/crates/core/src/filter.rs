//! Grid filtering primitives: separable Gaussian blur, box filter, and
//! bilinear resampling.
//!
//! All routines operate on row-major `f64` buffers. Borders are handled by
//! symmetric reflection (the edge sample is repeated, so a row `a b c`
//! extends as `b a | a b c | c b`), which keeps constant inputs exactly
//! constant.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Reflects an out-of-bounds index back into `0..n`.
fn mirror(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

/// Builds a normalized 1-D Gaussian kernel.
///
/// `size` must be odd and at least 1; `sigma` must be positive and finite.
/// The taps sum to exactly 1 after normalization.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Result<Vec<f64>> {
    if size == 0 || size.is_multiple_of(2) {
        return Err(Error::InvalidConfig(alloc::format!(
            "kernel size must be odd and positive, got {size}"
        )));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidConfig(alloc::format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    let half = (size / 2) as isize;
    let mut taps = Vec::with_capacity(size);
    let mut sum = 0.0;
    for i in -half..=half {
        let t = libm::exp(-((i * i) as f64) / (2.0 * sigma * sigma));
        taps.push(t);
        sum += t;
    }
    for t in &mut taps {
        *t /= sum;
    }
    Ok(taps)
}

fn validate_dims(values: &[f64], width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyInput("grid dimensions"));
    }
    if values.len() != width * height {
        return Err(Error::LengthMismatch {
            expected: width * height,
            got: values.len(),
        });
    }
    Ok(())
}

/// Convolves a grid with a 1-D kernel horizontally then vertically.
///
/// Equivalent to a full 2-D convolution with the kernel's outer product.
/// Borders reflect, so the output of a constant grid is the same constant.
pub fn convolve_separable(
    values: &[f64],
    width: usize,
    height: usize,
    kernel: &[f64],
) -> Result<Vec<f64>> {
    validate_dims(values, width, height)?;
    if kernel.is_empty() || kernel.len().is_multiple_of(2) {
        return Err(Error::InvalidConfig(alloc::format!(
            "kernel length must be odd and positive, got {}",
            kernel.len()
        )));
    }
    let half = (kernel.len() / 2) as isize;

    let mut horizontal = vec![0.0; values.len()];
    for y in 0..height {
        let row = &values[y * width..(y + 1) * width];
        for x in 0..width {
            let mut acc = 0.0;
            for (j, tap) in kernel.iter().enumerate() {
                let sx = mirror(x as isize + j as isize - half, width);
                acc += tap * row[sx];
            }
            horizontal[y * width + x] = acc;
        }
    }

    let mut out = vec![0.0; values.len()];
    for x in 0..width {
        for y in 0..height {
            let mut acc = 0.0;
            for (j, tap) in kernel.iter().enumerate() {
                let sy = mirror(y as isize + j as isize - half, height);
                acc += tap * horizontal[sy * width + x];
            }
            out[y * width + x] = acc;
        }
    }
    Ok(out)
}

/// Mean filter over a `(2r + 1) x (2r + 1)` window with reflected borders.
pub fn box_filter(values: &[f64], width: usize, height: usize, radius: usize) -> Result<Vec<f64>> {
    validate_dims(values, width, height)?;
    let size = 2 * radius + 1;
    let kernel = vec![1.0 / size as f64; size];
    convolve_separable(values, width, height, &kernel)
}

/// Resamples a grid to new dimensions with bilinear interpolation.
///
/// Pixel centers are aligned: source coordinate
/// `(d + 0.5) * src_len / dst_len - 0.5`, clamped to the valid range.
/// Resampling to the same dimensions returns the input unchanged, and the
/// output range never exceeds the input range.
pub fn resize_bilinear(
    src: &[f64],
    src_w: usize,
    src_h: usize,
    dst_w: usize,
    dst_h: usize,
) -> Result<Vec<f64>> {
    validate_dims(src, src_w, src_h)?;
    if dst_w == 0 || dst_h == 0 {
        return Err(Error::EmptyInput("target dimensions"));
    }
    let mut out = Vec::with_capacity(dst_w * dst_h);
    let sx_scale = src_w as f64 / dst_w as f64;
    let sy_scale = src_h as f64 / dst_h as f64;
    for dy in 0..dst_h {
        let sy = ((dy as f64 + 0.5) * sy_scale - 0.5).clamp(0.0, (src_h - 1) as f64);
        let y0 = sy as usize;
        let y1 = (y0 + 1).min(src_h - 1);
        let fy = sy - y0 as f64;
        for dx in 0..dst_w {
            let sx = ((dx as f64 + 0.5) * sx_scale - 0.5).clamp(0.0, (src_w - 1) as f64);
            let x0 = sx as usize;
            let x1 = (x0 + 1).min(src_w - 1);
            let fx = sx - x0 as f64;
            let top = src[y0 * src_w + x0] * (1.0 - fx) + src[y0 * src_w + x1] * fx;
            let bottom = src[y1 * src_w + x0] * (1.0 - fx) + src[y1 * src_w + x1] * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    Ok(out)
}
