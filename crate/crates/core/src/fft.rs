//! Minimal complex FFT used by the spectral saliency backbone.
//!
//! Power-of-two lengths run through an iterative radix-2 transform;
//! everything else goes through Bluestein's chirp-z algorithm, which
//! re-expresses an arbitrary-length DFT as a circular convolution of
//! power-of-two size. Forward transforms are unscaled; inverse transforms
//! divide by the length.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Cx {
    pub re: f64,
    pub im: f64,
}

impl Cx {
    pub const ZERO: Cx = Cx { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn add(self, rhs: Cx) -> Cx {
        Cx::new(self.re + rhs.re, self.im + rhs.im)
    }

    pub fn sub(self, rhs: Cx) -> Cx {
        Cx::new(self.re - rhs.re, self.im - rhs.im)
    }

    pub fn mul(self, rhs: Cx) -> Cx {
        Cx::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }

    pub fn scale(self, s: f64) -> Cx {
        Cx::new(self.re * s, self.im * s)
    }

    pub fn conj(self) -> Cx {
        Cx::new(self.re, -self.im)
    }

    pub fn abs(self) -> f64 {
        libm::hypot(self.re, self.im)
    }

    pub fn arg(self) -> f64 {
        libm::atan2(self.im, self.re)
    }
}

fn cis(theta: f64) -> Cx {
    Cx::new(libm::cos(theta), libm::sin(theta))
}

/// In-place radix-2 Cooley-Tukey; `buf.len()` must be a power of two.
fn fft_pow2(buf: &mut [Cx], inverse: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let step = cis(sign * 2.0 * PI / len as f64);
        for start in (0..n).step_by(len) {
            let mut w = Cx::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = buf[start + k];
                let v = buf[start + k + len / 2].mul(w);
                buf[start + k] = u.add(v);
                buf[start + k + len / 2] = u.sub(v);
                w = w.mul(step);
            }
        }
        len <<= 1;
    }
}

/// Bluestein chirp-z transform for arbitrary lengths.
///
/// The quadratic phase index is reduced modulo `2n` before the angle is
/// computed, which keeps the chirp accurate for long inputs.
fn bluestein(x: &[Cx], inverse: bool) -> Vec<Cx> {
    let n = x.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let m = (2 * n - 1).next_power_of_two();

    let mut w = Vec::with_capacity(n);
    for j in 0..n {
        let jj = (j * j) % (2 * n);
        w.push(cis(sign * PI * jj as f64 / n as f64));
    }

    let mut a = vec![Cx::ZERO; m];
    let mut b = vec![Cx::ZERO; m];
    for j in 0..n {
        a[j] = x[j].mul(w[j]);
        b[j] = w[j].conj();
    }
    for j in 1..n {
        b[m - j] = b[j];
    }
    fft_pow2(&mut a, false);
    fft_pow2(&mut b, false);
    for j in 0..m {
        a[j] = a[j].mul(b[j]);
    }
    fft_pow2(&mut a, true);
    let scale = 1.0 / m as f64;
    (0..n).map(|k| a[k].mul(w[k]).scale(scale)).collect()
}

/// One-dimensional DFT of any length; inverse transforms divide by `n`.
pub(crate) fn dft(buf: &mut Vec<Cx>, inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        fft_pow2(buf, inverse);
    } else {
        *buf = bluestein(buf, inverse);
    }
    if inverse {
        let scale = 1.0 / n as f64;
        for v in buf.iter_mut() {
            *v = v.scale(scale);
        }
    }
}

/// Two-dimensional DFT over a row-major grid (rows, then columns).
pub(crate) fn dft2(data: &mut [Cx], width: usize, height: usize, inverse: bool) {
    debug_assert_eq!(data.len(), width * height);
    let mut row: Vec<Cx> = Vec::with_capacity(width);
    for y in 0..height {
        row.clear();
        row.extend_from_slice(&data[y * width..(y + 1) * width]);
        dft(&mut row, inverse);
        data[y * width..(y + 1) * width].copy_from_slice(&row);
    }
    let mut col: Vec<Cx> = Vec::with_capacity(height);
    for x in 0..width {
        col.clear();
        for y in 0..height {
            col.push(data[y * width + x]);
        }
        dft(&mut col, inverse);
        for (y, v) in col.iter().enumerate() {
            data[y * width + x] = *v;
        }
    }
}
