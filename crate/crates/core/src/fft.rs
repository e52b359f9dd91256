//! Minimal radix-2 FFT plus the analytic-signal envelope used by the
//! trace-fitting diagnostics.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;

/// Smallest power of two not below `n`.
pub fn next_pow2(n: usize) -> usize {
    let mut p = 1;
    while p < n {
        p <<= 1;
    }
    p
}

/// In-place radix-2 Cooley-Tukey transform. `buf.len()` must be a power of
/// two. `inverse` applies the conjugate transform including the 1/n factor.
pub fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    // bit-reversal permutation
    let mut j = 0usize;
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
        let ang = sign * 2.0 * core::f64::consts::PI / len as f64;
        let wlen = Complex64::new(ang.cos(), ang.sin());
        let mut i = 0;
        while i < n {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = buf[i + k];
                let v = buf[i + k + len / 2] * w;
                buf[i + k] = u + v;
                buf[i + k + len / 2] = u - v;
                w *= wlen;
            }
            i += len;
        }
        len <<= 1;
    }
    if inverse {
        let inv = 1.0 / n as f64;
        for x in buf.iter_mut() {
            *x *= inv;
        }
    }
}

/// Analytic signal of a real sequence: FFT, zero the negative frequencies,
/// double the positive ones, inverse FFT. The magnitude is the envelope.
pub fn analytic_signal(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let m = next_pow2(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (b, &v) in buf.iter_mut().zip(x.iter()) {
        *b = Complex64::new(v, 0.0);
    }
    fft_in_place(&mut buf, false);
    for (k, b) in buf.iter_mut().enumerate() {
        if k == 0 || (m % 2 == 0 && k == m / 2) {
            // DC and Nyquist stay
        } else if k < m / 2 {
            *b *= 2.0;
        } else {
            *b = Complex64::new(0.0, 0.0);
        }
    }
    fft_in_place(&mut buf, true);
    buf.truncate(n);
    buf
}

/// Hann window applied in place.
pub fn apply_hann(x: &mut [f64]) {
    let n = x.len();
    if n < 2 {
        return;
    }
    for (i, v) in x.iter_mut().enumerate() {
        let w = 0.5 * (1.0 - (2.0 * core::f64::consts::PI * i as f64 / (n as f64 - 1.0)).cos());
        *v *= w;
    }
}
