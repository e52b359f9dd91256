//! One-dimensional quadrature: fixed-order Gauss-Legendre panels, a
//! globally adaptive Gauss-Kronrod scheme, and a plain high-resolution
//! trapezoid used as an independent cross-check backend.

use alloc::vec::Vec;
use num_complex::Complex64;

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;

/// 7-point Gauss / 15-point Kronrod abscissae on [-1, 1] (non-negative half).
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];

const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG7: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// Fixed-order Gauss-Legendre rule with nodes computed once by Newton
/// iteration on the Legendre recurrence.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss-Legendre order must be at least 2");
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let nf = n as f64;
        for i in 0..n {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        nodes.reverse();
        weights.reverse();
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + h * x);
        }
        acc * h
    }

    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
    ) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += f(c + h * x) * *w;
        }
        acc * h
    }

    /// Integrate over `[a, b]` split into `n` equal panels.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        n: usize,
    ) -> f64 {
        let n = n.max(1);
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.integrate(&mut f, a + i as f64 * h, a + (i + 1) as f64 * h);
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK15[7];
    let mut gauss = 0.0;
    for j in 0..7 {
        let x = h * XGK15[j];
        let fsum = f(c - x) + f(c + x);
        kron += WGK15[j] * fsum;
        if j % 2 == 1 {
            gauss += WG7[j / 2] * fsum;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// Splits the segment with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive_gk<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(&mut f, a, b);
    let mut segs: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    segs.push((a, b, v, e));
    for _ in 0..2000 {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        // split the worst segment
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (sa, sb, _, _) = segs.swap_remove(idx);
        let sm = 0.5 * (sa + sb);
        if sm == sa || sm == sb {
            // interval exhausted at machine precision
            segs.push((sa, sb, v, 0.0));
            break;
        }
        let left = gk15(&mut f, sa, sm);
        let right = gk15(&mut f, sm, sb);
        segs.push((sa, sm, left.0, left.1));
        segs.push((sm, sb, right.0, right.1));
    }
    segs.iter().map(|s| s.2).sum()
}

/// Complex-valued counterpart of [`adaptive_gk`]; adaptivity is driven by
/// the joint (re, im) error norm.
pub fn adaptive_gk_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Complex64 {
    adaptive_gk_complex_impl(&mut f, a, b, abs_tol, rel_tol)
}

fn gk15_complex<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK15[7];
    let mut gauss = Complex64::new(0.0, 0.0);
    for j in 0..7 {
        let x = h * XGK15[j];
        let fsum = f(c - x) + f(c + x);
        kron += fsum * WGK15[j];
        if j % 2 == 1 {
            gauss += fsum * WG7[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

fn adaptive_gk_complex_impl<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Complex64 {
    if a == b {
        return Complex64::new(0.0, 0.0);
    }
    let (v, e) = gk15_complex(f, a, b);
    let mut segs: Vec<(f64, f64, Complex64, f64)> = Vec::with_capacity(64);
    segs.push((a, b, v, e));
    for _ in 0..2000 {
        let total: Complex64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            break;
        }
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (sa, sb, val, _) = segs.swap_remove(idx);
        let sm = 0.5 * (sa + sb);
        if sm == sa || sm == sb {
            segs.push((sa, sb, val, 0.0));
            break;
        }
        let left = gk15_complex(f, sa, sm);
        let right = gk15_complex(f, sm, sb);
        segs.push((sa, sm, left.0, left.1));
        segs.push((sm, sb, right.0, right.1));
    }
    segs.iter().map(|s| s.2).sum()
}

/// Composite trapezoid with `n` panels; the independent low-tech backend.
pub fn trapezoid<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n.max(1);
    let h = (b - a) / n as f64;
    let mut acc = 0.5 * (f(a) + f(b));
    for i in 1..n {
        acc += f(a + i as f64 * h);
    }
    acc * h
}

/// Quadrature backend selector for operations that must be reproducible
/// across two independent integration schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadBackend {
    GaussKronrod,
    /// Plain trapezoid with the given panel count.
    Trapezoid(usize),
}

impl QuadBackend {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        match self {
            QuadBackend::GaussKronrod => adaptive_gk(f, a, b, 1e-12, 1e-10),
            QuadBackend::Trapezoid(n) => trapezoid(f, a, b, *n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let gl = GaussLegendre::new(16);
        // degree 31 is integrated exactly by a 16-point rule
        let v = gl.integrate(|x| x.powi(30), -1.0, 1.0);
        assert!((v - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let v = adaptive_gk(|x: f64| (-x * x * 400.0).exp(), -10.0, 10.0, 1e-13, 1e-12);
        let exact = (core::f64::consts::PI / 400.0).sqrt();
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_second_order() {
        let f = |x: f64| (x).sin();
        let exact = 1.0 - (1.0_f64).cos();
        let e1 = (trapezoid(f, 0.0, 1.0, 1000) - exact).abs();
        let e2 = (trapezoid(f, 0.0, 1.0, 2000) - exact).abs();
        assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5);
    }

    #[test]
    fn complex_adaptive_matches_parts() {
        let v = adaptive_gk_complex(
            |x| Complex64::new((-x * x).exp(), x * (-x * x).exp()),
            -8.0,
            8.0,
            1e-13,
            1e-12,
        );
        assert!((v.re - core::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(v.im.abs() < 1e-13);
    }
}
