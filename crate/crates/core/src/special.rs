//! Small special-function kit: half-integer gamma values, Bessel J0,
//! spherical Bessel functions, and the smooth frequency cutoff.

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;

/// Gamma(half/2) for positive half-integer arguments, by upward recurrence
/// from Gamma(1/2) = sqrt(pi) and Gamma(1) = 1.
pub fn gamma_half(half: u32) -> f64 {
    assert!(half >= 1, "gamma_half needs a positive argument");
    let mut value = if half % 2 == 1 {
        core::f64::consts::PI.sqrt()
    } else {
        1.0
    };
    let mut two_a = if half % 2 == 1 { 1 } else { 2 };
    while two_a + 2 <= half {
        value *= two_a as f64 / 2.0;
        two_a += 2;
    }
    value
}

/// Bessel function of the first kind, order zero.
///
/// Rational approximations (Abramowitz & Stegun 9.4.1, 9.4.3), absolute
/// error below 1e-7 which is ample for the radial synthesis grids.
pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 8.0 {
        let y = x * x;
        let p1 = 57568490574.0 + y * (-13362590354.0 + y * (651619640.7 + y * (-11214424.18 + y * (77392.33017 + y * (-184.9052456)))));
        let p2 = 57568490411.0 + y * (1029532985.0 + y * (9494680.718 + y * (59272.64853 + y * (267.8532712 + y))));
        p1 / p2
    } else {
        let z = 8.0 / ax;
        let y = z * z;
        let xx = ax - 0.785398164;
        let p1 = 1.0 + y * (-0.1098628627e-2 + y * (0.2734510407e-4 + y * (-0.2073370639e-5 + y * 0.2093887211e-6)));
        let p2 = -0.1562499995e-1 + y * (0.1430488765e-3 + y * (-0.6911147651e-5 + y * (0.7621095161e-6 + y * (-0.934935152e-7))));
        (2.0 / (core::f64::consts::PI * ax)).sqrt() * (xx.cos() * p1 - z * xx.sin() * p2)
    }
}

/// Spherical Bessel function `j_n(x)` for small integer order.
///
/// Upward recurrence where it is stable (`x > n`), power series otherwise.
pub fn spherical_jn(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x.abs() > n as f64 + 1.0 {
        let mut j0 = x.sin() / x;
        if n == 0 {
            return j0;
        }
        let mut j1 = x.sin() / (x * x) - x.cos() / x;
        for m in 1..n {
            let j2 = (2.0 * m as f64 + 1.0) / x * j1 - j0;
            j0 = j1;
            j1 = j2;
        }
        j1
    } else {
        // series: j_n(x) = x^n / (2n+1)!! * sum_s (-x^2/2)^s / (s! (2n+2s+1)!!)
        let mut double_fact = 1.0;
        for m in 1..=n {
            double_fact *= 2.0 * m as f64 + 1.0;
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        let half_x2 = 0.5 * x * x;
        for s in 1..200 {
            let sf = s as f64;
            term *= -half_x2 / (sf * (2.0 * n as f64 + 2.0 * sf + 1.0));
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        x.powi(n as i32) / double_fact * sum
    }
}

/// Smooth cutoff equal to 1 for `s <= 0`, 0 for `s >= 1`, C-infinity in
/// between (the standard exp-bump partition).
pub fn smooth_cutoff(s: f64) -> f64 {
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let f = |x: f64| (-1.0 / x).exp();
        f(1.0 - s) / (f(s) + f(1.0 - s))
    }
}
