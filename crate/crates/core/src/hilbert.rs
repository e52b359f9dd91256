//! The Cauchy/Hilbert kernel `H(z) = ∫ φ(u)/(z - u) du` of a marginal.
//!
//! `H` is analytic in the lower half plane, extends to the real axis by the
//! Plemelj formula `H(τ) = PV ∫ φ(u)/(τ-u) du + iπ φ(τ)`, and continues
//! across the axis for marginals with an analytic (or polynomial)
//! extension via the jump formula `H_c(z) = ∫ φ(u)/(z-u) du + 2πi φ(z)`.
//! Derivatives are taken by moving them onto the density,
//! `∂ⁿ_z H(z) = ∫ φ⁽ⁿ⁾(u)/(z - u) du`, which keeps the same singularity
//! treatment usable at every order.
//!
//! Near the real axis the kernel is evaluated by singularity subtraction:
//! inside a window around `x = Re z` the density is replaced by
//! `φ - T₂[φ; x]` (second-order Taylor guard) and the Taylor part is
//! integrated in closed form, so quadrature error stays below
//! `pv_tolerance` uniformly in `Im z`.

use num_complex::Complex64;

use crate::equilibria::Marginal;
use crate::quad::{adaptive_gk, adaptive_gk_complex};
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;

const PI: f64 = core::f64::consts::PI;

/// Evaluation mode of a kernel value, used as result metadata downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Direct integral, `Im z < 0`.
    Interior,
    /// Plemelj boundary value on the real axis.
    Boundary,
    /// Analytic continuation into `Im z > 0`.
    Continued,
}

/// Immutable evaluator for `H` and its derivatives over one marginal.
#[derive(Debug, Clone)]
pub struct HilbertEvaluator<'a> {
    marginal: &'a Marginal,
    pv_tolerance: f64,
    /// Half-width of the singularity-subtraction window.
    window: f64,
}

impl<'a> HilbertEvaluator<'a> {
    pub fn new(marginal: &'a Marginal) -> Self {
        HilbertEvaluator {
            marginal,
            pv_tolerance: 1e-10,
            window: 0.05,
        }
    }

    pub fn with_tolerance(marginal: &'a Marginal, pv_tolerance: f64) -> Self {
        let mut h = Self::new(marginal);
        h.pv_tolerance = pv_tolerance;
        h
    }

    pub fn marginal(&self) -> &Marginal {
        self.marginal
    }

    /// `H(z)` for `Im z < 0`.
    pub fn eval_interior(&self, z: Complex64) -> Result<Complex64> {
        if z.im >= 0.0 {
            return Err(Error::NotInterior { im: z.im });
        }
        Ok(self.cauchy_value(0, z))
    }

    /// Boundary value `PV ∫ φ(u)/(τ-u) du + iπ φ(τ)`.
    ///
    /// The imaginary part is assembled as exactly `π φ(τ)`.
    pub fn eval_boundary(&self, tau: f64) -> Complex64 {
        Complex64::new(self.pv_value(0, tau), PI * self.marginal.phi(tau))
    }

    /// Analytic continuation of `H` into `Im z > 0` for analytic marginals.
    pub fn eval_continued(&self, z: Complex64) -> Result<Complex64> {
        if z.im <= 0.0 {
            return Err(Error::NotContinued { im: z.im });
        }
        if !matches!(self.marginal.decay_class(), crate::DecayClass::Analytic) {
            return Err(Error::UnsupportedContinuation(
                "continuation requires an analytic marginal",
            ));
        }
        let width = self.marginal.analyticity_width();
        if z.im >= width {
            return Err(Error::ContinuationStrip { im: z.im, width });
        }
        let jump = self.marginal.phi_complex(z)?;
        Ok(self.cauchy_value(0, z) + Complex64::new(0.0, 2.0 * PI) * jump)
    }

    /// `∂ⁿ_z H(z)`, dispatching on the half plane of `z`.
    pub fn eval_derivative(&self, z: Complex64, n: u32) -> Result<Complex64> {
        if n == 0 {
            return if z.im < 0.0 {
                self.eval_interior(z)
            } else if z.im == 0.0 {
                Ok(self.eval_boundary(z.re))
            } else {
                self.eval_continued(z)
            };
        }
        if z.im < 0.0 {
            Ok(self.cauchy_value(n, z))
        } else if z.im == 0.0 {
            Ok(self.boundary_derivative(z.re, n))
        } else {
            if !matches!(self.marginal.decay_class(), crate::DecayClass::Analytic) {
                return Err(Error::UnsupportedContinuation(
                    "continuation requires an analytic marginal",
                ));
            }
            let jump = self.marginal.phi_deriv_complex(z, n)?;
            Ok(self.cauchy_value(n, z) + Complex64::new(0.0, 2.0 * PI) * jump)
        }
    }

    /// Differentiated Plemelj value `PV ∫ φ⁽ⁿ⁾(u)/(τ-u) du + iπ φ⁽ⁿ⁾(τ)`.
    pub fn boundary_derivative(&self, tau: f64, n: u32) -> Complex64 {
        Complex64::new(
            self.pv_value(n, tau),
            PI * self.marginal.phi_deriv(tau, n),
        )
    }

    /// Plain Cauchy integral of `φ⁽ⁿ⁾` at any off-axis `z`, without the
    /// continuation jump. This is the branch reached by crossing the real
    /// axis outside the support; the spectral solvers pick branches
    /// per argument.
    pub(crate) fn direct(&self, n: u32, z: Complex64) -> Complex64 {
        self.cauchy_value(n, z)
    }

    // ---------- kernel internals ----------

    fn density(&self, n: u32, u: f64) -> f64 {
        self.marginal.phi_deriv(u, n)
    }

    /// Integration half-range: support edge for compact marginals, decay
    /// truncation otherwise.
    fn reach(&self) -> f64 {
        self.marginal.support_radius()
    }

    /// ∫ φ⁽ⁿ⁾(u)/(z-u) du for `Im z != 0`.
    fn cauchy_value(&self, n: u32, z: Complex64) -> Complex64 {
        debug_assert!(z.im != 0.0);
        let l = self.reach();
        let x = z.re;
        let w = self.window;
        let abs_tol = 0.001 * self.pv_tolerance;
        let rel_tol = 0.01 * self.pv_tolerance;

        if x.abs() <= l + w && z.im.abs() < w {
            // near-axis: second-order Taylor subtraction inside the window
            let g0 = self.density(n, x);
            let g1 = self.density(n + 1, x);
            let g2 = if n <= 2 { self.density(n + 2, x) } else { 0.0 };
            let (a, b) = (x - w, x + w);

            let mut inner = Complex64::new(0.0, 0.0);
            for (sa, sb) in self.split_at_edges(a, b) {
                inner += adaptive_gk_complex(
                    |u| {
                        let taylor = g0 + g1 * (u - x) + 0.5 * g2 * (u - x) * (u - x);
                        let num = self.density(n, u) - taylor;
                        Complex64::from(num) / (z - u)
                    },
                    sa,
                    sb,
                    abs_tol,
                    rel_tol,
                );
            }
            // closed-form moments of the Taylor part over the full window
            let l0 = (z - x + w).ln() - (z - x - w).ln();
            let l1 = (z - x) * l0 - 2.0 * w;
            let l2 = (z - x) * l1;
            inner + l0 * g0 + l1 * g1 + l2 * (0.5 * g2)
                + self.outer_complex(n, -l, a.max(-l), z)
                + self.outer_complex(n, b.min(l), l, z)
        } else {
            self.outer_complex(n, -l, l, z)
        }
    }

    /// PV ∫ φ⁽ⁿ⁾(u)/(τ-u) du.
    fn pv_value(&self, n: u32, tau: f64) -> f64 {
        let l = self.reach();
        let w = self.window;
        let abs_tol = 0.001 * self.pv_tolerance;
        let rel_tol = 0.01 * self.pv_tolerance;
        if tau.abs() > l + w {
            // singularity outside the support: regular integral
            return self.outer_real(n, -l, l, tau);
        }
        let g0 = self.density(n, tau);
        let g1 = self.density(n + 1, tau);
        let g2 = if n <= 2 { self.density(n + 2, tau) } else { 0.0 };
        let (a, b) = (tau - w, tau + w);
        let mut inner = 0.0;
        for (sa, sb) in self.split_at_edges(a, b) {
            inner += adaptive_gk(
                |u| {
                    let s = u - tau;
                    if s.abs() < 1e-14 * (1.0 + tau.abs()) {
                        // removable point of the subtracted integrand
                        return 0.0;
                    }
                    let taylor = g0 + g1 * s + 0.5 * g2 * s * s;
                    (self.density(n, u) - taylor) / (tau - u)
                },
                sa,
                sb,
                abs_tol,
                rel_tol,
            );
        }
        // PV of the Taylor part over the symmetric window:
        // PV∫ 1/(τ-u) = 0, ∫ (u-τ)/(τ-u) = -2w, PV∫ (u-τ)²/(τ-u) = 0
        inner - 2.0 * w * g1 + self.outer_real(n, -l, a.max(-l), tau)
            + self.outer_real(n, b.min(l), l, tau)
    }

    fn outer_complex(&self, n: u32, a: f64, b: f64, z: Complex64) -> Complex64 {
        if b <= a {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (sa, sb) in self.split_at_edges(a, b) {
            acc += adaptive_gk_complex(
                |u| Complex64::from(self.density(n, u)) / (z - u),
                sa,
                sb,
                0.001 * self.pv_tolerance,
                0.01 * self.pv_tolerance,
            );
        }
        acc
    }

    fn outer_real(&self, n: u32, a: f64, b: f64, tau: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut acc = 0.0;
        for (sa, sb) in self.split_at_edges(a, b) {
            acc += adaptive_gk(
                |u| self.density(n, u) / (tau - u),
                sa,
                sb,
                0.001 * self.pv_tolerance,
                0.01 * self.pv_tolerance,
            );
        }
        acc
    }

    /// Split `[a, b]` at the support edges `±Υ`, where compact marginals
    /// have limited smoothness.
    fn split_at_edges(&self, a: f64, b: f64) -> alloc::vec::Vec<(f64, f64)> {
        let mut cuts = alloc::vec![a];
        let upsilon = self.marginal.upsilon();
        if upsilon.is_finite() {
            for e in [-upsilon, upsilon] {
                if e > a && e < b {
                    cuts.push(e);
                }
            }
        }
        cuts.push(b);
        cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
        cuts.windows(2).map(|w| (w[0], w[1])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::{build_marginal, EquilibriumProfile, ProfileKind};
    use crate::quad::trapezoid;
    use crate::Marginal;

    fn maxwell3() -> Marginal {
        let p = EquilibriumProfile::new(3, ProfileKind::Maxwell { beta: 1.0, amplitude: 1.0 })
            .unwrap();
        build_marginal(&p).unwrap()
    }

    fn compact3() -> Marginal {
        let p = EquilibriumProfile::new(3, ProfileKind::CompactPoly { order: 2, energy_cutoff: 1.0 })
            .unwrap();
        build_marginal(&p).unwrap()
    }

    #[test]
    fn interior_matches_brute_force() {
        let m = maxwell3();
        let h = HilbertEvaluator::new(&m);
        let z = Complex64::new(0.0, -1.0);
        let v = h.eval_interior(z).unwrap();
        // brute-force trapezoid oracle on [-12, 12]
        let n = 2_000_000;
        let re = trapezoid(|u| m.phi(u) * (-u) / (u * u + 1.0), -12.0, 12.0, n);
        let im = trapezoid(|u| m.phi(u) * 1.0 / (u * u + 1.0), -12.0, 12.0, n);
        let oracle = Complex64::new(re, im);
        assert!(
            (v - oracle).norm() < 1e-8,
            "{v} vs {oracle}, diff {}",
            (v - oracle).norm()
        );
    }

    #[test]
    fn interior_far_field_decay() {
        let m = maxwell3();
        let h = HilbertEvaluator::new(&m);
        for &r in &[50.0, 200.0, 1000.0] {
            let v = h.eval_interior(Complex64::new(0.0, -r)).unwrap();
            assert!(v.norm() <= m.rho_mu() / r * 1.02);
            assert!(v.norm() >= m.rho_mu() / r * 0.9);
        }
    }

    #[test]
    fn oddness_interior() {
        // φ even gives H(-z) = -H(z) for the Cauchy integral; -z lands in
        // the upper half plane where the plain (jump-free) integral is the
        // matching branch
        let m = maxwell3();
        let h = HilbertEvaluator::new(&m);
        let z = Complex64::new(0.7, -0.3);
        let a = h.eval_interior(z).unwrap();
        let b = h.direct(0, -z);
        assert!((a + b).norm() < 1e-10, "diff {}", (a + b).norm());
    }

    #[test]
    fn boundary_at_zero_is_pure_plemelj() {
        for m in [maxwell3(), compact3()] {
            let h = HilbertEvaluator::new(&m);
            let v = h.eval_boundary(0.0);
            assert!(v.re.abs() < 1e-10, "odd integrand must cancel, got {}", v.re);
            assert!((v.im - PI * m.phi(0.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn boundary_matches_perturbed_interior() {
        let m = maxwell3();
        let h = HilbertEvaluator::new(&m);
        let tau = 1.0;
        let b = h.eval_boundary(tau);
        let i = h.eval_interior(Complex64::new(tau, -1e-6)).unwrap();
        assert!((b - i).norm() < 1e-4, "diff {}", (b - i).norm());
    }

    #[test]
    fn boundary_outside_support_is_real() {
        let m = compact3();
        let h = HilbertEvaluator::new(&m);
        for &tau in &[1.2, -1.5, 3.0] {
            let v = h.eval_boundary(tau);
            assert_eq!(v.im, 0.0);
            // PV equals the regular integral there
            let reg = adaptive_gk(|u| m.phi(u) / (tau - u), -1.0, 1.0, 1e-13, 1e-11);
            assert!((v.re - reg).abs() < 1e-9);
        }
    }

    #[test]
    fn continued_matches_boundary_limit() {
        let m = maxwell3();
        let h = HilbertEvaluator::new(&m);
        let tau = 0.8;
        let b = h.eval_boundary(tau);
        let c = h.eval_continued(Complex64::new(tau, 1e-7)).unwrap();
        assert!((b - c).norm() < 1e-5, "diff {}", (b - c).norm());
        // and continuity of Im part at tau = 0
        let c0 = h.eval_continued(Complex64::new(0.0, 1e-7)).unwrap();
        assert!((c0.im - PI * m.phi(0.0)).abs() < 1e-5);
    }

    #[test]
    fn continued_eighth_decimal_on_axis_match() {
        let m = maxwell3();
        let h = HilbertEvaluator::new(&m);
        let tau = 0.8;
        // evaluate the continuation *on* the axis via the jump identity:
        // direct upper integral at tiny Im plus 2πi φ tends to the boundary value
        let eps = 1e-9;
        let c = h.eval_continued(Complex64::new(tau, eps)).unwrap();
        let b = h.eval_boundary(tau);
        assert!((c - b).norm() < 1e-8, "diff {}", (c - b).norm());
    }

    #[test]
    fn schwarz_reflection_jump() {
        // H_c(z) - conj(H(conj z)) = 2πi φ(z) for the Gaussian marginal
        let m = maxwell3();
        let h = HilbertEvaluator::new(&m);
        let z = Complex64::new(0.5, 0.1);
        let hc = h.eval_continued(z).unwrap();
        let hl = h.eval_interior(z.conj()).unwrap();
        let jump = hc - hl.conj();
        let expect = Complex64::new(0.0, 2.0 * PI) * m.phi_complex(z).unwrap();
        assert!((jump - expect).norm() < 1e-9, "diff {}", (jump - expect).norm());
    }

    #[test]
    fn continuation_rejected_for_compact() {
        let m = compact3();
        let h = HilbertEvaluator::new(&m);
        assert!(matches!(
            h.eval_continued(Complex64::new(0.2, 0.1)),
            Err(Error::UnsupportedContinuation(_))
        ));
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let m = maxwell3();
        let h = HilbertEvaluator::new(&m);
        // n = 1 at z = -i
        let z = Complex64::new(0.0, -1.0);
        let d1 = h.eval_derivative(z, 1).unwrap();
        let step = 1e-5;
        let fd = (h.eval_interior(z + step).unwrap() - h.eval_interior(z - step).unwrap())
            / (2.0 * step);
        assert!((d1 - fd).norm() < 1e-6, "diff {}", (d1 - fd).norm());
        // n = 2 at z = -2i, differencing the first derivative
        let z = Complex64::new(0.0, -2.0);
        let d2 = h.eval_derivative(z, 2).unwrap();
        let fd2 = (h.eval_derivative(z + step, 1).unwrap()
            - h.eval_derivative(z - step, 1).unwrap())
            / (2.0 * step);
        assert!((d2 - fd2).norm() < 1e-5, "diff {}", (d2 - fd2).norm());
        // n = 3, differencing the second derivative
        let d3 = h.eval_derivative(z, 3).unwrap();
        let fd3 = (h.eval_derivative(z + step, 2).unwrap()
            - h.eval_derivative(z - step, 2).unwrap())
            / (2.0 * step);
        assert!((d3 - fd3).norm() < 1e-4, "diff {}", (d3 - fd3).norm());
        // n = 0 equals the interior value
        let d0 = h.eval_derivative(z, 0).unwrap();
        assert_eq!(d0, h.eval_interior(z).unwrap());
    }

    #[test]
    fn boundary_derivative_matches_finite_difference() {
        let m = compact3();
        let h = HilbertEvaluator::new(&m);
        let tau = 0.4;
        let d1 = h.eval_derivative(Complex64::new(tau, 0.0), 1).unwrap();
        let step = 1e-5;
        let fd = (h.eval_boundary(tau + step) - h.eval_boundary(tau - step)) / (2.0 * step);
        assert!((d1 - fd).norm() < 1e-5, "diff {}", (d1 - fd).norm());
    }

    #[test]
    fn uniform_bound_stable_under_refinement() {
        // sup |∂ⁿH| over a grid with Im z ≤ 0 finite and grid-stable, n ≤ 3
        let m = compact3();
        let h = HilbertEvaluator::new(&m);
        for n in 0..=3 {
            let mut sup_coarse = 0.0_f64;
            let mut sup_fine = 0.0_f64;
            for (steps, sup) in [(7, &mut sup_coarse), (13, &mut sup_fine)] {
                for i in 0..steps {
                    for j in 1..=4 {
                        let tau = -2.0 + 4.0 * i as f64 / (steps - 1) as f64;
                        let y = -(j as f64) * 0.5;
                        let v = h.eval_derivative(Complex64::new(tau, y), n).unwrap();
                        *sup = sup.max(v.norm());
                    }
                }
            }
            assert!(sup_fine.is_finite() && sup_coarse.is_finite());
            assert!(sup_fine <= sup_coarse * 1.5 + 1e-9, "n={n}: {sup_coarse} vs {sup_fine}");
        }
    }
}
