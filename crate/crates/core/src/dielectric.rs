//! The Lindhard dielectric function `D(λ, k)` of the linearized dynamics.
//!
//! Three equivalent representations are exposed:
//!
//! - the Hilbert-kernel form
//!   `D = 1 + ŵ(k)/(2k) [H(z₊) - H(z₋)]` with `z± = (-iλ ± k²)/(2k)`,
//!   valid on every path (interior / boundary / continued),
//! - the Laplace time-domain form
//!   `D = 1 + 2ŵ(k) ∫₀^∞ e^{-λt} sin(t k²) φ̂(2tk) dt` for `Re λ ≥ 0`,
//! - the second-kind Volterra kernel `F_k(t) = 2ŵ(k) sin(t k²) φ̂(2tk)`
//!   whose Laplace transform is `D - 1`.
//!
//! All wavenumbers are radial magnitudes `k = |k| > 0`; the symbol depends
//! on the wavevector only through its length for radial equilibria.

use num_complex::Complex64;

use crate::equilibria::Marginal;
use crate::hilbert::HilbertEvaluator;
use crate::quad::GaussLegendre;
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;

const PI: f64 = core::f64::consts::PI;

/// Fourier symbol `ŵ(k)` of the pair interaction.
#[derive(Debug, Clone, Copy)]
pub enum InteractionSymbol {
    /// `ŵ(k) = k⁻²` (Coulomb, every dimension d ≥ 2).
    Coulomb,
    /// Arbitrary symbol with declared qualitative flags.
    General {
        w_hat: fn(f64) -> f64,
        nonneg: bool,
        divergent_at_zero: bool,
        bounded_at_infinity: bool,
        nonincreasing: bool,
    },
}

impl InteractionSymbol {
    /// The zero interaction; turns the evolution into free streaming.
    pub fn none() -> Self {
        InteractionSymbol::General {
            w_hat: |_| 0.0,
            nonneg: true,
            divergent_at_zero: false,
            bounded_at_infinity: true,
            nonincreasing: true,
        }
    }

    /// Evaluate `ŵ(k)`; `k = 0` is rejected for long-range kinds.
    pub fn w_hat(&self, k: f64) -> Result<f64> {
        match self {
            InteractionSymbol::Coulomb => {
                if k == 0.0 {
                    Err(Error::ZeroWavenumber)
                } else {
                    Ok(1.0 / (k * k))
                }
            }
            InteractionSymbol::General { w_hat, divergent_at_zero, .. } => {
                if k == 0.0 && *divergent_at_zero {
                    Err(Error::ZeroWavenumber)
                } else {
                    Ok(w_hat(k))
                }
            }
        }
    }
}

/// Evaluation path of a dielectric value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPath {
    /// `Re λ > 0`, direct integral.
    Interior,
    /// `λ = iτ`, Plemelj boundary values.
    Boundary,
    /// `Re λ < 0`, analytic continuation.
    Continued,
    /// Laplace time-domain representation.
    LaplaceTime,
}

/// A dielectric value together with where and how it was computed.
#[derive(Debug, Clone, Copy)]
pub struct DielectricValue {
    pub value: Complex64,
    pub lambda: Complex64,
    pub k: f64,
    pub path: EvalPath,
}

/// Map `λ` to the two Hilbert-kernel arguments `z± = (-iλ ± k²)/(2k)`.
pub(crate) fn kernel_arguments(lambda: Complex64, k: f64) -> (Complex64, Complex64) {
    let base = Complex64::new(0.0, -1.0) * lambda;
    let zp = (base + k * k) / (2.0 * k);
    let zm = (base - k * k) / (2.0 * k);
    (zp, zm)
}

fn check_k(k: f64) -> Result<()> {
    if k == 0.0 {
        return Err(Error::ZeroWavenumber);
    }
    if !(k > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "wavenumber must be positive, got {k}"
        )));
    }
    Ok(())
}

/// Evaluate `D(λ, k)` through the Hilbert-kernel representation on the
/// requested path.
pub fn eval_d(
    w: &InteractionSymbol,
    m: &Marginal,
    lambda: Complex64,
    k: f64,
    path: EvalPath,
) -> Result<DielectricValue> {
    check_k(k)?;
    let w_k = w.w_hat(k)?;
    let h = HilbertEvaluator::new(m);
    let (zp, zm) = kernel_arguments(lambda, k);
    let diff = match path {
        EvalPath::Interior => {
            if lambda.re <= 0.0 {
                return Err(Error::NotInterior { im: zp.im });
            }
            h.eval_interior(zp)? - h.eval_interior(zm)?
        }
        EvalPath::Boundary => {
            // boundary values are taken at λ = i Im λ
            let tau = lambda.im;
            let (bp, bm) = boundary_arguments(tau, k);
            h.eval_boundary(bp) - h.eval_boundary(bm)
        }
        EvalPath::Continued => {
            if lambda.re >= 0.0 {
                return Err(Error::NotContinued { im: zp.im });
            }
            h.eval_continued(zp)? - h.eval_continued(zm)?
        }
        EvalPath::LaplaceTime => {
            return eval_d_laplace(w, m, lambda, k, default_t_max(m, k));
        }
    };
    Ok(DielectricValue {
        value: Complex64::new(1.0, 0.0) + diff * (w_k / (2.0 * k)),
        lambda,
        k,
        path,
    })
}

fn boundary_arguments(tau: f64, k: f64) -> (f64, f64) {
    ((tau + k * k) / (2.0 * k), (tau - k * k) / (2.0 * k))
}

/// Dispatch on `Re λ` and evaluate `D` on the natural path.
pub fn eval_d_auto(
    w: &InteractionSymbol,
    m: &Marginal,
    lambda: Complex64,
    k: f64,
) -> Result<DielectricValue> {
    let path = if lambda.re > 0.0 {
        EvalPath::Interior
    } else if lambda.re == 0.0 {
        EvalPath::Boundary
    } else {
        EvalPath::Continued
    };
    eval_d(w, m, lambda, k, path)
}

/// Truncation horizon for the Laplace representation: integrate until the
/// kernel envelope `|φ̂(2tk)|` has dropped below 1e-12 of its peak (and at
/// least until `kt > 40`).
pub fn default_t_max(m: &Marginal, k: f64) -> f64 {
    let peak = m.phi_hat(0.0).abs();
    let mut t = 40.0 / k.max(1e-6);
    let mut guard = 0;
    while m.phi_hat(2.0 * t * k).abs() > 1e-12 * peak && guard < 60 {
        t *= 1.5;
        guard += 1;
    }
    t
}

/// Evaluate `D(λ, k)` from the time-domain representation,
/// `1 + 2ŵ(k) ∫₀^{T} e^{-λt} sin(t k²) φ̂(2tk) dt`, `Re λ ≥ 0`.
pub fn eval_d_laplace(
    w: &InteractionSymbol,
    m: &Marginal,
    lambda: Complex64,
    k: f64,
    t_max: f64,
) -> Result<DielectricValue> {
    check_k(k)?;
    if lambda.re < 0.0 {
        return Err(Error::LaplaceDomain(lambda.re));
    }
    let w_k = w.w_hat(k)?;
    let gl = GaussLegendre::new(24);
    // panel count follows the total phase of e^{-i Im λ t} sin(tk²) plus the
    // kernel's own oscillation in φ̂(2tk)
    let freq = lambda.im.abs() + k * k + 2.0 * k * effective_phase_rate(m);
    let panels = ((t_max * freq / PI).ceil() as usize + 8).min(60_000);
    let mut acc = Complex64::new(0.0, 0.0);
    let h = t_max / panels as f64;
    for i in 0..panels {
        acc += gl.integrate_complex(
            |t| (-lambda * t).exp() * (t * k * k).sin() * m.phi_hat(2.0 * t * k),
            i as f64 * h,
            (i + 1) as f64 * h,
        );
    }
    Ok(DielectricValue {
        value: Complex64::new(1.0, 0.0) + 2.0 * w_k * acc,
        lambda,
        k,
        path: EvalPath::LaplaceTime,
    })
}

/// `φ̂(s)` oscillates like `sin(Υ s)` for compact marginals; unbounded
/// supports contribute no extra phase.
fn effective_phase_rate(m: &Marginal) -> f64 {
    if m.upsilon().is_finite() {
        m.upsilon()
    } else {
        0.0
    }
}

/// Time-domain memory kernel `F_k(t) = 2ŵ(k) sin(t k²) φ̂(2tk)` of the
/// mode-wise Volterra equation; its Laplace transform is `D(λ,k) - 1`.
pub fn volterra_kernel(w: &InteractionSymbol, m: &Marginal, k: f64, t: f64) -> Result<f64> {
    check_k(k)?;
    if t < 0.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "kernel time must be non-negative, got {t}"
        )));
    }
    let w_k = w.w_hat(k)?;
    Ok(2.0 * w_k * (t * k * k).sin() * m.phi_hat(2.0 * t * k))
}
