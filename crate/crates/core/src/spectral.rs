//! Spectral objects of the dispersion relation `D(λ, k) = 0`: the survival
//! threshold `κ₀`, the plasmon branch `τ*(k)` with its derivatives, Landau
//! damping rates in both regimes, continued (damped) roots, and Nyquist
//! winding-number certificates for the right half plane.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::dielectric::{kernel_arguments, InteractionSymbol};
use crate::equilibria::Marginal;
use crate::hilbert::HilbertEvaluator;
use crate::quad::{adaptive_gk, QuadBackend};
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;

const PI: f64 = core::f64::consts::PI;

// ---------- survival threshold ----------

/// Result of the threshold solve.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdResult {
    /// The survival threshold; zero (degenerate) for unbounded supports.
    pub kappa0: f64,
    /// Value of the defining equation `Φ(κ₀)` at the returned root.
    pub residual: f64,
    /// Set when `Υ = ∞`, where the threshold collapses to zero.
    pub degenerate: bool,
}

/// `Φ(k) = D(i(2kΥ + k²), k)`, the dielectric value at the outer edge of
/// the resonant segment:
/// `Φ(k) = 1 - ŵ(k)/2 ∫ φ(u) / ((Υ-u)(Υ+k-u)) du`.
///
/// Strictly increasing in `k`, negative below the threshold and positive
/// above it.
pub fn capital_phi(w: &InteractionSymbol, m: &Marginal, k: f64) -> Result<f64> {
    capital_phi_with(w, m, k, QuadBackend::GaussKronrod)
}

/// [`capital_phi`] with an explicit quadrature backend.
pub fn capital_phi_with(
    w: &InteractionSymbol,
    m: &Marginal,
    k: f64,
    backend: QuadBackend,
) -> Result<f64> {
    let upsilon = m.upsilon();
    if !upsilon.is_finite() {
        return Err(Error::WrongRegime(
            "the edge value Phi(k) needs a compactly supported marginal",
        ));
    }
    let w_k = w.w_hat(k)?;
    let integral = backend.integrate(
        |u| {
            if u >= upsilon {
                0.0
            } else {
                m.phi(u) / ((upsilon - u) * (upsilon + k - u))
            }
        },
        -upsilon,
        upsilon,
    );
    Ok(1.0 - 0.5 * w_k * integral)
}

/// Solve `Φ(κ₀) = 0` by bisection on the proof-backed monotone bracket.
pub fn solve_threshold(
    w: &InteractionSymbol,
    m: &Marginal,
    backend: QuadBackend,
) -> Result<ThresholdResult> {
    if !m.upsilon().is_finite() {
        return Ok(ThresholdResult { kappa0: 0.0, residual: 0.0, degenerate: true });
    }
    if let crate::DecayClass::Compact(n1) = m.decay_class() {
        if n1 < 1.0 {
            return Err(Error::NonIntegrableEndpoint(n1));
        }
    }
    let mut lo = 1e-8;
    let mut f_lo = capital_phi_with(w, m, lo, backend)?;
    // Φ(0⁺) = -∞ for long-range symbols; shrink if the start is not negative
    let mut guard = 0;
    while f_lo >= 0.0 && guard < 40 {
        lo *= 0.25;
        f_lo = capital_phi_with(w, m, lo, backend)?;
        guard += 1;
    }
    let mut hi = 1.0;
    let mut f_hi = capital_phi_with(w, m, hi, backend)?;
    guard = 0;
    while f_hi <= 0.0 && guard < 60 {
        hi *= 2.0;
        f_hi = capital_phi_with(w, m, hi, backend)?;
        guard += 1;
    }
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "threshold bracketing failed: Phi({lo}) = {f_lo}, Phi({hi}) = {f_hi}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = capital_phi_with(w, m, mid, backend)?;
        if f_mid < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    let kappa0 = 0.5 * (lo + hi);
    let residual = capital_phi_with(w, m, kappa0, backend)?;
    Ok(ThresholdResult { kappa0, residual, degenerate: false })
}

// ---------- the on-axis branch ----------

/// How a dispersion point was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootMethod {
    BisectionOnAxis,
    ContinuedNewton,
    Asymptotic,
}

/// One sample of the dispersion curve `λ₊(k)`.
#[derive(Debug, Clone, Copy)]
pub struct DispersionPoint {
    pub k: f64,
    /// Oscillation frequency `τ*(k) = |Im λ₊(k)|`.
    pub tau_star: f64,
    /// `τ*'(k)` where computed (on-axis points).
    pub dtau: Option<f64>,
    /// `τ*''(k)` where computed (on-axis points).
    pub ddtau: Option<f64>,
    /// Damping rate `Re λ₊(k)`; exactly zero on `[0, κ₀]`.
    pub re_lambda: f64,
    pub method: RootMethod,
}

/// `D(iτ, k)` on the outer segment `τ ≥ 2kΥ + k²`, where it is real:
/// `1 - ŵ(k)/2 ∫ φ(u) / ((z₋-u)(z₊-u)) du` with `z± = (τ ± k²)/(2k)`.
fn d_outer_real(w_k: f64, m: &Marginal, tau: f64, k: f64) -> f64 {
    let a = (tau - k * k) / (2.0 * k);
    let b = (tau + k * k) / (2.0 * k);
    let upsilon = m.support_radius();
    let integral = adaptive_gk(
        |u| m.phi(u) / ((a - u) * (b - u)),
        -upsilon,
        upsilon,
        1e-13,
        1e-11,
    );
    1.0 - 0.5 * w_k * integral
}

/// Solve `D(iτ*, k) = 0` on the proof-backed bracket
/// `τ ∈ (2kΥ + k², ∞)` by bisection on the monotone outer representation.
pub fn solve_tau_star(w: &InteractionSymbol, m: &Marginal, k: f64) -> Result<DispersionPoint> {
    let threshold = solve_threshold(w, m, QuadBackend::GaussKronrod)?;
    dispersion_point(w, m, k, &threshold)
}

/// [`solve_tau_star`] with a precomputed threshold (for scans).
pub fn dispersion_point(
    w: &InteractionSymbol,
    m: &Marginal,
    k: f64,
    threshold: &ThresholdResult,
) -> Result<DispersionPoint> {
    if k < 0.0 {
        return Err(Error::InvalidArgument(alloc::format!("negative wavenumber {k}")));
    }
    let tau0 = m.tau0();
    if k == 0.0 {
        // analytic long-wave limit
        let (dtau, ddtau) = group_velocity_at(w, m, 0.0, tau0)?;
        return Ok(DispersionPoint {
            k,
            tau_star: tau0,
            dtau: Some(dtau),
            ddtau: Some(ddtau),
            re_lambda: 0.0,
            method: RootMethod::Asymptotic,
        });
    }
    if threshold.degenerate || k > threshold.kappa0 {
        return Err(Error::NoOnAxisRoot { k, kappa0: threshold.kappa0 });
    }
    let w_k = w.w_hat(k)?;
    let upsilon = m.upsilon();
    let edge = 2.0 * k * upsilon + k * k;
    let eps_b = 1e-10 * (1.0 + tau0);
    let mut lo = edge + eps_b;
    let f_lo = d_outer_real(w_k, m, lo, k);
    if f_lo >= 0.0 {
        // root pinched against the edge (k at the threshold)
        let tau_star = edge;
        let derivs = group_velocity_at(w, m, k, tau_star).ok();
        return Ok(DispersionPoint {
            k,
            tau_star,
            dtau: derivs.map(|d| d.0),
            ddtau: derivs.map(|d| d.1),
            re_lambda: 0.0,
            method: RootMethod::BisectionOnAxis,
        });
    }
    let mut hi = (edge + tau0).max(2.0 * edge);
    let mut guard = 0;
    while d_outer_real(w_k, m, hi, k) <= 0.0 && guard < 80 {
        hi *= 2.0;
        guard += 1;
    }
    if d_outer_real(w_k, m, hi, k) <= 0.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "bisection bracket failed for tau_star at k = {k}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if d_outer_real(w_k, m, mid, k) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    let tau_star = 0.5 * (lo + hi);
    let (dtau, ddtau) = group_velocity_at(w, m, k, tau_star)?;
    Ok(DispersionPoint {
        k,
        tau_star,
        dtau: Some(dtau),
        ddtau: Some(ddtau),
        re_lambda: 0.0,
        method: RootMethod::BisectionOnAxis,
    })
}

// ---------- moment integrals and branch derivatives ----------

/// The moment integrals
/// `I_{n,m}(k) = ∫ (τ*/2 - ku)ⁿ uᵐ φ(u) / ((τ*/2 - ku)² - k⁴/4)² du`
/// for `n ∈ {0,1}`, `m ∈ {0,1,2}`.
pub fn moment_integrals(
    w: &InteractionSymbol,
    m: &Marginal,
    k: f64,
    tau_star: f64,
) -> Result<[[f64; 3]; 2]> {
    let _ = w;
    let upsilon = m.support_radius();
    let edge = 2.0 * k * upsilon + k * k;
    if k > 0.0 && tau_star < edge - 1e-9 * (1.0 + edge) {
        return Err(Error::SingularDenominator { tau: tau_star, edge });
    }
    let mut table = [[0.0; 3]; 2];
    for (n, row) in table.iter_mut().enumerate() {
        for (mm, slot) in row.iter_mut().enumerate() {
            *slot = adaptive_gk(
                |u| {
                    let b = 0.5 * tau_star - k * u;
                    let a = b * b - 0.25 * k.powi(4);
                    b.powi(n as i32) * u.powi(mm as i32) * m.phi(u) / (a * a)
                },
                -upsilon,
                upsilon,
                1e-13,
                1e-10,
            );
        }
    }
    Ok(table)
}

/// Closed-form branch derivatives `(τ*', τ*'')` extracted from the
/// differentiated defining identity.
pub fn group_velocity(w: &InteractionSymbol, m: &Marginal, k: f64) -> Result<(f64, f64)> {
    let point = solve_tau_star(w, m, k)?;
    group_velocity_at(w, m, k, point.tau_star)
}

/// [`group_velocity`] with a known `τ*(k)`.
pub fn group_velocity_at(
    w: &InteractionSymbol,
    m: &Marginal,
    k: f64,
    tau_star: f64,
) -> Result<(f64, f64)> {
    let table = moment_integrals(w, m, k, tau_star)?;
    let (i00, i10, i11) = (table[0][0], table[1][0], table[1][1]);
    let dtau = (k.powi(3) * i00 + 2.0 * i11) / i10;
    let upsilon = m.support_radius();
    let num = adaptive_gk(
        |u| {
            let b = 0.5 * tau_star - k * u;
            let a = b * b - 0.25 * k.powi(4);
            let s = dtau - 2.0 * u;
            let c = b * s - k.powi(3);
            let bracket = 2.0 * c * c - a * (0.5 * s * s - 3.0 * k * k);
            m.phi(u) * bracket / (a * a * a)
        },
        -upsilon,
        upsilon,
        1e-13,
        1e-10,
    );
    Ok((dtau, num / i10))
}

// ---------- Landau damping rates ----------

/// Leading asymptotic damping rate for unbounded supports:
/// `π [u² φ'(u)]` at the phase velocity `ν*(k) = τ₀/(2k)`.
///
/// Returned without the `1 + O(k)` factor; negative since `φ' < 0`.
pub fn landau_rate_gaussian(
    w: &InteractionSymbol,
    m: &Marginal,
    k: f64,
) -> Result<(f64, f64)> {
    let _ = w;
    if m.upsilon().is_finite() {
        return Err(Error::WrongRegime(
            "the gaussian-regime law needs an unbounded support; use landau_rate_compact",
        ));
    }
    if k <= 0.0 {
        return Err(Error::InvalidArgument(alloc::format!("need k > 0, got {k}")));
    }
    let nu_star = m.tau0() / (2.0 * k);
    let rate = PI * nu_star * nu_star * m.dphi(nu_star);
    Ok((rate, nu_star))
}

/// Edge coefficients `κ̃_j(k)` of the compact-regime expansion:
/// `κ̃_j(k) = 1/2 Σ_{l=1}^{j+1} C(j+1, l) k^{l-1}
///            ∫ φ(u) / ((Υ-u)^l (Υ+k-u)^{j+1}) du`.
pub fn kappa_tilde(m: &Marginal, j: u32, k: f64) -> Result<f64> {
    let upsilon = m.upsilon();
    if !upsilon.is_finite() {
        return Err(Error::WrongRegime("edge coefficients need a compact support"));
    }
    let mut acc = 0.0;
    for l in 1..=(j + 1) {
        let binom = binomial(j + 1, l);
        let integral = adaptive_gk(
            |u| {
                if u >= upsilon {
                    0.0
                } else {
                    m.phi(u)
                        / ((upsilon - u).powi(l as i32) * (upsilon + k - u).powi(j as i32 + 1))
                }
            },
            -upsilon,
            upsilon,
            1e-13,
            1e-11,
        );
        acc += binom * k.powi(l as i32 - 1) * integral;
    }
    Ok(0.5 * acc)
}

/// `κ̃₀'(k)`, by differentiation under the integral (the endpoint-singular
/// integrand makes finite differences noisy).
pub fn kappa_tilde0_prime(m: &Marginal, k: f64) -> Result<f64> {
    let upsilon = m.upsilon();
    if !upsilon.is_finite() {
        return Err(Error::WrongRegime("edge coefficients need a compact support"));
    }
    Ok(-0.5
        * adaptive_gk(
            |u| {
                if u >= upsilon {
                    0.0
                } else {
                    let d = upsilon + k - u;
                    m.phi(u) / ((upsilon - u) * d * d)
                }
            },
            -upsilon,
            upsilon,
            1e-13,
            1e-11,
        ))
}

/// Compact-regime damping law just above the threshold:
/// rate `-π/(2 κ̃₁(κ₀) k) [φ(ν - k/2) - φ(ν + k/2)]` at
/// `ν = ν*(k) = Υ + k/2 - θ₀ (k - κ₀)`, with
/// `θ₀ = (2κ₀ - κ̃₀'(κ₀)) / κ̃₁(κ₀) > 0`.
///
/// Returns `(rate, ν*, θ₀)`.
pub fn landau_rate_compact(
    w: &InteractionSymbol,
    m: &Marginal,
    k: f64,
) -> Result<(f64, f64, f64)> {
    let threshold = solve_threshold(w, m, QuadBackend::GaussKronrod)?;
    landau_rate_compact_at(w, m, k, &threshold)
}

/// [`landau_rate_compact`] with a precomputed threshold.
pub fn landau_rate_compact_at(
    w: &InteractionSymbol,
    m: &Marginal,
    k: f64,
    threshold: &ThresholdResult,
) -> Result<(f64, f64, f64)> {
    let _ = w;
    if !m.upsilon().is_finite() || threshold.degenerate {
        return Err(Error::WrongRegime(
            "the compact-regime law needs a finite maximal speed; use landau_rate_gaussian",
        ));
    }
    let kappa0 = threshold.kappa0;
    if k <= kappa0 {
        return Err(Error::WrongRegime(
            "the compact-regime law applies only above the survival threshold",
        ));
    }
    let upsilon = m.upsilon();
    let k1 = kappa_tilde(m, 1, kappa0)?;
    let k0p = kappa_tilde0_prime(m, kappa0)?;
    let theta0 = (2.0 * kappa0 - k0p) / k1;
    let nu_star = upsilon + 0.5 * k - theta0 * (k - kappa0);
    let rate = -PI / (2.0 * k1 * k) * (m.phi(nu_star - 0.5 * k) - m.phi(nu_star + 0.5 * k));
    Ok((rate, nu_star, theta0))
}

fn binomial(n: u32, k: u32) -> f64 {
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

// ---------- continued roots ----------

/// `D` and `∂_λ D` on the branch continued across the axis.
///
/// The continuation follows the root's own crossing path: analytic
/// marginals cross through the support (jump on both kernel arguments);
/// compact marginals cross with the minus argument through the support
/// slit (jump there, with the polynomial extension of `φ`) while the plus
/// argument stays outside the support where the plain integral continues.
fn d_continued(
    w_k: f64,
    h: &HilbertEvaluator,
    m: &Marginal,
    lambda: Complex64,
    k: f64,
    strip: Option<f64>,
) -> Result<(Complex64, Complex64)> {
    let (zp, zm) = kernel_arguments(lambda, k);
    let analytic = matches!(m.decay_class(), crate::DecayClass::Analytic);
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for (arg, takes_jump, sign) in [(zp, analytic, 1.0), (zm, true, -1.0)] {
        let (v, d) = if arg.im > 0.0 && takes_jump {
            if let Some(width) = strip {
                if arg.im > width {
                    return Err(Error::ContinuationStrip { im: arg.im, width });
                }
            }
            let jump = Complex64::new(0.0, 2.0 * PI);
            (
                h.direct(0, arg) + jump * m.phi_complex(arg)?,
                h.direct(1, arg) + jump * m.phi_deriv_complex(arg, 1)?,
            )
        } else if arg.im == 0.0 {
            (h.eval_boundary(arg.re), h.boundary_derivative(arg.re, 1))
        } else {
            (h.direct(0, arg), h.direct(1, arg))
        };
        value += v * sign;
        deriv += d * sign;
    }
    let scale = w_k / (2.0 * k);
    // the kernel arguments move with dλ at rate -i/(2k)
    Ok((
        Complex64::new(1.0, 0.0) + value * scale,
        deriv * scale * Complex64::new(0.0, -1.0 / (2.0 * k)),
    ))
}

/// Seed for [`solve_damped_root`]: the quartic comparison root for
/// unbounded supports, the edge asymptotics for compact ones.
pub fn damped_seed(w: &InteractionSymbol, m: &Marginal, k: f64) -> Result<Complex64> {
    if m.upsilon().is_finite() {
        let threshold = solve_threshold(w, m, QuadBackend::GaussKronrod)?;
        if k <= threshold.kappa0 {
            let p = dispersion_point(w, m, k, &threshold)?;
            Ok(Complex64::new(0.0, p.tau_star))
        } else {
            let (rate, nu_star, _) = landau_rate_compact_at(w, m, k, &threshold)?;
            Ok(Complex64::new(rate, 2.0 * k * nu_star))
        }
    } else {
        let tau0_sq = m.tau0() * m.tau0();
        let tau1_sq = 24.0 * m.moment(1)?;
        // upper root of λ⁴ + λ²τ₀² - k²τ₁² = 0
        let im = (0.5 * (tau0_sq + (tau0_sq * tau0_sq + 4.0 * tau1_sq * k * k).sqrt())).sqrt();
        Ok(Complex64::new(0.0, im))
    }
}

/// Newton iteration on the analytically continued dispersion relation,
/// with the exact kernel derivative (quadratic convergence near the
/// simple roots).
pub fn solve_damped_root(
    w: &InteractionSymbol,
    m: &Marginal,
    k: f64,
    seed: Complex64,
) -> Result<DispersionPoint> {
    let w_k = w.w_hat(k)?;
    let h = HilbertEvaluator::new(m);
    let strip = if m.upsilon().is_finite() {
        // polynomial-extension validity window above the threshold
        let threshold = solve_threshold(w, m, QuadBackend::GaussKronrod)?;
        Some(10.0 * (k - threshold.kappa0).max(1e-3))
    } else {
        let width = m.analyticity_width();
        width.is_finite().then_some(width)
    };
    let mut lambda = seed;
    let mut last_residual = f64::INFINITY;
    for _ in 0..50 {
        let (value, deriv) = d_continued(w_k, &h, m, lambda, k, strip)?;
        last_residual = value.norm();
        if deriv.norm() < 1e-14 {
            return Err(Error::DegenerateRoot(deriv.norm()));
        }
        let step = value / deriv;
        lambda -= step;
        if step.norm() < 1e-13 * (1.0 + lambda.norm()) && last_residual < 1e-10 {
            return Ok(DispersionPoint {
                k,
                tau_star: lambda.im.abs(),
                dtau: None,
                ddtau: None,
                re_lambda: lambda.re,
                method: RootMethod::ContinuedNewton,
            });
        }
    }
    // accept a converged residual even if the step criterion never fired
    let (value, _) = d_continued(w_k, &h, m, lambda, k, strip)?;
    if value.norm() < 1e-10 {
        return Ok(DispersionPoint {
            k,
            tau_star: lambda.im.abs(),
            dtau: None,
            ddtau: None,
            re_lambda: lambda.re,
            method: RootMethod::ContinuedNewton,
        });
    }
    Err(Error::NewtonDiverged {
        iterations: 50,
        residual: last_residual,
        last_re: lambda.re,
        last_im: lambda.im,
    })
}

// ---------- Nyquist certificates ----------

/// Argument-principle certificate over the boundary of
/// `{Re λ > 0, |λ| < T}`, with indentations around registered on-axis (or
/// numerically on-axis) zeros.
#[derive(Debug, Clone)]
pub struct NyquistCertificate {
    pub k: f64,
    /// Zeros of `D` enclosed by the contour.
    pub winding_number: i32,
    /// Radius of the closing semicircle actually used.
    pub contour_t: f64,
    /// Indentation radius, when the axis was indented.
    pub indentation_radius: Option<f64>,
    /// Number of on-axis plasmon zeros captured by leftward indentation.
    pub captured_on_axis_zeros: u32,
    /// Smallest sampled `|D|` on the straight axis segments.
    pub min_abs_d_on_axis: f64,
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    /// `λ = iτ`, walked downward from `τ = a` to `τ = b`.
    Axis { a: f64, b: f64 },
    /// Semicircle around `iτ_c` bulging left (encloses the axis zero).
    IndentLeft { center: f64, r: f64 },
    /// Semicircle around `iτ_c` bulging right (excludes a nearby zero).
    IndentRight { center: f64, r: f64 },
    /// Closing arc `λ = T e^{iθ}`, `θ: -π/2 → π/2`.
    Arc { t: f64 },
}

impl Piece {
    fn point(&self, s: f64) -> Complex64 {
        match *self {
            Piece::Axis { a, b } => Complex64::new(0.0, a + (b - a) * s),
            Piece::IndentLeft { center, r } => {
                let th = 0.5 * PI + PI * s;
                Complex64::new(r * th.cos(), center + r * th.sin())
            }
            Piece::IndentRight { center, r } => {
                let th = 0.5 * PI - PI * s;
                Complex64::new(r * th.cos(), center + r * th.sin())
            }
            Piece::Arc { t } => {
                let th = -0.5 * PI + PI * s;
                Complex64::new(t * th.cos(), t * th.sin())
            }
        }
    }

    fn initial_samples(&self, scale: f64) -> usize {
        match *self {
            Piece::Axis { a, b } => (((a - b).abs() / (0.1 * scale)).ceil() as usize).clamp(8, 4000),
            Piece::IndentLeft { .. } | Piece::IndentRight { .. } => 32,
            Piece::Arc { .. } => 64,
        }
    }
}

/// Compute the Nyquist certificate for wavenumber `k` with closing radius
/// at least `t_arc` (grown internally until `|D - 1| < 1/2` on the arc).
pub fn nyquist_certificate(
    w: &InteractionSymbol,
    m: &Marginal,
    k: f64,
    t_arc: f64,
) -> Result<NyquistCertificate> {
    let w_k = w.w_hat(k)?;
    let h = HilbertEvaluator::new(m);
    let tau0 = m.tau0();
    let threshold = solve_threshold(w, m, QuadBackend::GaussKronrod)?;

    // registered structure on / near the axis
    let mut left_centers: Vec<f64> = Vec::new();
    let mut right_centers: Vec<f64> = Vec::new();
    let mut r_ind = None;
    if !threshold.degenerate && k < threshold.kappa0 {
        let p = dispersion_point(w, m, k, &threshold)?;
        let gap = p.tau_star - (2.0 * k * m.upsilon() + k * k);
        let r = (0.5 * gap).min(0.5 * k).min(0.25 * p.tau_star).max(1e-7);
        left_centers.push(p.tau_star);
        left_centers.push(-p.tau_star);
        r_ind = Some(r);
    } else {
        // a damped root close to the axis is indistinguishable from an
        // on-axis zero at sample resolution; detour to its right
        if let Ok(seed) = damped_seed(w, m, k) {
            if let Ok(root) = solve_damped_root(w, m, k, seed) {
                let near = 0.05 * (1.0 + tau0);
                if root.re_lambda.abs() < near {
                    let r = (0.25 * (1.0 + tau0)).min(0.45 * root.tau_star).max(1e-4);
                    right_centers.push(root.tau_star);
                    right_centers.push(-root.tau_star);
                    r_ind = Some(r);
                }
            }
        }
    }

    // closing radius: |D - 1| < 1/2 must hold on the arc
    let mut t = t_arc.max(4.0 * (1.0 + tau0));
    let mut guard = 0;
    loop {
        let mut ok = true;
        for i in 0..16 {
            let th = -0.5 * PI + PI * (i as f64 + 0.5) / 16.0;
            let lambda = Complex64::new(t * th.cos(), t * th.sin());
            let d = eval_d_contour(w_k, &h, lambda, k);
            if (d - 1.0).norm() >= 0.5 {
                ok = false;
                break;
            }
        }
        if ok || guard >= 12 {
            break;
        }
        t *= 2.0;
        guard += 1;
    }

    // assemble the contour: down the axis with detours, then the arc
    let mut pieces: Vec<Piece> = Vec::new();
    let mut centers: Vec<(f64, bool)> = left_centers
        .iter()
        .map(|&c| (c, true))
        .chain(right_centers.iter().map(|&c| (c, false)))
        .collect();
    centers.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let r = r_ind.unwrap_or(0.0);
    let mut cursor = t;
    for &(c, left) in &centers {
        pieces.push(Piece::Axis { a: cursor, b: c + r });
        if left {
            pieces.push(Piece::IndentLeft { center: c, r });
        } else {
            pieces.push(Piece::IndentRight { center: c, r });
        }
        cursor = c - r;
    }
    pieces.push(Piece::Axis { a: cursor, b: -t });
    pieces.push(Piece::Arc { t });

    // walk the contour accumulating argument increments
    let mut total_arg = 0.0;
    let mut min_axis = f64::INFINITY;
    let mut prev: Option<Complex64> = None;
    let mut first: Option<Complex64> = None;
    for piece in &pieces {
        let n0 = piece.initial_samples(1.0 + tau0);
        let mut params: Vec<f64> = (0..=n0).map(|i| i as f64 / n0 as f64).collect();
        let mut idx = 0;
        let mut d_here = eval_d_contour(w_k, &h, piece.point(params[0]), k);
        let on_axis = matches!(piece, Piece::Axis { .. });
        if on_axis {
            min_axis = min_axis.min(d_here.norm());
        }
        if let Some(p) = prev {
            total_arg += (d_here / p).arg();
        } else {
            first = Some(d_here);
        }
        while idx + 1 < params.len() {
            let (s0, s1) = (params[idx], params[idx + 1]);
            let d_next = eval_d_contour(w_k, &h, piece.point(s1), k);
            let step = (d_next / d_here).arg();
            if step.abs() > 0.5 && (s1 - s0) > 1e-7 {
                params.insert(idx + 1, 0.5 * (s0 + s1));
                continue;
            }
            if step.abs() > 0.98 * PI {
                return Err(Error::NyquistInconclusive {
                    min_abs: d_next.norm().min(d_here.norm()),
                    tau: piece.point(s1).im,
                });
            }
            if on_axis {
                let norm = d_next.norm();
                min_axis = min_axis.min(norm);
                if norm < 1e-8 {
                    return Err(Error::NyquistInconclusive {
                        min_abs: norm,
                        tau: piece.point(s1).im,
                    });
                }
            }
            total_arg += step;
            d_here = d_next;
            idx += 1;
        }
        prev = Some(d_here);
    }
    // close the loop
    if let (Some(p), Some(f)) = (prev, first) {
        total_arg += (f / p).arg();
    }
    let winding = (total_arg / (2.0 * PI)).round();
    if (total_arg - winding * 2.0 * PI).abs() > 0.4 * PI {
        return Err(Error::NyquistInconclusive { min_abs: min_axis, tau: f64::NAN });
    }
    Ok(NyquistCertificate {
        k,
        winding_number: winding as i32,
        contour_t: t,
        indentation_radius: r_ind,
        captured_on_axis_zeros: left_centers.len() as u32,
        min_abs_d_on_axis: min_axis,
    })
}

/// `D` on contour points: boundary values on the axis, the direct integral
/// elsewhere. Indentation arcs keep both kernel arguments off the support,
/// so the plain integral is the analytic branch there.
fn eval_d_contour(w_k: f64, h: &HilbertEvaluator, lambda: Complex64, k: f64) -> Complex64 {
    let (zp, zm) = kernel_arguments(lambda, k);
    let scale = w_k / (2.0 * k);
    if lambda.re == 0.0 {
        Complex64::new(1.0, 0.0) + (h.eval_boundary(zp.re) - h.eval_boundary(zm.re)) * scale
    } else {
        Complex64::new(1.0, 0.0) + (h.direct(0, zp) - h.direct(0, zm)) * scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dielectric::{eval_d, EvalPath};
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

    /// Brute-force oracle: bisection on κ with a 10⁶-point trapezoid of
    /// κ² = 1/2 ∫ (π/3)(1-u)²(1+u)³/(1+κ-u) du, independent of the library
    /// quadrature.
    fn kappa0_brute_force() -> f64 {
        let f = |kappa: f64| -> f64 {
            let integral = trapezoid(
                |u| PI / 3.0 * (1.0 - u) * (1.0 - u) * (1.0 + u).powi(3) / (1.0 + kappa - u),
                -1.0,
                1.0,
                1_000_000,
            );
            kappa * kappa - 0.5 * integral
        };
        let (mut lo, mut hi) = (0.2, 2.0);
        assert!(f(lo) < 0.0 && f(hi) > 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn threshold_matches_brute_force_and_backends_agree() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let gk = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        let tz = solve_threshold(&w, &m, QuadBackend::Trapezoid(1_000_000)).unwrap();
        let oracle = kappa0_brute_force();
        assert!(
            (gk.kappa0 - oracle).abs() < 1e-8,
            "gk {} vs oracle {oracle}",
            gk.kappa0
        );
        assert!(
            (gk.kappa0 - tz.kappa0).abs() < 1e-8,
            "gk {} vs trapezoid {}",
            gk.kappa0,
            tz.kappa0
        );
        assert!(gk.residual.abs() < 1e-10);
        assert!(!gk.degenerate);
    }

    #[test]
    fn threshold_degenerate_for_unbounded_support() {
        let m = maxwell3();
        let w = InteractionSymbol::Coulomb;
        let r = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        assert_eq!(r.kappa0, 0.0);
        assert!(r.degenerate);
    }

    #[test]
    fn phi_strictly_monotone_around_threshold() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let k0 = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap().kappa0;
        assert!(capital_phi(&w, &m, 1.1 * k0).unwrap() > 0.0);
        assert!(capital_phi(&w, &m, 0.9 * k0).unwrap() < 0.0);
    }

    #[test]
    fn tau_star_long_wave_limit() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let tau0 = (2.0 * m.rho_mu()).sqrt();
        // τ₀ = √(64π/105) for this profile
        assert!((tau0 - (64.0 * PI / 105.0).sqrt()).abs() < 1e-12);
        let p = solve_tau_star(&w, &m, 1e-4).unwrap();
        assert!((p.tau_star - tau0).abs() / tau0 < 1e-6);
        let p0 = solve_tau_star(&w, &m, 0.0).unwrap();
        assert_eq!(p0.tau_star, tau0);
    }

    #[test]
    fn tau_star_at_threshold_hits_the_edge() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let th = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        let p = dispersion_point(&w, &m, th.kappa0, &th).unwrap();
        let edge = 2.0 * th.kappa0 * m.upsilon() + th.kappa0 * th.kappa0;
        assert!(
            (p.tau_star - edge).abs() / edge < 1e-8,
            "tau* {} vs edge {edge}",
            p.tau_star
        );
    }

    #[test]
    fn defining_relation_via_independent_path() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let th = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        for i in 1..=20 {
            let k = th.kappa0 * i as f64 / 21.0;
            let p = dispersion_point(&w, &m, k, &th).unwrap();
            // re-evaluate through the Plemelj boundary machinery
            let d =
                eval_d(&w, &m, Complex64::new(0.0, p.tau_star), k, EvalPath::Boundary).unwrap();
            assert!(d.value.norm() < 1e-9, "k = {k}: |D(iτ*)| = {}", d.value.norm());
        }
    }

    #[test]
    fn rejects_k_above_threshold() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let th = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        assert!(matches!(
            dispersion_point(&w, &m, th.kappa0 * 1.05, &th),
            Err(Error::NoOnAxisRoot { .. })
        ));
    }

    #[test]
    fn moment_integral_bounds() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let th = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        let k = 0.5 * th.kappa0;
        let p = dispersion_point(&w, &m, k, &th).unwrap();
        let t = moment_integrals(&w, &m, k, p.tau_star).unwrap();
        assert!(t[0][0] > 0.0 && t[1][0] > 0.0);
        assert!(t[0][1] > 0.0, "odd moment positive below threshold");
        // odd moments scale like k
        let k_small = 1e-3;
        let p_small = dispersion_point(&w, &m, k_small, &th).unwrap();
        let t_small = moment_integrals(&w, &m, k_small, p_small.tau_star).unwrap();
        assert!(t_small[0][1].abs() < 10.0 * k_small);
        // singular-denominator guard
        assert!(matches!(
            moment_integrals(&w, &m, k, 0.5 * (2.0 * k * m.upsilon() + k * k)),
            Err(Error::SingularDenominator { .. })
        ));
    }

    #[test]
    fn group_velocity_matches_finite_differences() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let th = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        let k = 0.45 * th.kappa0;
        let hstep = 1e-4 * th.kappa0;
        let p = dispersion_point(&w, &m, k, &th).unwrap();
        let tp = dispersion_point(&w, &m, k + hstep, &th).unwrap().tau_star;
        let tm = dispersion_point(&w, &m, k - hstep, &th).unwrap().tau_star;
        let fd1 = (tp - tm) / (2.0 * hstep);
        let fd2 = (tp - 2.0 * p.tau_star + tm) / (hstep * hstep);
        let dtau = p.dtau.unwrap();
        let ddtau = p.ddtau.unwrap();
        assert!(
            (dtau - fd1).abs() / fd1.abs() < 1e-5,
            "closed form {dtau} vs fd {fd1}"
        );
        assert!(
            (ddtau - fd2).abs() / fd2.abs() < 1e-3,
            "closed form {ddtau} vs fd {fd2}"
        );
        assert!(dtau > 0.0 && ddtau > 0.0);
    }

    #[test]
    fn gaussian_rate_closed_form() {
        let m = maxwell3();
        let w = InteractionSymbol::Coulomb;
        for &k in &[0.3, 0.4, 0.5] {
            let (rate, nu) = landau_rate_gaussian(&w, &m, k).unwrap();
            // direct substitution with φ'(u) = -2πu e^{-u²}
            let expect = PI * nu * nu * (-2.0 * PI * nu * (-nu * nu).exp());
            assert!((rate - expect).abs() < 1e-10 * expect.abs());
            assert!(rate < 0.0);
        }
        // |rate| decreasing in ν* beyond the φ' peak
        let r1 = landau_rate_gaussian(&w, &m, 0.5).unwrap().0.abs();
        let r2 = landau_rate_gaussian(&w, &m, 0.4).unwrap().0.abs();
        let r3 = landau_rate_gaussian(&w, &m, 0.3).unwrap().0.abs();
        assert!(r1 > r2 && r2 > r3);
        // wrong regime
        assert!(landau_rate_gaussian(&w, &compact3(), 0.4).is_err());
    }

    #[test]
    fn compact_rate_internal_identity_and_sign() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let th = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        // κ̃₀(κ₀) = κ₀², the two sides coming from independent quadratures
        let k0t = kappa_tilde(&m, 0, th.kappa0).unwrap();
        assert!(
            (k0t - th.kappa0 * th.kappa0).abs() < 1e-8,
            "kappa_tilde0 {k0t} vs kappa0² {}",
            th.kappa0 * th.kappa0
        );
        let (rate, nu, theta0) = landau_rate_compact(&w, &m, th.kappa0 * 1.05).unwrap();
        assert!(theta0 > 0.0);
        assert!(rate < 0.0);
        assert!(nu < m.upsilon() + 0.5 * th.kappa0 * 1.05);
        assert!(landau_rate_compact(&w, &m, 0.5 * th.kappa0).is_err());
        assert!(landau_rate_compact(&w, &maxwell3(), 0.1).is_err());
    }

    #[test]
    fn compact_rate_vanishes_with_edge_exponent() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let th = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        // log-log slope of |rate| vs (k - κ₀) should match N₁ = 3
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        for i in 1..=6 {
            let dk = 0.02 * i as f64 * th.kappa0;
            let (rate, _, _) = landau_rate_compact(&w, &m, th.kappa0 + dk).unwrap();
            lx.push(dk.ln());
            ly.push(rate.abs().ln());
        }
        let slope = fit_slope(&lx, &ly);
        assert!((slope - 3.0).abs() < 0.3, "edge exponent {slope}");
    }

    fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }

    /// Cold dilute gas: the asymptotic damping law carries an O(1)
    /// Bohm-Gross-type prefactor error unless the phase velocity runs far
    /// ahead of the thermal speed, so the ladder test lives there.
    fn maxwell3_cold() -> Marginal {
        let p = EquilibriumProfile::new(3, ProfileKind::Maxwell { beta: 8.0, amplitude: 0.125 })
            .unwrap();
        build_marginal(&p).unwrap()
    }

    #[test]
    fn damped_root_gaussian_ladder() {
        let m = maxwell3_cold();
        let w = InteractionSymbol::Coulomb;
        let mut ratios = Vec::new();
        for &k in &[0.09, 0.11, 0.13] {
            let seed = damped_seed(&w, &m, k).unwrap();
            let root = solve_damped_root(&w, &m, k, seed).unwrap();
            assert!(root.re_lambda < 0.0, "k={k}: Re λ = {}", root.re_lambda);
            assert!(root.re_lambda.abs() >= 1e-9, "k={k}: unresolvable damping");
            let (asym, _) = landau_rate_gaussian(&w, &m, k).unwrap();
            let ratio = asym / root.re_lambda;
            assert!(
                ratio > 0.5 && ratio < 2.0,
                "k={k}: newton {} vs asym {asym}",
                root.re_lambda
            );
            ratios.push(ratio);
        }
        // trend toward 1 as k decreases
        assert!(
            (ratios[0] - 1.0).abs() <= (ratios[1] - 1.0).abs() + 1e-3
                && (ratios[1] - 1.0).abs() <= (ratios[2] - 1.0).abs() + 1e-3,
            "ratios {ratios:?}"
        );
        // conjugate pairing
        let k = 0.11;
        let seed = damped_seed(&w, &m, k).unwrap();
        let plus = solve_damped_root(&w, &m, k, seed).unwrap();
        let minus = solve_damped_root(&w, &m, k, seed.conj()).unwrap();
        assert!((plus.re_lambda - minus.re_lambda).abs() < 1e-10);
        assert!((plus.tau_star - minus.tau_star).abs() < 1e-10);
    }

    #[test]
    fn damped_root_on_axis_below_threshold() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let th = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        let k = 0.6 * th.kappa0;
        let p_axis = dispersion_point(&w, &m, k, &th).unwrap();
        let seed = Complex64::new(0.0, p_axis.tau_star * 1.001);
        let root = solve_damped_root(&w, &m, k, seed).unwrap();
        assert!(root.re_lambda.abs() < 1e-10);
        assert!((root.tau_star - p_axis.tau_star).abs() < 1e-8);
    }

    #[test]
    fn damped_root_compact_above_threshold() {
        let m = compact3();
        let w = InteractionSymbol::Coulomb;
        let th = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        let k = th.kappa0 * 1.08;
        let seed = damped_seed(&w, &m, k).unwrap();
        let root = solve_damped_root(&w, &m, k, seed).unwrap();
        assert!(root.re_lambda < 0.0);
        // asymptotic law within a factor of a few this close to the threshold
        let (asym, _, _) = landau_rate_compact(&w, &m, k).unwrap();
        let ratio = root.re_lambda / asym;
        assert!(ratio > 0.3 && ratio < 3.0, "ratio {ratio}");
    }

    #[test]
    fn nyquist_zero_winding_above_threshold() {
        let w = InteractionSymbol::Coulomb;
        let m = compact3();
        let th = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        for &k in &[th.kappa0 + 0.1, th.kappa0 + 0.5, 3.0] {
            let c = nyquist_certificate(&w, &m, k, 30.0).unwrap();
            assert_eq!(c.winding_number, 0, "k = {k}");
            assert_eq!(c.captured_on_axis_zeros, 0);
        }
        let gm = maxwell3();
        for &k in &[0.3, 1.0, 4.0] {
            let c = nyquist_certificate(&w, &gm, k, 30.0).unwrap();
            assert_eq!(c.winding_number, 0, "k = {k}");
        }
    }

    #[test]
    fn nyquist_counts_plasmon_zeros_below_threshold() {
        let w = InteractionSymbol::Coulomb;
        let m = compact3();
        let th = solve_threshold(&w, &m, QuadBackend::GaussKronrod).unwrap();
        let k = 0.5 * th.kappa0;
        let c = nyquist_certificate(&w, &m, k, 30.0).unwrap();
        assert_eq!(c.winding_number, 2);
        assert_eq!(c.captured_on_axis_zeros, 2);
        assert!(c.min_abs_d_on_axis > 1e-8);
        // stability under a doubled closing radius
        let c2 = nyquist_certificate(&w, &m, k, 2.0 * c.contour_t).unwrap();
        assert_eq!(c2.winding_number, 2);
    }
}
