//! Radial equilibrium profiles `μ(e)` and their velocity marginals `φ(u)`.
//!
//! The marginal is the integral of `μ` over the directions orthogonal to a
//! fixed wavevector,
//!
//! ```text
//! φ(u) = c_d ∫₀^∞ μ(u² + r²) r^{d-2} dr ,
//! ```
//!
//! with `c_d` the surface measure of the unit sphere in `ℝ^{d-1}` (so
//! `c₂ = 2`, `c₃ = 2π`). For `d = 3` this collapses to the closed form
//! `φ(u) = π ∫_{u²}^∞ μ(e) de`, which is what the built-in kinds use.
//! Every scalar functional consumed downstream (mass, even moments, the
//! Fourier transform `φ̂`) lives here.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::quad::{adaptive_gk, GaussLegendre};
use crate::special::{gamma_half, spherical_jn};
use crate::{Error, Result};

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;

const PI: f64 = core::f64::consts::PI;

// ---------- profiles ----------

/// The equilibrium family `μ(e)`, parameterized by kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `μ(e) = A e^{-βe}` (Boltzmann/Maxwell gas).
    Maxwell { beta: f64, amplitude: f64 },
    /// `μ(e) = 1 / (e^{β(e-μ_c)} + 1)` (positive-temperature Fermi gas).
    FermiDirac { beta: f64, chemical_potential: f64 },
    /// `μ(e) = 1 / (z⁻¹ e^{βe} - 1)` with fugacity `z < 1`.
    BoseEinstein { beta: f64, fugacity: f64 },
    /// `μ(e) = (1 - e/E_F)₊^m` — the zero-temperature compact family.
    CompactPoly { order: u32, energy_cutoff: f64 },
    /// Tabulated `μ(e)` with monotone cubic interpolation, clamped to zero
    /// outside the table.
    UserTable { energy: Vec<f64>, value: Vec<f64> },
}

/// Decay classification of the marginal, carried so tests can scale the
/// expected rates to the profile actually in use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayClass {
    /// `φ` extends to an entire or strip-analytic function.
    Analytic,
    /// `φ(u) ≲ ⟨u⟩^{-N₁}`.
    PolynomialTail(f64),
    /// `φ` vanishes like `(Υ - u)^{N₁}` at the support edge.
    Compact(f64),
}

/// A validated radial steady state.
#[derive(Debug, Clone)]
pub struct EquilibriumProfile {
    d: u32,
    kind: ProfileKind,
    table: Option<Pchip>,
}

impl EquilibriumProfile {
    pub fn new(d: u32, kind: ProfileKind) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let table = match &kind {
            ProfileKind::Maxwell { beta, amplitude } => {
                if *beta <= 0.0 || *amplitude <= 0.0 {
                    return Err(Error::InvalidProfile(String::from(
                        "maxwell needs beta > 0 and amplitude > 0",
                    )));
                }
                None
            }
            ProfileKind::FermiDirac { beta, .. } => {
                if *beta <= 0.0 {
                    return Err(Error::InvalidProfile(String::from("fermi_dirac needs beta > 0")));
                }
                None
            }
            ProfileKind::BoseEinstein { beta, fugacity } => {
                if *beta <= 0.0 || *fugacity <= 0.0 || *fugacity >= 1.0 {
                    return Err(Error::InvalidProfile(String::from(
                        "bose_einstein needs beta > 0 and 0 < fugacity < 1",
                    )));
                }
                None
            }
            ProfileKind::CompactPoly { order, energy_cutoff } => {
                if *order < 2 {
                    return Err(Error::InvalidProfile(format!(
                        "compact_poly needs order m >= 2, got {order}"
                    )));
                }
                if *energy_cutoff <= 0.0 {
                    return Err(Error::InvalidProfile(String::from(
                        "compact_poly needs energy_cutoff > 0",
                    )));
                }
                None
            }
            ProfileKind::UserTable { energy, value } => Some(Pchip::new(energy, value)?),
        };
        Ok(EquilibriumProfile { d, kind, table })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn kind(&self) -> &ProfileKind {
        &self.kind
    }

    /// Pointwise value `μ(e)` for `e ≥ 0`.
    pub fn mu(&self, e: f64) -> f64 {
        match &self.kind {
            ProfileKind::Maxwell { beta, amplitude } => amplitude * (-beta * e).exp(),
            ProfileKind::FermiDirac { beta, chemical_potential } => {
                let x = beta * (e - chemical_potential);
                // 1/(e^x + 1) without overflow
                if x > 0.0 {
                    let t = (-x).exp();
                    t / (1.0 + t)
                } else {
                    1.0 / (1.0 + x.exp())
                }
            }
            ProfileKind::BoseEinstein { beta, fugacity } => {
                let t = fugacity * (-beta * e).exp();
                t / (1.0 - t)
            }
            ProfileKind::CompactPoly { order, energy_cutoff } => {
                let s = 1.0 - e / energy_cutoff;
                if s <= 0.0 {
                    0.0
                } else {
                    s.powi(*order as i32)
                }
            }
            ProfileKind::UserTable { .. } => self.table.as_ref().unwrap().eval(e),
        }
    }

    /// Maximal particle speed `Υ` (infinite for positive kinds).
    pub fn upsilon(&self) -> f64 {
        match &self.kind {
            ProfileKind::CompactPoly { energy_cutoff, .. } => energy_cutoff.sqrt(),
            ProfileKind::UserTable { .. } => self.table.as_ref().unwrap().support_end().sqrt(),
            _ => f64::INFINITY,
        }
    }

    pub fn decay_class(&self) -> DecayClass {
        match &self.kind {
            ProfileKind::Maxwell { .. }
            | ProfileKind::FermiDirac { .. }
            | ProfileKind::BoseEinstein { .. } => DecayClass::Analytic,
            ProfileKind::CompactPoly { order, .. } => {
                DecayClass::Compact(*order as f64 + (self.d as f64 - 1.0) / 2.0)
            }
            ProfileKind::UserTable { .. } => {
                // edge order unknown for tables; the conservative floor is the
                // transverse half-power picked up by the marginal reduction
                DecayClass::Compact(1.0 + (self.d as f64 - 1.0) / 2.0)
            }
        }
    }
}

// ---------- marginal ----------

#[derive(Debug, Clone)]
enum MarginalForm {
    /// `φ(u) = c e^{-βu²}`
    Gaussian { c: f64, beta: f64 },
    /// `φ(u) = c (E_F - u²)₊^ν`
    Poly { c: f64, nu: f64, ef: f64, nu_int: Option<u32> },
    /// `φ(u) = c ln(1 + e^{-β(u²-μ_c)})` (d = 3 Fermi gas)
    Fermi { c: f64, beta: f64, mu_c: f64 },
    /// `φ(u) = -c ln(1 - z e^{-βu²})` (d = 3 Bose gas)
    Bose { c: f64, beta: f64, z: f64 },
    /// `φ(u) = π ∫_{u²}^∞ μ(e) de` on a tabulated profile (d = 3).
    TableD3 { cumulative: Pchip },
    /// Generic quadrature marginal sampled onto a dense interpolant.
    Sampled { spline: Pchip, half_width: f64 },
}

/// Immutable marginal `φ` together with every scalar functional of it the
/// spectral layer consumes. Constructed once per profile; safe to share
/// across threads.
#[derive(Debug, Clone)]
pub struct Marginal {
    d: u32,
    form: MarginalForm,
    upsilon: f64,
    decay_class: DecayClass,
    rho_mu: f64,
    moments: [f64; 4],
    /// `|u|` beyond which `φ` is below 1e-16 of its peak.
    support_radius: f64,
    gl: GaussLegendre,
}

/// Build the marginal `φ` of a profile, with closed forms where the kind
/// admits one and quadrature otherwise.
pub fn build_marginal(profile: &EquilibriumProfile) -> Result<Marginal> {
    let d = profile.d;
    let dm1 = d as f64 - 1.0;
    // c_d = surface measure of S^{d-2} in R^{d-1}: 2 π^{(d-1)/2} / Γ((d-1)/2)
    let c_d = 2.0 * PI.powf(dm1 / 2.0) / gamma_half(d - 1);

    let form = match profile.kind() {
        ProfileKind::Maxwell { beta, amplitude } => MarginalForm::Gaussian {
            c: amplitude * (PI / beta).powf(dm1 / 2.0),
            beta: *beta,
        },
        ProfileKind::CompactPoly { order, energy_cutoff } => {
            let m = *order;
            let nu = m as f64 + dm1 / 2.0;
            // ∫_{R^{d-1}} (1-|y|²)₊^m dy = π^{(d-1)/2} Γ(m+1) / Γ(m+1+(d-1)/2)
            let ball = PI.powf(dm1 / 2.0) * gamma_half(2 * (m + 1)) / gamma_half(2 * (m + 1) + d - 1);
            let c = ball / energy_cutoff.powi(m as i32);
            let nu_int = if (d - 1) % 2 == 0 { Some(m + (d - 1) / 2) } else { None };
            MarginalForm::Poly { c, nu, ef: *energy_cutoff, nu_int }
        }
        ProfileKind::FermiDirac { beta, chemical_potential } if d == 3 => MarginalForm::Fermi {
            c: PI / beta,
            beta: *beta,
            mu_c: *chemical_potential,
        },
        ProfileKind::BoseEinstein { beta, fugacity } if d == 3 => MarginalForm::Bose {
            c: PI / beta,
            beta: *beta,
            z: *fugacity,
        },
        ProfileKind::UserTable { .. } if d == 3 => {
            let cumulative = profile.table.as_ref().unwrap().cumulative_from_right();
            MarginalForm::TableD3 { cumulative }
        }
        _ => {
            // generic dimension: sample c_d ∫ μ(u²+r²) r^{d-2} dr onto a grid
            let upsilon = profile.upsilon();
            let half_width = if upsilon.is_finite() {
                upsilon
            } else {
                let mut u = 1.0;
                let peak = marginal_by_quadrature(profile, c_d, 0.0);
                while marginal_by_quadrature(profile, c_d, u) > 1e-16 * peak && u < 1e4 {
                    u *= 1.5;
                }
                u
            };
            let n = 2001;
            let mut us = Vec::with_capacity(n);
            let mut vs = Vec::with_capacity(n);
            for i in 0..n {
                let u = half_width * i as f64 / (n - 1) as f64;
                us.push(u);
                vs.push(marginal_by_quadrature(profile, c_d, u));
            }
            let spline = Pchip::new_unchecked(us, vs);
            MarginalForm::Sampled { spline, half_width }
        }
    };

    let upsilon = profile.upsilon();
    let mut m = Marginal {
        d,
        form,
        upsilon,
        decay_class: profile.decay_class(),
        rho_mu: 0.0,
        moments: [0.0; 4],
        support_radius: 0.0,
        gl: GaussLegendre::new(32),
    };
    m.support_radius = m.compute_support_radius();
    for l in 0..4 {
        m.moments[l] = m.compute_moment(l as u32);
    }
    m.rho_mu = m.moments[0];
    if !(m.rho_mu > 0.0) {
        return Err(Error::InvalidProfile(String::from("marginal has non-positive mass")));
    }
    Ok(m)
}

fn marginal_by_quadrature(profile: &EquilibriumProfile, c_d: f64, u: f64) -> f64 {
    let d = profile.d();
    let upsilon = profile.upsilon();
    let r_max = if upsilon.is_finite() {
        let s = upsilon * upsilon - u * u;
        if s <= 0.0 {
            return 0.0;
        }
        s.sqrt()
    } else {
        // truncate where the integrand has died off
        let mut r: f64 = 1.0;
        let peak = profile.mu(u * u);
        if peak <= 0.0 {
            return 0.0;
        }
        while profile.mu(u * u + r * r) > 1e-18 * peak && r < 1e4 {
            r *= 1.5;
        }
        r
    };
    c_d * adaptive_gk(
        |r| profile.mu(u * u + r * r) * r.powi(d as i32 - 2),
        0.0,
        r_max,
        1e-14,
        1e-11,
    )
}

impl Marginal {
    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn upsilon(&self) -> f64 {
        self.upsilon
    }

    pub fn decay_class(&self) -> DecayClass {
        self.decay_class
    }

    /// Total mass `ρ_μ = ∫ φ(u) du`.
    pub fn rho_mu(&self) -> f64 {
        self.rho_mu
    }

    /// `√(2 ρ_μ)` — the long-wave oscillation frequency.
    pub fn tau0(&self) -> f64 {
        (2.0 * self.rho_mu).sqrt()
    }

    /// Effective integration half-width (equals `Υ` for compact kinds).
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// The marginal `φ(u)`; even and non-negative by construction.
    pub fn phi(&self, u: f64) -> f64 {
        let u2 = u * u;
        match &self.form {
            MarginalForm::Gaussian { c, beta } => c * (-beta * u2).exp(),
            MarginalForm::Poly { c, nu, ef, .. } => {
                let s = ef - u2;
                if s <= 0.0 {
                    0.0
                } else {
                    c * s.powf(*nu)
                }
            }
            MarginalForm::Fermi { c, beta, mu_c } => {
                // softplus: ln(1 + e^y) with y = -β(u²-μ_c)
                let y = -beta * (u2 - mu_c);
                c * softplus(y)
            }
            MarginalForm::Bose { c, beta, z } => {
                let t = z * (-beta * u2).exp();
                -c * (-t).ln_1p()
            }
            MarginalForm::TableD3 { cumulative } => {
                // μ is clamped to zero below the table, so the tail integral
                // is constant there
                if u2 < cumulative.x[0] {
                    PI * cumulative.y[0]
                } else {
                    PI * cumulative.eval(u2)
                }
            }
            MarginalForm::Sampled { spline, half_width } => {
                let au = u.abs();
                if au >= *half_width {
                    0.0
                } else {
                    spline.eval(au).max(0.0)
                }
            }
        }
    }

    /// First derivative `φ'(u)`.
    pub fn dphi(&self, u: f64) -> f64 {
        match &self.form {
            MarginalForm::Gaussian { c, beta } => -2.0 * beta * u * c * (-beta * u * u).exp(),
            MarginalForm::Poly { c, nu, ef, .. } => {
                let s = ef - u * u;
                if s <= 0.0 {
                    0.0
                } else {
                    -2.0 * nu * u * c * s.powf(nu - 1.0)
                }
            }
            MarginalForm::Fermi { c, beta, mu_c } => {
                // d/du softplus(-β(u²-μ_c)) = -2βu σ(-β(u²-μ_c))
                let y = -beta * (u * u - mu_c);
                -2.0 * beta * u * c * sigmoid(y)
            }
            MarginalForm::Bose { c, beta, z } => {
                let t = z * (-beta * u * u).exp();
                -2.0 * beta * u * c * t / (1.0 - t)
            }
            MarginalForm::TableD3 { cumulative } => {
                // d/du π ∫_{u²}^∞ μ = -2πu μ(u²), with μ = -(d/de) of the tail integral
                -2.0 * PI * u * cumulative.mu_from_cumulative(u * u)
            }
            MarginalForm::Sampled { spline, half_width } => {
                let au = u.abs();
                if au >= *half_width {
                    0.0
                } else {
                    spline.derivative(au) * u.signum()
                }
            }
        }
    }

    /// n-th derivative of `φ`; closed forms for the analytic and polynomial
    /// kinds (n ≤ 4), central differences on the sampled kinds.
    pub fn phi_deriv(&self, u: f64, n: u32) -> f64 {
        match n {
            0 => self.phi(u),
            1 => self.dphi(u),
            _ => match &self.form {
                MarginalForm::Gaussian { c, beta } => {
                    // d^n/du^n e^{-βu²} = (-√β)^n H_n(√β u) e^{-βu²}
                    let sb = beta.sqrt();
                    let x = sb * u;
                    let h = hermite(n, x);
                    c * (-sb).powi(n as i32) * h * (-x * x).exp()
                }
                MarginalForm::Poly { c, nu, ef, .. } => c * poly_deriv(*nu, *ef, u, n),
                _ => {
                    // central difference cascade on the level below
                    let h = 1e-4 * (1.0 + u.abs());
                    (self.phi_deriv(u + h, n - 1) - self.phi_deriv(u - h, n - 1)) / (2.0 * h)
                }
            },
        }
    }

    /// Fourier transform `φ̂(t) = ∫ e^{iut} φ(u) du`; real and even.
    pub fn phi_hat(&self, t: f64) -> f64 {
        let t = t.abs();
        match &self.form {
            MarginalForm::Gaussian { c, beta } => c * (PI / beta).sqrt() * (-t * t / (4.0 * beta)).exp(),
            MarginalForm::Poly { c, nu, ef, nu_int } => {
                let upsilon = ef.sqrt();
                let s = upsilon * t;
                if let Some(k) = nu_int {
                    // ∫_{-1}^{1} (1-x²)^ν e^{ixs} dx = ν! 2^{ν+1} j_ν(s)/s^ν
                    c * ef.powf(*nu) * upsilon * poly_fourier_integer(*k, s)
                } else {
                    self.phi_hat_by_quadrature(t)
                }
            }
            _ => self.phi_hat_by_quadrature(t),
        }
    }

    fn phi_hat_by_quadrature(&self, t: f64) -> f64 {
        let l = self.support_radius;
        // panels sized so each spans at most ~π of phase
        let panels = (2 * (l * t.abs() / PI).ceil() as usize + 2).min(20_000);
        2.0 * self.gl.integrate_panels(|u| self.phi(u) * (u * t).cos(), 0.0, l, panels)
    }

    /// Analytic (or polynomial) continuation of `φ` to complex argument,
    /// where the kind supports one.
    pub fn phi_complex(&self, z: Complex64) -> Result<Complex64> {
        match &self.form {
            MarginalForm::Gaussian { c, beta } => Ok(Complex64::from(*c) * (-(z * z) * *beta).exp()),
            MarginalForm::Poly { c, nu_int, ef, .. } => match nu_int {
                Some(k) => Ok(Complex64::from(*c) * (Complex64::from(*ef) - z * z).powi(*k as i32)),
                None => Err(Error::UnsupportedContinuation(
                    "half-integer edge power (even dimension) has a branch point at the support edge",
                )),
            },
            MarginalForm::Fermi { c, beta, mu_c } => {
                let y = -(z * z - mu_c) * *beta;
                // principal-branch ln(1 + e^y); valid inside the analyticity strip
                Ok(Complex64::from(*c) * softplus_complex(y))
            }
            MarginalForm::Bose { c, beta, z: fug } => {
                let t = Complex64::from(*fug) * (-(z * z) * *beta).exp();
                Ok(-Complex64::from(*c) * (Complex64::new(1.0, 0.0) - t).ln())
            }
            _ => Err(Error::UnsupportedContinuation("tabulated marginals have no continuation")),
        }
    }

    /// n-th complex derivative of the continued marginal (Gaussian and
    /// odd-dimension polynomial kinds, n ≤ 4).
    pub fn phi_deriv_complex(&self, z: Complex64, n: u32) -> Result<Complex64> {
        if n == 0 {
            return self.phi_complex(z);
        }
        match &self.form {
            MarginalForm::Gaussian { c, beta } => {
                let sb = beta.sqrt();
                let x = z * sb;
                Ok(Complex64::from(c * (-sb).powi(n as i32))
                    * hermite_complex(n, x)
                    * (-x * x).exp())
            }
            MarginalForm::Poly { c, nu_int: Some(k), ef, .. } => {
                Ok(Complex64::from(*c) * poly_deriv_complex(*k, *ef, z, n))
            }
            _ => Err(Error::UnsupportedContinuation(
                "derivative continuation exists only for gaussian and odd-dimension polynomial marginals",
            )),
        }
    }

    /// Half-width of the strip on which [`Marginal::phi_complex`] is valid.
    pub fn analyticity_width(&self) -> f64 {
        match &self.form {
            MarginalForm::Gaussian { .. } => f64::INFINITY,
            // the polynomial expression is entire; the caller enforces the
            // strip on which it actually continues the marginal
            MarginalForm::Poly { .. } => f64::INFINITY,
            MarginalForm::Fermi { beta, mu_c, .. } => {
                let branch = Complex64::new(*mu_c, PI / beta).sqrt();
                branch.im.abs()
            }
            MarginalForm::Bose { beta, z, .. } => ((1.0 / z).ln() / beta).sqrt(),
            _ => 0.0,
        }
    }

    /// Even moment `∫ u^{2l} φ(u) du`, `0 ≤ l ≤ 3`.
    pub fn moment(&self, l: u32) -> Result<f64> {
        if l > 3 {
            return Err(Error::MomentOrder(l));
        }
        Ok(self.moments[l as usize])
    }

    fn compute_moment(&self, l: u32) -> f64 {
        match &self.form {
            MarginalForm::Gaussian { c, beta } => {
                // ∫ u^{2l} e^{-βu²} du = Γ(l+1/2) / β^{l+1/2}
                c * gamma_half(2 * l + 1) / beta.powf(l as f64 + 0.5)
            }
            MarginalForm::Poly { c, nu, ef, .. } => {
                // ∫_{-Υ}^{Υ} u^{2l}(E_F-u²)^ν du = E_F^{ν+l+1/2} B(l+1/2, ν+1)
                let g_num = gamma_half(2 * l + 1) * gamma_f(nu + 1.0);
                let g_den = gamma_f(nu + l as f64 + 1.5);
                c * ef.powf(nu + l as f64 + 0.5) * g_num / g_den
            }
            _ => {
                let l_i = l as i32;
                2.0 * adaptive_gk(
                    |u| u.powi(2 * l_i) * self.phi(u),
                    0.0,
                    self.support_radius,
                    1e-14,
                    1e-11,
                )
            }
        }
    }

    fn compute_support_radius(&self) -> f64 {
        if self.upsilon.is_finite() {
            return self.upsilon;
        }
        let peak = self.phi(0.0);
        let mut u = 1.0;
        while self.phi(u) > 1e-16 * peak && u < 1e6 {
            u *= 1.25;
        }
        u
    }
}

fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

fn sigmoid(y: f64) -> f64 {
    if y > 0.0 {
        1.0 / (1.0 + (-y).exp())
    } else {
        let t = y.exp();
        t / (1.0 + t)
    }
}

fn softplus_complex(y: Complex64) -> Complex64 {
    if y.re > 0.0 {
        y + (Complex64::new(1.0, 0.0) + (-y).exp()).ln()
    } else {
        (Complex64::new(1.0, 0.0) + y.exp()).ln()
    }
}

/// Γ at real argument built from the half-integer ladder (arguments here are
/// always integer or half-integer multiples).
fn gamma_f(x: f64) -> f64 {
    let two_x = (2.0 * x).round();
    debug_assert!((2.0 * x - two_x).abs() < 1e-9, "gamma_f expects half-integer arguments");
    gamma_half(two_x as u32)
}

fn hermite(n: u32, x: f64) -> f64 {
    // physicists' Hermite polynomials by recurrence
    let mut h0 = 1.0;
    let mut h1 = 2.0 * x;
    if n == 0 {
        return h0;
    }
    for m in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * m as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

fn hermite_complex(n: u32, x: Complex64) -> Complex64 {
    let mut h0 = Complex64::new(1.0, 0.0);
    let mut h1 = 2.0 * x;
    if n == 0 {
        return h0;
    }
    for m in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * m as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// n-th derivative of `(E_F - z²)^k` for integer `k`, n ≤ 4. Coefficients
/// with exhausted falling factorials vanish, so no negative powers occur.
fn poly_deriv_complex(k: u32, ef: f64, z: Complex64, n: u32) -> Complex64 {
    let kf = k as f64;
    let s = Complex64::from(ef) - z * z;
    let pow = |e: i32| -> Complex64 {
        if e < 0 {
            Complex64::new(0.0, 0.0)
        } else {
            s.powi(e)
        }
    };
    let falling = |j: u32| -> f64 {
        let mut v = 1.0;
        for i in 0..j {
            v *= kf - i as f64;
        }
        v
    };
    match n {
        0 => pow(k as i32),
        1 => -2.0 * falling(1) * z * pow(k as i32 - 1),
        2 => {
            -2.0 * falling(1) * pow(k as i32 - 1)
                + 4.0 * falling(2) * z * z * pow(k as i32 - 2)
        }
        3 => {
            12.0 * falling(2) * z * pow(k as i32 - 2)
                - 8.0 * falling(3) * z * z * z * pow(k as i32 - 3)
        }
        4 => {
            12.0 * falling(2) * pow(k as i32 - 2)
                - 48.0 * falling(3) * z * z * pow(k as i32 - 3)
                + 16.0 * falling(4) * z.powi(4) * pow(k as i32 - 4)
        }
        _ => panic!("poly_deriv_complex supports n <= 4"),
    }
}

/// n-th derivative of `(E_F - u²)₊^ν`, n ≤ 4.
fn poly_deriv(nu: f64, ef: f64, u: f64, n: u32) -> f64 {
    let s = ef - u * u;
    if s <= 0.0 {
        return 0.0;
    }
    let p = |e: f64| if nu - e < 0.0 && s == 0.0 { 0.0 } else { s.powf(nu - e) };
    match n {
        0 => p(0.0),
        1 => -2.0 * nu * u * p(1.0),
        2 => -2.0 * nu * p(1.0) + 4.0 * nu * (nu - 1.0) * u * u * p(2.0),
        3 => {
            12.0 * nu * (nu - 1.0) * u * p(2.0)
                - 8.0 * nu * (nu - 1.0) * (nu - 2.0) * u.powi(3) * p(3.0)
        }
        4 => {
            12.0 * nu * (nu - 1.0) * p(2.0)
                - 48.0 * nu * (nu - 1.0) * (nu - 2.0) * u * u * p(3.0)
                + 16.0 * nu * (nu - 1.0) * (nu - 2.0) * (nu - 3.0) * u.powi(4) * p(4.0)
        }
        _ => panic!("poly_deriv supports n <= 4"),
    }
}

/// `∫_{-1}^{1} (1-x²)^ν e^{ixs} dx` for integer `ν`, via spherical Bessel.
fn poly_fourier_integer(nu: u32, s: f64) -> f64 {
    if s.abs() < 1e-8 {
        // value at zero: ν! 2^{ν+1} / (2ν+1)!!
        let mut v = 1.0;
        for m in 1..=nu {
            v *= m as f64;
        }
        let mut df = 1.0;
        for m in 1..=nu {
            df *= 2.0 * m as f64 + 1.0;
        }
        return v * 2.0_f64.powi(nu as i32 + 1) / df;
    }
    let mut fact = 1.0;
    for m in 1..=nu {
        fact *= m as f64;
    }
    fact * 2.0_f64.powi(nu as i32 + 1) * spherical_jn(nu, s) / s.powi(nu as i32)
}

// ---------- monotone cubic table interpolation ----------

/// Fritsch-Carlson monotone cubic interpolant, clamped to zero outside the
/// abscissa range. Preserves non-negativity and monotone tails of tabulated
/// profiles.
#[derive(Debug, Clone)]
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl Pchip {
    fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidProfile(String::from(
                "user_table needs matching energy/value arrays with at least 2 samples",
            )));
        }
        for w in x.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidProfile(String::from(
                    "user_table energies must be strictly increasing",
                )));
            }
        }
        for (i, v) in y.iter().enumerate() {
            if *v < 0.0 {
                return Err(Error::InvalidProfile(format!(
                    "user_table value at index {i} is negative"
                )));
            }
        }
        for w in y.windows(2) {
            if w[1] > w[0] + 1e-12 * (1.0 + w[0].abs()) {
                return Err(Error::InvalidProfile(String::from(
                    "user_table values must be non-increasing in energy",
                )));
            }
        }
        Ok(Self::new_unchecked(x.to_vec(), y.to_vec()))
    }

    fn new_unchecked(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let mut delta = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            delta.push((y[i + 1] - y[i]) / (x[i + 1] - x[i]));
        }
        let mut slope = alloc::vec![0.0; n];
        slope[0] = delta[0];
        slope[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] <= 0.0 {
                slope[i] = 0.0;
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
                let w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
                slope[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        Pchip { x, y, slope }
    }

    fn locate(&self, v: f64) -> Option<usize> {
        if v < self.x[0] || v > *self.x.last().unwrap() {
            return None;
        }
        let mut lo = 0;
        let mut hi = self.x.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.x[mid] <= v {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    fn eval(&self, v: f64) -> f64 {
        match self.locate(v) {
            None => 0.0,
            Some(i) => {
                let h = self.x[i + 1] - self.x[i];
                let t = (v - self.x[i]) / h;
                let (y0, y1) = (self.y[i], self.y[i + 1]);
                let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);
                let t2 = t * t;
                let t3 = t2 * t;
                y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
                    + m0 * (t3 - 2.0 * t2 + t)
                    + y1 * (-2.0 * t3 + 3.0 * t2)
                    + m1 * (t3 - t2)
            }
        }
    }

    fn derivative(&self, v: f64) -> f64 {
        match self.locate(v) {
            None => 0.0,
            Some(i) => {
                let h = self.x[i + 1] - self.x[i];
                let t = (v - self.x[i]) / h;
                let (y0, y1) = (self.y[i], self.y[i + 1]);
                let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);
                let t2 = t * t;
                (y0 * (6.0 * t2 - 6.0 * t)
                    + m0 * (3.0 * t2 - 4.0 * t + 1.0)
                    + y1 * (-6.0 * t2 + 6.0 * t)
                    + m1 * (3.0 * t2 - 2.0 * t))
                    / h
            }
        }
    }

    /// Largest abscissa bounding the positive part (support end for tables).
    fn support_end(&self) -> f64 {
        let n = self.y.len();
        for i in (0..n).rev() {
            if self.y[i] > 0.0 {
                return self.x[(i + 1).min(n - 1)];
            }
        }
        self.x[0]
    }

    /// Piecewise-exact `I(e) = ∫_e^{e_max} f` for the cubic interpolant,
    /// returned as a new interpolant over the same knots.
    fn cumulative_from_right(&self) -> Pchip {
        let n = self.x.len();
        let mut acc = alloc::vec![0.0; n];
        for i in (0..n - 1).rev() {
            let h = self.x[i + 1] - self.x[i];
            let (y0, y1) = (self.y[i], self.y[i + 1]);
            let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);
            // ∫₀¹ of the Hermite basis: h00 = 1/2, h10 = 1/12, h01 = 1/2, h11 = -1/12
            let seg = h * (0.5 * y0 + m0 / 12.0 + 0.5 * y1 - m1 / 12.0);
            acc[i] = acc[i + 1] + seg;
        }
        Pchip::new_unchecked(self.x.clone(), acc)
    }

    /// Recover `μ(e)` from the tail integral `∫_e^{e_max} μ`.
    fn mu_from_cumulative(&self, e: f64) -> f64 {
        -self.derivative(e)
    }
}
