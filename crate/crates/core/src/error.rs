use alloc::string::String;
use thiserror::Error;

/// Errors surfaced by the solvers.
///
/// Numerical routines are total wherever the underlying quantity is defined;
/// every variant here corresponds to a caller leaving the documented domain
/// of an operation or to a solver that could not certify its result.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spatial dimension must satisfy d >= 2, got {0}")]
    InvalidDimension(u32),

    #[error("invalid equilibrium profile: {0}")]
    InvalidProfile(String),

    #[error("moment order out of range: l = {0}, supported 0..=3")]
    MomentOrder(u32),

    #[error("interior evaluation needs Im z < 0 (got Im z = {im}); use the boundary or continued mode")]
    NotInterior { im: f64 },

    #[error("continued evaluation needs Im z > 0 (got Im z = {im}); use the interior or boundary mode")]
    NotContinued { im: f64 },

    #[error("analytic continuation unsupported for this marginal: {0}")]
    UnsupportedContinuation(&'static str),

    #[error("continuation point outside the validity strip: |Im z| = {im} exceeds {width}")]
    ContinuationStrip { im: f64, width: f64 },

    #[error("interaction symbol is singular at k = 0")]
    ZeroWavenumber,

    #[error("Laplace representation needs Re lambda >= 0, got {0}")]
    LaplaceDomain(f64),

    #[error("endpoint weight phi(u)/(Y-u) is not integrable (N1 = {0} < 1)")]
    NonIntegrableEndpoint(f64),

    #[error("no on-axis root: k = {k} exceeds the survival threshold {kappa0}; use solve_damped_root")]
    NoOnAxisRoot { k: f64, kappa0: f64 },

    #[error("singular denominator: tau = {tau} does not exceed 2kY + k^2 = {edge}")]
    SingularDenominator { tau: f64, edge: f64 },

    #[error("wrong damping regime: {0}")]
    WrongRegime(&'static str),

    #[error("Newton iteration failed to converge after {iterations} steps (last |D| = {residual:.3e} at lambda = {last_re:.6e}{last_im:+.6e}i)")]
    NewtonDiverged {
        iterations: u32,
        residual: f64,
        last_re: f64,
        last_im: f64,
    },

    #[error("degenerate root: |dD/dlambda| = {0:.3e} below 1e-10")]
    DegenerateRoot(f64),

    #[error("Nyquist certificate inconclusive: min |D| = {min_abs:.3e} on the axis near tau = {tau:.6} without a registered on-axis zero; refine the grid or register the zero")]
    NyquistInconclusive { min_abs: f64, tau: f64 },

    #[error("a pole of 1/D sits within {dist:.3e} of the integration axis but was not subtracted")]
    PoleNearAxis { dist: f64 },

    #[error("time step too large: dt = {dt} but the oscillation scale requires dt <= {suggested}")]
    StepSize { dt: f64, suggested: f64 },

    #[error("kernel tail truncation error {estimate:.3e} exceeds 1e-8; supply a wider table")]
    KernelTruncation { estimate: f64 },

    #[error("mode grid does not cover the support: boundary amplitude {boundary:.3e} exceeds 1e-6 of peak {peak:.3e}")]
    GridCoverage { boundary: f64, peak: f64 },

    #[error("trace too short: {0} samples, need at least {1}")]
    TraceTooShort(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
