//! Lattice evaluation of the two-boundary joint probability
//!
//! ```text
//! P[φ(t₀), φ(t_f)] = | ∫ Dφ exp(i·S[φ]/ħ) |²
//! ```
//!
//! for the free cavity field. The field action factorizes over sine modes,
//! each a unit-mass harmonic oscillator, so everything reduces to one time
//! lattice per mode: interior amplitudes `a₁..a_N` between fixed endpoints
//! `a₀ = α`, `a_{N+1} = β`, with action
//!
//! ```text
//! S = Σ_{j=0}^{N} [ (a_{j+1}−a_j)²/(2δ) − δ·ω²·V_j ]
//! ```
//!
//! and `V_j` a trapezoid or midpoint discretization of the potential term.
//! `S` is quadratic, `S = ½xᵀMx + bᵀx + s₀`, with `M` symmetric tridiagonal
//! Toeplitz, so its eigenvalues `D + 2E·cos(jπ/(N+1))` and sine eigenvectors
//! are known in closed form, so the Fresnel integral is evaluated exactly:
//! magnitude from `|det M|` (accumulated in log space), phase from the
//! classical action plus `π/4` per eigenvalue sign and the slicing
//! normalization. A singular `M` is the resonant case: the integral
//! concentrates on the compatible affine subspace when the boundary data
//! project to zero on the kernel, and vanishes (in the distributional sense)
//! when they do not: the lattice realization of "no allowable solutions,
//! zero probability".
//!
//! Two independent oracles live alongside: the closed-form harmonic-oscillator
//! propagator, and a regulated brute-force quadrature of the same integral
//! that never touches determinants or eigenvalues.

use crate::bvp::BoundarySlice;
use crate::error::{Error, Result};
use crate::model::{make_mode, CavityGrid, FieldParams, Mode};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Discretization of the `ω²a²/2` potential term along each lattice link.
///
/// Both yield exactly solvable quadratic actions; their continuum approach
/// differs. The trapezoid kernel's determinant is `sin((N+1)ψ)/sin(ψ)` with
/// `ψ = 2·asin(ωδ/2)`, so magnitudes converge at O(δ²). The midpoint kernel
/// picks up an extra `(1 + ω²δ²/4)^N` measure factor, an O(δ) magnitude
/// defect `≈ ω²Δt·δ/8`; its classical action still converges at O(δ²).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// `V_j = (a_j² + a_{j+1}²)/4`. Second-order magnitudes.
    #[default]
    Trapezoid,
    /// `V_j = ((a_j + a_{j+1})/2)²/2`.
    Midpoint,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Trapezoid => "trapezoid",
            Scheme::Midpoint => "midpoint",
        }
    }
}

/// One-mode lattice action specification: frequency, time slicing, endpoint
/// amplitudes, and potential scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeActionSpec {
    omega: f64,
    n_slices: usize,
    delta: f64,
    alpha: f64,
    beta: f64,
    scheme: Scheme,
    hbar: f64,
}

impl LatticeActionSpec {
    /// Splits `delta_t` into `n_slices` interior slices, `δ = Δt/(n_slices+1)`.
    pub fn new(
        omega: f64,
        delta_t: f64,
        n_slices: usize,
        alpha: f64,
        beta: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: format!("must be finite and >= 0, got {omega}"),
            });
        }
        if !(delta_t > 0.0) || !delta_t.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta_t",
                reason: format!("must be finite and > 0, got {delta_t}"),
            });
        }
        if n_slices < 1 {
            return Err(Error::InvalidParameter {
                name: "n_slices",
                reason: "need at least one interior slice".into(),
            });
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "endpoints",
                reason: format!("must be finite, got ({alpha}, {beta})"),
            });
        }
        Ok(Self {
            omega,
            n_slices,
            delta: delta_t / (n_slices as f64 + 1.0),
            alpha,
            beta,
            scheme,
            hbar: 1.0,
        })
    }

    /// Spec for a cavity mode's oscillator.
    pub fn for_mode(
        mode: &Mode,
        delta_t: f64,
        n_slices: usize,
        alpha: f64,
        beta: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        Self::new(mode.frequency, delta_t, n_slices, alpha, beta, scheme)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidParameter {
                name: "hbar",
                reason: format!("must be finite and > 0, got {hbar}"),
            });
        }
        self.hbar = hbar;
        Ok(self)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn n_slices(&self) -> usize {
        self.n_slices
    }

    /// Interior slice spacing δ.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Total separation `δ·(n_slices+1)`.
    pub fn delta_t(&self) -> f64 {
        self.delta * (self.n_slices as f64 + 1.0)
    }

    pub fn endpoints(&self) -> (f64, f64) {
        (self.alpha, self.beta)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

/// Evaluation settings for the exact Fresnel route.
#[derive(Debug, Clone, Copy)]
pub struct FresnelSettings {
    /// Eigenvalues below `singularity_tol·max|λ|` count as zero.
    pub singularity_tol: f64,
}

impl Default for FresnelSettings {
    fn default() -> Self {
        Self {
            singularity_tol: 1e-9,
        }
    }
}

/// Rank decision diagnostics for the action kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelDiagnostics {
    pub min_abs_eigenvalue: f64,
    pub max_abs_eigenvalue: f64,
    /// Absolute threshold actually used for the rank decision.
    pub singularity_threshold: f64,
    /// Some eigenvalue sits within a factor of 10 of the threshold, so the
    /// rank decision is sensitive to the tolerance.
    pub ambiguous: bool,
}

/// Magnitude/phase decomposition of the lattice Fresnel integral for one
/// mode, with kernel diagnostics.
///
/// The probability weight is `magnitude²`. For a rank-deficient kernel with
/// compatible boundary data the magnitude is the regularized density on the
/// compatible surface (flat directions contribute no Gaussian factor); with
/// incompatible data the integral vanishes in the distributional sense and
/// the magnitude is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct JointProbability {
    pub magnitude: f64,
    /// In `(−π, π]`; 0 when the magnitude is 0.
    pub phase: f64,
    /// Action of the stationary configuration, when one exists.
    pub classical_action: Option<f64>,
    pub kernel_rank_deficiency: usize,
    /// Norm of the boundary linear term's component along the kernel's null
    /// space; nonzero means the zero-probability case.
    pub compatibility_residual: f64,
    pub diagnostics: KernelDiagnostics,
}

impl JointProbability {
    /// Reported probability weight `|Z|²`.
    pub fn weight(&self) -> f64 {
        self.magnitude * self.magnitude
    }
}

/// `S = ½xᵀMx + bᵀx + s₀` with `M = tridiag(off, diag, off)`.
#[derive(Debug, Clone)]
struct QuadraticForm {
    diag: f64,
    off: f64,
    b: Vec<f64>,
    s0: f64,
}

fn quadratic_form(spec: &LatticeActionSpec) -> QuadraticForm {
    let n = spec.n_slices;
    let d = spec.delta;
    let w2 = spec.omega * spec.omega;
    let (alpha, beta) = (spec.alpha, spec.beta);
    let (diag, off, edge, s0_pot) = match spec.scheme {
        Scheme::Trapezoid => (
            2.0 / d - d * w2,
            -1.0 / d,
            0.0,
            d * w2 * (alpha * alpha + beta * beta) / 4.0,
        ),
        Scheme::Midpoint => (
            2.0 / d - d * w2 / 2.0,
            -1.0 / d - d * w2 / 4.0,
            d * w2 / 4.0,
            d * w2 * (alpha * alpha + beta * beta) / 8.0,
        ),
    };
    let mut b = vec![0.0; n];
    b[0] += -alpha / d - edge * alpha;
    b[n - 1] += -beta / d - edge * beta;
    let s0 = (alpha * alpha + beta * beta) / (2.0 * d) - s0_pot;
    QuadraticForm { diag, off, b, s0 }
}

/// Discrete action of a full interior configuration.
pub fn lattice_action(spec: &LatticeActionSpec, interior: &[f64]) -> Result<f64> {
    let n = spec.n_slices;
    if interior.len() != n {
        return Err(Error::Shape(format!(
            "interior must have {n} slices, got {}",
            interior.len()
        )));
    }
    let d = spec.delta;
    let w2 = spec.omega * spec.omega;
    let mut s = 0.0;
    for j in 0..=n {
        let a_lo = if j == 0 { spec.alpha } else { interior[j - 1] };
        let a_hi = if j == n { spec.beta } else { interior[j] };
        let kinetic = (a_hi - a_lo) * (a_hi - a_lo) / (2.0 * d);
        let potential = match spec.scheme {
            Scheme::Trapezoid => (a_lo * a_lo + a_hi * a_hi) / 4.0,
            Scheme::Midpoint => {
                let mid = 0.5 * (a_lo + a_hi);
                mid * mid / 2.0
            }
        };
        s += kinetic - d * w2 * potential;
    }
    Ok(s)
}

/// Kernel eigenvalues `D + 2E·cos(jπ/(N+1))`, `j = 1..=N` (exact for the
/// Toeplitz tridiagonal stencil).
fn kernel_eigenvalues(qf: &QuadraticForm, n: usize) -> Vec<f64> {
    let np1 = (n + 1) as f64;
    (1..=n)
        .map(|j| qf.diag + 2.0 * qf.off * (PI * j as f64 / np1).cos())
        .collect()
}

/// Eigenvector components of `b`: `u_j = Σ_i b_i·√(2/(N+1))·sin(ijπ/(N+1))`.
/// `b` is end-supported, so only two terms contribute.
fn kernel_projections(qf: &QuadraticForm, n: usize) -> Vec<f64> {
    let np1 = (n + 1) as f64;
    let norm = (2.0 / np1).sqrt();
    (1..=n)
        .map(|j| {
            let theta = PI * j as f64 / np1;
            let mut u = qf.b[0] * theta.sin();
            if n > 1 {
                u += qf.b[n - 1] * (theta * n as f64).sin();
            }
            norm * u
        })
        .collect()
}

fn wrap_phase(p: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = p % two_pi;
    if r <= -PI {
        r += two_pi;
    } else if r > PI {
        r -= two_pi;
    }
    r
}

/// Exact Gaussian/Fresnel evaluation of the one-mode joint probability.
///
/// Nonsingular kernel: `Z = C_N·exp(i(s₀ − ½bᵀM⁻¹b)/ħ)·(2πħ)^{N/2}/√|det M|`
/// with the Fresnel phase `π/4·signature(M)` and the slicing normalization
/// `|C_N| = (2πħδ)^{−(N+1)/2}` fixed so the single-slice free case is the
/// standard propagator `1/√(2πiħΔt)`. Singular kernel: the boundary term is
/// projected onto the null space; a zero component reports the rank
/// deficiency and the regularized density over the nonzero eigenvalues, a
/// nonzero component reports `compatibility_residual` and magnitude 0.
pub fn joint_probability_exact(
    spec: &LatticeActionSpec,
    settings: &FresnelSettings,
) -> JointProbability {
    let n = spec.n_slices;
    let hbar = spec.hbar;
    let delta = spec.delta;
    let qf = quadratic_form(spec);
    let eigen = kernel_eigenvalues(&qf, n);
    let proj = kernel_projections(&qf, n);

    let max_abs = eigen.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let min_abs = eigen.iter().fold(f64::INFINITY, |m, l| m.min(l.abs()));
    let threshold = settings.singularity_tol * max_abs;
    let ambiguous = eigen
        .iter()
        .any(|l| l.abs() > threshold / 10.0 && l.abs() <= threshold * 10.0);
    let diagnostics = KernelDiagnostics {
        min_abs_eigenvalue: min_abs,
        max_abs_eigenvalue: max_abs,
        singularity_threshold: threshold,
        ambiguous,
    };

    let mut rank_deficiency = 0usize;
    let mut null_norm2 = 0.0;
    let mut sum_log_scaled = 0.0; // sum of ln|delta*lambda| over nonzero eigenvalues
    let mut negatives = 0usize;
    let mut b_pinv_b = 0.0;
    for (l, u) in eigen.iter().zip(&proj) {
        if l.abs() <= threshold {
            rank_deficiency += 1;
            null_norm2 += u * u;
        } else {
            sum_log_scaled += (delta * l.abs()).ln();
            if *l < 0.0 {
                negatives += 1;
            }
            b_pinv_b += u * u / l;
        }
    }
    let compatibility_residual = null_norm2.sqrt();

    let b_norm = qf.b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if rank_deficiency > 0 && compatibility_residual > settings.singularity_tol * b_norm {
        // Incompatible boundary data at resonance: zero relative weight.
        return JointProbability {
            magnitude: 0.0,
            phase: 0.0,
            classical_action: None,
            kernel_rank_deficiency: rank_deficiency,
            compatibility_residual,
            diagnostics,
        };
    }

    let nonzero = n - rank_deficiency;
    let s_cl = qf.s0 - 0.5 * b_pinv_b;
    let signature = nonzero as f64 - 2.0 * negatives as f64;
    // |Z| = (2*pi*hbar*delta)^{-(1+r)/2} * prod |delta*lambda|^{-1/2}
    let log_magnitude = -0.5 * (1.0 + rank_deficiency as f64) * (2.0 * PI * hbar * delta).ln()
        - 0.5 * sum_log_scaled;
    let phase = wrap_phase(s_cl / hbar + PI / 4.0 * (signature - (n as f64 + 1.0)));
    JointProbability {
        magnitude: log_magnitude.exp(),
        phase,
        classical_action: Some(s_cl),
        kernel_rank_deficiency: rank_deficiency,
        compatibility_residual: if rank_deficiency > 0 {
            compatibility_residual
        } else {
            0.0
        },
        diagnostics,
    }
}

/// Stationary configuration of the lattice action (the discrete classical
/// path), including endpoints, when one exists. Flat directions of a
/// singular-but-compatible kernel are fixed to the minimum-norm
/// representative.
pub fn classical_path(spec: &LatticeActionSpec, settings: &FresnelSettings) -> Option<Vec<f64>> {
    let n = spec.n_slices;
    let qf = quadratic_form(spec);
    let eigen = kernel_eigenvalues(&qf, n);
    let proj = kernel_projections(&qf, n);
    let max_abs = eigen.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let threshold = settings.singularity_tol * max_abs;
    let b_norm = qf.b.iter().map(|x| x * x).sum::<f64>().sqrt();
    let null_norm2: f64 = eigen
        .iter()
        .zip(&proj)
        .filter(|(l, _)| l.abs() <= threshold)
        .map(|(_, u)| u * u)
        .sum();
    if null_norm2.sqrt() > settings.singularity_tol * b_norm {
        return None;
    }
    // x = -M^+ b via the sine eigenbasis.
    let np1 = (n + 1) as f64;
    let norm = (2.0 / np1).sqrt();
    let mut x = vec![spec.alpha];
    for i in 1..=n {
        let mut acc = 0.0;
        for (j, (l, u)) in eigen.iter().zip(&proj).enumerate() {
            if l.abs() > threshold {
                acc -= u / l * norm * (PI * (j + 1) as f64 * i as f64 / np1).sin();
            }
        }
        x.push(acc);
    }
    x.push(spec.beta);
    Some(x)
}

/// Stationary-phase diagnostics: whether the action has a stationary interior
/// configuration, its action, and the weight of the given endpoints relative
/// to endpoints on the classical shell.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPhaseReport {
    pub stationary_point_exists: bool,
    /// Dimension of the stationary family (0 = isolated point).
    pub family_dimension: usize,
    pub classical_action: Option<f64>,
    /// `|Z|²(endpoints) / |Z|²(nearest compatible endpoints)`: 1 when a
    /// stationary configuration exists, 0 when none does.
    pub weight_ratio: f64,
    /// `min_x ‖Mx + b‖₂`, the unavoidable gradient norm (0 iff stationary).
    pub gradient_residual: f64,
}

pub fn stationary_phase_report(
    spec: &LatticeActionSpec,
    settings: &FresnelSettings,
) -> StationaryPhaseReport {
    let jp = joint_probability_exact(spec, settings);
    // `M x = −b` is solvable exactly when the evaluation found a classical
    // action; the incompatible resonant case is the one without one.
    let exists = jp.classical_action.is_some();
    StationaryPhaseReport {
        stationary_point_exists: exists,
        family_dimension: if exists { jp.kernel_rank_deficiency } else { 0 },
        classical_action: jp.classical_action,
        weight_ratio: if exists { 1.0 } else { 0.0 },
        gradient_residual: if exists {
            0.0
        } else {
            jp.compatibility_residual
        },
    }
}

/// Closed-form harmonic-oscillator propagator (unit mass), the continuum
/// oracle for the lattice evaluation:
/// `K = √(ω/(2πiħ·sin ωΔt))·exp(i·S_cl/ħ)` with
/// `S_cl = ω((α²+β²)cos ωΔt − 2αβ)/(2 sin ωΔt)` and a `−π/2` Maslov phase per
/// caustic crossing. `ω = 0` degenerates to the free propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub magnitude: f64,
    pub phase: f64,
    pub classical_action: f64,
}

pub fn harmonic_propagator(
    omega: f64,
    delta_t: f64,
    alpha: f64,
    beta: f64,
    hbar: f64,
) -> Result<Propagator> {
    if !(delta_t > 0.0) || !(hbar > 0.0) || !(omega >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "propagator",
            reason: format!(
                "need omega >= 0, delta_t > 0, hbar > 0; got ({omega}, {delta_t}, {hbar})"
            ),
        });
    }
    if omega == 0.0 {
        let s_cl = (beta - alpha) * (beta - alpha) / (2.0 * delta_t);
        return Ok(Propagator {
            magnitude: 1.0 / (2.0 * PI * hbar * delta_t).sqrt(),
            phase: wrap_phase(s_cl / hbar - PI / 4.0),
            classical_action: s_cl,
        });
    }
    let s = (omega * delta_t).sin();
    if s == 0.0 {
        return Err(Error::InvalidParameter {
            name: "delta_t",
            reason: format!(
                "resonant separation: sin(omega*delta_t) = 0 at omega*dt = {}",
                omega * delta_t
            ),
        });
    }
    let s_cl = omega
        * ((alpha * alpha + beta * beta) * (omega * delta_t).cos() - 2.0 * alpha * beta)
        / (2.0 * s);
    let maslov = (omega * delta_t / PI).floor();
    Ok(Propagator {
        magnitude: (omega / (2.0 * PI * hbar * s.abs())).sqrt(),
        phase: wrap_phase(s_cl / hbar - PI / 4.0 - PI / 2.0 * maslov),
        classical_action: s_cl,
    })
}

/// Settings for the regulated brute-force quadrature.
#[derive(Debug, Clone)]
pub struct BruteForceSettings {
    /// Decreasing regulator sequence; the ε → 0 limit is taken by polynomial
    /// extrapolation through these values.
    pub epsilons: Vec<f64>,
    /// Envelope mass left outside the truncated box, `exp(−εR²)`.
    pub tail: f64,
    /// Maximum radians of integrand phase per quadrature panel.
    pub phase_per_panel: f64,
    /// Gauss-Legendre points per panel.
    pub gl_points: usize,
    /// Relative tolerance on the extrapolation's final correction.
    pub convergence_tol: f64,
}

impl BruteForceSettings {
    /// Defaults tuned per slice count: the 1D case affords the fine
    /// `{1e-1..1e-4}` ladder; nested quadratures use a shorter ratio-2 ladder
    /// whose cost stays desk-scale.
    pub fn for_slices(n_slices: usize) -> Self {
        let epsilons = if n_slices <= 1 {
            vec![1e-1, 1e-2, 1e-3, 1e-4]
        } else {
            vec![1e-1, 5e-2, 2.5e-2, 1.25e-2, 6.25e-3]
        };
        Self {
            epsilons,
            tail: 1e-10,
            phase_per_panel: 24.0,
            gl_points: 20,
            convergence_tol: 1e-3,
        }
    }

    pub fn with_epsilons(mut self, epsilons: Vec<f64>) -> Self {
        self.epsilons = epsilons;
        self
    }

    pub fn with_convergence_tol(mut self, tol: f64) -> Self {
        self.convergence_tol = tol;
        self
    }
}

/// Brute-force estimate of the joint probability: magnitude and phase only,
/// plus the per-regulator estimates behind the extrapolation.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub magnitude: f64,
    pub phase: f64,
    /// `(ε, |Z(ε)|)` pairs actually integrated.
    pub estimates: Vec<(f64, f64)>,
    /// Magnitude of the last extrapolation correction.
    pub last_correction: f64,
}

/// 64-point cap keeps panel construction honest; panels subdivide instead.
const GL_MAX: usize = 64;

/// Nodes/weights of the Gauss-Legendre rule on [-1, 1], computed by Newton
/// iteration on the Legendre polynomial.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let n = n.clamp(2, GL_MAX);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Recurrence for P_n(x) and P'_n(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre grid over [-r, r] with enough panels to resolve
/// `total_phase` radians of oscillation. The grid is built mirror-symmetric:
/// `nodes[i] == -nodes[len-1-i]` exactly, which the transform stage exploits.
fn oscillatory_grid(
    r: f64,
    total_phase: f64,
    settings: &BruteForceSettings,
) -> (Vec<f64>, Vec<f64>) {
    let panels_half = ((total_phase / settings.phase_per_panel / 2.0).ceil() as usize).max(4);
    let (gx, gw) = gauss_legendre(settings.gl_points);
    let width = r / panels_half as f64;
    let half_len = panels_half * gx.len();
    let mut nodes = vec![0.0; 2 * half_len];
    let mut weights = vec![0.0; 2 * half_len];
    for p in 0..panels_half {
        let center = (p as f64 + 0.5) * width;
        let half = width / 2.0;
        for (j, (x, w)) in gx.iter().zip(&gw).enumerate() {
            let idx = half_len + p * gx.len() + j;
            let node = center + half * x;
            nodes[idx] = node;
            weights[idx] = half * w;
            nodes[2 * half_len - 1 - idx] = -node;
            weights[2 * half_len - 1 - idx] = half * w;
        }
    }
    (nodes, weights)
}

/// Evaluates `∫ exp(i·S(x)/ħ − ε|x|²) dx` by iterated 1D quadrature.
///
/// The tridiagonal coupling means each integration stage depends on exactly
/// one neighbor, so the nested integral is a chain of 1D passes with the
/// inner stage tabulated on the outer stage's nodes: cost grows as
/// (nodes per axis)² instead of (nodes)^N, with no Gaussian identity or
/// determinant anywhere.
fn regulated_integral(
    spec: &LatticeActionSpec,
    eps: f64,
    settings: &BruteForceSettings,
) -> Result<Complex64> {
    let n = spec.n_slices;
    let hbar = spec.hbar;
    let qf = quadratic_form(spec);
    let r = (-(settings.tail.ln()) / eps).sqrt();
    let b_max = qf.b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let d_abs = qf.diag.abs();
    let e_abs = qf.off.abs();
    // Phase budget: the quadratic's own oscillation plus the oscillation the
    // inner stage hands back through the coupling term.
    let coupling = if n > 1 { 2.0 * e_abs } else { 0.0 };
    let total_phase = ((d_abs + coupling) * r * r + 2.0 * b_max * r) / hbar + 4.0 * r;
    let (nodes, weights) = oscillatory_grid(r, total_phase, settings);
    let q = nodes.len();
    let work = if n == 1 { q } else { (n - 1) * q * q };
    if work > 4_000_000_000 {
        return Err(Error::InvalidParameter {
            name: "epsilons",
            reason: format!(
                "quadrature grid at eps={eps} needs {q} nodes/axis (~{work} evaluations); \
                 use larger regulators or fewer slices"
            ),
        });
    }

    // inner[m] = I_{k+1}(off * nodes[m]); innermost stage has no deeper factor.
    let mut inner = vec![Complex64::new(1.0, 0.0); q];
    for k in (1..=n).rev() {
        let bk = qf.b[k - 1];
        // Per-node base factor: weight * envelope * exp(i(D x²/2 + b_k x)/ħ) * inner.
        let base: Vec<Complex64> = (0..q)
            .map(|m| {
                let x = nodes[m];
                let phase = (0.5 * qf.diag * x * x + bk * x) / hbar;
                let env = weights[m] * (-eps * x * x).exp();
                Complex64::from_polar(env, phase) * inner[m]
            })
            .collect();
        if k == 1 {
            let total: Complex64 = base.iter().sum();
            // Constant phase exp(i s0/hbar) and the slicing normalization
            // C_N = (2*pi*hbar*delta)^{-(N+1)/2} * exp(-i*pi*(N+1)/4), the
            // same measure constant the exact route carries.
            let c_n = Complex64::from_polar(
                (2.0 * PI * hbar * spec.delta).powf(-(n as f64 + 1.0) / 2.0),
                -PI * (n as f64 + 1.0) / 4.0,
            );
            return Ok(total * Complex64::from_polar(1.0, qf.s0 / hbar) * c_n);
        }
        // Fourier-type transform onto the next stage's nodes. The node grid
        // is antisymmetric, so one kernel evaluation at (+y, +x) serves all
        // four sign combinations: with p = base(+x) + base(−x) and
        // d = base(+x) − base(−x),
        //   out(+y) = Σ cos·p.re − sin·d.im + i(sin·d.re + cos·p.im)
        //   out(−y) = Σ cos·p.re + sin·d.im + i(−sin·d.re + cos·p.im).
        // Entries are independent and each inner sum has a fixed order, so
        // the result does not depend on the parallel schedule.
        let half = q / 2;
        let pos = &nodes[half..];
        let sums: Vec<(f64, f64)> = (0..half)
            .map(|i| {
                let t1 = base[half + i];
                let t2 = base[half - 1 - i];
                (t1.re + t2.re, t1.im + t2.im)
            })
            .collect();
        let diffs: Vec<(f64, f64)> = (0..half)
            .map(|i| {
                let t1 = base[half + i];
                let t2 = base[half - 1 - i];
                (t1.re - t2.re, t1.im - t2.im)
            })
            .collect();
        let pairs: Vec<(Complex64, Complex64)> = (0..half)
            .into_par_iter()
            .map(|i2| {
                let c = qf.off * pos[i2] / hbar;
                let (mut re_a, mut im_a, mut re_b, mut im_b) = (0.0, 0.0, 0.0, 0.0);
                for (x, (p, d)) in pos.iter().zip(sums.iter().zip(&diffs)) {
                    let (s, co) = (c * x).sin_cos();
                    let cp_re = co * p.0;
                    let cp_im = co * p.1;
                    let sd_re = s * d.0;
                    let sd_im = s * d.1;
                    re_a += cp_re - sd_im;
                    im_a += sd_re + cp_im;
                    re_b += cp_re + sd_im;
                    im_b += cp_im - sd_re;
                }
                (Complex64::new(re_a, im_a), Complex64::new(re_b, im_b))
            })
            .collect();
        let mut next = vec![Complex64::new(0.0, 0.0); q];
        for (i2, (out_pos, out_neg)) in pairs.into_iter().enumerate() {
            next[half + i2] = out_pos;
            next[half - 1 - i2] = out_neg;
        }
        inner = next;
    }
    unreachable!("n_slices >= 1 always returns through k == 1");
}

/// Complex Neville extrapolation of `(ε, Z(ε))` samples to ε = 0. Returns the
/// extrapolated value and the magnitude of the final diagonal correction.
fn extrapolate_to_zero(samples: &[(f64, Complex64)]) -> (Complex64, f64) {
    let n = samples.len();
    let mut table: Vec<Complex64> = samples.iter().map(|(_, z)| *z).collect();
    let xs: Vec<f64> = samples.iter().map(|(e, _)| *e).collect();
    let mut prev_diag = table[0];
    let mut last_correction = f64::INFINITY;
    for j in 1..n {
        for i in 0..n - j {
            let (x_lo, x_hi) = (xs[i], xs[i + j]);
            table[i] = (table[i] * x_hi - table[i + 1] * x_lo) / (x_hi - x_lo);
        }
        last_correction = (table[0] - prev_diag).norm();
        prev_diag = table[0];
    }
    (table[0], last_correction)
}

/// Brute-force oracle for [`joint_probability_exact`]: direct quadrature of
/// the regulated Fresnel integral with Richardson-style extrapolation ε → 0.
///
/// Cost grows quadratically in the per-axis node count, which itself grows
/// like 1/ε, so the slice count is capped at 3.
pub fn joint_probability_bruteforce(
    spec: &LatticeActionSpec,
    settings: &BruteForceSettings,
) -> Result<BruteForceResult> {
    if spec.n_slices > 3 {
        return Err(Error::InvalidParameter {
            name: "n_slices",
            reason: format!(
                "brute-force quadrature is capped at 3 slices (cost ~ nodes²·slices), got {}",
                spec.n_slices
            ),
        });
    }
    validate_epsilons(settings)?;
    let mut samples = Vec::with_capacity(settings.epsilons.len());
    for &eps in &settings.epsilons {
        samples.push((eps, regulated_integral(spec, eps, settings)?));
    }
    let (value, last_correction) = extrapolate_to_zero(&samples);
    let scale = value.norm().max(1e-12);
    if !last_correction.is_finite() || last_correction > settings.convergence_tol * scale {
        return Err(Error::Convergence {
            last_correction,
            tolerance: settings.convergence_tol * scale,
            evaluations: samples.len(),
            estimates: samples.iter().map(|(_, z)| z.norm()).collect(),
        });
    }
    Ok(BruteForceResult {
        magnitude: value.norm(),
        phase: wrap_phase(value.arg()),
        estimates: samples.iter().map(|(e, z)| (*e, z.norm())).collect(),
        last_correction,
    })
}

fn validate_epsilons(settings: &BruteForceSettings) -> Result<()> {
    if settings.epsilons.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "epsilons",
            reason: "extrapolation needs at least two regulator values".into(),
        });
    }
    if settings
        .epsilons
        .iter()
        .any(|e| !(*e > 0.0) || !e.is_finite())
    {
        return Err(Error::InvalidParameter {
            name: "epsilons",
            reason: format!(
                "regulators must be positive and finite: {:?}",
                settings.epsilons
            ),
        });
    }
    Ok(())
}

/// Joint probability for the multi-mode field: the free action factorizes
/// over sine modes, so the total is the per-mode product (log-accumulated).
#[derive(Debug, Clone)]
pub struct FieldJointProbability {
    pub per_mode: Vec<JointProbability>,
    /// Product of per-mode magnitudes; 0 if any mode is incompatible.
    pub magnitude: f64,
    pub phase: f64,
    pub total_rank_deficiency: usize,
    /// False when some mode's boundary data are incompatible at resonance.
    pub compatible: bool,
}

impl FieldJointProbability {
    pub fn weight(&self) -> f64 {
        self.magnitude * self.magnitude
    }
}

/// Evaluates the factorized joint probability for boundary slices with equal
/// mode counts on a cavity of length `length`.
#[allow(clippy::too_many_arguments)]
pub fn joint_probability_field(
    params: &FieldParams,
    length: f64,
    delta_t: f64,
    initial: &BoundarySlice,
    final_: &BoundarySlice,
    n_slices: usize,
    scheme: Scheme,
    settings: &FresnelSettings,
) -> Result<FieldJointProbability> {
    if initial.n_modes() != final_.n_modes() {
        return Err(Error::Shape(format!(
            "boundary slices disagree on mode count: {} vs {}",
            initial.n_modes(),
            final_.n_modes()
        )));
    }
    let grid = CavityGrid::new(length, delta_t, 2, 2)?;
    let mut per_mode = Vec::with_capacity(initial.n_modes());
    let mut log_magnitude = 0.0;
    let mut phase = 0.0;
    let mut total_rank = 0usize;
    let mut compatible = true;
    for (j, (&alpha, &beta)) in initial
        .coefficients()
        .iter()
        .zip(final_.coefficients())
        .enumerate()
    {
        let mode = make_mode(params, &grid, (j + 1) as u32)?;
        let spec = LatticeActionSpec::for_mode(&mode, delta_t, n_slices, alpha, beta, scheme)?;
        let jp = joint_probability_exact(&spec, settings);
        if jp.magnitude == 0.0 {
            compatible = false;
        } else {
            log_magnitude += jp.magnitude.ln();
            phase += jp.phase;
        }
        total_rank += jp.kernel_rank_deficiency;
        per_mode.push(jp);
    }
    Ok(FieldJointProbability {
        per_mode,
        magnitude: if compatible { log_magnitude.exp() } else { 0.0 },
        phase: if compatible { wrap_phase(phase) } else { 0.0 },
        total_rank_deficiency: total_rank,
        compatible,
    })
}

/// The interior slice spacing that puts lattice eigenvalue `j` of an
/// `n_slices` midpoint kernel exactly at zero for frequency `omega`, i.e.
/// the discrete resonance tuning `tan(θ_j/2) = ωδ/2`, `θ_j = jπ/(n_slices+1)`.
pub fn discrete_resonance_delta_t(omega: f64, n_slices: usize, j: usize, scheme: Scheme) -> f64 {
    let theta_half = PI * j as f64 / (2.0 * (n_slices as f64 + 1.0));
    let delta = match scheme {
        Scheme::Midpoint => 2.0 * theta_half.tan() / omega,
        Scheme::Trapezoid => 2.0 * theta_half.sin() / omega,
    };
    delta * (n_slices as f64 + 1.0)
}
