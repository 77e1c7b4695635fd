//! Measurement-induced quantization constraints.
//!
//! Two boundary slices a time Δt apart quantize the temporal frequency,
//! `ω = n_t·π/Δt`, exactly as the box walls quantize the wavenumber,
//! `k = n_x·π/L`. Feeding both into the dispersion relation leaves a joint
//! integer constraint; in normalized form (`μ̃ = mc²/(πħ)`):
//!
//! ```text
//! n_t²·L² − n_x²·c²·Δt² − μ̃²·L²·Δt² = 0     (dispersion-consistent)
//! n_t²·L² + n_x²·c²·Δt² − μ̃²·L²·Δt² = 0     (sign-flipped variant)
//! ```
//!
//! Both forms are implemented. Substituting `ω = n_tπ/Δt`, `k = n_xπ/L` into
//! `ω² = c²k² + m²c⁴/ħ²` gives the first; only it reproduces the laser-cavity
//! case `n_x = n_t` when `m = 0` and `L = cΔt`. The second keeps the "+" sign
//! some write-ups carry and is retained behind an explicit flag for
//! comparison.
//!
//! `ω ≥ mc²/ħ` bounds the admissible separation by the Compton period:
//! `Δt ≤ n_t·π·ħ/(mc²)`. Away from that bound most Δt values admit no integer
//! pair at all; [`scan_delta_t`] measures exactly how rare they are.

use crate::error::{Error, Result};
use crate::model::FieldParams;
use std::f64::consts::PI;

/// Which reading of the joint constraint to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstraintForm {
    /// `n_t²L² − n_x²c²Δt² = μ̃²L²Δt²`, the form implied by the dispersion
    /// relation. Default.
    #[default]
    DispersionConsistent,
    /// Same with the sign of the `n_x²` term flipped.
    PaperLiteral,
}

impl ConstraintForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConstraintForm::DispersionConsistent => "dispersion",
            ConstraintForm::PaperLiteral => "paper",
        }
    }
}

/// An integer pair satisfying the joint constraint within tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissiblePair {
    pub n_x: u32,
    pub n_t: u32,
    /// Normalized constraint violation, `|raw| / (L²·max(1, (μ̃Δt)²))`;
    /// at most the tolerance the pair was accepted under.
    pub residual: f64,
}

/// Caps on the enumeration. The constraint bounds `n_t` once `n_x` is capped
/// (and vice versa), but for `m = 0` commensurate geometries the admissible
/// set itself is infinite, so an explicit index cap defines "up to the
/// enumeration bound". `max_candidates` is a hard safety valve; enumeration
/// stops there and the (pathological) result is silently truncated.
#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    pub max_index: u32,
    pub max_candidates: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_index: 1000,
            max_candidates: 1_000_000,
        }
    }
}

/// Per-Δt solution counts over a scan window.
#[derive(Debug, Clone)]
pub struct DtScanReport {
    pub delta_t_values: Vec<f64>,
    pub solution_counts: Vec<usize>,
    /// Fraction of scanned Δt values with at least one admissible pair.
    pub admissible_fraction: f64,
    pub tolerance: f64,
}

/// The quantized temporal frequencies `n·π/Δt` for `n = 1..=n_max`.
pub fn quantized_frequencies(delta_t: f64, n_max: u32) -> Vec<f64> {
    (1..=n_max).map(|n| n as f64 * PI / delta_t).collect()
}

/// Largest Δt for which temporal mode `n_t` can satisfy `ω ≥ mc²/ħ`:
/// `n_t·π·ħ/(mc²)`. `None` for a massless field (no bound).
pub fn compton_bound(params: &FieldParams, n_t: u32) -> Option<f64> {
    let mu = params.compton_frequency();
    if mu == 0.0 {
        None
    } else {
        Some(n_t as f64 * PI / mu)
    }
}

/// Normalized residual of the constraint at an integer pair. Exposed so
/// accepted pairs can be re-checked by direct substitution.
pub fn constraint_residual(
    params: &FieldParams,
    length: f64,
    delta_t: f64,
    form: ConstraintForm,
    n_x: u32,
    n_t: u32,
) -> f64 {
    let c = params.speed_of_light();
    let mu_tilde = params.compton_frequency() / PI;
    let l2 = length * length;
    let spatial = (n_x as f64 * c * delta_t) * (n_x as f64 * c * delta_t);
    let temporal = (n_t as f64) * (n_t as f64) * l2;
    let mass_term = (mu_tilde * delta_t) * (mu_tilde * delta_t) * l2;
    let raw = match form {
        ConstraintForm::DispersionConsistent => temporal - spatial - mass_term,
        ConstraintForm::PaperLiteral => temporal + spatial - mass_term,
    };
    let norm = l2 * (mu_tilde * delta_t).powi(2).max(1.0);
    raw.abs() / norm
}

/// Enumerates all admissible pairs with `1 ≤ n_x ≤ limits.max_index`.
///
/// For each `n_x` the constraint pins `n_t²` to a target window of width
/// `tolerance·max(1, (μ̃Δt)²)`, so only the few integers in that window are
/// candidates; each is accepted by direct residual check. Exhaustive within
/// the index cap by construction. An empty result is a valid outcome.
pub fn find_admissible_pairs(
    params: &FieldParams,
    length: f64,
    delta_t: f64,
    tolerance: f64,
    form: ConstraintForm,
    limits: &SearchLimits,
) -> Vec<AdmissiblePair> {
    let c = params.speed_of_light();
    let mu_tilde = params.compton_frequency() / PI;
    let ratio = c * delta_t / length;
    let mass2 = (mu_tilde * delta_t) * (mu_tilde * delta_t);
    // Window on n_t^2 implied by the normalized tolerance.
    let window = tolerance * mass2.max(1.0);

    let mut pairs = Vec::new();
    let mut candidates = 0usize;
    'outer: for n_x in 1..=limits.max_index {
        let spatial2 = (n_x as f64 * ratio) * (n_x as f64 * ratio);
        let target2 = match form {
            ConstraintForm::DispersionConsistent => mass2 + spatial2,
            ConstraintForm::PaperLiteral => mass2 - spatial2,
        };
        let hi2 = target2 + window;
        if hi2 < 1.0 {
            // No integer n_t >= 1 can match this n_x.
            match form {
                // Target shrinks with n_x: nothing further can match either.
                ConstraintForm::PaperLiteral => break,
                // Target grows with n_x: later indices can still match.
                ConstraintForm::DispersionConsistent => continue,
            }
        }
        let lo2 = (target2 - window).max(0.0);
        // Widen by one integer on each side; the residual check is the
        // authority, the window only limits the candidate count.
        let from = (lo2.sqrt().floor() as i64 - 1).max(1) as u32;
        let to = hi2.sqrt().ceil() as u32 + 1;
        for n_t in from..=to {
            candidates += 1;
            if candidates > limits.max_candidates {
                break 'outer;
            }
            let residual = constraint_residual(params, length, delta_t, form, n_x, n_t);
            if residual <= tolerance {
                pairs.push(AdmissiblePair { n_x, n_t, residual });
            }
        }
    }
    pairs
}

/// Evaluates [`find_admissible_pairs`] at `steps` uniformly spaced Δt values
/// in `[dt_min, dt_max]` (endpoints included).
#[allow(clippy::too_many_arguments)]
pub fn scan_delta_t(
    params: &FieldParams,
    length: f64,
    dt_min: f64,
    dt_max: f64,
    steps: usize,
    tolerance: f64,
    form: ConstraintForm,
    limits: &SearchLimits,
) -> Result<DtScanReport> {
    if !(dt_min > 0.0) || !(dt_min < dt_max) {
        return Err(Error::InvalidParameter {
            name: "dt_min",
            reason: format!("need 0 < dt_min < dt_max, got [{dt_min}, {dt_max}]"),
        });
    }
    if steps < 2 {
        return Err(Error::InvalidParameter {
            name: "steps",
            reason: format!("need at least 2 scan points, got {steps}"),
        });
    }
    let span = dt_max - dt_min;
    let mut delta_t_values = Vec::with_capacity(steps);
    let mut solution_counts = Vec::with_capacity(steps);
    for i in 0..steps {
        let dt = dt_min + span * i as f64 / (steps - 1) as f64;
        let count = find_admissible_pairs(params, length, dt, tolerance, form, limits).len();
        delta_t_values.push(dt);
        solution_counts.push(count);
    }
    let hits = solution_counts.iter().filter(|&&c| c > 0).count();
    Ok(DtScanReport {
        admissible_fraction: hits as f64 / steps as f64,
        delta_t_values,
        solution_counts,
        tolerance,
    })
}
