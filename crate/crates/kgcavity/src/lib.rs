// Validation uses `!(x > 0.0)`-style comparisons on purpose: they reject NaN
// along with out-of-range values in one test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerics for classical Klein-Gordon fields in a 1D cavity constrained by
//! field data on *two* time slices instead of initial data alone.
//!
//! Fixing φ(x, t₀) and φ(x, t_f) turns the field equation into a two-point
//! boundary value problem per spatial sine mode. Three things follow, and the
//! three corresponding modules implement them:
//!
//! * [`bvp`]: the per-mode BVP is uniquely solvable exactly when
//!   `sin(ωΔt) ≠ 0`; at resonance it is either degenerate (a one-parameter
//!   family) or infeasible, and the interior field can be reconstructed from
//!   the two boundary profiles.
//! * [`quantize`]: resonances mean `ωΔt = n_t·π`, which together with the box
//!   quantization `k = n_x·π/L` and the dispersion relation pins `(n_x, n_t)`
//!   to integer pairs; admissible pairs are rare and strongly constrain Δt.
//! * [`pathint`]: the joint probability of the two boundary outcomes is the
//!   squared magnitude of a Fresnel functional integral over interior
//!   configurations, evaluated exactly on a time lattice through the
//!   determinant and null space of the discrete action's Hessian.
//!
//! [`model`] holds the shared types: parameters, grids, modes, and the
//! momentum-density observable.

pub mod bvp;
pub mod error;
pub mod model;
pub mod pathint;
pub mod quantize;

pub use error::{Error, Result};
pub use model::{
    dispersion, make_mode, momentum_density, CavityGrid, FieldGrid, FieldParams, Mode,
};
