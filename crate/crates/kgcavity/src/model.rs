//! Physical parameters, cavity geometry, mode bookkeeping, and field
//! observables for a real scalar field in a 1D box.
//!
//! The field obeys the Klein-Gordon equation
//!
//! ```text
//! (d²/dt² − c²·d²/dx² + m²c⁴/ħ²) φ = 0
//! ```
//!
//! inside an infinite-potential well of length `L`, so φ vanishes at both
//! walls and the spatial basis is `sin(n_x·π·x/L)`. Each mode amplitude is a
//! harmonic oscillator with frequency `ω(k) = sqrt(c²k² + m²c⁴/ħ²)`.
//!
//! Everything downstream works in natural units (`c = ħ = 1`). Constructors
//! accept arbitrary `(m, c, ħ)` triples and normalize once: the stored mass is
//! the Compton angular frequency `m·c²/ħ`, so SI inputs turn into inverse
//! seconds and lengths are expected in light-seconds (`x/c`). This keeps the
//! ~1e-20-scale Compton times of massive particles out of the core arithmetic.
//!
//! All types are immutable after construction and all operations are pure, so
//! values can be shared freely across threads.

use crate::error::{Error, Result};
use ndarray::Array2;

/// Speed of light in vacuum, m/s (exact by SI definition).
pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;

/// Reduced Planck constant, J·s (CODATA 2018, ħ = h/2π with h exact;
/// quoted here to 10 significant figures).
pub const HBAR_SI: f64 = 1.054_571_817e-34;

/// Mass parameter and unit conventions defining the dispersion relation.
///
/// Internally always in natural units: `mass` is the Compton angular
/// frequency `m·c²/ħ` and `speed_of_light = hbar = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    mass: f64,
    speed_of_light: f64,
    hbar: f64,
}

impl FieldParams {
    /// Builds parameters from an `(m, c, ħ)` triple in any consistent unit
    /// system, normalizing to natural units.
    pub fn new(mass: f64, speed_of_light: f64, hbar: f64) -> Result<Self> {
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: format!("must be finite and >= 0, got {mass}"),
            });
        }
        if !(speed_of_light > 0.0) || !speed_of_light.is_finite() {
            return Err(Error::InvalidParameter {
                name: "speed_of_light",
                reason: format!("must be finite and > 0, got {speed_of_light}"),
            });
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::InvalidParameter {
                name: "hbar",
                reason: format!("must be finite and > 0, got {hbar}"),
            });
        }
        let compton_frequency = mass * speed_of_light * speed_of_light / hbar;
        if !compton_frequency.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mass",
                reason: format!("Compton frequency m*c^2/hbar = {compton_frequency} overflows"),
            });
        }
        Ok(Self {
            mass: compton_frequency,
            speed_of_light: 1.0,
            hbar: 1.0,
        })
    }

    /// Natural-unit constructor (`c = ħ = 1`); `mass` is already an inverse
    /// length / inverse time.
    pub fn natural(mass: f64) -> Result<Self> {
        Self::new(mass, 1.0, 1.0)
    }

    /// SI constructor: mass in kg. Times stay in seconds and lengths become
    /// light-seconds, so callers must divide SI lengths by [`SPEED_OF_LIGHT_SI`].
    pub fn from_si_mass(mass_kg: f64) -> Result<Self> {
        Self::new(mass_kg, SPEED_OF_LIGHT_SI, HBAR_SI)
    }

    /// Mass in natural units (equals the Compton angular frequency `m·c²/ħ`).
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn speed_of_light(&self) -> f64 {
        self.speed_of_light
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Compton angular frequency `m·c²/ħ`, the infrared cutoff of the
    /// dispersion relation.
    pub fn compton_frequency(&self) -> f64 {
        self.mass * self.speed_of_light * self.speed_of_light / self.hbar
    }
}

/// Box length, time separation between the two boundary slices, and the
/// interior sampling resolutions.
///
/// The sample grid includes both walls and both boundary rows, so spacings
/// are `h = L/(n_space+1)` and `δ = Δt/(n_time+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGrid {
    length: f64,
    delta_t: f64,
    n_space: usize,
    n_time: usize,
}

impl CavityGrid {
    pub fn new(length: f64, delta_t: f64, n_space: usize, n_time: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidParameter {
                name: "length",
                reason: format!("must be finite and > 0, got {length}"),
            });
        }
        if !(delta_t > 0.0) || !delta_t.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta_t",
                reason: format!("must be finite and > 0, got {delta_t}"),
            });
        }
        if n_space < 2 {
            return Err(Error::InvalidParameter {
                name: "n_space",
                reason: format!("need at least 2 interior samples, got {n_space}"),
            });
        }
        if n_time < 2 {
            return Err(Error::InvalidParameter {
                name: "n_time",
                reason: format!("need at least 2 interior samples, got {n_time}"),
            });
        }
        Ok(Self {
            length,
            delta_t,
            n_space,
            n_time,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn delta_t(&self) -> f64 {
        self.delta_t
    }

    /// Interior spatial sample count (walls excluded).
    pub fn n_space(&self) -> usize {
        self.n_space
    }

    /// Interior temporal sample count (boundary rows excluded).
    pub fn n_time(&self) -> usize {
        self.n_time
    }

    /// Spatial spacing `h = L/(n_space+1)`.
    pub fn dx(&self) -> f64 {
        self.length / (self.n_space as f64 + 1.0)
    }

    /// Temporal spacing `δ = Δt/(n_time+1)`.
    pub fn dt(&self) -> f64 {
        self.delta_t / (self.n_time as f64 + 1.0)
    }

    /// Spatial coordinate of sample column `j` (0 and `n_space+1` are walls).
    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    /// Time of sample row `i` relative to the initial slice.
    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.dt()
    }
}

/// One spatial sine mode of the cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub n_x: u32,
    /// `k = n_x·π/L`.
    pub wavenumber: f64,
    /// `ω(k) = sqrt(c²k² + m²c⁴/ħ²)`.
    pub frequency: f64,
}

/// Angular frequency of wavenumber `k` under the Klein-Gordon dispersion
/// relation `ω(k) = sqrt(c²k² + m²c⁴/ħ²)`.
///
/// Total in `k`; even; bounded below by the Compton frequency.
pub fn dispersion(params: &FieldParams, k: f64) -> f64 {
    let ck = params.speed_of_light * k;
    let mu = params.compton_frequency();
    (ck * ck + mu * mu).sqrt()
}

/// Constructs the cavity mode with spatial index `n_x >= 1`.
///
/// Rejects `n_x = 0`: under wall conditions the zero mode is identically
/// `φ ≡ 0`.
pub fn make_mode(params: &FieldParams, grid: &CavityGrid, n_x: u32) -> Result<Mode> {
    if n_x == 0 {
        return Err(Error::InvalidParameter {
            name: "n_x",
            reason: "spatial mode index must be >= 1 (n_x = 0 is the trivial mode)".into(),
        });
    }
    let wavenumber = n_x as f64 * std::f64::consts::PI / grid.length();
    Ok(Mode {
        n_x,
        wavenumber,
        frequency: dispersion(params, wavenumber),
    })
}

/// Sampled field values on the full space-time grid, walls included.
///
/// Rows index time (0 = initial boundary, `n_time+1` = final boundary),
/// columns index space (0 and `n_space+1` are the walls and are exactly 0).
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    grid: CavityGrid,
    values: Array2<f64>,
}

impl FieldGrid {
    /// Wraps a full-grid sample array, checking dimensions and the wall
    /// condition `φ(0,t) = φ(L,t) = 0`.
    pub fn from_values(grid: CavityGrid, values: Array2<f64>) -> Result<Self> {
        let want = (grid.n_time() + 2, grid.n_space() + 2);
        if values.dim() != want {
            return Err(Error::Shape(format!(
                "field grid must be {}x{} (time x space incl. boundaries), got {}x{}",
                want.0,
                want.1,
                values.dim().0,
                values.dim().1
            )));
        }
        let last = grid.n_space() + 1;
        for (i, row) in values.rows().into_iter().enumerate() {
            if row[0] != 0.0 || row[last] != 0.0 {
                return Err(Error::Shape(format!(
                    "wall condition violated at time row {i}: phi(0)={}, phi(L)={}",
                    row[0], row[last]
                )));
            }
        }
        Ok(Self { grid, values })
    }

    /// All-zero field on `grid`.
    pub fn zeros(grid: CavityGrid) -> Self {
        let values = Array2::zeros((grid.n_time() + 2, grid.n_space() + 2));
        Self { grid, values }
    }

    pub fn grid(&self) -> &CavityGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    /// Number of time rows including both boundary rows.
    pub fn n_rows(&self) -> usize {
        self.grid.n_time() + 2
    }

    /// Number of space columns including both walls.
    pub fn n_cols(&self) -> usize {
        self.grid.n_space() + 2
    }
}

/// Discrete momentum density `T^{0x} ∝ φ̇·∂φ/∂x` at an interior sample,
/// via central differences; the conventional positive constant in front of
/// the stress-energy component is dropped (taken as 1).
///
/// Being odd in φ̇, the value flips sign exactly under reversal of the
/// temporal row order.
pub fn momentum_density(field: &FieldGrid, time_index: usize, space_index: usize) -> Result<f64> {
    let nt = field.grid().n_time();
    let ns = field.grid().n_space();
    if time_index < 1 || time_index > nt {
        return Err(Error::IndexOutOfRange(format!(
            "time_index {time_index} not in interior 1..={nt}"
        )));
    }
    if space_index < 1 || space_index > ns {
        return Err(Error::IndexOutOfRange(format!(
            "space_index {space_index} not in interior 1..={ns}"
        )));
    }
    let v = field.values();
    let dt = field.grid().dt();
    let dx = field.grid().dx();
    let phi_dot =
        (v[(time_index + 1, space_index)] - v[(time_index - 1, space_index)]) / (2.0 * dt);
    let phi_prime =
        (v[(time_index, space_index + 1)] - v[(time_index, space_index - 1)]) / (2.0 * dx);
    Ok(phi_dot * phi_prime)
}
