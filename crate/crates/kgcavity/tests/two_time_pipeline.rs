//! End-to-end pipeline over the public API: pick a cavity whose (L, Δt) sit
//! on an admissible pair, then watch the same resonance appear in the pair
//! search, the mode classification, and the path-integral kernel.

use kgcavity::bvp::{solve_field_bvp, BoundarySlice, BvpTolerances, Classification};
use kgcavity::pathint::{joint_probability_exact, FresnelSettings, LatticeActionSpec, Scheme};
use kgcavity::quantize::{find_admissible_pairs, ConstraintForm, SearchLimits};
use kgcavity::{make_mode, CavityGrid, FieldParams};
use std::f64::consts::PI;

#[test]
fn admissible_pair_resonance_shows_up_everywhere() {
    // m = 3pi, L = 1, dt = 1: the single admissible pair is (n_x, n_t) = (4, 5).
    let params = FieldParams::natural(3.0 * PI).unwrap();
    let (length, delta_t) = (1.0, 1.0);

    let pairs = find_admissible_pairs(
        &params,
        length,
        delta_t,
        1e-9,
        ConstraintForm::DispersionConsistent,
        &SearchLimits::default(),
    );
    assert_eq!(pairs.len(), 1);
    assert_eq!((pairs[0].n_x, pairs[0].n_t), (4, 5));

    // The two-time BVP must classify exactly mode 4 as resonant.
    let grid = CavityGrid::new(length, delta_t, 12, 12).unwrap();
    let initial = BoundarySlice::new(vec![0.2, -0.1, 0.3, 0.5, 0.1, -0.4]).unwrap();
    // Mode 4 resonates with n_t = 5 (odd), so compatibility needs beta = -alpha.
    let final_ = BoundarySlice::new(vec![0.4, 0.2, -0.3, -0.5, 0.2, 0.1]).unwrap();
    let sol =
        solve_field_bvp(&params, &grid, &initial, &final_, &BvpTolerances::default()).unwrap();
    for (j, m) in sol.mode_solutions.iter().enumerate() {
        if j == 3 {
            assert_eq!(m.classification, Classification::Degenerate, "mode 4");
            assert!(m.free_parameter);
        } else {
            assert_eq!(m.classification, Classification::Unique, "mode {}", j + 1);
        }
    }
    assert!(sol.feasible);
    // Boundary rows must reproduce the requested slices.
    for col in 1..=grid.n_space() {
        let x = grid.x(col);
        let want_initial: f64 = initial
            .coefficients()
            .iter()
            .enumerate()
            .map(|(j, c)| c * ((j + 1) as f64 * PI * x / length).sin())
            .sum();
        assert!((sol.field.values()[(0, col)] - want_initial).abs() < 1e-10);
    }

    // The lattice kernel of mode 4 is near-singular in the continuum limit;
    // non-resonant mode 1 is regular.
    let settings = FresnelSettings::default();
    let n_slices = 4096; // the resonant kernel's zero-offset shrinks as delta^2
    let mode1 = make_mode(&params, &grid, 1).unwrap();
    let spec1 =
        LatticeActionSpec::for_mode(&mode1, delta_t, n_slices, 0.2, 0.4, Scheme::Midpoint).unwrap();
    let jp1 = joint_probability_exact(&spec1, &settings);
    assert_eq!(jp1.kernel_rank_deficiency, 0);
    assert!(jp1.magnitude > 0.0);

    let mode4 = make_mode(&params, &grid, 4).unwrap();
    let spec4 = LatticeActionSpec::for_mode(&mode4, delta_t, n_slices, 0.5, -0.5, Scheme::Midpoint)
        .unwrap();
    let jp4 = joint_probability_exact(&spec4, &settings);
    let rel4 = jp4.diagnostics.min_abs_eigenvalue / jp4.diagnostics.max_abs_eigenvalue;
    let rel1 = jp1.diagnostics.min_abs_eigenvalue / jp1.diagnostics.max_abs_eigenvalue;
    assert!(
        rel4 < 1e-3 * rel1,
        "resonant mode kernel not near-singular: {rel4} vs {rel1}"
    );
}

#[test]
fn si_and_natural_units_agree_on_observables() {
    // An electron-mass cavity specified in SI must give the same pair set as
    // the equivalent natural-unit description.
    let si = FieldParams::from_si_mass(9.109e-31).unwrap();
    let mu = si.mass(); // Compton angular frequency, 1/s
    let natural = FieldParams::natural(mu).unwrap();

    // Geometry tuned so (n_x, n_t) = (4, 5) is admissible: mu_tilde*dt = 3,
    // c*dt = L.
    let delta_t = 3.0 * PI / mu;
    let length = delta_t; // light-seconds
    for params in [&si, &natural] {
        let pairs = find_admissible_pairs(
            params,
            length,
            delta_t,
            1e-9,
            ConstraintForm::DispersionConsistent,
            &SearchLimits::default(),
        );
        assert_eq!(pairs.len(), 1, "pairs: {pairs:?}");
        assert_eq!((pairs[0].n_x, pairs[0].n_t), (4, 5));
    }
}
