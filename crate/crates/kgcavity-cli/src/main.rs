// Validation uses `!(x > 0.0)`-style comparisons on purpose: they reject NaN
// along with out-of-range values in one test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Batch scenario runner for the cavity solvers.
//!
//! Each subcommand reads a flat `key = value` config, dispatches to the
//! library, and writes `<out>/<subcommand>.csv` plus `<out>/<subcommand>.json`.
//! No plotting, no interactivity; outputs are deterministic byte-for-byte.
//!
//! Exit status: 0 = computed (including empty or infeasible results),
//! 2 = input error, 1 = internal numerical failure.

mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use config::{ConfigError, PhysicalParams, RawConfig};
use kgcavity::bvp::{decompose_profile, solve_field_bvp, BoundarySlice, BvpTolerances};
use kgcavity::pathint::{
    classical_path, harmonic_propagator, joint_probability_bruteforce, joint_probability_exact,
    stationary_phase_report, BruteForceSettings, FresnelSettings, LatticeActionSpec, Scheme,
};
use kgcavity::quantize::{
    compton_bound, find_admissible_pairs, scan_delta_t, ConstraintForm, SearchLimits,
};
use kgcavity::{dispersion, make_mode, CavityGrid, Error as LibError};
use output::{json_opt_f64, write_json, Cell, Csv, Obj};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "kgcavity",
    version,
    about = "Two-time boundary data on a Klein-Gordon cavity field: admissible-pair search, \
             interior-field reconstruction, and lattice path-integral weights"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate admissible (n_x, n_t) pairs of the joint quantization constraint
    Pairs(CommonArgs),
    /// Scan delta_t values and count admissible pairs at each
    Scan(CommonArgs),
    /// Solve the two-time boundary value problem and emit the interior field
    Bvp(CommonArgs),
    /// Evaluate the lattice Fresnel integral for one mode
    Pathint(PathintArgs),
    /// Print omega(k) dispersion tables
    Dispersion(CommonArgs),
    /// Print Compton-period bounds on delta_t per temporal mode
    Compton(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the key = value config file
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the .csv/.json pair
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Constraint form: the dispersion-consistent sign or the flipped variant
    #[arg(long, value_enum, default_value_t = FormArg::Dispersion)]
    form: FormArg,
    /// Override the subcommand's tolerance (pair/scan constraint tolerance,
    /// bvp resonance+compatibility tolerances, pathint singularity tolerance)
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args)]
struct PathintArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Cross-check the exact evaluation with regulated quadrature (n_slices <= 3)
    #[arg(long)]
    bruteforce: bool,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormArg {
    Dispersion,
    Paper,
}

impl From<FormArg> for ConstraintForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Dispersion => ConstraintForm::DispersionConsistent,
            FormArg::Paper => ConstraintForm::PaperLiteral,
        }
    }
}

enum CliError {
    Input(String),
    Numerical(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::Convergence { .. } => CliError::Numerical(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn io_err(what: &str, path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("cannot {what} `{}`: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Pairs(args) => run_pairs(args),
        Command::Scan(args) => run_scan(args),
        Command::Bvp(args) => run_bvp(args),
        Command::Pathint(args) => run_pathint(args),
        Command::Dispersion(args) => run_dispersion(args),
        Command::Compton(args) => run_compton(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(1)
        }
    }
}

fn positive(value: f64, key: &'static str) -> Result<f64, CliError> {
    if value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::Input(format!(
            "config error: key `{key}`: must be > 0, got {value}"
        )))
    }
}

fn out_paths(args: &CommonArgs, name: &str) -> Result<(PathBuf, PathBuf), CliError> {
    if !args.out.as_os_str().is_empty() {
        std::fs::create_dir_all(&args.out).map_err(|e| io_err("create", &args.out, e))?;
    }
    Ok((
        args.out.join(format!("{name}.csv")),
        args.out.join(format!("{name}.json")),
    ))
}

fn physical_inputs(phys: &PhysicalParams) -> Obj {
    Obj::new()
        .str("units", phys.units.as_str())
        .f64("mass", phys.mass_input)
        .f64("mass_natural", phys.params.mass())
        .f64("speed_of_light", phys.speed_of_light)
        .f64("hbar", phys.hbar)
}

fn run_pairs(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = RawConfig::from_file(&args.config)?;
    let phys = PhysicalParams::from_config(&cfg)?;
    let length = positive(cfg.require_f64("length")?, "length")?;
    let delta_t = positive(cfg.require_f64("delta_t")?, "delta_t")?;
    let tolerance = positive(
        args.tolerance
            .map_or_else(|| cfg.opt_f64("tolerance", 1e-9), Ok)?,
        "tolerance",
    )?;
    let max_index = cfg.opt_u32("max_index", 1000)?;
    cfg.finish()?;

    let form: ConstraintForm = args.form.into();
    let length_nat = phys.length_to_natural(length);
    let limits = SearchLimits {
        max_index,
        ..Default::default()
    };
    let pairs = find_admissible_pairs(&phys.params, length_nat, delta_t, tolerance, form, &limits);

    let mut csv = Csv::new(&["n_x", "n_t", "residual"]);
    for p in &pairs {
        csv.row(vec![p.n_x.into(), p.n_t.into(), p.residual.into()]);
    }

    let mut n_ts: Vec<u32> = pairs.iter().map(|p| p.n_t).collect();
    n_ts.sort_unstable();
    n_ts.dedup();
    let bounds: Vec<Value> = n_ts
        .iter()
        .map(|&n_t| {
            Obj::new()
                .int("n_t", n_t as usize)
                .opt_f64("bound", compton_bound(&phys.params, n_t))
                .build()
        })
        .collect();
    let pair_objs: Vec<Value> = pairs
        .iter()
        .map(|p| {
            Obj::new()
                .int("n_x", p.n_x as usize)
                .int("n_t", p.n_t as usize)
                .f64("residual", p.residual)
                .build()
        })
        .collect();
    let json = Obj::new()
        .str("form", form.as_str())
        .value(
            "inputs",
            physical_inputs(&phys)
                .f64("length", length)
                .f64("length_natural", length_nat)
                .f64("delta_t", delta_t)
                .f64("tolerance", tolerance)
                .int("max_index", max_index as usize)
                .build(),
        )
        .int("pair_count", pairs.len())
        .value("pairs", Value::Array(pair_objs))
        .value("compton_bounds", Value::Array(bounds))
        .build();

    let (csv_path, json_path) = out_paths(args, "pairs")?;
    csv.write(&csv_path)
        .map_err(|e| io_err("write", &csv_path, e))?;
    write_json(&json_path, &json).map_err(|e| io_err("write", &json_path, e))?;
    Ok(())
}

fn run_scan(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = RawConfig::from_file(&args.config)?;
    let phys = PhysicalParams::from_config(&cfg)?;
    let length = positive(cfg.require_f64("length")?, "length")?;
    let dt_min = cfg.require_f64("dt_min")?;
    let dt_max = cfg.require_f64("dt_max")?;
    let steps = cfg.require_usize("steps")?;
    let max_index = cfg.opt_u32("max_index", 1000)?;
    let tolerances = if let Some(t) = args.tolerance {
        // Flag overrides whatever the file says; still consume the keys.
        let _ = cfg.opt_f64_maybe("tolerance")?;
        let _ = cfg.opt_f64_list("tolerances")?;
        vec![positive(t, "tolerance")?]
    } else if let Some(list) = cfg.opt_f64_list("tolerances")? {
        if cfg.has("tolerance") {
            return Err(CliError::Input(
                "config error: give either `tolerance` or `tolerances`, not both".into(),
            ));
        }
        for t in &list {
            positive(*t, "tolerances")?;
        }
        list
    } else {
        vec![positive(cfg.opt_f64("tolerance", 1e-9)?, "tolerance")?]
    };
    cfg.finish()?;

    let form: ConstraintForm = args.form.into();
    let length_nat = phys.length_to_natural(length);
    let limits = SearchLimits {
        max_index,
        ..Default::default()
    };
    let mut reports = Vec::new();
    for &tol in &tolerances {
        reports.push(scan_delta_t(
            &phys.params,
            length_nat,
            dt_min,
            dt_max,
            steps,
            tol,
            form,
            &limits,
        )?);
    }

    let mut header: Vec<String> = vec!["delta_t".into()];
    if reports.len() == 1 {
        header.push("solution_count".into());
    } else {
        for i in 0..reports.len() {
            header.push(format!("solution_count_{i}"));
        }
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&header_refs);
    for i in 0..steps {
        let mut row: Vec<Cell> = vec![reports[0].delta_t_values[i].into()];
        for rep in &reports {
            row.push(rep.solution_counts[i].into());
        }
        csv.row(row);
    }

    let summaries: Vec<Value> = reports
        .iter()
        .map(|rep| {
            let hits = rep.solution_counts.iter().filter(|&&c| c > 0).count();
            Obj::new()
                .f64("tolerance", rep.tolerance)
                .f64("admissible_fraction", rep.admissible_fraction)
                .int("points_with_solutions", hits)
                .int("steps", rep.delta_t_values.len())
                .build()
        })
        .collect();
    let json = Obj::new()
        .str("form", form.as_str())
        .value(
            "inputs",
            physical_inputs(&phys)
                .f64("length", length)
                .f64("length_natural", length_nat)
                .f64("dt_min", dt_min)
                .f64("dt_max", dt_max)
                .int("steps", steps)
                .int("max_index", max_index as usize)
                .build(),
        )
        .value("summaries", Value::Array(summaries))
        .build();

    let (csv_path, json_path) = out_paths(args, "scan")?;
    csv.write(&csv_path)
        .map_err(|e| io_err("write", &csv_path, e))?;
    write_json(&json_path, &json).map_err(|e| io_err("write", &json_path, e))?;
    Ok(())
}

/// Reads a sampled profile: whitespace/newline-separated floats.
fn read_profile(path: &str, n_space: usize) -> Result<Vec<f64>, CliError> {
    let path = Path::new(path);
    let text = std::fs::read_to_string(path).map_err(|e| io_err("read profile", path, e))?;
    let mut samples = Vec::new();
    for tok in text.split_whitespace() {
        samples.push(tok.parse::<f64>().map_err(|_| {
            CliError::Input(format!(
                "profile `{}`: `{tok}` is not a number",
                path.display()
            ))
        })?);
    }
    if samples.len() != n_space {
        return Err(CliError::Input(format!(
            "profile `{}`: expected {n_space} samples, got {}",
            path.display(),
            samples.len()
        )));
    }
    Ok(samples)
}

fn run_bvp(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = RawConfig::from_file(&args.config)?;
    let phys = PhysicalParams::from_config(&cfg)?;
    let length = positive(cfg.require_f64("length")?, "length")?;
    let delta_t = positive(cfg.require_f64("delta_t")?, "delta_t")?;
    let n_space = cfg.require_usize("n_space")?;
    let n_time = cfg.require_usize("n_time")?;
    let resonance_tol = args
        .tolerance
        .map_or_else(|| cfg.opt_f64("resonance_tol", 1e-9), Ok)?;
    let compat_tol = args
        .tolerance
        .map_or_else(|| cfg.opt_f64("compat_tol", 1e-9), Ok)?;
    if args.tolerance.is_some() {
        let _ = cfg.opt_f64_maybe("resonance_tol")?;
        let _ = cfg.opt_f64_maybe("compat_tol")?;
    }
    let initial_coeffs = cfg.opt_f64_list("initial_coeffs")?;
    let final_coeffs = cfg.opt_f64_list("final_coeffs")?;
    let initial_profile = cfg.opt_str("initial_profile");
    let final_profile = cfg.opt_str("final_profile");
    let n_modes_key = if cfg.has("n_modes") {
        Some(cfg.require_usize("n_modes")?)
    } else {
        None
    };
    cfg.finish()?;

    let grid = CavityGrid::new(phys.length_to_natural(length), delta_t, n_space, n_time)?;

    // Mode count: explicit coefficients pin it; otherwise the n_modes key or
    // the full spatial resolution.
    let n_modes = match (&initial_coeffs, &final_coeffs, n_modes_key) {
        (Some(a), Some(b), _) if a.len() != b.len() => {
            return Err(CliError::Input(format!(
                "config error: initial_coeffs has {} modes but final_coeffs has {}",
                a.len(),
                b.len()
            )))
        }
        (Some(a), _, Some(k)) if a.len() != k => {
            return Err(CliError::Input(format!(
                "config error: n_modes = {k} conflicts with {}-entry initial_coeffs",
                a.len()
            )))
        }
        (_, Some(b), Some(k)) if b.len() != k => {
            return Err(CliError::Input(format!(
                "config error: n_modes = {k} conflicts with {}-entry final_coeffs",
                b.len()
            )))
        }
        (Some(a), _, _) => a.len(),
        (_, Some(b), _) => b.len(),
        (None, None, Some(k)) => k,
        (None, None, None) => n_space,
    };

    let load_slice = |coeffs: &Option<Vec<f64>>,
                      profile: &Option<String>,
                      which: &str|
     -> Result<BoundarySlice, CliError> {
        match (coeffs, profile) {
            (Some(c), None) => Ok(BoundarySlice::new(c.clone())?),
            (None, Some(p)) => {
                let samples = read_profile(p, n_space)?;
                Ok(decompose_profile(&samples, &grid, n_modes)?)
            }
            (Some(_), Some(_)) => Err(CliError::Input(format!(
                "config error: give either {which}_coeffs or {which}_profile, not both"
            ))),
            (None, None) => Err(CliError::Input(format!(
                "config error: missing required key `{which}_coeffs` (or `{which}_profile`)"
            ))),
        }
    };
    let initial = load_slice(&initial_coeffs, &initial_profile, "initial")?;
    let final_ = load_slice(&final_coeffs, &final_profile, "final")?;

    let tolerances = BvpTolerances {
        resonance: resonance_tol,
        compatibility: compat_tol,
    };
    let solution = solve_field_bvp(&phys.params, &grid, &initial, &final_, &tolerances)?;

    let mut csv = Csv::new(&["t", "x", "phi"]);
    for i in 0..solution.field.n_rows() {
        for j in 0..solution.field.n_cols() {
            csv.row(vec![
                grid.t(i).into(),
                grid.x(j).into(),
                solution.field.values()[(i, j)].into(),
            ]);
        }
    }

    let modes: Vec<Value> = solution
        .mode_solutions
        .iter()
        .map(|m| {
            Obj::new()
                .int("n_x", m.mode.n_x as usize)
                .str("classification", m.classification.as_str())
                .f64("frequency", m.mode.frequency)
                .f64("wavenumber", m.mode.wavenumber)
                .f64("coeff_cos", m.coeff_cos)
                .f64("coeff_sin", m.coeff_sin)
                .bool("free_parameter", m.free_parameter)
                .f64("mismatch", m.mismatch)
                .build()
        })
        .collect();
    let json = Obj::new()
        .bool("feasible", solution.feasible)
        .f64("kge_residual_max", solution.kge_residual_max)
        .value("modes", Value::Array(modes))
        .value(
            "inputs",
            physical_inputs(&phys)
                .f64("length", length)
                .f64("length_natural", grid.length())
                .f64("delta_t", delta_t)
                .int("n_space", n_space)
                .int("n_time", n_time)
                .int("n_modes", n_modes)
                .f64("resonance_tol", resonance_tol)
                .f64("compat_tol", compat_tol)
                .build(),
        )
        .build();

    let (csv_path, json_path) = out_paths(args, "bvp")?;
    csv.write(&csv_path)
        .map_err(|e| io_err("write", &csv_path, e))?;
    write_json(&json_path, &json).map_err(|e| io_err("write", &json_path, e))?;
    Ok(())
}

fn run_pathint(args: &PathintArgs) -> Result<(), CliError> {
    let common = &args.common;
    let cfg = RawConfig::from_file(&common.config)?;
    let phys = PhysicalParams::from_config(&cfg)?;
    let length = positive(cfg.require_f64("length")?, "length")?;
    let delta_t = positive(cfg.require_f64("delta_t")?, "delta_t")?;
    let n_x = cfg.require_u32("n_x")?;
    let n_slices = cfg.require_usize("n_slices")?;
    let alpha = cfg.require_f64("alpha")?;
    let beta = cfg.require_f64("beta")?;
    let scheme = match cfg.opt_str("scheme").as_deref() {
        None | Some("trapezoid") => Scheme::Trapezoid,
        Some("midpoint") => Scheme::Midpoint,
        Some(s) => {
            return Err(CliError::Input(format!(
                "config error: key `scheme`: expected `trapezoid` or `midpoint`, got `{s}`"
            )))
        }
    };
    let singularity_tol = positive(
        common
            .tolerance
            .map_or_else(|| cfg.opt_f64("singularity_tol", 1e-9), Ok)?,
        "singularity_tol",
    )?;
    if common.tolerance.is_some() {
        let _ = cfg.opt_f64_maybe("singularity_tol")?;
    }
    let bruteforce_tol = positive(cfg.opt_f64("bruteforce_tol", 1e-3)?, "bruteforce_tol")?;
    let bruteforce_epsilons = cfg.opt_f64_list("bruteforce_epsilons")?;
    cfg.finish()?;

    if args.bruteforce && n_slices > 3 {
        return Err(CliError::Input(format!(
            "--bruteforce is limited to n_slices <= 3: the nested quadrature cost grows like \
             (nodes per axis)^2 with nodes ~ 1/epsilon, and {n_slices} slices is past the \
             desk-scale budget"
        )));
    }

    let length_nat = phys.length_to_natural(length);
    let grid = CavityGrid::new(length_nat, delta_t, 2, 2)?;
    let mode = make_mode(&phys.params, &grid, n_x)?;
    let spec = LatticeActionSpec::for_mode(&mode, delta_t, n_slices, alpha, beta, scheme)?;
    let settings = FresnelSettings { singularity_tol };
    let jp = joint_probability_exact(&spec, &settings);
    let stationary = stationary_phase_report(&spec, &settings);
    let path = classical_path(&spec, &settings);

    let bruteforce = if args.bruteforce {
        let mut bf_settings =
            BruteForceSettings::for_slices(n_slices).with_convergence_tol(bruteforce_tol);
        if let Some(eps) = bruteforce_epsilons {
            bf_settings = bf_settings.with_epsilons(eps);
        }
        let bf = joint_probability_bruteforce(&spec, &bf_settings)?;
        let delta_mag_rel = if jp.magnitude > 0.0 {
            (bf.magnitude - jp.magnitude).abs() / jp.magnitude
        } else {
            bf.magnitude
        };
        let mut dphi = (bf.phase - jp.phase).abs();
        if dphi > std::f64::consts::PI {
            dphi = 2.0 * std::f64::consts::PI - dphi;
        }
        Some(
            Obj::new()
                .f64("magnitude", bf.magnitude)
                .f64("phase", bf.phase)
                .f64("delta_magnitude_rel", delta_mag_rel)
                .f64("delta_phase_abs", dphi)
                .f64("last_correction", bf.last_correction)
                .build(),
        )
    } else {
        None
    };

    let mut csv = Csv::new(&["slice", "t", "a_classical"]);
    if let Some(path_values) = &path {
        let delta = spec.delta();
        for (i, a) in path_values.iter().enumerate() {
            csv.row(vec![i.into(), (i as f64 * delta).into(), (*a).into()]);
        }
    }

    let oracle = harmonic_propagator(spec.omega(), delta_t, alpha, beta, spec.hbar()).ok();
    let json = Obj::new()
        .f64("magnitude", jp.magnitude)
        .f64("phase", jp.phase)
        .f64("weight", jp.weight())
        .opt_f64("classical_action", jp.classical_action)
        .int("kernel_rank_deficiency", jp.kernel_rank_deficiency)
        .f64("compatibility_residual", jp.compatibility_residual)
        .value(
            "diagnostics",
            Obj::new()
                .bool("ambiguous", jp.diagnostics.ambiguous)
                .f64("min_abs_eigenvalue", jp.diagnostics.min_abs_eigenvalue)
                .f64("max_abs_eigenvalue", jp.diagnostics.max_abs_eigenvalue)
                .f64(
                    "singularity_threshold",
                    jp.diagnostics.singularity_threshold,
                )
                .build(),
        )
        .value(
            "stationary_phase",
            Obj::new()
                .bool(
                    "stationary_point_exists",
                    stationary.stationary_point_exists,
                )
                .int("family_dimension", stationary.family_dimension)
                .opt_f64("classical_action", stationary.classical_action)
                .f64("weight_ratio", stationary.weight_ratio)
                .f64("gradient_residual", stationary.gradient_residual)
                .build(),
        )
        .value(
            "analytic_oracle",
            oracle.map_or(Value::Null, |o| {
                Obj::new()
                    .f64("magnitude", o.magnitude)
                    .f64("phase", o.phase)
                    .f64("classical_action", o.classical_action)
                    .build()
            }),
        )
        .value("bruteforce", bruteforce.map_or(Value::Null, |b| b))
        .value(
            "inputs",
            physical_inputs(&phys)
                .f64("length", length)
                .f64("length_natural", length_nat)
                .f64("delta_t", delta_t)
                .int("n_x", n_x as usize)
                .int("n_slices", n_slices)
                .f64("alpha", alpha)
                .f64("beta", beta)
                .str("scheme", scheme.as_str())
                .f64("omega", spec.omega())
                .f64("singularity_tol", singularity_tol)
                .build(),
        )
        .build();

    let (csv_path, json_path) = out_paths(common, "pathint")?;
    csv.write(&csv_path)
        .map_err(|e| io_err("write", &csv_path, e))?;
    write_json(&json_path, &json).map_err(|e| io_err("write", &json_path, e))?;
    Ok(())
}

fn run_dispersion(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = RawConfig::from_file(&args.config)?;
    let phys = PhysicalParams::from_config(&cfg)?;
    let k_min = cfg.opt_f64("k_min", 0.0)?;
    let k_max = cfg.require_f64("k_max")?;
    let steps = cfg.require_usize("steps")?;
    cfg.finish()?;
    if steps < 2 {
        return Err(CliError::Input(
            "config error: key `steps`: need at least 2 table rows".into(),
        ));
    }
    if !(k_min < k_max) {
        return Err(CliError::Input(format!(
            "config error: key `k_min`: need k_min < k_max, got [{k_min}, {k_max}]"
        )));
    }

    let mut csv = Csv::new(&["k", "k_natural", "omega"]);
    for i in 0..steps {
        let k = k_min + (k_max - k_min) * i as f64 / (steps - 1) as f64;
        // Wavenumbers are inverse lengths, so SI 1/m scales by c.
        let k_nat = k * phys.speed_of_light;
        csv.row(vec![
            k.into(),
            k_nat.into(),
            dispersion(&phys.params, k_nat).into(),
        ]);
    }

    let json = Obj::new()
        .value(
            "inputs",
            physical_inputs(&phys)
                .f64("k_min", k_min)
                .f64("k_max", k_max)
                .int("steps", steps)
                .build(),
        )
        .f64("compton_frequency", phys.params.compton_frequency())
        .int("rows", steps)
        .build();

    let (csv_path, json_path) = out_paths(args, "dispersion")?;
    csv.write(&csv_path)
        .map_err(|e| io_err("write", &csv_path, e))?;
    write_json(&json_path, &json).map_err(|e| io_err("write", &json_path, e))?;
    Ok(())
}

fn run_compton(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = RawConfig::from_file(&args.config)?;
    let phys = PhysicalParams::from_config(&cfg)?;
    let n_t_max = cfg.opt_u32("n_t_max", 10)?;
    cfg.finish()?;
    if n_t_max < 1 {
        return Err(CliError::Input(
            "config error: key `n_t_max`: must be >= 1".into(),
        ));
    }

    let mut csv = Csv::new(&["n_t", "bound"]);
    let mut bounds = Vec::new();
    for n_t in 1..=n_t_max {
        let bound = compton_bound(&phys.params, n_t);
        csv.row(vec![
            n_t.into(),
            match bound {
                Some(b) => Cell::Float(b),
                None => Cell::Str("inf".into()),
            },
        ]);
        bounds.push(
            Obj::new()
                .int("n_t", n_t as usize)
                .value("bound", json_opt_f64(bound))
                .build(),
        );
    }

    let json = Obj::new()
        .value(
            "inputs",
            physical_inputs(&phys)
                .int("n_t_max", n_t_max as usize)
                .build(),
        )
        .value("bounds", Value::Array(bounds))
        .build();

    let (csv_path, json_path) = out_paths(args, "compton")?;
    csv.write(&csv_path)
        .map_err(|e| io_err("write", &csv_path, e))?;
    write_json(&json_path, &json).map_err(|e| io_err("write", &json_path, e))?;
    Ok(())
}
