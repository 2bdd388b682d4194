//! Subcommand implementations.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use qhd_core::{
    admissible_branch, existence_reason, homoclinic_loop_reduced, homoclinic_loop_standing,
    lax_classify, level_branch_standing, momentum_branches, oscillation_criterion, rh_residual,
    standing_existence_verdict, standing_existence_verdict_linear, standing_profile,
    standing_profile_linear, structural_points_standing, traveling_profile,
    zero_speed_certificate_linear, IntegrateOptions, LaxType, LinearWaveSystem, ModelParams,
    ShockData, StandingExistence, StandingProfileOptions, StandingSystem, TravelingProfileOptions,
};

use crate::config::Config;
use crate::dataset::{write_csv, write_json, write_json_table};
use crate::sweep::{run_sweep, SweepKind};
use crate::Failure;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Viscosity {
    /// Damping proportional to the slope (density form, P-Q plane).
    Linear,
    /// Damping through the momentum flux (amplitude form, V-W plane).
    Nonlinear,
}

fn resolve_format(cfg: &Config, cli: Option<Format>) -> Result<Format, Failure> {
    if let Some(f) = cli {
        return Ok(f);
    }
    match cfg.string("format", None)?.as_deref() {
        None | Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(Failure::input(format!(
            "format must be \"csv\" or \"json\", got {other:?}"
        ))),
    }
}

fn resolve_viscosity(cfg: &Config, cli: Option<Viscosity>) -> Result<Viscosity, Failure> {
    if let Some(v) = cli {
        return Ok(v);
    }
    match cfg.string("viscosity", None)?.as_deref() {
        None | Some("nonlinear") => Ok(Viscosity::Nonlinear),
        Some("linear") => Ok(Viscosity::Linear),
        Some(other) => Err(Failure::input(format!(
            "viscosity must be \"linear\" or \"nonlinear\", got {other:?}"
        ))),
    }
}

fn resolve_out(cfg: &Config, cli: Option<&Path>) -> Result<PathBuf, Failure> {
    let dir = match cli {
        Some(p) => p.to_path_buf(),
        None => PathBuf::from(cfg.string("out", None)?.unwrap_or_else(|| ".".into())),
    };
    std::fs::create_dir_all(&dir).map_err(|e| {
        Failure::input(format!("cannot create output directory {}: {e}", dir.display()))
    })?;
    Ok(dir)
}

fn resolve_tolerances(
    cfg: &Config,
    rtol: Option<f64>,
    atol: Option<f64>,
) -> Result<IntegrateOptions, Failure> {
    let mut opts = IntegrateOptions::default();
    if let Some(r) = cfg.f64("rtol", rtol)? {
        opts.rtol = r;
    }
    if let Some(a) = cfg.f64("atol", atol)? {
        opts.atol = a;
    }
    Ok(opts)
}

/// Write a table under `stem` in the chosen format and return the path.
fn write_table(
    dir: &Path,
    stem: &str,
    format: Format,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<PathBuf, Failure> {
    match format {
        Format::Csv => {
            let path = dir.join(format!("{stem}.csv"));
            write_csv(&path, columns, rows)?;
            Ok(path)
        }
        Format::Json => {
            let path = dir.join(format!("{stem}.json"));
            write_json_table(&path, columns, rows)?;
            Ok(path)
        }
    }
}

fn pair_rows(points: &[(f64, f64)]) -> Vec<Vec<f64>> {
    points.iter().map(|&(a, b)| vec![a, b]).collect()
}

fn file_name(path: &Path) -> Value {
    json!(path.file_name().and_then(|n| n.to_str()))
}

// ---------------------------------------------------------------------------
// classify

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Downstream (right) end-state density
    #[arg(long)]
    pub p_plus: Option<f64>,
    /// Upstream (left) end-state density
    #[arg(long)]
    pub p_minus: Option<f64>,
    /// Propagation speed of the front
    #[arg(long)]
    pub s: Option<f64>,
    /// Adiabatic exponent of the pressure law (>= 1; 1 = isothermal)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Viscosity coefficient (irrelevant to classification, default 1)
    #[arg(long)]
    pub mu: Option<f64>,
    /// Dispersion coefficient (irrelevant to classification, default 1)
    #[arg(long)]
    pub k: Option<f64>,
    /// Flat JSON file of flag-name keys filling in unset flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<(), Failure> {
    let cfg = Config::load(args.config.as_deref())?;
    let p_plus = cfg.require_f64("p-plus", args.p_plus)?;
    let p_minus = cfg.require_f64("p-minus", args.p_minus)?;
    let s = cfg.require_f64("s", args.s)?;
    let gamma = cfg.require_f64("gamma", args.gamma)?;
    let mu = cfg.f64("mu", args.mu)?.unwrap_or(1.0);
    let k = cfg.f64("k", args.k)?.unwrap_or(1.0);

    if p_plus == p_minus {
        return Err(Failure::input("degenerate: equal end states"));
    }
    let params = ModelParams::new(gamma, mu, k).map_err(Failure::from_core)?;
    let branches = momentum_branches(p_plus, p_minus, s, gamma).map_err(Failure::from_core)?;

    let mut branch_docs = Vec::new();
    let mut admissible = Vec::new();
    for (idx, shock) in [(1u8, branches.shock_1()), (2u8, branches.shock_2())] {
        let (r_mass, r_momentum) = rh_residual(&shock, gamma);
        let class = lax_classify(&shock, &params);
        if class.lax_type != LaxType::NotAdmissible {
            admissible.push(idx);
        }
        branch_docs.push(json!({
            "branch": idx,
            "shock": shock,
            "residuals": {"mass": r_mass, "momentum": r_momentum},
            "classification": class,
        }));
    }

    let mut doc = json!({
        "inputs": {"p-plus": p_plus, "p-minus": p_minus, "s": s, "gamma": gamma, "mu": mu, "k": k},
        "offset": branches.d,
        "branches": branch_docs,
        "admissible": if admissible.len() == 1 { json!(admissible[0]) } else { Value::Null },
    });

    if s == 0.0 {
        // Zero speed kills the damping, so the phase-plane energy is conserved
        // and distinct end states on distinct levels cannot be connected, Lax
        // conditions or not. Attach the level gap for both branches.
        let mut certificates = Vec::new();
        for (idx, shock) in [(1u8, branches.shock_1()), (2u8, branches.shock_2())] {
            let sys =
                LinearWaveSystem::from_shock(&shock, params).map_err(Failure::from_core)?;
            let cert = zero_speed_certificate_linear(&sys).map_err(Failure::from_core)?;
            certificates.push(json!({
                "branch": idx,
                "energy-gap": cert.energy_gap,
                "smaller-state-is-energy-maximum": cert.small_root_is_energy_max,
            }));
        }
        doc["zero-speed"] = json!({
            "note": "no viscous front connects distinct end states at zero speed: \
                     the damping vanishes with the speed and the conserved energy \
                     separates the two rest points",
            "certificates": certificates,
        });
    }

    println!("{}", serde_json::to_string_pretty(&doc).expect("classification serializes"));
    Ok(())
}

// ---------------------------------------------------------------------------
// travel

#[derive(Args, Debug)]
pub struct TravelArgs {
    /// Downstream (right) end-state density
    #[arg(long)]
    pub p_plus: Option<f64>,
    /// Upstream (left) end-state density
    #[arg(long)]
    pub p_minus: Option<f64>,
    /// Propagation speed of the front
    #[arg(long)]
    pub s: Option<f64>,
    /// Adiabatic exponent of the pressure law (>= 1)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Viscosity coefficient (> 0)
    #[arg(long)]
    pub mu: Option<f64>,
    /// Dispersion coefficient (> 0)
    #[arg(long)]
    pub k: Option<f64>,
    /// Seed displacement off the saddle along its unstable direction
    #[arg(long)]
    pub delta: Option<f64>,
    /// Give up if the far state is not reached by this integration length
    #[arg(long)]
    pub y_max: Option<f64>,
    /// Half-width of the output grid (default: pad tails to the residual floor)
    #[arg(long)]
    pub span: Option<f64>,
    /// Relative integration tolerance
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Absolute integration tolerance
    #[arg(long)]
    pub atol: Option<f64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Dataset format: csv or json (the meta sidecar is always JSON)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat JSON file of flag-name keys filling in unset flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn cmd_travel(args: &TravelArgs) -> Result<(), Failure> {
    let cfg = Config::load(args.config.as_deref())?;
    let p_plus = cfg.require_f64("p-plus", args.p_plus)?;
    let p_minus = cfg.require_f64("p-minus", args.p_minus)?;
    let s = cfg.require_f64("s", args.s)?;
    let gamma = cfg.require_f64("gamma", args.gamma)?;
    let mu = cfg.require_f64("mu", args.mu)?;
    let k = cfg.require_f64("k", args.k)?;
    let out = resolve_out(&cfg, args.out.as_deref())?;
    let format = resolve_format(&cfg, args.format)?;

    if p_plus == p_minus {
        return Err(Failure::input("degenerate: equal end states"));
    }
    let params = ModelParams::new(gamma, mu, k).map_err(Failure::from_core)?;

    if s == 0.0 {
        // conserved-energy obstruction; report the level gap on one branch
        let branches =
            momentum_branches(p_plus, p_minus, 0.0, gamma).map_err(Failure::from_core)?;
        let sys = LinearWaveSystem::from_shock(&branches.shock_2(), params)
            .map_err(Failure::from_core)?;
        let cert = zero_speed_certificate_linear(&sys).map_err(Failure::from_core)?;
        return Err(Failure::not_exists(format!(
            "no front at zero speed: the damping vanishes with the speed, the phase-plane \
             energy is conserved along orbits, and the end states sit on levels separated \
             by {:.6e} (the smaller density is a strict local maximum of that energy)",
            cert.energy_gap
        )));
    }

    let adm = admissible_branch(p_plus, p_minus, s, gamma).map_err(Failure::from_core)?;
    let sys = LinearWaveSystem::from_shock(&adm.shock, params).map_err(Failure::from_core)?;

    let mut opts = TravelingProfileOptions {
        integrate: resolve_tolerances(&cfg, args.rtol, args.atol)?,
        delta: cfg.f64("delta", args.delta)?,
        ..Default::default()
    };
    if let Some(y_max) = cfg.f64("y-max", args.y_max)? {
        opts.y_max = y_max;
    }
    if let Some(half) = cfg.f64("span", args.span)? {
        if !(half > 0.0) {
            return Err(Failure::input(format!("span must be positive, got {half}")));
        }
        opts.span = Some((-half, half));
    }

    let profile = traveling_profile(&sys, &opts).map_err(Failure::from_core)?;
    let osc = oscillation_criterion(&sys).map_err(Failure::from_core)?;

    let rows: Vec<Vec<f64>> =
        profile.samples.iter().map(|r| vec![r.y, r.p, r.q, r.j]).collect();
    let data_path = write_table(&out, "profile", format, &["y", "P", "Q", "J"], &rows)?;

    let meta = json!({
        "command": "travel",
        "inputs": {"p-plus": p_plus, "p-minus": p_minus, "s": s, "gamma": gamma, "mu": mu, "k": k},
        "branch": adm.branch,
        "shock": adm.shock,
        "classification": adm.classification,
        "oscillation": osc,
        "reversed": profile.reversed,
        "options": {
            "delta": opts.delta,
            "span": opts.span.map(|(a, b)| vec![a, b]),
            "y-max": opts.y_max,
            "rtol": opts.integrate.rtol,
            "atol": opts.integrate.atol,
            "n-samples": opts.n_samples,
        },
        "diagnostics": profile.diagnostics,
        "audit": profile.audit,
        "data": file_name(&data_path),
    });
    write_json(&out.join("profile.meta.json"), &meta)?;

    println!(
        "traveling front (branch {}, {:?}): {} samples on [{:.4}, {:.4}], terminal residual \
         {:.3e}, {} slope crossings -> {}",
        adm.branch,
        adm.classification.lax_type,
        profile.samples.len(),
        profile.diagnostics.y_min,
        profile.diagnostics.y_max,
        profile.diagnostics.terminal_residual,
        profile.diagnostics.oscillation_count,
        data_path.display(),
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// standing

#[derive(Args, Debug)]
pub struct StandingArgs {
    /// Which viscosity model shapes the profile equation
    #[arg(long, value_enum)]
    pub viscosity: Option<Viscosity>,
    /// Far-field density
    #[arg(long)]
    pub rho_plus: Option<f64>,
    /// Far-field velocity
    #[arg(long)]
    pub u_plus: Option<f64>,
    /// Adiabatic exponent of the pressure law (>= 1)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Viscosity coefficient (> 0; a standing wave never feels it, default 1)
    #[arg(long)]
    pub mu: Option<f64>,
    /// Dispersion coefficient (> 0)
    #[arg(long)]
    pub k: Option<f64>,
    /// Half-width of the output grid (default: pad tails to the residual floor)
    #[arg(long)]
    pub span: Option<f64>,
    /// Relative integration tolerance
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Absolute integration tolerance
    #[arg(long)]
    pub atol: Option<f64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Dataset format: csv or json (the meta sidecar is always JSON)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Flat JSON file of flag-name keys filling in unset flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn cmd_standing(args: &StandingArgs) -> Result<(), Failure> {
    let cfg = Config::load(args.config.as_deref())?;
    let viscosity = resolve_viscosity(&cfg, args.viscosity)?;
    let rho_plus = cfg.require_f64("rho-plus", args.rho_plus)?;
    let u_plus = cfg.require_f64("u-plus", args.u_plus)?;
    let gamma = cfg.require_f64("gamma", args.gamma)?;
    let mu = cfg.f64("mu", args.mu)?.unwrap_or(1.0);
    let k = cfg.require_f64("k", args.k)?;
    let out = resolve_out(&cfg, args.out.as_deref())?;
    let format = resolve_format(&cfg, args.format)?;

    let mut opts = StandingProfileOptions {
        integrate: resolve_tolerances(&cfg, args.rtol, args.atol)?,
        ..Default::default()
    };
    if let Some(half) = cfg.f64("span", args.span)? {
        if !(half > 0.0) {
            return Err(Failure::input(format!("span must be positive, got {half}")));
        }
        opts.span = Some(half);
    }

    let params = ModelParams::new(gamma, mu, k).map_err(Failure::from_core)?;
    let inputs = json!({
        "rho-plus": rho_plus, "u-plus": u_plus, "gamma": gamma, "mu": mu, "k": k,
    });
    let options_doc = json!({
        "span": opts.span,
        "rtol": opts.integrate.rtol,
        "atol": opts.integrate.atol,
        "n-samples": opts.n_samples,
    });

    match viscosity {
        Viscosity::Nonlinear => {
            standing_nonlinear(rho_plus, u_plus, params, &opts, &out, format, inputs, options_doc)
        }
        Viscosity::Linear => {
            standing_linear(rho_plus, u_plus, params, &opts, &out, format, inputs, options_doc)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn standing_nonlinear(
    rho_plus: f64,
    u_plus: f64,
    params: ModelParams,
    opts: &StandingProfileOptions,
    out: &Path,
    format: Format,
    inputs: Value,
    options_doc: Value,
) -> Result<(), Failure> {
    let sys = StandingSystem::new(rho_plus, u_plus, params).map_err(Failure::from_core)?;
    let verdict = standing_existence_verdict(&sys);
    match verdict {
        StandingExistence::Exists => {
            let profile = standing_profile(&sys, opts).map_err(Failure::from_core)?;
            let rows: Vec<Vec<f64>> = profile
                .samples
                .iter()
                .map(|r| vec![r.y, r.v, r.w, r.u, r.v * r.v])
                .collect();
            let data_path =
                write_table(out, "profile", format, &["y", "V", "W", "U", "rho"], &rows)?;
            let pts = structural_points_standing(&sys).map_err(Failure::from_core)?;
            let meta = json!({
                "command": "standing",
                "viscosity": "nonlinear",
                "inputs": inputs,
                "system": {"c1": sys.c1, "c2": sys.c2, "v-plus": sys.v_plus},
                "verdict": format!("{verdict:?}"),
                "structure": {
                    "layout": format!("{:?}", pts.layout),
                    "saddle": pts.reference_root,
                    "center": pts.second_root,
                    "derivative-zero": pts.derivative_zero,
                    "turning-point": pts.turning_point,
                },
                "options": options_doc,
                "diagnostics": profile.diagnostics,
                "data": file_name(&data_path),
            });
            write_json(&out.join("profile.meta.json"), &meta)?;
            println!(
                "standing pulse: {} samples on [{:.4}, {:.4}], amplitude dip to {:.6} at y = 0, \
                 closest saddle approach {:.3e} -> {}",
                profile.samples.len(),
                profile.diagnostics.y_min,
                profile.diagnostics.y_max,
                profile.samples[profile.samples.len() / 2].v,
                profile.diagnostics.terminal_residual,
                data_path.display(),
            );
            Ok(())
        }
        StandingExistence::NoneSonic => {
            // No pulse, but the zero level set of the conserved energy through
            // the far state is still a well-defined pair of curves; write them
            // so the degenerate geometry can be inspected.
            let v_hi = 2.5 * sys.v_plus;
            let upper = level_branch_standing(&sys, sys.v_plus, v_hi, 800, true)
                .map_err(Failure::from_core)?;
            let lower = level_branch_standing(&sys, sys.v_plus, v_hi, 800, false)
                .map_err(Failure::from_core)?;
            let plus_path = write_table(out, "branch_plus", format, &["V", "W"], &pair_rows(&upper))?;
            let minus_path =
                write_table(out, "branch_minus", format, &["V", "W"], &pair_rows(&lower))?;
            println!("wrote {}", plus_path.display());
            println!("wrote {}", minus_path.display());
            Err(Failure::not_exists(format!(
                "no standing pulse (verdict NoneSonic): {}; wrote the zero-level branches \
                 through the far state to {} and {}",
                existence_reason(verdict),
                plus_path.display(),
                minus_path.display(),
            )))
        }
        other => Err(Failure::not_exists(format!(
            "no standing pulse (verdict {other:?}): {}",
            existence_reason(other)
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn standing_linear(
    rho_plus: f64,
    u_plus: f64,
    params: ModelParams,
    opts: &StandingProfileOptions,
    out: &Path,
    format: Format,
    inputs: Value,
    options_doc: Value,
) -> Result<(), Failure> {
    let j = rho_plus * u_plus;
    let shock =
        ShockData::new(rho_plus, rho_plus, j, j, 0.0).map_err(Failure::from_core)?;
    let sys = LinearWaveSystem::from_shock(&shock, params).map_err(Failure::from_core)?;
    let verdict = standing_existence_verdict_linear(&sys).map_err(Failure::from_core)?;
    if verdict != StandingExistence::Exists {
        return Err(Failure::not_exists(format!(
            "no standing pulse (verdict {verdict:?}): {}",
            existence_reason(verdict)
        )));
    }
    let profile = standing_profile_linear(&sys, opts).map_err(Failure::from_core)?;
    let rows: Vec<Vec<f64>> =
        profile.samples.iter().map(|r| vec![r.y, r.p, r.q, r.j]).collect();
    let data_path = write_table(out, "profile", format, &["y", "P", "Q", "J"], &rows)?;
    let meta = json!({
        "command": "standing",
        "viscosity": "linear",
        "inputs": inputs,
        "system": {"a": sys.a, "b": sys.b},
        "verdict": format!("{verdict:?}"),
        "options": options_doc,
        "diagnostics": profile.diagnostics,
        "data": file_name(&data_path),
    });
    write_json(&out.join("profile.meta.json"), &meta)?;
    println!(
        "standing pulse: {} samples on [{:.4}, {:.4}], density dip to {:.6} at y = 0, \
         closest saddle approach {:.3e} -> {}",
        profile.samples.len(),
        profile.diagnostics.y_min,
        profile.diagnostics.y_max,
        profile.samples[profile.samples.len() / 2].p,
        profile.diagnostics.terminal_residual,
        data_path.display(),
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// figure

#[derive(Args, Debug)]
pub struct FigureArgs {
    /// Which dataset: 1 = still-fluid separatrix pair, 2 = subsonic homoclinic
    /// loop, 3 = sonic level branches, 4 = damped loop + traveling front
    #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
    pub id: u8,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cmd_figure(args: &FigureArgs) -> Result<(), Failure> {
    let out = resolve_out(&Config::default(), args.out.as_deref())?;
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut written = Vec::new();

    match args.id {
        1 => {
            // still fluid (u = 0): the level set through the far state leaves
            // the saddle as a separatrix pair instead of closing into a loop
            let params = ModelParams::new(1.5, 1.0, sqrt2).map_err(Failure::from_core)?;
            let sys = StandingSystem::new(30.25, 0.0, params).map_err(Failure::from_core)?;
            let v_plus = sys.v_plus;
            let lower = level_branch_standing(&sys, v_plus / 100.0, v_plus, 800, false)
                .map_err(Failure::from_core)?;
            let upper = level_branch_standing(&sys, v_plus, 1.5 * v_plus, 800, true)
                .map_err(Failure::from_core)?;
            let p1 = out.join("fig1_separatrix_lower.csv");
            write_csv(&p1, &["V", "W"], &pair_rows(&lower))?;
            let p2 = out.join("fig1_separatrix_upper.csv");
            write_csv(&p2, &["V", "W"], &pair_rows(&upper))?;
            written.extend([p1, p2]);
        }
        2 => {
            // strictly subsonic far field: the closed homoclinic loop
            let params = ModelParams::new(1.5, 1.0, sqrt2).map_err(Failure::from_core)?;
            let sys = StandingSystem::new(2.0, 0.8, params).map_err(Failure::from_core)?;
            let loop_pts = homoclinic_loop_standing(&sys, 400).map_err(Failure::from_core)?;
            let p = out.join("fig2_loop.csv");
            write_csv(&p, &["V", "W"], &pair_rows(&loop_pts))?;
            written.push(p);
        }
        3 => {
            // exactly sonic far field: the loop degenerates to a cusped pair
            // of level branches to the right of the far state
            let params = ModelParams::new(1.5, 1.0, 1.0).map_err(Failure::from_core)?;
            let sys = StandingSystem::new(1.0, 1.5f64.sqrt(), params)
                .map_err(Failure::from_core)?;
            let upper = level_branch_standing(&sys, sys.v_plus, 2.5 * sys.v_plus, 800, true)
                .map_err(Failure::from_core)?;
            let lower = level_branch_standing(&sys, sys.v_plus, 2.5 * sys.v_plus, 800, false)
                .map_err(Failure::from_core)?;
            let p1 = out.join("fig3_branch_plus.csv");
            write_csv(&p1, &["V", "W"], &pair_rows(&upper))?;
            let p2 = out.join("fig3_branch_minus.csv");
            write_csv(&p2, &["V", "W"], &pair_rows(&lower))?;
            written.extend([p1, p2]);
        }
        4 => {
            // damped density form: the conservative loop skeleton and the
            // spiraling front the damping carves through its interior
            let adm = admissible_branch(1.2, 2.0, 1.0, 1.5).map_err(Failure::from_core)?;
            let params = ModelParams::new(1.5, 0.3, sqrt2).map_err(Failure::from_core)?;
            let sys =
                LinearWaveSystem::from_shock(&adm.shock, params).map_err(Failure::from_core)?;
            let loop_pts = homoclinic_loop_reduced(&sys, 400).map_err(Failure::from_core)?;
            let p1 = out.join("fig4_loop.csv");
            write_csv(&p1, &["P", "Q"], &pair_rows(&loop_pts))?;
            let profile = traveling_profile(&sys, &TravelingProfileOptions::default())
                .map_err(Failure::from_core)?;
            let rows: Vec<Vec<f64>> =
                profile.samples.iter().map(|r| vec![r.y, r.p, r.q, r.j]).collect();
            let p2 = out.join("fig4_heteroclinic.csv");
            write_csv(&p2, &["y", "P", "Q", "J"], &rows)?;
            written.extend([p1, p2]);
        }
        other => unreachable!("clap bounds the figure id to 1..=4, got {other}"),
    }

    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Which property family to exercise
    #[arg(value_enum)]
    pub kind: SweepKind,
    /// Number of randomized cases (default depends on the kind)
    #[arg(long)]
    pub cases: Option<u64>,
    /// RNG seed; the same seed yields a byte-identical report
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat JSON file of flag-name keys filling in unset flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    let cfg = Config::load(args.config.as_deref())?;
    let seed = cfg.u64("seed", args.seed)?.unwrap_or(1);
    let cases = cfg.u64("cases", args.cases)?.unwrap_or(args.kind.default_cases() as u64);
    let out = resolve_out(&cfg, args.out.as_deref())?;
    let threads = threads_from_env()?;

    let report = run_sweep(args.kind, cases as usize, seed, threads);
    let path = out.join("sweep_report.json");
    write_json(&path, &report)?;
    println!(
        "{}: {}/{} pass, {} fail, {} hard failures -> {}",
        report.kind,
        report.pass_count,
        report.cases,
        report.fail_count,
        report.hard_failures,
        path.display(),
    );
    if report.hard_failures > 0 {
        Err(Failure::numerical(format!(
            "{} of {} cases hit a numerical failure (see {})",
            report.hard_failures,
            report.cases,
            path.display(),
        )))
    } else {
        Ok(())
    }
}

/// Worker cap from `QHD_DSW_THREADS`; unset means let the pool pick.
fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var("QHD_DSW_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(Failure::input("QHD_DSW_THREADS is not valid unicode"))
        }
        Ok(raw) => parse_threads(&raw).map(Some),
    }
}

fn parse_threads(raw: &str) -> Result<usize, Failure> {
    let n: usize = raw.trim().parse().map_err(|_| {
        Failure::input(format!("QHD_DSW_THREADS must be a positive integer, got {raw:?}"))
    })?;
    if n == 0 {
        return Err(Failure::input("QHD_DSW_THREADS must be at least 1"));
    }
    Ok(n)
}
