//! Randomized verification sweeps.
//!
//! Each sweep draws a family of systems from a seeded generator, asks the
//! structural predicates for a forecast (existence, admissibility, descent),
//! then runs an independent construction and scores the agreement. Reports
//! are byte-reproducible for a given seed no matter how many workers run:
//! all inputs are drawn sequentially before any parallel work, each case is
//! scored from its inputs alone, and records are merged back in input order.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use qhd_core::{
    admissible_branch, lax_classify, loop_traversal_reduced, loop_traversal_standing,
    momentum_branches, oscillation_criterion, rh_residual, standing_existence_verdict,
    standing_existence_verdict_linear, traveling_profile, zero_speed_certificate_linear,
    zero_speed_certificate_standing, EnergyRef, Error, IntegrateOptions, LaxType,
    LinearWaveSystem, ModelParams, ShockData, StandingExistence, StandingSystem,
    TravelingProfileOptions,
};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepKind {
    /// Sonic trichotomy vs. loop construction, nonlinear viscosity
    StandingNonlinear,
    /// The same trichotomy at zero speed for the linear-viscosity density form
    StandingLinear,
    /// Traveling fronts: shooting, descent audit, oscillation dichotomy
    Travel,
    /// Zero-speed conserved-energy certificates
    ZeroSpeed,
    /// Jump-condition residuals and unique admissibility
    Rh,
}

impl SweepKind {
    pub fn default_cases(self) -> usize {
        match self {
            SweepKind::StandingNonlinear | SweepKind::StandingLinear => 200,
            SweepKind::Travel | SweepKind::ZeroSpeed => 50,
            SweepKind::Rh => 10_000,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::StandingNonlinear => "standing-nonlinear",
            SweepKind::StandingLinear => "standing-linear",
            SweepKind::Travel => "travel",
            SweepKind::ZeroSpeed => "zero-speed",
            SweepKind::Rh => "rh",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CaseRecord {
    pub index: usize,
    pub inputs: Value,
    pub predicted: String,
    pub constructed: String,
    pub pass: bool,
    pub diagnostics: Value,
    /// Set only when a numerical routine failed outright; a clean mismatch
    /// between prediction and construction leaves this empty.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CaseRecord {
    fn hard(index: usize, inputs: Value, predicted: impl Into<String>, err: &Error) -> Self {
        CaseRecord {
            index,
            inputs,
            predicted: predicted.into(),
            constructed: "error".into(),
            pass: false,
            diagnostics: json!({}),
            error: Some(err.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub kind: String,
    pub seed: u64,
    pub cases: usize,
    pub pass_count: usize,
    pub fail_count: usize,
    /// Cases whose `error` field is set (these alone are a process failure).
    pub hard_failures: usize,
    pub failing_cases: Vec<usize>,
    pub records: Vec<CaseRecord>,
}

pub fn run_sweep(kind: SweepKind, cases: usize, seed: u64, threads: Option<usize>) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<CaseInputs> = (0..cases).map(|i| draw_case(kind, i, &mut rng)).collect();

    // num_threads(0) lets rayon size the pool from the machine
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .expect("worker pool");
    let records: Vec<CaseRecord> = pool.install(|| {
        inputs
            .par_iter()
            .enumerate()
            .map(|(i, inp)| score_case(i, inp))
            .collect()
    });

    let pass_count = records.iter().filter(|r| r.pass).count();
    let hard_failures = records.iter().filter(|r| r.error.is_some()).count();
    let failing_cases = records.iter().filter(|r| !r.pass).map(|r| r.index).collect();
    SweepReport {
        kind: kind.name().to_string(),
        seed,
        cases,
        pass_count,
        fail_count: cases - pass_count,
        hard_failures,
        failing_cases,
        records,
    }
}

#[derive(Debug, Clone)]
enum CaseInputs {
    Standing { rho_plus: f64, u_plus: f64, gamma: f64, k: f64, regime: &'static str },
    StandingLinear { p: f64, u: f64, gamma: f64, k: f64, regime: &'static str },
    Travel { p_plus: f64, p_minus: f64, s: f64, gamma: f64, mu: f64, k: f64 },
    ZeroSpeed { p_plus: f64, p_minus: f64, gamma: f64, k: f64, linear: bool, branch: u8 },
    Rh { p_plus: f64, p_minus: f64, s: f64, gamma: f64 },
}

/// A far field in one of four regimes, cycled by index so every report
/// exercises all of them: at rest, strictly subsonic, pinned into the sonic
/// tolerance band, supersonic.
fn draw_far_field(i: usize, rng: &mut ChaCha8Rng) -> (f64, f64, f64, f64, &'static str) {
    let rho: f64 = rng.gen_range(0.3..5.0);
    let gamma = if i % 5 == 0 { 1.0 } else { rng.gen_range(1.0..3.0) };
    let k = rng.gen_range(0.5..2.5);
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let cs = (gamma * rho.powf(gamma - 1.0)).sqrt();
    let (u, regime) = match i % 4 {
        0 => (0.0, "rest"),
        1 => (sign * rng.gen_range(0.1..0.9) * cs, "subsonic"),
        2 => (sign * cs * (1.0 + rng.gen_range(-2e-10..2e-10)), "sonic"),
        _ => (sign * rng.gen_range(1.1..3.0) * cs, "supersonic"),
    };
    (rho, u, gamma, k, regime)
}

fn draw_case(kind: SweepKind, i: usize, rng: &mut ChaCha8Rng) -> CaseInputs {
    match kind {
        SweepKind::StandingNonlinear => {
            let (rho_plus, u_plus, gamma, k, regime) = draw_far_field(i, rng);
            CaseInputs::Standing { rho_plus, u_plus, gamma, k, regime }
        }
        SweepKind::StandingLinear => {
            let (p, u, gamma, k, regime) = draw_far_field(i, rng);
            CaseInputs::StandingLinear { p, u, gamma, k, regime }
        }
        SweepKind::Travel => {
            let p_small = rng.gen_range(0.3..2.0);
            let ratio = rng.gen_range(1.15..3.0);
            let gamma = if i % 7 == 0 { 1.0 } else { rng.gen_range(1.0..2.5) };
            let k = rng.gen_range(0.8..1.8);
            let mut mu: f64 = rng.gen_range(0.15..3.0);
            let speed: f64 = rng.gen_range(0.5..1.5);
            let p_large = p_small * ratio;
            // alternate the two admissible orderings (downstream smaller with
            // s > 0, downstream larger with s < 0)
            let (p_plus, p_minus, s) =
                if i % 2 == 0 { (p_small, p_large, speed) } else { (p_large, p_small, -speed) };
            // park the damping ratio away from the focus/node boundary so the
            // oscillation count is a sharp prediction; one 1.25x bump always
            // clears the [0.9, 1.1] band
            if let Ok(adm) = admissible_branch(p_plus, p_minus, s, gamma) {
                if let Ok(params) = ModelParams::new(gamma, mu, k) {
                    if let Ok(sys) = LinearWaveSystem::from_shock(&adm.shock, params) {
                        let fp = sys.f_prime(sys.smaller_root());
                        if fp < 0.0 {
                            let threshold = (-2.0 * fp).sqrt();
                            for _ in 0..8 {
                                let ratio_q = s.abs() * mu / k / threshold;
                                if !(0.9..=1.1).contains(&ratio_q) {
                                    break;
                                }
                                mu *= 1.25;
                            }
                        }
                    }
                }
            }
            CaseInputs::Travel { p_plus, p_minus, s, gamma, mu, k }
        }
        SweepKind::ZeroSpeed => {
            let base = rng.gen_range(0.3..2.5);
            let ratio = rng.gen_range(1.2..4.0);
            let gamma = if i % 6 == 0 { 1.0 } else { rng.gen_range(1.0..3.0) };
            let k = rng.gen_range(0.5..2.5);
            let swap = rng.gen_bool(0.5);
            let (p_plus, p_minus) =
                if swap { (base * ratio, base) } else { (base, base * ratio) };
            CaseInputs::ZeroSpeed {
                p_plus,
                p_minus,
                gamma,
                k,
                linear: i % 2 == 0,
                branch: if (i / 2) % 2 == 0 { 2 } else { 1 },
            }
        }
        SweepKind::Rh => {
            let p_plus = rng.gen_range(0.2..5.0);
            let ratio = rng.gen_range(1.05..8.0);
            let swap = rng.gen_bool(0.5);
            let s = rng.gen_range(-3.0..3.0);
            let gamma = if i % 9 == 0 { 1.0 } else { rng.gen_range(1.0..3.0) };
            let (p_plus, p_minus) =
                if swap { (p_plus * ratio, p_plus) } else { (p_plus, p_plus * ratio) };
            CaseInputs::Rh { p_plus, p_minus, s, gamma }
        }
    }
}

fn score_case(index: usize, inputs: &CaseInputs) -> CaseRecord {
    match *inputs {
        CaseInputs::Standing { rho_plus, u_plus, gamma, k, regime } => {
            score_standing_nonlinear(index, rho_plus, u_plus, gamma, k, regime)
        }
        CaseInputs::StandingLinear { p, u, gamma, k, regime } => {
            score_standing_linear(index, p, u, gamma, k, regime)
        }
        CaseInputs::Travel { p_plus, p_minus, s, gamma, mu, k } => {
            score_travel(index, p_plus, p_minus, s, gamma, mu, k)
        }
        CaseInputs::ZeroSpeed { p_plus, p_minus, gamma, k, linear, branch } => {
            score_zero_speed(index, p_plus, p_minus, gamma, k, linear, branch)
        }
        CaseInputs::Rh { p_plus, p_minus, s, gamma } => {
            score_rh(index, p_plus, p_minus, s, gamma)
        }
    }
}

/// Tolerances for the loop traversals: tighter than the default profile
/// tolerances is pointless here, the score only needs the qualitative fate.
fn traversal_options() -> IntegrateOptions {
    IntegrateOptions { rtol: 1e-9, atol: 1e-11, ..Default::default() }
}

fn score_standing_nonlinear(
    index: usize,
    rho_plus: f64,
    u_plus: f64,
    gamma: f64,
    k: f64,
    regime: &'static str,
) -> CaseRecord {
    let inputs = json!({
        "rho-plus": rho_plus, "u-plus": u_plus, "gamma": gamma, "k": k, "regime": regime,
    });
    let params = match ModelParams::new(gamma, 1.0, k) {
        Ok(p) => p,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let sys = match StandingSystem::new(rho_plus, u_plus, params) {
        Ok(s) => s,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let verdict = standing_existence_verdict(&sys);
    let predicted = format!("{verdict:?}");
    match loop_traversal_standing(&sys, 1e-10, &traversal_options()) {
        Ok(traj) => {
            let level = sys
                .energy(traj.samples[0].1[0], traj.samples[0].1[1])
                .unwrap_or(f64::NAN);
            let mut drift: f64 = 0.0;
            for &(_, st) in &traj.samples {
                let dev = sys
                    .energy(st[0], st[1])
                    .map(|e| (e - level).abs())
                    .unwrap_or(f64::INFINITY);
                drift = drift.max(dev);
            }
            let closed = drift < 1e-6;
            CaseRecord {
                index,
                inputs,
                predicted,
                constructed: "loop".into(),
                pass: verdict == StandingExistence::Exists && closed,
                diagnostics: json!({"period": traj.t_end(), "level-drift": drift}),
                error: None,
            }
        }
        Err(Error::VerdictNotExists(reason)) => CaseRecord {
            index,
            inputs,
            predicted,
            constructed: "none".into(),
            pass: verdict != StandingExistence::Exists,
            diagnostics: json!({"refusal": reason}),
            error: None,
        },
        Err(e) => CaseRecord::hard(index, inputs, predicted, &e),
    }
}

fn score_standing_linear(
    index: usize,
    p: f64,
    u: f64,
    gamma: f64,
    k: f64,
    regime: &'static str,
) -> CaseRecord {
    let inputs = json!({
        "p": p, "u": u, "gamma": gamma, "k": k, "regime": regime,
    });
    let params = match ModelParams::new(gamma, 1.0, k) {
        Ok(v) => v,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let j = p * u;
    let shock = match ShockData::new(p, p, j, j, 0.0) {
        Ok(v) => v,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let sys = match LinearWaveSystem::from_shock(&shock, params) {
        Ok(v) => v,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let verdict = match standing_existence_verdict_linear(&sys) {
        Ok(v) => v,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let predicted = format!("{verdict:?}");
    match loop_traversal_reduced(&sys, 1e-10, &traversal_options()) {
        Ok(traj) => {
            let level = sys
                .energy(traj.samples[0].1[0], traj.samples[0].1[1], EnergyRef::Plus)
                .unwrap_or(f64::NAN);
            let mut drift: f64 = 0.0;
            for &(_, st) in &traj.samples {
                let dev = sys
                    .energy(st[0], st[1], EnergyRef::Plus)
                    .map(|e| (e - level).abs())
                    .unwrap_or(f64::INFINITY);
                drift = drift.max(dev);
            }
            let closed = drift < 1e-6;
            CaseRecord {
                index,
                inputs,
                predicted,
                constructed: "loop".into(),
                pass: verdict == StandingExistence::Exists && closed,
                diagnostics: json!({"period": traj.t_end(), "level-drift": drift}),
                error: None,
            }
        }
        Err(Error::VerdictNotExists(reason)) => CaseRecord {
            index,
            inputs,
            predicted,
            constructed: "none".into(),
            pass: verdict != StandingExistence::Exists,
            diagnostics: json!({"refusal": reason}),
            error: None,
        },
        Err(e) => CaseRecord::hard(index, inputs, predicted, &e),
    }
}

fn score_travel(
    index: usize,
    p_plus: f64,
    p_minus: f64,
    s: f64,
    gamma: f64,
    mu: f64,
    k: f64,
) -> CaseRecord {
    let inputs = json!({
        "p-plus": p_plus, "p-minus": p_minus, "s": s, "gamma": gamma, "mu": mu, "k": k,
    });
    let adm = match admissible_branch(p_plus, p_minus, s, gamma) {
        Ok(v) => v,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let params = match ModelParams::new(gamma, mu, k) {
        Ok(v) => v,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let sys = match LinearWaveSystem::from_shock(&adm.shock, params) {
        Ok(v) => v,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let osc = match oscillation_criterion(&sys) {
        Ok(v) => v,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let predicted = format!(
        "front exists, {} approach",
        if osc.oscillatory { "spiral" } else { "monotone" }
    );
    match traveling_profile(&sys, &TravelingProfileOptions::default()) {
        Ok(prof) => {
            let radius = 1e-8 * sys.smaller_root().max(1.0);
            let residual_ok = prof.diagnostics.terminal_residual <= radius * 1.05;
            let a = &prof.audit;
            let audit_ok = a.confined
                && a.min_energy > -1e-9
                && a.max_energy_drop < 1e-9
                && a.max_descent_increase < 1e-9;
            let osc_ok = if osc.oscillatory {
                prof.diagnostics.oscillation_count >= 2
            } else {
                prof.diagnostics.oscillation_count <= 1
            };
            let last = prof.samples.last().expect("assembled profile has samples");
            let j_err = (last.j - adm.shock.j_plus).abs();
            let j_ok = j_err <= 1e-8 * adm.shock.j_plus.abs().max(1.0);
            CaseRecord {
                index,
                inputs,
                predicted,
                constructed: format!(
                    "front with {} slope crossings",
                    prof.diagnostics.oscillation_count
                ),
                pass: residual_ok && audit_ok && osc_ok && j_ok,
                diagnostics: json!({
                    "terminal-residual": prof.diagnostics.terminal_residual,
                    "oscillations": prof.diagnostics.oscillation_count,
                    "damping-ratio": osc.damping_rate / osc.threshold,
                    "reversed": prof.reversed,
                    "confined": a.confined,
                    "min-energy": a.min_energy,
                    "max-energy-drop": a.max_energy_drop,
                    "max-descent-increase": a.max_descent_increase,
                    "terminal-momentum-error": j_err,
                }),
                error: None,
            }
        }
        Err(e) => CaseRecord::hard(index, inputs, predicted, &e),
    }
}

fn score_zero_speed(
    index: usize,
    p_plus: f64,
    p_minus: f64,
    gamma: f64,
    k: f64,
    linear: bool,
    branch: u8,
) -> CaseRecord {
    let inputs = json!({
        "p-plus": p_plus, "p-minus": p_minus, "gamma": gamma, "k": k,
        "viscosity": if linear { "linear" } else { "nonlinear" },
        "branch": branch,
    });
    let params = match ModelParams::new(gamma, 1.0, k) {
        Ok(v) => v,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let predicted = "no zero-speed connection".to_string();
    let (cert, slope_small) = if linear {
        let branches = match momentum_branches(p_plus, p_minus, 0.0, gamma) {
            Ok(v) => v,
            Err(e) => return CaseRecord::hard(index, inputs, predicted, &e),
        };
        let shock = if branch == 1 { branches.shock_1() } else { branches.shock_2() };
        let sys = match LinearWaveSystem::from_shock(&shock, params) {
            Ok(v) => v,
            Err(e) => return CaseRecord::hard(index, inputs, predicted, &e),
        };
        let cert = match zero_speed_certificate_linear(&sys) {
            Ok(v) => v,
            Err(e) => return CaseRecord::hard(index, inputs, predicted, &e),
        };
        (cert, sys.f_prime(sys.smaller_root()))
    } else {
        let (sys, v_minus) = match StandingSystem::from_end_states(p_plus, p_minus, params) {
            Ok(v) => v,
            Err(e) => return CaseRecord::hard(index, inputs, predicted, &e),
        };
        let cert = match zero_speed_certificate_standing(&sys, v_minus) {
            Ok(v) => v,
            Err(e) => return CaseRecord::hard(index, inputs, predicted, &e),
        };
        (cert, sys.g_prime(sys.v_plus.min(v_minus)))
    };
    // the gap plus the sign pattern is the whole obstruction: the smaller
    // state is a strict energy maximum sitting strictly above the larger one
    let pass = cert.energy_gap > 0.0 && cert.small_root_is_energy_max && slope_small < 0.0;
    CaseRecord {
        index,
        inputs,
        predicted,
        constructed: "certificate".into(),
        pass,
        diagnostics: json!({
            "energy-gap": cert.energy_gap,
            "hessian-small": cert.hessian_small,
            "hessian-large": cert.hessian_large,
            "forcing-slope-small": slope_small,
        }),
        error: None,
    }
}

fn score_rh(index: usize, p_plus: f64, p_minus: f64, s: f64, gamma: f64) -> CaseRecord {
    let inputs = json!({"p-plus": p_plus, "p-minus": p_minus, "s": s, "gamma": gamma});
    let branches = match momentum_branches(p_plus, p_minus, s, gamma) {
        Ok(v) => v,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let params = match ModelParams::new(gamma, 1.0, 1.0) {
        Ok(v) => v,
        Err(e) => return CaseRecord::hard(index, inputs, "n/a", &e),
    };
    let flux = |p: f64, j: f64| j * j / p + p.powf(gamma);
    let mut worst_rel: f64 = 0.0;
    let mut admissible = 0usize;
    let mut types = Vec::new();
    for shock in [branches.shock_1(), branches.shock_2()] {
        let (r_mass, r_momentum) = rh_residual(&shock, gamma);
        // relative scales: the raw identities mix terms of order s*p and
        // flux, which reach 1e5 in this box, so absolute thresholds lie
        let scale_mass = s.abs() * (p_plus + p_minus) + 2.0 * branches.d;
        let scale_momentum = flux(p_plus, shock.j_plus).abs()
            + flux(p_minus, shock.j_minus).abs()
            + s.abs() * (shock.j_plus.abs() + shock.j_minus.abs());
        worst_rel = worst_rel
            .max(r_mass.abs() / scale_mass)
            .max(r_momentum.abs() / scale_momentum);
        let class = lax_classify(&shock, &params);
        if class.lax_type != LaxType::NotAdmissible {
            admissible += 1;
        }
        types.push(format!("{:?}", class.lax_type));
    }
    CaseRecord {
        index,
        inputs,
        predicted: "residuals vanish, exactly one admissible branch".into(),
        constructed: format!("lax types [{}, {}]", types[0], types[1]),
        pass: worst_rel < 1e-12 && admissible == 1,
        diagnostics: json!({
            "worst-relative-residual": worst_rel,
            "admissible-count": admissible,
        }),
        error: None,
    }
}
