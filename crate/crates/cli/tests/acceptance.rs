//! Acceptance gate: one test per criterion, each printing a single
//! `acceptance N (name): PASS/FAIL` line (visible with `--nocapture`) before
//! asserting. Tolerances are pinned here, not in helper code, so the gate is
//! the single place where "good enough" is defined.

use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qhd_cli::{run_sweep, SweepKind};
use qhd_core::{
    admissible_branch, homoclinic_loop_standing, lax_inequality_check, loop_traversal_reduced,
    loop_traversal_standing, oscillation_criterion, standing_profile, structural_points_standing,
    traveling_profile, EnergyRef, IntegrateOptions, LinearWaveSystem, ModelParams,
    StandingProfileOptions, StandingSystem, TravelingProfileOptions,
};

fn report(n: usize, name: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("acceptance {n} ({name}): {verdict} - {detail}");
    assert!(ok, "acceptance {n} ({name}) failed: {detail}");
}

fn subsonic_demo() -> StandingSystem {
    let params = ModelParams::new(1.5, 1.0, std::f64::consts::SQRT_2).unwrap();
    StandingSystem::new(2.0, 0.8, params).unwrap()
}

fn damped_demo() -> LinearWaveSystem {
    let adm = admissible_branch(1.2, 2.0, 1.0, 1.5).unwrap();
    let params = ModelParams::new(1.5, 0.3, std::f64::consts::SQRT_2).unwrap();
    LinearWaveSystem::from_shock(&adm.shock, params).unwrap()
}

fn tight() -> IntegrateOptions {
    IntegrateOptions { rtol: 1e-10, atol: 1e-12, ..Default::default() }
}

/// The closed standing loop: sampled points sit on the conserved level, the
/// integrated orbit reproduces the closed-form slope away from its turning
/// points, and the assembled pulse bottoms out exactly at the turning point.
#[test]
fn criterion_1_standing_loop_matches_closed_form() {
    let sys = subsonic_demo();

    let loop_pts = homoclinic_loop_standing(&sys, 400).unwrap();
    let mut level_dev: f64 = 0.0;
    for &(v, w) in &loop_pts {
        level_dev = level_dev.max(sys.energy(v, w).unwrap().abs());
    }

    let traj = loop_traversal_standing(&sys, 1e-10, &tight()).unwrap();
    let level = sys.potential(sys.v_plus).unwrap();
    let w_max = traj.samples.iter().map(|s| s.1[1].abs()).fold(0.0_f64, f64::max);
    let mut shape_dev: f64 = 0.0;
    for &(_, [v, w]) in &traj.samples {
        if w.abs() < 0.05 * w_max {
            continue; // the slope-from-level inversion is singular at turning points
        }
        let w_closed = w.signum() * (2.0 * (sys.potential(v).unwrap() - level)).max(0.0).sqrt();
        shape_dev = shape_dev.max((w - w_closed).abs());
    }

    let profile = standing_profile(&sys, &StandingProfileOptions::default()).unwrap();
    let mid = &profile.samples[profile.samples.len() / 2];
    let turning = structural_points_standing(&sys).unwrap().turning_point.unwrap();
    let core_dev = (mid.v - turning).abs();
    let core_level = (sys.potential(mid.v).unwrap() - level).abs();

    let ok = level_dev < 1e-10 && shape_dev < 1e-6 && core_dev < 1e-12 && core_level < 1e-12;
    report(
        1,
        "standing loop vs closed form",
        ok,
        &format!(
            "level dev {level_dev:.2e} (< 1e-10), orbit-vs-closed-form dev {shape_dev:.2e} \
             (< 1e-6), pulse core off turning point by {core_dev:.2e} on level gap \
             {core_level:.2e} (< 1e-12)"
        ),
    );
}

/// The damped traveling front: lands inside the requested stop ball, descends
/// monotonically by the audit, spirals as the damping ratio predicts, and
/// carries the admissible branch's momentum into the far field.
#[test]
fn criterion_2_traveling_front_accuracy() {
    let sys = damped_demo();
    let opts = TravelingProfileOptions {
        stop_radius: Some(5e-9),
        ..Default::default()
    };
    let prof = traveling_profile(&sys, &opts).unwrap();
    let osc = oscillation_criterion(&sys).unwrap();

    let residual_ok = prof.diagnostics.terminal_residual < 1e-8;
    let a = &prof.audit;
    let audit_ok =
        a.confined && a.min_energy > -1e-9 && a.max_energy_drop < 1e-9 && a.max_descent_increase < 1e-9;
    let spiral_ok = osc.oscillatory && prof.diagnostics.oscillation_count >= 2;

    // damping rate and its threshold, pinned to 50-digit reference values
    let rate_ok = (osc.damping_rate - 0.212_132_034_355_964_26).abs() < 1e-13
        && (osc.threshold - 1.738_261_228_841_377_1).abs() < 1e-12;

    let j_plus = -0.931_121_526_380_270_6;
    let shock_ok = (sys.momentum(sys.p_plus) - j_plus).abs() < 1e-12;
    let last = prof.samples.last().unwrap();
    let momentum_ok = (last.j - j_plus).abs() < 1e-8;

    // the output grid is centered where the density first crosses the midpoint
    let midpoint = 0.5 * (sys.p_plus + sys.p_minus);
    let dy = prof.samples[1].y - prof.samples[0].y;
    let crossing = prof
        .samples
        .windows(2)
        .find(|w| (w[0].p - midpoint) * (w[1].p - midpoint) <= 0.0)
        .map(|w| w[0].y)
        .unwrap_or(f64::NAN);
    let centered_ok = crossing.abs() <= 1.5 * dy;

    let ok = residual_ok && audit_ok && spiral_ok && rate_ok && shock_ok && momentum_ok && centered_ok;
    report(
        2,
        "traveling front accuracy",
        ok,
        &format!(
            "terminal residual {:.2e} (< 1e-8), audit clean {audit_ok}, {} slope crossings \
             (>= 2), damping rate {:.12} vs threshold {:.12}, terminal momentum error {:.2e} \
             (< 1e-8), midpoint crossing at y = {crossing:.3}",
            prof.diagnostics.terminal_residual,
            prof.diagnostics.oscillation_count,
            osc.damping_rate,
            osc.threshold,
            (last.j - j_plus).abs(),
        ),
    );
}

/// Both standing-wave sweeps: the existence trichotomy agrees with the
/// attempted construction on every randomized case, all four regimes.
#[test]
fn criterion_3_standing_sweeps_agree() {
    let nonlinear = run_sweep(SweepKind::StandingNonlinear, 200, 11, None);
    let linear = run_sweep(SweepKind::StandingLinear, 200, 12, None);
    let ok = nonlinear.pass_count == 200
        && nonlinear.hard_failures == 0
        && linear.pass_count == 200
        && linear.hard_failures == 0;
    report(
        3,
        "standing existence sweeps",
        ok,
        &format!(
            "nonlinear {}/200 (failing {:?}), linear {}/200 (failing {:?})",
            nonlinear.pass_count, nonlinear.failing_cases, linear.pass_count, linear.failing_cases
        ),
    );
}

/// Zero-speed certificates: on every randomized jump, both viscosity models
/// produce a strictly positive energy gap with the smaller state a strict
/// energy maximum.
#[test]
fn criterion_4_zero_speed_certificates() {
    let sweep = run_sweep(SweepKind::ZeroSpeed, 50, 13, None);
    let ok = sweep.pass_count == 50 && sweep.hard_failures == 0;
    report(
        4,
        "zero-speed certificates",
        ok,
        &format!("{}/50 (failing {:?})", sweep.pass_count, sweep.failing_cases),
    );
}

/// Jump algebra at scale: residuals vanish relative to their natural scales
/// and exactly one branch is admissible on 10000 random jumps; the two
/// admissibility margins are strictly positive across the (ratio, gamma) box.
#[test]
fn criterion_5_jump_conditions_and_admissibility() {
    let sweep = run_sweep(SweepKind::Rh, 10_000, 14, None);
    let sweep_ok = sweep.pass_count == 10_000 && sweep.hard_failures == 0;

    let mut min_margin = f64::INFINITY;
    for i in 0..100 {
        let r = 1.0 + 9.0 * (i + 1) as f64 / 100.0;
        for j in 0..100 {
            let gamma = 1.0 + 2.0 * j as f64 / 99.0;
            let (m1, m2) = lax_inequality_check(r, gamma).unwrap();
            min_margin = min_margin.min(m1).min(m2);
        }
    }
    let margins_ok = min_margin > 0.0;

    report(
        5,
        "jump conditions and admissibility",
        sweep_ok && margins_ok,
        &format!(
            "{}/10000 random jumps (failing {:?}), smallest admissibility margin {min_margin:.3e} (> 0)",
            sweep.pass_count, sweep.failing_cases
        ),
    );
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| lo * (hi / lo).powf(j as f64 / (n - 1) as f64)).collect()
}

/// Worst relative deviation between an analytic derivative and the central
/// difference of the function it claims to differentiate.
fn fd_dev(xs: &[f64], analytic: &dyn Fn(f64) -> f64, direct: &dyn Fn(f64) -> f64) -> f64 {
    let mag = xs.iter().map(|&x| analytic(x).abs()).fold(0.0_f64, f64::max);
    let floor = (1e-9 * mag).max(1e-300);
    xs.iter()
        .map(|&x| {
            let h = 6e-6 * x;
            let fd = (direct(x + h) - direct(x - h)) / (2.0 * h);
            let a = analytic(x);
            (fd - a).abs() / a.abs().max(floor)
        })
        .fold(0.0_f64, f64::max)
}

/// Every analytic derivative in the two forcing families agrees with a finite
/// difference of the function one level down, over 20 randomized systems.
#[test]
fn criterion_6_derivatives_match_fd_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst: f64 = 0.0;

    for i in 0..10 {
        let p_small: f64 = rng.gen_range(0.4..2.0);
        let ratio: f64 = rng.gen_range(1.3..3.0);
        let s: f64 = rng.gen_range(0.5..2.0);
        let gamma = if i % 3 == 0 { 1.0 } else { rng.gen_range(1.0..2.8) };
        let k: f64 = rng.gen_range(0.7..2.0);
        let mu: f64 = rng.gen_range(0.2..2.0);
        let adm = admissible_branch(p_small, p_small * ratio, s, gamma).unwrap();
        let sys =
            LinearWaveSystem::from_shock(&adm.shock, ModelParams::new(gamma, mu, k).unwrap())
                .unwrap();
        let grid = log_grid(0.3 * sys.smaller_root(), 3.0 * sys.larger_root(), 100);
        let k2 = k * k;
        worst = worst
            .max(fd_dev(&grid, &|x| sys.f_prime(x), &|x| sys.f(x)))
            .max(fd_dev(&grid, &|x| sys.f_second(x), &|x| sys.f_prime(x)))
            .max(fd_dev(
                &grid,
                &|x| 2.0 * sys.f(x) / (k2 * x * x),
                &|x| sys.potential(x).unwrap(),
            ));
    }

    for i in 0..10 {
        let rho: f64 = rng.gen_range(0.5..4.0);
        let gamma = if i % 3 == 0 { 1.0 } else { rng.gen_range(1.0..2.8) };
        let k: f64 = rng.gen_range(0.7..2.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let t: f64 = rng.gen_range(0.2..0.85);
        let cs = (gamma * rho.powf(gamma - 1.0)).sqrt();
        let params = ModelParams::new(gamma, 1.0, k).unwrap();
        let sys = StandingSystem::new(rho, sign * t * cs, params).unwrap();
        let grid = log_grid(0.3 * sys.v_plus, 3.0 * sys.v_plus, 100);
        let k2 = k * k;
        worst = worst
            .max(fd_dev(&grid, &|x| sys.g_prime(x), &|x| sys.g(x)))
            .max(fd_dev(&grid, &|x| sys.g_second(x), &|x| sys.g_prime(x)))
            .max(fd_dev(&grid, &|x| sys.g(x) / k2, &|x| sys.potential(x).unwrap()));
    }

    report(
        6,
        "derivatives vs finite-difference oracles",
        worst < 1e-6,
        &format!("worst relative deviation {worst:.2e} over 20 systems x 3 identities (< 1e-6)"),
    );
}

/// Energy accounting: the conservative loops hold their level to 1e-8, and
/// along the damped shooting orbit the measured energy production rate
/// matches the closed-form dissipation law step by step.
#[test]
fn criterion_7_energy_accounting() {
    // conservative: both loop traversals stay on their seed level
    let std_sys = subsonic_demo();
    let traj = loop_traversal_standing(&std_sys, 1e-10, &tight()).unwrap();
    let level0 = std_sys.energy(traj.samples[0].1[0], traj.samples[0].1[1]).unwrap();
    let mut drift_standing: f64 = 0.0;
    for &(_, [v, w]) in &traj.samples {
        drift_standing = drift_standing.max((std_sys.energy(v, w).unwrap() - level0).abs());
    }

    let red_sys = damped_demo();
    let traj = loop_traversal_reduced(&red_sys, 1e-10, &tight()).unwrap();
    let level0 = red_sys.energy(traj.samples[0].1[0], traj.samples[0].1[1], EnergyRef::Plus).unwrap();
    let mut drift_reduced: f64 = 0.0;
    for &(_, [p, q]) in &traj.samples {
        drift_reduced =
            drift_reduced.max((red_sys.energy(p, q, EnergyRef::Plus).unwrap() - level0).abs());
    }

    // damped: finite-difference energy increments along the shooting orbit
    // against the production rate averaged over the step (Simpson, with the
    // midpoint from dense output). The rate has quadratic zeros where the
    // slope crosses zero, so a pointwise midpoint comparison is singular
    // there; the Simpson average is exact for those local parabolas.
    let opts = TravelingProfileOptions {
        integrate: IntegrateOptions { max_step: Some(0.02), ..tight() },
        ..Default::default()
    };
    let prof = traveling_profile(&red_sys, &opts).unwrap();
    let traj = &prof.trajectory;
    let rates: Vec<(f64, f64)> = traj
        .samples
        .windows(2)
        .filter_map(|w| {
            let (y0, [p0, q0]) = w[0];
            let (y1, [p1, q1]) = w[1];
            let mid = traj.eval(0.5 * (y0 + y1))?;
            let fd = (red_sys.energy(p1, q1, EnergyRef::Minus).unwrap()
                - red_sys.energy(p0, q0, EnergyRef::Minus).unwrap())
                / (y1 - y0);
            let avg = (red_sys.energy_rate(p0, q0)
                + 4.0 * red_sys.energy_rate(mid[0], mid[1])
                + red_sys.energy_rate(p1, q1))
                / 6.0;
            Some((fd, avg))
        })
        .collect();
    let max_rate = rates.iter().map(|r| r.1.abs()).fold(0.0_f64, f64::max);
    let mut rate_dev: f64 = 0.0;
    let mut compared = 0usize;
    for &(fd, rate) in &rates {
        if rate.abs() >= 1e-3 * max_rate {
            rate_dev = rate_dev.max((fd - rate).abs() / rate.abs());
            compared += 1;
        }
    }

    let ok = drift_standing < 1e-8 && drift_reduced < 1e-8 && rate_dev < 1e-4 && compared > 100;
    report(
        7,
        "energy accounting",
        ok,
        &format!(
            "loop level drift {drift_standing:.2e} / {drift_reduced:.2e} (< 1e-8), dissipation \
             rate deviation {rate_dev:.2e} over {compared} steps (< 1e-4)"
        ),
    );
}

/// The sweep report is byte-identical no matter how many workers run it.
#[test]
fn criterion_8_reports_are_thread_count_invariant() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&dir_a, "1"), (&dir_b, "4")] {
        let out = Command::new(env!("CARGO_BIN_EXE_qhd-dsw"))
            .args([
                "sweep", "rh", "--cases", "300", "--seed", "5", "--out",
                dir.path().to_str().unwrap(),
            ])
            .env("QHD_DSW_THREADS", threads)
            .output()
            .expect("binary launches");
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir_a.path().join("sweep_report.json")).unwrap();
    let b = std::fs::read(dir_b.path().join("sweep_report.json")).unwrap();
    let ok = a == b;
    report(
        8,
        "thread-count invariance",
        ok,
        &format!("300-case reports, 1 vs 4 workers: {} vs {} bytes, identical = {ok}", a.len(), b.len()),
    );
}
