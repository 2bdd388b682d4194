//! Orbit construction on top of the structural analysis: closed-form
//! homoclinic loops and vacuum separatrices, shooting heteroclinic
//! connections for the damped traveling system, assembled standing and
//! traveling profiles with exact linear tails, descent audits, and full
//! loop traversals for conservation checks.
//!
//! A finite-tolerance integrator cannot ride an orbit into a hyperbolic
//! rest point: any drift off the invariant manifold grows like e^(λΔy) and
//! eventually throws the numerical orbit off along the unstable direction.
//! Profiles are therefore integrated only up to a stop ball around the far
//! state and continued with the exact solution of the linearized system;
//! the splice error is quadratic in the stop radius and sits far below the
//! integration tolerance for the defaults used here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{EnergyRef, LinearWaveSystem};
use crate::model::ShockData;
use crate::ode::{
    integrate, Event, EventAction, EventDirection, IntegrateOptions, Termination, Trajectory,
};
use crate::roots::bracketed_root;
use crate::standing::StandingSystem;
use crate::structure::{
    equilibrium_full, equilibrium_standing, standing_existence_verdict,
    standing_existence_verdict_linear, structural_points_linear, structural_points_standing,
    EquilibriumKind, StandingExistence, StructuralLayout,
};

/// Hard cap on the integration span of any single orbit; hitting it without
/// reaching the stop condition is a convergence failure, not a result.
const Y_BUDGET: f64 = 1e4;
/// Tail samples are extended until the residual decays to this relative
/// floor.
const TAIL_FLOOR: f64 = 1e-13;

/// One sentence on each existence verdict, for error messages and reports.
pub fn existence_reason(verdict: StandingExistence) -> &'static str {
    match verdict {
        StandingExistence::Exists => "a homoclinic loop exists",
        StandingExistence::NoneZeroVelocity => {
            "the far-field velocity is zero, so the level set runs into vacuum instead of closing"
        }
        StandingExistence::NoneSonic => "the far field is sonic and the two rest states merge",
        StandingExistence::NoneSupersonic => {
            "the far field is supersonic, so the far state is a center rather than a saddle"
        }
    }
}

/// The standing homoclinic loop, sampled in closed form from the conserved
/// energy: W = ±√(2(G(V) − G(V⁺))). Points are ordered the way the orbit
/// traverses them in forward y: saddle → lower branch → turning point →
/// upper branch → saddle. Rounding can push the radicand a hair below zero
/// near the endpoints; it is clamped at zero there.
pub fn homoclinic_loop_standing(
    sys: &StandingSystem,
    n_per_branch: usize,
) -> Result<Vec<(f64, f64)>> {
    let verdict = standing_existence_verdict(sys);
    if verdict != StandingExistence::Exists {
        return Err(Error::VerdictNotExists(existence_reason(verdict).to_string()));
    }
    let pts = structural_points_standing(sys)?;
    let v_plus = pts.reference_root;
    let v_star = pts.turning_point.expect("loop layout carries a turning point");
    let level = sys.potential(v_plus)?;
    let n = n_per_branch.max(2);
    let mut out = Vec::with_capacity(2 * n + 1);
    let speed = |v: f64| -> Result<f64> {
        Ok((2.0 * (sys.potential(v)? - level)).max(0.0).sqrt())
    };
    for j in 0..=n {
        let v = v_plus + (v_star - v_plus) * j as f64 / n as f64;
        out.push((v, -speed(v)?));
    }
    for j in (0..n).rev() {
        let v = v_plus + (v_star - v_plus) * j as f64 / n as f64;
        out.push((v, speed(v)?));
    }
    Ok(out)
}

/// The reduced (undamped) traveling loop through the saddle, sampled in
/// closed form: Q = ±P·√(2(F(P) − F(saddle))). Same ordering and clamping
/// conventions as the standing loop.
pub fn homoclinic_loop_reduced(sys: &LinearWaveSystem, n_per_branch: usize) -> Result<Vec<(f64, f64)>> {
    let pts = structural_points_linear(sys)?;
    if pts.layout != StructuralLayout::LoopInterior {
        return Err(Error::VerdictNotExists(format!(
            "no closed loop: the forcing layout is {:?}",
            pts.layout
        )));
    }
    let saddle = pts.reference_root;
    let turning = pts.turning_point.expect("loop layout carries a turning point");
    let level = sys.potential(saddle)?;
    let n = n_per_branch.max(2);
    let mut out = Vec::with_capacity(2 * n + 1);
    let speed = |p: f64| -> Result<f64> {
        Ok(p * (2.0 * (sys.potential(p)? - level)).max(0.0).sqrt())
    };
    for j in 0..=n {
        let p = saddle + (turning - saddle) * j as f64 / n as f64;
        out.push((p, -speed(p)?));
    }
    for j in (0..n).rev() {
        let p = saddle + (turning - saddle) * j as f64 / n as f64;
        out.push((p, speed(p)?));
    }
    Ok(out)
}

/// One branch of the level set of H₁ through the far state,
/// W = ±√(2(G(V) − G(V⁺))), sampled on [v_lo, v_hi] in ascending V. Where
/// rounding pushes the radicand a hair below zero it is clamped. This is the
/// raw sampler behind the separatrix and sonic-cusp pictures; it does not
/// check that the range stays on one side of the far state.
pub fn level_branch_standing(
    sys: &StandingSystem,
    v_lo: f64,
    v_hi: f64,
    n: usize,
    upper: bool,
) -> Result<Vec<(f64, f64)>> {
    if !(v_lo > 0.0 && v_lo < v_hi) {
        return Err(Error::InvalidParams(format!(
            "level branch needs 0 < v_lo < v_hi, got [{v_lo}, {v_hi}]"
        )));
    }
    let level = sys.potential(sys.v_plus)?;
    let sgn = if upper { 1.0 } else { -1.0 };
    let n = n.max(2);
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let v = v_lo + (v_hi - v_lo) * j as f64 / n as f64;
        let w = sgn * (2.0 * (sys.potential(v)? - level)).max(0.0).sqrt();
        out.push((v, w));
    }
    Ok(out)
}

/// Upper branch of the level set through the far state on [v_min, V⁺]. For a
/// zero-velocity far field this is the separatrix running into vacuum; the
/// lower branch is its mirror image in W.
pub fn separatrix_branch_standing(
    sys: &StandingSystem,
    v_min: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    if !(v_min < sys.v_plus) {
        return Err(Error::InvalidParams(format!(
            "separatrix range needs 0 < v_min < {}, got {v_min}",
            sys.v_plus
        )));
    }
    level_branch_standing(sys, v_min, sys.v_plus, n, true)
}

/// exp(A·dt)·x0 for A = [[0, 1], [q, −r]], the linearization shared by all
/// the planar systems here, in closed form for every eigenvalue pattern.
fn linear_propagate(q: f64, r: f64, x0: [f64; 2], dt: f64) -> [f64; 2] {
    let ax = [x0[1], q * x0[0] - r * x0[1]];
    let disc = r * r + 4.0 * q;
    let mut out = [0.0; 2];
    if disc < 0.0 {
        let alpha = -r / 2.0;
        let om = (-disc).sqrt() / 2.0;
        let e = (alpha * dt).exp();
        let (s, c) = (om * dt).sin_cos();
        for i in 0..2 {
            out[i] = e * (c * x0[i] + s / om * (ax[i] - alpha * x0[i]));
        }
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        let l1 = (-r + sq) / 2.0;
        let l2 = (-r - sq) / 2.0;
        let e1 = (l1 * dt).exp();
        let e2 = (l2 * dt).exp();
        for i in 0..2 {
            out[i] = (e1 * (ax[i] - l2 * x0[i]) - e2 * (ax[i] - l1 * x0[i])) / (l1 - l2);
        }
    } else {
        let l = -r / 2.0;
        let e = (l * dt).exp();
        for i in 0..2 {
            out[i] = e * (x0[i] + dt * (ax[i] - l * x0[i]));
        }
    }
    out
}

/// Shared diagnostics for assembled profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileDiagnostics {
    /// Euclidean distance in the phase plane from the last integrated state
    /// to the far state, at the hand-off to the linear tail.
    pub terminal_residual: f64,
    /// Slope zero-crossings along the integrated orbit; spiraling
    /// approaches produce one per half-turn, monotone ones none.
    pub oscillation_count: usize,
    /// Where integration handed off to the tail, in output coordinates.
    pub stop_y: f64,
    /// Slowest decay rate of the appended tail.
    pub tail_rate: f64,
    /// Standing profiles: largest |H₁| seen along the integrated orbit.
    /// Traveling profiles: largest single-step drop of the otherwise
    /// nondecreasing energy (0 when monotone to rounding).
    pub energy_drift: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandingSample {
    pub y: f64,
    /// Amplitude V = √ρ.
    pub v: f64,
    /// Slope W = V′.
    pub w: f64,
    /// Velocity U = −C₁/V².
    pub u: f64,
}

#[derive(Debug)]
pub struct StandingProfile {
    /// The assembled profile on an even y-grid, symmetric about 0.
    pub samples: Vec<StandingSample>,
    /// The integrated upper half-orbit (y ≥ 0, W ≥ 0), turning point to
    /// stop ball.
    pub trajectory: Trajectory,
    pub diagnostics: ProfileDiagnostics,
}

#[derive(Debug, Clone, Copy)]
pub struct StandingProfileOptions {
    /// Half-width of the output grid; `None` extends the tail down to the
    /// residual floor.
    pub span: Option<f64>,
    /// Output rows (bumped to the next odd count so the grid contains 0).
    pub n_samples: usize,
    /// Stop-ball radius around the saddle; `None` means 1e-5·max(1, V⁺).
    /// The default is deliberately coarser than the heteroclinic one: a
    /// conservative orbit only transits the saddle's neighborhood, and the
    /// integration drift off the conserved level at the default tolerances
    /// already holds the closest approach near 1e-6; a tighter ball is
    /// never entered.
    pub stop_radius: Option<f64>,
    pub integrate: IntegrateOptions,
}

impl Default for StandingProfileOptions {
    fn default() -> Self {
        Self { span: None, n_samples: 2001, stop_radius: None, integrate: IntegrateOptions::default() }
    }
}

/// The standing profile through the homoclinic loop: seeded at the turning
/// point (the symmetry axis), integrated to the stop ball around the far
/// state, continued with the saddle's exponential tail, and mirrored onto
/// y < 0.
pub fn standing_profile(
    sys: &StandingSystem,
    opts: &StandingProfileOptions,
) -> Result<StandingProfile> {
    let verdict = standing_existence_verdict(sys);
    if verdict != StandingExistence::Exists {
        return Err(Error::VerdictNotExists(existence_reason(verdict).to_string()));
    }
    let pts = structural_points_standing(sys)?;
    let v_plus = pts.reference_root;
    let v_star = pts.turning_point.expect("loop layout carries a turning point");
    let lambda = equilibrium_standing(sys, v_plus)?.eigenvalues[0].re;
    let rhs = |_y: f64, s: [f64; 2]| sys.rhs(s);
    let half = mirrored_homoclinic(&rhs, v_star, v_plus, lambda, opts)?;

    let mut samples = Vec::with_capacity(2 * half.right.len() - 1);
    for &(y, [v, w]) in half.right.iter().skip(1).rev() {
        samples.push(StandingSample { y: -y, v, w: -w, u: sys.velocity(v) });
    }
    for &(y, [v, w]) in &half.right {
        samples.push(StandingSample { y, v, w, u: sys.velocity(v) });
    }

    let mut energy_drift: f64 = 0.0;
    for &(_y, s) in &half.trajectory.samples {
        energy_drift = energy_drift.max(sys.energy(s[0], s[1])?.abs());
    }
    let diagnostics = half.diagnostics(energy_drift);
    Ok(StandingProfile { samples, trajectory: half.trajectory, diagnostics })
}

/// Linear-viscosity standing wave: the same solitary-pulse construction on
/// the (P, Q) system, which is conservative at zero speed. The momentum
/// profile is the constant J = −A.
#[derive(Debug)]
pub struct StandingProfileLinear {
    pub samples: Vec<TravelingSample>,
    pub trajectory: Trajectory,
    pub diagnostics: ProfileDiagnostics,
}

pub fn standing_profile_linear(
    sys: &LinearWaveSystem,
    opts: &StandingProfileOptions,
) -> Result<StandingProfileLinear> {
    let verdict = standing_existence_verdict_linear(sys)?;
    if verdict != StandingExistence::Exists {
        return Err(Error::VerdictNotExists(existence_reason(verdict).to_string()));
    }
    let pts = structural_points_linear(sys)?;
    let p_plus = pts.reference_root;
    let turning = pts.turning_point.expect("loop layout carries a turning point");
    let lambda = equilibrium_full(sys, p_plus)?.eigenvalues[0].re;
    let rhs = |_y: f64, s: [f64; 2]| sys.rhs_full(s);
    let half = mirrored_homoclinic(&rhs, turning, p_plus, lambda, opts)?;

    let mut samples = Vec::with_capacity(2 * half.right.len() - 1);
    for &(y, [p, q]) in half.right.iter().skip(1).rev() {
        samples.push(TravelingSample { y: -y, p, q: -q, j: sys.momentum(p) });
    }
    for &(y, [p, q]) in &half.right {
        samples.push(TravelingSample { y, p, q, j: sys.momentum(p) });
    }

    let mut energy_drift: f64 = 0.0;
    for &(_y, s) in &half.trajectory.samples {
        energy_drift = energy_drift.max(sys.energy(s[0], s[1], EnergyRef::Plus)?.abs());
    }
    let diagnostics = half.diagnostics(energy_drift);
    Ok(StandingProfileLinear { samples, trajectory: half.trajectory, diagnostics })
}

/// Right half of a symmetric homoclinic pulse: integrate the conservative
/// field from the turning point (a regular point sitting exactly on the
/// orbit) until the stop ball around the saddle, then continue with the
/// saddle's exponential tail. The caller mirrors by the reversibility
/// symmetry (y, ·′) → (−y, −·′).
struct MirroredHalf {
    right: Vec<(f64, [f64; 2])>,
    trajectory: Trajectory,
    stop_y: f64,
    lambda: f64,
    terminal_residual: f64,
    oscillation_count: usize,
    span: f64,
}

impl MirroredHalf {
    fn diagnostics(&self, energy_drift: f64) -> ProfileDiagnostics {
        ProfileDiagnostics {
            terminal_residual: self.terminal_residual,
            oscillation_count: self.oscillation_count,
            stop_y: self.stop_y,
            tail_rate: self.lambda,
            energy_drift,
            y_min: -self.span,
            y_max: self.span,
        }
    }
}

fn mirrored_homoclinic(
    rhs: &dyn Fn(f64, [f64; 2]) -> [f64; 2],
    turning: f64,
    saddle: f64,
    lambda: f64,
    opts: &StandingProfileOptions,
) -> Result<MirroredHalf> {
    let radius = opts.stop_radius.unwrap_or(1e-5 * saddle.max(1.0));
    let slope_zero = Event {
        name: "slope zero",
        func: Box::new(|_y, s: [f64; 2]| s[1]),
        action: EventAction::Record,
        direction: EventDirection::Any,
    };
    let proximity = Event {
        name: "saddle approach",
        func: Box::new(move |_y, s: [f64; 2]| (s[0] - saddle).hypot(s[1]) - radius),
        action: EventAction::Stop,
        direction: EventDirection::Falling,
    };
    let traj =
        integrate(rhs, 0.0, Y_BUDGET, [turning, 0.0], &[slope_zero, proximity], &opts.integrate)?;
    if traj.terminated_by != Termination::StoppedByEvent(1) {
        let end = traj.final_state();
        return Err(Error::NoConvergence {
            y: traj.t_end(),
            residual: (end[0] - saddle).hypot(end[1]),
        });
    }

    let stop_y = traj.t_end();
    let [x_stop, slope_stop] = traj.final_state();
    let amp = x_stop - saddle;
    let floor = TAIL_FLOOR * saddle.max(1.0);
    let tail_span = ((amp.abs() / floor).ln() / lambda).max(0.0);
    let span = opts.span.unwrap_or(stop_y + tail_span);

    // uniform grid over [0, span]; the y = 0 row is the turning point itself
    let n = (opts.n_samples | 1).max(3);
    let half = (n - 1) / 2;
    let mut right = Vec::with_capacity(half + 1);
    for j in 0..=half {
        let y = span * j as f64 / half as f64;
        let state = if y <= stop_y {
            traj.eval(y).expect("inside the integrated span")
        } else {
            let x = saddle + amp * (-lambda * (y - stop_y)).exp();
            [x, lambda * (saddle - x)]
        };
        right.push((y, state));
    }

    let oscillation_count = traj.events.iter().filter(|e| e.event == 0).count();
    Ok(MirroredHalf {
        right,
        trajectory: traj,
        stop_y,
        lambda,
        terminal_residual: (x_stop - saddle).hypot(slope_stop),
        oscillation_count,
        span,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TravelingSample {
    pub y: f64,
    pub p: f64,
    /// Slope Q = P′.
    pub q: f64,
    /// Momentum J = sP − A.
    pub j: f64,
}

/// Descent-function and energy bookkeeping along a shooting orbit: the
/// quantities LaSalle's argument says must be monotone or bounded, measured
/// on the actual numerical orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LasalleAudit {
    /// Largest single-step rise of the descent function (≤ rounding when
    /// the orbit behaves).
    pub max_descent_increase: f64,
    /// Largest single-step drop of the nondecreasing energy.
    pub max_energy_drop: f64,
    /// Smallest energy along the orbit, relative to the saddle level
    /// (mathematically ≥ 0).
    pub min_energy: f64,
    pub state_min: f64,
    pub state_max: f64,
    /// State stayed inside [turning point, saddle] up to a 1e-9 relative
    /// allowance.
    pub confined: bool,
    /// Euclidean phase-plane distance of the final sample to the attracting
    /// state.
    pub terminal_residual: f64,
}

#[derive(Debug)]
pub struct TravelingProfile {
    /// The assembled front on an even y-grid, y = 0 at the first crossing
    /// of the midpoint density.
    pub samples: Vec<TravelingSample>,
    /// The shooting integration. For a reversed construction this lives in
    /// the reversed coordinates (ỹ = −y, η = −Q) and certifies the same
    /// orbit.
    pub trajectory: Trajectory,
    /// Whether the orbit was built through the spatial reversal.
    pub reversed: bool,
    pub audit: LasalleAudit,
    pub diagnostics: ProfileDiagnostics,
}

#[derive(Debug, Clone, Copy)]
pub struct TravelingProfileOptions {
    /// Output window (y_min, y_max); `None` pads both tails to the residual
    /// floor.
    pub span: Option<(f64, f64)>,
    pub n_samples: usize,
    /// Seed displacement along the unit unstable eigenvector; `None` means
    /// 1e-7·P⁻ — small enough that the linearization error sits below the
    /// integration tolerance, large enough to escape the saddle in O(1/λ₁).
    pub delta: Option<f64>,
    /// Stop-ball radius around the attracting state, in the (P, Q)
    /// Euclidean metric; `None` means 1e-8·max(1, P⁺).
    pub stop_radius: Option<f64>,
    /// Give up (with the terminal residual) if the ball is not reached by
    /// this y.
    pub y_max: f64,
    pub integrate: IntegrateOptions,
}

impl Default for TravelingProfileOptions {
    fn default() -> Self {
        Self {
            span: None,
            n_samples: 2001,
            delta: None,
            stop_radius: None,
            y_max: 1e4,
            integrate: IntegrateOptions::default(),
        }
    }
}

/// The viscous front connecting the two end states, when the propagation
/// direction and the end-state energy levels allow one. A front exists in
/// exactly two shapes: compressive (P⁺ < P⁻) moving right, which is shot
/// directly off the saddle's unstable manifold, and its mirror image
/// (P⁺ > P⁻ moving left), built by integrating the spatially reversed
/// system and mapping back. The remaining combinations contradict the
/// monotone energy and are refused with a verdict, not a failure.
pub fn traveling_profile(
    sys: &LinearWaveSystem,
    opts: &TravelingProfileOptions,
) -> Result<TravelingProfile> {
    if sys.p_plus == sys.p_minus {
        return Err(Error::EqualEndStates(sys.p_plus));
    }
    if sys.s == 0.0 {
        return Err(Error::VerdictNotExists(
            "zero-speed fronts are ruled out: both end states are rest points of a conserved \
             energy on different levels"
                .into(),
        ));
    }
    let compressive = sys.p_minus > sys.p_plus;
    if sys.s > 0.0 && compressive {
        shoot_and_assemble(sys, opts, false)
    } else if sys.s < 0.0 && !compressive {
        let reversed = ShockData {
            p_plus: sys.p_minus,
            p_minus: sys.p_plus,
            j_plus: -(sys.s * sys.p_minus - sys.a),
            j_minus: -(sys.s * sys.p_plus - sys.a),
            s: -sys.s,
        };
        let rev_sys = LinearWaveSystem::from_shock(&reversed, sys.params)?;
        let mut profile = shoot_and_assemble(&rev_sys, opts, true)?;
        for smp in &mut profile.samples {
            smp.y = -smp.y;
            smp.q = -smp.q;
            smp.j = sys.momentum(smp.p);
        }
        profile.samples.reverse();
        let d = &mut profile.diagnostics;
        d.stop_y = -d.stop_y;
        let (lo, hi) = (-d.y_max, -d.y_min);
        d.y_min = lo;
        d.y_max = hi;
        Ok(profile)
    } else {
        Err(Error::VerdictNotExists(
            "energy is monotone along orbits in this propagation direction, but the end states' \
             levels are ordered the other way; no connecting orbit exists"
                .into(),
        ))
    }
}

/// First time the state's first component crosses `level` along the
/// trajectory.
fn first_crossing(traj: &Trajectory, level: f64) -> Result<f64> {
    for w in traj.samples.windows(2) {
        let (t0, s0) = w[0];
        let (t1, s1) = w[1];
        let g0 = s0[0] - level;
        let g1 = s1[0] - level;
        if g0 == 0.0 {
            return Ok(t0);
        }
        if g0 * g1 <= 0.0 {
            return bracketed_root(
                |t| traj.eval(t).map(|s| s[0] - level).unwrap_or(f64::NAN),
                t0,
                t1,
                1e-14,
            );
        }
    }
    Err(Error::BracketSearchFailed(format!("the orbit never crosses {level}")))
}

/// Case-(i)-shaped shooting: the saddle is the larger root at the minus
/// end, sμ > 0, and the orbit falls forward into the smaller root.
fn shoot_and_assemble(
    sys: &LinearWaveSystem,
    opts: &TravelingProfileOptions,
    reversed: bool,
) -> Result<TravelingProfile> {
    let saddle = sys.p_minus;
    let target = sys.p_plus;
    let rep = equilibrium_full(sys, saddle)?;
    if rep.kind != EquilibriumKind::Saddle {
        return Err(Error::InvalidParams(format!(
            "expected a saddle at the minus state {saddle}"
        )));
    }
    let lambda1 = rep.eigenvalues[0].re;
    let [v1, _] = rep.eigenvectors.expect("a saddle has a real eigenpair");
    // v1 points down in both components: into the loop interior
    let norm = v1[0].hypot(v1[1]);
    let delta = opts.delta.unwrap_or(1e-7 * saddle);
    let seed = [saddle + delta * v1[0] / norm, delta * v1[1] / norm];

    let t_rep = equilibrium_full(sys, target)?;
    let radius = opts.stop_radius.unwrap_or(1e-8 * target.max(1.0));
    let slope_zero = Event {
        name: "slope zero",
        func: Box::new(|_y, s: [f64; 2]| s[1]),
        action: EventAction::Record,
        direction: EventDirection::Any,
    };
    let proximity = Event {
        name: "far-state approach",
        func: Box::new(move |_y, s: [f64; 2]| (s[0] - target).hypot(s[1]) - radius),
        action: EventAction::Stop,
        direction: EventDirection::Falling,
    };
    let rhs = |_y: f64, s: [f64; 2]| sys.rhs_full(s);
    let traj = integrate(&rhs, 0.0, opts.y_max, seed, &[slope_zero, proximity], &opts.integrate)?;
    if traj.terminated_by != Termination::StoppedByEvent(1) {
        let end = traj.final_state();
        return Err(Error::NoConvergence {
            y: traj.t_end(),
            residual: (end[0] - target).hypot(end[1]),
        });
    }
    let stop_t = traj.t_end();
    let x_stop = traj.final_state();
    let oscillation_count = traj.events.iter().filter(|e| e.event == 0).count();
    let audit = lasalle_audit(sys, &traj)?;

    // center the output: y = 0 at the first crossing of the midpoint
    let shift = first_crossing(&traj, 0.5 * (saddle + target))?;

    let k2 = sys.params.k * sys.params.k;
    let q_lin = 2.0 * t_rep.forcing_slope / k2;
    let r_lin = 2.0 * sys.s * sys.params.mu / k2;
    let disc_lin = r_lin * r_lin + 4.0 * q_lin;
    let decay =
        if disc_lin < 0.0 { r_lin / 2.0 } else { (r_lin - disc_lin.sqrt()) / 2.0 };
    let floor = TAIL_FLOOR * saddle.max(1.0);
    let left_pad = ((delta / floor).ln() / lambda1).max(0.0);
    let right_pad = ((radius / floor).ln() / decay).max(0.0);
    let (y_min, y_max) =
        opts.span.unwrap_or((-shift - left_pad, stop_t - shift + right_pad));
    if !(y_max > y_min) {
        return Err(Error::InvalidParams(format!(
            "empty output window [{y_min}, {y_max}]"
        )));
    }

    let n = opts.n_samples.max(2);
    let mut samples = Vec::with_capacity(n);
    for jdx in 0..n {
        let y = y_min + (y_max - y_min) * jdx as f64 / (n - 1) as f64;
        let t = y + shift;
        let st = if t < 0.0 {
            // saddle-side tail: the seed sits on the unstable eigenvector,
            // so the linear solution is a pure exponential
            let e = (lambda1 * t).exp();
            [saddle + (seed[0] - saddle) * e, seed[1] * e]
        } else if t <= stop_t {
            traj.eval(t).expect("inside the integrated span")
        } else {
            let dx = linear_propagate(
                q_lin,
                r_lin,
                [x_stop[0] - target, x_stop[1]],
                t - stop_t,
            );
            [target + dx[0], dx[1]]
        };
        samples.push(TravelingSample { y, p: st[0], q: st[1], j: sys.momentum(st[0]) });
    }

    let mut max_drop: f64 = 0.0;
    let mut prev: Option<f64> = None;
    for &(_y, s) in &traj.samples {
        let h = sys.energy(s[0], s[1], EnergyRef::Minus)?;
        if let Some(ph) = prev {
            max_drop = max_drop.max(ph - h);
        }
        prev = Some(h);
    }

    let diagnostics = ProfileDiagnostics {
        terminal_residual: (x_stop[0] - target).hypot(x_stop[1]),
        oscillation_count,
        stop_y: stop_t - shift,
        tail_rate: decay,
        energy_drift: max_drop.max(0.0),
        y_min,
        y_max,
    };
    Ok(TravelingProfile { samples, trajectory: traj, reversed, audit, diagnostics })
}

/// Measure the LaSalle bookkeeping along a damped traveling orbit: the
/// descent function may not rise, the energy may not fall below the saddle
/// level it started at, and the state stays pinned between the turning
/// point and the saddle.
pub fn lasalle_audit(sys: &LinearWaveSystem, traj: &Trajectory) -> Result<LasalleAudit> {
    if sys.s * sys.params.mu <= 0.0 {
        return Err(Error::InvalidParams(
            "the descent audit needs forward damping (s·μ > 0)".into(),
        ));
    }
    let pts = structural_points_linear(sys)?;
    let turning = pts.turning_point.ok_or_else(|| {
        Error::InvalidParams("no bounding turning point: the layout has no loop".into())
    })?;
    let saddle = pts.reference_root;
    let target = sys.smaller_root();

    let mut max_descent_increase: f64 = 0.0;
    let mut max_energy_drop: f64 = 0.0;
    let mut min_energy = f64::INFINITY;
    let mut prev: Option<(f64, f64)> = None;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(_y, s) in &traj.samples {
        let l = sys.lyapunov(s[0], s[1])?;
        let h = sys.energy(s[0], s[1], EnergyRef::Minus)?;
        min_energy = min_energy.min(h);
        if let Some((pl, ph)) = prev {
            max_descent_increase = max_descent_increase.max(l - pl);
            max_energy_drop = max_energy_drop.max(ph - h);
        }
        prev = Some((l, h));
        lo = lo.min(s[0]);
        hi = hi.max(s[0]);
    }
    let confined = lo >= turning - 1e-9 * turning.abs().max(1.0)
        && hi <= saddle + 1e-9 * saddle.abs().max(1.0);
    let end = traj.final_state();
    Ok(LasalleAudit {
        max_descent_increase,
        max_energy_drop,
        min_energy,
        state_min: lo,
        state_max: hi,
        confined,
        terminal_residual: (end[0] - target).hypot(end[1]),
    })
}

fn traverse_loop(
    rhs: &dyn Fn(f64, [f64; 2]) -> [f64; 2],
    seed: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    let far_turn = Event {
        name: "far turn",
        func: Box::new(|_y, s: [f64; 2]| s[1]),
        action: EventAction::Record,
        direction: EventDirection::Falling,
    };
    let return_turn = Event {
        name: "return turn",
        func: Box::new(|_y, s: [f64; 2]| s[1]),
        action: EventAction::Stop,
        direction: EventDirection::Rising,
    };
    let traj = integrate(rhs, 0.0, Y_BUDGET, [seed, 0.0], &[far_turn, return_turn], opts)?;
    if traj.terminated_by != Termination::StoppedByEvent(1) {
        let end = traj.final_state();
        return Err(Error::NoConvergence { y: traj.t_end(), residual: (end[0] - seed).abs() });
    }
    Ok(traj)
}

/// Integrate one full period of the conservative standing orbit just inside
/// the loop: seeded at the turning point plus `seed_offset` (relative),
/// stopped at the return to the near turning. The result feeds conservation
/// checks; its span is the period.
pub fn loop_traversal_standing(
    sys: &StandingSystem,
    seed_offset: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    let pts = structural_points_standing(sys)?;
    if pts.layout != StructuralLayout::LoopInterior {
        return Err(Error::VerdictNotExists(format!(
            "no closed loop to traverse: the forcing layout is {:?}",
            pts.layout
        )));
    }
    let turning = pts.turning_point.expect("loop layout carries a turning point");
    let seed = turning + seed_offset * turning.abs().max(1.0);
    let rhs = |_y: f64, s: [f64; 2]| sys.rhs(s);
    traverse_loop(&rhs, seed, opts)
}

/// Same for the reduced (undamped) traveling orbit.
pub fn loop_traversal_reduced(
    sys: &LinearWaveSystem,
    seed_offset: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    let pts = structural_points_linear(sys)?;
    if pts.layout != StructuralLayout::LoopInterior {
        return Err(Error::VerdictNotExists(format!(
            "no closed loop to traverse: the forcing layout is {:?}",
            pts.layout
        )));
    }
    let turning = pts.turning_point.expect("loop layout carries a turning point");
    let seed = turning + seed_offset * turning.abs().max(1.0);
    let rhs = |_y: f64, s: [f64; 2]| sys.rhs_reduced(s);
    traverse_loop(&rhs, seed, opts)
}
