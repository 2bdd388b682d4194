//! Phase-plane anatomy shared by the traveling- and standing-wave systems.
//!
//! Both profile equations reduce to a planar system driven by a convex
//! forcing with at most two positive roots. Everything an orbit can do is
//! dictated by a handful of structural points — the second root, the zero of
//! the forcing slope between the roots, and the turning point where the
//! potential returns to its value at the reference root — together with the
//! linearization at each root. This module locates those points, classifies
//! the equilibria (with the eigenvectors used to launch shooting orbits),
//! and produces the closed-form certificates that rule profiles out: the
//! sonic/supersonic far-field tests and the energy-gap argument at zero
//! speed.
//!
//! Point location never guesses brackets. The forcing slope is strictly
//! increasing (the forcing is convex), so the slope zero is found first by
//! a monotone walk, and each remaining point is bracketed on one side of it
//! where the relevant function is known to be monotone.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::LinearWaveSystem;
use crate::roots::bracketed_root;
use crate::standing::StandingSystem;

/// Relative half-width of the band around zero slope inside which a root is
/// treated as degenerate (double root / sonic far field).
pub const TOL_DEGENERATE: f64 = 1e-9;
/// Relative residual above which a point is rejected as "not a root".
pub const TOL_EQUILIBRIUM: f64 = 1e-9;
/// Relative bracket tolerance for located structural points.
const TOL_POINT: f64 = 1e-13;
/// Cap on halvings/doublings while hunting for a sign change.
const MAX_EXPAND: usize = 200;

/// How the forcing's roots and level sets are arranged around the reference
/// root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructuralLayout {
    /// The reference root is a saddle of the conservative flow; the center,
    /// the slope zero, and the turning point closing the homoclinic loop
    /// all sit below it.
    LoopInterior,
    /// The reference root is a center; the saddle sits above it, and the
    /// loop through that saddle turns below the reference root.
    SecondRootAbove,
    /// The forcing slope vanishes at the reference root (within band): the
    /// two roots have merged and the phase portrait is degenerate.
    DoubleRoot,
    /// No flux constant: the forcing has no second positive root and the
    /// level set through the reference root runs to vacuum instead of
    /// closing into a loop.
    SingleRoot,
}

/// The located points. Options are `None` whenever the layout does not
/// provide the point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuralPoints {
    pub layout: StructuralLayout,
    /// The root the analysis is anchored at (the saddle for a traveling
    /// wave, the far-field amplitude for a standing one).
    pub reference_root: f64,
    /// The other root of the forcing.
    pub second_root: Option<f64>,
    /// The unique zero of the forcing slope, strictly between the roots.
    pub derivative_zero: Option<f64>,
    /// Where the potential re-attains its value at the loop's saddle; the
    /// extreme excursion of the homoclinic orbit.
    pub turning_point: Option<f64>,
}

/// Walk x ← x/2 from `start` until `pred(x)` holds.
fn halve_until(pred: impl Fn(f64) -> bool, start: f64, what: &str) -> Result<f64> {
    let mut x = start;
    for _ in 0..MAX_EXPAND {
        x *= 0.5;
        if pred(x) {
            return Ok(x);
        }
    }
    Err(Error::BracketSearchFailed(format!(
        "no sign change found below {start} for {what}"
    )))
}

/// Walk x ← 2x from `start` until `pred(x)` holds.
fn double_until(pred: impl Fn(f64) -> bool, start: f64, what: &str) -> Result<f64> {
    let mut x = start;
    for _ in 0..MAX_EXPAND {
        x *= 2.0;
        if pred(x) {
            return Ok(x);
        }
    }
    Err(Error::BracketSearchFailed(format!(
        "no sign change found above {start} for {what}"
    )))
}

fn locate(
    forcing: &dyn Fn(f64) -> f64,
    slope: &dyn Fn(f64) -> f64,
    potential: &dyn Fn(f64) -> Result<f64>,
    reference: f64,
    slope_scale: f64,
    has_flux_term: bool,
) -> Result<StructuralPoints> {
    let none = |layout| StructuralPoints {
        layout,
        reference_root: reference,
        second_root: None,
        derivative_zero: None,
        turning_point: None,
    };
    let s_ref = slope(reference);
    if s_ref.abs() <= TOL_DEGENERATE * slope_scale.max(1.0) {
        return Ok(none(StructuralLayout::DoubleRoot));
    }
    if s_ref > 0.0 && !has_flux_term {
        return Ok(none(StructuralLayout::SingleRoot));
    }

    if s_ref > 0.0 {
        // saddle at the reference; the loop hangs below it
        let lo = halve_until(|x| slope(x) < 0.0, reference, "forcing slope")?;
        let derivative_zero = bracketed_root(slope, lo, reference, TOL_POINT)?;
        let lo = halve_until(|x| forcing(x) > 0.0, derivative_zero, "forcing")?;
        let second_root = bracketed_root(forcing, lo, derivative_zero, TOL_POINT)?;
        let level = potential(reference)?;
        let excess = |x: f64| potential(x).map(|v| v - level).unwrap_or(f64::NAN);
        // the potential exceeds the saddle level at the center and drops
        // below it further down (the flux term sends it to −∞)
        let turning_point = if excess(second_root) <= 0.0 {
            second_root // loop thinner than rounding; collapse onto the center
        } else {
            let lo = halve_until(|x| excess(x) < 0.0, second_root, "potential level")?;
            bracketed_root(excess, lo, second_root, TOL_POINT)?
        };
        Ok(StructuralPoints {
            layout: StructuralLayout::LoopInterior,
            reference_root: reference,
            second_root: Some(second_root),
            derivative_zero: Some(derivative_zero),
            turning_point: Some(turning_point),
        })
    } else {
        // center at the reference; the saddle sits above it
        let hi = double_until(|x| slope(x) > 0.0, reference, "forcing slope")?;
        let derivative_zero = bracketed_root(slope, reference, hi, TOL_POINT)?;
        let hi = double_until(|x| forcing(x) > 0.0, derivative_zero, "forcing")?;
        let second_root = bracketed_root(forcing, derivative_zero, hi, TOL_POINT)?;
        let level = potential(second_root)?;
        let excess = |x: f64| potential(x).map(|v| v - level).unwrap_or(f64::NAN);
        let turning_point = if excess(reference) <= 0.0 {
            reference
        } else {
            let lo = halve_until(|x| excess(x) < 0.0, reference, "potential level")?;
            bracketed_root(excess, lo, reference, TOL_POINT)?
        };
        Ok(StructuralPoints {
            layout: StructuralLayout::SecondRootAbove,
            reference_root: reference,
            second_root: Some(second_root),
            derivative_zero: Some(derivative_zero),
            turning_point: Some(turning_point),
        })
    }
}

/// Structural points of the traveling-wave forcing, anchored at the saddle
/// (the larger of the two known roots; for an equal-end-state system, at
/// the single known root).
pub fn structural_points_linear(sys: &LinearWaveSystem) -> Result<StructuralPoints> {
    let reference = if sys.p_plus == sys.p_minus { sys.p_plus } else { sys.larger_root() };
    let gamma = sys.params.gamma;
    let scale = gamma * reference.powf(gamma - 1.0) + sys.a * sys.a / (reference * reference);
    locate(
        &|p| sys.f(p),
        &|p| sys.f_prime(p),
        &|p| sys.potential(p),
        reference,
        scale,
        sys.a != 0.0,
    )
}

/// Structural points of the standing-wave forcing, anchored at the
/// far-field amplitude.
pub fn structural_points_standing(sys: &StandingSystem) -> Result<StructuralPoints> {
    let v = sys.v_plus;
    let gamma = sys.params.gamma;
    let cs2 = if gamma == 1.0 { 1.0 } else { gamma * v.powf(2.0 * gamma - 2.0) };
    let u = sys.u_plus();
    locate(
        &|x| sys.g(x),
        &|x| sys.g_prime(x),
        &|x| sys.potential(x),
        v,
        2.0 * (cs2 + u * u),
        sys.c1 != 0.0,
    )
}

/// Equilibrium type of the planar profile systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EquilibriumKind {
    /// Real eigenvalues of opposite sign.
    Saddle,
    StableNode,
    StableFocus,
    UnstableNode,
    UnstableFocus,
    /// Purely imaginary eigenvalues in a conservative system; certified as a
    /// true center by the conserved energy, not just the linearization.
    Center,
    /// The forcing slope vanishes at the root (within band); the
    /// linearization decides nothing.
    Nonhyperbolic,
}

/// Linearization data at a root of the forcing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumReport {
    pub location: f64,
    /// Forcing slope at the root.
    pub forcing_slope: f64,
    /// sμ for the damped traveling system, 0 for the conservative ones.
    pub damping: f64,
    /// The quantity under the square root in λ = (−sμ ± √disc)/k²; its sign
    /// separates nodes from foci.
    pub discriminant: f64,
    /// λ₁ (the + branch) first.
    pub eigenvalues: [Complex64; 2],
    /// Real eigenvectors [v₁, v₂] scaled so the second component is −1;
    /// `None` for a complex pair or a vanishing eigenvalue.
    pub eigenvectors: Option<[[f64; 2]; 2]>,
    pub kind: EquilibriumKind,
}

fn build_report(
    location: f64,
    forcing_slope: f64,
    damping: f64,
    discriminant: f64,
    k2: f64,
    conservative: bool,
    slope_tol: f64,
) -> EquilibriumReport {
    let kind = if forcing_slope.abs() <= slope_tol {
        EquilibriumKind::Nonhyperbolic
    } else if forcing_slope > 0.0 {
        EquilibriumKind::Saddle
    } else if conservative {
        EquilibriumKind::Center
    } else if discriminant < 0.0 {
        if damping > 0.0 { EquilibriumKind::StableFocus } else { EquilibriumKind::UnstableFocus }
    } else if damping > 0.0 {
        EquilibriumKind::StableNode
    } else {
        EquilibriumKind::UnstableNode
    };
    let (eigenvalues, eigenvectors) = if discriminant >= 0.0 {
        let sq = discriminant.sqrt();
        let l1 = (-damping + sq) / k2;
        let l2 = (-damping - sq) / k2;
        // the Jacobian rows are (0, 1) and (·, ·): an eigenvector is (1, λ),
        // rescaled here so its second component is −1
        let vecs =
            if l1 != 0.0 && l2 != 0.0 { Some([[-1.0 / l1, -1.0], [-1.0 / l2, -1.0]]) } else { None };
        ([Complex64::new(l1, 0.0), Complex64::new(l2, 0.0)], vecs)
    } else {
        let re = -damping / k2;
        let om = (-discriminant).sqrt() / k2;
        ([Complex64::new(re, om), Complex64::new(re, -om)], None)
    };
    EquilibriumReport {
        location,
        forcing_slope,
        damping,
        discriminant,
        eigenvalues,
        eigenvectors,
        kind,
    }
}

fn linear_forcing_scale(sys: &LinearWaveSystem, p: f64) -> f64 {
    let gamma = sys.params.gamma;
    p.powf(gamma) + (sys.a * sys.s + sys.b).abs() + sys.a * sys.a / p
}

fn check_root(residual: f64, scale: f64, at: f64) -> Result<()> {
    if residual.abs() > TOL_EQUILIBRIUM * scale.max(1.0) {
        return Err(Error::NotAnEquilibrium { at, residual });
    }
    Ok(())
}

/// Linearization of the damped traveling-wave system at a root of its
/// forcing. Eigenvalues are (−sμ ± √(s²μ² + 2k²f′))/k².
pub fn equilibrium_full(sys: &LinearWaveSystem, p: f64) -> Result<EquilibriumReport> {
    let (f, fp, _) = sys.f_family(p)?;
    check_root(f, linear_forcing_scale(sys, p), p)?;
    let params = sys.params;
    let k2 = params.k * params.k;
    let damping = sys.s * params.mu;
    let disc = damping * damping + 2.0 * k2 * fp;
    let conservative = damping == 0.0;
    let scale = params.gamma * p.powf(params.gamma - 1.0) + sys.a * sys.a / (p * p);
    Ok(build_report(p, fp, damping, disc, k2, conservative, TOL_DEGENERATE * scale.max(1.0)))
}

/// Linearization of the undamped (reduced) traveling-wave system; the
/// eigenvalues collapse to ±√(2f′)/k.
pub fn equilibrium_reduced(sys: &LinearWaveSystem, p: f64) -> Result<EquilibriumReport> {
    let (f, fp, _) = sys.f_family(p)?;
    check_root(f, linear_forcing_scale(sys, p), p)?;
    let k2 = sys.params.k * sys.params.k;
    let scale = sys.params.gamma * p.powf(sys.params.gamma - 1.0) + sys.a * sys.a / (p * p);
    Ok(build_report(p, fp, 0.0, 2.0 * k2 * fp, k2, true, TOL_DEGENERATE * scale.max(1.0)))
}

/// Linearization of the standing-wave system at a root of g; eigenvalues
/// ±√(g′)/k.
pub fn equilibrium_standing(sys: &StandingSystem, v: f64) -> Result<EquilibriumReport> {
    let (g, gp, _) = sys.g_family(v)?;
    let gamma = sys.params.gamma;
    let head = if gamma == 1.0 {
        (v * v).ln().abs()
    } else {
        gamma / (gamma - 1.0) * v.powf(2.0 * gamma - 2.0)
    };
    let scale = (0.5 * sys.c1 * sys.c1 / v.powi(4) + head + sys.c2.abs()) * v;
    check_root(g, scale, v)?;
    let k2 = sys.params.k * sys.params.k;
    let gp_scale = 1.5 * sys.c1 * sys.c1 / v.powi(4) + head * 3.0 + sys.c2.abs();
    Ok(build_report(v, gp, 0.0, k2 * gp, k2, true, TOL_DEGENERATE * gp_scale.max(1.0)))
}

/// Whether the approach to the attracting end state is oscillatory: the
/// damping rate |s|μ/k against the threshold √(−2f′) at the attracting
/// root. Spiraling happens strictly below the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub damping_rate: f64,
    pub threshold: f64,
    pub oscillatory: bool,
}

pub fn oscillation_criterion(sys: &LinearWaveSystem) -> Result<OscillationReport> {
    let p = sys.smaller_root();
    let fp = sys.f_prime(p);
    if fp >= 0.0 {
        return Err(Error::InvalidParams(format!(
            "no attracting end state: forcing slope {fp} at {p} is not negative"
        )));
    }
    let damping_rate = sys.s.abs() * sys.params.mu / sys.params.k;
    let threshold = (-2.0 * fp).sqrt();
    Ok(OscillationReport { damping_rate, threshold, oscillatory: damping_rate < threshold })
}

/// Existence verdict for a standing profile with the given far field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StandingExistence {
    /// Strictly subsonic, nonzero far-field velocity: the homoclinic loop
    /// exists and with it the profile.
    Exists,
    /// Zero far-field velocity: the level set through the far state runs
    /// into vacuum instead of closing.
    NoneZeroVelocity,
    /// Sonic far field: the two roots of g merge and the loop degenerates.
    NoneSonic,
    /// Supersonic far field: the far state is a center, not a saddle.
    NoneSupersonic,
}

pub fn standing_existence_verdict(sys: &StandingSystem) -> StandingExistence {
    if sys.c1 == 0.0 {
        return StandingExistence::NoneZeroVelocity;
    }
    let gamma = sys.params.gamma;
    let cs2 =
        if gamma == 1.0 { 1.0 } else { gamma * sys.v_plus.powf(2.0 * gamma - 2.0) };
    let u2 = sys.u_plus() * sys.u_plus();
    let margin = cs2 - u2;
    if margin.abs() <= TOL_DEGENERATE * (cs2 + u2) {
        StandingExistence::NoneSonic
    } else if margin < 0.0 {
        StandingExistence::NoneSupersonic
    } else {
        StandingExistence::Exists
    }
}

/// Same trichotomy for the density form at zero speed. The sign of
/// f′(P⁺) = c_s² − u⁺² decides the far-field type (saddle needs a strictly
/// subsonic flow with nonzero velocity); the damping term carries a factor
/// of the speed, so a standing profile sees the conservative flow and the
/// pulse is the full homoclinic loop.
pub fn standing_existence_verdict_linear(sys: &LinearWaveSystem) -> Result<StandingExistence> {
    if !sys.is_standing() {
        return Err(Error::InvalidParams(
            "standing verdict needs equal end states at zero speed".into(),
        ));
    }
    if sys.a == 0.0 {
        return Ok(StandingExistence::NoneZeroVelocity);
    }
    let p = sys.p_plus;
    let cs2 = sys.params.gamma * p.powf(sys.params.gamma - 1.0);
    let u2 = sys.a * sys.a / (p * p);
    let margin = cs2 - u2;
    Ok(if margin.abs() <= TOL_DEGENERATE * (cs2 + u2) {
        StandingExistence::NoneSonic
    } else if margin < 0.0 {
        StandingExistence::NoneSupersonic
    } else {
        StandingExistence::Exists
    })
}

/// Why no zero-speed front can connect two distinct end states: at zero
/// speed both systems are conservative, the two equilibria sit on different
/// energy levels (the gap below is strictly positive), and the lower root
/// is a strict local maximum of the energy — an isolated point of its own
/// level set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroSpeedCertificate {
    /// Energy at the smaller root minus energy at the larger one; nonzero
    /// means no orbit can connect them.
    pub energy_gap: f64,
    /// Diagonal of the energy Hessian at the smaller root (the off-diagonal
    /// vanishes there).
    pub hessian_small: [f64; 2],
    /// Same at the larger root.
    pub hessian_large: [f64; 2],
    /// Both Hessian entries at the smaller root are negative: it is a
    /// strict local max of the energy.
    pub small_root_is_energy_max: bool,
}

/// Certificate for the linear-viscosity system. Requires s = 0 and two
/// distinct roots.
pub fn zero_speed_certificate_linear(sys: &LinearWaveSystem) -> Result<ZeroSpeedCertificate> {
    if sys.s != 0.0 {
        return Err(Error::InvalidParams(format!(
            "zero-speed certificate needs s = 0, got {}",
            sys.s
        )));
    }
    if sys.p_plus == sys.p_minus {
        return Err(Error::EqualEndStates(sys.p_plus));
    }
    let small = sys.smaller_root();
    let large = sys.larger_root();
    let energy_gap = sys.potential(small)? - sys.potential(large)?;
    let k2 = sys.params.k * sys.params.k;
    let hess = |p: f64| [2.0 / k2 * sys.f_prime(p) / (p * p), -1.0 / (p * p)];
    let hessian_small = hess(small);
    let hessian_large = hess(large);
    Ok(ZeroSpeedCertificate {
        energy_gap,
        hessian_small,
        hessian_large,
        small_root_is_energy_max: hessian_small[0] < 0.0 && hessian_small[1] < 0.0,
    })
}

/// Certificate for the nonlinear-viscosity system, given the second root
/// produced by [`StandingSystem::from_end_states`].
pub fn zero_speed_certificate_standing(
    sys: &StandingSystem,
    v_minus: f64,
) -> Result<ZeroSpeedCertificate> {
    // both prescribed amplitudes must actually be roots of g
    for v in [sys.v_plus, v_minus] {
        let (g, _, _) = sys.g_family(v)?;
        let gamma = sys.params.gamma;
        let head = if gamma == 1.0 {
            (v * v).ln().abs()
        } else {
            gamma / (gamma - 1.0) * v.powf(2.0 * gamma - 2.0)
        };
        let scale = (0.5 * sys.c1 * sys.c1 / v.powi(4) + head + sys.c2.abs()) * v;
        check_root(g, scale, v)?;
    }
    let (small, large) =
        if v_minus < sys.v_plus { (v_minus, sys.v_plus) } else { (sys.v_plus, v_minus) };
    let energy_gap = sys.potential(small)? - sys.potential(large)?;
    let k2 = sys.params.k * sys.params.k;
    let hess = |v: f64| [sys.g_prime(v) / k2, -1.0];
    let hessian_small = hess(small);
    let hessian_large = hess(large);
    Ok(ZeroSpeedCertificate {
        energy_gap,
        hessian_small,
        hessian_large,
        small_root_is_energy_max: hessian_small[0] < 0.0 && hessian_small[1] < 0.0,
    })
}
