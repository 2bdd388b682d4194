//! Jump conditions, momentum branches, and Lax admissibility.
//!
//! Given far-field densities P± and a speed s, the two jump relations leave a
//! quadratic for the momenta, hence two branches
//!
//!   J± = s·P± ± d,   d = √(P⁺P⁻) · √((p(P⁺) − p(P⁻)) / (P⁺ − P⁻)) > 0,
//!
//! shared between the two sides (the same d on both, which is what makes the
//! pair jump-consistent). Which branch is physical is decided by the Lax
//! inequalities on the characteristic speeds u ∓ c_s; for a power-law gas
//! exactly one branch survives whenever P⁺ ≠ P⁻.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sound_speed, ModelParams, ShockData};

/// Relative half-width of the sonic band: a state with ||u| − c_s| ≤ TOL·c_s
/// is reported Sonic rather than sub/supersonic.
pub const TOL_SONIC: f64 = 1e-9;

/// Both solutions of the momentum quadratic for fixed (P±, s, γ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumBranches {
    /// the positive square root shared by the two sides
    pub d: f64,
    pub j_plus_1: f64,
    pub j_minus_1: f64,
    pub j_plus_2: f64,
    pub j_minus_2: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub s: f64,
}

impl MomentumBranches {
    /// Branch 1 (J = sP + d) as a shock record.
    pub fn shock_1(&self) -> ShockData {
        ShockData {
            p_plus: self.p_plus,
            p_minus: self.p_minus,
            j_plus: self.j_plus_1,
            j_minus: self.j_minus_1,
            s: self.s,
        }
    }

    /// Branch 2 (J = sP − d) as a shock record.
    pub fn shock_2(&self) -> ShockData {
        ShockData {
            p_plus: self.p_plus,
            p_minus: self.p_minus,
            j_plus: self.j_plus_2,
            j_minus: self.j_minus_2,
            s: self.s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaxType {
    Lax1,
    Lax2,
    NotAdmissible,
}

/// Position of a far-field state relative to the sound speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowRegime {
    Subsonic,
    Sonic,
    Supersonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockClassification {
    pub lax_type: LaxType,
    pub regime_plus: FlowRegime,
    pub regime_minus: FlowRegime,
}

/// The admissible branch picked out of [`momentum_branches`], with its
/// classification attached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleBranch {
    pub shock: ShockData,
    /// 1 or 2, the branch index in the quadratic
    pub branch: u8,
    pub classification: ShockClassification,
}

fn validate_jump_inputs(p_plus: f64, p_minus: f64, s: f64, gamma: f64) -> Result<()> {
    for (name, v) in [("p_plus", p_plus), ("p_minus", p_minus)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "{name} must be a positive finite density, got {v}"
            )));
        }
    }
    if !s.is_finite() {
        return Err(Error::InvalidParams(format!("s must be finite, got {s}")));
    }
    if !gamma.is_finite() || gamma < 1.0 {
        return Err(Error::InvalidParams(format!(
            "gamma must be finite and >= 1, got {gamma}"
        )));
    }
    if p_plus == p_minus {
        return Err(Error::EqualEndStates(p_plus));
    }
    Ok(())
}

/// Pressure difference quotient (p(P⁺) − p(P⁻))/(P⁺ − P⁻); strictly positive.
#[inline]
fn pressure_quotient(p_plus: f64, p_minus: f64, gamma: f64) -> f64 {
    (p_plus.powf(gamma) - p_minus.powf(gamma)) / (p_plus - p_minus)
}

/// Solve the momentum quadratic for both branches.
///
/// Requires P⁺ ≠ P⁻; the degenerate standing case carries no information
/// about d and is rejected.
pub fn momentum_branches(p_plus: f64, p_minus: f64, s: f64, gamma: f64) -> Result<MomentumBranches> {
    validate_jump_inputs(p_plus, p_minus, s, gamma)?;
    let d = (p_plus * p_minus).sqrt() * pressure_quotient(p_plus, p_minus, gamma).sqrt();
    Ok(MomentumBranches {
        d,
        j_plus_1: s * p_plus + d,
        j_minus_1: s * p_minus + d,
        j_plus_2: s * p_plus - d,
        j_minus_2: s * p_minus - d,
        p_plus,
        p_minus,
        s,
    })
}

/// Residuals of the two jump relations for an arbitrary shock record.
///
/// Returns (mass residual, momentum-flux residual); both vanish to rounding
/// for branches produced by [`momentum_branches`].
pub fn rh_residual(shock: &ShockData, gamma: f64) -> (f64, f64) {
    let flux = |p: f64, j: f64| j * j / p + p.powf(gamma);
    let r1 = (shock.j_plus - shock.j_minus) - shock.s * (shock.p_plus - shock.p_minus);
    let r2 = (flux(shock.p_plus, shock.j_plus) - flux(shock.p_minus, shock.j_minus))
        - shock.s * (shock.j_plus - shock.j_minus);
    (r1, r2)
}

fn regime(u: f64, c: f64) -> FlowRegime {
    if (u.abs() - c).abs() <= TOL_SONIC * c {
        FlowRegime::Sonic
    } else if u.abs() > c {
        FlowRegime::Supersonic
    } else {
        FlowRegime::Subsonic
    }
}

/// Classify a shock against the Lax inequalities (strict, evaluated
/// numerically on the characteristic speeds) and flag each far-field state's
/// flow regime.
pub fn lax_classify(shock: &ShockData, params: &ModelParams) -> ShockClassification {
    let (cp, cm) = match (
        sound_speed(shock.p_plus, params.gamma),
        sound_speed(shock.p_minus, params.gamma),
    ) {
        (Ok(cp), Ok(cm)) => (cp, cm),
        _ => {
            return ShockClassification {
                lax_type: LaxType::NotAdmissible,
                regime_plus: FlowRegime::Sonic,
                regime_minus: FlowRegime::Sonic,
            }
        }
    };
    let up = shock.j_plus / shock.p_plus;
    let um = shock.j_minus / shock.p_minus;
    let s = shock.s;

    let lax1 = up - cp < s && s < um - cm;
    let lax2 = up + cp < s && s < um + cm;
    let lax_type = if lax1 {
        LaxType::Lax1
    } else if lax2 {
        LaxType::Lax2
    } else {
        LaxType::NotAdmissible
    };
    ShockClassification {
        lax_type,
        regime_plus: regime(up, cp),
        regime_minus: regime(um, cm),
    }
}

/// Build both momentum branches and return the Lax-admissible one.
///
/// For P⁺ < P⁻ that is branch 2 (a 2-shock); for P⁻ < P⁺ branch 1 (a
/// 1-shock) — independent of s, which cancels from the inequalities.
pub fn admissible_branch(p_plus: f64, p_minus: f64, s: f64, gamma: f64) -> Result<AdmissibleBranch> {
    let branches = momentum_branches(p_plus, p_minus, s, gamma)?;
    // mu/k play no role in classification; placeholders keep the params valid
    let params = ModelParams::new(gamma, 1.0, 1.0)?;
    let candidates = [(branches.shock_1(), 1u8), (branches.shock_2(), 2u8)];
    let mut found: Option<AdmissibleBranch> = None;
    for (shock, idx) in candidates {
        let classification = lax_classify(&shock, &params);
        if classification.lax_type != LaxType::NotAdmissible {
            if found.is_some() {
                // cannot happen for jump-consistent branches; be loud if it does
                return Err(Error::InconsistentShock {
                    what: "both momentum branches claim Lax admissibility",
                    mismatch: f64::NAN,
                });
            }
            found = Some(AdmissibleBranch { shock, branch: idx, classification });
        }
    }
    found.ok_or(Error::NoAdmissibleBranch)
}

/// The two positivity margins behind the Lax inequalities, as functions of
/// the density ratio r > 1:
///
///   f̃(r) = r^(γ+1) − (γ+1)·r + γ,
///   f̄(r) = γ·r^(γ+1) − (γ+1)·r^γ + 1.
///
/// Both are 0 at r = 1 and strictly positive for r > 1; their positivity is
/// exactly what makes one branch admissible and the other not.
pub fn lax_inequality_check(r: f64, gamma: f64) -> Result<(f64, f64)> {
    if !gamma.is_finite() || gamma < 1.0 {
        return Err(Error::InvalidParams(format!(
            "gamma must be finite and >= 1, got {gamma}"
        )));
    }
    if !r.is_finite() || r <= 1.0 {
        return Err(Error::RatioNotAboveOne(r));
    }
    let f_tilde = r.powf(gamma + 1.0) - (gamma + 1.0) * r + gamma;
    let f_bar = gamma * r.powf(gamma + 1.0) - (gamma + 1.0) * r.powf(gamma) + 1.0;
    Ok((f_tilde, f_bar))
}
