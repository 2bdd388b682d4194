//! Barotropic gas law and the shared parameter/state records.
//!
//! Pressure is the pure power law p(ρ) = ρ^γ with γ ≥ 1. The isothermal case
//! γ = 1 is dispatched by exact comparison everywhere: its enthalpy is a
//! logarithm while γ > 1 gives a power, and the two expressions do not meet
//! continuously at γ = 1, so approximate branching would silently corrupt
//! results for γ near 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bulk parameters shared by every system in the crate.
///
/// * `gamma` — adiabatic exponent of p(ρ) = ρ^γ, must be ≥ 1
/// * `mu`    — viscosity coefficient, must be > 0
/// * `k`     — scaled Planck constant (dispersion strength), must be > 0
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub gamma: f64,
    pub mu: f64,
    pub k: f64,
}

impl ModelParams {
    pub fn new(gamma: f64, mu: f64, k: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 1.0 {
            return Err(Error::InvalidParams(format!(
                "gamma must be finite and >= 1, got {gamma}"
            )));
        }
        if !mu.is_finite() || mu <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "mu must be finite and > 0, got {mu}"
            )));
        }
        if !k.is_finite() || k <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "k must be finite and > 0, got {k}"
            )));
        }
        Ok(Self { gamma, mu, k })
    }

    /// Is this the isothermal gas law? Exact comparison on purpose.
    #[inline]
    pub fn isothermal(&self) -> bool {
        self.gamma == 1.0
    }
}

/// Conservative state (density, momentum) of the 1-D Euler core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerState {
    /// density, > 0
    pub rho: f64,
    /// momentum density m = ρu
    pub m: f64,
}

impl EulerState {
    pub fn new(rho: f64, m: f64) -> Result<Self> {
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::NonPositiveDensity(rho));
        }
        if !m.is_finite() {
            return Err(Error::InvalidParams(format!("momentum must be finite, got {m}")));
        }
        Ok(Self { rho, m })
    }

    /// Bulk velocity u = m/ρ.
    #[inline]
    pub fn velocity(&self) -> f64 {
        self.m / self.rho
    }
}

/// A shock datum: far-field densities and momenta plus the propagation speed.
///
/// `p_*` are densities (the profile variable), `j_*` the matching momenta.
/// No jump-consistency is implied by the record itself; constructors that
/// need it check it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockData {
    pub p_plus: f64,
    pub p_minus: f64,
    pub j_plus: f64,
    pub j_minus: f64,
    pub s: f64,
}

impl ShockData {
    pub fn new(p_plus: f64, p_minus: f64, j_plus: f64, j_minus: f64, s: f64) -> Result<Self> {
        for (name, v) in [("p_plus", p_plus), ("p_minus", p_minus)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "{name} must be a positive finite density, got {v}"
                )));
            }
        }
        for (name, v) in [("j_plus", j_plus), ("j_minus", j_minus), ("s", s)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(Self { p_plus, p_minus, j_plus, j_minus, s })
    }

    /// Downstream (+) far-field state.
    pub fn plus_state(&self) -> EulerState {
        EulerState { rho: self.p_plus, m: self.j_plus }
    }

    /// Upstream (−) far-field state.
    pub fn minus_state(&self) -> EulerState {
        EulerState { rho: self.p_minus, m: self.j_minus }
    }
}

fn check_density(rho: f64) -> Result<f64> {
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::NonPositiveDensity(rho));
    }
    Ok(rho)
}

fn check_gamma(gamma: f64) -> Result<f64> {
    if !gamma.is_finite() || gamma < 1.0 {
        return Err(Error::InvalidParams(format!(
            "gamma must be finite and >= 1, got {gamma}"
        )));
    }
    Ok(gamma)
}

/// Pressure p(ρ) = ρ^γ.
pub fn pressure(rho: f64, gamma: f64) -> Result<f64> {
    check_density(rho)?;
    check_gamma(gamma)?;
    Ok(rho.powf(gamma))
}

/// Enthalpy h(ρ): ln ρ for γ = 1, γ/(γ−1) · ρ^(γ−1) for γ > 1.
///
/// Satisfies h′(ρ) = p′(ρ)/ρ on both branches.
pub fn enthalpy(rho: f64, gamma: f64) -> Result<f64> {
    check_density(rho)?;
    check_gamma(gamma)?;
    if gamma == 1.0 {
        Ok(rho.ln())
    } else {
        Ok(gamma / (gamma - 1.0) * rho.powf(gamma - 1.0))
    }
}

/// Sound speed c_s(ρ) = √(p′(ρ)) = √(γ ρ^(γ−1)); identically 1 for γ = 1.
pub fn sound_speed(rho: f64, gamma: f64) -> Result<f64> {
    check_density(rho)?;
    check_gamma(gamma)?;
    if gamma == 1.0 {
        Ok(1.0)
    } else {
        Ok((gamma * rho.powf(gamma - 1.0)).sqrt())
    }
}
