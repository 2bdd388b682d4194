//! The planar profile system for nonlinear (density-weighted) viscosity at
//! zero speed, written in the amplitude variable V = √ρ.
//!
//! Standing profiles of the nonlinear-viscosity model conserve mass flux and
//! total head exactly, which collapses the third-order profile equation to
//!
//!   V″ = g(V)/k²,   g(V) = (½·C₁²/V⁴ + h(V²) + C₂)·V,
//!
//! with the two constants fixed by the far field:
//!
//!   C₁ = −u⁺·(V⁺)²,   C₂ = −(u⁺)²/2 − h((V⁺)²).
//!
//! The velocity field is slaved to the amplitude: U(V) = −C₁/V². The system
//! is conservative; its energy
//!
//!   H₁(V,W) = G(V) − W²/2 − G(V⁺),   G(V) = (1/k²)∫ g,
//!
//! is constant along orbits, and the homoclinic loop (when it exists) is the
//! H₁ = 0 level set through the turning point. As with the traveling-wave
//! potential, G carries no integration constant and is only used through
//! differences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandingSystem {
    /// mass-flux constant C₁ = −u⁺(V⁺)²
    pub c1: f64,
    /// head constant C₂ = −(u⁺)²/2 − h((V⁺)²)
    pub c2: f64,
    /// far-field amplitude V⁺ = √ρ⁺
    pub v_plus: f64,
    pub params: ModelParams,
}

impl StandingSystem {
    /// Build from the far-field density and velocity.
    pub fn new(rho_plus: f64, u_plus: f64, params: ModelParams) -> Result<Self> {
        if !rho_plus.is_finite() || rho_plus <= 0.0 {
            return Err(Error::NonPositiveDensity(rho_plus));
        }
        if !u_plus.is_finite() {
            return Err(Error::InvalidParams(format!(
                "u_plus must be finite, got {u_plus}"
            )));
        }
        let v_plus = rho_plus.sqrt();
        let c1 = -u_plus * rho_plus; // (V⁺)² = ρ⁺
        let c2 = -0.5 * u_plus * u_plus - enthalpy_of_square(v_plus, params.gamma);
        Ok(Self { c1, c2, v_plus, params })
    }

    /// Build the zero-speed system whose g has the two prescribed densities
    /// as roots, for the unequal-end-state (non-existence) analysis. The
    /// constants come from the jump relations solved for C₁², C₂:
    ///
    ///   C₁² = 2(V⁺V⁻)⁴·(h(ρ⁺) − h(ρ⁻))/((V⁺)⁴ − (V⁻)⁴),
    ///   C₂  = −((V⁺)⁴h(ρ⁺) − (V⁻)⁴h(ρ⁻))/((V⁺)⁴ − (V⁻)⁴).
    ///
    /// Only C₁² enters g, so the sign convention (u⁺ > 0) is immaterial.
    /// Returns the system together with V⁻ = √ρ⁻.
    pub fn from_end_states(
        rho_plus: f64,
        rho_minus: f64,
        params: ModelParams,
    ) -> Result<(Self, f64)> {
        for rho in [rho_plus, rho_minus] {
            if !rho.is_finite() || rho <= 0.0 {
                return Err(Error::NonPositiveDensity(rho));
            }
        }
        if rho_plus == rho_minus {
            return Err(Error::EqualEndStates(rho_plus));
        }
        let v_plus = rho_plus.sqrt();
        let v_minus = rho_minus.sqrt();
        let h_plus = enthalpy_of_square(v_plus, params.gamma);
        let h_minus = enthalpy_of_square(v_minus, params.gamma);
        let d4 = v_plus.powi(4) - v_minus.powi(4);
        let c1_sq = 2.0 * (v_plus * v_minus).powi(4) * (h_plus - h_minus) / d4;
        let c2 = -(v_plus.powi(4) * h_plus - v_minus.powi(4) * h_minus) / d4;
        let sys = Self { c1: -c1_sq.sqrt(), c2, v_plus, params };
        Ok((sys, v_minus))
    }

    /// Far-field velocity u⁺ = U(V⁺).
    #[inline]
    pub fn u_plus(&self) -> f64 {
        self.velocity(self.v_plus)
    }

    fn check_amplitude(&self, v: f64) -> Result<()> {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::NonPositiveDensity(v));
        }
        Ok(())
    }

    /// g(V) = (½C₁²/V⁴ + h(V²) + C₂)·V. Returned as-is near V → 0 (may
    /// overflow to ∞); nothing is clamped.
    #[inline]
    pub fn g(&self, v: f64) -> f64 {
        let v4 = v * v * v * v;
        (0.5 * self.c1 * self.c1 / v4 + enthalpy_of_square(v, self.params.gamma) + self.c2) * v
    }

    /// g′(V) = −(3/2)C₁²/V⁴ + [ln V² + 2 | γ(2γ−1)/(γ−1)·V^(2γ−2)] + C₂.
    #[inline]
    pub fn g_prime(&self, v: f64) -> f64 {
        let gamma = self.params.gamma;
        let v4 = v * v * v * v;
        let head = if gamma == 1.0 {
            (v * v).ln() + 2.0
        } else {
            gamma * (2.0 * gamma - 1.0) / (gamma - 1.0) * v.powf(2.0 * gamma - 2.0)
        };
        -1.5 * self.c1 * self.c1 / v4 + head + self.c2
    }

    /// g″(V) = 6C₁²/V⁵ + [2/V | 2γ(2γ−1)V^(2γ−3)]; strictly positive on
    /// V > 0, so g has at most two positive roots.
    #[inline]
    pub fn g_second(&self, v: f64) -> f64 {
        let gamma = self.params.gamma;
        let head = if gamma == 1.0 {
            2.0 / v
        } else {
            2.0 * gamma * (2.0 * gamma - 1.0) * v.powf(2.0 * gamma - 3.0)
        };
        6.0 * self.c1 * self.c1 / v.powi(5) + head
    }

    /// (g, g′, g″) with the domain check.
    pub fn g_family(&self, v: f64) -> Result<(f64, f64, f64)> {
        self.check_amplitude(v)?;
        Ok((self.g(v), self.g_prime(v), self.g_second(v)))
    }

    /// Antiderivative G(V) = (1/k²)∫ g(z) dz with the integration constant
    /// dropped:
    ///
    ///   γ = 1:  (1/k²)(−C₁²/(4V²) + ½(C₂−1)V² + ½V² ln V²)
    ///   γ > 1:  (1/(4k²))(−C₁²/V² + 2C₂V² + 2V^(2γ)/(γ−1))
    pub fn potential(&self, v: f64) -> Result<f64> {
        self.check_amplitude(v)?;
        let k2 = self.params.k * self.params.k;
        let gamma = self.params.gamma;
        let c1sq = self.c1 * self.c1;
        if gamma == 1.0 {
            Ok((-0.25 * c1sq / (v * v)
                + 0.5 * (self.c2 - 1.0) * v * v
                + 0.5 * v * v * (v * v).ln())
                / k2)
        } else {
            Ok((-c1sq / (v * v) + 2.0 * self.c2 * v * v + 2.0 * v.powf(2.0 * gamma) / (gamma - 1.0))
                / (4.0 * k2))
        }
    }

    /// Energy H₁(V,W) = G(V) − W²/2 − G(V⁺); constant along orbits.
    pub fn energy(&self, v: f64, w: f64) -> Result<f64> {
        Ok(self.potential(v)? - 0.5 * w * w - self.potential(self.v_plus)?)
    }

    /// Velocity recovered from the amplitude: U(V) = −C₁/V².
    #[inline]
    pub fn velocity(&self, v: f64) -> f64 {
        -self.c1 / (v * v)
    }

    /// Right-hand side of the planar system (V′, W′) = (W, g(V)/k²).
    #[inline]
    pub fn rhs(&self, state: [f64; 2]) -> [f64; 2] {
        let [v, w] = state;
        let k2 = self.params.k * self.params.k;
        [w, self.g(v) / k2]
    }
}

/// h(V²) without a Result in the hot path: ln V² for γ = 1, else
/// γ/(γ−1)·V^(2(γ−1)).
#[inline]
fn enthalpy_of_square(v: f64, gamma: f64) -> f64 {
    if gamma == 1.0 {
        (v * v).ln()
    } else {
        gamma / (gamma - 1.0) * v.powf(2.0 * (gamma - 1.0))
    }
}
