//! The planar profile system for linear viscosity.
//!
//! In the co-moving coordinate y = x − st a profile P(y) of the viscous,
//! dispersive model satisfies
//!
//!   P″ = (2/k²)·f(P) − (2sμ/k²)·P′ + P′²/P,
//!   f(P) = p(P) − (A·s + B) + A²/P,
//!
//! where A = s·P± − J± and B = −s·J± + (J²/P + p(P))± are the two jump
//! invariants (the same value on both sides for a consistent shock). The
//! momentum along the profile is slaved: J(y) = s·P(y) − A.
//!
//! Dropping the damping term gives the conservative "reduced" system whose
//! energy
//!
//!   H(P,Q) = F(P) − ½(Q/P)² − F(P_ref),   F(P) = (2/k²)∫ f(z)/z² dz,
//!
//! is exactly the quantity that grows monotonically along the full system
//! (dH/dy = (2sμ/k²)(Q/P)²), which is what every orbit-confinement argument
//! here leans on. F is used only through differences, so no integration
//! constant is carried: adding a constant to F shifts H's reference but
//! never any observable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, ShockData};

/// Relative tolerance for cross-checking the jump invariants between the two
/// end states when building a system.
const TOL_CONSISTENCY: f64 = 1e-12;

/// Which far-field root anchors an energy difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnergyRef {
    Plus,
    Minus,
}

/// Planar profile system for the linear-viscosity model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearWaveSystem {
    /// momentum offset A = s·P± − J±
    pub a: f64,
    /// flux invariant B = −s·J± + (J²/P + p(P))±
    pub b: f64,
    /// shock speed
    pub s: f64,
    pub params: ModelParams,
    /// downstream root of f (density at y → +∞)
    pub p_plus: f64,
    /// upstream root of f (density at y → −∞)
    pub p_minus: f64,
}

impl LinearWaveSystem {
    /// Build the system from a jump-consistent shock record.
    ///
    /// Fails if the two sides disagree on A or B (not a shock), or if A = 0
    /// while the end states differ (A = 0 forces P⁺ = P⁻, so the input is
    /// contradictory). A = 0 *with* equal end states is the legitimate
    /// zero-velocity standing configuration and is accepted.
    pub fn from_shock(shock: &ShockData, params: ModelParams) -> Result<Self> {
        let gamma = params.gamma;
        let a_plus = shock.s * shock.p_plus - shock.j_plus;
        let a_minus = shock.s * shock.p_minus - shock.j_minus;
        let scale_a = a_plus
            .abs()
            .max(a_minus.abs())
            .max(shock.s.abs() * shock.p_plus.max(shock.p_minus))
            .max(1.0);
        if (a_plus - a_minus).abs() > TOL_CONSISTENCY * scale_a {
            return Err(Error::InconsistentShock {
                what: "momentum offset A",
                mismatch: (a_plus - a_minus).abs(),
            });
        }
        let a = 0.5 * (a_plus + a_minus);
        if a.abs() <= TOL_CONSISTENCY * scale_a && shock.p_plus != shock.p_minus {
            return Err(Error::ZeroMomentumOffset);
        }

        let flux = |p: f64, j: f64| j * j / p + p.powf(gamma);
        let b_plus = -shock.s * shock.j_plus + flux(shock.p_plus, shock.j_plus);
        let b_minus = -shock.s * shock.j_minus + flux(shock.p_minus, shock.j_minus);
        let scale_b = b_plus.abs().max(b_minus.abs()).max(1.0);
        if (b_plus - b_minus).abs() > TOL_CONSISTENCY * scale_b {
            return Err(Error::InconsistentShock {
                what: "flux invariant B",
                mismatch: (b_plus - b_minus).abs(),
            });
        }
        let b = 0.5 * (b_plus + b_minus);

        Ok(Self {
            a,
            b,
            s: shock.s,
            params,
            p_plus: shock.p_plus,
            p_minus: shock.p_minus,
        })
    }

    /// Standing configuration: zero speed and equal end states.
    #[inline]
    pub fn is_standing(&self) -> bool {
        self.s == 0.0 && self.p_plus == self.p_minus
    }

    /// Root with f′ > 0 for a genuine jump (the saddle of the planar flow).
    #[inline]
    pub fn larger_root(&self) -> f64 {
        self.p_plus.max(self.p_minus)
    }

    /// Root with f′ < 0 for a genuine jump.
    #[inline]
    pub fn smaller_root(&self) -> f64 {
        self.p_plus.min(self.p_minus)
    }

    fn check_density(&self, p: f64) -> Result<()> {
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::NonPositiveDensity(p));
        }
        Ok(())
    }

    /// f(P) = p(P) − (As + B) + A²/P. Finite for P > 0; near P → 0 the
    /// value is returned as-is (may overflow to ∞) — nothing is clamped.
    #[inline]
    pub fn f(&self, p: f64) -> f64 {
        p.powf(self.params.gamma) - (self.a * self.s + self.b) + self.a * self.a / p
    }

    /// f′(P) = γP^(γ−1) − A²/P².
    #[inline]
    pub fn f_prime(&self, p: f64) -> f64 {
        self.params.gamma * p.powf(self.params.gamma - 1.0) - self.a * self.a / (p * p)
    }

    /// f″(P) = γ(γ−1)P^(γ−2) + 2A²/P³; strictly positive on P > 0, which is
    /// why f has at most two roots.
    #[inline]
    pub fn f_second(&self, p: f64) -> f64 {
        self.params.gamma * (self.params.gamma - 1.0) * p.powf(self.params.gamma - 2.0)
            + 2.0 * self.a * self.a / (p * p * p)
    }

    /// (f, f′, f″) with the domain check.
    pub fn f_family(&self, p: f64) -> Result<(f64, f64, f64)> {
        self.check_density(p)?;
        Ok((self.f(p), self.f_prime(p), self.f_second(p)))
    }

    /// Antiderivative F(P) = (2/k²) ∫ f(z)/z² dz, fixed by dropping the
    /// integration constant:
    ///
    ///   γ = 1:  (2/k²)(ln P + (As+B)/P − A²/(2P²))
    ///   γ > 1:  (2/k²)(P^(γ−1)/(γ−1) + (As+B)/P − A²/(2P²))
    ///
    /// Only differences of F are meaningful.
    pub fn potential(&self, p: f64) -> Result<f64> {
        self.check_density(p)?;
        let k2 = self.params.k * self.params.k;
        let asb = self.a * self.s + self.b;
        let gamma = self.params.gamma;
        let head = if gamma == 1.0 {
            p.ln()
        } else {
            p.powf(gamma - 1.0) / (gamma - 1.0)
        };
        Ok(2.0 / k2 * (head + asb / p - self.a * self.a / (2.0 * p * p)))
    }

    /// Energy H(P,Q) = F(P) − ½(Q/P)² − F(P_ref).
    pub fn energy(&self, p: f64, q: f64, reference: EnergyRef) -> Result<f64> {
        let p_ref = match reference {
            EnergyRef::Plus => self.p_plus,
            EnergyRef::Minus => self.p_minus,
        };
        let v = q / p;
        Ok(self.potential(p)? - 0.5 * v * v - self.potential(p_ref)?)
    }

    /// Lyapunov function L(P,Q) = ½(Q/P)² − F(P) + F(P⁺); L(P⁺,0) = 0 and L
    /// decays along the full flow exactly as fast as H grows.
    pub fn lyapunov(&self, p: f64, q: f64) -> Result<f64> {
        let v = q / p;
        Ok(0.5 * v * v - self.potential(p)? + self.potential(self.p_plus)?)
    }

    /// Growth rate of H along the full system: (2sμ/k²)(Q/P)².
    #[inline]
    pub fn energy_rate(&self, p: f64, q: f64) -> f64 {
        let k2 = self.params.k * self.params.k;
        let v = q / p;
        2.0 * self.s * self.params.mu / k2 * v * v
    }

    /// Momentum along a profile: J(y) = s·P(y) − A.
    #[inline]
    pub fn momentum(&self, p: f64) -> f64 {
        self.s * p - self.a
    }

    /// Right-hand side of the full planar system (P′, Q′).
    #[inline]
    pub fn rhs_full(&self, state: [f64; 2]) -> [f64; 2] {
        let [p, q] = state;
        let k2 = self.params.k * self.params.k;
        [
            q,
            2.0 / k2 * self.f(p) - 2.0 * self.s * self.params.mu / k2 * q + q * q / p,
        ]
    }

    /// Right-hand side with the damping term dropped (conservative flow on
    /// the level sets of H).
    #[inline]
    pub fn rhs_reduced(&self, state: [f64; 2]) -> [f64; 2] {
        let [p, q] = state;
        let k2 = self.params.k * self.params.k;
        [q, 2.0 / k2 * self.f(p) + q * q / p]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rh::momentum_branches;

    fn demo_params() -> ModelParams {
        ModelParams::new(1.5, 0.3, std::f64::consts::SQRT_2).unwrap()
    }

    /// Admissible branch of the compression shock P⁺=1.2, P⁻=2, s=1, γ=3/2.
    fn demo_system() -> LinearWaveSystem {
        let b = momentum_branches(1.2, 2.0, 1.0, 1.5).unwrap();
        LinearWaveSystem::from_shock(&b.shock_2(), demo_params()).unwrap()
    }

    /// Standing configuration P⁺ = P⁻ = 2, u⁺ = 0.8 (J = 1.6), s = 0.
    fn standing_system() -> LinearWaveSystem {
        let shock = ShockData::new(2.0, 2.0, 1.6, 1.6, 0.0).unwrap();
        LinearWaveSystem::from_shock(&shock, demo_params()).unwrap()
    }

    // Reference values computed with 50-digit arithmetic.

    #[test]
    fn demo_invariants_and_roots() {
        let sys = demo_system();
        assert!((sys.a - 2.1311215263802706).abs() < 1e-14, "A = {}", sys.a);
        assert!((sys.b - 2.9681450784666067).abs() < 1e-14, "B = {}", sys.b);
        assert!(sys.f(1.2).abs() < 1e-13);
        assert!(sys.f(2.0).abs() < 1e-13);
        assert_eq!(sys.larger_root(), 2.0);
        assert_eq!(sys.smaller_root(), 1.2);
        assert!(!sys.is_standing());
    }

    #[test]
    fn standing_invariants() {
        let sys = standing_system();
        assert_eq!(sys.a, -1.6); // A = −J⁺ when s = 0
        assert!((sys.b - 4.1084271247461901).abs() < 1e-14);
        assert!(sys.f(2.0).abs() < 1e-13);
        // f′(P⁺) = γ P^(γ−1) − u⁺² > 0: subsonic standing state is a saddle
        assert!((sys.f_prime(2.0) - 1.4813203435596426).abs() < 1e-14);
        assert!(sys.is_standing());
    }

    #[test]
    fn zero_offset_with_unequal_states_is_rejected() {
        // J± = s·P± gives A = 0 on both sides but P⁺ ≠ P⁻: contradictory.
        let shock = ShockData::new(1.2, 2.0, 1.2, 2.0, 1.0).unwrap();
        assert!(matches!(
            LinearWaveSystem::from_shock(&shock, demo_params()),
            Err(Error::ZeroMomentumOffset)
        ));
    }

    #[test]
    fn inconsistent_shock_is_rejected() {
        let b = momentum_branches(1.2, 2.0, 1.0, 1.5).unwrap();
        let mut shock = b.shock_2();
        shock.j_minus += 1e-6;
        assert!(matches!(
            LinearWaveSystem::from_shock(&shock, demo_params()),
            Err(Error::InconsistentShock { .. })
        ));
    }

    #[test]
    fn demo_f_prime_reference_values() {
        let sys = demo_system();
        assert!((sys.f_prime(1.2) - (-1.5107760498465671)).abs() < 1e-13);
        assert!((sys.f_prime(2.0) - 0.985900603509299).abs() < 1e-13);
        // convexity
        for i in 1..200 {
            let p = 0.05 * i as f64;
            assert!(sys.f_second(p) > 0.0, "f'' <= 0 at {p}");
        }
    }

    /// f can be written purely in terms of the end states:
    /// f(P) = p(P) + (P⁻P⁺/P)·Δp/ΔP − Δ(P·p(P))/ΔP. Cross-check against the
    /// (A, B) form at scattered points.
    #[test]
    fn end_state_form_agrees() {
        let sys = demo_system();
        let (pp, pm, gamma): (f64, f64, f64) = (1.2, 2.0, 1.5);
        let dq = (pp.powf(gamma) - pm.powf(gamma)) / (pp - pm);
        let dq1 = (pp.powf(gamma + 1.0) - pm.powf(gamma + 1.0)) / (pp - pm);
        for i in 1..=120 {
            let p = 0.05 * i as f64;
            let dual = p.powf(gamma) + pp * pm / p * dq - dq1;
            let rel = (sys.f(p) - dual).abs() / dual.abs().max(1.0);
            assert!(rel < 1e-12, "p={p} rel={rel}");
        }
    }

    #[test]
    fn potential_is_an_antiderivative_of_f_over_p_squared() {
        for sys in [demo_system(), standing_system()] {
            let k2 = sys.params.k * sys.params.k;
            for i in 1..=60 {
                let p = 0.1 * i as f64;
                let h = p * 6e-6;
                let fd = (sys.potential(p + h).unwrap() - sys.potential(p - h).unwrap())
                    / (2.0 * h);
                let expected = 2.0 / k2 * sys.f(p) / (p * p);
                let rel = (fd - expected).abs() / expected.abs().max(1.0);
                assert!(rel < 1e-7, "p={p} rel={rel}");
            }
        }
    }

    #[test]
    fn isothermal_branch_potential() {
        // P⁺=1, P⁻=2, s=1, γ=1: A = √2, As+B = 3, f(P) = P − 3 + 2/P.
        let b = momentum_branches(1.0, 2.0, 1.0, 1.0).unwrap();
        let params = ModelParams::new(1.0, 0.3, 1.0).unwrap();
        let sys = LinearWaveSystem::from_shock(&b.shock_2(), params).unwrap();
        assert!((sys.a - std::f64::consts::SQRT_2).abs() < 1e-14);
        assert!((sys.a * sys.s + sys.b - 3.0).abs() < 1e-14);
        assert!(sys.f(1.0).abs() < 1e-14);
        assert!(sys.f(2.0).abs() < 1e-14);
        // F(P) = 2(ln P + 3/P − 1/P²) for k = 1; F(1) = 2·(3−1) = 4
        assert!((sys.potential(1.0).unwrap() - 4.0).abs() < 1e-13);
        let k2 = 1.0;
        let p = 0.7;
        let h = 4e-6;
        let fd = (sys.potential(p + h).unwrap() - sys.potential(p - h).unwrap()) / (2.0 * h);
        assert!((fd - 2.0 / k2 * sys.f(p) / (p * p)).abs() < 1e-7);
    }

    #[test]
    fn potential_reference_difference() {
        let sys = demo_system();
        let diff = sys.potential(1.2).unwrap() - sys.potential(2.0).unwrap();
        assert!((diff - 0.05295664906757248).abs() < 1e-13, "diff = {diff}");
        assert!(diff > 0.0);
        // deep spike toward P → 0: −A²/(2P²) dominates, no clamping
        assert!(sys.potential(1e-6).unwrap() < -1e6);
    }

    #[test]
    fn potential_positive_between_roots_relative_to_saddle() {
        let sys = demo_system();
        let f_ref = sys.potential(2.0).unwrap();
        for i in 1..=40 {
            let p = 1.2 + (2.0 - 1.2) * (i as f64) / 41.0;
            assert!(sys.potential(p).unwrap() - f_ref > 0.0, "p={p}");
        }
    }

    #[test]
    fn energy_identities() {
        let sys = demo_system();
        assert_eq!(sys.energy(2.0, 0.0, EnergyRef::Minus).unwrap(), 0.0);
        assert_eq!(sys.lyapunov(1.2, 0.0).unwrap(), 0.0);
        let gap = sys.potential(1.2).unwrap() - sys.potential(2.0).unwrap();
        for (p, q) in [(1.3, 0.2), (1.9, -0.7), (0.99, 1.4), (3.0, 0.01)] {
            let h_minus = sys.energy(p, q, EnergyRef::Minus).unwrap();
            let h_plus = sys.energy(p, q, EnergyRef::Plus).unwrap();
            assert!((h_minus - h_plus - gap).abs() < 1e-13);
            // L + H(·, ref −) = F(P⁺) − F(P⁻) pointwise
            let l = sys.lyapunov(p, q).unwrap();
            assert!((l + h_minus - gap).abs() < 1e-13);
        }
    }

    #[test]
    fn momentum_profile_hits_end_states() {
        let sys = demo_system();
        assert!((sys.momentum(1.2) - (-0.9311215263802706)).abs() < 1e-13);
        assert!((sys.momentum(2.0) - (-0.13112152638027057)).abs() < 1e-13);
        let st = standing_system();
        assert_eq!(st.momentum(0.5), 1.6);
        assert_eq!(st.momentum(7.0), 1.6); // constant momentum when s = 0
    }

    #[test]
    fn energy_rate_matches_field_along_trajectory_directions() {
        // d/dy H(P,Q) along the full field equals (2sμ/k²)(Q/P)²; check the
        // chain rule symbolically via finite differences of H in state space.
        let sys = demo_system();
        for (p, q) in [(1.5, -0.4), (1.8, 0.3), (1.21, -0.05)] {
            let [dp, dq] = sys.rhs_full([p, q]);
            let h = 1e-6;
            let h_p = (sys.energy(p + h, q, EnergyRef::Minus).unwrap()
                - sys.energy(p - h, q, EnergyRef::Minus).unwrap())
                / (2.0 * h);
            let h_q = (sys.energy(p, q + h, EnergyRef::Minus).unwrap()
                - sys.energy(p, q - h, EnergyRef::Minus).unwrap())
                / (2.0 * h);
            let total = h_p * dp + h_q * dq;
            let rel = (total - sys.energy_rate(p, q)).abs() / sys.energy_rate(p, q).abs();
            assert!(rel < 1e-6, "p={p} q={q} rel={rel}");
        }
    }

    #[test]
    fn domain_errors() {
        let sys = demo_system();
        assert!(matches!(sys.f_family(0.0), Err(Error::NonPositiveDensity(_))));
        assert!(matches!(sys.potential(-1.0), Err(Error::NonPositiveDensity(_))));
    }
}
