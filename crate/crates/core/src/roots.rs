//! Bracketed scalar root-finding (Brent's method).
//!
//! Everything structural in this crate — momentum offsets, second roots of
//! the profile forcing, turning points, level-set crossings — reduces to a
//! root of a smooth scalar function inside a known bracket, so one careful
//! implementation serves them all. Inverse-quadratic / secant steps with a
//! bisection fallback; converges to a bracket of width ≤ tol·max(1, |x|).

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Find x in [lo, hi] with f(x) = 0. Requires a sign change (or an exact
/// zero at an endpoint). `tol` is interpreted relative to max(1, |x|).
pub fn bracketed_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    for (x, fx) in [(a, fa), (b, fb)] {
        if !fx.is_finite() {
            return Err(Error::NonFiniteEval { x });
        }
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }

    // b is the best iterate, a its counterpart with opposite sign, c the
    // previous b.
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 0.5 * tol * b.abs().max(1.0);
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // interpolation step: secant, or inverse quadratic when a, b, c
            // are distinct
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * xm * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q / 2.0).abs() * 2.0) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NonFiniteEval { x: b });
        }
    }
    Err(Error::IterationLimit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bracketed_root(|x| x * x - 2.0, 1.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn handles_inflection_at_root() {
        let r = bracketed_root(|x| x * x * x, -1.0, 1.0, 1e-12).unwrap();
        assert!(r.abs() < 1e-11);
    }

    #[test]
    fn exact_zero_at_endpoint() {
        assert_eq!(bracketed_root(|x| x - 3.0, 3.0, 5.0, 1e-12).unwrap(), 3.0);
        assert_eq!(bracketed_root(|x| x - 5.0, 3.0, 5.0, 1e-12).unwrap(), 5.0);
    }

    #[test]
    fn rejects_missing_sign_change() {
        assert!(matches!(
            bracketed_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn rejects_non_finite_values() {
        assert!(matches!(
            bracketed_root(|x| (x - 0.5).ln(), 0.5, 2.0, 1e-12),
            Err(Error::NonFiniteEval { .. })
        ));
    }

    #[test]
    fn recovers_profile_forcing_root() {
        // the smaller root of the demo forcing from the traveling-wave module
        let branches = crate::rh::momentum_branches(1.2, 2.0, 1.0, 1.5).unwrap();
        let params = crate::model::ModelParams::new(1.5, 0.3, std::f64::consts::SQRT_2).unwrap();
        let sys = crate::linear::LinearWaveSystem::from_shock(&branches.shock_2(), params).unwrap();
        let r = bracketed_root(|p| sys.f(p), 1.0, 1.5, 1e-14).unwrap();
        assert!((r - 1.2).abs() < 1e-12);
    }

    #[test]
    fn steep_and_flat_mixtures_converge() {
        // steep exponential against a flat tail; derivative spans ~1e5
        let r = bracketed_root(|x| (20.0 * x).exp() - 1.5, -1.0, 1.0, 1e-14).unwrap();
        assert!((r - 1.5f64.ln() / 20.0).abs() < 1e-13);
        // very flat near the root
        let r = bracketed_root(|x| (x - 0.7).powi(5), 0.0, 1.0, 1e-9).unwrap();
        assert!((r - 0.7).abs() < 2e-2); // quintic flatness limits attainable x-accuracy
    }
}
