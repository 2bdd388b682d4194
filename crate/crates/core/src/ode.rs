//! Adaptive explicit Runge–Kutta integration for the planar profile
//! systems: embedded 5(4) Dormand–Prince pair, first-same-as-last, a
//! quartic dense interpolant on every accepted step, and sign-change event
//! detection on that interpolant.
//!
//! The state is fixed at two components — every system in this crate is a
//! planar one — which keeps the inner loop allocation-free.

use crate::error::{Error, Result};
use crate::roots::bracketed_root;

/// Butcher nodes.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
/// Stage coefficients, row i giving the weights of stages 0..i.
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] =
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
/// Fifth-order solution weights (also row 7: the pair is first-same-as-last).
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
/// Error weights (difference between the 5th- and 4th-order solutions).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
/// Dense-output weights for the quartic interpolant.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Sub-samples per accepted step when scanning for event sign changes.
const EVENT_SCAN: usize = 8;
/// Relative tolerance for the located event abscissa.
const EVENT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    /// First step size; estimated from the initial slope when `None`.
    pub h_init: Option<f64>,
    pub max_step: Option<f64>,
    /// Budget for accepted + rejected steps.
    pub max_steps: usize,
    /// Reject any step whose endpoint drives the first component to zero or
    /// below. Off by default: states that legitimately touch zero (vacuum
    /// limits) must stay representable.
    pub enforce_positivity: bool,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            max_step: None,
            max_steps: 1_000_000,
            enforce_positivity: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventAction {
    /// Log the crossing and keep going.
    Record,
    /// Log the crossing, truncate the trajectory there, and return.
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDirection {
    Any,
    /// Fire only when the function crosses from negative to positive.
    Rising,
    /// Fire only when the function crosses from positive to negative.
    Falling,
}

/// A scalar function of the state whose sign changes are located on the
/// dense interpolant. A zero at the very start of the integration does not
/// fire — seed slightly off an event surface to count it.
pub struct Event<'a> {
    pub name: &'static str,
    pub func: Box<dyn Fn(f64, [f64; 2]) -> f64 + 'a>,
    pub action: EventAction,
    pub direction: EventDirection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventHit {
    /// Index into the events passed to [`integrate`].
    pub event: usize,
    pub name: &'static str,
    pub t: f64,
    pub state: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedEnd,
    StoppedByEvent(usize),
}

/// One accepted step's interpolant: y(θ) for θ = (t − t0)/h in [0, 1].
#[derive(Debug, Clone, Copy)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    rcont: [[f64; 2]; 5],
}

impl DenseSegment {
    pub fn eval(&self, t: f64) -> [f64; 2] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = self.rcont;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
        out
    }
}

#[derive(Debug)]
pub struct Trajectory {
    /// Accepted step endpoints, starting with the seed.
    pub samples: Vec<(f64, [f64; 2])>,
    pub events: Vec<EventHit>,
    pub segments: Vec<DenseSegment>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub rhs_evals: usize,
    pub terminated_by: Termination,
}

impl Trajectory {
    pub fn t_start(&self) -> f64 {
        self.samples.first().map(|s| s.0).unwrap_or(f64::NAN)
    }

    pub fn t_end(&self) -> f64 {
        self.samples.last().map(|s| s.0).unwrap_or(f64::NAN)
    }

    pub fn final_state(&self) -> [f64; 2] {
        self.samples.last().map(|s| s.1).unwrap_or([f64::NAN; 2])
    }

    /// Evaluate the dense interpolant; `None` outside the integrated span.
    pub fn eval(&self, t: f64) -> Option<[f64; 2]> {
        if self.segments.is_empty() || t < self.t_start() || t > self.t_end() {
            return None;
        }
        if t == self.t_start() {
            return Some(self.samples[0].1);
        }
        // segments are ordered by t0; find the one containing t
        let idx = self
            .segments
            .partition_point(|seg| seg.t0 + seg.h < t)
            .min(self.segments.len() - 1);
        Some(self.segments[idx].eval(t))
    }
}

fn rms_error(err: [f64; 2], y0: [f64; 2], y1: [f64; 2], atol: f64, rtol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let sc = atol + rtol * y0[i].abs().max(y1[i].abs());
        let e = err[i] / sc;
        acc += e * e;
    }
    (acc / 2.0).sqrt()
}

fn initial_step(
    rhs: &dyn Fn(f64, [f64; 2]) -> [f64; 2],
    t0: f64,
    y0: [f64; 2],
    span: f64,
    opts: &IntegrateOptions,
) -> f64 {
    let f0 = rhs(t0, y0);
    let sc = |i: usize| opts.atol + opts.rtol * y0[i].abs();
    let d0 = ((y0[0] / sc(0)).powi(2) + (y0[1] / sc(1)).powi(2)).sqrt();
    let d1 = ((f0[0] / sc(0)).powi(2) + (f0[1] / sc(1)).powi(2)).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = [y0[0] + h0 * f0[0], y0[1] + h0 * f0[1]];
    let f1 = rhs(t0 + h0, y1);
    let d2 = (((f1[0] - f0[0]) / sc(0)).powi(2) + ((f1[1] - f0[1]) / sc(1)).powi(2)).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    let mut h = h1.min(100.0 * h0).min(span);
    if let Some(hm) = opts.max_step {
        h = h.min(hm);
    }
    if !h.is_finite() || h <= 0.0 {
        h = 1e-6_f64.min(span);
    }
    h
}

/// Integrate the planar system forward from `t0` to `t_end`, locating event
/// crossings along the way. Fails loudly instead of returning a partial
/// answer: step-size underflow, budget exhaustion, and (when enabled)
/// positivity loss are all hard errors.
pub fn integrate(
    rhs: &dyn Fn(f64, [f64; 2]) -> [f64; 2],
    t0: f64,
    t_end: f64,
    y0: [f64; 2],
    events: &[Event<'_>],
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    if !(t_end > t0) {
        return Err(Error::InvalidParams(format!(
            "integration span must be forward and nonempty: [{t0}, {t_end}]"
        )));
    }
    if !(y0[0].is_finite() && y0[1].is_finite()) {
        return Err(Error::NonFiniteState { y: t0 });
    }
    let f0 = rhs(t0, y0);
    if !(f0[0].is_finite() && f0[1].is_finite()) {
        return Err(Error::NonFiniteState { y: t0 });
    }

    let mut traj = Trajectory {
        samples: vec![(t0, y0)],
        events: Vec::new(),
        segments: Vec::new(),
        steps_accepted: 0,
        steps_rejected: 0,
        rhs_evals: 3, // f0 plus the two probes in initial_step
        terminated_by: Termination::ReachedEnd,
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = f0; // first-same-as-last
    let mut h = opts.h_init.unwrap_or_else(|| initial_step(rhs, t0, y0, t_end - t0, opts));
    if let Some(hm) = opts.max_step {
        h = h.min(hm);
    }
    let mut event_values: Vec<f64> = events.iter().map(|e| (e.func)(t0, y0)).collect();
    let mut just_rejected = false;

    loop {
        if traj.steps_accepted + traj.steps_rejected >= opts.max_steps {
            return Err(Error::MaxStepsExceeded { y: t });
        }
        if !h.is_finite() || h <= (t.abs().max(1.0)) * f64::EPSILON * 4.0 {
            return Err(Error::StepSizeUnderflow { y: t });
        }
        let mut last = false;
        if t + h >= t_end {
            h = t_end - t;
            last = true;
        }

        // the six fresh stages (k1 carried over)
        let stage = |acc: &[f64], ks: &[[f64; 2]]| {
            let mut yi = y;
            for (a, k) in acc.iter().zip(ks) {
                yi[0] += h * a * k[0];
                yi[1] += h * a * k[1];
            }
            yi
        };
        let k2 = rhs(t + C[1] * h, stage(&A2, &[k1]));
        let k3 = rhs(t + C[2] * h, stage(&A3, &[k1, k2]));
        let k4 = rhs(t + C[3] * h, stage(&A4, &[k1, k2, k3]));
        let k5 = rhs(t + C[4] * h, stage(&A5, &[k1, k2, k3, k4]));
        let k6 = rhs(t + C[5] * h, stage(&A6, &[k1, k2, k3, k4, k5]));
        let y1 = stage(&B, &[k1, k2, k3, k4, k5, k6]);
        let k7 = rhs(t + h, y1);
        traj.rhs_evals += 6;

        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err = [0.0; 2];
        for i in 0..2 {
            for (e, k) in E.iter().zip(&ks) {
                err[i] += e * k[i];
            }
            err[i] *= h;
        }
        let finite = y1.iter().chain(err.iter()).all(|v| v.is_finite());
        let err_norm =
            if finite { rms_error(err, y, y1, opts.atol, opts.rtol) } else { f64::INFINITY };

        if !err_norm.is_finite() {
            h *= 0.2;
            traj.steps_rejected += 1;
            just_rejected = true;
            continue;
        }
        if err_norm > 1.0 {
            h *= (0.9 * err_norm.powf(-0.2)).max(0.2);
            traj.steps_rejected += 1;
            just_rejected = true;
            continue;
        }
        if opts.enforce_positivity && y1[0] <= 0.0 {
            h *= 0.5;
            traj.steps_rejected += 1;
            just_rejected = true;
            if h <= (t.abs().max(1.0)) * f64::EPSILON * 4.0 {
                return Err(Error::PositivityLoss { y: t });
            }
            continue;
        }

        // accepted: build the dense interpolant for this step
        let mut rcont = [[0.0; 2]; 5];
        for i in 0..2 {
            let ydiff = y1[i] - y[i];
            let bspl = h * k1[i] - ydiff;
            rcont[0][i] = y[i];
            rcont[1][i] = ydiff;
            rcont[2][i] = bspl;
            rcont[3][i] = ydiff - h * k7[i] - bspl;
            let mut acc = 0.0;
            for (d, k) in D.iter().zip(&ks) {
                acc += d * k[i];
            }
            rcont[4][i] = h * acc;
        }
        let segment = DenseSegment { t0: t, h, rcont };

        // event scan on the interpolant
        let mut hits: Vec<(f64, usize)> = Vec::new();
        for (ie, ev) in events.iter().enumerate() {
            let mut g_prev = event_values[ie];
            let mut t_prev = t;
            for j in 1..=EVENT_SCAN {
                let tj = if j == EVENT_SCAN {
                    t + h
                } else {
                    t + h * (j as f64 / EVENT_SCAN as f64)
                };
                let g_j = (ev.func)(tj, segment.eval(tj));
                let crossed = (g_prev < 0.0 && g_j >= 0.0) || (g_prev > 0.0 && g_j <= 0.0);
                if crossed {
                    let ok = match ev.direction {
                        EventDirection::Any => true,
                        EventDirection::Rising => g_prev < 0.0,
                        EventDirection::Falling => g_prev > 0.0,
                    };
                    if ok {
                        let t_hit = if g_j == 0.0 {
                            tj
                        } else {
                            bracketed_root(
                                |tt| (ev.func)(tt, segment.eval(tt)),
                                t_prev,
                                tj,
                                EVENT_TOL,
                            )?
                        };
                        hits.push((t_hit, ie));
                    }
                }
                g_prev = g_j;
                t_prev = tj;
            }
            event_values[ie] = g_prev;
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut stopped_at: Option<(f64, usize)> = None;
        for &(t_hit, ie) in &hits {
            traj.events.push(EventHit {
                event: ie,
                name: events[ie].name,
                t: t_hit,
                state: segment.eval(t_hit),
            });
            if events[ie].action == EventAction::Stop {
                stopped_at = Some((t_hit, ie));
                break;
            }
        }

        traj.steps_accepted += 1;
        traj.segments.push(segment);
        if let Some((t_hit, ie)) = stopped_at {
            traj.samples.push((t_hit, segment.eval(t_hit)));
            traj.terminated_by = Termination::StoppedByEvent(ie);
            return Ok(traj);
        }
        traj.samples.push((t + h, y1));
        t += h;
        y = y1;
        k1 = k7;
        if last {
            return Ok(traj);
        }

        let facmax = if just_rejected { 1.0 } else { 5.0 };
        just_rejected = false;
        let fac = (0.9 * err_norm.powf(-0.2)).clamp(0.2, facmax);
        h *= fac;
        if let Some(hm) = opts.max_step {
            h = h.min(hm);
        }
    }
}
