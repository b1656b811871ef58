//! Explicit Runge–Kutta solvers (classic RK4, Fehlberg 4(5)) with terminal
//! event location by bisection.

use nalgebra::SVector;

use crate::{Error, Result};

type State<const N: usize> = SVector<f64, N>;

/// Time-stepping method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Rk4 { step: f64 },
    Rkf45 { atol: f64, rtol: f64, initial_step: f64, max_steps: usize },
}

/// Step-size controller for the adaptive method.
#[derive(Debug, Clone, Copy)]
pub struct StepController {
    pub safety: f64,
    pub min_factor: f64,
    pub max_factor: f64,
}

impl Default for StepController {
    fn default() -> Self {
        StepController { safety: 0.9, min_factor: 0.2, max_factor: 5.0 }
    }
}

impl StepController {
    fn factor(&self, err: f64) -> f64 {
        if err == 0.0 {
            return self.max_factor;
        }
        (self.safety * err.powf(-0.2)).clamp(self.min_factor, self.max_factor)
    }
}

/// Width, in the independent variable, below which event bisection stops.
pub const EVENT_TOL: f64 = 1e-10;

/// How a solve ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    /// Reached the end of the range.
    Completed,
    /// An event function changed sign (`event = Some(k)`) or the right-hand
    /// side failed (`cause = Some(err)`) between `t` and `t + EVENT_TOL`.
    Event { t: f64, event: Option<usize>, cause: Option<Error> },
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub ts: Vec<f64>,
    pub ys: Vec<State<N>>,
    pub termination: Termination,
    pub accepted: usize,
    pub rejected: usize,
}

pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &State<N>, h: f64) -> Result<State<N>>
where
    F: Fn(f64, &State<N>) -> Result<State<N>>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &(y + k1 * (0.5 * h)))?;
    let k3 = f(t + 0.5 * h, &(y + k2 * (0.5 * h)))?;
    let k4 = f(t + h, &(y + k3 * h))?;
    Ok(y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// One Fehlberg step; returns the fifth-order solution and the embedded error estimate.
pub fn rkf45_step<const N: usize, F>(f: &F, t: f64, y: &State<N>, h: f64) -> Result<(State<N>, State<N>)>
where
    F: Fn(f64, &State<N>) -> Result<State<N>>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + h / 4.0, &(y + k1 * (h / 4.0)))?;
    let k3 = f(t + 3.0 * h / 8.0, &(y + (k1 * (3.0 / 32.0) + k2 * (9.0 / 32.0)) * h))?;
    let k4 = f(
        t + 12.0 * h / 13.0,
        &(y + (k1 * (1932.0 / 2197.0) - k2 * (7200.0 / 2197.0) + k3 * (7296.0 / 2197.0)) * h),
    )?;
    let k5 = f(
        t + h,
        &(y + (k1 * (439.0 / 216.0) - k2 * 8.0 + k3 * (3680.0 / 513.0) - k4 * (845.0 / 4104.0)) * h),
    )?;
    let k6 = f(
        t + h / 2.0,
        &(y + (k1 * (-8.0 / 27.0) + k2 * 2.0 - k3 * (3544.0 / 2565.0) + k4 * (1859.0 / 4104.0)
            - k5 * (11.0 / 40.0))
            * h),
    )?;
    let y4 = y + (k1 * (25.0 / 216.0) + k3 * (1408.0 / 2565.0) + k4 * (2197.0 / 4104.0) - k5 * 0.2) * h;
    let y5 = y
        + (k1 * (16.0 / 135.0) + k3 * (6656.0 / 12825.0) + k4 * (28561.0 / 56430.0) - k5 * (9.0 / 50.0)
            + k6 * (2.0 / 55.0))
            * h;
    let err = y5 - y4;
    Ok((y5, err))
}

fn first_violated<const N: usize>(events: &[&dyn Fn(f64, &State<N>) -> f64], t: f64, y: &State<N>) -> Option<usize> {
    events.iter().position(|e| {
        let v = e(t, y);
        !(v > 0.0)
    })
}

enum Trial<const N: usize> {
    Ok(State<N>),
    Bad { event: Option<usize>, cause: Option<Error> },
}

fn trial<const N: usize, F>(
    f: &F,
    events: &[&dyn Fn(f64, &State<N>) -> f64],
    t: f64,
    y: &State<N>,
    h: f64,
) -> Trial<N>
where
    F: Fn(f64, &State<N>) -> Result<State<N>>,
{
    match rk4_step(f, t, y, h) {
        Err(e) => Trial::Bad { event: None, cause: Some(e) },
        Ok(yn) => {
            if !yn.iter().all(|v| v.is_finite()) {
                return Trial::Bad { event: None, cause: None };
            }
            match first_violated(events, t + h, &yn) {
                Some(k) => Trial::Bad { event: Some(k), cause: None },
                None => Trial::Ok(yn),
            }
        }
    }
}

/// Bisects the step `[t, t + h]` whose end is known to be bad. Returns the
/// last good state and the classification of the first bad one.
fn locate<const N: usize, F>(
    f: &F,
    events: &[&dyn Fn(f64, &State<N>) -> f64],
    t: f64,
    y: &State<N>,
    h: f64,
    mut bad_event: Option<usize>,
    mut bad_cause: Option<Error>,
) -> (f64, State<N>, Option<usize>, Option<Error>)
where
    F: Fn(f64, &State<N>) -> Result<State<N>>,
{
    let (mut lo, mut hi) = (0.0_f64, h);
    let mut y_lo = *y;
    while (hi - lo).abs() > EVENT_TOL {
        let mid = 0.5 * (lo + hi);
        match trial(f, events, t, y, mid) {
            Trial::Ok(ym) => {
                lo = mid;
                y_lo = ym;
            }
            Trial::Bad { event, cause } => {
                hi = mid;
                bad_event = event;
                bad_cause = cause;
            }
        }
    }
    (t + lo, y_lo, bad_event, bad_cause)
}

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`. Each event function must
/// be positive at admissible states; the solve stops where one first fails.
pub fn solve<const N: usize, F>(
    f: F,
    events: &[&dyn Fn(f64, &State<N>) -> f64],
    t0: f64,
    y0: State<N>,
    t1: f64,
    method: Method,
) -> Result<Solution<N>>
where
    F: Fn(f64, &State<N>) -> Result<State<N>>,
{
    if !(t1 > t0) {
        return Err(Error::InvalidArgument(format!("integration range [{t0}, {t1}] is empty")));
    }
    let mut sol = Solution { ts: vec![t0], ys: vec![y0], termination: Termination::Completed, accepted: 0, rejected: 0 };
    let mut t = t0;
    let mut y = y0;
    let span = t1 - t0;
    match method {
        Method::Rk4 { step } => {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
            }
            let n = (span / step).round().max(1.0) as usize;
            for k in 0..n {
                let tk = t0 + span * (k as f64) / (n as f64);
                let tn = if k + 1 == n { t1 } else { t0 + span * ((k + 1) as f64) / (n as f64) };
                let h = tn - tk;
                match trial(&f, events, t, &y, h) {
                    Trial::Ok(yn) => {
                        t = tn;
                        y = yn;
                        sol.ts.push(t);
                        sol.ys.push(y);
                        sol.accepted += 1;
                    }
                    Trial::Bad { event, cause } => {
                        let (te, ye, event, cause) = locate(&f, events, t, &y, h, event, cause);
                        if te > t {
                            sol.ts.push(te);
                            sol.ys.push(ye);
                        }
                        sol.termination = Termination::Event { t: te, event, cause };
                        return Ok(sol);
                    }
                }
            }
        }
        Method::Rkf45 { atol, rtol, initial_step, max_steps } => {
            let ctl = StepController::default();
            let mut h = initial_step.min(span);
            if !(h > 0.0) {
                return Err(Error::InvalidArgument(format!("initial step must be positive, got {initial_step}")));
            }
            let h_min = 1e-14 * t0.abs().max(t1.abs()).max(1.0);
            let mut steps = 0usize;
            while t < t1 {
                steps += 1;
                if steps > max_steps {
                    return Err(Error::StepFailure { x0: t, reason: format!("exceeded {max_steps} steps") });
                }
                let last = t + h >= t1;
                if last {
                    h = t1 - t;
                }
                match rkf45_step(&f, t, &y, h) {
                    Err(e) => {
                        sol.rejected += 1;
                        if h < h_min {
                            sol.termination = Termination::Event { t, event: None, cause: Some(e) };
                            return Ok(sol);
                        }
                        h *= 0.25;
                        continue;
                    }
                    Ok((yn, err)) => {
                        let mut en: f64 = 0.0;
                        for i in 0..N {
                            let sc = atol + rtol * y[i].abs().max(yn[i].abs());
                            en = en.max(err[i].abs() / sc);
                        }
                        if !en.is_finite() {
                            sol.rejected += 1;
                            if h < h_min {
                                return Err(Error::StepFailure { x0: t, reason: "non-finite error estimate".into() });
                            }
                            h *= 0.25;
                            continue;
                        }
                        if en > 1.0 {
                            sol.rejected += 1;
                            h *= ctl.factor(en);
                            if h < h_min {
                                return Err(Error::StepFailure { x0: t, reason: format!("step size underflow ({h:e})") });
                            }
                            continue;
                        }
                        let tn = if last { t1 } else { t + h };
                        if let Some(k) = first_violated(events, tn, &yn) {
                            let (te, ye, event, cause) = locate(&f, events, t, &y, tn - t, Some(k), None);
                            if te > t {
                                sol.ts.push(te);
                                sol.ys.push(ye);
                            }
                            sol.termination = Termination::Event { t: te, event, cause };
                            return Ok(sol);
                        }
                        t = tn;
                        y = yn;
                        sol.ts.push(t);
                        sol.ys.push(y);
                        sol.accepted += 1;
                        h *= ctl.factor(en);
                    }
                }
            }
        }
    }
    Ok(sol)
}
