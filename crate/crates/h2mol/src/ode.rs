//! Adaptive Dormand-Prince 5(4) integration over complex state vectors,
//! with an embedded error estimate, PI step-size control, first-same-as-
//! last stage reuse, and event localization by bisection re-integration.
//!
//! The dynamics this serves is mildly nonlinear and non-stiff, but event
//! times (the dissociation detector) must be resolved far below the
//! natural step size, so the integrator re-integrates the bracketing step
//! to bisect the trigger to a requested tolerance instead of trusting
//! interpolation.

use num_complex::Complex64;

use crate::error::{H2Error, Result};

type C = Complex64;

/// Tolerances and step bounds for one integration.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Relative tolerance per component.
    pub rtol: f64,
    /// Absolute tolerance per component.
    pub atol: f64,
    /// Initial step size.
    pub h_init: f64,
    /// Largest permitted step size.
    pub h_max: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-3,
            h_max: 1.0,
        }
    }
}

/// Outcome of an event-watched integration.
#[derive(Debug, Clone)]
pub enum EventOutcome {
    /// Reached t_end without the trigger firing; carries the final state.
    Completed(Vec<C>),
    /// Trigger fired; carries the localized time and the state there.
    Event { t: f64, state: Vec<C> },
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// Fifth-order solution weights (also the last stage's row: FSAL).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Error weights b5 - b4.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `rhs` from `(t0, y0)` to `t_end`, calling `observer` after
/// every accepted step (including the final one). Returns the final state,
/// or the state at the step where the observer requested a stop.
///
/// # Arguments
/// * `rhs` - writes dy/dt for (t, y) into its third argument
/// * `t0`, `y0` - initial condition
/// * `t_end` - target time, `t_end > t0`
/// * `opts` - tolerances and step bounds
/// * `observer` - accepted-step callback `(t, y)`; return false to stop
pub fn integrate_adaptive<F, O>(
    mut rhs: F,
    t0: f64,
    y0: &[C],
    t_end: f64,
    opts: &OdeOptions,
    mut observer: O,
) -> Result<Vec<C>>
where
    F: FnMut(f64, &[C], &mut [C]),
    O: FnMut(f64, &[C]) -> bool,
{
    if !(t_end > t0) {
        return Err(H2Error::InvalidInput(format!(
            "integration needs t_end > t0, got [{t0}, {t_end}]"
        )));
    }
    let n = y0.len();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![C::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut ytmp = k1.clone();
    let mut ynew = k1.clone();
    rhs(t, &y, &mut k1);

    let mut h = opts.h_init.min(opts.h_max).min(t_end - t0);
    let mut err_prev: f64 = 1.0;
    let mut rejected_last = false;

    while t < t_end {
        h = h.min(t_end - t);
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(H2Error::StepUnderflow { t_last: t, h });
        }

        let stage = |ytmp: &mut [C], y: &[C], coeffs: &[(f64, &[C])], h: f64| {
            for i in 0..ytmp.len() {
                let mut acc = y[i];
                for (a, k) in coeffs {
                    acc += *a * h * k[i];
                }
                ytmp[i] = acc;
            }
        };

        stage(&mut ytmp, &y, &[(A21, &k1)], h);
        rhs(t + C2 * h, &ytmp, &mut k2);
        stage(&mut ytmp, &y, &[(A31, &k1), (A32, &k2)], h);
        rhs(t + C3 * h, &ytmp, &mut k3);
        stage(&mut ytmp, &y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h);
        rhs(t + C4 * h, &ytmp, &mut k4);
        stage(
            &mut ytmp,
            &y,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
            h,
        );
        rhs(t + C5 * h, &ytmp, &mut k5);
        stage(
            &mut ytmp,
            &y,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            h,
        );
        rhs(t + h, &ytmp, &mut k6);
        stage(
            &mut ynew,
            &y,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            h,
        );
        rhs(t + h, &ynew, &mut k7);

        // Scaled RMS error of the embedded 4th-order difference.
        let mut err_sq = 0.0;
        for i in 0..n {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
            err_sq += (e.norm() / sc).powi(2);
        }
        let err = (err_sq / n as f64).sqrt().max(1e-300);

        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&ynew);
            k1.copy_from_slice(&k7); // FSAL
            if !observer(t, &y) {
                return Ok(y);
            }
            // PI controller (order 5: exponent 1/5 with a weak integral term).
            let facmax = if rejected_last { 1.0 } else { 5.0 };
            let fac = 0.9 * err.powf(-0.2) * err_prev.powf(0.04);
            h = (h * fac.clamp(0.2, facmax)).min(opts.h_max);
            err_prev = err;
            rejected_last = false;
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h *= fac;
            rejected_last = true;
        }
    }
    Ok(y)
}

/// Integrates like `integrate_adaptive` while watching a boolean trigger.
/// When the trigger first fires on an accepted step, the event time is
/// localized to `event_tol` by bisecting the bracketing step with fresh
/// re-integrations from its start.
///
/// # Arguments
/// * `rhs` - writes dy/dt into its third argument
/// * `t0`, `y0` - initial condition
/// * `t_end` - time horizon
/// * `opts` - tolerances and step bounds
/// * `trigger` - event predicate on `(t, y)`
/// * `event_tol` - absolute tolerance on the event time
/// * `observer` - accepted-step callback, called up to and including the
///   last pre-event step; return false to stop early
pub fn integrate_with_event<F, G, O>(
    mut rhs: F,
    t0: f64,
    y0: &[C],
    t_end: f64,
    opts: &OdeOptions,
    trigger: G,
    event_tol: f64,
    mut observer: O,
) -> Result<EventOutcome>
where
    F: FnMut(f64, &[C], &mut [C]),
    G: Fn(f64, &[C]) -> bool,
    O: FnMut(f64, &[C]) -> bool,
{
    if trigger(t0, y0) {
        return Ok(EventOutcome::Event {
            t: t0,
            state: y0.to_vec(),
        });
    }
    // Walk in accepted steps, remembering the last trigger-free state and
    // stopping as soon as the trigger fires (the post-trigger trajectory
    // may diverge and is never needed).
    let mut t_clean = t0;
    let mut y_clean = y0.to_vec();
    let mut hit: Option<f64> = None;
    {
        let mut t_prev = t0;
        let mut y_prev = y0.to_vec();
        let result = integrate_adaptive(
            &mut rhs,
            t0,
            y0,
            t_end,
            opts,
            |t, y: &[C]| {
                if trigger(t, y) {
                    hit = Some(t);
                    t_clean = t_prev;
                    y_clean = y_prev.clone();
                    false
                } else {
                    t_prev = t;
                    y_prev.clear();
                    y_prev.extend_from_slice(y);
                    observer(t, y)
                }
            },
        );
        match (result, hit) {
            (Err(e), None) => return Err(e),
            (Ok(yf), None) => return Ok(EventOutcome::Completed(yf)),
            (_, Some(_)) => {}
        }
    }
    let mut lo = t_clean;
    let mut hi = hit.expect("bracket exists");
    while hi - lo > event_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let y_mid = integrate_adaptive(&mut rhs, t_clean, &y_clean, mid, opts, |_, _| true)?;
        if trigger(mid, &y_mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let state = integrate_adaptive(&mut rhs, t_clean, &y_clean, hi, opts, |_, _| true)?;
    Ok(EventOutcome::Event { t: hi, state })
}
