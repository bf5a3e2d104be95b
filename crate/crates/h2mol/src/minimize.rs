//! Scalar minimization and root bracketing for the variational search.
//!
//! Brent's method combines golden-section reliability with parabolic
//! interpolation speed; it needs no derivatives, which suits energy
//! surfaces evaluated through quadrature or closed forms alike. All
//! objectives return `Result` so that domain failures deep inside an
//! energy evaluation propagate out of the optimizer untouched.

use crate::error::{H2Error, Result};

/// Golden-section ratio used by Brent's method.
const CGOLD: f64 = 0.381_966_011_250_105_1;

/// Minimizes `f` on `[lo, hi]` to absolute x-tolerance `xtol`.
///
/// Returns `(x_min, f_min)`. Fails with `NoInteriorMinimum` when the
/// minimum sits at a bracket endpoint (the function keeps decreasing
/// toward the boundary), carrying the endpoint values for diagnostics.
///
/// # Arguments
/// * `f` - objective; may fail, failures abort the search
/// * `lo`, `hi` - search interval, `lo < hi`
/// * `xtol` - absolute tolerance on the minimizer location
/// * `max_iter` - iteration cap (generous; convergence is guaranteed)
pub fn brent_minimize<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(H2Error::InvalidInput(format!(
            "brent_minimize needs a finite interval with lo < hi, got [{lo}, {hi}]"
        )));
    }
    if !(xtol.is_finite() && xtol > 0.0) {
        return Err(H2Error::InvalidInput(format!("bad xtol {xtol}")));
    }
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;

    let (mut a, mut b) = (lo, hi);
    let mut x = a + CGOLD * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x)?;
    let mut fw = fx;
    let mut fv = fx;
    // Step sizes of the current and previous iterations.
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = xtol.max(f64::EPSILON * x.abs());
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut take_golden = true;
        if e.abs() > tol1 {
            // Parabolic fit through (v, fv), (w, fw), (x, fx).
            let r = (x - w) * (fx - fv);
            let q0 = (x - v) * (fx - fw);
            let mut p = (x - v) * q0 - (x - w) * r;
            let mut q = 2.0 * (q0 - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            e = d;
            // Accept only steps that stay inside and beat half the
            // step before last.
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m > x { tol1 } else { -tol1 };
                }
                take_golden = false;
            }
        }
        if take_golden {
            e = if x < m { b - x } else { a - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u)?;
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    // A minimizer pinned to the boundary with a lower-or-equal endpoint
    // value means the true minimum lies outside the bracket.
    let hugging = (x - lo).abs() <= 5.0 * xtol || (hi - x).abs() <= 5.0 * xtol;
    let endpoint_wins = f_lo <= fx + 1e-14 * fx.abs() || f_hi <= fx + 1e-14 * fx.abs();
    if hugging && endpoint_wins {
        return Err(H2Error::NoInteriorMinimum {
            lo,
            hi,
            f_lo,
            f_hi,
            f_best: fx,
        });
    }
    Ok((x, fx))
}

/// Root of `f` on `[a, b]` by bisection to absolute tolerance `xtol`.
/// Requires a sign change over the bracket.
///
/// # Arguments
/// * `f` - continuous function; may fail, failures abort
/// * `a`, `b` - bracket with `f(a)` and `f(b)` of opposite sign
/// * `xtol` - absolute tolerance on the root location
pub fn bisect_root<F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(H2Error::InvalidInput(format!(
            "bisect_root needs a finite interval with a < b, got [{a}, {b}]"
        )));
    }
    let fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(H2Error::BracketFailure(format!(
            "no sign change on [{a}, {b}]: f(a) = {fa:.6e}, f(b) = {fb:.6e}"
        )));
    }
    let (mut a, mut b, mut fa) = (a, b, fa);
    while b - a > xtol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break; // interval at floating-point resolution
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Switch point of a boolean predicate on `[a, b]` by bisection.
/// Requires `pred(a) != pred(b)`; returns the midpoint of the final
/// interval of width `xtol`.
///
/// # Arguments
/// * `pred` - monotone predicate (false -> true or true -> false once)
/// * `a`, `b` - bracket with differing predicate values
/// * `xtol` - absolute tolerance on the switch location
pub fn bisect_predicate<F>(mut pred: F, a: f64, b: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<bool>,
{
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(H2Error::InvalidInput(format!(
            "bisect_predicate needs a finite interval with a < b, got [{a}, {b}]"
        )));
    }
    let pa = pred(a)?;
    let pb = pred(b)?;
    if pa == pb {
        return Err(H2Error::BracketFailure(format!(
            "predicate does not switch on [{a}, {b}] (both {pa})"
        )));
    }
    let (mut a, mut b) = (a, b);
    while b - a > xtol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if pred(m)? == pa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
