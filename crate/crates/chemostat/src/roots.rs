//! Bracketed root finding for monotone scalar maps.
//!
//! Every equation solved in this crate is strictly monotone on its bracket,
//! so plain bisection converges unconditionally. The bracket is narrowed to
//! the requested width and then polished with a few secant steps.

use crate::error::{Error, Result};
use crate::Scalar;

/// Argument tolerance used by default throughout the crate.
pub fn default_xtol<F: Scalar>() -> F {
    F::c(1e-12)
}

/// Root of `f` on `[lo, hi]`, assuming `f(lo)` and `f(hi)` have opposite
/// signs (either endpoint may be exactly zero).
pub fn bisect<F, G>(f: G, lo: F, hi: F, xtol: F) -> Result<F>
where
    F: Scalar,
    G: Fn(F) -> F,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == F::zero() {
        return Ok(lo);
    }
    if fhi == F::zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::RootFinding(format!(
            "no sign change on bracket [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}"
        )));
    }
    let two = F::c(2.0);
    while hi - lo > xtol {
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break; // bracket narrower than machine spacing
        }
        let fmid = f(mid);
        if fmid == F::zero() {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }

    // A few secant iterations sharpen the value well below the bracket width.
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..3 {
        let denom = fb - fa;
        if denom == F::zero() {
            break;
        }
        let c = b - fb * (b - a) / denom;
        if !c.is_finite() || c < lo || c > hi {
            break;
        }
        let fc = f(c);
        a = b;
        fa = fb;
        b = c;
        fb = fc;
        if fc == F::zero() {
            break;
        }
    }
    Ok(b)
}

/// Expands `hi` geometrically from `start` until `f` changes sign relative
/// to `f(lo)`, then bisects. Returns `None` if no sign change is found
/// within `max_doublings`.
pub fn bisect_expanding<F, G>(f: G, lo: F, start: F, xtol: F, max_doublings: u32) -> Option<F>
where
    F: Scalar,
    G: Fn(F) -> F,
{
    let flo = f(lo);
    if flo == F::zero() {
        return Some(lo);
    }
    let mut hi = start;
    let two = F::c(2.0);
    for _ in 0..max_doublings {
        let fhi = f(hi);
        if fhi.is_finite() && fhi.signum() != flo.signum() {
            return bisect(f, lo, hi, xtol).ok();
        }
        hi = hi * two;
    }
    None
}
