//! Scalar convex minimization helpers: golden-section on a bracket, and
//! geometric bracket expansion around a starting point.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimum of a unimodal `f` on `[lo, hi]`. Returns the
/// midpoint of the final bracket and the value there.
pub(crate) fn golden_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    max_iter: u32,
) -> (f64, f64) {
    debug_assert!(hi >= lo);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if hi - lo <= xtol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm);
    if f1 < fm && f1 <= f2 {
        (x1, f1)
    } else if f2 < fm {
        (x2, f2)
    } else {
        (xm, fm)
    }
}

/// Expands a bracket geometrically around `x0 > 0` (multiplicative steps)
/// until the objective increases on both sides, then golden-sections inside
/// it. Intended for convex objectives on `(0, ∞)`; `floor` and `ceil` clamp
/// the expansion.
pub(crate) fn golden_min_positive<F: FnMut(f64) -> f64>(
    mut f: F,
    x0: f64,
    floor: f64,
    ceil: f64,
    xtol_rel: f64,
) -> (f64, f64) {
    debug_assert!(x0 > 0.0 && floor > 0.0 && ceil > floor);
    let x0 = x0.clamp(floor, ceil);
    let mut lo = x0;
    let mut f_lo = f(lo);
    // walk down
    while lo > floor {
        let next = (lo / 4.0).max(floor);
        let f_next = f(next);
        if f_next >= f_lo {
            break;
        }
        lo = next;
        f_lo = f_next;
    }
    let mut hi = x0;
    let mut f_hi = f(hi);
    while hi < ceil {
        let next = (hi * 4.0).min(ceil);
        let f_next = f(next);
        if f_next >= f_hi {
            break;
        }
        hi = next;
        f_hi = f_next;
    }
    let lo_b = (lo / 4.0).max(floor);
    let hi_b = (hi * 4.0).min(ceil);
    golden_min(f, lo_b, hi_b, xtol_rel * (1.0 + hi_b), 200)
}
