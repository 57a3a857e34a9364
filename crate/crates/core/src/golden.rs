//! Golden-section maximization on a bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_8; // (√5 − 1) / 2

/// Maximizes `f` on `[a, b]` by golden-section search until the bracket is
/// narrower than `tol`. Returns the best evaluated point and its value.
///
/// No unimodality is assumed for correctness of the return value: it is
/// always a point that was actually evaluated, so the result is never worse
/// than the bracket ends. `−∞` values are handled by plain comparison.
pub fn maximize<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    debug_assert!(a <= b);
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // Enough iterations to shrink any f64 bracket below tol.
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if fc > best.1 {
            best = (c, fc);
        }
        if fd > best.1 {
            best = (d, fd);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    if fm > best.1 {
        best = (mid, fm);
    }
    best
}
