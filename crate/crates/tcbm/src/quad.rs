//! Adaptive Simpson integration with explicit breakpoints.

/// One adaptive pass on [a, b]; returns (value, error estimate).
/// The recursion carries the already-evaluated stencil so no point is
/// sampled twice.
#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> (f64, f64) {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let h = b - a;
    let left = h / 12.0 * (fa + 4.0 * flm + fm);
    let right = h / 12.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return (left + right + delta / 15.0, delta.abs() / 15.0);
    }
    let (lv, le) = simpson_rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1);
    let (rv, re) = simpson_rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
    (lv + rv, le + re)
}

/// Integrate f over [a, b]; `tol` is an absolute tolerance target.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    if a >= b {
        return (0.0, 0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 48)
}

/// Integrate over [a, b] split at the interior points of `cuts` (sorted or
/// not; values outside (a, b) are ignored).  Integrand may jump at the cuts.
pub(crate) fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    cuts: &[f64],
    tol: f64,
) -> (f64, f64) {
    let mut pts: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut value = 0.0;
    let mut err = 0.0;
    for w in pts.windows(2) {
        let piece_tol = tol * (w[1] - w[0]) / (b - a);
        let (v, e) = adaptive_simpson(f, w[0], w[1], piece_tol.max(1e-300));
        value += v;
        err += e;
    }
    (value, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_smooth_function() {
        let (v, e) = adaptive_simpson(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert_relative_eq!(v, 2.0, max_relative = 1e-10);
        assert!(e < 1e-9);
    }

    #[test]
    fn integrates_sqrt_endpoint_singularity() {
        // derivative blows up at 0, like the cap-area integrand at a tangent sphere
        let (v, _) = adaptive_simpson(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-12);
        assert_relative_eq!(v, 2.0 / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn breakpoints_handle_jumps() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let (v, _) = integrate_with_breakpoints(&f, 0.0, 1.0, &[0.3], 1e-12);
        assert_relative_eq!(v, 0.3 + 1.4, max_relative = 1e-12);
    }
}
