//! Adaptive Simpson quadrature with caller-supplied split points.
//!
//! The integrands in this crate are smooth between known breakpoints
//! (test-function kinks, transform zeros), so adaptive Simpson with
//! splits at those points converges quickly and predictably.

/// Adaptive Simpson on [a, b] to the given absolute/relative tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol, abs_tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * (abs_tol + rel_tol * (left + right).abs()) {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, rel_tol, 0.5 * abs_tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, rel_tol, 0.5 * abs_tol, depth - 1)
}

/// Integrate with mandatory subdivision at the supplied interior points.
///
/// `splits` need not be sorted or in range; they are filtered and sorted.
pub fn integrate_with_splits<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    splits: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut pts: Vec<f64> = splits.iter().copied().filter(|x| *x > a && *x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let per = abs_tol / pts.len() as f64;
    pts.windows(2)
        .map(|w| integrate(f, w[0], w[1], rel_tol, per))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(&|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12, 1e-14);
        // antiderivative x^4/4 - x^2 + x
        let want = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert_relative_eq!(v, want, max_relative = 1e-12);
    }

    #[test]
    fn oscillatory_with_splits() {
        let f = |x: f64| (std::f64::consts::PI * x).sin().powi(2) / x.max(1e-300);
        let splits: Vec<f64> = (1..64).map(|k| k as f64).collect();
        let v = integrate_with_splits(&f, 1e-12, 64.0, &splits, 1e-10, 1e-12);
        // (1/2)(gamma + ln(2 pi 64) - Ci(128 pi)), frozen from a high-precision evaluation
        let want = 3.286_990_999_297_695_5;
        assert_relative_eq!(v, want, max_relative = 1e-8);
    }
}
