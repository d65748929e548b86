#![allow(dead_code)]

//! Test-only oracles, independent of the library's code paths.

use num_complex::Complex64;

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
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
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// `(2/√π) ∫_x^∞ e^{−t²} dt`, integrated to `max(x, 0) + 12` where the tail is below 1e−60.
pub fn erfc_quadrature(x: f64) -> f64 {
    let upper = x.max(0.0) + 12.0;
    let integrand = |t: f64| (-t * t).exp();
    // split at 0 and near x so the peak is resolved
    let mut total = 0.0;
    let mut knots = vec![x];
    for k in [-2.0, -1.0, 0.0, 1.0, 2.0, 4.0] {
        if k > x && k < upper {
            knots.push(k);
        }
    }
    knots.push(upper);
    for w in knots.windows(2) {
        total += adaptive_simpson(&integrand, w[0], w[1], 1e-15);
    }
    std::f64::consts::FRAC_2_SQRT_PI * total
}

/// Brute-force optimum over all nonempty subsets, from plain (a, φ) pairs.
/// Returns (best power, selected indices) without any tie rule beyond
/// "first strictly better in mask order".
pub fn brute_force_best(pairs: &[(f64, f64)]) -> (f64, Vec<usize>) {
    let k = pairs.len();
    let mut best = (f64::NEG_INFINITY, vec![]);
    for mask in 1u32..(1 << k) {
        let members: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let sum: Complex64 = members
            .iter()
            .map(|&i| Complex64::new(pairs[i].0 * pairs[i].1.cos(), pairs[i].0 * pairs[i].1.sin()))
            .fold(Complex64::new(0.0, 0.0), |acc, z| acc + z);
        let p = sum.norm_sqr() / members.len() as f64;
        if p > best.0 {
            best = (p, members);
        }
    }
    best
}
