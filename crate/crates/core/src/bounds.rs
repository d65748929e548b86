//! Large-K power bounds.
//!
//! The normalized received power of the amplitude-threshold rule tends to
//! `(π/4)·f(r)` and that of the sector rule to `sin²α/(4α)·f(r)`, where
//!
//! ```text
//! f(r) = e^{r²} [erfc(r) + (2r/√π) e^{−r²}]²
//! ```
//!
//! Both are maximized numerically: `r*` by golden-section search and `α*`
//! by bisection on `cos α − sin α / (2α)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Below this the Maclaurin series for erf is used, above it the
/// continued fraction for erfc.
const SERIES_LIMIT: f64 = 2.5;

/// Complementary error function, `(2/√π) ∫_x^∞ e^{−t²} dt`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < SERIES_LIMIT {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// `erf(x) = (2/√π) e^{−x²} Σ_n 2ⁿ x^{2n+1} / (2n+1)!!`; every term is
/// positive, so there is no cancellation.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    while term > sum * 1e-17 {
        n += 1;
        term *= 2.0 * x2 / f64::from(2 * n + 1);
        sum += term;
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// `erfc(x) = e^{−x²}/√π · 1/(x + ½/(x + 1/(x + (3/2)/(x + …))))`,
/// evaluated with the modified Lentz method.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..500 {
        let a = f64::from(n) * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// `f(r) = e^{r²}[erfc(r) + (2r/√π)e^{−r²}]²`.
///
/// Evaluated as `[e^{r²/2} erfc(r) + (2r/√π) e^{−r²/2}]²` so neither factor
/// overflows for moderate `r`.
pub fn f_of_r(r: f64) -> f64 {
    let half = (0.5 * r * r).exp();
    let inner = half * erfc(r) + FRAC_2_SQRT_PI * r / half;
    inner * inner
}

/// Angular factor `sin²α / (4α)` of the sector bound.
pub fn sector_gain(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= PI) {
        return Err(Error::invalid(format!(
            "sector half-angle must lie in (0, π], got {alpha}"
        )));
    }
    let s = alpha.sin();
    Ok(s * s / (4.0 * alpha))
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Bisection for a root of `g` on `[lo, hi]`; `g(lo)` and `g(hi)` must differ in sign.
pub fn bisect<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::invalid(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximizer and maximum of `f` on `[0, 3]`.
pub fn maximize_f() -> (f64, f64) {
    let r_star = golden_section_max(f_of_r, 0.0, 3.0, 1e-10);
    (r_star, f_of_r(r_star))
}

/// Sector half-angle maximizing `sin²α/(4α)`, the root of
/// `cos α = sin α / (2α)` on `(0, π)`.
pub fn maximize_alpha() -> f64 {
    bisect(|a| a.cos() - a.sin() / (2.0 * a), 0.1, PI - 0.1, 1e-13)
        .expect("cos α − sin α/(2α) changes sign on [0.1, π − 0.1]")
}

/// Fraction of nodes passing `a_k ≥ r`: `e^{−r²}`.
pub fn threshold_fraction(r: f64) -> f64 {
    (-r * r).exp()
}

/// Fraction of nodes inside the sector: `(α/π) e^{−r²}`.
pub fn sector_fraction(r: f64, alpha: f64) -> f64 {
    alpha / PI * threshold_fraction(r)
}

/// Large-K power per node of the amplitude-threshold rule, `(π/4) f(r)`.
pub fn upper_bound_per_node(r: f64) -> f64 {
    PI / 4.0 * f_of_r(r)
}

/// Large-K power per node of the sector rule, `sin²α/(4α) · f(r)`.
pub fn lower_bound_per_node(r: f64, alpha: f64) -> Result<f64> {
    Ok(sector_gain(alpha)? * f_of_r(r))
}

pub fn to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Optimized thresholds and the resulting asymptotic bound constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub r_star: f64,
    pub f_max: f64,
    pub alpha_star: f64,
    /// `lim P_ub / K = (π/4) f_max`
    pub upper_c: f64,
    /// `lim P_lb / K = sin²α*/(4α*) · f_max`
    pub lower_c: f64,
    pub gap_db: f64,
    /// `e^{−r*²}`
    pub fraction_ub: f64,
}

/// Computes (once) and returns the bound constants.
pub fn bound_constants() -> BoundConstants {
    static CONSTANTS: OnceLock<BoundConstants> = OnceLock::new();
    *CONSTANTS.get_or_init(|| {
        let (r_star, f_max) = maximize_f();
        let alpha_star = maximize_alpha();
        let upper_c = PI / 4.0 * f_max;
        let lower_c = sector_gain(alpha_star).expect("α* lies in (0, π)") * f_max;
        BoundConstants {
            r_star,
            f_max,
            alpha_star,
            upper_c,
            lower_c,
            gap_db: to_db(upper_c / lower_c),
            fraction_ub: threshold_fraction(r_star),
        }
    })
}
