//! e^{-z} ₁F₁(a; b; z) without overflow.

use super::gamma::ln_abs_gamma_signed;
use super::AccuracyPolicy;
use crate::error::{Error, Result};

/// Returns `e^{-z} ₁F₁(a; b; z)`.
///
/// Small `z` sums the Maclaurin series with the `e^{-z}` factor carried in the
/// log of each term. Above the policy switchover the large-`z` expansion
/// `Γ(b)/Γ(a) z^{a-b} Σ (b-a)_k (1-a)_k / (k! z^k)` is used; if that series
/// starts diverging before reaching tolerance the Maclaurin series is tried.
pub fn kummer_scaled(a: f64, b: f64, z: f64, policy: &AccuracyPolicy) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::Domain {
            func: "kummer_scaled",
            detail: format!("b must be positive, got {b}"),
        });
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            func: "kummer_scaled",
            detail: format!("z must be finite and nonnegative, got {z}"),
        });
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if a == b {
        return Ok(1.0);
    }
    let terminating = a <= 0.0 && a == a.floor();
    if !terminating && z > policy.switchover(a, b) {
        if let Some(v) = large_z(a, b, z, policy) {
            return Ok(v);
        }
    }
    series(a, b, z, policy)
}

/// Maclaurin series with each term held as (ln|t|, sign).
fn series(a: f64, b: f64, z: f64, policy: &AccuracyPolicy) -> Result<f64> {
    let ln_z = z.ln();
    let mut ln_t = -z;
    let mut sign = 1.0;
    // Scale by the running max so summation never overflows or underflows.
    let mut scale = ln_t;
    let mut acc = 1.0;
    for k in 0..policy.max_terms {
        let kf = k as f64;
        let num = a + kf;
        if num == 0.0 {
            return Ok(acc * scale.exp());
        }
        ln_t += num.abs().ln() - (b + kf).ln() + ln_z - (kf + 1.0).ln();
        if num < 0.0 {
            sign = -sign;
        }
        if ln_t > scale {
            acc *= (scale - ln_t).exp();
            scale = ln_t;
        }
        let term = sign * (ln_t - scale).exp();
        acc += term;
        // past the peak (ratio < 1) and the term no longer matters
        let ratio_ln = (a + kf + 1.0).abs().ln() - (b + kf + 1.0).ln() + ln_z - (kf + 2.0).ln();
        if ratio_ln < 0.0 && term.abs() <= policy.series_rel_tol * acc.abs() * 1e-2 {
            return Ok(acc * scale.exp());
        }
    }
    Err(Error::NonConvergence {
        func: "kummer_scaled",
        terms: policy.max_terms,
    })
}

fn large_z(a: f64, b: f64, z: f64, policy: &AccuracyPolicy) -> Option<f64> {
    let (ln_gb, sb) = ln_abs_gamma_signed(b)?;
    let (ln_ga, sa) = ln_abs_gamma_signed(a)?;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..policy.max_terms {
        let kf = k as f64;
        term *= (b - a + kf) * (1.0 - a + kf) / ((kf + 1.0) * z);
        if term == 0.0 {
            break;
        }
        if term.abs() > prev {
            return None;
        }
        sum += term;
        if term.abs() <= policy.series_rel_tol * sum.abs() * 1e-2 {
            break;
        }
        prev = term.abs();
        if k + 1 == policy.max_terms {
            return None;
        }
    }
    let ln_pref = ln_gb - ln_ga + (a - b) * z.ln();
    Some(sb * sa * ln_pref.exp() * sum)
}
