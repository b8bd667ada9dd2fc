use super::apply::check_x;
use super::params::OperatorParams;
use super::policy::TruncationPolicy;
use crate::error::{Error, Result};
use crate::special_fn::{covering_bounds, ln_gamma_density, ln_gamma_pos, PoissonWindow};

/// `ln g_k(t)` where `g_k` is the Gamma(k+α+1, λ) density.
fn ln_gamma_term(shape: f64, lam: f64, t: f64) -> f64 {
    let u = lam * t;
    if u > 0.0 {
        return lam.ln() + ln_gamma_density(shape, u);
    }
    // t = 0: the density is 0, finite or infinite depending on the shape.
    if shape > 1.0 {
        f64::NEG_INFINITY
    } else if shape == 1.0 {
        lam.ln() - ln_gamma_pos(1.0)
    } else {
        f64::INFINITY
    }
}

/// `K_n(x, t) = Σ_k ψ_{n,k}(x) g_k(t)`, the density of the operator's
/// averaging measure at `x`.
///
/// For `k >= 1` the Gamma densities are bounded by `λ`, so the Poisson window
/// is cut at mass `eps_tail / λ` on each side. The `k = 0` term is always
/// included because for `α < 0` it is unbounded near `t = 0`.
pub fn kernel(x: f64, t: f64, params: &OperatorParams, policy: &TruncationPolicy) -> Result<f64> {
    params.validate()?;
    policy.validate()?;
    check_x(x)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t",
            detail: format!("must be finite and nonnegative, got {t}"),
        });
    }
    let lam = params.lambda();
    let z = params.n * x;
    let (lo, hi) = covering_bounds(z, policy.eps_tail / lam.max(1.0));
    if hi > policy.k_max {
        return Err(Error::KMaxExceeded {
            k_max: policy.k_max as usize,
        });
    }
    let w = PoissonWindow::new(z, lo, hi);
    let mut sum = 0.0;
    for (k, wk) in w.iter() {
        if wk > 0.0 {
            sum += wk * ln_gamma_term(k as f64 + params.alpha + 1.0, lam, t).exp();
        }
    }
    if lo > 0 {
        sum += (-z + ln_gamma_term(params.alpha + 1.0, lam, t)).exp();
    }
    Ok(sum)
}
