//! Quantities from the Schur-test argument for weighted `L_p` boundedness.
//!
//! With `z = (n−β)t` and `g(z) = z^α P(α+1, z)`, the column integral of the
//! kernel is controlled by `E_n(t) = ((n−β)/n) g(z)`.

use crate::error::{Error, Result};
use crate::numeric::{integrate, AdaptiveOptions};
use crate::operator::{kernel, OperatorParams, TruncationPolicy};
use crate::special_fn::{ln_gamma_pos, reg_lower_gamma};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurE {
    pub value: f64,
    /// `α ∈ [−1/2, 0]`, where the uniform bound in `n` is known to hold.
    pub in_lemma_range: bool,
}

fn check_schur_params(params: &OperatorParams, func: &'static str) -> Result<()> {
    params.validate()?;
    if params.beta < 0.0 {
        return Err(Error::Precondition {
            func,
            detail: format!("requires n > beta >= 0, got beta = {}", params.beta),
        });
    }
    Ok(())
}

/// `g(z) = z^α P(α+1, z)`, with its limit at `z = 0`.
fn g(alpha: f64, z: f64) -> Result<f64> {
    if z == 0.0 {
        // z^α P(α+1, z) ~ z^{2α+1} / Γ(α+2)
        let e = 2.0 * alpha + 1.0;
        return Ok(if e > 0.0 {
            0.0
        } else if e == 0.0 {
            (-ln_gamma_pos(alpha + 2.0)).exp()
        } else {
            f64::INFINITY
        });
    }
    Ok(z.powf(alpha) * reg_lower_gamma(alpha + 1.0, z)?)
}

/// `E_n(t) = (1/n)(n−β)^{α+1} t^α γ(α+1, (n−β)t) / Γ(α+1)`.
pub fn schur_e(params: &OperatorParams, t: f64) -> Result<SchurE> {
    check_schur_params(params, "schur_e")?;
    if !(t >= 0.0) || t.is_infinite() {
        return Err(Error::Domain {
            func: "schur_e",
            detail: format!("requires finite t >= 0, got {t}"),
        });
    }
    let lam = params.lambda();
    Ok(SchurE {
        value: lam / params.n * g(params.alpha, lam * t)?,
        in_lemma_range: (-0.5..=0.0).contains(&params.alpha),
    })
}

fn check_gamma(params: &OperatorParams, gamma: f64, p: f64, func: &'static str) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            detail: format!("must be in [1, ∞), got {p}"),
        });
    }
    if !(gamma >= 0.0 && gamma < params.n * p) {
        return Err(Error::Precondition {
            func,
            detail: format!(
                "requires 0 <= gamma < n p (gamma = {gamma}, n = {}, p = {p})",
                params.n
            ),
        });
    }
    Ok(())
}

/// `∫_0^∞ K_n(x,t) e^{−γt/p} dt · e^{γx/p}` in closed form:
/// `(λ/(λ+γ/p))^{α+1} exp(x (γ/p)(γ/p − β)/(λ + γ/p))`.
pub fn schur_first_integral(params: &OperatorParams, gamma: f64, p: f64, x: f64) -> Result<f64> {
    params.validate()?;
    check_gamma(params, gamma, p, "schur_first_integral")?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain {
            func: "schur_first_integral",
            detail: format!("requires finite x >= 0, got {x}"),
        });
    }
    let lam = params.lambda();
    let c = gamma / p;
    let log = (params.alpha + 1.0) * (lam / (lam + c)).ln() + x * c * (c - params.beta) / (lam + c);
    Ok(log.exp())
}

/// The second Schur integral `∫_0^∞ e^{γx/p} K_n(x,t) dx` three ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurSecond {
    /// `(1 − c')^{-1} E_n(t / (1 − c'))`, `c' = γ/(np)`.
    pub bound: f64,
    /// Adaptive quadrature of the defining integral over `x`.
    pub direct: f64,
    pub direct_error: f64,
    /// Exact value from summing the `x`-integrals term by term:
    /// `(1/n)(1−c')^{-1} [λ z^α e^{−z}/Γ(α+1) + λ (1−c')^α e^{w−z} P(α+1, w)]`
    /// with `z = λt`, `w = z/(1−c')`.
    pub closed: f64,
}

pub fn schur_second_integral(
    params: &OperatorParams,
    gamma: f64,
    p: f64,
    t: f64,
    policy: &TruncationPolicy,
) -> Result<SchurSecond> {
    check_schur_params(params, "schur_second_integral")?;
    check_gamma(params, gamma, p, "schur_second_integral")?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain {
            func: "schur_second_integral",
            detail: format!("requires finite t > 0, got {t}"),
        });
    }
    let OperatorParams { n, alpha, .. } = *params;
    let lam = params.lambda();
    let cp = gamma / (n * p);
    let shrink = 1.0 - cp;
    let bound = schur_e(params, t / shrink)?.value / shrink;

    let z = lam * t;
    let w = z / shrink;
    let first = (lam.ln() + alpha * z.ln() - z - ln_gamma_pos(alpha + 1.0)).exp();
    let second = lam * shrink.powf(alpha) * (w - z).exp() * reg_lower_gamma(alpha + 1.0, w)?;
    let closed = (first + second) / (n * shrink);

    // In x the integrand is a mixture of Gamma(k+1, n − γ/p) densities with k
    // concentrated near z, so its mass lies below x_end.
    let rate = n - gamma / p;
    let k_hi = z + 12.0 * (z + 1.0).sqrt() + 30.0;
    let x_end = (k_hi + 1.0 + 12.0 * (k_hi + 1.0).sqrt() + 30.0) / rate;
    let centre = (z + 1.0) / rate;
    let mut breaks: Vec<f64> = (0..=32).map(|i| x_end * i as f64 / 32.0).collect();
    breaks.push(centre.min(x_end));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let c = gamma / p;
    let q = integrate(
        |x| (c * x).exp() * kernel(x, t, params, policy).unwrap_or(f64::NAN),
        &breaks,
        AdaptiveOptions {
            rel_tol: 1e-11,
            abs_tol: 1e-300,
            max_panels: 20_000,
        },
    )?;
    if q.value.is_nan() {
        return Err(Error::Degenerate("kernel evaluation failed".into()));
    }
    Ok(SchurSecond {
        bound,
        direct: q.value,
        direct_error: q.error,
        closed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: f64, alpha: f64, beta: f64) -> OperatorParams {
        OperatorParams::new(n, alpha, beta).unwrap()
    }

    #[test]
    fn alpha_zero_reduction() {
        let q = params(10.0, 0.0, 2.0);
        for t in [0.0, 0.01, 0.5, 3.0] {
            let e = schur_e(&q, t).unwrap();
            let reduced = 0.8 * (1.0 - (-8.0 * t).exp());
            assert!((e.value - reduced).abs() < 1e-15, "{t}");
            assert!(e.value <= 1.0 && e.in_lemma_range);
        }
    }

    #[test]
    fn endpoint_limits() {
        let e = schur_e(&params(10.0, -0.5, 0.0), 0.0).unwrap().value;
        assert!((e - 1.0 / crate::special_fn::log_gamma(1.5).unwrap().exp()).abs() < 1e-14);
        assert_eq!(schur_e(&params(10.0, -0.25, 0.0), 0.0).unwrap().value, 0.0);
        assert!(schur_e(&params(10.0, -0.25, 0.0), 1e4).unwrap().value < 0.1);
        assert!(!schur_e(&params(10.0, 0.5, 0.0), 1.0).unwrap().in_lemma_range);
        assert!(matches!(schur_e(&params(10.0, 0.0, 0.0), -1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn first_integral_cases() {
        let q = params(10.0, 0.5, 2.0);
        assert_eq!(schur_first_integral(&q, 0.0, 2.0, 7.0).unwrap(), 1.0);
        let at_edge = schur_first_integral(&q, 4.0, 2.0, 50.0).unwrap();
        assert!((at_edge - (0.8f64).powf(1.5)).abs() < 1e-15);
        assert!(schur_first_integral(&q, 6.0, 2.0, 50.0).unwrap() > 1.0);
        assert!(schur_first_integral(&q, 20.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn direct_matches_closed_form() {
        let pol = TruncationPolicy::default();
        for (n, a, b, g, t) in [(10.0, 0.0, 0.0, 0.0, 0.5), (20.0, -0.5, 1.0, 1.0, 1.0), (10.0, -0.25, 2.0, 2.0, 0.1)] {
            let s = schur_second_integral(&params(n, a, b), g, 2.0, t, &pol).unwrap();
            assert!((s.direct - s.closed).abs() < 1e-8 * s.closed, "{s:?}");
        }
    }
}
