use super::apply::check_x;
use super::function::Integrand;
use super::policy::TruncationPolicy;
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::special_fn::{first_below, last_below, poisson_lower_tail, poisson_upper_tail, PoissonWindow};

/// Classical Szász–Mirakyan operator `S_n f(x) = Σ_k ψ_{n,k}(x) f(k/n)`.
///
/// Truncation uses `|f(k/n)| <= K e^{Ak/n}`, whose Poisson tail is
/// `K e^{z(e^{A/n}−1)} P(Poisson(z e^{A/n}) > k)`.
pub fn apply_szasz(f: &impl Integrand, x: f64, n: f64, policy: &TruncationPolicy) -> Result<f64> {
    policy.validate()?;
    check_x(x)?;
    let g = f.growth();
    if !(n > g.a) || !n.is_finite() {
        return Err(Error::Precondition {
            func: "apply_szasz",
            detail: format!("requires n > A (n = {n}, A = {})", g.a),
        });
    }
    let z = n * x;
    if z == 0.0 {
        return Ok(f.eval(0.0));
    }
    let q = (g.a / n).exp();
    let mode = z.floor() as u64;
    let upper = |k: u64| (g.k.ln() + z * (q - 1.0) + poisson_upper_tail(z * q, k).ln()).exp();
    let hi = first_below(mode, policy.k_max, policy.eps_tail, upper).ok_or(Error::KMaxExceeded {
        k_max: policy.k_max as usize,
    })?;
    let lower = |k: u64| (g.k.ln() + k as f64 * g.a / n + poisson_lower_tail(z, k).ln()).exp();
    let lo = last_below(mode.min(hi), policy.eps_tail, lower);
    let w = PoissonWindow::new(z, lo, hi);
    let sum: CompensatedSum = w.iter().map(|(k, wk)| wk * f.eval(k as f64 / n)).collect();
    Ok(sum.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::TestFunction;
    use approx::assert_relative_eq;

    #[test]
    fn reproduces_linear_functions() {
        let pol = TruncationPolicy::default();
        assert_relative_eq!(apply_szasz(&TestFunction::constant(1.0), 1.0, 10.0, &pol).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(apply_szasz(&TestFunction::monomial(1), 1.0, 10.0, &pol).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn second_moment() {
        let pol = TruncationPolicy::default();
        assert_relative_eq!(apply_szasz(&TestFunction::monomial(2), 1.0, 10.0, &pol).unwrap(), 1.1, max_relative = 1e-13);
    }

    #[test]
    fn interpolates_at_zero() {
        let pol = TruncationPolicy::default();
        assert_eq!(apply_szasz(&TestFunction::exp(0.5), 0.0, 10.0, &pol).unwrap(), 1.0);
    }
}
