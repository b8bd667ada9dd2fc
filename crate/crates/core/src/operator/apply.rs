//! Coefficient integrals and the truncated k-sum.

use std::collections::HashMap;
use std::sync::RwLock;

use super::function::{Growth, Integrand};
use super::params::OperatorParams;
use super::policy::TruncationPolicy;
use crate::error::{Error, Result};
use crate::numeric::{gauss_laguerre_cached, integrate, AdaptiveOptions, CompensatedSum, GaussRule};
use crate::special_fn::{
    first_below, last_below, ln_gamma_density, ln_gamma_pos, poisson_lower_tail,
    poisson_upper_tail, reg_lower_gamma, reg_upper_gamma, PoissonWindow,
};

/// Checks `n > β`, `α > −1` and integrability `n > β + A`.
pub fn validate(params: &OperatorParams, f: &impl Integrand) -> Result<()> {
    params.validate()?;
    let g = f.growth();
    if !(g.a >= 0.0 && g.a.is_finite()) || !(g.k > 0.0 && g.k.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "growth",
            detail: format!("need A >= 0 and K > 0 finite, got A = {}, K = {}", g.a, g.k),
        });
    }
    if !(params.n > params.beta + g.a) {
        return Err(Error::GrowthTooFast {
            n: params.n,
            beta: params.beta,
            growth: g.a,
        });
    }
    Ok(())
}

/// `M_n` bound for `|f| <= K e^{At}`: `K (λ/(λ−A))^{α+1} exp(nxA/(λ−A))`.
pub fn growth_bound(params: &OperatorParams, f: &impl Integrand, x: f64) -> Result<f64> {
    let g = f.growth();
    let lam = params.lambda();
    if !(lam > g.a) {
        return Err(Error::GrowthTooFast {
            n: params.n,
            beta: params.beta,
            growth: g.a,
        });
    }
    Ok(g.k * (lam / (lam - g.a)).powf(params.alpha + 1.0) * (params.n * x * g.a / (lam - g.a)).exp())
}

/// Operator bound to one function, with a write-once coefficient cache.
///
/// Coefficients depend only on `k` for a fixed (function, parameters,
/// policy), so evaluating many points reuses them.
pub struct Operator<F: Integrand> {
    f: F,
    params: OperatorParams,
    policy: TruncationPolicy,
    cache: RwLock<HashMap<u64, f64>>,
}

impl<F: Integrand> Operator<F> {
    pub fn new(f: F, params: OperatorParams, policy: TruncationPolicy) -> Result<Self> {
        validate(&params, &f)?;
        policy.validate()?;
        Ok(Self {
            f,
            params,
            policy,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    pub fn function(&self) -> &F {
        &self.f
    }

    /// `c_k(f)`, the mean of `f` under Gamma(k+α+1, n−β).
    pub fn coefficient(&self, k: u64) -> Result<f64> {
        if let Some(&c) = self.cache.read().unwrap().get(&k) {
            return Ok(c);
        }
        let c = coefficient_uncached(&self.f, k, &self.params, &self.policy)?;
        self.cache.write().unwrap().entry(k).or_insert(c);
        Ok(c)
    }

    /// Index window `[k_lo, k_hi]` whose complement contributes at most
    /// `eps_tail` given `|c_k| <= K ρ^{k+α+1}`, `ρ = λ/(λ−A)`.
    pub fn window(&self, x: f64) -> Result<(u64, u64)> {
        truncation_window(&self.params, self.f.growth(), &self.policy, x)
    }

    /// `M_n f(x)`.
    pub fn apply(&self, x: f64) -> Result<f64> {
        check_x(x)?;
        let (lo, hi) = self.window(x)?;
        let z = self.params.n * x;
        let w = PoissonWindow::new(z, lo, hi);
        let mut sum = CompensatedSum::new();
        for (k, wk) in w.iter() {
            if wk != 0.0 {
                sum.add(wk * self.coefficient(k)?);
            }
        }
        Ok(sum.value())
    }

    /// `M_n f(0) = c_0(f)`.
    pub fn value_at_zero(&self) -> Result<f64> {
        self.coefficient(0)
    }
}

pub(crate) fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "x",
            detail: format!("must be finite and nonnegative, got {x}"),
        });
    }
    Ok(())
}

pub(crate) fn truncation_window(
    params: &OperatorParams,
    growth: Growth,
    policy: &TruncationPolicy,
    x: f64,
) -> Result<(u64, u64)> {
    let z = params.n * x;
    if z == 0.0 {
        return Ok((0, 0));
    }
    let lam = params.lambda();
    let rho = lam / (lam - growth.a);
    let ln_c = growth.k.ln() + (params.alpha + 1.0) * rho.ln();
    let mode = z.floor() as u64;
    let eps = policy.eps_tail;
    // Σ_{k>K} ψ_k ρ^k = e^{z(ρ−1)} P(Poisson(zρ) > K)
    let upper = |kk: u64| (ln_c + z * (rho - 1.0) + poisson_upper_tail(z * rho, kk).ln()).exp();
    let hi = first_below(mode, policy.k_max, eps, upper).ok_or(Error::KMaxExceeded {
        k_max: policy.k_max as usize,
    })?;
    let lower = |kk: u64| (ln_c + kk as f64 * rho.ln() + poisson_lower_tail(z, kk).ln()).exp();
    let lo = last_below(mode.min(hi), eps, lower);
    Ok((lo, hi))
}

/// Computes one coefficient without caching.
pub fn coefficient(
    f: &impl Integrand,
    k: u64,
    params: &OperatorParams,
    policy: &TruncationPolicy,
) -> Result<f64> {
    validate(params, f)?;
    policy.validate()?;
    coefficient_uncached(f, k, params, policy)
}

/// `M_n f(x)` for a single point. Use [`Operator`] to evaluate many points.
pub fn apply_operator(
    f: &impl Integrand,
    x: f64,
    params: &OperatorParams,
    policy: &TruncationPolicy,
) -> Result<f64> {
    Operator::new(f, *params, *policy)?.apply(x)
}

/// `M_n f(0)`, the k = 0 coefficient.
pub fn value_at_zero(
    f: &impl Integrand,
    params: &OperatorParams,
    policy: &TruncationPolicy,
) -> Result<f64> {
    coefficient(f, 0, params, policy)
}

/// Returns (E[f], E[|f|]) under the rule, with nodes mapped `t = u/λ`.
fn rule_mean(f: &impl Integrand, rule: &GaussRule, lam: f64) -> (f64, f64) {
    let mut s = CompensatedSum::new();
    let mut sa = 0.0;
    for (u, w) in rule.nodes.iter().zip(&rule.weights) {
        let v = w * f.eval(u / lam);
        s.add(v);
        sa += v.abs();
    }
    (s.value(), sa)
}

fn coefficient_uncached(
    f: &impl Integrand,
    k: u64,
    params: &OperatorParams,
    policy: &TruncationPolicy,
) -> Result<f64> {
    let shape = k as f64 + params.alpha + 1.0;
    let lam = params.lambda();
    let m = policy.quad_nodes;
    let coarse = gauss_laguerre_cached(m, shape - 1.0);
    let (q1, scale1) = rule_mean(f, &coarse, lam);
    if f.is_smooth() {
        let fine = gauss_laguerre_cached(m + m / 2, shape - 1.0);
        let (q2, scale2) = rule_mean(f, &fine, lam);
        if (q1 - q2).abs() <= policy.eps_quad * scale2.max(scale1) {
            return Ok(q2);
        }
    }
    adaptive_mean(f, shape, lam, policy, scale1)
}

/// Smallest `u >= start` with `bound(u) <= eps`, for a nonincreasing bound.
fn first_u_below(start: f64, width: f64, eps: f64, bound: impl Fn(f64) -> f64) -> f64 {
    if bound(start) <= eps {
        return start;
    }
    let mut step = width.max(1.0);
    let mut lo = start;
    let mut hi = start + step;
    while bound(hi) > eps {
        lo = hi;
        step *= 2.0;
        hi += step;
        if !hi.is_finite() {
            return hi;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Adaptive panels on the Gamma(shape, 1) density in `u = λt`.
fn adaptive_mean(
    f: &impl Integrand,
    shape: f64,
    lam: f64,
    policy: &TruncationPolicy,
    scale: f64,
) -> Result<f64> {
    let g = f.growth();
    let tol_abs = policy.eps_quad * scale.max(f64::MIN_POSITIVE) * 1e-2;
    let rho = lam / (lam - g.a);
    let sd = shape.sqrt();

    // Upper cut: ∫_h^∞ K e^{Au/λ} dens = K ρ^s Q(s, h/ρ).
    let upper_tail = |h: f64| {
        (g.k.ln() + shape * rho.ln() + reg_upper_gamma(shape, h / rho).unwrap_or(1.0).ln()).exp()
    };
    let u_hi = first_u_below(shape, sd, tol_abs, upper_tail);

    // Lower cut: ∫_0^l |f| dens <= K e^{Al/λ} P(s, l).
    let u_lo = if shape > 1.0 {
        let bound = |l: f64| g.k * (g.a * l / lam).exp() * reg_lower_gamma(shape, l).unwrap_or(1.0);
        let (mut lo, mut hi) = (0.0, shape - 1.0);
        if bound(hi) <= tol_abs {
            hi
        } else {
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if bound(mid) <= tol_abs {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    } else {
        0.0
    };

    let mut pts: Vec<f64> = f
        .breakpoints()
        .into_iter()
        .map(|t| t * lam)
        .chain((-8..=8).map(|j| shape + j as f64 * sd))
        .filter(|&u| u > u_lo && u < u_hi)
        .collect();
    pts.push(u_lo);
    pts.push(u_hi);
    let singular = shape < 1.0 && u_lo == 0.0;
    if singular {
        pts.push(1.0f64.min(u_hi));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let opts = AdaptiveOptions {
        rel_tol: policy.eps_quad,
        abs_tol: tol_abs,
        max_panels: 8000,
    };
    let mut total = 0.0;
    let mut start = 0;
    if singular && pts.len() >= 2 {
        // u = v^{1/s} turns u^{s−1} du into dv / s.
        let b = pts[1];
        let ln_g1 = ln_gamma_pos(shape + 1.0);
        let h = |v: f64| {
            let u = v.powf(1.0 / shape);
            (-u - ln_g1).exp() * f.eval(u / lam)
        };
        total += integrate(h, &[0.0, b.powf(shape)], opts)?.value;
        start = 1;
    }
    let dens = |u: f64| {
        if u <= 0.0 {
            0.0
        } else {
            f.eval(u / lam) * ln_gamma_density(shape, u).exp()
        }
    };
    total += integrate(dens, &pts[start..], opts)?.value;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::TestFunction;
    use approx::assert_relative_eq;

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn validate_examples() {
        let bounded = TestFunction::sin(1.0);
        assert!(validate(&OperatorParams { n: 10.0, alpha: 0.0, beta: 2.0 }, &bounded).is_ok());
        let p = OperatorParams { n: 2.0, alpha: 0.0, beta: 3.0 };
        assert!(matches!(validate(&p, &bounded), Err(Error::NNotAboveBeta { .. })));
        let fast = TestFunction::exp(4.5);
        let p = OperatorParams { n: 5.0, alpha: 0.0, beta: 1.0 };
        assert!(matches!(validate(&p, &fast), Err(Error::GrowthTooFast { .. })));
    }

    #[test]
    fn coefficient_examples() {
        let p = OperatorParams::new(10.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(coefficient(&TestFunction::constant(1.0), 7, &p, &pol()).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(coefficient(&TestFunction::monomial(1), 0, &p, &pol()).unwrap(), 0.1, max_relative = 1e-14);
        let p = OperatorParams::new(10.0, 0.0, 2.0).unwrap();
        assert_relative_eq!(coefficient(&TestFunction::exp(-2.0), 1, &p, &pol()).unwrap(), 0.64, max_relative = 1e-13);
    }

    #[test]
    fn apply_examples() {
        let p = OperatorParams::new(10.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(apply_operator(&TestFunction::monomial(1), 1.0, &p, &pol()).unwrap(), 1.1, max_relative = 1e-13);
        let p = OperatorParams::new(10.0, 0.0, 2.0).unwrap();
        assert_relative_eq!(
            apply_operator(&TestFunction::exp(-2.0), 1.0, &p, &pol()).unwrap(),
            0.8 * (-2.0f64).exp(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn value_at_zero_examples() {
        let p = OperatorParams::new(10.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(value_at_zero(&TestFunction::monomial(1), &p, &pol()).unwrap(), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn growth_bound_examples() {
        let p = OperatorParams::new(10.0, 0.0, 1.0).unwrap();
        let f = TestFunction::exp(1.0);
        assert_relative_eq!(growth_bound(&p, &f, 0.0).unwrap(), 1.125, max_relative = 1e-15);
        assert_eq!(growth_bound(&p, &TestFunction::sin(2.0), 3.0).unwrap(), 1.0);
    }

    #[test]
    fn abs_shift_coefficient_matches_gamma_cdf_formula() {
        // E|T − c| = s/λ − c + 2(c P(s, λc) − (s/λ) P(s+1, λc))
        let f = TestFunction::abs_shift(1.0);
        for (alpha, beta, n) in [(0.0, 0.0, 10.0), (-0.5, 1.0, 5.0), (1.0, 2.0, 50.0), (-0.25, 0.5, 200.0)] {
            let p = OperatorParams::new(n, alpha, beta).unwrap();
            let lam = p.lambda();
            for k in [0u64, 1, 3, 40, 190, 900] {
                let s = k as f64 + alpha + 1.0;
                let exact = s / lam - 1.0
                    + 2.0 * (reg_lower_gamma(s, lam).unwrap() - s / lam * reg_lower_gamma(s + 1.0, lam).unwrap());
                let got = coefficient(&f, k, &p, &pol()).unwrap();
                assert!((got - exact).abs() <= 1e-11 * exact.abs().max(1e-3), "{alpha} {beta} {n} k={k}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn window_is_capped_by_k_max() {
        let p = OperatorParams::new(200.0, 0.0, 0.0).unwrap();
        let policy = TruncationPolicy { k_max: 256, ..pol() };
        let op = Operator::new(TestFunction::constant(1.0), p, policy).unwrap();
        assert!(matches!(op.apply(5.0), Err(Error::KMaxExceeded { .. })));
    }
}
