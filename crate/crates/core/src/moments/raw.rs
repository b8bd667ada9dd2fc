use crate::error::{Error, Result};
use crate::numeric::DoubleDouble;
use crate::operator::OperatorParams;
use crate::special_fn::{kummer_scaled, pochhammer, AccuracyPolicy};

/// `μ_r(x) = (α+1)_r / (n−β)^r · e^{-nx} ₁F₁(α+r+1; α+1; nx)`.
pub fn raw_moment_closed(r: u32, x: f64, params: &OperatorParams) -> Result<f64> {
    raw_moment_closed_with(r, x, params, &AccuracyPolicy::default())
}

pub fn raw_moment_closed_with(
    r: u32,
    x: f64,
    params: &OperatorParams,
    policy: &AccuracyPolicy,
) -> Result<f64> {
    params.validate()?;
    if r == 0 {
        return Ok(1.0);
    }
    let a = params.alpha;
    let k = kummer_scaled(a + r as f64 + 1.0, a + 1.0, params.n * x, policy)?;
    Ok(pochhammer(a + 1.0, r) / params.lambda().powi(r as i32) * k)
}

/// `μ_0 ..= μ_{r_max}` by the three-term recurrence
/// `λ² μ_{r+1} = λ(α+2r+1+nx) μ_r − r(α+r) μ_{r−1}`, carried in double-double.
///
/// For `x >= 0` the first term dominates, so forward iteration is stable.
pub fn raw_moments_dd(r_max: u32, x: f64, params: &OperatorParams) -> Vec<DoubleDouble> {
    let a = params.alpha;
    let lam = DoubleDouble::new(params.n) - params.beta;
    let z = DoubleDouble::from_prod(params.n, x);
    let lam2 = lam * lam;
    let mut mu = Vec::with_capacity(r_max as usize + 1);
    mu.push(DoubleDouble::ONE);
    if r_max == 0 {
        return mu;
    }
    mu.push((z + (a + 1.0)) / lam);
    for r in 1..r_max as usize {
        let rf = r as f64;
        let lead = lam * (z + (a + 2.0 * rf + 1.0)) * mu[r];
        let back = mu[r - 1] * (rf * (a + rf));
        mu.push((lead - back) / lam2);
    }
    mu
}

/// `μ_r` via [`raw_moments_dd`], rounded to `f64`.
pub fn raw_moment_recurrence(r: u32, x: f64, params: &OperatorParams) -> f64 {
    raw_moments_dd(r, x, params)[r as usize].to_f64()
}

/// Explicit polynomials in `z = nx` for `r = 1..=4`.
pub fn raw_moment_explicit(r: u32, x: f64, params: &OperatorParams) -> Result<f64> {
    let a = params.alpha;
    let z = params.n * x;
    let lam = params.lambda();
    let v = match r {
        1 => (z + a + 1.0) / lam,
        2 => (z * z + (2.0 * a + 4.0) * z + (a + 1.0) * (a + 2.0)) / (lam * lam),
        3 => {
            let p = z * z * z
                + 3.0 * (a + 3.0) * z * z
                + 3.0 * (a + 2.0) * (a + 3.0) * z
                + (a + 1.0) * (a + 2.0) * (a + 3.0);
            p / lam.powi(3)
        }
        4 => {
            let p = z.powi(4)
                + 4.0 * (a + 4.0) * z.powi(3)
                + 6.0 * (a + 3.0) * (a + 4.0) * z * z
                + 4.0 * (a + 2.0) * (a + 3.0) * (a + 4.0) * z
                + (a + 1.0) * (a + 2.0) * (a + 3.0) * (a + 4.0);
            p / lam.powi(4)
        }
        _ => return Err(Error::UnsupportedOrder { order: r as usize }),
    };
    Ok(v)
}

/// Relative residual of the three-term recurrence at order `r >= 1`,
/// evaluated on closed-form moments.
pub fn three_term_residual(r: u32, x: f64, params: &OperatorParams) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter {
            name: "r",
            detail: "three-term recurrence starts at r = 1".into(),
        });
    }
    let lam = params.lambda();
    let a = params.alpha;
    let rf = r as f64;
    let m_prev = raw_moment_closed(r - 1, x, params)?;
    let m = raw_moment_closed(r, x, params)?;
    let m_next = raw_moment_closed(r + 1, x, params)?;
    let t1 = lam * lam * m_next;
    let t2 = rf * (a + rf) * m_prev;
    let t3 = lam * (a + 2.0 * rf + 1.0 + params.n * x) * m;
    let scale = t1.abs().max(t2.abs()).max(t3.abs());
    Ok((t1 + t2 - t3).abs() / scale)
}

/// `|Δ_h μ_r(x) − (nr/λ) μ_{r−1}^{(α+1,β)}(x)|` with the central difference `Δ_h`.
pub fn diff_recurrence_residual(r: u32, x: f64, params: &OperatorParams, h: f64) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter {
            name: "r",
            detail: "differential recurrence needs r >= 1".into(),
        });
    }
    if !(h > 0.0 && x - h > 0.0) {
        return Err(Error::Precondition {
            func: "diff_recurrence_residual",
            detail: format!("requires h > 0 and x − h > 0 (x = {x}, h = {h})"),
        });
    }
    params.validate()?;
    let fd = (raw_moment_recurrence(r, x + h, params) - raw_moment_recurrence(r, x - h, params)) / (2.0 * h);
    let shifted = params.shifted_alpha();
    let rhs = params.n * r as f64 / params.lambda() * raw_moment_recurrence(r - 1, x, &shifted);
    Ok((fd - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(n: f64, alpha: f64, beta: f64) -> OperatorParams {
        OperatorParams::new(n, alpha, beta).unwrap()
    }

    #[test]
    fn closed_examples() {
        let q = p(10.0, 0.0, 0.0);
        assert_eq!(raw_moment_closed(0, 3.0, &q).unwrap(), 1.0);
        assert_relative_eq!(raw_moment_closed(1, 1.0, &q).unwrap(), 1.1, max_relative = 1e-14);
        assert_relative_eq!(raw_moment_closed(2, 1.0, &q).unwrap(), 1.42, max_relative = 1e-14);
    }

    #[test]
    fn third_moment_is_poisson_rising_factorial() {
        // E[(K+1)(K+2)(K+3)] / 1000 with K ~ Poisson(10)
        let q = p(10.0, 0.0, 0.0);
        assert_relative_eq!(raw_moment_explicit(3, 1.0, &q).unwrap(), 2.086, max_relative = 1e-14);
        assert_relative_eq!(raw_moment_closed(3, 1.0, &q).unwrap(), 2.086, max_relative = 1e-13);
    }

    #[test]
    fn recurrence_matches_closed() {
        let q = p(10.0, 0.5, 2.0);
        let a = raw_moment_recurrence(4, 1.0, &q);
        let b = raw_moment_closed(4, 1.0, &q).unwrap();
        assert!((a - b).abs() <= 1e-10 * b);
        assert_relative_eq!(raw_moment_recurrence(2, 1.0, &p(10.0, 0.0, 0.0)), 1.42, max_relative = 1e-15);
    }

    #[test]
    fn explicit_first_order_at_zero() {
        let q = p(7.0, 0.3, 1.5);
        assert_relative_eq!(raw_moment_explicit(1, 0.0, &q).unwrap(), 1.3 / 5.5, max_relative = 1e-15);
        assert!(matches!(raw_moment_explicit(5, 1.0, &q), Err(Error::UnsupportedOrder { order: 5 })));
    }

    #[test]
    fn differential_recurrence() {
        let q = p(10.0, 0.0, 1.0);
        assert!(diff_recurrence_residual(1, 1.0, &q, 1e-4).unwrap() <= 1e-10);
        assert!(diff_recurrence_residual(2, 1.0, &q, 1e-3).unwrap() <= 1e-5);
        let r1 = diff_recurrence_residual(3, 1.0, &q, 1e-2).unwrap();
        let r2 = diff_recurrence_residual(3, 1.0, &q, 5e-3).unwrap();
        assert!((r1 / r2 - 4.0).abs() < 0.5, "{}", r1 / r2);
    }

    #[test]
    fn recurrence_residual_small() {
        for r in 1..=8 {
            assert!(three_term_residual(r, 2.0, &p(50.0, -0.5, 1.0)).unwrap() < 1e-12);
        }
    }
}
