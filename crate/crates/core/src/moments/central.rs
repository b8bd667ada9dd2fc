use super::raw::raw_moments_dd;
use crate::error::{Error, Result};
use crate::numeric::DoubleDouble;
use crate::operator::OperatorParams;

/// Central moments `M_n[(t−x)^r](x)` for `r = 1..=4` as polynomials in `x`
/// over `(n−β)^r`.
pub fn central_moment_explicit(r: u32, x: f64, params: &OperatorParams) -> Result<f64> {
    let a = params.alpha;
    let b = params.beta;
    let n = params.n;
    let lam = params.lambda();
    let (a1, a2, a3, a4) = (a + 1.0, a + 2.0, a + 3.0, a + 4.0);
    let bx = b * x;
    let nx = n * x;
    let v = match r {
        1 => (a1 + bx) / lam,
        2 => (a1 * a2 + 2.0 * x * (n + b * a1) + bx * bx) / (lam * lam),
        3 => {
            let p = a1 * a2 * a3
                + 3.0 * bx * a1 * a2
                + 3.0 * bx * bx * a1
                + 6.0 * nx * a2
                + 6.0 * bx * nx
                + bx.powi(3);
            p / lam.powi(3)
        }
        4 => {
            let p = a1 * a2 * a3 * a4
                + 4.0 * bx * a1 * a2 * a3
                + 12.0 * nx * a2 * a3
                + 6.0 * bx * bx * a1 * a2
                + 24.0 * bx * nx * a2
                + 12.0 * nx * nx
                + 4.0 * bx.powi(3) * a1
                + 12.0 * bx * bx * nx
                + bx.powi(4);
            p / lam.powi(4)
        }
        _ => return Err(Error::UnsupportedOrder { order: r as usize }),
    };
    Ok(v)
}

/// Binomial-sum central moment with an estimate of its rounding error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralMoment {
    pub value: f64,
    /// Estimated relative error of `value`.
    pub rel_error: f64,
    /// Set when `rel_error` exceeds 1e-6.
    pub cancellation_warning: bool,
}

/// `Σ_j C(r,j) (−x)^{r−j} μ_j(x)` accumulated in double-double.
///
/// The raw terms are `O(x^r)` while the result is `O(n^{1−r})`, so the
/// cancellation is severe for large `r` and `n`. The error estimate is the
/// double-double unit roundoff times the size of the largest partial sum
/// relative to the result.
pub fn central_moment_binomial(r: u32, x: f64, params: &OperatorParams) -> Result<CentralMoment> {
    params.validate()?;
    if r == 0 {
        return Ok(CentralMoment {
            value: 1.0,
            rel_error: 0.0,
            cancellation_warning: false,
        });
    }
    let mu = raw_moments_dd(r, x, params);
    let mut sum = DoubleDouble::ZERO;
    let mut magnitude = 0.0f64;
    let mut binom = DoubleDouble::ONE;
    let neg_x = DoubleDouble::new(-x);
    for j in 0..=r {
        if j > 0 {
            binom = binom * ((r - j + 1) as f64) / (j as f64);
        }
        let term = binom * neg_x.powi(r - j) * mu[j as usize];
        sum = sum + term;
        magnitude = magnitude.max(term.abs().to_f64()).max(sum.abs().to_f64());
    }
    let value = sum.to_f64();
    // ~2^-104 per operation; the recurrence contributes O(r) operations per term
    let unit = 2f64.powi(-104) * (4 * r as i32 + 8) as f64;
    let abs_err = unit * magnitude * (r as f64 + 1.0) + f64::EPSILON * 0.5 * value.abs();
    let rel_error = if value == 0.0 { f64::INFINITY } else { abs_err / value.abs() };
    Ok(CentralMoment {
        value,
        rel_error,
        cancellation_warning: rel_error > 1e-6,
    })
}

/// Central moment of any order: explicit for `r <= 4`, binomial otherwise.
pub fn central_moment(r: u32, x: f64, params: &OperatorParams) -> Result<f64> {
    match r {
        0 => Ok(1.0),
        1..=4 => central_moment_explicit(r, x, params),
        _ => Ok(central_moment_binomial(r, x, params)?.value),
    }
}

/// `C₁ = max_{x ∈ [0,a]} n·M_n[(t−x)²](x)` on a uniform grid.
pub fn variance_constant(params: &OperatorParams, a: f64, grid_points: usize) -> Result<f64> {
    let m = grid_points.max(2);
    let mut c = 0.0f64;
    for i in 0..m {
        let x = a * i as f64 / (m - 1) as f64;
        c = c.max(params.n * central_moment_explicit(2, x, params)?);
    }
    Ok(c)
}
