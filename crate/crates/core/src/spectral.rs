//! The coefficient matrix `P` and the operator's two known eigenpairs.
//!
//! Applying the operator to a Poisson series `Φ_v(x) = Σ_j v_j ψ_{n,j}(x)`
//! gives another Poisson series, with coefficients `P v`. Row `k` of `P` is a
//! negative-binomial mass function with shape `s = k+α+1` and success
//! probability `p = (n−β)/(2n−β)`:
//!
//! ```text
//! P_{k,j} = p^s q^j (s)_j / j!,   q = n/(2n−β)
//! ```
//!
//! so `P` is row-stochastic. Its only closed-form eigenvectors are the
//! geometric ones, `v_j = z^j` with `z ∈ {1, 1−β/n}`, and they lift to
//! `φ₁ ≡ 1` and `φ₂(x) = e^{−βx}`.
//!
//! Storage is banded: each row keeps the contiguous run of columns where the
//! entry exceeds `1e-20` times the row's largest stored entry.

use std::thread;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::operator::{
    apply_operator, Growth, Integrand, OperatorParams, TestFunction, TruncationPolicy,
};
use crate::special_fn::{
    first_below, last_below, ln_negbin_pmf, poisson_lower_tail, poisson_upper_tail, PoissonWindow,
};

/// Starting truncation order for [`build_p_adaptive`].
pub const DEFAULT_K: usize = 512;
/// Largest truncation order [`build_p_adaptive`] will try.
pub const MAX_K: usize = 20_000;
/// Target for the largest row deficit among the checked rows.
pub const DEFAULT_DEFICIT_TOL: f64 = 1e-12;

const BAND_CUT: f64 = 1e-20;

#[derive(Debug, Clone)]
struct Band {
    start: usize,
    vals: Vec<f64>,
}

/// `P` restricted to rows and columns `0..=K`.
#[derive(Debug, Clone)]
pub struct TruncatedP {
    k: usize,
    params: OperatorParams,
    bands: Vec<Band>,
    row_deficits: Vec<f64>,
}

/// Which of the two known eigenpairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Eigenpair {
    /// `v_j = 1`, `λ₁ = 1`, `φ₁ ≡ 1`.
    Constant,
    /// `v_j = (1−β/n)^j`, `λ₂ = (1−β/n)^{α+1}`, `φ₂(x) = e^{−βx}`.
    Exponential,
}

impl Eigenpair {
    pub fn name(self) -> &'static str {
        match self {
            Eigenpair::Constant => "constant",
            Eigenpair::Exponential => "exponential",
        }
    }

    /// The geometric ratio `z` of the eigenvector.
    pub fn ratio(self, params: &OperatorParams) -> f64 {
        match self {
            Eigenpair::Constant => 1.0,
            Eigenpair::Exponential => 1.0 - params.beta / params.n,
        }
    }

    pub fn eigenvalue(self, params: &OperatorParams) -> f64 {
        match self {
            Eigenpair::Constant => 1.0,
            Eigenpair::Exponential => self.ratio(params).powf(params.alpha + 1.0),
        }
    }

    fn check_params(self, params: &OperatorParams, func: &'static str) -> Result<()> {
        params.validate()?;
        if self == Eigenpair::Exponential && params.beta < 0.0 {
            return Err(Error::Precondition {
                func,
                detail: format!(
                    "the exponential eigenpair requires 0 <= beta < n, got beta = {}",
                    params.beta
                ),
            });
        }
        Ok(())
    }
}

/// Result of checking one eigenpair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCheck {
    pub which: Eigenpair,
    pub lambda: f64,
    /// `max_k |(Pv)_k − λ v_k|` over the checked rows.
    pub vector_residual: Option<f64>,
    /// Largest row deficit over the checked rows.
    pub tail_bound: Option<f64>,
    /// `max_x |M_n φ(x) − λ φ(x)|`.
    pub operator_residual: Option<f64>,
    /// `max_x |M_n φ(x) / φ(x) − λ|`.
    pub ratio_deviation: Option<f64>,
}

impl EigenCheck {
    fn new(which: Eigenpair, lambda: f64) -> Self {
        EigenCheck {
            which,
            lambda,
            vector_residual: None,
            tail_bound: None,
            operator_residual: None,
            ratio_deviation: None,
        }
    }
}

/// Builds `P` for rows and columns `0..=k`.
pub fn build_p(params: &OperatorParams, k: usize) -> Result<TruncatedP> {
    params.validate()?;
    if k < 1 {
        return Err(Error::InvalidParameter {
            name: "K",
            detail: "truncation order must be at least 1".into(),
        });
    }
    let denom = 2.0 * params.n - params.beta;
    let p = params.lambda() / denom;
    let q = params.n / denom;
    let rows = k + 1;
    let workers = thread::available_parallelism().map_or(1, |w| w.get()).min(rows.div_ceil(64));
    let chunk = rows.div_ceil(workers.max(1));
    let mut bands: Vec<Band> = Vec::with_capacity(rows);
    thread::scope(|scope| {
        let handles: Vec<_> = (0..rows)
            .step_by(chunk)
            .map(|lo| {
                let hi = (lo + chunk).min(rows);
                scope.spawn(move || {
                    (lo..hi)
                        .map(|row| build_band(row as f64 + params.alpha + 1.0, p, q, k))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            bands.extend(h.join().expect("row worker panicked"));
        }
    });
    let mut row_deficits = Vec::with_capacity(rows);
    for b in &bands {
        if b.vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate(format!(
                "non-finite entry while building P with K = {k}"
            )));
        }
        let sum: CompensatedSum = b.vals.iter().copied().collect();
        row_deficits.push((1.0 - sum.value()).max(0.0));
    }
    Ok(TruncatedP {
        k,
        params: *params,
        bands,
        row_deficits,
    })
}

fn build_band(s: f64, p: f64, q: f64, k: usize) -> Band {
    let mode = if s > 1.0 { ((s - 1.0) * q / p).floor() } else { 0.0 };
    let anchor = (mode.min(k as f64)) as usize;
    let ln_a = ln_negbin_pmf(anchor as f64, s, p, q);
    if ln_a < -700.0 {
        return Band { start: 0, vals: Vec::new() };
    }
    let a = ln_a.exp();
    let cut = a * BAND_CUT;
    let mut right = Vec::new();
    let mut v = a;
    for j in anchor + 1..=k {
        v *= q * (s + j as f64 - 1.0) / j as f64;
        if v < cut {
            break;
        }
        right.push(v);
    }
    let mut left = Vec::new();
    v = a;
    for j in (0..anchor).rev() {
        v *= (j + 1) as f64 / (q * (s + j as f64));
        if v < cut {
            break;
        }
        left.push(v);
    }
    let start = anchor - left.len();
    left.reverse();
    left.push(a);
    left.extend(right);
    Band { start, vals: left }
}

/// Starts at [`DEFAULT_K`] and grows `K` by half until the checked rows have
/// deficits below `tol`.
pub fn build_p_adaptive(params: &OperatorParams, tol: f64) -> Result<TruncatedP> {
    let mut k = DEFAULT_K;
    loop {
        let p = build_p(params, k)?;
        if p.max_checked_deficit() < tol {
            return Ok(p);
        }
        if k >= MAX_K {
            return Err(Error::KMaxExceeded { k_max: MAX_K });
        }
        k = (k + k / 2).min(MAX_K);
    }
}

impl TruncatedP {
    /// Truncation order; the matrix is `(K+1) × (K+1)`.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    /// `1 − Σ_{j<=K} P_{k,j}`, the negative-binomial mass beyond column `K`.
    pub fn row_deficits(&self) -> &[f64] {
        &self.row_deficits
    }

    /// Entry `(row, col)`; zero outside the stored band.
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        let b = &self.bands[row];
        col.checked_sub(b.start)
            .and_then(|i| b.vals.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    /// First stored column and the stored values of `row`.
    pub fn row(&self, row: usize) -> (usize, &[f64]) {
        let b = &self.bands[row];
        (b.start, &b.vals)
    }

    /// Rows whose residuals are trusted: `k <= min(K/2, ¾·K·(n−β)/n)`.
    ///
    /// Row `k` is centred near column `k·n/(n−β)`, so for `β > 0` the rows up
    /// to `K/2` only sit well inside the matrix when `β` is small compared
    /// with `n`. The second bound keeps the checked rows' bulk below `3K/4`.
    pub fn checked_rows(&self) -> usize {
        let half = self.k / 2;
        let by_mean = (0.75 * self.k as f64 * self.params.lambda() / self.params.n).floor() as usize;
        half.min(by_mean).max(1)
    }

    pub fn max_checked_deficit(&self) -> f64 {
        self.row_deficits[..=self.checked_rows()]
            .iter()
            .fold(0.0, |m: f64, &d| m.max(d))
    }

    /// `P v`, with `v` padded by zeros up to length `K+1`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() > self.k + 1 {
            return Err(Error::InvalidParameter {
                name: "v",
                detail: format!("length {} exceeds K+1 = {}", v.len(), self.k + 1),
            });
        }
        Ok(self
            .bands
            .iter()
            .map(|b| {
                let end = (b.start + b.vals.len()).min(v.len());
                if end <= b.start {
                    return 0.0;
                }
                let sum: CompensatedSum = b.vals[..end - b.start]
                    .iter()
                    .zip(&v[b.start..end])
                    .map(|(p, x)| p * x)
                    .collect();
                sum.value()
            })
            .collect())
    }
}

/// Checks `P v = λ v` on the checked rows.
pub fn eigen_vector_check(p: &TruncatedP, which: Eigenpair) -> Result<EigenCheck> {
    let params = p.params();
    which.check_params(params, "eigen_vector_check")?;
    let z = which.ratio(params);
    let lambda = which.eigenvalue(params);
    let v = geometric(z, p.k() + 1);
    let pv = p.mul_vec(&v)?;
    let rows = p.checked_rows();
    let residual = (0..=rows)
        .map(|k| (pv[k] - lambda * v[k]).abs())
        .fold(0.0, f64::max);
    let mut out = EigenCheck::new(which, lambda);
    out.vector_residual = Some(residual);
    out.tail_bound = Some(p.max_checked_deficit());
    Ok(out)
}

fn geometric(z: f64, len: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(len);
    let mut x = 1.0;
    for _ in 0..len {
        v.push(x);
        x *= z;
    }
    v
}

fn eigenfunction(which: Eigenpair, params: &OperatorParams) -> TestFunction {
    match which {
        Eigenpair::Constant => TestFunction::constant(1.0),
        Eigenpair::Exponential => TestFunction::exp(-params.beta),
    }
}

/// Checks `M_n φ = λ φ` on `x_grid`.
pub fn eigen_operator_check(
    params: &OperatorParams,
    which: Eigenpair,
    x_grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<EigenCheck> {
    which.check_params(params, "eigen_operator_check")?;
    let lambda = which.eigenvalue(params);
    let f = eigenfunction(which, params);
    let mut residual = 0.0f64;
    let mut ratio_dev = 0.0f64;
    for &x in x_grid {
        let phi = f.eval(x);
        let m = apply_operator(&f, x, params, policy)?;
        residual = residual.max((m - lambda * phi).abs());
        ratio_dev = ratio_dev.max((m / phi - lambda).abs());
    }
    let mut out = EigenCheck::new(which, lambda);
    out.operator_residual = Some(residual);
    out.ratio_deviation = Some(ratio_dev);
    Ok(out)
}

/// Both checks on one record: matrix level on `p`, operator level on `x_grid`.
pub fn eigen_check(
    p: &TruncatedP,
    which: Eigenpair,
    x_grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<EigenCheck> {
    let mut out = eigen_vector_check(p, which)?;
    let op = eigen_operator_check(p.params(), which, x_grid, policy)?;
    out.operator_residual = op.operator_residual;
    out.ratio_deviation = op.ratio_deviation;
    Ok(out)
}

/// One step of [`iterate_decay`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateStep {
    pub step: u32,
    /// `max_x |Φ_{P^i v}(x) − λ₂^i e^{−βx}|`.
    pub max_deviation: f64,
    /// `max_x |Φ_{P^i v}(x) / Φ_{P^{i−1} v}(x) − λ₂|`; absent for step 0.
    pub ratio_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateReport {
    pub lambda2: f64,
    pub k: usize,
    pub steps: Vec<IterateStep>,
    pub max_deviation: f64,
    pub max_ratio_deviation: f64,
    /// Deviation budget: `10 (r · max checked deficit + eps_tail)`.
    pub tolerance: f64,
    /// Set when a lift window reaches beyond the checked rows, where
    /// truncation of `P` can dominate the result.
    pub truncation_warning: bool,
}

/// Iterates `v ↦ P v` from `v_j = (1−β/n)^j` and lifts each iterate.
pub fn iterate_decay(
    params: &OperatorParams,
    r: u32,
    x_grid: &[f64],
    policy: &TruncationPolicy,
) -> Result<IterateReport> {
    if !(params.beta > 0.0) {
        return Err(Error::Precondition {
            func: "iterate_decay",
            detail: format!("requires 0 < beta < n, got beta = {}", params.beta),
        });
    }
    Eigenpair::Exponential.check_params(params, "iterate_decay")?;
    let p = build_p_adaptive(params, DEFAULT_DEFICIT_TOL)?;
    let lambda2 = Eigenpair::Exponential.eigenvalue(params);
    let rows = p.checked_rows();
    let mut v = geometric(Eigenpair::Exponential.ratio(params), p.k() + 1);
    let mut steps = Vec::with_capacity(r as usize + 1);
    let mut prev: Option<Vec<f64>> = None;
    let mut warning = false;
    for i in 0..=r {
        if i > 0 {
            v = p.mul_vec(&v)?;
        }
        let target = lambda2.powi(i as i32);
        let mut lifted = Vec::with_capacity(x_grid.len());
        let mut dev = 0.0f64;
        for &x in x_grid {
            let (_, hi) = lift_window(&v, x, params.n, policy)?;
            warning |= hi as usize > rows;
            let l = lift(&v, x, params.n, policy)?;
            dev = dev.max((l - target * (-params.beta * x).exp()).abs());
            lifted.push(l);
        }
        let ratio_deviation = prev.as_ref().map(|pr| {
            lifted
                .iter()
                .zip(pr)
                .map(|(a, b)| (a / b - lambda2).abs())
                .fold(0.0, f64::max)
        });
        steps.push(IterateStep {
            step: i,
            max_deviation: dev,
            ratio_deviation,
        });
        prev = Some(lifted);
    }
    let max_deviation = steps.iter().map(|s| s.max_deviation).fold(0.0, f64::max);
    let max_ratio_deviation = steps
        .iter()
        .filter_map(|s| s.ratio_deviation)
        .fold(0.0, f64::max);
    Ok(IterateReport {
        lambda2,
        k: p.k(),
        steps,
        max_deviation,
        max_ratio_deviation,
        tolerance: 10.0 * (r as f64 * p.max_checked_deficit() + policy.eps_tail),
        truncation_warning: warning,
    })
}

fn sup_norm(v: &[f64]) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::InvalidParameter {
            name: "v",
            detail: "coefficient vector is empty".into(),
        });
    }
    let mut sup = 0.0f64;
    for (j, &x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::UnboundedCoefficients {
                detail: format!("entry {j} is {x}"),
            });
        }
        sup = sup.max(x.abs());
    }
    Ok(sup)
}

fn lift_window(v: &[f64], x: f64, n: f64, policy: &TruncationPolicy) -> Result<(u64, u64)> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "n",
            detail: format!("must be positive and finite, got {n}"),
        });
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "x",
            detail: format!("must be finite and nonnegative, got {x}"),
        });
    }
    let sup = sup_norm(v)?;
    let z = n * x;
    let last = v.len() as u64 - 1;
    if z == 0.0 || sup == 0.0 {
        return Ok((0, 0));
    }
    let eps = policy.eps_tail;
    let mode = (z.floor() as u64).min(last);
    let hi = first_below(mode, last, eps, |k| sup * poisson_upper_tail(z, k)).unwrap_or(last);
    let lo = last_below(mode.min(hi), eps, |k| sup * poisson_lower_tail(z, k));
    Ok((lo, hi))
}

/// `Φ_v(x) = Σ_j v_j ψ_{n,j}(x)` for a finitely supported `v`; entries past
/// the end of the slice are zero.
pub fn lift(v: &[f64], x: f64, n: f64, policy: &TruncationPolicy) -> Result<f64> {
    let (lo, hi) = lift_window(v, x, n, policy)?;
    let w = PoissonWindow::new(n * x, lo, hi);
    let sum: CompensatedSum = w.iter().map(|(k, wk)| wk * v[k as usize]).collect();
    Ok(sum.value())
}

/// `Φ_v` as a function the operator can be applied to.
#[derive(Debug, Clone)]
pub struct PoissonSeries {
    coeffs: Vec<f64>,
    n: f64,
    sup: f64,
    policy: TruncationPolicy,
}

impl PoissonSeries {
    pub fn new(coeffs: Vec<f64>, n: f64) -> Result<Self> {
        let sup = sup_norm(&coeffs)?;
        let policy = TruncationPolicy::default();
        lift_window(&coeffs, 0.0, n, &policy)?;
        Ok(PoissonSeries { coeffs, n, sup, policy })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

impl Integrand for PoissonSeries {
    fn eval(&self, t: f64) -> f64 {
        lift(&self.coeffs, t, self.n, &self.policy).unwrap_or(f64::NAN)
    }

    fn growth(&self) -> Growth {
        Growth { a: 0.0, k: self.sup.max(f64::MIN_POSITIVE) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(n: f64, alpha: f64, beta: f64) -> OperatorParams {
        OperatorParams::new(n, alpha, beta).unwrap()
    }

    #[test]
    fn corner_entry() {
        let p = build_p(&params(2.0, 0.0, 0.0), 8).unwrap();
        assert_relative_eq!(p.entry(0, 0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(p.entry(0, 1), 0.25, max_relative = 1e-15);
        assert_relative_eq!(p.entry(1, 1), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn entries_match_direct_formula() {
        let q = params(10.0, 0.5, 2.0);
        let p = build_p(&q, 300).unwrap();
        let (pp, qq) = (8.0 / 18.0, 10.0 / 18.0);
        for (k, j) in [(0usize, 0usize), (3, 7), (40, 50), (100, 130), (250, 290)] {
            let s = k as f64 + 1.5;
            let lg = |x: f64| crate::special_fn::log_gamma(x).unwrap();
            let direct = (s * f64::ln(pp) + j as f64 * f64::ln(qq) + lg(s + j as f64) - lg(s) - lg(j as f64 + 1.0)).exp();
            assert_relative_eq!(p.entry(k, j), direct, max_relative = 1e-11);
        }
    }

    #[test]
    fn deficits_shrink_with_k() {
        let q = params(10.0, 1.0, 2.0);
        let small = build_p(&q, 200).unwrap();
        let large = build_p(&q, 400).unwrap();
        for k in 0..=200 {
            assert!(large.row_deficits()[k] <= small.row_deficits()[k] + 1e-15, "row {k}");
            assert!((0.0..1.0).contains(&small.row_deficits()[k]));
        }
    }

    #[test]
    fn adaptive_reaches_target() {
        let p = build_p_adaptive(&params(10.0, 0.0, 2.0), 1e-12).unwrap();
        assert!(p.max_checked_deficit() < 1e-12);
        assert!(p.k() >= DEFAULT_K);
    }

    #[test]
    fn eigenvalues() {
        assert_relative_eq!(Eigenpair::Exponential.eigenvalue(&params(10.0, 0.0, 2.0)), 0.8, max_relative = 1e-15);
        assert_relative_eq!(Eigenpair::Exponential.eigenvalue(&params(10.0, 1.0, 2.0)), 0.64, max_relative = 1e-15);
        assert_eq!(Eigenpair::Exponential.eigenvalue(&params(10.0, 1.0, 0.0)), 1.0);
    }

    #[test]
    fn vector_checks() {
        let p = build_p_adaptive(&params(10.0, 0.0, 2.0), 1e-12).unwrap();
        let c = eigen_vector_check(&p, Eigenpair::Constant).unwrap();
        assert!((c.vector_residual.unwrap() - c.tail_bound.unwrap()).abs() < 1e-15);
        let e = eigen_vector_check(&p, Eigenpair::Exponential).unwrap();
        assert!(e.vector_residual.unwrap() <= 10.0 * e.tail_bound.unwrap().max(1e-16));
        let neg = build_p(&params(10.0, 0.0, -1.0), 64).unwrap();
        assert!(matches!(
            eigen_vector_check(&neg, Eigenpair::Exponential),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn operator_check_at_one() {
        let q = params(10.0, 0.0, 2.0);
        let pol = TruncationPolicy::default();
        let e = eigen_operator_check(&q, Eigenpair::Exponential, &[1.0], &pol).unwrap();
        assert!(e.operator_residual.unwrap() <= 1e-8);
        let c = eigen_operator_check(&q, Eigenpair::Constant, &[0.0, 1.0, 5.0], &pol).unwrap();
        assert!(c.operator_residual.unwrap() <= 1e-12);
    }

    #[test]
    fn lift_examples() {
        let pol = TruncationPolicy::default();
        assert_relative_eq!(lift(&[1.0; 200], 1.0, 10.0, &pol).unwrap(), 1.0, max_relative = 1e-14);
        let v = geometric(0.8, 200);
        assert_relative_eq!(lift(&v, 1.0, 10.0, &pol).unwrap(), (-2.0f64).exp(), max_relative = 1e-13);
        let mut e0 = vec![0.0; 10];
        e0[0] = 1.0;
        assert_eq!(lift(&e0, 0.0, 10.0, &pol).unwrap(), 1.0);
        assert!(matches!(
            lift(&[1.0, f64::INFINITY], 1.0, 10.0, &pol),
            Err(Error::UnboundedCoefficients { .. })
        ));
    }

    #[test]
    fn iterates_decay_geometrically() {
        let q = params(10.0, 0.0, 2.0);
        let rep = iterate_decay(&q, 3, &[0.0, 0.5, 1.0, 2.0], &TruncationPolicy::default()).unwrap();
        assert!(rep.max_ratio_deviation < 1e-6, "{rep:?}");
        assert!(rep.steps[0].max_deviation < 1e-13);
        assert!(!rep.truncation_warning);
    }
}
