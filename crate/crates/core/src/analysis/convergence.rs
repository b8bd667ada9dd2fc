use super::norms::{grid_sup, modulus_of_continuity, weighted_phi_norm};
use super::{ConvergenceReport, ConvergenceRow, NormKind, NormSpec};
use crate::error::{Error, Result};
use crate::numeric::{gauss_legendre_cached, par_map, CompensatedSum};
use crate::operator::{Integrand, Operator, OperatorParams, TestFunction, TruncationPolicy};

fn check_n_grid(n_grid: &[f64]) -> Result<()> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "n_grid",
            detail: "must be non-empty and strictly ascending".into(),
        });
    }
    Ok(())
}

/// `E_n = sup_{[0,a]} |M_n f − f|` and `E_n / ω(f, n^{-1/2})` along `n_grid`.
///
/// `base` supplies `α` and `β`; its `n` is replaced by each grid value. The
/// largest ratio is reported as the measured constant.
pub fn compact_estimate_check(
    f: &TestFunction,
    base: &OperatorParams,
    n_grid: &[f64],
    a: f64,
    grid_points: usize,
    policy: &TruncationPolicy,
) -> Result<ConvergenceReport> {
    check_n_grid(n_grid)?;
    let norm = NormSpec::new(NormKind::SupCompact { a }, grid_points)?;
    let kinks = f.breakpoints();
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let op = Operator::new(f.clone(), base.with_n(n), *policy)?;
        let (_, error) = grid_sup(|x| Ok(op.apply(x)? - f.eval(x)), 0.0, a, grid_points, &kinks)?;
        let omega = modulus_of_continuity(|t| f.eval(t), 1.0 / n.sqrt(), a, grid_points);
        rows.push(ConvergenceRow {
            n,
            error,
            ratio: (omega > 0.0).then(|| error / omega),
        });
    }
    ConvergenceReport::assemble(f.descriptor(), norm, rows)
}

/// Panel boundaries on `[0, r]`: `panels` equal pieces plus interior kinks.
fn panel_breaks(r: f64, panels: usize, kinks: &[f64]) -> Vec<f64> {
    super::norms::grid_with(0.0, r, panels + 1, kinks)
}

/// `∫ g` over the panels with a 20-point Gauss–Legendre rule on each.
fn composite<G>(g: G, breaks: &[f64]) -> Result<f64>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    let rule = gauss_legendre_cached(20);
    let mut nodes = Vec::with_capacity((breaks.len() - 1) * rule.nodes.len());
    for w in breaks.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            nodes.push((mid + half * x, half * wt));
        }
    }
    let vals = par_map(&nodes, |&(x, wt)| g(x).map(|v| wt * v));
    let mut sum = CompensatedSum::new();
    for v in vals {
        sum.add(v?);
    }
    Ok(sum.value())
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            detail: format!("must be in [1, ∞), got {p}"),
        });
    }
    Ok(())
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidParameter {
            name,
            detail: format!("must be positive and finite, got {v}"),
        });
    }
    Ok(())
}

fn weighted_lp_with<F: Integrand>(op: &Operator<F>, p: f64, gamma: f64, r: f64) -> Result<f64> {
    let f = op.function();
    let panels = ((8.0 * r).ceil() as usize).clamp(16, 4096);
    let breaks = panel_breaks(r, panels, &f.breakpoints());
    let integral = composite(
        |x| Ok((op.apply(x)? - f.eval(x)).abs().powf(p) * (gamma * x).exp()),
        &breaks,
    )?;
    Ok(integral.max(0.0).powf(1.0 / p))
}

/// `(∫_0^R |M_n f − f|^p dx)^{1/p}` by composite Gauss–Legendre quadrature,
/// with the kinks of `f` placed on panel boundaries.
pub fn lp_error<F: Integrand + Clone>(
    f: &F,
    params: &OperatorParams,
    p: f64,
    r: f64,
    policy: &TruncationPolicy,
) -> Result<f64> {
    check_p(p)?;
    check_positive("R", r)?;
    let op = Operator::new(f.clone(), *params, *policy)?;
    weighted_lp_with(&op, p, 0.0, r)
}

/// Weighted `L_p` error on `[0, R_max]` with the flag for `γ <= pβ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedLpError {
    pub value: f64,
    /// Whether `γ <= pβ`, the condition under which uniform boundedness
    /// in the weighted space is known.
    pub hypothesis_holds: bool,
    pub r_max: f64,
}

/// `(∫_0^{R_max} |M_n f − f|^p e^{γx} dx)^{1/p}`.
///
/// Computed whether or not `γ <= pβ` holds; the flag records which.
pub fn weighted_lp_error<F: Integrand + Clone>(
    f: &F,
    params: &OperatorParams,
    p: f64,
    gamma: f64,
    r_max: f64,
    policy: &TruncationPolicy,
) -> Result<WeightedLpError> {
    check_p(p)?;
    check_positive("R_max", r_max)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            detail: format!("must be finite and nonnegative, got {gamma}"),
        });
    }
    let op = Operator::new(f.clone(), *params, *policy)?;
    Ok(WeightedLpError {
        value: weighted_lp_with(&op, p, gamma, r_max)?,
        hypothesis_holds: gamma <= p * params.beta,
        r_max,
    })
}

/// Error of `M_n f` against `f` in the chosen norm along `n_grid`.
///
/// Only the compact sup norm carries a theoretical rate, `ω(f, n^{-1/2})`;
/// for the other norms `ratio` is absent.
pub fn convergence_report(
    f: &TestFunction,
    base: &OperatorParams,
    n_grid: &[f64],
    norm: &NormSpec,
    policy: &TruncationPolicy,
) -> Result<ConvergenceReport> {
    norm.validate()?;
    check_n_grid(n_grid)?;
    if let NormKind::SupCompact { a } = norm.kind {
        return compact_estimate_check(f, base, n_grid, a, norm.grid_points, policy);
    }
    let mut rows = Vec::with_capacity(n_grid.len());
    let mut hypothesis = None;
    for &n in n_grid {
        let params = base.with_n(n);
        params.validate()?;
        let op = Operator::new(f.clone(), params, *policy)?;
        let error = match norm.kind {
            NormKind::WeightedPhi { x_max } => {
                let g = |x: f64| op.apply(x).map_or(f64::NAN, |m| m - f.eval(x));
                weighted_phi_norm(g, x_max, norm.grid_points)
            }
            NormKind::Lp { p, r } => weighted_lp_with(&op, p, 0.0, r)?,
            NormKind::WeightedLp { p, gamma, r_max } => {
                hypothesis = Some(gamma <= p * params.beta);
                weighted_lp_with(&op, p, gamma, r_max)?
            }
            NormKind::SupCompact { .. } => unreachable!(),
        };
        if error.is_nan() {
            return Err(Error::Degenerate(format!("operator evaluation failed at n = {n}")));
        }
        rows.push(ConvergenceRow { n, error, ratio: None });
    }
    let mut report = ConvergenceReport::assemble(f.descriptor(), *norm, rows)?;
    report.hypothesis_holds = hypothesis;
    Ok(report)
}
