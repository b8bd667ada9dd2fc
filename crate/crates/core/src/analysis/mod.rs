//! Convergence experiments: moduli of continuity, sup and weighted norms of
//! `M_n f − f`, `L_p` errors, and the Schur-test integrals.

mod convergence;
mod norms;
mod schur;

pub use convergence::{
    compact_estimate_check, convergence_report, lp_error, weighted_lp_error, WeightedLpError,
};
pub use norms::{
    korovkin_weighted_check, modulus_of_continuity, rational_phi_sup, weighted_phi_norm,
    KorovkinNorms,
};
pub use schur::{schur_e, schur_first_integral, schur_second_integral, SchurE, SchurSecond};

use crate::error::{Error, Result};

/// Default number of grid points for sup norms.
pub const DEFAULT_GRID_POINTS: usize = 2001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// Sup over `[0, a]`.
    SupCompact { a: f64 },
    /// `sup |g| / (1 + x²)` over `[0, x_max]`.
    WeightedPhi { x_max: f64 },
    /// `L_p` over `[0, r]`.
    Lp { p: f64, r: f64 },
    /// `L_p` with weight `e^{γx}` over `[0, r_max]`.
    WeightedLp { p: f64, gamma: f64, r_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    pub kind: NormKind,
    pub grid_points: usize,
}

impl NormSpec {
    pub fn new(kind: NormKind, grid_points: usize) -> Result<Self> {
        let s = NormSpec { kind, grid_points };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    detail: format!("must be positive and finite, got {v}"),
                })
            }
        };
        let p_ok = |p: f64| {
            if p >= 1.0 && p.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name: "p",
                    detail: format!("must be in [1, ∞), got {p}"),
                })
            }
        };
        if self.grid_points < 2 {
            return Err(Error::InvalidParameter {
                name: "grid_points",
                detail: "need at least 2".into(),
            });
        }
        match self.kind {
            NormKind::SupCompact { a } => positive("a", a),
            NormKind::WeightedPhi { x_max } => positive("x_max", x_max),
            NormKind::Lp { p, r } => p_ok(p).and(positive("R", r)),
            NormKind::WeightedLp { p, gamma, r_max } => {
                p_ok(p)?;
                positive("R_max", r_max)?;
                if gamma >= 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter {
                        name: "gamma",
                        detail: format!("must be finite and nonnegative, got {gamma}"),
                    })
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            NormKind::SupCompact { .. } => "sup",
            NormKind::WeightedPhi { .. } => "phi",
            NormKind::Lp { .. } => "lp",
            NormKind::WeightedLp { .. } => "weighted-lp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: f64,
    pub error: f64,
    /// `error / rate(n)` when a rate is known.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub function: String,
    pub norm: NormSpec,
    /// Ordered by `n`.
    pub rows: Vec<ConvergenceRow>,
    /// Slope of `ln error` against `ln n`; absent with fewer than three
    /// positive errors.
    pub fitted_slope: Option<f64>,
    /// Largest `ratio` over the rows.
    pub bound_constant: Option<f64>,
    /// For the weighted `L_p` norm: whether `γ <= pβ`.
    pub hypothesis_holds: Option<bool>,
}

impl ConvergenceReport {
    pub(crate) fn assemble(function: String, norm: NormSpec, rows: Vec<ConvergenceRow>) -> Result<Self> {
        if rows.iter().any(|r| !(r.error >= 0.0)) {
            return Err(Error::Degenerate("negative or NaN error in convergence rows".into()));
        }
        let bound_constant = rows.iter().filter_map(|r| r.ratio).reduce(f64::max);
        let mut report = ConvergenceReport {
            function,
            norm,
            rows,
            fitted_slope: None,
            bound_constant,
            hypothesis_holds: None,
        };
        report.fitted_slope = rate_slope(&report).ok().map(|f| f.slope);
        Ok(report)
    }
}

/// Least-squares fit of `ln error = c + slope · ln n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    /// Rows left out because their error was zero.
    pub excluded_zero: usize,
}

pub fn rate_slope(report: &ConvergenceReport) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.n, r.error)).collect();
    fit_log_slope(&pts)
}

/// Log-log slope through `(n, error)` pairs, skipping zero errors.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!("need at least 3 rows, got {}", points.len())));
    }
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|&(n, e)| (n.ln(), e.ln()))
        .collect();
    let excluded_zero = points.len() - used.len();
    if used.len() < 3 {
        return Err(Error::Degenerate(format!(
            "only {} positive errors after excluding {excluded_zero} zeros",
            used.len()
        )));
    }
    let m = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / m;
    let my = used.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all n values coincide".into()));
    }
    Ok(RateFit {
        slope: sxy / sxx,
        excluded_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let ns = [10.0, 40.0, 160.0, 640.0];
        let inv: Vec<_> = ns.iter().map(|&n| (n, 3.0 / n)).collect();
        assert!((fit_log_slope(&inv).unwrap().slope + 1.0).abs() < 1e-12);
        let root: Vec<_> = ns.iter().map(|&n| (n, 0.2 / n.sqrt())).collect();
        assert!((fit_log_slope(&root).unwrap().slope + 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_log_slope(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(fit_log_slope(&[(1.0, 0.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        let f = fit_log_slope(&[(1.0, 0.0), (2.0, 0.5), (4.0, 0.25), (8.0, 0.125)]).unwrap();
        assert_eq!(f.excluded_zero, 1);
    }

    #[test]
    fn norm_spec_validation() {
        assert!(NormSpec::new(NormKind::Lp { p: 0.5, r: 1.0 }, 10).is_err());
        assert!(NormSpec::new(NormKind::WeightedLp { p: 2.0, gamma: -1.0, r_max: 1.0 }, 10).is_err());
        assert!(NormSpec::new(NormKind::SupCompact { a: 0.0 }, 10).is_err());
        assert!(NormSpec::new(NormKind::WeightedPhi { x_max: 5.0 }, 10).is_ok());
    }
}
