//! Raw and central moments of the operator, each available by more than one
//! independent route so they can be cross-checked.
//!
//! The production path for raw moments is the three-term recurrence; the
//! `₁F₁` closed form and quadrature of the operator applied to `t^r` serve as
//! verification paths.

mod asymptotic;
mod central;
mod raw;

pub use asymptotic::{
    asymptotic_case, asymptotic_prediction, asymptotic_ratio_table, generating_sums, AsymptoticCase,
    AsymptoticRow,
};
pub use central::{
    central_moment, central_moment_binomial, central_moment_explicit, variance_constant, CentralMoment,
};
pub use raw::{
    diff_recurrence_residual, raw_moment_closed, raw_moment_closed_with, raw_moment_explicit,
    raw_moment_recurrence, raw_moments_dd, three_term_residual,
};

use crate::error::Result;
use crate::operator::{Operator, OperatorParams, TestFunction, TruncationPolicy};

/// One raw moment computed every available way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub r: u32,
    pub x: f64,
    pub value_closed: f64,
    pub value_recurrence: f64,
    /// Only for `r <= 4`.
    pub value_explicit: Option<f64>,
    pub value_quadrature: f64,
    /// Largest pairwise `|a − b| / max(|a|, |b|)` among the present values.
    pub max_cross_residual: f64,
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

pub fn moment_report(
    r: u32,
    x: f64,
    params: &OperatorParams,
    policy: &TruncationPolicy,
) -> Result<MomentReport> {
    let op = Operator::new(TestFunction::monomial(r), *params, *policy)?;
    moment_report_with(&op, r, x)
}

/// Like [`moment_report`] but reuses an operator already bound to `t^r`.
pub fn moment_report_with(op: &Operator<TestFunction>, r: u32, x: f64) -> Result<MomentReport> {
    let params = op.params();
    let value_closed = raw_moment_closed(r, x, params)?;
    let value_recurrence = raw_moment_recurrence(r, x, params);
    let value_explicit = if (1..=4).contains(&r) {
        Some(raw_moment_explicit(r, x, params)?)
    } else {
        None
    };
    let value_quadrature = op.apply(x)?;
    let mut vals = vec![value_closed, value_recurrence, value_quadrature];
    vals.extend(value_explicit);
    let mut max_cross_residual = 0.0f64;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            max_cross_residual = max_cross_residual.max(rel_diff(vals[i], vals[j]));
        }
    }
    Ok(MomentReport {
        r,
        x,
        value_closed,
        value_recurrence,
        value_explicit,
        value_quadrature,
        max_cross_residual,
    })
}
