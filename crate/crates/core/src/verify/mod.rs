//! The acceptance suite: fourteen numbered checks over a fixed parameter
//! grid, each reported as rows of (check, worst measured value, tolerance,
//! pass).
//!
//! A check's measured value is the worst case over its grid and
//! `worst_case` names where that worst case occurred. A row passes when the
//! measured value does not exceed the tolerance.

mod analysis_checks;
mod operator_checks;
mod spectral_checks;

use crate::error::Result;
use crate::operator::OperatorParams;

pub const GRID_N: [f64; 4] = [5.0, 10.0, 50.0, 200.0];
pub const GRID_ALPHA: [f64; 5] = [-0.5, -0.25, 0.0, 0.5, 1.0];
pub const GRID_BETA: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
pub const GRID_X: [f64; 5] = [0.0, 0.1, 1.0, 2.0, 5.0];

/// Number of criteria exposed by [`run_criterion`].
pub const CRITERIA: u8 = 14;

/// Every `(n, α, β)` of the grid with `n > β`.
pub fn grid_params() -> Vec<OperatorParams> {
    let mut out = Vec::new();
    for &n in &GRID_N {
        for &alpha in &GRID_ALPHA {
            for &beta in &GRID_BETA {
                if n > beta {
                    out.push(OperatorParams { n, alpha, beta });
                }
            }
        }
    }
    out
}

pub(crate) fn label(p: &OperatorParams) -> String {
    format!("n={} alpha={} beta={}", p.n, p.alpha, p.beta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub criterion: u8,
    pub check: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub worst_case: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub rows: Vec<CheckRow>,
}

impl CriterionResult {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Running maximum that remembers where it was attained. A NaN sample
/// poisons the maximum so the row fails.
#[derive(Debug, Clone)]
pub(crate) struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    pub(crate) fn new() -> Self {
        Worst {
            value: f64::NEG_INFINITY,
            at: String::new(),
        }
    }

    pub(crate) fn push(&mut self, v: f64, at: impl FnOnce() -> String) {
        if self.value.is_nan() {
            return;
        }
        if v.is_nan() || v > self.value {
            self.value = v;
            self.at = at();
        }
    }

    pub(crate) fn merge(&mut self, other: Worst) {
        let Worst { value, at } = other;
        self.push(value, || at);
    }

    pub(crate) fn row(self, criterion: u8, check: impl Into<String>, tolerance: f64) -> CheckRow {
        let measured = if self.value == f64::NEG_INFINITY { 0.0 } else { self.value };
        CheckRow {
            criterion,
            check: check.into(),
            measured,
            tolerance,
            pass: measured <= tolerance,
            worst_case: self.at,
        }
    }

    /// Like [`Worst::row`] but the measured value must be strictly below
    /// the tolerance.
    pub(crate) fn row_strict(self, criterion: u8, check: impl Into<String>, tolerance: f64) -> CheckRow {
        let mut r = self.row(criterion, check, tolerance);
        r.pass = r.measured < tolerance;
        r
    }
}

/// Row for a computation that failed outright.
pub(crate) fn error_row(criterion: u8, check: impl Into<String>, tolerance: f64, err: &crate::Error) -> CheckRow {
    CheckRow {
        criterion,
        check: check.into(),
        measured: f64::NAN,
        tolerance,
        pass: false,
        worst_case: format!("error: {err}"),
    }
}

pub fn criterion_title(id: u8) -> &'static str {
    match id {
        1 => "normalization",
        2 => "moment cross-agreement",
        3 => "three-term recurrence",
        4 => "differential recurrence",
        5 => "central moments",
        6 => "central moment asymptotics",
        7 => "eigenpairs",
        8 => "iterate decay",
        9 => "compact uniform estimate",
        10 => "weighted Korovkin rates",
        11 => "local Lp convergence",
        12 => "Schur integrals",
        13 => "Szasz-Durrmeyer specialization",
        14 => "interpolation at zero",
        _ => "unknown",
    }
}

/// Runs criterion `id` (1 to [`CRITERIA`]).
pub fn run_criterion(id: u8) -> Result<CriterionResult> {
    let rows = match id {
        1 => operator_checks::normalization(),
        2 => operator_checks::moment_agreement(),
        3 => operator_checks::three_term(),
        4 => operator_checks::differential(),
        5 => operator_checks::central(),
        6 => operator_checks::asymptotics(),
        7 => spectral_checks::eigenpairs(),
        8 => spectral_checks::iterate_decay_check(),
        9 => analysis_checks::compact_estimate(),
        10 => analysis_checks::korovkin(),
        11 => analysis_checks::local_lp(),
        12 => analysis_checks::schur(),
        13 => operator_checks::specialization(),
        14 => operator_checks::zero_interpolation(),
        _ => {
            return Err(crate::Error::InvalidParameter {
                name: "criterion",
                detail: format!("must be in 1..={CRITERIA}, got {id}"),
            })
        }
    };
    Ok(CriterionResult {
        id,
        title: criterion_title(id),
        rows,
    })
}

/// All criteria in order.
pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERIA)
        .map(|id| run_criterion(id).expect("criterion id in range"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size() {
        assert_eq!(grid_params().len(), 80);
    }

    #[test]
    fn worst_tracks_nan_and_max() {
        let mut w = Worst::new();
        w.push(1.0, || "a".into());
        w.push(3.0, || "b".into());
        w.push(2.0, || "c".into());
        let r = w.clone().row(1, "x", 3.0);
        assert!(r.pass && r.worst_case == "b");
        w.push(f64::NAN, || "d".into());
        w.push(5.0, || "e".into());
        let r = w.row(1, "x", 10.0);
        assert!(!r.pass && r.worst_case == "d");
    }

    #[test]
    fn empty_worst_is_zero() {
        assert_eq!(Worst::new().row(1, "x", 0.0).measured, 0.0);
    }
}
