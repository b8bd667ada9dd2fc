//! Dispatch of validated commands to the library, producing tables.

use smld_core::analysis::{convergence_report, schur_e, schur_first_integral, schur_second_integral};
use smld_core::moments::{asymptotic_ratio_table, central_moment_binomial, central_moment_explicit, moment_report};
use smld_core::operator::{Operator, OperatorParams, TruncationPolicy};
use smld_core::spectral::{
    build_p, build_p_adaptive, eigen_check, iterate_decay, Eigenpair, DEFAULT_DEFICIT_TOL,
};
use smld_core::verify::{run_criterion, CheckRow};

use crate::args::{Command, RunConfig, SchurQuantity, DETERMINISM_CRITERION};
use crate::error::{exit, CliError};
use crate::table::{Cell, Table};

/// A finished report and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub exit_code: i32,
}

impl Report {
    fn ok(table: Table) -> Self {
        Report { table, exit_code: exit::OK }
    }
}

pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let pol = &config.policy;
    match &config.command {
        Command::Moments { params, x, max_r } => moments(params, *x, *max_r, pol).map(Report::ok),
        Command::CentralMoments { params, x, max_r } => central(params, x, *max_r).map(Report::ok),
        Command::Asymptotics { alpha, beta, r, x, n_grid } => {
            asymptotics(*alpha, *beta, *r, *x, n_grid).map(Report::ok)
        }
        Command::Apply { params, f, x } => {
            let op = Operator::new(f.clone(), *params, *pol)?;
            let mut t = Table::new(&["x", "value", "f"]);
            for &xi in x {
                t.push(vec![xi.into(), op.apply(xi)?.into(), f.eval(xi).into()]);
            }
            Ok(Report::ok(t))
        }
        Command::Converge { base, f, norm, n_grid } => {
            let rep = convergence_report(f, base, n_grid, norm, pol)?;
            let mut t = Table::new(&[
                "function",
                "norm",
                "n",
                "error",
                "ratio",
                "fitted_slope",
                "bound_constant",
                "hypothesis_holds",
            ]);
            for row in &rep.rows {
                t.push(vec![
                    rep.function.as_str().into(),
                    rep.norm.name().into(),
                    row.n.into(),
                    row.error.into(),
                    row.ratio.into(),
                    rep.fitted_slope.into(),
                    rep.bound_constant.into(),
                    rep.hypothesis_holds.into(),
                ]);
            }
            Ok(Report::ok(t))
        }
        Command::Eigen { params, x, k, iterations } => match iterations {
            Some(r) => iterate(params, *r, x, pol).map(Report::ok),
            None => eigen(params, x, *k, pol).map(Report::ok),
        },
        Command::Schur { params, quantity, gamma, p, points } => {
            schur(params, *quantity, *gamma, *p, points, pol).map(Report::ok)
        }
        Command::VerifyAll { criteria } => Ok(verify_all(criteria)),
    }
}

fn moments(params: &OperatorParams, x: f64, max_r: u32, pol: &TruncationPolicy) -> Result<Table, CliError> {
    let mut t = Table::new(&["r", "closed", "recurrence", "explicit", "quadrature", "max_residual"]);
    for r in 0..=max_r {
        let m = moment_report(r, x, params, pol)?;
        t.push(vec![
            r.into(),
            m.value_closed.into(),
            m.value_recurrence.into(),
            m.value_explicit.into(),
            m.value_quadrature.into(),
            m.max_cross_residual.into(),
        ]);
    }
    Ok(t)
}

fn central(params: &OperatorParams, xs: &[f64], max_r: u32) -> Result<Table, CliError> {
    let mut t = Table::new(&["x", "r", "explicit", "binomial", "binomial_rel_error", "cancellation_warning"]);
    for &x in xs {
        for r in 1..=max_r {
            let explicit = if r <= 4 { Some(central_moment_explicit(r, x, params)?) } else { None };
            let b = central_moment_binomial(r, x, params)?;
            t.push(vec![
                x.into(),
                r.into(),
                explicit.into(),
                b.value.into(),
                b.rel_error.into(),
                b.cancellation_warning.into(),
            ]);
        }
    }
    Ok(t)
}

fn asymptotics(alpha: f64, beta: f64, r: u32, x: f64, n_grid: &[f64]) -> Result<Table, CliError> {
    let mut t = Table::new(&["n", "exact", "predicted", "ratio", "two_term", "zero_prediction"]);
    for row in asymptotic_ratio_table(r, x, alpha, beta, n_grid)? {
        t.push(vec![
            row.n.into(),
            row.exact.into(),
            row.predicted.into(),
            row.ratio.into(),
            row.two_term.into(),
            row.flagged_zero_prediction.into(),
        ]);
    }
    Ok(t)
}

fn eigen(params: &OperatorParams, xs: &[f64], k: Option<usize>, pol: &TruncationPolicy) -> Result<Table, CliError> {
    let p = match k {
        Some(k) => build_p(params, k)?,
        None => build_p_adaptive(params, DEFAULT_DEFICIT_TOL)?,
    };
    let mut t = Table::new(&[
        "pair",
        "eigenvector",
        "lambda",
        "k",
        "checked_rows",
        "vector_residual",
        "tail_bound",
        "operator_residual",
        "ratio_deviation",
    ]);
    for (name, which) in [("lambda1", Eigenpair::Constant), ("lambda2", Eigenpair::Exponential)] {
        let c = eigen_check(&p, which, xs, pol)?;
        t.push(vec![
            name.into(),
            which.name().into(),
            c.lambda.into(),
            p.k().into(),
            p.checked_rows().into(),
            c.vector_residual.into(),
            c.tail_bound.into(),
            c.operator_residual.into(),
            c.ratio_deviation.into(),
        ]);
    }
    Ok(t)
}

fn iterate(params: &OperatorParams, r: u32, xs: &[f64], pol: &TruncationPolicy) -> Result<Table, CliError> {
    let rep = iterate_decay(params, r, xs, pol)?;
    let mut t = Table::new(&[
        "step",
        "lambda2",
        "max_deviation",
        "ratio_deviation",
        "tolerance",
        "k",
        "truncation_warning",
    ]);
    for s in &rep.steps {
        t.push(vec![
            s.step.into(),
            rep.lambda2.into(),
            s.max_deviation.into(),
            s.ratio_deviation.into(),
            rep.tolerance.into(),
            rep.k.into(),
            rep.truncation_warning.into(),
        ]);
    }
    Ok(t)
}

fn schur(
    params: &OperatorParams,
    quantity: SchurQuantity,
    gamma: f64,
    p: f64,
    points: &[f64],
    pol: &TruncationPolicy,
) -> Result<Table, CliError> {
    let t = match quantity {
        SchurQuantity::E => {
            let mut t = Table::new(&["t", "e_n", "in_lemma_range"]);
            for &ti in points {
                let e = schur_e(params, ti)?;
                t.push(vec![ti.into(), e.value.into(), e.in_lemma_range.into()]);
            }
            t
        }
        SchurQuantity::First => {
            let mut t = Table::new(&["x", "gamma", "p", "first_integral"]);
            for &x in points {
                t.push(vec![x.into(), gamma.into(), p.into(), schur_first_integral(params, gamma, p, x)?.into()]);
            }
            t
        }
        SchurQuantity::Second => {
            let mut t = Table::new(&["t", "gamma", "p", "bound", "direct", "direct_error", "closed"]);
            for &ti in points {
                let s = schur_second_integral(params, gamma, p, ti, pol)?;
                t.push(vec![
                    ti.into(),
                    gamma.into(),
                    p.into(),
                    s.bound.into(),
                    s.direct.into(),
                    s.direct_error.into(),
                    s.closed.into(),
                ]);
            }
            t
        }
    };
    Ok(t)
}

const VERIFY_COLUMNS: [&str; 7] = ["criterion", "title", "check", "measured", "tolerance", "pass", "worst_case"];

fn push_check(t: &mut Table, title: &str, row: &CheckRow) {
    t.push(vec![
        Cell::Int(row.criterion.into()),
        title.into(),
        row.check.as_str().into(),
        row.measured.into(),
        row.tolerance.into(),
        row.pass.into(),
        row.worst_case.as_str().into(),
    ]);
}

fn library_checks(criteria: &[u8]) -> Table {
    let mut t = Table::new(&VERIFY_COLUMNS);
    for &id in criteria.iter().filter(|&&c| c < DETERMINISM_CRITERION) {
        let res = run_criterion(id).expect("criterion ids are validated during parsing");
        for row in &res.rows {
            push_check(&mut t, res.title, row);
        }
    }
    t
}

/// Runs the selected criteria. The determinism criterion reruns the others
/// in process and compares the encoded rows byte for byte; it also reports
/// how many rows failed, since a clean run must exit with status 0.
pub fn verify_all(criteria: &[u8]) -> Report {
    let mut t = library_checks(criteria);
    let failed = t.rows.iter().filter(|r| r[5] == Cell::Bool(false)).count();
    if criteria.contains(&DETERMINISM_CRITERION) {
        let first = t.to_csv();
        let second = library_checks(criteria).to_csv();
        let differing = first.lines().zip(second.lines()).filter(|(a, b)| a != b).count()
            + first.lines().count().abs_diff(second.lines().count());
        let title = "determinism";
        let id = DETERMINISM_CRITERION;
        push_check(
            &mut t,
            title,
            &CheckRow {
                criterion: id,
                check: "rows differing between two in-process runs".into(),
                measured: differing as f64,
                tolerance: 0.0,
                pass: differing == 0,
                worst_case: if differing == 0 { String::new() } else { "report changed between runs".into() },
            },
        );
        push_check(
            &mut t,
            title,
            &CheckRow {
                criterion: id,
                check: "failing rows in criteria 1-14 (exit status 0 needs none)".into(),
                measured: failed as f64,
                tolerance: 0.0,
                pass: failed == 0,
                worst_case: String::new(),
            },
        );
    }
    let any_failed = t.rows.iter().any(|r| r[5] == Cell::Bool(false));
    Report {
        table: t,
        exit_code: if any_failed { exit::VERIFICATION_FAILED } else { exit::OK },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use smld_core::operator::TestFunction;

    fn params(n: f64, alpha: f64, beta: f64) -> OperatorParams {
        OperatorParams::new(n, alpha, beta).unwrap()
    }

    #[test]
    fn moments_table_shape() {
        let t = moments(&params(10.0, 0.0, 0.0), 1.0, 4, &TruncationPolicy::default()).unwrap();
        assert_eq!(t.columns, ["r", "closed", "recurrence", "explicit", "quadrature", "max_residual"]);
        assert_eq!(t.rows.len(), 5);
        assert_eq!(t.rows[0][3], Cell::Null);
        // M_n t (1) = (n x + α + 1)/(n − β) = 1.1
        let num = |c: &Cell| match c {
            Cell::Num(v) => *v,
            c => panic!("{c:?}"),
        };
        assert!((num(&t.rows[1][2]) - 1.1).abs() < 1e-15);
        assert!((num(&t.rows[1][1]) - 1.1).abs() < 1e-13);
    }

    #[test]
    fn eigen_reports_second_eigenvalue() {
        let t = eigen(&params(10.0, 0.0, 2.0), &[0.0, 1.0], None, &TruncationPolicy::default()).unwrap();
        assert_eq!(t.rows[1][0], Cell::Text("lambda2".into()));
        match t.rows[1][2] {
            Cell::Num(v) => assert!((v - 0.8).abs() < 1e-15, "{v}"),
            ref c => panic!("{c:?}"),
        }
    }

    #[test]
    fn apply_constant_is_one() {
        let f = TestFunction::constant(1.0);
        let op = Operator::new(f, params(7.0, 0.5, 1.0), TruncationPolicy::default()).unwrap();
        for x in [0.0, 0.3, 4.0] {
            assert!((op.apply(x).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn verify_subset_passes() {
        let r = verify_all(&[1, 13]);
        assert_eq!(r.exit_code, exit::OK);
        assert!(r.table.rows.iter().all(|row| row[5] == Cell::Bool(true)));
    }
}
