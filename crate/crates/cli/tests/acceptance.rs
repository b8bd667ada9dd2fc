//! Acceptance run: executes `smld verify-all` twice and prints one line per
//! criterion.
//!
//! Each check's tolerance is pinned here and compared with the one the
//! binary reports. A handful of checks are known to be unattainable as
//! stated; they print `FAIL (expected)` with the reason and do not make the
//! run fail. Any other failing row, a missing row or a changed tolerance is
//! an unexpected failure and the process exits with status 1.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};

/// `(criterion, check, tolerance)` for every row the suite must emit.
const PINNED: &[(u8, &str, f64)] = &[
    (1, "|M_n 1 - 1|", 1e-12),
    (2, "closed vs recurrence, r<=8", 1e-11),
    (2, "closed vs explicit, r<=4", 1e-12),
    (2, "closed vs quadrature, r<=4", 1e-7),
    (3, "relative residual, r<=8", 1e-10),
    (4, "residual at h=1e-3, r=2", 1e-5),
    (4, "|ratio - 4| under h-halving, r=2", 0.5),
    (4, "residual at h=1e-3, r=3", 1e-5),
    (4, "|ratio - 4| under h-halving, r=3", 0.5),
    (5, "explicit vs binomial sum, relative", 1e-10),
    (5, "explicit vs quadrature, relative", 1e-6),
    (6, "r=1: n|n mu - (alpha+1+beta x)|/(alpha+1+beta x), n>=50", 5.0),
    (6, "r=2: |n mu/(2x) - 1| at n=1e4, x=1", 0.01),
    (6, "r=3: |exact/predicted - 1| at n=1e5, x=1, beta in {1,2}", 0.05),
    (7, "operator residual, phi1", 1e-8),
    (7, "operator residual, phi2", 1e-8),
    (7, "max row deficit at adaptive K", 1e-12),
    (7, "vector residual, constant", 1e-10),
    (7, "vector residual, exponential", 1e-10),
    (7, "|lambda2 - M_n phi2(0)/phi2(0)|", 1e-12),
    (7, "max |M_n phi2/phi2 - lambda2| over x", 1e-8),
    (8, "|amplitude ratio - lambda2|, r<=4", 1e-6),
    (8, "lift deviation / truncation budget", 1.0),
    (9, "max/min of E_n / omega(f, n^-1/2) over n", 3.0),
    (9, "log-log slope of E_n / omega(f, n^-1/2) in n", 0.0),
    (10, "||M_n e0 - e0||_phi", 0.0),
    (10, "e1: |value(n)/value(2n-beta) / 2 - 1|", 0.05),
    (10, "e2: |value(n)/value(2n-beta) / 2 - 1|", 0.05),
    (11, "p=1: max e(n_next)/e(n)", 1.0),
    (11, "p=1: e(640)/e(10)", 0.25),
    (11, "p=2: max e(n_next)/e(n)", 1.0),
    (11, "p=2: e(640)/e(10)", 0.25),
    (12, "first integral - 1, gamma <= p beta, x in [0,20]", 1e-13),
    (12, "relative increase of sup_t E_n(t) in n, beta=0", 1e-10),
    (12, "sup_t E_n(t) - 1, alpha=0", 1e-13),
    (12, "sup_t E_n(t) / sup at beta=0, beta>0", 1.0),
    (12, "(direct - bound)/bound, second integral", 0.0),
    (12, "|direct - closed|/closed, second integral", 1e-8),
    (13, "|M_n f - D_n f|, alpha=beta=0", 1e-9),
    (14, "|value_at_zero - M_n f(0)|", 1e-10),
    (15, "rows differing between two in-process runs", 0.0),
    (15, "failing rows in criteria 1-14 (exit status 0 needs none)", 0.0),
];

/// Rows known to fail, with the reason.
const EXPECTED_FAILURES: &[(u8, &str, &str)] = &[
    (
        4,
        "|ratio - 4| under h-halving, r=2",
        "the second moment is quadratic in x, so the central difference is exact and the ratio compares rounding noise",
    ),
    (
        6,
        "r=3: |exact/predicted - 1| at n=1e5, x=1, beta in {1,2}",
        "the third central moment has an extra (alpha+2)x term at leading order, so the ratio tends to 1 + (alpha+2)/(beta x)",
    ),
    (
        10,
        "e2: |value(n)/value(2n-beta) / 2 - 1|",
        "the exact e2 error carries pre-asymptotic terms at n = 5 and 10",
    ),
    (
        12,
        "(direct - bound)/bound, second integral",
        "the series identity behind the bound drops a term; the direct value matches the corrected closed form",
    ),
    (
        15,
        "failing rows in criteria 1-14 (exit status 0 needs none)",
        "follows from the known failures above",
    ),
];

struct Row {
    check: String,
    measured: String,
    tolerance: f64,
    pass: bool,
    worst_case: String,
}

fn run_verify_all() -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_smld"))
        .args(["verify-all", "--format", "csv"])
        .output()
        .expect("smld runs");
    (out.status.code(), out.stdout)
}

fn parse(report: &[u8]) -> BTreeMap<u8, (String, Vec<Row>)> {
    let mut by_id: BTreeMap<u8, (String, Vec<Row>)> = BTreeMap::new();
    let mut reader = csv::Reader::from_reader(report);
    for rec in reader.records() {
        let rec = rec.expect("well-formed CSV");
        let id: u8 = rec[0].parse().expect("criterion id");
        let entry = by_id.entry(id).or_insert_with(|| (rec[1].to_owned(), Vec::new()));
        entry.1.push(Row {
            check: rec[2].to_owned(),
            measured: rec[3].to_owned(),
            tolerance: rec[4].parse().expect("tolerance"),
            pass: &rec[5] == "true",
            worst_case: rec[6].to_owned(),
        });
    }
    by_id
}

fn main() -> ExitCode {
    let (code_a, out_a) = run_verify_all();
    let (code_b, out_b) = run_verify_all();
    let report = parse(&out_a);
    let mut unexpected = 0usize;

    for id in 1..=15u8 {
        let Some((title, rows)) = report.get(&id) else {
            println!("criterion {id:>2}: FAIL (no rows reported)");
            unexpected += 1;
            continue;
        };
        let mut lines = Vec::new();
        let mut status_unexpected = false;
        let mut status_expected = false;

        for &(_, check, tol) in PINNED.iter().filter(|p| p.0 == id) {
            if !rows.iter().any(|r| r.check == check && r.tolerance == tol) {
                lines.push(format!("    missing row or changed tolerance: {check} (pinned {tol:e})"));
                status_unexpected = true;
            }
        }
        for r in rows {
            if !PINNED.iter().any(|p| p.0 == id && p.1 == r.check) {
                lines.push(format!("    row not pinned: {}", r.check));
                status_unexpected = true;
            }
            if r.pass {
                continue;
            }
            match EXPECTED_FAILURES.iter().find(|e| e.0 == id && e.1 == r.check) {
                Some((_, _, why)) => {
                    status_expected = true;
                    lines.push(format!(
                        "    expected: {} = {} > {:e} at {} ({why})",
                        r.check, r.measured, r.tolerance, r.worst_case
                    ));
                }
                None => {
                    status_unexpected = true;
                    lines.push(format!(
                        "    UNEXPECTED: {} = {} vs tolerance {:e} at {}",
                        r.check, r.measured, r.tolerance, r.worst_case
                    ));
                }
            }
        }

        if id == 15 {
            let identical = out_a == out_b && code_a == code_b;
            if !identical {
                status_unexpected = true;
                lines.push("    UNEXPECTED: two runs of verify-all produced different output".into());
            } else {
                lines.push(format!("    two processes: byte-identical reports ({} bytes)", out_a.len()));
            }
            if code_a != Some(0) {
                lines.push(format!("    exit status {code_a:?}, not 0"));
                status_expected = true;
            }
        }

        let status = if status_unexpected {
            unexpected += 1;
            "FAIL"
        } else if status_expected {
            "FAIL (expected)"
        } else {
            "PASS"
        };
        println!("criterion {id:>2} {title}: {status}");
        for l in lines {
            println!("{l}");
        }
    }

    if unexpected == 0 {
        println!("acceptance: no unexpected failures");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {unexpected} criteria failed unexpectedly");
        ExitCode::FAILURE
    }
}
