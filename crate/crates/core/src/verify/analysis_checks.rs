use super::{error_row, grid_params, label, CheckRow, Worst};
use crate::analysis::{
    compact_estimate_check, fit_log_slope, korovkin_weighted_check, lp_error, schur_e,
    schur_first_integral, schur_second_integral, DEFAULT_GRID_POINTS,
};
use crate::error::Result;
use crate::numeric::{golden_max, par_map};
use crate::operator::{OperatorParams, TestFunction, TruncationPolicy};

/// Parameter pairs `(α, β)` for the convergence experiments.
const CONVERGENCE_AB: [(f64, f64); 2] = [(0.0, 0.0), (0.5, 1.0)];

pub(super) fn compact_estimate() -> Vec<CheckRow> {
    let names = [
        ("max/min of E_n / omega(f, n^-1/2) over n", 3.0),
        ("log-log slope of E_n / omega(f, n^-1/2) in n", 0.0),
    ];
    let f = TestFunction::abs_shift(1.0);
    let n_grid = [25.0, 100.0, 400.0, 1600.0];
    let mut spread = Worst::new();
    let mut trend = Worst::new();
    for (alpha, beta) in CONVERGENCE_AB {
        let base = OperatorParams { n: n_grid[0], alpha, beta };
        let rep = match compact_estimate_check(&f, &base, &n_grid, 2.0, DEFAULT_GRID_POINTS, &TruncationPolicy::default()) {
            Ok(r) => r,
            Err(e) => return names.iter().map(|(n, t)| error_row(9, *n, *t, &e)).collect(),
        };
        let ratios: Vec<f64> = rep.rows.iter().map(|r| r.ratio.unwrap_or(f64::NAN)).collect();
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let tag = || {
            let list: Vec<String> = ratios.iter().map(|r| format!("{r:.6}")).collect();
            format!("alpha={alpha} beta={beta} ratios=[{}]", list.join(" "))
        };
        spread.push(hi / lo, tag);
        let pts: Vec<(f64, f64)> = n_grid.iter().copied().zip(ratios.iter().copied()).collect();
        let slope = fit_log_slope(&pts).map_or(f64::NAN, |f| f.slope);
        trend.push(slope, tag);
    }
    vec![spread.row(9, names[0].0, names[0].1), trend.row(9, names[1].0, names[1].1)]
}

pub(super) fn korovkin() -> Vec<CheckRow> {
    let mut e0 = Worst::new();
    let mut e1 = Worst::new();
    let mut e2 = Worst::new();
    let run = |e0: &mut Worst, e1: &mut Worst, e2: &mut Worst| -> Result<()> {
        for p in grid_params() {
            // Doubling n − β: n' = 2n − β.
            let q = p.with_n(2.0 * p.n - p.beta);
            let a = korovkin_weighted_check(&p)?;
            let b = korovkin_weighted_check(&q)?;
            e0.push(a.e0.abs().max(b.e0.abs()), || label(&p));
            e1.push((a.e1 / b.e1 / 2.0 - 1.0).abs(), || label(&p));
            e2.push((a.e2 / b.e2 / 2.0 - 1.0).abs(), || label(&p));
        }
        Ok(())
    };
    let names = [
        ("||M_n e0 - e0||_phi", 0.0),
        ("e1: |value(n)/value(2n-beta) / 2 - 1|", 0.05),
        ("e2: |value(n)/value(2n-beta) / 2 - 1|", 0.05),
    ];
    match run(&mut e0, &mut e1, &mut e2) {
        Ok(()) => vec![
            e0.row(10, names[0].0, names[0].1),
            e1.row(10, names[1].0, names[1].1),
            e2.row(10, names[2].0, names[2].1),
        ],
        Err(e) => names.iter().map(|(n, t)| error_row(10, *n, *t, &e)).collect(),
    }
}

pub(super) fn local_lp() -> Vec<CheckRow> {
    let f = TestFunction::abs_shift(1.0);
    let n_grid = [10.0, 40.0, 160.0, 640.0];
    let pol = TruncationPolicy::default();
    let mut rows = Vec::new();
    for p_exp in [1.0, 2.0] {
        let mut step = Worst::new();
        let mut overall = Worst::new();
        let name_step = format!("p={p_exp}: max e(n_next)/e(n)");
        let name_all = format!("p={p_exp}: e(640)/e(10)");
        let mut failed = None;
        for (alpha, beta) in CONVERGENCE_AB {
            let errs: Result<Vec<f64>> = n_grid
                .iter()
                .map(|&n| lp_error(&f, &OperatorParams { n, alpha, beta }, p_exp, 2.0, &pol))
                .collect();
            let errs = match errs {
                Ok(e) => e,
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            };
            let tag = || {
                let list: Vec<String> = errs.iter().map(|e| format!("{e:.6e}")).collect();
                format!("alpha={alpha} beta={beta} errors=[{}]", list.join(" "))
            };
            let worst_step = errs.windows(2).map(|w| w[1] / w[0]).fold(f64::NEG_INFINITY, f64::max);
            step.push(worst_step, tag);
            overall.push(errs[3] / errs[0], tag);
        }
        match failed {
            Some(e) => {
                rows.push(error_row(11, name_step, 1.0, &e));
                rows.push(error_row(11, name_all, 0.25, &e));
            }
            None => {
                rows.push(step.row_strict(11, name_step, 1.0));
                rows.push(overall.row_strict(11, name_all, 0.25));
            }
        }
    }
    rows
}

/// `sup_{t ∈ [0, 10]} E_n(t)` on a grid with golden refinement.
fn schur_e_sup(p: &OperatorParams) -> Result<f64> {
    let m = DEFAULT_GRID_POINTS;
    let ts: Vec<f64> = (0..m).map(|i| 10.0 * i as f64 / (m - 1) as f64).collect();
    let vals = ts.iter().map(|&t| schur_e(p, t).map(|e| e.value)).collect::<Result<Vec<f64>>>()?;
    let (i, best) = vals
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let lo = ts[i.saturating_sub(1)];
    let hi = ts[(i + 1).min(m - 1)];
    let (_, refined) = golden_max(|t| schur_e(p, t).map_or(f64::NEG_INFINITY, |e| e.value), lo, hi, 1e-13);
    Ok(best.max(refined))
}

const CHECKS_12: [(&str, f64); 6] = [
    ("first integral - 1, gamma <= p beta, x in [0,20]", 1e-13),
    ("relative increase of sup_t E_n(t) in n, beta=0", 1e-10),
    ("sup_t E_n(t) - 1, alpha=0", 1e-13),
    ("sup_t E_n(t) / sup at beta=0, beta>0", 1.0),
    ("(direct - bound)/bound, second integral", 0.0),
    ("|direct - closed|/closed, second integral", 1e-8),
];

fn schur_rows() -> Result<Vec<CheckRow>> {
    let mut w: [Worst; 6] = std::array::from_fn(|_| Worst::new());

    for p in grid_params() {
        for p_exp in [1.0, 2.0] {
            for gamma in [0.0, p.beta, p_exp * p.beta] {
                let mut top = f64::NEG_INFINITY;
                for i in 0..=200 {
                    top = top.max(schur_first_integral(&p, gamma, p_exp, 0.1 * i as f64)?);
                }
                w[0].push(top - 1.0, || format!("{} p={p_exp} gamma={gamma}", label(&p)));
            }
        }
    }

    let ns = [5.0, 10.0, 100.0, 1000.0];
    for alpha in [-0.5, -0.25, 0.0] {
        let mut base_sups = Vec::new();
        for &n in &ns {
            base_sups.push(schur_e_sup(&OperatorParams { n, alpha, beta: 0.0 })?);
        }
        for (i, pair) in base_sups.windows(2).enumerate() {
            w[1].push((pair[1] - pair[0]) / pair[0], || {
                format!("alpha={alpha} n={} -> {}: {} -> {}", ns[i], ns[i + 1], pair[0], pair[1])
            });
        }
        if alpha == 0.0 {
            for (i, s) in base_sups.iter().enumerate() {
                w[2].push(s - 1.0, || format!("alpha=0 n={}", ns[i]));
            }
        }
        let c0 = base_sups.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for &n in &ns {
            for beta in [0.5, 1.0, 2.0] {
                let p = OperatorParams { n, alpha, beta };
                w[3].push(schur_e_sup(&p)? / c0, || label(&p));
            }
        }
    }

    let mut cases = Vec::new();
    for n in [5.0, 10.0, 100.0] {
        for alpha in [-0.5, -0.25, 0.0] {
            for beta in [0.0, 1.0] {
                for gamma in [0.0, 2.0 * beta] {
                    for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
                        cases.push((OperatorParams { n, alpha, beta }, gamma, t));
                    }
                }
            }
        }
    }
    let pol = TruncationPolicy::default();
    let results = par_map(&cases, |(p, gamma, t)| schur_second_integral(p, *gamma, 2.0, *t, &pol));
    for ((p, gamma, t), r) in cases.iter().zip(results) {
        let s = r?;
        let tag = || format!("{} p=2 gamma={gamma} t={t}", label(p));
        w[4].push((s.direct - s.bound) / s.bound, tag);
        w[5].push((s.direct - s.closed).abs() / s.closed, tag);
    }

    Ok(w.into_iter()
        .zip(CHECKS_12)
        .map(|(w, (name, tol))| w.row(12, name, tol))
        .collect())
}

pub(super) fn schur() -> Vec<CheckRow> {
    schur_rows().unwrap_or_else(|e| CHECKS_12.iter().map(|(n, t)| error_row(12, *n, *t, &e)).collect())
}
