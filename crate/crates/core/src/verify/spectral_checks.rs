use super::{error_row, grid_params, label, CheckRow, Worst};
use crate::error::Result;
use crate::numeric::par_map;
use crate::operator::{apply_operator, OperatorParams, TestFunction, TruncationPolicy};
use crate::spectral::{
    build_p_adaptive, eigen_operator_check, eigen_vector_check, iterate_decay, Eigenpair,
    DEFAULT_DEFICIT_TOL,
};

const CHECKS_7: [(&str, f64); 7] = [
    ("operator residual, phi1", 1e-8),
    ("operator residual, phi2", 1e-8),
    ("max row deficit at adaptive K", 1e-12),
    ("vector residual, constant", 1e-10),
    ("vector residual, exponential", 1e-10),
    ("|lambda2 - M_n phi2(0)/phi2(0)|", 1e-12),
    ("max |M_n phi2/phi2 - lambda2| over x", 1e-8),
];

fn eigen_cell(p: &OperatorParams, xs: &[f64]) -> Result<[Worst; 7]> {
    let pol = TruncationPolicy::default();
    let mut w: [Worst; 7] = std::array::from_fn(|_| Worst::new());
    let tag = || label(p);
    let c = eigen_operator_check(p, Eigenpair::Constant, xs, &pol)?;
    w[0].push(c.operator_residual.unwrap_or(f64::NAN), tag);
    let e = eigen_operator_check(p, Eigenpair::Exponential, xs, &pol)?;
    w[1].push(e.operator_residual.unwrap_or(f64::NAN), tag);
    w[6].push(e.ratio_deviation.unwrap_or(f64::NAN), tag);
    let at_zero = apply_operator(&TestFunction::exp(-p.beta), 0.0, p, &pol)?;
    w[5].push((at_zero - e.lambda).abs(), tag);

    let matrix = build_p_adaptive(p, DEFAULT_DEFICIT_TOL)?;
    let tag_k = || format!("{} K={}", label(p), matrix.k());
    w[2].push(matrix.max_checked_deficit(), tag_k);
    let vc = eigen_vector_check(&matrix, Eigenpair::Constant)?;
    w[3].push(vc.vector_residual.unwrap_or(f64::NAN), tag_k);
    let ve = eigen_vector_check(&matrix, Eigenpair::Exponential)?;
    w[4].push(ve.vector_residual.unwrap_or(f64::NAN), tag_k);
    Ok(w)
}

pub(super) fn eigenpairs() -> Vec<CheckRow> {
    let xs: Vec<f64> = (0..=20).map(|i| 0.25 * i as f64).collect();
    let params = grid_params();
    let cells = par_map(&params, |p| eigen_cell(p, &xs));
    let mut acc: [Worst; 7] = std::array::from_fn(|_| Worst::new());
    for cell in cells {
        match cell {
            Ok(ws) => acc.iter_mut().zip(ws).for_each(|(a, w)| a.merge(w)),
            Err(e) => return CHECKS_7.iter().map(|(n, t)| error_row(7, *n, *t, &e)).collect(),
        }
    }
    acc.into_iter()
        .zip(CHECKS_7)
        .map(|(w, (name, tol))| w.row(7, name, tol))
        .collect()
}

pub(super) fn iterate_decay_check() -> Vec<CheckRow> {
    let xs: Vec<f64> = (0..=10).map(|i| 0.5 * i as f64).collect();
    let pol = TruncationPolicy::default();
    let mut ratio = Worst::new();
    let mut budget = Worst::new();
    for alpha in [0.0, 1.0] {
        let p = OperatorParams { n: 10.0, alpha, beta: 2.0 };
        match iterate_decay(&p, 4, &xs, &pol) {
            Ok(rep) => {
                ratio.push(rep.max_ratio_deviation, || label(&p));
                let used = if rep.truncation_warning { f64::INFINITY } else { rep.max_deviation / rep.tolerance };
                budget.push(used, || label(&p));
            }
            Err(e) => {
                return vec![
                    error_row(8, "|amplitude ratio - lambda2|, r<=4", 1e-6, &e),
                    error_row(8, "lift deviation / truncation budget", 1.0, &e),
                ]
            }
        }
    }
    vec![
        ratio.row(8, "|amplitude ratio - lambda2|, r<=4", 1e-6),
        budget.row(8, "lift deviation / truncation budget", 1.0),
    ]
}
