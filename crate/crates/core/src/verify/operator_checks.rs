use super::{error_row, grid_params, label, CheckRow, Worst, GRID_ALPHA, GRID_BETA, GRID_X};
use crate::error::Result;
use crate::moments::{
    asymptotic_prediction, central_moment_binomial, central_moment_explicit, diff_recurrence_residual,
    raw_moment_closed, raw_moment_explicit, raw_moment_recurrence, three_term_residual,
};
use crate::numeric::par_map;
use crate::operator::{
    apply_operator, value_at_zero, FnIntegrand, Growth, Operator, OperatorParams, TestFunction,
    TruncationPolicy, DEFAULT_POLY_GROWTH,
};

fn at(p: &OperatorParams, x: f64) -> String {
    format!("{} x={x}", label(p))
}

/// Evaluates `f` on every grid point in parallel and folds the per-point
/// worst values in grid order. `f` returns one sample per check.
fn over_grid<const K: usize>(
    f: impl Fn(&OperatorParams) -> Result<[Worst; K]> + Sync,
) -> std::result::Result<[Worst; K], crate::Error> {
    let params = grid_params();
    let parts = par_map(&params, |p| f(p));
    let mut acc: [Worst; K] = std::array::from_fn(|_| Worst::new());
    for part in parts {
        for (a, w) in acc.iter_mut().zip(part?) {
            a.merge(w);
        }
    }
    Ok(acc)
}

fn rows_or_error<const K: usize>(
    id: u8,
    result: std::result::Result<[Worst; K], crate::Error>,
    checks: [(&str, f64); K],
) -> Vec<CheckRow> {
    match result {
        Ok(ws) => ws
            .into_iter()
            .zip(checks)
            .map(|(w, (name, tol))| w.row(id, name, tol))
            .collect(),
        Err(e) => checks.iter().map(|(name, tol)| error_row(id, *name, *tol, &e)).collect(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

pub(super) fn normalization() -> Vec<CheckRow> {
    let res = over_grid(|p| {
        let op = Operator::new(TestFunction::constant(1.0), *p, TruncationPolicy::default())?;
        let mut w = Worst::new();
        for &x in &GRID_X {
            w.push((op.apply(x)? - 1.0).abs(), || at(p, x));
        }
        Ok([w])
    });
    rows_or_error(1, res, [("|M_n 1 - 1|", 1e-12)])
}

pub(super) fn moment_agreement() -> Vec<CheckRow> {
    let res = over_grid(|p| {
        let pol = TruncationPolicy::default();
        let mut rec = Worst::new();
        let mut exp = Worst::new();
        let mut quad = Worst::new();
        let ops: Vec<_> = (1..=4)
            .map(|r| Operator::new(TestFunction::monomial(r), *p, pol))
            .collect::<Result<_>>()?;
        for &x in &GRID_X {
            for r in 0..=8u32 {
                let closed = raw_moment_closed(r, x, p)?;
                let tag = || format!("{} r={r}", at(p, x));
                rec.push(rel(raw_moment_recurrence(r, x, p), closed), tag);
                if (1..=4).contains(&r) {
                    exp.push(rel(raw_moment_explicit(r, x, p)?, closed), tag);
                    quad.push(rel(ops[r as usize - 1].apply(x)?, closed), tag);
                }
            }
        }
        Ok([rec, exp, quad])
    });
    rows_or_error(
        2,
        res,
        [
            ("closed vs recurrence, r<=8", 1e-11),
            ("closed vs explicit, r<=4", 1e-12),
            ("closed vs quadrature, r<=4", 1e-7),
        ],
    )
}

pub(super) fn three_term() -> Vec<CheckRow> {
    let res = over_grid(|p| {
        let mut w = Worst::new();
        for &x in &GRID_X {
            for r in 1..=8u32 {
                w.push(three_term_residual(r, x, p)?, || format!("{} r={r}", at(p, x)));
            }
        }
        Ok([w])
    });
    rows_or_error(3, res, [("relative residual, r<=8", 1e-10)])
}

pub(super) fn differential() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for r in [2u32, 3] {
        let mut size = Worst::new();
        let mut ratio_dev = Worst::new();
        let mut failure = None;
        for &n in &[10.0, 50.0, 200.0] {
            for &alpha in &GRID_ALPHA {
                for &beta in &[0.0, 1.0, 2.0] {
                    let p = OperatorParams { n, alpha, beta };
                    let tag = || format!("{} r={r}", at(&p, 1.0));
                    match (
                        diff_recurrence_residual(r, 1.0, &p, 1e-3),
                        diff_recurrence_residual(r, 1.0, &p, 5e-4),
                    ) {
                        (Ok(a), Ok(b)) => {
                            size.push(a, tag);
                            ratio_dev.push((a / b - 4.0).abs(), tag);
                        }
                        (Err(e), _) | (_, Err(e)) => failure = Some(e),
                    }
                }
            }
        }
        let name_size = format!("residual at h=1e-3, r={r}");
        let name_ratio = format!("|ratio - 4| under h-halving, r={r}");
        match failure {
            Some(e) => {
                rows.push(error_row(4, name_size, 1e-5, &e));
                rows.push(error_row(4, name_ratio, 0.5, &e));
            }
            None => {
                rows.push(size.row(4, name_size, 1e-5));
                rows.push(ratio_dev.row(4, name_ratio, 0.5));
            }
        }
    }
    rows
}

/// `(t − x)^r` as an integrand with an explicit growth envelope.
fn centred_power(x: f64, r: u32) -> FnIntegrand<impl Fn(f64) -> f64 + Send + Sync> {
    let a = DEFAULT_POLY_GROWTH;
    let rf = r as f64;
    let env = if r == 0 { 1.0 } else { (rf / (a * std::f64::consts::E)).powf(rf) };
    let k = 2f64.powi(r as i32 - 1).max(1.0) * (env + x.powi(r as i32));
    FnIntegrand::new(move |t: f64| (t - x).powi(r as i32), Growth { a, k })
}

pub(super) fn central() -> Vec<CheckRow> {
    let res = over_grid(|p| {
        let pol = TruncationPolicy::default();
        let mut bin = Worst::new();
        let mut quad = Worst::new();
        for &x in &GRID_X {
            for r in 1..=4u32 {
                let e = central_moment_explicit(r, x, p)?;
                let b = central_moment_binomial(r, x, p)?.value;
                let q = apply_operator(&centred_power(x, r), x, p, &pol)?;
                let tag = || format!("{} r={r}", at(p, x));
                bin.push((e - b).abs() / e.abs(), tag);
                quad.push((e - q).abs() / e.abs(), tag);
            }
        }
        Ok([bin, quad])
    });
    rows_or_error(
        5,
        res,
        [
            ("explicit vs binomial sum, relative", 1e-10),
            ("explicit vs quadrature, relative", 1e-6),
        ],
    )
}

pub(super) fn asymptotics() -> Vec<CheckRow> {
    let mut first = Worst::new();
    let mut second = Worst::new();
    let mut third = Worst::new();
    let run = |first: &mut Worst, second: &mut Worst, third: &mut Worst| -> Result<()> {
        for &alpha in &GRID_ALPHA {
            for &beta in &GRID_BETA {
                for &n in &[50.0, 200.0] {
                    let p = OperatorParams::new(n, alpha, beta)?;
                    for &x in &GRID_X {
                        let lead = alpha + 1.0 + beta * x;
                        let mu = central_moment_explicit(1, x, &p)?;
                        // |n μ − lead| <= 5 lead / n, measured as a multiple of lead / n
                        first.push((n * mu - lead).abs() * n / lead, || at(&p, x));
                    }
                }
                let p = OperatorParams::new(1e4, alpha, beta)?;
                let mu2 = central_moment_explicit(2, 1.0, &p)?;
                second.push((p.n * mu2 / 2.0 - 1.0).abs(), || at(&p, 1.0));
                if beta >= 1.0 {
                    let p = OperatorParams::new(1e5, alpha, beta)?;
                    let ratio = central_moment_explicit(3, 1.0, &p)? / asymptotic_prediction(3, 1.0, &p)?;
                    third.push((ratio - 1.0).abs(), || at(&p, 1.0));
                }
            }
        }
        Ok(())
    };
    let names = [
        ("r=1: n|n mu - (alpha+1+beta x)|/(alpha+1+beta x), n>=50", 5.0),
        ("r=2: |n mu/(2x) - 1| at n=1e4, x=1", 0.01),
        ("r=3: |exact/predicted - 1| at n=1e5, x=1, beta in {1,2}", 0.05),
    ];
    match run(&mut first, &mut second, &mut third) {
        Ok(()) => vec![
            first.row(6, names[0].0, names[0].1),
            second.row(6, names[1].0, names[1].1),
            third.row(6, names[2].0, names[2].1),
        ],
        Err(e) => names.iter().map(|(n, t)| error_row(6, *n, *t, &e)).collect(),
    }
}

/// Which test function the Szász–Durrmeyer oracle handles.
#[derive(Debug, Clone, Copy)]
enum DurrmeyerCase {
    One,
    T,
    T2,
    ExpMinus,
}

/// `D_n f(x) = n Σ_k ψ_k(x) ∫ ψ_k(t) f(t) dt` with the exact `t`-integrals
/// `n∫t^r ψ_k = (k+1)_r / n^r` and `n∫e^{−t} ψ_k = (n/(n+1))^{k+1}`.
fn durrmeyer(case: DurrmeyerCase, x: f64, n: f64) -> f64 {
    let z = n * x;
    let k_end = (z + 40.0 * z.sqrt() + 60.0) as u64;
    let mut psi = (-z).exp();
    let mut sum = 0.0;
    for k in 0..=k_end {
        if k > 0 {
            psi *= z / k as f64;
        }
        let kf = k as f64;
        let c = match case {
            DurrmeyerCase::One => 1.0,
            DurrmeyerCase::T => (kf + 1.0) / n,
            DurrmeyerCase::T2 => (kf + 1.0) * (kf + 2.0) / (n * n),
            DurrmeyerCase::ExpMinus => (n / (n + 1.0)).powf(kf + 1.0),
        };
        sum += psi * c;
    }
    sum
}

pub(super) fn specialization() -> Vec<CheckRow> {
    let mut w = Worst::new();
    let cases = [
        (DurrmeyerCase::One, TestFunction::constant(1.0), "1"),
        (DurrmeyerCase::T, TestFunction::monomial(1), "t"),
        (DurrmeyerCase::T2, TestFunction::monomial(2), "t^2"),
        (DurrmeyerCase::ExpMinus, TestFunction::exp(-1.0), "exp(-t)"),
    ];
    let pol = TruncationPolicy::default();
    for &n in &[5.0, 20.0] {
        let p = OperatorParams { n, alpha: 0.0, beta: 0.0 };
        for (case, f, name) in &cases {
            for &x in &[0.0, 1.0, 2.0] {
                let m = match apply_operator(f, x, &p, &pol) {
                    Ok(m) => m,
                    Err(e) => return vec![error_row(13, "|M_n f - D_n f|, alpha=beta=0", 1e-9, &e)],
                };
                let d = durrmeyer(*case, x, n);
                w.push(rel(m, d), || format!("n={n} f={name} x={x}"));
            }
        }
    }
    vec![w.row(13, "|M_n f - D_n f|, alpha=beta=0", 1e-9)]
}

fn catalog() -> Vec<TestFunction> {
    vec![
        TestFunction::constant(1.0),
        TestFunction::monomial(1),
        TestFunction::monomial(2),
        TestFunction::monomial(3),
        TestFunction::polynomial(vec![1.0, -2.0, 0.5]),
        TestFunction::exp(-1.0),
        TestFunction::exp(0.5),
        TestFunction::abs_shift(1.0),
        TestFunction::sqrt(),
        TestFunction::sin(1.0),
    ]
}

pub(super) fn zero_interpolation() -> Vec<CheckRow> {
    let res = over_grid(|p| {
        let pol = TruncationPolicy::default();
        let mut w = Worst::new();
        for f in catalog() {
            let a = value_at_zero(&f, p, &pol)?;
            let b = apply_operator(&f, 0.0, p, &pol)?;
            w.push((a - b).abs(), || format!("{} f={f}", label(p)));
        }
        Ok([w])
    });
    rows_or_error(14, res, [("|value_at_zero - M_n f(0)|", 1e-10)])
}
