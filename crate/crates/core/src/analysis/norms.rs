use crate::error::Result;
use crate::numeric::{golden_max, par_map};
use crate::operator::OperatorParams;

/// Uniform grid on `[a, b]` with `m >= 2` points, merged with the points of
/// `extra` that fall inside the interval.
pub(crate) fn grid_with(a: f64, b: f64, m: usize, extra: &[f64]) -> Vec<f64> {
    let m = m.max(2);
    let mut xs: Vec<f64> = (0..m)
        .map(|i| if i == m - 1 { b } else { a + (b - a) * i as f64 / (m - 1) as f64 })
        .collect();
    xs.extend(extra.iter().copied().filter(|&x| x > a && x < b));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

/// `max |g|` on a grid over `[a, b]` (kinks included), then one golden-section
/// refinement between the neighbours of the grid argmax.
///
/// Returns `(argmax, max)`.
pub(crate) fn grid_sup<G>(g: G, a: f64, b: f64, m: usize, kinks: &[f64]) -> Result<(f64, f64)>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    let xs = grid_with(a, b, m, kinks);
    let vals = par_map(&xs, |&x| g(x).map(f64::abs));
    let mut best = (xs[0], 0.0f64);
    let mut at = 0;
    for (i, v) in vals.into_iter().enumerate() {
        let v = v?;
        if v > best.1 || i == 0 {
            best = (xs[i], v);
            at = i;
        }
    }
    let lo = xs[at.saturating_sub(1)];
    let hi = xs[(at + 1).min(xs.len() - 1)];
    if hi > lo {
        let (x, v) = golden_max(
            |x| g(x).map_or(f64::NEG_INFINITY, f64::abs),
            lo,
            hi,
            1e-10 * (b - a).max(1.0),
        );
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// `ω(f, δ) = sup { |f(t) − f(x)| : x, t ∈ [0, a], |t − x| <= δ }`.
///
/// All grid pairs within `δ` are scanned, together with the pairs
/// `(x, x + δ)` for grid `x`. The best pair is then refined by golden-section
/// search in a one-cell neighbourhood.
pub fn modulus_of_continuity<F>(f: F, delta: f64, a: f64, grid_points: usize) -> f64
where
    F: Fn(f64) -> f64 + Sync,
{
    let delta = delta.min(a);
    if !(delta > 0.0) {
        return 0.0;
    }
    let m = grid_points.max(2);
    let h = a / (m - 1) as f64;
    let xs: Vec<f64> = (0..m).map(|i| if i == m - 1 { a } else { i as f64 * h }).collect();
    let fx: Vec<f64> = par_map(&xs, |&x| f(x));
    // Guard against rounding so that exact multiples of h count as inside δ.
    let width = ((delta / h) * (1.0 + 1e-12)).floor() as usize;

    let rows: Vec<usize> = (0..m).collect();
    let pair_best = par_map(&rows, |&i| {
        let mut best = (0.0f64, i, i);
        for j in i + 1..=(i + width).min(m - 1) {
            let d = (fx[j] - fx[i]).abs();
            if d > best.0 {
                best = (d, i, j);
            }
        }
        best
    });
    let mut best = (0.0f64, 0, 0);
    for b in pair_best {
        if b.0 > best.0 {
            best = b;
        }
    }

    let shift = |x: f64| (f((x + delta).min(a)) - f(x)).abs();
    let starts: Vec<f64> = xs.iter().copied().filter(|&x| x + delta <= a).collect();
    let shifted = par_map(&starts, |&x| shift(x));
    let mut shift_best = (0.0f64, 0.0f64);
    for (x, v) in starts.iter().zip(shifted) {
        if v > shift_best.0 {
            shift_best = (v, *x);
        }
    }

    let mut omega = best.0.max(shift_best.0);
    if shift_best.0 >= best.0 && !starts.is_empty() {
        let x0 = shift_best.1;
        let (_, v) = golden_max(shift, (x0 - h).max(0.0), (x0 + h).min(a - delta), 1e-12 * a.max(1.0));
        omega = omega.max(v);
    } else if best.0 > 0.0 {
        let (_, i, j) = best;
        let (x, t) = (xs[i], xs[j]);
        let (t_ref, v) = golden_max(
            |t| (f(t) - f(x)).abs(),
            (t - h).max(x),
            (t + h).min(x + delta).min(a),
            1e-12 * a.max(1.0),
        );
        omega = omega.max(v);
        let (_, v) = golden_max(
            |s| (f(t_ref) - f(s)).abs(),
            (x - h).max(t_ref - delta).max(0.0),
            (x + h).min(t_ref),
            1e-12 * a.max(1.0),
        );
        omega = omega.max(v);
    }
    omega
}

/// `max |g(x)| / (1 + x²)` over `[0, x_max]`, with golden refinement.
pub fn weighted_phi_norm<G>(g: G, x_max: f64, grid_points: usize) -> f64
where
    G: Fn(f64) -> f64 + Sync,
{
    grid_sup(|x| Ok(g(x) / (1.0 + x * x)), 0.0, x_max, grid_points, &[])
        .map(|(_, v)| v)
        .unwrap_or(f64::NAN)
}

/// `sup_{x>=0} |A x² + B x + C| / (1 + x²)` in closed form.
///
/// Interior critical points solve `−B x² + 2(A − C) x + B = 0`; the other
/// candidates are `x = 0` and the limit `|A|` at infinity. Returns
/// `(argmax, sup)`, with `argmax = ∞` when the limit wins.
pub fn rational_phi_sup(a: f64, b: f64, c: f64) -> (f64, f64) {
    let h = |x: f64| ((a * x + b) * x + c).abs() / (1.0 + x * x);
    let mut best = (0.0, c.abs());
    let mut consider = |x: f64| {
        if x > 0.0 && x.is_finite() {
            let v = h(x);
            if v > best.1 {
                best = (x, v);
            }
        }
    };
    if b == 0.0 {
        // Derivative numerator 2(A − C)x: no interior critical point.
    } else {
        // −B x² + 2(A−C) x + B = 0, roots have product −1, so exactly one is positive.
        let p = 2.0 * (a - c);
        let disc = (p * p + 4.0 * b * b).sqrt();
        let q = -0.5 * (p + p.signum() * disc);
        let (r1, r2) = if q != 0.0 { (q / -b, b / q) } else { (1.0, -1.0) };
        consider(r1);
        consider(r2);
    }
    if a.abs() > best.1 {
        best = (f64::INFINITY, a.abs());
    }
    best
}

/// `‖M_n e_i − e_i‖_φ` for `e_0 = 1`, `e_1 = t`, `e_2 = t²`, from the exact
/// moment formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KorovkinNorms {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
    pub argmax_e1: f64,
    pub argmax_e2: f64,
}

pub fn korovkin_weighted_check(params: &OperatorParams) -> Result<KorovkinNorms> {
    params.validate()?;
    let OperatorParams { n, alpha, beta } = *params;
    let lam = params.lambda();
    // M t − t = (βx + α + 1)/λ
    let (argmax_e1, e1) = rational_phi_sup(0.0, beta / lam, (alpha + 1.0) / lam);
    // M t² − t² = ((n² − λ²)x² + (2α+4)n x + (α+1)(α+2)) / λ²
    let l2 = lam * lam;
    let (argmax_e2, e2) = rational_phi_sup(
        (n * n - l2) / l2,
        (2.0 * alpha + 4.0) * n / l2,
        (alpha + 1.0) * (alpha + 2.0) / l2,
    );
    Ok(KorovkinNorms {
        e0: 0.0,
        e1,
        e2,
        argmax_e1,
        argmax_e2,
    })
}
