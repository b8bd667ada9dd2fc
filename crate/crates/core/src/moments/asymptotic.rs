use super::central::central_moment;
use crate::error::{Error, Result};
use crate::operator::OperatorParams;

/// Leading-order prediction for the r-th central moment:
/// `(α+1+βx)/n` for `r = 1`, `r(r−1) β^{r−2} x^{r−1} / n^{r−1}` for `r >= 2`.
///
/// The leading term is returned as written even when it vanishes
/// (`β = 0`, `r >= 3`).
pub fn asymptotic_prediction(r: u32, x: f64, params: &OperatorParams) -> Result<f64> {
    let OperatorParams { n, alpha, beta } = *params;
    match r {
        0 => Err(Error::InvalidParameter {
            name: "r",
            detail: "asymptotic prediction needs r >= 1".into(),
        }),
        1 => Ok((alpha + 1.0 + beta * x) / n),
        _ => {
            let rf = r as f64;
            let beta_pow = if r == 2 { 1.0 } else { beta.powi(r as i32 - 2) };
            Ok(rf * (rf - 1.0) * beta_pow * x.powi(r as i32 - 1) / n.powi(r as i32 - 1))
        }
    }
}

/// Diagnostic quantities of the expansion at one `(r, x, params)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCase {
    pub r: u32,
    pub x: f64,
    pub params: OperatorParams,
    pub predicted_leading: f64,
    /// `A = n/(n−β)`
    pub a_ratio: f64,
    /// `z = nx`
    pub z: f64,
    /// `δ = A − 1 = β/(n−β)`
    pub delta: f64,
}

pub fn asymptotic_case(r: u32, x: f64, params: &OperatorParams) -> Result<AsymptoticCase> {
    params.validate()?;
    let lam = params.lambda();
    Ok(AsymptoticCase {
        r,
        x,
        params: *params,
        predicted_leading: asymptotic_prediction(r, x, params)?,
        a_ratio: params.n / lam,
        z: params.n * x,
        delta: params.beta / lam,
    })
}

/// `S₀ = (A−1)^r` and `S₁ = rA(A−1)^{r−2}[(α+r)A − (α+1)]` from the
/// generating polynomial `(Az − 1)^r`.
pub fn generating_sums(r: u32, a_ratio: f64, alpha: f64) -> (f64, f64) {
    let d = a_ratio - 1.0;
    let rf = r as f64;
    let s0 = d.powi(r as i32);
    let s1 = match r {
        0 => 0.0,
        // (A−1)^{-1}[(α+1)A − (α+1)] = α+1
        1 => a_ratio * (alpha + 1.0),
        _ => rf * a_ratio * d.powi(r as i32 - 2) * ((alpha + rf) * a_ratio - (alpha + 1.0)),
    };
    (s0, s1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRow {
    pub n: f64,
    pub exact: f64,
    pub predicted: f64,
    /// `exact / predicted`; `None` when the prediction is zero.
    pub ratio: Option<f64>,
    /// `x^r S₀ + x^{r−1} S₁ / n`
    pub two_term: f64,
    pub flagged_zero_prediction: bool,
}

/// Exact central moment against the leading-order prediction along `n_grid`.
pub fn asymptotic_ratio_table(
    r: u32,
    x: f64,
    alpha: f64,
    beta: f64,
    n_grid: &[f64],
) -> Result<Vec<AsymptoticRow>> {
    if n_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter {
            name: "n_grid",
            detail: "must be strictly ascending".into(),
        });
    }
    n_grid
        .iter()
        .map(|&n| {
            let params = OperatorParams::new(n, alpha, beta)?;
            let exact = central_moment(r, x, &params)?;
            let predicted = asymptotic_prediction(r, x, &params)?;
            let (s0, s1) = generating_sums(r, n / params.lambda(), alpha);
            let two_term = x.powi(r as i32) * s0 + x.powi(r as i32 - 1) * s1 / n;
            let zero = predicted == 0.0;
            Ok(AsymptoticRow {
                n,
                exact,
                predicted,
                ratio: (!zero).then(|| exact / predicted),
                two_term,
                flagged_zero_prediction: zero,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::central_moment_explicit;

    #[test]
    fn prediction_examples() {
        let q = OperatorParams::new(100.0, 0.0, 3.0).unwrap();
        assert!((asymptotic_prediction(2, 1.0, &q).unwrap() - 0.02).abs() < 1e-16);
        let q = OperatorParams::new(10.0, 0.0, 2.0).unwrap();
        assert!((asymptotic_prediction(1, 1.0, &q).unwrap() - 0.3).abs() < 1e-16);
        let q = OperatorParams::new(10.0, 0.0, 0.0).unwrap();
        assert_eq!(asymptotic_prediction(3, 1.0, &q).unwrap(), 0.0);
    }

    #[test]
    fn case_notation() {
        let c = asymptotic_case(2, 1.0, &OperatorParams::new(10.0, 0.0, 2.0).unwrap()).unwrap();
        assert_eq!(c.a_ratio, 1.25);
        assert_eq!(c.delta, 0.25);
        assert_eq!(c.z, 10.0);
    }

    #[test]
    fn second_order_ratio_converges() {
        let rows = asymptotic_ratio_table(2, 1.0, 0.0, 1.0, &[10.0, 100.0, 1e4]).unwrap();
        assert!((rows[2].ratio.unwrap() - 1.0).abs() < 0.01);
        let rows = asymptotic_ratio_table(1, 1.0, 0.5, 1.0, &[10.0, 100.0, 1000.0]).unwrap();
        let devs: Vec<f64> = rows.iter().map(|r| (r.ratio.unwrap() - 1.0).abs()).collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2]);
    }

    #[test]
    fn second_order_limit() {
        let mut prev = f64::INFINITY;
        for n in [10.0, 100.0, 1000.0, 1e4] {
            let q = OperatorParams::new(n, 0.5, 1.0).unwrap();
            let gap = (n * central_moment_explicit(2, 1.0, &q).unwrap() - 2.0).abs();
            assert!(gap < prev);
            prev = gap;
        }
    }

    #[test]
    fn zero_predictions_are_flagged() {
        let rows = asymptotic_ratio_table(3, 1.0, 0.0, 0.0, &[10.0, 20.0]).unwrap();
        assert!(rows.iter().all(|r| r.flagged_zero_prediction && r.ratio.is_none()));
    }
}
