//! Gauss rules from the Golub–Welsch eigenproblem.
//!
//! Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix of
//! the orthogonal-polynomial family; weights are `μ₀ v₀²` where `v₀` is the
//! first component of the normalized eigenvector.  Only those first
//! components are tracked through the QL sweeps, so a rule costs `O(m²)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// A quadrature rule on a fixed weight; `weights` sum to the weight's mass.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Eigenvalues and squared first eigenvector components of the symmetric
/// tridiagonal matrix with diagonal `d` and off-diagonal `e` (`e[i]` couples
/// `i` and `i+1`). Implicit QL with Wilkinson shifts.
fn tridiagonal_eigen(mut d: Vec<f64>, off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = d.len();
    let mut e = vec![0.0; m];
    e[..m - 1].copy_from_slice(off);
    let mut z = vec![0.0; m];
    z[0] = 1.0;

    for l in 0..m {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < m {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            assert!(iter < 60, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = mm;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }

    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let nodes = idx.iter().map(|&i| d[i]).collect();
    let w = idx.iter().map(|&i| z[i] * z[i]).collect();
    (nodes, w)
}

/// m-point rule for the Gamma(shape a+1, rate 1) probability density,
/// i.e. the generalized Laguerre weight `u^a e^{-u}` normalized to unit mass.
pub fn gauss_laguerre(m: usize, a: f64) -> GaussRule {
    assert!(m >= 1 && a > -1.0);
    let diag: Vec<f64> = (0..m).map(|i| 2.0 * i as f64 + a + 1.0).collect();
    let off: Vec<f64> = (1..m)
        .map(|i| {
            let i = i as f64;
            (i * (i + a)).sqrt()
        })
        .collect();
    let (nodes, mut weights) = tridiagonal_eigen(diag, &off);
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    GaussRule { nodes, weights }
}

/// m-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(m: usize) -> GaussRule {
    assert!(m >= 1);
    let off: Vec<f64> = (1..m)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (mut nodes, weights) = tridiagonal_eigen(vec![0.0; m], &off);
    // Weight mass on [-1, 1] is 2; symmetrize pairs to remove solver asymmetry.
    let mut weights: Vec<f64> = weights.iter().map(|w| 2.0 * w).collect();
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

type RuleCache = Mutex<HashMap<(u64, usize), Arc<GaussRule>>>;

/// Memoized [`gauss_laguerre`]; rules are immutable once built.
pub fn gauss_laguerre_cached(m: usize, a: f64) -> Arc<GaussRule> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (a.to_bits(), m);
    if let Some(r) = cache.lock().unwrap().get(&key) {
        return Arc::clone(r);
    }
    let rule = Arc::new(gauss_laguerre(m, a));
    cache
        .lock()
        .unwrap()
        .entry(key)
        .or_insert(rule)
        .clone()
}

/// Memoized [`gauss_legendre`].
pub fn gauss_legendre_cached(m: usize) -> Arc<GaussRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    cache
        .lock()
        .unwrap()
        .entry(m)
        .or_insert_with(|| Arc::new(gauss_legendre(m)))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::pochhammer;

    #[test]
    fn laguerre_integrates_gamma_moments() {
        // E[U^r] for U ~ Gamma(a+1, 1) is (a+1)_r
        for a in [-0.5, 0.0, 0.5, 3.0, 250.0] {
            let rule = gauss_laguerre(32, a);
            for r in 0..20u32 {
                let q: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(u, w)| w * u.powi(r as i32))
                    .sum();
                let exact = pochhammer(a + 1.0, r);
                assert!((q / exact - 1.0).abs() < 1e-12, "a={a} r={r}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn laguerre_nodes_positive_and_sorted() {
        let rule = gauss_laguerre(64, -0.75);
        assert!(rule.nodes[0] > 0.0);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(rule.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn laguerre_exponential_mean() {
        // E[e^{-qU}] = (1+q)^{-(a+1)}
        let (a, q) = (4.5, 0.3);
        let rule = gauss_laguerre(64, a);
        let got: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(u, w)| w * (-q * u).exp())
            .sum();
        let want = (1.0f64 + q).powf(-(a + 1.0));
        assert!((got / want - 1.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_polynomial_exactness() {
        let rule = gauss_legendre(10);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        for r in 0..20 {
            let q: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(x, w)| w * x.powi(r))
                .sum();
            let exact = if r % 2 == 1 { 0.0 } else { 2.0 / (r as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "r={r}");
        }
    }
}
