//! Poisson weights ψ_{n,k}(x) = (nx)^k e^{-nx} / k! in the log domain, tails,
//! and normalized windows of weights for truncated k-sums.

use super::gamma::{ln_poisson_pmf, reg_lower_gamma, reg_upper_gamma};

/// ln ψ_{n,k}(x); `-inf` for x = 0 and k ≥ 1.
pub fn poisson_weight_log(n: f64, x: f64, k: u64) -> f64 {
    let z = n * x;
    if z == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    ln_poisson_pmf(k as f64, z)
}

/// Σ_{k>K} ψ_{n,k}(x), clamped to [0, 1].
///
/// Computed as P(K+1, nx), which is the same quantity without the
/// cancellation of `1 − Σ_{k≤K}`.
pub fn poisson_tail(n: f64, x: f64, k_cut: u64) -> f64 {
    poisson_upper_tail(n * x, k_cut)
}

/// P(Poisson(z) > k).
pub(crate) fn poisson_upper_tail(z: f64, k_cut: u64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    reg_lower_gamma(k_cut as f64 + 1.0, z)
        .unwrap_or(0.0)
        .clamp(0.0, 1.0)
}

/// P(Poisson(z) < k).
pub(crate) fn poisson_lower_tail(z: f64, k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    if z <= 0.0 {
        return 1.0;
    }
    reg_upper_gamma(k as f64, z).unwrap_or(1.0).clamp(0.0, 1.0)
}

/// Smallest K with `bound(K) <= eps`, for a bound nonincreasing in K.
pub(crate) fn first_below(start: u64, cap: u64, eps: f64, bound: impl Fn(u64) -> f64) -> Option<u64> {
    if bound(start) <= eps {
        return Some(start);
    }
    let mut lo = start;
    let mut step = 1u64;
    let mut hi;
    loop {
        hi = lo.saturating_add(step).min(cap);
        if bound(hi) <= eps {
            break;
        }
        if hi == cap {
            return None;
        }
        lo = hi;
        step = step.saturating_mul(2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Largest k_lo such that `bound(k_lo) <= eps`, for a bound nondecreasing in k_lo.
pub(crate) fn last_below(upper: u64, eps: f64, bound: impl Fn(u64) -> f64) -> u64 {
    if bound(upper) <= eps {
        return upper;
    }
    let (mut lo, mut hi) = (0u64, upper);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) <= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Poisson(z) weights on the index window `k_lo..=k_hi`.
///
/// Relative weights come from the ratio recurrence anchored at the mode, then
/// are scaled so the window carries exactly its analytic mass
/// `1 − P(K < k_lo) − P(K > k_hi)`.
#[derive(Debug, Clone)]
pub struct PoissonWindow {
    pub k_lo: u64,
    pub weights: Vec<f64>,
}

impl PoissonWindow {
    pub fn k_hi(&self) -> u64 {
        self.k_lo + self.weights.len() as u64 - 1
    }

    pub fn new(z: f64, k_lo: u64, k_hi: u64) -> Self {
        assert!(k_lo <= k_hi);
        if z <= 0.0 {
            let mut weights = vec![0.0; (k_hi - k_lo + 1) as usize];
            if k_lo == 0 {
                weights[0] = 1.0;
            }
            return Self { k_lo, weights };
        }
        let len = (k_hi - k_lo + 1) as usize;
        let mode = (z.floor() as u64).clamp(k_lo, k_hi);
        let m = (mode - k_lo) as usize;
        let mut w = vec![0.0; len];
        w[m] = 1.0;
        for i in (m + 1)..len {
            let k = k_lo + i as u64;
            w[i] = w[i - 1] * z / k as f64;
            if w[i] == 0.0 {
                break;
            }
        }
        for i in (0..m).rev() {
            let k = k_lo + i as u64 + 1;
            w[i] = w[i + 1] * k as f64 / z;
            if w[i] == 0.0 {
                break;
            }
        }
        let total: f64 = w.iter().sum();
        let mass = 1.0 - poisson_lower_tail(z, k_lo) - poisson_upper_tail(z, k_hi);
        let norm = if mass > 0.5 {
            mass / total
        } else {
            // Window far from the bulk: anchor on the log-domain mode weight instead.
            ln_poisson_pmf(mode as f64, z).exp()
        };
        for v in &mut w {
            *v *= norm;
        }
        Self { k_lo, weights: w }
    }

    /// Window holding all but `eps` of the mass on each side.
    pub fn covering(z: f64, eps: f64) -> Self {
        let (lo, hi) = covering_bounds(z, eps);
        Self::new(z, lo, hi)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.k_lo + i as u64, w))
    }
}

/// Index bounds (k_lo, k_hi) with lower and upper Poisson(z) tails each ≤ eps.
pub fn covering_bounds(z: f64, eps: f64) -> (u64, u64) {
    if z <= 0.0 {
        return (0, 0);
    }
    let mode = z.floor() as u64;
    let hi = first_below(mode, u64::MAX / 4, eps, |k| poisson_upper_tail(z, k))
        .unwrap_or(u64::MAX / 4);
    let lo = last_below(mode, eps, |k| poisson_lower_tail(z, k));
    (lo, hi)
}
