//! Scalar special functions the operators are built on.
//!
//! Everything here is evaluated in the log domain where magnitudes can leave
//! the `f64` range, and only exponentiated at the end.

mod gamma;
mod kummer;
mod poisson;

pub use gamma::{log_gamma, pochhammer, reg_lower_gamma, reg_upper_gamma};
pub(crate) use gamma::{ln_gamma_density, ln_gamma_pos, ln_negbin_pmf};
pub use kummer::kummer_scaled;
pub use poisson::{covering_bounds, poisson_tail, poisson_weight_log, PoissonWindow};
pub(crate) use poisson::{first_below, last_below, poisson_lower_tail, poisson_upper_tail};

use crate::error::{Error, Result};

/// Truncation controls for series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyPolicy {
    /// Relative size below which a series term is considered negligible.
    pub series_rel_tol: f64,
    pub max_terms: usize,
    /// Fixed series/asymptotic boundary; `None` means `40 + |a| + |b|`.
    pub switchover_z: Option<f64>,
}

impl Default for AccuracyPolicy {
    fn default() -> Self {
        Self {
            series_rel_tol: 1e-15,
            max_terms: 100_000,
            switchover_z: None,
        }
    }
}

impl AccuracyPolicy {
    pub fn new(series_rel_tol: f64, max_terms: usize, switchover_z: Option<f64>) -> Result<Self> {
        let p = Self {
            series_rel_tol,
            max_terms,
            switchover_z,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.series_rel_tol > 0.0 && self.series_rel_tol < 1e-6) {
            return Err(Error::InvalidParameter {
                name: "series_rel_tol",
                detail: format!("must lie in (0, 1e-6), got {}", self.series_rel_tol),
            });
        }
        if self.max_terms < 64 {
            return Err(Error::InvalidParameter {
                name: "max_terms",
                detail: format!("must be at least 64, got {}", self.max_terms),
            });
        }
        Ok(())
    }

    pub fn switchover(&self, a: f64, b: f64) -> f64 {
        self.switchover_z.unwrap_or(40.0 + a.abs() + b.abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn policy_invariants() {
        assert!(AccuracyPolicy::default().validate().is_ok());
        assert!(AccuracyPolicy::new(1e-5, 100, None).is_err());
        assert!(AccuracyPolicy::new(0.0, 100, None).is_err());
        assert!(AccuracyPolicy::new(1e-12, 63, None).is_err());
        assert!(AccuracyPolicy::new(1e-12, 64, Some(10.0)).is_ok());
    }

    // e^{-z} 1F1(a; b; z) from a 40-digit reference evaluation.
    const KUMMER_GRID: [(f64, f64, [f64; 4]); 12] = [
        (0.5, 0.5, [1.0, 1.0, 1.0, 1.0]),
        (0.5, 1.0, [0.95182403579097663, 0.64503527044915007, 0.18354081260932835, 0.056561626647454193]),
        (0.5, 2.0, [0.92803586792442706, 0.48861446726427837, 0.019568545664785996, 0.00056850275455879289]),
        (1.0, 0.5, [1.0983660805630779, 1.8615277067962964, 5.6049932100626173, 17.72453850905516]),
        (1.0, 1.0, [1.0, 1.0, 1.0, 1.0]),
        (1.0, 2.0, [0.95162581964040427, 0.63212055882855768, 0.099995460007023752, 0.01]),
        (2.5, 0.5, [1.4133333333333334, 6.3333333333333333, 174.33333333333333, 13734.333333333333]),
        (2.5, 1.0, [1.1518646800224287, 2.6779709313499603, 29.208192594314508, 769.19964041085496]),
        (2.5, 2.0, [1.0247942386569949, 1.2314795872667885, 2.5549520986166472, 7.5788760373017255]),
        (6.0, 0.5, [2.2728384180540332, 37.668040662575985, 33642.930735072995, 1921084608.9930844]),
        (6.0, 1.0, [1.5516875833333334, 12.883333333333333, 5134.3333333333333, 105883834.33333333]),
        (6.0, 2.0, [1.2101675, 4.175, 371.0, 1010201.0]),
    ];

    #[test]
    fn kummer_matches_reference_grid() {
        let pol = AccuracyPolicy::default();
        for (a, b, vals) in KUMMER_GRID {
            for (z, want) in [0.1, 1.0, 10.0, 100.0].into_iter().zip(vals) {
                let got = kummer_scaled(a, b, z, &pol).unwrap();
                assert_relative_eq!(got, want, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn kummer_contiguous_relation() {
        // -r F_{r-1} + (α+2r+1+z) F_r - (α+r+1) F_{r+1} = 0, F_j = 1F1(α+j+1; α+1; z)
        let pol = AccuracyPolicy::default();
        for alpha in [-0.5, 0.0, 0.5, 1.0] {
            for z in [0.1, 1.0, 10.0, 60.0, 250.0] {
                let f = |j: f64| kummer_scaled(alpha + j + 1.0, alpha + 1.0, z, &pol).unwrap();
                for r in 1..8 {
                    let r = r as f64;
                    let t1 = -r * f(r - 1.0);
                    let t2 = (alpha + 2.0 * r + 1.0 + z) * f(r);
                    let t3 = -(alpha + r + 1.0) * f(r + 1.0);
                    let scale = t1.abs() + t2.abs() + t3.abs();
                    assert!((t1 + t2 + t3).abs() <= 1e-9 * scale, "alpha={alpha} z={z} r={r}");
                }
            }
        }
    }

    #[test]
    fn lower_gamma_bounded_and_monotone() {
        for s in [0.3f64, 1.0, 2.5, 17.0, 300.0] {
            let mut prev = 0.0;
            for i in 0..=400 {
                let z = i as f64 * s.max(1.0) * 0.01;
                let p = reg_lower_gamma(s, z).unwrap();
                assert!((0.0..=1.0).contains(&p));
                assert!(p >= prev, "s={s} z={z}");
                prev = p;
            }
        }
    }

    #[test]
    fn poisson_partition_of_unity() {
        for (n, x) in [(5.0, 0.1), (10.0, 2.0), (200.0, 5.0), (50.0, 1.0)] {
            for k_cut in [0u64, 3, 10, 40, 400, 1500] {
                let head: f64 = (0..=k_cut).map(|k| poisson_weight_log(n, x, k).exp()).sum();
                let tail = poisson_tail(n, x, k_cut);
                assert!((head + tail - 1.0).abs() <= 1e-13, "n={n} x={x} K={k_cut}");
            }
        }
    }
}
