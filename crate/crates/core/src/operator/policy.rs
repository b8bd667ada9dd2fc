use crate::error::{Error, Result};

/// Tolerances for the k-sum truncation and the coefficient quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Absolute bound on the neglected part of the k-sum.
    pub eps_tail: f64,
    /// Nodes of the generalized Gauss–Laguerre rule for smooth integrands.
    pub quad_nodes: usize,
    /// Target relative error of each coefficient.
    pub eps_quad: f64,
    /// Hard cap on the summation index.
    pub k_max: u64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            eps_tail: 1e-15,
            quad_nodes: 64,
            eps_quad: 1e-12,
            k_max: 1_000_000,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_tail > 0.0 && self.eps_tail <= 1e-8) {
            return Err(Error::InvalidParameter {
                name: "eps_tail",
                detail: format!("must lie in (0, 1e-8], got {}", self.eps_tail),
            });
        }
        if self.quad_nodes < 32 {
            return Err(Error::InvalidParameter {
                name: "quad_nodes",
                detail: format!("must be at least 32, got {}", self.quad_nodes),
            });
        }
        if !(self.eps_quad > 0.0 && self.eps_quad < 1e-3) {
            return Err(Error::InvalidParameter {
                name: "eps_quad",
                detail: format!("must lie in (0, 1e-3), got {}", self.eps_quad),
            });
        }
        if self.k_max < 256 {
            return Err(Error::InvalidParameter {
                name: "k_max",
                detail: format!("must be at least 256, got {}", self.k_max),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        assert!(TruncationPolicy::default().validate().is_ok());
    }

    #[test]
    fn rejects_out_of_range_fields() {
        let d = TruncationPolicy::default();
        for bad in [
            TruncationPolicy { eps_tail: 1e-7, ..d },
            TruncationPolicy { eps_tail: 0.0, ..d },
            TruncationPolicy { quad_nodes: 31, ..d },
            TruncationPolicy { k_max: 255, ..d },
            TruncationPolicy { eps_quad: 0.0, ..d },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }
}
