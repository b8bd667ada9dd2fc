use crate::error::{Error, Result};

/// The operator index `n`, Laguerre exponent `alpha` and exponential tilt `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorParams {
    pub n: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl OperatorParams {
    /// Validated constructor: requires `n > beta` and `alpha > -1`.
    pub fn new(n: f64, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self { n, alpha, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("n", self.n), ("alpha", self.alpha), ("beta", self.beta)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    detail: format!("must be finite, got {v}"),
                });
            }
        }
        if !(self.n > 0.0) {
            return Err(Error::InvalidParameter {
                name: "n",
                detail: format!("must be positive, got {}", self.n),
            });
        }
        if !(self.n > self.beta) {
            return Err(Error::NNotAboveBeta {
                n: self.n,
                beta: self.beta,
            });
        }
        if !(self.alpha > -1.0) {
            return Err(Error::AlphaTooSmall { alpha: self.alpha });
        }
        Ok(())
    }

    /// Gamma rate `n − β` of the coefficient integrals.
    #[inline]
    pub fn lambda(&self) -> f64 {
        self.n - self.beta
    }

    /// Same operator with `alpha` replaced by `alpha + 1`.
    pub fn shifted_alpha(&self) -> Self {
        Self {
            alpha: self.alpha + 1.0,
            ..*self
        }
    }

    pub fn with_n(&self, n: f64) -> Self {
        Self { n, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_errors_are_distinct() {
        assert!(OperatorParams::new(10.0, 0.0, 2.0).is_ok());
        assert!(matches!(
            OperatorParams::new(2.0, 0.0, 3.0),
            Err(Error::NNotAboveBeta { .. })
        ));
        assert!(matches!(
            OperatorParams::new(2.0, 0.0, 2.0),
            Err(Error::NNotAboveBeta { .. })
        ));
        assert!(matches!(
            OperatorParams::new(5.0, -1.5, 0.0),
            Err(Error::AlphaTooSmall { .. })
        ));
        assert!(OperatorParams::new(5.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn negative_beta_is_admissible() {
        let p = OperatorParams::new(3.0, 0.5, -2.0).unwrap();
        assert_eq!(p.lambda(), 5.0);
    }
}
