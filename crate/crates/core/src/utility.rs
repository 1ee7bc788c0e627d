//! Constant relative risk aversion (CRRA) utility.
//!
//! `u(w) = w^(1-rho) / (1-rho)` for `rho != 1` and `u(w) = ln w` at `rho = 1`.
//! Powers are evaluated as `exp(k * ln w)` so that large coefficients do not
//! overflow the intermediate `w^(1-rho)` before the division.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// A CRRA utility curve with coefficient of relative risk aversion `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityCurve {
    rho: f64,
}

impl UtilityCurve {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!(
                "rho must be finite and >= 0, got {rho}"
            )));
        }
        Ok(Self { rho })
    }

    #[inline]
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `rho == 1`: the logarithmic limit.
    #[inline]
    pub fn is_logarithmic(&self) -> bool {
        self.rho == 1.0
    }

    pub fn value(&self, w: f64) -> Result<f64> {
        require_positive("wealth", w)?;
        if self.is_logarithmic() {
            return Ok(w.ln());
        }
        let k = 1.0 - self.rho;
        let magnitude = (k * w.ln() - k.abs().ln()).exp();
        Ok(magnitude.copysign(k))
    }

    /// Marginal utility `w^-rho`.
    pub fn deriv1(&self, w: f64) -> Result<f64> {
        require_positive("wealth", w)?;
        Ok((-self.rho * w.ln()).exp())
    }

    /// Curvature `-rho * w^(-rho-1)`.
    pub fn deriv2(&self, w: f64) -> Result<f64> {
        require_positive("wealth", w)?;
        if self.rho == 0.0 {
            return Ok(0.0);
        }
        Ok(-self.rho * (-(self.rho + 1.0) * w.ln()).exp())
    }

    /// Wealth whose utility is `v`.
    pub fn inverse(&self, v: f64) -> Result<f64> {
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "utility level must be finite, got {v}"
            )));
        }
        if self.is_logarithmic() {
            return Ok(v.exp());
        }
        let k = 1.0 - self.rho;
        let scaled = v * k;
        if scaled <= 0.0 {
            return Err(Error::Domain(format!(
                "utility {v} is outside the range of the CRRA curve with rho = {}",
                self.rho
            )));
        }
        Ok((scaled.ln() / k).exp())
    }

    /// Arrow-Pratt absolute risk aversion `-u''/u' = rho / w`.
    pub fn absolute_risk_aversion(&self, w: f64) -> Result<f64> {
        require_positive("wealth", w)?;
        Ok(self.rho / w)
    }

    /// Relative risk aversion `-w u''/u'`, which is `rho` at every wealth level.
    pub fn relative_risk_aversion(&self, w: f64) -> Result<f64> {
        require_positive("wealth", w)?;
        Ok(self.rho)
    }
}
