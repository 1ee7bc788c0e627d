//! Risk-aversion coefficients implied by second-order expansions of the
//! premium relation around certain wealth `w_s`.
//!
//! Expanding `u(w_s - pi)` to first order in `pi` and `u(w_s + Ez)` to second
//! order in `Ez` and solving for `-u''/u'` gives the absolute coefficient; the
//! relative coefficient is that value times `w_s`. Two variants exist: one
//! with an additive utility offset `delta`, one with a multiplicative
//! sufficiency factor `eta`. The truncation mixes orders, so these are
//! algebraic identities of the expansion, not estimators that converge to the
//! curve's own `rho` as `Ez -> 0`.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// Evaluations at certain wealth shared by all expansion formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionInputs {
    pub w_s: f64,
    /// Expected gain `Ez` of the uncertain prospect; must be non-zero.
    pub expected_gain: f64,
    /// Risk premium `pi`.
    pub premium: f64,
    pub beta: f64,
    /// `u(w_s)`
    pub utility: f64,
    /// `u'(w_s)`
    pub slope: f64,
}

impl ExpansionInputs {
    fn validate(&self) -> Result<()> {
        if self.expected_gain == 0.0 || !self.expected_gain.is_finite() {
            return Err(Error::SingularExpansion);
        }
        require_positive("u'(w_s)", self.slope)?;
        require_positive("beta", self.beta)?;
        Ok(())
    }
}

/// Absolute risk aversion with an additive offset `delta`.
pub fn alpha_expansion_delta(inputs: &ExpansionInputs, delta: f64) -> Result<f64> {
    inputs.validate()?;
    let ExpansionInputs {
        expected_gain: ez,
        premium: pi,
        beta,
        utility: u,
        slope,
        ..
    } = *inputs;
    let ez2 = ez * ez;
    Ok(
        2.0 * pi / (beta * ez2) + 2.0 / ez - 2.0 * delta / (beta * slope * ez2)
            + 2.0 * u * (beta - 1.0) / (beta * slope * ez2),
    )
}

/// Absolute risk aversion with a multiplicative sufficiency factor `eta`.
pub fn alpha_expansion_eta(inputs: &ExpansionInputs, eta: f64) -> Result<f64> {
    inputs.validate()?;
    require_positive("eta", eta)?;
    let ExpansionInputs {
        expected_gain: ez,
        premium: pi,
        beta,
        utility: u,
        slope,
        ..
    } = *inputs;
    let weight = beta * eta;
    let ez2 = ez * ez;
    Ok(2.0 * pi / (weight * ez2) + 2.0 / ez + 2.0 * u * (weight - 1.0) / (weight * slope * ez2))
}

/// Relative risk aversion with an additive offset: `w_s` times the absolute form.
pub fn rho_expansion_delta(inputs: &ExpansionInputs, delta: f64) -> Result<f64> {
    Ok(inputs.w_s * alpha_expansion_delta(inputs, delta)?)
}

/// Relative risk aversion with a sufficiency factor: `w_s` times the absolute form.
pub fn rho_expansion_eta(inputs: &ExpansionInputs, eta: f64) -> Result<f64> {
    Ok(inputs.w_s * alpha_expansion_eta(inputs, eta)?)
}

/// Invert [`rho_expansion_eta`] for the sufficiency factor.
///
/// `eta = (2 pi w u' - 2 w u) / (rho beta u' Ez^2 - 2 w Ez beta u' - 2 w beta u)`
pub fn eta_from_expansion(inputs: &ExpansionInputs, rho: f64) -> Result<f64> {
    inputs.validate()?;
    let ExpansionInputs {
        w_s: w,
        expected_gain: ez,
        premium: pi,
        beta,
        utility: u,
        slope,
    } = *inputs;
    let numerator = 2.0 * pi * w * slope - 2.0 * w * u;
    let a = rho * beta * slope * ez * ez;
    let b = 2.0 * w * ez * beta * slope;
    let c = 2.0 * w * beta * u;
    let denominator = a - b - c;
    let scale = a.abs().max(b.abs()).max(c.abs());
    if denominator == 0.0 || denominator.abs() <= 64.0 * f64::EPSILON * scale {
        return Err(Error::Degenerate(
            "expansion denominator vanishes; eta is not identified".into(),
        ));
    }
    Ok(numerator / denominator)
}

/// Classical fair-gamble coefficient `rho = 2 pi w_s / sigma^2`.
pub fn fair_gamble_rho(premium: f64, w_s: f64, variance: f64) -> Result<f64> {
    require_positive("gamble variance", variance)?;
    Ok(2.0 * premium * w_s / variance)
}

/// Additive offset equivalent to a sufficiency factor: `delta = beta (1 - eta) u(w_i)`.
pub fn delta_from_eta(beta: f64, eta: f64, u_wi: f64) -> f64 {
    beta * (1.0 - eta) * u_wi
}
