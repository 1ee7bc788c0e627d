use serde::{Deserialize, Serialize};

use super::Preferences;
use crate::error::{require_positive, Error, Result};
use crate::utility::UtilityCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PremiumMethod {
    Exact,
    FirstOrder,
    CurvatureWeighted,
}

/// A risk premium `pi` and its certainty equivalent `w_s - pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PremiumResult {
    pub premium: f64,
    pub certainty_equivalent: f64,
    pub method: PremiumMethod,
}

impl PremiumResult {
    fn from_premium(w_s: f64, premium: f64, method: PremiumMethod) -> Self {
        Self {
            premium,
            certainty_equivalent: w_s - premium,
            method,
        }
    }
}

/// Solve `u(w_s - pi) = beta * eta * u(w_ns)` exactly.
pub fn exact_risk_premium(
    curve: &UtilityCurve,
    w_s: f64,
    w_ns: f64,
    prefs: &Preferences,
) -> Result<PremiumResult> {
    require_positive("w_s", w_s)?;
    let target = prefs.weight() * curve.value(w_ns)?;
    let ce = curve.inverse(target).map_err(|_| {
        Error::NoSolution(format!(
            "target utility {target} is outside the range of u (rho = {})",
            curve.rho()
        ))
    })?;
    Ok(PremiumResult {
        premium: w_s - ce,
        certainty_equivalent: ce,
        method: PremiumMethod::Exact,
    })
}

/// First-order premium `pi = (u(w_s) - beta * eta * u(w_ns)) / u'(w_s)`.
pub fn first_order_risk_premium(
    w_s: f64,
    u_ws: f64,
    slope_ws: f64,
    u_wns: f64,
    prefs: &Preferences,
) -> Result<PremiumResult> {
    require_positive("u'(w_s)", slope_ws)?;
    let premium = (u_ws - prefs.weight() * u_wns) / slope_ws;
    Ok(PremiumResult::from_premium(
        w_s,
        premium,
        PremiumMethod::FirstOrder,
    ))
}

/// How to read the risk-aversion coefficient in the curvature-weighted premium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CurvatureReading {
    /// Absolute risk aversion `-u''/u'`; the result equals the first-order premium.
    #[default]
    AbsoluteRiskAversion,
    /// The relative coefficient `rho` taken literally; off by a factor `w_s`.
    Literal,
}

/// Premium in the curvature-weighted form `coef * [eta beta u(w_ns) - u(w_s)] / u''(w_s)`.
///
/// With `coef = -u''/u'` this is algebraically the first-order premium. The
/// literal reading uses `coef = rho` and is kept for comparison only.
pub fn paper_premium_eq27(
    curve: &UtilityCurve,
    w_s: f64,
    u_wns: f64,
    prefs: &Preferences,
    reading: CurvatureReading,
) -> Result<PremiumResult> {
    let u_ws = curve.value(w_s)?;
    let slope = curve.deriv1(w_s)?;
    let curvature = curve.deriv2(w_s)?;
    if curvature == 0.0 {
        return Err(Error::Degenerate(
            "u''(w_s) = 0: the curvature-weighted premium is undefined for linear utility".into(),
        ));
    }
    let coef = match reading {
        CurvatureReading::AbsoluteRiskAversion => -curvature / slope,
        CurvatureReading::Literal => curve.rho(),
    };
    let premium = coef * (prefs.eta * prefs.beta * u_wns - u_ws) / curvature;
    Ok(PremiumResult::from_premium(
        w_s,
        premium,
        PremiumMethod::CurvatureWeighted,
    ))
}
