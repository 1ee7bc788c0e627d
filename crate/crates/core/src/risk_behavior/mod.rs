//! Risk behaviour under a sufficiency factor.
//!
//! An investor compares the utility of certain wealth `u(w_t)` with the
//! discounted, sufficiency-adjusted utility of an uncertain target
//! `beta * eta * u(w_T)`. The sign of the gap decides whether the investor
//! behaves as risk-averse, risk-loving, or risk-neutral; the same relation
//! defines the certainty equivalent and the risk premium.

mod expansion;
mod premium;

pub use expansion::{
    alpha_expansion_delta, alpha_expansion_eta, delta_from_eta, eta_from_expansion,
    fair_gamble_rho, rho_expansion_delta, rho_expansion_eta, ExpansionInputs,
};
pub use premium::{
    exact_risk_premium, first_order_risk_premium, paper_premium_eq27, CurvatureReading,
    PremiumMethod, PremiumResult,
};

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::utility::UtilityCurve;

/// Default relative width of the risk-neutral band.
pub const DEFAULT_NEUTRAL_TOL: f64 = 1e-9;

/// Discount factor `beta` and sufficiency factor `eta` of one decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preferences {
    pub beta: f64,
    pub eta: f64,
}

impl Preferences {
    pub fn new(beta: f64, eta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Domain(format!(
                "beta must lie in (0, 1], got {beta}"
            )));
        }
        require_positive("eta", eta)?;
        Ok(Self { beta, eta })
    }

    /// `beta * eta`, the multiplier applied to the utility of uncertain wealth.
    #[inline]
    pub fn weight(&self) -> f64 {
        self.beta * self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Upward,
    Downward,
}

/// Certain wealth together with a guess of future (uncertain) wealth.
///
/// Downward scenarios, where the investor expects wealth to fall, use the
/// same premium and classification routines as upward ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WealthScenario {
    pub w_certain: f64,
    pub w_uncertain: f64,
    pub direction: Direction,
}

impl WealthScenario {
    pub fn new(w_certain: f64, w_uncertain: f64) -> Result<Self> {
        require_positive("certain wealth", w_certain)?;
        require_positive("uncertain wealth", w_uncertain)?;
        let direction = if w_uncertain >= w_certain {
            Direction::Upward
        } else {
            Direction::Downward
        };
        Ok(Self {
            w_certain,
            w_uncertain,
            direction,
        })
    }

    pub fn classify(
        &self,
        curve: &UtilityCurve,
        prefs: &Preferences,
        tol: f64,
    ) -> Result<RiskClass> {
        classify_investor(curve, self.w_certain, self.w_uncertain, prefs, tol)
    }

    pub fn exact_premium(
        &self,
        curve: &UtilityCurve,
        prefs: &Preferences,
    ) -> Result<PremiumResult> {
        exact_risk_premium(curve, self.w_certain, self.w_uncertain, prefs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RiskClass {
    RiskAverse,
    RiskLoving,
    RiskNeutral,
}

impl std::fmt::Display for RiskClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RiskClass::RiskAverse => "RiskAverse",
            RiskClass::RiskLoving => "RiskLoving",
            RiskClass::RiskNeutral => "RiskNeutral",
        };
        f.write_str(s)
    }
}

/// Compare `u(w_t)` with `beta * eta * u(w_T)`.
///
/// The investor is risk-neutral when the two agree within `tol` times the
/// larger magnitude. The band is purely relative so that the verdict is
/// unchanged when both wealth levels are scaled by a common factor.
pub fn classify_investor(
    curve: &UtilityCurve,
    w_certain: f64,
    w_uncertain: f64,
    prefs: &Preferences,
    tol: f64,
) -> Result<RiskClass> {
    require_positive("tolerance", tol)?;
    let certain = curve.value(w_certain)?;
    let uncertain = prefs.weight() * curve.value(w_uncertain)?;
    let gap = certain - uncertain;
    if gap.abs() <= tol * certain.abs().max(uncertain.abs()) {
        Ok(RiskClass::RiskNeutral)
    } else if gap > 0.0 {
        Ok(RiskClass::RiskAverse)
    } else {
        Ok(RiskClass::RiskLoving)
    }
}

/// Sufficiency factor implied by allocating `allocated` utility on top of
/// `base_utility = u(w_T)`: `eta = (u + allocated) / u`.
pub fn sufficiency_factor_from_allocation(base_utility: f64, allocated: f64) -> Result<f64> {
    if base_utility == 0.0 {
        return Err(Error::Degenerate(
            "base utility is zero; the sufficiency factor is undefined".into(),
        ));
    }
    Ok((base_utility + allocated) / base_utility)
}

/// Position of the scaled curve `eta * u(w)` relative to `u(w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveRelation {
    Below,
    Above,
    Coincides,
}

/// Whether `eta * u` lies below, above or on `u` for a CRRA curve.
///
/// The answer depends only on the sign of `u`, which is `sign(1 - rho)`, so
/// the logarithmic curve (`rho = 1`, whose sign changes at `w = 1`) is rejected.
pub fn curve_relation(eta: f64, rho: f64) -> Result<CurveRelation> {
    require_positive("eta", eta)?;
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!(
            "rho must be finite and >= 0, got {rho}"
        )));
    }
    if rho == 1.0 {
        return Err(Error::Unsupported(
            "curve position is undefined for logarithmic utility (rho = 1)".into(),
        ));
    }
    if eta == 1.0 {
        return Ok(CurveRelation::Coincides);
    }
    let below = (eta < 1.0 && rho < 1.0) || (eta > 1.0 && rho > 1.0);
    Ok(if below {
        CurveRelation::Below
    } else {
        CurveRelation::Above
    })
}

/// Two-outcome lottery: `low_outcome` with probability `prob_low`, otherwise
/// `high_outcome`, measured against the certain `baseline`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lottery {
    pub low_outcome: f64,
    pub high_outcome: f64,
    pub prob_low: f64,
    pub baseline: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LotteryStats {
    /// Expected gain over the baseline.
    pub expected_gain: f64,
    /// Variance of the outcome.
    pub variance: f64,
    /// Baseline plus expected gain.
    pub implied_wealth: f64,
}

impl Lottery {
    pub fn new(low_outcome: f64, high_outcome: f64, prob_low: f64, baseline: f64) -> Result<Self> {
        if !(low_outcome >= 0.0 && low_outcome.is_finite()) {
            return Err(Error::Domain(format!(
                "low outcome must be >= 0, got {low_outcome}"
            )));
        }
        if !high_outcome.is_finite() || !baseline.is_finite() {
            return Err(Error::Domain("lottery outcomes must be finite".into()));
        }
        if !(0.0..=1.0).contains(&prob_low) {
            return Err(Error::Domain(format!(
                "probability must lie in [0, 1], got {prob_low}"
            )));
        }
        Ok(Self {
            low_outcome,
            high_outcome,
            prob_low,
            baseline,
        })
    }

    pub fn stats(&self) -> LotteryStats {
        lottery_stats(self)
    }
}

pub fn lottery_stats(lottery: &Lottery) -> LotteryStats {
    let t = lottery.prob_low;
    let mean = t * lottery.low_outcome + (1.0 - t) * lottery.high_outcome;
    let spread = lottery.high_outcome - lottery.low_outcome;
    let expected_gain = mean - lottery.baseline;
    LotteryStats {
        expected_gain,
        variance: t * (1.0 - t) * spread * spread,
        implied_wealth: lottery.baseline + expected_gain,
    }
}
