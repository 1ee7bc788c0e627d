//! Equilibrium asset prices in an exchange economy with i.i.d. lognormal
//! consumption growth and sufficiency-adjusted CRRA investors.
//!
//! With consumption equal to dividends the equity price is a constant
//! multiple `v` of the current dividend. Equity investors discount with
//! `beta * zeta`, risk-free investors with `beta * xi`. All expectations are
//! closed-form lognormal moments.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// Log-moments of consumption growth `x` and dividend growth `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthDistribution {
    pub mu_x: f64,
    pub sigma2_x: f64,
    pub sigma_xz: f64,
    pub mu_z: f64,
    pub sigma2_z: f64,
}

impl GrowthDistribution {
    /// Equilibrium distribution where dividend growth equals consumption growth.
    pub fn lognormal(mu: f64, sigma2: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Domain(format!("log-mean must be finite, got {mu}")));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(Error::Domain(format!(
                "log-variance must be >= 0, got {sigma2}"
            )));
        }
        Ok(Self {
            mu_x: mu,
            sigma2_x: sigma2,
            sigma_xz: sigma2,
            mu_z: mu,
            sigma2_z: sigma2,
        })
    }

    /// Match the arithmetic mean and standard deviation of gross growth.
    pub fn from_arithmetic(mean: f64, sd: f64) -> Result<Self> {
        let (mu, sigma2) = log_moments_from_arithmetic(mean, sd)?;
        Self::lognormal(mu, sigma2)
    }

    /// `E[x^a]`
    pub fn power_moment(&self, a: f64) -> f64 {
        lognormal_power_moment(self.mu_x, self.sigma2_x, a)
    }

    /// `E[x]`
    pub fn mean(&self) -> f64 {
        self.power_moment(1.0)
    }
}

/// Exact lognormal moment matching from arithmetic moments of gross growth:
/// `sigma2 = ln(1 + (sd/mean)^2)`, `mu = ln(mean) - sigma2/2`.
pub fn log_moments_from_arithmetic(mean: f64, sd: f64) -> Result<(f64, f64)> {
    require_positive("mean growth", mean)?;
    if !(sd >= 0.0 && sd.is_finite()) {
        return Err(Error::Domain(format!(
            "standard deviation must be >= 0, got {sd}"
        )));
    }
    let cv = sd / mean;
    let sigma2 = (cv * cv).ln_1p();
    Ok((mean.ln() - 0.5 * sigma2, sigma2))
}

/// `E[x^a] = exp(a mu + a^2 sigma2 / 2)` for `ln x ~ N(mu, sigma2)`.
pub fn lognormal_power_moment(mu: f64, sigma2: f64, a: f64) -> f64 {
    (a * mu + 0.5 * a * a * sigma2).exp()
}

/// Sufficiency factors of equity (`zeta`) and risk-free (`xi`) investors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SufficiencyFactors {
    pub zeta: f64,
    pub xi: f64,
}

impl SufficiencyFactors {
    pub fn new(zeta: f64, xi: f64) -> Result<Self> {
        require_positive("zeta", zeta)?;
        require_positive("xi", xi)?;
        Ok(Self { zeta, xi })
    }

    /// `zeta = xi = 1`: the unmodified model.
    pub fn neutral() -> Self {
        Self { zeta: 1.0, xi: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricingSolution {
    /// Price-dividend ratio.
    pub v: f64,
    pub expected_equity_return: f64,
    pub risk_free_rate: f64,
    /// `ln E(R_e) - ln R_f`
    pub log_premium: f64,
}

/// `beta * zeta * E[x^(1-rho)]`; must be below one for a finite price.
fn discounted_growth(beta: f64, zeta: f64, rho: f64, dist: &GrowthDistribution) -> Result<f64> {
    require_positive("beta", beta)?;
    require_positive("zeta", zeta)?;
    let product = beta * zeta * dist.power_moment(1.0 - rho);
    if !(product < 1.0) {
        return Err(Error::NoEquilibrium { product });
    }
    Ok(product)
}

/// Constant equilibrium price-dividend ratio `v = m / (1 - m)`, `m = beta zeta E[x^(1-rho)]`.
pub fn price_dividend_ratio(
    beta: f64,
    zeta: f64,
    rho: f64,
    dist: &GrowthDistribution,
) -> Result<f64> {
    let m = discounted_growth(beta, zeta, rho, dist)?;
    Ok(m / (1.0 - m))
}

/// `E(R_e) = E[x] / (beta zeta E[x^(1-rho)])`
pub fn expected_equity_return(
    beta: f64,
    zeta: f64,
    rho: f64,
    dist: &GrowthDistribution,
) -> Result<f64> {
    let m = discounted_growth(beta, zeta, rho, dist)?;
    Ok(dist.mean() / m)
}

/// `R_f = 1 / (beta xi E[x^-rho])`
pub fn risk_free_rate(beta: f64, xi: f64, rho: f64, dist: &GrowthDistribution) -> Result<f64> {
    require_positive("beta", beta)?;
    require_positive("xi", xi)?;
    Ok(1.0 / (beta * xi * dist.power_moment(-rho)))
}

/// Log expected returns in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogReturns {
    /// `-ln beta - ln zeta + rho mu_x - rho^2 sigma2_x / 2 + rho sigma_xz`
    pub ln_equity: f64,
    /// `-ln beta - ln xi + rho mu_x - rho^2 sigma2_x / 2`
    pub ln_risk_free: f64,
    /// `ln xi - ln zeta + rho sigma2_x`
    pub log_premium: f64,
}

pub fn log_return_equations(
    beta: f64,
    factors: &SufficiencyFactors,
    rho: f64,
    dist: &GrowthDistribution,
) -> Result<LogReturns> {
    require_positive("beta", beta)?;
    let SufficiencyFactors { zeta, xi } = SufficiencyFactors::new(factors.zeta, factors.xi)?;
    let common = -beta.ln() + rho * dist.mu_x - 0.5 * rho * rho * dist.sigma2_x;
    Ok(LogReturns {
        ln_equity: common - zeta.ln() + rho * dist.sigma_xz,
        ln_risk_free: common - xi.ln(),
        log_premium: xi.ln() - zeta.ln() + rho * dist.sigma2_x,
    })
}

/// Level-form log equity return
/// `ln E[x] - ln beta - ln zeta - (1-rho) mu_x - (1-rho)^2 sigma2_x / 2`.
pub fn ln_expected_equity_return(
    beta: f64,
    zeta: f64,
    rho: f64,
    dist: &GrowthDistribution,
) -> Result<f64> {
    require_positive("beta", beta)?;
    require_positive("zeta", zeta)?;
    let k = 1.0 - rho;
    Ok(dist.mean().ln() - beta.ln() - zeta.ln() - k * dist.mu_x - 0.5 * k * k * dist.sigma2_x)
}

/// Price, returns and premium at one parameter point.
pub fn solve_pricing(
    beta: f64,
    factors: &SufficiencyFactors,
    rho: f64,
    dist: &GrowthDistribution,
) -> Result<PricingSolution> {
    let v = price_dividend_ratio(beta, factors.zeta, rho, dist)?;
    let expected_equity_return = expected_equity_return(beta, factors.zeta, rho, dist)?;
    let risk_free_rate = risk_free_rate(beta, factors.xi, rho, dist)?;
    Ok(PricingSolution {
        v,
        expected_equity_return,
        risk_free_rate,
        log_premium: expected_equity_return.ln() - risk_free_rate.ln(),
    })
}

/// Current equity price and dividend. In equilibrium the representative
/// agent holds the whole share and consumes the dividend, so `c_t = y_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerInputs {
    pub price: f64,
    pub dividend: f64,
}

/// `p_t u'(c_t) - beta eta E[(p_{t+1} + y_{t+1}) u'(c_{t+1})]`.
///
/// Next period's price is the equilibrium `v y_{t+1}` and
/// `c_{t+1} = y_{t+1} = x y_t`, so the expectation reduces to
/// `(v + 1) y_t^(1-rho) E[x^(1-rho)]`.
pub fn euler_residual(
    inputs: &EulerInputs,
    beta: f64,
    eta: f64,
    rho: f64,
    dist: &GrowthDistribution,
) -> Result<f64> {
    require_positive("price", inputs.price)?;
    require_positive("dividend", inputs.dividend)?;
    if !(eta >= 0.0) {
        return Err(Error::Domain(format!("eta must be >= 0, got {eta}")));
    }
    let y = inputs.dividend;
    let lhs = inputs.price * (-rho * y.ln()).exp();
    if eta == 0.0 {
        return Ok(lhs);
    }
    let v = price_dividend_ratio(beta, eta, rho, dist)?;
    let k = 1.0 - rho;
    let rhs = beta * eta * (v + 1.0) * (k * y.ln()).exp() * dist.power_moment(k);
    Ok(lhs - rhs)
}
