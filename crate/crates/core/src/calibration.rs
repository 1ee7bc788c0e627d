//! Calibration of `(zeta, xi, rho)` to mean equity return, mean risk-free
//! rate and the moments of consumption growth.
//!
//! The three moment conditions are
//!
//! ```text
//! r1 = -ln zeta - mu (1-rho) - sigma2 (1-rho)^2 / 2 - rhs1
//! r2 = -ln xi   + mu rho     - sigma2 rho^2 / 2     - rhs2
//! r3 =  ln xi - ln zeta + sigma2 rho                - rhs3
//! ```
//!
//! The third row of the Jacobian is always the first minus the second, so the
//! system has rank two. When the right-hand sides are consistent every `rho`
//! has a matching `(zeta, xi)` that zeroes all three residuals; that curve is
//! the solution manifold. The solver therefore returns *a* point on the
//! manifold, whichever one the minimum-norm Gauss-Newton path from the
//! initial guess reaches.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};
use crate::pricing::log_moments_from_arithmetic;

/// Default subjective discount factor.
pub const DEFAULT_BETA: f64 = 0.99;

/// Reference point `(zeta, xi, rho)` reported for the 1889-1978 U.S. data.
pub const PUBLISHED_POINT: (f64, f64, f64) = (0.961745, 1.019392, 1.033526);

/// Sample moments of the economy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EconomyStatistics {
    pub mean_equity_return: f64,
    pub mean_risk_free: f64,
    pub mean_growth: f64,
    pub sd_growth: f64,
    pub beta: f64,
}

impl EconomyStatistics {
    /// U.S. economy 1889-1978 with `beta = 0.99`.
    pub fn table1() -> Self {
        Self {
            mean_equity_return: 1.0698,
            mean_risk_free: 1.008,
            mean_growth: 1.018,
            sd_growth: 0.036,
            beta: DEFAULT_BETA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("mean_equity_return", self.mean_equity_return)?;
        require_positive("mean_risk_free", self.mean_risk_free)?;
        require_positive("mean_growth", self.mean_growth)?;
        if !(self.sd_growth >= 0.0 && self.sd_growth.is_finite()) {
            return Err(Error::Domain(format!(
                "sd_growth must be >= 0, got {}",
                self.sd_growth
            )));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::Domain(format!(
                "beta must lie in (0, 1], got {}",
                self.beta
            )));
        }
        Ok(())
    }
}

/// Coefficients of the three moment conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSystem {
    pub mu: f64,
    pub sigma2: f64,
    pub rhs1: f64,
    pub rhs2: f64,
    pub rhs3: f64,
}

impl CalibrationSystem {
    /// The coefficients as printed to six decimals for the Table 1 economy.
    pub fn printed_constants() -> Self {
        Self {
            mu: 0.017215,
            sigma2: 0.001250,
            rhs1: 0.039582,
            rhs2: -0.002082,
            rhs3: 0.059504,
        }
    }
}

/// Derive the coefficients from sample statistics.
///
/// `rhs1 = ln E(R_e) - ln E(x) + ln beta`, `rhs2 = ln R_f + ln beta`,
/// `rhs3 = ln E(R_e) - ln R_f`.
pub fn build_system(stats: &EconomyStatistics) -> Result<CalibrationSystem> {
    stats.validate()?;
    let (mu, sigma2) = log_moments_from_arithmetic(stats.mean_growth, stats.sd_growth)?;
    let ln_re = stats.mean_equity_return.ln();
    let ln_rf = stats.mean_risk_free.ln();
    let ln_beta = stats.beta.ln();
    Ok(CalibrationSystem {
        mu,
        sigma2,
        rhs1: ln_re - stats.mean_growth.ln() + ln_beta,
        rhs2: ln_rf + ln_beta,
        rhs3: ln_re - ln_rf,
    })
}

pub fn residuals(system: &CalibrationSystem, zeta: f64, xi: f64, rho: f64) -> Result<[f64; 3]> {
    require_positive("zeta", zeta)?;
    require_positive("xi", xi)?;
    let r = system.residuals_log(&Vector3::new(zeta.ln(), xi.ln(), rho));
    Ok([r[0], r[1], r[2]])
}

/// Sufficiency factors that zero the first two residuals at `rho`.
pub fn manifold_point(system: &CalibrationSystem, rho: f64) -> (f64, f64) {
    let CalibrationSystem {
        mu,
        sigma2,
        rhs1,
        rhs2,
        ..
    } = *system;
    let k = 1.0 - rho;
    let ln_zeta = -rhs1 - mu * k - 0.5 * sigma2 * k * k;
    let ln_xi = mu * rho - 0.5 * sigma2 * rho * rho - rhs2;
    (ln_zeta.exp(), ln_xi.exp())
}

/// `rhs3 - (rhs1 - rhs2 + mu + sigma2/2)`.
///
/// Zero when the right-hand sides respect the linear dependency between the
/// three equations. On the manifold the third residual equals the negated
/// defect at every `rho`.
pub fn consistency_defect(system: &CalibrationSystem) -> f64 {
    system.rhs3 - (system.rhs1 - system.rhs2 + system.mu + 0.5 * system.sigma2)
}

/// Risk aversion needed without sufficiency factors (`zeta = xi = 1`):
/// `rho = rhs3 / sigma2`.
pub fn baseline_puzzle_rho(system: &CalibrationSystem) -> Result<f64> {
    if !(system.sigma2 > 0.0) {
        return Err(Error::Domain(format!(
            "growth log-variance must be positive, got {}",
            system.sigma2
        )));
    }
    Ok(system.rhs3 / system.sigma2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldPoint {
    pub rho: f64,
    pub zeta: f64,
    pub xi: f64,
}

/// `count` manifold points evenly spaced over `[rho_min, rho_max]`.
pub fn manifold_samples(
    system: &CalibrationSystem,
    rho_min: f64,
    rho_max: f64,
    count: usize,
) -> Vec<ManifoldPoint> {
    let step = if count > 1 {
        (rho_max - rho_min) / (count - 1) as f64
    } else {
        0.0
    };
    (0..count)
        .map(|i| {
            let rho = rho_min + step * i as f64;
            let (zeta, xi) = manifold_point(system, rho);
            ManifoldPoint { rho, zeta, xi }
        })
        .collect()
}

/// Three residuals in the coordinates `(ln zeta, ln xi, rho)`.
pub trait ResidualSystem {
    fn residuals_log(&self, x: &Vector3<f64>) -> Vector3<f64>;
    fn jacobian_log(&self, x: &Vector3<f64>) -> Matrix3<f64>;
}

impl ResidualSystem for CalibrationSystem {
    fn residuals_log(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let (ln_zeta, ln_xi, rho) = (x[0], x[1], x[2]);
        let k = 1.0 - rho;
        Vector3::new(
            -ln_zeta - self.mu * k - 0.5 * self.sigma2 * k * k - self.rhs1,
            -ln_xi + self.mu * rho - 0.5 * self.sigma2 * rho * rho - self.rhs2,
            ln_xi - ln_zeta + self.sigma2 * rho - self.rhs3,
        )
    }

    fn jacobian_log(&self, x: &Vector3<f64>) -> Matrix3<f64> {
        let rho = x[2];
        Matrix3::new(
            -1.0,
            0.0,
            self.mu + self.sigma2 * (1.0 - rho),
            0.0,
            -1.0,
            self.mu - self.sigma2 * rho,
            -1.0,
            1.0,
            self.sigma2,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDiagnosis {
    /// Singular values in descending order.
    pub singular_values: [f64; 3],
    pub rank: usize,
}

impl RankDiagnosis {
    /// Smallest over largest singular value.
    pub fn condition_ratio(&self) -> f64 {
        if self.singular_values[0] == 0.0 {
            0.0
        } else {
            self.singular_values[2] / self.singular_values[0]
        }
    }
}

/// Singular values of the log-coordinate Jacobian at `(zeta, xi, rho)` and
/// the number above `tol` times the largest.
pub fn jacobian_rank<S: ResidualSystem>(
    system: &S,
    point: (f64, f64, f64),
    tol: f64,
) -> Result<RankDiagnosis> {
    require_positive("zeta", point.0)?;
    require_positive("xi", point.1)?;
    let x = Vector3::new(point.0.ln(), point.1.ln(), point.2);
    Ok(rank_at(system, &x, tol))
}

fn rank_at<S: ResidualSystem>(system: &S, x: &Vector3<f64>, tol: f64) -> RankDiagnosis {
    let mut sv: Vec<f64> = system
        .jacobian_log(x)
        .singular_values()
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let cutoff = tol * sv[0];
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    RankDiagnosis {
        singular_values: [sv[0], sv[1], sv[2]],
        rank,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Stop when the step is shorter than `step_tol * (1 + |x|)`.
    pub step_tol: f64,
    /// Initial step fraction; halved until the sum of squares decreases.
    pub damping: f64,
    /// Singular values below `pinv_tol` times the largest are treated as zero.
    pub pinv_tol: f64,
    /// Stop once the sum of squared residuals falls below this.
    pub sse_tol: f64,
    /// Relative threshold for the reported numerical rank.
    pub rank_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            step_tol: 1e-15,
            damping: 1.0,
            pinv_tol: 1e-10,
            sse_tol: 1e-28,
            rank_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub zeta: f64,
    pub xi: f64,
    pub rho: f64,
    pub residuals: [f64; 3],
    pub sse: f64,
    pub iterations: usize,
    pub rank_deficient: bool,
    pub consistency_defect: f64,
    pub singular_values: [f64; 3],
}

/// Outcome of the generic least-squares iteration, in log coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresOutcome {
    pub x: Vector3<f64>,
    pub residuals: Vector3<f64>,
    pub sse: f64,
    pub iterations: usize,
    pub rank: RankDiagnosis,
}

/// Damped Gauss-Newton with a minimum-norm (pseudo-inverse) step.
///
/// Converges when the sum of squares drops below `sse_tol`, or when the
/// step becomes negligible (a least-squares stationary point).
pub fn gauss_newton<S: ResidualSystem>(
    system: &S,
    x0: Vector3<f64>,
    options: &SolveOptions,
) -> Result<LeastSquaresOutcome> {
    let sse_of = |r: &Vector3<f64>| r.norm_squared();
    let mut x = x0;
    let mut r = system.residuals_log(&x);
    let mut sse = sse_of(&r);
    if !sse.is_finite() {
        return Err(Error::Domain(
            "residuals are not finite at the initial guess".into(),
        ));
    }

    for iter in 0..=options.max_iter {
        if sse <= options.sse_tol {
            return Ok(finish(system, x, r, sse, iter, options));
        }
        if iter == options.max_iter {
            break;
        }
        let jac = system.jacobian_log(&x);
        let svd = jac.svd(true, true);
        let largest = svd.singular_values.max();
        let step = svd
            .solve(&(-r), options.pinv_tol * largest)
            .map_err(|e| Error::Degenerate(format!("pseudo-inverse failed: {e}")))?;

        let mut scale = options.damping;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = x + step * scale;
            let rt = system.residuals_log(&trial);
            let st = sse_of(&rt);
            if st.is_finite() && st <= sse {
                accepted = Some((trial, rt, st));
                break;
            }
            scale *= 0.5;
        }
        let Some((trial, rt, st)) = accepted else {
            // no descent along the Gauss-Newton direction: stationary
            return Ok(finish(system, x, r, sse, iter, options));
        };
        let moved = (trial - x).norm();
        x = trial;
        r = rt;
        sse = st;
        if moved <= options.step_tol * (1.0 + x.norm()) {
            return Ok(finish(system, x, r, sse, iter + 1, options));
        }
    }

    Err(Error::NonConvergence {
        iterations: options.max_iter,
        zeta: x[0].exp(),
        xi: x[1].exp(),
        rho: x[2],
        sse,
    })
}

fn finish<S: ResidualSystem>(
    system: &S,
    x: Vector3<f64>,
    residuals: Vector3<f64>,
    sse: f64,
    iterations: usize,
    options: &SolveOptions,
) -> LeastSquaresOutcome {
    let rank = rank_at(system, &x, options.rank_tol);
    LeastSquaresOutcome {
        x,
        residuals,
        sse,
        iterations,
        rank,
    }
}

/// Solve the calibration system from `initial_guess = (zeta, xi, rho)`.
///
/// The returned `rho` depends on the guess; see the module docs.
pub fn solve(
    system: &CalibrationSystem,
    initial_guess: (f64, f64, f64),
    options: &SolveOptions,
) -> Result<CalibrationResult> {
    let (zeta0, xi0, rho0) = initial_guess;
    require_positive("initial zeta", zeta0)?;
    require_positive("initial xi", xi0)?;
    if !rho0.is_finite() {
        return Err(Error::Domain(format!(
            "initial rho must be finite, got {rho0}"
        )));
    }
    let out = gauss_newton(system, Vector3::new(zeta0.ln(), xi0.ln(), rho0), options)?;
    Ok(CalibrationResult {
        zeta: out.x[0].exp(),
        xi: out.x[1].exp(),
        rho: out.x[2],
        residuals: [out.residuals[0], out.residuals[1], out.residuals[2]],
        sse: out.sse,
        iterations: out.iterations,
        rank_deficient: out.rank.rank < 3,
        consistency_defect: consistency_defect(system),
        singular_values: out.rank.singular_values,
    })
}
