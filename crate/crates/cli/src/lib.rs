//! Command implementations behind the `ccapm` binary.
//!
//! Every command returns a [`Report`]; `main` decides whether to print it as
//! a text table or JSON and maps failures to exit codes.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use ccapm_core::calibration::{
    self, baseline_puzzle_rho, build_system, consistency_defect, jacobian_rank, manifold_point,
    manifold_samples, residuals, CalibrationSystem, EconomyStatistics, SolveOptions,
    PUBLISHED_POINT,
};
use ccapm_core::io::{parse_stats, Report, Table};
use ccapm_core::montecarlo::{simulate, SimulationConfig};
use ccapm_core::pricing::{solve_pricing, GrowthDistribution, SufficiencyFactors};
use ccapm_core::risk_behavior::{
    classify_investor, curve_relation, exact_risk_premium, first_order_risk_premium,
    paper_premium_eq27, CurvatureReading, Preferences, DEFAULT_NEUTRAL_TOL,
};
use ccapm_core::utility::UtilityCurve;
use ccapm_core::Error;

/// Exit code for malformed input.
pub const EXIT_INPUT: i32 = 1;
/// Exit code for numerical failure (no equilibrium, solver divergence, ...).
pub const EXIT_NUMERICAL: i32 = 2;

/// Rho values at which the manifold check table is always evaluated.
pub const MANIFOLD_CHECK_RHOS: [f64; 5] = [0.0, 1.0, PUBLISHED_POINT.2, 10.0, 47.6];

const PUBLISHED_MU: f64 = 0.017215;
const PUBLISHED_SIGMA2: f64 = 0.001250;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() {
            EXIT_INPUT
        } else {
            EXIT_NUMERICAL
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ccapm",
    version,
    about = "Sufficiency-factor consumption CAPM toolkit"
)]
pub struct Cli {
    /// Emit the report as JSON instead of a text table.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for (zeta, xi, rho) from economy statistics and describe the solution manifold.
    Calibrate(CalibrateArgs),
    /// Equilibrium price-dividend ratio and expected returns.
    Price(PriceArgs),
    /// Risk premium of an uncertain wealth target.
    Premium(PremiumArgs),
    /// Classify an investor as risk-averse, risk-loving or risk-neutral.
    Classify(ClassifyArgs),
    /// Monte Carlo cross-check of the closed-form prices.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Statistics file (key = value lines or a JSON object).
    #[arg(required_unless_present = "printed_constants")]
    pub stats: Option<PathBuf>,
    /// Override the discount factor from the file.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Use the six-decimal coefficients as printed instead of deriving them.
    #[arg(long)]
    pub printed_constants: bool,
    /// Initial guess as zeta,xi,rho.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [1.0, 1.0, 2.0])]
    pub guess: Vec<f64>,
    /// Number of manifold points to tabulate.
    #[arg(long, default_value_t = 11)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.0)]
    pub rho_min: f64,
    #[arg(long, default_value_t = 50.0)]
    pub rho_max: f64,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct GrowthArgs {
    /// Mean of log consumption growth.
    #[arg(long, default_value_t = PUBLISHED_MU, allow_negative_numbers = true)]
    pub mu: f64,
    /// Variance of log consumption growth.
    #[arg(long, default_value_t = PUBLISHED_SIGMA2)]
    pub sigma2: f64,
}

impl GrowthArgs {
    fn distribution(&self) -> Result<GrowthDistribution, CliError> {
        Ok(GrowthDistribution::lognormal(self.mu, self.sigma2)?)
    }
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[arg(long, default_value_t = calibration::DEFAULT_BETA)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub zeta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    #[arg(long)]
    pub rho: f64,
    #[command(flatten)]
    pub growth: GrowthArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PremiumMethodArg {
    Exact,
    FirstOrder,
    CurvatureWeighted,
    All,
}

#[derive(Debug, Args)]
pub struct PremiumArgs {
    #[arg(long)]
    pub rho: f64,
    /// Certain wealth.
    #[arg(long)]
    pub w_s: f64,
    /// Uncertain wealth target.
    #[arg(long)]
    pub w_ns: f64,
    #[arg(long, default_value_t = calibration::DEFAULT_BETA)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, value_enum, default_value_t = PremiumMethodArg::All)]
    pub method: PremiumMethodArg,
    /// Read the curvature-weighted coefficient as rho literally.
    #[arg(long)]
    pub literal: bool,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub rho: f64,
    /// Certain wealth now.
    #[arg(long)]
    pub w_t: f64,
    /// Guess of uncertain future wealth.
    #[arg(long = "w-future")]
    pub w_future: f64,
    #[arg(long, default_value_t = calibration::DEFAULT_BETA)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = DEFAULT_NEUTRAL_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub periods: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = calibration::DEFAULT_BETA)]
    pub beta: f64,
    #[arg(long, default_value_t = PUBLISHED_POINT.0)]
    pub zeta: f64,
    #[arg(long, default_value_t = PUBLISHED_POINT.1)]
    pub xi: f64,
    #[arg(long, default_value_t = PUBLISHED_POINT.2)]
    pub rho: f64,
    #[command(flatten)]
    pub growth: GrowthArgs,
}

pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Price(a) => cmd_price(a),
        Command::Premium(a) => cmd_premium(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

pub fn load_stats(path: &Path) -> Result<(EconomyStatistics, Vec<String>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let parsed = parse_stats(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    Ok((parsed.stats.into(), parsed.warnings))
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn cmd_calibrate(args: &CalibrateArgs) -> Result<Report, CliError> {
    let mut report = Report::new("calibrate");
    let printed = CalibrationSystem::printed_constants();

    let system = if args.printed_constants {
        report.input("mode", "printed-constants");
        if args.beta.is_some() {
            report.warnings.push(
                "--beta is ignored with --printed-constants (coefficients embed beta = 0.99)"
                    .into(),
            );
        }
        printed
    } else {
        let path = args
            .stats
            .as_deref()
            .ok_or_else(|| input_error("a statistics file is required"))?;
        let (mut stats, warnings) = load_stats(path)?;
        report.warnings.extend(warnings);
        if let Some(beta) = args.beta {
            stats.beta = beta;
        }
        report
            .input("mode", "derived")
            .input("stats_file", path.display().to_string())
            .input("mean_equity_return", stats.mean_equity_return)
            .input("mean_risk_free_rate", stats.mean_risk_free)
            .input("mean_consumption_growth", stats.mean_growth)
            .input("sd_consumption_growth", stats.sd_growth)
            .input("beta", stats.beta);
        build_system(&stats)?
    };

    let guess = match args.guess.as_slice() {
        [z, x, r] => (*z, *x, *r),
        _ => {
            return Err(input_error(
                "--guess takes exactly three values: zeta,xi,rho",
            ))
        }
    };
    report
        .input("guess_zeta", guess.0)
        .input("guess_xi", guess.1)
        .input("guess_rho", guess.2);

    let result = calibration::solve(&system, guess, &SolveOptions::default())?;
    report
        .output("zeta", result.zeta)
        .output("xi", result.xi)
        .output("rho", result.rho)
        .output("sse", result.sse)
        .output("iterations", result.iterations)
        .output("r1", result.residuals[0])
        .output("r2", result.residuals[1])
        .output("r3", result.residuals[2]);

    let rank = jacobian_rank(&system, (result.zeta, result.xi, result.rho), 1e-8)?;
    let [r_p1, r_p2, r_p3] = residuals(
        &system,
        PUBLISHED_POINT.0,
        PUBLISHED_POINT.1,
        PUBLISHED_POINT.2,
    )?;
    let printed_res = residuals(
        &printed,
        PUBLISHED_POINT.0,
        PUBLISHED_POINT.1,
        PUBLISHED_POINT.2,
    )?;
    report
        .diagnostic("mu", system.mu)
        .diagnostic("sigma2", system.sigma2)
        .diagnostic("rhs1", system.rhs1)
        .diagnostic("rhs2", system.rhs2)
        .diagnostic("rhs3", system.rhs3)
        .diagnostic("consistency_defect", consistency_defect(&system))
        .diagnostic("printed_consistency_defect", consistency_defect(&printed))
        .diagnostic("jacobian_rank", rank.rank)
        .diagnostic("singular_value_1", rank.singular_values[0])
        .diagnostic("singular_value_2", rank.singular_values[1])
        .diagnostic("singular_value_3", rank.singular_values[2])
        .diagnostic("singular_value_ratio", rank.condition_ratio())
        .diagnostic("rank_deficient", result.rank_deficient)
        .diagnostic("baseline_puzzle_rho", baseline_puzzle_rho(&system)?)
        .diagnostic("published_point_r1", r_p1)
        .diagnostic("published_point_r2", r_p2)
        .diagnostic("published_point_r3", r_p3)
        .diagnostic("published_point_max_residual", max_abs(&[r_p1, r_p2, r_p3]))
        .diagnostic("published_point_max_residual_printed", max_abs(&printed_res))
        .diagnostic(
            "identification",
            "rho is not identified: every manifold point solves the system; the returned rho depends on the guess",
        );

    let check_rows = MANIFOLD_CHECK_RHOS
        .iter()
        .map(|&rho| manifold_row(&system, rho))
        .collect::<Result<Vec<_>, _>>()?;
    report.tables.push(Table {
        title: "manifold checks".into(),
        columns: vec!["rho".into(), "zeta".into(), "xi".into(), "r3".into()],
        rows: check_rows,
    });
    let sample_rows = manifold_samples(&system, args.rho_min, args.rho_max, args.samples)
        .iter()
        .map(|p| manifold_row(&system, p.rho))
        .collect::<Result<Vec<_>, _>>()?;
    report.tables.push(Table {
        title: "manifold".into(),
        columns: vec!["rho".into(), "zeta".into(), "xi".into(), "r3".into()],
        rows: sample_rows,
    });
    Ok(report)
}

fn manifold_row(system: &CalibrationSystem, rho: f64) -> Result<Vec<f64>, CliError> {
    let (zeta, xi) = manifold_point(system, rho);
    let r = residuals(system, zeta, xi, rho)?;
    Ok(vec![rho, zeta, xi, r[2]])
}

pub fn cmd_price(args: &PriceArgs) -> Result<Report, CliError> {
    let dist = args.growth.distribution()?;
    let factors = SufficiencyFactors::new(args.zeta, args.xi)?;
    let mut report = Report::new("price");
    report
        .input("beta", args.beta)
        .input("zeta", args.zeta)
        .input("xi", args.xi)
        .input("rho", args.rho)
        .input("mu", args.growth.mu)
        .input("sigma2", args.growth.sigma2);
    let sol = solve_pricing(args.beta, &factors, args.rho, &dist)?;
    report
        .output("price_dividend_ratio", sol.v)
        .output("expected_equity_return", sol.expected_equity_return)
        .output("risk_free_rate", sol.risk_free_rate)
        .output("log_premium", sol.log_premium)
        .output(
            "equity_premium",
            sol.expected_equity_return - sol.risk_free_rate,
        );
    Ok(report)
}

pub fn cmd_premium(args: &PremiumArgs) -> Result<Report, CliError> {
    let curve = UtilityCurve::new(args.rho)?;
    let prefs = Preferences::new(args.beta, args.eta)?;
    let mut report = Report::new("premium");
    report
        .input("rho", args.rho)
        .input("w_s", args.w_s)
        .input("w_ns", args.w_ns)
        .input("beta", args.beta)
        .input("eta", args.eta);

    let want = |m: PremiumMethodArg| args.method == m || args.method == PremiumMethodArg::All;
    let u_ws = curve.value(args.w_s)?;
    let slope = curve.deriv1(args.w_s)?;
    let u_wns = curve.value(args.w_ns)?;

    let exact = if want(PremiumMethodArg::Exact) {
        let r = exact_risk_premium(&curve, args.w_s, args.w_ns, &prefs)?;
        report
            .output("exact_premium", r.premium)
            .output("certainty_equivalent", r.certainty_equivalent);
        Some(r.premium)
    } else {
        None
    };
    let first = if want(PremiumMethodArg::FirstOrder) {
        let r = first_order_risk_premium(args.w_s, u_ws, slope, u_wns, &prefs)?;
        report.output("first_order_premium", r.premium);
        Some(r.premium)
    } else {
        None
    };
    if want(PremiumMethodArg::CurvatureWeighted) {
        let reading = if args.literal {
            CurvatureReading::Literal
        } else {
            CurvatureReading::AbsoluteRiskAversion
        };
        let r = paper_premium_eq27(&curve, args.w_s, u_wns, &prefs, reading)?;
        report
            .output("curvature_weighted_premium", r.premium)
            .diagnostic(
                "curvature_reading",
                if args.literal {
                    "literal-rho"
                } else {
                    "absolute"
                },
            );
    }
    if let (Some(e), Some(f)) = (exact, first) {
        report.diagnostic("first_order_minus_exact", f - e);
    }
    Ok(report)
}

pub fn cmd_classify(args: &ClassifyArgs) -> Result<Report, CliError> {
    let curve = UtilityCurve::new(args.rho)?;
    let prefs = Preferences::new(args.beta, args.eta)?;
    let mut report = Report::new("classify");
    report
        .input("rho", args.rho)
        .input("w_t", args.w_t)
        .input("w_future", args.w_future)
        .input("beta", args.beta)
        .input("eta", args.eta)
        .input("tol", args.tol);
    let class = classify_investor(&curve, args.w_t, args.w_future, &prefs, args.tol)?;
    let certain = curve.value(args.w_t)?;
    let weighted = prefs.weight() * curve.value(args.w_future)?;
    report
        .output("class", class.to_string())
        .output("certain_utility", certain)
        .output("weighted_uncertain_utility", weighted)
        .output("utility_gap", certain - weighted);
    match curve_relation(args.eta, args.rho) {
        Ok(rel) => {
            report.diagnostic("curve_relation", format!("{rel:?}"));
        }
        Err(Error::Unsupported(msg)) => {
            report.diagnostic("curve_relation", msg);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(report)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Report, CliError> {
    let config = SimulationConfig {
        num_periods: args.periods,
        seed: args.seed,
        beta: args.beta,
        zeta: args.zeta,
        xi: args.xi,
        rho: args.rho,
        dist: args.growth.distribution()?,
    };
    let sim = simulate(&config)?;
    let mut report = Report::new("simulate");
    report.seed = Some(args.seed);
    report
        .input("periods", args.periods)
        .input("beta", args.beta)
        .input("zeta", args.zeta)
        .input("xi", args.xi)
        .input("rho", args.rho)
        .input("mu", args.growth.mu)
        .input("sigma2", args.growth.sigma2)
        .input("generator", sim.generator.clone());
    let cf = sim.closed_form;
    report
        .output("mean_equity_return", sim.equity_return.mean)
        .output("mean_equity_return_se", sim.equity_return.std_error)
        .output("euler_relative_residual", sim.euler_residual.mean)
        .output("euler_relative_residual_se", sim.euler_residual.std_error)
        .output("risk_free_residual", sim.risk_free_residual.mean)
        .output("risk_free_residual_se", sim.risk_free_residual.std_error)
        .diagnostic("closed_form_price_dividend_ratio", cf.price_dividend_ratio)
        .diagnostic(
            "closed_form_expected_equity_return",
            cf.expected_equity_return,
        )
        .diagnostic("closed_form_risk_free_rate", cf.risk_free_rate)
        .diagnostic(
            "equity_return_z",
            sim.equity_return.z_score(cf.expected_equity_return),
        )
        .diagnostic("euler_residual_z", sim.euler_residual.z_score(0.0));
    Ok(report)
}
