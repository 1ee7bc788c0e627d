use thiserror::Error;

/// Errors raised by the pricing, premium and calibration routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A target utility cannot be reached by the curve.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// An input configuration makes the requested quantity undefined.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A Taylor expansion was requested at zero expected gain.
    #[error("singular expansion: expected gain must be non-zero")]
    SingularExpansion,

    /// The operation is not defined for this parameter (e.g. logarithmic utility).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The price-dividend geometric sum diverges.
    #[error("no equilibrium: beta * zeta * E[x^(1-rho)] = {product} >= 1")]
    NoEquilibrium { product: f64 },

    /// The calibration solver ran out of iterations.
    #[error(
        "solver did not converge after {iterations} iterations \
         (last iterate zeta={zeta}, xi={xi}, rho={rho}, sse={sse})"
    )]
    NonConvergence {
        iterations: usize,
        zeta: f64,
        xi: f64,
        rho: f64,
        sse: f64,
    },

    /// A statistics file could not be parsed.
    #[error("parse error{}: {message}", location(*line, field.as_deref()))]
    Parse {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },
}

fn location(line: Option<usize>, field: Option<&str>) -> String {
    match (line, field) {
        (Some(l), Some(f)) => format!(" at line {l}, field `{f}`"),
        (Some(l), None) => format!(" at line {l}"),
        (None, Some(f)) => format!(" in field `{f}`"),
        (None, None) => String::new(),
    }
}

impl Error {
    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Domain(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}
