//! Consumption-based asset pricing with sufficiency factors.
//!
//! * [`utility`]: CRRA utility and its derivatives.
//! * [`risk_behavior`]: investor classification, certainty equivalents and
//!   risk premia, and the expansion formulas for risk aversion.
//! * [`pricing`]: lognormal equilibrium price-dividend ratio and returns.
//! * [`calibration`]: the three moment conditions, their solution manifold
//!   and a minimum-norm Gauss-Newton solver.
//! * [`montecarlo`]: seeded simulation cross-checks of the closed forms.
//! * [`io`]: statistics files and reports.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod error;
pub mod io;
pub mod montecarlo;
pub mod pricing;
pub mod risk_behavior;
pub mod utility;

pub use error::{Error, Result};
