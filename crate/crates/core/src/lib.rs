//! Pointing-loss analysis for deep-space optical links.
//!
//! The crate covers the chain from a pointing error model to a link budget:
//!
//! - [`pointing`]: angular-error laws and antenna loss patterns.
//! - [`outage`]: deterministic margins, outage probability and the margin
//!   that meets an outage target.
//! - [`gain_opt`]: the antenna gain that maximizes the effective system gain.
//! - [`signaling`]: SCPPM data rate, peak power, slot statistics and the
//!   required-flux registry.
//! - [`budget`]: the optical link equation, budget reports and the maximum
//!   achievable range.

// Quadrature nodes and series coefficients are kept at their published digits.
#![allow(clippy::excessive_precision)]

pub mod budget;
pub mod error;
pub mod gain_opt;
pub mod outage;
pub mod pointing;
pub mod quad;
pub mod signaling;
pub mod special;
pub mod units;

pub use budget::{AntennaSpec, BudgetReport, LinkScenario, Precision};
pub use error::{Error, ErrorKind, Result};
pub use gain_opt::{GainApproach, GainOptProblem, GainOptimum};
pub use outage::{LinkEndPointing, OutageSpec, PointingApproach, PointingMargin};
pub use pointing::{AngularErrorModel, PointingLossModel};
pub use signaling::{ChannelFlux, CodeRate, RequiredFluxRegistry, ScppmConfig};
pub use special::bessel_j1;
