//! Recovery of representative-agent models from one-dimensional risk-neutral
//! diffusion markets.
//!
//! Given a market described by coefficient functions `(b, sigma, r, v)` on an
//! open interval together with an initial state `xi`, the library computes the
//! one-parameter family of admissible eigenpairs of the pricing operator
//!
//! ```text
//! L h = (1/2) sigma^2 h'' + k h' - r h,      k = b - sigma v,
//! ```
//!
//! classifies the Feller boundaries of the state process, decides the
//! martingale property of the candidate densities, and assembles the
//! recovered agent (discount rate, marginal-utility transform, utility and
//! objective-measure drift). A Monte Carlo engine provides stochastic
//! cross-checks of the martingale property and of divergence to infinity
//! under the transformed measure.
//!
//! Modules mirror the pipeline stages:
//!
//! - [`exprdsl`]: parsing and evaluation of user-supplied coefficient
//!   expressions,
//! - [`specfun`]: Kummer confluent hypergeometric functions and log-gamma,
//! - [`model`]: market models, derived coefficients and coordinate changes,
//! - [`odesolve`]: eigen-ODE integration, extremal slopes and the critical
//!   eigenvalue,
//! - [`boundary`]: Feller boundary classification,
//! - [`martcrit`]: martingale criterion and the lower endpoint of the
//!   martingale set,
//! - [`usualset`]: usual-condition checks and the upper endpoint,
//! - [`recover`]: admissible sets and agent construction,
//! - [`simulate`]: reproducible Euler-Maruyama Monte Carlo,
//! - [`catalog`]: closed-form reference models used as oracles.

pub mod boundary;
pub mod catalog;
pub mod error;
pub mod exprdsl;
pub mod martcrit;
pub mod model;
pub mod odesolve;
pub mod quad;
pub mod recover;
pub mod simulate;
pub mod specfun;
pub mod usualset;

pub use error::{Error, Result};

/// Numeric tuning knobs shared by the solver pipeline.
///
/// Defaults match the documented behaviour of the command-line tool; all
/// operations take these explicitly so library users can tighten or relax
/// them per call.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Numerics {
    /// Half-width of the working window in solver (chart) coordinates.
    pub truncation_log_halfwidth: f64,
    /// Relative tolerance of the adaptive Runge-Kutta integrator.
    pub ode_rel_tol: f64,
    /// Absolute tolerance of bisections over the eigenvalue.
    pub bisect_tol_lambda: f64,
    /// Absolute tolerance of bisections over the initial slope.
    pub bisect_tol_slope: f64,
    /// Spacing of the geometric truncation depths used by integral verdicts.
    pub depth_delta: f64,
    /// Number of depths probed by integral verdicts.
    pub depth_n_max: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            truncation_log_halfwidth: 20.0,
            ode_rel_tol: 1e-10,
            bisect_tol_lambda: 1e-6,
            bisect_tol_slope: 1e-10,
            depth_delta: 2.0,
            depth_n_max: 10,
        }
    }
}

impl Numerics {
    /// Deepest truncation probed by the integral-verdict machinery.
    pub fn max_depth(&self) -> f64 {
        self.depth_delta * self.depth_n_max as f64
    }

    /// Truncation used when a solution must cover the full depth schedule:
    /// the glued extremal construction pins the solution to zero at the
    /// window edge, so integral probes stay clear of the last few units.
    pub fn padded_truncation(&self) -> f64 {
        self.truncation_log_halfwidth.max(self.max_depth() + 4.0)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            ("truncation_log_halfwidth", self.truncation_log_halfwidth),
            ("ode_rel_tol", self.ode_rel_tol),
            ("bisect_tol_lambda", self.bisect_tol_lambda),
            ("bisect_tol_slope", self.bisect_tol_slope),
            ("depth_delta", self.depth_delta),
        ];
        for (name, value) in all {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::Validation(format!(
                    "numerics.{name} must be strictly positive, got {value}"
                )));
            }
        }
        if self.depth_n_max == 0 {
            return Err(Error::Validation(
                "numerics.depth_schedule.n_max must be at least 1".into(),
            ));
        }
        Ok(())
    }
}
