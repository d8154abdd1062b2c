use thiserror::Error;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole at s = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature tolerance not met: estimate {estimate:e}, error bound {error:e}")]
    ToleranceNotMet { estimate: f64, error: f64 },
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("delta = {delta} is on the wrong side of the edge at delta* = {delta_star}")]
    WrongSide { delta: f64, delta_star: f64 },
    #[error("off-critical Newton solve collapsed onto the critical line at delta = {delta}, rho_y = {rho_y}")]
    ConvergedToCritical { delta: f64, rho_y: f64 },
    #[error("edge solve did not reach a simple fold: {0}")]
    NotAnEdge(String),
    #[error("continuation step fell below {min_step:e} at delta = {delta}, rho_y = {rho_y}")]
    StepCollapse { min_step: f64, delta: f64, rho_y: f64 },
    #[error("off-critical trace left (1e-3, 1) at delta = {delta} without reaching an edge")]
    Runaway { delta: f64 },
    #[error("lattice sum diverges for re(s) = {0} <= 1")]
    Divergence(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
