//! Off-critical zeros: curves seeded at edge zeros and continued in Δ, the
//! real zeros below Δ_c*, and Δ_c* itself.
//!
//! Near an edge, Z(1/2 + δρ_x + iρ_y, Δ* + ε) ≈ aε − c w² + i b ε w − i d w³ with
//! w = δρ_x + i(ρ_y − ρ_y*), so off the critical line
//!   δρ_x² = a ε / c,   ρ_y = ρ_y* + (b − ad/c) ε / (2c).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::critical::solve_edge;
use crate::error::{Error, Result};
use crate::lattice_zeta::z_jet;
use crate::quadrature::{integrate_kernels, HalfPower, Hyp, QuadratureSpec, Trig, WeightSpec};
use crate::roots::brent;
use crate::types::{CurveTrace, EdgeZero, ZeroKind, ZeroRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

/// Leading-order off-critical zero at Δ = Δ* + d_delta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffCriticalSeed {
    pub edge: EdgeZero,
    pub d_delta: f64,
    pub drho_x: f64,
    pub rho_y: f64,
}

impl OffCriticalSeed {
    pub fn delta(&self) -> f64 {
        self.edge.delta_star + self.d_delta
    }
}

/// Sign of Δ − Δ* on which the edge's off-critical curve exists.
pub fn offcritical_direction(e: &EdgeZero) -> f64 {
    (e.a / e.c).signum()
}

pub fn seed_offcritical(e: &EdgeZero, d_delta: f64, branch: Branch) -> Result<OffCriticalSeed> {
    let sq = e.a * d_delta / e.c;
    if sq < 0.0 {
        return Err(Error::WrongSide { delta: e.delta_star + d_delta, delta_star: e.delta_star });
    }
    let magnitude = sq.sqrt();
    let drho_x = match branch {
        Branch::Plus => magnitude,
        Branch::Minus => -magnitude,
    };
    let rho_y = e.rho_y_star + e.linear_coefficient() * d_delta;
    Ok(OffCriticalSeed { edge: *e, d_delta, drho_x, rho_y })
}

/// Complex Newton on Z(s) = 0, s = 1/2 + δρ_x + iρ_y, returning the zero and
/// the iteration count.
fn polish_counted(guess: (f64, f64), delta: f64, q: &QuadratureSpec) -> Result<(ZeroRecord, usize)> {
    const MAX_ITER: usize = 40;
    let (dx, y) = guess;
    let mut s = Complex64::new(0.5 + dx, y);
    let mut prev_norm = f64::INFINITY;
    let mut damping: f64 = 1.0;
    for it in 1..=MAX_ITER {
        let jet = z_jet(s, delta, 1, None, q)?;
        let z = jet.ds[0];
        // Relative residual: |Z| against its natural magnitude at this s.
        let rel = z.norm() / jet.scale;
        if rel > 2.0 * prev_norm && damping > 1e-3 {
            damping *= 0.5;
        } else {
            prev_norm = rel;
            damping = (2.0 * damping).min(1.0);
        }
        let step = z / jet.ds[1] * damping;
        s -= step;
        if !(s.re.is_finite() && s.im.is_finite()) || (s - 1.0).norm() < 1e-3 || s.norm() < 1e-3 {
            return Err(Error::NoConvergence { what: "off-critical Newton", iterations: it });
        }
        if step.norm() <= 1e-13 * s.norm().max(1.0) {
            let dx = s.re - 0.5;
            let z = z_jet(s, delta, 0, None, q)?.ds[0];
            let residual = z.norm();
            if dx.abs() < 1e-12 {
                return Err(Error::ConvergedToCritical { delta, rho_y: s.im });
            }
            if residual * residual > 1e-22 {
                return Err(Error::NoConvergence { what: "off-critical Newton", iterations: it });
            }
            let record = ZeroRecord { delta, rho_x: s.re, rho_y: s.im, kind: ZeroKind::OffCritical, residual };
            return Ok((record, it));
        }
    }
    Err(Error::NoConvergence { what: "off-critical Newton", iterations: MAX_ITER })
}

/// Polishes an off-critical zero from a guess (δρ_x, ρ_y). Guesses outside the
/// critical strip are allowed: Z is entire apart from its poles at s = 0 and
/// s = 1, and off-critical curves do cross re s = 1.
pub fn polish_offcritical(guess: (f64, f64), delta: f64, q: &QuadratureSpec) -> Result<ZeroRecord> {
    let s = Complex64::new(0.5 + guess.0, guess.1);
    if !(s.re.is_finite() && s.im.is_finite()) || s.norm() < 1e-3 || (s - 1.0).norm() < 1e-3 {
        return Err(Error::Domain(format!("guess {} + {}i is not finite or sits on a pole", s.re, s.im)));
    }
    polish_counted(guess, delta, q).map(|(r, _)| r)
}

/// Schedule of the off-critical march in Δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffStepControl {
    /// Fixed step for the first `initial_steps` points.
    pub initial: f64,
    pub initial_steps: usize,
    pub min_adaptive: f64,
    pub max_adaptive: f64,
    /// Smallest step tried while approaching the terminal edge.
    pub min_step: f64,
    pub max_points: usize,
}

impl Default for OffStepControl {
    fn default() -> Self {
        Self { initial: 1e-4, initial_steps: 5, min_adaptive: 1e-3, max_adaptive: 1e-2, min_step: 1e-7, max_points: 10_000 }
    }
}

/// Marches the off-critical curve born at `e` in Δ until it collapses onto the
/// critical line at a partner edge, which is then solved. Points store δρ_x > 0;
/// the conjugate branch is the mirror image.
pub fn trace_offcritical(e: &EdgeZero, q: &QuadratureSpec, ctrl: &OffStepControl) -> Result<CurveTrace> {
    let dir = offcritical_direction(e);
    let first = seed_offcritical(e, dir * ctrl.initial, Branch::Plus)?;
    let (p0, _) = polish_counted((first.drho_x, first.rho_y), first.delta(), q)?;
    let mut points = vec![p0];
    // The predictor extrapolates δρ_x² and ρ_y linearly in Δ; the edge itself
    // anchors the first extrapolation.
    let mut prev = (e.delta_star, 0.0, e.rho_y_star);
    let mut h = ctrl.initial;
    loop {
        if points.len() >= ctrl.max_points {
            return Err(Error::NoConvergence { what: "off-critical trace", iterations: points.len() });
        }
        let last = *points.last().expect("trace has a point");
        let cur = (last.delta, last.drho_x() * last.drho_x(), last.rho_y);
        if !(last.delta > 1e-3 && last.delta < 1.0) {
            return Err(Error::Runaway { delta: last.delta });
        }
        let span = cur.0 - prev.0;
        let slope_sq = (cur.1 - prev.1) / span;
        let slope_y = (cur.2 - prev.2) / span;
        let next_delta = cur.0 + dir * h;
        let sq = cur.1 + slope_sq * dir * h;
        let y = cur.2 + slope_y * dir * h;
        let attempt = if sq > 0.0 { Some(polish_counted((sq.sqrt(), y), next_delta, q)) } else { None };
        match attempt {
            Some(Ok((p, iters))) if (p.rho_y - y).abs() < 0.1 + 10.0 * (y - cur.2).abs() => {
                points.push(p);
                prev = cur;
                if points.len() <= ctrl.initial_steps {
                    h = ctrl.initial;
                } else if h < ctrl.min_adaptive {
                    h = if iters <= 3 { (2.0 * h).min(ctrl.max_adaptive) } else { h };
                } else if iters <= 3 {
                    h = (2.0 * h).min(ctrl.max_adaptive);
                } else if iters >= 8 {
                    h = (0.5 * h).max(ctrl.min_adaptive);
                }
                if points.len() == ctrl.initial_steps {
                    h = ctrl.min_adaptive;
                }
            }
            Some(Err(err)) if !matches!(err, Error::ConvergedToCritical { .. } | Error::NoConvergence { .. } | Error::Domain(_)) => {
                return Err(err);
            }
            _ => {
                h *= 0.5;
                if h < ctrl.min_step {
                    // δρ_x² vanishes linearly at the partner edge: extrapolate its root.
                    let to_edge = if slope_sq * dir < 0.0 { -cur.1 / slope_sq } else { 0.0 };
                    let edge_delta = cur.0 + to_edge;
                    let edge_rho = cur.2 + slope_y * to_edge;
                    let end = solve_edge(edge_delta, edge_rho, q)?;
                    return Ok(CurveTrace {
                        kind: ZeroKind::OffCritical,
                        points,
                        start_edge: Some(*e),
                        end_edge: Some(end),
                        closed: false,
                        turning_points: Vec::new(),
                    });
                }
            }
        }
    }
}

/// Z(1/2 + δρ_x) on the real axis: −2/(1 − 4δρ_x²) + ∫₀¹ t^{−1/2} cosh(δρ_x ln t) K dt.
pub fn real_axis_residual(drho_x: f64, delta: f64, q: &QuadratureSpec) -> Result<f64> {
    let w = WeightSpec::new(HalfPower::MinusHalf, 0, Trig::One, Hyp::Cosh(drho_x))?;
    let i = integrate_kernels(&[w], delta, q)?[0];
    Ok(-2.0 / (1.0 - 4.0 * drho_x * drho_x) + i.value)
}

/// Δ_c*: the anisotropy in (0.1, 0.2) at which −2 + ∫₀¹ t^{−1/2} K dt vanishes.
pub fn find_delta_c(q: &QuadratureSpec) -> Result<f64> {
    let f = |d: f64| real_axis_residual(0.0, d, q);
    let (lo, hi) = (0.1, 0.2);
    brent(f, lo, hi, f(lo)?, f(hi)?, 1e-16, 200)
}

/// The conjugate pair of real zeros (1/2 − δ, 1/2 + δ) of Z(·, Δ), present only
/// for Δ < Δ_c* (or Δ > 1/Δ_c*, mapped to 1/Δ). Returns `None` in the gap.
pub fn real_offcritical(delta: f64, q: &QuadratureSpec) -> Result<Option<(f64, f64)>> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("anisotropy must be positive, got {delta}")));
    }
    let d = delta.min(1.0 / delta);
    let f = |x: f64| real_axis_residual(x, d, q);
    let f0 = f(0.0)?;
    if f0 <= 0.0 {
        return Ok(None);
    }
    // Z(s) ~ 1/(2(s − 1)) → −∞ as s → 1⁻, so a sign change lies below 1/2.
    let mut lo = 0.0;
    let mut flo = f0;
    let mut hi = 0.25;
    let mut fhi = f(hi)?;
    while fhi > 0.0 {
        lo = hi;
        flo = fhi;
        hi = 0.5 - 0.5 * (0.5 - hi);
        if 0.5 - hi < 1e-12 {
            return Ok(None);
        }
        fhi = f(hi)?;
    }
    let root = brent(f, lo, hi, flo, fhi, 1e-16, 200)?;
    Ok(Some((0.5 - root, 0.5 + root)))
}
