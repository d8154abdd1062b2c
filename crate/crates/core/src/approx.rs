//! Approximate zero equations valid for strong anisotropy, and their closed-form
//! consequences. For Δ < 1 the zeros approximately solve
//!   (Δ/π)^{2ρ−1} = −Γ(1/2 − ρ) ζ(1 − 2ρ) / (Γ(ρ − 1/2) ζ(2ρ − 1)),
//! and for Δ > 1 the same relation with Δ/π replaced by 1/(πΔ).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::brent;
use crate::special_fn::{complex_gamma, riemann_zeta, EULER_GAMMA};
use crate::types::ComplexPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SmallDelta,
    LargeDelta,
}

impl Regime {
    /// Δ ≤ 1 uses the small-Δ form; at Δ = 1 both forms coincide up to inversion.
    pub fn for_delta(delta: f64) -> Self {
        if delta <= 1.0 {
            Regime::SmallDelta
        } else {
            Regime::LargeDelta
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxZero {
    pub rho: ComplexPoint,
    pub delta: f64,
    pub regime: Regime,
    pub residual: f64,
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("anisotropy must be positive, got {delta}")))
    }
}

/// Γ(1/2 − ρ) ζ(1 − 2ρ) / (Γ(ρ − 1/2) ζ(2ρ − 1)).
fn reflection_ratio(rho: Complex64) -> Result<Complex64> {
    let u = rho - 0.5;
    let den = complex_gamma(u)? * riemann_zeta(2.0 * u)?;
    if den == Complex64::new(0.0, 0.0) || !den.is_finite() {
        return Err(Error::Pole { re: rho.re, im: rho.im });
    }
    Ok(complex_gamma(-u)? * riemann_zeta(-2.0 * u)? / den)
}

/// Residual of the approximate zero equation in the regime selected by Δ:
/// (Δ/π)^{2ρ−1} + R(ρ) for Δ ≤ 1 and (πΔ)^{2ρ−1} + 1/R(ρ) for Δ > 1.
pub fn approx_equation_residual(rho: ComplexPoint, delta: f64) -> Result<ComplexPoint> {
    check_delta(delta)?;
    let r = Complex64::from(rho);
    let ratio = reflection_ratio(r)?;
    let exponent = 2.0 * r - 1.0;
    let value = match Regime::for_delta(delta) {
        Regime::SmallDelta => (exponent * (delta / PI).ln()).exp() + ratio,
        Regime::LargeDelta => {
            if ratio == Complex64::new(0.0, 0.0) {
                return Err(Error::Pole { re: rho.re, im: rho.im });
            }
            (exponent * (PI * delta).ln()).exp() + 1.0 / ratio
        }
    };
    Ok(value.into())
}

/// Phase of Γ(iy) ζ(2iy), principal value.
fn raw_phase(y: f64) -> Result<f64> {
    let s = Complex64::new(0.0, y);
    Ok((complex_gamma(s)? * riemann_zeta(2.0 * s)?).arg())
}

fn wrap(x: f64) -> f64 {
    x - 2.0 * PI * ((x + PI) / (2.0 * PI)).floor()
}

/// Critical zeros ρ_y ∈ (0, rho_y_max] of the approximate equation. On the
/// critical line both sides are unimodular and the equation reduces to
///   φ(y) = 2y ln(Δ/π) − π + 2 arg[Γ(iy) ζ(2iy)] ∈ 2πZ,
/// with φ(0⁺) = 0 (the trivial root y = 0). φ is unwrapped along a fine grid
/// starting just above zero and each crossing of a multiple of 2π is polished
/// by Brent's method.
pub fn approx_critical_zeros(delta: f64, rho_y_max: f64) -> Result<Vec<f64>> {
    check_delta(delta)?;
    let d = delta.min(1.0 / delta);
    let log_ratio = (d / PI).ln();
    if !(rho_y_max > 0.0) {
        return Ok(Vec::new());
    }
    // Keep the phase increment per grid cell well below π.
    let step = (0.01f64).min(0.5 / (2.0 * log_ratio.abs() + 2.0 * (rho_y_max + 2.0).ln() + 4.0));
    let y0 = step.min(1e-3);
    let phase_at = |y: f64, raw: f64| 2.0 * y * log_ratio - PI + 2.0 * raw;

    let mut roots = Vec::new();
    let mut y_prev = y0;
    let mut raw_prev = raw_phase(y0)?;
    // Unwrap the start against φ(0⁺) = 0.
    let mut phi_prev = wrap(phase_at(y0, raw_prev));
    while y_prev < rho_y_max {
        let y = (y_prev + step).min(rho_y_max);
        let raw = raw_phase(y)?;
        let phi = phi_prev + 2.0 * y * log_ratio - 2.0 * y_prev * log_ratio + 2.0 * wrap(raw - raw_prev);
        let (k_lo, k_hi) = if phi < phi_prev { (phi, phi_prev) } else { (phi_prev, phi) };
        let mut k = (k_lo / (2.0 * PI)).ceil() as i64;
        while (2.0 * PI * k as f64) <= k_hi {
            let level = 2.0 * PI * k as f64;
            if level > k_lo {
                let (yl, pl, rl) = (y_prev, phi_prev, raw_prev);
                let local = |t: f64| -> Result<f64> {
                    let r = raw_phase(t)?;
                    Ok(pl + 2.0 * (t - yl) * log_ratio + 2.0 * wrap(r - rl) - level)
                };
                let root = brent(local, yl, y, pl - level, phi - level, 1e-15 * y.max(1.0), 200)?;
                roots.push(root);
            }
            k += 1;
        }
        y_prev = y;
        raw_prev = raw;
        phi_prev = phi;
    }
    Ok(roots)
}

/// n-th zero of the limiting equidistant spectrum: πn/|ln(Δ/π)| for Δ < 1 and
/// πn/ln(πΔ) for Δ > 1, whose spacing tends to π/|ln Δ| in both limits.
pub fn equidistant_spectrum(delta: f64, n: i64) -> Result<f64> {
    check_delta(delta)?;
    if delta == 1.0 || n == 0 {
        return Err(Error::Domain(format!("needs delta != 1 and n != 0, got delta = {delta}, n = {n}")));
    }
    let log = if delta < 1.0 { (delta / PI).ln().abs() } else { (PI * delta).ln() };
    Ok(PI * n as f64 / log)
}

/// Δ_c* = e^γ/(4π), below which real off-critical zeros exist.
pub fn analytic_delta_c() -> f64 {
    EULER_GAMMA.exp() / (4.0 * PI)
}

/// Real roots (ρ_x, 1 − ρ_x) of the approximate equation, for Δ < Δ_c* (or
/// Δ > 1/Δ_c*). With x = ρ_x ∈ (0, 1/2) the equation reads
///   (2x − 1) ln(Δ/π) = ln(−R(x)),   R(x) = Γ(1/2 − x) ζ(1 − 2x) / (Γ(x − 1/2) ζ(2x − 1)),
/// which has the trivial root x = 1/2 and a second one exactly when Δ < Δ_c*.
pub fn approx_real_offcritical(delta: f64) -> Result<Option<(f64, f64)>> {
    check_delta(delta)?;
    let d = delta.min(1.0 / delta);
    if d >= analytic_delta_c() {
        return Ok(None);
    }
    let log_ratio = (d / PI).ln();
    let g = |x: f64| -> Result<f64> {
        let ratio = reflection_ratio(Complex64::new(x, 0.0))?.re;
        Ok((2.0 * x - 1.0) * log_ratio - (-ratio).ln())
    };
    // g → −∞ as x → 0⁺ (ζ(1 − 2x) has its pole there) and g(1/2 − ε) > 0 below Δ_c*.
    let mut hi = None;
    for k in 3..=9 {
        let x = 0.5 - 10f64.powi(-k);
        let v = g(x)?;
        if v > 0.0 {
            hi = Some((x, v));
            break;
        }
    }
    let Some((hi, ghi)) = hi else { return Ok(None) };
    let mut lo = 0.25;
    let mut glo = g(lo)?;
    while glo >= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Ok(None);
        }
        glo = g(lo)?;
    }
    let root = brent(g, lo, hi, glo, ghi, 1e-17, 300)?;
    Ok(Some((root, 1.0 - root)))
}
