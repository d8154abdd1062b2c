//! The analytically continued Z(s, Δ) = (Δ/π)^s Γ(s) ζ⁽²⁾(s, Δ), the Epstein
//! zeta function ζ⁽²⁾(s, Δ), the truncated lattice sum, and the zero residuals.
//!
//! Z is evaluated from
//!   2Z(s) = e^{iφ(s−1)}/(s−1) − e^{iφs}/s + ∫₀^{e^{iφ}} t^{s−1} K dt + ∫₀^{e^{−iφ}} t^{−s} K dt,
//! which for φ = 0 is the familiar
//!   Z = −½(1/(1−s) + 1/s) + ½∫₀¹ (t^{s−1} + t^{−s}) K(t, Δ) dt.
//! The angle φ grows with |Im s| so that the factor e^{iφs} carries the
//! exponential decay of Z instead of cancellation inside the integrals.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_kernels, ray_moments, HalfPower, Hyp, QuadratureSpec, Trig, WeightSpec};
use crate::special_fn::complex_gamma;
use crate::types::ComplexPoint;

/// A function value with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub value: ComplexPoint,
    pub err_bound: f64,
}

/// Real and imaginary parts of Z at s = 1/2 + δρ_x + iρ_y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualPair {
    pub f1: f64,
    pub f2: f64,
}

impl ResidualPair {
    pub fn norm_sq(&self) -> f64 {
        self.f1 * self.f1 + self.f2 * self.f2
    }
}

/// Truncated lattice sum with a bound on the omitted terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSum {
    pub value: ComplexPoint,
    pub truncation_bound: f64,
}

/// Derivatives of Z with respect to s (`ds[n]` = d^n Z/ds^n) and of those with
/// respect to Δ (`ddelta[n]` = ∂/∂Δ d^n Z/ds^n).
#[derive(Debug, Clone, PartialEq)]
pub struct ZJet {
    pub ds: Vec<Complex64>,
    pub ddelta: Vec<Complex64>,
    /// Absolute error bound, shared by all entries.
    pub err: f64,
    /// |e^{iφs}|: the natural magnitude of Z at this s.
    pub scale: f64,
}

/// Contour angle for a given Im s: zero for small |Im s|, approaching π/2 so
/// that the leftover cancellation e^{(π/2−|φ|)|Im s|} stays below e^{2.5}.
pub fn contour_angle(im_s: f64) -> f64 {
    let margin = (2.5 / im_s.abs()).min(FRAC_PI_2);
    (FRAC_PI_2 - margin).copysign(im_s)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("anisotropy must be positive, got {delta}")))
    }
}

/// Z and its derivatives up to order `orders` in s, and up to `orders_d` in s of ∂Z/∂Δ.
pub fn z_jet(s: Complex64, delta: f64, orders: usize, orders_d: Option<usize>, q: &QuadratureSpec) -> Result<ZJet> {
    check_delta(delta)?;
    if s == Complex64::new(0.0, 0.0) || s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole { re: s.re, im: s.im });
    }
    let phi = contour_angle(s.im);
    let m = ray_moments(s, delta, phi, orders, orders_d, q)?;
    let back = Complex64::from_polar(1.0, -phi);
    let front = (Complex64::i() * phi * s).exp();
    let i_phi = Complex64::new(0.0, phi);

    // B^{(k)}: k-th s-derivative of e^{−iφs}·2Z.
    let mut b = Vec::with_capacity(orders + 1);
    let mut fact = 1.0;
    for k in 0..=orders {
        if k > 0 {
            fact *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let rational = back * sign * fact / (s - 1.0).powu(k as u32 + 1) - sign * fact / s.powu(k as u32 + 1);
        b.push(rational + m.plus[k] + back * m.minus[k]);
    }
    let b_d: Vec<Complex64> = m.plus_d.iter().zip(m.minus_d.iter()).map(|(p, mi)| p + back * mi).collect();

    let unrotate = |terms: &[Complex64], n: usize| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for k in (0..=n).rev() {
            acc += terms[k] * pw * binomial(n, k);
            pw *= i_phi;
        }
        0.5 * front * acc
    };
    let ds = (0..=orders).map(|n| unrotate(&b, n)).collect();
    let ddelta = (0..b_d.len()).map(|n| unrotate(&b_d, n)).collect();
    let scale = front.norm();
    let order_growth = (1.0 + phi.abs()).powi(orders.max(orders_d.unwrap_or(0)) as i32);
    let err = scale * (m.error * order_growth + 1e-15 * b[0].norm());
    Ok(ZJet { ds, ddelta, err, scale })
}

/// Z(s, Δ) = (Δ/π)^s Γ(s) ζ⁽²⁾(s, Δ).
pub fn big_z(s: ComplexPoint, delta: f64, q: &QuadratureSpec) -> Result<ZetaValue> {
    let jet = z_jet(s.into(), delta, 0, None, q)?;
    Ok(ZetaValue { value: jet.ds[0].into(), err_bound: jet.err })
}

/// Z assembled from real-axis weight integrals, for 0 < re s < 1: the split of
/// t^{s−1} + t^{−s} into t^{−1/2} cosh/sinh(δρ_x ln t) cos/sin(ρ_y ln t).
pub fn big_z_real_axis(s: ComplexPoint, delta: f64, q: &QuadratureSpec) -> Result<ZetaValue> {
    check_delta(delta)?;
    let dx = s.re - 0.5;
    if dx.abs() >= 0.5 {
        return Err(Error::Domain(format!("real-axis assembly needs 0 < re s < 1, got {}", s.re)));
    }
    let y = s.im;
    let ws = [
        WeightSpec::new(HalfPower::MinusHalf, 0, Trig::Cos(y), Hyp::Cosh(dx))?,
        WeightSpec::new(HalfPower::MinusHalf, 0, Trig::Sin(y), Hyp::Sinh(dx))?,
    ];
    let ints = integrate_kernels(&ws, delta, q)?;
    let sc = Complex64::from(s);
    let rational = -0.5 * (1.0 / (1.0 - sc) + 1.0 / sc);
    let value = rational + Complex64::new(ints[0].value, ints[1].value);
    Ok(ZetaValue { value: value.into(), err_bound: ints[0].error + ints[1].error })
}

fn is_negative_integer(s: Complex64) -> bool {
    s.im == 0.0 && s.re < 0.0 && s.re == s.re.round()
}

/// ζ⁽²⁾(s, Δ) = (π/Δ)^s Z(s, Δ)/Γ(s); exactly −1/2 at s = 0.
pub fn epstein_zeta(s: ComplexPoint, delta: f64, q: &QuadratureSpec) -> Result<ZetaValue> {
    check_delta(delta)?;
    let sc = Complex64::from(s);
    if sc == Complex64::new(0.0, 0.0) {
        return Ok(ZetaValue { value: ComplexPoint { re: -0.5, im: 0.0 }, err_bound: 0.0 });
    }
    if sc == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole { re: 1.0, im: 0.0 });
    }
    if is_negative_integer(sc) {
        return Ok(ZetaValue { value: ComplexPoint { re: 0.0, im: 0.0 }, err_bound: 0.0 });
    }
    let z = big_z(s, delta, q)?;
    let factor = (sc * (PI / delta).ln()).exp() / complex_gamma(sc)?;
    let value = factor * Complex64::from(z.value);
    Ok(ZetaValue { value: value.into(), err_bound: factor.norm() * z.err_bound + 1e-14 * value.norm() })
}

/// ½ Σ′_{|j|,|k| ≤ radius} (j² + Δ² k²)^{−s} with a bound on the omitted terms.
pub fn direct_sum(s: ComplexPoint, delta: f64, radius: usize) -> Result<LatticeSum> {
    check_delta(delta)?;
    let sigma = s.re;
    if sigma <= 1.0 {
        return Err(Error::Divergence(sigma));
    }
    if radius < 10 {
        return Err(Error::Domain(format!("lattice radius must be at least 10, got {radius}")));
    }
    let sc = Complex64::from(s);
    let term = |x: f64| (-sc * x.ln()).exp();
    let d2 = delta * delta;
    let mut total = Complex64::new(0.0, 0.0);
    for j in 1..=radius {
        let jf = j as f64;
        total += term(jf * jf) + term(d2 * jf * jf);
    }
    for k in 1..=radius {
        let k2 = d2 * (k * k) as f64;
        let mut row = Complex64::new(0.0, 0.0);
        for j in 1..=radius {
            row += term((j * j) as f64 + k2);
        }
        total += 2.0 * row;
    }

    // Σ_{k∈Z}(j² + Δ²k²)^{−σ} ≤ j^{−2σ} + c j^{1−2σ}/Δ with c = √π Γ(σ−½)/Γ(σ),
    // and Σ_{j>R} j^{−p} ≤ R^{1−p}/(p−1).
    let c = PI.sqrt() * complex_gamma(Complex64::new(sigma - 0.5, 0.0))?.re / complex_gamma(Complex64::new(sigma, 0.0))?.re;
    let r = radius as f64;
    let p1 = 2.0 * sigma;
    let p2 = 2.0 * sigma - 1.0;
    let tail = |scale: f64| r.powf(1.0 - p1) / (p1 - 1.0) + c / scale * r.powf(1.0 - p2) / (p2 - 1.0);
    let bound = tail(delta) + delta.powf(-p1) * r.powf(1.0 - p1) / (p1 - 1.0) + c * delta.powf(-p2) * r.powf(1.0 - p2) / (p2 - 1.0);
    Ok(LatticeSum { value: total.into(), truncation_bound: bound })
}

fn check_strip(drho_x: f64) -> Result<()> {
    if drho_x.abs() < 0.5 {
        Ok(())
    } else {
        Err(Error::Domain(format!("|drho_x| must be below 1/2, got {drho_x}")))
    }
}

/// Real part of Z(1/2 + iρ_y): −2/(1 + 4ρ_y²) + ∫₀¹ t^{−1/2} cos(ρ_y ln t) K dt.
pub fn critical_residual(rho_y: f64, delta: f64, q: &QuadratureSpec) -> Result<f64> {
    Ok(offcritical_residuals(0.0, rho_y, delta, q)?.f1)
}

/// The critical residual assembled from a single real-axis weight integral.
pub fn critical_residual_real_axis(rho_y: f64, delta: f64, q: &QuadratureSpec) -> Result<f64> {
    check_delta(delta)?;
    let w = WeightSpec::new(HalfPower::MinusHalf, 0, Trig::Cos(rho_y), Hyp::One)?;
    let i = integrate_kernels(&[w], delta, q)?[0];
    Ok(-2.0 / (1.0 + 4.0 * rho_y * rho_y) + i.value)
}

/// (f1, f2) = (Re Z, Im Z) at s = 1/2 + δρ_x + iρ_y.
pub fn offcritical_residuals(drho_x: f64, rho_y: f64, delta: f64, q: &QuadratureSpec) -> Result<ResidualPair> {
    check_strip(drho_x)?;
    let jet = z_jet(Complex64::new(0.5 + drho_x, rho_y), delta, 0, None, q)?;
    let z = jet.ds[0];
    Ok(ResidualPair { f1: z.re, f2: z.im })
}

/// Residuals, their Jacobian with respect to (δρ_x, ρ_y), and the error bound
/// and natural scale of the residuals.
pub(crate) fn residuals_with_jacobian(
    drho_x: f64,
    rho_y: f64,
    delta: f64,
    q: &QuadratureSpec,
) -> Result<(ResidualPair, [[f64; 2]; 2], ZJet)> {
    check_strip(drho_x)?;
    let jet = z_jet(Complex64::new(0.5 + drho_x, rho_y), delta, 1, None, q)?;
    let z = jet.ds[0];
    let dz = jet.ds[1];
    // Z is analytic in s = 1/2 + δρ_x + iρ_y, so the Jacobian has Cauchy-Riemann form.
    let jac = [[dz.re, -dz.im], [dz.im, dz.re]];
    Ok((ResidualPair { f1: z.re, f2: z.im }, jac, jet))
}

/// ∂(f1, f2)/∂(δρ_x, ρ_y) as `[[∂f1/∂δρ_x, ∂f1/∂ρ_y], [∂f2/∂δρ_x, ∂f2/∂ρ_y]]`.
pub fn residual_jacobian(drho_x: f64, rho_y: f64, delta: f64, q: &QuadratureSpec) -> Result<[[f64; 2]; 2]> {
    Ok(residuals_with_jacobian(drho_x, rho_y, delta, q)?.1)
}
