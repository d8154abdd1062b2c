//! Jacobi theta function θ₃(e^{−πx}), its weighted companion ϑ, and the
//! integrand kernel K(t, Δ) = θ₃(e^{−πtΔ}) θ₃(e^{−πt/Δ}) − 1/t with its Δ-derivative.
//!
//! Every series is evaluated with nome modulus at most e^{−π re(1/x)} or
//! e^{−π re(x)}, whichever is smaller, by applying the modular identity
//! θ₃(e^{−πx}) = x^{−1/2} θ₃(e^{−π/x}) when |x| < 1. The kernel functions
//! accept complex t with re t > 0 so they can be used on rotated contours.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const SERIES_REL_TOL: f64 = 1e-17;
const MAX_TERMS: usize = 400;

/// Integration variable and anisotropy at which the kernel is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub t: f64,
    pub delta: f64,
}

impl KernelPoint {
    pub fn new(t: f64, delta: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain(format!("kernel point needs 0 < t <= 1, got {t}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("anisotropy must be positive, got {delta}")));
        }
        Ok(Self { t, delta })
    }
}

/// `(A, dA/dx)` for `A(x) = 2 Σ_{j≥1} e^{−πj²/x}`.
fn transformed_tail(x: Complex64) -> (Complex64, Complex64) {
    let w = x.inv();
    let mut a = Complex64::new(0.0, 0.0);
    let mut da = Complex64::new(0.0, 0.0);
    for j in 1..=MAX_TERMS {
        let j2 = (j * j) as f64;
        let term = (-PI * j2 * w).exp();
        a += term;
        da += term * j2;
        if term.norm() <= SERIES_REL_TOL * a.norm() || term.norm() < 1e-300 {
            break;
        }
    }
    (a * 2.0, da * (2.0 * PI) * w * w)
}

/// `(θ₃(e^{−πx}), d/dx θ₃(e^{−πx}))` for re x > 0.
fn theta_with_derivative(x: Complex64) -> (Complex64, Complex64) {
    if x.norm() < 1.0 {
        let (a, da) = transformed_tail(x);
        let rs = x.sqrt().inv();
        let theta = rs * (a + 1.0);
        (theta, -0.5 * theta / x + rs * da)
    } else {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut dsum = Complex64::new(0.0, 0.0);
        for j in 1..=MAX_TERMS {
            let j2 = (j * j) as f64;
            let term = (-PI * j2 * x).exp();
            sum += term;
            dsum += term * j2;
            if term.norm() <= SERIES_REL_TOL * (1.0 + sum.norm()) || term.norm() < 1e-300 {
                break;
            }
        }
        (sum * 2.0 + 1.0, dsum * (-2.0 * PI))
    }
}

/// `(K(t, Δ), ∂K/∂Δ(t, Δ))` for complex t with re t > 0.
pub(crate) fn kernel_with_derivative(t: Complex64, delta: f64) -> (Complex64, Complex64) {
    if delta > 1.0 {
        let (k, dk) = kernel_with_derivative(t, delta.recip());
        return (k, -dk / (delta * delta));
    }
    let x1 = t * delta;
    let x2 = t / delta;
    let d2 = delta * delta;
    if x2.norm() < 1.0 {
        let (a1, da1) = transformed_tail(x1);
        let (a2, da2) = transformed_tail(x2);
        let k = (a1 + a2 + a1 * a2) / t;
        let dk = (a2 + 1.0) * da1 - (a1 + 1.0) * da2 / d2;
        (k, dk)
    } else {
        let (th1, dth1) = theta_with_derivative(x1);
        let (th2, dth2) = theta_with_derivative(x2);
        let k = th1 * th2 - t.inv();
        let dk = t * (dth1 * th2 - th1 * dth2 / d2);
        (k, dk)
    }
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("theta argument must be positive, got {x}")))
    }
}

/// θ₃(e^{−πx}) = Σ_j e^{−πj²x}.
pub fn theta3(x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(theta_with_derivative(Complex64::new(x, 0.0)).0.re)
}

/// ϑ(e^{−πx}) = Σ_j j² e^{−πj²x} = q dθ₃/dq at q = e^{−πx}.
pub fn theta3_weighted(x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(-theta_with_derivative(Complex64::new(x, 0.0)).1.re / PI)
}

/// K(t, Δ) = θ₃(e^{−πtΔ}) θ₃(e^{−πt/Δ}) − 1/t, evaluated without cancellation.
pub fn kernel_k(p: KernelPoint) -> f64 {
    kernel_with_derivative(Complex64::new(p.t, 0.0), p.delta).0.re
}

/// ∂K/∂Δ(t, Δ) = πt [θ₃(e^{−πtΔ}) Δ^{−2} ϑ(e^{−πt/Δ}) − θ₃(e^{−πt/Δ}) ϑ(e^{−πtΔ})].
pub fn kernel_dk_ddelta(p: KernelPoint) -> f64 {
    kernel_with_derivative(Complex64::new(p.t, 0.0), p.delta).1.re
}
