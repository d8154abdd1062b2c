use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `re + i im` of the complex s-plane with finite components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.is_finite() && im.is_finite() {
            Ok(Self { re, im })
        } else {
            Err(Error::Domain(format!("non-finite complex point ({re}, {im})")))
        }
    }
}

impl From<ComplexPoint> for Complex64 {
    fn from(p: ComplexPoint) -> Self {
        Complex64::new(p.re, p.im)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    Critical,
    OffCritical,
    RealOffCritical,
}

impl ZeroKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ZeroKind::Critical => "critical",
            ZeroKind::OffCritical => "off_critical",
            ZeroKind::RealOffCritical => "real_off_critical",
        }
    }
}

/// A located zero `rho_x + i rho_y` of the Epstein zeta function at anisotropy `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub delta: f64,
    pub rho_x: f64,
    pub rho_y: f64,
    pub kind: ZeroKind,
    pub residual: f64,
}

impl ZeroRecord {
    pub fn critical(delta: f64, rho_y: f64, residual: f64) -> Self {
        Self { delta, rho_x: 0.5, rho_y, kind: ZeroKind::Critical, residual }
    }

    /// Offset `rho_x - 1/2` from the critical line.
    pub fn drho_x(&self) -> f64 {
        self.rho_x - 0.5
    }
}

/// Which side of a critical curve an edge sits on: the critical branches of a
/// left edge exist for `delta > delta_star`, those of a right edge for `delta < delta_star`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// A point where two critical zeros merge, with its local expansion coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeZero {
    pub delta_star: f64,
    pub rho_y_star: f64,
    pub side: Side,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl EdgeZero {
    /// Prefactor of the square-root branch, `sqrt(|a/c|)`.
    pub fn sqrt_prefactor(&self) -> f64 {
        (self.a / self.c).abs().sqrt()
    }

    /// Linear coefficient `(b - a d / c) / (2c)` of the branch expansion.
    pub fn linear_coefficient(&self) -> f64 {
        (self.b - self.a * self.d / self.c) / (2.0 * self.c)
    }
}

/// One continuous curve of zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTrace {
    pub kind: ZeroKind,
    pub points: Vec<ZeroRecord>,
    pub start_edge: Option<EdgeZero>,
    pub end_edge: Option<EdgeZero>,
    pub closed: bool,
    /// Indices into `points` just past a sign change of d(delta) along the curve.
    #[serde(default)]
    pub turning_points: Vec<usize>,
}
