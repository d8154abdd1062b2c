//! Integrals of the theta kernel over t ∈ (0, 1].
//!
//! Two routes share the kernel:
//! * [`integrate_kernel`] handles the real weight family
//!   t^{±1/2} (ln t)^m trig(ρ_y ln t) hyp(δρ_x ln t) on the real t axis with
//!   fixed Gauss-Legendre panels in u = −ln t and global panel doubling.
//! * [`ray_moments`] integrates r^{s−1}(ln r)^k K(r e^{iφ}) and
//!   r^{−s}(−ln r)^k K(r e^{−iφ}) along rays rotated by ±φ, with globally
//!   adaptive Gauss-Kronrod bisection. Rotating the contour removes the
//!   e^{π|Im s|/2} cancellation that the real-axis integrals suffer.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::theta::kernel_with_derivative;

const GL_ORDER: usize = 16;
const ROUNDOFF_FACTOR: f64 = 8.0 * f64::EPSILON;

/// Tolerances and work limits for the kernel integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-13, max_panels: 4096 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_panels > 0 {
            Ok(())
        } else {
            Err(Error::Domain("quadrature tolerances must be positive".into()))
        }
    }

    /// The same spec with both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self { abs_tol: self.abs_tol / factor, rel_tol: self.rel_tol / factor, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPower {
    MinusHalf,
    PlusHalf,
}

impl HalfPower {
    fn value(self) -> f64 {
        match self {
            HalfPower::MinusHalf => -0.5,
            HalfPower::PlusHalf => 0.5,
        }
    }
}

/// Oscillatory factor with phase ρ_y: evaluated at ρ_y ln t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Trig {
    One,
    Cos(f64),
    Sin(f64),
}

/// Hyperbolic factor with rate δρ_x: evaluated at δρ_x ln t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Hyp {
    One,
    Cosh(f64),
    Sinh(f64),
}

/// Which kernel multiplies the weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// K(t, Δ).
    Theta,
    /// ∂K/∂Δ(t, Δ).
    DeltaDerivative,
}

/// Weight t^{half_power} (ln t)^{log_power} trig(ρ_y ln t) hyp(δρ_x ln t) times a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub half_power: HalfPower,
    pub log_power: u32,
    pub trig: Trig,
    pub hyp: Hyp,
    pub kernel: KernelKind,
}

impl WeightSpec {
    pub fn new(half_power: HalfPower, log_power: u32, trig: Trig, hyp: Hyp) -> Result<Self> {
        let w = Self { half_power, log_power, trig, hyp, kernel: KernelKind::Theta };
        w.validate()?;
        Ok(w)
    }

    pub fn with_kernel(self, kernel: KernelKind) -> Self {
        Self { kernel, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.log_power > 3 {
            return Err(Error::Domain(format!("log power {} exceeds 3", self.log_power)));
        }
        let phase_ok = match self.trig {
            Trig::One => true,
            Trig::Cos(p) | Trig::Sin(p) => p.is_finite(),
        };
        let rate_ok = match self.hyp {
            Hyp::One => true,
            Hyp::Cosh(r) | Hyp::Sinh(r) => r.abs() < 0.5,
        };
        if phase_ok && rate_ok {
            Ok(())
        } else {
            Err(Error::Domain("weight needs a finite phase and a rate |δρ_x| < 1/2".into()))
        }
    }

    fn phase(&self) -> f64 {
        match self.trig {
            Trig::One => 0.0,
            Trig::Cos(p) | Trig::Sin(p) => p,
        }
    }

    fn rate(&self) -> f64 {
        match self.hyp {
            Hyp::One => 0.0,
            Hyp::Cosh(r) | Hyp::Sinh(r) => r,
        }
    }

    /// Weight in the u = −ln t variable, including the Jacobian dt = t du.
    fn eval_u(&self, u: f64) -> f64 {
        let lt = -u;
        let mut w = (-u * (1.0 + self.half_power.value())).exp() * lt.powi(self.log_power as i32);
        w *= match self.trig {
            Trig::One => 1.0,
            Trig::Cos(p) => (p * lt).cos(),
            Trig::Sin(p) => (p * lt).sin(),
        };
        w *= match self.hyp {
            Hyp::One => 1.0,
            Hyp::Cosh(r) => (r * lt).cosh(),
            Hyp::Sinh(r) => (r * lt).sinh(),
        };
        w
    }

    /// Upper bound of |weight| in u, used to place the truncation point.
    fn magnitude_u(&self, u: f64) -> f64 {
        (-u * (1.0 + self.half_power.value()) + self.rate().abs() * u).exp() * u.powi(self.log_power as i32).max(1.0)
    }
}

/// An integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn gauss_legendre() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static NODES: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = GL_ORDER;
        let mut x = [0.0; GL_ORDER];
        let mut w = [0.0; GL_ORDER];
        for i in 0..n {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            x[i] = z;
            w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        (x, w)
    })
}

/// Bound on |K(t, Δ)| (or |∂K/∂Δ|) at t = e^{−u} for t below min(Δ, 1/Δ),
/// with the nome moduli damped by `cos_phi` on a rotated ray.
fn kernel_tail_bound(u: f64, delta: f64, kernel: KernelKind, cos_phi: f64) -> f64 {
    let e = u.exp();
    let a = (-PI * cos_phi * e / delta).exp();
    let b = (-PI * cos_phi * e * delta).exp();
    match kernel {
        KernelKind::Theta => 4.0 * e * (a + b),
        KernelKind::DeltaDerivative => 4.0 * PI * e * e * (a / (delta * delta) + b) / cos_phi,
    }
}

/// First u (on a 0.25 grid past the transition region) where `bound` drops below `target`.
fn truncation_point(delta: f64, target: f64, bound: impl Fn(f64) -> f64) -> f64 {
    let mut u = delta.ln().abs() + 1.0;
    while bound(u) > target && u < 60.0 {
        u += 0.25;
    }
    u
}

fn kernel_value(u: f64, delta: f64, kind: KernelKind) -> f64 {
    let (k, dk) = kernel_with_derivative(Complex64::new((-u).exp(), 0.0), delta);
    match kind {
        KernelKind::Theta => k.re,
        KernelKind::DeltaDerivative => dk.re,
    }
}

/// Gauss-Legendre sums over `panels` equal panels of [0, upper], returning the
/// integral and the integral of the absolute integrand for each weight.
fn panel_sums(ws: &[WeightSpec], delta: f64, upper: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre();
    let h = upper / panels as f64;
    let mut sums = vec![0.0; ws.len()];
    let mut abs_sums = vec![0.0; ws.len()];
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(w.iter()) {
            let u = mid + 0.5 * h * xi;
            let (k, dk) = kernel_with_derivative(Complex64::new((-u).exp(), 0.0), delta);
            for (j, ws_j) in ws.iter().enumerate() {
                let kv = match ws_j.kernel {
                    KernelKind::Theta => k.re,
                    KernelKind::DeltaDerivative => dk.re,
                };
                let f = 0.5 * h * wi * ws_j.eval_u(u) * kv;
                sums[j] += f;
                abs_sums[j] += f.abs();
            }
        }
    }
    (sums, abs_sums)
}

/// Integrates several weights against the kernel on a shared panel layout.
pub fn integrate_kernels(ws: &[WeightSpec], delta: f64, q: &QuadratureSpec) -> Result<Vec<Estimate>> {
    q.validate()?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("anisotropy must be positive, got {delta}")));
    }
    for w in ws {
        w.validate()?;
    }
    if ws.is_empty() {
        return Ok(Vec::new());
    }
    let target = q.abs_tol * 0.1;
    let tail = |w: &WeightSpec, u: f64| w.magnitude_u(u) * kernel_tail_bound(u, delta, w.kernel, 1.0);
    let upper = ws.iter().map(|w| truncation_point(delta, target, |u| tail(w, u))).fold(0.0, f64::max);
    let max_phase = ws.iter().map(|w| w.phase().abs()).fold(1.0, f64::max);
    let width = (PI / max_phase).min(0.5);
    let mut panels = (upper / width).ceil() as usize;
    let (mut coarse, _) = panel_sums(ws, delta, upper, panels);
    loop {
        let (fine, abs_fine) = panel_sums(ws, delta, upper, 2 * panels);
        let estimates: Vec<Estimate> = (0..ws.len())
            .map(|j| {
                let error = (fine[j] - coarse[j]).abs().max(ROUNDOFF_FACTOR * abs_fine[j]) + tail(&ws[j], upper);
                Estimate { value: fine[j], error }
            })
            .collect();
        let worst = estimates
            .iter()
            .find(|e| e.error > q.abs_tol.max(q.rel_tol * e.value.abs()));
        match worst {
            None => return Ok(estimates),
            Some(e) if 4 * panels > q.max_panels => {
                return Err(Error::ToleranceNotMet { estimate: e.value, error: e.error })
            }
            Some(_) => {
                panels *= 2;
                coarse = fine;
            }
        }
    }
}

/// ∫₀¹ dt t^{half_power} (ln t)^{log_power} trig(ρ_y ln t) hyp(δρ_x ln t) K(t, Δ).
pub fn integrate_kernel(w: &WeightSpec, delta: f64, q: &QuadratureSpec) -> Result<Estimate> {
    Ok(integrate_kernels(std::slice::from_ref(w), delta, q)?[0])
}

/// Moments of the kernel along the rays t = r e^{±iφ}, r ∈ (0, 1]:
/// `plus[k] = ∫ r^{s−1} (ln r)^k K(r e^{iφ}) dr`,
/// `minus[k] = ∫ r^{−s} (−ln r)^k K(r e^{−iφ}) dr`,
/// and the same with ∂K/∂Δ in `plus_d`, `minus_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RayMoments {
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
    pub plus_d: Vec<Complex64>,
    pub minus_d: Vec<Complex64>,
    /// Estimated absolute error, uniform over all moments.
    pub error: f64,
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct RaySetup {
    s: Complex64,
    delta: f64,
    rot: Complex64,
    orders: usize,
    orders_d: usize,
}

impl RaySetup {
    fn width(&self) -> usize {
        2 * (self.orders + 1) + 2 * (self.orders_d + 1)
    }

    /// All moment integrands at u = −ln r (Jacobian dr = r du included), plus
    /// the magnitude scale used for the roundoff floor.
    fn integrand(&self, u: f64, out: &mut [Complex64]) -> f64 {
        let r = (-u).exp();
        let (k, dk) = kernel_with_derivative(self.rot * r, self.delta);
        let wp = (-u * self.s).exp();
        let wm = (-u * (1.0 - self.s)).exp();
        let n = self.orders + 1;
        let nd = self.orders_d + 1;
        let (mut pp, mut pm) = (wp * k, wm * k.conj());
        for j in 0..n {
            out[j] = pp;
            out[n + j] = pm;
            pp *= -u;
            pm *= u;
        }
        let (mut pp, mut pm) = (wp * dk, wm * dk.conj());
        for j in 0..nd {
            out[2 * n + j] = pp;
            out[2 * n + nd + j] = pm;
            pp *= -u;
            pm *= u;
        }
        (wp.norm() + wm.norm()) * (k.norm() + dk.norm()) * (1.0 + u).powi(self.orders.max(self.orders_d) as i32)
    }
}

struct Interval {
    a: f64,
    b: f64,
    values: Vec<Complex64>,
    /// Kronrod-Gauss difference, which refinement reduces.
    error: f64,
    /// Roundoff floor 8ε·∫|f| over the panel, which refinement does not reduce.
    floor: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal && self.a.total_cmp(&other.a) == Ordering::Equal
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod(setup: &RaySetup, a: f64, b: f64, buf: &mut [Complex64]) -> Interval {
    let m = setup.width();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut kron = vec![Complex64::new(0.0, 0.0); m];
    let mut gauss = vec![Complex64::new(0.0, 0.0); m];
    let mut scale = 0.0;
    for (i, &x) in GK_X.iter().enumerate() {
        let nodes: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &sign in nodes {
            let u = mid + sign * half * x;
            scale += GK_WK[i] * setup.integrand(u, buf);
            for j in 0..m {
                kron[j] += buf[j] * GK_WK[i];
                if i % 2 == 1 {
                    gauss[j] += buf[j] * GK_WG[i / 2];
                }
            }
        }
    }
    let mut error: f64 = 0.0;
    for j in 0..m {
        kron[j] *= half;
        gauss[j] *= half;
        error = error.max((kron[j] - gauss[j]).norm());
    }
    Interval { a, b, values: kron, error, floor: ROUNDOFF_FACTOR * scale * half }
}

/// Computes kernel moments of orders `0..=orders` (and `0..=orders_d` for ∂K/∂Δ,
/// if given) along the rays at angle `phi` (|phi| < π/2).
pub fn ray_moments(
    s: Complex64,
    delta: f64,
    phi: f64,
    orders: usize,
    orders_d: Option<usize>,
    q: &QuadratureSpec,
) -> Result<RayMoments> {
    q.validate()?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("anisotropy must be positive, got {delta}")));
    }
    if !(phi.abs() < 0.5 * PI) {
        return Err(Error::Domain(format!("ray angle {phi} outside (-pi/2, pi/2)")));
    }
    let with_d = orders_d.is_some();
    let setup = RaySetup {
        s,
        delta,
        rot: Complex64::from_polar(1.0, phi),
        orders,
        orders_d: orders_d.unwrap_or(0),
    };
    let m = setup.width();
    let cos_phi = phi.cos();
    let max_order = orders.max(setup.orders_d) as i32;
    let sigma_rate = s.re.min(1.0 - s.re);
    let target = q.abs_tol * 1e-3;
    let upper = truncation_point(delta.min(1.0 / delta) * cos_phi, target, |u| {
        let w = (-u * sigma_rate).exp() * u.powi(max_order).max(1.0);
        let kind = if with_d { KernelKind::DeltaDerivative } else { KernelKind::Theta };
        w * (kernel_tail_bound(u, delta, KernelKind::Theta, cos_phi) + kernel_tail_bound(u, delta, kind, cos_phi))
    });

    let width = (PI / s.im.abs().max(1.0)).min(0.5);
    let initial = (upper / width).ceil() as usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let mut heap = BinaryHeap::with_capacity(4 * initial);
    for i in 0..initial {
        let a = upper * i as f64 / initial as f64;
        let b = upper * (i + 1) as f64 / initial as f64;
        heap.push(gauss_kronrod(&setup, a, b, &mut buf));
    }
    let limit = q.max_panels.max(4 * initial);
    loop {
        let total_err: f64 = heap.iter().map(|iv| iv.error).sum();
        let floor: f64 = heap.iter().map(|iv| iv.floor).sum();
        let mut totals = vec![Complex64::new(0.0, 0.0); m];
        for iv in heap.iter() {
            for (t, v) in totals.iter_mut().zip(&iv.values) {
                *t += v;
            }
        }
        let magnitude = totals.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = q.abs_tol.max(q.rel_tol * magnitude);
        if total_err <= tol || heap.len() >= limit {
            if total_err > tol {
                return Err(Error::ToleranceNotMet { estimate: magnitude, error: total_err });
            }
            let n = orders + 1;
            let nd = setup.orders_d + 1;
            let (plus, rest) = totals.split_at(n);
            let (minus, rest) = rest.split_at(n);
            let (plus_d, minus_d) = rest.split_at(nd);
            let (plus_d, minus_d) = if with_d { (plus_d.to_vec(), minus_d.to_vec()) } else { (Vec::new(), Vec::new()) };
            let error = total_err + floor;
            return Ok(RayMoments { plus: plus.to_vec(), minus: minus.to_vec(), plus_d, minus_d, error });
        }
        let worst = heap.pop().expect("interval heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(gauss_kronrod(&setup, worst.a, mid, &mut buf));
        heap.push(gauss_kronrod(&setup, mid, worst.b, &mut buf));
    }
}

/// Kernel values on the real axis as a function of u = −ln t (exposed for tests and benches).
pub fn kernel_at_u(u: f64, delta: f64, kernel: KernelKind) -> f64 {
    kernel_value(u, delta, kernel)
}
