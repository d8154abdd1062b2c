//! Critical zeros: scanning and refinement at fixed anisotropy, continuation of
//! the curves ρ_y(Δ), and the edge points where two critical zeros merge.
//!
//! Along the critical line the residual F1(ρ_y, Δ) = Z(1/2 + iρ_y, Δ) is real.
//! With F2 = ∂F1/∂ρ_y an edge solves F1 = F2 = 0, and near it
//!   F1 ≈ a ε − b ε η + c η² − d η³,   ε = Δ − Δ*, η = ρ_y − ρ_y*,
//! so a = ∂_Δ Z, b = Im ∂_Δ Z', c = −Z''/2, d = −Im Z'''/6 at s = 1/2 + iρ_y*.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_zeta::z_jet;
use crate::quadrature::QuadratureSpec;
use crate::roots::brent;
use crate::types::{CurveTrace, EdgeZero, Side, ZeroKind, ZeroRecord};

/// Residual of the critical equation together with its local error bound.
#[derive(Debug, Clone, Copy)]
struct Sample {
    value: f64,
    err: f64,
}

fn sample(rho_y: f64, delta: f64, q: &QuadratureSpec) -> Result<Sample> {
    let jet = z_jet(Complex64::new(0.5, rho_y), delta, 0, None, q)?;
    Ok(Sample { value: jet.ds[0].re, err: jet.err })
}

/// Grid intervals of [rho_y_min, rho_y_max] over which the critical residual
/// changes sign. Grid values within their error bound of zero carry no sign and
/// are skipped, so a bracket may span several cells. Zeros closer together than
/// `grid_step` can be missed.
pub fn scan_critical(
    delta: f64,
    rho_y_min: f64,
    rho_y_max: f64,
    grid_step: f64,
    q: &QuadratureSpec,
) -> Result<Vec<(f64, f64)>> {
    if !(grid_step > 0.0) {
        return Err(Error::Domain(format!("grid step must be positive, got {grid_step}")));
    }
    if !(rho_y_max > rho_y_min) {
        return Ok(Vec::new());
    }
    let n = ((rho_y_max - rho_y_min) / grid_step).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| (rho_y_min + i as f64 * grid_step).min(rho_y_max)).collect();
    let samples = grid.par_iter().map(|&y| sample(y, delta, q)).collect::<Result<Vec<_>>>()?;
    let mut brackets = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for (&y, s) in grid.iter().zip(&samples) {
        if s.value.abs() <= s.err {
            continue;
        }
        if let Some((y0, v0)) = last {
            if v0.signum() != s.value.signum() {
                brackets.push((y0, y));
            }
        }
        last = Some((y, s.value));
    }
    Ok(brackets)
}

/// Polishes a sign-change bracket of the critical residual to a zero.
pub fn refine_critical(bracket: (f64, f64), delta: f64, q: &QuadratureSpec) -> Result<ZeroRecord> {
    let (lo, hi) = bracket;
    let f = |y: f64| sample(y, delta, q).map(|s| s.value);
    let (flo, fhi) = (f(lo)?, f(hi)?);
    let root = brent(f, lo, hi, flo, fhi, 1e-14 * hi.abs().max(1.0), 200)?;
    let residual = f(root)?.abs();
    Ok(ZeroRecord::critical(delta, root, residual))
}

/// All critical zeros with ρ_y in [rho_y_min, rho_y_max], by scan and refinement.
pub fn critical_zeros(
    delta: f64,
    rho_y_min: f64,
    rho_y_max: f64,
    grid_step: f64,
    q: &QuadratureSpec,
) -> Result<Vec<ZeroRecord>> {
    scan_critical(delta, rho_y_min, rho_y_max, grid_step, q)?
        .into_par_iter()
        .map(|b| refine_critical(b, delta, q))
        .collect()
}

/// Newton refinement of a critical zero from an unbracketed guess; used on
/// closely spaced branch pairs near edges, where no grid separates them.
pub fn refine_critical_near(rho_y_guess: f64, delta: f64, q: &QuadratureSpec) -> Result<ZeroRecord> {
    let mut y = rho_y_guess;
    for _ in 0..60 {
        let jet = z_jet(Complex64::new(0.5, y), delta, 1, None, q)?;
        let f = jet.ds[0].re;
        let df = -jet.ds[1].im;
        let step = f / df;
        y -= step;
        if step.abs() <= 1e-14 * y.abs().max(1.0) {
            let residual = sample(y, delta, q)?.value.abs();
            return Ok(ZeroRecord::critical(delta, y, residual));
        }
    }
    Err(Error::NoConvergence { what: "critical Newton", iterations: 60 })
}

/// Step size control of the critical curve continuation, in arclength of the
/// (Δ, ρ_y) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub initial: f64,
    pub min: f64,
    pub max: f64,
    pub max_points: usize,
    /// Initial direction along the curve: toward increasing Δ if true.
    pub increasing_delta: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { initial: 1e-3, min: 1e-9, max: 0.05, max_points: 20_000, increasing_delta: true }
    }
}

/// F1 and its gradient in (Δ, ρ_y).
fn residual_gradient(delta: f64, rho_y: f64, q: &QuadratureSpec) -> Result<(f64, [f64; 2])> {
    let jet = z_jet(Complex64::new(0.5, rho_y), delta, 1, Some(0), q)?;
    Ok((jet.ds[0].re, [jet.ddelta[0].re, -jet.ds[1].im]))
}

fn unit_tangent(grad: [f64; 2]) -> [f64; 2] {
    let n = grad[0].hypot(grad[1]);
    [-grad[1] / n, grad[0] / n]
}

/// Newton corrector on {F1 = 0, t·(x − x_pred) = 0}; returns the point and the
/// iteration count.
fn correct(pred: [f64; 2], t: [f64; 2], q: &QuadratureSpec) -> Result<([f64; 2], usize, f64)> {
    let mut x = pred;
    for it in 1..=12 {
        if !(x[0] > 0.0) {
            return Err(Error::Domain("continuation left delta > 0".into()));
        }
        let (f, g) = residual_gradient(x[0], x[1], q)?;
        let g2 = -(t[0] * (x[0] - pred[0]) + t[1] * (x[1] - pred[1]));
        let det = g[0] * t[1] - g[1] * t[0];
        let dx0 = (-f * t[1] - g[1] * g2) / det;
        let dx1 = (g[0] * g2 + f * t[0]) / det;
        x[0] += dx0;
        x[1] += dx1;
        if dx0.abs() <= 1e-13 * x[0] && dx1.abs() <= 1e-13 * x[1].abs().max(1.0) {
            let f = residual_gradient(x[0], x[1], q)?.0;
            return Ok((x, it, f.abs()));
        }
    }
    Err(Error::NoConvergence { what: "arclength corrector", iterations: 12 })
}

/// Pseudo-arclength continuation of the critical curve through `seed` within
/// delta_lo ≤ Δ ≤ delta_hi. Turning points in Δ are traversed and their indices
/// recorded; the trace stops at the Δ bounds, on returning to the seed, or after
/// `max_points` points.
pub fn trace_critical_curve(
    seed: &ZeroRecord,
    delta_lo: f64,
    delta_hi: f64,
    ctrl: &StepControl,
    q: &QuadratureSpec,
) -> Result<CurveTrace> {
    if seed.kind != ZeroKind::Critical {
        return Err(Error::Domain("critical trace needs a critical seed".into()));
    }
    if !(ctrl.min > 0.0 && ctrl.min <= ctrl.initial && ctrl.initial <= ctrl.max) {
        return Err(Error::Domain("step control needs 0 < min <= initial <= max".into()));
    }
    let start = [seed.delta, seed.rho_y];
    let mut points = vec![*seed];
    let mut turning_points = Vec::new();
    let mut x = start;
    let (_, g) = residual_gradient(x[0], x[1], q)?;
    let mut t = unit_tangent(g);
    if (t[0] < 0.0) == ctrl.increasing_delta {
        t = [-t[0], -t[1]];
    }
    let mut h = ctrl.initial;
    let mut travelled = 0.0;
    let mut closed = false;
    while points.len() < ctrl.max_points {
        let pred = [x[0] + h * t[0], x[1] + h * t[1]];
        match correct(pred, t, q) {
            Ok((xn, iters, residual)) => {
                let (_, gn) = residual_gradient(xn[0], xn[1], q)?;
                let mut tn = unit_tangent(gn);
                if tn[0] * t[0] + tn[1] * t[1] < 0.0 {
                    tn = [-tn[0], -tn[1]];
                }
                let step = (xn[0] - x[0]).hypot(xn[1] - x[1]);
                // A tangent reversal means the corrector jumped onto another curve.
                if tn[0] * t[0] + tn[1] * t[1] < 0.5 || step > 2.0 * h {
                    h *= 0.5;
                    if h < ctrl.min {
                        return Err(Error::StepCollapse { min_step: ctrl.min, delta: x[0], rho_y: x[1] });
                    }
                    continue;
                }
                if xn[0] < delta_lo || xn[0] > delta_hi {
                    break;
                }
                if tn[0].signum() != t[0].signum() && t[0] != 0.0 {
                    turning_points.push(points.len());
                }
                travelled += step;
                let to_start = (xn[0] - start[0]).hypot(xn[1] - start[1]);
                if travelled > 4.0 * h && to_start < 1.5 * h {
                    closed = true;
                    break;
                }
                points.push(ZeroRecord::critical(xn[0], xn[1], residual));
                x = xn;
                t = tn;
                if iters <= 3 {
                    h = (2.0 * h).min(ctrl.max);
                } else if iters >= 6 {
                    h *= 0.5;
                }
            }
            Err(Error::NoConvergence { .. }) | Err(Error::Domain(_)) => {
                h *= 0.5;
                if h < ctrl.min {
                    return Err(Error::StepCollapse { min_step: ctrl.min, delta: x[0], rho_y: x[1] });
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(CurveTrace { kind: ZeroKind::Critical, points, start_edge: None, end_edge: None, closed, turning_points })
}

/// Edge-equation residuals and the expansion coefficients at (Δ, ρ_y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeJet {
    pub f1: f64,
    pub f2: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub err: f64,
}

pub fn edge_jet(delta: f64, rho_y: f64, q: &QuadratureSpec) -> Result<EdgeJet> {
    let jet = z_jet(Complex64::new(0.5, rho_y), delta, 3, Some(1), q)?;
    Ok(EdgeJet {
        f1: jet.ds[0].re,
        f2: -jet.ds[1].im,
        a: jet.ddelta[0].re,
        b: jet.ddelta[1].im,
        c: -0.5 * jet.ds[2].re,
        d: -jet.ds[3].im / 6.0,
        err: jet.err,
    })
}

fn classify(delta: f64, rho_y: f64, j: &EdgeJet) -> Result<EdgeZero> {
    if j.c == 0.0 || j.a == 0.0 {
        return Err(Error::NotAnEdge(format!("degenerate fold at ({delta}, {rho_y}): a = {}, c = {}", j.a, j.c)));
    }
    let side = if -j.a / j.c > 0.0 { Side::Left } else { Side::Right };
    Ok(EdgeZero { delta_star: delta, rho_y_star: rho_y, side, a: j.a, b: j.b, c: j.c, d: j.d })
}

/// Solves F1 = F2 = 0 by Newton from a seed near an edge. A seed on ρ_y = 0,
/// where F2 vanishes identically, reduces to F1(0, Δ) = 0 in Δ alone.
pub fn solve_edge(seed_delta: f64, seed_rho_y: f64, q: &QuadratureSpec) -> Result<EdgeZero> {
    let mut delta = seed_delta;
    let mut rho = seed_rho_y;
    let on_axis = seed_rho_y == 0.0;
    for _ in 0..60 {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::NotAnEdge(format!("Newton left delta > 0 from ({seed_delta}, {seed_rho_y})")));
        }
        let j = edge_jet(delta, rho, q)?;
        let (dd, dr) = if on_axis {
            (-j.f1 / j.a, 0.0)
        } else {
            let det = j.a * 2.0 * j.c + j.b * j.f2;
            ((-j.f1 * 2.0 * j.c + j.f2 * j.f2) / det, (-j.a * j.f2 - j.b * j.f1) / det)
        };
        let limit = (0.05 / dd.abs()).min(0.5 / dr.abs()).min(1.0);
        delta += dd * limit;
        rho += dr * limit;
        if dd.abs() <= 1e-14 * delta && dr.abs() <= 1e-13 * rho.abs().max(1.0) {
            let j = edge_jet(delta, rho, q)?;
            return classify(delta, rho, &j);
        }
    }
    Err(Error::NoConvergence { what: "edge Newton", iterations: 60 })
}

/// Recomputes (a, b, c, d) at the edge and stores them back.
pub fn edge_coefficients(e: &mut EdgeZero, q: &QuadratureSpec) -> Result<(f64, f64, f64, f64)> {
    let j = edge_jet(e.delta_star, e.rho_y_star, q)?;
    e.a = j.a;
    e.b = j.b;
    e.c = j.c;
    e.d = j.d;
    Ok((j.a, j.b, j.c, j.d))
}

/// The two critical branches ρ_y* ± √(−a(Δ−Δ*)/c) + (b − ad/c)(Δ−Δ*)/(2c)
/// on the side of the edge where they exist.
pub fn critical_expansion(e: &EdgeZero, delta: f64) -> Result<(f64, f64)> {
    let eps = delta - e.delta_star;
    let radicand = -e.a * eps / e.c;
    if radicand < 0.0 {
        return Err(Error::WrongSide { delta, delta_star: e.delta_star });
    }
    let centre = e.rho_y_star + e.linear_coefficient() * eps;
    let root = radicand.sqrt();
    Ok((centre + root, centre - root))
}

/// Solves the edge nearest each turning point flagged on a critical trace.
pub fn turning_point_edges(trace: &CurveTrace, q: &QuadratureSpec) -> Vec<Result<EdgeZero>> {
    trace
        .turning_points
        .par_iter()
        .map(|&i| {
            let p = &trace.points[i];
            solve_edge(p.delta, p.rho_y, q)
        })
        .collect()
}
