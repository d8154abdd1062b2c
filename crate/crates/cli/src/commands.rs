//! Execution of the parsed subcommands.

use std::fs::File;
use std::io::{BufWriter, Write};

use epstein::approx::{approx_critical_zeros, approx_equation_residual, approx_real_offcritical};
use epstein::critical::{critical_zeros, refine_critical_near, solve_edge, trace_critical_curve, StepControl};
use epstein::lattice_zeta::{big_z, epstein_zeta};
use epstein::offcritical::{real_axis_residual, real_offcritical, trace_offcritical, OffStepControl};
use epstein::quadrature::QuadratureSpec;
use epstein::reference::{inv_sqrt7, CRITICAL_ZEROS_INV_SQRT7, EDGE_ZEROS};
use epstein::{ComplexPoint, EdgeZero, Error, ZeroKind, ZeroRecord};
use rayon::prelude::*;

use crate::output::{Cell, Report};
use crate::{CliError, Command, Common, Format};

const EDGE_HEADER: [&str; 10] =
    ["label", "side", "delta_star", "rho_y_star", "a", "b", "c", "d", "sqrt_prefactor", "linear_coefficient"];

const TABLE1_HEADER: [&str; 8] =
    ["label", "side", "delta_star", "rho_y_star", "ref_delta_star", "ref_rho_y_star", "err_delta_star", "err_rho_y_star"];

const TABLE2_HEADER: [&str; 7] =
    ["index", "rho_y_exact", "rho_y_approx", "ref_exact", "ref_approx", "err_exact", "err_approx"];

const APPROX_HEADER: [&str; 6] = ["index", "delta", "rho_y_approx", "residual", "rho_y_exact", "abs_diff"];

const EVAL_HEADER: [&str; 9] = ["s_re", "s_im", "delta", "zeta_re", "zeta_im", "zeta_err", "z_re", "z_im", "z_err"];

/// Distance within which a solved edge is identified with a listed one.
const LABEL_MATCH: f64 = 1e-6;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn quadrature(common: &Common) -> Result<QuadratureSpec, CliError> {
    if !(common.tol >= 1e-14 && common.tol.is_finite()) {
        return Err(usage(format!("--tol must be a finite value of at least 1e-14, got {}", common.tol)));
    }
    Ok(QuadratureSpec { abs_tol: common.tol, rel_tol: common.tol, ..QuadratureSpec::default() })
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("--{name} must be positive, got {x}")))
    }
}

fn seed_edge(label: &str) -> Result<(String, f64, f64), CliError> {
    EDGE_ZEROS
        .iter()
        .find(|e| e.label.eq_ignore_ascii_case(label))
        .map(|e| (e.label.to_string(), e.delta_star, e.rho_y_star))
        .ok_or_else(|| usage(format!("unknown edge label {label:?}")))
}

/// The listed label of an edge, if it coincides with one.
fn label_of(e: &EdgeZero) -> Option<&'static str> {
    EDGE_ZEROS
        .iter()
        .find(|r| (r.delta_star - e.delta_star).abs() < LABEL_MATCH && (r.rho_y_star - e.rho_y_star).abs() < LABEL_MATCH)
        .map(|r| r.label)
}

fn edge_row(label: &str, e: &EdgeZero) -> Vec<Cell> {
    vec![
        label.into(),
        e.side.as_str().into(),
        e.delta_star.into(),
        e.rho_y_star.into(),
        e.a.into(),
        e.b.into(),
        e.c.into(),
        e.d.into(),
        e.sqrt_prefactor().into(),
        e.linear_coefficient().into(),
    ]
}

fn edge_record(e: &EdgeZero) -> ZeroRecord {
    ZeroRecord::critical(e.delta_star, e.rho_y_star, 0.0)
}

/// Solves and emits a labelled seed list in order, in parallel.
fn solve_edges(seeds: &[(String, f64, f64)], q: &QuadratureSpec) -> Result<Vec<EdgeZero>, CliError> {
    Ok(seeds.par_iter().map(|(_, d, y)| solve_edge(*d, *y, q)).collect::<Result<Vec<_>, Error>>()?)
}

fn eval(s_re: f64, s_im: f64, delta: f64, q: &QuadratureSpec) -> Result<Report, CliError> {
    let delta = positive("delta", delta)?;
    let s = ComplexPoint { re: s_re, im: s_im };
    let zeta = epstein_zeta(s, delta, q)?;
    // Z has poles at s = 0 and s = 1 where ζ⁽²⁾ itself may still be finite.
    let z = match big_z(s, delta, q) {
        Ok(z) => Some(z),
        Err(Error::Pole { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let mut r = Report::table(&EVAL_HEADER);
    r.rows.push(vec![
        s_re.into(),
        s_im.into(),
        delta.into(),
        zeta.value.re.into(),
        zeta.value.im.into(),
        zeta.err_bound.into(),
        z.map(|z| z.value.re).into(),
        z.map(|z| z.value.im).into(),
        z.map(|z| z.err_bound).into(),
    ]);
    Ok(r)
}

fn scan(delta: f64, lo: f64, hi: f64, grid: f64, q: &QuadratureSpec) -> Result<Report, CliError> {
    let delta = positive("delta", delta)?;
    let grid = positive("grid-step", grid)?;
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return Err(usage(format!("--rho-y-max ({hi}) must exceed --rho-y-min ({lo})")));
    }
    let mut r = Report::zeros();
    for z in critical_zeros(delta, lo, hi, grid, q)? {
        r.push_zero(&z, None, "");
    }
    Ok(r)
}

fn approx(delta: f64, rho_y_max: f64, compare: bool, grid: f64, q: &QuadratureSpec) -> Result<Report, CliError> {
    let delta = positive("delta", delta)?;
    let rho_y_max = positive("rho-y-max", rho_y_max)?;
    let ys = approx_critical_zeros(delta, rho_y_max)?;
    let exact = if compare {
        // A margin above the range so the last approximate zero still has a partner.
        critical_zeros(delta, 0.0, rho_y_max + 1.0, positive("grid-step", grid)?, q)?
    } else {
        Vec::new()
    };
    let mut r = Report::table(&APPROX_HEADER);
    for (i, &y) in ys.iter().enumerate() {
        let res = approx_equation_residual(ComplexPoint { re: 0.5, im: y }, delta)?;
        let nearest = exact
            .iter()
            .map(|z| z.rho_y)
            .min_by(|a, b| (a - y).abs().total_cmp(&(b - y).abs()));
        r.rows.push(vec![
            Cell::Int(i as i64 + 1),
            delta.into(),
            y.into(),
            res.re.hypot(res.im).into(),
            nearest.into(),
            nearest.map(|e| (e - y).abs()).into(),
        ]);
    }
    Ok(r)
}

fn real_zeros(
    single: Option<f64>,
    min: f64,
    max: f64,
    count: usize,
    with_approx: bool,
    q: &QuadratureSpec,
) -> Result<Report, CliError> {
    let deltas: Vec<f64> = match single {
        Some(d) => vec![positive("delta", d)?],
        None => {
            let (min, max) = (positive("delta-min", min)?, positive("delta-max", max)?);
            if count == 0 || max < min {
                return Err(usage("sweep needs --count ≥ 1 and --delta-max ≥ --delta-min"));
            }
            if count == 1 {
                vec![min]
            } else {
                (0..count).map(|i| min + (max - min) * i as f64 / (count - 1) as f64).collect()
            }
        }
    };
    let exact = deltas.par_iter().map(|&d| real_offcritical(d, q)).collect::<Result<Vec<_>, Error>>()?;
    let approx = if with_approx {
        deltas.iter().map(|&d| approx_real_offcritical(d)).collect::<Result<Vec<_>, Error>>()?
    } else {
        vec![None; deltas.len()]
    };
    let mut r = Report::zeros();
    for ((&d, ex), ap) in deltas.iter().zip(&exact).zip(&approx) {
        if let Some((lo, hi)) = ex {
            for (id, x) in [(0, *lo), (1, *hi)] {
                let res = real_axis_residual(x - 0.5, d, q)?.abs();
                let z = ZeroRecord { delta: d, rho_x: x, rho_y: 0.0, kind: ZeroKind::RealOffCritical, residual: res };
                r.push_zero(&z, Some(id), "exact");
            }
        }
        if let Some((lo, hi)) = ap {
            for (id, x) in [(0, *lo), (1, *hi)] {
                r.rows.push(vec![
                    d.into(),
                    x.into(),
                    0.0.into(),
                    ZeroKind::RealOffCritical.as_str().into(),
                    Cell::Empty,
                    Cell::Int(id),
                    "approx".into(),
                ]);
            }
        }
    }
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn trace_critical(
    delta: f64,
    rho_y: f64,
    lo: f64,
    hi: f64,
    initial: f64,
    max_step: f64,
    max_points: usize,
    decreasing: bool,
    q: &QuadratureSpec,
) -> Result<Report, CliError> {
    let delta = positive("delta", delta)?;
    if !(lo > 0.0 && hi > lo && (lo..=hi).contains(&delta)) {
        return Err(usage(format!("need 0 < --delta-lo ≤ --delta ≤ --delta-hi, got {lo}, {delta}, {hi}")));
    }
    let seed = refine_critical_near(rho_y, delta, q)?;
    let ctrl = StepControl {
        initial: positive("initial-step", initial)?,
        max: positive("max-step", max_step)?,
        max_points,
        increasing_delta: !decreasing,
        ..StepControl::default()
    };
    let trace = trace_critical_curve(&seed, lo, hi, &ctrl, q)?;
    let mut r = Report::zeros();
    for (i, p) in trace.points.iter().enumerate() {
        let flag = if trace.turning_points.contains(&i) { "turning_point" } else { "" };
        r.push_zero(p, Some(0), flag);
    }
    r.curves.push(trace);
    Ok(r)
}

fn edges(
    delta: Option<f64>,
    rho_y: Option<f64>,
    label: Option<&str>,
    all: bool,
    q: &QuadratureSpec,
) -> Result<Report, CliError> {
    let seeds: Vec<(String, f64, f64)> = match (delta.zip(rho_y), label, all) {
        (Some((d, y)), None, false) => vec![("custom".into(), positive("delta", d)?, y)],
        (None, Some(l), false) => vec![seed_edge(l)?],
        (None, None, true) => EDGE_ZEROS.iter().map(|e| (e.label.to_string(), e.delta_star, e.rho_y_star)).collect(),
        _ => return Err(usage("give exactly one of --delta/--rho-y, --label or --all")),
    };
    let solved = solve_edges(&seeds, q)?;
    let mut r = Report::table(&EDGE_HEADER);
    for ((l, _, _), e) in seeds.iter().zip(&solved) {
        r.rows.push(edge_row(l, e));
    }
    Ok(r)
}

fn trace_off(
    label: Option<&str>,
    delta: Option<f64>,
    rho_y: Option<f64>,
    max_points: usize,
    q: &QuadratureSpec,
) -> Result<Report, CliError> {
    let (name, d, y) = match (label, delta.zip(rho_y)) {
        (Some(l), None) => seed_edge(l)?,
        (None, Some((d, y))) => ("custom".into(), positive("delta", d)?, y),
        _ => return Err(usage("give exactly one of --edge or --delta/--rho-y")),
    };
    let e = solve_edge(d, y, q)?;
    let ctrl = OffStepControl { max_points, ..OffStepControl::default() };
    let trace = trace_offcritical(&e, q, &ctrl)?;
    let mut r = Report::zeros();
    r.push_zero(&edge_record(&e), Some(0), &format!("start_edge={name}"));
    for p in &trace.points {
        r.push_zero(p, Some(0), "");
    }
    if let Some(end) = &trace.end_edge {
        let end_name = label_of(end).unwrap_or("unlisted");
        r.push_zero(&edge_record(end), Some(0), &format!("end_edge={end_name}"));
    }
    r.curves.push(trace);
    Ok(r)
}

fn table1(q: &QuadratureSpec) -> Result<Report, CliError> {
    let seeds: Vec<(String, f64, f64)> =
        EDGE_ZEROS.iter().map(|e| (e.label.to_string(), e.delta_star, e.rho_y_star)).collect();
    let solved = solve_edges(&seeds, q)?;
    let mut r = Report::table(&TABLE1_HEADER);
    for ((l, d, y), e) in seeds.iter().zip(&solved) {
        r.rows.push(vec![
            l.as_str().into(),
            e.side.as_str().into(),
            e.delta_star.into(),
            e.rho_y_star.into(),
            (*d).into(),
            (*y).into(),
            (e.delta_star - d).abs().into(),
            (e.rho_y_star - y).abs().into(),
        ]);
    }
    Ok(r)
}

fn table2(q: &QuadratureSpec) -> Result<Report, CliError> {
    let delta = inv_sqrt7();
    let top = CRITICAL_ZEROS_INV_SQRT7.iter().map(|r| r.0.max(r.1)).fold(0.0, f64::max) + 0.5;
    let exact: Vec<f64> = critical_zeros(delta, 0.0, top, 0.05, q)?.iter().map(|z| z.rho_y).collect();
    let approx = approx_critical_zeros(delta, top)?;
    let nearest = |v: &[f64], y: f64| v.iter().copied().min_by(|a, b| (a - y).abs().total_cmp(&(b - y).abs()));
    let mut r = Report::table(&TABLE2_HEADER);
    for (i, &(ref_exact, ref_approx)) in CRITICAL_ZEROS_INV_SQRT7.iter().enumerate() {
        let e = nearest(&exact, ref_exact);
        let a = nearest(&approx, ref_approx);
        r.rows.push(vec![
            Cell::Int(i as i64 + 1),
            e.into(),
            a.into(),
            ref_exact.into(),
            ref_approx.into(),
            e.map(|e| (e - ref_exact).abs()).into(),
            a.map(|a| (a - ref_approx).abs()).into(),
        ]);
    }
    Ok(r)
}

fn report(cmd: &Command, q: &QuadratureSpec) -> Result<Report, CliError> {
    match cmd {
        Command::Eval { s_re, s_im, delta, .. } => eval(*s_re, *s_im, *delta, q),
        Command::Scan { delta, rho_y_min, rho_y_max, grid_step, .. } => {
            scan(*delta, *rho_y_min, *rho_y_max, *grid_step, q)
        }
        Command::TraceCritical {
            delta, rho_y, delta_lo, delta_hi, initial_step, max_step, max_steps, decreasing, ..
        } => trace_critical(*delta, *rho_y, *delta_lo, *delta_hi, *initial_step, *max_step, *max_steps, *decreasing, q),
        Command::Edges { delta, rho_y, label, all, .. } => edges(*delta, *rho_y, label.as_deref(), *all, q),
        Command::TraceOffcritical { edge, delta, rho_y, max_steps, .. } => {
            trace_off(edge.as_deref(), *delta, *rho_y, *max_steps, q)
        }
        Command::RealZeros { delta, delta_min, delta_max, count, approx, .. } => {
            real_zeros(*delta, *delta_min, *delta_max, *count, *approx, q)
        }
        Command::Approx { delta, rho_y_max, compare, grid_step, .. } => {
            approx(*delta, *rho_y_max, *compare, *grid_step, q)
        }
        Command::Reproduce { table: 1, .. } => table1(q),
        Command::Reproduce { .. } => table2(q),
    }
}

fn emit(r: &Report, cmd: &Command, out: &mut dyn Write) -> std::io::Result<()> {
    match cmd.common().format {
        Format::Csv => r.write_csv(out),
        Format::Json => r.write_json(out, cmd.name(), cmd),
    }
}

/// Computes the result of one parsed command.
pub fn compute(cmd: &Command) -> Result<Report, CliError> {
    report(cmd, &quadrature(cmd.common())?)
}

/// Writes a result to `--output` if given, otherwise to `out`.
pub fn write_report(r: &Report, cmd: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match &cmd.common().output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            emit(r, cmd, &mut w)?;
            w.flush()?;
        }
        None => emit(r, cmd, out)?,
    }
    Ok(())
}
