use epstein::approx::{approx_critical_zeros, approx_real_offcritical};
use epstein::critical::{critical_expansion, critical_zeros, refine_critical_near, solve_edge};
use epstein::lattice_zeta::{big_z, critical_residual, direct_sum, epstein_zeta, offcritical_residuals};
use epstein::offcritical::{polish_offcritical, real_offcritical, trace_offcritical, OffStepControl};
use epstein::quadrature::QuadratureSpec;
use epstein::reference::{edge_by_label, inv_sqrt7, CRITICAL_ZEROS_INV_SQRT7, EDGE_ZEROS};
use epstein::ComplexPoint;
use proptest::prelude::*;
use rayon::prelude::*;

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn cp(re: f64, im: f64) -> ComplexPoint {
    ComplexPoint { re, im }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn continuation_matches_lattice_sum(x in 1.5..4.0f64, y in -10.0..10.0f64, d in 0.2..5.0f64) {
        let z = epstein_zeta(cp(x, y), d, &q()).unwrap();
        let s = direct_sum(cp(x, y), d, 300).unwrap();
        let diff = (z.value.re - s.value.re).hypot(z.value.im - s.value.im);
        prop_assert!(diff <= z.err_bound + s.truncation_bound, "{} > {} + {}", diff, z.err_bound, s.truncation_bound);
    }

    #[test]
    fn critical_residual_is_the_on_line_residual(y in 0.0..25.0f64, d in 0.2..5.0f64) {
        let f = critical_residual(y, d, &q()).unwrap();
        let r = offcritical_residuals(0.0, y, d, &q()).unwrap();
        prop_assert!((f - r.f1).abs() <= 1e-14);
        prop_assert!(r.f2.abs() <= 1e-14);
    }

    #[test]
    fn spectrum_invariant_under_inversion(d in 0.25..0.95f64) {
        let a = critical_zeros(d, 0.0, 8.0, 0.05, &q()).unwrap();
        let b = critical_zeros(1.0 / d, 0.0, 8.0, 0.05, &q()).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (za, zb) in a.iter().zip(&b) {
            prop_assert!((za.rho_y - zb.rho_y).abs() <= 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn approximate_and_exact_real_zeros_coexist(d in 0.01..0.3f64) {
        let exact = real_offcritical(d, &q()).unwrap();
        let approx = approx_real_offcritical(d).unwrap();
        prop_assert_eq!(exact.is_some(), approx.is_some(), "Δ = {}", d);
    }
}

#[test]
fn duality_on_strip_grid() {
    for d in [0.3, 0.7, 1.0] {
        for x in [0.1, 0.3, 0.5, 0.7, 0.9] {
            for y in [-12.0, -3.0, 0.8, 6.0, 17.0] {
                let a = big_z(cp(x, y), d, &q()).unwrap();
                let b = big_z(cp(1.0 - x, -y), d, &q()).unwrap();
                let diff = (a.value.re - b.value.re).hypot(a.value.im - b.value.im);
                assert!(diff <= 2.0 * a.err_bound.max(b.err_bound), "s = {x}+{y}i, Δ = {d}: {diff:e}");
            }
        }
    }
}

/// Half the gap between the two merging critical branches follows |Δ − Δ*|^{1/2}.
#[test]
fn square_root_law_at_every_edge() {
    let eps: Vec<f64> = (0..13).map(|i| 10f64.powf(-6.0 + 0.25 * i as f64)).collect();
    let failures: Vec<String> = EDGE_ZEROS
        .par_iter()
        .filter_map(|r| {
            let e = solve_edge(r.delta_star, r.rho_y_star, &q()).unwrap();
            // Branches exist on the side where −a(Δ − Δ*)/c > 0.
            let sign = if -e.a / e.c > 0.0 { 1.0 } else { -1.0 };
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for &h in &eps {
                let d = e.delta_star + sign * h;
                let (up, lo) = critical_expansion(&e, d).unwrap();
                let up = refine_critical_near(up, d, &q()).unwrap().rho_y;
                let lo = refine_critical_near(lo, d, &q()).unwrap().rho_y;
                xs.push(h.ln());
                ys.push((0.5 * (up - lo)).abs().ln());
            }
            let p = slope(&xs, &ys);
            ((p - 0.5).abs() > 0.02).then(|| format!("{}: {p}", r.label))
        })
        .collect();
    assert!(failures.is_empty(), "{failures:?}");
}

#[test]
fn traced_curves_leave_edges_as_square_roots() {
    for label in ["2a", "3a", "4a", "6a"] {
        let r = edge_by_label(label).unwrap();
        let e = solve_edge(r.delta_star, r.rho_y_star, &q()).unwrap();
        let t = trace_offcritical(&e, &q(), &OffStepControl::default()).unwrap();
        let first: Vec<_> = t.points.iter().filter(|p| (p.delta - e.delta_star).abs() <= 1e-3).collect();
        assert!(first.len() >= 4, "{label}: {} points in the first decade", first.len());
        let xs: Vec<f64> = first.iter().map(|p| (p.delta - e.delta_star).abs().ln()).collect();
        let ys: Vec<f64> = first.iter().map(|p| p.drho_x().abs().ln()).collect();
        let p = slope(&xs, &ys);
        assert!((p - 0.5).abs() <= 0.02, "{label}: slope {p}");
        // Prefactor from the smallest offset, where the correction is O(|Δ − Δ*|).
        let p0 = first[0];
        let pref = p0.drho_x().abs() / (p0.delta - e.delta_star).abs().sqrt();
        assert!((pref / e.sqrt_prefactor() - 1.0).abs() <= 0.01, "{label}: {pref} vs {}", e.sqrt_prefactor());
    }
}

#[test]
fn offcritical_zeros_come_in_quadruples() {
    let r = edge_by_label("3a").unwrap();
    let e = solve_edge(r.delta_star, r.rho_y_star, &q()).unwrap();
    let t = trace_offcritical(&e, &q(), &OffStepControl::default()).unwrap();
    let step = (t.points.len() / 6).max(1);
    for p in t.points.iter().step_by(step) {
        for (sx, sy) in [(-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
            let m = polish_offcritical((sx * p.drho_x(), sy * p.rho_y), p.delta, &q()).unwrap();
            assert!((m.drho_x() - sx * p.drho_x()).abs() < 1e-10, "{p:?} → {m:?}");
            assert!((m.rho_y - sy * p.rho_y).abs() < 1e-10, "{p:?} → {m:?}");
        }
    }
}

#[test]
fn approximate_model_tracks_lowest_zeros_up_to_half() {
    for d in [0.05, 0.1, 0.2, 0.3, 0.4, 0.5] {
        let exact = critical_zeros(d, 0.0, 12.0, 0.02, &q()).unwrap();
        let approx = approx_critical_zeros(d, 12.0).unwrap();
        for (z, a) in exact.iter().zip(&approx).take(3) {
            assert!((z.rho_y - a).abs() <= 1e-3, "Δ = {d}: exact {} vs approx {a}", z.rho_y);
        }
    }
}

#[test]
fn approximate_model_degrades_with_height() {
    let d = inv_sqrt7();
    let exact = critical_zeros(d, 0.0, 15.0, 0.05, &q()).unwrap();
    let approx = approx_critical_zeros(d, 15.0).unwrap();
    assert_eq!(exact.len(), CRITICAL_ZEROS_INV_SQRT7.len());
    let diffs: Vec<f64> = exact.iter().zip(&approx).map(|(z, a)| (z.rho_y - a).abs()).collect();
    for w in diffs.windows(2) {
        assert!(w[1] >= 0.5 * w[0], "{diffs:?}");
    }
}
