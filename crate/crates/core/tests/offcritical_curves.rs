use epstein::critical::solve_edge;
use epstein::lattice_zeta::epstein_zeta;
use epstein::offcritical::{trace_offcritical, OffStepControl};
use epstein::quadrature::QuadratureSpec;
use epstein::reference::edge_by_label;
use epstein::{ComplexPoint, CurveTrace, Side};

fn trace_from(label: &str) -> CurveTrace {
    let q = QuadratureSpec::default();
    let r = edge_by_label(label).unwrap();
    let e = solve_edge(r.delta_star, r.rho_y_star, &q).unwrap();
    trace_offcritical(&e, &q, &OffStepControl::default()).unwrap()
}

#[test]
fn right_edge_3a_joins_left_edge_3b() {
    let t = trace_from("3a");
    let end = t.end_edge.unwrap();
    let b = edge_by_label("3b").unwrap();
    assert_eq!(end.side, Side::Left);
    assert!((end.delta_star - b.delta_star).abs() < 1e-10 && (end.rho_y_star - b.rho_y_star).abs() < 1e-10);

    // End-to-end: every point is a zero of the lattice zeta function itself.
    let q = QuadratureSpec::default();
    for p in &t.points {
        let z = epstein_zeta(ComplexPoint { re: p.rho_x, im: p.rho_y }, p.delta, &q).unwrap();
        assert!(z.value.re.hypot(z.value.im) <= 1e-9, "{p:?}");
        assert!(p.drho_x() > 0.0);
    }
    // Δ increases strictly along the march.
    assert!(t.points.windows(2).all(|w| w[1].delta > w[0].delta));
}

#[test]
fn curve_from_11a_dips_before_rising() {
    let t = trace_from("11a");
    let start = t.start_edge.unwrap().rho_y_star;
    let min = t.points.iter().map(|p| p.rho_y).fold(f64::INFINITY, f64::min);
    assert!(min < start - 1e-4, "min {min} vs start {start}");
    assert!(t.points.last().unwrap().rho_y > start + 1.0);
}

#[test]
fn curves_avoid_factorisable_anisotropies() {
    let special = [1.0 / 2f64.sqrt(), 1.0 / 3f64.sqrt(), 0.5, 1.0 / 7f64.sqrt(), 1.0];
    for label in ["2a", "3a", "4a", "6a"] {
        let t = trace_from(label);
        let lo = t.start_edge.unwrap().delta_star;
        let hi = t.end_edge.unwrap().delta_star;
        for d in special {
            assert!(!(lo.min(hi) < d && d < lo.max(hi)), "{label} crosses {d}");
        }
    }
}
