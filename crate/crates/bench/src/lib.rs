//! Shared fixtures for the benchmarks.

use epstein::critical::solve_edge;
use epstein::quadrature::QuadratureSpec;
use epstein::reference::edge_by_label;
use epstein::EdgeZero;

/// Kernel abscissae spread over (0, 1], dense near the singular end.
pub fn kernel_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| (i as f64 / n as f64).powi(3)).collect()
}

/// A listed edge solved at the default tolerance.
pub fn solved_edge(label: &str) -> EdgeZero {
    let r = edge_by_label(label).unwrap_or_else(|| panic!("unknown edge {label}"));
    solve_edge(r.delta_star, r.rho_y_star, &QuadratureSpec::default()).expect("listed edge solves")
}
