//! Published reference values shipped as data: edge zero coordinates and the
//! lowest critical zeros at Δ = 1/√7 with their approximate-model counterparts.

/// A labelled edge zero: `label` is the curve number followed by `a` for the
/// right edge and `b` for the left edge of the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeReference {
    pub label: &'static str,
    pub delta_star: f64,
    pub rho_y_star: f64,
}

const fn edge(label: &'static str, delta_star: f64, rho_y_star: f64) -> EdgeReference {
    EdgeReference { label, delta_star, rho_y_star }
}

pub const EDGE_ZEROS: [EdgeReference; 24] = [
    edge("1", 0.141733239663887, 0.0),
    edge("2a", 0.798382429865856, 9.17479405815734),
    edge("2b", 0.950672823506692, 13.5092488680816),
    edge("3a", 0.578095740200051, 11.2961629757333),
    edge("3b", 0.688797339793161, 12.7134082666419),
    edge("4a", 0.708261915413478, 14.3461052173020),
    edge("4b", 0.810471985748564, 17.3035168808027),
    edge("5a", 0.577833206956181, 15.7904269230734),
    edge("5b", 0.625830051933379, 16.7721421891791),
    edge("6a", 0.397042034784957, 14.9386821841068),
    edge("6b", 0.499955572107973, 16.3629327845743),
    edge("7a", 0.634086781531453, 17.8588321271621),
    edge("7b", 0.690295752437308, 19.4462462865857),
    edge("8a", 0.356573014664413, 16.4816098051657),
    edge("8b", 0.375454386384881, 16.8495675287149),
    edge("9a", 0.337272867689201, 18.5674591768417),
    edge("9b", 0.374296061779980, 19.3629136770424),
    edge("10a", 0.560652822542094, 19.8540419510498),
    edge("10b", 0.577320038404815, 20.4237238736290),
    edge("11a", 0.896821462590355, 19.0008766867965),
    edge("12a", 0.778481639573212, 20.0611304186419),
    edge("12b", 0.789270563104711, 20.2667094854061),
    edge("13a", 0.578437965650995, 20.8178435639014),
    edge("14a", 0.309679721075915, 20.1102459521285),
];

/// Looks up an edge by label, ignoring ASCII case.
pub fn edge_by_label(label: &str) -> Option<&'static EdgeReference> {
    EDGE_ZEROS.iter().find(|e| e.label.eq_ignore_ascii_case(label))
}

/// The partner label of a paired edge (`2a` ↔ `2b`), if the partner is listed.
pub fn partner_label(label: &str) -> Option<&'static str> {
    let (num, side) = label.split_at(label.len().checked_sub(1)?);
    let other = match side {
        "a" | "A" => "b",
        "b" | "B" => "a",
        _ => return None,
    };
    edge_by_label(&format!("{num}{other}")).map(|e| e.label)
}

/// Anisotropy of the lattice whose zeros are listed in `CRITICAL_ZEROS_INV_SQRT7`.
pub fn inv_sqrt7() -> f64 {
    1.0 / 7f64.sqrt()
}

/// The lowest eight critical zeros at Δ = 1/√7: (exact ρ_y, approximate-model ρ_y).
pub const CRITICAL_ZEROS_INV_SQRT7: [(f64, f64); 8] = [
    (1.133090035457, 1.133090358285),
    (4.475738283729, 4.475726461185),
    (6.845491712491, 6.845712742060),
    (7.931630248198, 7.930996972746),
    (10.19781031911, 10.20336832640),
    (11.16018454312, 11.14537554655),
    (12.48960334303, 12.51829228147),
    (14.13472514173, 14.05004856679),
];
