use serde::{Deserialize, Serialize};

use super::{reduced_homology, SimplicialComplex};
use crate::poset::FinitePoset;

/// Homology-level verdict. `BallLike` and `SphereLike` are necessary conditions
/// for a PL ball or sphere, not certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    BallLike,
    SphereLike,
    Neither,
}

impl Classification {
    pub fn is_ball_or_sphere(self) -> bool {
        self != Classification::Neither
    }
}

/// `SphereLike`: strongly connected pseudomanifold without boundary whose reduced homology is that of a sphere.
/// `BallLike`: strongly connected pseudomanifold with boundary and trivial reduced homology.
///
/// When `expected_dim` is given, a complex of any other dimension is `Neither`.
pub fn classify_ball_or_sphere(complex: &SimplicialComplex, expected_dim: Option<isize>) -> Classification {
    let Some(dim) = complex.dim() else {
        return Classification::Neither;
    };
    if expected_dim.is_some_and(|d| d != dim) {
        return Classification::Neither;
    }
    let report = complex.is_pseudomanifold_with_boundary();
    if !report.is_pseudomanifold || !report.strongly_connected {
        return Classification::Neither;
    }
    let homology = reduced_homology(complex);
    match (report.has_boundary(), homology.is_trivial(), homology.is_sphere(dim)) {
        (false, _, true) => Classification::SphereLike,
        (true, true, _) => Classification::BallLike,
        _ => Classification::Neither,
    }
}

/// Verdict on the order complex of one open interval `(lower, upper)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalClass {
    pub lower: String,
    pub upper: String,
    /// Dimension of the order complex; `-1` for an empty interval.
    pub dim: isize,
    pub class: Classification,
}

/// Classifies `Δ(u, w)` for every pair `u < w`, in lexicographic order of indices.
pub fn classify_open_intervals(p: &FinitePoset) -> Vec<IntervalClass> {
    let mut out = Vec::new();
    for u in 0..p.len() {
        for w in p.up_set(u).ones().filter(|&w| w != u) {
            let open = p.open_interval(u, w).expect("u < w").to_poset();
            let complex = SimplicialComplex::order_complex(&open);
            out.push(IntervalClass {
                lower: p.id(u).to_string(),
                upper: p.id(w).to_string(),
                dim: complex.dim().unwrap_or(-1),
                class: classify_ball_or_sphere(&complex, None),
            });
        }
    }
    out
}
