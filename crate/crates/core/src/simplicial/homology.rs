use std::collections::HashMap;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{invariant_factors, Face, SimplicialComplex};

/// Reduced integer homology. Entry `i` of each vector describes dimension `i − 1`,
/// so the first entry is `H̃_{-1}`, nonzero only for the complex `{∅}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyProfile {
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<u64>>,
}

impl HomologyProfile {
    pub fn betti_at(&self, dim: isize) -> usize {
        usize::try_from(dim + 1)
            .ok()
            .and_then(|i| self.betti.get(i).copied())
            .unwrap_or(0)
    }

    pub fn torsion_at(&self, dim: isize) -> &[u64] {
        usize::try_from(dim + 1)
            .ok()
            .and_then(|i| self.torsion.get(i))
            .map_or(&[], Vec::as_slice)
    }

    pub fn has_torsion(&self) -> bool {
        self.torsion.iter().any(|t| !t.is_empty())
    }

    /// All reduced homology vanishes.
    pub fn is_trivial(&self) -> bool {
        self.betti.iter().all(|&b| b == 0) && !self.has_torsion()
    }

    /// Homology of the `dim`-sphere: one free generator in degree `dim`, nothing else.
    pub fn is_sphere(&self, dim: isize) -> bool {
        !self.has_torsion()
            && self.betti_at(dim) == 1
            && self
                .betti
                .iter()
                .enumerate()
                .all(|(i, &b)| i as isize - 1 == dim || b == 0)
    }

    /// `Σ (-1)^k β̃_k`.
    pub fn euler_characteristic(&self) -> i64 {
        self.betti
            .iter()
            .enumerate()
            .map(|(i, &b)| if i % 2 == 1 { b as i64 } else { -(b as i64) })
            .sum()
    }
}

/// Reduced homology with integer coefficients from the Smith normal forms of the
/// augmented boundary maps `∂_k : C_k → C_{k−1}`, `k ≥ 0`, where `C_{−1} = ℤ·∅`.
pub fn reduced_homology(complex: &SimplicialComplex) -> HomologyProfile {
    let Some(dim) = complex.dim() else {
        return HomologyProfile {
            betti: Vec::new(),
            torsion: Vec::new(),
        };
    };
    let levels = (dim + 2) as usize;
    let mut by_level: Vec<Vec<&Face>> = vec![Vec::new(); levels];
    for f in complex.faces() {
        by_level[f.len()].push(f);
    }
    let positions: Vec<HashMap<&Face, usize>> = by_level
        .iter()
        .map(|fs| fs.iter().enumerate().map(|(i, f)| (*f, i)).collect())
        .collect();

    // boundary[l] is ∂ from level l (faces with l vertices) to level l − 1.
    let mut rank = vec![0usize; levels + 1];
    let mut factors: Vec<Vec<u64>> = vec![Vec::new(); levels + 1];
    for l in 1..levels {
        let mut entries = Vec::new();
        for (col, f) in by_level[l].iter().enumerate() {
            for skip in 0..f.len() {
                let mut g: Face = (*f).clone();
                g.remove(skip);
                let row = positions[l - 1][&g];
                entries.push((row, col, if skip % 2 == 0 { 1 } else { -1 }));
            }
        }
        let d = invariant_factors(by_level[l - 1].len(), by_level[l].len(), &entries);
        rank[l] = d.len();
        factors[l] = d
            .into_iter()
            .filter_map(|x| {
                let x = x.to_u64().expect("torsion coefficient fits in u64");
                (x > 1).then_some(x)
            })
            .collect();
    }
    let betti = (0..levels)
        .map(|l| by_level[l].len() - rank[l] - rank[l + 1])
        .collect();
    let torsion = (0..levels).map(|l| factors[l + 1].clone()).collect();
    HomologyProfile { betti, torsion }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::FinitePoset;

    fn simplex_boundary(d: usize) -> SimplicialComplex {
        let verts: Vec<String> = (0..=d + 1).map(|i| format!("v{i}")).collect();
        let facets: Vec<Vec<String>> = (0..=d + 1)
            .map(|skip| verts.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, v)| v.clone()).collect())
            .collect();
        SimplicialComplex::closure(&facets)
    }

    #[test]
    fn simplices_and_their_boundaries() {
        for d in 0..4 {
            let verts: Vec<String> = (0..=d).map(|i| format!("v{i}")).collect();
            let simplex = SimplicialComplex::closure(&[verts]);
            assert!(reduced_homology(&simplex).is_trivial(), "simplex of dim {d}");
            let sphere = simplex_boundary(d);
            assert!(reduced_homology(&sphere).is_sphere(d as isize), "boundary of {}-simplex", d + 1);
        }
    }

    #[test]
    fn empty_face_and_void() {
        let h = reduced_homology(&SimplicialComplex::empty_face_only());
        assert_eq!(h.betti, vec![1]);
        assert!(h.is_sphere(-1));
        assert!(reduced_homology(&SimplicialComplex::void()).is_trivial());
    }

    #[test]
    fn proper_part_of_boolean_lattice_b3_is_a_hexagon() {
        let ids: Vec<String> = (0..8u32).map(|m| format!("{m:03b}")).collect();
        let mut covers = Vec::new();
        for m in 0..8usize {
            for bit in 0..3 {
                if m & (1 << bit) == 0 {
                    covers.push((m, m | (1 << bit)));
                }
            }
        }
        let b3 = FinitePoset::from_cover_indices(ids, &covers).unwrap();
        let hex = SimplicialComplex::order_complex(&b3.proper_part().unwrap());
        assert_eq!(hex.f_vector(), vec![1, 6, 6]);
        let h = reduced_homology(&hex);
        assert_eq!(h.betti, vec![0, 0, 1]);
        assert!(!h.has_torsion());
    }

    #[test]
    fn projective_plane_has_two_torsion() {
        // Six-vertex triangulation of RP².
        let rp2 = SimplicialComplex::closure(&[
            vec!["1", "2", "3"],
            vec!["1", "3", "4"],
            vec!["1", "4", "5"],
            vec!["1", "5", "6"],
            vec!["1", "2", "6"],
            vec!["2", "3", "5"],
            vec!["2", "4", "5"],
            vec!["2", "4", "6"],
            vec!["3", "4", "6"],
            vec!["3", "5", "6"],
        ]);
        let h = reduced_homology(&rp2);
        assert_eq!(h.betti, vec![0, 0, 0, 0]);
        assert_eq!(h.torsion_at(1), &[2]);
        assert_eq!(h.euler_characteristic(), rp2.reduced_euler_characteristic());
    }
}
