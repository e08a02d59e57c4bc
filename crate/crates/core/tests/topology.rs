mod common;

use common::{arb_bounded_poset, arb_poset, boolean_lattice, chain};
use pircon_core::simplicial::{
    classify_ball_or_sphere, collapse_to_void, morse_matching_mu, reduced_homology, verify_acyclic, Classification,
    SimplicialComplex,
};
use proptest::prelude::*;

fn random_complex(facets: &[Vec<bool>]) -> SimplicialComplex {
    let family: Vec<Vec<String>> = facets
        .iter()
        .map(|bits| bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| format!("v{i}")).collect())
        .collect();
    SimplicialComplex::closure(&family)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homology_matches_euler_characteristic(
        facets in prop::collection::vec(prop::collection::vec(any::<bool>(), 6), 1..6)
    ) {
        let k = random_complex(&facets);
        let h = reduced_homology(&k);
        prop_assert_eq!(h.euler_characteristic(), k.reduced_euler_characteristic());
    }

    #[test]
    fn cones_are_acyclic(p in arb_poset(6)) {
        // A poset with a top element has a contractible order complex.
        let n = p.len();
        let ids = p.ids().iter().cloned().chain(std::iter::once("apex".to_string())).collect();
        let coned = pircon_core::FinitePoset::from_relation(ids, |a, b| b == n || (a < n && b < n && p.leq(a, b))).unwrap();
        prop_assert!(reduced_homology(&SimplicialComplex::order_complex(&coned)).is_trivial());
    }

    #[test]
    fn mu_matching_collapses(p in arb_bounded_poset(5)) {
        let mu = morse_matching_mu(&p).unwrap();
        prop_assert!(mu.matching.is_complete(&mu.complex));
        prop_assert!(verify_acyclic(&mu.complex, &mu.matching));
        let steps = collapse_to_void(&mu.complex, &mu.matching).unwrap();
        prop_assert_eq!(2 * steps.len(), mu.complex.num_faces());
    }

    #[test]
    fn link_of_a_vertex_in_a_join(a in 1usize..4, b in 1usize..4) {
        let left = SimplicialComplex::closure(&[(0..a).map(|i| format!("l{i}")).collect::<Vec<_>>()]);
        let right = SimplicialComplex::closure(&[(0..b).map(|i| format!("r{i}")).collect::<Vec<_>>()]);
        let joined = left.join(&right);
        prop_assert_eq!(joined.dim(), Some((a + b - 1) as isize));
        prop_assert!(reduced_homology(&joined).is_trivial());
    }
}

#[test]
fn boolean_lattices_have_spherical_proper_parts() {
    for rank in 1..=4 {
        let proper = boolean_lattice(rank).proper_part().unwrap();
        let k = SimplicialComplex::order_complex(&proper);
        let d = rank as isize - 2;
        assert_eq!(classify_ball_or_sphere(&k, Some(d)), Classification::SphereLike, "rank {rank}");
        assert!(reduced_homology(&k).is_sphere(d));
    }
}

#[test]
fn chains_have_ball_proper_parts() {
    for n in 3..7 {
        let k = SimplicialComplex::order_complex(&chain(n).proper_part().unwrap());
        assert_eq!(classify_ball_or_sphere(&k, None), Classification::BallLike);
    }
}

#[test]
fn bowtie_is_neither() {
    // Contractible and every edge lies in at most two triangles, but not strongly connected.
    let k = SimplicialComplex::closure(&[vec!["o", "a", "b"], vec!["o", "c", "d"]]);
    assert!(reduced_homology(&k).is_trivial());
    let report = k.is_pseudomanifold_with_boundary();
    assert!(report.is_pseudomanifold && !report.strongly_connected);
    assert_eq!(classify_ball_or_sphere(&k, Some(2)), Classification::Neither);
}

#[test]
fn json_round_trip() {
    let k = SimplicialComplex::closure(&[vec!["a", "b", "c"], vec!["c", "d"]]);
    let text = serde_json::to_string(&k.to_json_value()).unwrap();
    let back = SimplicialComplex::from_json(&text).unwrap();
    assert_eq!(back.f_vector(), k.f_vector());
    assert_eq!(back.facets().len(), 2);
}
