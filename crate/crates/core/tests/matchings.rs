mod common;

use common::{arb_bounded_poset, boolean_lattice, chain};
use pircon_core::spm::{find_spms, is_pircon, is_zircon, lifting_check, verify_spm, Spm, SpmSearch};
use pircon_core::transform::{convert_sequence, fibre_poset, order_projection, verify_certificate, ConvertStep};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_found_matching_verifies_lifts_and_converts(p in arb_bounded_poset(5)) {
        let found = find_spms(&p, &SpmSearch::all(64)).unwrap();
        for m in &found {
            let verdict = verify_spm(&p, m).unwrap();
            prop_assert!(verdict.is_valid());
            prop_assert!(lifting_check(&p, m).is_empty());
            let proj = order_projection(&p, m).unwrap();
            prop_assert_eq!(fibre_poset(&proj).unwrap().len(), p.len());
            let cert = convert_sequence(&p, m, 64).unwrap();
            prop_assert!(verify_certificate(&cert).is_ok());
            prop_assert_eq!(cert.removals() > 0, !verdict.fixed_points.is_empty());
            prop_assert_eq!(cert.source.elements.len() - 2 * cert.zippings() - cert.removals(), p.len());
        }
    }

    #[test]
    fn certificates_re_verify(p in arb_bounded_poset(4)) {
        let cert = is_pircon(&p, 64).unwrap();
        prop_assert!(cert.verify(&p).is_ok());
        let zircon = is_zircon(&p, 64).unwrap();
        prop_assert!(zircon.verify(&p).is_ok());
        if zircon.certified() {
            prop_assert!(cert.certified());
        }
    }
}

#[test]
fn boolean_lattice_conversions_zip_only() {
    let b3 = boolean_lattice(3);
    let found = find_spms(&b3, &SpmSearch { limit: 4, fixed_point_free: true, max_elements: 64 }).unwrap();
    assert!(!found.is_empty());
    for m in &found {
        let cert = convert_sequence(&b3, m, 64).unwrap();
        assert_eq!(cert.removals(), 0);
        assert_eq!(cert.source.elements.len() - 2 * cert.zippings() - cert.removals(), b3.len());
        assert!(cert.steps.iter().all(|s| !matches!(s, ConvertStep::Removal { .. })));
        let json = serde_json::to_string(&cert).unwrap();
        let back = serde_json::from_str(&json).unwrap();
        assert!(verify_certificate(&back).is_ok());
    }
}

#[test]
fn chains_convert_with_removals() {
    for n in 3..7 {
        let c = chain(n);
        // Swap the top pair, fix everything else.
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(n - 2, n - 1);
        let m = Spm::new(map);
        assert!(verify_spm(&c, &m).unwrap().is_valid());
        let cert = convert_sequence(&c, &m, 64).unwrap();
        assert_eq!(cert.removals(), n - 2);
        assert!(verify_certificate(&cert).is_ok());
    }
}

#[test]
fn fixed_point_free_search_on_odd_ideals_is_empty() {
    let c = chain(3);
    let opts = SpmSearch { limit: 0, fixed_point_free: true, max_elements: 64 };
    assert!(find_spms(&c, &opts).unwrap().is_empty());
}

#[test]
fn s3_converts_with_one_clean_zipping() {
    use pircon_core::coxeter::{CoxeterSystem, CoxeterType};
    let w = CoxeterSystem::build(CoxeterType::A(2), 5040).unwrap();
    let all = w.all_elements();
    let p = w.bruhat_poset(&all);
    let m = Spm::new(all.iter().map(|&x| w.left_mul(0, x)).collect());
    let cert = convert_sequence(&p, &m, 64).unwrap();
    assert_eq!((cert.zippings(), cert.removals()), (1, 0));
    assert_eq!(cert.source.elements.len(), 8);
    assert_eq!(cert.final_isomorphism.len(), 6);
    assert!(verify_certificate(&cert).is_ok());
}
