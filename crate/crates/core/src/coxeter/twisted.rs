//! Twisted involutions, twisted identities and the matching `x ↦ θ(s)·x·s`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{CoxeterError, CoxeterSystem, DiagramAutomorphism};
use crate::poset::FinitePoset;
use crate::spm::Spm;

/// `I(θ)`, `ι(θ)`, their Bruhat posets and the rank `ρ` of `Br(I(θ))`.
#[derive(Debug, Clone)]
pub struct TwistedSets<'a> {
    group: &'a CoxeterSystem,
    theta: DiagramAutomorphism,
    /// `θ` on every element.
    theta_of: Vec<usize>,
    involutions: Vec<usize>,
    identities: Vec<usize>,
    is_involution: Vec<bool>,
    is_identity: Vec<bool>,
    br_involutions: FinitePoset,
    br_identities: FinitePoset,
    rho: Vec<Option<usize>>,
}

impl<'a> TwistedSets<'a> {
    pub fn new(group: &'a CoxeterSystem, theta: &DiagramAutomorphism) -> Result<Self, CoxeterError> {
        let theta = DiagramAutomorphism::new(group, theta.perm().to_vec())?;
        let n = group.order();
        let theta_of: Vec<usize> = (0..n).map(|x| theta.apply(group, x)).collect();

        let involutions: Vec<usize> = (0..n).filter(|&x| theta_of[x] == group.inverse(x)).collect();
        let by_definition: BTreeSet<usize> = (0..n)
            .map(|x| group.multiply(theta_of[x], group.inverse(x)))
            .collect();

        // Orbit of e under x ↦ θ(s)·x·s.
        let mut orbit = BTreeSet::from([group.identity()]);
        let mut stack = vec![group.identity()];
        while let Some(x) = stack.pop() {
            for s in 0..group.rank() {
                let y = group.right_mul(group.left_mul(theta.apply_generator(s), x), s);
                if orbit.insert(y) {
                    stack.push(y);
                }
            }
        }
        assert_eq!(orbit, by_definition, "twisted identities disagree with the orbit of e");
        let identities: Vec<usize> = by_definition.into_iter().collect();

        let mut is_involution = vec![false; n];
        involutions.iter().for_each(|&x| is_involution[x] = true);
        let mut is_identity = vec![false; n];
        identities.iter().for_each(|&x| is_identity[x] = true);
        assert!(
            identities.iter().all(|&x| is_involution[x]),
            "ι(θ) is not contained in I(θ)"
        );

        let br_involutions = group.bruhat_poset(&involutions);
        let ranks = br_involutions
            .is_graded()
            .expect("Br(I(θ)) is graded");
        let mut rho = vec![None; n];
        for (i, &x) in involutions.iter().enumerate() {
            rho[x] = Some(ranks[i]);
        }
        let br_identities = group.bruhat_poset(&identities);
        assert_eq!(
            br_identities.bottom().map(|b| identities[b]),
            Some(group.identity()),
            "e is not the minimum of Br(ι(θ))"
        );

        Ok(TwistedSets {
            group,
            theta,
            theta_of,
            involutions,
            identities,
            is_involution,
            is_identity,
            br_involutions,
            br_identities,
            rho,
        })
    }

    pub fn group(&self) -> &CoxeterSystem {
        self.group
    }

    pub fn theta(&self) -> &DiagramAutomorphism {
        &self.theta
    }

    pub fn theta_of(&self, x: usize) -> usize {
        self.theta_of[x]
    }

    /// `I(θ)`, increasing.
    pub fn involutions(&self) -> &[usize] {
        &self.involutions
    }

    /// `ι(θ)`, increasing.
    pub fn identities(&self) -> &[usize] {
        &self.identities
    }

    pub fn is_involution(&self, x: usize) -> bool {
        self.is_involution[x]
    }

    pub fn is_identity(&self, x: usize) -> bool {
        self.is_identity[x]
    }

    /// `Br(I(θ))`; poset index `i` is `involutions()[i]`.
    pub fn br_involutions(&self) -> &FinitePoset {
        &self.br_involutions
    }

    /// `Br(ι(θ))`; poset index `i` is `identities()[i]`.
    pub fn br_identities(&self) -> &FinitePoset {
        &self.br_identities
    }

    /// Rank of a twisted involution in `Br(I(θ))`.
    pub fn rho(&self, x: usize) -> Option<usize> {
        self.rho[x]
    }

    /// `θ(s)·x·s`.
    pub fn twisted_conjugate(&self, s: usize, x: usize) -> usize {
        let g = self.group;
        g.right_mul(g.left_mul(self.theta.apply_generator(s), x), s)
    }

    /// `{x ∈ ι(θ) | x ≤ w}`, increasing.
    pub fn identity_ideal(&self, w: usize) -> Vec<usize> {
        self.identities
            .iter()
            .copied()
            .filter(|&x| self.group.bruhat_leq(x, w))
            .collect()
    }

    /// `{x ∈ I(θ) | x ≤ w}`, increasing.
    pub fn involution_ideal(&self, w: usize) -> Vec<usize> {
        self.involutions
            .iter()
            .copied()
            .filter(|&x| self.group.bruhat_leq(x, w))
            .collect()
    }
}

/// One flipped generator `s ≠ θ(s)` and the order of `s·θ(s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NofEntry {
    pub s: String,
    pub theta_s: String,
    pub order: usize,
    pub even: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NofReport {
    pub holds: bool,
    pub flipped: Vec<NofEntry>,
}

impl NofReport {
    /// First flipped generator with `s·θ(s)` of odd order.
    pub fn witness(&self) -> Option<&NofEntry> {
        self.flipped.iter().find(|e| !e.even)
    }
}

/// Checks that `s·θ(s)` has even order for every `s ≠ θ(s)`.
pub fn nof_check(group: &CoxeterSystem, theta: &DiagramAutomorphism) -> NofReport {
    let flipped: Vec<NofEntry> = (0..group.rank())
        .filter(|&s| theta.apply_generator(s) != s)
        .map(|s| {
            let t = theta.apply_generator(s);
            let order = group.order_of(group.multiply(group.generator(s), group.generator(t)));
            NofEntry {
                s: group.generator_name(s),
                theta_s: group.generator_name(t),
                order,
                even: order.is_multiple_of(2),
            }
        })
        .collect();
    NofReport {
        holds: flipped.iter().all(|e| e.even),
        flipped,
    }
}

/// `M(x) = θ(s)·x·s` on `Br(ι(θ))_{≤w}` for a right descent `s` of `w`.
///
/// Returns the ideal, poset index `i` being `elements[i]`, together with `M`.
/// The matching is not verified here.
pub fn spm_twisted(
    sets: &TwistedSets<'_>,
    w: usize,
    s: usize,
) -> Result<(FinitePoset, Vec<usize>, Spm), CoxeterError> {
    let g = sets.group();
    if !sets.is_identity(w) {
        return Err(CoxeterError::NotATwistedIdentity(g.name(w).to_string()));
    }
    if s >= g.rank() || !g.has_right_descent(w, s) {
        return Err(CoxeterError::NoDescent {
            w: g.name(w).to_string(),
            s: if s < g.rank() { g.generator_name(s) } else { format!("#{s}") },
        });
    }
    let nof = nof_check(g, sets.theta());
    if !nof.holds {
        log::warn!(
            "NOF fails ({}·{} has order {}); M(x) = θ(s)xs need not be special",
            nof.witness().map(|e| e.s.as_str()).unwrap_or("?"),
            nof.witness().map(|e| e.theta_s.as_str()).unwrap_or("?"),
            nof.witness().map(|e| e.order).unwrap_or(0)
        );
    }
    let elements = sets.identity_ideal(w);
    let mut map = Vec::with_capacity(elements.len());
    for &x in &elements {
        let image = sets.twisted_conjugate(s, x);
        match elements.binary_search(&image) {
            Ok(i) => map.push(i),
            Err(_) => {
                return Err(CoxeterError::NotInIdealClosure {
                    w: g.name(w).to_string(),
                    x: g.name(x).to_string(),
                    image: g.name(image).to_string(),
                })
            }
        }
    }
    Ok((g.bruhat_poset(&elements), elements, Spm::new(map)))
}

/// Whether the open interval `(u, w)` of `Br(ι(θ))` equals that of `Br(I(θ))`.
pub fn full_interval_check(sets: &TwistedSets<'_>, u: usize, w: usize) -> bool {
    let g = sets.group();
    let strictly_between = |x: usize| x != u && x != w && g.bruhat_leq(u, x) && g.bruhat_leq(x, w);
    sets.involutions()
        .iter()
        .filter(|&&x| strictly_between(x))
        .all(|&x| sets.is_identity(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterType;
    use crate::poset::is_isomorphic;
    use crate::spm::{find_spms, verify_spm, SpmSearch};

    fn a(n: usize) -> CoxeterSystem {
        CoxeterSystem::build(CoxeterType::A(n), 5040).unwrap()
    }

    #[test]
    fn identity_automorphism_gives_trivial_identities() {
        let w = a(3);
        let sets = TwistedSets::new(&w, &DiagramAutomorphism::identity(3)).unwrap();
        assert_eq!(sets.identities(), &[0]);
        // θ = id: I(θ) is the set of involutions of S₄, including e.
        assert_eq!(sets.involutions().len(), 10);
        assert!(nof_check(&w, &DiagramAutomorphism::identity(3)).holds);
    }

    #[test]
    fn a3_flip() {
        let w = a(3);
        let flip = DiagramAutomorphism::flip(&w).unwrap();
        let sets = TwistedSets::new(&w, &flip).unwrap();
        let nof = nof_check(&w, &flip);
        assert!(nof.holds);
        assert_eq!(nof.flipped.len(), 2);
        assert_eq!(nof.flipped[0].order, 2);
        assert_eq!(sets.br_identities().bottom(), Some(0));
        assert!(sets.br_identities().is_graded().is_some());
        for (i, &x) in sets.identities().iter().enumerate() {
            assert_eq!(sets.br_identities().heights()[i], sets.rho(x).unwrap());
        }
        for &x in sets.identities() {
            for s in (0..3).filter(|&s| w.has_right_descent(x, s)) {
                let (p, _, m) = spm_twisted(&sets, x, s).unwrap();
                assert!(verify_spm(&p, &m).unwrap().is_valid(), "{} {}", w.name(x), s);
            }
        }
        assert!(matches!(spm_twisted(&sets, 0, 0), Err(CoxeterError::NoDescent { .. })));
    }

    #[test]
    fn a4_counterexample() {
        let w = a(4);
        let flip = DiagramAutomorphism::flip(&w).unwrap();
        let nof = nof_check(&w, &flip);
        assert!(!nof.holds);
        let witness = nof.witness().unwrap();
        assert_eq!((witness.s.as_str(), witness.theta_s.as_str(), witness.order), ("s2", "s3", 3));

        let sets = TwistedSets::new(&w, &flip).unwrap();
        let top = w.parse("s2s1s3s2s4s3").unwrap();
        assert!(sets.is_identity(top));
        let inv = w.bruhat_poset(&sets.involution_ideal(top));
        let cube = FinitePoset::from_relation(
            (0..8).map(|i| format!("{i:03b}")).collect(),
            |i, j| i & j == i,
        )
        .unwrap();
        assert!(is_isomorphic(&inv, &cube, 64).unwrap().is_some());

        let ideal = sets.identity_ideal(top);
        let removed = w.parse("s2s3s2").unwrap();
        assert_eq!(ideal.len(), 7);
        assert!(!ideal.contains(&removed) && sets.involution_ideal(top).contains(&removed));
        let iota = w.bruhat_poset(&ideal);
        let cube_minus = cube.without(&[cube.index_of("011").unwrap()]);
        assert!(is_isomorphic(&iota, &cube_minus, 64).unwrap().is_some());
        assert!(find_spms(&iota, &SpmSearch::all(64)).unwrap().is_empty());

        for s in (0..4).filter(|&s| w.has_right_descent(top, s)) {
            match spm_twisted(&sets, top, s) {
                Ok((p, _, m)) => assert!(!verify_spm(&p, &m).unwrap().is_valid()),
                Err(e) => assert!(matches!(e, CoxeterError::NotInIdealClosure { .. })),
            }
        }
    }

    #[test]
    fn cover_pairs_are_full() {
        let w = a(3);
        let flip = DiagramAutomorphism::flip(&w).unwrap();
        let sets = TwistedSets::new(&w, &flip).unwrap();
        let br = sets.br_identities();
        for (a, b) in br.cover_pairs() {
            assert!(full_interval_check(&sets, sets.identities()[a], sets.identities()[b]));
        }
    }
}
