//! Special partial matchings: verification, the lifting property, search,
//! and pircon / zircon certificates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{FinitePoset, PosetError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpmError {
    #[error("poset has no maximum")]
    NoMaximum,
    #[error("poset has {size} elements, the configured limit is {cap}")]
    SizeLimitExceeded { size: usize, cap: usize },
    #[error("matching does not assign an image to `{0}`")]
    Incomplete(String),
    #[error("`{0}` has several minimal elements below it: {1:?}")]
    MultipleMinima(String, Vec<String>),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A total map `M: P → P` given by element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Spm {
    map: Vec<usize>,
}

impl Spm {
    pub fn new(map: Vec<usize>) -> Self {
        Spm { map }
    }

    /// Reads `{"x": "M(x)", ...}`; every element of `p` needs an entry.
    pub fn from_ids(p: &FinitePoset, pairs: &BTreeMap<String, String>) -> Result<Self, SpmError> {
        let mut map = vec![usize::MAX; p.len()];
        for (a, b) in pairs {
            map[p.require(a)?] = p.require(b)?;
        }
        if let Some(x) = map.iter().position(|&m| m == usize::MAX) {
            return Err(SpmError::Incomplete(p.id(x).to_string()));
        }
        Ok(Spm { map })
    }

    pub fn to_ids(&self, p: &FinitePoset) -> BTreeMap<String, String> {
        self.map
            .iter()
            .enumerate()
            .map(|(x, &m)| (p.id(x).to_string(), p.id(m).to_string()))
            .collect()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.map.len()).filter(|&x| self.map[x] == x).collect()
    }

    /// No fixed points: a special matching.
    pub fn is_special(&self) -> bool {
        self.map.iter().enumerate().all(|(x, &m)| m != x)
    }
}

/// One failed axiom, with element ids as witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum SpmViolation {
    /// `M(M(x)) ≠ x`.
    NotInvolution { x: String, image: String, image_of_image: String },
    /// `M(1̂)` is not covered by `1̂`.
    TopNotMatchedToCoatom { top: String, image: String },
    /// `M(x)` is neither `x` nor a cover neighbour of `x`.
    NotCoverNeighbor { x: String, image: String },
    /// `x ⋖ y`, `M(x) ≠ y`, but `M(x) ≮ M(y)`.
    CoverIncompatible { x: String, y: String, mx: String, my: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpmVerdict {
    pub violations: Vec<SpmViolation>,
    pub fixed_points: Vec<String>,
}

impl SpmVerdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_special_matching(&self) -> bool {
        self.is_valid() && self.fixed_points.is_empty()
    }
}

/// Checks all four axioms and lists every violation.
pub fn verify_spm(p: &FinitePoset, m: &Spm) -> Result<SpmVerdict, SpmError> {
    let top = p.top().ok_or(SpmError::NoMaximum)?;
    if m.len() != p.len() {
        let missing = p.id(m.len().min(p.len().saturating_sub(1)));
        return Err(SpmError::Incomplete(missing.to_string()));
    }
    let id = |a: usize| p.id(a).to_string();
    let mut violations = Vec::new();
    for x in 0..p.len() {
        let mx = m.apply(x);
        if m.apply(mx) != x {
            violations.push(SpmViolation::NotInvolution {
                x: id(x),
                image: id(mx),
                image_of_image: id(m.apply(mx)),
            });
        }
    }
    if !p.covers(m.apply(top), top) {
        violations.push(SpmViolation::TopNotMatchedToCoatom {
            top: id(top),
            image: id(m.apply(top)),
        });
    }
    for x in 0..p.len() {
        let mx = m.apply(x);
        if mx != x && !p.covers(mx, x) && !p.covers(x, mx) {
            violations.push(SpmViolation::NotCoverNeighbor { x: id(x), image: id(mx) });
        }
    }
    for (x, y) in p.cover_pairs() {
        if m.apply(x) != y && !p.lt(m.apply(x), m.apply(y)) {
            violations.push(SpmViolation::CoverIncompatible {
                x: id(x),
                y: id(y),
                mx: id(m.apply(x)),
                my: id(m.apply(y)),
            });
        }
    }
    Ok(SpmVerdict {
        violations,
        fixed_points: m.fixed_points().into_iter().map(id).collect(),
    })
}

/// A pair `x < y` with `M(y) ≤ y` where clause (i), (ii) or (iii) of the lifting property fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftingViolation {
    pub x: String,
    pub y: String,
    pub clause: u8,
}

/// Exhaustive check of, for all `x < y` with `M(y) ≤ y`:
/// (i) `M(x) ≤ y`; (ii) `M(x) ≤ x ⟹ M(x) < M(y)`; (iii) `M(x) ≥ x ⟹ x ≤ M(y)`.
pub fn lifting_check(p: &FinitePoset, m: &Spm) -> Vec<LiftingViolation> {
    let mut out = Vec::new();
    for y in 0..p.len() {
        let my = m.apply(y);
        if !p.leq(my, y) {
            continue;
        }
        for x in p.down_set(y).ones().filter(|&x| x != y) {
            let mx = m.apply(x);
            let mut fail = |clause| {
                out.push(LiftingViolation {
                    x: p.id(x).to_string(),
                    y: p.id(y).to_string(),
                    clause,
                })
            };
            if !p.leq(mx, y) {
                fail(1);
            }
            if p.leq(mx, x) && !p.lt(mx, my) {
                fail(2);
            }
            if p.leq(x, mx) && !p.leq(x, my) {
                fail(3);
            }
        }
    }
    out
}

/// Options for [`find_spms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpmSearch {
    /// Stop after this many matchings.
    pub limit: usize,
    /// Only special matchings.
    pub fixed_point_free: bool,
    pub max_elements: usize,
}

impl Default for SpmSearch {
    fn default() -> Self {
        SpmSearch {
            limit: 1,
            fixed_point_free: false,
            max_elements: crate::Limits::default().max_elements,
        }
    }
}

impl SpmSearch {
    pub fn all(max_elements: usize) -> Self {
        SpmSearch {
            limit: usize::MAX,
            fixed_point_free: false,
            max_elements,
        }
    }
}

struct Search<'a> {
    p: &'a FinitePoset,
    order: Vec<usize>,
    top: Option<usize>,
    opts: SpmSearch,
    map: Vec<Option<usize>>,
    found: Vec<Spm>,
}

impl Search<'_> {
    /// Axiom 4 on every cover touching `a`, where both images are known.
    fn compatible_at(&self, a: usize) -> bool {
        let p = self.p;
        let ok = |x: usize, y: usize| match (self.map[x], self.map[y]) {
            (Some(mx), Some(my)) => mx == y || p.lt(mx, my),
            _ => true,
        };
        p.upper_covers(a).iter().all(|&y| ok(a, y)) && p.lower_covers(a).iter().all(|&x| ok(x, a))
    }

    fn run(&mut self, k: usize) {
        if self.found.len() >= self.opts.limit {
            return;
        }
        let Some(&x) = self.order.get(k) else {
            self.found.push(Spm::new(self.map.iter().map(|m| m.expect("assigned")).collect()));
            return;
        };
        if self.map[x].is_some() {
            self.run(k + 1);
            return;
        }
        let mut candidates: Vec<usize> = Vec::new();
        if Some(x) == self.top {
            candidates.extend(self.p.lower_covers(x).iter().copied());
        } else {
            candidates.extend(self.p.lower_covers(x).iter().copied());
            if !self.opts.fixed_point_free {
                candidates.push(x);
            }
            candidates.extend(self.p.upper_covers(x).iter().copied());
        }
        for c in candidates {
            if self.map[c].is_some() {
                continue;
            }
            self.map[x] = Some(c);
            self.map[c] = Some(x);
            if self.compatible_at(x) && self.compatible_at(c) {
                self.run(k + 1);
            }
            self.map[x] = None;
            self.map[c] = None;
            if self.found.len() >= self.opts.limit {
                return;
            }
        }
    }
}

/// Enumerates SPMs of `p` in a fixed order, up to `opts.limit`.
///
/// Elements are decided from the top down (decreasing height, then index); each
/// takes a lower cover, itself, or an upper cover, and the cover-compatibility
/// axiom is checked as soon as both ends of a cover are decided.
pub fn find_spms(p: &FinitePoset, opts: &SpmSearch) -> Result<Vec<Spm>, SpmError> {
    if p.len() > opts.max_elements {
        return Err(SpmError::SizeLimitExceeded {
            size: p.len(),
            cap: opts.max_elements,
        });
    }
    let top = p.top().ok_or(SpmError::NoMaximum)?;
    if opts.limit == 0 {
        return Ok(Vec::new());
    }
    let heights = p.heights();
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by_key(|&a| (std::cmp::Reverse(heights[a]), a));
    let mut search = Search {
        p,
        order,
        top: Some(top),
        opts: *opts,
        map: vec![None; p.len()],
        found: Vec::new(),
    };
    search.run(0);
    Ok(search.found)
}

/// The only minimal element of `P_{≤y}`.
pub fn unique_minimum_below(p: &FinitePoset, y: usize) -> Result<usize, SpmError> {
    let minima: Vec<usize> = p.down_set(y).ones().filter(|&a| p.lower_covers(a).is_empty()).collect();
    match minima.as_slice() {
        [m] => Ok(*m),
        _ => Err(SpmError::MultipleMinima(
            p.id(y).to_string(),
            minima.iter().map(|&a| p.id(a).to_string()).collect(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertifyMode {
    /// Every non-trivial principal ideal admits an SPM.
    Pircon,
    /// Every non-trivial principal ideal admits a special matching.
    Zircon,
}

/// An SPM on `P_{≤ideal_top}`, as ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealCertificate {
    pub ideal_top: String,
    pub spm: BTreeMap<String, String>,
    pub fixed_points: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealFailure {
    pub ideal_top: String,
    pub reason: String,
}

/// Per-ideal witnesses for every non-minimal element, in element order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PirconCertificate {
    pub mode: CertifyMode,
    pub ideals: Vec<IdealCertificate>,
    pub failures: Vec<IdealFailure>,
}

impl PirconCertificate {
    pub fn certified(&self) -> bool {
        self.failures.is_empty()
    }

    /// Re-checks every stored map against its ideal of `p` without searching.
    pub fn verify(&self, p: &FinitePoset) -> Result<(), String> {
        let mut covered = vec![false; p.len()];
        for cert in &self.ideals {
            let y = p.require(&cert.ideal_top).map_err(|e| e.to_string())?;
            covered[y] = true;
            let ideal = p.principal_ideal(y).to_poset();
            let m = Spm::from_ids(&ideal, &cert.spm).map_err(|e| format!("{}: {e}", cert.ideal_top))?;
            let verdict = verify_spm(&ideal, &m).map_err(|e| e.to_string())?;
            if !verdict.is_valid() {
                return Err(format!("{}: {:?}", cert.ideal_top, verdict.violations));
            }
            if self.mode == CertifyMode::Zircon && !verdict.fixed_points.is_empty() {
                return Err(format!("{}: matching has fixed points", cert.ideal_top));
            }
            if verdict.fixed_points != cert.fixed_points {
                return Err(format!("{}: recorded fixed points differ", cert.ideal_top));
            }
        }
        for f in &self.failures {
            covered[p.require(&f.ideal_top).map_err(|e| e.to_string())?] = true;
        }
        let minimal = p.minimal_elements();
        match (0..p.len()).find(|a| !covered[*a] && !minimal.contains(a)) {
            Some(a) => Err(format!("ideal below `{}` is not covered", p.id(a))),
            None => Ok(()),
        }
    }
}

/// Certifies `p` with SPMs proposed by `candidate`, which receives the index of
/// the ideal's top in `p` and the ideal as a standalone poset.
pub fn certify_with<F>(p: &FinitePoset, mode: CertifyMode, mut candidate: F) -> PirconCertificate
where
    F: FnMut(usize, &FinitePoset) -> Result<Spm, String>,
{
    let mut ideals = Vec::new();
    let mut failures = Vec::new();
    for y in 0..p.len() {
        if p.lower_covers(y).is_empty() {
            continue;
        }
        let ideal = p.principal_ideal(y).to_poset();
        let fail = |reason: String| IdealFailure {
            ideal_top: p.id(y).to_string(),
            reason,
        };
        let m = match candidate(y, &ideal) {
            Ok(m) => m,
            Err(reason) => {
                failures.push(fail(reason));
                continue;
            }
        };
        match verify_spm(&ideal, &m) {
            Ok(v) if v.is_valid() && (mode == CertifyMode::Pircon || v.fixed_points.is_empty()) => {
                ideals.push(IdealCertificate {
                    ideal_top: p.id(y).to_string(),
                    spm: m.to_ids(&ideal),
                    fixed_points: v.fixed_points,
                });
            }
            Ok(v) if v.is_valid() => failures.push(fail(format!("matching has fixed points {:?}", v.fixed_points))),
            Ok(v) => failures.push(fail(format!("candidate violates {:?}", v.violations))),
            Err(e) => failures.push(fail(e.to_string())),
        }
    }
    PirconCertificate { mode, ideals, failures }
}

fn certify_by_search(p: &FinitePoset, mode: CertifyMode, max_elements: usize) -> Result<PirconCertificate, SpmError> {
    let opts = SpmSearch {
        limit: 1,
        fixed_point_free: mode == CertifyMode::Zircon,
        max_elements,
    };
    for y in 0..p.len() {
        let size = p.down_set(y).count_ones(..);
        if size > max_elements {
            return Err(SpmError::SizeLimitExceeded { size, cap: max_elements });
        }
    }
    Ok(certify_with(p, mode, |_, ideal| {
        find_spms(ideal, &opts)
            .map_err(|e| e.to_string())?
            .into_iter()
            .next()
            .ok_or_else(|| match mode {
                CertifyMode::Pircon => "ideal admits no SPM".to_string(),
                CertifyMode::Zircon => "ideal admits no special matching".to_string(),
            })
    }))
}

/// Searches an SPM for every non-trivial principal ideal.
pub fn is_pircon(p: &FinitePoset, max_elements: usize) -> Result<PirconCertificate, SpmError> {
    certify_by_search(p, CertifyMode::Pircon, max_elements)
}

/// Searches a special matching for every non-trivial principal ideal.
pub fn is_zircon(p: &FinitePoset, max_elements: usize) -> Result<PirconCertificate, SpmError> {
    certify_by_search(p, CertifyMode::Zircon, max_elements)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> FinitePoset {
        let ids: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let covers: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        FinitePoset::from_cover_indices(ids, &covers).unwrap()
    }

    fn boolean(n: usize) -> FinitePoset {
        let ids: Vec<String> = (0..1usize << n).map(|m| format!("{m:0w$b}", w = n)).collect();
        let mut covers = Vec::new();
        for m in 0..1usize << n {
            for bit in 0..n {
                if m & (1 << bit) == 0 {
                    covers.push((m, m | (1 << bit)));
                }
            }
        }
        FinitePoset::from_cover_indices(ids, &covers).unwrap()
    }

    #[test]
    fn chains() {
        let c2 = chain(2);
        let swap = Spm::new(vec![1, 0]);
        assert!(verify_spm(&c2, &swap).unwrap().is_special_matching());
        assert_eq!(find_spms(&c2, &SpmSearch::all(64)).unwrap(), vec![swap]);

        let c3 = chain(3);
        let fixed_bottom = Spm::new(vec![0, 2, 1]);
        let v = verify_spm(&c3, &fixed_bottom).unwrap();
        assert!(v.is_valid());
        assert_eq!(v.fixed_points, vec!["c0"]);
        assert!(lifting_check(&c3, &fixed_bottom).is_empty());

        let bad = Spm::new(vec![2, 1, 0]);
        let v = verify_spm(&c3, &bad).unwrap();
        assert!(v
            .violations
            .iter()
            .any(|x| matches!(x, SpmViolation::NotCoverNeighbor { .. })));
    }

    #[test]
    fn boolean_lattice_b2_matchings() {
        let b2 = boolean(2);
        let all = find_spms(&b2, &SpmSearch::all(64)).unwrap();
        // 00, 01, 10, 11: top ↔ 01 with bottom ↔ 10 is one of them.
        assert!(all.contains(&Spm::new(vec![2, 3, 0, 1])));
        for m in &all {
            assert!(verify_spm(&b2, m).unwrap().is_valid());
            assert!(lifting_check(&b2, m).is_empty());
        }
    }

    #[test]
    fn boolean_lattice_minus_a_rank_two_element_admits_none() {
        let b3 = boolean(3);
        let shape = b3.without(&[b3.index_of("011").unwrap()]);
        assert!(find_spms(&shape, &SpmSearch::all(64)).unwrap().is_empty());
        let cert = is_pircon(&shape, 64).unwrap();
        assert!(!cert.certified());
        assert_eq!(cert.failures[0].ideal_top, "111");
        cert.verify(&shape).unwrap();
    }

    #[test]
    fn zircon_implies_pircon_on_boolean_lattices() {
        for n in 1..=3 {
            let b = boolean(n);
            let z = is_zircon(&b, 64).unwrap();
            assert!(z.certified());
            z.verify(&b).unwrap();
            assert!(is_pircon(&b, 64).unwrap().certified());
        }
        // The whole 3-chain has odd size, so only its 2-element ideal has a special matching.
        let c3 = chain(3);
        assert!(is_pircon(&c3, 64).unwrap().certified());
        let z = is_zircon(&c3, 64).unwrap();
        assert_eq!(z.ideals.len(), 1);
        assert_eq!(z.failures[0].ideal_top, "c2");
    }

    #[test]
    fn size_limit_and_missing_top() {
        assert!(matches!(
            find_spms(&boolean(3), &SpmSearch::all(4)),
            Err(SpmError::SizeLimitExceeded { size: 8, cap: 4 })
        ));
        let anti = FinitePoset::from_covers(["a", "b"], Vec::<(&str, &str)>::new()).unwrap();
        assert_eq!(find_spms(&anti, &SpmSearch::default()), Err(SpmError::NoMaximum));
        assert_eq!(verify_spm(&anti, &Spm::new(vec![0, 1])), Err(SpmError::NoMaximum));
    }

    #[test]
    fn minimum_below() {
        let c3 = chain(3);
        assert_eq!(unique_minimum_below(&c3, 2).unwrap(), 0);
        assert_eq!(unique_minimum_below(&c3, 0).unwrap(), 0);
        let vee = FinitePoset::from_covers(["a", "b", "t"], [("a", "t"), ("b", "t")]).unwrap();
        assert!(matches!(unique_minimum_below(&vee, 2), Err(SpmError::MultipleMinima(..))));
        // A two-atom ideal cannot carry an SPM: the search agrees.
        assert!(find_spms(&vee, &SpmSearch::all(64)).unwrap().is_empty());
    }

    #[test]
    fn id_maps_round_trip() {
        let c3 = chain(3);
        let m = Spm::new(vec![0, 2, 1]);
        let ids = m.to_ids(&c3);
        assert_eq!(Spm::from_ids(&c3, &ids).unwrap(), m);
        let mut partial = ids.clone();
        partial.remove("c0");
        assert_eq!(Spm::from_ids(&c3, &partial), Err(SpmError::Incomplete("c0".into())));
    }
}
