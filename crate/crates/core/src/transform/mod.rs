//! Zippers, removals, order projections and the conversion pipeline that
//! rebuilds a poset with an SPM from `[0̂, M(1̂)] × 2`.

mod convert;
mod projection;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{chain2_index, chain2_split, find_isomorphism, FinitePoset, Level, PosetError};
use crate::spm::SpmError;

pub use convert::{convert_sequence, verify_certificate, ConvertCertificate, ConvertStep};
pub use projection::{fibre_poset, order_projection, OrderProjection};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("poset needs a minimum and a maximum")]
    Unbounded,
    #[error("({0}) is not a proper zipper")]
    NotProper(String),
    #[error("`{0}` is not removable")]
    NotRemovable(String),
    #[error("matching is not an SPM: {0}")]
    SpmInvalid(String),
    #[error("map is not an order projection: {0}")]
    NotOrderProjection(String),
    #[error("conversion audit failed: {0}")]
    AuditFailed(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Spm(#[from] SpmError),
}

/// One entry of an isomorphism `φ: [x, 1̂] → [x, c] × 2`, as ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiEntry {
    pub source: String,
    pub target: String,
    pub level: Level,
}

/// A coatom `c` and an isomorphism `φ: [x, 1̂] → [x, c] × 2` with `φ(z) = (x, β)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanWitness {
    pub coatom: usize,
    /// `(a, b, γ)` meaning `φ(a) = (b, γ)`, parent indices, ordered by `a`.
    pub phi: Vec<(usize, usize, Level)>,
}

impl CleanWitness {
    pub fn phi_ids(&self, p: &FinitePoset) -> Vec<PhiEntry> {
        self.phi
            .iter()
            .map(|&(a, b, level)| PhiEntry {
                source: p.id(a).to_string(),
                target: p.id(b).to_string(),
                level,
            })
            .collect()
    }
}

/// Tries the coatoms above `x` in index order and returns the first for which
/// `[x, 1̂] ≅ [x, c] × 2` by an isomorphism sending `z` to `(x, β)`.
pub fn clean_witness(p: &FinitePoset, x: usize, z: usize, cap: usize) -> Result<Option<CleanWitness>, TransformError> {
    let top = p.top().ok_or(TransformError::Unbounded)?;
    if !p.leq(x, z) {
        return Ok(None);
    }
    let upper = p.interval(x, top)?;
    let upper_poset = upper.to_poset();
    let z_pos = upper.elements().binary_search(&z).expect("z lies above x");
    let mut coatoms = p.coatoms();
    coatoms.sort_unstable();
    for c in coatoms {
        if !p.leq(x, c) {
            continue;
        }
        let lower = p.interval(x, c)?;
        if 2 * lower.len() != upper.len() {
            continue;
        }
        let doubled = lower.to_poset().product_with_chain2();
        let x_pos = lower.elements().binary_search(&x).expect("x is in [x, c]");
        let pin = [(z_pos, chain2_index(x_pos, Level::Beta))];
        if let Some(image) = find_isomorphism(&upper_poset, &doubled, &pin, cap)? {
            let phi = upper
                .elements()
                .iter()
                .zip(image)
                .map(|(&a, b)| {
                    let (base, level) = chain2_split(b);
                    (a, lower.elements()[base], level)
                })
                .collect();
            return Ok(Some(CleanWitness { coatom: c, phi }));
        }
    }
    Ok(None)
}

/// Evaluation of the zipper conditions on a triple `(x, y, z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZipperVerdict {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    /// (i) `z` covers exactly `x` and `y`.
    pub covers_only_xy: bool,
    /// (ii) `z = x ∨ y`.
    pub is_join: bool,
    /// (iii) `[0̂, x) = [0̂, y)`.
    pub same_strict_downsets: bool,
    /// `z ≠ 1̂`.
    pub proper: bool,
    /// Present iff the triple is a proper zipper with a clean witness.
    pub clean: Option<CleanWitness>,
}

impl ZipperVerdict {
    pub fn is_zipper(&self) -> bool {
        self.covers_only_xy && self.is_join && self.same_strict_downsets
    }

    pub fn is_proper(&self) -> bool {
        self.is_zipper() && self.proper
    }

    pub fn is_clean(&self) -> bool {
        self.is_proper() && self.clean.is_some()
    }
}

/// Checks (i)–(iii), properness, and searches a cleanness witness for proper zippers.
pub fn detect_zipper(p: &FinitePoset, x: usize, y: usize, z: usize, cap: usize) -> Result<ZipperVerdict, TransformError> {
    let (Some(_), Some(top)) = (p.bottom(), p.top()) else {
        return Err(TransformError::Unbounded);
    };
    let distinct = x != y && y != z && x != z;
    let mut lower: Vec<usize> = p.lower_covers(z).to_vec();
    lower.sort_unstable();
    let mut pair = vec![x, y];
    pair.sort_unstable();
    let strict = |a: usize| {
        let mut s = p.down_set(a).clone();
        s.set(a, false);
        s
    };
    let mut v = ZipperVerdict {
        x,
        y,
        z,
        covers_only_xy: distinct && lower == pair,
        is_join: distinct && p.join(x, y) == Some(z),
        same_strict_downsets: distinct && strict(x) == strict(y),
        proper: z != top,
        clean: None,
    };
    if v.is_proper() {
        v.clean = clean_witness(p, x, z, cap)?;
    }
    Ok(v)
}

/// Id for the merged element of a zipping: `x+y`, primed until unused.
fn merged_id(p: &FinitePoset, x: usize, y: usize) -> String {
    let mut id = format!("{}+{}", p.id(x), p.id(y));
    while p.index_of(&id).is_some() {
        id.push('\'');
    }
    id
}

/// Zips a proper zipper: `x, y, z` become one element placed where `x` was.
pub fn zip(p: &FinitePoset, zipper: &ZipperVerdict) -> Result<FinitePoset, TransformError> {
    let (x, y, z) = (zipper.x, zipper.y, zipper.z);
    if !zipper.is_proper() {
        return Err(TransformError::NotProper(format!("{}, {}, {}", p.id(x), p.id(y), p.id(z))));
    }
    Ok(zip_triple(p, x, y, z)?.0)
}

/// The zipping order on `(P − {x,y,z}) ∪ {xy}`, without checking the zipper
/// conditions, and the id given to `xy`. The result is validated as a poset.
pub(crate) fn zip_triple(p: &FinitePoset, x: usize, y: usize, z: usize) -> Result<(FinitePoset, String), TransformError> {
    // `None` is the merged element.
    let slots: Vec<Option<usize>> = (0..p.len())
        .filter(|&a| a != y && a != z)
        .map(|a| (a != x).then_some(a))
        .collect();
    let merged = merged_id(p, x, y);
    let ids = slots
        .iter()
        .map(|s| match s {
            Some(a) => p.id(*a).to_string(),
            None => merged.clone(),
        })
        .collect();
    let zipped = FinitePoset::from_relation(ids, |i, j| match (slots[i], slots[j]) {
        (Some(a), Some(b)) => p.leq(a, b),
        (None, Some(b)) => p.leq(x, b) || p.leq(y, b),
        (Some(a), None) => p.leq(a, x),
        (None, None) => true,
    })?;
    Ok((zipped, merged))
}

/// Evaluation of the removability conditions on `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemovableVerdict {
    pub z: usize,
    /// The unique element covered by `z`, if there is exactly one.
    pub x: Option<usize>,
    pub clean: Option<CleanWitness>,
}

impl RemovableVerdict {
    pub fn is_removable(&self) -> bool {
        self.x.is_some() && self.clean.is_some()
    }
}

pub fn detect_removable(p: &FinitePoset, z: usize, cap: usize) -> Result<RemovableVerdict, TransformError> {
    let (Some(_), Some(top)) = (p.bottom(), p.top()) else {
        return Err(TransformError::Unbounded);
    };
    if z == top {
        return Err(TransformError::NotRemovable(p.id(z).to_string()));
    }
    let x = match p.lower_covers(z) {
        [x] => Some(*x),
        _ => None,
    };
    let clean = match x {
        Some(x) => clean_witness(p, x, z, cap)?,
        None => None,
    };
    Ok(RemovableVerdict { z, x, clean })
}

/// `P − {z}` for a removable `z`.
pub fn remove(p: &FinitePoset, z: usize, cap: usize) -> Result<FinitePoset, TransformError> {
    if !detect_removable(p, z, cap)?.is_removable() {
        return Err(TransformError::NotRemovable(p.id(z).to_string()));
    }
    Ok(p.without(&[z]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boolean2() -> FinitePoset {
        FinitePoset::from_covers(["0", "a", "b", "1"], [("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")]).unwrap()
    }

    fn chain(n: usize) -> FinitePoset {
        let ids: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let covers: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        FinitePoset::from_cover_indices(ids, &covers).unwrap()
    }

    #[test]
    fn boolean_atoms_form_an_improper_zipper() {
        let b2 = boolean2();
        let v = detect_zipper(&b2, 1, 2, 3, 64).unwrap();
        assert!(v.is_zipper());
        assert!(!v.proper);
        assert!(v.clean.is_none());
        assert!(matches!(zip(&b2, &v), Err(TransformError::NotProper(_))));
    }

    #[test]
    fn chains_have_no_zippers() {
        let c = chain(3);
        for x in 0..3 {
            for y in 0..3 {
                for z in 0..3 {
                    assert!(!detect_zipper(&c, x, y, z, 64).unwrap().is_zipper());
                }
            }
        }
    }

    #[test]
    fn zipping_a_clean_zipper_in_a_doubled_square() {
        // [0̂, a] × 2 on top of an extra bottom and under an extra top makes a proper zipper:
        // x = (a,α), y = (0,β), z = (a,β).
        let p = boolean2().product_with_chain2();
        let id = |s: &str| p.index_of(s).unwrap();
        // In B₂ × 2 the triple is a zipper only if z ≠ 1̂, which holds.
        let v = detect_zipper(&p, id("(a,α)"), id("(0,β)"), id("(a,β)"), 64).unwrap();
        assert!(v.is_proper(), "{v:?}");
        assert!(v.is_clean());
        let zipped = zip(&p, &v).unwrap();
        assert_eq!(zipped.len(), p.len() - 2);
        assert!(zipped.index_of("(a,α)+(0,β)").is_some());
        let w = v.clean.as_ref().unwrap();
        let phi_z = w.phi.iter().find(|e| e.0 == id("(a,β)")).unwrap();
        assert_eq!((phi_z.1, phi_z.2), (id("(a,α)"), Level::Beta));
    }

    #[test]
    fn removal_in_a_doubled_chain() {
        // The ideal [0̂, m] of the 3-chain, doubled.
        let p = chain(2).product_with_chain2();
        let z = p.index_of("(c0,β)").unwrap();
        let v = detect_removable(&p, z, 64).unwrap();
        assert_eq!(v.x, p.index_of("(c0,α)"));
        assert!(v.is_removable(), "{v:?}");
        assert!(p.coatoms().contains(&v.clean.as_ref().unwrap().coatom));
        assert_eq!(remove(&p, z, 64).unwrap().len(), 3);
        let top = p.top().unwrap();
        assert!(matches!(detect_removable(&p, top, 64), Err(TransformError::NotRemovable(_))));

        let q = boolean2().product_with_chain2();
        let two = q.index_of("(a,β)").unwrap();
        assert!(!detect_removable(&q, two, 64).unwrap().is_removable());
        assert!(matches!(remove(&q, two, 64), Err(TransformError::NotRemovable(_))));
    }
}
