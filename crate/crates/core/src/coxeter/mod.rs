//! Finite Coxeter groups of types A, B, D and I₂(m), realized as permutations.
//!
//! * `A_n`: permutations of `0..=n`, `s_i` swaps `i−1` and `i`.
//! * `B_n`: signed permutations of `±1..±n` on `2n` points, `s_1` negates the first
//!   coordinate and `s_{i+1}` swaps coordinates `i` and `i+1`.
//! * `D_n`: even-signed permutations, `s_1` sends `1 ↦ −2`, `2 ↦ −1`; the other
//!   generators as in `B_n`.
//! * `I₂(m)`: the dihedral group on `ℤ/2m`, `s_1: i ↦ −i`, `s_2: i ↦ 2 − i`.
//!
//! Elements are enumerated breadth first, which lists them in ShortLex order of
//! their normal words; an element is addressed by its position in that list.

mod twisted;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{FinitePoset, PosetError};

pub use twisted::{full_interval_check, nof_check, spm_twisted, NofEntry, NofReport, TwistedSets};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("group of order {order} exceeds the configured limit {cap}")]
    GroupTooLarge { order: u128, cap: usize },
    #[error("unsupported Coxeter type: {0}")]
    UnsupportedType(String),
    #[error("invalid diagram automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("unknown group element or generator `{0}`")]
    UnknownElement(String),
    #[error("`{0}` is not a twisted identity")]
    NotATwistedIdentity(String),
    #[error("`{s}` is not a right descent of `{w}`")]
    NoDescent { w: String, s: String },
    #[error("M sends `{x}` to `{image}`, outside the ideal below `{w}`")]
    NotInIdealClosure { w: String, x: String, image: String },
    #[error("malformed Coxeter JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// Supported Cartan–Killing types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoxeterType {
    A(usize),
    B(usize),
    D(usize),
    /// Dihedral of order `2m`.
    I2(usize),
}

impl fmt::Display for CoxeterType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoxeterType::A(n) => write!(f, "A{n}"),
            CoxeterType::B(n) => write!(f, "B{n}"),
            CoxeterType::D(n) => write!(f, "D{n}"),
            CoxeterType::I2(m) => write!(f, "I2({m})"),
        }
    }
}

impl CoxeterType {
    pub fn rank(self) -> usize {
        match self {
            CoxeterType::A(n) | CoxeterType::B(n) | CoxeterType::D(n) => n,
            CoxeterType::I2(_) => 2,
        }
    }

    fn validate(self) -> Result<(), CoxeterError> {
        let ok = match self {
            CoxeterType::A(n) => n >= 1,
            CoxeterType::B(n) => n >= 2,
            CoxeterType::D(n) => n >= 2,
            CoxeterType::I2(m) => m >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(CoxeterError::UnsupportedType(self.to_string()))
        }
    }

    /// `|W|`, saturating.
    pub fn order(self) -> u128 {
        let fact = |n: usize| (1..=n as u128).fold(1u128, |a, b| a.saturating_mul(b));
        let pow2 = |n: usize| 1u128.checked_shl(n as u32).unwrap_or(u128::MAX);
        match self {
            CoxeterType::A(n) => fact(n + 1),
            CoxeterType::B(n) => pow2(n).saturating_mul(fact(n)),
            CoxeterType::D(n) => pow2(n - 1).saturating_mul(fact(n)),
            CoxeterType::I2(m) => 2 * m as u128,
        }
    }

    /// The Coxeter matrix, generators numbered from 0.
    pub fn coxeter_matrix(self) -> Vec<Vec<usize>> {
        let n = self.rank();
        let mut m = vec![vec![2; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        let mut set = |i: usize, j: usize, v: usize| {
            m[i][j] = v;
            m[j][i] = v;
        };
        match self {
            CoxeterType::A(n) => (1..n).for_each(|i| set(i - 1, i, 3)),
            CoxeterType::B(n) => {
                set(0, 1, 4);
                (2..n).for_each(|i| set(i - 1, i, 3));
            }
            CoxeterType::D(n) => {
                if n >= 3 {
                    set(0, 2, 3);
                }
                (2..n).for_each(|i| set(i - 1, i, 3));
            }
            CoxeterType::I2(k) => set(0, 1, k),
        }
        m
    }

    fn generators(self) -> Vec<Vec<u16>> {
        let swap = |size: usize, pairs: &[(usize, usize)]| -> Vec<u16> {
            let mut p: Vec<u16> = (0..size as u16).collect();
            for &(a, b) in pairs {
                p.swap(a, b);
            }
            p
        };
        match self {
            CoxeterType::A(n) => (1..=n).map(|i| swap(n + 1, &[(i - 1, i)])).collect(),
            CoxeterType::B(n) | CoxeterType::D(n) => {
                let first = if matches!(self, CoxeterType::B(_)) {
                    swap(2 * n, &[(0, n)])
                } else {
                    swap(2 * n, &[(0, n + 1), (1, n)])
                };
                std::iter::once(first)
                    .chain((1..n).map(|i| swap(2 * n, &[(i - 1, i), (n + i - 1, n + i)])))
                    .collect()
            }
            CoxeterType::I2(m) => {
                let size = 2 * m;
                let refl = |shift: usize| -> Vec<u16> { (0..size).map(|i| ((shift + size - i) % size) as u16).collect() };
                vec![refl(0), refl(2)]
            }
        }
    }
}

fn compose(u: &[u16], v: &[u16]) -> Vec<u16> {
    v.iter().map(|&p| u[p as usize]).collect()
}

/// A finite Coxeter system with every element enumerated.
#[derive(Debug, Clone)]
pub struct CoxeterSystem {
    kind: CoxeterType,
    matrix: Vec<Vec<usize>>,
    perms: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
    words: Vec<Vec<usize>>,
    names: Vec<String>,
    /// `right[s][w] = ws`.
    right: Vec<Vec<usize>>,
    /// `left[s][w] = sw`.
    left: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    /// `below[w] = {u | u ≤ w}` in Bruhat order.
    below: Vec<FixedBitSet>,
}

impl CoxeterSystem {
    /// Enumerates `W`; fails before enumeration when `|W|` exceeds `max_order`.
    pub fn build(kind: CoxeterType, max_order: usize) -> Result<Self, CoxeterError> {
        kind.validate()?;
        let order = kind.order();
        if order > max_order as u128 {
            return Err(CoxeterError::GroupTooLarge { order, cap: max_order });
        }
        let gens = kind.generators();
        let rank = gens.len();
        let identity: Vec<u16> = (0..gens[0].len() as u16).collect();
        let mut perms = vec![identity.clone()];
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut index = HashMap::from([(identity, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(w) = queue.pop_front() {
            for (s, g) in gens.iter().enumerate() {
                let ws = compose(&perms[w], g);
                if !index.contains_key(&ws) {
                    index.insert(ws.clone(), perms.len());
                    let mut word = words[w].clone();
                    word.push(s);
                    words.push(word);
                    queue.push_back(perms.len());
                    perms.push(ws);
                }
            }
        }
        assert_eq!(perms.len() as u128, order, "realization of {kind} has the wrong order");
        let n = perms.len();
        let lookup = |p: &Vec<u16>| index[p];
        let right: Vec<Vec<usize>> = gens
            .iter()
            .map(|g| perms.iter().map(|w| lookup(&compose(w, g))).collect())
            .collect();
        let left: Vec<Vec<usize>> = gens
            .iter()
            .map(|g| perms.iter().map(|w| lookup(&compose(g, w))).collect())
            .collect();
        let inverse = perms
            .iter()
            .map(|w| {
                let mut inv = vec![0u16; w.len()];
                for (i, &p) in w.iter().enumerate() {
                    inv[p as usize] = i as u16;
                }
                lookup(&inv)
            })
            .collect();
        let names = words
            .iter()
            .map(|w| {
                if w.is_empty() {
                    "e".to_string()
                } else {
                    w.iter().map(|s| format!("s{}", s + 1)).collect()
                }
            })
            .collect();

        // u ≤ w ⟺ u ≤ ws or us ≤ ws, for the last letter s of the normal word of w.
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        below[0].insert(0);
        for w in 1..n {
            let s = *words[w].last().expect("non-identity");
            let ws = right[s][w];
            let mut set = below[ws].clone();
            for u in below[ws].ones() {
                set.insert(right[s][u]);
            }
            below[w] = set;
        }

        let sys = CoxeterSystem {
            kind,
            matrix: kind.coxeter_matrix(),
            perms,
            index,
            words,
            names,
            right,
            left,
            inverse,
            below,
        };
        for s in 0..rank {
            for t in 0..rank {
                assert_eq!(
                    sys.order_of(sys.multiply(sys.generator(s), sys.generator(t))),
                    sys.matrix[s][t],
                    "realization of {kind} violates the Coxeter matrix"
                );
            }
        }
        Ok(sys)
    }

    pub fn kind(&self) -> CoxeterType {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn coxeter_matrix(&self) -> &[Vec<usize>] {
        &self.matrix
    }

    /// `m(s, t)`.
    pub fn m(&self, s: usize, t: usize) -> usize {
        self.matrix[s][t]
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn generator(&self, s: usize) -> usize {
        self.right[s][0]
    }

    pub fn generator_name(&self, s: usize) -> String {
        format!("s{}", s + 1)
    }

    pub fn generator_index(&self, name: &str) -> Result<usize, CoxeterError> {
        name.strip_prefix('s')
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|&k| k >= 1 && k <= self.rank())
            .map(|k| k - 1)
            .ok_or_else(|| CoxeterError::UnknownElement(name.to_string()))
    }

    /// Name of an element: `e` or its ShortLex normal word such as `s1s2s1`.
    pub fn name(&self, w: usize) -> &str {
        &self.names[w]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn word(&self, w: usize) -> &[usize] {
        &self.words[w]
    }

    pub fn length(&self, w: usize) -> usize {
        self.words[w].len()
    }

    pub fn longest_element(&self) -> usize {
        self.order() - 1
    }

    pub fn right_mul(&self, w: usize, s: usize) -> usize {
        self.right[s][w]
    }

    pub fn left_mul(&self, s: usize, w: usize) -> usize {
        self.left[s][w]
    }

    pub fn multiply(&self, u: usize, v: usize) -> usize {
        self.index[&compose(&self.perms[u], &self.perms[v])]
    }

    pub fn inverse(&self, w: usize) -> usize {
        self.inverse[w]
    }

    /// Element of a word of generator indices.
    pub fn evaluate(&self, word: &[usize]) -> usize {
        word.iter().fold(0, |w, &s| self.right[s][w])
    }

    /// Parses `e`, `s1s2s1`, or `s1 s2 s1`; any word, not necessarily reduced.
    pub fn parse(&self, text: &str) -> Result<usize, CoxeterError> {
        let t: String = text.chars().filter(|c| !c.is_whitespace() && *c != '*' && *c != '·').collect();
        if t == "e" || t.is_empty() {
            return Ok(0);
        }
        let mut word = Vec::new();
        for part in t.split('s').skip(1) {
            word.push(self.generator_index(&format!("s{part}"))?);
        }
        if !t.starts_with('s') {
            return Err(CoxeterError::UnknownElement(text.to_string()));
        }
        Ok(self.evaluate(&word))
    }

    pub fn order_of(&self, w: usize) -> usize {
        let mut x = w;
        let mut k = 1;
        while x != 0 {
            x = self.multiply(x, w);
            k += 1;
        }
        k
    }

    pub fn has_right_descent(&self, w: usize, s: usize) -> bool {
        self.length(self.right[s][w]) < self.length(w)
    }

    pub fn has_left_descent(&self, s: usize, w: usize) -> bool {
        self.length(self.left[s][w]) < self.length(w)
    }

    /// Bruhat order.
    pub fn bruhat_leq(&self, u: usize, w: usize) -> bool {
        self.below[w].contains(u)
    }

    /// `{u | u ≤ w}` as a bitset over element indices.
    pub fn bruhat_below(&self, w: usize) -> &FixedBitSet {
        &self.below[w]
    }

    /// Reflections `T = {wsw⁻¹}`, increasing.
    pub fn reflections(&self) -> Vec<usize> {
        let mut t: Vec<usize> = (0..self.order())
            .flat_map(|w| (0..self.rank()).map(move |s| (w, s)))
            .map(|(w, s)| self.multiply(self.right[s][w], self.inverse[w]))
            .collect();
        t.sort_unstable();
        t.dedup();
        t
    }

    /// `Br(X)`: Bruhat order induced on `subset`, elements named by their words.
    pub fn bruhat_poset(&self, subset: &[usize]) -> FinitePoset {
        let ids = subset.iter().map(|&w| self.names[w].clone()).collect();
        FinitePoset::from_relation(ids, |i, j| self.bruhat_leq(subset[i], subset[j]))
            .expect("Bruhat order is a partial order")
    }

    /// All of `W`, in ShortLex order.
    pub fn all_elements(&self) -> Vec<usize> {
        (0..self.order()).collect()
    }
}

/// An involutive permutation of the generators preserving the Coxeter matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramAutomorphism {
    perm: Vec<usize>,
}

impl DiagramAutomorphism {
    pub fn identity(rank: usize) -> Self {
        DiagramAutomorphism { perm: (0..rank).collect() }
    }

    pub fn new(w: &CoxeterSystem, perm: Vec<usize>) -> Result<Self, CoxeterError> {
        let n = w.rank();
        if perm.len() != n || perm.iter().any(|&t| t >= n) {
            return Err(CoxeterError::InvalidAutomorphism("not a map on the generators".into()));
        }
        for s in 0..n {
            if perm[perm[s]] != s {
                return Err(CoxeterError::InvalidAutomorphism(format!(
                    "θ² ≠ id at {}",
                    w.generator_name(s)
                )));
            }
            for t in 0..n {
                if w.m(perm[s], perm[t]) != w.m(s, t) {
                    return Err(CoxeterError::InvalidAutomorphism(format!(
                        "m({}, {}) is not preserved",
                        w.generator_name(s),
                        w.generator_name(t)
                    )));
                }
            }
        }
        Ok(DiagramAutomorphism { perm })
    }

    /// From `{"s1": "s3", ...}`; generators not listed are fixed.
    pub fn from_names(w: &CoxeterSystem, map: &BTreeMap<String, String>) -> Result<Self, CoxeterError> {
        let mut perm: Vec<usize> = (0..w.rank()).collect();
        for (a, b) in map {
            perm[w.generator_index(a)?] = w.generator_index(b)?;
        }
        Self::new(w, perm)
    }

    /// The unique non-trivial automorphism of `A_n`, `s_i ↦ s_{n+1−i}`.
    pub fn flip(w: &CoxeterSystem) -> Result<Self, CoxeterError> {
        let n = w.rank();
        Self::new(w, (0..n).map(|s| n - 1 - s).collect())
    }

    pub fn apply_generator(&self, s: usize) -> usize {
        self.perm[s]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(s, &t)| s == t)
    }

    /// `θ` extended to `W`.
    pub fn apply(&self, w: &CoxeterSystem, x: usize) -> usize {
        w.word(x).iter().fold(0, |acc, &s| w.right_mul(acc, self.perm[s]))
    }

    pub fn to_names(&self, w: &CoxeterSystem) -> BTreeMap<String, String> {
        self.perm
            .iter()
            .enumerate()
            .map(|(s, &t)| (w.generator_name(s), w.generator_name(t)))
            .collect()
    }
}

/// `{"type": "A", "rank": 3, "theta": {"s1": "s3", ...}}`; `I2` takes `"m"` and has rank 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<BTreeMap<String, String>>,
}

impl CoxeterSpec {
    pub fn from_json(text: &str) -> Result<Self, CoxeterError> {
        serde_json::from_str(text).map_err(|e| CoxeterError::Json(e.to_string()))
    }

    pub fn coxeter_type(&self) -> Result<CoxeterType, CoxeterError> {
        let t = match self.kind.to_ascii_uppercase().as_str() {
            "A" => CoxeterType::A(self.rank),
            "B" | "C" => CoxeterType::B(self.rank),
            "D" => CoxeterType::D(self.rank),
            "I2" | "I" => CoxeterType::I2(self.m.ok_or_else(|| CoxeterError::Json("I2 needs \"m\"".into()))?),
            other => return Err(CoxeterError::UnsupportedType(other.to_string())),
        };
        t.validate()?;
        Ok(t)
    }

    /// Builds the group and `θ` (identity when absent).
    pub fn build(&self, max_order: usize) -> Result<(CoxeterSystem, DiagramAutomorphism), CoxeterError> {
        let w = CoxeterSystem::build(self.coxeter_type()?, max_order)?;
        let theta = match &self.theta {
            Some(map) => DiagramAutomorphism::from_names(&w, map)?,
            None => DiagramAutomorphism::identity(w.rank()),
        };
        Ok((w, theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bruhat order by the subword criterion on the normal word of `w`.
    fn subword_leq(w: &CoxeterSystem, u: usize, x: usize) -> bool {
        let word = w.word(x);
        (0u32..1 << word.len()).any(|mask| {
            let sub: Vec<usize> = (0..word.len()).filter(|i| mask & (1 << i) != 0).map(|i| word[i]).collect();
            w.evaluate(&sub) == u
        })
    }

    #[test]
    fn group_orders_and_longest_lengths() {
        let cases = [
            (CoxeterType::A(1), 2, 1),
            (CoxeterType::A(3), 24, 6),
            (CoxeterType::B(2), 8, 4),
            (CoxeterType::B(3), 48, 9),
            (CoxeterType::D(4), 192, 12),
            (CoxeterType::I2(5), 10, 5),
            (CoxeterType::I2(2), 4, 2),
        ];
        for (t, order, longest) in cases {
            let w = CoxeterSystem::build(t, 5040).unwrap();
            assert_eq!(w.order(), order, "{t}");
            assert_eq!(w.length(w.longest_element()), longest, "{t}");
        }
    }

    #[test]
    fn limits_and_unsupported_types() {
        assert!(matches!(
            CoxeterSystem::build(CoxeterType::A(7), 5040),
            Err(CoxeterError::GroupTooLarge { order: 40320, cap: 5040 })
        ));
        assert!(matches!(
            CoxeterSystem::build(CoxeterType::A(0), 5040),
            Err(CoxeterError::UnsupportedType(_))
        ));
        let spec = CoxeterSpec::from_json(r#"{"type":"E","rank":6}"#).unwrap();
        assert!(matches!(spec.coxeter_type(), Err(CoxeterError::UnsupportedType(_))));
    }

    #[test]
    fn lengths_change_by_one() {
        for t in [CoxeterType::A(3), CoxeterType::B(3), CoxeterType::D(4), CoxeterType::I2(6)] {
            let w = CoxeterSystem::build(t, 5040).unwrap();
            for x in 0..w.order() {
                for s in 0..w.rank() {
                    assert_eq!(w.length(w.right_mul(x, s)).abs_diff(w.length(x)), 1);
                    assert_eq!(w.length(w.left_mul(s, x)).abs_diff(w.length(x)), 1);
                }
                assert_eq!(w.length(w.inverse(x)), w.length(x));
            }
        }
    }

    #[test]
    fn bruhat_matches_subwords_in_a3_and_b2() {
        for t in [CoxeterType::A(3), CoxeterType::B(2)] {
            let w = CoxeterSystem::build(t, 5040).unwrap();
            for u in 0..w.order() {
                for x in 0..w.order() {
                    assert_eq!(w.bruhat_leq(u, x), subword_leq(&w, u, x), "{t}: {} ≤ {}", w.name(u), w.name(x));
                }
            }
        }
    }

    #[test]
    fn s3_bruhat_poset() {
        let w = CoxeterSystem::build(CoxeterType::A(2), 5040).unwrap();
        let s1 = w.parse("s1").unwrap();
        let s12 = w.parse("s1s2").unwrap();
        assert!(w.bruhat_leq(s1, s12) && w.bruhat_leq(w.parse("s2").unwrap(), s12));
        let br = w.bruhat_poset(&w.all_elements());
        assert_eq!(br.len(), 6);
        let ranks = br.is_graded().unwrap();
        for x in 0..6 {
            assert_eq!(ranks[x], w.length(x));
        }
        let top = br.index_of("s1s2s1").unwrap();
        let open = br.open_interval(0, top).unwrap();
        assert_eq!(open.len(), 4);
        assert_eq!(open.to_poset().cover_count(), 4);
    }

    #[test]
    fn reflections_and_parsing() {
        let w = CoxeterSystem::build(CoxeterType::A(3), 5040).unwrap();
        assert_eq!(w.reflections().len(), 6);
        assert_eq!(w.parse("s2 s1 s2").unwrap(), w.parse("s1s2s1").unwrap());
        assert_eq!(w.name(w.parse("s2s1s2").unwrap()), "s1s2s1");
        assert!(w.parse("s9").is_err());
        let b = CoxeterSystem::build(CoxeterType::B(3), 5040).unwrap();
        assert_eq!(b.reflections().len(), 9);
    }

    #[test]
    fn automorphisms() {
        let w = CoxeterSystem::build(CoxeterType::A(3), 5040).unwrap();
        let flip = DiagramAutomorphism::flip(&w).unwrap();
        let s1 = w.generator(0);
        assert_eq!(flip.apply(&w, s1), w.generator(2));
        assert_eq!(flip.apply(&w, w.longest_element()), w.longest_element());
        assert!(matches!(
            DiagramAutomorphism::new(&w, vec![1, 0, 2]),
            Err(CoxeterError::InvalidAutomorphism(_))
        ));
        let b = CoxeterSystem::build(CoxeterType::B(3), 5040).unwrap();
        assert!(DiagramAutomorphism::new(&b, vec![2, 1, 0]).is_err());
        let b2 = CoxeterSystem::build(CoxeterType::B(2), 5040).unwrap();
        assert!(DiagramAutomorphism::new(&b2, vec![1, 0]).is_ok());
        let spec = CoxeterSpec::from_json(r#"{"type":"A","rank":3,"theta":{"s1":"s3","s2":"s2","s3":"s1"}}"#).unwrap();
        let (_, theta) = spec.build(5040).unwrap();
        assert_eq!(theta, flip);
    }
}
