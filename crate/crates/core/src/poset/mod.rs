//! Finite posets represented by their cover relations.
//!
//! Elements carry opaque string ids; internally every element is addressed by
//! its index in [`FinitePoset::ids`]. The reflexive-transitive closure of the
//! covers is cached as one up-set and one down-set bitset per element.

mod iso;
mod json;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use iso::{find_isomorphism, is_isomorphic};
pub use json::PosetJson;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("duplicate element id `{0}`")]
    DuplicateId(String),
    #[error("unknown element id `{0}`")]
    UnknownId(String),
    #[error("cover relation has a cycle through `{0}`")]
    CycleDetected(String),
    #[error("cover ({0}, {1}) is implied by other covers")]
    RedundantCover(String, String),
    #[error("`{0}` is not below `{1}`")]
    NotComparable(String, String),
    #[error("relation is not a partial order: {0}")]
    NotPartialOrder(String),
    #[error("poset has {size} elements, the configured limit is {cap}")]
    SizeLimitExceeded { size: usize, cap: usize },
    #[error("malformed poset JSON: {0}")]
    Json(String),
}

/// The two-element chain `α < β` used in products `P × 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Alpha,
    Beta,
}

impl Level {
    pub fn symbol(self) -> &'static str {
        match self {
            Level::Alpha => "α",
            Level::Beta => "β",
        }
    }
}

/// Index of `(p, level)` inside `P × 2` as built by [`FinitePoset::product_with_chain2`].
pub fn chain2_index(p: usize, level: Level) -> usize {
    2 * p + usize::from(level == Level::Beta)
}

/// Inverse of [`chain2_index`].
pub fn chain2_split(i: usize) -> (usize, Level) {
    (i / 2, if i.is_multiple_of(2) { Level::Alpha } else { Level::Beta })
}

/// Id of `(p, level)` in a product with the 2-chain.
pub fn chain2_id(p: &str, level: Level) -> String {
    format!("({p},{})", level.symbol())
}

#[derive(Clone, PartialEq, Eq)]
pub struct FinitePoset {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    upper: Vec<Vec<usize>>,
    lower: Vec<Vec<usize>>,
    up_set: Vec<FixedBitSet>,
    down_set: Vec<FixedBitSet>,
}

impl fmt::Debug for FinitePoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<(&str, &str)> = self
            .cover_pairs()
            .map(|(a, b)| (self.ids[a].as_str(), self.ids[b].as_str()))
            .collect();
        f.debug_struct("FinitePoset")
            .field("elements", &self.ids)
            .field("covers", &covers)
            .finish()
    }
}

fn index_ids(ids: &[String]) -> Result<HashMap<String, usize>, PosetError> {
    let mut index = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(PosetError::DuplicateId(id.clone()));
        }
    }
    Ok(index)
}

impl FinitePoset {
    /// Builds a poset from element ids and cover pairs `(a, b)` meaning `a ⋖ b`.
    ///
    /// Covers implied transitively by other covers are rejected, not reduced.
    pub fn from_covers<I, S, C, A, B>(ids: I, covers: C) -> Result<Self, PosetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
        C: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        let index = index_ids(&ids)?;
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| PosetError::UnknownId(s.to_string()))
        };
        let mut pairs = Vec::new();
        for (a, b) in covers {
            pairs.push((lookup(a.as_ref())?, lookup(b.as_ref())?));
        }
        Self::from_cover_indices(ids, &pairs)
    }

    /// Same as [`FinitePoset::from_covers`] with covers given by element index.
    pub fn from_cover_indices(ids: Vec<String>, covers: &[(usize, usize)]) -> Result<Self, PosetError> {
        let index = index_ids(&ids)?;
        let n = ids.len();
        let mut upper: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for &(a, b) in covers {
            if a >= n {
                return Err(PosetError::UnknownId(format!("#{a}")));
            }
            if b >= n {
                return Err(PosetError::UnknownId(format!("#{b}")));
            }
            if a == b {
                return Err(PosetError::CycleDetected(ids[a].clone()));
            }
            upper[a].insert(b);
        }
        let upper: Vec<Vec<usize>> = upper.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut lower = vec![Vec::new(); n];
        for (a, ups) in upper.iter().enumerate() {
            for &b in ups {
                lower[b].push(a);
            }
        }

        // Kahn's algorithm; leftovers sit on a cycle.
        let mut indegree: Vec<usize> = lower.iter().map(Vec::len).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(a) = stack.pop() {
            topo.push(a);
            for &b in &upper[a] {
                indegree[b] -= 1;
                if indegree[b] == 0 {
                    stack.push(b);
                }
            }
        }
        if topo.len() < n {
            let culprit = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
            return Err(PosetError::CycleDetected(ids[culprit].clone()));
        }

        let mut up_set = vec![FixedBitSet::with_capacity(n); n];
        for &a in topo.iter().rev() {
            let mut set = FixedBitSet::with_capacity(n);
            set.insert(a);
            for &b in &upper[a] {
                set.union_with(&up_set[b]);
            }
            up_set[a] = set;
        }
        for (a, ups) in upper.iter().enumerate() {
            for &b in ups {
                if ups.iter().any(|&c| c != b && up_set[c].contains(b)) {
                    return Err(PosetError::RedundantCover(ids[a].clone(), ids[b].clone()));
                }
            }
        }
        let down_set = transpose(&up_set);
        Ok(Self {
            ids,
            index,
            upper,
            lower,
            up_set,
            down_set,
        })
    }

    /// Builds a poset from a full order relation, recomputing its covers.
    ///
    /// The relation is checked for reflexivity, antisymmetry and transitivity.
    pub fn from_relation<F>(ids: Vec<String>, leq: F) -> Result<Self, PosetError>
    where
        F: Fn(usize, usize) -> bool,
    {
        let index = index_ids(&ids)?;
        let n = ids.len();
        let mut up_set = vec![FixedBitSet::with_capacity(n); n];
        for (a, set) in up_set.iter_mut().enumerate() {
            for b in 0..n {
                if leq(a, b) {
                    set.insert(b);
                }
            }
        }
        for a in 0..n {
            if !up_set[a].contains(a) {
                return Err(PosetError::NotPartialOrder(format!("`{}` is not ≤ itself", ids[a])));
            }
            for b in up_set[a].ones() {
                if b != a && up_set[b].contains(a) {
                    return Err(PosetError::NotPartialOrder(format!(
                        "`{}` and `{}` are mutually ≤",
                        ids[a], ids[b]
                    )));
                }
                if !up_set[b].is_subset(&up_set[a]) {
                    let c = up_set[b].difference(&up_set[a]).next().unwrap_or(b);
                    return Err(PosetError::NotPartialOrder(format!(
                        "`{}` ≤ `{}` ≤ `{}` but not `{}` ≤ `{}`",
                        ids[a], ids[b], ids[c], ids[a], ids[c]
                    )));
                }
            }
        }
        let down_set = transpose(&up_set);
        let mut upper = vec![Vec::new(); n];
        let mut lower = vec![Vec::new(); n];
        for a in 0..n {
            let mut strict = up_set[a].clone();
            strict.set(a, false);
            for b in strict.ones() {
                let mut between = down_set[b].clone();
                between.intersect_with(&strict);
                if between.count_ones(..) == 1 {
                    upper[a].push(b);
                    lower[b].push(a);
                }
            }
        }
        Ok(Self {
            ids,
            index,
            upper,
            lower,
            up_set,
            down_set,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize, PosetError> {
        self.index_of(id).ok_or_else(|| PosetError::UnknownId(id.to_string()))
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up_set[a].contains(b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// `a ⋖ b`.
    pub fn covers(&self, a: usize, b: usize) -> bool {
        self.upper[a].binary_search(&b).is_ok()
    }

    /// Elements covering `a`, in increasing index order.
    pub fn upper_covers(&self, a: usize) -> &[usize] {
        &self.upper[a]
    }

    /// Elements covered by `a`, in increasing index order.
    pub fn lower_covers(&self, a: usize) -> &[usize] {
        &self.lower[a]
    }

    /// All cover pairs `(a, b)` with `a ⋖ b`, ordered by `a` then `b`.
    pub fn cover_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.upper
            .iter()
            .enumerate()
            .flat_map(|(a, ups)| ups.iter().map(move |&b| (a, b)))
    }

    pub fn cover_count(&self) -> usize {
        self.upper.iter().map(Vec::len).sum()
    }

    /// `{b | a ≤ b}` as a bitset over element indices.
    pub fn up_set(&self, a: usize) -> &FixedBitSet {
        &self.up_set[a]
    }

    /// `{b | b ≤ a}` as a bitset over element indices.
    pub fn down_set(&self, a: usize) -> &FixedBitSet {
        &self.down_set[a]
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&a| self.lower[a].is_empty()).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&a| self.upper[a].is_empty()).collect()
    }

    /// The minimum `0̂`, if there is one.
    pub fn bottom(&self) -> Option<usize> {
        match self.minimal_elements().as_slice() {
            [b] => Some(*b),
            _ => None,
        }
    }

    /// The maximum `1̂`, if there is one.
    pub fn top(&self) -> Option<usize> {
        match self.maximal_elements().as_slice() {
            [t] => Some(*t),
            _ => None,
        }
    }

    /// Elements covered by the maximum.
    pub fn coatoms(&self) -> Vec<usize> {
        self.top().map(|t| self.lower[t].clone()).unwrap_or_default()
    }

    /// Closed interval `[x, y]`.
    pub fn interval(&self, x: usize, y: usize) -> Result<IntervalHandle<'_>, PosetError> {
        self.bounded(x, y, true, true)
    }

    /// Open interval `(x, y)`.
    pub fn open_interval(&self, x: usize, y: usize) -> Result<IntervalHandle<'_>, PosetError> {
        self.bounded(x, y, false, false)
    }

    /// Half-open interval `[x, y)`.
    pub fn closed_open(&self, x: usize, y: usize) -> Result<IntervalHandle<'_>, PosetError> {
        self.bounded(x, y, true, false)
    }

    /// Half-open interval `(x, y]`.
    pub fn open_closed(&self, x: usize, y: usize) -> Result<IntervalHandle<'_>, PosetError> {
        self.bounded(x, y, false, true)
    }

    fn bounded(
        &self,
        x: usize,
        y: usize,
        include_lower: bool,
        include_upper: bool,
    ) -> Result<IntervalHandle<'_>, PosetError> {
        if !self.leq(x, y) {
            return Err(PosetError::NotComparable(self.ids[x].clone(), self.ids[y].clone()));
        }
        let mut set = self.up_set[x].clone();
        set.intersect_with(&self.down_set[y]);
        if !include_lower {
            set.set(x, false);
        }
        if !include_upper {
            set.set(y, false);
        }
        Ok(IntervalHandle {
            parent: self,
            lower: Some(x),
            upper: Some(y),
            elements: set.ones().collect(),
        })
    }

    /// `P_{≤y}`.
    pub fn principal_ideal(&self, y: usize) -> IntervalHandle<'_> {
        IntervalHandle {
            parent: self,
            lower: None,
            upper: Some(y),
            elements: self.down_set[y].ones().collect(),
        }
    }

    /// `P_{≥y}`.
    pub fn principal_filter(&self, y: usize) -> IntervalHandle<'_> {
        IntervalHandle {
            parent: self,
            lower: Some(y),
            upper: None,
            elements: self.up_set[y].ones().collect(),
        }
    }

    /// `P − {0̂, 1̂}`; requires both bounds.
    pub fn proper_part(&self) -> Option<FinitePoset> {
        let (b, t) = (self.bottom()?, self.top()?);
        let keep: Vec<usize> = (0..self.len()).filter(|&a| a != b && a != t).collect();
        Some(self.induced(&keep))
    }

    /// Induced subposet on `subset` (in the given order), covers recomputed.
    pub fn induced(&self, subset: &[usize]) -> FinitePoset {
        let ids = subset.iter().map(|&a| self.ids[a].clone()).collect();
        FinitePoset::from_relation(ids, |i, j| self.leq(subset[i], subset[j]))
            .expect("restriction of a partial order is a partial order")
    }

    /// Induced subposet without the listed elements.
    pub fn without(&self, removed: &[usize]) -> FinitePoset {
        let keep: Vec<usize> = (0..self.len()).filter(|a| !removed.contains(a)).collect();
        self.induced(&keep)
    }

    /// Length (number of covers) of the longest chain from a minimal element up to each element.
    pub fn heights(&self) -> Vec<usize> {
        let mut h = vec![0; self.len()];
        for a in self.linear_extension() {
            h[a] = self.lower[a].iter().map(|&b| h[b] + 1).max().unwrap_or(0);
        }
        h
    }

    /// The rank function if every principal ideal has all maximal chains of equal length.
    pub fn is_graded(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut shortest = vec![0usize; n];
        let mut longest = vec![0usize; n];
        for a in self.linear_extension() {
            if let Some(min) = self.lower[a].iter().map(|&b| shortest[b] + 1).min() {
                shortest[a] = min;
                longest[a] = self.lower[a].iter().map(|&b| longest[b] + 1).max().unwrap_or(min);
            }
            if shortest[a] != longest[a] {
                return None;
            }
        }
        Some(longest)
    }

    /// Least upper bound of `x` and `y`, if it exists.
    pub fn join(&self, x: usize, y: usize) -> Option<usize> {
        let mut bounds = self.up_set[x].clone();
        bounds.intersect_with(&self.up_set[y]);
        bounds.ones().find(|&u| bounds.is_subset(&self.up_set[u]))
    }

    /// `P × 2`, with `(p, γ)` stored at [`chain2_index`]`(p, γ)`.
    pub fn product_with_chain2(&self) -> FinitePoset {
        let mut ids = Vec::with_capacity(2 * self.len());
        for id in &self.ids {
            ids.push(chain2_id(id, Level::Alpha));
            ids.push(chain2_id(id, Level::Beta));
        }
        let mut covers = Vec::new();
        for p in 0..self.len() {
            covers.push((chain2_index(p, Level::Alpha), chain2_index(p, Level::Beta)));
            for &q in &self.upper[p] {
                for level in [Level::Alpha, Level::Beta] {
                    covers.push((chain2_index(p, level), chain2_index(q, level)));
                }
            }
        }
        FinitePoset::from_cover_indices(ids, &covers).expect("product of posets is a poset")
    }

    /// Linear extension choosing, among the minimal remaining elements, the smallest id.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut remaining: Vec<usize> = self.lower.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<(&str, usize)> = (0..self.len())
            .filter(|&a| remaining[a] == 0)
            .map(|a| (self.ids[a].as_str(), a))
            .collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some((_, a)) = ready.pop_first() {
            order.push(a);
            for &b in &self.upper[a] {
                remaining[b] -= 1;
                if remaining[b] == 0 {
                    ready.insert((self.ids[b].as_str(), b));
                }
            }
        }
        order
    }

    /// Relabels elements; `f` must be injective.
    pub fn relabel(&self, mut f: impl FnMut(usize, &str) -> String) -> Result<FinitePoset, PosetError> {
        let ids = self.ids.iter().enumerate().map(|(i, id)| f(i, id)).collect();
        let covers: Vec<(usize, usize)> = self.cover_pairs().collect();
        FinitePoset::from_cover_indices(ids, &covers)
    }
}

fn transpose(sets: &[FixedBitSet]) -> Vec<FixedBitSet> {
    let n = sets.len();
    let mut out = vec![FixedBitSet::with_capacity(n); n];
    for (a, set) in sets.iter().enumerate() {
        for b in set.ones() {
            out[b].insert(a);
        }
    }
    out
}

/// A subset of a poset cut out by optional lower and upper endpoints.
#[derive(Debug, Clone)]
pub struct IntervalHandle<'a> {
    parent: &'a FinitePoset,
    lower: Option<usize>,
    upper: Option<usize>,
    elements: Vec<usize>,
}

impl<'a> IntervalHandle<'a> {
    pub fn parent(&self) -> &'a FinitePoset {
        self.parent
    }

    pub fn lower(&self) -> Option<usize> {
        self.lower
    }

    pub fn upper(&self) -> Option<usize> {
        self.upper
    }

    /// Parent indices of the members, increasing.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, a: usize) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    /// The members as a standalone poset (ids kept, indices renumbered in member order).
    pub fn to_poset(&self) -> FinitePoset {
        self.parent.induced(&self.elements)
    }
}
