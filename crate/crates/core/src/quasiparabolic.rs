//! Scaled W-sets, the quasiparabolic axioms and their Bruhat order.

use std::collections::{BTreeMap, HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterSystem, TwistedSets};
use crate::poset::{FinitePoset, PosetError};
use crate::spm::{verify_spm, Spm, SpmError};

#[derive(Debug, Error)]
pub enum QpError {
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("height jumps by more than one between `{x}` and `{s}·{x}`")]
    HeightJump { s: String, x: String },
    #[error("orbit of `{orbit}` has several W-minimal elements: {minima:?}")]
    UniquenessViolated { orbit: String, minima: Vec<String> },
    #[error("`{0}` has no reduced expression over the base element")]
    NoReducedExpression(String),
    #[error("`{0}` is not W-minimal")]
    NotMinimal(String),
    #[error("expression is not reduced for `{0}`")]
    NotReduced(String),
    #[error("M(x) = s·x fails: {0}")]
    VerificationFailed(String),
    #[error("malformed scaled W-set JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Spm(#[from] SpmError),
}

/// A finite set with an action of the generators and a height function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledWSet {
    labels: Vec<String>,
    /// `action[s][x] = s·x`.
    action: Vec<Vec<usize>>,
    height: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledWSetJson {
    pub elements: Vec<String>,
    /// Generator name to the images of `elements`, in order.
    pub action: BTreeMap<String, Vec<String>>,
    pub heights: Vec<i64>,
}

impl ScaledWSet {
    /// Checks that each generator acts as an involution and heights move by at most one.
    pub fn new(labels: Vec<String>, action: Vec<Vec<usize>>, height: Vec<i64>) -> Result<Self, QpError> {
        let n = labels.len();
        if height.len() != n {
            return Err(QpError::InvalidAction("height table has the wrong length".into()));
        }
        for (s, row) in action.iter().enumerate() {
            if row.len() != n || row.iter().any(|&y| y >= n) {
                return Err(QpError::InvalidAction(format!("table of s{} is malformed", s + 1)));
            }
            for x in 0..n {
                if row[row[x]] != x {
                    return Err(QpError::InvalidAction(format!(
                        "s{} is not an involution at `{}`",
                        s + 1,
                        labels[x]
                    )));
                }
                if (height[row[x]] - height[x]).abs() > 1 {
                    return Err(QpError::HeightJump {
                        s: format!("s{}", s + 1),
                        x: labels[x].clone(),
                    });
                }
            }
        }
        Ok(ScaledWSet { labels, action, height })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.action.len()
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn height(&self, x: usize) -> i64 {
        self.height[x]
    }

    pub fn heights(&self) -> &[i64] {
        &self.height
    }

    /// `s·x`.
    pub fn act(&self, s: usize, x: usize) -> usize {
        self.action[s][x]
    }

    /// `s_{i₁}⋯s_{i_k}·x`, the last letter acting first.
    pub fn act_word(&self, word: &[usize], x: usize) -> usize {
        word.iter().rev().fold(x, |y, &s| self.action[s][y])
    }

    /// `w·x` for a group element.
    pub fn act_element(&self, group: &CoxeterSystem, w: usize, x: usize) -> usize {
        self.act_word(group.word(w), x)
    }

    /// Checks `(st)^{m(s,t)}` acts trivially for every pair of generators.
    pub fn check_relations(&self, group: &CoxeterSystem) -> Result<(), QpError> {
        if group.rank() != self.rank() {
            return Err(QpError::InvalidAction("rank differs from the group".into()));
        }
        for s in 0..self.rank() {
            for t in 0..self.rank() {
                let word: Vec<usize> = std::iter::repeat_n([s, t], group.m(s, t)).flatten().collect();
                if let Some(x) = (0..self.len()).find(|&x| self.act_word(&word, x) != x) {
                    return Err(QpError::InvalidAction(format!(
                        "(s{}s{})^{} moves `{}`",
                        s + 1,
                        t + 1,
                        group.m(s, t),
                        self.labels[x]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Orbits under the generators, each increasing, ordered by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut orbits = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut orbit = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for row in &self.action {
                    let y = row[x];
                    if !seen[y] {
                        seen[y] = true;
                        orbit.push(y);
                        queue.push_back(y);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    /// Same set with one height changed; used to build negative controls.
    pub fn with_height(&self, x: usize, h: i64) -> Result<Self, QpError> {
        let mut height = self.height.clone();
        height[x] = h;
        ScaledWSet::new(self.labels.clone(), self.action.clone(), height)
    }

    pub fn to_json(&self) -> ScaledWSetJson {
        ScaledWSetJson {
            elements: self.labels.clone(),
            action: self
                .action
                .iter()
                .enumerate()
                .map(|(s, row)| (format!("s{}", s + 1), row.iter().map(|&y| self.labels[y].clone()).collect()))
                .collect(),
            heights: self.height.clone(),
        }
    }

    pub fn from_json(json: &ScaledWSetJson) -> Result<Self, QpError> {
        let index: HashMap<&str, usize> = json.elements.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if index.len() != json.elements.len() {
            return Err(QpError::Json("duplicate element".into()));
        }
        let rank = json.action.len();
        let mut action = Vec::with_capacity(rank);
        for s in 1..=rank {
            let row = json
                .action
                .get(&format!("s{s}"))
                .ok_or_else(|| QpError::Json(format!("missing action of s{s}")))?;
            let row = row
                .iter()
                .map(|l| index.get(l.as_str()).copied().ok_or_else(|| QpError::Json(format!("unknown element `{l}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            action.push(row);
        }
        ScaledWSet::new(json.elements.clone(), action, json.heights.clone())
    }

    /// Disjoint union; labels of part `k` are prefixed with `k:`.
    pub fn disjoint_union(parts: &[ScaledWSet]) -> Result<Self, QpError> {
        let rank = parts.first().map_or(0, |p| p.rank());
        if parts.iter().any(|p| p.rank() != rank) {
            return Err(QpError::InvalidAction("parts have different ranks".into()));
        }
        let mut labels = Vec::new();
        let mut height = Vec::new();
        let mut action = vec![Vec::new(); rank];
        for (k, part) in parts.iter().enumerate() {
            let offset = labels.len();
            labels.extend(part.labels.iter().map(|l| format!("{k}:{l}")));
            height.extend_from_slice(&part.height);
            for (s, row) in part.action.iter().enumerate() {
                action[s].extend(row.iter().map(|&y| y + offset));
            }
        }
        ScaledWSet::new(labels, action, height)
    }
}

/// Minimal length representatives of `W/W_J`, increasing.
pub fn minimal_coset_representatives(group: &CoxeterSystem, parabolic: &[usize]) -> Vec<usize> {
    (0..group.order())
        .filter(|&w| parabolic.iter().all(|&s| !group.has_right_descent(w, s)))
        .collect()
}

/// `W/W_J` under left multiplication, height the length of the minimal representative.
/// Element `i` is the coset of `minimal_coset_representatives(group, parabolic)[i]`.
pub fn parabolic_quotient(group: &CoxeterSystem, parabolic: &[usize]) -> Result<ScaledWSet, QpError> {
    if let Some(&s) = parabolic.iter().find(|&&s| s >= group.rank()) {
        return Err(QpError::InvalidAction(format!("generator index {s} out of range")));
    }
    // Coset of every element, by flooding along right multiplication by J.
    let mut coset = vec![usize::MAX; group.order()];
    let mut reps = Vec::new();
    for w in 0..group.order() {
        if coset[w] != usize::MAX {
            continue;
        }
        let id = reps.len();
        let mut best = w;
        let mut stack = vec![w];
        coset[w] = id;
        while let Some(x) = stack.pop() {
            if group.length(x) < group.length(best) {
                best = x;
            }
            for &s in parabolic {
                let y = group.right_mul(x, s);
                if coset[y] == usize::MAX {
                    coset[y] = id;
                    stack.push(y);
                }
            }
        }
        reps.push(best);
    }
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by_key(|&c| reps[c]);
    let mut position = vec![0; reps.len()];
    for (i, &c) in order.iter().enumerate() {
        position[c] = i;
    }
    let labels = order.iter().map(|&c| group.name(reps[c]).to_string()).collect();
    let height = order.iter().map(|&c| group.length(reps[c]) as i64).collect();
    let action = (0..group.rank())
        .map(|s| {
            order
                .iter()
                .map(|&c| position[coset[group.left_mul(s, reps[c])]])
                .collect()
        })
        .collect();
    ScaledWSet::new(labels, action, height)
}

/// `ι(θ)` under `s·x = θ(s)·x·s`, height the rank in `Br(I(θ))`.
pub fn twisted_conjugation_set(sets: &TwistedSets<'_>) -> Result<ScaledWSet, QpError> {
    let ids = sets.identities();
    let g = sets.group();
    let labels = ids.iter().map(|&x| g.name(x).to_string()).collect();
    let height = ids.iter().map(|&x| sets.rho(x).expect("twisted identity has a rank") as i64).collect();
    let action = (0..g.rank())
        .map(|s| {
            ids.iter()
                .map(|&x| {
                    ids.binary_search(&sets.twisted_conjugate(s, x))
                        .expect("ι(θ) is closed under twisted conjugation")
                })
                .collect()
        })
        .collect();
    ScaledWSet::new(labels, action, height)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum QpViolation {
    /// `hgt(tx) = hgt(x)` but `tx ≠ x`.
    Qp1 { t: String, x: String, tx: String },
    /// `hgt(tx) > hgt(x)`, `hgt(stx) < hgt(sx)` but `tx ≠ sx`.
    Qp2 { s: String, t: String, x: String, tx: String, sx: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QpVerdict {
    pub violations: Vec<QpViolation>,
}

impl QpVerdict {
    pub fn is_quasiparabolic(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Brute force check of both axioms over all reflections.
pub fn verify_quasiparabolic(group: &CoxeterSystem, set: &ScaledWSet) -> Result<QpVerdict, QpError> {
    set.check_relations(group)?;
    let mut violations = Vec::new();
    let h = |x: usize| set.height(x);
    let name = |x: usize| set.label(x).to_string();
    for t in group.reflections() {
        for x in 0..set.len() {
            let tx = set.act_element(group, t, x);
            if h(tx) == h(x) && tx != x {
                violations.push(QpViolation::Qp1 {
                    t: group.name(t).to_string(),
                    x: name(x),
                    tx: name(tx),
                });
            }
            if h(tx) > h(x) {
                for s in 0..group.rank() {
                    let sx = set.act(s, x);
                    let stx = set.act(s, tx);
                    if h(stx) < h(sx) && tx != sx {
                        violations.push(QpViolation::Qp2 {
                            s: group.generator_name(s),
                            t: group.name(t).to_string(),
                            x: name(x),
                            tx: name(tx),
                            sx: name(sx),
                        });
                    }
                }
            }
        }
    }
    Ok(QpVerdict { violations })
}

pub fn is_w_minimal(set: &ScaledWSet, x: usize) -> bool {
    (0..set.rank()).all(|s| set.height(x) <= set.height(set.act(s, x)))
}

/// All W-minimal elements, increasing; fails if an orbit has more than one.
pub fn w_minimal_elements(set: &ScaledWSet) -> Result<Vec<usize>, QpError> {
    let mut minima = Vec::new();
    for orbit in set.orbits() {
        let found: Vec<usize> = orbit.iter().copied().filter(|&x| is_w_minimal(set, x)).collect();
        if found.len() > 1 {
            return Err(QpError::UniquenessViolated {
                orbit: set.label(orbit[0]).to_string(),
                minima: found.iter().map(|&x| set.label(x).to_string()).collect(),
            });
        }
        minima.extend(found);
    }
    minima.sort_unstable();
    Ok(minima)
}

fn require_minimal(set: &ScaledWSet, base: usize) -> Result<(), QpError> {
    if is_w_minimal(set, base) {
        Ok(())
    } else {
        Err(QpError::NotMinimal(set.label(base).to_string()))
    }
}

fn descents(set: &ScaledWSet, x: usize) -> impl Iterator<Item = usize> + '_ {
    (0..set.rank()).filter(move |&s| set.height(set.act(s, x)) < set.height(x))
}

/// Lexicographically smallest `s₁⋯s_k` with `x = s₁⋯s_k·base` and `k = hgt(x) − hgt(base)`.
pub fn reduced_expression(set: &ScaledWSet, base: usize, x: usize) -> Result<Vec<usize>, QpError> {
    let mut word = Vec::new();
    let mut y = x;
    while set.height(y) > set.height(base) {
        let s = descents(set, y)
            .next()
            .ok_or_else(|| QpError::NoReducedExpression(set.label(x).to_string()))?;
        word.push(s);
        y = set.act(s, y);
    }
    if y == base {
        Ok(word)
    } else {
        Err(QpError::NoReducedExpression(set.label(x).to_string()))
    }
}

/// Every reduced expression of `x` over `base`, in lexicographic order.
pub fn all_reduced_expressions(set: &ScaledWSet, base: usize, x: usize) -> Vec<Vec<usize>> {
    fn walk(set: &ScaledWSet, base: usize, y: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if set.height(y) <= set.height(base) {
            if y == base {
                out.push(prefix.clone());
            }
            return;
        }
        for s in descents(set, y).collect::<Vec<_>>() {
            prefix.push(s);
            walk(set, base, set.act(s, y), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    walk(set, base, x, &mut Vec::new(), &mut out);
    out
}

/// `{s_{i₁}⋯s_{i_j}·base | i₁ < ⋯ < i_j}` for a word `s₁⋯s_k`.
pub fn subword_images(set: &ScaledWSet, base: usize, word: &[usize]) -> FixedBitSet {
    let mut reach = FixedBitSet::with_capacity(set.len());
    reach.insert(base);
    for &s in word.iter().rev() {
        let next: Vec<usize> = reach.ones().map(|y| set.act(s, y)).collect();
        next.into_iter().for_each(|y| reach.insert(y));
    }
    reach
}

/// Bruhat order on the orbit of a W-minimal `base`.
#[derive(Debug, Clone)]
pub struct QpBruhat {
    pub base: usize,
    /// Orbit elements, increasing; poset index `i` is `elements[i]`.
    pub elements: Vec<usize>,
    pub poset: FinitePoset,
    /// Chosen reduced expression of every orbit element.
    pub expressions: Vec<Vec<usize>>,
}

impl QpBruhat {
    pub fn position(&self, x: usize) -> Option<usize> {
        self.elements.binary_search(&x).ok()
    }
}

/// `x ≤ y` iff `x` is a subword image of the lexicographically smallest reduced
/// expression of `y`; the result is checked to be graded by height.
pub fn qp_bruhat(set: &ScaledWSet, base: usize) -> Result<QpBruhat, QpError> {
    qp_bruhat_with(set, base, |x| reduced_expression(set, base, x))
}

/// As [`qp_bruhat`] with a caller-chosen reduced expression for every element.
pub fn qp_bruhat_with(
    set: &ScaledWSet,
    base: usize,
    mut choose: impl FnMut(usize) -> Result<Vec<usize>, QpError>,
) -> Result<QpBruhat, QpError> {
    require_minimal(set, base)?;
    let elements = set
        .orbits()
        .into_iter()
        .find(|o| o.binary_search(&base).is_ok())
        .expect("base lies in an orbit");
    let mut expressions = Vec::with_capacity(elements.len());
    let mut below = Vec::with_capacity(elements.len());
    for &y in &elements {
        let word = choose(y)?;
        if set.act_word(&word, base) != y || word.len() as i64 != set.height(y) - set.height(base) {
            return Err(QpError::NotReduced(set.label(y).to_string()));
        }
        below.push(subword_images(set, base, &word));
        expressions.push(word);
    }
    let ids = elements.iter().map(|&x| set.label(x).to_string()).collect();
    let poset = FinitePoset::from_relation(ids, |i, j| below[j].contains(elements[i]))?;
    let ranks = poset
        .is_graded()
        .ok_or_else(|| QpError::VerificationFailed("Bruhat order is not graded".into()))?;
    for (i, &x) in elements.iter().enumerate() {
        if ranks[i] as i64 != set.height(x) - set.height(base) {
            return Err(QpError::VerificationFailed(format!(
                "rank of `{}` differs from its height",
                set.label(x)
            )));
        }
    }
    Ok(QpBruhat { base, elements, poset, expressions })
}

/// Bruhat order on every orbit, each from its W-minimal element; orbits are incomparable.
/// Poset index `i` is element `i` of the set.
pub fn qp_bruhat_all(set: &ScaledWSet) -> Result<FinitePoset, QpError> {
    let mut below = vec![FixedBitSet::with_capacity(set.len()); set.len()];
    for orbit in set.orbits() {
        let base = orbit
            .iter()
            .copied()
            .find(|&x| is_w_minimal(set, x))
            .ok_or_else(|| QpError::NoReducedExpression(set.label(orbit[0]).to_string()))?;
        let br = qp_bruhat(set, base)?;
        for (j, &y) in br.elements.iter().enumerate() {
            for i in br.poset.down_set(j).ones() {
                below[y].insert(br.elements[i]);
            }
        }
    }
    Ok(FinitePoset::from_relation(set.labels.clone(), |x, y| below[y].contains(x))?)
}

/// An element whose subword images depend on the reduced expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpressionDependence {
    pub element: String,
    pub first: Vec<String>,
    pub other: Vec<String>,
}

/// Compares the subword images of every reduced expression of every orbit element.
pub fn expression_independence(set: &ScaledWSet, base: usize) -> Result<Vec<ExpressionDependence>, QpError> {
    require_minimal(set, base)?;
    let br = qp_bruhat(set, base)?;
    let word_names = |w: &[usize]| w.iter().map(|s| format!("s{}", s + 1)).collect::<Vec<_>>();
    let mut out = Vec::new();
    for (j, &y) in br.elements.iter().enumerate() {
        let reference = subword_images(set, base, &br.expressions[j]);
        for word in all_reduced_expressions(set, base, y) {
            if subword_images(set, base, &word) != reference {
                out.push(ExpressionDependence {
                    element: set.label(y).to_string(),
                    first: word_names(&br.expressions[j]),
                    other: word_names(&word),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QpLiftingViolation {
    pub s: String,
    pub x: String,
    pub y: String,
}

/// Checks: if `x ≤ y` and `sx ≰ sy` then `sx ≤ y` and `x ≤ sy`, for a poset on the orbit
/// whose index `i` is `elements[i]`.
pub fn qp_lifting_check(set: &ScaledWSet, elements: &[usize], poset: &FinitePoset) -> Vec<QpLiftingViolation> {
    let pos = |x: usize| elements.binary_search(&x).expect("orbit is closed under the action");
    let mut out = Vec::new();
    for i in 0..elements.len() {
        for j in poset.up_set(i).ones() {
            for s in 0..set.rank() {
                let si = pos(set.act(s, elements[i]));
                let sj = pos(set.act(s, elements[j]));
                if !poset.leq(si, sj) && !(poset.leq(si, j) && poset.leq(i, sj)) {
                    out.push(QpLiftingViolation {
                        s: format!("s{}", s + 1),
                        x: set.label(elements[i]).to_string(),
                        y: set.label(elements[j]).to_string(),
                    });
                }
            }
        }
    }
    out
}

/// `M(x) = s₁·x` on `[base, z]`, for a reduced expression `s₁⋯s_k` of `z`.
///
/// Returns the interval, index `i` being `elements[i]`, and the verified matching.
pub fn spm_qp(
    set: &ScaledWSet,
    bruhat: &QpBruhat,
    z: usize,
    expression: &[usize],
) -> Result<(FinitePoset, Vec<usize>, Spm), QpError> {
    let zi = bruhat
        .position(z)
        .ok_or_else(|| QpError::NoReducedExpression(set.label(z).to_string()))?;
    if expression.is_empty() || set.act_word(expression, bruhat.base) != z
        || expression.len() as i64 != set.height(z) - set.height(bruhat.base)
    {
        return Err(QpError::NotReduced(set.label(z).to_string()));
    }
    let s = expression[0];
    let ideal: Vec<usize> = bruhat.poset.down_set(zi).ones().collect();
    let elements: Vec<usize> = ideal.iter().map(|&i| bruhat.elements[i]).collect();
    let poset = bruhat.poset.principal_ideal(zi).to_poset();
    let mut map = Vec::with_capacity(elements.len());
    for &x in &elements {
        let image = set.act(s, x);
        let k = elements.iter().position(|&y| y == image).ok_or_else(|| {
            QpError::VerificationFailed(format!(
                "s{}·{} = {} leaves the interval",
                s + 1,
                set.label(x),
                set.label(image)
            ))
        })?;
        map.push(k);
    }
    let m = Spm::new(map);
    let verdict = verify_spm(&poset, &m)?;
    if !verdict.is_valid() {
        return Err(QpError::VerificationFailed(format!("{:?}", verdict.violations)));
    }
    Ok((poset, elements, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::CoxeterType;

    fn group(t: CoxeterType) -> CoxeterSystem {
        CoxeterSystem::build(t, 5040).unwrap()
    }

    #[test]
    fn a2_quotient_by_s1() {
        let w = group(CoxeterType::A(2));
        let x = parabolic_quotient(&w, &[0]).unwrap();
        assert_eq!(x.labels(), &["e", "s2", "s1s2"]);
        assert_eq!(x.heights(), &[0, 1, 2]);
        assert!(verify_quasiparabolic(&w, &x).unwrap().is_quasiparabolic());
        assert_eq!(w_minimal_elements(&x).unwrap(), vec![0]);
        let br = qp_bruhat(&x, 0).unwrap();
        assert_eq!(br.poset.cover_pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(br.expressions[2], vec![0, 1]);

        let (p, elements, m) = spm_qp(&x, &br, 2, &[0, 1]).unwrap();
        assert_eq!(elements, vec![0, 1, 2]);
        assert_eq!(m.map(), &[0, 2, 1]);
        assert_eq!(p.len(), 3);
        let (_, _, m) = spm_qp(&x, &br, 1, &[1]).unwrap();
        assert_eq!(m.map(), &[1, 0]);
        assert!(qp_lifting_check(&x, &br.elements, &br.poset).is_empty());
    }

    #[test]
    fn trivial_quotients() {
        let w = group(CoxeterType::A(2));
        let all = parabolic_quotient(&w, &[0, 1]).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all.heights(), &[0]);
        assert_eq!(w_minimal_elements(&all).unwrap(), vec![0]);
        let none = parabolic_quotient(&w, &[]).unwrap();
        assert_eq!(none.len(), 6);
        for i in 0..6 {
            assert_eq!(none.height(i), w.length(i) as i64);
        }
        assert!(verify_quasiparabolic(&w, &none).unwrap().is_quasiparabolic());
    }

    #[test]
    fn corrupted_height_fails() {
        let w = group(CoxeterType::A(2));
        let x = parabolic_quotient(&w, &[0]).unwrap();
        // e and s2 now share a height while s2 moves e.
        let bad = x.with_height(0, 1).unwrap();
        let verdict = verify_quasiparabolic(&w, &bad).unwrap();
        assert!(!verdict.is_quasiparabolic());
        assert!(verdict.violations.iter().any(|v| matches!(v, QpViolation::Qp1 { .. })));
    }

    #[test]
    fn corrupted_order_fails_lifting() {
        let w = group(CoxeterType::A(2));
        let x = parabolic_quotient(&w, &[]).unwrap();
        let br = qp_bruhat(&x, 0).unwrap();
        let s1 = br.poset.index_of("s1").unwrap();
        let s1s2 = br.poset.index_of("s1s2").unwrap();
        let dropped = FinitePoset::from_relation(br.poset.ids().to_vec(), |i, j| {
            br.poset.leq(i, j) && (i, j) != (s1, s1s2)
        })
        .unwrap();
        assert!(qp_lifting_check(&x, &br.elements, &br.poset).is_empty());
        assert!(!qp_lifting_check(&x, &br.elements, &dropped).is_empty());
    }

    #[test]
    fn two_minima_in_an_orbit_are_rejected() {
        // One generator swapping two elements of equal height.
        let x = ScaledWSet::new(vec!["a".into(), "b".into()], vec![vec![1, 0]], vec![0, 0]).unwrap();
        assert!(matches!(w_minimal_elements(&x), Err(QpError::UniquenessViolated { .. })));
    }

    #[test]
    fn reduced_expressions_of_the_longest_element() {
        let w = group(CoxeterType::A(2));
        let x = parabolic_quotient(&w, &[]).unwrap();
        let top = x.index_of("s1s2s1").unwrap();
        assert_eq!(all_reduced_expressions(&x, 0, top), vec![vec![0, 1, 0], vec![1, 0, 1]]);
        assert_eq!(reduced_expression(&x, 0, top).unwrap(), vec![0, 1, 0]);
        assert!(expression_independence(&x, 0).unwrap().is_empty());
    }

    #[test]
    fn disjoint_union_keeps_orbits_apart() {
        let w = group(CoxeterType::A(2));
        let a = parabolic_quotient(&w, &[0]).unwrap();
        let b = parabolic_quotient(&w, &[1]).unwrap();
        let u = ScaledWSet::disjoint_union(&[a, b]).unwrap();
        assert_eq!(u.orbits().len(), 2);
        assert_eq!(w_minimal_elements(&u).unwrap(), vec![0, 3]);
        let p = qp_bruhat_all(&u).unwrap();
        for x in 0..3 {
            for y in 3..6 {
                assert!(!p.leq(x, y) && !p.leq(y, x));
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let w = group(CoxeterType::B(2));
        let x = parabolic_quotient(&w, &[1]).unwrap();
        let json = serde_json::to_string(&x.to_json()).unwrap();
        let back = ScaledWSet::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, x);
        assert!(back.check_relations(&w).is_ok());
    }
}
