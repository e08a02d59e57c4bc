//! Discrete Morse matchings, acyclicity, and collapse sequences.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{ComplexError, Face, SimplicialComplex};
use crate::poset::{chain2_index, chain2_split, FinitePoset, Level};

/// A partial matching of faces `σ ≺ τ`, stored symmetrically.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MorseMatching {
    partner: BTreeMap<Face, Face>,
}

fn is_facet_of(sigma: &[usize], tau: &[usize]) -> bool {
    tau.len() == sigma.len() + 1 && sigma.iter().all(|v| tau.binary_search(v).is_ok())
}

impl MorseMatching {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a matching from pairs `(σ, τ)` with `σ ≺ τ`, both faces of `complex`.
    pub fn from_pairs(complex: &SimplicialComplex, pairs: &[(Face, Face)]) -> Result<Self, ComplexError> {
        let mut partner = BTreeMap::new();
        for (sigma, tau) in pairs {
            for f in [sigma, tau] {
                if !complex.contains(f) {
                    return Err(ComplexError::FaceNotInComplex(complex.face_ids(f)));
                }
            }
            if !is_facet_of(sigma, tau) {
                return Err(ComplexError::InvalidMatching(format!(
                    "{:?} is not a codimension-one face of {:?}",
                    complex.face_ids(sigma),
                    complex.face_ids(tau)
                )));
            }
            for f in [sigma, tau] {
                if partner.contains_key(f) {
                    return Err(ComplexError::InvalidMatching(format!(
                        "{:?} is matched twice",
                        complex.face_ids(f)
                    )));
                }
            }
            partner.insert(sigma.clone(), tau.clone());
            partner.insert(tau.clone(), sigma.clone());
        }
        Ok(MorseMatching { partner })
    }

    pub fn partner(&self, face: &[usize]) -> Option<&Face> {
        self.partner.get(face)
    }

    /// Matched pairs `(σ, τ)` with `σ ≺ τ`, ordered by `σ`.
    pub fn pairs(&self) -> impl Iterator<Item = (&Face, &Face)> {
        self.partner.iter().filter(|(s, t)| s.len() < t.len())
    }

    pub fn len(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    /// Unmatched faces of `complex`.
    pub fn critical_faces(&self, complex: &SimplicialComplex) -> Vec<Face> {
        complex.faces().filter(|f| !self.partner.contains_key(*f)).cloned().collect()
    }

    /// Every face of `complex`, the empty face included, is matched.
    pub fn is_complete(&self, complex: &SimplicialComplex) -> bool {
        complex.faces().all(|f| self.partner.contains_key(f))
    }
}

/// Directed Hasse diagram of the face poset with matched edges pointing up
/// and all other edges pointing down, plus the face behind each node.
fn morse_digraph(complex: &SimplicialComplex, matching: &MorseMatching) -> (DiGraph<(), ()>, Vec<Face>) {
    let faces: Vec<Face> = complex.faces().cloned().collect();
    let index: HashMap<&Face, NodeIndex> = faces
        .iter()
        .enumerate()
        .map(|(i, f)| (f, NodeIndex::new(i)))
        .collect();
    let mut g = DiGraph::with_capacity(faces.len(), 0);
    for _ in &faces {
        g.add_node(());
    }
    for tau in &faces {
        for skip in 0..tau.len() {
            let mut sigma = tau.clone();
            sigma.remove(skip);
            let (s, t) = (index[&sigma], index[tau]);
            if matching.partner(&sigma) == Some(tau) {
                g.add_edge(s, t, ());
            } else {
                g.add_edge(t, s, ());
            }
        }
    }
    (g, faces)
}

/// `true` iff no alternating path `σ₀ ≺ μ(σ₀) ≻ σ₁ ≺ ⋯` returns to `σ₀`.
pub fn verify_acyclic(complex: &SimplicialComplex, matching: &MorseMatching) -> bool {
    let (g, _) = morse_digraph(complex, matching);
    !petgraph::algo::is_cyclic_directed(&g)
}

/// One elementary collapse `Δ ↘ Δ − {face, coface}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collapse {
    pub face: Face,
    pub coface: Face,
}

/// Collapses `complex` to the void complex along a complete acyclic matching.
///
/// Matched pairs are removed as soon as they are free, earliest first in a
/// topological order of the Morse digraph; the result is reproducible.
pub fn collapse_to_void(complex: &SimplicialComplex, matching: &MorseMatching) -> Result<Vec<Collapse>, ComplexError> {
    if let Some(f) = matching.critical_faces(complex).first() {
        return Err(ComplexError::NotCollapsibleWithThisMatching(format!(
            "face {:?} is unmatched",
            complex.face_ids(f)
        )));
    }
    let (g, faces) = morse_digraph(complex, matching);
    let order = toposort(&g, None).map_err(|cycle| {
        ComplexError::NotCollapsibleWithThisMatching(format!(
            "matching has a cycle through {:?}",
            complex.face_ids(&faces[cycle.node_id().index()])
        ))
    })?;
    let mut position = vec![0usize; faces.len()];
    for (k, n) in order.iter().enumerate() {
        position[n.index()] = k;
    }
    let index: HashMap<&Face, usize> = faces.iter().enumerate().map(|(i, f)| (f, i)).collect();

    let mut alive = vec![true; faces.len()];
    let mut up_degree = vec![0usize; faces.len()];
    for f in &faces {
        for skip in 0..f.len() {
            let mut g = f.clone();
            g.remove(skip);
            up_degree[index[&g]] += 1;
        }
    }
    // Keyed by the position of the lower face of each pair.
    let lower_of_pair = |i: usize| -> usize {
        let p = index[matching.partner(&faces[i]).expect("complete matching")];
        if faces[i].len() < faces[p].len() {
            i
        } else {
            p
        }
    };
    let free = |i: usize, up: &[usize], alive: &[bool]| -> bool {
        let t = index[matching.partner(&faces[i]).expect("complete matching")];
        alive[i] && up[i] == 1 && up[t] == 0
    };
    let mut ready: BTreeSet<(usize, usize)> = BTreeSet::new();
    for i in 0..faces.len() {
        if lower_of_pair(i) == i && free(i, &up_degree, &alive) {
            ready.insert((position[i], i));
        }
    }
    let mut steps = Vec::with_capacity(faces.len() / 2);
    while let Some((_, s)) = ready.pop_first() {
        if !free(s, &up_degree, &alive) {
            continue;
        }
        let t = index[matching.partner(&faces[s]).expect("complete matching")];
        alive[s] = false;
        alive[t] = false;
        steps.push(Collapse {
            face: faces[s].clone(),
            coface: faces[t].clone(),
        });
        let mut touched = Vec::new();
        for &removed in &[t, s] {
            let f = &faces[removed];
            for skip in 0..f.len() {
                let mut g = f.clone();
                g.remove(skip);
                let gi = index[&g];
                up_degree[gi] -= 1;
                touched.push(gi);
            }
        }
        for gi in touched {
            if !alive[gi] {
                continue;
            }
            let low = lower_of_pair(gi);
            if free(low, &up_degree, &alive) {
                ready.insert((position[low], low));
            }
        }
    }
    if let Some(i) = alive.iter().position(|&a| a) {
        return Err(ComplexError::NotCollapsibleWithThisMatching(format!(
            "stuck with face {:?} remaining",
            complex.face_ids(&faces[i])
        )));
    }
    Ok(steps)
}

/// The complete acyclic matching on `Δ(Q)`, `Q = (P × 2)‾ − {(0̂,β)}`, obtained by
/// toggling `p(C) = (x_j, α)` where `(x_j, β)` is the lowest `β`-element of the chain
/// `C`, with `(1̂, β)` appended as a sentinel.
#[derive(Debug, Clone)]
pub struct MuMatching {
    /// The poset `Q`.
    pub q: FinitePoset,
    /// `(element of P, level)` for every element of `Q`.
    pub coords: Vec<(usize, Level)>,
    /// `Δ(Q)`; vertex indices are indices of `Q`.
    pub complex: SimplicialComplex,
    pub matching: MorseMatching,
    top_of_p: usize,
    alpha_index: Vec<Option<usize>>,
}

impl MuMatching {
    /// `p(C)` as an index of `Q`.
    pub fn pivot(&self, chain: &[usize]) -> usize {
        let lowest_beta = chain
            .iter()
            .copied()
            .filter(|&c| self.coords[c].1 == Level::Beta)
            .min_by_key(|&c| self.q.down_set(c).count_ones(..));
        let x = match lowest_beta {
            Some(c) => self.coords[c].0,
            None => self.top_of_p,
        };
        self.alpha_index[x].expect("(x, α) lies in Q")
    }

    /// `μ(C)` computed directly from the recipe.
    pub fn apply(&self, chain: &[usize]) -> Face {
        let p = self.pivot(chain);
        let mut out: Face = chain.to_vec();
        match out.binary_search(&p) {
            Ok(pos) => {
                out.remove(pos);
            }
            Err(pos) => out.insert(pos, p),
        }
        out
    }
}

/// Builds [`MuMatching`] for a finite poset with distinct `0̂` and `1̂`.
pub fn morse_matching_mu(p: &FinitePoset) -> Result<MuMatching, ComplexError> {
    let (Some(bottom), Some(top)) = (p.bottom(), p.top()) else {
        return Err(ComplexError::NotBounded);
    };
    if bottom == top {
        return Err(ComplexError::NotBounded);
    }
    let product = p.product_with_chain2();
    let dropped = [
        chain2_index(bottom, Level::Alpha),
        chain2_index(top, Level::Beta),
        chain2_index(bottom, Level::Beta),
    ];
    let keep: Vec<usize> = (0..product.len()).filter(|i| !dropped.contains(i)).collect();
    let q = product.induced(&keep);
    let coords: Vec<(usize, Level)> = keep.iter().map(|&i| chain2_split(i)).collect();
    let complex = SimplicialComplex::order_complex(&q);
    let mut alpha_index = vec![None; p.len()];
    for (i, &(x, level)) in coords.iter().enumerate() {
        if level == Level::Alpha {
            alpha_index[x] = Some(i);
        }
    }
    let mut mu = MuMatching {
        q,
        coords,
        complex,
        matching: MorseMatching::empty(),
        top_of_p: top,
        alpha_index,
    };
    let mut pairs = Vec::new();
    for chain in mu.complex.faces() {
        let image = mu.apply(chain);
        if image.len() > chain.len() {
            pairs.push((chain.clone(), image));
        }
    }
    mu.matching = MorseMatching::from_pairs(&mu.complex, &pairs)?;
    Ok(mu)
}
