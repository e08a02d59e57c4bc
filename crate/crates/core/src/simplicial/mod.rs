//! Finite abstract simplicial complexes and order complexes of posets.
//!
//! A face is a strictly increasing vector of vertex indices; the empty face is
//! a member of every non-void complex. Faces live in a `BTreeSet`, so every
//! enumeration (boundary matrices, facets, collapse orders) is lexicographic
//! and reproducible.

mod classify;
mod homology;
mod morse;
mod smith;

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::FinitePoset;

pub use classify::{classify_ball_or_sphere, classify_open_intervals, Classification, IntervalClass};
pub use homology::{reduced_homology, HomologyProfile};
pub use morse::{collapse_to_void, morse_matching_mu, verify_acyclic, Collapse, MorseMatching, MuMatching};
pub use smith::invariant_factors;

pub type Face = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("face {0:?} is not in the complex")]
    FaceNotInComplex(Vec<String>),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("matching is invalid: {0}")]
    InvalidMatching(String),
    #[error("matching does not collapse the complex: {0}")]
    NotCollapsibleWithThisMatching(String),
    #[error("poset needs distinct minimum and maximum")]
    NotBounded,
    #[error("malformed complex JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    faces: BTreeSet<Face>,
}

/// Wire form `{"facets": [["v1","v2"], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub facets: Vec<Vec<String>>,
}

fn all_subsets(face: &[usize], out: &mut BTreeSet<Face>) {
    let k = face.len();
    for mask in 0u64..(1u64 << k) {
        let sub: Face = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| face[i]).collect();
        out.insert(sub);
    }
}

impl SimplicialComplex {
    /// The complex with no faces at all.
    pub fn void() -> Self {
        SimplicialComplex {
            vertices: Vec::new(),
            faces: BTreeSet::new(),
        }
    }

    /// The complex `{∅}`.
    pub fn empty_face_only() -> Self {
        SimplicialComplex {
            vertices: Vec::new(),
            faces: BTreeSet::from([Face::new()]),
        }
    }

    /// Downward closure of the given faces over a vertex list; unused vertices are dropped.
    pub fn from_facets(vertices: Vec<String>, facets: &[Face]) -> Self {
        let mut faces = BTreeSet::new();
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            all_subsets(&f, &mut faces);
        }
        SimplicialComplex { vertices, faces }.compacted()
    }

    /// `cl(𝓕)` for a family of vertex-id sets. Vertices are ordered by first appearance.
    pub fn closure<S: AsRef<str>>(family: &[Vec<S>]) -> Self {
        let mut vertices: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let facets: Vec<Face> = family
            .iter()
            .map(|set| {
                set.iter()
                    .map(|v| {
                        let v = v.as_ref();
                        *index.entry(v.to_string()).or_insert_with(|| {
                            vertices.push(v.to_string());
                            vertices.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        Self::from_facets(vertices, &facets)
    }

    /// Order complex: faces are the chains of `p`, vertices are its elements in index order.
    pub fn order_complex(p: &FinitePoset) -> Self {
        let order = p.linear_extension();
        let mut faces = BTreeSet::new();
        let mut chain: Vec<usize> = Vec::new();
        fn grow(
            p: &FinitePoset,
            order: &[usize],
            from: usize,
            chain: &mut Vec<usize>,
            faces: &mut BTreeSet<Face>,
        ) {
            let mut face = chain.clone();
            face.sort_unstable();
            faces.insert(face);
            for k in from..order.len() {
                let b = order[k];
                if chain.last().is_none_or(|&a| p.lt(a, b)) {
                    chain.push(b);
                    grow(p, order, k + 1, chain, faces);
                    chain.pop();
                }
            }
        }
        grow(p, &order, 0, &mut chain, &mut faces);
        SimplicialComplex {
            vertices: p.ids().to_vec(),
            faces,
        }
        .compacted()
    }

    pub fn from_json(text: &str) -> Result<Self, ComplexError> {
        let raw: ComplexJson = serde_json::from_str(text).map_err(|e| ComplexError::Json(e.to_string()))?;
        Ok(Self::closure(&raw.facets))
    }

    pub fn to_json_value(&self) -> ComplexJson {
        ComplexJson {
            facets: self.facets().iter().map(|f| self.face_ids(f)).collect(),
        }
    }

    fn compacted(self) -> Self {
        let mut used = vec![false; self.vertices.len()];
        for f in &self.faces {
            for &v in f {
                used[v] = true;
            }
        }
        if used.iter().all(|&u| u) {
            return self;
        }
        let mut remap = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (v, id) in self.vertices.into_iter().enumerate() {
            if used[v] {
                remap[v] = vertices.len();
                vertices.push(id);
            }
        }
        let faces = self
            .faces
            .into_iter()
            .map(|f| f.into_iter().map(|v| remap[v]).collect())
            .collect();
        SimplicialComplex { vertices, faces }
    }

    fn debug_check_closed(&self) {
        if cfg!(debug_assertions) {
            for f in &self.faces {
                for skip in 0..f.len() {
                    let mut g = f.clone();
                    g.remove(skip);
                    debug_assert!(self.faces.contains(&g), "complex is not closed under subsets");
                }
            }
        }
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn contains(&self, face: &[usize]) -> bool {
        self.faces.contains(face)
    }

    pub fn is_void(&self) -> bool {
        self.faces.is_empty()
    }

    /// Translate vertex ids to a face (sorted); `None` if some id is unknown.
    pub fn face_of<S: AsRef<str>>(&self, ids: &[S]) -> Option<Face> {
        let mut f: Face = ids
            .iter()
            .map(|id| self.vertex_index(id.as_ref()))
            .collect::<Option<_>>()?;
        f.sort_unstable();
        f.dedup();
        Some(f)
    }

    pub fn face_ids(&self, face: &[usize]) -> Vec<String> {
        face.iter().map(|&v| self.vertices[v].clone()).collect()
    }

    /// Dimension; `None` for the void complex, `-1` for `{∅}`.
    pub fn dim(&self) -> Option<isize> {
        self.faces.iter().map(|f| f.len() as isize - 1).max()
    }

    /// Faces of dimension `d`, in lexicographic order.
    pub fn faces_of_dim(&self, d: isize) -> Vec<&Face> {
        self.faces.iter().filter(|f| f.len() as isize - 1 == d).collect()
    }

    /// `f_k` for `k = -1 ..= dim`.
    pub fn f_vector(&self) -> Vec<usize> {
        let len = self.dim().map_or(0, |d| (d + 2) as usize);
        let mut f = vec![0; len];
        for face in &self.faces {
            f[face.len()] += 1;
        }
        f
    }

    /// `Σ (-1)^k f_k` over `k ≥ -1`, which equals `Σ (-1)^k β̃_k`.
    pub fn reduced_euler_characteristic(&self) -> i64 {
        self.faces
            .iter()
            .map(|f| if f.len() % 2 == 1 { 1 } else { -1 })
            .sum()
    }

    /// Maximal faces.
    pub fn facets(&self) -> Vec<Face> {
        let mut cofaced = BTreeSet::new();
        for f in &self.faces {
            for skip in 0..f.len() {
                let mut g = f.clone();
                g.remove(skip);
                cofaced.insert(g);
            }
        }
        self.faces.iter().filter(|f| !cofaced.contains(*f)).cloned().collect()
    }

    /// Faces `τ ∈ Δ` with `τ ⊃ σ` and one more vertex.
    pub fn cofaces_of(&self, sigma: &[usize]) -> Vec<Face> {
        (0..self.vertices.len())
            .filter(|v| sigma.binary_search(v).is_err())
            .filter_map(|v| {
                let mut t = sigma.to_vec();
                let pos = t.binary_search(&v).unwrap_err();
                t.insert(pos, v);
                self.faces.contains(&t).then_some(t)
            })
            .collect()
    }

    /// `lk_Δ(σ) = {τ ∈ Δ | σ ∩ τ = ∅, σ ∪ τ ∈ Δ}`.
    pub fn link(&self, sigma: &[usize]) -> Result<SimplicialComplex, ComplexError> {
        if !self.faces.contains(sigma) {
            return Err(ComplexError::FaceNotInComplex(self.face_ids(sigma)));
        }
        let faces = self
            .faces
            .iter()
            .filter(|tau| tau.iter().all(|v| sigma.binary_search(v).is_err()))
            .filter(|tau| {
                let mut u: Face = tau.iter().chain(sigma.iter()).copied().collect();
                u.sort_unstable();
                self.faces.contains(&u)
            })
            .cloned()
            .collect();
        let out = SimplicialComplex {
            vertices: self.vertices.clone(),
            faces,
        }
        .compacted();
        out.debug_check_closed();
        Ok(out)
    }

    /// `del_Δ(V) = {σ ∈ Δ | σ ∩ V = ∅}`.
    pub fn deletion(&self, removed: &[usize]) -> SimplicialComplex {
        let faces = self
            .faces
            .iter()
            .filter(|f| f.iter().all(|v| !removed.contains(v)))
            .cloned()
            .collect();
        let out = SimplicialComplex {
            vertices: self.vertices.clone(),
            faces,
        }
        .compacted();
        out.debug_check_closed();
        out
    }

    /// `Δ ∗ Δ'`; vertices of `other` clashing with ours get primes appended.
    pub fn join(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let mut vertices = self.vertices.clone();
        for v in &other.vertices {
            let mut name = v.clone();
            while vertices.contains(&name) || (name != *v && other.vertices.contains(&name)) {
                name.push('\'');
            }
            vertices.push(name);
        }
        let shift = self.vertices.len();
        let mut faces = BTreeSet::new();
        for a in &self.faces {
            for b in &other.faces {
                let mut f = a.clone();
                f.extend(b.iter().map(|&v| v + shift));
                faces.insert(f);
            }
        }
        let out = SimplicialComplex { vertices, faces }.compacted();
        out.debug_check_closed();
        out
    }

    /// Subcomplex of all faces of `self` lying in some face of `family`.
    pub fn generated_by(&self, family: &[Face]) -> SimplicialComplex {
        SimplicialComplex::from_facets(self.vertices.clone(), family)
    }

    /// Pureness and ridge-degree report; see [`PseudomanifoldReport`].
    pub fn is_pseudomanifold_with_boundary(&self) -> PseudomanifoldReport {
        let facets = self.facets();
        let dim = self.dim();
        let pure = facets.iter().all(|f| Some(f.len() as isize - 1) == dim);
        let mut ridge_degree: BTreeMap<Face, usize> = BTreeMap::new();
        let mut first_facet: BTreeMap<Face, usize> = BTreeMap::new();
        let mut components = UnionFind::<usize>::new(facets.len());
        if pure {
            for (k, f) in facets.iter().enumerate() {
                for skip in 0..f.len() {
                    let mut g = f.clone();
                    g.remove(skip);
                    components.union(k, *first_facet.entry(g.clone()).or_insert(k));
                    *ridge_degree.entry(g).or_default() += 1;
                }
            }
        }
        let strongly_connected = (1..facets.len()).all(|k| components.equiv(0, k));
        let overfull: Vec<Face> = ridge_degree
            .iter()
            .filter(|(_, &d)| d > 2)
            .map(|(r, _)| r.clone())
            .collect();
        let boundary: Vec<Face> = ridge_degree
            .iter()
            .filter(|(_, &d)| d == 1)
            .map(|(r, _)| r.clone())
            .collect();
        PseudomanifoldReport {
            dim,
            pure,
            strongly_connected: pure && strongly_connected,
            is_pseudomanifold: pure && !self.is_void() && overfull.is_empty(),
            overfull_ridges: overfull.iter().map(|r| self.face_ids(r)).collect(),
            boundary_ridges: boundary,
        }
    }

    /// `∂Δ`: closure of the codimension-one faces lying in exactly one facet.
    pub fn boundary_complex(&self) -> SimplicialComplex {
        let report = self.is_pseudomanifold_with_boundary();
        SimplicialComplex::from_facets(self.vertices.clone(), &report.boundary_ridges)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudomanifoldReport {
    pub dim: Option<isize>,
    /// All facets have the same dimension.
    pub pure: bool,
    /// Pure, and any two facets are joined by a path of facets meeting in codimension-one faces.
    pub strongly_connected: bool,
    /// Pure, non-void, and every codimension-one face lies in at most two facets.
    pub is_pseudomanifold: bool,
    /// Codimension-one faces lying in three or more facets, as vertex ids.
    pub overfull_ridges: Vec<Vec<String>>,
    /// Codimension-one faces lying in exactly one facet.
    pub boundary_ridges: Vec<Face>,
}

impl PseudomanifoldReport {
    pub fn has_boundary(&self) -> bool {
        !self.boundary_ridges.is_empty()
    }
}
