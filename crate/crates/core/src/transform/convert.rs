use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::poset::{is_isomorphic, FinitePoset, Level, PosetJson};
use crate::spm::{verify_spm, Spm};

use super::projection::fibre_id;
use super::{
    detect_removable, detect_zipper, fibre_poset, order_projection, remove, zip_triple, PhiEntry, TransformError,
};

/// One identification `P_{i-1} → P_i`, with ids taken from `P_{i-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvertStep {
    /// A one-element fibre: only a rename.
    Trivial { fibre: String },
    /// `z` covers only `x` and is deleted.
    Removal {
        fibre: String,
        x: String,
        z: String,
        coatom: String,
        phi: Vec<PhiEntry>,
    },
    /// The clean zipper `(x, y, z)` is zipped.
    CleanZipping {
        fibre: String,
        x: String,
        y: String,
        z: String,
        coatom: String,
        phi: Vec<PhiEntry>,
    },
}

/// The audited conversion of `Q = [0̂, M(1̂)] × 2` into `P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvertCertificate {
    pub poset: PosetJson,
    pub spm: BTreeMap<String, String>,
    /// `Q`.
    pub source: PosetJson,
    /// Fibres of `π` in the order they are identified, as ids of `Q`.
    pub fibres: Vec<Vec<String>>,
    pub steps: Vec<ConvertStep>,
    /// Isomorphism from the last step poset to `P`.
    pub final_isomorphism: BTreeMap<String, String>,
}

impl ConvertCertificate {
    pub fn removals(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, ConvertStep::Removal { .. })).count()
    }

    pub fn zippings(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, ConvertStep::CleanZipping { .. }))
            .count()
    }

    /// `P_0 = Q, P_1, …, P_t` rebuilt from the stored fibres.
    pub fn step_posets(&self) -> Result<Vec<FinitePoset>, String> {
        let q = FinitePoset::try_from(self.source.clone()).map_err(|e| e.to_string())?;
        let fibres = fibre_indices(&q, &self.fibres)?;
        Ok((0..=fibres.len()).map(|i| step_poset(&q, &fibres, i)).collect())
    }
}

fn fibre_indices(q: &FinitePoset, fibres: &[Vec<String>]) -> Result<Vec<Vec<usize>>, String> {
    fibres
        .iter()
        .map(|f| {
            let mut idx: Vec<usize> = f
                .iter()
                .map(|id| q.index_of(id).ok_or_else(|| format!("unknown element `{id}` of Q")))
                .collect::<Result<_, _>>()?;
            idx.sort_unstable();
            Ok(idx)
        })
        .collect()
}

/// `P_i`: the first `i` fibres identified, each becoming one element named by [`fibre_id`]
/// and placed where its first member was; `a ≤ b` iff some member of `a` is below some member of `b`.
fn step_poset(q: &FinitePoset, fibres: &[Vec<usize>], i: usize) -> FinitePoset {
    let mut owner = vec![usize::MAX; q.len()];
    for (k, f) in fibres.iter().take(i).enumerate() {
        for &x in f {
            owner[x] = k;
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut ids = Vec::new();
    for x in 0..q.len() {
        match owner[x] {
            usize::MAX => {
                blocks.push(vec![x]);
                ids.push(q.id(x).to_string());
            }
            k if fibres[k][0] == x => {
                blocks.push(fibres[k].clone());
                ids.push(fibre_id(q, &fibres[k]));
            }
            _ => {}
        }
    }
    FinitePoset::from_relation(ids, |a, b| {
        blocks[a].iter().any(|&x| blocks[b].iter().any(|&y| q.leq(x, y)))
    })
    .expect("identifying fibres along a linear extension yields a poset")
}

/// `a` and `b` agree after renaming `from` to `to` in `a`.
fn same_after_rename(a: &FinitePoset, b: &FinitePoset, from: &str, to: &str) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(image) = (0..a.len())
        .map(|i| b.index_of(if a.id(i) == from { to } else { a.id(i) }))
        .collect::<Option<Vec<usize>>>()
    else {
        return false;
    };
    (0..a.len()).all(|i| (0..a.len()).all(|j| a.leq(i, j) == b.leq(image[i], image[j])))
}

/// Runs the conversion for a verified SPM, auditing every step.
///
/// Fibres are identified along the tie-broken linear extension of the fibre poset.
/// Two-element fibres must be removals and three-element fibres clean zippings
/// of `((p,α), (M(p),β), (p,β))`; each result is compared with the next step poset,
/// and the last step poset is matched to `P` by an isomorphism search.
pub fn convert_sequence(p: &FinitePoset, m: &Spm, cap: usize) -> Result<ConvertCertificate, TransformError> {
    let proj = order_projection(p, m)?;
    let fib = fibre_poset(&proj)?;
    let q = &proj.domain;
    let order = fib.linear_extension();
    let fibres: Vec<Vec<usize>> = order.iter().map(|&a| proj.fibres[a].clone()).collect();
    let audit = |msg: String| TransformError::AuditFailed(msg);

    let mut steps = Vec::with_capacity(fibres.len());
    let mut current = step_poset(q, &fibres, 0);
    for (k, f) in fibres.iter().enumerate() {
        let next = step_poset(q, &fibres, k + 1);
        let name = fibre_id(q, f);
        let at = |x: usize| current.index_of(q.id(x)).expect("unidentified element keeps its id");
        let by_level = |level: Level| -> Vec<usize> {
            f.iter().copied().filter(|&x| proj.q_coords(x).1 == level).collect()
        };
        match f.len() {
            1 => {
                if !same_after_rename(&current, &next, q.id(f[0]), &name) {
                    return Err(audit(format!("trivial step {name} changes the order")));
                }
                steps.push(ConvertStep::Trivial { fibre: name });
            }
            2 => {
                let (x, z) = (at(f[0]), at(f[1]));
                let verdict = detect_removable(&current, z, cap)?;
                let witness = match (&verdict.x, &verdict.clean) {
                    (Some(lower), Some(w)) if *lower == x => w.clone(),
                    _ => return Err(audit(format!("`{}` is not removable in step {}", q.id(f[1]), k + 1))),
                };
                let removed = remove(&current, z, cap)?;
                if !same_after_rename(&removed, &next, current.id(x), &name) {
                    return Err(audit(format!("removal at {name} disagrees with the identification")));
                }
                steps.push(ConvertStep::Removal {
                    fibre: name,
                    x: current.id(x).to_string(),
                    z: current.id(z).to_string(),
                    coatom: current.id(witness.coatom).to_string(),
                    phi: witness.phi_ids(&current),
                });
            }
            3 => {
                let alpha = by_level(Level::Alpha);
                let beta = by_level(Level::Beta);
                let [xa] = alpha[..] else {
                    return Err(audit(format!("fibre {name} does not have one α-element")));
                };
                let base = proj.q_coords(xa).0;
                let (zs, ys): (Vec<usize>, Vec<usize>) = beta.iter().partition(|&&b| proj.q_coords(b).0 == base);
                let ([zq], [yq]) = (&zs[..], &ys[..]) else {
                    return Err(audit(format!("fibre {name} is not of the form (p,α), (M(p),β), (p,β)")));
                };
                let (x, y, z) = (at(xa), at(*yq), at(*zq));
                let verdict = detect_zipper(&current, x, y, z, cap)?;
                let Some(witness) = verdict.clean.clone().filter(|_| verdict.is_clean()) else {
                    return Err(audit(format!("({}, {}, {}) is not a clean zipper", q.id(xa), q.id(*yq), q.id(*zq))));
                };
                let (zipped, merged) = zip_triple(&current, x, y, z)?;
                if !same_after_rename(&zipped, &next, &merged, &name) {
                    return Err(audit(format!("zipping at {name} disagrees with the identification")));
                }
                steps.push(ConvertStep::CleanZipping {
                    fibre: name,
                    x: current.id(x).to_string(),
                    y: current.id(y).to_string(),
                    z: current.id(z).to_string(),
                    coatom: current.id(witness.coatom).to_string(),
                    phi: witness.phi_ids(&current),
                });
            }
            n => return Err(audit(format!("fibre {name} has {n} elements"))),
        }
        current = next;
    }

    if !same_after_rename(&current, &fib, "", "") {
        return Err(audit("last step poset differs from the fibre poset".into()));
    }
    let Some(iso) = is_isomorphic(&current, p, cap)? else {
        return Err(audit("last step poset is not isomorphic to P".into()));
    };
    let cert = ConvertCertificate {
        poset: PosetJson::from(p),
        spm: m.to_ids(p),
        source: PosetJson::from(q),
        fibres: fibres
            .iter()
            .map(|f| f.iter().map(|&x| q.id(x).to_string()).collect())
            .collect(),
        steps,
        final_isomorphism: iso
            .iter()
            .enumerate()
            .map(|(a, &b)| (current.id(a).to_string(), p.id(b).to_string()))
            .collect(),
    };
    if (cert.removals() > 0) != !m.fixed_points().is_empty() {
        return Err(audit("removal steps do not match the fixed points of M".into()));
    }
    if q.len() - 2 * cert.zippings() - cert.removals() != p.len() {
        return Err(audit("cardinalities do not reconcile".into()));
    }
    Ok(cert)
}

/// Checks `φ: [x, 1̂] → [x, c] × 2` directly: a bijection onto the product,
/// order-preserving and reflecting, with `φ(z) = (x, β)`.
fn check_phi(p: &FinitePoset, x: usize, z: usize, coatom: &str, phi: &[PhiEntry]) -> Result<(), String> {
    let top = p.top().ok_or("step poset has no maximum")?;
    let c = p.require(coatom).map_err(|e| e.to_string())?;
    if !p.covers(c, top) {
        return Err(format!("`{coatom}` is not a coatom"));
    }
    let upper = p.interval(x, top).map_err(|e| e.to_string())?;
    let lower = p.interval(x, c).map_err(|e| e.to_string())?;
    let mut image: BTreeMap<usize, (usize, Level)> = BTreeMap::new();
    for e in phi {
        let a = p.require(&e.source).map_err(|e| e.to_string())?;
        let b = p.require(&e.target).map_err(|e| e.to_string())?;
        if !upper.contains(a) || !lower.contains(b) {
            return Err(format!("φ({}) = ({}, {:?}) leaves the intervals", e.source, e.target, e.level));
        }
        if image.insert(a, (b, e.level)).is_some() {
            return Err(format!("φ is given twice at `{}`", e.source));
        }
    }
    let targets: BTreeSet<(usize, Level)> = image.values().copied().collect();
    if image.len() != upper.len() || targets.len() != 2 * lower.len() || targets.len() != image.len() {
        return Err("φ is not a bijection [x,1̂] → [x,c] × 2".into());
    }
    for (&a, &(ta, la)) in &image {
        for (&b, &(tb, lb)) in &image {
            if p.leq(a, b) != (p.leq(ta, tb) && la <= lb) {
                return Err(format!("φ does not respect `{}` vs `{}`", p.id(a), p.id(b)));
            }
        }
    }
    if image.get(&z) != Some(&(x, Level::Beta)) {
        return Err("φ(z) ≠ (x, β)".into());
    }
    Ok(())
}

/// Re-checks a certificate without any search: the SPM, `Q`, the fibres of `π`,
/// the identification order, every step witness, and the final isomorphism.
pub fn verify_certificate(cert: &ConvertCertificate) -> Result<(), String> {
    let p = FinitePoset::try_from(cert.poset.clone()).map_err(|e| e.to_string())?;
    let m = Spm::from_ids(&p, &cert.spm).map_err(|e| e.to_string())?;
    let verdict = verify_spm(&p, &m).map_err(|e| e.to_string())?;
    if !verdict.is_valid() {
        return Err(format!("not an SPM: {:?}", verdict.violations));
    }
    let top = p.top().ok_or("P has no maximum")?;
    let ideal = p.principal_ideal(m.apply(top));
    let q = ideal.to_poset().product_with_chain2();
    if PosetJson::from(&q) != cert.source {
        return Err("source is not [0̂, M(1̂)] × 2".into());
    }

    // π straight from its definition.
    let members = ideal.elements();
    let pi = |x: usize| {
        let a = members[x / 2];
        if x % 2 == 1 && p.covers(a, m.apply(a)) {
            m.apply(a)
        } else {
            a
        }
    };
    let fibres = fibre_indices(&q, &cert.fibres)?;
    let mut seen = vec![false; q.len()];
    let mut images = BTreeSet::new();
    for f in &fibres {
        let img = pi(f[0]);
        if !images.insert(img) {
            return Err(format!("two fibres over `{}`", p.id(img)));
        }
        for &x in f {
            if seen[x] || pi(x) != img {
                return Err(format!("`{}` is misplaced among the fibres", q.id(x)));
            }
            seen[x] = true;
        }
    }
    if seen.iter().any(|s| !s) || images.len() != p.len() {
        return Err("fibres do not partition Q over P".into());
    }
    for (k, fk) in fibres.iter().enumerate() {
        for fl in &fibres[..k] {
            if fk.iter().any(|&x| fl.iter().any(|&y| q.lt(x, y))) {
                return Err("fibres are not listed along a linear extension".into());
            }
        }
    }
    if fibres.len() != cert.steps.len() {
        return Err("one step per fibre expected".into());
    }

    let posets = cert.step_posets()?;
    for (k, step) in cert.steps.iter().enumerate() {
        let (cur, next) = (&posets[k], &posets[k + 1]);
        let name = fibre_id(&q, &fibres[k]);
        let idx = |id: &str| cur.require(id).map_err(|e| e.to_string());
        let names_fibre = |f: &str, ids: &[&str]| -> Result<(), String> {
            let mut listed: Vec<&str> = ids.to_vec();
            listed.sort_unstable();
            let mut actual: Vec<&str> = fibres[k].iter().map(|&x| q.id(x)).collect();
            actual.sort_unstable();
            if f != name || listed != actual {
                return Err(format!("step {} does not name fibre {name}", k + 1));
            }
            Ok(())
        };
        match step {
            ConvertStep::Trivial { fibre } => {
                names_fibre(fibre, &[q.id(fibres[k][0])])?;
                if !same_after_rename(cur, next, q.id(fibres[k][0]), &name) {
                    return Err(format!("trivial step {name} changes the order"));
                }
            }
            ConvertStep::Removal { fibre, x, z, coatom, phi } => {
                names_fibre(fibre, &[x, z])?;
                let (xi, zi) = (idx(x)?, idx(z)?);
                if cur.lower_covers(zi) != [xi] || Some(zi) == cur.top() {
                    return Err(format!("`{z}` does not cover exactly `{x}`"));
                }
                check_phi(cur, xi, zi, coatom, phi)?;
                if !same_after_rename(&cur.without(&[zi]), next, x, &name) {
                    return Err(format!("removal at {name} disagrees with the identification"));
                }
            }
            ConvertStep::CleanZipping {
                fibre,
                x,
                y,
                z,
                coatom,
                phi,
            } => {
                names_fibre(fibre, &[x, y, z])?;
                let (xi, yi, zi) = (idx(x)?, idx(y)?, idx(z)?);
                let mut lower = cur.lower_covers(zi).to_vec();
                lower.sort_unstable();
                let mut pair = vec![xi, yi];
                pair.sort_unstable();
                let strict = |a: usize| {
                    let mut s = cur.down_set(a).clone();
                    s.set(a, false);
                    s
                };
                if lower != pair || cur.join(xi, yi) != Some(zi) || strict(xi) != strict(yi) || Some(zi) == cur.top() {
                    return Err(format!("({x}, {y}, {z}) is not a proper zipper"));
                }
                check_phi(cur, xi, zi, coatom, phi)?;
                let (zipped, merged) = zip_triple(cur, xi, yi, zi).map_err(|e| e.to_string())?;
                if !same_after_rename(&zipped, next, &merged, &name) {
                    return Err(format!("zipping at {name} disagrees with the identification"));
                }
            }
        }
    }

    let last = posets.last().expect("at least Q");
    if cert.final_isomorphism.len() != last.len() {
        return Err("final isomorphism has the wrong size".into());
    }
    let mut image = vec![usize::MAX; last.len()];
    for (a, b) in &cert.final_isomorphism {
        image[last.require(a).map_err(|e| e.to_string())?] = p.require(b).map_err(|e| e.to_string())?;
    }
    let distinct: BTreeSet<usize> = image.iter().copied().collect();
    if distinct.len() != p.len() || image.contains(&usize::MAX) {
        return Err("final map is not a bijection".into());
    }
    for a in 0..last.len() {
        for b in 0..last.len() {
            if last.leq(a, b) != p.leq(image[a], image[b]) {
                return Err("final map is not an isomorphism".into());
            }
        }
    }
    Ok(())
}
