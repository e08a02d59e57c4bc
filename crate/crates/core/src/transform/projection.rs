use crate::poset::{chain2_index, chain2_split, FinitePoset, Level};
use crate::spm::{verify_spm, Spm};

use super::TransformError;

/// `π: [0̂, M(1̂)] × 2 → P`, `(p, β) ↦ M(p)` when `p ⋖ M(p)`, otherwise `(p, γ) ↦ p`.
#[derive(Debug, Clone)]
pub struct OrderProjection {
    /// `P`.
    pub codomain: FinitePoset,
    /// `[0̂, M(1̂)]` with ids from `P`.
    pub base: FinitePoset,
    /// Index in `P` of each element of `base`.
    pub base_in_p: Vec<usize>,
    /// `Q = base × 2`.
    pub domain: FinitePoset,
    /// `π` on indices of `Q`.
    pub map: Vec<usize>,
    /// `π⁻¹(p)` for every `p ∈ P`, as increasing indices of `Q`.
    pub fibres: Vec<Vec<usize>>,
}

impl OrderProjection {
    /// Index in `Q` of `(p, γ)` for `p ∈ P`, if `p ≤ M(1̂)`.
    pub fn q_index(&self, p: usize, level: Level) -> Option<usize> {
        self.base_in_p.binary_search(&p).ok().map(|i| chain2_index(i, level))
    }

    /// `(element of P, level)` for an index of `Q`.
    pub fn q_coords(&self, q: usize) -> (usize, Level) {
        let (i, level) = chain2_split(q);
        (self.base_in_p[i], level)
    }
}

/// Builds `π` for a verified SPM and checks it against the four-case fibre
/// formula, order preservation, and lifting of every relation of `P`.
pub fn order_projection(p: &FinitePoset, m: &Spm) -> Result<OrderProjection, TransformError> {
    if p.bottom().is_none() {
        return Err(TransformError::Unbounded);
    }
    let top = p.top().ok_or(TransformError::Unbounded)?;
    let verdict = verify_spm(p, m)?;
    if !verdict.is_valid() {
        return Err(TransformError::SpmInvalid(format!("{:?}", verdict.violations)));
    }
    let m_top = m.apply(top);
    let ideal = p.principal_ideal(m_top);
    let base_in_p = ideal.elements().to_vec();
    let base = ideal.to_poset();
    let domain = base.product_with_chain2();
    let map: Vec<usize> = (0..domain.len())
        .map(|q| {
            let (i, level) = chain2_split(q);
            let a = base_in_p[i];
            if level == Level::Beta && p.covers(a, m.apply(a)) {
                m.apply(a)
            } else {
                a
            }
        })
        .collect();
    let mut fibres = vec![Vec::new(); p.len()];
    for (q, &a) in map.iter().enumerate() {
        fibres[a].push(q);
    }
    let proj = OrderProjection {
        codomain: p.clone(),
        base,
        base_in_p,
        domain,
        map,
        fibres,
    };

    let id = |a: usize| p.id(a).to_string();
    for a in 0..p.len() {
        let ma = m.apply(a);
        let q = |x: usize, level| proj.q_index(x, level).expect("element lies below M(1̂)");
        let mut expected = if !p.leq(a, m_top) {
            vec![q(ma, Level::Beta)]
        } else if p.lt(a, ma) {
            vec![q(a, Level::Alpha)]
        } else if a == ma {
            vec![q(a, Level::Alpha), q(a, Level::Beta)]
        } else {
            vec![q(a, Level::Alpha), q(ma, Level::Beta), q(a, Level::Beta)]
        };
        expected.sort_unstable();
        if proj.fibres[a] != expected {
            return Err(TransformError::NotOrderProjection(format!(
                "fibre over `{}` disagrees with the fibre formula",
                id(a)
            )));
        }
    }
    for (x, &px) in proj.map.iter().enumerate() {
        for y in proj.domain.up_set(x).ones() {
            if !p.leq(px, proj.map[y]) {
                return Err(TransformError::NotOrderProjection(format!(
                    "`{}` ≤ `{}` but their images are not ordered",
                    proj.domain.id(x),
                    proj.domain.id(y)
                )));
            }
        }
    }
    for a in 0..p.len() {
        for b in p.up_set(a).ones() {
            let lifted = proj.fibres[a]
                .iter()
                .any(|&x| proj.fibres[b].iter().any(|&y| proj.domain.leq(x, y)));
            if !lifted {
                return Err(TransformError::NotOrderProjection(format!(
                    "`{}` ≤ `{}` does not lift",
                    id(a),
                    id(b)
                )));
            }
        }
    }
    Ok(proj)
}

/// Id of a fibre: its members' ids, comma separated, in braces.
pub(crate) fn fibre_id(domain: &FinitePoset, members: &[usize]) -> String {
    let inner: Vec<&str> = members.iter().map(|&q| domain.id(q)).collect();
    format!("{{{}}}", inner.join(","))
}

/// The poset of fibres, `F ≤ G` iff some `x ∈ F` lies below some `y ∈ G`.
/// Fibre `i` sits over element `i` of `P`; the canonical map is checked to be an isomorphism.
pub fn fibre_poset(proj: &OrderProjection) -> Result<FinitePoset, TransformError> {
    let q = &proj.domain;
    let ids = proj.fibres.iter().map(|f| fibre_id(q, f)).collect();
    let below = |a: usize, b: usize| {
        proj.fibres[a]
            .iter()
            .any(|&x| proj.fibres[b].iter().any(|&y| q.leq(x, y)))
    };
    let fib = FinitePoset::from_relation(ids, below)
        .map_err(|e| TransformError::NotOrderProjection(format!("fibre relation: {e}")))?;
    let p = &proj.codomain;
    for a in 0..p.len() {
        for b in 0..p.len() {
            if fib.leq(a, b) != p.leq(a, b) {
                return Err(TransformError::NotOrderProjection(format!(
                    "fibres over `{}` and `{}` are ordered differently from their images",
                    p.id(a),
                    p.id(b)
                )));
            }
        }
    }
    Ok(fib)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> FinitePoset {
        let ids: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let covers: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        FinitePoset::from_cover_indices(ids, &covers).unwrap()
    }

    fn fibre_ids(proj: &OrderProjection, a: usize) -> Vec<&str> {
        proj.fibres[a].iter().map(|&q| proj.domain.id(q)).collect()
    }

    #[test]
    fn two_chain_swap() {
        let proj = order_projection(&chain(2), &Spm::new(vec![1, 0])).unwrap();
        assert_eq!(fibre_ids(&proj, 0), vec!["(c0,α)"]);
        assert_eq!(fibre_ids(&proj, 1), vec!["(c0,β)"]);
        let fib = fibre_poset(&proj).unwrap();
        assert_eq!(fib.ids(), &["{(c0,α)}", "{(c0,β)}"]);
    }

    #[test]
    fn three_chain_with_fixed_bottom() {
        let c3 = chain(3);
        let proj = order_projection(&c3, &Spm::new(vec![0, 2, 1])).unwrap();
        assert_eq!(fibre_ids(&proj, 0), vec!["(c0,α)", "(c0,β)"]);
        assert_eq!(fibre_ids(&proj, 1), vec!["(c1,α)"]);
        assert_eq!(fibre_ids(&proj, 2), vec!["(c1,β)"]);
        let fib = fibre_poset(&proj).unwrap();
        assert_eq!(fib.len(), 3);
        assert!(crate::poset::is_isomorphic(&fib, &c3, 64).unwrap().is_some());
    }

    #[test]
    fn invalid_matching_is_rejected() {
        let c3 = chain(3);
        assert!(matches!(
            order_projection(&c3, &Spm::new(vec![2, 1, 0])),
            Err(TransformError::SpmInvalid(_))
        ));
    }
}
