//! Order-isomorphism search for small posets.
//!
//! Elements are first coloured by local invariants (heights from below and
//! above, up/down-set sizes, cover degrees), colours are refined through the
//! cover graph, and a backtracking search then only tries colour-compatible
//! images, checking `≤` in both directions against everything already placed.

use std::collections::BTreeMap;

use super::{FinitePoset, PosetError};

/// An order-isomorphism `P → Q` as `image[p] = q`, or `None`.
pub fn is_isomorphic(p: &FinitePoset, q: &FinitePoset, cap: usize) -> Result<Option<Vec<usize>>, PosetError> {
    find_isomorphism(p, q, &[], cap)
}

/// Like [`is_isomorphic`], restricted to isomorphisms sending each pinned `a` to its `b`.
pub fn find_isomorphism(
    p: &FinitePoset,
    q: &FinitePoset,
    pins: &[(usize, usize)],
    cap: usize,
) -> Result<Option<Vec<usize>>, PosetError> {
    if p.len() != q.len() || p.cover_count() != q.cover_count() {
        return Ok(None);
    }
    if p.len() > cap {
        return Err(PosetError::SizeLimitExceeded { size: p.len(), cap });
    }
    let n = p.len();
    let Some((pc, qc)) = colour(p, q, pins) else {
        return Ok(None);
    };

    let order = p.linear_extension();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];
    let mut placed: Vec<usize> = Vec::with_capacity(n);
    let candidates: Vec<Vec<usize>> = order
        .iter()
        .map(|&v| (0..n).filter(|&w| qc[w] == pc[v]).collect())
        .collect();

    fn extend(
        depth: usize,
        order: &[usize],
        candidates: &[Vec<usize>],
        p: &FinitePoset,
        q: &FinitePoset,
        image: &mut [usize],
        used: &mut [bool],
        placed: &mut Vec<usize>,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for &w in &candidates[depth] {
            if used[w] {
                continue;
            }
            let consistent = placed.iter().all(|&u| {
                let fu = image[u];
                p.leq(u, v) == q.leq(fu, w) && p.leq(v, u) == q.leq(w, fu)
            });
            if !consistent {
                continue;
            }
            image[v] = w;
            used[w] = true;
            placed.push(v);
            if extend(depth + 1, order, candidates, p, q, image, used, placed) {
                return true;
            }
            placed.pop();
            used[w] = false;
            image[v] = usize::MAX;
        }
        false
    }

    if extend(0, &order, &candidates, p, q, &mut image, &mut used, &mut placed) {
        Ok(Some(image))
    } else {
        Ok(None)
    }
}

/// Jointly refined colourings of `p` and `q`; `None` when the colour histograms differ.
fn colour(p: &FinitePoset, q: &FinitePoset, pins: &[(usize, usize)]) -> Option<(Vec<usize>, Vec<usize>)> {
    let initial = |poset: &FinitePoset, pinned: &dyn Fn(usize) -> usize| -> Vec<Vec<usize>> {
        let heights = poset.heights();
        let depths = depths(poset);
        (0..poset.len())
            .map(|a| {
                vec![
                    pinned(a),
                    heights[a],
                    depths[a],
                    poset.down_set(a).count_ones(..),
                    poset.up_set(a).count_ones(..),
                    poset.lower_covers(a).len(),
                    poset.upper_covers(a).len(),
                ]
            })
            .collect()
    };
    let pin_p = |a: usize| pins.iter().position(|&(x, _)| x == a).map_or(0, |k| k + 1);
    let pin_q = |b: usize| pins.iter().position(|&(_, y)| y == b).map_or(0, |k| k + 1);
    let mut sig_p = initial(p, &pin_p);
    let mut sig_q = initial(q, &pin_q);
    let mut classes = 0;
    loop {
        let mut dict: BTreeMap<&Vec<usize>, usize> = BTreeMap::new();
        for sig in sig_p.iter().chain(sig_q.iter()) {
            let next = dict.len();
            dict.entry(sig).or_insert(next);
        }
        let pc: Vec<usize> = sig_p.iter().map(|s| dict[s]).collect();
        let qc: Vec<usize> = sig_q.iter().map(|s| dict[s]).collect();
        let mut hp = pc.clone();
        let mut hq = qc.clone();
        hp.sort_unstable();
        hq.sort_unstable();
        if hp != hq {
            return None;
        }
        if dict.len() == classes {
            return Some((pc, qc));
        }
        classes = dict.len();
        sig_p = refine(p, &pc);
        sig_q = refine(q, &qc);
    }
}

fn refine(poset: &FinitePoset, colours: &[usize]) -> Vec<Vec<usize>> {
    (0..poset.len())
        .map(|a| {
            let mut below: Vec<usize> = poset.lower_covers(a).iter().map(|&b| colours[b]).collect();
            let mut above: Vec<usize> = poset.upper_covers(a).iter().map(|&b| colours[b]).collect();
            below.sort_unstable();
            above.sort_unstable();
            let mut sig = vec![colours[a], below.len()];
            sig.extend(below);
            sig.push(usize::MAX);
            sig.extend(above);
            sig
        })
        .collect()
}

/// Length of the longest chain from each element up to a maximal element.
fn depths(poset: &FinitePoset) -> Vec<usize> {
    let mut d = vec![0; poset.len()];
    for a in poset.linear_extension().into_iter().rev() {
        d[a] = poset.upper_covers(a).iter().map(|&b| d[b] + 1).max().unwrap_or(0);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boolean(n: usize) -> FinitePoset {
        let ids: Vec<String> = (0..1usize << n).map(|m| format!("{m:0n$b}")).collect();
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

    fn check_iso(p: &FinitePoset, q: &FinitePoset, f: &[usize]) -> bool {
        (0..p.len()).all(|a| (0..p.len()).all(|b| p.leq(a, b) == q.leq(f[a], f[b])))
    }

    #[test]
    fn identity_and_relabelled() {
        let b3 = boolean(3);
        let f = is_isomorphic(&b3, &b3, 64).unwrap().unwrap();
        assert!(check_iso(&b3, &b3, &f));
        let renamed = b3.relabel(|i, _| format!("x{}", 7 - i)).unwrap();
        let g = is_isomorphic(&b3, &renamed, 64).unwrap().unwrap();
        assert!(check_iso(&b3, &renamed, &g));
    }

    #[test]
    fn different_cardinality() {
        let b3 = boolean(3);
        let minus = b3.without(&[0b011]);
        assert_eq!(is_isomorphic(&b3, &minus, 64).unwrap(), None);
    }

    #[test]
    fn same_size_non_isomorphic() {
        let chain4 = FinitePoset::from_covers(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d")]).unwrap();
        let b2 = boolean(2);
        assert_eq!(is_isomorphic(&chain4, &b2, 64).unwrap(), None);
    }

    #[test]
    fn pins_are_respected() {
        let b2 = boolean(2);
        let f = find_isomorphism(&b2, &b2, &[(1, 2)], 64).unwrap().unwrap();
        assert_eq!(f[1], 2);
        assert_eq!(f[2], 1);
        let chain = FinitePoset::from_covers(["a", "b", "c"], [("a", "b"), ("b", "c")]).unwrap();
        assert_eq!(find_isomorphism(&chain, &chain, &[(0, 1)], 64).unwrap(), None);
    }

    #[test]
    fn size_cap() {
        let b3 = boolean(3);
        assert!(matches!(
            is_isomorphic(&b3, &b3, 4),
            Err(PosetError::SizeLimitExceeded { size: 8, cap: 4 })
        ));
    }
}
