#![allow(dead_code)]

use pircon_core::FinitePoset;
use proptest::prelude::*;

/// Poset on `n` elements where `i < j` for the chosen pairs with `i < j`, closed transitively.
pub fn poset_from_mask(n: usize, bits: &[bool]) -> FinitePoset {
    let mut rel = vec![vec![false; n]; n];
    let mut k = 0;
    for i in 0..n {
        rel[i][i] = true;
        for j in i + 1..n {
            rel[i][j] = bits.get(k).copied().unwrap_or(false);
            k += 1;
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                if rel[i][m] && rel[m][j] {
                    rel[i][j] = true;
                }
            }
        }
    }
    FinitePoset::from_relation((0..n).map(|i| format!("v{i}")).collect(), |a, b| rel[a][b]).unwrap()
}

/// Adds a new bottom and top around `middle`.
pub fn bounded(middle: &FinitePoset) -> FinitePoset {
    let n = middle.len() + 2;
    let ids = std::iter::once("bot".to_string())
        .chain(middle.ids().iter().cloned())
        .chain(std::iter::once("top".to_string()))
        .collect();
    FinitePoset::from_relation(ids, |a, b| {
        a == b || a == 0 || b == n - 1 || (a > 0 && b > 0 && a < n - 1 && b < n - 1 && middle.leq(a - 1, b - 1))
    })
    .unwrap()
}

pub fn arb_poset(max: usize) -> impl Strategy<Value = FinitePoset> {
    (1..=max, prop::collection::vec(any::<bool>(), max * max)).prop_map(|(n, bits)| poset_from_mask(n, &bits))
}

pub fn arb_bounded_poset(max_middle: usize) -> impl Strategy<Value = FinitePoset> {
    (0..=max_middle, prop::collection::vec(any::<bool>(), max_middle * max_middle))
        .prop_map(|(n, bits)| bounded(&poset_from_mask(n, &bits)))
}

pub fn chain(n: usize) -> FinitePoset {
    let ids = (0..n).map(|i| format!("c{i}")).collect();
    let covers: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    FinitePoset::from_cover_indices(ids, &covers).unwrap()
}

pub fn boolean_lattice(rank: usize) -> FinitePoset {
    let ids = (0..1usize << rank).map(|i| format!("{i:0rank$b}")).collect();
    FinitePoset::from_relation(ids, |i, j| i & j == i).unwrap()
}
