//! Invariant factors of integer matrices via Smith normal form.
//!
//! Elimination runs on dense `i64` storage with checked arithmetic and is
//! restarted on `BigInt` storage if any intermediate entry overflows.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, Signed, Zero};

/// Nonzero invariant factors `d₁ | d₂ | ⋯ | d_r` of the `rows × cols` matrix with the
/// given `(row, col, value)` entries; `r` is the rank. Repeated positions are summed.
pub fn invariant_factors(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> Vec<BigUint> {
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    let small = {
        let mut m = vec![vec![0i64; cols]; rows];
        let mut ok = true;
        for &(r, c, v) in entries {
            match m[r][c].checked_add(v) {
                Some(x) => m[r][c] = x,
                None => ok = false,
            }
        }
        if ok {
            diagonalize(m)
        } else {
            None
        }
    };
    let diagonal: Vec<BigInt> = match small {
        Some(d) => d.into_iter().map(BigInt::from).collect(),
        None => {
            let mut m = vec![vec![BigInt::zero(); cols]; rows];
            for &(r, c, v) in entries {
                m[r][c] += v;
            }
            diagonalize(m).expect("arbitrary precision elimination cannot overflow")
        }
    };
    normalize(diagonal.into_iter().map(|d| d.abs().to_biguint().expect("absolute value")).collect())
}

/// Diagonal of an equivalent diagonal matrix (not yet in divisibility form), or `None` on overflow.
fn diagonalize<T>(mut a: Vec<Vec<T>>) -> Option<Vec<T>>
where
    T: Clone + Integer + Signed + CheckedMul + CheckedSub,
{
    let rows = a.len();
    let cols = a[0].len();
    let mut diagonal = Vec::new();
    for t in 0..rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, v) in row.iter().enumerate().skip(t) {
                if v.is_zero() {
                    continue;
                }
                let better = best.is_none_or(|(bi, bj)| v.abs() < a[bi][bj].abs());
                if better {
                    best = Some((i, j));
                    if v.is_one() || (-v.clone()).is_one() {
                        break;
                    }
                }
            }
            if let Some((bi, bj)) = best {
                if a[bi][bj].abs().is_one() {
                    break;
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for k in t..cols {
                    let delta = q.checked_mul(&a[t][k])?;
                    a[i][k] = a[i][k].checked_sub(&delta)?;
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    changed = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let delta = q.checked_mul(&row[t])?;
                    row[j] = row[j].checked_sub(&delta)?;
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        diagonal.push(a[t][t].clone());
    }
    Some(diagonal)
}

/// Turns an arbitrary diagonal into the divisibility chain `d₁ | d₂ | ⋯`.
fn normalize(mut d: Vec<BigUint>) -> Vec<BigUint> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d
}
