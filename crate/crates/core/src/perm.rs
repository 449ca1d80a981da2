//! Small permutation groups: closure, orbits and transitivity degree.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// A permutation of `0..n` in one-line notation.
pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// `q ∘ p`: apply `p` first.
pub fn compose(q: &[usize], p: &[usize]) -> Perm {
    p.iter().map(|&x| q[x]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

/// All elements generated by `gens` (which must act on `0..n`), sorted.
pub fn closure(n: usize, gens: &[Perm], cap: usize) -> Result<Vec<Perm>> {
    let mut seen: BTreeSet<Perm> = BTreeSet::from([identity(n)]);
    let mut queue = VecDeque::from([identity(n)]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = compose(g, &p);
            if !seen.contains(&q) {
                if seen.len() == cap {
                    return Err(Error::GroupCap(cap));
                }
                seen.insert(q.clone());
                queue.push_back(q);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Orbits of the group generated by `gens` on `0..n`.
pub fn orbits(n: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            for g in gens {
                if !seen[g[x]] {
                    seen[g[x]] = true;
                    orbit.push(g[x]);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// Whether the group generated by `gens` is transitive on ordered pairs of
/// distinct points of `0..n`.
pub fn is_two_transitive(n: usize, gens: &[Perm]) -> bool {
    if n < 2 {
        return true;
    }
    let index = |x: usize, y: usize| x * n + y;
    let pair_gens: Vec<Perm> = gens
        .iter()
        .map(|g| (0..n * n).map(|k| index(g[k / n], g[k % n])).collect())
        .collect();
    let first = index(0, 1);
    let orbit = orbits(n * n, &pair_gens).into_iter().find(|o| o.contains(&first)).unwrap_or_default();
    orbit.len() == n * (n - 1)
}

/// Largest `k ≤ 2` such that the group is `k`-transitive.
pub fn transitivity_degree(n: usize, gens: &[Perm]) -> usize {
    if orbits(n, gens).len() != 1 {
        0
    } else if is_two_transitive(n, gens) {
        2
    } else {
        1
    }
}
