//! Canonical forms and isomorphism tests for the small colored multigraphs
//! this crate produces: module fusion graphs (one adjacency matrix per
//! generator) and components of the graph of quantum symmetries.
//!
//! Vertex labels are presentation, not substance, so comparisons against
//! printed matrices and between independently computed routes go through a
//! canonical relabeling: the lexicographically minimal tuple of adjacency
//! matrices over the allowed vertex permutations, optionally fixing a
//! distinguished vertex.

use crate::intmat::IntMat;

fn tuple_key(mats: &[IntMat], perm: &[usize]) -> Vec<i64> {
    let mut key = Vec::with_capacity(mats.len() * perm.len() * perm.len());
    for m in mats {
        for &i in perm {
            for &j in perm {
                key.push(m[(i, j)]);
            }
        }
    }
    key
}

fn partial_key(mats: &[IntMat], perm: &[usize]) -> Vec<i64> {
    tuple_key(mats, perm)
}

fn partial_of_best(best_key: &[i64], nmats: usize, n: usize, p: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(nmats * p * p);
    for m in 0..nmats {
        for i in 0..p {
            for j in 0..p {
                out.push(best_key[m * n * n + i * n + j]);
            }
        }
    }
    out
}

/// The permutation minimizing the adjacency tuple, by branch and bound over
/// partial permutations. `fixed_first` pins vertex 0 (the unit).
pub fn canonical_perm(mats: &[IntMat], fixed_first: bool) -> Vec<usize> {
    let n = mats.first().map_or(0, |m| m.rows);
    let mut best: Option<(Vec<i64>, Vec<usize>)> = None;
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    if fixed_first && n > 0 {
        perm.push(0);
        used[0] = true;
    }
    fn extend(
        mats: &[IntMat],
        n: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        best: &mut Option<(Vec<i64>, Vec<usize>)>,
    ) {
        if perm.len() == n {
            let key = tuple_key(mats, perm);
            if best.as_ref().is_none_or(|(bk, _)| key < *bk) {
                *best = Some((key, perm.clone()));
            }
            return;
        }
        if let Some((bk, _)) = best {
            let probe = partial_key(mats, perm);
            if probe > partial_of_best(bk, mats.len(), n, perm.len()) {
                return;
            }
        }
        for v in 0..n {
            if !used[v] {
                perm.push(v);
                used[v] = true;
                extend(mats, n, perm, used, best);
                perm.pop();
                used[v] = false;
            }
        }
    }
    extend(mats, n, &mut perm, &mut used, &mut best);
    best.expect("at least one permutation").1
}

/// Canonical form of a tuple of adjacency matrices.
pub fn canonical_form(mats: &[IntMat], fixed_first: bool) -> Vec<IntMat> {
    let perm = canonical_perm(mats, fixed_first);
    mats.iter().map(|m| m.permute_square(&perm)).collect()
}

/// Is there a relabeling (optionally fixing vertex 0) making the two
/// adjacency tuples equal?
pub fn isomorphic(a: &[IntMat], b: &[IntMat], fixed_first: bool) -> bool {
    if a.len() != b.len() || a.is_empty() {
        return a.len() == b.len();
    }
    if a[0].rows != b[0].rows {
        return false;
    }
    if a
        .iter()
        .zip(b)
        .any(|(x, y)| x.entry_sum() != y.entry_sum() || x.trace() != y.trace())
    {
        return false;
    }
    find_isomorphism(a, b, fixed_first).is_some()
}

/// Explicit isomorphism search: a permutation p with a[k][p(i), p(j)] ==
/// b[k][i, j] for all k, i, j, i.e. p maps b-labels to a-labels.
pub fn find_isomorphism(a: &[IntMat], b: &[IntMat], fix_zero: bool) -> Option<Vec<usize>> {
    let n = a.first()?.rows;
    if b.first()?.rows != n {
        return None;
    }
    let mut perm: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    fn consistent(a: &[IntMat], b: &[IntMat], perm: &[Option<usize>], i: usize) -> bool {
        let pi = perm[i].unwrap();
        for (ma, mb) in a.iter().zip(b) {
            for (j, pj) in perm.iter().enumerate() {
                if let Some(pj) = pj {
                    if ma[(pi, *pj)] != mb[(i, j)] || ma[(*pj, pi)] != mb[(j, i)] {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn rec(
        a: &[IntMat],
        b: &[IntMat],
        perm: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = perm.len();
        let Some(i) = (0..n).find(|&x| perm[x].is_none()) else {
            return true;
        };
        for v in 0..n {
            if used[v] {
                continue;
            }
            perm[i] = Some(v);
            used[v] = true;
            if consistent(a, b, perm, i) && rec(a, b, perm, used) {
                return true;
            }
            perm[i] = None;
            used[v] = false;
        }
        false
    }
    if fix_zero {
        perm[0] = Some(0);
        used[0] = true;
        if !consistent(a, b, &perm, 0) {
            return None;
        }
    }
    if rec(a, b, &mut perm, &mut used) {
        Some(perm.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_collapses_relabelings() {
        let a = IntMat::from_rows(&[&[0, 1, 0], &[1, 0, 2], &[0, 2, 0]]);
        let p = vec![0, 2, 1];
        let b = a.permute_square(&p);
        assert!(isomorphic(&[a.clone()], &[b.clone()], true));
        assert_eq!(canonical_form(&[a], true), canonical_form(&[b], true));
    }

    #[test]
    fn distinguishes_different_graphs() {
        let a = IntMat::from_rows(&[&[0, 1], &[1, 0]]);
        let b = IntMat::from_rows(&[&[0, 2], &[2, 0]]);
        assert!(!isomorphic(&[a], &[b], true));
    }

    #[test]
    fn finds_explicit_isomorphism() {
        let a = IntMat::from_rows(&[&[0, 1, 1], &[1, 0, 0], &[1, 0, 2]]);
        let p = vec![0, 2, 1];
        let b = a.permute_square(&p);
        let iso = find_isomorphism(&[a.clone()], &[b.clone()], true).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a[(iso[i], iso[j])], b[(i, j)]);
            }
        }
    }
}
