//! Slow reference computations used to cross-check the fast paths.
//!
//! Characters of `GL(n)` are built from Gelfand–Tsetlin patterns as weight
//! multisets; tensor products multiply them as Laurent polynomials and
//! decompositions peel off highest weights one at a time.

use std::collections::{BTreeMap, HashMap};

use crate::weights::{dual, f_eta_weight};

/// Weight multiset `weight ↦ multiplicity`.
pub type Character = BTreeMap<Vec<i64>, i64>;

fn gt_rows(top: &[i64], acc: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
    if top.len() == 1 {
        out.push(acc.clone());
        return;
    }
    // next row r of length len-1 with top[i] >= r[i] >= top[i+1]
    let len = top.len() - 1;
    let mut row = vec![0; len];
    fn rec(top: &[i64], i: usize, row: &mut Vec<i64>, acc: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
        if i == row.len() {
            acc.push(row.clone());
            gt_rows(&row.clone(), acc, out);
            acc.pop();
            return;
        }
        for v in top[i + 1]..=top[i] {
            row[i] = v;
            rec(top, i + 1, row, acc, out);
        }
    }
    rec(top, 0, &mut row, acc, out);
}

/// Character of the irreducible representation with highest weight `lambda`.
pub fn character(lambda: &[i64]) -> Character {
    let n = lambda.len();
    let mut patterns = Vec::new();
    gt_rows(lambda, &mut vec![lambda.to_vec()], &mut patterns);
    let mut ch = Character::new();
    for p in patterns {
        // p[0] has length n, p[n-1] has length 1
        let mut w = vec![0; n];
        for i in 0..n {
            let row_sum: i64 = p[n - 1 - i].iter().sum();
            let below: i64 = if i == 0 { 0 } else { p[n - i].iter().sum() };
            w[i] = row_sum - below;
        }
        *ch.entry(w).or_insert(0) += 1;
    }
    ch
}

pub fn product(a: &Character, b: &Character) -> Character {
    let mut out = Character::new();
    for (wa, ma) in a {
        for (wb, mb) in b {
            let w: Vec<i64> = wa.iter().zip(wb).map(|(x, y)| x + y).collect();
            *out.entry(w).or_insert(0) += ma * mb;
        }
    }
    out.retain(|_, m| *m != 0);
    out
}

/// Decompose into irreducibles by peeling the lexicographically largest weight.
pub fn decompose(ch: &Character) -> BTreeMap<Vec<i64>, i64> {
    let mut rest = ch.clone();
    let mut cache: HashMap<Vec<i64>, Character> = HashMap::new();
    let mut out = BTreeMap::new();
    while let Some((top, &m)) = rest.iter().next_back() {
        let top = top.clone();
        let irr = cache.entry(top.clone()).or_insert_with(|| character(&top));
        for (w, k) in irr.iter() {
            *rest.entry(w.clone()).or_insert(0) -= m * k;
        }
        rest.retain(|_, v| *v != 0);
        out.insert(top, m);
    }
    out
}

/// Multiplicity of the trivial representation in `⊗ F_{λ_j} ⊗ det^χ`.
pub fn trivial_multiplicity(weights: &[Vec<i64>], chi: i64) -> i64 {
    let (last, init) = weights.split_last().expect("at least one factor");
    let n = last.len();
    let mut ch = Character::from([(vec![chi; n], 1)]);
    for w in init {
        ch = product(&ch, &character(w));
    }
    let parts = decompose(&ch);
    parts.get(&dual(last)).copied().unwrap_or(0)
}

/// Oracle for [`crate::weights::balanced_at`]; `None` when `F_η` is undefined.
pub fn balanced_oracle(mu: &[i64], nu: &[i64], chi: i64, eta: i64, n: usize) -> Option<bool> {
    let f = f_eta_weight(eta, n)?;
    Some(trivial_multiplicity(&[mu.to_vec(), f, nu.to_vec()], chi) > 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weylkostant::weyl_dimension;

    #[test]
    fn character_dimensions_match_weyl() {
        for lam in [vec![0, 0, 0], vec![1, 0, 0], vec![2, 1, 0], vec![3, 1, -2], vec![2, 2]] {
            let dim: i64 = character(&lam).values().sum();
            assert_eq!(dim as u64, weyl_dimension(&lam).unwrap(), "{lam:?}");
        }
    }

    #[test]
    fn adjoint_decomposition() {
        // std ⊗ std^∨ = trivial ⊕ adjoint
        let ch = product(&character(&[1, 0, 0]), &character(&[0, 0, -1]));
        let d = decompose(&ch);
        assert_eq!(d.get(&vec![0, 0, 0]), Some(&1));
        assert_eq!(d.get(&vec![1, 0, -1]), Some(&1));
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn trivial_in_dual_pair() {
        assert_eq!(trivial_multiplicity(&[vec![2, 1], vec![-1, -2]], 0), 1);
        assert_eq!(trivial_multiplicity(&[vec![1, 0], vec![1, 0]], 0), 0);
        assert_eq!(trivial_multiplicity(&[vec![1, 0], vec![1, 0]], -1), 1);
    }
}
