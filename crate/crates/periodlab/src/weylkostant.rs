//! Weyl groups over the embedding set: coset representatives `w_k`, Kostant
//! lines with their torus weights, the representatives `w^(k)`, wedge
//! monomials of covectors and the decomposition `σ = σ₂ ∘ σ₁`.
//!
//! Permutations are 0-based vectors with `w[j] = i` meaning `w(j+1) = i+1`,
//! i.e. the permutation matrix has `w_{i,j} = 1`.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::cmfield::{EmbeddingSet, GaloisPermutation};
use crate::weights::{self, compute_eta, dual, f_eta_weight, WeightError, WeightSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KostantError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("η does not satisfy Case (±)")]
    NotCasePm,
    #[error("k = {k} is outside 1..={n}")]
    BadIndex { k: usize, n: usize },
    #[error("uniqueness scan found {0} matching elements")]
    UniquenessFailed(usize),
    #[error("invalid Galois permutation: {0}")]
    InvalidGaloisPermutation(String),
    #[error("weight is not dominant")]
    NonDominant,
}

pub type Result<T> = std::result::Result<T, KostantError>;

pub type Perm = Vec<usize>;

pub fn inversions(w: &[usize]) -> usize {
    (0..w.len()).tuple_combinations().filter(|&(i, j)| w[i] > w[j]).count()
}

pub fn signature(w: &[usize]) -> i8 {
    if inversions(w).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// The cycle `(a a+1 … b)` on `n` points (1-based endpoints).
pub fn cycle(n: usize, a: usize, b: usize) -> Perm {
    let mut w: Perm = (0..n).collect();
    if a < b {
        for j in a..b {
            w[j - 1] = j;
        }
        w[b - 1] = a - 1;
    }
    w
}

pub fn inverse(w: &[usize]) -> Perm {
    let mut inv = vec![0; w.len()];
    for (j, &i) in w.iter().enumerate() {
        inv[i] = j;
    }
    inv
}

/// Disjoint-cycle notation, 1-based; the identity renders as `id`.
pub fn cycle_notation(w: &[usize]) -> String {
    let mut seen = vec![false; w.len()];
    let mut parts = Vec::new();
    for s in 0..w.len() {
        if seen[s] || w[s] == s {
            continue;
        }
        let mut c = Vec::new();
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            c.push((j + 1).to_string());
            j = w[j];
        }
        parts.push(format!("({})", c.join(" ")));
    }
    if parts.is_empty() {
        "id".into()
    } else {
        parts.concat()
    }
}

/// `w_k = (k k+1 … n)` for `k = 1..n`, found by filtering `S_n` for
/// `w(Δ ∖ {α_{n-1}}) ⊂ Σ⁺` and matched against the cycle formula.
pub fn coset_reps(n: usize) -> Vec<Perm> {
    assert!(n >= 2, "n must be at least 2");
    let found: Vec<Perm> = (0..n)
        .permutations(n)
        .filter(|w| (0..n.saturating_sub(2)).all(|j| w[j] < w[j + 1]))
        .collect();
    let reps: Vec<Perm> = (1..=n).map(|k| cycle(n, k, n)).collect();
    assert_eq!(found.len(), n);
    assert!(reps.iter().all(|r| found.contains(r)), "cycle formula disagrees with the filter");
    reps
}

/// One permutation per embedding.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    pub comps: Vec<Perm>,
}

impl WeylElement {
    pub fn identity(n: usize, e: usize) -> Self {
        WeylElement { comps: vec![(0..n).collect(); e] }
    }

    pub fn length(&self) -> usize {
        self.comps.iter().map(|w| inversions(w)).sum()
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|w| cycle_notation(w)).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Covector `e_{i,j}^{ι*}` with `1 ≤ i < j ≤ n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Covector {
    pub embedding: usize,
    pub i: usize,
    pub j: usize,
}

impl fmt::Display for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}{}^{}", self.i, self.j, self.embedding)
    }
}

/// A signed wedge of covectors sorted by (embedding, i, j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeMonomial {
    pub sign: i8,
    pub labels: Vec<Covector>,
}

/// Signature of the permutation that sorts `v` (entries distinct).
fn sorting_sign<T: Ord>(v: &[T]) -> i8 {
    let order: Perm = (0..v.len()).sorted_by(|&a, &b| v[a].cmp(&v[b])).collect();
    signature(&order)
}

impl WedgeMonomial {
    /// Sorts the factors, folding the sorting signature into the sign.
    pub fn from_unsorted(sign: i8, labels: Vec<Covector>) -> Self {
        let s = sorting_sign(&labels);
        let mut labels = labels;
        labels.sort();
        WedgeMonomial { sign: sign * s, labels }
    }

    pub fn is_sorted(&self) -> bool {
        self.labels.windows(2).all(|p| p[0] < p[1])
    }
}

impl fmt::Display for WedgeMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign < 0 { "-" } else { "+" };
        if self.labels.is_empty() {
            return write!(f, "{s}1");
        }
        write!(f, "{s}{}", self.labels.iter().map(|c| c.to_string()).join("^"))
    }
}

/// A line of `H^p(n, F_η^∨)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KostantLine {
    pub w: WeylElement,
    pub length: usize,
    pub torus_weight: Vec<Vec<i64>>,
    pub wedge: WedgeMonomial,
}

/// `γ_i = Λ_{w(i)} - Σ_{α inverted} α` for the highest weight `Λ` of `F_η^∨`.
pub fn torus_weight(w: &[usize], lambda: &[i64]) -> Vec<i64> {
    let n = w.len();
    let mut g: Vec<i64> = (0..n).map(|i| lambda[w[i]]).collect();
    for (i, j) in (0..n).tuple_combinations() {
        if w[i] > w[j] {
            g[i] -= 1;
            g[j] += 1;
        }
    }
    g
}

fn inversion_labels(w: &WeylElement) -> Vec<Covector> {
    let mut out = Vec::new();
    for (e, p) in w.comps.iter().enumerate() {
        for (i, j) in (0..p.len()).tuple_combinations() {
            if p[i] > p[j] {
                out.push(Covector { embedding: e, i: i + 1, j: j + 1 });
            }
        }
    }
    out
}

fn case_pm_eta(w: &WeightSystem, emb: &EmbeddingSet) -> Result<Vec<i64>> {
    let eta = compute_eta(w)?;
    if eta.len() != emb.degree() {
        return Err(WeightError::Malformed("weights do not match the embedding set".into()).into());
    }
    if !weights::is_case_pm(&eta, &emb.conjugation, w.n) {
        return Err(KostantError::NotCasePm);
    }
    Ok(eta)
}

fn dual_highest(eta: &[i64], n: usize) -> Vec<Vec<i64>> {
    eta.iter().map(|&e| dual(&f_eta_weight(e, n).expect("Case (±) makes F_η defined"))).collect()
}

fn line(w: WeylElement, lambdas: &[Vec<i64>]) -> KostantLine {
    let torus_weight = w.comps.iter().zip(lambdas).map(|(p, l)| torus_weight(p, l)).collect();
    let wedge = WedgeMonomial::from_unsorted(1, inversion_labels(&w));
    KostantLine { length: w.length(), w, torus_weight, wedge }
}

/// Every absolute Weyl element, in lexicographic order of components.
pub fn all_elements(n: usize, e: usize) -> impl Iterator<Item = WeylElement> {
    let sn: Vec<Perm> = (0..n).permutations(n).collect();
    (0..e)
        .map(move |_| sn.clone())
        .multi_cartesian_product()
        .map(|comps| WeylElement { comps })
}

/// All lines in degree `p`.
pub fn kostant_lines(w: &WeightSystem, emb: &EmbeddingSet, p: usize) -> Result<Vec<KostantLine>> {
    let eta = case_pm_eta(w, emb)?;
    let lambdas = dual_highest(&eta, w.n);
    Ok(all_elements(w.n, eta.len()).filter(|x| x.length() == p).map(|x| line(x, &lambdas)).collect())
}

/// `w^(k)` from the closed form with its uniqueness certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WkCertificate {
    pub line: KostantLine,
    /// Elements examined by the scan.
    pub scanned: usize,
    pub matches: usize,
}

/// Scan scope for [`find_wk`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanScope {
    /// Elements of length `c_n` only.
    BottomDegree,
    /// The whole absolute Weyl group.
    FullGroup,
}

/// Target torus weight of `w^(k)` at an embedding with exponent `η`.
pub fn wk_target(eta: i64, n: usize, k: usize) -> Vec<i64> {
    (1..=n)
        .map(|j| match j.cmp(&k) {
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => eta - (n - k) as i64,
            std::cmp::Ordering::Greater => 1,
        })
        .collect()
}

/// Closed form: `(k … n)^{-1}` where `η ≤ 0`, `(1 … k)` where `η ≥ n`.
pub fn wk_closed_form(eta: &[i64], n: usize, k: usize) -> WeylElement {
    WeylElement {
        comps: eta
            .iter()
            .map(|&e| if e <= 0 { inverse(&cycle(n, k, n)) } else { cycle(n, 1, k) })
            .collect(),
    }
}

pub fn find_wk(w: &WeightSystem, emb: &EmbeddingSet, k: usize) -> Result<WkCertificate> {
    find_wk_scoped(w, emb, k, ScanScope::BottomDegree)
}

pub fn find_wk_scoped(w: &WeightSystem, emb: &EmbeddingSet, k: usize, scope: ScanScope) -> Result<WkCertificate> {
    let n = w.n;
    if k == 0 || k > n {
        return Err(KostantError::BadIndex { k, n });
    }
    let eta = case_pm_eta(w, emb)?;
    let lambdas = dual_highest(&eta, n);
    let targets: Vec<Vec<i64>> = eta.iter().map(|&e| wk_target(e, n, k)).collect();
    let c_n = (n - 1) * eta.len() / 2;
    let mut scanned = 0;
    let mut found = Vec::new();
    for x in all_elements(n, eta.len()) {
        if scope == ScanScope::BottomDegree && x.length() != c_n {
            continue;
        }
        scanned += 1;
        let ok = x.comps.iter().zip(&lambdas).zip(&targets).all(|((p, l), t)| &torus_weight(p, l) == t);
        if ok {
            found.push(x);
        }
    }
    let closed = wk_closed_form(&eta, n, k);
    if found.len() != 1 || found[0] != closed {
        return Err(KostantError::UniquenessFailed(found.len()));
    }
    Ok(WkCertificate { line: line(closed, &lambdas), scanned, matches: 1 })
}

/// `ω(I^{B,(k)})`: for each `ι` with `η_ι ≤ 0`, the covectors `e_{i,k}^{ῑ}`
/// (`i < k`) and `e_{k,j}^{ι}` (`j > k`); equal to the inversion set of `w^(k)`.
pub fn omega_monomial(eta: &[i64], emb: &EmbeddingSet, n: usize, k: usize) -> Result<WedgeMonomial> {
    if k == 0 || k > n {
        return Err(KostantError::BadIndex { k, n });
    }
    if !weights::is_case_pm(eta, &emb.conjugation, n) {
        return Err(KostantError::NotCasePm);
    }
    let mut labels = Vec::new();
    for (iota, &e) in eta.iter().enumerate() {
        if e > 0 {
            continue;
        }
        let bar = emb.conjugation[iota];
        labels.extend((1..k).map(|i| Covector { embedding: bar, i, j: k }));
        labels.extend((k + 1..=n).map(|j| Covector { embedding: iota, i: k, j }));
    }
    // the product is taken in the fixed order, so the canonical sign is +1
    labels.sort();
    Ok(WedgeMonomial { sign: 1, labels })
}

/// Sign picked up by relabelling `(i,j,ι) ↦ (i,j,g(ι))` and re-sorting.
pub fn wedge_sigma_sign(m: &WedgeMonomial, g: &GaloisPermutation) -> i8 {
    debug_assert!(m.is_sorted());
    let moved: Vec<Covector> =
        m.labels.iter().map(|c| Covector { embedding: g.apply(c.embedding), ..*c }).collect();
    sorting_sign(&moved)
}

/// `σ = σ₂ ∘ σ₁` with `σ₁` order-preserving on fibers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaDecomposition {
    pub sigma1: GaloisPermutation,
    pub sigma2: GaloisPermutation,
    pub epsilon: i8,
}

pub fn sigma_decompose(g: &GaloisPermutation, emb: &EmbeddingSet) -> Result<SigmaDecomposition> {
    g.validate(emb).map_err(|e| KostantError::InvalidGaloisPermutation(e.to_string()))?;
    let on_k1 = g.on_k1(emb);
    let s1: Vec<usize> = (0..emb.degree())
        .map(|i| emb.fibers[on_k1[emb.restriction_k1[i]]][emb.fiber_position(i)])
        .collect();
    let sigma1 = GaloisPermutation::new(s1, emb).map_err(|e| KostantError::InvalidGaloisPermutation(e.to_string()))?;
    let sigma2 = g.compose(&sigma1.inverse());
    let epsilon = signature(sigma2.as_slice());
    Ok(SigmaDecomposition { sigma1, sigma2, epsilon })
}

/// Weyl dimension formula `Π_{i<j} (λ_i - λ_j + j - i)/(j - i)`.
pub fn weyl_dimension(weight: &[i64]) -> Result<u64> {
    if !weights::is_dominant(weight) {
        return Err(KostantError::NonDominant);
    }
    let mut acc = BigRational::one();
    for (i, j) in (0..weight.len()).tuple_combinations() {
        let num = BigInt::from(weight[i] - weight[j] + (j - i) as i64);
        acc *= BigRational::new(num, BigInt::from(j - i));
    }
    Ok(acc.to_integer().to_u64().expect("dimension fits in u64"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmfield::{admissible_permutations, build_field, FieldTower};

    fn qi() -> EmbeddingSet {
        build_field(&FieldTower::new(1, vec![0, 1]), 20).unwrap()
    }

    #[test]
    fn coset_reps_small() {
        let r2 = coset_reps(2);
        assert_eq!(r2, vec![vec![1, 0], vec![0, 1]]);
        let lens: Vec<usize> = coset_reps(3).iter().map(|w| inversions(w)).collect();
        assert_eq!(lens, vec![2, 1, 0]);
        assert_eq!(coset_reps(4).len(), 4);
        assert_eq!(cycle_notation(&coset_reps(4)[0]), "(1 2 3 4)");
    }

    #[test]
    fn line_counts_n2() {
        let e = qi();
        let w = WeightSystem::from_chi(2, vec![0, 1]);
        let counts: Vec<usize> = (0..=2).map(|p| kostant_lines(&w, &e, p).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 1]);
        let base = &kostant_lines(&w, &e, 0).unwrap()[0];
        assert_eq!(base.torus_weight, vec![vec![0, 0], vec![1, 1]]);
    }

    #[test]
    fn wk_examples_n2() {
        let e = qi();
        let w = WeightSystem::from_chi(2, vec![0, 1]);
        let c2 = find_wk(&w, &e, 2).unwrap();
        assert_eq!(c2.line.w.comps, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(c2.line.torus_weight[1], vec![0, 2]);
        let c1 = find_wk(&w, &e, 1).unwrap();
        assert_eq!(c1.line.w.comps, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(c1.line.length, 1);
    }

    #[test]
    fn wedge_basics() {
        let e = build_field(&FieldTower::new(1, vec![-2, 0, 1]), 20).unwrap();
        let eta = vec![0, 0, 3, 3];
        let m = omega_monomial(&eta, &e, 3, 2).unwrap();
        assert!(m.is_sorted());
        assert_eq!(m.labels.len(), 4);
        for g in admissible_permutations(&e) {
            let single = WedgeMonomial::from_unsorted(1, vec![m.labels[0]]);
            assert_eq!(wedge_sigma_sign(&single, &g), 1);
        }
        assert_eq!(wedge_sigma_sign(&m, &GaloisPermutation::identity(&e)), 1);
    }

    #[test]
    fn omega_is_inversion_set_of_wk() {
        let e = build_field(&FieldTower::new(1, vec![-2, 0, 1]), 20).unwrap();
        let w = WeightSystem::from_chi(3, vec![0, 0, 1, 1]);
        let eta = compute_eta(&w).unwrap();
        for k in 1..=3 {
            let c = find_wk(&w, &e, k).unwrap();
            assert_eq!(c.line.wedge, omega_monomial(&eta, &e, 3, k).unwrap());
        }
    }

    #[test]
    fn decompose_examples() {
        let e = build_field(&FieldTower::new(1, vec![-2, 0, 0, 1]), 20).unwrap();
        let id = sigma_decompose(&GaloisPermutation::identity(&e), &e).unwrap();
        assert_eq!(id.epsilon, 1);
        let c = sigma_decompose(&GaloisPermutation::conjugation(&e), &e).unwrap();
        assert_eq!(c.sigma2, GaloisPermutation::identity(&e));
        assert_eq!(c.epsilon, 1);
        // a 3-cycle in each fiber
        let g = GaloisPermutation::new(vec![1, 2, 0, 4, 5, 3], &e).unwrap();
        assert_eq!(sigma_decompose(&g, &e).unwrap().epsilon, 1);
        // a transposition in each fiber
        let g = GaloisPermutation::new(vec![1, 0, 2, 4, 3, 5], &e).unwrap();
        let d = sigma_decompose(&g, &e).unwrap();
        assert_eq!(d.epsilon, 1);
        assert_eq!(d.sigma1, GaloisPermutation::identity(&e));
    }

    #[test]
    fn dimensions() {
        assert_eq!(weyl_dimension(&[0, 0, 0]).unwrap(), 1);
        assert_eq!(weyl_dimension(&[1, 0]).unwrap(), 2);
        assert_eq!(weyl_dimension(&[2, 1, 0]).unwrap(), 8);
        assert!(weyl_dimension(&[0, 1]).is_err());
    }
}
