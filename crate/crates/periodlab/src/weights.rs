//! Dominant weights `μ, ν`, infinity types `χ` and the derived `η`, with the
//! regular-algebraic, Case (±), balanced and `B⁺` predicates, the signs
//! `ε_v` and the constant `Ω_∞`.

use thiserror::Error;

use crate::cmfield::{EmbeddingSet, GaloisPermutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error("weight at embedding {0} is not dominant")]
    NonDominant(usize),
    #[error("malformed weight system: {0}")]
    Malformed(String),
    #[error("η is not regular algebraic at embedding {0}")]
    NotRegularAlgebraic(usize),
    #[error("η_ι + η_ῑ is not constant across embeddings")]
    InconsistentSum,
    #[error("η at embedding {0} lies strictly between 0 and n")]
    AmbiguousSign(usize),
}

pub type Result<T> = std::result::Result<T, WeightError>;

/// Weights indexed by embedding index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    pub n: usize,
    pub mu: Vec<Vec<i64>>,
    pub nu: Vec<Vec<i64>>,
    pub chi: Vec<i64>,
}

pub fn is_dominant(w: &[i64]) -> bool {
    w.windows(2).all(|p| p[0] >= p[1])
}

impl WeightSystem {
    /// `μ = ν = 0` everywhere with the given `χ`.
    pub fn from_chi(n: usize, chi: Vec<i64>) -> Self {
        let e = chi.len();
        WeightSystem { n, mu: vec![vec![0; n]; e], nu: vec![vec![0; n]; e], chi }
    }

    pub fn embeddings(&self) -> usize {
        self.chi.len()
    }

    pub fn check(&self) -> Result<()> {
        let e = self.chi.len();
        if self.n < 1 || self.mu.len() != e || self.nu.len() != e {
            return Err(WeightError::Malformed("μ, ν, χ must cover the same embeddings".into()));
        }
        for i in 0..e {
            if self.mu[i].len() != self.n || self.nu[i].len() != self.n {
                return Err(WeightError::Malformed(format!("weights at embedding {i} must have length {}", self.n)));
            }
            if !is_dominant(&self.mu[i]) || !is_dominant(&self.nu[i]) {
                return Err(WeightError::NonDominant(i));
            }
        }
        Ok(())
    }
}

/// `η_ι = Σ_i (μ_i^ι + ν_i^ι) + n χ_ι`.
pub fn compute_eta(w: &WeightSystem) -> Result<Vec<i64>> {
    w.check()?;
    Ok((0..w.embeddings())
        .map(|i| w.mu[i].iter().sum::<i64>() + w.nu[i].iter().sum::<i64>() + w.n as i64 * w.chi[i])
        .collect())
}

pub fn is_regular_algebraic(eta: &[i64], n: usize) -> bool {
    let n = n as i64;
    eta.iter().all(|&e| e * (e - n) >= 0)
}

pub fn is_case_pm(eta: &[i64], conjugation: &[usize], n: usize) -> bool {
    let n = n as i64;
    (0..eta.len()).all(|i| {
        let (a, b) = (eta[i], eta[conjugation[i]]);
        a.min(b) <= 0 && a.max(b) >= n
    })
}

/// Highest weight of `F_η` at one embedding.
pub fn f_eta_weight(eta: i64, n: usize) -> Option<Vec<i64>> {
    let ni = n as i64;
    if eta <= 0 {
        let mut v = vec![0; n];
        v[0] = -eta;
        Some(v)
    } else if eta >= ni {
        let mut v = vec![-1; n];
        v[n - 1] = ni - 1 - eta;
        Some(v)
    } else {
        None
    }
}

/// Dual highest weight `(-λ_n, …, -λ_1)`.
pub fn dual(w: &[i64]) -> Vec<i64> {
    w.iter().rev().map(|x| -x).collect()
}

/// Does `F_μ ⊗ F_ν ⊗ F_η ⊗ det^χ` contain the trivial representation?
///
/// Equivalently `F_ν^∨ ⊂ F_μ ⊗ F_η ⊗ det^χ`; `F_η` is `Sym^{-η}` when `η ≤ 0`
/// and `det^{-1} ⊗ (Sym^{η-n})^∨` when `η ≥ n`, so Pieri's rule decides it.
pub fn balanced_at(mu: &[i64], nu: &[i64], chi: i64, eta: i64, n: usize) -> Option<bool> {
    let ni = n as i64;
    let shift = if eta <= 0 {
        chi
    } else if eta >= ni {
        chi - 1
    } else {
        return None;
    };
    let kappa: Vec<i64> = dual(nu).iter().map(|x| x - shift).collect();
    let size: i64 = kappa.iter().sum::<i64>() - mu.iter().sum::<i64>();
    let ok = if eta <= 0 {
        // κ/μ horizontal strip of size -η
        size == -eta && (0..n).all(|i| kappa[i] >= mu[i] && (i + 1 == n || mu[i] >= kappa[i + 1]))
    } else {
        // μ/κ horizontal strip of size η - n
        -size == eta - ni && (0..n).all(|i| mu[i] >= kappa[i] && (i + 1 == n || kappa[i] >= mu[i + 1]))
    };
    Some(ok)
}

pub fn is_balanced(w: &WeightSystem) -> Result<bool> {
    let eta = compute_eta(w)?;
    let mut all = true;
    for (i, &e) in eta.iter().enumerate() {
        match balanced_at(&w.mu[i], &w.nu[i], w.chi[i], e, w.n) {
            None => return Err(WeightError::NotRegularAlgebraic(i)),
            Some(b) => all &= b,
        }
    }
    Ok(all)
}

/// Balanced and `η_ι + η_ῑ ≥ n`, with the sum checked to be constant.
pub fn in_b_plus(w: &WeightSystem, conjugation: &[usize]) -> Result<bool> {
    let eta = compute_eta(w)?;
    let sums: Vec<i64> = (0..eta.len()).map(|i| eta[i] + eta[conjugation[i]]).collect();
    if sums.windows(2).any(|p| p[0] != p[1]) {
        return Err(WeightError::InconsistentSum);
    }
    let big_enough = sums.first().is_none_or(|&s| s >= w.n as i64);
    Ok(is_balanced(w)? && big_enough)
}

/// `Ω_∞` with its per-place data; `value` is `i^value_ipow`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaInfty {
    /// `(ι_v, ῑ_v)` per place.
    pub places: Vec<(usize, usize)>,
    pub signs: Vec<i8>,
    pub exponents: Vec<i64>,
    pub value_ipow: u8,
}

impl OmegaInfty {
    /// `(ε i)^{e}` as a power of `i`.
    pub fn place_ipow(sign: i8, e: i64) -> u8 {
        let flip = if sign < 0 && e.rem_euclid(2) == 1 { 2 } else { 0 };
        (e + flip).rem_euclid(4) as u8
    }
}

/// `e_v` for the place `{a, b}`.
pub fn place_exponent(w: &WeightSystem, a: usize, b: usize) -> i64 {
    place_exponent_part(&w.mu[a], &w.nu[a], w.chi[a], w.n) + place_exponent_part(&w.mu[b], &w.nu[b], w.chi[b], w.n)
}

/// Exponent `Σ_{i+k≤n} (μ_i + ν_k + χ)` at one embedding.
fn place_exponent_part(mu: &[i64], nu: &[i64], chi: i64, n: usize) -> i64 {
    let mut e = 0;
    for i in 1..=n {
        for k in 1..=n {
            if i + k <= n {
                e += mu[i - 1] + nu[k - 1] + chi;
            }
        }
    }
    e
}

pub fn omega_infty(w: &WeightSystem, emb: &EmbeddingSet) -> Result<OmegaInfty> {
    let eta = compute_eta(w)?;
    let n = w.n as i64;
    let places = emb.places();
    let mut signs = Vec::new();
    let mut exponents = Vec::new();
    let mut total = 0u8;
    for &(a, b) in &places {
        let sign = if eta[a] <= 0 {
            1
        } else if eta[a] >= n {
            -1
        } else {
            return Err(WeightError::AmbiguousSign(a));
        };
        let e = place_exponent(w, a, b);
        total = (total + OmegaInfty::place_ipow(sign, e)) % 4;
        signs.push(sign);
        exponents.push(e);
    }
    Ok(OmegaInfty { places, signs, exponents, value_ipow: total })
}

/// `^σw`: the weight at `g(ι)` is the old weight at `ι`.
pub fn sigma_twist(w: &WeightSystem, g: &GaloisPermutation) -> WeightSystem {
    let e = w.embeddings();
    let mut out = w.clone();
    for i in 0..e {
        let j = g.apply(i);
        out.mu[j] = w.mu[i].clone();
        out.nu[j] = w.nu[i].clone();
        out.chi[j] = w.chi[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmfield::{build_field, FieldTower};

    fn single(n: usize, mu: [Vec<i64>; 2], nu: [Vec<i64>; 2], chi: [i64; 2]) -> WeightSystem {
        WeightSystem { n, mu: mu.to_vec(), nu: nu.to_vec(), chi: chi.to_vec() }
    }

    #[test]
    fn eta_examples() {
        let w = single(2, [vec![1, 0], vec![0, 0]], [vec![0, -1], vec![0, 0]], [1, 0]);
        assert_eq!(compute_eta(&w).unwrap(), vec![2, 0]);
        let w = single(3, [vec![2, 1, 0], vec![0; 3]], [vec![0; 3], vec![0; 3]], [-1, 0]);
        assert_eq!(compute_eta(&w).unwrap()[0], 0);
        let bad = single(2, [vec![0, 1], vec![0, 0]], [vec![0, 0], vec![0, 0]], [0, 0]);
        assert_eq!(compute_eta(&bad), Err(WeightError::NonDominant(0)));
    }

    #[test]
    fn regular_and_case() {
        assert!(is_regular_algebraic(&[0, 0], 3));
        assert!(!is_regular_algebraic(&[1], 2));
        assert!(is_regular_algebraic(&[2], 2));
        assert!(is_case_pm(&[0, 2], &[1, 0], 2));
        assert!(!is_case_pm(&[1, 1], &[1, 0], 2));
        assert!(is_case_pm(&[-2, 5], &[1, 0], 3));
    }

    #[test]
    fn f_eta_shapes() {
        assert_eq!(f_eta_weight(-3, 3), Some(vec![3, 0, 0]));
        assert_eq!(f_eta_weight(5, 3), Some(vec![-1, -1, -3]));
        assert_eq!(f_eta_weight(1, 3), None);
    }

    #[test]
    fn trivial_weights_are_balanced() {
        let w = WeightSystem::from_chi(3, vec![0, 0]);
        assert!(is_balanced(&w).unwrap());
        // η = (0, 2): F_η at ῑ is det^{-1}, cancelled by χ = 1
        let w = WeightSystem::from_chi(2, vec![0, 1]);
        assert_eq!(compute_eta(&w).unwrap(), vec![0, 2]);
        assert!(is_balanced(&w).unwrap());
        assert!(in_b_plus(&w, &[1, 0]).unwrap());
    }

    #[test]
    fn b_plus_sums() {
        // η = (-1, 2)
        let w = WeightSystem { n: 2, mu: vec![vec![0, -1], vec![0, 0]], nu: vec![vec![0; 2]; 2], chi: vec![0, 1] };
        assert_eq!(compute_eta(&w).unwrap(), vec![-1, 2]);
        assert!(!in_b_plus(&w, &[1, 0]).unwrap());
        // pairs (0,3) and (-1,4) share the sum 3
        let w = WeightSystem::from_chi(3, vec![0, 1, 0, 1]);
        let mut w2 = w.clone();
        w2.mu[2] = vec![0, 0, -1];
        w2.mu[3] = vec![1, 0, 0];
        assert_eq!(compute_eta(&w2).unwrap(), vec![0, 3, -1, 4]);
        assert!(in_b_plus(&w2, &[1, 0, 3, 2]).is_ok());
        w2.mu[3] = vec![2, 0, 0];
        assert_eq!(in_b_plus(&w2, &[1, 0, 3, 2]), Err(WeightError::InconsistentSum));
    }

    #[test]
    fn omega_examples() {
        let e = build_field(&FieldTower::new(1, vec![0, 1]), 20).unwrap();
        let w = WeightSystem::from_chi(2, vec![0, 0]);
        assert_eq!(omega_infty(&w, &e).unwrap().value_ipow, 0);

        // η = (1, 2) has no sign, but the exponent and the value at ε = +1 are defined
        let w = WeightSystem { n: 2, mu: vec![vec![1, 0], vec![2, 0]], nu: vec![vec![0, 0]; 2], chi: vec![0, 0] };
        assert_eq!(place_exponent(&w, 0, 1), 3);
        assert_eq!(OmegaInfty::place_ipow(1, 3), 3);
        assert_eq!(OmegaInfty::place_ipow(-1, 3), 1);
        assert_eq!(omega_infty(&w, &e), Err(WeightError::AmbiguousSign(0)));

        let w = WeightSystem::from_chi(3, vec![1, 1]);
        let o = omega_infty(&w, &e).unwrap();
        assert_eq!(o.exponents, vec![6]);
        assert_eq!(o.value_ipow, 2);

        let w = WeightSystem::from_chi(2, vec![0, 0]);
        let mut w1 = w.clone();
        w1.mu[0] = vec![1, 0];
        assert_eq!(omega_infty(&w1, &e), Err(WeightError::AmbiguousSign(0)));
    }

    #[test]
    fn twist_by_conjugation_swaps() {
        let e = build_field(&FieldTower::new(1, vec![0, 1]), 20).unwrap();
        let w = WeightSystem { n: 2, mu: vec![vec![1, 0], vec![2, 0]], nu: vec![vec![0, 0]; 2], chi: vec![0, 1] };
        let t = sigma_twist(&w, &GaloisPermutation::conjugation(&e));
        assert_eq!(t.mu, vec![vec![2, 0], vec![1, 0]]);
        assert_eq!(t.chi, vec![1, 0]);
        assert_eq!(sigma_twist(&w, &GaloisPermutation::identity(&e)), w);
    }
}
