//! Field towers `k0 ⊆ k1 ⊆ k` with `k1` CM, their complex embeddings, and the
//! discriminant constants `Δ_k`, `∇_k`, `δ_k`.
//!
//! `k0` is `Q` or `Q(ρ)` for a declared totally real defining polynomial,
//! `k1 = k0(√-d)`, and `k = k1(θ)` for a monic integer polynomial in `θ`.
//! Embeddings are numerical at a fixed working precision.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::mp::{self, bits_for_digits, Complex, Real, Reconstruction};
use crate::roots;
use crate::surd::Surd;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("field is not totally imaginary (embedding {0} is real to tolerance)")]
    NotTotallyImaginary(usize),
    #[error("k1 is not CM: {0}")]
    NotCm(String),
    #[error("polynomial is reducible: {0}")]
    ReduciblePolynomial(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("rational reconstruction failed for {0}")]
    ReconstructionFailed(String),
    #[error("c = {0} is not rational to the required precision")]
    NotRational(String),
    #[error("invalid Galois permutation: {0}")]
    InvalidGaloisPermutation(String),
}

pub type Result<T> = std::result::Result<T, FieldError>;

/// Defining data of a tower.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldTower {
    /// Squarefree positive `d`, so `k1 = k0(√-d)`.
    pub d: u64,
    /// Monic polynomial in `θ` over the integers, low to high.
    pub extension_poly: Vec<i64>,
    /// Optional basis of `k1` over `k0`; defaults to `{1, √-d}`.
    pub k1_basis: Option<Vec<Elem>>,
    /// Defining polynomial of a totally real `k0`, if `k0 ≠ Q`.
    pub declared_k0_poly: Option<Vec<i64>>,
}

impl FieldTower {
    pub fn new(d: u64, extension_poly: Vec<i64>) -> Self {
        FieldTower { d, extension_poly, k1_basis: None, declared_k0_poly: None }
    }

    pub fn degree_k0(&self) -> usize {
        self.declared_k0_poly.as_ref().map_or(1, |p| p.len() - 1)
    }

    pub fn degree_k_over_k1(&self) -> usize {
        self.extension_poly.len() - 1
    }

    pub fn degree(&self) -> usize {
        2 * self.degree_k0() * self.degree_k_over_k1()
    }
}

/// Element of `k`: a `Q`-linear combination of monomials `ρ^a (√-d)^b θ^c`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Elem {
    terms: BTreeMap<(u32, u32, u32), BigRational>,
}

impl Elem {
    pub fn zero() -> Self {
        Elem::default()
    }

    pub fn rational(q: BigRational) -> Self {
        Self::monomial(q, 0, 0, 0)
    }

    pub fn int(v: i64) -> Self {
        Self::rational(BigRational::from_integer(v.into()))
    }

    /// `q ρ^a (√-d)^b θ^c`.
    pub fn monomial(q: BigRational, a: u32, b: u32, c: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert((a, b, c), q);
        }
        Elem { terms }
    }

    pub fn sqrt_neg_d() -> Self {
        Self::monomial(BigRational::one(), 0, 1, 0)
    }

    pub fn theta_pow(c: u32) -> Self {
        Self::monomial(BigRational::one(), 0, 0, c)
    }

    pub fn rho_pow(a: u32) -> Self {
        Self::monomial(BigRational::one(), a, 0, 0)
    }

    /// `a + b √-d`.
    pub fn k1(a: BigRational, b: BigRational) -> Self {
        Self::rational(a).add(&Self::monomial(b, 0, 1, 0))
    }

    pub fn add(&self, o: &Elem) -> Elem {
        let mut terms = self.terms.clone();
        for (k, v) in &o.terms {
            let e = terms.entry(*k).or_insert_with(BigRational::zero);
            *e += v;
            if e.is_zero() {
                terms.remove(k);
            }
        }
        Elem { terms }
    }

    pub fn scale(&self, q: &BigRational) -> Elem {
        let mut out = Elem::zero();
        for (k, v) in &self.terms {
            out = out.add(&Elem::monomial(v * q, k.0, k.1, k.2));
        }
        out
    }

    /// Product; `√-d` powers are not reduced (evaluation handles them).
    pub fn mul(&self, o: &Elem) -> Elem {
        let mut out = Elem::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &o.terms {
                out = out.add(&Elem::monomial(va * vb, ka.0 + kb.0, ka.1 + kb.1, ka.2 + kb.2));
            }
        }
        out
    }

    pub fn involves_theta(&self) -> bool {
        self.terms.keys().any(|k| k.2 > 0)
    }

    pub fn involves_rho(&self) -> bool {
        self.terms.keys().any(|k| k.0 > 0)
    }
}

/// An exact element `a + b √-d` of `k1` when `k0 = Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K1Value {
    pub a: BigRational,
    pub b: BigRational,
}

impl K1Value {
    pub fn rational(a: BigRational) -> Self {
        K1Value { a, b: BigRational::zero() }
    }
}

/// Images of the generators under one embedding.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub rho: Complex,
    pub sqrt_neg_d: Complex,
    pub theta: Complex,
}

impl Embedding {
    pub fn eval(&self, x: &Elem) -> Complex {
        let bits = self.theta.bits();
        let mut acc = Complex::zero(bits);
        for ((a, b, c), q) in &x.terms {
            let t = self
                .rho
                .powu(*a)
                .mul(&self.sqrt_neg_d.powu(*b))
                .mul(&self.theta.powu(*c))
                .scale(&Real::from_ratio(q, bits));
            acc = acc.add(&t);
        }
        acc
    }

    pub fn approx(&self) -> (Complex64, Complex64, Complex64) {
        (self.rho.to_c64(), self.sqrt_neg_d.to_c64(), self.theta.to_c64())
    }
}

/// The embeddings of `k`, indexed by their rank in the fixed total order.
///
/// The order is major on `E_{k1}` (by `ρ`, then `Im(√-d) > 0` first) and minor
/// within each fiber: fibers over `Im(√-d) > 0` sort `θ` images by real then
/// imaginary part; the conjugate fibers copy that order through conjugation.
#[derive(Clone, Debug)]
pub struct EmbeddingSet {
    pub tower: FieldTower,
    pub precision_digits: u32,
    pub bits: u32,
    pub embeddings: Vec<Embedding>,
    pub conjugation: Vec<usize>,
    pub restriction_k1: Vec<usize>,
    /// Conjugation on `E_{k1}`.
    pub k1_conjugation: Vec<usize>,
    /// Members of each `E_k(τ)` in order, indexed by `τ`.
    pub fibers: Vec<Vec<usize>>,
    pub cm_type: Vec<usize>,
}

fn cmp_f64(a: f64, b: f64, tol: f64) -> std::cmp::Ordering {
    if (a - b).abs() <= tol {
        std::cmp::Ordering::Equal
    } else {
        a.partial_cmp(&b).unwrap_or(std::cmp::Ordering::Equal)
    }
}

fn validate(spec: &FieldTower) -> Result<()> {
    if spec.d == 0 {
        return Err(FieldError::InvalidTower("d must be positive".into()));
    }
    let mut p = 2u64;
    while p * p <= spec.d {
        if spec.d.is_multiple_of(p * p) {
            return Err(FieldError::InvalidTower(format!("d = {} is not squarefree", spec.d)));
        }
        p += 1;
    }
    let check_monic = |name: &str, f: &[i64]| {
        if f.len() < 2 || *f.last().unwrap() != 1 {
            Err(FieldError::InvalidTower(format!("{name} must be monic of degree >= 1")))
        } else {
            Ok(())
        }
    };
    check_monic("extension_poly", &spec.extension_poly)?;
    if let Some(k0) = &spec.declared_k0_poly {
        check_monic("declared_k0_poly", k0)?;
    }
    Ok(())
}

/// Builds all `[k:Q]` embeddings at `precision` decimal digits.
pub fn build_field(spec: &FieldTower, precision: u32) -> Result<EmbeddingSet> {
    validate(spec)?;
    let bits = bits_for_digits(precision);
    let tol = Real::ten_pow_neg(precision / 2, bits);

    let rhos: Vec<Complex> = match &spec.declared_k0_poly {
        None => vec![Complex::one(bits)],
        Some(p) => {
            if !roots::is_squarefree(p) {
                return Err(FieldError::ReduciblePolynomial("declared_k0_poly has repeated roots".into()));
            }
            let rs = roots::roots(p, bits)
                .ok_or_else(|| FieldError::PrecisionExhausted("roots of declared_k0_poly".into()))?;
            let mut real = Vec::new();
            for r in rs {
                if r.im.abs() > tol {
                    return Err(FieldError::NotCm(format!("k0 has a non-real embedding {:?}", r.to_c64())));
                }
                real.push(Complex::from_real(r.re));
            }
            real.sort_by(|a, b| a.re.cmp(&b.re));
            real
        }
    };

    let f = &spec.extension_poly;
    if !roots::is_squarefree(f) {
        return Err(FieldError::ReduciblePolynomial("extension_poly has coincident roots".into()));
    }
    let mut thetas =
        roots::roots(f, bits).ok_or_else(|| FieldError::PrecisionExhausted("roots of extension_poly".into()))?;
    for i in 0..thetas.len() {
        for j in 0..i {
            if thetas[i].sub(&thetas[j]).abs() <= tol {
                return Err(FieldError::ReduciblePolynomial("coincident roots".into()));
            }
        }
    }
    let ftol = 10f64.powi(-(precision as i32) / 2).max(1e-12);
    thetas.sort_by(|a, b| {
        let (za, zb) = (a.to_c64(), b.to_c64());
        cmp_f64(za.re, zb.re, ftol).then(cmp_f64(za.im, zb.im, ftol))
    });

    let sd = Real::from_int(spec.d as i64, bits).sqrt();
    let s_pos = Complex::new(Real::zero(bits), sd.clone());
    let s_neg = s_pos.conj();

    if spec.declared_k0_poly.is_none() {
        check_irreducible_over_k1(f, &thetas, &sd, &tol)?;
    }

    let m = thetas.len();
    let mut embeddings = Vec::new();
    let mut restriction_k1 = Vec::new();
    let mut fibers = Vec::new();
    let mut k1_conjugation = Vec::new();
    for (a, rho) in rhos.iter().enumerate() {
        for (sign, s) in [(0usize, &s_pos), (1, &s_neg)] {
            let tau = 2 * a + sign;
            k1_conjugation.push(2 * a + 1 - sign);
            let mut fiber = Vec::new();
            for th in &thetas {
                let theta = if sign == 0 { th.clone() } else { th.conj() };
                fiber.push(embeddings.len());
                restriction_k1.push(tau);
                embeddings.push(Embedding { rho: rho.clone(), sqrt_neg_d: s.clone(), theta });
            }
            fibers.push(fiber);
        }
    }
    let deg = embeddings.len();
    let conjugation: Vec<usize> = (0..deg)
        .map(|i| {
            let tau = restriction_k1[i];
            let pos = i - fibers[tau][0];
            fibers[k1_conjugation[tau]][pos]
        })
        .collect();
    let cm_type: Vec<usize> = (0..deg).filter(|&i| restriction_k1[i] % 2 == 0).collect();

    let set = EmbeddingSet {
        tower: spec.clone(),
        precision_digits: precision,
        bits,
        embeddings,
        conjugation,
        restriction_k1,
        k1_conjugation,
        fibers,
        cm_type,
    };
    debug_assert_eq!(set.embeddings.len(), spec.degree());
    debug_assert_eq!(m * 2 * rhos.len(), deg);
    set.verify(&tol)?;
    Ok(set)
}

/// Over `Q(√-d)`, a monic integer polynomial factors iff some proper subset of
/// its roots has a product polynomial with coefficients in `(1/2)(Z + Z√-d)`.
fn check_irreducible_over_k1(f: &[i64], thetas: &[Complex], sd: &Real, tol: &Real) -> Result<()> {
    let m = thetas.len();
    let bits = sd.bits();
    for size in 1..=m / 2 {
        for subset in (0..m).combinations(size) {
            let rs: Vec<Complex> = subset.iter().map(|&i| thetas[i].clone()).collect();
            let g = roots::poly_from_roots(&rs, bits);
            let in_k1 = g.iter().all(|c| {
                let b = c.im.div(sd);
                roots::near_fraction(&c.re, 2, tol) && roots::near_fraction(&b, 2, tol)
            });
            if in_k1 {
                return Err(FieldError::ReduciblePolynomial(format!(
                    "{f:?} has a factor of degree {size} over k1"
                )));
            }
        }
    }
    Ok(())
}

impl EmbeddingSet {
    pub fn degree(&self) -> usize {
        self.embeddings.len()
    }

    pub fn k1_count(&self) -> usize {
        self.fibers.len()
    }

    /// Position of `i` inside its fiber.
    pub fn fiber_position(&self, i: usize) -> usize {
        i - self.fibers[self.restriction_k1[i]][0]
    }

    /// The CM-type member of the pair containing `i`.
    pub fn place_of(&self, i: usize) -> usize {
        if self.restriction_k1[i].is_multiple_of(2) {
            i
        } else {
            self.conjugation[i]
        }
    }

    /// Conjugate pairs `(ι_v, ῑ_v)` in CM-type order.
    pub fn places(&self) -> Vec<(usize, usize)> {
        self.cm_type.iter().map(|&i| (i, self.conjugation[i])).collect()
    }

    fn verify(&self, tol: &Real) -> Result<()> {
        let n = self.degree();
        for i in 0..n {
            let c = self.conjugation[i];
            if c == i || self.conjugation[c] != i {
                return Err(FieldError::NotTotallyImaginary(i));
            }
            let e = &self.embeddings[i];
            let ce = &self.embeddings[c];
            let close = |a: &Complex, b: &Complex| a.sub(&b.conj()).abs() <= *tol;
            if !(close(&e.rho, &ce.rho) && close(&e.sqrt_neg_d, &ce.sqrt_neg_d) && close(&e.theta, &ce.theta)) {
                return Err(FieldError::NotTotallyImaginary(i));
            }
            // real embedding: every generator image is real
            if e.sqrt_neg_d.im.abs() <= *tol && e.theta.im.abs() <= *tol {
                return Err(FieldError::NotTotallyImaginary(i));
            }
            if self.k1_conjugation[self.restriction_k1[i]] != self.restriction_k1[c] {
                return Err(FieldError::NotCm("restriction does not commute with conjugation".into()));
            }
            if self.fiber_position(i) != self.fiber_position(c) {
                return Err(FieldError::NotCm("conjugation is not order-preserving on fibers".into()));
            }
        }
        Ok(())
    }

    fn degree_over(&self, over: Subfield) -> usize {
        let t = &self.tower;
        match over {
            Subfield::Q => t.degree(),
            Subfield::K0 => 2,
            Subfield::K1 => t.degree_k_over_k1(),
        }
    }

    /// Embeddings used for `Tr_{k/F}` above the reference embedding of `F`
    /// with index `r` (`r` ranges over embeddings of `F`).
    fn trace_set(&self, over: Subfield, r: usize) -> Vec<usize> {
        match over {
            Subfield::Q => (0..self.degree()).collect(),
            // one representative per k1-embedding above the r-th embedding of k0
            Subfield::K0 => vec![self.fibers[2 * r][0], self.fibers[2 * r + 1][0]],
            Subfield::K1 => self.fibers[r].clone(),
        }
    }

    fn subfield_embedding_count(&self, over: Subfield) -> usize {
        match over {
            Subfield::Q => 1,
            Subfield::K0 => self.tower.degree_k0(),
            Subfield::K1 => self.k1_count(),
        }
    }

    fn max_den(&self) -> BigInt {
        num_traits::pow(BigInt::from(10), (self.precision_digits / 4).max(4) as usize)
    }

    fn reconstruct(&self, x: &Real, what: &str) -> Result<Reconstruction> {
        mp::reconstruct_rational(x, &self.max_den(), self.precision_digits / 2)
            .ok_or_else(|| FieldError::ReconstructionFailed(what.into()))
    }

    fn require_zero(&self, x: &Real, what: &str) -> Result<()> {
        if x.abs() > Real::ten_pow_neg(self.precision_digits / 2, self.bits) {
            return Err(FieldError::ReconstructionFailed(format!("{what}: nonzero imaginary part")));
        }
        Ok(())
    }
}

/// Base field of a relative discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subfield {
    Q,
    K0,
    K1,
}

/// A relative discriminant with its conjugates and certified norm to `Q`.
#[derive(Clone, Debug)]
pub struct Discriminant {
    pub over: Subfield,
    /// Value under each embedding of the base field.
    pub conjugates: Vec<Complex>,
    /// Exact value when the base is `Q`, or `k1 = Q(√-d)`, or `k0 = Q`.
    pub exact: Option<K1Value>,
    /// `N_{F/Q}` of the discriminant, exact.
    pub norm: BigRational,
    /// Decimal digits of agreement in the weakest reconstruction.
    pub certificate_digits: u32,
}

/// `det[Tr_{k/F}(x_i x_j)]`, reconstructed exactly.
pub fn relative_discriminant(emb: &EmbeddingSet, basis: &[Elem], over: Subfield) -> Result<Discriminant> {
    let need = emb.degree_over(over);
    if basis.len() != need {
        return Err(FieldError::InvalidTower(format!("basis has length {} but the degree is {need}", basis.len())));
    }
    if over == Subfield::K0 && basis.iter().any(Elem::involves_theta) {
        return Err(FieldError::InvalidTower("a k1 basis may not involve θ".into()));
    }
    let bits = emb.bits;
    let count = emb.subfield_embedding_count(over);
    let mut conjugates = Vec::with_capacity(count);
    for r in 0..count {
        let set = emb.trace_set(over, r);
        let vals: Vec<Vec<Complex>> =
            set.iter().map(|&i| basis.iter().map(|x| emb.embeddings[i].eval(x)).collect()).collect();
        let mut mat = vec![vec![Complex::zero(bits); need]; need];
        for (i, row) in mat.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = vals.iter().fold(Complex::zero(bits), |acc, v| acc.add(&v[i].mul(&v[j])));
            }
        }
        conjugates.push(mp::det(mat, bits));
    }
    let mut norm_c = Complex::one(bits);
    for c in &conjugates {
        norm_c = norm_c.mul(c);
    }
    emb.require_zero(&norm_c.im, "norm")?;
    let norm_r = emb.reconstruct(&norm_c.re, "norm of discriminant")?;
    let mut digits = norm_r.agreed_digits;

    let k0_is_q = emb.tower.declared_k0_poly.is_none();
    let exact = match over {
        Subfield::Q => Some(K1Value::rational(norm_r.value.clone())),
        Subfield::K0 if k0_is_q => Some(K1Value::rational(norm_r.value.clone())),
        Subfield::K1 if k0_is_q => {
            // τ_0 sends √-d to +i√d
            let z = &conjugates[0];
            let sd = emb.embeddings[emb.fibers[0][0]].sqrt_neg_d.im.clone();
            let a = emb.reconstruct(&z.re, "k1 coordinate a")?;
            let b = emb.reconstruct(&z.im.div(&sd), "k1 coordinate b")?;
            digits = digits.min(a.agreed_digits).min(b.agreed_digits);
            Some(K1Value { a: a.value, b: b.value })
        }
        _ => None,
    };
    Ok(Discriminant { over, conjugates, exact, norm: norm_r.value, certificate_digits: digits })
}

/// The configured basis of `k1` over `k0`.
pub fn k1_basis(emb: &EmbeddingSet) -> Vec<Elem> {
    emb.tower.k1_basis.clone().unwrap_or_else(|| vec![Elem::int(1), Elem::sqrt_neg_d()])
}

/// `{1, θ, …, θ^{m-1}}`.
pub fn theta_power_basis(emb: &EmbeddingSet) -> Vec<Elem> {
    (0..emb.tower.degree_k_over_k1() as u32).map(Elem::theta_pow).collect()
}

/// Product basis of `k/Q`: `ρ^a · b · θ^c` over the `k0` power basis, the `k1`
/// basis and the `θ` power basis.
pub fn tower_basis(emb: &EmbeddingSet) -> Vec<Elem> {
    let k0: Vec<Elem> = (0..emb.tower.degree_k0() as u32).map(Elem::rho_pow).collect();
    let k1 = k1_basis(emb);
    let th = theta_power_basis(emb);
    let mut out = Vec::new();
    for a in &k0 {
        for b in &k1 {
            for c in &th {
                out.push(a.mul(b).mul(c));
            }
        }
    }
    out
}

/// `Δ_k` exactly, with its high-precision value.
#[derive(Clone, Debug)]
pub struct Constant {
    pub exact: Surd,
    pub value: Complex,
}

/// `Δ_k = sqrt(N_{k0/Q}(δ_{k1/k0}))^{[k:k1]}`, principal branch.
pub fn delta_big(emb: &EmbeddingSet) -> Result<Constant> {
    let disc = relative_discriminant(emb, &k1_basis(emb), Subfield::K0)?;
    let m = emb.tower.degree_k_over_k1() as u32;
    let exact = Surd::sqrt_rational(&disc.norm).powi(i64::from(m));
    let mut norm_c = Complex::one(emb.bits);
    for c in &disc.conjugates {
        norm_c = norm_c.mul(c);
    }
    let value = norm_c.sqrt().powu(m);
    Ok(Constant { exact, value })
}

/// `∇_k = sqrt(N_{k1/Q}(δ_{k/k1}))` for the `θ` power basis, principal branch.
pub fn nabla(emb: &EmbeddingSet) -> Result<Constant> {
    let disc = relative_discriminant(emb, &theta_power_basis(emb), Subfield::K1)?;
    let exact = Surd::sqrt_rational(&disc.norm);
    let mut norm_c = Complex::one(emb.bits);
    for c in &disc.conjugates {
        norm_c = norm_c.mul(c);
    }
    Ok(Constant { exact, value: norm_c.sqrt() })
}

/// Result of [`check_discriminant_identity`].
#[derive(Clone, Debug)]
pub struct DiscriminantIdentity {
    pub delta_k: BigRational,
    pub delta_big: Surd,
    pub nabla: Surd,
    /// `c` from the exact route.
    pub c: BigRational,
    /// `c` as reconstructed from the numerical route.
    pub c_numeric: Complex64,
    pub certificate_digits: u32,
}

/// Solves `|δ_k|^{1/2} = c · i^{[k:Q]/2} · Δ_k · ∇_k` and certifies `c ∈ Q^×`.
pub fn check_discriminant_identity(emb: &EmbeddingSet) -> Result<DiscriminantIdentity> {
    check_discriminant_identity_bounded(emb, &BigInt::from(10_000))
}

/// As [`check_discriminant_identity`] with an explicit denominator bound.
pub fn check_discriminant_identity_bounded(emb: &EmbeddingSet, max_den: &BigInt) -> Result<DiscriminantIdentity> {
    let bits = emb.bits;
    let dk = relative_discriminant(emb, &tower_basis(emb), Subfield::Q)?;
    let big = delta_big(emb)?;
    let nb = nabla(emb)?;
    let half_deg = (emb.degree() / 2) as i64;

    let lhs = dk.conjugates[0].abs().sqrt();
    let den = Complex::i_pow(half_deg, bits).mul(&big.value).mul(&nb.value);
    let c_num = Complex::from_real(lhs).div(&den);
    let digits = emb.precision_digits / 2;
    if c_num.im.abs() > Real::ten_pow_neg(digits, bits) {
        return Err(FieldError::NotRational(format!("{:?}", c_num.to_c64())));
    }
    let rec = mp::reconstruct_rational(&c_num.re, max_den, digits)
        .ok_or_else(|| FieldError::NotRational(format!("{:?}", c_num.to_c64())))?;

    let delta_k = dk.exact.expect("rational over Q").a;
    let exact = Surd::sqrt_rational(&delta_k.abs())
        .div(&Surd::i_pow(half_deg).mul(&big.exact).mul(&nb.exact));
    let c = exact
        .as_rational()
        .ok_or_else(|| FieldError::NotRational(format!("exact route gives {exact}")))?;
    if c != rec.value {
        return Err(FieldError::NotRational(format!("routes disagree: {c} vs {}", rec.value)));
    }
    Ok(DiscriminantIdentity {
        delta_k,
        delta_big: big.exact,
        nabla: nb.exact,
        c,
        c_numeric: c_num.to_c64(),
        certificate_digits: rec.agreed_digits.min(dk.certificate_digits),
    })
}

/// A permutation `g` of embedding indices, `ι ↦ g(ι) = perm[ι]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaloisPermutation {
    perm: Vec<usize>,
}

impl GaloisPermutation {
    pub fn new(perm: Vec<usize>, emb: &EmbeddingSet) -> Result<Self> {
        let g = GaloisPermutation { perm };
        g.validate(emb)?;
        Ok(g)
    }

    pub fn identity(emb: &EmbeddingSet) -> Self {
        GaloisPermutation { perm: (0..emb.degree()).collect() }
    }

    pub fn conjugation(emb: &EmbeddingSet) -> Self {
        GaloisPermutation { perm: emb.conjugation.clone() }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &j) in self.perm.iter().enumerate() {
            inv[j] = i;
        }
        GaloisPermutation { perm: inv }
    }

    /// `(self ∘ other)(ι) = self(other(ι))`.
    pub fn compose(&self, other: &Self) -> Self {
        GaloisPermutation { perm: other.perm.iter().map(|&i| self.perm[i]).collect() }
    }

    /// The induced permutation of `E_{k1}`.
    pub fn on_k1(&self, emb: &EmbeddingSet) -> Vec<usize> {
        emb.fibers.iter().map(|f| emb.restriction_k1[self.perm[f[0]]]).collect()
    }

    pub fn validate(&self, emb: &EmbeddingSet) -> Result<()> {
        let n = emb.degree();
        if self.perm.len() != n || !self.perm.iter().copied().sorted().eq(0..n) {
            return Err(FieldError::InvalidGaloisPermutation("not a permutation of the embeddings".into()));
        }
        for i in 0..n {
            if self.perm[emb.conjugation[i]] != emb.conjugation[self.perm[i]] {
                return Err(FieldError::InvalidGaloisPermutation("does not commute with conjugation".into()));
            }
        }
        for f in &emb.fibers {
            let image = emb.restriction_k1[self.perm[f[0]]];
            if f.iter().any(|&i| emb.restriction_k1[self.perm[i]] != image) {
                return Err(FieldError::InvalidGaloisPermutation("does not descend to k1".into()));
            }
        }
        Ok(())
    }
}

/// Every admissible permutation, by brute force over `S_{[k:Q]}`.
pub fn admissible_permutations(emb: &EmbeddingSet) -> Vec<GaloisPermutation> {
    let n = emb.degree();
    (0..n)
        .permutations(n)
        .map(|perm| GaloisPermutation { perm })
        .filter(|g| g.validate(emb).is_ok())
        .collect()
}

/// A uniformly random admissible permutation, built fiberwise.
pub fn random_admissible<R: Rng>(emb: &EmbeddingSet, rng: &mut R) -> GaloisPermutation {
    // permute conjugate pairs of k1-embeddings, optionally swapping within a pair
    let pairs = emb.k1_count() / 2;
    let mut order: Vec<usize> = (0..pairs).collect();
    order.shuffle(rng);
    let m = emb.tower.degree_k_over_k1();
    let mut perm = vec![usize::MAX; emb.degree()];
    for (p, &q) in order.iter().enumerate() {
        let flip = rng.gen_bool(0.5);
        let (src, dst) = (2 * p, 2 * q + usize::from(flip));
        let mut inner: Vec<usize> = (0..m).collect();
        inner.shuffle(rng);
        for (pos, &to) in inner.iter().enumerate() {
            let a = emb.fibers[src][pos];
            let b = emb.fibers[dst][to];
            perm[a] = b;
            perm[emb.conjugation[a]] = emb.conjugation[b];
        }
    }
    let g = GaloisPermutation { perm };
    debug_assert!(g.validate(emb).is_ok());
    g
}

/// Action on `x ∈ k1 = Q(√-d)` induced by `g`: read off whether `g` moves the
/// reference embedding to a fiber where `√-d` is conjugated.
pub fn sigma_of_algebraic(x: &K1Value, g: &GaloisPermutation, emb: &EmbeddingSet) -> K1Value {
    let reference = emb.fibers[0][0];
    let moved = &emb.embeddings[g.apply(reference)].sqrt_neg_d;
    let same = !moved.im.is_negative() == !emb.embeddings[reference].sqrt_neg_d.im.is_negative();
    if same {
        x.clone()
    } else {
        K1Value { a: x.a.clone(), b: -x.b.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn qi() -> EmbeddingSet {
        build_field(&FieldTower::new(1, vec![0, 1]), 40).unwrap()
    }

    fn cubic() -> EmbeddingSet {
        build_field(&FieldTower::new(1, vec![-2, 0, 0, 1]), 40).unwrap()
    }

    #[test]
    fn gaussian_field_embeddings() {
        let e = qi();
        assert_eq!(e.degree(), 2);
        assert_eq!(e.conjugation, vec![1, 0]);
        assert_eq!(e.places(), vec![(0, 1)]);
    }

    #[test]
    fn cubic_tower_fibers() {
        let e = cubic();
        assert_eq!(e.degree(), 6);
        assert_eq!(e.fibers.len(), 2);
        assert!(e.fibers.iter().all(|f| f.len() == 3));
        for i in 0..6 {
            assert_eq!(e.conjugation[e.conjugation[i]], i);
            assert_ne!(e.conjugation[i], i);
        }
    }

    #[test]
    fn eisenstein_conjugation_swaps() {
        let e = build_field(&FieldTower::new(3, vec![0, 1]), 30).unwrap();
        assert_eq!(e.conjugation, vec![1, 0]);
    }

    #[test]
    fn rejects_reducible_extensions() {
        // x^2 + 1 splits over Q(i)
        let err = build_field(&FieldTower::new(1, vec![1, 0, 1]), 30).unwrap_err();
        assert!(matches!(err, FieldError::ReduciblePolynomial(_)));
        let err = build_field(&FieldTower::new(1, vec![1, -2, 1]), 30).unwrap_err();
        assert!(matches!(err, FieldError::ReduciblePolynomial(_)));
        // x^2 - 4 splits over Q
        assert!(build_field(&FieldTower::new(1, vec![-4, 0, 1]), 30).is_err());
        assert!(build_field(&FieldTower::new(4, vec![0, 1]), 30).is_err());
    }

    #[test]
    fn small_discriminants() {
        let e = qi();
        let d = relative_discriminant(&e, &[Elem::int(1), Elem::sqrt_neg_d()], Subfield::Q).unwrap();
        assert_eq!(d.exact.unwrap().a, q(-4));
        let e3 = build_field(&FieldTower::new(3, vec![0, 1]), 30).unwrap();
        let d = relative_discriminant(&e3, &[Elem::int(1), Elem::sqrt_neg_d()], Subfield::Q).unwrap();
        assert_eq!(d.norm, q(-12));
    }

    #[test]
    fn cubic_relative_discriminant_is_polynomial_discriminant() {
        let e = cubic();
        let d = relative_discriminant(&e, &theta_power_basis(&e), Subfield::K1).unwrap();
        assert_eq!(d.exact.clone().unwrap(), K1Value::rational(q(-108)));
        assert_eq!(d.norm, q(11664));
    }

    #[test]
    fn constants_on_examples() {
        assert_eq!(delta_big(&qi()).unwrap().exact.to_string(), "i*2");
        assert_eq!(delta_big(&cubic()).unwrap().exact.to_string(), "-i*8");
        assert_eq!(nabla(&qi()).unwrap().exact, Surd::int(1));
        assert_eq!(nabla(&cubic()).unwrap().exact, Surd::int(108));
        let z8 = build_field(&FieldTower::new(1, vec![-2, 0, 1]), 40).unwrap();
        assert_eq!(nabla(&z8).unwrap().exact, Surd::int(8));
        let e3 = build_field(&FieldTower::new(3, vec![0, 1]), 30).unwrap();
        assert_eq!(delta_big(&e3).unwrap().exact.to_string(), "i*2*sqrt(3)");
    }

    #[test]
    fn identity_constants() {
        assert_eq!(check_discriminant_identity(&qi()).unwrap().c, q(-1));
        let e3 = build_field(&FieldTower::new(3, vec![0, 1]), 30).unwrap();
        assert_eq!(check_discriminant_identity(&e3).unwrap().c, q(-1));
        let r = check_discriminant_identity(&cubic()).unwrap();
        assert_eq!(r.delta_k, q(-746496));
        assert_eq!(r.c, q(-1));
    }

    #[test]
    fn real_quadratic_base() {
        // k0 = Q(√2), k1 = k0(√-1) = Q(ζ8)
        let t = FieldTower { declared_k0_poly: Some(vec![-2, 0, 1]), ..FieldTower::new(1, vec![0, 1]) };
        let e = build_field(&t, 40).unwrap();
        assert_eq!(e.degree(), 4);
        assert_eq!(delta_big(&e).unwrap().exact, Surd::int(4));
        let r = check_discriminant_identity(&e).unwrap();
        assert!(r.c != q(0));
    }

    #[test]
    fn non_cm_base_is_rejected() {
        let t = FieldTower { declared_k0_poly: Some(vec![2, 0, 1]), ..FieldTower::new(1, vec![0, 1]) };
        assert!(matches!(build_field(&t, 30).unwrap_err(), FieldError::NotCm(_)));
    }

    #[test]
    fn admissible_counts() {
        assert_eq!(admissible_permutations(&qi()).len(), 2);
        let z8 = build_field(&FieldTower::new(1, vec![-2, 0, 1]), 30).unwrap();
        assert_eq!(admissible_permutations(&z8).len(), 4);
        assert_eq!(admissible_permutations(&cubic()).len(), 12);
    }

    #[test]
    fn random_admissible_is_admissible() {
        let e = cubic();
        let all = admissible_permutations(&e);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = random_admissible(&e, &mut rng);
            assert!(all.contains(&g));
        }
    }

    #[test]
    fn sigma_on_k1() {
        let e = qi();
        let x = K1Value { a: q(3), b: q(2) };
        let c = GaloisPermutation::conjugation(&e);
        assert_eq!(sigma_of_algebraic(&x, &c, &e), K1Value { a: q(3), b: q(-2) });
        assert_eq!(sigma_of_algebraic(&x, &GaloisPermutation::identity(&e), &e), x);
        let r = K1Value::rational(q(5));
        assert_eq!(sigma_of_algebraic(&r, &c, &e), r);
    }

    #[test]
    fn invalid_permutations_rejected() {
        let e = cubic();
        // swaps two embeddings of one fiber without touching the conjugates
        assert!(GaloisPermutation::new(vec![1, 0, 2, 3, 4, 5], &e).is_err());
        assert!(GaloisPermutation::new(vec![1, 0, 2, 4, 3, 5], &e).is_ok());
    }
}
