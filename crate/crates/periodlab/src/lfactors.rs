//! Local L-factor arithmetic.
//!
//! Unramified factors are rational functions in `X = q^{-s}` with cyclotomic
//! coefficients. Complex-place factors appear only through ratios, which obey
//! `L(s-1)/L(s) = 2π/(s+m-1)`.

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use thiserror::Error;

use crate::cyclo::{rational_pow, Cyclo};
use crate::finfield::{FiniteField, FiniteFieldError};
use crate::surd::Surd;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LError {
    #[error("k = {k} outside 1..={n}")]
    BadIndex { k: usize, n: usize },
    #[error("gamma ratio has a pole at step t = {0}")]
    PoleHit(i64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("character of order {order} is not defined on F_{q}^x")]
    BadCharacter { order: u64, q: u64 },
    #[error(transparent)]
    Field(#[from] FiniteFieldError),
    #[error("global L-function is not declared entire")]
    NotEntire,
    #[error("Galois exponent {u} is not a unit modulo {conductor}")]
    NotUnit { u: i64, conductor: u32 },
    #[error("constant term of the denominator vanishes")]
    NotPowerSeries,
}

/// Polynomial in `X` with cyclotomic coefficients, low to high, trimmed.
#[derive(Clone, PartialEq, Eq)]
pub struct CPoly(Vec<Cyclo>);

impl CPoly {
    pub fn new(mut c: Vec<Cyclo>) -> Self {
        while c.last().is_some_and(Cyclo::is_zero) {
            c.pop();
        }
        CPoly(c)
    }

    pub fn constant(c: Cyclo) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Cyclo::int(1))
    }

    /// `1 - cX`.
    pub fn one_minus(c: &Cyclo) -> Self {
        Self::new(vec![Cyclo::int(1), c.neg()])
    }

    pub fn coeffs(&self) -> &[Cyclo] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &CPoly) -> CPoly {
        let len = self.0.len().max(o.0.len());
        let z = Cyclo::int(0);
        CPoly::new((0..len).map(|i| self.0.get(i).unwrap_or(&z).add(o.0.get(i).unwrap_or(&z))).collect())
    }

    pub fn neg(&self) -> CPoly {
        CPoly(self.0.iter().map(Cyclo::neg).collect())
    }

    pub fn sub(&self, o: &CPoly) -> CPoly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &CPoly) -> CPoly {
        if self.is_zero() || o.is_zero() {
            return CPoly(vec![]);
        }
        let mut c = vec![Cyclo::int(0); self.0.len() + o.0.len() - 1];
        for (i, x) in self.0.iter().enumerate() {
            for (j, y) in o.0.iter().enumerate() {
                c[i + j] = c[i + j].add(&x.mul(y));
            }
        }
        CPoly::new(c)
    }

    pub fn scale(&self, s: &Cyclo) -> CPoly {
        CPoly::new(self.0.iter().map(|x| x.mul(s)).collect())
    }

    /// Euclidean division; `None` if the divisor is zero.
    pub fn divrem(&self, d: &CPoly) -> Option<(CPoly, CPoly)> {
        let lead_inv = d.0.last()?.inv()?;
        let dd = d.0.len() - 1;
        let mut r = self.0.clone();
        let mut q = vec![Cyclo::int(0); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let top = r.pop().expect("nonempty");
            if top.is_zero() {
                continue;
            }
            let f = top.mul(&lead_inv);
            let shift = r.len() - dd;
            for (j, c) in d.0.iter().take(dd).enumerate() {
                r[shift + j] = r[shift + j].sub(&f.mul(c));
            }
            q[shift] = f;
        }
        Some((CPoly::new(q), CPoly::new(r)))
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &CPoly) -> CPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        match a.0.last() {
            Some(l) => a.scale(&l.inv().expect("nonzero lead")),
            None => a,
        }
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c.to_c64())
    }

    pub fn galois(&self, u: i64) -> Option<CPoly> {
        Some(CPoly::new(self.0.iter().map(|c| c.galois(u)).collect::<Option<Vec<_>>>()?))
    }

    fn conductor(&self) -> u32 {
        self.0.iter().fold(1, |m, c| m.lcm(&c.conductor()))
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = c.to_string();
            let cs = if cs.contains(' ') { format!("({cs})") } else { cs };
            parts.push(match (i, cs.as_str()) {
                (0, _) => cs.clone(),
                (_, "1") => if i == 1 { "X".into() } else { format!("X^{i}") },
                (_, "-1") => if i == 1 { "-X".into() } else { format!("-X^{i}") },
                _ => if i == 1 { format!("{cs}*X") } else { format!("{cs}*X^{i}") },
            });
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

impl fmt::Debug for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Reduced rational function `num/den` in `X`; the lowest nonzero
/// coefficient of `den` is 1.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentRatio {
    num: CPoly,
    den: CPoly,
}

impl LaurentRatio {
    pub fn new(num: CPoly, den: CPoly) -> Result<Self, LError> {
        if den.is_zero() {
            return Err(LError::ZeroDenominator);
        }
        let g = num.gcd(&den);
        let (num, _) = num.divrem(&g).expect("gcd nonzero");
        let (den, _) = den.divrem(&g).expect("gcd nonzero");
        let low = den.0.iter().find(|c| !c.is_zero()).expect("nonzero").inv().expect("nonzero");
        Ok(LaurentRatio { num: num.scale(&low), den: den.scale(&low) })
    }

    pub fn one() -> Self {
        LaurentRatio { num: CPoly::one(), den: CPoly::one() }
    }

    pub fn constant(c: Cyclo) -> Self {
        LaurentRatio { num: CPoly::constant(c), den: CPoly::one() }
    }

    pub fn numerator(&self) -> &CPoly {
        &self.num
    }

    pub fn denominator(&self) -> &CPoly {
        &self.den
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn add(&self, o: &Self) -> Self {
        let num = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::new(num, self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn inv(&self) -> Result<Self, LError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self, LError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.num.eval(x) / self.den.eval(x)
    }

    /// Power-series coefficients at `X = 0` through `X^order`.
    pub fn series(&self, order: usize) -> Result<Vec<Cyclo>, LError> {
        let d0 = self.den.0.first().filter(|c| !c.is_zero()).ok_or(LError::NotPowerSeries)?;
        let d0_inv = d0.inv().expect("nonzero");
        let z = Cyclo::int(0);
        let mut out: Vec<Cyclo> = Vec::with_capacity(order + 1);
        for i in 0..=order {
            let mut acc = self.num.0.get(i).cloned().unwrap_or_else(|| z.clone());
            for j in 1..=i.min(self.den.0.len().saturating_sub(1)) {
                acc = acc.sub(&self.den.0[j].mul(&out[i - j]));
            }
            out.push(acc.mul(&d0_inv));
        }
        Ok(out)
    }

    /// Least common conductor of all coefficients.
    pub fn conductor(&self) -> u32 {
        self.num.conductor().lcm(&self.den.conductor())
    }
}

impl fmt::Display for LaurentRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == CPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for LaurentRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `a = ζ_order^index · q^qpow`, the value of an unramified character at a uniformizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ASpec {
    pub order: u32,
    pub index: i64,
    pub qpow: i32,
}

impl ASpec {
    pub fn root_of_unity(order: u32, index: i64) -> Self {
        ASpec { order, index, qpow: 0 }
    }

    pub fn value(&self, q: u64) -> Cyclo {
        Cyclo::zeta(self.order.max(1), self.index).mul(&Cyclo::rational(1, rational_pow(q, self.qpow)))
    }
}

/// `L(s-n+k, η_v)/L(s, η_v) = (1 - aX)/(1 - a q^{n-k} X)`.
pub fn unramified_lratio(n: usize, k: usize, a: &Cyclo, q: u64) -> Result<LaurentRatio, LError> {
    if k == 0 || k > n {
        return Err(LError::BadIndex { k, n });
    }
    let shift = a.mul(&Cyclo::rational(1, rational_pow(q, (n - k) as i32)));
    LaurentRatio::new(CPoly::one_minus(a), CPoly::one_minus(&shift))
}

/// `Π_{t=1..j} 2π/(s+m-t)`.
pub fn gamma_ratio(m: i64, j: i64, s: Complex64) -> Result<Complex64, LError> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut acc = Complex64::new(1.0, 0.0);
    for t in 1..=j {
        let d = s + (m - t) as f64;
        if d == Complex64::new(0.0, 0.0) {
            return Err(LError::PoleHit(t));
        }
        acc *= two_pi / d;
    }
    Ok(acc)
}

/// Multiplicative character of `F_q^×` sending the fixed generator to `ζ_order^index`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussSumSpec {
    pub q: u64,
    pub order: u64,
    pub index: i64,
}

impl GaussSumSpec {
    pub fn validate(&self) -> Result<(), LError> {
        if self.order == 0 || !(self.q.saturating_sub(1)).is_multiple_of(self.order) {
            return Err(LError::BadCharacter { order: self.order, q: self.q });
        }
        Ok(())
    }

    pub fn inverse(&self) -> Self {
        GaussSumSpec { index: -self.index, ..*self }
    }

    pub fn is_trivial(&self) -> bool {
        self.index.rem_euclid(self.order as i64) == 0
    }

    /// `χ(-1)`.
    pub fn at_minus_one(&self) -> Cyclo {
        if self.q.is_multiple_of(2) {
            return Cyclo::int(1);
        }
        Cyclo::zeta(self.order as u32, self.index * ((self.q as i64 - 1) / 2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussSum {
    pub exact: Cyclo,
    pub approx: Complex64,
}

/// `Σ_{x ∈ F_q^×} χ(x)^{-1} ψ(x)`, `ψ(x) = exp(2πi Tr(x)/p)`.
pub fn gauss_sum(g: &GaussSumSpec) -> Result<GaussSum, LError> {
    g.validate()?;
    let f = FiniteField::new(g.q)?;
    let p = f.characteristic();
    let m = g.order;
    let l = m.lcm(&p);
    // exponents of ζ_l accumulate into an integer polynomial
    let mut c = vec![0i64; l as usize];
    for a in 0..g.q - 1 {
        let x = f.gen_pow(a);
        let e = -(g.index * a as i64) * (l / m) as i64 + (f.trace(x) * (l / p)) as i64;
        c[e.rem_euclid(l as i64) as usize] += 1;
    }
    let exact = Cyclo::from_int_poly(l as u32, &c).minimal();
    let approx = exact.to_c64();
    Ok(GaussSum { exact, approx })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VanishingToken {
    pub ord0: u32,
    pub entire: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeltaFactor {
    One,
    /// `prefactor · L(s,η)/L(s-1,η)`, with `prefactor = i^{deg/2}·Δ_k`.
    Nontrivial { prefactor: Surd },
}

impl DeltaFactor {
    pub fn is_trivial(&self) -> bool {
        matches!(self, DeltaFactor::One)
    }
}

impl fmt::Display for DeltaFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaFactor::One => write!(f, "1"),
            DeltaFactor::Nontrivial { prefactor } => write!(f, "({prefactor})*L(s,eta)/L(s-1,eta)"),
        }
    }
}

pub fn delta_factor(t: VanishingToken, deg: usize, delta_k: &Surd) -> Result<DeltaFactor, LError> {
    if !t.entire {
        return Err(LError::NotEntire);
    }
    if t.ord0 == 0 {
        return Ok(DeltaFactor::One);
    }
    Ok(DeltaFactor::Nontrivial { prefactor: Surd::i_pow((deg / 2) as i64).mul(delta_k) })
}

/// Coefficientwise `ζ ↦ ζ^u` on a ratio; `X` is fixed.
pub fn sigma_twist_lratio(r: &LaurentRatio, u: i64) -> Result<LaurentRatio, LError> {
    let conductor = r.conductor();
    let bad = LError::NotUnit { u, conductor };
    if u.gcd(&i64::from(conductor)) != 1 {
        return Err(bad);
    }
    let num = r.num.galois(u).ok_or(bad.clone())?;
    let den = r.den.galois(u).ok_or(bad)?;
    LaurentRatio::new(num, den)
}

/// `q^{-s}` as a complex number.
pub fn x_of_s(q: u64, s: Complex64) -> Complex64 {
    (-s * (q as f64).ln()).exp()
}

/// Exact `q^e` as a cyclotomic constant.
pub fn q_power(q: u64, e: i32) -> Cyclo {
    Cyclo::rational(1, rational_pow(q, e))
}

/// Rational number as a cyclotomic constant.
pub fn rat(n: i64, d: i64) -> Cyclo {
    Cyclo::rational(1, BigRational::new(n.into(), d.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lratio_examples() {
        let a = Cyclo::zeta(3, 1);
        assert!(unramified_lratio(4, 4, &a, 5).unwrap().is_one());
        let r = unramified_lratio(2, 1, &a, 3).unwrap();
        let expect = LaurentRatio::new(CPoly::one_minus(&a), CPoly::one_minus(&a.mul(&q_power(3, 1)))).unwrap();
        assert_eq!(r, expect);
        assert_eq!(r.to_string(), "(1 - z3*X)/(1 - 3*z3*X)");
        assert!(matches!(unramified_lratio(2, 0, &a, 3), Err(LError::BadIndex { .. })));
    }

    #[test]
    fn lratio_telescopes() {
        let a = Cyclo::zeta(4, 1);
        let q = 5;
        let n = 4;
        for k in 1..=n {
            // L(s-n+k)/L(s) as a product of single shifts L(s-j-1)/L(s-j), X ↦ q^j X
            let mut prod = LaurentRatio::one();
            for j in 0..(n - k) {
                let aj = a.mul(&q_power(q, j as i32));
                prod = prod.mul(&unramified_lratio(2, 1, &aj, q).unwrap());
            }
            assert_eq!(prod, unramified_lratio(n, k, &a, q).unwrap(), "k={k}");
        }
    }

    #[test]
    fn lratio_tends_to_one() {
        let a = Cyclo::zeta(5, 2);
        let r = unramified_lratio(3, 1, &a, 2).unwrap();
        let v = r.eval(x_of_s(2, c(60.0, 0.0)));
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_ratio(3, 0, c(0.7, 0.0)).unwrap(), c(1.0, 0.0));
        assert!((gamma_ratio(2, 1, c(1.0, 0.0)).unwrap() - c(PI, 0.0)).norm() < 1e-14);
        assert!((gamma_ratio(2, 2, c(3.0, 0.0)).unwrap() - c(PI * PI / 3.0, 0.0)).norm() < 1e-13);
        assert_eq!(gamma_ratio(2, 2, c(0.0, 0.0)), Err(LError::PoleHit(2)));
    }

    #[test]
    fn gauss_examples() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let g = gauss_sum(&GaussSumSpec { q, order: 1, index: 0 }).unwrap();
            assert_eq!(g.exact, Cyclo::int(-1), "q={q}");
        }
        let g3 = gauss_sum(&GaussSumSpec { q: 3, order: 2, index: 1 }).unwrap();
        assert!((g3.approx - c(0.0, 3f64.sqrt())).norm() < 1e-12);
        assert_eq!(g3.exact.mul(&g3.exact), Cyclo::int(-3));
        let g5 = gauss_sum(&GaussSumSpec { q: 5, order: 2, index: 1 }).unwrap();
        assert!((g5.approx - c(5f64.sqrt(), 0.0)).norm() < 1e-12);
        assert_eq!(g5.exact.mul(&g5.exact), Cyclo::int(5));
        assert!(gauss_sum(&GaussSumSpec { q: 7, order: 4, index: 1 }).is_err());
    }

    #[test]
    fn delta_examples() {
        let two_i = Surd::i_pow(1).mul(&Surd::int(2));
        assert_eq!(delta_factor(VanishingToken { ord0: 0, entire: true }, 2, &two_i).unwrap(), DeltaFactor::One);
        match delta_factor(VanishingToken { ord0: 1, entire: true }, 2, &two_i).unwrap() {
            DeltaFactor::Nontrivial { prefactor } => assert_eq!(prefactor.as_rational(), Some(BigRational::from_integer((-2).into()))),
            DeltaFactor::One => panic!("expected nontrivial branch"),
        }
        assert_eq!(delta_factor(VanishingToken { ord0: 1, entire: false }, 2, &two_i), Err(LError::NotEntire));
    }

    #[test]
    fn twist_examples() {
        let r = unramified_lratio(2, 1, &rat(1, 3), 7).unwrap();
        assert_eq!(sigma_twist_lratio(&r, 5).unwrap(), r);
        let w = Cyclo::zeta(3, 1);
        let r = unramified_lratio(3, 1, &w, 2).unwrap();
        let t = sigma_twist_lratio(&r, -1).unwrap();
        assert_eq!(t, unramified_lratio(3, 1, &w.conj(), 2).unwrap());
        assert_ne!(t, r);
        assert_eq!(sigma_twist_lratio(&t, -1).unwrap(), r);
        assert!(sigma_twist_lratio(&r, 3).is_err());
    }

    #[test]
    fn series_expansion() {
        let a = Cyclo::zeta(4, 1);
        let r = unramified_lratio(2, 1, &a, 2).unwrap();
        let s = r.series(4).unwrap();
        // (1 - aX)/(1 - 2aX) = 1 + Σ_{m≥1} 2^{m-1} a^m X^m
        assert_eq!(s[0], Cyclo::int(1));
        for (m, coef) in s.iter().enumerate().skip(1) {
            let mut want = q_power(2, m as i32 - 1);
            for _ in 0..m {
                want = want.mul(&a);
            }
            assert_eq!(*coef, want);
        }
    }
}
