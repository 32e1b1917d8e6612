//! Fixed-point multiprecision reals and complex numbers.
//!
//! A [`Real`] is an integer mantissa scaled by `2^-bits`. All operands in one
//! computation share the same `bits`; mixing scales is a logic error and panics.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Bits needed for `digits` decimal digits plus guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 32
}

#[derive(Clone, PartialEq, Eq)]
pub struct Real {
    m: BigInt,
    bits: u32,
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e})", self.to_f64())
    }
}

impl Real {
    pub fn zero(bits: u32) -> Self {
        Real { m: BigInt::zero(), bits }
    }

    pub fn from_int(v: impl Into<BigInt>, bits: u32) -> Self {
        Real { m: v.into() << bits, bits }
    }

    pub fn from_ratio(q: &BigRational, bits: u32) -> Self {
        let num = q.numer() << bits;
        Real { m: num.div_floor(q.denom()), bits }
    }

    pub fn from_f64(x: f64, bits: u32) -> Self {
        assert!(x.is_finite(), "non-finite input");
        let q = BigRational::from_float(x).unwrap_or_else(BigRational::zero);
        Self::from_ratio(&q, bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `2^-k` at this scale.
    pub fn ulp_pow(k: i64, bits: u32) -> Self {
        let shift = bits as i64 - k;
        if shift < 0 {
            Real::zero(bits)
        } else {
            Real { m: BigInt::one() << shift as u32, bits }
        }
    }

    /// `10^-digits` rounded down.
    pub fn ten_pow_neg(digits: u32, bits: u32) -> Self {
        let den = num_traits::pow(BigInt::from(10), digits as usize);
        Self::from_ratio(&BigRational::new(BigInt::one(), den), bits)
    }

    fn check(&self, o: &Real) {
        assert_eq!(self.bits, o.bits, "precision mismatch");
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn abs(&self) -> Real {
        Real { m: self.m.abs(), bits: self.bits }
    }

    pub fn neg(&self) -> Real {
        Real { m: -&self.m, bits: self.bits }
    }

    pub fn add(&self, o: &Real) -> Real {
        self.check(o);
        Real { m: &self.m + &o.m, bits: self.bits }
    }

    pub fn sub(&self, o: &Real) -> Real {
        self.check(o);
        Real { m: &self.m - &o.m, bits: self.bits }
    }

    pub fn mul(&self, o: &Real) -> Real {
        self.check(o);
        Real { m: (&self.m * &o.m) >> self.bits, bits: self.bits }
    }

    pub fn mul_int(&self, k: i64) -> Real {
        Real { m: &self.m * k, bits: self.bits }
    }

    /// Panics on division by zero.
    pub fn div(&self, o: &Real) -> Real {
        self.check(o);
        assert!(!o.m.is_zero(), "division by zero");
        Real { m: (&self.m << self.bits).div_floor(&o.m), bits: self.bits }
    }

    pub fn half(&self) -> Real {
        Real { m: &self.m >> 1u32, bits: self.bits }
    }

    /// Square root of a nonnegative value; negative inputs panic.
    pub fn sqrt(&self) -> Real {
        assert!(!self.m.is_negative(), "sqrt of negative");
        Real { m: (&self.m << self.bits).sqrt(), bits: self.bits }
    }

    pub fn to_f64(&self) -> f64 {
        let b = self.m.bits();
        if b <= 60 {
            return self.m.to_f64().unwrap_or(0.0) * 2f64.powi(-(self.bits as i32));
        }
        let drop = b - 60;
        let top = (&self.m >> drop).to_f64().unwrap_or(0.0);
        top * 2f64.powi(drop as i32 - self.bits as i32)
    }

    /// Exact dyadic value.
    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(self.m.clone(), BigInt::one() << self.bits)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Real {
    fn cmp(&self, o: &Self) -> Ordering {
        self.check(o);
        self.m.cmp(&o.m)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_c64();
        write!(f, "Complex({:e}{:+e}i)", z.re, z.im)
    }
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        Complex { re: Real::zero(bits), im: Real::zero(bits) }
    }

    pub fn one(bits: u32) -> Self {
        Self::from_int(1, bits)
    }

    pub fn i(bits: u32) -> Self {
        Complex { re: Real::zero(bits), im: Real::from_int(1, bits) }
    }

    pub fn from_int(v: i64, bits: u32) -> Self {
        Complex { re: Real::from_int(v, bits), im: Real::zero(bits) }
    }

    pub fn from_real(re: Real) -> Self {
        let bits = re.bits();
        Complex { re, im: Real::zero(bits) }
    }

    pub fn from_ratio(q: &BigRational, bits: u32) -> Self {
        Self::from_real(Real::from_ratio(q, bits))
    }

    pub fn from_c64(z: Complex64, bits: u32) -> Self {
        Complex { re: Real::from_f64(z.re, bits), im: Real::from_f64(z.im, bits) }
    }

    pub fn bits(&self) -> u32 {
        self.re.bits()
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn neg(&self) -> Complex {
        Complex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn add(&self, o: &Complex) -> Complex {
        Complex { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        Complex { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        Complex { re, im }
    }

    pub fn scale(&self, r: &Real) -> Complex {
        Complex { re: self.re.mul(r), im: self.im.mul(r) }
    }

    pub fn mul_int(&self, k: i64) -> Complex {
        Complex { re: self.re.mul_int(k), im: self.im.mul_int(k) }
    }

    pub fn norm_sqr(&self) -> Real {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let den = o.norm_sqr();
        let re = self.re.mul(&o.re).add(&self.im.mul(&o.im)).div(&den);
        let im = self.im.mul(&o.re).sub(&self.re.mul(&o.im)).div(&den);
        Complex { re, im }
    }

    pub fn powu(&self, e: u32) -> Complex {
        let mut acc = Complex::one(self.bits());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Principal square root: argument in (-pi/2, pi/2], so a negative real maps to `+i`.
    pub fn sqrt(&self) -> Complex {
        let bits = self.bits();
        if self.is_zero() {
            return Complex::zero(bits);
        }
        let r = self.abs();
        if !self.re.is_negative() {
            let t = r.add(&self.re).half().sqrt();
            let im = self.im.div(&t.mul_int(2));
            Complex { re: t, im }
        } else {
            let t = r.sub(&self.re).half().sqrt();
            let re = self.im.abs().div(&t.mul_int(2));
            let im = if self.im.is_negative() { t.neg() } else { t };
            Complex { re, im }
        }
    }

    /// `i^e` exactly.
    pub fn i_pow(e: i64, bits: u32) -> Complex {
        match e.rem_euclid(4) {
            0 => Complex::one(bits),
            1 => Complex::i(bits),
            2 => Complex::from_int(-1, bits),
            _ => Complex::i(bits).neg(),
        }
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(mut a: Vec<Vec<Complex>>, bits: u32) -> Complex {
    let n = a.len();
    let mut d = Complex::one(bits);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].norm_sqr().cmp(&a[y][col].norm_sqr()))
            .expect("nonempty range");
        if a[piv][col].is_zero() {
            return Complex::zero(bits);
        }
        if piv != col {
            a.swap(piv, col);
            d = d.neg();
        }
        let p = a[col][col].clone();
        d = d.mul(&p);
        for row in col + 1..n {
            let f = a[row][col].div(&p);
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let t = f.mul(&a[col][c]);
                a[row][c] = a[row][c].sub(&t);
            }
        }
    }
    d
}

/// Outcome of [`reconstruct_rational`].
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub value: BigRational,
    /// Decimal digits of agreement between `value` and the input.
    pub agreed_digits: u32,
}

/// Best continued-fraction approximation with denominator at most `max_den`,
/// accepted only if it agrees with `x` to `min_digits` decimal digits
/// (relative to `max(1, |x|)`).
pub fn reconstruct_rational(x: &Real, max_den: &BigInt, min_digits: u32) -> Option<Reconstruction> {
    let target = x.to_ratio();
    let mut best: Option<BigRational> = None;
    // convergents h/k
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rem = target.clone();
    for _ in 0..4096 {
        let a = rem.floor().to_integer();
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if &k2 > max_den {
            break;
        }
        best = Some(BigRational::new(h2.clone(), k2.clone()));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = &rem - BigRational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rem = frac.recip();
    }
    let value = best?;
    let err = (&value - &target).abs();
    let scale = target.abs().max(BigRational::one());
    let rel = err / scale;
    let agreed = if rel.is_zero() {
        // exact at the working scale; report the scale's resolution
        (f64::from(x.bits()) / std::f64::consts::LOG2_10).floor() as u32
    } else {
        let r = rel.to_f64().unwrap_or(1.0);
        if r <= 0.0 {
            0
        } else {
            (-r.log10()).floor().max(0.0) as u32
        }
    };
    (agreed >= min_digits).then_some(Reconstruction { value, agreed_digits: agreed })
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: u32 = 256;

    #[test]
    fn sqrt_two_squares_back() {
        let two = Real::from_int(2, B);
        let r = two.sqrt();
        let back = r.mul(&r);
        assert!(back.sub(&two).abs() < Real::ulp_pow(240, B));
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn principal_sqrt_of_negative_is_positive_imaginary() {
        let z = Complex::from_int(-4, B).sqrt();
        assert!((z.to_c64() - Complex64::new(0.0, 2.0)).norm() < 1e-30);
        let w = Complex::from_c64(Complex64::new(-4.0, -1e-20), B).sqrt();
        assert!(w.im.is_negative());
    }

    #[test]
    fn complex_division_roundtrip() {
        let a = Complex::from_c64(Complex64::new(1.5, -2.25), B);
        let b = Complex::from_c64(Complex64::new(-0.5, 3.0), B);
        let q = a.div(&b).mul(&b);
        assert!(q.sub(&a).abs() < Real::ulp_pow(200, B));
    }

    #[test]
    fn det_of_small_matrix() {
        let m = |v: i64| Complex::from_int(v, B);
        let a = vec![vec![m(2), m(0)], vec![m(0), m(-2)]];
        assert_eq!(det(a, B).to_c64(), Complex64::new(-4.0, 0.0));
        let b = vec![vec![m(0), m(1)], vec![m(1), m(0)]];
        assert_eq!(det(b, B).to_c64(), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn reconstructs_small_rationals() {
        let x = Real::from_ratio(&BigRational::new((-22).into(), 7.into()), B);
        let r = reconstruct_rational(&x, &BigInt::from(10_000), 30).unwrap();
        assert_eq!(r.value, BigRational::new((-22).into(), 7.into()));
        let pi = Real::from_f64(std::f64::consts::PI, B);
        assert!(reconstruct_rational(&pi, &BigInt::from(10_000), 30).is_none());
    }
}
