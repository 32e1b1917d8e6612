//! Exact numbers of the form `c * i^e * sqrt(r)` with `c` rational and `r` a
//! squarefree positive integer.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::mp::{Complex, Real};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    coef: BigRational,
    ipow: u8,
    rad: BigInt,
}

/// Split `n > 0` as `s^2 * r` with `r` squarefree. Trial division.
fn square_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.clone();
    let mut s = BigInt::one();
    let mut r = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut e = 0u32;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &p;
        }
        if e % 2 == 1 {
            r *= &p;
        }
        p += 1;
    }
    r *= rest;
    (s, r)
}

impl Surd {
    pub fn rational(q: BigRational) -> Self {
        Surd { coef: q, ipow: 0, rad: BigInt::one() }.normalized()
    }

    pub fn int(v: i64) -> Self {
        Self::rational(BigRational::from_integer(v.into()))
    }

    pub fn i_pow(e: i64) -> Self {
        Surd { coef: BigRational::one(), ipow: e.rem_euclid(4) as u8, rad: BigInt::one() }
    }

    /// Principal square root of a rational: `sqrt(-x) = i sqrt(x)` for `x > 0`.
    pub fn sqrt_rational(q: &BigRational) -> Self {
        if q.is_zero() {
            return Self::rational(BigRational::zero());
        }
        let ipow = if q.is_negative() { 1 } else { 0 };
        let a = q.abs();
        // sqrt(p/q) = sqrt(p q) / q
        let pq = a.numer() * a.denom();
        let (s, r) = square_part(&pq);
        Surd { coef: BigRational::new(s, a.denom().clone()), ipow, rad: r }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.coef.is_zero() {
            self.ipow = 0;
            self.rad = BigInt::one();
        }
        if self.coef.is_negative() {
            self.coef = -self.coef;
            self.ipow = (self.ipow + 2) % 4;
        }
        self
    }

    pub fn coef(&self) -> &BigRational {
        &self.coef
    }

    pub fn ipow(&self) -> u8 {
        self.ipow
    }

    pub fn radicand(&self) -> &BigInt {
        &self.rad
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero()
    }

    /// The rational value, if this surd is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.rad.is_one() {
            return None;
        }
        match self.ipow {
            0 => Some(self.coef.clone()),
            2 => Some(-self.coef.clone()),
            _ => None,
        }
    }

    pub fn mul(&self, o: &Surd) -> Surd {
        let g = self.rad.gcd(&o.rad);
        let coef = &self.coef * &o.coef * BigRational::from_integer(g.clone());
        let rad = (&self.rad / &g) * (&o.rad / &g);
        Surd { coef, ipow: (self.ipow + o.ipow) % 4, rad }.normalized()
    }

    pub fn inv(&self) -> Surd {
        assert!(!self.is_zero(), "inverse of zero");
        // 1/(c i^e sqrt r) = i^-e sqrt r / (c r)
        let coef = (self.coef.clone() * BigRational::from_integer(self.rad.clone())).recip();
        Surd { coef, ipow: (4 - self.ipow) % 4, rad: self.rad.clone() }.normalized()
    }

    pub fn div(&self, o: &Surd) -> Surd {
        self.mul(&o.inv())
    }

    pub fn powi(&self, e: i64) -> Surd {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = Surd::int(1);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn to_c64(&self) -> Complex64 {
        let mag = self.coef.to_f64().unwrap_or(f64::NAN) * self.rad.to_f64().unwrap_or(f64::NAN).sqrt();
        Complex64::new(0.0, 1.0).powu(u32::from(self.ipow)) * mag
    }

    pub fn to_mp(&self, bits: u32) -> Complex {
        let mag = Real::from_ratio(&self.coef, bits).mul(&Real::from_int(self.rad.clone(), bits).sqrt());
        Complex::i_pow(i64::from(self.ipow), bits).scale(&mag)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.ipow >= 2 { "-" } else { "" };
        let unit = if self.ipow % 2 == 1 { "i*" } else { "" };
        if self.rad.is_one() {
            write!(f, "{sign}{unit}{}", self.coef)
        } else {
            write!(f, "{sign}{unit}{}*sqrt({})", self.coef, self.rad)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn principal_roots() {
        assert_eq!(Surd::sqrt_rational(&q(-4, 1)), Surd::i_pow(1).mul(&Surd::int(2)));
        let s = Surd::sqrt_rational(&q(-12, 1));
        assert_eq!(s.to_string(), "i*2*sqrt(3)");
        assert_eq!(Surd::sqrt_rational(&q(11664, 1)), Surd::int(108));
        assert_eq!(Surd::sqrt_rational(&q(1, 8)).to_string(), "1/4*sqrt(2)");
    }

    #[test]
    fn cube_of_two_i() {
        let d = Surd::sqrt_rational(&q(-4, 1)).powi(3);
        assert_eq!(d.to_string(), "-i*8");
        assert_eq!(d.powi(-1).mul(&d), Surd::int(1));
    }

    #[test]
    fn products_merge_radicands() {
        let a = Surd::sqrt_rational(&q(6, 1));
        let b = Surd::sqrt_rational(&q(10, 1));
        assert_eq!(a.mul(&b).to_string(), "2*sqrt(15)");
        assert_eq!(Surd::sqrt_rational(&q(3, 1)).powi(2).as_rational(), Some(q(3, 1)));
        let z = a.to_c64();
        assert!((z.re - 6f64.sqrt()).abs() < 1e-15);
    }
}
