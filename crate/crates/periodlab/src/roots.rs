//! Roots of integer polynomials: Aberth iteration in `f64`, then Newton
//! polishing at the working precision.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::mp::{Complex, Real};

/// Exact squarefreeness over Q: `gcd(f, f')` is constant.
pub fn is_squarefree(coeffs: &[i64]) -> bool {
    let f: Vec<BigRational> = coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect();
    let df: Vec<BigRational> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    poly_gcd_degree(f, df) == 0
}

fn trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_gcd_degree(mut a: Vec<BigRational>, mut b: Vec<BigRational>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        while a.len() >= b.len() && !a.is_empty() {
            let shift = a.len() - b.len();
            let f = a.last().unwrap() / b.last().unwrap();
            for (i, c) in b.iter().enumerate() {
                a[i + shift] = &a[i + shift] - &f * c;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

fn horner_c64(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Approximate roots via Aberth–Ehrlich. `coeffs` low to high, leading nonzero.
pub fn aberth(coeffs: &[i64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let lead = *coeffs.last().unwrap() as f64;
    let c: Vec<f64> = coeffs.iter().map(|&x| x as f64 / lead).collect();
    // Cauchy bound for the initial circle
    let bound = 1.0 + c[..deg].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4;
            Complex64::from_polar(0.5 * bound, ang)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = horner_c64(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..deg).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn horner_mp(coeffs: &[i64], z: &Complex) -> (Complex, Complex) {
    let bits = z.bits();
    let mut p = Complex::zero(bits);
    let mut dp = Complex::zero(bits);
    for &c in coeffs.iter().rev() {
        dp = dp.mul(z).add(&p);
        p = p.mul(z).add(&Complex::from_int(c, bits));
    }
    (p, dp)
}

/// Newton-polish `z0` to `bits` precision. `None` if it fails to settle.
pub fn polish(coeffs: &[i64], z0: Complex64, bits: u32) -> Option<Complex> {
    let mut z = Complex::from_c64(z0, bits);
    let tol = Real::ulp_pow(bits as i64 - 24, bits);
    let max_iter = 16 + 2 * (64 - bits.leading_zeros());
    for _ in 0..max_iter {
        let (p, dp) = horner_mp(coeffs, &z);
        if dp.is_zero() {
            return None;
        }
        let step = p.div(&dp);
        z = z.sub(&step);
        let scale = z.abs().add(&Real::from_int(1, bits));
        if step.abs() <= tol.mul(&scale) {
            return Some(z);
        }
    }
    None
}

/// All complex roots at `bits` precision, or `None` if polishing stalls.
pub fn roots(coeffs: &[i64], bits: u32) -> Option<Vec<Complex>> {
    assert!(coeffs.len() >= 2 && *coeffs.last().unwrap() != 0, "need a nonconstant polynomial");
    aberth(coeffs).into_iter().map(|z| polish(coeffs, z, bits)).collect()
}

/// Coefficients (low to high) of `prod (x - r)`.
pub fn poly_from_roots(rs: &[Complex], bits: u32) -> Vec<Complex> {
    let mut p = vec![Complex::one(bits)];
    for r in rs {
        let mut next = vec![Complex::zero(bits); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].sub(&c.mul(r));
        }
        p = next;
    }
    p
}

/// Is the integer-coefficient value `x` within `tol` of an element of `(1/den) Z`?
pub fn near_fraction(x: &Real, den: i64, tol: &Real) -> bool {
    let bits = x.bits();
    let scaled = x.mul_int(den);
    let q = scaled.to_ratio().round();
    let r = Real::from_ratio(&q, bits);
    scaled.sub(&r).abs() <= tol.mul_int(den)
}

/// Round to nearest integer as a `BigInt`.
pub fn round_int(x: &Real) -> BigInt {
    x.to_ratio().round().to_integer()
}
