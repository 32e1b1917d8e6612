//! Exact arithmetic in cyclotomic fields `Q(ζ_n)`.
//!
//! Elements are kept reduced modulo `Φ_n`, so the coefficient vector in the
//! basis `1, ζ, …, ζ^{φ(n)-1}` is canonical. Operands of different conductors
//! are lifted to the least common multiple.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn cache() -> &'static Mutex<HashMap<u32, Vec<BigInt>>> {
    static C: OnceLock<Mutex<HashMap<u32, Vec<BigInt>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `Φ_n`, low to high.
pub fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    assert!(n >= 1);
    if let Some(p) = cache().lock().expect("cache lock").get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for proper divisors d
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = exact_div(&num, &cyclotomic_poly(d));
        }
    }
    cache().lock().expect("cache lock").insert(n, num.clone());
    num
}

fn exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let f = &r[i + db] / &b[db];
        for (j, c) in b.iter().enumerate() {
            r[i + j] -= &f * c;
        }
        q[i] = f;
    }
    debug_assert!(r.iter().all(Zero::is_zero));
    q
}

pub fn euler_phi(n: u32) -> u32 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u32
}

#[derive(Clone)]
pub struct Cyclo {
    n: u32,
    c: Vec<BigRational>,
}

impl Cyclo {
    /// Reduce an arbitrary polynomial in `ζ_n` (low to high).
    pub fn from_poly(n: u32, mut c: Vec<BigRational>) -> Self {
        let phi = cyclotomic_poly(n);
        let d = phi.len() - 1;
        // Φ_n is monic
        while c.len() > d {
            let top = c.pop().expect("nonempty");
            if top.is_zero() {
                continue;
            }
            let shift = c.len() - d;
            for (j, p) in phi.iter().take(d).enumerate() {
                c[shift + j] -= &top * BigRational::from_integer(p.clone());
            }
        }
        c.resize(d, BigRational::zero());
        Cyclo { n, c }
    }

    pub fn from_int_poly(n: u32, c: &[i64]) -> Self {
        Self::from_poly(n, c.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    pub fn rational(n: u32, q: BigRational) -> Self {
        Self::from_poly(n, vec![q])
    }

    pub fn int(v: i64) -> Self {
        Self::rational(1, BigRational::from_integer(v.into()))
    }

    pub fn zero(n: u32) -> Self {
        Self::from_poly(n, vec![])
    }

    pub fn one(n: u32) -> Self {
        Self::rational(n, BigRational::one())
    }

    /// `ζ_n^j`.
    pub fn zeta(n: u32, j: i64) -> Self {
        let e = j.rem_euclid(i64::from(n)) as usize;
        let mut c = vec![BigRational::zero(); e + 1];
        c[e] = BigRational::one();
        Self::from_poly(n, c)
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// Rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.c.iter().skip(1).all(Zero::is_zero) {
            Some(self.c.first().cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    /// View in `Q(ζ_m)` for `n | m`.
    pub fn lift(&self, m: u32) -> Self {
        assert!(m.is_multiple_of(self.n), "conductor {} does not divide {m}", self.n);
        if m == self.n {
            return self.clone();
        }
        let step = (m / self.n) as usize;
        let mut c = vec![BigRational::zero(); step * self.c.len().max(1)];
        for (i, x) in self.c.iter().enumerate() {
            c[i * step] = x.clone();
        }
        Self::from_poly(m, c)
    }

    fn unify(&self, o: &Cyclo) -> (Cyclo, Cyclo) {
        let m = self.n.lcm(&o.n);
        (self.lift(m), o.lift(m))
    }

    pub fn add(&self, o: &Cyclo) -> Cyclo {
        let (a, b) = self.unify(o);
        let c = a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect();
        Cyclo { n: a.n, c }
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, o: &Cyclo) -> Cyclo {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Cyclo) -> Cyclo {
        let (a, b) = self.unify(o);
        let mut c = vec![BigRational::zero(); a.c.len() + b.c.len()];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        Self::from_poly(a.n, c)
    }

    pub fn scale(&self, q: &BigRational) -> Cyclo {
        Cyclo { n: self.n, c: self.c.iter().map(|x| x * q).collect() }
    }

    /// Multiplicative inverse by solving the multiplication-matrix system over `Q`.
    pub fn inv(&self) -> Option<Cyclo> {
        if self.is_zero() {
            return None;
        }
        let d = self.c.len();
        // column j = coefficients of self * ζ^j
        let cols: Vec<Vec<BigRational>> = (0..d).map(|j| self.mul(&Cyclo::zeta(self.n, j as i64)).c).collect();
        let x = solve(&cols, &Cyclo::one(self.n).c)?;
        Some(Cyclo { n: self.n, c: x })
    }

    pub fn div(&self, o: &Cyclo) -> Option<Cyclo> {
        Some(self.mul(&o.inv()?))
    }

    /// Galois action `ζ_n ↦ ζ_n^u`; `u` must be coprime to the conductor.
    pub fn galois(&self, u: i64) -> Option<Cyclo> {
        let n = i64::from(self.n);
        if u.gcd(&n) != 1 {
            return None;
        }
        let mut acc = Cyclo::zero(self.n);
        for (i, x) in self.c.iter().enumerate() {
            if !x.is_zero() {
                acc = acc.add(&Cyclo::zeta(self.n, u * i as i64).scale(x));
            }
        }
        Some(acc)
    }

    /// Complex conjugation.
    pub fn conj(&self) -> Cyclo {
        self.galois(-1).expect("-1 is a unit")
    }

    pub fn to_c64(&self) -> Complex64 {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / f64::from(self.n));
        let mut z = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for x in &self.c {
            z += p * x.to_f64().unwrap_or(f64::NAN);
            p *= w;
        }
        z
    }

    /// Smallest conductor representing the same element.
    pub fn minimal(&self) -> Cyclo {
        let mut best = self.clone();
        for d in 1..self.n {
            if !self.n.is_multiple_of(d) || euler_phi(d) >= euler_phi(best.n) {
                continue;
            }
            let cols: Vec<Vec<BigRational>> =
                (0..euler_phi(d)).map(|i| Cyclo::zeta(d, i64::from(i)).lift(self.n).c).collect();
            if let Some(x) = solve(&cols, &self.c) {
                best = Cyclo { n: d, c: x };
            }
        }
        best
    }
}

/// Solve `Σ x_j cols[j] = target` over `Q`; `None` if inconsistent or singular.
fn solve(cols: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = cols.len();
    let rows = target.len();
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut r = 0;
    for col in 0..m {
        let piv = (r..rows).find(|&k| !a[k][col].is_zero())?;
        a.swap(r, piv);
        let p = a[r][col].clone();
        for x in a[r].iter_mut() {
            *x /= &p;
        }
        for k in 0..rows {
            if k != r && !a[k][col].is_zero() {
                let f = a[k][col].clone();
                for j in col..=m {
                    let t = &f * &a[r][j];
                    a[k][j] -= t;
                }
            }
        }
        r += 1;
    }
    if a[r..].iter().any(|row| !row[m].is_zero()) {
        return None;
    }
    Some(a[..m].iter().map(|row| row[m].clone()).collect())
}

impl PartialEq for Cyclo {
    fn eq(&self, o: &Self) -> bool {
        let (a, b) = self.unify(o);
        a.c == b.c
    }
}

impl Eq for Cyclo {}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.minimal();
        let mut parts = Vec::new();
        for (i, x) in m.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let term = match i {
                0 => x.to_string(),
                _ => {
                    let z = if i == 1 { format!("z{}", m.n) } else { format!("z{}^{i}", m.n) };
                    if x.is_one() {
                        z
                    } else if (-x).is_one() {
                        format!("-{z}")
                    } else {
                        format!("{x}*{z}")
                    }
                }
            };
            parts.push(term);
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let s = parts.join(" + ").replace("+ -", "- ");
        write!(f, "{s}")
    }
}

/// Helper: `q^e` for integer `e`, as a rational.
pub fn rational_pow(q: u64, e: i32) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(q));
    let p = num_traits::pow(base, e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}
