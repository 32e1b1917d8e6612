//! Small finite fields `F_{p^e}` by table lookup.
//!
//! Elements are integers `0..q` read as base-`p` digit vectors, i.e.
//! polynomials over `F_p` modulo a monic irreducible of degree `e`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiniteFieldError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of size {0} is too large for table arithmetic")]
    TooLarge(u64),
}

/// Largest field handled with full log tables.
pub const MAX_Q: u64 = 1 << 16;

pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut r = q;
    let mut e = 0;
    while r.is_multiple_of(p) {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

#[derive(Debug, Clone)]
pub struct FiniteField {
    p: u64,
    e: u32,
    q: u64,
    /// Monic modulus, low to high, length `e + 1`.
    modulus: Vec<u64>,
    /// `exp[a] = g^a` for `a in 0..q-1`.
    exp: Vec<u64>,
    /// `log[x] = a` with `g^a = x`; unused at 0.
    log: Vec<u64>,
    trace: Vec<u64>,
}

fn digits(x: u64, p: u64, e: u32) -> Vec<u64> {
    let mut v = Vec::with_capacity(e as usize);
    let mut r = x;
    for _ in 0..e {
        v.push(r % p);
        r /= p;
    }
    v
}

fn undigits(v: &[u64], p: u64) -> u64 {
    v.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// `a * b mod (modulus, p)` on digit vectors.
fn mul_mod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let e = modulus.len() - 1;
    let mut c = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + x * y) % p;
        }
    }
    for top in (e..c.len()).rev() {
        let f = c[top];
        if f == 0 {
            continue;
        }
        for (j, &m) in modulus.iter().enumerate() {
            let idx = top - e + j;
            c[idx] = (c[idx] + (p - f) * m % p) % p;
        }
    }
    c.truncate(e);
    c.resize(e, 0);
    c
}

/// Remainder of `a` modulo monic `b` over `F_p`.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let f = r.pop().expect("nonempty");
        if f == 0 {
            continue;
        }
        let shift = r.len() - db;
        for (j, &m) in b.iter().take(db).enumerate() {
            r[shift + j] = (r[shift + j] + (p - f) * m % p) % p;
        }
    }
    r
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let e = f.len() - 1;
    for d in 1..=e / 2 {
        for body in 0..p.pow(d as u32) {
            let mut g = digits(body, p, d as u32);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    pub fn new(q: u64) -> Result<Self, FiniteFieldError> {
        let (p, e) = prime_power(q).ok_or(FiniteFieldError::NotPrimePower(q))?;
        if q > MAX_Q {
            return Err(FiniteFieldError::TooLarge(q));
        }
        let modulus = (0..p.pow(e))
            .map(|body| {
                let mut f = digits(body, p, e);
                f.push(1);
                f
            })
            .find(|f| is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree");
        let qm1 = q - 1;
        let mut field = FiniteField { p, e, q, modulus, exp: vec![], log: vec![0; q as usize], trace: vec![0; q as usize] };
        for g in 1..q {
            let mut exp = Vec::with_capacity(qm1 as usize);
            let mut x = 1u64;
            let mut seen = vec![false; q as usize];
            let mut ok = true;
            for _ in 0..qm1 {
                if seen[x as usize] {
                    ok = false;
                    break;
                }
                seen[x as usize] = true;
                exp.push(x);
                x = field.mul(x, g);
            }
            if ok {
                field.exp = exp;
                break;
            }
        }
        for (a, &x) in field.exp.iter().enumerate() {
            field.log[x as usize] = a as u64;
        }
        for x in 0..q {
            // Tr(x) = x + x^p + … + x^{p^{e-1}}
            let mut acc = 0;
            let mut y = x;
            for _ in 0..e {
                acc = field.add(acc, y);
                y = field.pow(y, p);
            }
            debug_assert!(acc < p);
            field.trace[x as usize] = acc;
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (da, db) = (digits(a, self.p, self.e), digits(b, self.p, self.e));
        let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        undigits(&s, self.p)
    }

    pub fn neg(&self, a: u64) -> u64 {
        let s: Vec<u64> = digits(a, self.p, self.e).iter().map(|x| (self.p - x) % self.p).collect();
        undigits(&s, self.p)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if !self.exp.is_empty() {
            if a == 0 || b == 0 {
                return 0;
            }
            let l = (self.log[a as usize] + self.log[b as usize]) % (self.q - 1);
            return self.exp[l as usize];
        }
        let c = mul_mod(&digits(a, self.p, self.e), &digits(b, self.p, self.e), &self.modulus, self.p);
        undigits(&c, self.p)
    }

    pub fn pow(&self, a: u64, mut k: u64) -> u64 {
        let mut base = a;
        let mut acc = 1;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// The fixed primitive element.
    pub fn generator(&self) -> u64 {
        self.exp[1 % self.exp.len()]
    }

    pub fn gen_pow(&self, a: u64) -> u64 {
        self.exp[(a % (self.q - 1)) as usize]
    }

    /// Discrete log to the fixed generator; `None` at zero.
    pub fn log(&self, x: u64) -> Option<u64> {
        (x != 0).then(|| self.log[x as usize])
    }

    /// Absolute trace to `F_p`, as an integer in `0..p`.
    pub fn trace(&self, x: u64) -> u64 {
        self.trace[x as usize]
    }
}
