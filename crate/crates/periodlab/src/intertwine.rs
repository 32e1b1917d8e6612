//! Intertwining integrals of degenerate principal series and the constant term.
//!
//! Non-archimedean places are handled exactly by summing geometric series over
//! valuation shells; complex places by product quadrature in polar coordinates.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::cyclo::Cyclo;
use crate::lfactors::{delta_factor, gamma_ratio, q_power, unramified_lratio, CPoly, DeltaFactor, LError, LaurentRatio, VanishingToken};
use crate::quad::{half_line, half_line_tanh_sinh, QuadConfig};
use crate::surd::Surd;
use crate::weights::is_case_pm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntertwineError {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("beta must be nonnegative with sum {expected}, got {got:?}")]
    BadBeta { expected: i64, got: Vec<i64> },
    #[error("Re(s) = {re} is below the convergence bound {bound}")]
    ConvergenceRegionViolated { re: f64, bound: f64 },
    #[error("quadrature did not converge (error estimate {0:e})")]
    QuadratureNotConverged(f64),
    #[error("eta pair ({0}, {1}) is not of the form eta_i <= 0, eta_j >= n")]
    NotCasePm(i64, i64),
    #[error("constant-term audit failed: {0}")]
    AuditFailed(String),
    #[error(transparent)]
    L(#[from] LError),
}

pub type Result<T> = std::result::Result<T, IntertwineError>;

/// The section `φ_β` at a complex place, with `η_ι ≤ 0 < n ≤ η_ῑ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiBeta {
    pub beta: Vec<i64>,
    pub eta: (i64, i64),
    pub s: Complex64,
}

impl PhiBeta {
    pub fn new(beta: Vec<i64>, eta: (i64, i64), s: Complex64) -> Result<Self> {
        let expected = eta.1 - eta.0;
        if beta.iter().any(|&b| b < 0) || beta.iter().sum::<i64>() != expected {
            return Err(IntertwineError::BadBeta { expected, got: beta });
        }
        Ok(PhiBeta { beta, eta, s })
    }

    /// `β₀ = (0, …, 0, η_ῑ - η_ι)`.
    pub fn beta0(n: usize, eta: (i64, i64)) -> Vec<i64> {
        let mut b = vec![0; n];
        b[n - 1] = eta.1 - eta.0;
        b
    }

    pub fn n(&self) -> usize {
        self.beta.len()
    }

    pub fn is_beta0(&self) -> bool {
        self.beta == Self::beta0(self.n(), self.eta)
    }
}

fn is_singular(g: &[Vec<Complex64>]) -> bool {
    let n = g.len();
    let mut a = g.to_vec();
    let scale = a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return true;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).expect("nonempty");
        if a[piv][col].norm() <= 1e-12 * scale {
            return true;
        }
        a.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let t = f * a[col][c];
                a[r][c] -= t;
            }
        }
    }
    false
}

/// `φ_β(g) = Π g_{n,j}^{β_j} / (Σ_j |g_{n,j}|²)^{η_ῑ + s}`.
pub fn eval_phi_beta(phi: &PhiBeta, g: &[Vec<Complex64>]) -> Result<Complex64> {
    let n = phi.n();
    if g.len() != n || g.iter().any(|r| r.len() != n) || is_singular(g) {
        return Err(IntertwineError::SingularMatrix);
    }
    Ok(phi_last_row(phi, &g[n - 1]))
}

/// `φ_β` depends on the last row only.
fn phi_last_row(phi: &PhiBeta, row: &[Complex64]) -> Complex64 {
    let mut num = Complex64::new(1.0, 0.0);
    for (z, &b) in row.iter().zip(&phi.beta) {
        if b > 0 {
            num *= z.powi(b as i32);
        }
    }
    let norm: f64 = row.iter().map(|z| z.norm_sqr()).sum();
    num * (-(phi.s + phi.eta.1 as f64) * norm.ln()).exp()
}

/// Result of the non-archimedean shell computation.
#[derive(Debug, Clone, PartialEq)]
pub struct NonarchResult {
    pub value: LaurentRatio,
    pub target: LaurentRatio,
    /// Shell contributions by the number of coordinates attaining the minimal valuation.
    pub shells: Vec<(usize, LaurentRatio)>,
    /// The geometric series converge for `|X| < radius`.
    pub radius: f64,
    pub pass: bool,
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// `∫_{F^{n-k}} φ°(w_k u) du` summed over valuation shells, compared with the L-ratio.
///
/// With `N = n-k` and `φ°` equal to `(aX)^m` on the shell where the least
/// valuation is `-m < 0`, the part where exactly `t` coordinates attain it has
/// volume `C(N,t)(q-1)^t q^{(m-1)N}`.
pub fn nonarch_intertwine_spherical(n: usize, k: usize, a: &Cyclo, q: u64) -> Result<NonarchResult> {
    let target = unramified_lratio(n, k, a, q)?;
    let big_n = n - k;
    let x_pow = a.mul(&q_power(q, big_n as i32));
    let geom = LaurentRatio::new(CPoly::new(vec![Cyclo::int(0), a.clone()]), CPoly::one_minus(&x_pow))?;
    let mut value = LaurentRatio::one();
    let mut shells = vec![(0, LaurentRatio::one())];
    for t in 1..=big_n {
        let vol = binomial(big_n, t) as i64 * (q as i64 - 1).pow(t as u32);
        let shell = geom.mul(&LaurentRatio::constant(Cyclo::int(vol)));
        value = value.add(&shell);
        shells.push((t, shell));
    }
    let radius = 1.0 / (a.to_c64().norm() * (q as f64).powi(big_n as i32));
    let pass = value == target;
    Ok(NonarchResult { value, target, shells, radius, pass })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    GaussKronrod,
    TanhSinh,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Direct => "direct",
            Method::GaussKronrod => "gauss-kronrod",
            Method::TanhSinh => "tanh-sinh",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchConfig {
    pub quad: QuadConfig,
    /// Measure per complex coordinate is `scale · 2r dr dθ`.
    pub measure_scale: f64,
    pub rel_tol: f64,
    pub zero_tol: f64,
}

impl Default for ArchConfig {
    fn default() -> Self {
        ArchConfig { quad: QuadConfig::default(), measure_scale: 1.0, rel_tol: 1e-6, zero_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchResult {
    pub value: Complex64,
    pub error: f64,
    pub target: Complex64,
    /// The `β₀` value used to scale the vanishing test.
    pub reference: Complex64,
    pub method: Method,
    pub evals: usize,
    pub pass: bool,
}

/// `c^N · Π_{t=1..N} 2π/(s+η_ῑ-t)`.
pub fn arch_target(n: usize, k: usize, eta_bar: i64, s: Complex64, scale: f64) -> Result<Complex64> {
    let big_n = (n - k) as i64;
    Ok(gamma_ratio(eta_bar, big_n, s)? * scale.powi(big_n as i32))
}

/// Lowest admissible `Re s`: `n - η_ῑ + 1`.
pub fn convergence_bound(n: usize, eta_bar: i64) -> f64 {
    (n as i64 - eta_bar + 1) as f64
}

/// Numerical `∫_{C^{n-k}} φ_{β,s}(w_k u) du`, last row `(0,…,0,u_k,…,u_{n-1},1)`.
pub fn arch_intertwine_numeric(n: usize, k: usize, phi: &PhiBeta, cfg: &ArchConfig) -> Result<ArchResult> {
    if k == 0 || k > n || phi.n() != n {
        return Err(LError::BadIndex { k, n }.into());
    }
    let (eta, eta_bar) = phi.eta;
    if eta > 0 || eta_bar < n as i64 {
        return Err(IntertwineError::NotCasePm(eta, eta_bar));
    }
    let bound = convergence_bound(n, eta_bar);
    if phi.s.re < bound {
        return Err(IntertwineError::ConvergenceRegionViolated { re: phi.s.re, bound });
    }
    let target0 = arch_target(n, k, eta_bar, phi.s, cfg.measure_scale)?;
    let target = if phi.is_beta0() { target0 } else { Complex64::new(0.0, 0.0) };
    if k == n {
        let id: Vec<Vec<Complex64>> =
            (0..n).map(|i| (0..n).map(|j| Complex64::new(f64::from(u8::from(i == j)), 0.0)).collect()).collect();
        let value = eval_phi_beta(phi, &id)?;
        let pass = judge(value, target, target0, cfg);
        return Ok(ArchResult { value, error: 0.0, target, reference: target0, method: Method::Direct, evals: 1, pass });
    }
    let dims: Vec<usize> = (k - 1..n - 1).collect();
    let (value, error, evals, converged) = product_rule(phi, &dims, cfg, false);
    let (value, error, evals, method) = if converged {
        (value, error, evals, Method::GaussKronrod)
    } else {
        let (v, e, ev, ok) = product_rule(phi, &dims, cfg, true);
        if !ok {
            return Err(IntertwineError::QuadratureNotConverged(e));
        }
        (v, e, evals + ev, Method::TanhSinh)
    };
    let pass = judge(value, target, target0, cfg);
    Ok(ArchResult { value, error, target, reference: target0, method, evals, pass })
}

fn judge(value: Complex64, target: Complex64, reference: Complex64, cfg: &ArchConfig) -> bool {
    if target.norm() == 0.0 {
        value.norm() < cfg.zero_tol * reference.norm()
    } else {
        (value / target - 1.0).norm() < cfg.rel_tol
    }
}

/// Nested radial quadrature; angular integrals by trapezoid with `β_j + 1`
/// nodes, which is exact for the single Fourier mode `e^{iβ_j θ}`.
fn product_rule(phi: &PhiBeta, dims: &[usize], cfg: &ArchConfig, fallback: bool) -> (Complex64, f64, usize, bool) {
    let n = phi.n();
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    row[n - 1] = Complex64::new(1.0, 0.0);
    let mut evals = 0usize;
    let mut ok = true;
    let (v, e) = nest(phi, dims, 0, &mut row, cfg, fallback, &mut evals, &mut ok);
    (v, e, evals, ok)
}

#[allow(clippy::too_many_arguments)]
fn nest(
    phi: &PhiBeta,
    dims: &[usize],
    level: usize,
    row: &mut [Complex64],
    cfg: &ArchConfig,
    fallback: bool,
    evals: &mut usize,
    ok: &mut bool,
) -> (Complex64, f64) {
    if level == dims.len() {
        *evals += 1;
        return (phi_last_row(phi, row), 0.0);
    }
    let j = dims[level];
    let nodes = (phi.beta[j] + 1) as usize;
    let two_pi = 2.0 * std::f64::consts::PI;
    let radial = |r: f64, row: &mut Vec<Complex64>, evals: &mut usize, ok: &mut bool| -> (Complex64, f64) {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        let mut err = 0.0;
        for m in 0..nodes {
            let theta = two_pi * m as f64 / nodes as f64;
            row[j] = Complex64::from_polar(r, theta);
            let (v, e) = nest(phi, dims, level + 1, row, cfg, fallback, evals, ok);
            acc += v;
            mag += v.norm();
            err += e;
        }
        // the rule is exact, so a sum at rounding level is the vanishing Fourier
        // coefficient; the nodes share one radial factor, so its error cancels too
        if acc.norm() <= 64.0 * f64::EPSILON * mag {
            acc = Complex64::new(0.0, 0.0);
            err = 0.0;
        }
        let w = cfg.measure_scale * 2.0 * r * two_pi / nodes as f64;
        (acc * w, err * w.abs())
    };
    // inner levels run tighter so their error does not swamp the outer estimate
    let qcfg = QuadConfig { rel_tol: cfg.quad.rel_tol * 0.01f64.powi(level as i32), ..cfg.quad };
    let res = if fallback {
        let cell = std::cell::RefCell::new((row.to_vec(), 0usize, true));
        let r = half_line_tanh_sinh(
            |r| {
                let mut st = cell.borrow_mut();
                let (ref mut rw, ref mut ev, ref mut o) = *st;
                radial(r, rw, ev, o).0
            },
            &qcfg,
        );
        let st = cell.into_inner();
        *evals += st.1;
        *ok &= st.2;
        r
    } else {
        let mut local_evals = 0usize;
        let mut local_ok = true;
        let mut rw = row.to_vec();
        let r = half_line(|r| radial(r, &mut rw, &mut local_evals, &mut local_ok), &qcfg);
        *evals += local_evals;
        *ok &= local_ok;
        r
    };
    row[j] = Complex64::new(0.0, 0.0);
    *ok &= res.converged;
    (res.value, res.error)
}

/// One summand of the constant term.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantTerm {
    pub k: usize,
    /// Shift `n-k` in `L(s-(n-k), η)/L(s, η)`; zero means the ratio is 1.
    pub lratio_shift: usize,
    /// `(i^{[k:Q]/2} Δ_k)^{k-n}`.
    pub prefactor: Surd,
    pub delta: DeltaFactor,
    /// Pole order at `s = 0`; nonpositive means holomorphic.
    pub pole_order: i64,
}

impl ConstantTerm {
    pub fn lratio_token(&self) -> String {
        if self.lratio_shift == 0 {
            "1".into()
        } else {
            format!("L(s-{},eta)/L(s,eta)", self.lratio_shift)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantTermReport {
    pub n: usize,
    pub ord0: u32,
    pub terms: Vec<ConstantTerm>,
    pub holomorphic: bool,
}

/// Input data for the constant-term assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantTermInput<'a> {
    pub n: usize,
    pub eta: &'a [i64],
    pub conjugation: &'a [usize],
    pub deg: usize,
    pub delta_k: &'a Surd,
    pub ord0: u32,
}

/// Assumes `L(-j, η) ≠ 0` for `j ≥ 1` (entire and nonvanishing left of the
/// center), so only `L(s, η)` can vanish at `s = 0`.
pub fn assemble_constant_term(input: &ConstantTermInput) -> Result<ConstantTermReport> {
    let token = VanishingToken { ord0: input.ord0, entire: true };
    let delta = delta_factor(token, input.deg, input.delta_k)?;
    assemble_with_branch(input, delta)
}

/// As [`assemble_constant_term`] with the δ branch supplied by the caller.
pub fn assemble_with_branch(input: &ConstantTermInput, delta: DeltaFactor) -> Result<ConstantTermReport> {
    let n = input.n;
    if !is_case_pm(input.eta, input.conjugation, n) {
        return Err(IntertwineError::AuditFailed("weight is not in Case (+-)".into()));
    }
    let ord0 = i64::from(input.ord0);
    let branch_ok = (ord0 == 0) == delta.is_trivial();
    let unit = Surd::i_pow((input.deg / 2) as i64).mul(input.delta_k);
    let mut terms = Vec::with_capacity(n);
    for k in 1..=n {
        // L(s,η) in the denominator contributes ord₀; δ cancels it with its own L(s,η)
        let mut pole_order = if k < n { ord0 } else { 0 };
        if !delta.is_trivial() {
            pole_order -= ord0;
        }
        let delta_k = if k < n { delta.clone() } else { DeltaFactor::One };
        if k == n && !delta.is_trivial() {
            pole_order = 0;
        }
        terms.push(ConstantTerm { k, lratio_shift: n - k, prefactor: unit.powi(k as i64 - n as i64), delta: delta_k, pole_order });
    }
    let bad: Vec<usize> = terms.iter().filter(|t| t.pole_order > 0).map(|t| t.k).collect();
    if !bad.is_empty() {
        return Err(IntertwineError::AuditFailed(format!("terms {bad:?} keep a pole of order {ord0} at s=0")));
    }
    if !branch_ok {
        return Err(IntertwineError::AuditFailed(format!("delta branch {delta} does not match ord0 = {ord0}")));
    }
    Ok(ConstantTermReport { n, ord0: input.ord0, terms, holomorphic: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn identity(n: usize) -> Vec<Vec<Complex64>> {
        (0..n).map(|i| (0..n).map(|j| c(if i == j { 1.0 } else { 0.0 })).collect()).collect()
    }

    #[test]
    fn phi_beta_examples() {
        let p = PhiBeta::new(vec![0, 0, 3], (0, 3), c(0.5)).unwrap();
        assert_eq!(eval_phi_beta(&p, &identity(3)).unwrap(), c(1.0));
        let p = PhiBeta::new(vec![1, 0, 2], (0, 3), c(0.5)).unwrap();
        assert_eq!(eval_phi_beta(&p, &identity(3)).unwrap(), c(0.0));
        let p = PhiBeta::new(vec![0, 2], (0, 2), c(0.0)).unwrap();
        let g = vec![vec![c(1.0), c(0.0)], vec![c(1.0), c(1.0)]];
        assert!((eval_phi_beta(&p, &g).unwrap() - c(0.25)).norm() < 1e-15);
        let sing = vec![vec![c(1.0), c(1.0)], vec![c(1.0), c(1.0)]];
        assert_eq!(eval_phi_beta(&p, &sing), Err(IntertwineError::SingularMatrix));
        assert!(PhiBeta::new(vec![1, 0], (0, 2), c(0.0)).is_err());
    }

    #[test]
    fn nonarch_n2() {
        let a = Cyclo::zeta(3, 1);
        let r = nonarch_intertwine_spherical(2, 1, &a, 3).unwrap();
        assert!(r.pass);
        assert_eq!(r.shells.len(), 2);
        assert!(nonarch_intertwine_spherical(3, 3, &a, 3).unwrap().value.is_one());
    }

    #[test]
    fn arch_examples() {
        let cfg = ArchConfig::default();
        let p = PhiBeta::new(vec![0, 2], (0, 2), c(1.0)).unwrap();
        let r = arch_intertwine_numeric(2, 1, &p, &cfg).unwrap();
        assert!((r.value - c(PI)).norm() < 1e-6 * PI, "{r:?}");
        assert!(r.pass);
        let p = PhiBeta::new(vec![1, 1], (0, 2), c(1.0)).unwrap();
        let r = arch_intertwine_numeric(2, 1, &p, &cfg).unwrap();
        assert!(r.value.norm() < 1e-8, "{r:?}");
        assert!(r.pass);
        let p = PhiBeta::new(vec![0, 2], (0, 2), c(0.5)).unwrap();
        assert!(matches!(arch_intertwine_numeric(2, 1, &p, &cfg), Err(IntertwineError::ConvergenceRegionViolated { .. })));
        let p = PhiBeta::new(vec![1, 1], (0, 2), c(1.0)).unwrap();
        let r = arch_intertwine_numeric(2, 2, &p, &cfg).unwrap();
        assert_eq!(r.method, Method::Direct);
        assert_eq!(r.value, c(0.0));
    }

    #[test]
    fn arch_two_dimensional() {
        let cfg = ArchConfig::default();
        let p = PhiBeta::new(vec![0, 0, 4], (-1, 3), Complex64::new(1.5, 0.7)).unwrap();
        let r = arch_intertwine_numeric(3, 1, &p, &cfg).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn constant_term_branches() {
        let delta = Surd::i_pow(1).mul(&Surd::int(2));
        let eta = [0, 3];
        let conj = [1, 0];
        let base = ConstantTermInput { n: 3, eta: &eta, conjugation: &conj, deg: 2, delta_k: &delta, ord0: 0 };
        let r = assemble_constant_term(&base).unwrap();
        assert!(r.holomorphic);
        assert!(r.terms.iter().all(|t| t.delta.is_trivial() && t.pole_order == 0));
        assert_eq!(r.terms[2].lratio_token(), "1");
        let pos = ConstantTermInput { ord0: 2, ..base.clone() };
        let r = assemble_constant_term(&pos).unwrap();
        assert!(r.terms[..2].iter().all(|t| !t.delta.is_trivial()));
        assert!(matches!(assemble_with_branch(&pos, DeltaFactor::One), Err(IntertwineError::AuditFailed(_))));
        let one = ConstantTermInput { n: 1, eta: &[0, 1], ..base };
        let r = assemble_constant_term(&one).unwrap();
        assert_eq!(r.terms.len(), 1);
        assert_eq!(r.terms[0].lratio_token(), "1");
    }
}
