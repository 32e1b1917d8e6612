//! One function per subcommand, each producing report records.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use periodlab::cmfield::{
    admissible_permutations, build_field, check_discriminant_identity, delta_big, nabla, random_admissible, EmbeddingSet,
    GaloisPermutation,
};
use periodlab::cyclo::Cyclo;
use periodlab::intertwine::{
    arch_intertwine_numeric, assemble_constant_term, nonarch_intertwine_spherical, ArchConfig, ConstantTermInput,
    IntertwineError, PhiBeta,
};
use periodlab::lfactors::{gauss_sum, q_power, unramified_lratio, ASpec, GaussSumSpec};
use periodlab::oracle::balanced_oracle;
use periodlab::surd::Surd;
use periodlab::weights::{balanced_at, compute_eta};
use periodlab::weylkostant::{find_wk, kostant_lines, omega_monomial, sigma_decompose, wedge_sigma_sign, wk_closed_form};

use crate::config::RunConfig;
use crate::report::{fmt_c, fmt_f, Record, Verdict};
use crate::CliError;

pub type Inputs = BTreeMap<String, String>;

/// Settings shared by every command after flags override the config.
pub struct Settings {
    pub precision: u32,
    pub tol: Option<f64>,
    pub seed: u64,
}

fn ctx<E: Into<CliError>>(what: impl Into<String>) -> impl FnOnce(E) -> CliError {
    let what = what.into();
    move |e| CliError::Context(what, Box::new(e.into()))
}

fn field(cfg: &RunConfig, s: &Settings) -> Result<EmbeddingSet, CliError> {
    let spec = cfg.field.as_ref().ok_or_else(|| CliError::Config("this command needs a [field] table".into()))?;
    build_field(&spec.tower(), s.precision).map_err(ctx("field"))
}

pub fn field_check(cfg: &RunConfig, s: &Settings, inputs: &mut Inputs) -> Result<Vec<Record>, CliError> {
    let emb = field(cfg, s)?;
    let tol = s.tol.unwrap_or(1e-20);
    let id = check_discriminant_identity(&emb).map_err(ctx("discriminant identity"))?;
    inputs.insert("degree".into(), emb.degree().to_string());
    inputs.insert("delta_k".into(), id.delta_k.to_string());
    inputs.insert("Delta_k".into(), id.delta_big.to_string());
    inputs.insert("nabla_k".into(), id.nabla.to_string());
    let mut out = Vec::new();
    let expect_c = cfg.field.as_ref().and_then(|f| f.expect_c);
    out.push(match expect_c {
        Some(c) => Record::exact("c", c, &id.c),
        None => Record {
            name: "c".into(),
            expected: "nonzero rational".into(),
            got: id.c.to_string(),
            tolerance: None,
            verdict: Verdict::from_bool(id.c != num_rational::BigRational::from_integer(0.into())),
        },
    });
    out.push(Record {
        name: "certificate digits".into(),
        expected: format!(">= {}", s.precision / 2),
        got: id.certificate_digits.to_string(),
        tolerance: None,
        verdict: Verdict::from_bool(id.certificate_digits >= s.precision / 2),
    });
    let c = id.c.to_f64().unwrap_or(f64::NAN);
    out.push(Record::approx("c numeric", Complex64::new(c, 0.0), id.c_numeric, tol.max(1e-12)));
    let abs_dk = id.delta_k.to_f64().map_or(f64::NAN, f64::abs);
    let rhs = Surd::i_pow((emb.degree() / 2) as i64)
        .mul(&delta_big(&emb).map_err(ctx("Delta_k"))?.exact)
        .mul(&nabla(&emb).map_err(ctx("nabla_k"))?.exact)
        .to_c64()
        * c;
    out.push(Record::approx("|delta_k|^(1/2) = c i^(deg/2) Delta nabla", Complex64::new(abs_dk.sqrt(), 0.0), rhs, 1e-12));
    // one factor per complex place; the default is the self-dual normalization
    let places = emb.degree() / 2;
    let c_v = cfg.params.measure_scale.unwrap_or_else(|| abs_dk.powf(-0.5 / places as f64));
    out.push(Record::approx(
        "prod c_v = |delta_k|^(-1/2)",
        Complex64::new(abs_dk.powf(-0.5), 0.0),
        Complex64::new(c_v.powi(places as i32), 0.0),
        1e-12,
    ));
    Ok(out)
}

/// Nonincreasing vectors of length `n` with entries in `[lo, hi]`.
fn dominant_vectors(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (lo..=hi).rev() {
        for mut rest in dominant_vectors(n - 1, lo, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn show_opt_bool(b: Option<bool>) -> String {
    b.map_or_else(|| "undefined".into(), |v| v.to_string())
}

pub fn balanced(cfg: &RunConfig, _s: &Settings, inputs: &mut Inputs) -> Result<Vec<Record>, CliError> {
    let Some(g) = &cfg.grid else {
        inputs.insert("grid".into(), "empty".into());
        return Ok(Vec::new());
    };
    let vs = dominant_vectors(g.n, g.entries[0], g.entries[1]);
    let mut points = Vec::new();
    for mu in &vs {
        for nu in &vs {
            for chi in g.chi[0]..=g.chi[1] {
                for &eta in &g.eta {
                    points.push((mu, nu, chi, eta));
                }
            }
        }
    }
    Ok(points
        .par_iter()
        .map(|&(mu, nu, chi, eta)| {
            Record::exact(
                format!("mu={mu:?} nu={nu:?} chi={chi} eta={eta}"),
                show_opt_bool(balanced_oracle(mu, nu, chi, eta, g.n)),
                show_opt_bool(balanced_at(mu, nu, chi, eta, g.n)),
            )
        })
        .collect())
}

/// Coefficients of `([n]_q!)^e`.
fn mahonian(n: usize, e: usize) -> Vec<usize> {
    let mut one = vec![1usize];
    for m in 1..=n {
        one = convolve(&one, &vec![1; m]);
    }
    (0..e).fold(vec![1], |acc, _| convolve(&acc, &one))
}

fn convolve(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn kostant(cfg: &RunConfig, s: &Settings, p: usize, inputs: &mut Inputs) -> Result<Vec<Record>, CliError> {
    let emb = field(cfg, s)?;
    inputs.insert("p".into(), p.to_string());
    let per: Vec<Result<Vec<Record>, CliError>> = cfg
        .weights
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let w = w.system();
            let lines = kostant_lines(&w, &emb, p).map_err(ctx(format!("weights[{i}]")))?;
            let mut out: Vec<Record> = lines
                .iter()
                .map(|l| {
                    let weight: Vec<String> = l.torus_weight.iter().map(|t| format!("{t:?}")).collect();
                    Record {
                        name: format!("weights[{i}] w={}", l.w),
                        expected: format!("length {p}"),
                        got: format!("length {} weight [{}] wedge {}", l.length, weight.join(" "), l.wedge),
                        tolerance: None,
                        verdict: Verdict::from_bool(l.length == p && l.wedge.labels.len() == p && l.wedge.is_sorted()),
                    }
                })
                .collect();
            let count = mahonian(w.n, emb.degree()).get(p).copied().unwrap_or(0);
            out.push(Record::exact(format!("weights[{i}] line count"), count, lines.len()));
            Ok(out)
        })
        .collect();
    flatten(per)
}

fn flatten(per: Vec<Result<Vec<Record>, CliError>>) -> Result<Vec<Record>, CliError> {
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    Ok(out)
}

fn k_range(k: Option<usize>, n: usize) -> Vec<usize> {
    k.map_or_else(|| (1..=n).collect(), |k| vec![k])
}

pub fn find_wk_cmd(cfg: &RunConfig, s: &Settings, k: Option<usize>) -> Result<Vec<Record>, CliError> {
    let emb = field(cfg, s)?;
    let per: Vec<Result<Vec<Record>, CliError>> = cfg
        .weights
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let w = w.system();
            let eta = compute_eta(&w).map_err(ctx(format!("weights[{i}]")))?;
            k_range(k, w.n)
                .into_iter()
                .map(|k| {
                    let cert = find_wk(&w, &emb, k).map_err(ctx(format!("weights[{i}] k={k}")))?;
                    let expected = wk_closed_form(&eta, w.n, k);
                    Ok(Record {
                        name: format!("weights[{i}] k={k}"),
                        expected: format!("{expected} unique"),
                        got: format!("{} matches={} scanned={} wedge {}", cert.line.w, cert.matches, cert.scanned, cert.line.wedge),
                        tolerance: None,
                        verdict: Verdict::from_bool(cert.line.w == expected && cert.matches == 1),
                    })
                })
                .collect()
        })
        .collect();
    flatten(per)
}

fn permutations(cfg: &RunConfig, emb: &EmbeddingSet, s: &Settings) -> Result<Vec<GaloisPermutation>, CliError> {
    if let Some(ps) = &cfg.params.perms {
        return ps
            .iter()
            .map(|p| GaloisPermutation::new(p.clone(), emb).map_err(ctx(format!("permutation {p:?}"))))
            .collect();
    }
    Ok(match cfg.params.samples {
        Some(m) => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            (0..m).map(|_| random_admissible(emb, &mut rng)).collect()
        }
        None => admissible_permutations(emb),
    })
}

pub fn wedge_sign(cfg: &RunConfig, s: &Settings, k: Option<usize>) -> Result<Vec<Record>, CliError> {
    let emb = field(cfg, s)?;
    let perms = permutations(cfg, &emb, s)?;
    let per: Vec<Result<Vec<Record>, CliError>> = cfg
        .weights
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let w = w.system();
            let eta = compute_eta(&w).map_err(ctx(format!("weights[{i}]")))?;
            let mut out = Vec::new();
            for k in k_range(k, w.n) {
                let m = omega_monomial(&eta, &emb, w.n, k).map_err(ctx(format!("weights[{i}] k={k}")))?;
                for g in &perms {
                    let eps = sigma_decompose(g, &emb).map_err(ctx(format!("permutation {:?}", g.as_slice())))?.epsilon;
                    let rhs = if (w.n - k) % 2 == 0 { 1 } else { eps };
                    out.push(Record::exact(
                        format!("weights[{i}] k={k} g={:?} monomial {m}", g.as_slice()),
                        rhs,
                        wedge_sigma_sign(&m, g),
                    ));
                }
            }
            Ok(out)
        })
        .collect();
    flatten(per)
}

pub fn gauss(q: u64, order: u64, index: Option<i64>, s: &Settings, inputs: &mut Inputs) -> Result<Vec<Record>, CliError> {
    inputs.insert("q".into(), q.to_string());
    inputs.insert("chi_order".into(), order.to_string());
    let tol = s.tol.unwrap_or(1e-10);
    let indices: Vec<i64> = index.map_or_else(|| (1..order as i64).collect(), |j| vec![j]);
    let per: Vec<Result<Vec<Record>, CliError>> = indices
        .par_iter()
        .map(|&j| {
            let spec = GaussSumSpec { q, order, index: j };
            let g = gauss_sum(&spec).map_err(ctx(format!("chi index {j}")))?;
            let mut out = vec![Record::exact(format!("j={j} G"), "-", g.exact.to_string())];
            out[0].verdict = Verdict::Pass;
            if !spec.is_trivial() {
                out.push(Record::exact(format!("j={j} G conj(G)"), Cyclo::int(q as i64), g.exact.mul(&g.exact.conj())));
                out.push(Record::approx(format!("j={j} |G|^2 float"), Complex64::new(q as f64, 0.0), Complex64::new(g.approx.norm_sqr(), 0.0), tol));
            }
            let inv = gauss_sum(&spec.inverse()).map_err(ctx(format!("chi index {}", -j)))?;
            out.push(Record::exact(format!("j={j} G(chi^-1) = chi(-1) conj G(chi)"), spec.at_minus_one().mul(&g.exact.conj()), inv.exact));
            Ok(out)
        })
        .collect();
    flatten(per)
}

/// `order:index` or `order:index:qpow`.
pub fn parse_aspec(text: &str) -> Result<ASpec, CliError> {
    let bad = || CliError::Config(format!("bad character spec {text:?}; expected order:index[:qpow]"));
    let parts: Vec<&str> = text.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(bad());
    }
    let order = parts[0].trim().parse().map_err(|_| bad())?;
    let index = parts[1].trim().parse().map_err(|_| bad())?;
    let qpow = parts.get(2).map_or(Ok(0), |p| p.trim().parse()).map_err(|_| bad())?;
    if order == 0 {
        return Err(bad());
    }
    Ok(ASpec { order, index, qpow })
}

fn cpow(c: &Cyclo, e: usize) -> Cyclo {
    (0..e).fold(Cyclo::one(1), |acc, _| acc.mul(c))
}

pub fn lratio(n: usize, k: usize, a: &str, q: u64, inputs: &mut Inputs) -> Result<Vec<Record>, CliError> {
    let spec = parse_aspec(a)?;
    let a = spec.value(q);
    inputs.insert("a".into(), a.to_string());
    inputs.insert("q".into(), q.to_string());
    let r = unramified_lratio(n, k, &a, q).map_err(ctx("lratio"))?;
    let b = a.mul(&q_power(q, (n - k) as i32));
    let mut out = vec![Record { name: "ratio".into(), expected: "-".into(), got: r.to_string(), tolerance: None, verdict: Verdict::Pass }];
    let series = r.series(6).map_err(ctx("series"))?;
    for (j, c) in series.iter().enumerate() {
        // (1 - aX)/(1 - bX) = 1 + Σ (b^j - a b^{j-1}) X^j
        let want = if j == 0 { Cyclo::one(1) } else { cpow(&b, j).sub(&a.mul(&cpow(&b, j - 1))) };
        out.push(Record::exact(format!("X^{j}"), want, c));
    }
    Ok(out)
}

pub fn intertwine_nonarch(n: usize, k: usize, a: &str, q: u64, inputs: &mut Inputs) -> Result<Vec<Record>, CliError> {
    let a = parse_aspec(a)?.value(q);
    inputs.insert("a".into(), a.to_string());
    inputs.insert("q".into(), q.to_string());
    let r = nonarch_intertwine_spherical(n, k, &a, q).map_err(ctx("intertwine-nonarch"))?;
    inputs.insert("radius".into(), fmt_f(r.radius));
    let mut out: Vec<Record> = r
        .shells
        .iter()
        .map(|(t, sh)| Record { name: format!("shell t={t}"), expected: "-".into(), got: sh.to_string(), tolerance: None, verdict: Verdict::Pass })
        .collect();
    out.push(Record::exact("integral = L(s-n+k)/L(s)", &r.target, &r.value));
    Ok(out)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse().map_err(|_| CliError::Config(format!("bad {what} {text:?}"))))
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn intertwine_arch(
    cfg: &RunConfig,
    s: &Settings,
    n: usize,
    k: usize,
    eta: &str,
    beta: Option<&str>,
    sv: &str,
    inputs: &mut Inputs,
) -> Result<Vec<Record>, CliError> {
    let e: Vec<i64> = parse_list(eta, "eta")?;
    let sp: Vec<f64> = parse_list(sv, "s")?;
    if e.len() != 2 || sp.len() != 2 {
        return Err(CliError::Config("--eta takes I,J and --s takes RE,IM".into()));
    }
    let s_val = Complex64::new(sp[0], sp[1]);
    let beta = match beta {
        Some(b) => parse_list(b, "beta")?,
        None => PhiBeta::beta0(n, (e[0], e[1])),
    };
    let phi = PhiBeta::new(beta.clone(), (e[0], e[1]), s_val).map_err(ctx("phi_beta"))?;
    let mut arch = ArchConfig::default();
    if let Some(t) = s.tol {
        arch.rel_tol = t;
    }
    if let Some(m) = cfg.params.measure_scale {
        arch.measure_scale = m;
    }
    let r = arch_intertwine_numeric(n, k, &phi, &arch).map_err(ctx("intertwine-arch"))?;
    inputs.insert("beta".into(), format!("{beta:?}"));
    inputs.insert("s".into(), fmt_c(s_val));
    inputs.insert("method".into(), r.method.to_string());
    inputs.insert("evals".into(), r.evals.to_string());
    inputs.insert("error".into(), fmt_f(r.error));
    Ok(vec![Record {
        name: if phi.is_beta0() { "integral = gamma ratio".into() } else { "integral vanishes".into() },
        expected: fmt_c(r.target),
        got: fmt_c(r.value),
        tolerance: Some(fmt_f(if phi.is_beta0() { arch.rel_tol } else { arch.zero_tol })),
        verdict: Verdict::from_bool(r.pass),
    }])
}

pub fn parse_ord0(text: &str) -> Result<u32, CliError> {
    match text {
        "pos" => Ok(1),
        t => t.parse().map_err(|_| CliError::Config(format!("--ord0 takes 0, pos or a positive integer, got {t:?}"))),
    }
}

pub fn constant_term(cfg: &RunConfig, s: &Settings, ord0: u32, inputs: &mut Inputs) -> Result<Vec<Record>, CliError> {
    let emb = field(cfg, s)?;
    let delta = delta_big(&emb).map_err(ctx("Delta_k"))?.exact;
    inputs.insert("ord0".into(), ord0.to_string());
    let mut out = Vec::new();
    for (i, w) in cfg.weights.iter().enumerate() {
        let w = w.system();
        let eta = compute_eta(&w).map_err(ctx(format!("weights[{i}]")))?;
        let input = ConstantTermInput { n: w.n, eta: &eta, conjugation: &emb.conjugation, deg: emb.degree(), delta_k: &delta, ord0 };
        match assemble_constant_term(&input) {
            Ok(rep) => {
                for t in &rep.terms {
                    out.push(Record {
                        name: format!("weights[{i}] k={}", t.k),
                        expected: "pole order <= 0".into(),
                        got: format!("{} x {} x ({}) pole order {}", t.prefactor, t.lratio_token(), t.delta, t.pole_order),
                        tolerance: None,
                        verdict: Verdict::from_bool(t.pole_order <= 0),
                    });
                }
                out.push(Record::exact(format!("weights[{i}] holomorphic at s=0"), true, rep.holomorphic));
            }
            Err(IntertwineError::AuditFailed(why)) => out.push(Record {
                name: format!("weights[{i}] audit"),
                expected: "holomorphic".into(),
                got: why,
                tolerance: None,
                verdict: Verdict::Fail,
            }),
            Err(e) => return Err(ctx(format!("weights[{i}]"))(e)),
        }
    }
    Ok(out)
}
