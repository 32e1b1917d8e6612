//! Property tests for the structural invariants of each module.

use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use periodlab::cmfield::{
    build_field, delta_big, nabla, random_admissible, relative_discriminant, tower_basis, Elem, EmbeddingSet, FieldTower,
    GaloisPermutation, Subfield,
};
use periodlab::cyclo::Cyclo;
use periodlab::finfield::FiniteField;
use periodlab::intertwine::{arch_intertwine_numeric, ArchConfig, PhiBeta};
use periodlab::lfactors::{gamma_ratio, gauss_sum, unramified_lratio, x_of_s, CPoly, GaussSumSpec, LaurentRatio};
use periodlab::oracle::balanced_oracle;
use periodlab::weights::{
    balanced_at, compute_eta, f_eta_weight, is_balanced, is_case_pm, is_dominant, is_regular_algebraic, omega_infty,
    sigma_twist, WeightSystem,
};
use periodlab::weylkostant::{
    all_elements, kostant_lines, omega_monomial, sigma_decompose, wedge_sigma_sign, Covector, WedgeMonomial,
};

fn fields() -> &'static [EmbeddingSet] {
    static F: OnceLock<Vec<EmbeddingSet>> = OnceLock::new();
    F.get_or_init(|| {
        [(1, vec![0, 1]), (3, vec![0, 1]), (1, vec![-2, 0, 1]), (1, vec![-2, 0, 0, 1])]
            .into_iter()
            .map(|(d, p)| build_field(&FieldTower::new(d, p), 30).expect("example tower"))
            .collect()
    })
}

fn rng_perm(emb: &EmbeddingSet, seed: u64) -> GaloisPermutation {
    random_admissible(emb, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn dominant(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, n).prop_map(|mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    })
}

fn weight_system(n: usize, e: usize) -> impl Strategy<Value = WeightSystem> {
    (prop::collection::vec(dominant(n), e), prop::collection::vec(dominant(n), e), prop::collection::vec(-2i64..=2, e))
        .prop_map(move |(mu, nu, chi)| WeightSystem { n, mu, nu, chi })
}

fn q_int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conjugation_is_fixed_point_free_involution(f in 0usize..4) {
        let e = &fields()[f];
        for i in 0..e.degree() {
            prop_assert_eq!(e.conjugation[e.conjugation[i]], i);
            prop_assert_ne!(e.conjugation[i], i);
        }
    }

    #[test]
    fn discriminant_scales_by_square(f in 0usize..3, ops in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 1..6), scale in 1i64..=4) {
        let e = &fields()[f];
        let mut basis = tower_basis(e);
        let m = basis.len();
        // elementary unimodular moves, then one diagonal rescaling
        for (i, j, c) in ops {
            let (i, j) = (i % m, j % m);
            if i != j {
                basis[i] = basis[i].add(&basis[j].scale(&q_int(c)));
            }
        }
        basis[0] = basis[0].scale(&q_int(scale));
        let before = relative_discriminant(e, &tower_basis(e), Subfield::Q).unwrap().norm;
        let after = relative_discriminant(e, &basis, Subfield::Q).unwrap().norm;
        prop_assert_eq!(after, before * q_int(scale * scale));
    }

    #[test]
    fn eta_is_linear(a in weight_system(3, 2), b in weight_system(3, 2)) {
        let add = |x: &[Vec<i64>], y: &[Vec<i64>]| x.iter().zip(y).map(|(p, q)| p.iter().zip(q).map(|(s, t)| s + t).collect()).collect::<Vec<Vec<i64>>>();
        let sum = WeightSystem {
            n: 3,
            mu: add(&a.mu, &b.mu),
            nu: add(&a.nu, &b.nu),
            chi: a.chi.iter().zip(&b.chi).map(|(x, y)| x + y).collect(),
        };
        let (ea, eb, es) = (compute_eta(&a).unwrap(), compute_eta(&b).unwrap(), compute_eta(&sum).unwrap());
        for i in 0..2 {
            prop_assert_eq!(es[i], ea[i] + eb[i]);
        }
        let mut shifted = a.clone();
        shifted.chi[0] += 1;
        prop_assert_eq!(compute_eta(&shifted).unwrap()[0], ea[0] + 3);
    }

    #[test]
    fn twist_preserves_predicates(f in 0usize..4, seed in any::<u64>(), n in 1usize..=3, raw in prop::collection::vec((dominant(3), dominant(3), -2i64..=2), 6)) {
        let e = &fields()[f];
        let d = e.degree();
        let w = WeightSystem {
            n,
            mu: raw.iter().take(d).map(|r| r.0[..n].to_vec()).collect(),
            nu: raw.iter().take(d).map(|r| r.1[..n].to_vec()).collect(),
            chi: raw.iter().take(d).map(|r| r.2).collect(),
        };
        let g = rng_perm(e, seed);
        let t = sigma_twist(&w, &g);
        let (eta, teta) = (compute_eta(&w).unwrap(), compute_eta(&t).unwrap());
        prop_assert_eq!(is_balanced(&w).ok(), is_balanced(&t).ok());
        prop_assert_eq!(is_regular_algebraic(&eta, n), is_regular_algebraic(&teta, n));
        prop_assert_eq!(is_case_pm(&eta, &e.conjugation, n), is_case_pm(&teta, &e.conjugation, n));
        let mut a = eta.clone();
        let mut b = teta.clone();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
        if let (Ok(o), Ok(to)) = (omega_infty(&w, e), omega_infty(&t, e)) {
            let mut x = o.exponents.clone();
            let mut y = to.exponents.clone();
            x.sort_unstable();
            y.sort_unstable();
            prop_assert_eq!(x, y);
            // the new sign at a place is read off the old weight that lands on its CM-type embedding
            let places = e.places();
            let case_pm = is_case_pm(&eta, &e.conjugation, n);
            for (p, &(a, _)) in places.iter().enumerate() {
                let img = g.apply(a);
                let q = places.iter().position(|&(x, y)| x == img || y == img).unwrap();
                let src = (0..e.degree()).find(|&i| g.apply(i) == places[q].0).unwrap();
                let sign = if eta[src] <= 0 { 1 } else { -1 };
                prop_assert_eq!(to.signs[q], sign);
                if case_pm {
                    let flipped = places[q].0 != img;
                    prop_assert_eq!(to.signs[q], if flipped { -o.signs[p] } else { o.signs[p] });
                }
            }
        }
    }

    #[test]
    fn case_pm_implies_regular(eta in prop::collection::vec(-6i64..=9, 4), n in 1usize..=4) {
        let conj = [1, 0, 3, 2];
        if is_case_pm(&eta, &conj, n) {
            prop_assert!(is_regular_algebraic(&eta, n));
            for &x in &eta {
                prop_assert!(is_dominant(&f_eta_weight(x, n).unwrap()));
            }
        }
    }

    #[test]
    fn balanced_matches_oracle_n3(mu in dominant(3), nu in dominant(3), chi in -2i64..=2, eta in prop_oneof![-4i64..=0, 3i64..=6]) {
        prop_assert_eq!(balanced_at(&mu, &nu, chi, eta, 3), balanced_oracle(&mu, &nu, chi, eta, 3));
    }

    #[test]
    fn wedge_sign_cocycle(f in 2usize..4, s1 in any::<u64>(), s2 in any::<u64>(), n in 2usize..=3, k in 1usize..=3, mask in 0u32..8) {
        let e = &fields()[f];
        let k = k.min(n);
        let places = e.places();
        let mut eta = vec![0; e.degree()];
        for (p, &(a, b)) in places.iter().enumerate() {
            let (lo, hi) = if mask >> p & 1 == 0 { (a, b) } else { (b, a) };
            eta[lo] = 0;
            eta[hi] = n as i64;
        }
        let m = omega_monomial(&eta, e, n, k).unwrap();
        let (g, h) = (rng_perm(e, s1), rng_perm(e, s2));
        let hm = WedgeMonomial::from_unsorted(1, m.labels.iter().map(|c| Covector { embedding: h.apply(c.embedding), ..*c }).collect());
        let lhs = wedge_sigma_sign(&m, &g.compose(&h));
        prop_assert_eq!(lhs, wedge_sigma_sign(&m, &h) * wedge_sigma_sign(&hm, &g));
    }

    #[test]
    fn sigma2_fixes_k1(f in 0usize..4, seed in any::<u64>()) {
        let e = &fields()[f];
        let d = sigma_decompose(&rng_perm(e, seed), e).unwrap();
        let on = d.sigma2.on_k1(e);
        prop_assert!(on.iter().enumerate().all(|(i, &j)| i == j));
        prop_assert_eq!(d.epsilon * d.epsilon, 1);
    }

    #[test]
    fn gamma_cocycle(m in -3i64..6, j in 0i64..4, jp in 0i64..4, re in 4.0f64..9.0, im in -3.0f64..3.0) {
        let s = Complex64::new(re, im);
        let lhs = gamma_ratio(m, j, s).unwrap() * gamma_ratio(m - j, jp, s).unwrap();
        let rhs = gamma_ratio(m, j + jp, s).unwrap();
        prop_assert!((lhs / rhs - 1.0).norm() < 1e-12);
    }

    #[test]
    fn lratio_positive_and_tends_to_one(n in 1usize..=4, k in 1usize..=4, j in 0i64..12, q in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let k = k.min(n);
        let r = unramified_lratio(n, k, &Cyclo::zeta(12, j), q).unwrap();
        let near = r.eval(x_of_s(q, Complex64::new(80.0, 0.0)));
        prop_assert!((near - 1.0).norm() < 1e-12);
        if j == 0 {
            let v = r.eval(x_of_s(q, Complex64::new(n as f64 + 2.0, 0.0)));
            prop_assert!(v.re > 0.0 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn laurent_ratio_normal_form(c in prop::collection::vec(-4i64..=4, 1..4), d in prop::collection::vec(-4i64..=4, 1..4), f in prop::collection::vec(-3i64..=3, 1..3), j in 0i64..6) {
        let poly = |v: &[i64]| CPoly::new(v.iter().map(|&x| Cyclo::int(x).mul(&Cyclo::zeta(6, j))).collect());
        let (num, den, fac) = (poly(&c), poly(&d), poly(&f));
        prop_assume!(!den.is_zero() && !fac.is_zero());
        let plain = LaurentRatio::new(num.clone(), den.clone()).unwrap();
        let padded = LaurentRatio::new(num.mul(&fac), den.mul(&fac)).unwrap();
        prop_assert_eq!(plain, padded);
    }

    #[test]
    fn arch_transitivity(eta in -2i64..=0, extra in 0i64..=2, k in 1usize..=2, ds in 0.0f64..2.0) {
        let n = 3;
        let eta_bar = n as i64 + extra;
        let s = Complex64::new((n as i64 - eta_bar + 1) as f64 + ds, 0.4);
        let beta = PhiBeta::beta0(n, (eta, eta_bar));
        let r = arch_intertwine_numeric(n, k, &PhiBeta::new(beta, (eta, eta_bar), s).unwrap(), &ArchConfig::default()).unwrap();
        // product of single steps 2π/(s+η_ῑ-t)
        let mut prod = Complex64::new(1.0, 0.0);
        for t in 1..=(n - k) as i64 {
            prod *= gamma_ratio(eta_bar - t + 1, 1, s).unwrap();
        }
        prop_assert!((r.value / prod - 1.0).norm() < 1e-6);
    }
}

#[test]
fn nabla_trivial_for_degree_one_extensions() {
    for f in &fields()[..2] {
        assert_eq!(nabla(f).unwrap().exact.as_rational(), Some(q_int(1)));
    }
}

#[test]
fn big_delta_depends_on_d_and_relative_degree() {
    let a = build_field(&FieldTower::new(1, vec![-2, 0, 1]), 30).unwrap();
    let b = build_field(&FieldTower::new(1, vec![-3, 0, 1]), 30).unwrap();
    let c = build_field(&FieldTower::new(1, vec![1, 1, 1]), 30).unwrap();
    let da = delta_big(&a).unwrap().exact;
    assert_eq!(da, delta_big(&b).unwrap().exact);
    assert_eq!(da, delta_big(&c).unwrap().exact);
    assert_ne!(da, delta_big(&fields()[0]).unwrap().exact);
}

#[test]
fn line_counts_and_length_generating_function() {
    // ([n]_q!)^e by polynomial multiplication
    fn qfact(n: usize) -> Vec<usize> {
        let mut p = vec![1];
        for m in 1..=n {
            let mut next = vec![0; p.len() + m - 1];
            for (i, &c) in p.iter().enumerate() {
                for j in 0..m {
                    next[i + j] += c;
                }
            }
            p = next;
        }
        p
    }
    for f in &fields()[..3] {
        let e = f.degree();
        for n in 1..=3 {
            let mut want = vec![1usize];
            for _ in 0..e {
                let q = qfact(n);
                let mut next = vec![0; want.len() + q.len() - 1];
                for (i, &a) in want.iter().enumerate() {
                    for (j, &b) in q.iter().enumerate() {
                        next[i + j] += a * b;
                    }
                }
                want = next;
            }
            let mut got = vec![0usize; want.len()];
            for w in all_elements(n, e) {
                got[w.length()] += 1;
            }
            assert_eq!(got, want, "n={n} e={e}");
            let eta: Vec<i64> = (0..e).map(|i| if f.cm_type.contains(&i) { 0 } else { n as i64 }).collect();
            let ws = WeightSystem { n, mu: eta.iter().map(|&x| { let mut v = vec![0; n]; v[0] = x; v }).collect(), nu: vec![vec![0; n]; e], chi: vec![0; e] };
            let counts: Vec<usize> = (0..want.len()).map(|p| kostant_lines(&ws, f, p).unwrap().len()).collect();
            assert_eq!(counts, want);
        }
    }
}

/// `Σ_a χ(g^a) ψ(tr g^a)` summed directly in floating point.
fn gauss_float(q: u64, j: i64) -> Complex64 {
    let f = FiniteField::new(q).unwrap();
    let p = f.characteristic() as f64;
    let m = (q - 1) as f64;
    (0..q - 1)
        .map(|a| {
            let t = f.trace(f.gen_pow(a)) as f64 / p - (j * a as i64) as f64 / m;
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t)
        })
        .sum()
}

#[test]
fn gauss_norms() {
    for q in 2..=49u64 {
        if periodlab::finfield::prime_power(q).is_none() {
            continue;
        }
        for j in 1..(q - 1) as i64 {
            let direct = gauss_float(q, j);
            assert!((direct.norm_sqr() - q as f64).abs() < 1e-9, "q={q} j={j}");
            if q <= 27 {
                let g = gauss_sum(&GaussSumSpec { q, order: q - 1, index: j }).unwrap();
                assert_eq!(g.exact.mul(&g.exact.conj()), Cyclo::int(q as i64), "q={q} j={j}");
                assert!((g.approx - direct).norm() < 1e-9, "q={q} j={j}");
            }
        }
    }
}

#[test]
fn gauss_involution_up_to_13() {
    for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13] {
        for j in 0..(q - 1) as i64 {
            let spec = GaussSumSpec { q, order: q - 1, index: j };
            let g = gauss_sum(&spec).unwrap().exact;
            let gi = gauss_sum(&spec.inverse()).unwrap().exact;
            assert_eq!(gi, spec.at_minus_one().mul(&g.conj()), "q={q} j={j}");
        }
    }
}

#[test]
fn conjugation_elem_sanity() {
    // √-d squares to -d under every embedding
    for f in fields() {
        let x = Elem::sqrt_neg_d().mul(&Elem::sqrt_neg_d());
        for emb in &f.embeddings {
            let v = emb.eval(&x).to_c64();
            assert!((v + f.tower.d as f64).norm() < 1e-20);
        }
    }
}
