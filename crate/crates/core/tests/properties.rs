mod common;

use gmc_core::expansion::{f_recurrence, h_symbolic, Monomial, SymbolicCoefficient};
use gmc_core::mellin::log_g_ratio;
use gmc_core::specfun::{bell_polynomial, bernoulli_polynomial, hurwitz_zeta, rat, PolynomialQ, Rational};
use num_complex::Complex64;
use num_traits::Zero;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

proptest! {
    #[test]
    fn bernoulli_telescoping(p in 0usize..=12, l in 0i64..60) {
        let b = bernoulli_polynomial(p + 1);
        let x = rat(l, 1);
        let lhs = b.eval(&(x.clone() + rat(1, 1))) - b.eval(&x);
        let rhs = rat(p as i64 + 1, 1) * num_traits::pow(x, p);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hurwitz_shift(p in 2u32..=4, a in 0.5f64..4.0) {
        let d = hurwitz_zeta(p, a).unwrap() - hurwitz_zeta(p, a + 1.0).unwrap();
        prop_assert!((d - a.powi(-(p as i32))).abs() < 1e-12, "p={} a={} diff={:e}", p, a, d - a.powi(-(p as i32)));
    }

    #[test]
    fn bell_matches_exponential_generating_function(x in prop::collection::vec(rational(), 8)) {
        // exp(sum_k x_k t^k / k!) as a series in t, coefficients embedded as constants
        let c: Vec<PolynomialQ> = x
            .iter()
            .enumerate()
            .map(|(i, v)| PolynomialQ::constant(v.clone() / Rational::from_integer(common::factorial(i + 1).into())))
            .collect();
        let e = common::series_exp(&c, 8);
        for n in 0..=8 {
            let want = e[n].coeff(0) * Rational::from_integer(common::factorial(n).into());
            prop_assert_eq!(bell_polynomial(n, &x[..n]), want, "n = {}", n);
        }
    }

    #[test]
    fn series_exponent_matches_f_recurrence(w in prop::collection::vec((rational(), rational()), 8)) {
        let c = common::rational_circle_coefficients(&w);
        let f = f_recurrence(8, PolynomialQ::constant(rat(1, 1)), &c).unwrap();
        let e = common::series_exp(&c, 8);
        for n in 0..=8 {
            let scaled = f[n].scale(&Rational::from_integer(common::factorial(n).into()).recip());
            prop_assert_eq!(&scaled, &e[n], "n = {}", n);
        }
    }

    #[test]
    fn symbolic_text_round_trip(
        terms in prop::collection::vec(
            (prop::collection::vec((1usize..=6, 1usize..=6), 0..4), prop::collection::vec(1usize..=6, 0..3), rational()),
            0..6,
        )
    ) {
        let mut h = SymbolicCoefficient::zero(6);
        for (edges, verts, c) in terms {
            let mut m = Monomial::one();
            for (i, j) in edges {
                if i != j {
                    m = m.mul(&Monomial::edge(i, j));
                }
            }
            for v in verts {
                m = m.mul(&Monomial::vertex(v));
            }
            h.add_term(m, c);
        }
        let s = h.to_canonical_string();
        let back = SymbolicCoefficient::parse(&s).unwrap();
        prop_assert_eq!(back.to_canonical_string(), s);
        prop_assert_eq!(back.terms(), h.terms());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn log_g_ratio_telescopes(q1 in 0.1f64..1.5, q2 in 0.1f64..1.5, a in 0.0f64..4.0, tau in 2.0f64..8.0) {
        let c = |v: f64| Complex64::new(v, 0.0);
        let whole = log_g_ratio(c(q1 + q2), a, tau).unwrap();
        let split = log_g_ratio(c(q1), a, tau).unwrap() + log_g_ratio(c(q2), a - q1, tau).unwrap();
        prop_assert!((whole - split).norm() < 1e-10, "{} vs {}", whole, split);
    }
}

#[test]
fn multinomial_terms_law() {
    for n in 1..=4 {
        let h = h_symbolic(n, false).unwrap();
        for k in 2..=2 * n + 1 {
            let brute = common::brute_multinomial(n, k);
            let Some(coef) = h.get(&k) else {
                assert!(brute.is_empty(), "n={n} k={k}: recursion has no entry");
                continue;
            };
            let kf = Rational::from_integer(common::factorial(k).into());
            assert_eq!(coef.len(), brute.len(), "n={n} k={k}");
            for (m, c) in coef.terms() {
                assert_eq!(m.vertices().count(), 0);
                let edges: Vec<(usize, usize)> = m.edges().collect();
                let count = brute.get(&edges).unwrap_or_else(|| panic!("n={n} k={k}: extra monomial {m}"));
                assert_eq!(c.clone() * kf.clone(), Rational::from_integer((*count).into()), "n={n} k={k} {m}");
            }
        }
        assert!(h.keys().all(|&k| k <= 2 * n));
        assert!(!h.values().any(|c| c.terms().values().any(Zero::is_zero)));
    }
}
