use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use symbasis::{Matrix, Permutation, PolyForm, Rational};

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| Rational::new(n, d))
}

fn arb_perm(m: usize) -> impl Strategy<Value = Permutation> {
    Just((0..m).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
}

/// A form on `T^n` of degree `k`, possibly non-canonical (mentioning λ_0, dλ_0).
fn arb_form(n: usize, k: usize) -> impl Strategy<Value = PolyForm> {
    let term = (prop::collection::vec(0u8..3, n + 1), prop::collection::vec(0..=n, k), arb_rational());
    prop::collection::vec(term, 0..5).prop_map(move |terms| {
        let mut f = PolyForm::zero(n, k);
        for (e, s, c) in terms {
            f = &f + &PolyForm::term(n, &e, &s, c).unwrap();
        }
        f
    })
}

fn arb_shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), 0..=n))
}

fn big(x: &Rational) -> BigRational {
    BigRational::new(x.numer(), x.denom())
}

/// Rank by plain dense elimination over `BigRational`.
fn oracle_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| a[i][c] != BigRational::from_integer(0.into())) else { continue };
        a.swap(rank, p);
        for i in rank + 1..a.len() {
            let f = &a[i][c] / &a[rank][c];
            for j in c..cols {
                let d = &f * &a[rank][j];
                a[i][j] -= d;
            }
        }
        rank += 1;
    }
    rank
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_arithmetic_matches_bigrational(a in any::<i64>(), b in 1i64..i64::MAX, c in any::<i32>(), d in 1i32..1000) {
        let x = Rational::new(a, b);
        let y = Rational::new(c as i64, d as i64);
        prop_assert_eq!(big(&(&x + &y)), big(&x) + big(&y));
        prop_assert_eq!(big(&(&x * &y)), big(&x) * big(&y));
        prop_assert_eq!(big(&(&x - &y)), big(&x) - big(&y));
        if !y.is_zero() {
            prop_assert_eq!(big(&(&x / &y)), big(&x) / big(&y));
        }
        prop_assert_eq!(x.cmp(&y), big(&x).cmp(&big(&y)));
    }

    #[test]
    fn canonicalize_is_idempotent_and_linear(((n, k), (f, g)) in arb_shape().prop_flat_map(|(n, k)| (Just((n, k)), (arb_form(n, k), arb_form(n, k))))) {
        let cf = f.canonicalize();
        prop_assert_eq!(cf.canonicalize(), cf.clone());
        prop_assert_eq!((&f + &g).canonicalize(), &cf + &g.canonicalize());
        prop_assert_eq!((f.n(), f.k()), (n, k));
    }

    #[test]
    fn pullback_is_an_action(
        (f, s, t) in arb_shape().prop_flat_map(|(n, k)| (arb_form(n, k), arb_perm(n + 1), arb_perm(n + 1)))
    ) {
        let lhs = f.pullback(&s).unwrap().pullback(&t).unwrap();
        let rhs = f.pullback(&t.compose(&s)).unwrap();
        prop_assert_eq!(lhs, rhs);
        let id = Permutation::identity(f.n() + 1);
        prop_assert_eq!(f.pullback(&id).unwrap(), f.canonicalize());
    }

    #[test]
    fn inner_product_is_invariant(
        (f, g, s) in arb_shape().prop_flat_map(|(n, k)| (arb_form(n, k), arb_form(n, k), arb_perm(n + 1)))
    ) {
        let before = f.inner_product(&g).unwrap();
        let after = f.pullback(&s).unwrap().inner_product(&g.pullback(&s).unwrap()).unwrap();
        prop_assert_eq!(&before, &after);
        prop_assert_eq!(before, g.inner_product(&f).unwrap());
        prop_assert!(!f.inner_product(&f).unwrap().is_negative());
    }

    #[test]
    fn homogenizing_does_not_change_the_form(
        (f, extra) in arb_shape().prop_flat_map(|(n, k)| (arb_form(n, k), 0u32..3))
    ) {
        let r = f.degree().unwrap_or(0) + extra;
        let h = f.homogenize(r).unwrap();
        prop_assert!(h.terms().all(|((_, a), _)| a.degree() == r));
        prop_assert_eq!(h.canonicalize(), f.canonicalize());
    }

    #[test]
    fn exterior_derivative_is_a_differential(
        (f, s) in (1usize..=3).prop_flat_map(|n| (0..n).prop_flat_map(move |k| (arb_form(n, k), arb_perm(n + 1))))
    ) {
        let df = f.exterior_derivative().unwrap();
        if df.k() < df.n() {
            prop_assert!(df.exterior_derivative().unwrap().is_zero());
        }
        prop_assert_eq!(f.pullback(&s).unwrap().exterior_derivative().unwrap().canonicalize(), df.pullback(&s).unwrap());
    }

    #[test]
    fn wedge_is_graded_commutative(
        (f, g) in (2usize..=3).prop_flat_map(|n| (0..=1usize, 0..=1usize).prop_flat_map(move |(k, l)| (arb_form(n, k), arb_form(n, l))))
    ) {
        let sign = if f.k() * g.k() % 2 == 0 { 1 } else { -1 };
        let fg = f.wedge(&g).unwrap().canonicalize();
        let gf = g.wedge(&f).unwrap().canonicalize().scale(&Rational::from_int(sign));
        prop_assert_eq!(fg, gf);
    }

    #[test]
    fn nullspace_and_rank_are_exact(rows in (1usize..7, 1usize..9).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-3i64..4, c), r))) {
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let m = Matrix::from_i64(&refs);
        let rank = oracle_rank(&rows);
        prop_assert_eq!(m.rank(), rank);
        let ns = m.nullspace();
        prop_assert_eq!(ns.len(), m.cols() - rank);
        for x in &ns {
            for row in &rows {
                let s: Rational = row.iter().zip(x).map(|(&a, b)| Rational::from_int(a) * b).sum();
                prop_assert!(s.is_zero());
            }
        }
        if m.rows() == m.cols() {
            match m.inverse() {
                Ok(inv) => prop_assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(m.rows())),
                Err(_) => prop_assert!(rank < m.rows()),
            }
        }
    }
}
