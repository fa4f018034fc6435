use std::collections::BTreeMap;

use num_traits::Zero;
use proptest::prelude::*;
use shuffle_stab::coproducts::delta_w;
use shuffle_stab::derivations::{ihara_bracket, theta};
use shuffle_stab::freealg::is_lie_element;
use shuffle_stab::linalg::KernelProblem;
use shuffle_stab::rational::int;
use shuffle_stab::walgebra::{epsilon, runs_word, sigma, word_runs};
use shuffle_stab::{Composition, LinComb, NCPoly, Rational, Tensor2, WPoly, Word};

fn composition(max_len: usize) -> impl Strategy<Value = Composition> {
    prop::collection::vec(1usize..=4, 0..=max_len).prop_map(|p| Composition::new(&p))
}

fn wpoly(max_len: usize) -> impl Strategy<Value = WPoly> {
    prop::collection::vec((composition(max_len), -3i64..=3), 1..=3)
        .prop_map(|ts| WPoly::from_terms(ts.into_iter().map(|(c, q)| (c, int(q)))))
}

fn word(d: usize) -> impl Strategy<Value = Word> {
    (0u64..(1 << d)).prop_map(move |b| Word::new(d, b))
}

fn v0(d: usize) -> impl Strategy<Value = NCPoly> {
    prop::collection::vec((word(d), -3i64..=3), 1..=3)
        .prop_map(|ts| NCPoly::from_terms(ts.into_iter().map(|(w, q)| (w, int(q)))))
}

type Tensor3 = LinComb<(Composition, Composition, Composition)>;

fn coassoc_sides(a: &WPoly) -> (Tensor3, Tensor3) {
    let (mut l, mut r) = (Tensor3::zero(), Tensor3::zero());
    for ((x, y), q) in delta_w(a).terms() {
        for ((u, v), p) in delta_w(&WPoly::from_comp(x.clone())).terms() {
            l.add_term((u.clone(), v.clone(), y.clone()), q * p);
        }
        for ((u, v), p) in delta_w(&WPoly::from_comp(y.clone())).terms() {
            r.add_term((x.clone(), u.clone(), v.clone()), q * p);
        }
    }
    (l, r)
}

/// Nullity by plain Gaussian elimination over the rationals.
fn naive_nullity(cols: &[Vec<Rational>], nrows: usize) -> usize {
    let ncols = cols.len();
    let mut m: Vec<Vec<Rational>> = (0..nrows)
        .map(|i| (0..ncols).map(|j| cols[j][i].clone()).collect())
        .collect();
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for i in 0..nrows {
            if i != rank && !m[i][c].is_zero() {
                let f = &m[i][c] / &pivot;
                let prow = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(&prow) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    ncols - rank
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coproduct_cocommutative(a in wpoly(4)) {
        let d = delta_w(&a);
        prop_assert_eq!(sigma(&d), d);
    }

    #[test]
    fn coproduct_counit(a in wpoly(4)) {
        let d = delta_w(&a);
        let left = d.contract_left(|c| epsilon(&WPoly::from_comp(c.clone())));
        let right = d.contract_right(|c| epsilon(&WPoly::from_comp(c.clone())));
        prop_assert_eq!(&left, &a);
        prop_assert_eq!(&right, &a);
    }

    #[test]
    fn coproduct_coassociative(a in wpoly(3)) {
        let (l, r) = coassoc_sides(&a);
        prop_assert_eq!(l, r);
    }

    #[test]
    fn coproduct_multiplicative(a in wpoly(3), b in wpoly(3)) {
        prop_assert_eq!(delta_w(&a.mul(&b)), delta_w(&a).mul(&delta_w(&b)));
    }

    #[test]
    fn bracket_antisymmetric(d1 in 1usize..=4, d2 in 1usize..=4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let x = shuffle_stab::random::random_v0(&mut shuffle_stab::random::rng(s1), d1, 3);
        let y = shuffle_stab::random::random_v0(&mut shuffle_stab::random::rng(s2), d2, 3);
        let s = ihara_bracket(&x, &y).unwrap() + ihara_bracket(&y, &x).unwrap();
        prop_assert!(s.is_zero());
    }

    #[test]
    fn bracket_on_v0(x in v0(3), y in v0(3)) {
        let b = ihara_bracket(&x, &y).unwrap();
        prop_assert!(b.is_in_v0());
        prop_assert!(b.is_zero() || b.homogeneous_degree() == Some(6));
    }

    #[test]
    fn theta_preserves_lie_degree(d in 1usize..=6, seed in any::<u64>()) {
        let x = shuffle_stab::random::random_lie(&mut shuffle_stab::random::rng(seed), d, 2);
        prop_assert!(is_lie_element(&x).unwrap());
        let t = theta(&x);
        prop_assert!(t.is_zero() || t.homogeneous_degree() == Some(d));
    }

    #[test]
    fn composition_word_bijection(c in composition(6)) {
        let w = c.to_word();
        prop_assert_eq!(Composition::from_word(&w), Some(c.clone()));
        prop_assert_eq!(w.len(), c.weight());
    }

    #[test]
    fn runs_roundtrip(d in 1usize..=10, bits in any::<u64>()) {
        let w = Word::new(d, bits & ((1 << d) - 1));
        let runs = word_runs(&w);
        prop_assert_eq!(runs.iter().sum::<usize>(), d + 1);
        prop_assert_eq!(runs_word(&runs), w);
    }

    #[test]
    fn kernel_matches_naive_elimination(
        cols in prop::collection::vec(prop::collection::vec(-4i64..=4, 6), 1..=7),
    ) {
        let nrows = 6;
        let mut kp = KernelProblem::new();
        for c in &cols {
            kp.add_column(c.iter().enumerate().map(|(i, &q)| (i, int(q))));
        }
        let ker = kp.kernel();
        let qcols: Vec<Vec<Rational>> = cols.iter().map(|c| c.iter().map(|&q| int(q)).collect()).collect();
        prop_assert_eq!(ker.len(), naive_nullity(&qcols, nrows));
        for v in &ker {
            let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
            for (j, c) in cols.iter().enumerate() {
                for (i, &q) in c.iter().enumerate() {
                    *acc.entry(i).or_insert_with(Rational::zero) += &v[j] * int(q);
                }
            }
            prop_assert!(acc.values().all(|q| q.is_zero()));
        }
    }
}

#[test]
fn tensor_unit_is_neutral() {
    let a = Tensor2::tensor(&WPoly::from_parts(&[2]), &WPoly::from_parts(&[1, 1]));
    assert_eq!(a.mul(&Tensor2::unit()), a);
    assert_eq!(Tensor2::unit().mul(&a), a);
}
