mod common;

use std::collections::BTreeSet;

use common::{brute_symbol, brute_symbol_real, small_primes};
use num_rational::Rational64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use shaomega_core::hilbert::*;

fn q(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn places(bound: u64) -> Vec<PlaceOfQ> {
    std::iter::once(PlaceOfQ::Real).chain(small_primes(bound).into_iter().map(PlaceOfQ::Prime)).collect()
}

#[test]
fn symbol_matches_local_solvability_search() {
    let primes = small_primes(50);
    let pairs: Vec<(i64, i64)> = (-30..=30)
        .filter(|&a| a != 0)
        .flat_map(|a| (-30..=30).filter(|&b| b != 0).map(move |b| (a, b)))
        .collect();
    let bad: Vec<String> = pairs
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            let mut out = Vec::new();
            if hilbert_symbol(q(a), q(b), PlaceOfQ::Real).unwrap() != brute_symbol_real(a, b) {
                out.push(format!("({a},{b})_inf"));
            }
            for &p in &primes {
                if hilbert_symbol(q(a), q(b), PlaceOfQ::Prime(p)).unwrap() != brute_symbol(a, b, p) {
                    out.push(format!("({a},{b})_{p}"));
                }
            }
            out
        })
        .collect();
    assert!(bad.is_empty(), "mismatches: {bad:?}");
}

#[test]
fn worked_examples() {
    assert_eq!(hilbert_symbol(q(3), q(2), PlaceOfQ::Prime(3)).unwrap(), brute_symbol(3, 2, 3));
    assert_eq!(hilbert_symbol(q(3), q(2), PlaceOfQ::Prime(3)).unwrap(), -1);
    assert_eq!(local_invariant(&QuaternionClass::new(q(3), q(2)).unwrap(), PlaceOfQ::Prime(3)).unwrap(), LocalInvariant::HALF);
    assert_eq!(local_invariant(&QuaternionClass::new(q(1), q(7)).unwrap(), PlaceOfQ::Prime(7)).unwrap(), LocalInvariant::ZERO);
    for a in [-13i64, -2, 5, 21] {
        for v in places(30) {
            assert_eq!(hilbert_symbol(q(a), q(-a), v).unwrap(), 1);
        }
    }
}

#[test]
fn product_formula_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let mut draw = || loop {
            let x: i64 = rng.random_range(-50..=50);
            if x != 0 {
                return x;
            }
        };
        let (a, b) = (draw(), draw());
        let prof = invariant_profile(&QuaternionClass::new(q(a), q(b)).unwrap()).unwrap();
        assert_eq!(prof.values().filter(|i| i.half).count() % 2, 0);
        // places outside the support are unramified
        for v in places(50) {
            if !prof.contains_key(&v) {
                assert_eq!(hilbert_symbol(q(a), q(b), v).unwrap(), 1, "({a},{b}) at {v}");
            }
        }
    }
}

#[test]
fn minus_one_minus_one_ramifies_at_real_and_two() {
    let prof = invariant_profile(&QuaternionClass::new(q(-1), q(-1)).unwrap()).unwrap();
    let ram: Vec<PlaceOfQ> = prof.iter().filter(|(_, i)| i.half).map(|(v, _)| *v).collect();
    assert_eq!(ram, vec![PlaceOfQ::Real, PlaceOfQ::Prime(2)]);
    let trivial = invariant_profile(&QuaternionClass::new(q(1), q(-35)).unwrap()).unwrap();
    assert!(trivial.values().all(|i| !i.half));
}

/// Square classes of `Q_p` enumerated from the brute-force symbol: `x` and `y`
/// are in the same class iff `(x, r) = (y, r)` for every representative `r`.
fn oracle_multinorm(a: i64, b: i64, c: i64, p: u64) -> bool {
    let reps = square_class_reps(PlaceOfQ::Prime(p));
    let signature = |x: i64| -> Vec<i8> { reps.iter().map(|&r| brute_symbol(x, r as i64, p)).collect() };
    let class_of = |x: i64| signature(x);
    let norms = |x: i64| -> BTreeSet<Vec<i8>> {
        reps.iter().filter(|&&r| brute_symbol(x, r as i64, p) == 1).map(|&r| class_of(r as i64)).collect()
    };
    let mult = |u: &[i8], v: &[i8]| -> Vec<i8> { u.iter().zip(v).map(|(x, y)| x * y).collect() };
    let (na, nb, nab) = (norms(a), norms(b), norms(a * b));
    let target = class_of(c);
    na.iter().any(|x| nb.iter().any(|y| nab.contains(&mult(&mult(x, y), &target))))
}

#[test]
fn multinorm_example_at_seven() {
    let expected = oracle_multinorm(3, 5, 2, 7);
    assert_eq!(multinorm_local_solvable(q(3), q(5), q(2), PlaceOfQ::Prime(7)).unwrap(), expected);
}

#[test]
fn multinorm_matches_class_enumeration() {
    for p in [2u64, 3, 5, 7, 11] {
        for a in [-6i64, -1, 2, 3, 7, 10] {
            for b in [-3i64, -1, 5, 6, 11] {
                for c in [-14i64, -1, 2, 3, 5, 7, 15] {
                    assert_eq!(
                        multinorm_local_solvable(q(a), q(b), q(c), PlaceOfQ::Prime(p)).unwrap(),
                        oracle_multinorm(a, b, c, p),
                        "a={a} b={b} c={c} p={p}"
                    );
                }
            }
        }
    }
}

#[test]
fn multinorm_true_when_a_b_or_ab_is_local_square() {
    let pl = places(50);
    for a in -30i64..=30 {
        for b in -30i64..=30 {
            if a == 0 || b == 0 {
                continue;
            }
            for &v in &pl {
                let sq = |x: i64| is_local_square(q(x), v).unwrap();
                if sq(a) || sq(b) || sq(a * b) {
                    for c in [-7i64, -1, 2, 3, 13, 30] {
                        assert!(multinorm_local_solvable(q(a), q(b), q(c), v).unwrap());
                    }
                }
            }
        }
    }
}

#[test]
fn fiber_scan_examples() {
    // a = 1: every fiber everywhere locally solvable
    let lambdas: Vec<Rational64> = (-5..=5).map(q).chain([Rational64::new(1, 3), Rational64::new(-7, 2)]).collect();
    let rep = fiber_scan(q(1), q(3), &[(vec![1, 0, 1], 1), (vec![-2, 1], 2)], &lambdas).unwrap();
    assert!(rep.iter().filter(|r| r.value.is_some()).all(|r| r.everywhere_locally_solvable));
    assert!(rep.iter().any(|r| r.value.is_none()), "λ = 2 is a root");
    // P(t) = t, a = b = −1, λ = −1 at the real place
    let rep = fiber_scan(q(-1), q(-1), &[(vec![0, 1], 1)], &[q(-1)]).unwrap();
    let real = rep[0].places.iter().find(|(v, _)| *v == PlaceOfQ::Real).unwrap().1;
    assert_eq!(real, multinorm_local_solvable(q(-1), q(-1), q(-1), PlaceOfQ::Real).unwrap());
    // ab = 1 is a square, so the third factor alone represents c
    assert!(real);
}

#[test]
fn fiber_flags_stable_under_square_rescaling() {
    // P(t) = t: c = λ and c·m² lie in the same square class everywhere
    let base: Vec<Rational64> = [-6i64, -3, 2, 5, 7, 10].into_iter().map(q).collect();
    let scaled: Vec<Rational64> = base.iter().map(|&l| l * q(9)).collect();
    let r1 = fiber_scan(q(-1), q(3), &[(vec![0, 1], 1)], &base).unwrap();
    let r2 = fiber_scan(q(-1), q(3), &[(vec![0, 1], 1)], &scaled).unwrap();
    for (x, y) in r1.iter().zip(&r2) {
        assert_eq!(x.everywhere_locally_solvable, y.everywhere_locally_solvable);
        for (v, ok) in &x.places {
            if let Some((_, ok2)) = y.places.iter().find(|(w, _)| w == v) {
                assert_eq!(ok, ok2);
            }
        }
    }
}

#[test]
fn magnitude_and_zero_errors() {
    assert!(matches!(hilbert_symbol(q(0), q(1), PlaceOfQ::Real), Err(shaomega_core::Error::ZeroArgument)));
    let big = QuaternionClass::new(q(1_000_000_000_039 * 1), q(1_000_003 * 1_000_033)).unwrap();
    assert!(invariant_profile(&big).is_err());
    assert!(PlaceOfQ::prime(91).is_err());
}

proptest! {
    #[test]
    fn symmetric_and_bimultiplicative(a in -200i64..200, b in -200i64..200, c in -200i64..200, pi in 0usize..8) {
        prop_assume!(a != 0 && b != 0 && c != 0);
        let v = places(19)[pi];
        let h = |x: i64, y: i64| hilbert_symbol(q(x), q(y), v).unwrap();
        prop_assert_eq!(h(a, b), h(b, a));
        prop_assert_eq!(h(a * c, b), h(a, b) * h(c, b));
        prop_assert_eq!(h(a, a), h(a, -1));
    }

    #[test]
    fn rational_arguments_follow_square_classes(n in 1i64..60, d in 1i64..60, b in -40i64..40) {
        prop_assume!(b != 0);
        for v in places(13) {
            prop_assert_eq!(
                hilbert_symbol(Rational64::new(n, d), q(b), v).unwrap(),
                hilbert_symbol(q(n * d), q(b), v).unwrap()
            );
        }
    }
}
