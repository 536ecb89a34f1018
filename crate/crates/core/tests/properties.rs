use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use looptop_core::cobar::{build_cobar, coalgebra_of, homology_report, verify_loop_homology, DEFAULT_MAX_CELLS};
use looptop_core::linalg::ZMatrix;
use looptop_core::lyndon::{
    bracket_expand, count_standard_lyndon, generate_lyndon, is_lyndon, lie_ranks_from_series, standard_factorization,
};
use looptop_core::ncalgebra::{normalize_relation, relation_from_space, Alphabet, Letter, TensorElement, Word};
use looptop_core::normal_form::{count_irreducible, reduce, RewriteSystem};
use looptop_core::primes::{factorize, is_prime};
use looptop_core::series::{
    lie_rank_closed_form, moebius_mu, pbw_match_graded, rational_ranks_closed_form, manifold_hilbert_series, PowerSeries,
};
use looptop_core::snf::{invariant_factors, rank_and_torsion, smith_normal_form, SparseMatrix};
use looptop_core::spaces::{bad_primes, decomposition_report, default_form, SpaceModel};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Unimodular matrix as a product of elementary row operations.
fn unimodular(n: usize, ops: &[(usize, usize, i64, bool)]) -> ZMatrix {
    let mut m = ZMatrix::identity(n);
    for &(i, j, k, swap) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let mut e = ZMatrix::identity(n);
        if swap {
            e.set(i, i, BigInt::zero());
            e.set(j, j, BigInt::zero());
            e.set(i, j, BigInt::one());
            e.set(j, i, BigInt::one());
        } else {
            e.set(i, j, BigInt::from(k));
        }
        m = e.mul(&m);
    }
    m
}

fn ops_strategy() -> impl Strategy<Value = Vec<(usize, usize, i64, bool)>> {
    prop::collection::vec((0usize..6, 0usize..6, -3i64..=3, any::<bool>()), 0..8)
}

fn symmetric_strategy(r: usize) -> impl Strategy<Value = ZMatrix> {
    prop::collection::vec(-4i64..=4, r * (r + 1) / 2).prop_map(move |v| {
        let mut m = ZMatrix::zeros(r, r);
        let mut k = 0;
        for i in 0..r {
            for j in i..r {
                m.set(i, j, BigInt::from(v[k]));
                m.set(j, i, BigInt::from(v[k]));
                k += 1;
            }
        }
        m
    })
}

fn word_strategy(r: u16, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(0..r, 0..=max_len)
}

fn prime_power_multiset(fs: &[BigInt]) -> Vec<BigUint> {
    let mut out: Vec<BigUint> =
        fs.iter().flat_map(|f| factorize(f.magnitude()).into_iter().map(|(p, e)| p.pow(e))).collect();
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_and_exp_are_inverse(tail in prop::collection::vec(-5i64..=5, 1..8)) {
        let order = 8;
        let mut coeffs = vec![1i64];
        coeffs.extend(tail);
        let s = PowerSeries::from_integers(&coeffs, order);
        prop_assert_eq!(s.log().unwrap().exp().unwrap(), s.clone());
        let inv = s.inverse().unwrap();
        prop_assert_eq!(&s * &inv, PowerSeries::one(order));
    }

    #[test]
    fn moebius_sums_vanish(n in 1u64..2000) {
        let total: i64 = (1..=n).filter(|d| n % d == 0).map(|d| moebius_mu(d).unwrap() as i64).sum();
        prop_assert_eq!(total, if n == 1 { 1 } else { 0 });
    }

    #[test]
    fn lie_closed_form_matches_series(r in 2u32..7, d in 1u32..11) {
        let a = Alphabet::uniform(r as usize, 1).unwrap();
        let series = lie_ranks_from_series(&a, 2, d).unwrap();
        prop_assert_eq!(lie_rank_closed_form(r, d).unwrap(), series.get(d));
    }

    #[test]
    fn rational_closed_form_matches_graded_matching(n in 2u32..6, r in 2u32..6) {
        let order = 10;
        let closed = rational_ranks_closed_form(n, r, order).unwrap();
        let pbw = pbw_match_graded(&manifold_hilbert_series(n, r, order), order).unwrap();
        prop_assert_eq!(closed, pbw);
    }

    #[test]
    fn generated_words_are_lyndon_and_factor(r in 1usize..4, d in 1u32..8) {
        let a = Alphabet::uniform(r, 1).unwrap();
        for (deg, words) in generate_lyndon(&a, d).unwrap() {
            prop_assert!(words.windows(2).all(|w| w[0] < w[1]));
            for l in words {
                prop_assert!(is_lyndon(l.word()));
                prop_assert_eq!(l.len() as u32, deg);
                if l.len() > 1 {
                    let (u, v) = standard_factorization(&l).unwrap();
                    prop_assert!(u < v);
                    prop_assert_eq!(u.word().concat(v.word()), l.word().clone());
                }
            }
        }
    }

    #[test]
    fn bracket_leading_word_is_the_lyndon_word(letters in word_strategy(3, 7)) {
        prop_assume!(is_lyndon(&letters));
        let a = Alphabet::uniform(3, 1).unwrap();
        let l = looptop_core::lyndon::LyndonWord::new(Word::from(&letters[..])).unwrap();
        let b = bracket_expand(&l, &a).unwrap();
        let (w, c) = b.leading_term().unwrap();
        prop_assert_eq!(w, l.word());
        prop_assert_eq!(c, &q(1));
    }

    #[test]
    fn reduction_is_an_idempotent_projection_killing_the_ideal(
        g in symmetric_strategy(3),
        u in word_strategy(3, 3),
        v in word_strategy(3, 3),
        w in word_strategy(3, 5),
        lie in any::<bool>(),
    ) {
        prop_assume!(g.rank() >= 2);
        let space = SpaceModel::two_cell(2, g).unwrap();
        let (alphabet, rel) = relation_from_space(&space).unwrap();
        let nr = normalize_relation(&alphabet, &rel).unwrap();
        let rs = if lie { RewriteSystem::lie_from_normalized(&nr) } else { RewriteSystem::from_normalized(&nr) };
        let a = rs.alphabet().clone();
        let mut relation = TensorElement::monomial(&a, rs.forbidden(), q(1));
        relation = relation.sub(rs.replacement()).unwrap();
        let left = TensorElement::monomial(&a, Word::from(&u[..]), q(1));
        let right = TensorElement::monomial(&a, Word::from(&v[..]), q(1));
        let ideal = left.mul(&relation).mul(&right);
        prop_assert!(reduce(&ideal, &rs).unwrap().is_zero());
        let mut e = TensorElement::monomial(&a, Word::from(&w[..]), q(2));
        if w.len() == u.len() + v.len() + 2 {
            e = e.add(&ideal).unwrap();
            prop_assert_eq!(reduce(&e, &rs).unwrap(), reduce(&TensorElement::monomial(&a, Word::from(&w[..]), q(2)), &rs).unwrap());
        }
        let once = reduce(&e, &rs).unwrap();
        prop_assert_eq!(reduce(&once, &rs).unwrap(), once.clone());
        prop_assert!(once.terms().all(|(t, _)| rs.is_irreducible(t)));
    }

    #[test]
    fn counts_do_not_depend_on_basis(g in symmetric_strategy(3), ops in ops_strategy()) {
        prop_assume!(g.rank() >= 2);
        let u = unimodular(3, &ops);
        let h = u.mul(&g).mul(&u.transpose());
        let count = |m: ZMatrix| {
            let space = SpaceModel::two_cell(2, m).unwrap();
            let (alphabet, rel) = relation_from_space(&space).unwrap();
            let nr = normalize_relation(&alphabet, &rel).unwrap();
            (
                count_irreducible(nr.alphabet(), &nr.forbidden_word(), 8).unwrap(),
                count_standard_lyndon(nr.alphabet(), Some(nr.forbidden_pair()), 8),
            )
        };
        prop_assert_eq!(count(g), count(h));
    }

    #[test]
    fn bad_primes_are_invariant(g in symmetric_strategy(3), a in ops_strategy(), b in ops_strategy()) {
        prop_assume!(g.rank() >= 2);
        let h = unimodular(3, &a).mul(&g).mul(&unimodular(3, &b).transpose());
        prop_assert_eq!(bad_primes(&g).unwrap(), bad_primes(&h).unwrap());
    }

    #[test]
    fn manifold_reports_ignore_the_form(ops in ops_strategy(), r in 2u32..5, n in 2u32..4) {
        prop_assume!(n % 2 == 0 || r % 2 == 0);
        let g = default_form(n, r).unwrap();
        let u = unimodular(r as usize, &ops);
        let h = u.mul(&g).mul(&u.transpose());
        let a = decomposition_report(&SpaceModel::manifold(n, r, None).unwrap(), 8).unwrap();
        let b = decomposition_report(&SpaceModel::manifold(n, r, Some(h)).unwrap(), 8).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn smith_form_is_a_verified_divisibility_chain(rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 1..5)) {
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let m = ZMatrix::from_i64(&refs);
        let s = smith_normal_form(&m).unwrap();
        prop_assert!(s.invariants.iter().all(|d| d.is_positive()));
        prop_assert!(s.invariants.windows(2).all(|w| (&w[1] % &w[0]).is_zero()));
        prop_assert_eq!(s.invariants.len(), m.rank());
    }

    #[test]
    fn sparse_elimination_matches_dense(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 5), 1..6)) {
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let m = ZMatrix::from_i64(&refs);
        let cols = (0..m.cols())
            .map(|j| (0..m.rows()).map(|i| (i as u32, rows[i][j])).collect())
            .collect();
        let sparse = rank_and_torsion(&SparseMatrix::new(m.rows(), cols)).unwrap();
        let dense = invariant_factors(&m);
        prop_assert_eq!(sparse.rank, dense.len());
        let dt: Vec<BigInt> = dense.into_iter().filter(|d| !d.is_one()).collect();
        prop_assert_eq!(prime_power_multiset(&sparse.torsion), prime_power_multiset(&dt));
    }

    #[test]
    fn factorization_round_trips(n in 1u64..u64::MAX) {
        let n = BigUint::from(n);
        let f = factorize(&n);
        prop_assert!(f.keys().all(is_prime));
        prop_assert_eq!(f.iter().fold(BigUint::one(), |acc, (p, &e)| acc * p.pow(e)), n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cobar_squares_to_zero_and_matches_prediction(g in symmetric_strategy(3)) {
        prop_assume!(g.rank() >= 2);
        let space = SpaceModel::two_cell(2, g.clone()).unwrap();
        let rep = verify_loop_homology(&space, 6, DEFAULT_MAX_CELLS).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep.discrepancies);
        let bad = bad_primes(&g).unwrap();
        for row in &rep.rows {
            for t in &row.torsion {
                prop_assert!(bad.iter().any(|p| (t % p).is_zero()));
            }
        }
    }

    #[test]
    fn connected_sum_cobar_is_torsion_free(
        factors in prop::collection::vec((2u32..4, 0u32..1), 1..3),
        signs in prop::collection::vec(any::<bool>(), 2),
    ) {
        let total = 5;
        let factors: Vec<(u32, u32)> = factors.iter().map(|&(p, _)| (p, total - p)).collect();
        let signs: Vec<i8> = signs.iter().take(factors.len()).map(|&s| if s { 1 } else { -1 }).collect();
        let space = SpaceModel::connected_sum(factors, signs).unwrap();
        let cx = build_cobar(&coalgebra_of(&space).unwrap(), 7, DEFAULT_MAX_CELLS).unwrap();
        let rep = homology_report(&cx).unwrap();
        prop_assert!(rep.is_torsion_free());
        prop_assert!(verify_loop_homology(&space, 7, DEFAULT_MAX_CELLS).unwrap().passed());
    }
}
