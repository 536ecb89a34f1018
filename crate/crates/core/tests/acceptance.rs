//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use looptop_core::cobar::{build_cobar, coalgebra_of, homology, homology_report, verify_loop_homology};
use looptop_core::linalg::ZMatrix;
use looptop_core::lyndon::count_standard_lyndon;
use looptop_core::ncalgebra::{normalize_relation, relation_from_space};
use looptop_core::normal_form::hilbert_from_enumeration;
use looptop_core::series::{
    growth_rate, manifold_hilbert_series, pbw_match_graded, pbw_match_ungraded, rational_ranks_closed_form,
    sphere_summand_counts, PowerSeries,
};
use looptop_core::spaces::{
    bad_primes, classify_rational, decomposition_report, default_form, pi10_v8, smoothable, Classification, SpaceModel,
};

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>, what: &str) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{what}: {e:?}"))
}

/// Cell budget for the largest complex below: M(2,3) through degree 11.
const ACCEPTANCE_MAX_CELLS: usize = 1_000_000;

fn integer_coeffs(s: &PowerSeries, upto: usize) -> Vec<BigRational> {
    (0..=upto).map(|k| s.coeff(k)).collect()
}

fn uniform_spaces() -> Vec<(u32, u32)> {
    let mut v = Vec::new();
    for n in 2..=5 {
        for r in 2..=6 {
            v.push((n, r));
        }
    }
    v
}

fn manifold_or_cw(n: u32, r: u32) -> SpaceModel {
    if n % 2 == 1 && r % 2 == 1 {
        // No unimodular skew form of odd rank: use a skew cup-product form.
        let mut q = ZMatrix::zeros(r as usize, r as usize);
        for b in 0..(r as usize) / 2 {
            q.set(2 * b, 2 * b + 1, BigInt::from(1));
            q.set(2 * b + 1, 2 * b, BigInt::from(-1));
        }
        q.set(r as usize - 2, r as usize - 1, BigInt::from(1));
        q.set(r as usize - 1, r as usize - 2, BigInt::from(-1));
        SpaceModel::two_cell(n, q).expect("skew form")
    } else {
        SpaceModel::manifold(n, r, None).expect("manifold")
    }
}

fn criterion_1() -> Check {
    let max_len = 12u32;
    for (n, r) in uniform_spaces() {
        let step = n - 1;
        let closed = ok(sphere_summand_counts(n, r, max_len * step + 1), "closed form")?;
        let order = (max_len * step) as usize;
        let h = manifold_hilbert_series(n, r, order);
        let pbw = ok(pbw_match_ungraded(&h, order), "PBW matching")?;
        let space = manifold_or_cw(n, r);
        let (alphabet, rel) = ok(relation_from_space(&space), "relation")?;
        let nr = ok(normalize_relation(&alphabet, &rel), "normalization")?;
        let lyndon = count_standard_lyndon(nr.alphabet(), Some(nr.forbidden_pair()), max_len * step);
        for d in 1..=max_len {
            let c = closed.get(&(d * step + 1)).copied().unwrap_or(0);
            let p = pbw.get(d * step);
            let l = lyndon.get(d * step);
            ensure!(c == p && p == l, "n={n} r={r} d={d}: closed {c}, PBW {p}, Lyndon {l}");
        }
    }
    Ok("20 (n, r) pairs agree through weight 12".into())
}

fn criterion_2() -> Check {
    let mults = |s: &SpaceModel, d: u32| -> std::result::Result<Vec<(u32, u128)>, String> {
        Ok(ok(decomposition_report(s, d), "report")?.summands.iter().map(|x| (x.sphere_dim, x.multiplicity)).collect())
    };
    let m23 = mults(&SpaceModel::manifold(2, 3, None).unwrap(), 4)?;
    ensure!(m23 == [(2, 3), (3, 2), (4, 5)], "M(2,3): {m23:?}");
    let m22 = mults(&SpaceModel::manifold(2, 2, None).unwrap(), 13)?;
    ensure!(m22 == [(2, 2)], "M(2,2): {m22:?}");
    let t = SpaceModel::connected_sum(vec![(2, 3), (2, 3)], vec![1, 1]).unwrap();
    let tt = mults(&t, 4)?;
    ensure!(tt == [(2, 2), (3, 3), (4, 5)], "(S²×S³)#(S²×S³): {tt:?}");
    Ok("M(2,3), M(2,2) and (S²×S³)#(S²×S³) baselines".into())
}

fn criterion_3() -> Check {
    let mut spaces: Vec<(String, SpaceModel)> =
        uniform_spaces().into_iter().map(|(n, r)| (format!("n={n} r={r}"), manifold_or_cw(n, r))).collect();
    for (label, factors) in [
        ("(S²×S³)#(S²×S³)", vec![(2, 3), (2, 3)]),
        ("(S²×S⁴)#(S³×S³)", vec![(2, 4), (3, 3)]),
        ("(S²×S⁵)#(S³×S⁴)#(S²×S⁵)", vec![(2, 5), (3, 4), (2, 5)]),
    ] {
        let signs = vec![1; factors.len()];
        spaces.push((label.into(), SpaceModel::connected_sum(factors, signs).unwrap()));
    }
    for (label, q) in [
        ("X[[0,7],[7,0]]", ZMatrix::from_i64(&[&[0, 7], &[7, 0]])),
        ("X diag(1,1,5)", ZMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 5]])),
        ("X[[2,1,0],[1,2,1],[0,1,2]]", ZMatrix::from_i64(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]])),
    ] {
        spaces.push((label.into(), SpaceModel::two_cell(2, q).unwrap()));
    }
    for (label, space) in &spaces {
        let (alphabet, rel) = ok(relation_from_space(space), "relation")?;
        let nr = ok(normalize_relation(&alphabet, &rel), "normalization")?;
        let max_deg = 12 * alphabet.min_degree();
        let enumerated = ok(hilbert_from_enumeration(nr.alphabet(), &nr.forbidden_word(), max_deg), "enumeration")?;
        let predicted =
            ok(PowerSeries::one_relator_denominator(alphabet.degrees(), nr.relation_degree(), max_deg as usize).inverse(), "inverse")?;
        ensure!(
            integer_coeffs(&enumerated, max_deg as usize) == integer_coeffs(&predicted, max_deg as usize),
            "{label}: irreducible-word counts differ from the Hilbert series"
        );
    }
    Ok(format!("{} spaces agree coefficientwise through word length 12", spaces.len()))
}

fn criterion_4() -> Check {
    let cases = [
        ("M(2,2)", SpaceModel::manifold(2, 2, None).unwrap()),
        ("M(2,3)", SpaceModel::manifold(2, 3, None).unwrap()),
        ("(S²×S³)#(S²×S³)", SpaceModel::connected_sum(vec![(2, 3), (2, 3)], vec![1, 1]).unwrap()),
    ];
    for (label, space) in &cases {
        let rep = ok(verify_loop_homology(space, 11, ACCEPTANCE_MAX_CELLS), label)?;
        ensure!(rep.passed(), "{label}: {:?}", rep.discrepancies);
        ensure!(rep.rows.iter().all(|r| r.predicted == Some(r.rank as u128)), "{label}: ranks not predicted");
        ensure!(rep.rows.iter().all(|r| r.torsion.is_empty()), "{label}: torsion in a unimodular case");
    }
    let unimodular = [
        SpaceModel::manifold(3, 2, None).unwrap(),
        SpaceModel::manifold(4, 3, Some(ZMatrix::from_i64(&[&[1, 0, 0], &[0, -1, 0], &[0, 0, 1]]))).unwrap(),
        SpaceModel::manifold(2, 1, None).unwrap(),
        SpaceModel::connected_sum(vec![(3, 4), (2, 5)], vec![1, -1]).unwrap(),
        SpaceModel::two_cell(2, ZMatrix::from_i64(&[&[2, 1], &[1, 1]])).unwrap(),
    ];
    for space in &unimodular {
        let rep = ok(verify_loop_homology(space, 8, ACCEPTANCE_MAX_CELLS), "unimodular")?;
        ensure!(rep.passed(), "{space:?}: {:?}", rep.discrepancies);
        ensure!(rep.rows.iter().all(|r| r.torsion.is_empty()), "{space:?}: torsion");
    }
    let torsion_at_2 = |q: ZMatrix| -> std::result::Result<Vec<BigUint>, String> {
        let cx = ok(build_cobar(&ok(coalgebra_of(&SpaceModel::two_cell(2, q).unwrap()), "coalgebra")?, 4, ACCEPTANCE_MAX_CELLS), "cobar")?;
        Ok(ok(homology(&cx, 2), "homology")?.torsion)
    };
    for p in [2i64, 3, 5, 7] {
        let hyp = |k: i64| ZMatrix::from_i64(&[&[0, k], &[k, 0]]);
        let t1 = torsion_at_2(hyp(p))?;
        ensure!(t1 == [BigUint::from(p as u64)], "p={p}: p·hyperbolic gives {t1:?}");
        let t2 = torsion_at_2(hyp(p * p))?;
        ensure!(t2 == [BigUint::from((p * p) as u64)], "p={p}: p²·hyperbolic gives {t2:?}");
        let t3 = torsion_at_2(ZMatrix::from_i64(&[&[p * p, 0], &[0, 1]]))?;
        ensure!(t3.is_empty(), "p={p}: diag(p², 1) gives {t3:?}");
    }
    Ok("d∘d = 0, ranks through degree 10, no unimodular torsion, Z/p vs Z/p² and torsion-free vs Z/p at degree 2".into())
}

fn criterion_5() -> Check {
    let cx = ok(build_cobar(&ok(coalgebra_of(&SpaceModel::betti_one(4, 0).unwrap()), "coalgebra")?, 14, ACCEPTANCE_MAX_CELLS), "cobar")?;
    let rep = ok(homology_report(&cx), "homology")?;
    let support: Vec<u32> = rep.degrees.iter().filter(|h| h.rank > 0).map(|h| h.degree).collect();
    ensure!(support == [0, 3, 10, 13], "support {support:?}");
    ensure!(rep.degrees.iter().all(|h| h.rank <= 1 && h.torsion.is_empty()), "ranks above one or torsion");
    for m in 0..12i64 {
        ensure!(pi10_v8(m).is_trivial() == (m % 3 == 1), "pi10 at m={m}: {}", pi10_v8(m));
    }
    let smooth: Vec<i64> = (0..12).filter(|&m| smoothable(4, m).unwrap()).collect();
    ensure!(smooth == [0, 3, 4, 7, 8, 11], "smoothable residues {smooth:?}");
    Ok("homology support {0,3,10,13}; π₁₀ trivial iff m ≡ 1 mod 3; smoothable residues".into())
}

fn criterion_6() -> Check {
    for n in 2..=4 {
        for r in 2..=5 {
            let closed = ok(rational_ranks_closed_form(n, r, 10), "closed form")?;
            let pbw = ok(pbw_match_graded(&manifold_hilbert_series(n, r, 10), 10), "graded PBW")?;
            ensure!(closed == pbw, "n={n} r={r}: closed form and graded matching differ");
        }
    }
    let m = ok(rational_ranks_closed_form(2, 3, 10), "closed form")?;
    ensure!(m.get(1) == 3 && m.get(2) == 5, "m₁={}, m₂={}", m.get(1), m.get(2));
    Ok("closed form equals graded matching for 12 pairs; m₁=3, m₂=5".into())
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> ZMatrix {
    let mut m = ZMatrix::identity(n);
    for _ in 0..12 {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let mut e = ZMatrix::identity(n);
        e.set(i, j, BigInt::from(rng.gen_range(-3i64..=3)));
        m = e.mul(&m);
    }
    m
}

fn criterion_7() -> Check {
    let mut sign_cases = 0;
    for factors in [vec![(2, 3)], vec![(2, 3), (2, 3)], vec![(3, 3), (2, 4)], vec![(2, 5), (3, 4), (2, 5)]] {
        let r = factors.len();
        let mut reports = Vec::new();
        for mask in 0..(1u32 << r) {
            let signs = (0..r).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            let space = SpaceModel::connected_sum(factors.clone(), signs).unwrap();
            reports.push(ok(decomposition_report(&space, 10), "report")?);
            sign_cases += 1;
        }
        ensure!(reports.windows(2).all(|w| w[0] == w[1]), "{factors:?}: reports depend on orientation");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut matrix_cases = 0;
    for (n, r) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 4), (4, 3), (5, 2)] {
        let base = default_form(n, r).unwrap();
        let reference = ok(decomposition_report(&SpaceModel::manifold(n, r, None).unwrap(), 10), "report")?;
        let mut forms = vec![base.clone()];
        for attempt in 0..200 {
            let mut u = random_unimodular(&mut rng, r as usize);
            if attempt % 2 == 1 {
                let mut flip = ZMatrix::identity(r as usize);
                flip.set(0, 0, BigInt::from(-1));
                u = flip.mul(&u);
            }
            let m = u.mul(&base).mul(&u.transpose());
            if !forms.contains(&m) {
                forms.push(m);
            }
        }
        // A rank-two skew unimodular form is J or -J.
        let needed = if n % 2 == 1 && r == 2 { 2 } else { 3 };
        ensure!(forms.len() >= needed, "n={n} r={r}: only {} distinct forms", forms.len());
        for m in forms {
            let rep = ok(decomposition_report(&SpaceModel::manifold(n, r, Some(m.clone())).unwrap(), 10), "report")?;
            ensure!(rep == reference, "n={n} r={r}: report differs for {m:?}");
            matrix_cases += 1;
        }
    }
    let forms = [
        ZMatrix::from_i64(&[&[0, 7], &[7, 0]]),
        ZMatrix::from_i64(&[&[0, 6, 0], &[6, 0, 0], &[0, 0, 0]]),
        ZMatrix::from_i64(&[&[4, 2, 0], &[2, 10, 6], &[0, 6, 12]]),
    ];
    for q in &forms {
        let expected = ok(bad_primes(q), "bad primes")?;
        for _ in 0..20 {
            let u = random_unimodular(&mut rng, q.rows());
            let v = random_unimodular(&mut rng, q.rows());
            let t = u.mul(q).mul(&v.transpose());
            ensure!(ok(bad_primes(&t), "bad primes")? == expected, "bad primes changed for {t:?}");
        }
    }
    Ok(format!("{sign_cases} sign vectors, {matrix_cases} distinct unimodular forms, 60 equivalences for bad primes"))
}

fn criterion_8() -> Check {
    for (n, r) in uniform_spaces() {
        if n % 2 == 1 && r % 2 == 1 {
            continue;
        }
        let (c, _) = ok(classify_rational(&SpaceModel::manifold(n, r, None).unwrap()), "classify")?;
        let expected = if r <= 2 { Classification::Elliptic } else { Classification::Hyperbolic };
        ensure!(c == expected, "manifold n={n} r={r}: {c:?}");
    }
    for k in 1..=4 {
        let space = SpaceModel::connected_sum(vec![(2, 3); k], vec![1; k]).unwrap();
        let (c, _) = ok(classify_rational(&space), "classify")?;
        let expected = if k == 1 { Classification::Elliptic } else { Classification::Hyperbolic };
        ensure!(c == expected, "connected sum of {k}: {c:?}");
    }
    let g = ok(growth_rate(3), "growth")?;
    let target = BigRational::new(BigInt::from(26180), BigInt::from(10000));
    let tol = BigRational::new(BigInt::from(1), BigInt::from(1000));
    let lo_ok = &g.lower - &target < tol && &target - &g.lower < tol;
    let hi_ok = &g.upper - &target < tol && &target - &g.upper < tol;
    ensure!(lo_ok && hi_ok && g.lower < g.upper, "growth enclosure [{}, {}]", g.lower, g.upper);
    Ok(format!("classification rules hold; growth_rate(3) = {} ≈ {}", g.symbolic(), g.decimal(6)))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 8] = [
        ("1 three-pipeline agreement", criterion_1),
        ("2 derived baselines", criterion_2),
        ("3 Hilbert bridge", criterion_3),
        ("4 cobar oracle", criterion_4),
        ("5 Betti-one cases", criterion_5),
        ("6 rational ranks", criterion_6),
        ("7 invariance suites", criterion_7),
        ("8 classification", criterion_8),
    ];
    let mut failures = BTreeMap::new();
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                println!("FAIL criterion {name} ({secs:.1}s): {why}");
                failures.insert(name, why);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
