//! Space models and everything reported about them: bad primes, sphere
//! decompositions, the Betti-one special cases, rational classification and
//! exponent verdicts.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{integrity, invalid, Error, Result};
use crate::linalg::ZMatrix;
use crate::lyndon::{bracket_string, lie_ranks_from_series, standard_lyndon_words};
use crate::ncalgebra::{normalize_relation, relation_from_space, Letter};
use crate::primes::prime_divisors;
use crate::series::{growth_rate, rational_ranks_closed_form, sphere_summand_counts, QuadraticSurd};
use crate::snf::invariant_factors;

/// The four families of spaces handled by the engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceModel {
    /// Closed `(n-1)`-connected `2n`-manifold with middle Betti number `r`.
    Manifold { n: u32, r: u32, matrix: Option<ZMatrix> },
    /// `#_i (S^{p_i} x S^{q_i})` with orientation signs.
    ConnectedSum { factors: Vec<(u32, u32)>, signs: Vec<i8> },
    /// `(vee_r S^n) cup e^{2n}` with cup-product form `q`.
    TwoCellComplex { n: u32, r: u32, q: ZMatrix },
    /// Rank-one middle homology in dimension `2n`, `n` in {2, 4, 8}, with
    /// attaching-map parameter `m`.
    BettiOne { n: u32, m: i64 },
}

impl SpaceModel {
    pub fn manifold(n: u32, r: u32, matrix: Option<ZMatrix>) -> Result<Self> {
        let s = SpaceModel::Manifold { n, r, matrix };
        s.validate()?;
        Ok(s)
    }

    pub fn connected_sum(factors: Vec<(u32, u32)>, signs: Vec<i8>) -> Result<Self> {
        let s = SpaceModel::ConnectedSum { factors, signs };
        s.validate()?;
        Ok(s)
    }

    pub fn two_cell(n: u32, q: ZMatrix) -> Result<Self> {
        let s = SpaceModel::TwoCellComplex { n, r: q.rows() as u32, q };
        s.validate()?;
        Ok(s)
    }

    /// `m` is reduced mod 12 for `n = 4`, mod 120 for `n = 8`, and ignored for `n = 2`.
    pub fn betti_one(n: u32, m: i64) -> Result<Self> {
        let m = match n {
            2 => 0,
            4 => m.rem_euclid(12),
            8 => m.rem_euclid(120),
            _ => return Err(invalid("Betti-one models exist only for n in {2, 4, 8}")),
        };
        Ok(SpaceModel::BettiOne { n, m })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceModel::Manifold { n, r, matrix } => {
                if *n < 2 {
                    return Err(invalid("manifold needs n >= 2"));
                }
                if *r < 1 {
                    return Err(invalid("manifold needs r >= 1"));
                }
                if *r == 1 && ![2, 4, 8].contains(n) {
                    return Err(invalid(format!(
                        "a single middle class needs a Hopf invariant one element; n = {n} is not 2, 4 or 8"
                    )));
                }
                if n % 2 == 1 && r % 2 == 1 {
                    return Err(invalid("a skew-symmetric unimodular form needs even rank; r is odd"));
                }
                if let Some(m) = matrix {
                    check_form(m, *n, *r as usize)?;
                    let det = m.determinant().expect("square");
                    if !det.abs().is_one() {
                        return Err(invalid(format!("intersection form must be unimodular; determinant is {det}")));
                    }
                }
                Ok(())
            }
            SpaceModel::ConnectedSum { factors, signs } => {
                if factors.is_empty() {
                    return Err(invalid("connected sum needs at least one factor"));
                }
                if factors.iter().any(|&(p, q)| p < 2 || q < 2) {
                    return Err(invalid("sphere dimensions must be at least 2"));
                }
                let n = factors[0].0 + factors[0].1;
                if factors.iter().any(|&(p, q)| p + q != n) {
                    return Err(invalid("all factors must have the same total dimension"));
                }
                if signs.len() != factors.len() {
                    return Err(invalid("need exactly one orientation sign per factor"));
                }
                if signs.iter().any(|&e| e != 1 && e != -1) {
                    return Err(invalid("orientation signs must be +1 or -1"));
                }
                Ok(())
            }
            SpaceModel::TwoCellComplex { n, r, q } => {
                if *n < 2 {
                    return Err(invalid("two-cell complex needs n >= 2"));
                }
                if *r < 1 {
                    return Err(invalid("two-cell complex needs r >= 1"));
                }
                check_form(q, *n, *r as usize)
            }
            SpaceModel::BettiOne { n, .. } => {
                if ![2, 4, 8].contains(n) {
                    return Err(invalid("Betti-one models exist only for n in {2, 4, 8}"));
                }
                Ok(())
            }
        }
    }

    /// Middle dimension `n` (half the top dimension).
    pub fn middle_dimension(&self) -> u32 {
        match self {
            SpaceModel::Manifold { n, .. } | SpaceModel::TwoCellComplex { n, .. } | SpaceModel::BettiOne { n, .. } => *n,
            SpaceModel::ConnectedSum { factors, .. } => (factors[0].0 + factors[0].1) / 2,
        }
    }

    /// Rank of middle homology (`2r` cells for a connected sum of `r` factors
    /// counts as `r` factors here).
    pub fn rank(&self) -> u32 {
        match self {
            SpaceModel::Manifold { r, .. } | SpaceModel::TwoCellComplex { r, .. } => *r,
            SpaceModel::ConnectedSum { factors, .. } => factors.len() as u32,
            SpaceModel::BettiOne { .. } => 1,
        }
    }

    /// The explicit form, or the default unimodular representative.
    pub fn intersection_matrix(&self) -> Result<ZMatrix> {
        match self {
            SpaceModel::Manifold { n, r, matrix } => Ok(match matrix {
                Some(m) => m.clone(),
                None => default_form(*n, *r)?,
            }),
            SpaceModel::TwoCellComplex { q, .. } => Ok(q.clone()),
            SpaceModel::BettiOne { .. } => Ok(ZMatrix::from_i64(&[&[1]])),
            SpaceModel::ConnectedSum { factors, signs } => {
                let k = 2 * factors.len();
                let mut m = ZMatrix::zeros(k, k);
                for (i, &e) in signs.iter().enumerate() {
                    let (p, q) = factors[i];
                    m.set(2 * i, 2 * i + 1, BigInt::from(e));
                    let back = if (p * q) % 2 == 0 { e } else { -e };
                    m.set(2 * i + 1, 2 * i, BigInt::from(back));
                }
                Ok(m)
            }
        }
    }
}

fn check_form(m: &ZMatrix, n: u32, r: usize) -> Result<()> {
    if m.rows() != r || m.cols() != r {
        return Err(invalid(format!("form must be {r}x{r}, got {}x{}", m.rows(), m.cols())));
    }
    if n.is_multiple_of(2) && !m.is_symmetric() {
        return Err(invalid("form must be symmetric when n is even"));
    }
    if n % 2 == 1 && !m.is_skew() {
        return Err(invalid("form must be skew-symmetric when n is odd"));
    }
    Ok(())
}

/// Symplectic blocks for odd `n`; hyperbolic blocks plus `<1>` for even `n`.
pub fn default_form(n: u32, r: u32) -> Result<ZMatrix> {
    let r = r as usize;
    let mut m = ZMatrix::zeros(r, r);
    if n % 2 == 1 {
        if r % 2 == 1 {
            return Err(invalid("a skew-symmetric unimodular form needs even rank"));
        }
        for b in 0..r / 2 {
            m.set(2 * b, 2 * b + 1, BigInt::one());
            m.set(2 * b + 1, 2 * b, -BigInt::one());
        }
    } else {
        for b in 0..r / 2 {
            m.set(2 * b, 2 * b + 1, BigInt::one());
            m.set(2 * b + 1, 2 * b, BigInt::one());
        }
        if r % 2 == 1 {
            m.set(r - 1, r - 1, BigInt::one());
        }
    }
    Ok(m)
}


/// Primes modulo which the form drops below rank two: the prime divisors
/// of the gcd of its 2x2 minors.
pub fn bad_primes(q: &ZMatrix) -> Result<Vec<BigUint>> {
    let g = q.minor2_gcd();
    if g.is_zero() {
        return Err(Error::Unsupported("form has rank below two; every prime would be bad".into()));
    }
    Ok(prime_divisors(g.magnitude()))
}

pub(crate) fn subscript(i: usize) -> String {
    i.to_string().chars().map(|c| char::from_u32(0x2080 + c.to_digit(10).expect("digit")).expect("subscript")).collect()
}

pub(crate) fn superscript(i: u128) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    i.to_string().chars().map(|c| SUP[c.to_digit(10).expect("digit") as usize]).collect()
}

/// Largest multiplicity for which witness brackets are listed.
pub const WITNESS_LIMIT: u128 = 64;

/// Largest number of Lyndon words enumerated for witnesses in one report.
const WITNESS_TOTAL_LIMIT: u128 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Classification {
    Elliptic,
    Hyperbolic,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Elliptic => "elliptic",
            Classification::Hyperbolic => "hyperbolic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MooreVerdict {
    EllipticFiniteExponents,
    HyperbolicNoExponentAllPrimes,
    HyperbolicUnboundedCofinitePrimes,
}

impl MooreVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            MooreVerdict::EllipticFiniteExponents => "elliptic-with-finite-exponents",
            MooreVerdict::HyperbolicNoExponentAllPrimes => "hyperbolic-no-exponent-all-primes",
            MooreVerdict::HyperbolicUnboundedCofinitePrimes => "hyperbolic-unbounded-cofinite-primes",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreReport {
    pub verdict: MooreVerdict,
    pub justification: String,
    pub caveat: Option<String>,
}

/// `multiplicity` copies of `pi_* S^sphere_dim`, with one bracket string per
/// copy when `witnesses` is nonempty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub sphere_dim: u32,
    pub multiplicity: u128,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionReport {
    pub max_dimension: u32,
    pub summands: Vec<Summand>,
    pub inverted_primes: Vec<BigUint>,
    pub classification: Classification,
    pub growth: Option<QuadraticSurd>,
    pub loop_decomposition: String,
    pub notes: Vec<String>,
    pub moore: MooreReport,
}

/// Rational type of the space, with a caveat when the answer rests on a
/// finite window rather than a closed-form criterion.
pub fn classify_rational(space: &SpaceModel) -> Result<(Classification, Option<String>)> {
    space.validate()?;
    let c = |e: bool| if e { Classification::Elliptic } else { Classification::Hyperbolic };
    Ok(match space {
        SpaceModel::Manifold { r, .. } => (c(*r <= 2), None),
        SpaceModel::ConnectedSum { factors, .. } => (c(factors.len() == 1), None),
        SpaceModel::BettiOne { .. } => (Classification::Elliptic, None),
        SpaceModel::TwoCellComplex { n, r, q } => {
            if *r >= 3 {
                (Classification::Hyperbolic, None)
            } else if q.rank() == *r as usize {
                if *r == 1 {
                    (Classification::Elliptic, None)
                } else {
                    let window = 6 * n;
                    let ranks = rational_ranks_closed_form(*n, 2, window as usize)?;
                    let finite = ranks.iter().all(|(d, v)| v == 0 || d < 2 * n);
                    let caveat = format!("rational homotopy ranks checked through degree {window} only");
                    (c(finite), Some(caveat))
                }
            } else {
                (Classification::Hyperbolic, Some("form is degenerate; the complex is rationally a wedge".into()))
            }
        }
    })
}

pub fn moore_report(space: &SpaceModel) -> Result<MooreReport> {
    let (class, caveat) = classify_rational(space)?;
    let (verdict, justification) = match (class, space) {
        (Classification::Elliptic, _) => (
            MooreVerdict::EllipticFiniteExponents,
            "rationally elliptic, and the homotopy groups have a finite p-exponent for every prime p".to_string(),
        ),
        (Classification::Hyperbolic, SpaceModel::TwoCellComplex { .. }) => (
            MooreVerdict::HyperbolicUnboundedCofinitePrimes,
            "rationally hyperbolic, with unbounded p-primary torsion in homotopy for all but finitely many primes p".to_string(),
        ),
        (Classification::Hyperbolic, _) => (
            MooreVerdict::HyperbolicNoExponentAllPrimes,
            "rationally hyperbolic; the loop space splits into loop spaces of infinitely many spheres of growing dimension, so no prime has a finite homotopy exponent".to_string(),
        ),
    };
    Ok(MooreReport { verdict, justification, caveat })
}

fn letter_names(space: &SpaceModel) -> impl Fn(Letter) -> String {
    let csum = matches!(space, SpaceModel::ConnectedSum { .. });
    move |l: Letter| {
        let l = l as usize;
        if csum {
            format!("{}{}", if l.is_multiple_of(2) { "α" } else { "β" }, subscript(l / 2 + 1))
        } else {
            format!("α{}", subscript(l + 1))
        }
    }
}

fn space_letter(space: &SpaceModel) -> &'static str {
    match space {
        SpaceModel::Manifold { .. } => "M",
        SpaceModel::ConnectedSum { .. } => "T",
        SpaceModel::TwoCellComplex { .. } => "X",
        SpaceModel::BettiOne { .. } => "V",
    }
}

fn product_text(summands: &[Summand], infinite: bool) -> String {
    let mut parts: Vec<String> = summands
        .iter()
        .map(|s| {
            let base = format!("ΩS{}", superscript(s.sphere_dim as u128));
            if s.multiplicity == 1 {
                base
            } else {
                format!("({base}){}", superscript(s.multiplicity))
            }
        })
        .collect();
    if infinite {
        parts.push("⋯".into());
    }
    if parts.is_empty() {
        parts.push("*".into());
    }
    parts.join(" × ")
}

/// Sphere summands of the homotopy groups through dimension `max_dim`.
pub fn decomposition_report(space: &SpaceModel, max_dim: u32) -> Result<DecompositionReport> {
    space.validate()?;
    match space {
        SpaceModel::BettiOne { n, m } => return betti_one_report(*n, *m),
        SpaceModel::Manifold { n, r: 1, .. } => {
            return if *n == 2 {
                betti_one_report(2, 0)
            } else {
                Err(Error::Unsupported(format!(
                    "a single middle class with n = {n} depends on the attaching map; use the Betti-one model with its parameter m"
                )))
            };
        }
        _ => {}
    }
    let (alphabet, rel) = relation_from_space(space)?;
    let nr = normalize_relation(&alphabet, &rel)?;
    let lie_max = max_dim.saturating_sub(1);

    let counts: BTreeMap<u32, u128> = match space {
        SpaceModel::Manifold { n, r, .. } | SpaceModel::TwoCellComplex { n, r, .. } => sphere_summand_counts(*n, *r, max_dim)?,
        _ => {
            if lie_max == 0 {
                BTreeMap::new()
            } else {
                lie_ranks_from_series(nr.alphabet(), nr.relation_degree(), lie_max)?.iter().map(|(d, v)| (d + 1, v)).collect()
            }
        }
    };

    let mut enum_max = 0;
    let mut running = 0u128;
    for (&dim, &mult) in &counts {
        if mult > WITNESS_LIMIT || running + mult > WITNESS_TOTAL_LIMIT {
            break;
        }
        running += mult;
        enum_max = dim - 1;
    }
    let words = if enum_max > 0 {
        standard_lyndon_words(nr.alphabet(), Some(nr.forbidden_pair()), enum_max)
    } else {
        BTreeMap::new()
    };
    let names = letter_names(space);
    let mut summands = Vec::new();
    for (&dim, &mult) in &counts {
        if mult == 0 {
            continue;
        }
        let mut witnesses = Vec::new();
        if dim - 1 <= enum_max {
            let ws = words.get(&(dim - 1)).map(Vec::as_slice).unwrap_or(&[]);
            if ws.len() as u128 != mult {
                return Err(integrity(format!(
                    "Lyndon enumeration gives {} summands in dimension {dim}, series give {mult}",
                    ws.len()
                )));
            }
            witnesses = ws.iter().map(|l| bracket_string(l, &names)).collect();
        }
        summands.push(Summand { sphere_dim: dim, multiplicity: mult, witnesses });
    }

    let inverted_primes = match space {
        SpaceModel::TwoCellComplex { q, .. } => bad_primes(q)?,
        _ => Vec::new(),
    };
    let (classification, caveat) = classify_rational(space)?;
    let growth = match space {
        SpaceModel::Manifold { r, .. } | SpaceModel::TwoCellComplex { r, .. } if *r >= 3 => Some(growth_rate(*r)?),
        _ => None,
    };
    let mut text = format!(
        "Ω{} ≃ {}",
        space_letter(space),
        product_text(&summands, classification == Classification::Hyperbolic)
    );
    if !inverted_primes.is_empty() {
        let ps: Vec<String> = inverted_primes.iter().map(|p| p.to_string()).collect();
        text.push_str(&format!(" after localizing away from {}", ps.join(", ")));
    }
    let mut notes = Vec::new();
    if classification == Classification::Hyperbolic {
        notes.push(format!("infinitely many sphere summands; listed through dimension {max_dim}"));
    }
    if summands.iter().any(|s| s.witnesses.is_empty()) {
        notes.push(format!("witness brackets listed only for multiplicities up to {WITNESS_LIMIT}"));
    }
    notes.push("witness brackets are determined up to sign".into());
    if let Some(c) = &caveat {
        notes.push(c.clone());
    }
    Ok(DecompositionReport {
        max_dimension: max_dim,
        summands,
        inverted_primes,
        classification,
        growth,
        loop_decomposition: text,
        notes,
        moore: moore_report(space)?,
    })
}

/// Homotopy decomposition of the rank-one manifolds in dimensions 4, 8, 16.
pub fn betti_one_report(n: u32, m: i64) -> Result<DecompositionReport> {
    let space = SpaceModel::betti_one(n, m)?;
    let SpaceModel::BettiOne { m, .. } = space else { unreachable!() };
    let top = 3 * n - 1;
    let mut notes = Vec::new();
    let inverted: Vec<u32> = match n {
        2 => {
            notes.push("π₂ = Z and π_k ≅ π_k S⁵ for k ≥ 3".into());
            Vec::new()
        }
        4 => {
            let pi10 = pi10_v8(m);
            if pi10.is_trivial() {
                notes.push(format!(
                    "π₁₀ = 0 for m ≡ {} mod 3, so the splitting holds only after inverting 3; it fails integrally",
                    m.rem_euclid(3)
                ));
                vec![3]
            } else {
                notes.push(format!("π₁₀ = {pi10}; the splitting holds integrally"));
                Vec::new()
            }
        }
        _ => vec![2, 3],
    };
    let inverted_primes: Vec<BigUint> = inverted.iter().map(|&p| BigUint::from(p)).collect();
    let mut text = format!(
        "ΩV ≃ S{} × ΩS{}",
        superscript((n - 1) as u128),
        superscript(top as u128)
    );
    if !inverted.is_empty() {
        let ps: Vec<String> = inverted.iter().map(|p| p.to_string()).collect();
        text.push_str(&format!(" after localizing away from {}", ps.join(", ")));
    }
    Ok(DecompositionReport {
        max_dimension: top,
        summands: vec![Summand { sphere_dim: top, multiplicity: 1, witnesses: Vec::new() }],
        inverted_primes,
        classification: Classification::Elliptic,
        growth: None,
        loop_decomposition: text,
        notes,
        moore: moore_report(&space)?,
    })
}

/// A finite abelian group by its invariant factors greater than one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    pub invariants: Vec<BigUint>,
}

impl FiniteAbelianGroup {
    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }

    pub fn order(&self) -> BigUint {
        self.invariants.iter().fold(BigUint::one(), |a, b| a * b)
    }
}

impl core::fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.invariants.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.invariants.iter().map(|d| format!("Z/{d}")).collect();
        f.write_str(&parts.join(" ⊕ "))
    }
}

/// `(Z/24 ⊕ Z/3) / <(1, -m), (1 + 2m, m)>`.
pub fn pi10_v8(m: i64) -> FiniteAbelianGroup {
    let m = BigInt::from(m);
    let one = BigInt::one();
    let rows = vec![
        vec![one.clone(), -m.clone()],
        vec![&one + BigInt::from(2) * &m, m],
        vec![BigInt::from(24), BigInt::zero()],
        vec![BigInt::zero(), BigInt::from(3)],
    ];
    let pres = ZMatrix::from_rows(rows).expect("rectangular");
    let mut inv: Vec<BigUint> = invariant_factors(&pres).into_iter().filter(|d| !d.is_one()).map(|d| d.magnitude().clone()).collect();
    inv.sort();
    FiniteAbelianGroup { invariants: inv }
}

/// Whether the rank-one `2n`-manifold with parameter `m` admits a smooth
/// structure.
pub fn smoothable(n: u32, m: i64) -> Result<bool> {
    let modulus: i128 = match n {
        4 => 4,
        8 => 8,
        _ => return Err(invalid("smoothability is defined only for n in {4, 8}")),
    };
    let m = m as i128;
    Ok((m * (m + 1)).rem_euclid(modulus) == 0)
}

/// Middle Betti number of the universal cover when the fundamental group
/// has order `l` and the middle Betti number is `r`.
pub fn finite_pi1_betti(l: u64, r: u64) -> Result<u64> {
    if l < 1 {
        return Err(invalid("group order must be at least 1"));
    }
    l.checked_mul(r + 2).and_then(|v| v.checked_sub(2)).ok_or_else(|| Error::LimitExceeded("Betti number overflows".into()))
}
