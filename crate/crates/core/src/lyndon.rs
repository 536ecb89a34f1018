//! Lyndon words, standard factorization, bracketing, and the basis of the
//! one-relator Lie algebra given by Lyndon words avoiding `x0 x1`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::One;

use crate::error::{integrity, invalid, Error, Result};
use crate::ncalgebra::{Alphabet, Letter, NormalizedRelation, TensorElement, Word};
use crate::series::{log_lambda_coefficients, moebius_invert_dims, pbw_match_ungraded, DimensionTable, PowerSeries};

/// Largest number of basis elements [`lie_basis`] will expand into brackets.
pub const LIE_BASIS_LIMIT: u128 = 50_000;

pub fn is_lyndon(w: &[Letter]) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    (1..n).all(|i| {
        let rotated = w[i..].iter().chain(&w[..i]);
        w.iter().lt(rotated)
    })
}

/// A word certified to be Lyndon.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LyndonWord(Word);

impl LyndonWord {
    pub fn new(w: Word) -> Result<Self> {
        if is_lyndon(&w) {
            Ok(LyndonWord(w))
        } else {
            Err(invalid(format!("{} is not a Lyndon word", w.to_digits())))
        }
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// All Lyndon words of degree `<= max_degree`, by Duval's successor rule on
/// lengths up to `max_degree / min letter degree`, grouped by degree.
pub fn generate_lyndon(alphabet: &Alphabet, max_degree: u32) -> Result<BTreeMap<u32, Vec<LyndonWord>>> {
    if max_degree < 1 {
        return Err(invalid("max degree must be at least 1"));
    }
    let k = alphabet.len() as Letter;
    let max_len = (max_degree / alphabet.min_degree()) as usize;
    let mut out: BTreeMap<u32, Vec<LyndonWord>> = BTreeMap::new();
    if max_len == 0 {
        return Ok(out);
    }
    let mut w: Vec<Letter> = alloc::vec![0];
    loop {
        let d = alphabet.word_degree(&w);
        if d <= max_degree {
            out.entry(d).or_default().push(LyndonWord(Word::from(&w[..])));
        }
        let m = w.len();
        while w.len() < max_len {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&(k - 1)) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    Ok(out)
}

/// `l = l1 l2` with `l2` the longest proper Lyndon suffix.
pub fn standard_factorization(l: &LyndonWord) -> Result<(LyndonWord, LyndonWord)> {
    let w = l.word();
    if w.len() < 2 {
        return Err(invalid("a single letter has no standard factorization"));
    }
    let i = (1..w.len()).find(|&i| is_lyndon(&w[i..])).expect("the last letter is a Lyndon suffix");
    Ok((LyndonWord(Word::from(&w[..i])), LyndonWord(Word::from(&w[i..]))))
}

/// Expansion of the nested commutator `b(l)` in the tensor algebra.
pub fn bracket_expand(l: &LyndonWord, alphabet: &Alphabet) -> Result<TensorElement> {
    if !alphabet.contains_word(l.word()) {
        return Err(invalid("Lyndon word uses a letter outside the alphabet"));
    }
    Ok(expand(l, alphabet))
}

fn expand(l: &LyndonWord, alphabet: &Alphabet) -> TensorElement {
    if l.len() == 1 {
        return TensorElement::monomial(alphabet, l.word().clone(), BigRational::one());
    }
    let (a, b) = standard_factorization(l).expect("length >= 2");
    expand(&a, alphabet).commutator(&expand(&b, alphabet))
}

/// Nested-bracket string of `l`, such as `[α₁,[α₁,α₂]]`.
pub fn bracket_string(l: &LyndonWord, name: &dyn Fn(Letter) -> String) -> String {
    if l.len() == 1 {
        return name(l.word()[0]);
    }
    let (a, b) = standard_factorization(l).expect("length >= 2");
    format!("[{},{}]", bracket_string(&a, name), bracket_string(&b, name))
}

/// Visits every Lyndon word of degree `<= max_degree` that avoids the factor
/// `forbidden`, in lexicographic order, by extending prenecklaces and
/// pruning any prefix that already contains the factor.
pub fn for_each_standard_lyndon(
    alphabet: &Alphabet,
    forbidden: Option<(Letter, Letter)>,
    max_degree: u32,
    visit: &mut dyn FnMut(&[Letter], u32),
) {
    let mut a: Vec<Letter> = Vec::new();
    for j in 0..alphabet.len() as Letter {
        let d = alphabet.degree(j);
        if d > max_degree {
            continue;
        }
        a.push(j);
        extend_prenecklace(alphabet, forbidden, max_degree, &mut a, 1, d, visit);
        a.pop();
    }
}

fn extend_prenecklace(
    alphabet: &Alphabet,
    forbidden: Option<(Letter, Letter)>,
    max_degree: u32,
    a: &mut Vec<Letter>,
    period: usize,
    degree: u32,
    visit: &mut dyn FnMut(&[Letter], u32),
) {
    let t = a.len();
    if period == t {
        visit(a, degree);
    }
    let start = a[t - period];
    let last = a[t - 1];
    for j in start..alphabet.len() as Letter {
        if forbidden == Some((last, j)) {
            continue;
        }
        let d = degree + alphabet.degree(j);
        if d > max_degree {
            continue;
        }
        a.push(j);
        let p = if j == start { period } else { t + 1 };
        extend_prenecklace(alphabet, forbidden, max_degree, a, p, d, visit);
        a.pop();
    }
}

/// Lyndon words avoiding `forbidden`, grouped by degree and lex-sorted.
pub fn standard_lyndon_words(
    alphabet: &Alphabet,
    forbidden: Option<(Letter, Letter)>,
    max_degree: u32,
) -> BTreeMap<u32, Vec<LyndonWord>> {
    let mut out: BTreeMap<u32, Vec<LyndonWord>> = BTreeMap::new();
    for_each_standard_lyndon(alphabet, forbidden, max_degree, &mut |w, d| {
        out.entry(d).or_default().push(LyndonWord(Word::from(w)));
    });
    out
}

/// Number of Lyndon words avoiding `forbidden` at each degree `1..=max_degree`.
pub fn count_standard_lyndon(alphabet: &Alphabet, forbidden: Option<(Letter, Letter)>, max_degree: u32) -> DimensionTable {
    let mut table = DimensionTable::new(max_degree);
    let mut counts = alloc::vec![0u128; max_degree as usize + 1];
    for_each_standard_lyndon(alphabet, forbidden, max_degree, &mut |_, d| counts[d as usize] += 1);
    for d in 1..=max_degree {
        table.set(d, counts[d as usize]);
    }
    table
}

/// Ranks of the one-relator Lie algebra from its Hilbert series, by both
/// logarithmic Möbius inversion and ungraded coefficient matching.
pub fn lie_ranks_from_series(alphabet: &Alphabet, relation_degree: u32, max_degree: u32) -> Result<DimensionTable> {
    let order = max_degree as usize;
    let denom = PowerSeries::one_relator_denominator(alphabet.degrees(), relation_degree, order);
    let by_log = moebius_invert_dims(&log_lambda_coefficients(&denom, order)?, order)?;
    let by_pbw = pbw_match_ungraded(&denom.inverse()?, order)?;
    if by_log != by_pbw {
        return Err(integrity("logarithmic inversion and coefficient matching disagree"));
    }
    Ok(by_log)
}

/// A standard Lyndon word with its bracket expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieBasisElement {
    pub lyndon: LyndonWord,
    pub bracket: TensorElement,
    pub degree: u32,
}

/// Basis of the Lie algebra presented by the normalized relation: brackets
/// of Lyndon words avoiding `x0 x1`. Per-degree counts are checked against
/// the series pipelines.
pub fn lie_basis(nr: &NormalizedRelation, max_degree: u32) -> Result<BTreeMap<u32, Vec<LieBasisElement>>> {
    if nr.lie_tail().terms().any(|(w, _)| w.iter().any(|&l| l < 2)) {
        return Err(invalid("Lie tail involves the eliminated letters"));
    }
    let alphabet = nr.alphabet();
    let counts = count_standard_lyndon(alphabet, Some(nr.forbidden_pair()), max_degree);
    if counts.total() > LIE_BASIS_LIMIT {
        return Err(Error::LimitExceeded(format!(
            "Lie basis through degree {max_degree} has {} elements (limit {LIE_BASIS_LIMIT})",
            counts.total()
        )));
    }
    check_counts(&counts, &lie_ranks_from_series(alphabet, nr.relation_degree(), max_degree)?)?;
    let words = standard_lyndon_words(alphabet, Some(nr.forbidden_pair()), max_degree);
    let mut out = BTreeMap::new();
    for (d, list) in words {
        let elements = list
            .into_iter()
            .map(|l| LieBasisElement { bracket: expand(&l, alphabet), lyndon: l, degree: d })
            .collect();
        out.insert(d, elements);
    }
    Ok(out)
}

pub(crate) fn check_counts(enumerated: &DimensionTable, series: &DimensionTable) -> Result<()> {
    for (d, v) in series.iter() {
        if enumerated.get(d) != v {
            return Err(integrity(format!(
                "Lyndon enumeration gives {} basis elements at degree {d}, series pipelines give {v}",
                enumerated.get(d)
            )));
        }
    }
    Ok(())
}
