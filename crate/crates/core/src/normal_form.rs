//! Rewriting modulo one quadratic relation `x_a x_b -> replacement`,
//! irreducible-word bases and their Hilbert series.
//!
//! Leftmost rewriting can revisit a word (the symmetric diagonal case turns
//! `x0 x0 x1` back into a multiple of itself), so reduction collects every
//! reducible word reachable from the input, splits that graph into strongly
//! connected components and solves each cyclic component as a small linear
//! system over the rationals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{integrity, invalid, Error, Result};
use crate::ncalgebra::{Alphabet, Letter, NormalizedRelation, TensorElement, Word};
use crate::series::PowerSeries;

/// Degrees above this keep only counts in [`irreducible_words`].
pub const LIST_DEGREE_LIMIT: u32 = 12;
/// Largest per-degree word list that [`irreducible_words`] materializes.
pub const LIST_SIZE_LIMIT: u128 = 1 << 20;
/// Hard ceiling on the number of distinct reducible words one reduction may visit.
pub const REDUCTION_WORD_LIMIT: usize = 4_000_000;

/// A single rule `x_a x_b -> replacement` over a fixed alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteSystem {
    alphabet: Alphabet,
    forbidden: (Letter, Letter),
    replacement: TensorElement,
}

impl RewriteSystem {
    pub fn new(alphabet: Alphabet, forbidden: (Letter, Letter), replacement: TensorElement) -> Result<Self> {
        let (a, b) = forbidden;
        if a == b || (a as usize) >= alphabet.len() || (b as usize) >= alphabet.len() {
            return Err(invalid("forbidden word must use two distinct letters of the alphabet"));
        }
        let deg = alphabet.degree(a) + alphabet.degree(b);
        if replacement.degree().is_some_and(|d| d != deg) {
            return Err(invalid("replacement has a different degree than the forbidden word"));
        }
        for (w, _) in replacement.terms() {
            if !alphabet.contains_word(w) {
                return Err(invalid("replacement uses a letter outside the alphabet"));
            }
            if w.contains_factor(a, b) {
                return Err(invalid("replacement contains the forbidden word"));
            }
        }
        Ok(RewriteSystem { alphabet, forbidden, replacement })
    }

    /// The associative relation `x0 x1 = f_alg`.
    pub fn from_normalized(nr: &NormalizedRelation) -> Self {
        Self::new(nr.alphabet().clone(), nr.forbidden_pair(), nr.algebra_rewrite().clone())
            .expect("normalized relations satisfy the rule invariants")
    }

    /// The commutator relation `x0 x1 = x1 x0 + lie_tail` of the enveloping algebra.
    pub fn lie_from_normalized(nr: &NormalizedRelation) -> Self {
        let a = nr.alphabet();
        let mut rep = TensorElement::monomial(a, Word::new(vec![1, 0]), BigRational::one());
        rep.add_scaled(nr.lie_tail(), &BigRational::one()).expect("tail has the relation degree");
        Self::new(a.clone(), nr.forbidden_pair(), rep).expect("normalized relations satisfy the rule invariants")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forbidden(&self) -> Word {
        Word::new(vec![self.forbidden.0, self.forbidden.1])
    }

    pub fn forbidden_pair(&self) -> (Letter, Letter) {
        self.forbidden
    }

    pub fn replacement(&self) -> &TensorElement {
        &self.replacement
    }

    pub fn is_irreducible(&self, w: &[Letter]) -> bool {
        !w.windows(2).any(|p| p[0] == self.forbidden.0 && p[1] == self.forbidden.1)
    }

    /// One leftmost rewriting step, as `(word, coefficient)` pairs.
    fn rewrite_once(&self, w: &Word) -> Vec<(Word, BigRational)> {
        let pos = w.find_factor(self.forbidden.0, self.forbidden.1).expect("word is reducible");
        let prefix = &w[..pos];
        let suffix = &w[pos + 2..];
        self.replacement
            .terms()
            .map(|(r, c)| {
                let mut v = Vec::with_capacity(w.len());
                v.extend_from_slice(prefix);
                v.extend_from_slice(r);
                v.extend_from_slice(suffix);
                (Word::new(v), c.clone())
            })
            .collect()
    }
}

/// Normal form modulo the rule: a combination of words without the
/// forbidden factor that is congruent to `e`.
pub fn reduce(e: &TensorElement, rs: &RewriteSystem) -> Result<TensorElement> {
    let mut reducer = Reducer { rs, memo: BTreeMap::new() };
    let mut out = TensorElement::zero();
    for (w, c) in e.terms() {
        if !rs.alphabet.contains_word(w) {
            return Err(invalid("element uses a letter outside the rewriting alphabet"));
        }
        let nf = reducer.normal_form(w)?;
        out.add_scaled(&nf, c)?;
    }
    Ok(out)
}

/// Reduces many elements while sharing the memo of solved words.
pub struct Reducer<'a> {
    rs: &'a RewriteSystem,
    memo: BTreeMap<Word, TensorElement>,
}

impl<'a> Reducer<'a> {
    pub fn new(rs: &'a RewriteSystem) -> Self {
        Reducer { rs, memo: BTreeMap::new() }
    }

    pub fn reduce(&mut self, e: &TensorElement) -> Result<TensorElement> {
        let mut out = TensorElement::zero();
        for (w, c) in e.terms() {
            let nf = self.normal_form(w)?;
            out.add_scaled(&nf, c)?;
        }
        Ok(out)
    }

    pub fn normal_form(&mut self, w: &Word) -> Result<TensorElement> {
        if self.rs.is_irreducible(w) {
            return Ok(TensorElement::monomial(&self.rs.alphabet, w.clone(), BigRational::one()));
        }
        if !self.memo.contains_key(w) {
            self.solve_from(w)?;
        }
        Ok(self.memo[w].clone())
    }

    fn resolve(&self, w: &Word, degree: u32) -> TensorElement {
        if self.rs.is_irreducible(w) {
            let mut e = TensorElement::zero();
            e.add_term_with_degree(w.clone(), BigRational::one(), degree).expect("single term");
            e
        } else {
            self.memo[w].clone()
        }
    }

    fn solve_from(&mut self, root: &Word) -> Result<()> {
        let degree = self.rs.alphabet.word_degree(root);
        let fuel = 4usize.checked_pow(root.len() as u32).unwrap_or(usize::MAX).min(REDUCTION_WORD_LIMIT);

        let mut nodes: Vec<Word> = vec![root.clone()];
        let mut index: BTreeMap<Word, usize> = BTreeMap::new();
        index.insert(root.clone(), 0);
        let mut expansions: Vec<Vec<(Word, BigRational)>> = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut next = 0;
        while next < nodes.len() {
            let terms = self.rs.rewrite_once(&nodes[next]);
            let mut s = Vec::new();
            for (w, _) in &terms {
                if self.rs.is_irreducible(w) || self.memo.contains_key(w) {
                    continue;
                }
                let id = match index.get(w) {
                    Some(&id) => id,
                    None => {
                        if nodes.len() >= fuel {
                            return Err(Error::LimitExceeded(format!(
                                "reduction of a weight-{} word visited more than {fuel} reducible words",
                                root.len()
                            )));
                        }
                        nodes.push(w.clone());
                        index.insert(w.clone(), nodes.len() - 1);
                        nodes.len() - 1
                    }
                };
                s.push(id);
            }
            expansions.push(terms);
            succ.push(s);
            next += 1;
        }

        for component in strongly_connected_components(&succ) {
            let cyclic = component.len() > 1 || succ[component[0]].contains(&component[0]);
            if !cyclic {
                let v = component[0];
                let mut nf = TensorElement::zero();
                for (w, c) in &expansions[v] {
                    nf.add_scaled(&self.resolve(w, degree), c)?;
                }
                self.memo.insert(nodes[v].clone(), nf);
                continue;
            }
            let k = component.len();
            let local: BTreeMap<usize, usize> = component.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            // Row i: N_i - sum_j c_ij N_j = rhs_i.
            let mut rows: Vec<(Vec<BigRational>, TensorElement)> = Vec::with_capacity(k);
            for &v in &component {
                let mut coeffs = vec![BigRational::zero(); k];
                coeffs[local[&v]] += BigRational::one();
                let mut rhs = TensorElement::zero();
                for (w, c) in &expansions[v] {
                    match index.get(w).and_then(|id| local.get(id)) {
                        Some(&j) => coeffs[j] -= c,
                        None => rhs.add_scaled(&self.resolve(w, degree), c)?,
                    }
                }
                rows.push((coeffs, rhs));
            }
            let solution = solve_dense(rows)?;
            for (i, nf) in solution.into_iter().enumerate() {
                self.memo.insert(nodes[component[i]].clone(), nf);
            }
        }
        Ok(())
    }
}

fn solve_dense(mut rows: Vec<(Vec<BigRational>, TensorElement)>) -> Result<Vec<TensorElement>> {
    let k = rows.len();
    for c in 0..k {
        let p = (c..k)
            .find(|&r| !rows[r].0[c].is_zero())
            .ok_or_else(|| integrity("rewriting cycle does not determine a unique normal form"))?;
        rows.swap(p, c);
        let inv = rows[c].0[c].recip();
        rows[c].0.iter_mut().for_each(|x| *x *= &inv);
        rows[c].1 = rows[c].1.scale(&inv);
        let (pivot_coeffs, pivot_rhs) = rows[c].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == c || row.0[c].is_zero() {
                continue;
            }
            let f = -row.0[c].clone();
            for (x, y) in row.0.iter_mut().zip(&pivot_coeffs) {
                if !y.is_zero() {
                    *x += &f * y;
                }
            }
            row.1.add_scaled(&pivot_rhs, &f)?;
        }
    }
    Ok(rows.into_iter().map(|(_, rhs)| rhs).collect())
}

/// Tarjan's algorithm, iterative. Components come out in reverse
/// topological order: every edge leaving a component points to one emitted
/// earlier.
fn strongly_connected_components(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = succ.len();
    let mut order = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for start in 0..n {
        if order[start] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(start, 0)];
        order[start] = counter;
        low[start] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if order[w] == UNSEEN {
                    order[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(order[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == order[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("component root is on the stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Words of one degree: listed when small enough, otherwise only counted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordGroup {
    Listed(Vec<Word>),
    Counted(u128),
}

impl WordGroup {
    pub fn count(&self) -> u128 {
        match self {
            WordGroup::Listed(v) => v.len() as u128,
            WordGroup::Counted(c) => *c,
        }
    }

    pub fn words(&self) -> Option<&[Word]> {
        match self {
            WordGroup::Listed(v) => Some(v),
            WordGroup::Counted(_) => None,
        }
    }
}

fn check_forbidden(alphabet: &Alphabet, forbidden: &Word) -> Result<(Letter, Letter)> {
    match forbidden.letters() {
        &[a, b] if a != b && (a as usize) < alphabet.len() && (b as usize) < alphabet.len() => Ok((a, b)),
        _ => Err(invalid("forbidden word must be two distinct letters of the alphabet")),
    }
}

/// Number of words of each degree `0..=max_degree` avoiding the factor,
/// by dynamic programming over the last letter.
pub fn count_irreducible(alphabet: &Alphabet, forbidden: &Word, max_degree: u32) -> Result<Vec<u128>> {
    let (a, b) = check_forbidden(alphabet, forbidden)?;
    let r = alphabet.len();
    let d_max = max_degree as usize;
    // table[d][l]: words of degree d ending in letter l; slot r is the empty word.
    let mut table = vec![vec![0u128; r + 1]; d_max + 1];
    table[0][r] = 1;
    for d in 0..=d_max {
        for last in 0..=r {
            let c = table[d][last];
            if c == 0 {
                continue;
            }
            for j in 0..r {
                if last == a as usize && j == b as usize {
                    continue;
                }
                let nd = d + alphabet.degree(j as Letter) as usize;
                if nd <= d_max {
                    table[nd][j] = table[nd][j]
                        .checked_add(c)
                        .ok_or_else(|| Error::LimitExceeded(format!("word count overflow at degree {nd}")))?;
                }
            }
        }
    }
    table
        .iter()
        .enumerate()
        .map(|(d, row)| {
            row.iter()
                .try_fold(0u128, |s, &x| s.checked_add(x))
                .ok_or_else(|| Error::LimitExceeded(format!("word count overflow at degree {d}")))
        })
        .collect()
}

/// All words of degree `1..=max_degree` avoiding the factor, grouped by
/// degree and sorted lexicographically. Groups above degree 12 or larger
/// than [`LIST_SIZE_LIMIT`] carry counts only.
pub fn irreducible_words(alphabet: &Alphabet, forbidden: &Word, max_degree: u32) -> Result<BTreeMap<u32, WordGroup>> {
    let (a, b) = check_forbidden(alphabet, forbidden)?;
    let counts = count_irreducible(alphabet, forbidden, max_degree)?;
    let listed: Vec<bool> = counts
        .iter()
        .enumerate()
        .map(|(d, &c)| d <= LIST_DEGREE_LIMIT as usize && c <= LIST_SIZE_LIMIT)
        .collect();
    let list_bound = (1..=max_degree).filter(|&d| listed[d as usize]).max().unwrap_or(0);
    let mut lists: BTreeMap<u32, Vec<Word>> = BTreeMap::new();
    let mut current: Vec<Letter> = Vec::new();
    dfs_words(alphabet, (a, b), list_bound, 0, &mut current, &mut |w, d| {
        if listed[d as usize] {
            lists.entry(d).or_default().push(Word::from(w));
        }
    });
    let mut out = BTreeMap::new();
    for d in 1..=max_degree {
        let group = if listed[d as usize] {
            WordGroup::Listed(lists.remove(&d).unwrap_or_default())
        } else {
            WordGroup::Counted(counts[d as usize])
        };
        out.insert(d, group);
    }
    Ok(out)
}

fn dfs_words(
    alphabet: &Alphabet,
    forbidden: (Letter, Letter),
    bound: u32,
    degree: u32,
    current: &mut Vec<Letter>,
    visit: &mut dyn FnMut(&[Letter], u32),
) {
    for j in 0..alphabet.len() as Letter {
        if current.last() == Some(&forbidden.0) && j == forbidden.1 {
            continue;
        }
        let d = degree + alphabet.degree(j);
        if d > bound {
            continue;
        }
        current.push(j);
        visit(current, d);
        dfs_words(alphabet, forbidden, bound, d, current, visit);
        current.pop();
    }
}

/// Hilbert series of the span of irreducible words, truncated at `max_degree`.
pub fn hilbert_from_enumeration(alphabet: &Alphabet, forbidden: &Word, max_degree: u32) -> Result<PowerSeries> {
    let counts = count_irreducible(alphabet, forbidden, max_degree)?;
    Ok(PowerSeries::from_coeffs(
        counts.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
        max_degree as usize,
    ))
}
