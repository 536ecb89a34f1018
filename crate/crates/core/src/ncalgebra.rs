//! Words over a graded alphabet, sparse tensor-algebra elements, quadratic
//! relations coming from intersection forms, and their normalization to the
//! shape `x0 x1 = (terms without the word x0 x1)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{integrity, invalid, Error, Result};
use crate::linalg::{q, QMatrix, ZMatrix};
use crate::spaces::SpaceModel;

pub type Letter = u16;

/// Ordered letters with positive degrees; letter `i` is the `i`-th entry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    degrees: Vec<u32>,
}

impl Alphabet {
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(invalid("alphabet must have at least one letter"));
        }
        if degrees.len() > Letter::MAX as usize {
            return Err(invalid("alphabet is too large"));
        }
        if degrees.contains(&0) {
            return Err(invalid("letter degrees must be positive"));
        }
        Ok(Alphabet { degrees })
    }

    pub fn uniform(r: usize, degree: u32) -> Result<Self> {
        Self::new(vec![degree; r])
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degree(&self, letter: Letter) -> u32 {
        self.degrees[letter as usize]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn min_degree(&self) -> u32 {
        *self.degrees.iter().min().expect("nonempty")
    }

    pub fn word_degree(&self, letters: &[Letter]) -> u32 {
        letters.iter().map(|&l| self.degree(l)).sum()
    }

    pub fn contains_word(&self, letters: &[Letter]) -> bool {
        letters.iter().all(|&l| (l as usize) < self.degrees.len())
    }
}

/// Finite sequence of letters. The derived ordering is lexicographic with
/// a proper prefix smaller than its extensions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn weight(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// First position `i` with `self[i..i+2] == [a, b]`.
    pub fn find_factor(&self, a: Letter, b: Letter) -> Option<usize> {
        self.0.windows(2).position(|w| w[0] == a && w[1] == b)
    }

    pub fn contains_factor(&self, a: Letter, b: Letter) -> bool {
        self.find_factor(a, b).is_some()
    }

    /// Renders letters as 0-based digits when every index is below 10, else
    /// as a dot-separated list.
    pub fn to_digits(&self) -> String {
        if self.0.iter().all(|&l| l < 10) {
            self.0.iter().map(|&l| char::from(b'0' + l as u8)).collect()
        } else {
            let parts: Vec<String> = self.0.iter().map(|l| format!("{l}")).collect();
            parts.join(".")
        }
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<&[Letter]> for Word {
    fn from(s: &[Letter]) -> Self {
        Word(s.to_vec())
    }
}

/// Homogeneous sparse linear combination of words with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TensorElement {
    degree: Option<u32>,
    terms: BTreeMap<Word, BigRational>,
}

impl TensorElement {
    pub fn zero() -> Self {
        TensorElement::default()
    }

    pub fn monomial(alphabet: &Alphabet, word: Word, coeff: BigRational) -> Self {
        let mut e = Self::zero();
        e.add_term(alphabet, word, coeff).expect("a single term is homogeneous");
        e
    }

    pub fn from_terms(alphabet: &Alphabet, terms: impl IntoIterator<Item = (Word, BigRational)>) -> Result<Self> {
        let mut e = Self::zero();
        for (w, c) in terms {
            e.add_term(alphabet, w, c)?;
        }
        Ok(e)
    }

    pub fn degree(&self) -> Option<u32> {
        if self.terms.is_empty() {
            None
        } else {
            self.degree
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> BigRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Lexicographically smallest word with its coefficient.
    pub fn leading_term(&self) -> Option<(&Word, &BigRational)> {
        self.terms.iter().next()
    }

    pub fn add_term(&mut self, alphabet: &Alphabet, word: Word, coeff: BigRational) -> Result<()> {
        if !alphabet.contains_word(&word) {
            return Err(invalid("word uses a letter outside the alphabet"));
        }
        let d = alphabet.word_degree(&word);
        self.add_term_with_degree(word, coeff, d)
    }

    pub(crate) fn add_term_with_degree(&mut self, word: Word, coeff: BigRational, degree: u32) -> Result<()> {
        if coeff.is_zero() {
            return Ok(());
        }
        match self.degree() {
            Some(e) if e != degree => {
                return Err(invalid(format!("inhomogeneous sum: degree {degree} added to degree {e}")));
            }
            _ => self.degree = Some(degree),
        }
        let entry = self.terms.entry(word);
        match entry {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
        Ok(())
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &TensorElement, c: &BigRational) -> Result<()> {
        let Some(d) = other.degree() else { return Ok(()) };
        for (w, x) in &other.terms {
            self.add_term_with_degree(w.clone(), x * c, d)?;
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorElement) -> Result<TensorElement> {
        let mut out = self.clone();
        out.add_scaled(other, &BigRational::one())?;
        Ok(out)
    }

    pub fn sub(&self, other: &TensorElement) -> Result<TensorElement> {
        let mut out = self.clone();
        out.add_scaled(other, &-BigRational::one())?;
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> TensorElement {
        if c.is_zero() {
            return Self::zero();
        }
        TensorElement { degree: self.degree, terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect() }
    }

    /// Concatenation product.
    pub fn mul(&self, other: &TensorElement) -> TensorElement {
        let (Some(a), Some(b)) = (self.degree(), other.degree()) else { return Self::zero() };
        let mut out = Self::zero();
        for (u, x) in &self.terms {
            for (v, y) in &other.terms {
                out.add_term_with_degree(u.concat(v), x * y, a + b).expect("degrees agree");
            }
        }
        out
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.mul(other);
        out.add_scaled(&other.mul(self), &-BigRational::one()).expect("both products have the same degree");
        out
    }

    /// Human-readable form using the given letter names.
    pub fn render(&self, name: &dyn Fn(Letter) -> String) -> String {
        if self.terms.is_empty() {
            return String::from("0");
        }
        let mut s = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if !a.is_one() || w.is_empty() {
                s.push_str(&format!("{a}"));
            }
            for &l in w.letters() {
                s.push_str(&name(l));
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    Skew,
}

/// The bilinear form whose tensor `sum g_ij x_i x_j` is the defining relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionRelation {
    matrix: QMatrix,
    symmetry: Symmetry,
    integral: bool,
}

impl IntersectionRelation {
    pub fn new(matrix: QMatrix, symmetry: Symmetry) -> Result<Self> {
        if !matrix.is_square() {
            return Err(invalid("relation matrix must be square"));
        }
        let ok = match symmetry {
            Symmetry::Symmetric => matrix.is_symmetric(),
            Symmetry::Skew => matrix.is_skew(),
        };
        if !ok {
            return Err(invalid(format!("relation matrix is not {symmetry:?}")));
        }
        let integral = matrix.is_integral();
        Ok(IntersectionRelation { matrix, symmetry, integral })
    }

    pub fn from_integer(z: &ZMatrix, symmetry: Symmetry) -> Result<Self> {
        Self::new(z.to_rational(), symmetry)
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// The relation tensor `sum g_ij x_i x_j`.
    pub fn tensor(&self, alphabet: &Alphabet) -> Result<TensorElement> {
        quadratic_tensor(alphabet, &self.matrix)
    }
}

fn quadratic_tensor(alphabet: &Alphabet, m: &QMatrix) -> Result<TensorElement> {
    let mut e = TensorElement::zero();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let c = m.get(i, j);
            if !c.is_zero() {
                e.add_term(alphabet, Word::new(vec![i as Letter, j as Letter]), c.clone())?;
            }
        }
    }
    Ok(e)
}

/// Alphabet and relation of a space whose loop homology is a one-relator
/// quadratic algebra.
pub fn relation_from_space(space: &SpaceModel) -> Result<(Alphabet, IntersectionRelation)> {
    space.validate()?;
    match space {
        SpaceModel::Manifold { n, r, .. } => {
            if *r < 2 {
                return Err(Error::Unsupported(String::from(
                    "a manifold with a single middle class has no quadratic relation; use the Betti-one model",
                )));
            }
            let m = space.intersection_matrix()?;
            let sym = if n % 2 == 0 { Symmetry::Symmetric } else { Symmetry::Skew };
            Ok((Alphabet::uniform(*r as usize, n - 1)?, IntersectionRelation::from_integer(&m, sym)?))
        }
        SpaceModel::ConnectedSum { factors, signs } => {
            let mut degrees = Vec::with_capacity(2 * factors.len());
            for &(p, qq) in factors {
                degrees.push(p - 1);
                degrees.push(qq - 1);
            }
            let k = degrees.len();
            let mut m = QMatrix::zeros(k, k);
            for (i, &e) in signs.iter().enumerate() {
                m.set(2 * i, 2 * i + 1, q(e as i64));
                m.set(2 * i + 1, 2 * i, q(-(e as i64)));
            }
            Ok((Alphabet::new(degrees)?, IntersectionRelation::new(m, Symmetry::Skew)?))
        }
        SpaceModel::TwoCellComplex { n, r, q: form } => {
            if form.rank() < 2 {
                return Err(Error::Unsupported(String::from(
                    "cup-product form has rational rank below 2; no quadratic presentation",
                )));
            }
            let sym = if n % 2 == 0 { Symmetry::Symmetric } else { Symmetry::Skew };
            Ok((Alphabet::uniform(*r as usize, n - 1)?, IntersectionRelation::from_integer(form, sym)?))
        }
        SpaceModel::BettiOne { .. } => Err(Error::Unsupported(String::from(
            "Betti-one manifolds have a cubic loop-homology presentation; use the cobar model",
        ))),
    }
}

/// Relation rewritten in a basis where it reads `x0 x1 = f_alg`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedRelation {
    original_alphabet: Alphabet,
    alphabet: Alphabet,
    basis_change: QMatrix,
    inverse_change: QMatrix,
    transformed: QMatrix,
    algebra_rewrite: TensorElement,
    lie_tail: TensorElement,
}

impl NormalizedRelation {
    pub fn original_alphabet(&self) -> &Alphabet {
        &self.original_alphabet
    }

    /// Alphabet of the new letters, with `x0 < x1` spanning the split plane.
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Rows are the new basis vectors in original coordinates; the
    /// transformed form is `P g P^T`.
    pub fn basis_change(&self) -> &QMatrix {
        &self.basis_change
    }

    pub fn transformed_matrix(&self) -> &QMatrix {
        &self.transformed
    }

    pub fn forbidden_pair(&self) -> (Letter, Letter) {
        (0, 1)
    }

    pub fn forbidden_word(&self) -> Word {
        Word::new(vec![0, 1])
    }

    pub fn algebra_rewrite(&self) -> &TensorElement {
        &self.algebra_rewrite
    }

    pub fn lie_tail(&self) -> &TensorElement {
        &self.lie_tail
    }

    pub fn relation_degree(&self) -> u32 {
        self.alphabet.degree(0) + self.alphabet.degree(1)
    }

    /// `sum h_kl x_k x_l` in the new letters.
    pub fn relation_tensor(&self) -> TensorElement {
        quadratic_tensor(&self.alphabet, &self.transformed).expect("normalized relation is homogeneous")
    }

    /// Original generators expressing new letter `k`:
    /// `x_k = sum_i c_i a_i`, returned as the nonzero `(i, c_i)`.
    pub fn letter_expression(&self, k: usize) -> Vec<(usize, BigRational)> {
        (0..self.inverse_change.rows())
            .filter_map(|i| {
                let c = self.inverse_change.get(i, k);
                if c.is_zero() {
                    None
                } else {
                    Some((i, c.clone()))
                }
            })
            .collect()
    }

    pub fn is_identity_change(&self) -> bool {
        self.basis_change == QMatrix::identity(self.basis_change.rows())
    }
}

fn unit(n: usize, i: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); n];
    v[i] = BigRational::one();
    v
}

fn axpy(y: &mut [BigRational], a: &BigRational, x: &[BigRational]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += a * xi;
        }
    }
}

fn scaled(x: &[BigRational], a: &BigRational) -> Vec<BigRational> {
    x.iter().map(|v| v * a).collect()
}

fn plane_determinant(g: &QMatrix, v0: &[BigRational], v1: &[BigRational]) -> BigRational {
    g.pairing(v0, v0) * g.pairing(v1, v1) - g.pairing(v0, v1) * g.pairing(v1, v0)
}

/// A pair `(v0, v1)` spanning a plane on which the form is nonsingular, with
/// `g(v0, v1) = 1`.
fn find_plane(g: &QMatrix) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    let n = g.rows();
    for i in 0..n {
        for j in i + 1..n {
            let minor = g.get(i, i) * g.get(j, j) - g.get(i, j) * g.get(j, i);
            if minor.is_zero() {
                continue;
            }
            let v0 = unit(n, i);
            let v1 = if !g.get(i, j).is_zero() {
                scaled(&unit(n, j), &g.get(i, j).recip())
            } else {
                let mut s = unit(n, i);
                s[j] = BigRational::one();
                scaled(&s, &g.get(i, i).recip())
            };
            return Some((v0, v1));
        }
    }
    // Every principal 2x2 minor vanishes: build an orthogonal pair of
    // anisotropic vectors instead. Only reachable for symmetric forms.
    let candidates = || {
        (0..n).map(|i| unit(n, i)).chain((0..n).flat_map(move |i| {
            (i + 1..n).map(move |j| {
                let mut v = unit(n, i);
                v[j] = BigRational::one();
                v
            })
        }))
    };
    let x = candidates().find(|v| !g.pairing(v, v).is_zero())?;
    let gxx = g.pairing(&x, &x);
    let project = |v: Vec<BigRational>| {
        let mut w = v.clone();
        axpy(&mut w, &-(g.pairing(&x, &v) / &gxx), &x);
        w
    };
    let y = candidates().map(project).find(|w| !g.pairing(w, w).is_zero())?;
    let mut v1 = x.clone();
    axpy(&mut v1, &BigRational::one(), &y);
    let v1 = scaled(&v1, &gxx.recip());
    Some((x, v1))
}

/// Splits off a nonsingular plane and orthogonalizes the rest against it.
pub fn normalize_relation(alphabet: &Alphabet, rel: &IntersectionRelation) -> Result<NormalizedRelation> {
    let g = rel.matrix();
    let n = g.rows();
    if n != alphabet.len() {
        return Err(invalid("relation size does not match the alphabet"));
    }
    if rel.rank() < 2 {
        return Err(invalid("relation has rank below 2; no nonsingular plane exists"));
    }
    let (v0, v1) = find_plane(g).ok_or_else(|| integrity("no nonsingular plane found in a form of rank >= 2"))?;
    if plane_determinant(g, &v0, &v1).is_zero() {
        return Err(integrity("selected plane is singular"));
    }
    let gram = [
        [g.pairing(&v0, &v0), g.pairing(&v0, &v1)],
        [g.pairing(&v1, &v0), g.pairing(&v1, &v1)],
    ];
    let det = &gram[0][0] * &gram[1][1] - &gram[0][1] * &gram[1][0];

    let mut rows = vec![v0.clone(), v1.clone()];
    for k in 0..n {
        if rows.len() == n {
            break;
        }
        let mut trial = rows.clone();
        trial.push(unit(n, k));
        if QMatrix::from_rows(trial)?.rank() == rows.len() + 1 {
            let e = unit(n, k);
            let b0 = g.pairing(&v0, &e);
            let b1 = g.pairing(&v1, &e);
            // Solve gram * (alpha, beta) = (b0, b1).
            let alpha = (&b0 * &gram[1][1] - &gram[0][1] * &b1) / &det;
            let beta = (&gram[0][0] * &b1 - &gram[1][0] * &b0) / &det;
            let mut w = e;
            axpy(&mut w, &-alpha, &v0);
            axpy(&mut w, &-beta, &v1);
            rows.push(w);
        }
    }
    let p = QMatrix::from_rows(rows)?;
    let inverse = p.inverse().ok_or_else(|| integrity("basis change is singular"))?;
    let h = p.mul(g).mul(&p.transpose());

    let mut degrees = Vec::with_capacity(n);
    for k in 0..n {
        let mut deg = None;
        for i in 0..n {
            if !p.get(k, i).is_zero() {
                let d = alphabet.degree(i as Letter);
                if deg.is_some_and(|e| e != d) {
                    return Err(Error::Unsupported(String::from(
                        "normalization would mix letters of different degrees",
                    )));
                }
                deg = Some(d);
            }
        }
        degrees.push(deg.expect("basis vectors are nonzero"));
    }
    let new_alphabet = Alphabet::new(degrees)?;

    if !h.get(0, 1).is_one() {
        return Err(integrity("normalized pairing of the plane is not 1"));
    }
    for k in 2..n {
        for i in 0..2 {
            if !h.get(i, k).is_zero() || !h.get(k, i).is_zero() {
                return Err(integrity("plane is not orthogonal to the remaining letters"));
            }
        }
    }

    let mut f_alg = TensorElement::zero();
    let mut tail = TensorElement::zero();
    for i in 0..n {
        for j in 0..n {
            let c = h.get(i, j);
            if c.is_zero() || (i, j) == (0, 1) {
                continue;
            }
            let w = Word::new(vec![i as Letter, j as Letter]);
            f_alg.add_term(&new_alphabet, w.clone(), -c.clone())?;
            if 2 <= i && i < j {
                tail.add_term(&new_alphabet, w, -c.clone())?;
                tail.add_term(&new_alphabet, Word::new(vec![j as Letter, i as Letter]), c.clone())?;
            }
        }
    }
    Ok(NormalizedRelation {
        original_alphabet: alphabet.clone(),
        alphabet: new_alphabet,
        basis_change: p,
        inverse_change: inverse,
        transformed: h,
        algebra_rewrite: f_alg,
        lie_tail: tail,
    })
}

/// Integer matrix from rows of `i64`, as a rational relation matrix.
pub fn relation_from_integers(rows: &[&[i64]], symmetry: Symmetry) -> Result<IntersectionRelation> {
    IntersectionRelation::from_integer(&ZMatrix::from_i64(rows), symmetry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::SpaceModel;

    fn w(letters: &[Letter]) -> Word {
        Word::from(letters)
    }

    #[test]
    fn word_order_is_lexicographic_with_prefix_rule() {
        assert!(w(&[0]) < w(&[0, 0]));
        assert!(w(&[0, 1]) < w(&[1]));
        assert!(w(&[0, 2, 0]) > w(&[0, 1, 9]));
    }

    #[test]
    fn tensor_rejects_inhomogeneous_sums() {
        let a = Alphabet::new(vec![1, 2]).unwrap();
        let mut e = TensorElement::monomial(&a, w(&[0]), q(1));
        assert!(e.add_term(&a, w(&[1]), q(1)).is_err());
        assert!(e.add_term(&a, w(&[0, 0]), q(1)).is_err());
        e.add_term(&a, w(&[0]), q(-1)).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn commutator_expands() {
        let a = Alphabet::uniform(2, 1).unwrap();
        let x = TensorElement::monomial(&a, w(&[0]), q(1));
        let y = TensorElement::monomial(&a, w(&[1]), q(1));
        let c = x.commutator(&y);
        assert_eq!(c.coefficient(&w(&[0, 1])), q(1));
        assert_eq!(c.coefficient(&w(&[1, 0])), q(-1));
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn skew_symplectic_is_already_normal() {
        let a = Alphabet::uniform(2, 2).unwrap();
        let rel = relation_from_integers(&[&[0, 1], &[-1, 0]], Symmetry::Skew).unwrap();
        let nr = normalize_relation(&a, &rel).unwrap();
        assert!(nr.is_identity_change());
        assert_eq!(nr.algebra_rewrite(), &TensorElement::monomial(&a, w(&[1, 0]), q(1)));
        assert!(nr.lie_tail().is_zero());
    }

    #[test]
    fn diagonal_form_uses_sheared_plane() {
        let a = Alphabet::uniform(2, 1).unwrap();
        let rel = relation_from_integers(&[&[1, 0], &[0, 1]], Symmetry::Symmetric).unwrap();
        let nr = normalize_relation(&a, &rel).unwrap();
        assert_eq!(nr.basis_change(), &QMatrix::from_i64(&[&[1, 0], &[1, 1]]).unwrap());
        assert_eq!(nr.transformed_matrix(), &QMatrix::from_i64(&[&[1, 1], &[1, 2]]).unwrap());
        let expected = TensorElement::from_terms(
            &a,
            [(w(&[1, 0]), q(-1)), (w(&[0, 0]), q(-1)), (w(&[1, 1]), q(-2))],
        )
        .unwrap();
        assert_eq!(nr.algebra_rewrite(), &expected);
        assert!(nr.lie_tail().is_zero());
        // x0 = a0 - a1, x1 = a1
        assert_eq!(nr.letter_expression(0), vec![(0, q(1)), (1, q(-1))]);
        assert_eq!(nr.letter_expression(1), vec![(1, q(1))]);
    }

    #[test]
    fn connected_sum_tail_uses_later_pairs() {
        let t = SpaceModel::connected_sum(vec![(2, 3), (2, 3), (2, 3)], vec![1, -1, 1]).unwrap();
        let (a, rel) = relation_from_space(&t).unwrap();
        assert_eq!(a.degrees(), &[1, 2, 1, 2, 1, 2]);
        let nr = normalize_relation(&a, &rel).unwrap();
        assert!(nr.is_identity_change());
        // tail = -sum_{i >= 2} eps_i [a_i, b_i]
        let mut expected = TensorElement::zero();
        for (i, e) in [(1usize, -1i64), (2, 1)] {
            let (x, y) = ((2 * i) as Letter, (2 * i + 1) as Letter);
            expected.add_term(&a, w(&[x, y]), q(-e)).unwrap();
            expected.add_term(&a, w(&[y, x]), q(e)).unwrap();
        }
        assert_eq!(nr.lie_tail(), &expected);
        for (word, _) in nr.lie_tail().terms() {
            assert!(word.iter().all(|&l| l >= 2));
        }
    }

    #[test]
    fn forms_without_nonsingular_principal_minors_still_split() {
        let a = Alphabet::uniform(3, 1).unwrap();
        let rel = relation_from_integers(&[&[1, 1, 1], &[1, 1, -1], &[1, -1, 1]], Symmetry::Symmetric).unwrap();
        let nr = normalize_relation(&a, &rel).unwrap();
        let h = nr.transformed_matrix();
        assert!(h.get(0, 1).is_one());
        assert!(h.get(0, 2).is_zero() && h.get(1, 2).is_zero());
    }

    #[test]
    fn rank_one_is_rejected() {
        let a = Alphabet::uniform(2, 1).unwrap();
        let rel = relation_from_integers(&[&[1, 0], &[0, 0]], Symmetry::Symmetric).unwrap();
        assert!(normalize_relation(&a, &rel).is_err());
    }

    #[test]
    fn relations_from_spaces() {
        let m = SpaceModel::manifold(2, 2, None).unwrap();
        let (a, rel) = relation_from_space(&m).unwrap();
        assert_eq!(a.degrees(), &[1, 1]);
        assert_eq!(rel.matrix(), &QMatrix::from_i64(&[&[0, 1], &[1, 0]]).unwrap());
        let x = SpaceModel::two_cell(2, ZMatrix::from_i64(&[&[0, 7], &[7, 0]])).unwrap();
        let (_, rel) = relation_from_space(&x).unwrap();
        assert_eq!(rel.matrix(), &QMatrix::from_i64(&[&[0, 7], &[7, 0]]).unwrap());
        assert!(rel.is_integral());
    }
}
