//! Cobar construction of a finite graded coalgebra and its integral
//! homology, used as a chain-level check on the quadratic-algebra
//! predictions for loop space homology.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{ToPrimitive, Zero};

use crate::error::{integrity, invalid, Error, Result};
use crate::ncalgebra::{Letter, Word};
use crate::primes::factorize;
use crate::series::PowerSeries;
use crate::snf::{rank_and_torsion, RankTorsion, SparseMatrix};
use crate::spaces::{bad_primes, subscript, SpaceModel};

/// Default cap on the total number of basis words in a cobar complex.
pub const DEFAULT_MAX_CELLS: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

/// One term `coeff * left ⊗ right` of a reduced diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalTerm {
    pub left: usize,
    pub right: usize,
    pub coeff: BigInt,
}

/// A simply connected finite coalgebra given by its positive-degree
/// generators and their reduced diagonals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCoalgebra {
    generators: Vec<Generator>,
    diagonal: Vec<Vec<DiagonalTerm>>,
}

impl FiniteCoalgebra {
    pub fn new(generators: Vec<Generator>, diagonal: Vec<Vec<DiagonalTerm>>) -> Result<Self> {
        if generators.len() != diagonal.len() {
            return Err(invalid("need one reduced diagonal per generator"));
        }
        if generators.len() > Letter::MAX as usize {
            return Err(invalid("too many coalgebra generators"));
        }
        if let Some(g) = generators.iter().find(|g| g.degree < 2) {
            return Err(invalid(format!("generator {} has degree {}; coalgebras must be simply connected", g.name, g.degree)));
        }
        for (c, terms) in diagonal.iter().enumerate() {
            for t in terms {
                if t.left >= generators.len() || t.right >= generators.len() {
                    return Err(invalid("diagonal term refers to an unknown generator"));
                }
                if generators[t.left].degree + generators[t.right].degree != generators[c].degree {
                    return Err(invalid(format!("diagonal of {} is not homogeneous", generators[c].name)));
                }
            }
        }
        let mut merged = Vec::with_capacity(diagonal.len());
        for terms in diagonal {
            let mut m: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
            for t in terms {
                *m.entry((t.left, t.right)).or_default() += t.coeff;
            }
            merged.push(
                m.into_iter().filter(|(_, c)| !c.is_zero()).map(|((left, right), coeff)| DiagonalTerm { left, right, coeff }).collect(),
            );
        }
        let c = FiniteCoalgebra { generators, diagonal: merged };
        c.check_coassociative()?;
        Ok(c)
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn diagonal(&self, g: usize) -> &[DiagonalTerm] {
        &self.diagonal[g]
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `(Δ̄ ⊗ 1) Δ̄ = (1 ⊗ Δ̄) Δ̄` on every generator.
    fn check_coassociative(&self) -> Result<()> {
        for (c, terms) in self.diagonal.iter().enumerate() {
            let mut lhs: BTreeMap<[usize; 3], BigInt> = BTreeMap::new();
            let mut rhs: BTreeMap<[usize; 3], BigInt> = BTreeMap::new();
            for t in terms {
                for u in &self.diagonal[t.left] {
                    *lhs.entry([u.left, u.right, t.right]).or_default() += &t.coeff * &u.coeff;
                }
                for u in &self.diagonal[t.right] {
                    *rhs.entry([t.left, u.left, u.right]).or_default() += &t.coeff * &u.coeff;
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            if lhs != rhs {
                return Err(invalid(format!("reduced diagonal is not coassociative on {}", self.generators[c].name)));
            }
        }
        Ok(())
    }

    /// Weight grading with primitives in weight one, when the diagonal
    /// respects it.
    pub fn weights(&self) -> Option<Vec<u32>> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&g| self.generators[g].degree);
        let mut w = vec![0u32; self.len()];
        for g in order {
            let terms = &self.diagonal[g];
            if terms.is_empty() {
                w[g] = 1;
                continue;
            }
            let ws: BTreeSet<u32> = terms.iter().map(|t| w[t.left] + w[t.right]).collect();
            if ws.len() != 1 {
                return None;
            }
            w[g] = *ws.iter().next().expect("nonempty");
        }
        Some(w)
    }
}

/// The reduced homology coalgebra of a space.
pub fn coalgebra_of(space: &SpaceModel) -> Result<FiniteCoalgebra> {
    space.validate()?;
    match space {
        SpaceModel::BettiOne { n, .. } => {
            let gens = vec![
                Generator { name: format!("ε{}", subscript(*n as usize)), degree: *n },
                Generator { name: format!("ε{}", subscript(2 * *n as usize)), degree: 2 * n },
            ];
            let diag = vec![Vec::new(), vec![DiagonalTerm { left: 0, right: 0, coeff: BigInt::from(1) }]];
            FiniteCoalgebra::new(gens, diag)
        }
        _ => {
            let m = space.intersection_matrix()?;
            let mut gens: Vec<Generator> = match space {
                SpaceModel::ConnectedSum { factors, .. } => factors
                    .iter()
                    .enumerate()
                    .flat_map(|(i, &(p, q))| {
                        [
                            Generator { name: format!("a{}", subscript(i + 1)), degree: p },
                            Generator { name: format!("b{}", subscript(i + 1)), degree: q },
                        ]
                    })
                    .collect(),
                _ => {
                    let n = space.middle_dimension();
                    (0..m.rows()).map(|i| Generator { name: format!("a{}", subscript(i + 1)), degree: n }).collect()
                }
            };
            let top = gens[0].degree + gens[if matches!(space, SpaceModel::ConnectedSum { .. }) { 1 } else { 0 }].degree;
            gens.push(Generator { name: "z".into(), degree: top });
            let mut diag: Vec<Vec<DiagonalTerm>> = vec![Vec::new(); gens.len() - 1];
            let mut top_terms = Vec::new();
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    if !m.get(i, j).is_zero() {
                        top_terms.push(DiagonalTerm { left: i, right: j, coeff: m.get(i, j).clone() });
                    }
                }
            }
            diag.push(top_terms);
            FiniteCoalgebra::new(gens, diag)
        }
    }
}

/// Cobar complex truncated at total degree `cutoff`: words in the
/// desuspended generators, with the derivation differential.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    coalgebra: FiniteCoalgebra,
    cutoff: u32,
    degrees: Vec<u32>,
    weights: Option<Vec<u32>>,
    bases: Vec<Vec<Word>>,
    differentials: Vec<SparseMatrix>,
}

impl ChainComplex {
    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn coalgebra(&self) -> &FiniteCoalgebra {
        &self.coalgebra
    }

    /// Desuspended degree of each generator.
    pub fn generator_degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn basis(&self, d: u32) -> &[Word] {
        &self.bases[d as usize]
    }

    pub fn rank(&self, d: u32) -> usize {
        self.bases[d as usize].len()
    }

    /// `∂_d : C_d → C_{d-1}`, columns indexed by `basis(d)`.
    pub fn differential(&self, d: u32) -> &SparseMatrix {
        &self.differentials[d as usize]
    }

    pub fn total_cells(&self) -> usize {
        self.bases.iter().map(Vec::len).sum()
    }

    pub fn word_weight(&self, w: &[Letter]) -> u32 {
        match &self.weights {
            Some(ws) => w.iter().map(|&l| ws[l as usize]).sum(),
            None => 0,
        }
    }

    pub fn render_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter().map(|&l| self.coalgebra.generators[l as usize].name.as_str()).collect::<Vec<_>>().join("")
    }

    /// Rank and torsion of `∂_d` on each weight block.
    fn boundary_blocks(&self, d: u32) -> Result<BTreeMap<u32, RankTorsion>> {
        let mut out = BTreeMap::new();
        if d == 0 || d > self.cutoff {
            return Ok(out);
        }
        let cols = group_by_weight(self, d);
        let rows = group_by_weight(self, d - 1);
        for (w, cs) in cols {
            let rs = rows.get(&w).cloned().unwrap_or_default();
            let block = self.differentials[d as usize].submatrix(&rs, &cs);
            out.insert(w, rank_and_torsion(&block)?);
        }
        Ok(out)
    }
}

fn group_by_weight(cx: &ChainComplex, d: u32) -> BTreeMap<u32, Vec<usize>> {
    let mut m: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, w) in cx.bases[d as usize].iter().enumerate() {
        m.entry(cx.word_weight(w)).or_default().push(i);
    }
    m
}

pub fn build_cobar(c: &FiniteCoalgebra, cutoff: u32, max_cells: usize) -> Result<ChainComplex> {
    if cutoff < 1 {
        return Err(invalid("cobar cutoff must be at least 1"));
    }
    let degrees: Vec<u32> = c.generators.iter().map(|g| g.degree - 1).collect();
    let top = cutoff as usize;
    let mut counts = vec![0u128; top + 1];
    counts[0] = 1;
    for d in 1..=top {
        counts[d] = degrees.iter().filter(|&&g| g as usize <= d).map(|&g| counts[d - g as usize]).sum();
    }
    let total: u128 = counts.iter().sum();
    if total > max_cells as u128 {
        return Err(Error::LimitExceeded(format!(
            "cobar complex through degree {cutoff} has {total} basis words (limit {max_cells})"
        )));
    }
    let counts: Vec<usize> = counts.into_iter().map(|c| c as usize).collect();

    let mut bases: Vec<Vec<Word>> = vec![vec![Word::empty()]];
    for d in 1..=top {
        let mut layer = Vec::with_capacity(counts[d]);
        for (g, &gd) in degrees.iter().enumerate() {
            let gd = gd as usize;
            if gd > d {
                continue;
            }
            for w in &bases[d - gd] {
                let mut letters = Vec::with_capacity(w.len() + 1);
                letters.push(g as Letter);
                letters.extend_from_slice(w);
                layer.push(Word::new(letters));
            }
        }
        bases.push(layer);
    }

    let index_of = |w: &[Letter], d: usize| -> usize {
        let mut rem = d;
        let mut idx = 0;
        for &l in w {
            for (g, &gd) in degrees.iter().enumerate().take(l as usize) {
                let _ = g;
                if gd as usize <= rem {
                    idx += counts[rem - gd as usize];
                }
            }
            rem -= degrees[l as usize] as usize;
        }
        idx
    };

    let mut coeffs: Vec<Vec<(usize, usize, i64)>> = Vec::with_capacity(c.len());
    for (g, terms) in c.diagonal.iter().enumerate() {
        let mut v = Vec::new();
        for t in terms {
            let mut coeff = t.coeff.to_i64().ok_or_else(|| Error::LimitExceeded(format!(
                "diagonal coefficient of {} exceeds 64 bits",
                c.generators[g].name
            )))?;
            if c.generators[t.left].degree % 2 == 1 {
                coeff = -coeff;
            }
            v.push((t.left, t.right, coeff));
        }
        coeffs.push(v);
    }

    let mut differentials = vec![SparseMatrix::zeros(0, 1)];
    let mut buf: Vec<Letter> = Vec::new();
    for d in 1..=top {
        let mut columns = Vec::with_capacity(bases[d].len());
        for w in &bases[d] {
            let mut col: Vec<(u32, i64)> = Vec::new();
            let mut prefix = 0u32;
            for (i, &l) in w.iter().enumerate() {
                let sign = if prefix.is_multiple_of(2) { 1 } else { -1 };
                for &(x, y, coeff) in &coeffs[l as usize] {
                    buf.clear();
                    buf.extend_from_slice(&w[..i]);
                    buf.push(x as Letter);
                    buf.push(y as Letter);
                    buf.extend_from_slice(&w[i + 1..]);
                    col.push((index_of(&buf, d - 1) as u32, sign * coeff));
                }
                prefix += degrees[l as usize];
            }
            columns.push(col);
        }
        differentials.push(SparseMatrix::new(bases[d - 1].len(), columns));
    }

    for d in 2..=top {
        let zero = differentials[d - 1]
            .mul(&differentials[d])
            .ok_or_else(|| Error::LimitExceeded("coefficients overflow while checking d∘d".into()))?
            .is_zero();
        if !zero {
            return Err(integrity(format!("cobar differential does not square to zero in degree {d}")));
        }
    }

    Ok(ChainComplex { weights: c.weights(), coalgebra: c.clone(), cutoff, degrees, bases, differentials })
}

/// Homology in one degree: free rank and torsion as prime-power orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeHomology {
    pub degree: u32,
    pub rank: u64,
    pub torsion: Vec<BigUint>,
    /// Free rank per weight, for weights with nonzero rank.
    pub by_weight: BTreeMap<u32, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyReport {
    pub cutoff: u32,
    pub degrees: Vec<DegreeHomology>,
    /// Weights whose whole slice lies inside the window and passed the
    /// Euler characteristic audit.
    pub euler_weights: Vec<u32>,
}

impl HomologyReport {
    pub fn is_torsion_free(&self) -> bool {
        self.degrees.iter().all(|h| h.torsion.is_empty())
    }

    pub fn ranks(&self) -> Vec<u64> {
        self.degrees.iter().map(|h| h.rank).collect()
    }
}

fn prime_powers(fs: &[BigInt]) -> Vec<BigUint> {
    let mut out = Vec::new();
    for f in fs {
        let m = f.magnitude();
        for (p, e) in factorize(m) {
            out.push(p.pow(e));
        }
    }
    out.sort();
    out
}

fn assemble(
    cx: &ChainComplex,
    d: u32,
    out_of: &BTreeMap<u32, RankTorsion>,
    into: &BTreeMap<u32, RankTorsion>,
) -> Result<DegreeHomology> {
    let mut by_weight = BTreeMap::new();
    let mut torsion = Vec::new();
    let mut rank = 0u64;
    for (w, idx) in group_by_weight(cx, d) {
        let dim = idx.len() as i128;
        let r_out = out_of.get(&w).map_or(0, |rt| rt.rank) as i128;
        let r_in = into.get(&w).map_or(0, |rt| rt.rank) as i128;
        let h = dim - r_out - r_in;
        if h < 0 {
            return Err(integrity(format!("negative homology rank in degree {d}, weight {w}")));
        }
        if h > 0 {
            by_weight.insert(w, h as u64);
        }
        rank += h as u64;
        if let Some(rt) = into.get(&w) {
            torsion.extend(prime_powers(&rt.torsion));
        }
    }
    torsion.sort();
    Ok(DegreeHomology { degree: d, rank, torsion, by_weight })
}

/// Homology in degree `d`, which needs the boundary from `d + 1`.
pub fn homology(cx: &ChainComplex, d: u32) -> Result<DegreeHomology> {
    if d >= cx.cutoff {
        return Err(Error::OutOfWindow { degree: d, cutoff: cx.cutoff });
    }
    assemble(cx, d, &cx.boundary_blocks(d)?, &cx.boundary_blocks(d + 1)?)
}

/// Homology in every degree below the cutoff, with the Euler audit on each
/// weight slice that fits in the window.
pub fn homology_report(cx: &ChainComplex) -> Result<HomologyReport> {
    let mut blocks = Vec::with_capacity(cx.cutoff as usize + 1);
    for d in 0..=cx.cutoff {
        blocks.push(cx.boundary_blocks(d)?);
    }
    let mut degrees = Vec::new();
    for d in 0..cx.cutoff {
        degrees.push(assemble(cx, d, &blocks[d as usize], &blocks[d as usize + 1])?);
    }
    let euler_weights = euler_audit(cx, &degrees)?;
    Ok(HomologyReport { cutoff: cx.cutoff, degrees, euler_weights })
}

/// Largest degree of a word of each weight up to `max_weight`.
fn max_degree_by_weight(degrees: &[u32], weights: &[u32], max_weight: u32) -> Vec<Option<u32>> {
    let mut best: Vec<Option<u32>> = vec![None; max_weight as usize + 1];
    best[0] = Some(0);
    for w in 1..=max_weight as usize {
        for (g, &gw) in weights.iter().enumerate() {
            if gw as usize <= w {
                if let Some(b) = best[w - gw as usize] {
                    let cand = b + degrees[g];
                    best[w] = Some(best[w].map_or(cand, |x: u32| x.max(cand)));
                }
            }
        }
    }
    best
}

fn euler_audit(cx: &ChainComplex, homology: &[DegreeHomology]) -> Result<Vec<u32>> {
    let Some(weights) = &cx.weights else { return Ok(Vec::new()) };
    let max_weight = (0..=cx.cutoff).flat_map(|d| cx.bases[d as usize].iter().map(|w| cx.word_weight(w))).max().unwrap_or(0);
    let max_deg = max_degree_by_weight(&cx.degrees, weights, max_weight);
    let mut chain: BTreeMap<u32, i128> = BTreeMap::new();
    for d in 0..cx.cutoff {
        let sign: i128 = if d % 2 == 0 { 1 } else { -1 };
        for w in &cx.bases[d as usize] {
            *chain.entry(cx.word_weight(w)).or_default() += sign;
        }
    }
    let mut homol: BTreeMap<u32, i128> = BTreeMap::new();
    for h in homology {
        let sign: i128 = if h.degree % 2 == 0 { 1 } else { -1 };
        for (&w, &r) in &h.by_weight {
            *homol.entry(w).or_default() += sign * r as i128;
        }
    }
    let mut checked = Vec::new();
    for w in 0..=max_weight {
        let complete = max_deg[w as usize].is_some_and(|m| m < cx.cutoff);
        if !complete {
            continue;
        }
        let c = chain.get(&w).copied().unwrap_or(0);
        let h = homol.get(&w).copied().unwrap_or(0);
        if c != h {
            return Err(integrity(format!("Euler characteristic of weight {w}: chains give {c}, homology gives {h}")));
        }
        checked.push(w);
    }
    Ok(checked)
}

/// Which torsion the loop space homology may carry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionPolicy {
    None,
    OnlyPrimes(Vec<BigUint>),
    Unconstrained,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationRow {
    pub degree: u32,
    pub rank: u64,
    pub predicted: Option<u128>,
    pub torsion: Vec<BigUint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub cutoff: u32,
    pub cells: usize,
    pub rows: Vec<VerificationRow>,
    pub torsion_policy: TorsionPolicy,
    pub euler_weights: Vec<u32>,
    pub discrepancies: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Predicted ranks of loop space homology, when the space determines them.
pub fn predicted_loop_hilbert(space: &SpaceModel, order: usize) -> Result<Option<PowerSeries>> {
    let n = space.middle_dimension();
    let betti_one = |n: u32| -> Result<PowerSeries> {
        let mut num = vec![0i64; order + 1];
        num[0] = 1;
        if (n - 1) as usize <= order {
            num[(n - 1) as usize] += 1;
        }
        let mut den = vec![0i64; order + 1];
        den[0] = 1;
        if (3 * n - 2) as usize <= order {
            den[(3 * n - 2) as usize] = -1;
        }
        Ok(&PowerSeries::from_integers(&num, order) * &PowerSeries::from_integers(&den, order).inverse()?)
    };
    let quadratic = |letters: Vec<u32>, rel: u32| PowerSeries::one_relator_denominator(&letters, rel, order).inverse();
    Ok(match space {
        SpaceModel::BettiOne { n, .. } => Some(betti_one(*n)?),
        SpaceModel::Manifold { r: 1, n, .. } => Some(betti_one(*n)?),
        SpaceModel::Manifold { r, .. } => Some(quadratic(vec![n - 1; *r as usize], 2 * n - 2)?),
        SpaceModel::ConnectedSum { factors, .. } => {
            let letters = factors.iter().flat_map(|&(p, q)| [p - 1, q - 1]).collect();
            Some(quadratic(letters, factors[0].0 + factors[0].1 - 2)?)
        }
        SpaceModel::TwoCellComplex { r, q, .. } => match q.rank() {
            0 => {
                let mut den = vec![0i64; order + 1];
                den[0] = 1;
                if (n - 1) as usize <= order {
                    den[(n - 1) as usize] -= *r as i64;
                }
                if (2 * n - 1) as usize <= order {
                    den[(2 * n - 1) as usize] -= 1;
                }
                Some(PowerSeries::from_integers(&den, order).inverse()?)
            }
            1 => None,
            _ => Some(quadratic(vec![n - 1; *r as usize], 2 * n - 2)?),
        },
    })
}

/// Builds the cobar complex of the space's homology coalgebra and compares
/// its homology with the predicted Hilbert series and torsion.
pub fn verify_loop_homology(space: &SpaceModel, cutoff: u32, max_cells: usize) -> Result<VerificationReport> {
    if cutoff < 2 {
        return Err(invalid("verification needs a cutoff of at least 2"));
    }
    let coalgebra = coalgebra_of(space)?;
    let cx = build_cobar(&coalgebra, cutoff, max_cells)?;
    let report = homology_report(&cx)?;
    let predicted = predicted_loop_hilbert(space, cutoff as usize)?;
    let torsion_policy = match space {
        SpaceModel::TwoCellComplex { q, .. } => match bad_primes(q) {
            Ok(ps) => TorsionPolicy::OnlyPrimes(ps),
            Err(Error::Unsupported(_)) => TorsionPolicy::Unconstrained,
            Err(e) => return Err(e),
        },
        _ => TorsionPolicy::None,
    };
    let mut discrepancies = Vec::new();
    let mut rows = Vec::new();
    for h in &report.degrees {
        let pred = match &predicted {
            Some(p) => {
                let c = p.coeff(h.degree as usize);
                if !c.is_integer() || c.numer().sign() == Sign::Minus {
                    return Err(integrity(format!("predicted rank in degree {} is not a natural number", h.degree)));
                }
                Some(c.to_integer().to_u128().ok_or_else(|| integrity("predicted rank overflows"))?)
            }
            None => None,
        };
        if let Some(p) = pred {
            if p != h.rank as u128 {
                discrepancies.push(format!("degree {}: homology rank {} but predicted {p}", h.degree, h.rank));
            }
        }
        for t in &h.torsion {
            let allowed = match &torsion_policy {
                TorsionPolicy::None => false,
                TorsionPolicy::Unconstrained => true,
                TorsionPolicy::OnlyPrimes(ps) => ps.iter().any(|p| (t % p).is_zero()),
            };
            if !allowed {
                discrepancies.push(format!("degree {}: unexpected torsion Z/{t}", h.degree));
            }
        }
        rows.push(VerificationRow { degree: h.degree, rank: h.rank, predicted: pred, torsion: h.torsion.clone() });
    }
    Ok(VerificationReport {
        cutoff,
        cells: cx.total_cells(),
        rows,
        torsion_policy,
        euler_weights: report.euler_weights,
        discrepancies,
    })
}
