//! Smith normal form of dense integer matrices, and rank/torsion of large
//! sparse integer matrices by pivoting on entries that divide their row and
//! column.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::mem;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{integrity, Error, Result};
use crate::linalg::ZMatrix;

/// `left * m * right = diagonal`, with `invariants` the nonzero diagonal
/// entries forming a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub invariants: Vec<BigInt>,
    pub diagonal: ZMatrix,
    pub left: ZMatrix,
    pub right: ZMatrix,
}

pub fn smith_normal_form(m: &ZMatrix) -> Result<SmithForm> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.to_rows();
    let mut left = Some(ZMatrix::identity(rows).to_rows());
    let mut right = Some(ZMatrix::identity(cols).to_rows());
    let invariants = diagonalize(&mut a, rows, cols, &mut left, &mut right);
    let left = ZMatrix::from_rows(left.unwrap_or_default())?;
    let right = ZMatrix::from_rows(right.unwrap_or_default())?;
    let diagonal = if rows == 0 || cols == 0 { ZMatrix::zeros(rows, cols) } else { ZMatrix::from_rows(a)? };
    if rows > 0 && cols > 0 && left.mul(m).mul(&right) != diagonal {
        return Err(integrity("Smith transforms do not reproduce the diagonal form"));
    }
    let det_ok = |u: &ZMatrix| u.determinant().is_none_or(|d| d.abs().is_one());
    if !det_ok(&left) || !det_ok(&right) {
        return Err(integrity("Smith transforms are not unimodular"));
    }
    Ok(SmithForm { invariants, diagonal, left, right })
}

/// Nonzero invariant factors, without transforms.
pub fn invariant_factors(m: &ZMatrix) -> Vec<BigInt> {
    let mut a = m.to_rows();
    diagonalize(&mut a, m.rows(), m.cols(), &mut None, &mut None)
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// `row_i -= f * row_j`
fn row_axpy(a: &mut [Vec<BigInt>], i: usize, j: usize, f: &BigInt) {
    let (src, dst) = if i < j {
        let (x, y) = a.split_at_mut(j);
        (&y[0], &mut x[i])
    } else {
        let (x, y) = a.split_at_mut(i);
        (&x[j], &mut y[0])
    };
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= f * s;
        }
    }
}

/// `col_i -= f * col_j`
fn col_axpy(a: &mut [Vec<BigInt>], i: usize, j: usize, f: &BigInt) {
    for row in a.iter_mut() {
        if !row[j].is_zero() {
            let t = f * &row[j];
            row[i] -= t;
        }
    }
}

fn diagonalize(
    a: &mut [Vec<BigInt>],
    rows: usize,
    cols: usize,
    left: &mut Option<Vec<Vec<BigInt>>>,
    right: &mut Option<Vec<Vec<BigInt>>>,
) -> Vec<BigInt> {
    // `right` is stored transposed so column operations become row operations.
    if let Some(r) = right.as_mut() {
        *r = transpose(r, cols);
    }
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = smallest_entry(a, t, rows, cols) else { break };
        a.swap(t, pi);
        if let Some(l) = left.as_mut() {
            l.swap(t, pi);
        }
        swap_cols(a, t, pj);
        if let Some(r) = right.as_mut() {
            r.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let f = a[i][t].div_floor(&a[t][t]);
                row_axpy(a, i, t, &f);
                if let Some(l) = left.as_mut() {
                    row_axpy(l, i, t, &f);
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let f = a[t][j].div_floor(&a[t][t]);
                col_axpy(a, j, t, &f);
                if let Some(r) = right.as_mut() {
                    row_axpy(r, j, t, &f);
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                let (pi, pj) = smallest_entry_cross(a, t, rows, cols);
                a.swap(t, pi);
                if let Some(l) = left.as_mut() {
                    l.swap(t, pi);
                }
                swap_cols(a, t, pj);
                if let Some(r) = right.as_mut() {
                    r.swap(t, pj);
                }
                continue;
            }
            let pivot = a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    let neg = -BigInt::one();
                    row_axpy(a, t, i, &neg);
                    if let Some(l) = left.as_mut() {
                        row_axpy(l, t, i, &neg);
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -mem::take(x);
            }
            if let Some(l) = left.as_mut() {
                for x in l[t].iter_mut() {
                    *x = -mem::take(x);
                }
            }
        }
        t += 1;
    }
    if let Some(r) = right.as_mut() {
        *r = transpose(r, cols);
    }
    (0..t).map(|i| a[i][i].clone()).collect()
}

fn transpose(m: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

fn smallest_entry(a: &[Vec<BigInt>], t: usize, rows: usize, cols: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..rows {
        for j in t..cols {
            if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                best = Some((i, j));
                if a[i][j].abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

/// Smallest nonzero entry in row `t` or column `t` (the pivot itself counts).
fn smallest_entry_cross(a: &[Vec<BigInt>], t: usize, rows: usize, cols: usize) -> (usize, usize) {
    let mut best = (t, t);
    let cand = (t + 1..rows).map(|i| (i, t)).chain((t + 1..cols).map(|j| (t, j)));
    for (i, j) in cand {
        if !a[i][j].is_zero() && (a[best.0][best.1].is_zero() || a[i][j].abs() < a[best.0][best.1].abs()) {
            best = (i, j);
        }
    }
    best
}

/// Integer matrix stored by columns, each a row-sorted list of nonzeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    columns: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn new(rows: usize, mut columns: Vec<Vec<(u32, i64)>>) -> Self {
        for c in columns.iter_mut() {
            c.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(u32, i64)> = Vec::with_capacity(c.len());
            for &(r, v) in c.iter() {
                assert!((r as usize) < rows, "row index out of range");
                match merged.last_mut() {
                    Some(last) if last.0 == r => last.1 += v,
                    _ => merged.push((r, v)),
                }
            }
            merged.retain(|e| e.1 != 0);
            *c = merged;
        }
        SparseMatrix { rows, columns }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, columns: vec![Vec::new(); cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(u32, i64)] {
        &self.columns[j]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> ZMatrix {
        let mut m = ZMatrix::zeros(self.rows, self.cols());
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                m.set(i as usize, j, BigInt::from(v));
            }
        }
        m
    }

    /// `self * other`, or `None` on `i64` overflow.
    pub fn mul(&self, other: &SparseMatrix) -> Option<SparseMatrix> {
        assert_eq!(self.cols(), other.rows, "dimension mismatch");
        let mut acc: Vec<i64> = vec![0; self.rows];
        let mut touched: Vec<u32> = Vec::new();
        let mut out = Vec::with_capacity(other.cols());
        for col in &other.columns {
            for &(k, b) in col {
                for &(i, a) in &self.columns[k as usize] {
                    let slot = &mut acc[i as usize];
                    if *slot == 0 {
                        touched.push(i);
                    }
                    *slot = slot.checked_add(a.checked_mul(b)?)?;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let mut c = Vec::new();
            for &i in &touched {
                let v = mem::take(&mut acc[i as usize]);
                if v != 0 {
                    c.push((i, v));
                }
            }
            touched.clear();
            out.push(c);
        }
        Some(SparseMatrix { rows: self.rows, columns: out })
    }

    /// Submatrix on the given rows and columns, reindexed in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut map = vec![u32::MAX; self.rows];
        for (k, &r) in rows.iter().enumerate() {
            map[r] = k as u32;
        }
        let columns = cols
            .iter()
            .map(|&j| {
                let mut c: Vec<(u32, i64)> =
                    self.columns[j].iter().filter(|e| map[e.0 as usize] != u32::MAX).map(|&(r, v)| (map[r as usize], v)).collect();
                c.sort_unstable_by_key(|e| e.0);
                c
            })
            .collect();
        SparseMatrix { rows: rows.len(), columns }
    }
}

/// Rank, and the diagonal entries greater than one of some diagonal form
/// equivalent to the matrix. These need not form a divisibility chain, but
/// determine the cokernel's torsion up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTorsion {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

/// Cap on the dense remainder left after sparse elimination.
pub const DENSE_REMAINDER_LIMIT: usize = 4_000_000;

pub fn rank_and_torsion(m: &SparseMatrix) -> Result<RankTorsion> {
    let cols: Vec<Vec<(u32, i64)>> = m.columns.clone();
    let outcome = match eliminate(m.rows, cols) {
        Some(o) => o,
        None => {
            let big = m.columns.iter().map(|c| c.iter().map(|&(r, v)| (r, BigInt::from(v))).collect()).collect();
            eliminate::<BigInt>(m.rows, big).expect("big integers do not overflow")
        }
    };
    let Elimination { mut rank, pivots, remainder, remainder_rows } = outcome;
    let mut torsion: Vec<BigInt> = pivots.into_iter().filter(|p| !p.is_one()).collect();
    let width = remainder.len();
    if width > 0 {
        if width.saturating_mul(remainder_rows) > DENSE_REMAINDER_LIMIT {
            return Err(Error::LimitExceeded(format!(
                "dense remainder of {remainder_rows} x {width} entries after sparse elimination"
            )));
        }
        let mut dense = ZMatrix::zeros(remainder_rows, width);
        for (j, col) in remainder.into_iter().enumerate() {
            for (i, v) in col {
                dense.set(i as usize, j, v);
            }
        }
        for f in invariant_factors(&dense) {
            rank += 1;
            if !f.is_one() {
                torsion.push(f);
            }
        }
    }
    torsion.sort();
    Ok(RankTorsion { rank, torsion })
}

trait Coeff: Clone + PartialEq {
    fn vanishes(&self) -> bool;
    fn magnitude(&self) -> BigInt;
    fn to_bigint(&self) -> BigInt;
    fn divides(&self, other: &Self) -> bool;
    fn quotient(&self, divisor: &Self) -> Self;
    /// `a - f * b`, or `None` on overflow.
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Option<Self>;
    fn neg_of(b: &Self, f: &Self) -> Option<Self>;
}

impl Coeff for i64 {
    fn vanishes(&self) -> bool {
        *self == 0
    }
    fn magnitude(&self) -> BigInt {
        BigInt::from(*self).abs()
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn divides(&self, other: &Self) -> bool {
        *self != 0 && other.checked_rem(*self) == Some(0)
    }
    fn quotient(&self, divisor: &Self) -> Self {
        self / divisor
    }
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Option<Self> {
        a.checked_sub(f.checked_mul(*b)?)
    }
    fn neg_of(b: &Self, f: &Self) -> Option<Self> {
        f.checked_mul(*b)?.checked_neg()
    }
}

impl Coeff for BigInt {
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn magnitude(&self) -> BigInt {
        self.abs()
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn divides(&self, other: &Self) -> bool {
        !Zero::is_zero(self) && other.is_multiple_of(self)
    }
    fn quotient(&self, divisor: &Self) -> Self {
        self / divisor
    }
    fn sub_mul(a: &Self, f: &Self, b: &Self) -> Option<Self> {
        Some(a - f * b)
    }
    fn neg_of(b: &Self, f: &Self) -> Option<Self> {
        Some(-(f * b))
    }
}

struct Elimination {
    rank: usize,
    pivots: Vec<BigInt>,
    remainder: Vec<Vec<(u32, BigInt)>>,
    remainder_rows: usize,
}

/// Column-oriented elimination. A pivot is an entry of least magnitude in
/// its column that divides every entry of its row and column; clearing its
/// row by column operations splits off a 1x1 block. Columns are visited
/// sparsest first and ties in the row are broken toward the sparsest row.
fn eliminate<T: Coeff>(nrows: usize, mut cols: Vec<Vec<(u32, T)>>) -> Option<Elimination> {
    let ncols = cols.len();
    let mut alive = vec![true; ncols];
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); nrows];
    let mut row_count = vec![0u32; nrows];
    let mut heap = BinaryHeap::with_capacity(ncols);
    for (c, col) in cols.iter().enumerate() {
        for &(r, _) in col {
            row_cols[r as usize].push(c as u32);
            row_count[r as usize] += 1;
        }
        heap.push(Reverse((col.len(), c)));
    }
    let mut stamp = vec![0u32; ncols];
    let mut round = 0u32;
    let mut rank = 0;
    let mut pivots = Vec::new();
    let mut others: Vec<(u32, T)> = Vec::new();
    let mut scratch: Vec<(u32, T)> = Vec::new();

    while let Some(Reverse((len, c))) = heap.pop() {
        if !alive[c] || cols[c].len() != len {
            continue;
        }
        if len == 0 {
            alive[c] = false;
            continue;
        }
        let Some((r, pv)) = choose_pivot(&cols, c, &row_cols, &row_count, &alive) else {
            continue;
        };
        round += 1;
        others.clear();
        for &o in &row_cols[r as usize] {
            let o = o as usize;
            if o == c || !alive[o] || stamp[o] == round {
                continue;
            }
            stamp[o] = round;
            if let Ok(k) = cols[o].binary_search_by_key(&r, |e| e.0) {
                others.push((o as u32, cols[o][k].1.clone()));
            }
        }
        row_cols[r as usize] = Vec::new();
        let pivot_col = mem::take(&mut cols[c]);
        alive[c] = false;
        for &(rr, _) in &pivot_col {
            row_count[rr as usize] -= 1;
        }
        rank += 1;
        pivots.push(pv.magnitude());
        for (o, a) in others.drain(..) {
            let o = o as usize;
            let f = a.quotient(&pv);
            merge_sub(&cols[o], &pivot_col, &f, &mut scratch, o as u32, &mut row_cols, &mut row_count)?;
            mem::swap(&mut cols[o], &mut scratch);
            scratch.clear();
            heap.push(Reverse((cols[o].len(), o)));
        }
    }

    let mut row_index = vec![u32::MAX; nrows];
    let mut remainder_rows = 0;
    let mut remainder = Vec::new();
    for (c, col) in cols.into_iter().enumerate() {
        if !alive[c] || col.is_empty() {
            continue;
        }
        let mapped = col
            .into_iter()
            .map(|(r, v)| {
                let slot = &mut row_index[r as usize];
                if *slot == u32::MAX {
                    *slot = remainder_rows as u32;
                    remainder_rows += 1;
                }
                (*slot, v.to_bigint())
            })
            .collect();
        remainder.push(mapped);
    }
    Some(Elimination { rank, pivots, remainder, remainder_rows })
}

fn choose_pivot<T: Coeff>(
    cols: &[Vec<(u32, T)>],
    c: usize,
    row_cols: &[Vec<u32>],
    row_count: &[u32],
    alive: &[bool],
) -> Option<(u32, T)> {
    let col = &cols[c];
    let least = col.iter().map(|e| e.1.magnitude()).min()?;
    let mut best: Option<(u32, T)> = None;
    for (r, v) in col {
        if v.magnitude() != least {
            continue;
        }
        if best.as_ref().is_some_and(|b| row_count[b.0 as usize] <= row_count[*r as usize]) {
            continue;
        }
        if !least.is_one() {
            let divides_col = col.iter().all(|e| v.divides(&e.1));
            let divides_row = divides_col
                && row_cols[*r as usize].iter().all(|&o| {
                    let o = o as usize;
                    !alive[o] || cols[o].binary_search_by_key(r, |e| e.0).map_or(true, |k| v.divides(&cols[o][k].1))
                });
            if !divides_row {
                continue;
            }
        }
        best = Some((*r, v.clone()));
    }
    best
}

/// `out = a - f * b` on sorted sparse columns, keeping row bookkeeping for
/// column `owner` in step.
fn merge_sub<T: Coeff>(
    a: &[(u32, T)],
    b: &[(u32, T)],
    f: &T,
    out: &mut Vec<(u32, T)>,
    owner: u32,
    row_cols: &mut [Vec<u32>],
    row_count: &mut [u32],
) -> Option<()> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ra = a.get(i).map_or(u32::MAX, |e| e.0);
        let rb = b.get(j).map_or(u32::MAX, |e| e.0);
        if ra < rb {
            out.push(a[i].clone());
            i += 1;
        } else if rb < ra {
            let v = T::neg_of(&b[j].1, f)?;
            row_cols[rb as usize].push(owner);
            row_count[rb as usize] += 1;
            out.push((rb, v));
            j += 1;
        } else {
            let v = T::sub_mul(&a[i].1, f, &b[j].1)?;
            if v.vanishes() {
                row_count[ra as usize] -= 1;
            } else {
                out.push((ra, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(())
}
