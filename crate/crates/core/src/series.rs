//! Truncated power series over the rationals, logarithmic coefficients,
//! Möbius inversion and the two Poincaré–Birkhoff–Witt matchers.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use alloc::string::ToString;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{integrity, invalid, Error, Result};
use crate::linalg::q;

/// Power series truncated after `t^N`; always holds exactly `N + 1` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

impl PowerSeries {
    pub fn zero(order: usize) -> Self {
        PowerSeries { coeffs: vec![BigRational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s
    }

    /// Pads with zeros or truncates to the requested order.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        PowerSeries { coeffs }
    }

    pub fn from_integers(coeffs: &[i64], order: usize) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| q(c)).collect(), order)
    }

    /// `1 - sum_i t^{d_i} + t^{e}`, the denominator of a one-relator quadratic
    /// algebra on letters of degrees `d_i` with relation of degree `e`.
    pub fn one_relator_denominator(letter_degrees: &[u32], relation_degree: u32, order: usize) -> Self {
        let mut s = Self::one(order);
        for &d in letter_degrees {
            if (d as usize) <= order {
                s.coeffs[d as usize] -= BigRational::one();
            }
        }
        if (relation_degree as usize) <= order {
            s.coeffs[relation_degree as usize] += BigRational::one();
        }
        s
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs.clone(), order)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        PowerSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(invalid("cannot invert a series with zero constant term"));
        }
        let n = self.truncation_order();
        let inv0 = a0.recip();
        let mut b = vec![BigRational::zero(); n + 1];
        b[0] = inv0.clone();
        for k in 1..=n {
            let mut acc = BigRational::zero();
            for j in 1..=k {
                let a = &self.coeffs[j];
                if !a.is_zero() {
                    acc += a * &b[k - j];
                }
            }
            b[k] = -acc * &inv0;
        }
        Ok(PowerSeries { coeffs: b })
    }

    /// Formal logarithm via `log(1 - u) = -sum u^k / k`.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(invalid("logarithm needs constant term 1"));
        }
        let n = self.truncation_order();
        let u = Self::one(n) - self.clone();
        let mut out = Self::zero(n);
        let mut power = Self::one(n);
        for k in 1..=n {
            power = &power * &u;
            out = out - power.scale(&BigRational::new(BigInt::one(), BigInt::from(k)));
        }
        Ok(out)
    }

    /// Formal exponential; needs a zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(invalid("exponential needs constant term 0"));
        }
        let n = self.truncation_order();
        let mut out = Self::one(n);
        let mut term = Self::one(n);
        for k in 1..=n {
            term = (&term * self).scale(&BigRational::new(BigInt::one(), BigInt::from(k)));
            out = out + term.clone();
        }
        Ok(out)
    }

    fn combine(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        let n = self.truncation_order().min(other.truncation_order());
        PowerSeries { coeffs: (0..=n).map(|k| f(&self.coeffs[k], &other.coeffs[k])).collect() }
    }
}

impl Add for PowerSeries {
    type Output = PowerSeries;
    fn add(self, rhs: PowerSeries) -> PowerSeries {
        self.combine(&rhs, |a, b| a + b)
    }
}

impl Sub for PowerSeries {
    type Output = PowerSeries;
    fn sub(self, rhs: PowerSeries) -> PowerSeries {
        self.combine(&rhs, |a, b| a - b)
    }
}

impl Neg for PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, rhs: &PowerSeries) -> PowerSeries {
        let n = self.truncation_order().min(rhs.truncation_order());
        let mut out = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        PowerSeries { coeffs: out }
    }
}

/// Nonnegative integer counts indexed by degree `1..=max_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionTable {
    dims: BTreeMap<u32, u128>,
    max_degree: u32,
}

impl DimensionTable {
    pub fn new(max_degree: u32) -> Self {
        DimensionTable { dims: (1..=max_degree).map(|d| (d, 0)).collect(), max_degree }
    }

    pub fn from_map(dims: BTreeMap<u32, u128>, max_degree: u32) -> Self {
        let mut t = Self::new(max_degree);
        for (d, v) in dims {
            if d >= 1 && d <= max_degree {
                t.dims.insert(d, v);
            }
        }
        t
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn get(&self, d: u32) -> u128 {
        self.dims.get(&d).copied().unwrap_or(0)
    }

    pub fn set(&mut self, d: u32, v: u128) {
        self.dims.insert(d, v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u128)> + '_ {
        self.dims.iter().map(|(&d, &v)| (d, v))
    }

    /// Degrees carrying a nonzero value.
    pub fn support(&self) -> Vec<u32> {
        self.iter().filter(|&(_, v)| v != 0).map(|(d, _)| d).collect()
    }

    pub fn total(&self) -> u128 {
        self.dims.values().sum()
    }
}

fn to_count(x: &BigRational, what: &str, degree: u32) -> Result<u128> {
    if !x.is_integer() {
        return Err(integrity(format!("{what} at degree {degree} is not an integer: {x}")));
    }
    if x.is_negative() {
        return Err(integrity(format!("{what} at degree {degree} is negative: {x}")));
    }
    x.to_integer()
        .to_u128()
        .ok_or_else(|| Error::LimitExceeded(format!("{what} at degree {degree} exceeds 128 bits")))
}

fn to_count_int(x: &BigInt, what: &str, degree: u32) -> Result<u128> {
    to_count(&BigRational::from_integer(x.clone()), what, degree)
}

pub fn moebius_mu(m: u64) -> Result<i8> {
    if m == 0 {
        return Err(invalid("Möbius function is defined for m >= 1"));
    }
    let mut m = m;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return Ok(0);
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    Ok(sign)
}

fn divisors(m: u32) -> impl Iterator<Item = u32> {
    (1..=m).filter(move |d| m.is_multiple_of(*d))
}

/// Coefficients of `log(denominator)` up to `t^N`.
pub fn log_lambda_coefficients(denominator: &PowerSeries, order: usize) -> Result<PowerSeries> {
    if order < 1 {
        return Err(invalid("truncation order must be at least 1"));
    }
    if !denominator.coeff(0).is_one() {
        return Err(invalid("denominator must have constant term 1"));
    }
    denominator.truncate(order).log()
}

/// `l_m = -sum_{d | m} mu(d) lambda_{m/d} / d`, each required to be a
/// nonnegative integer.
pub fn moebius_invert_dims(lambda: &PowerSeries, order: usize) -> Result<DimensionTable> {
    if lambda.truncation_order() < order {
        return Err(invalid("lambda series is shorter than the requested order"));
    }
    let mut table = DimensionTable::new(order as u32);
    for m in 1..=order as u32 {
        let mut acc = BigRational::zero();
        for d in divisors(m) {
            let mu = moebius_mu(d as u64)?;
            if mu != 0 {
                acc += lambda.coeff((m / d) as usize) * q(mu as i64) / q(d as i64);
            }
        }
        table.set(m, to_count(&-acc, "Möbius-inverted rank", m)?);
    }
    Ok(table)
}

fn check_hilbert(h: &PowerSeries, order: usize) -> Result<Vec<BigInt>> {
    if h.truncation_order() < order {
        return Err(invalid("Hilbert series is shorter than the requested order"));
    }
    if !h.coeff(0).is_one() {
        return Err(invalid("Hilbert series must have constant term 1"));
    }
    (0..=order)
        .map(|k| {
            let c = h.coeff(k);
            if !c.is_integer() || c.is_negative() {
                Err(invalid(format!("Hilbert coefficient at degree {k} is not a nonnegative integer: {c}")))
            } else {
                Ok(c.to_integer())
            }
        })
        .collect()
}

/// `prod (1 - t^k)^{-l}` expanded: coefficients `C(l + j - 1, j)` on `t^{kj}`.
fn polynomial_factor(l: &BigInt, k: usize, order: usize) -> Vec<(usize, BigInt)> {
    let mut out = vec![(0, BigInt::one())];
    let mut c = BigInt::one();
    let mut j = 1usize;
    while k * j <= order {
        c = c * (l + BigInt::from(j - 1)) / BigInt::from(j);
        out.push((k * j, c.clone()));
        j += 1;
    }
    out
}

/// `(1 + t^k)^m` expanded: coefficients `C(m, j)` on `t^{kj}`.
fn exterior_factor(m: &BigInt, k: usize, order: usize) -> Vec<(usize, BigInt)> {
    let mut out = vec![(0, BigInt::one())];
    let mut c = BigInt::one();
    let mut j = 1usize;
    while k * j <= order && BigInt::from(j) <= *m {
        c = c * (m - BigInt::from(j - 1)) / BigInt::from(j);
        out.push((k * j, c.clone()));
        j += 1;
    }
    out
}

fn multiply_sparse(p: &[BigInt], factor: &[(usize, BigInt)]) -> Vec<BigInt> {
    let n = p.len();
    let mut out = vec![BigInt::zero(); n];
    for (i, a) in p.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (k, c) in factor {
            if i + k < n {
                out[i + k] += a * c;
            }
        }
    }
    out
}

fn pbw_match(h: &PowerSeries, order: usize, graded: bool) -> Result<DimensionTable> {
    let target = check_hilbert(h, order)?;
    let mut product = vec![BigInt::zero(); order + 1];
    product[0] = BigInt::one();
    let mut table = DimensionTable::new(order as u32);
    for k in 1..=order {
        let l = &target[k] - &product[k];
        if l.is_negative() {
            return Err(integrity(format!(
                "coefficient matching needs a negative generator count at degree {k}; not a symmetric-algebra Hilbert series"
            )));
        }
        table.set(k as u32, to_count_int(&l, "generator count", k as u32)?);
        if l.is_zero() {
            continue;
        }
        let factor = if graded && k % 2 == 1 {
            exterior_factor(&l, k, order)
        } else {
            polynomial_factor(&l, k, order)
        };
        product = multiply_sparse(&product, &factor);
    }
    Ok(table)
}

/// Unique `l_d` with `prod_d (1 - t^d)^{-l_d} = H` modulo `t^{N+1}`.
pub fn pbw_match_ungraded(h: &PowerSeries, order: usize) -> Result<DimensionTable> {
    pbw_match(h, order, false)
}

/// Unique `m_i` with `prod_{i odd} (1 + t^i)^{m_i} / prod_{i even} (1 - t^i)^{m_i} = H`.
pub fn pbw_match_graded(h: &PowerSeries, order: usize) -> Result<DimensionTable> {
    pbw_match(h, order, true)
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// `sum_{a + 2b = w} (-1)^b C(a+b, b) r^a / (a+b)`, i.e. minus the `w`-th
/// logarithmic coefficient of `1 - r s + s^2`.
fn binomial_sum(r: u32, w: u32) -> BigRational {
    let mut acc = BigRational::zero();
    for b in 0..=w / 2 {
        let a = w - 2 * b;
        let term = BigRational::new(binomial(a + b, b) * BigInt::from(r).pow(a), BigInt::from(a + b));
        if b % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Closed-form rank `l_d = sum_{c | d} mu(c)/c * binomial_sum(r, d/c)` of the
/// one-relator Lie algebra at weight `d`.
pub fn lie_rank_closed_form(r: u32, d: u32) -> Result<u128> {
    let mut acc = BigRational::zero();
    for c in divisors(d) {
        let mu = moebius_mu(c as u64)?;
        if mu != 0 {
            acc += binomial_sum(r, d / c) * q(mu as i64) / q(c as i64);
        }
    }
    to_count(&acc, "closed-form Lie rank", d)
}

fn manifold_denominator(n: u32, r: u32, order: usize) -> PowerSeries {
    PowerSeries::one_relator_denominator(&vec![n - 1; r as usize], 2 * n - 2, order)
}

/// Hilbert series `1 / (1 - r t^{n-1} + t^{2n-2})` truncated at `order`.
pub fn manifold_hilbert_series(n: u32, r: u32, order: usize) -> PowerSeries {
    manifold_denominator(n, r, order).inverse().expect("constant term is 1")
}

/// Rational homotopy ranks `m_j` for `j <= N`, from the closed form and
/// checked against graded coefficient matching.
pub fn rational_ranks_closed_form(n: u32, r: u32, order: usize) -> Result<DimensionTable> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    if r < 2 {
        return Err(invalid("the closed form for rational ranks needs r >= 2"));
    }
    let step = n - 1;
    let mut table = DimensionTable::new(order as u32);
    let mut d = 1u32;
    while (d * step) as usize <= order {
        let j = d * step;
        let mut acc = BigRational::zero();
        for c in divisors(d) {
            let mu = moebius_mu(c as u64)?;
            if mu == 0 {
                continue;
            }
            let s = if (j / c).is_multiple_of(2) { 1 } else { -1 };
            acc += binomial_sum(r, d / c) * q(s * mu as i64) / q(c as i64);
        }
        if j % 2 == 1 {
            acc = -acc;
        }
        table.set(j, to_count(&acc, "closed-form rational rank", j)?);
        d += 1;
    }
    let matched = pbw_match_graded(&manifold_hilbert_series(n, r, order), order)?;
    if matched != table {
        return Err(integrity(format!(
            "closed-form rational ranks disagree with graded coefficient matching for n={n}, r={r}"
        )));
    }
    Ok(table)
}

/// Number of `pi_* S^l` summands for each sphere dimension `l <= max_dim`,
/// keyed by `l`; only dimensions `l = d(n-1) + 1` appear.
pub fn sphere_summand_counts(n: u32, r: u32, max_dim: u32) -> Result<BTreeMap<u32, u128>> {
    if n < 2 {
        return Err(invalid("n must be at least 2"));
    }
    if r < 2 {
        return Err(invalid("sphere summand counts need r >= 2"));
    }
    let step = n - 1;
    let max_weight = max_dim.saturating_sub(1) / step;
    let mut out = BTreeMap::new();
    if max_weight == 0 {
        return Ok(out);
    }
    let lambda = log_lambda_coefficients(&manifold_denominator(2, r, max_weight as usize), max_weight as usize)?;
    let via_log = moebius_invert_dims(&lambda, max_weight as usize)?;
    for d in 1..=max_weight {
        let closed = lie_rank_closed_form(r, d)?;
        if closed != via_log.get(d) {
            return Err(integrity(format!(
                "closed-form count {closed} disagrees with logarithmic inversion {} at weight {d}",
                via_log.get(d)
            )));
        }
        out.insert(d * step + 1, closed);
    }
    Ok(out)
}

/// `(a + s * sqrt(c)) / 2` with `c` squarefree, plus a rational enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub a: i64,
    pub s: i64,
    pub c: i64,
    pub lower: BigRational,
    pub upper: BigRational,
}

impl QuadraticSurd {
    /// Decimal expansion truncated (not rounded) to `digits` places.
    pub fn decimal(&self, digits: u32) -> alloc::string::String {
        let scale = BigUint::from(10u32).pow(digits);
        let radicand = BigUint::from(self.c as u64) * BigUint::from(self.s as u64).pow(2) * &scale * &scale;
        let num = BigUint::from(self.a as u64) * &scale + radicand.sqrt();
        let value = num / BigUint::from(2u32);
        let int_part = &value / &scale;
        let frac = (&value % &scale).to_string();
        let pad = digits as usize - frac.len();
        format!("{int_part}.{}{frac}", "0".repeat(pad))
    }

    /// Human-readable symbolic form such as `(3+√5)/2` or `2+√3`.
    pub fn symbolic(&self) -> alloc::string::String {
        let root = if self.c == 1 { format!("{}", self.s) } else if self.s == 1 { format!("√{}", self.c) } else { format!("{}√{}", self.s, self.c) };
        if self.a % 2 == 0 && self.s % 2 == 0 {
            let half_root = if self.s / 2 == 1 { format!("√{}", self.c) } else { format!("{}√{}", self.s / 2, self.c) };
            format!("{}+{}", self.a / 2, half_root)
        } else {
            format!("({}+{})/2", self.a, root)
        }
    }
}

/// Exponential growth rate `(r + sqrt(r^2 - 4)) / 2` of the Lie ranks.
pub fn growth_rate(r: u32) -> Result<QuadraticSurd> {
    if r < 3 {
        return Err(invalid("growth rate is only defined for r >= 3"));
    }
    let disc = (r as i64) * (r as i64) - 4;
    let mut s = 1i64;
    let mut c = disc;
    let mut f = 2i64;
    while f * f <= c {
        while c % (f * f) == 0 {
            c /= f * f;
            s *= f;
        }
        f += 1;
    }
    let scale = BigInt::from(10u64).pow(15);
    let root = (BigInt::from(disc) * &scale * &scale).sqrt();
    let denom = &scale * BigInt::from(2);
    let base = BigInt::from(r) * &scale;
    let lower = BigRational::new(&base + &root, denom.clone());
    let upper = BigRational::new(&base + &root + BigInt::one(), denom);
    Ok(QuadraticSurd { a: r as i64, s, c, lower, upper })
}
