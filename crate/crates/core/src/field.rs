//! Exact arithmetic in finite fields `F_q`, `q = p^k` with `p` an odd prime.
//!
//! Elements are stored by their canonical index: the coefficient vector
//! `(c_0, .., c_{k-1})` of the polynomial representative, read as the
//! base-`p` integer `c_0 + c_1 p + .. + c_{k-1} p^{k-1}`. The ordering of
//! [`FieldElement`] is therefore the canonical element ordering, and the
//! index doubles as a table position.
//!
//! Extension fields below the table budget carry log/exp tables (and an
//! addition table when `q^2` also fits), so the enumeration loops never
//! touch polynomial arithmetic.

use std::fmt;
use std::ops::Mul;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Default ceiling on the number of entries in any per-field lookup table.
pub const DEFAULT_TABLE_BUDGET: usize = 1 << 20;

/// An element of `F_q`, identified by its canonical index in `[0, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Canonical index of this element.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Value of the quadratic character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CharValue {
    NonSquare,
    Zero,
    Square,
}

impl CharValue {
    #[inline]
    pub fn value(self) -> i64 {
        match self {
            CharValue::NonSquare => -1,
            CharValue::Zero => 0,
            CharValue::Square => 1,
        }
    }

    #[inline]
    fn from_i8(v: i8) -> Self {
        match v {
            -1 => CharValue::NonSquare,
            0 => CharValue::Zero,
            _ => CharValue::Square,
        }
    }
}

impl Mul for CharValue {
    type Output = CharValue;

    fn mul(self, rhs: CharValue) -> CharValue {
        CharValue::from_i8((self.value() * rhs.value()) as i8)
    }
}

impl fmt::Display for CharValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.value())
    }
}

/// Anything that can evaluate the quadratic character of `F_q`.
pub trait QuadraticCharacter {
    fn chi(&self, a: FieldElement) -> CharValue;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

struct Tables {
    /// `log[a]` for nonzero `a`, relative to `generator`.
    log: Vec<u32>,
    /// `exp[i] = generator^i` for `i < 2(q-1)`, so sums of two logs index directly.
    exp: Vec<u32>,
    add: Option<Vec<u32>>,
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    /// `c_0, .., c_{k-1}, 1`
    modulus: Vec<u32>,
    /// `p^i` for `i <= k`
    place: Vec<u32>,
    tables: Option<Tables>,
}

/// A validated finite field of odd order. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.k == other.inner.k
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.inner.p)
            .field("k", &self.inner.k)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.k == 1 {
            write!(f, "F_{}", self.inner.p)
        } else {
            write!(f, "F_{} = F_{}[x]/({})", self.inner.q, self.inner.p, format_poly(&self.inner.modulus))
        }
    }
}

fn format_poly(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (deg, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let t = match (deg, c) {
            (0, c) => c.to_string(),
            (1, 1) => "x".to_string(),
            (1, c) => format!("{c}x"),
            (d, 1) => format!("x^{d}"),
            (d, c) => format!("{c}x^{d}"),
        };
        terms.push(t);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k` when it is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest == 1 {
        Some((p as u32, k))
    } else {
        None
    }
}

// Polynomials over Z_p as low-to-high coefficient vectors.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_pow(m[dm] as u64, p as u64 - 2, p as u64);
    while r.len() > dm {
        let top = r.len() - 1;
        let factor = r[top] as u64 * lead_inv % p as u64;
        let shift = top - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = factor * c as u64 % p as u64;
            r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn digits(mut v: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(v % p);
        v /= p;
    }
    out
}

/// True when the monic polynomial `m` (low-to-high) has no monic factor of
/// degree between 1 and `deg/2`.
pub(crate) fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg == 0 {
        return false;
    }
    for fdeg in 1..=deg / 2 {
        let count = (p as u64).pow(fdeg as u32);
        for v in 0..count {
            let mut f = digits(v as u32, p, fdeg);
            f.push(1);
            if poly_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// Builds `F_{p^k}`. With `modulus == None` the smallest monic irreducible
    /// of degree `k` is chosen; a supplied modulus is given low-to-high and
    /// must be monic of degree `k`.
    pub fn new(p: u32, k: u32, modulus: Option<&[u32]>) -> Result<Self> {
        Self::with_table_budget(p, k, modulus, DEFAULT_TABLE_BUDGET)
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// Builds the field of order `q` with its default modulus.
    pub fn from_order(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, k, None)
    }

    pub fn with_table_budget(p: u32, k: u32, modulus: Option<&[u32]>, budget: usize) -> Result<Self> {
        if p % 2 == 0 {
            return Err(Error::EvenCharacteristic(p));
        }
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidDegree(k));
        }
        let q = (p as u64)
            .checked_pow(k)
            .filter(|&q| q <= u32::MAX as u64 / 2)
            .ok_or(Error::FieldTooLarge { p, k })? as u32;
        if (p as u64) * (p as u64) > u32::MAX as u64 {
            return Err(Error::FieldTooLarge { p, k });
        }

        let modulus = match modulus {
            Some(m) => {
                if m.len() != k as usize + 1 || m[k as usize] != 1 {
                    return Err(Error::BadModulus(format!(
                        "expected a monic polynomial of degree {k}, got {}",
                        format_poly(m)
                    )));
                }
                if m.iter().any(|&c| c >= p) {
                    return Err(Error::BadModulus(format!("coefficient out of range mod {p}")));
                }
                if !is_irreducible(m, p) {
                    return Err(Error::BadModulus(format!("{} is reducible over Z_{p}", format_poly(m))));
                }
                m.to_vec()
            }
            None => smallest_irreducible(p, k),
        };

        let place = (0..=k).map(|i| p.pow(i)).collect();
        let mut inner = Inner { p, k, q, modulus, place, tables: None };
        if k > 1 && (q as usize) <= budget {
            inner.tables = Some(build_tables(&inner, budget));
        }
        Ok(FieldSpec { inner: Arc::new(inner) })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.inner.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Modulus coefficients, low to high, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn modulus_string(&self) -> String {
        format_poly(&self.inner.modulus)
    }

    /// Element with canonical index `index`.
    pub fn element(&self, index: u32) -> Result<FieldElement> {
        if index < self.inner.q {
            Ok(FieldElement(index))
        } else {
            Err(Error::ElementOutOfRange { index: index as u64, q: self.inner.q })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.inner.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.inner.k as usize || coeffs.iter().any(|&c| c >= self.inner.p) {
            return Err(Error::BadElement(format!("{coeffs:?} is not a reduced residue vector")));
        }
        Ok(FieldElement(
            coeffs.iter().zip(&self.inner.place).map(|(&c, &w)| c * w).sum(),
        ))
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        digits(a.0, self.inner.p, self.inner.k as usize)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.inner.q).map(FieldElement)
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.inner.q
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let inner = &*self.inner;
        if inner.k == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= inner.p { s - inner.p } else { s });
        }
        if let Some(add) = inner.tables.as_ref().and_then(|t| t.add.as_ref()) {
            return FieldElement(add[(a.0 * inner.q + b.0) as usize]);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        for i in 0..inner.k as usize {
            let s = x % inner.p + y % inner.p;
            out += (if s >= inner.p { s - inner.p } else { s }) * inner.place[i];
            x /= inner.p;
            y /= inner.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let inner = &*self.inner;
        if inner.k == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { inner.p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0;
        for i in 0..inner.k as usize {
            let c = x % inner.p;
            if c != 0 {
                out += (inner.p - c) * inner.place[i];
            }
            x /= inner.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let inner = &*self.inner;
        if inner.k == 1 {
            return FieldElement((a.0 as u64 * b.0 as u64 % inner.p as u64) as u32);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        match &inner.tables {
            Some(t) => FieldElement(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => FieldElement(poly_mul_index(inner, a.0, b.0)),
        }
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.inner.tables {
            let l = t.log[a.0 as usize];
            let qm1 = self.inner.q - 1;
            return Ok(FieldElement(t.exp[((qm1 - l) % qm1) as usize]));
        }
        Ok(self.pow(a, self.inner.q as u64 - 2))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Range-checked binary operation.
    pub fn arith(&self, a: FieldElement, b: FieldElement, op: ArithOp) -> Result<FieldElement> {
        for x in [a, b] {
            if !self.contains(x) {
                return Err(Error::ElementOutOfRange { index: x.0 as u64, q: self.inner.q });
            }
        }
        match op {
            ArithOp::Add => Ok(self.add(a, b)),
            ArithOp::Sub => Ok(self.sub(a, b)),
            ArithOp::Mul => Ok(self.mul(a, b)),
            ArithOp::Div => self.div(a, b),
        }
    }

    /// Quadratic character by Euler's criterion: `a^((q-1)/2)`.
    pub fn quadratic_character(&self, a: FieldElement) -> CharValue {
        if a.is_zero() {
            return CharValue::Zero;
        }
        let r = self.pow(a, (self.inner.q as u64 - 1) / 2);
        if r == FieldElement::ONE {
            CharValue::Square
        } else {
            debug_assert_eq!(r, self.neg(FieldElement::ONE));
            CharValue::NonSquare
        }
    }

    /// Smallest non-square in the canonical ordering.
    pub fn non_square_witness(&self) -> FieldElement {
        self.elements()
            .find(|&a| self.quadratic_character(a) == CharValue::NonSquare)
            .expect("odd-order fields always contain a non-square")
    }

    /// `(-1)^e`
    pub fn sign_power(&self, e: u64) -> FieldElement {
        if e % 2 == 0 {
            FieldElement::ONE
        } else {
            self.neg(FieldElement::ONE)
        }
    }
}

impl QuadraticCharacter for FieldSpec {
    fn chi(&self, a: FieldElement) -> CharValue {
        self.quadratic_character(a)
    }
}

fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    for v in 0..count {
        let mut m = digits(v as u32, p, k as usize);
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn poly_mul_index(inner: &Inner, a: u32, b: u32) -> u32 {
    let k = inner.k as usize;
    let p = inner.p as u64;
    let da = digits(a, inner.p, k);
    let db = digits(b, inner.p, k);
    let mut prod = vec![0u32; 2 * k - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p) as u32;
        }
    }
    let r = poly_rem(&prod, &inner.modulus, inner.p);
    r.iter().zip(&inner.place).map(|(&c, &w)| c * w).sum()
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn build_tables(inner: &Inner, budget: usize) -> Tables {
    let q = inner.q;
    let order = (q - 1) as u64;
    let factors = distinct_prime_factors(order);
    let pow = |mut b: u32, mut e: u64| {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mul_index(inner, acc, b);
            }
            b = poly_mul_index(inner, b, b);
            e >>= 1;
        }
        acc
    };
    let generator = (2..q)
        .find(|&g| factors.iter().all(|&r| pow(g, order / r) != 1))
        .expect("multiplicative group is cyclic");

    let mut exp = vec![0u32; 2 * (q as usize - 1)];
    let mut log = vec![0u32; q as usize];
    let mut x = 1u32;
    for i in 0..(q - 1) {
        exp[i as usize] = x;
        exp[(i + q - 1) as usize] = x;
        log[x as usize] = i;
        x = poly_mul_index(inner, x, generator);
    }

    let add = ((q as usize) * (q as usize) <= budget).then(|| {
        let mut t = vec![0u32; (q * q) as usize];
        for a in 0..q {
            let da = digits(a, inner.p, inner.k as usize);
            for b in 0..q {
                let db = digits(b, inner.p, inner.k as usize);
                t[(a * q + b) as usize] = da
                    .iter()
                    .zip(&db)
                    .zip(&inner.place)
                    .map(|((&x, &y), &w)| ((x + y) % inner.p) * w)
                    .sum();
            }
        }
        t
    });

    Tables { log, exp, add }
}

/// Precomputed quadratic character, indexed by canonical element.
#[derive(Clone, Debug)]
pub struct CharTable {
    values: Vec<i8>,
}

impl CharTable {
    pub fn new(field: &FieldSpec) -> Result<Self> {
        Self::with_budget(field, DEFAULT_TABLE_BUDGET)
    }

    /// Marks every square `x^2`; everything else nonzero is a non-square.
    pub fn with_budget(field: &FieldSpec, budget: usize) -> Result<Self> {
        let q = field.q() as usize;
        if q > budget {
            return Err(Error::TableBudget { q: field.q(), budget });
        }
        let mut values = vec![-1i8; q];
        values[0] = 0;
        for x in field.elements().skip(1) {
            values[field.mul(x, x).index() as usize] = 1;
        }
        Ok(CharTable { values })
    }

    #[inline]
    pub fn get(&self, a: FieldElement) -> CharValue {
        CharValue::from_i8(self.values[a.index() as usize])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = CharValue> + '_ {
        self.values.iter().map(|&v| CharValue::from_i8(v))
    }

    /// Flips the sign stored for `a`. Negative-control hook for the self-test.
    #[doc(hidden)]
    pub fn corrupt(&mut self, a: FieldElement) {
        let v = &mut self.values[a.index() as usize];
        *v = -*v;
    }
}

impl QuadraticCharacter for CharTable {
    #[inline]
    fn chi(&self, a: FieldElement) -> CharValue {
        self.get(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(f: &FieldSpec, i: u32) -> FieldElement {
        f.element(i).unwrap()
    }

    /// Monic quadratics over Z_p without a root, in canonical order.
    fn rootless_quadratics(p: u32) -> Vec<[u32; 3]> {
        let mut out = Vec::new();
        for b in 0..p {
            for c in 0..p {
                if (0..p).all(|x| (x * x + b * x + c) % p != 0) {
                    out.push([c, b, 1]);
                }
            }
        }
        out
    }

    #[test]
    fn prime_field_modulus_is_x() {
        let f = FieldSpec::prime(7).unwrap();
        assert_eq!(f.q(), 7);
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.modulus_string(), "x");
    }

    #[test]
    fn f9_default_modulus_matches_enumeration() {
        let f = FieldSpec::new(3, 2, None).unwrap();
        let oracle = rootless_quadratics(3);
        assert_eq!(f.modulus(), &oracle[0]);
        assert_eq!(f.modulus(), &[1, 0, 1]);
        // x * x = -1
        let x = f.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f.mul(x, x), fe(&f, 2));
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert!(matches!(FieldSpec::prime(2), Err(Error::EvenCharacteristic(2))));
        assert!(matches!(FieldSpec::prime(9), Err(Error::NotPrime(9))));
        assert!(matches!(FieldSpec::new(3, 0, None), Err(Error::InvalidDegree(0))));
    }

    #[test]
    fn rejects_reducible_or_misshapen_modulus() {
        // x^2 + 2 = (x+1)(x+2) over Z_3
        assert!(matches!(FieldSpec::new(3, 2, Some(&[2, 0, 1])), Err(Error::BadModulus(_))));
        assert!(matches!(FieldSpec::new(3, 2, Some(&[1, 1])), Err(Error::BadModulus(_))));
        assert!(matches!(FieldSpec::new(3, 2, Some(&[1, 0, 2])), Err(Error::BadModulus(_))));
        assert!(FieldSpec::new(3, 2, Some(&[2, 1, 1])).is_ok());
    }

    #[test]
    fn prime_field_examples() {
        let f = FieldSpec::prime(7).unwrap();
        assert_eq!(f.mul(fe(&f, 3), fe(&f, 5)), fe(&f, 1));
        assert_eq!(f.inv(fe(&f, 3)).unwrap(), fe(&f, 5));
        assert!(matches!(f.inv(f.zero()), Err(Error::DivisionByZero)));
        assert!(matches!(f.arith(f.one(), f.zero(), ArithOp::Div), Err(Error::DivisionByZero)));
        assert!(matches!(
            f.arith(FieldElement(7), f.one(), ArithOp::Add),
            Err(Error::ElementOutOfRange { .. })
        ));
    }

    #[test]
    fn character_examples() {
        let f = FieldSpec::prime(7).unwrap();
        assert_eq!(f.quadratic_character(f.zero()), CharValue::Zero);
        assert_eq!(f.quadratic_character(f.one()), CharValue::Square);
        assert_eq!(f.quadratic_character(fe(&f, 3)), CharValue::NonSquare);
    }

    #[test]
    fn non_square_witnesses() {
        assert_eq!(FieldSpec::prime(7).unwrap().non_square_witness().index(), 3);
        assert_eq!(FieldSpec::prime(3).unwrap().non_square_witness().index(), 2);
        let f9 = FieldSpec::new(3, 2, None).unwrap();
        let squares: Vec<u32> = f9.elements().skip(1).map(|x| f9.mul(x, x).index()).collect();
        let oracle = (1..9).find(|i| !squares.contains(i)).unwrap();
        assert_eq!(f9.non_square_witness().index(), oracle);
    }

    #[test]
    fn char_table_examples() {
        let t7: Vec<i64> = CharTable::new(&FieldSpec::prime(7).unwrap()).unwrap().values().map(CharValue::value).collect();
        assert_eq!(t7, vec![0, 1, 1, -1, 1, -1, -1]);
        let t3: Vec<i64> = CharTable::new(&FieldSpec::prime(3).unwrap()).unwrap().values().map(CharValue::value).collect();
        assert_eq!(t3, vec![0, 1, -1]);
        let f = FieldSpec::prime(11).unwrap();
        assert!(matches!(CharTable::with_budget(&f, 10), Err(Error::TableBudget { .. })));
    }

    const SMALL: &[(u32, u32)] = &[(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (3, 3)];

    #[test]
    fn field_axioms_exhaustive() {
        for &(p, k) in SMALL {
            let f = FieldSpec::new(p, k, None).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), f.zero());
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn table_and_polynomial_paths_agree() {
        let tabled = FieldSpec::new(5, 3, None).unwrap();
        let plain = FieldSpec::with_table_budget(5, 3, None, 0).unwrap();
        assert_eq!(tabled, plain);
        for a in tabled.elements() {
            assert_eq!(tabled.neg(a), plain.neg(a));
            for b in tabled.elements() {
                assert_eq!(tabled.mul(a, b), plain.mul(a, b));
                assert_eq!(tabled.add(a, b), plain.add(a, b));
            }
        }
    }

    #[test]
    fn character_properties() {
        for &(p, k) in SMALL {
            let f = FieldSpec::new(p, k, None).unwrap();
            let table = CharTable::new(&f).unwrap();
            let plus = f.elements().filter(|&a| f.quadratic_character(a) == CharValue::Square).count();
            let minus = f.elements().filter(|&a| f.quadratic_character(a) == CharValue::NonSquare).count();
            assert_eq!(plus, (f.q() as usize - 1) / 2);
            assert_eq!(minus, (f.q() as usize - 1) / 2);
            for a in f.elements() {
                assert_eq!(table.get(a), f.quadratic_character(a));
                if a.is_zero() {
                    continue;
                }
                assert_eq!(f.quadratic_character(f.mul(a, a)), CharValue::Square);
                assert_eq!(f.quadratic_character(f.inv(a).unwrap()), f.quadratic_character(a));
                for b in f.elements().skip(1) {
                    assert_eq!(
                        f.quadratic_character(f.mul(a, b)),
                        f.quadratic_character(a) * f.quadratic_character(b)
                    );
                }
            }
        }
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(343), Some((7, 3)));
        assert_eq!(prime_power(13), Some((13, 1)));
        assert_eq!(prime_power(15), None);
        assert_eq!(prime_power(1), None);
    }
}
