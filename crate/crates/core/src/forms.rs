//! Quadratic forms over `F_q` held as symmetric Gram matrices.
//!
//! A form `sum_{i<=j} a_ij x_i x_j` has Gram entries `a_ii` on the diagonal
//! and `a_ij / 2` off it, so `F(x) = x G x^t`. The discriminant is
//! `det(G)`, meaningful up to nonzero squares.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{CharValue, FieldElement, FieldSpec, QuadraticCharacter};
use crate::linalg::Matrix;
use crate::projective::ProjectiveSpace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    field: FieldSpec,
    gram: Matrix,
    /// `a_ij` for `i <= j` in row order; the evaluation kernel.
    upper: Vec<FieldElement>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WittKind {
    Hyperbolic,
    Elliptic,
    Parabolic,
}

impl fmt::Display for WittKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WittKind::Hyperbolic => "hyperbolic",
            WittKind::Elliptic => "elliptic",
            WittKind::Parabolic => "parabolic",
        })
    }
}

/// Isometry type of a non-degenerate quadratic space in `m` variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WittClass {
    pub kind: WittKind,
    pub m: usize,
}

impl WittClass {
    /// Number of projective zeros of any form of this class over `F_q`.
    pub fn projective_zero_count(&self, q: u64) -> u64 {
        let k = (self.m / 2) as u32;
        match self.kind {
            WittKind::Hyperbolic => (q.pow(k - 1) + 1) * (q.pow(k) - 1) / (q - 1),
            WittKind::Elliptic => (q.pow(k - 1) - 1) * (q.pow(k) + 1) / (q - 1),
            WittKind::Parabolic => (q.pow(2 * k) - 1) / (q - 1),
        }
    }
}

/// Congruence to a diagonal form: `transform^t * gram * transform = diag(diagonal)`.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub transform: Matrix,
    pub diagonal: Vec<FieldElement>,
}

impl QuadraticForm {
    /// Builds `sum a_ij x_i x_j` from `(i, j) -> a_ij` pairs (0-based; a pair
    /// with `i > j` is read as `(j, i)`, repeated pairs accumulate).
    pub fn from_coeffs<I>(n: usize, field: &FieldSpec, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((usize, usize), FieldElement)>,
    {
        let mut upper = vec![FieldElement::ZERO; n * (n + 1) / 2];
        for ((i, j), a) in coeffs {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange { i, j, n });
            }
            if !field.contains(a) {
                return Err(Error::ElementOutOfRange { index: a.index() as u64, q: field.q() });
            }
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            let slot = upper_index(n, i, j);
            upper[slot] = field.add(upper[slot], a);
        }
        Self::from_upper(n, field, &upper)
    }

    /// Builds a form from its `n(n+1)/2` upper-triangular coefficients in row order.
    pub fn from_upper(n: usize, field: &FieldSpec, upper: &[FieldElement]) -> Result<Self> {
        if n == 0 {
            return Err(Error::WrongDimension { expected: ">= 1".into(), got: 0 });
        }
        let expected = n * (n + 1) / 2;
        if upper.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: upper.len() });
        }
        let half = field.inv(field.from_int(2))?;
        let mut gram = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let a = upper[upper_index(n, i, j)];
                if i == j {
                    gram.set(i, i, a);
                } else {
                    let h = field.mul(a, half);
                    gram.set(i, j, h);
                    gram.set(j, i, h);
                }
            }
        }
        Ok(QuadraticForm { field: field.clone(), gram, upper: upper.to_vec() })
    }

    pub fn from_gram(field: &FieldSpec, gram: Matrix) -> Result<Self> {
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let n = gram.rows();
        let two = field.from_int(2);
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let g = gram.get(i, j);
                upper.push(if i == j { g } else { field.mul(two, g) });
            }
        }
        Ok(QuadraticForm { field: field.clone(), gram, upper })
    }

    pub fn diagonal(field: &FieldSpec, d: &[FieldElement]) -> Result<Self> {
        Self::from_gram(field, Matrix::diagonal(d))
    }

    pub fn n(&self) -> usize {
        self.gram.rows()
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn upper_coeffs(&self) -> &[FieldElement] {
        &self.upper
    }

    pub fn evaluate(&self, v: &[FieldElement]) -> Result<FieldElement> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: v.len() });
        }
        Ok(self.eval(v))
    }

    /// Unchecked evaluation for hot loops; `v.len()` must equal `n`.
    #[inline]
    pub fn eval(&self, v: &[FieldElement]) -> FieldElement {
        let f = &self.field;
        let n = v.len();
        let mut acc = FieldElement::ZERO;
        let mut slot = 0;
        for i in 0..n {
            if v[i].is_zero() {
                slot += n - i;
                continue;
            }
            let mut row = FieldElement::ZERO;
            for &x in &v[i..] {
                row = f.add(row, f.mul(self.upper[slot], x));
                slot += 1;
            }
            acc = f.add(acc, f.mul(v[i], row));
        }
        acc
    }

    pub fn discriminant(&self) -> FieldElement {
        self.gram.det(&self.field)
    }

    pub fn is_smooth(&self) -> bool {
        !self.discriminant().is_zero()
    }

    fn require_smooth(&self) -> Result<()> {
        if self.is_smooth() {
            Ok(())
        } else {
            Err(Error::Degenerate)
        }
    }

    /// Symmetric elimination. A zero pivot is first swapped with a later
    /// nonzero diagonal entry; if the remaining diagonal is all zero,
    /// `x_i <- x_i + x_j` creates the pivot `2 g_ij`.
    pub fn diagonalize(&self) -> Result<Diagonalization> {
        self.require_smooth()?;
        let f = &self.field;
        let n = self.n();
        let mut g = self.gram.clone();
        let mut s = Matrix::identity(n);
        for i in 0..n {
            if g.get(i, i).is_zero() {
                if let Some(j) = (i + 1..n).find(|&j| !g.get(j, j).is_zero()) {
                    g.swap_rows(i, j);
                    g.swap_cols(i, j);
                    s.swap_cols(i, j);
                } else if let Some(j) = (i + 1..n).find(|&j| !g.get(i, j).is_zero()) {
                    g.add_col_multiple(i, j, FieldElement::ONE, f);
                    g.add_row_multiple(i, j, FieldElement::ONE, f);
                    s.add_col_multiple(i, j, FieldElement::ONE, f);
                } else {
                    return Err(Error::Degenerate);
                }
            }
            let pinv = f.inv(g.get(i, i))?;
            for j in i + 1..n {
                let factor = f.neg(f.mul(g.get(i, j), pinv));
                if factor.is_zero() {
                    continue;
                }
                g.add_col_multiple(j, i, factor, f);
                g.add_row_multiple(j, i, factor, f);
                s.add_col_multiple(j, i, factor, f);
            }
        }
        let diagonal = (0..n).map(|i| g.get(i, i)).collect();
        Ok(Diagonalization { transform: s, diagonal })
    }

    /// Hyperbolic/elliptic from the square class of `(-1)^(m/2) disc` when
    /// `m` is even; parabolic when `m` is odd.
    pub fn witt_classify(&self) -> Result<WittClass> {
        let disc = self.discriminant();
        if disc.is_zero() {
            return Err(Error::Degenerate);
        }
        let m = self.n();
        if m % 2 == 1 {
            return Ok(WittClass { kind: WittKind::Parabolic, m });
        }
        let f = &self.field;
        let signed = f.mul(f.sign_power((m / 2) as u64), disc);
        let kind = match f.chi(signed) {
            CharValue::Square => WittKind::Hyperbolic,
            _ => WittKind::Elliptic,
        };
        Ok(WittClass { kind, m })
    }

    /// Form with Gram matrix `gram^{-1}`.
    pub fn dual_form(&self) -> Result<QuadraticForm> {
        let inv = self.gram.inverse(&self.field).ok_or(Error::Degenerate)?;
        QuadraticForm::from_gram(&self.field, inv)
    }

    /// Zeros of the form in `P^{n-1}(F_q)`, by enumeration.
    pub fn projective_zero_count(&self) -> u64 {
        let space = ProjectiveSpace::new(self.n(), &self.field).expect("n >= 1");
        let mut cursor = space.cursor(0..space.len());
        let mut count = 0;
        while let Some(x) = cursor.next_coords() {
            if self.eval(x).is_zero() {
                count += 1;
            }
        }
        count
    }

    pub fn scaled(&self, c: FieldElement) -> QuadraticForm {
        QuadraticForm::from_gram(&self.field, self.gram.scale(c, &self.field)).expect("scaling keeps symmetry")
    }

    /// The form `x -> F(x S^t)`, Gram `S^t G S`.
    pub fn congruent(&self, s: &Matrix) -> Result<QuadraticForm> {
        let f = &self.field;
        let g = s.transpose().mul(&self.gram, f)?.mul(s, f)?;
        QuadraticForm::from_gram(f, g)
    }

    /// True when `other = c * self` for some nonzero `c`.
    pub fn is_proportional_to(&self, other: &QuadraticForm) -> bool {
        if self.field != other.field || self.n() != other.n() {
            return false;
        }
        let f = &self.field;
        let Some(idx) = self.upper.iter().position(|a| !a.is_zero()) else {
            return other.upper.iter().all(|a| a.is_zero());
        };
        if other.upper[idx].is_zero() {
            return false;
        }
        let ratio = f.div(other.upper[idx], self.upper[idx]).expect("nonzero");
        self.upper.iter().zip(&other.upper).all(|(&a, &b)| f.mul(ratio, a) == b)
    }

    /// `n q a_11 a_12 .. a_nn` with canonical element indices.
    pub fn to_line(&self) -> String {
        let mut out = format!("{} {}", self.n(), self.field.q());
        for a in &self.upper {
            out.push(' ');
            out.push_str(&a.to_string());
        }
        out
    }

    /// Parses `n q a_11 a_12 .. a_nn`. Integers are read as canonical element
    /// indices; negative integers denote negated elements, and over a prime
    /// field every integer is reduced mod `p`.
    pub fn parse_line(line: &str, field: &FieldSpec) -> Result<QuadraticForm> {
        let mut tokens = line.split_whitespace();
        let mut next_int = |what: &str| -> Result<i64> {
            let t = tokens.next().ok_or_else(|| Error::Parse(format!("missing {what}")))?;
            t.parse::<i64>().map_err(|_| Error::Parse(format!("{what}: '{t}' is not an integer")))
        };
        let n = next_int("n")?;
        let q = next_int("q")?;
        if n < 1 {
            return Err(Error::Parse(format!("n must be positive, got {n}")));
        }
        if q != field.q() as i64 {
            return Err(Error::Parse(format!("form is over q = {q} but the field is {field}")));
        }
        let n = n as usize;
        let count = n * (n + 1) / 2;
        let mut upper = Vec::with_capacity(count);
        for idx in 0..count {
            upper.push(int_to_element(field, next_int(&format!("coefficient #{}", idx + 1))?)?);
        }
        let rest: Vec<&str> = tokens.collect();
        if !rest.is_empty() {
            return Err(Error::Parse(format!("expected {count} coefficients for n = {n}, found extra tokens {rest:?}")));
        }
        QuadraticForm::from_upper(n, field, &upper)
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

/// Maps an integer to `F_q` as used by the form grammar.
pub fn int_to_element(field: &FieldSpec, v: i64) -> Result<FieldElement> {
    if field.k() == 1 {
        return Ok(field.from_int(v));
    }
    let mag = v.unsigned_abs();
    if mag >= field.q() as u64 {
        return Err(Error::ElementOutOfRange { index: mag, q: field.q() });
    }
    let e = field.element(mag as u32)?;
    Ok(if v < 0 { field.neg(e) } else { e })
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    // rows 0..i contribute n + (n-1) + .. + (n-i+1)
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}
