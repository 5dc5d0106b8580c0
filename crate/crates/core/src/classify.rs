//! On/external/internal classification of points relative to a smooth
//! quadric `X = {F = 0}` in `P^{n-1}`, `n` odd.
//!
//! Three routes are provided and are expected to agree everywhere:
//!
//! * [`classify_algebraic`]: the square class of `(-1)^((n-1)/2) * disc(F) * F(P)`.
//! * [`classify_geometric`]: the Witt type of the section form `G_P` cut on the
//!   dual quadric by the hyperplane of hyperplanes through `P`
//!   (hyperbolic is external, elliptic is internal).
//! * [`classify_tangent_count`]: plane conics only; counts tangent lines
//!   through `P` (1 on the conic, 2 external, 0 internal).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{CharValue, FieldElement, QuadraticCharacter};
use crate::forms::{QuadraticForm, WittKind};
use crate::linalg::Matrix;
use crate::projective::{lines_through, points_on_line, ProjectivePoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PointClass {
    #[serde(rename = "on")]
    OnQuadric,
    #[serde(rename = "ext")]
    External,
    #[serde(rename = "int")]
    Internal,
}

impl PointClass {
    pub const ALL: [PointClass; 3] = [PointClass::OnQuadric, PointClass::External, PointClass::Internal];

    /// Stable report encoding.
    pub fn code(self) -> &'static str {
        match self {
            PointClass::OnQuadric => "on",
            PointClass::External => "ext",
            PointClass::Internal => "int",
        }
    }

    /// Row/column index in a 3x3 census.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for PointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for PointClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" => Ok(PointClass::OnQuadric),
            "ext" => Ok(PointClass::External),
            "int" => Ok(PointClass::Internal),
            other => Err(Error::Parse(format!("unknown point class '{other}'"))),
        }
    }
}

fn require_odd_smooth(q: &QuadraticForm) -> Result<()> {
    if q.n() % 2 == 0 {
        return Err(Error::EvenDimension(q.n()));
    }
    if !q.is_smooth() {
        return Err(Error::Degenerate);
    }
    Ok(())
}

fn require_point(q: &QuadraticForm, p: &ProjectivePoint) -> Result<()> {
    if p.dim() != q.n() {
        return Err(Error::DimensionMismatch { expected: q.n(), got: p.dim() });
    }
    Ok(())
}

/// Precomputed `(-1)^((n-1)/2) * disc(F)` for classifying many points.
#[derive(Clone, Debug)]
pub struct AlgebraicClassifier<'a> {
    form: &'a QuadraticForm,
    signed_disc: FieldElement,
}

impl<'a> AlgebraicClassifier<'a> {
    pub fn new(form: &'a QuadraticForm) -> Result<Self> {
        require_odd_smooth(form)?;
        let f = form.field();
        let signed_disc = f.mul(f.sign_power(((form.n() - 1) / 2) as u64), form.discriminant());
        Ok(AlgebraicClassifier { form, signed_disc })
    }

    /// `(-1)^((n-1)/2) * disc(F)`
    pub fn signed_discriminant(&self) -> FieldElement {
        self.signed_disc
    }

    #[inline]
    pub fn classify_with<C: QuadraticCharacter + ?Sized>(&self, x: &[FieldElement], chars: &C) -> PointClass {
        let value = self.form.eval(x);
        if value.is_zero() {
            return PointClass::OnQuadric;
        }
        match chars.chi(self.form.field().mul(self.signed_disc, value)) {
            CharValue::Square => PointClass::External,
            _ => PointClass::Internal,
        }
    }
}

pub fn classify_algebraic(q: &QuadraticForm, p: &ProjectivePoint) -> Result<PointClass> {
    require_point(q, p)?;
    let c = AlgebraicClassifier::new(q)?;
    Ok(c.classify_with(p.coords(), q.field()))
}

/// The dual-quadric section through `P`: `G_P = B^t A^{-1} B`, where `B`
/// parametrizes the hyperplanes `{y : y.P = 0}` by the coordinates other
/// than `P`'s pivot.
#[derive(Clone, Debug)]
pub struct HyperplaneSection {
    /// Coordinate of `P` that was eliminated (the first nonzero one).
    pub pivot: usize,
    /// `n x (n-1)` matrix; row `pivot` is `-p_j` over the non-pivot `j`, the
    /// remaining rows form the identity.
    pub basis: Matrix,
    pub form: QuadraticForm,
}

pub fn hyperplane_section_form(q: &QuadraticForm, p: &ProjectivePoint) -> Result<HyperplaneSection> {
    require_point(q, p)?;
    let n = q.n();
    if n < 3 {
        return Err(Error::WrongDimension { expected: ">= 3".into(), got: n });
    }
    let f = q.field();
    let a_inv = q.gram().inverse(f).ok_or(Error::Degenerate)?;
    let pivot = p.pivot();
    let mut basis = Matrix::zeros(n, n - 1);
    for (col, j) in (0..n).filter(|&j| j != pivot).enumerate() {
        basis.set(j, col, FieldElement::ONE);
        basis.set(pivot, col, f.neg(p.coords()[j]));
    }
    let g = basis.transpose().mul(&a_inv, f)?.mul(&basis, f)?;
    let form = QuadraticForm::from_gram(f, g)?;
    Ok(HyperplaneSection { pivot, basis, form })
}

pub fn classify_geometric(q: &QuadraticForm, p: &ProjectivePoint) -> Result<PointClass> {
    require_point(q, p)?;
    require_odd_smooth(q)?;
    if q.eval(p.coords()).is_zero() {
        return Ok(PointClass::OnQuadric);
    }
    let section = hyperplane_section_form(q, p)?;
    Ok(match section.form.witt_classify()?.kind {
        WittKind::Hyperbolic => PointClass::External,
        WittKind::Elliptic => PointClass::Internal,
        WittKind::Parabolic => unreachable!("section of an odd-dimensional quadric has an even variable count"),
    })
}

fn require_conic(q: &QuadraticForm) -> Result<()> {
    if q.n() != 3 {
        return Err(Error::WrongDimension { expected: "3".into(), got: q.n() });
    }
    if !q.is_smooth() {
        return Err(Error::Degenerate);
    }
    Ok(())
}

/// Number of lines through `P` meeting the conic in exactly one point.
pub fn tangent_count(q: &QuadraticForm, p: &ProjectivePoint) -> Result<usize> {
    require_conic(q)?;
    require_point(q, p)?;
    let f = q.field();
    let mut tangents = 0;
    for line in lines_through(p, f)? {
        let meets = points_on_line(&line, f)?.iter().filter(|x| q.eval(x.coords()).is_zero()).count();
        if meets == 1 {
            tangents += 1;
        }
    }
    Ok(tangents)
}

pub fn classify_tangent_count(q: &QuadraticForm, p: &ProjectivePoint) -> Result<PointClass> {
    let on = q.n() == p.dim() && q.eval(p.coords()).is_zero();
    match (tangent_count(q, p)?, on) {
        (1, true) => Ok(PointClass::OnQuadric),
        (2, false) => Ok(PointClass::External),
        (0, false) => Ok(PointClass::Internal),
        (t, _) => Err(Error::TangentCount(t)),
    }
}
