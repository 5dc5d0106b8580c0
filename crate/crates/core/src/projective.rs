//! Points of `P^{n-1}(F_q)` and their rank-indexed enumeration.
//!
//! Points are normalized so the first nonzero coordinate (the pivot) is 1.
//! The enumeration walks pivot blocks in order 0, 1, .., n-1; inside a block
//! the trailing coordinates count up lexicographically in canonical element
//! order, last coordinate fastest. Block `i` holds `q^(n-1-i)` points, so
//! rank and point convert in O(n) and chunks can be scanned independently.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectivePoint {
    coords: Vec<FieldElement>,
}

impl ProjectivePoint {
    /// Scales `v` by the inverse of its first nonzero coordinate.
    pub fn normalize(field: &FieldSpec, v: &[FieldElement]) -> Result<Self> {
        let pivot = v.iter().position(|x| !x.is_zero()).ok_or(Error::ZeroVector)?;
        let s = field.inv(v[pivot])?;
        let mut coords = vec![FieldElement::ZERO; v.len()];
        for (out, &x) in coords.iter_mut().zip(v).skip(pivot) {
            *out = field.mul(s, x);
        }
        Ok(ProjectivePoint { coords })
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Index of the first nonzero coordinate, which equals 1.
    pub fn pivot(&self) -> usize {
        self.coords.iter().position(|x| !x.is_zero()).expect("normalized point is nonzero")
    }

    pub fn dot(&self, other: &[FieldElement], field: &FieldSpec) -> FieldElement {
        self.coords
            .iter()
            .zip(other)
            .fold(FieldElement::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Line `{l_0 x_0 + l_1 x_1 + l_2 x_2 = 0}` in `P^2`, stored by its dual point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjectiveLine {
    dual: ProjectivePoint,
}

impl ProjectiveLine {
    pub fn new(field: &FieldSpec, l: &[FieldElement]) -> Result<Self> {
        if l.len() != 3 {
            return Err(Error::WrongDimension { expected: "3".into(), got: l.len() });
        }
        Ok(ProjectiveLine { dual: ProjectivePoint::normalize(field, l)? })
    }

    pub fn dual_coords(&self) -> &[FieldElement] {
        self.dual.coords()
    }

    pub fn contains(&self, p: &ProjectivePoint, field: &FieldSpec) -> bool {
        p.dot(self.dual.coords(), field).is_zero()
    }
}

impl fmt::Display for ProjectiveLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.dual.fmt(f)
    }
}

/// `P^{n-1}(F_q)` as an indexable set.
#[derive(Clone, Debug)]
pub struct ProjectiveSpace {
    n: usize,
    field: FieldSpec,
    /// `block_start[i]` is the rank of the first point with pivot `i`.
    block_start: Vec<u64>,
}

impl ProjectiveSpace {
    pub fn new(n: usize, field: &FieldSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::WrongDimension { expected: ">= 1".into(), got: 0 });
        }
        let q = field.q() as u64;
        let mut block_start = Vec::with_capacity(n + 1);
        let mut acc = 0u64;
        for i in 0..n {
            block_start.push(acc);
            acc = q
                .checked_pow((n - 1 - i) as u32)
                .and_then(|s| acc.checked_add(s))
                .ok_or(Error::WrongDimension { expected: "a countable space".into(), got: n })?;
        }
        block_start.push(acc);
        Ok(ProjectiveSpace { n, field: field.clone(), block_start })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// `(q^n - 1)/(q - 1)`
    pub fn len(&self) -> u64 {
        self.block_start[self.n]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn decode_into(&self, rank: u64, out: &mut [FieldElement]) {
        let pivot = self.block_start[1..].partition_point(|&s| s <= rank);
        let mut offset = rank - self.block_start[pivot];
        let q = self.field.q() as u64;
        out[..pivot].fill(FieldElement::ZERO);
        out[pivot] = FieldElement::ONE;
        for slot in out[pivot + 1..].iter_mut().rev() {
            *slot = self.field.element((offset % q) as u32).expect("digit below q");
            offset /= q;
        }
    }

    pub fn point_at(&self, rank: u64) -> Option<ProjectivePoint> {
        if rank >= self.len() {
            return None;
        }
        let mut coords = vec![FieldElement::ZERO; self.n];
        self.decode_into(rank, &mut coords);
        Some(ProjectivePoint { coords })
    }

    pub fn rank_of(&self, p: &ProjectivePoint) -> Result<u64> {
        if p.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: p.dim() });
        }
        let pivot = p.pivot();
        let q = self.field.q() as u64;
        let offset = p.coords[pivot + 1..].iter().fold(0u64, |acc, c| acc * q + c.index() as u64);
        Ok(self.block_start[pivot] + offset)
    }

    pub fn cursor(&self, ranks: Range<u64>) -> PointCursor<'_> {
        let end = ranks.end.min(self.len());
        let start = ranks.start.min(end);
        let mut coords = vec![FieldElement::ZERO; self.n];
        if start < end {
            self.decode_into(start, &mut coords);
        }
        PointCursor { space: self, coords, remaining: end - start, fresh: true }
    }

    pub fn points(&self) -> Points<'_> {
        Points { cursor: self.cursor(0..self.len()) }
    }

    /// Splits `0..len` into `parts` contiguous ranges of near-equal size.
    pub fn partition(&self, parts: usize) -> Vec<Range<u64>> {
        let parts = parts.max(1) as u64;
        let len = self.len();
        (0..parts).map(|i| (len * i / parts)..(len * (i + 1) / parts)).collect()
    }
}

/// Odometer over a rank range, handing out borrowed coordinate slices.
pub struct PointCursor<'a> {
    space: &'a ProjectiveSpace,
    coords: Vec<FieldElement>,
    remaining: u64,
    fresh: bool,
}

impl PointCursor<'_> {
    pub fn next_coords(&mut self) -> Option<&[FieldElement]> {
        if self.remaining == 0 {
            return None;
        }
        if !self.fresh {
            self.advance();
        }
        self.fresh = false;
        self.remaining -= 1;
        Some(&self.coords)
    }

    fn advance(&mut self) {
        let field = &self.space.field;
        let q = field.q();
        let pivot = self.coords.iter().position(|x| !x.is_zero()).expect("nonzero");
        for i in (pivot + 1..self.coords.len()).rev() {
            let next = self.coords[i].index() + 1;
            if next < q {
                self.coords[i] = field.element(next).expect("in range");
                return;
            }
            self.coords[i] = FieldElement::ZERO;
        }
        self.coords[pivot] = FieldElement::ZERO;
        self.coords[pivot + 1] = FieldElement::ONE;
    }
}

pub struct Points<'a> {
    cursor: PointCursor<'a>,
}

impl Iterator for Points<'_> {
    type Item = ProjectivePoint;

    fn next(&mut self) -> Option<ProjectivePoint> {
        self.cursor.next_coords().map(|c| ProjectivePoint { coords: c.to_vec() })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = self.cursor.remaining as usize;
        (r, Some(r))
    }
}

/// All points of `P^{n-1}(F_q)` in enumeration order.
pub fn enumerate_points(n: usize, field: &FieldSpec) -> Result<Vec<ProjectivePoint>> {
    if n < 2 {
        return Err(Error::WrongDimension { expected: ">= 2".into(), got: n });
    }
    Ok(ProjectiveSpace::new(n, field)?.points().collect())
}

/// Basis `e_j - v_j e_i` (j != pivot i) of the plane `{x : v.x = 0}` in `F_q^3`.
fn orthogonal_pencil(v: &ProjectivePoint, field: &FieldSpec) -> Result<Vec<ProjectivePoint>> {
    if v.dim() != 3 {
        return Err(Error::WrongDimension { expected: "3".into(), got: v.dim() });
    }
    let i = v.pivot();
    let basis: Vec<Vec<FieldElement>> = (0..3)
        .filter(|&j| j != i)
        .map(|j| {
            let mut b = vec![FieldElement::ZERO; 3];
            b[j] = FieldElement::ONE;
            b[i] = field.neg(v.coords[j]);
            b
        })
        .collect();
    // [s:t] over P^1, combined as s*u + t*w
    let line = ProjectiveSpace::new(2, field)?;
    line.points()
        .map(|st| {
            let (s, t) = (st.coords[0], st.coords[1]);
            let comb: Vec<FieldElement> = (0..3)
                .map(|c| field.add(field.mul(s, basis[0][c]), field.mul(t, basis[1][c])))
                .collect();
            ProjectivePoint::normalize(field, &comb)
        })
        .collect()
}

/// The `q + 1` lines of `P^2` through `p`.
pub fn lines_through(p: &ProjectivePoint, field: &FieldSpec) -> Result<Vec<ProjectiveLine>> {
    Ok(orthogonal_pencil(p, field)?.into_iter().map(|dual| ProjectiveLine { dual }).collect())
}

/// The `q + 1` points of a line in `P^2`.
pub fn points_on_line(l: &ProjectiveLine, field: &FieldSpec) -> Result<Vec<ProjectivePoint>> {
    orthogonal_pencil(&l.dual, field)
}
