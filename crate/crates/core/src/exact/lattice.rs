//! Integer lattice directions, unimodular matrices, and exact plane points.

use std::fmt;
use std::ops::Neg;

use num_integer::Integer;

use super::quad::{ExactError, QuadraticNumber};

/// An integer vector; directions of edges, normals and node eigenlines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeVector {
    pub x: i64,
    pub y: i64,
}

impl LatticeVector {
    pub fn new(x: i64, y: i64) -> Self {
        LatticeVector { x, y }
    }

    /// Nonzero with coprime coordinates.
    pub fn is_primitive(&self) -> bool {
        (self.x != 0 || self.y != 0) && self.x.abs().gcd(&self.y.abs()) == 1
    }

    pub fn det(&self, other: &Self) -> i64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(&self, other: &Self) -> i64 {
        self.x * other.x + self.y * other.y
    }

    /// Rotate a quarter turn counter-clockwise; the inward normal of a
    /// counter-clockwise edge direction.
    pub fn perp_left(&self) -> Self {
        LatticeVector::new(-self.y, self.x)
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector::new(-self.x, -self.y)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A 2x2 integer matrix of determinant +1 or -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnimodularMatrix {
    rows: [[i64; 2]; 2],
}

impl UnimodularMatrix {
    pub fn new(rows: [[i64; 2]; 2]) -> Result<Self, ExactError> {
        let det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0];
        if det == 1 || det == -1 {
            Ok(UnimodularMatrix { rows })
        } else {
            Err(ExactError::NotUnimodular(det))
        }
    }

    pub fn identity() -> Self {
        UnimodularMatrix {
            rows: [[1, 0], [0, 1]],
        }
    }

    /// Bypasses the determinant check; for feeding deliberately broken
    /// matrices to verification code under test.
    #[doc(hidden)]
    pub fn new_unchecked(rows: [[i64; 2]; 2]) -> Self {
        UnimodularMatrix { rows }
    }

    /// The upper shear [[1, t], [0, 1]].
    pub fn upper_shear(t: i64) -> Self {
        UnimodularMatrix {
            rows: [[1, t], [0, 1]],
        }
    }

    /// The lower shear [[1, 0], [t, 1]].
    pub fn lower_shear(t: i64) -> Self {
        UnimodularMatrix {
            rows: [[1, 0], [t, 1]],
        }
    }

    /// The axis swap [[0, 1], [1, 0]].
    pub fn swap_axes() -> Self {
        UnimodularMatrix {
            rows: [[0, 1], [1, 0]],
        }
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        self.rows
    }

    pub fn det(&self) -> i64 {
        self.rows[0][0] * self.rows[1][1] - self.rows[0][1] * self.rows[1][0]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let a = self.rows;
        let b = other.rows;
        UnimodularMatrix {
            rows: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    pub fn inverse(&self) -> Self {
        let e = self.det();
        let [[a, b], [c, d]] = self.rows;
        UnimodularMatrix {
            rows: [[d * e, -b * e], [-c * e, a * e]],
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::identity();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn apply_lattice(&self, v: &LatticeVector) -> LatticeVector {
        LatticeVector::new(
            self.rows[0][0] * v.x + self.rows[0][1] * v.y,
            self.rows[1][0] * v.x + self.rows[1][1] * v.y,
        )
    }

    pub fn apply(&self, x: &QuadraticNumber, y: &QuadraticNumber) -> (QuadraticNumber, QuadraticNumber) {
        (
            x.mul_int(self.rows[0][0]) + y.mul_int(self.rows[0][1]),
            x.mul_int(self.rows[1][0]) + y.mul_int(self.rows[1][1]),
        )
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.rows[0][0], self.rows[0][1], self.rows[1][0], self.rows[1][1]
        )
    }
}

/// A point of the plane with exact coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PlanePoint {
    pub x: QuadraticNumber,
    pub y: QuadraticNumber,
}

impl PlanePoint {
    pub fn new(x: QuadraticNumber, y: QuadraticNumber) -> Self {
        PlanePoint { x, y }
    }

    pub fn sub(&self, other: &Self) -> (QuadraticNumber, QuadraticNumber) {
        (&self.x - &other.x, &self.y - &other.y)
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Factor the segment p -> q as t * u with u a primitive lattice vector and
/// t > 0; t is the integral affine length of the segment.
pub fn primitive_decompose(
    p: &PlanePoint,
    q: &PlanePoint,
) -> Result<(LatticeVector, QuadraticNumber), ExactError> {
    let (dx, dy) = q.sub(p);
    let to_i64 = |n: &num_bigint::BigInt| -> Result<i64, ExactError> {
        i64::try_from(n.clone()).map_err(|_| ExactError::LatticeOverflow)
    };
    if dx.is_zero() && dy.is_zero() {
        return Err(ExactError::DegenerateSegment);
    }
    if dy.is_zero() {
        let s = if dx.is_positive() { 1 } else { -1 };
        return Ok((LatticeVector::new(s, 0), dx.abs()));
    }
    if dx.is_zero() {
        let s = if dy.is_positive() { 1 } else { -1 };
        return Ok((LatticeVector::new(0, s), dy.abs()));
    }
    let ratio = dy.checked_div(&dx)?;
    let Some(r) = ratio.as_rational() else {
        return Err(ExactError::IrrationalDirection);
    };
    // r = m/n in lowest terms with n > 0, so (n, m) is primitive
    let m = to_i64(r.numer())?;
    let n = to_i64(r.denom())?;
    let s = if dx.is_positive() { 1 } else { -1 };
    let u = LatticeVector::new(s * n, s * m);
    let t = dx.checked_div(&QuadraticNumber::from_int(s * n))?;
    debug_assert!(t.is_positive());
    Ok((u, t))
}

/// Shear monodromy of a node with primitive eigen direction v:
/// x -> x + det(v, x) v. Fixes v and has determinant +1.
pub fn monodromy(v: &LatticeVector) -> Result<UnimodularMatrix, ExactError> {
    if !v.is_primitive() {
        return Err(ExactError::NonPrimitive);
    }
    // columns are the images of the basis vectors
    let rows = [
        [1 - v.x * v.y, v.x * v.x],
        [-v.y * v.y, 1 + v.x * v.y],
    ];
    let m = UnimodularMatrix { rows };
    debug_assert_eq!(m.det(), 1);
    Ok(m)
}
