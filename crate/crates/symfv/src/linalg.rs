//! Exact 3-vectors and 3×3 matrices over [`Scalar`].
//!
//! Matrices are row-major and act on column vectors from the left, so a
//! group element `A` maps a point `p` to `A·p`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Scalar, ScalarError};

/// Errors from linear algebra routines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    /// `solve3` on a matrix with zero determinant.
    #[error("singular matrix")]
    Singular,
    /// Underlying field arithmetic failed.
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A point or direction in 3-space.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vec3(pub [Scalar; 3]);

impl Vec3 {
    /// Build from three scalars.
    pub fn new(x: Scalar, y: Scalar, z: Scalar) -> Vec3 {
        Vec3([x, y, z])
    }

    /// Build from three integers.
    pub fn ints(x: i64, y: i64, z: i64) -> Vec3 {
        Vec3([Scalar::from_int(x), Scalar::from_int(y), Scalar::from_int(z)])
    }

    /// The zero vector.
    pub fn zero() -> Vec3 {
        Vec3::ints(0, 0, 0)
    }

    /// Component `i`.
    pub fn get(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    /// x-coordinate.
    pub fn x(&self) -> &Scalar {
        &self.0[0]
    }

    /// y-coordinate.
    pub fn y(&self) -> &Scalar {
        &self.0[1]
    }

    /// z-coordinate.
    pub fn z(&self) -> &Scalar {
        &self.0[2]
    }

    /// True when all components are exactly zero.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    /// Multiply by a scalar.
    pub fn scale(&self, s: &Scalar) -> Vec3 {
        Vec3([&self.0[0] * s, &self.0[1] * s, &self.0[2] * s])
    }

    /// Squared Euclidean norm.
    pub fn norm2(&self) -> Scalar {
        dot(self, self)
    }

    /// Floating-point approximation, for diagnostics only.
    pub fn to_f64(&self) -> [f64; 3] {
        [self.0[0].to_f64(), self.0[1].to_f64(), self.0[2].to_f64()]
    }

    /// Lexicographic comparison by exact value.
    pub fn lex_cmp(&self, other: &Vec3) -> std::cmp::Ordering {
        for i in 0..3 {
            let c = self.0[i].cmp(&other.0[i]);
            if c != std::cmp::Ordering::Equal {
                return c;
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl fmt::Debug for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl Add<&Vec3> for &Vec3 {
    type Output = Vec3;
    fn add(self, o: &Vec3) -> Vec3 {
        Vec3([&self.0[0] + &o.0[0], &self.0[1] + &o.0[1], &self.0[2] + &o.0[2]])
    }
}

impl Sub<&Vec3> for &Vec3 {
    type Output = Vec3;
    fn sub(self, o: &Vec3) -> Vec3 {
        Vec3([&self.0[0] - &o.0[0], &self.0[1] - &o.0[1], &self.0[2] - &o.0[2]])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        &self + &o
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        &self - &o
    }
}

impl Neg for &Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-&self.0[0], -&self.0[1], -&self.0[2]])
    }
}

impl Mul<&Scalar> for &Vec3 {
    type Output = Vec3;
    fn mul(self, s: &Scalar) -> Vec3 {
        self.scale(s)
    }
}

/// Dot product.
pub fn dot(a: &Vec3, b: &Vec3) -> Scalar {
    let mut s = &a.0[0] * &b.0[0];
    s += &(&a.0[1] * &b.0[1]);
    s += &(&a.0[2] * &b.0[2]);
    s
}

/// Cross product.
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    let [a0, a1, a2] = &a.0;
    let [b0, b1, b2] = &b.0;
    Vec3([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
}

/// A 3×3 matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat3(pub [Vec3; 3]);

impl Mat3 {
    /// Build from rows.
    pub fn from_rows(r0: Vec3, r1: Vec3, r2: Vec3) -> Mat3 {
        Mat3([r0, r1, r2])
    }

    /// Build from an integer array.
    pub fn ints(m: [[i64; 3]; 3]) -> Mat3 {
        Mat3([
            Vec3::ints(m[0][0], m[0][1], m[0][2]),
            Vec3::ints(m[1][0], m[1][1], m[1][2]),
            Vec3::ints(m[2][0], m[2][1], m[2][2]),
        ])
    }

    /// Identity.
    pub fn identity() -> Mat3 {
        Mat3::ints([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    /// Entry `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.0[i].0[j]
    }

    /// Row `i`.
    pub fn row(&self, i: usize) -> &Vec3 {
        &self.0[i]
    }

    /// Column `j`.
    pub fn col(&self, j: usize) -> Vec3 {
        Vec3([self.at(0, j).clone(), self.at(1, j).clone(), self.at(2, j).clone()])
    }

    /// Multiply every entry by a scalar.
    pub fn scale(&self, s: &Scalar) -> Mat3 {
        Mat3([self.0[0].scale(s), self.0[1].scale(s), self.0[2].scale(s)])
    }

    /// True when `AᵀA = I`.
    pub fn is_orthogonal(&self) -> bool {
        matmul(&transpose(self), self) == Mat3::identity()
    }

    /// Trace.
    pub fn trace(&self) -> Scalar {
        self.at(0, 0) + self.at(1, 1) + self.at(2, 2)
    }
}

impl fmt::Debug for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}; {:?}; {:?}]", self.0[0], self.0[1], self.0[2])
    }
}

impl Sub<&Mat3> for &Mat3 {
    type Output = Mat3;
    fn sub(self, o: &Mat3) -> Mat3 {
        Mat3([&self.0[0] - &o.0[0], &self.0[1] - &o.0[1], &self.0[2] - &o.0[2]])
    }
}

impl Neg for &Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        Mat3([-&self.0[0], -&self.0[1], -&self.0[2]])
    }
}

/// Matrix–vector product `A·v`.
pub fn matvec(a: &Mat3, v: &Vec3) -> Vec3 {
    Vec3([dot(&a.0[0], v), dot(&a.0[1], v), dot(&a.0[2], v)])
}

/// Matrix product `A·B`.
pub fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let cols = [b.col(0), b.col(1), b.col(2)];
    let row = |r: &Vec3| Vec3([dot(r, &cols[0]), dot(r, &cols[1]), dot(r, &cols[2])]);
    Mat3([row(&a.0[0]), row(&a.0[1]), row(&a.0[2])])
}

/// Transpose.
pub fn transpose(a: &Mat3) -> Mat3 {
    Mat3([a.col(0), a.col(1), a.col(2)])
}

/// Determinant (triple product of the rows).
pub fn det(a: &Mat3) -> Scalar {
    dot(&a.0[0], &cross(&a.0[1], &a.0[2]))
}

/// Solve `A·x = b` by Cramer's rule.
pub fn solve3(a: &Mat3, b: &Vec3) -> Result<Vec3, LinalgError> {
    let d = det(a);
    if d.is_zero() {
        return Err(LinalgError::Singular);
    }
    let mut out = Vec::with_capacity(3);
    for j in 0..3 {
        let mut cols = [a.col(0), a.col(1), a.col(2)];
        cols[j] = b.clone();
        let m = transpose(&Mat3(cols));
        out.push(det(&m).checked_div(&d)?);
    }
    let z = out.pop().unwrap();
    let y = out.pop().unwrap();
    let x = out.pop().unwrap();
    Ok(Vec3([x, y, z]))
}

/// Sign of `det[q−p; r−p; s−p]`: positive when `s` lies on the side of the
/// plane `pqr` that the normal `(q−p)×(r−p)` points to.
pub fn orient3d(p: &Vec3, q: &Vec3, r: &Vec3, s: &Vec3) -> i32 {
    let u = q - p;
    let v = r - p;
    let w = s - p;
    dot(&cross(&u, &v), &w).sign()
}

/// Rotation by `cos, sin` about the z-axis.
pub fn rot_z(c: &Scalar, s: &Scalar) -> Mat3 {
    let z = Scalar::zero();
    let o = Scalar::one();
    Mat3([
        Vec3([c.clone(), -s, z.clone()]),
        Vec3([s.clone(), c.clone(), z.clone()]),
        Vec3([z.clone(), z, o]),
    ])
}
