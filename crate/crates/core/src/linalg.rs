//! Complex linear algebra over small dense matrices.
//!
//! Everything here is sized for desk-scale ray spaces (dimension at most
//! [`MAX_DIMENSION`]): rays, rank-1 projectors, plane rotations, adjoints
//! and traces. All values are immutable after construction.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Largest ray-space dimension the crate supports.
pub const MAX_DIMENSION: usize = 64;

/// A dense square complex matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Operator {
    /// All-zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity matrix of the given dimension.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from rows; every row must have the same length as
    /// the number of rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == dim),
            "from_rows requires a square layout"
        );
        Self {
            dim,
            entries: rows.iter().flatten().copied().collect(),
        }
    }

    /// The plane rotation
    /// `[[cos θ, sin θ], [−sin θ, cos θ]]`
    /// acting on a two-dimensional space.
    pub fn rotation_2d(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_rows(&[
            vec![Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
            vec![Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
        ])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    /// Sum of the diagonal entries.
    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m.set(j, i, self.get(i, j).conj());
            }
        }
        m
    }

    /// Entrywise scaling by a real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Largest entry modulus, the max-norm used by every tolerance in
    /// this crate.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of the difference of two matrices.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.max_diff(&self.adjoint()) <= tolerance
    }

    pub fn is_idempotent(&self, tolerance: f64) -> bool {
        (self * self).max_diff(self) <= tolerance
    }

    /// Deviation of `U†U` from the identity in max-norm.
    pub fn unitarity_deviation(&self) -> f64 {
        (&self.adjoint() * self).max_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tolerance: f64) -> bool {
        self.unitarity_deviation() <= tolerance
    }
}

impl Mul for &Operator {
    type Output = Operator;

    fn mul(self, other: &Operator) -> Operator {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut sum = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    sum += self.get(i, k) * other.get(k, j);
                }
                out.set(i, j, sum);
            }
        }
        out
    }
}

impl Add for &Operator {
    type Output = Operator;

    fn add(self, other: &Operator) -> Operator {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;

    fn sub(self, other: &Operator) -> Operator {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(6);
        for i in 0..self.dim {
            write!(f, "[")?;
            for j in 0..self.dim {
                let e = self.get(i, j);
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:+.prec$}{:+.prec$}i", e.re, e.im, prec = prec)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// A unit vector representing a physical event; vectors differing by a
/// global phase describe the same ray.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    components: Vec<Complex64>,
}

impl Ray {
    /// Validates and normalizes a component vector.
    ///
    /// The zero vector is rejected outright; a norm farther than
    /// [`tol::RAY_NORM_INPUT`] from 1 is rejected as well, so decimal
    /// rounding in input files is tolerated without masking genuinely
    /// unnormalized data.
    pub fn new(components: Vec<Complex64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::ZeroVector);
        }
        let norm = components.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        if !norm.is_finite() || (norm - 1.0).abs() > tol::RAY_NORM_INPUT {
            return Err(Error::NormOutOfTolerance {
                norm,
                tolerance: tol::RAY_NORM_INPUT,
            });
        }
        Ok(Self {
            components: components.iter().map(|c| c / norm).collect(),
        })
    }

    /// The `index`-th standard basis vector (zero-based).
    pub fn standard_basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dim {dim}"
        );
        let mut components = vec![Complex64::new(0.0, 0.0); dim];
        components[index] = Complex64::new(1.0, 0.0);
        Self { components }
    }

    /// The two-dimensional ray `(cos θ, sin θ)`.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            components: vec![Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    /// Sesquilinear inner product `⟨self|other⟩`, conjugate-linear in
    /// `self`.
    pub fn inner(&self, other: &Ray) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Rank-1 projector `|self⟩⟨self|` with entries `v_i · conj(v_j)`.
    pub fn projector(&self) -> Projector {
        let n = self.dim();
        let mut m = Operator::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.components[i] * self.components[j].conj());
            }
        }
        Projector { op: m }
    }

    /// Ray equality: true when the projectors coincide, i.e. the vectors
    /// agree up to a global phase.
    pub fn ray_eq(&self, other: &Ray) -> bool {
        self.dim() == other.dim()
            && self.projector().op().max_diff(other.projector().op()) <= tol::VALIDATION
    }
}

/// A Hermitian idempotent operator; rank-1 instances carry unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    op: Operator,
}

impl Projector {
    pub fn op(&self) -> &Operator {
        &self.op
    }

    pub fn into_op(self) -> Operator {
        self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Checks the defining properties within [`tol::ALGEBRAIC`] before
    /// wrapping an arbitrary operator.
    pub fn try_from_operator(op: Operator) -> Result<Self> {
        if !op.is_hermitian(tol::ALGEBRAIC) {
            return Err(Error::InternalConsistency {
                message: "operator is not Hermitian".into(),
            });
        }
        if !op.is_idempotent(tol::ALGEBRAIC) {
            return Err(Error::InternalConsistency {
                message: "operator is not idempotent".into(),
            });
        }
        Ok(Self { op })
    }

    /// Conjugation `U P U⁻¹` by a unitary, producing the projector onto
    /// the transformed ray. `U⁻¹` is taken as `U†`.
    pub fn conjugated_by(&self, u: &Operator) -> Result<Projector> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.dim(),
            });
        }
        let deviation = u.unitarity_deviation();
        if deviation > tol::VALIDATION {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Projector {
            op: &(u * &self.op) * &u.adjoint(),
        })
    }
}

impl From<Projector> for Operator {
    fn from(p: Projector) -> Operator {
        p.op
    }
}
