//! Block operators relative to the splitting `H = H+ ⊕ H−`.
//!
//! A [`BlockOperator`] stores the four blocks
//!
//! ```text
//!     [ A11  A12 ]    A11: H+ → H+   A12: H− → H+
//!     [ A21  A22 ]    A21: H+ → H−   A22: H− → H−
//! ```
//!
//! and the blocks are the single source of truth: dense assembly and
//! disassembly copy entries and round-trip bit-exactly.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, hstack, op_norm, polar, schatten_norm, ComplexMatrix};

/// Dimensions of `H+` and `H−` at this truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splitting {
    pub dim_plus: usize,
    pub dim_minus: usize,
}

impl Splitting {
    pub fn new(dim_plus: usize, dim_minus: usize) -> Result<Self> {
        if dim_plus == 0 || dim_minus == 0 {
            return Err(Error::DimensionMismatch(format!(
                "splitting needs both sides >= 1, got {dim_plus}+{dim_minus}"
            )));
        }
        Ok(Self {
            dim_plus,
            dim_minus,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim_plus + self.dim_minus
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    splitting: Splitting,
    pub a11: ComplexMatrix,
    pub a12: ComplexMatrix,
    pub a21: ComplexMatrix,
    pub a22: ComplexMatrix,
}

impl BlockOperator {
    pub fn from_blocks(
        splitting: Splitting,
        a11: ComplexMatrix,
        a12: ComplexMatrix,
        a21: ComplexMatrix,
        a22: ComplexMatrix,
    ) -> Result<Self> {
        let (p, m) = (splitting.dim_plus, splitting.dim_minus);
        let shapes = [
            ("A11", a11.shape(), (p, p)),
            ("A12", a12.shape(), (p, m)),
            ("A21", a21.shape(), (m, p)),
            ("A22", a22.shape(), (m, m)),
        ];
        for (name, got, want) in shapes {
            if got != want {
                return Err(Error::DimensionMismatch(format!(
                    "{name} has shape {got:?}, expected {want:?}"
                )));
            }
        }
        Ok(Self {
            splitting,
            a11,
            a12,
            a21,
            a22,
        })
    }

    pub fn from_dense(splitting: Splitting, m: &ComplexMatrix) -> Result<Self> {
        let n = splitting.dim();
        if m.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "dense operator is {:?}, splitting needs {n}x{n}",
                m.shape()
            )));
        }
        let (p, q) = (splitting.dim_plus, splitting.dim_minus);
        Ok(Self {
            splitting,
            a11: m.view((0, 0), (p, p)).into_owned(),
            a12: m.view((0, p), (p, q)).into_owned(),
            a21: m.view((p, 0), (q, p)).into_owned(),
            a22: m.view((p, p), (q, q)).into_owned(),
        })
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let (p, q) = (self.splitting.dim_plus, self.splitting.dim_minus);
        let mut m = ComplexMatrix::zeros(p + q, p + q);
        m.view_mut((0, 0), (p, p)).copy_from(&self.a11);
        m.view_mut((0, p), (p, q)).copy_from(&self.a12);
        m.view_mut((p, 0), (q, p)).copy_from(&self.a21);
        m.view_mut((p, p), (q, q)).copy_from(&self.a22);
        m
    }

    pub fn splitting(&self) -> Splitting {
        self.splitting
    }

    pub fn zeros(splitting: Splitting) -> Self {
        let (p, q) = (splitting.dim_plus, splitting.dim_minus);
        Self {
            splitting,
            a11: ComplexMatrix::zeros(p, p),
            a12: ComplexMatrix::zeros(p, q),
            a21: ComplexMatrix::zeros(q, p),
            a22: ComplexMatrix::zeros(q, q),
        }
    }

    pub fn identity(splitting: Splitting) -> Self {
        let mut out = Self::zeros(splitting);
        out.a11 = linalg::identity(splitting.dim_plus);
        out.a22 = linalg::identity(splitting.dim_minus);
        out
    }

    /// The projection `E+` onto `H+`.
    pub fn e_plus(splitting: Splitting) -> Self {
        let mut out = Self::zeros(splitting);
        out.a11 = linalg::identity(splitting.dim_plus);
        out
    }

    /// The projection `E−` onto `H−`.
    pub fn e_minus(splitting: Splitting) -> Self {
        let mut out = Self::zeros(splitting);
        out.a22 = linalg::identity(splitting.dim_minus);
        out
    }

    /// Block-diagonal operator `diag(d_plus, d_minus)`.
    pub fn block_diagonal(d_plus: ComplexMatrix, d_minus: ComplexMatrix) -> Result<Self> {
        let splitting = Splitting::new(d_plus.nrows(), d_minus.nrows())?;
        let (p, q) = (splitting.dim_plus, splitting.dim_minus);
        Self::from_blocks(
            splitting,
            d_plus,
            ComplexMatrix::zeros(p, q),
            ComplexMatrix::zeros(q, p),
            d_minus,
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            splitting: self.splitting,
            a11: &self.a11 * s,
            a12: &self.a12 * s,
            a21: &self.a21 * s,
            a22: &self.a22 * s,
        }
    }

    /// Blocks conjugate-transposed with corners swapped.
    pub fn adjoint(&self) -> Self {
        Self {
            splitting: self.splitting,
            a11: self.a11.adjoint(),
            a12: self.a21.adjoint(),
            a21: self.a12.adjoint(),
            a22: self.a22.adjoint(),
        }
    }

    /// `1 − self`.
    pub fn complement(&self) -> Self {
        &Self::identity(self.splitting) - self
    }

    pub fn trace(&self) -> Complex64 {
        self.a11.trace() + self.a22.trace()
    }

    pub fn op_norm(&self) -> f64 {
        op_norm(&self.to_dense())
    }

    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        schatten_norm(&self.to_dense(), p)
    }

    /// Frobenius norms of `P² − P` and `P − P*`.
    pub fn projection_defects(&self) -> (f64, f64) {
        let d = self.to_dense();
        ((&d * &d - &d).norm(), linalg::hermitian_defect(&d))
    }

    pub fn ensure_projection(&self, tol: f64) -> Result<()> {
        let (idempotency, asymmetry) = self.projection_defects();
        if idempotency > tol || asymmetry > tol || !linalg::is_finite(&self.to_dense()) {
            return Err(Error::NotAProjection {
                idempotency,
                asymmetry,
                tol,
            });
        }
        Ok(())
    }

    /// `‖A11‖ + ‖A22‖ + ‖A12‖_p + ‖A21‖_p`.
    pub fn norm_infty_p(&self, p: f64) -> Result<f64> {
        norm_infty_p(self, p)
    }

    /// `[A, E+]`.
    pub fn commutator_with_eplus(&self) -> Self {
        commutator_with_eplus(self)
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            self.splitting, other.splitting,
            "block operators on different splittings"
        );
    }
}

impl<'a> Add<&'a BlockOperator> for &'a BlockOperator {
    type Output = BlockOperator;
    fn add(self, rhs: &BlockOperator) -> BlockOperator {
        self.check_same(rhs);
        BlockOperator {
            splitting: self.splitting,
            a11: &self.a11 + &rhs.a11,
            a12: &self.a12 + &rhs.a12,
            a21: &self.a21 + &rhs.a21,
            a22: &self.a22 + &rhs.a22,
        }
    }
}

impl<'a> Sub<&'a BlockOperator> for &'a BlockOperator {
    type Output = BlockOperator;
    fn sub(self, rhs: &BlockOperator) -> BlockOperator {
        self.check_same(rhs);
        BlockOperator {
            splitting: self.splitting,
            a11: &self.a11 - &rhs.a11,
            a12: &self.a12 - &rhs.a12,
            a21: &self.a21 - &rhs.a21,
            a22: &self.a22 - &rhs.a22,
        }
    }
}

impl<'a> Mul<&'a BlockOperator> for &'a BlockOperator {
    type Output = BlockOperator;
    fn mul(self, rhs: &BlockOperator) -> BlockOperator {
        self.check_same(rhs);
        BlockOperator {
            splitting: self.splitting,
            a11: &self.a11 * &rhs.a11 + &self.a12 * &rhs.a21,
            a12: &self.a11 * &rhs.a12 + &self.a12 * &rhs.a22,
            a21: &self.a21 * &rhs.a11 + &self.a22 * &rhs.a21,
            a22: &self.a21 * &rhs.a12 + &self.a22 * &rhs.a22,
        }
    }
}

/// Mixed norm: operator norm on the diagonal blocks, Schatten p-norm on the corners.
pub fn norm_infty_p(a: &BlockOperator, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidP(p));
    }
    Ok(op_norm(&a.a11)
        + op_norm(&a.a22)
        + schatten_norm(&a.a12, p)?
        + schatten_norm(&a.a21, p)?)
}

/// `[A, E+] = AE+ − E+A = [[0, −A12], [A21, 0]]`.
pub fn commutator_with_eplus(a: &BlockOperator) -> BlockOperator {
    let s = a.splitting;
    let mut out = BlockOperator::zeros(s);
    out.a12 = -a.a12.clone();
    out.a21 = a.a21.clone();
    out
}

pub fn adjoint(a: &BlockOperator) -> BlockOperator {
    a.adjoint()
}

/// Result of [`transport_unitary`].
#[derive(Debug, Clone)]
pub struct Transport {
    pub unitary: BlockOperator,
    /// Smallest singular value of `S = QP + (1−Q)(1−P)`.
    pub sigma_min: f64,
}

/// Unitary polar factor of `S = QP + (1−Q)(1−P)`; satisfies `UPU* = Q`.
pub fn transport_unitary(p: &BlockOperator, q: &BlockOperator) -> Result<Transport> {
    let n = p.splitting().dim();
    let pd = p.to_dense();
    let qd = q.to_dense();
    let one = linalg::identity(n);
    let s = &qd * &pd + (&one - &qd) * (&one - &pd);
    let tol = linalg::TAU;
    match polar(&s, tol) {
        Ok(pol) => Ok(Transport {
            unitary: BlockOperator::from_dense(p.splitting(), &pol.unitary)?,
            sigma_min: pol.sigma_min,
        }),
        Err(Error::Singular { sigma_min, .. }) => Err(Error::SectionUndefined { sigma_min }),
        Err(e) => Err(e),
    }
}

/// Serialized dense matrix, row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&ComplexMatrix> for MatrixRecord {
    fn from(m: &ComplexMatrix) -> Self {
        let mut re = Vec::with_capacity(m.len());
        let mut im = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            re,
            im,
        }
    }
}

impl TryFrom<&MatrixRecord> for ComplexMatrix {
    type Error = Error;
    fn try_from(r: &MatrixRecord) -> Result<Self> {
        let n = r.rows * r.cols;
        if r.re.len() != n || r.im.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix record {}x{} carries {} real and {} imaginary entries",
                r.rows,
                r.cols,
                r.re.len(),
                r.im.len()
            )));
        }
        let m = ComplexMatrix::from_fn(r.rows, r.cols, |i, j| {
            Complex64::new(r.re[i * r.cols + j], r.im[i * r.cols + j])
        });
        linalg::ensure_finite(&m)?;
        Ok(m)
    }
}

/// `#[serde(with = "matrix_serde")]` adapter for [`ComplexMatrix`] fields.
pub mod matrix_serde {
    use super::MatrixRecord;
    use crate::linalg::ComplexMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixRecord::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
        let rec = MatrixRecord::deserialize(d)?;
        ComplexMatrix::try_from(&rec).map_err(serde::de::Error::custom)
    }
}

/// On-disk form of a [`BlockOperator`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockOperatorRecord {
    pub schema_version: u32,
    pub dim_plus: usize,
    pub dim_minus: usize,
    pub a11: MatrixRecord,
    pub a12: MatrixRecord,
    pub a21: MatrixRecord,
    pub a22: MatrixRecord,
}

impl From<&BlockOperator> for BlockOperatorRecord {
    fn from(a: &BlockOperator) -> Self {
        Self {
            schema_version: crate::SCHEMA_VERSION,
            dim_plus: a.splitting.dim_plus,
            dim_minus: a.splitting.dim_minus,
            a11: (&a.a11).into(),
            a12: (&a.a12).into(),
            a21: (&a.a21).into(),
            a22: (&a.a22).into(),
        }
    }
}

impl TryFrom<&BlockOperatorRecord> for BlockOperator {
    type Error = Error;
    fn try_from(r: &BlockOperatorRecord) -> Result<Self> {
        BlockOperator::from_blocks(
            Splitting::new(r.dim_plus, r.dim_minus)?,
            (&r.a11).try_into()?,
            (&r.a12).try_into()?,
            (&r.a21).try_into()?,
            (&r.a22).try_into()?,
        )
    }
}

impl Serialize for BlockOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BlockOperatorRecord::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BlockOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = BlockOperatorRecord::deserialize(d)?;
        BlockOperator::try_from(&rec).map_err(serde::de::Error::custom)
    }
}

/// Dense `[v1 | v2 | …]` on the full space from an `H+` column block and an `H−` column block.
pub fn embed_columns(
    splitting: Splitting,
    plus: &ComplexMatrix,
    minus: &ComplexMatrix,
) -> ComplexMatrix {
    let n = splitting.dim();
    let p = splitting.dim_plus;
    let mut plus_full = ComplexMatrix::zeros(n, plus.ncols());
    plus_full.view_mut((0, 0), (p, plus.ncols())).copy_from(plus);
    let mut minus_full = ComplexMatrix::zeros(n, minus.ncols());
    minus_full
        .view_mut((p, 0), (splitting.dim_minus, minus.ncols()))
        .copy_from(minus);
    hstack(&[&plus_full, &minus_full], n)
}
