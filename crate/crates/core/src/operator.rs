//! Dense Hermitian operators and diagonal unitaries.

use alloc::vec::Vec;

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg;

/// A dense complex matrix known to be Hermitian.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    matrix: Mat<c64>,
}

impl HermitianOperator {
    /// Wraps `matrix` after checking `max |M - M^†| <= tol`.
    pub fn new(matrix: Mat<c64>, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let deviation = hermiticity_deviation(matrix.as_ref());
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn into_inner(self) -> Mat<c64> {
        self.matrix
    }

    /// `D H D^†` for a diagonal unitary `D`.
    pub fn conjugated_by(&self, d: &DiagonalUnitary) -> Self {
        let n = self.dim();
        let p = d.phases();
        let mut m = Mat::<c64>::zeros(n, n);
        // fill one triangle and mirror it so the result stays exactly Hermitian
        for j in 0..n {
            m[(j, j)] = c64::new(self.matrix[(j, j)].re, 0.0);
            for i in j + 1..n {
                let v = p[i] * self.matrix[(i, j)] * p[j].conj();
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        Self { matrix: m }
    }

    /// `H + c·I`
    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..self.dim() {
            m[(i, i)] += c64::new(c, 0.0);
        }
        Self { matrix: m }
    }
}

pub(crate) fn hermiticity_deviation(m: MatRef<'_, c64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for j in 0..n {
        for i in j..n {
            dev = dev.max(linalg::abs(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    dev
}

/// A diagonal unitary `diag(e^{iφ_k})`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalUnitary {
    phases: Vec<c64>,
}

impl DiagonalUnitary {
    pub fn from_angles(angles: impl IntoIterator<Item = f64>) -> Self {
        Self {
            phases: angles.into_iter().map(linalg::cis).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            phases: alloc::vec![c64::new(1.0, 0.0); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[c64] {
        &self.phases
    }

    pub fn adjoint(&self) -> Self {
        Self {
            phases: self.phases.iter().map(|p| p.conj()).collect(),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            phases: self
                .phases
                .iter()
                .zip(&other.phases)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// Integer power, negative exponents allowed.
    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.adjoint() } else { self.clone() };
        let mut out = Self::identity(self.dim());
        for _ in 0..n.unsigned_abs() {
            out = out.compose(&base);
        }
        out
    }

    /// `diag(d) · m`
    pub fn apply(&self, m: MatRef<'_, c64>) -> Mat<c64> {
        linalg::scale_rows(&self.phases, m)
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| {
            if i == j {
                self.phases[i]
            } else {
                c64::new(0.0, 0.0)
            }
        })
    }
}
