//! Small dense helpers shared by the invariant routines.

use alloc::vec::Vec;
use core::f64::consts::PI;

use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};

#[inline]
pub(crate) fn cis(phase: f64) -> c64 {
    let (s, c) = libm::sincos(phase);
    c64::new(c, s)
}

#[inline]
pub(crate) fn arg(z: c64) -> f64 {
    libm::atan2(z.im, z.re)
}

#[inline]
pub(crate) fn abs(z: c64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Maps an angle onto (-pi, pi].
pub(crate) fn wrap_angle(phase: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut p = phase - two_pi * libm::floor(phase / two_pi);
    if p > PI {
        p -= two_pi;
    }
    p
}

/// `Ψ_a^† Ψ_b`
pub(crate) fn overlap(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Mat<c64> {
    a.adjoint() * b
}

/// Rows of `m` scaled by the diagonal `d`, i.e. `diag(d) · m`.
pub(crate) fn scale_rows(d: &[c64], m: MatRef<'_, c64>) -> Mat<c64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| d[i] * m[(i, j)])
}

pub(crate) fn trace(m: MatRef<'_, c64>) -> c64 {
    let mut t = c64::new(0.0, 0.0);
    for i in 0..m.nrows().min(m.ncols()) {
        t += m[(i, i)];
    }
    t
}

/// `Tr(A · B)` without forming the product.
pub(crate) fn trace_of_product(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> c64 {
    let mut t = c64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            t += a[(i, k)] * b[(k, i)];
        }
    }
    t
}

pub(crate) fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(abs(a[(i, j)] - b[(i, j)]));
        }
    }
    m
}

/// Polar factor `W = U V^†` of `m = U Σ V^†` together with the singular values.
pub(crate) fn unitarize(m: MatRef<'_, c64>) -> Result<(Mat<c64>, Vec<f64>)> {
    let svd = m.svd().map_err(|_| Error::SvdConvergence { size: m.nrows() })?;
    let singular = svd.S().column_vector().iter().map(|s| s.re).collect();
    Ok((svd.U() * svd.V().adjoint(), singular))
}

/// Eigenphases of a (numerically) unitary matrix, each in (-pi, pi].
pub(crate) fn eigenphases(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    let values = m
        .eigenvalues()
        .map_err(|_| Error::EigenConvergence { size: m.nrows() })?;
    Ok(values.into_iter().map(arg).collect())
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenConvergence { size: m.nrows() })?;
    let values = evd.S().column_vector().iter().map(|s| s.re).collect();
    Ok((values, evd.U().to_owned()))
}

pub(crate) fn determinant(m: MatRef<'_, c64>) -> c64 {
    if m.nrows() == 0 {
        return c64::new(1.0, 0.0);
    }
    m.determinant()
}

/// `Tr(P [A, B])` for Hermitian `A` and `B`.
///
/// Uses `A P = (P A)^†`, so only one full product is formed.
pub(crate) fn trace_projector_commutator(
    p: MatRef<'_, c64>,
    a: MatRef<'_, c64>,
    b: MatRef<'_, c64>,
) -> c64 {
    // Tr(P[A,B]) = Tr([P,A] B)
    let pa = p * a;
    let n = p.nrows();
    let mut t = c64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            let comm = pa[(i, k)] - pa[(k, i)].conj();
            t += comm * b[(k, i)];
        }
    }
    t
}
