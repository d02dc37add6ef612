//! Chern number from a single projector: the non-commutative formula, its
//! higher-order finite-difference refinement, and the Bott index.
//!
//! Positions are integer cell indices. On a torus the commutator `[r̂, P]`
//! is realized with minimum-image displacements, i.e. as the first-order
//! expansion of `U P U^†` with `U = e^{2πi r̂/L}`; this keeps the formula
//! single-valued across the seam. With open boundaries and a truncation
//! margin `δL`, sites inside the window `[δL, L − δL)` carry the shifted
//! coordinate `r − δL ∈ [0, L')`, sites outside carry 0, and `L' = L − 2δL`
//! replaces `L`. The window applies per axis, and the commutator keeps the
//! minimum-image kernel with period `L'`: with a plain kernel the trace of
//! `P[[x, P], [y, P]]` over a finite space vanishes identically.

use alloc::vec::Vec;
use core::f64::consts::PI;

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::lattice::LatticeGeometry;
use crate::linalg;
use crate::operator::DiagonalUnitary;
use crate::result::{Diagnostics, InvariantResult, Method};
use crate::spectra::{Projector, StateSet};
use crate::tbc::Axis;

/// Imaginary residue allowed in a real-valued trace formula.
pub const RESIDUE_TOL: f64 = 1e-9;
/// Projected translations with a singular value at or below this are not
/// quasi-unitary.
pub const MIN_SINGULAR: f64 = 0.1;
/// Eigenphases this close to `±π` are branch-ambiguous.
pub const PHASE_BRANCH_TOL: f64 = 1e-6;
/// Bott-type sums must be this close to their quantized value.
pub const QUANTIZATION_TOL: f64 = 1e-8;

/// A diagonal position-like operator along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionAxis {
    values: Vec<f64>,
    length: f64,
    periodic: bool,
}

impl PositionAxis {
    pub fn new(values: Vec<f64>, length: f64, periodic: bool) -> Self {
        Self {
            values,
            length,
            periodic,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Period `L` (or `L'` when truncated).
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    /// `e^{2πi r̂/L}`
    pub fn twist(&self) -> DiagonalUnitary {
        let s = 2.0 * PI / self.length;
        DiagonalUnitary::from_angles(self.values.iter().map(|v| s * v))
    }

    /// `r_a − r_b`, as a minimum image on a torus. An exact half-period
    /// separation maps to 0 so the displacement stays antisymmetric.
    fn displacement(&self, a: usize, b: usize) -> f64 {
        let d = self.values[a] - self.values[b];
        if !self.periodic {
            return d;
        }
        let l = self.length;
        let w = d - l * libm::round(d / l);
        if (w.abs() - 0.5 * l).abs() < 1e-9 {
            0.0
        } else {
            w
        }
    }

    /// Same operator with every entry multiplied by `weights`.
    pub fn weighted(&self, weights: &[f64]) -> Self {
        Self {
            values: self.values.iter().zip(weights).map(|(v, w)| v * w).collect(),
            length: self.length,
            periodic: self.periodic,
        }
    }
}

/// Cell-coordinate position operators `r̂x`, `r̂y`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionOperators {
    pub x: PositionAxis,
    pub y: PositionAxis,
    margin: Option<usize>,
}

impl PositionOperators {
    /// Periodic positions over the whole torus.
    pub fn new(geom: &LatticeGeometry) -> Self {
        let xs = geom.sites().iter().map(|s| s.cx as f64).collect();
        let ys = geom.sites().iter().map(|s| s.cy as f64).collect();
        Self {
            x: PositionAxis::new(xs, geom.lx() as f64, true),
            y: PositionAxis::new(ys, geom.ly() as f64, true),
            margin: None,
        }
    }

    /// Positions restricted to the window `[δL, L − δL)` for open systems.
    pub fn truncated(geom: &LatticeGeometry, margin: usize) -> Result<Self> {
        if 2 * margin + 2 > geom.lx().min(geom.ly()) {
            return Err(Error::InvalidSelection {
                reason: "truncation margin leaves fewer than 2 cells",
            });
        }
        let window = |c: usize, len: usize| {
            if c >= margin && c < len - margin {
                (c - margin) as f64
            } else {
                0.0
            }
        };
        let xs = geom.sites().iter().map(|s| window(s.cx, geom.lx())).collect();
        let ys = geom.sites().iter().map(|s| window(s.cy, geom.ly())).collect();
        Ok(Self {
            x: PositionAxis::new(xs, (geom.lx() - 2 * margin) as f64, true),
            y: PositionAxis::new(ys, (geom.ly() - 2 * margin) as f64, true),
            margin: Some(margin),
        })
    }

    pub fn margin(&self) -> Option<usize> {
        self.margin
    }

    pub fn axis(&self, axis: Axis) -> &PositionAxis {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }

    /// Effective area `Lx'·Ly'`.
    pub fn area(&self) -> f64 {
        self.x.length * self.y.length
    }
}

/// `e^{2πi r̂_j / L_j}` along `axis`.
pub fn twist_unitary(pos: &PositionOperators, axis: Axis) -> DiagonalUnitary {
    pos.axis(axis).twist()
}

/// Weights of the central-difference derivative
/// `∂f ≈ Σ_n (c_n/2)(f(n) − f(−n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FDCoefficients {
    c: Vec<f64>,
}

impl FDCoefficients {
    pub fn order(&self) -> usize {
        self.c.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// Above order 8 the odd-power Vandermonde system is ill-conditioned.
    pub fn is_well_conditioned(&self) -> bool {
        self.order() <= 8
    }

    /// Residuals of the defining moment conditions, evaluated with
    /// error-free products and compensated summation so they reflect the
    /// stored coefficients rather than the evaluation.
    pub fn moment_residuals(&self) -> Vec<f64> {
        (1..=self.order())
            .map(|m| {
                let k = (2 * m - 1) as f64;
                let mut sum = if m == 1 { -1.0 } else { 0.0 };
                let mut comp = 0.0;
                let mut add = |x: f64| {
                    let t = sum + x;
                    comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
                    sum = t;
                };
                for (i, c) in self.c.iter().enumerate() {
                    let power = libm::pow((i + 1) as f64, k);
                    let prod = c * power;
                    add(prod);
                    add(libm::fma(*c, power, -prod));
                }
                sum + comp
            })
            .collect()
    }

    /// Moment residuals relative to `Σ_n |c_n| n^{2m−1}`.
    pub fn relative_moment_residuals(&self) -> Vec<f64> {
        self.moment_residuals()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let k = (2 * i + 1) as f64;
                let scale: f64 = self
                    .c
                    .iter()
                    .enumerate()
                    .map(|(n, c)| c.abs() * libm::pow((n + 1) as f64, k))
                    .sum();
                r.abs() / scale
            })
            .collect()
    }

    /// Requires `Q < L/2` for the shortest side.
    pub fn check_against(&self, min_length: f64) -> Result<()> {
        if 2.0 * self.order() as f64 >= min_length {
            return Err(Error::InvalidOrder {
                order: self.order(),
                limit: libm::ceil(min_length / 2.0) as usize,
            });
        }
        Ok(())
    }
}

/// Solves `Σ_n c_n n^{2m−1} = δ_{m1}` for `m = 1..Q`.
///
/// The odd-power Vandermonde system has the closed-form solution
/// `c_n = 2(−1)^{n+1} (Q!)² / (n (Q−n)! (Q+n)!)`, which is evaluated as a
/// running product so every coefficient is correctly rounded up to a few
/// ulps; elimination loses several digits by `Q = 7`.
pub fn fd_coefficients(order: usize) -> Result<FDCoefficients> {
    if order == 0 {
        return Err(Error::InvalidOrder { order, limit: 1 });
    }
    let q = order as f64;
    // r_n = (Q!)² / ((Q−n)! (Q+n)!) obeys r_n = r_{n−1} (Q−n+1)/(Q+n), r_0 = 1
    let mut ratio = 1.0;
    let c = (1..=order)
        .map(|n| {
            let nf = n as f64;
            ratio *= (q - nf + 1.0) / (q + nf);
            let sign = if n % 2 == 1 { 2.0 } else { -2.0 };
            sign * ratio / nf
        })
        .collect();
    Ok(FDCoefficients { c })
}

/// `i[r̂, P]` as a Hermitian matrix.
fn position_commutator(p: MatRef<'_, c64>, axis: &PositionAxis) -> Mat<c64> {
    Mat::from_fn(p.nrows(), p.ncols(), |a, b| {
        let d = axis.displacement(a, b);
        c64::new(0.0, d) * p[(a, b)]
    })
}

/// `Tr(P[[r̂x, P], [r̂y, P]])`
pub(crate) fn double_commutator_trace(p: MatRef<'_, c64>, x: &PositionAxis, y: &PositionAxis) -> c64 {
    let xh = position_commutator(p, x);
    let yh = position_commutator(p, y);
    // [r,P] = −i·Xh, so the product of two commutators picks up −1
    -linalg::trace_projector_commutator(p, xh.as_ref(), yh.as_ref())
}

fn real_or_err(z: c64) -> Result<(f64, f64)> {
    if z.im.abs() > RESIDUE_TOL {
        return Err(Error::ImaginaryResidue {
            residue: z.im.abs(),
            tolerance: RESIDUE_TOL,
        });
    }
    Ok((z.re, z.im.abs()))
}

/// `C = (2πi / (Lx'Ly')) Tr(P[[r̂x, P], [r̂y, P]])`.
pub fn noncommutative_chern(p: &Projector, pos: &PositionOperators) -> Result<InvariantResult> {
    let t = double_commutator_trace(p.as_ref(), &pos.x, &pos.y);
    let z = c64::new(0.0, 2.0 * PI / pos.area()) * t;
    let (value, residue) = real_or_err(z)?;
    Ok(InvariantResult::new(
        value,
        Method::Noncommutative,
        Diagnostics {
            imaginary_residue: Some(residue),
            ..Diagnostics::default()
        },
    ))
}

/// Single-cell variant: `2πi Σ_{α ∈ cell} ⟨α| P[[r̂x, P], [r̂y, P]] |α⟩`.
///
/// Averaging it over all cells gives [`noncommutative_chern`]; for clean
/// periodic systems every cell gives the same value.
pub fn noncommutative_chern_cell(
    p: &Projector,
    pos: &PositionOperators,
    geom: &LatticeGeometry,
    cell: (usize, usize),
) -> Result<InvariantResult> {
    let pm = p.as_ref();
    let xh = position_commutator(pm, &pos.x);
    let yh = position_commutator(pm, &pos.y);
    let n = pm.nrows();
    let mut t = c64::new(0.0, 0.0);
    for (i, s) in geom.sites().iter().enumerate() {
        if (s.cx, s.cy) != cell {
            continue;
        }
        // column i of Xh·Yh − Yh·Xh
        let yi = yh.col(i);
        let xi = xh.col(i);
        let xy = xh.as_ref() * yi;
        let yx = yh.as_ref() * xi;
        for j in 0..n {
            t += pm[(i, j)] * (xy[j] - yx[j]);
        }
    }
    let z = c64::new(0.0, 2.0 * PI) * (-t);
    let (value, residue) = real_or_err(z)?;
    Ok(InvariantResult::new(
        value,
        Method::Noncommutative,
        Diagnostics {
            imaginary_residue: Some(residue),
            ..Diagnostics::default()
        },
    ))
}

/// `D = Σ_n (c_n/2)(U^n P U^{−n} − U^{−n} P U^n)`, Hermitian.
fn fd_derivative(p: MatRef<'_, c64>, u: &DiagonalUnitary, coeffs: &FDCoefficients) -> Mat<c64> {
    let ph = u.phases();
    Mat::from_fn(p.nrows(), p.ncols(), |a, b| {
        let z = ph[a] * ph[b].conj();
        let mut zn = c64::new(1.0, 0.0);
        let mut s = 0.0;
        for c in coeffs.coefficients() {
            zn *= z;
            s += c * zn.im;
        }
        c64::new(0.0, s) * p[(a, b)]
    })
}

/// `C = Tr(P[Dx, Dy]) / (2πi)` with the finite-difference derivatives built
/// from the twist unitaries `Ux`, `Uy`.
pub fn noncommutative_chern_higher_order(
    p: &Projector,
    ux: &DiagonalUnitary,
    uy: &DiagonalUnitary,
    coeffs: &FDCoefficients,
) -> Result<InvariantResult> {
    let dx = fd_derivative(p.as_ref(), ux, coeffs);
    let dy = fd_derivative(p.as_ref(), uy, coeffs);
    let t = linalg::trace_projector_commutator(p.as_ref(), dx.as_ref(), dy.as_ref());
    let z = t / c64::new(0.0, 2.0 * PI);
    let (value, residue) = real_or_err(z)?;
    Ok(InvariantResult::new(
        value,
        Method::NoncommutativeHigherOrder {
            order: coeffs.order(),
        },
        Diagnostics {
            imaginary_residue: Some(residue),
            ..Diagnostics::default()
        },
    ))
}

/// Convenience wrapper building the twist unitaries from `pos` and checking
/// `Q < min(L)/2`.
pub fn noncommutative_chern_higher_order_at(
    p: &Projector,
    pos: &PositionOperators,
    order: usize,
) -> Result<InvariantResult> {
    let coeffs = fd_coefficients(order)?;
    coeffs.check_against(pos.x.length.min(pos.y.length))?;
    noncommutative_chern_higher_order(p, &pos.x.twist(), &pos.y.twist(), &coeffs)
}

/// Projected translation `Ψ^† U Ψ`, unitarized by its polar factor.
#[derive(Debug, Clone)]
pub struct ProjectedUnitary {
    pub unitary: Mat<c64>,
    pub singular_values: Vec<f64>,
}

impl ProjectedUnitary {
    pub fn min_singular(&self) -> f64 {
        self.singular_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_deviation(&self) -> f64 {
        self.singular_values
            .iter()
            .fold(0.0f64, |m, s| m.max((s - 1.0).abs()))
    }
}

pub fn projected_unitary(psi: MatRef<'_, c64>, u: &DiagonalUnitary) -> Result<ProjectedUnitary> {
    let m = linalg::overlap(psi, u.apply(psi).as_ref());
    let (unitary, singular_values) = linalg::unitarize(m.as_ref())?;
    let out = ProjectedUnitary {
        unitary,
        singular_values,
    };
    let min = out.min_singular();
    if min <= MIN_SINGULAR {
        return Err(Error::NotQuasiUnitary { min_singular: min });
    }
    Ok(out)
}

/// `Σ_k arg λ_k` over the eigenvalues of `Π factors`, each phase on the
/// principal branch. Returns the sum and the largest `|phase|`.
pub fn product_phase_sum(factors: &[MatRef<'_, c64>]) -> Result<(f64, f64)> {
    let mut prod = factors[0].to_owned();
    for f in &factors[1..] {
        prod = &prod * f;
    }
    let phases = linalg::eigenphases(prod.as_ref())?;
    let mut max = 0.0f64;
    for &ph in &phases {
        if ph.abs() > PI - PHASE_BRANCH_TOL {
            return Err(Error::BottBranch { phase: ph });
        }
        max = max.max(ph.abs());
    }
    Ok((phases.iter().sum(), max))
}

/// Matrix order inside the trace-log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BottOrdering {
    /// `𝒰_y^† 𝒰_x 𝒰_y 𝒰_x^†`
    #[default]
    Standard,
    /// `𝒰_x 𝒰_y 𝒰_x^† 𝒰_y^†`, a cyclic relative of the standard order.
    Commutator,
}

/// Phase sum of the Bott product for two unitarized translations.
pub(crate) fn bott_phase_sum(
    wx: MatRef<'_, c64>,
    wy: MatRef<'_, c64>,
    ordering: BottOrdering,
) -> Result<f64> {
    let (wxd, wyd) = (wx.adjoint().to_owned(), wy.adjoint().to_owned());
    let (wxd, wyd) = (wxd.as_ref(), wyd.as_ref());
    let factors = match ordering {
        BottOrdering::Standard => [wyd, wx, wy, wxd],
        BottOrdering::Commutator => [wx, wy, wxd, wyd],
    };
    Ok(product_phase_sum(&factors)?.0)
}

pub(crate) fn quantized(value: f64, step: f64) -> Result<f64> {
    let err = (value / step - libm::round(value / step)).abs() * step;
    if err > QUANTIZATION_TOL {
        return Err(Error::NotQuantized {
            value,
            tolerance: QUANTIZATION_TOL,
        });
    }
    Ok(err)
}

/// Bott index `(1/2π) Im Tr log(𝒰_y^† 𝒰_x 𝒰_y 𝒰_x^†)` of the unitarized
/// projected translations.
pub fn bott_index(ss: &StateSet, ux: &DiagonalUnitary, uy: &DiagonalUnitary) -> Result<InvariantResult> {
    bott_index_with(ss, ux, uy, BottOrdering::Standard)
}

pub fn bott_index_with(
    ss: &StateSet,
    ux: &DiagonalUnitary,
    uy: &DiagonalUnitary,
    ordering: BottOrdering,
) -> Result<InvariantResult> {
    let px = projected_unitary(ss.as_ref(), ux)?;
    let py = projected_unitary(ss.as_ref(), uy)?;
    let sum = bott_phase_sum(px.unitary.as_ref(), py.unitary.as_ref(), ordering)?;
    let value = sum / (2.0 * PI);
    let err = quantized(value, 1.0)?;
    Ok(InvariantResult::new(
        value,
        Method::Bott,
        Diagnostics {
            min_singular: Some(px.min_singular().min(py.min_singular())),
            unitarity_deviation: Some(px.max_deviation().max(py.max_deviation())),
            quantization_error: Some(err),
            ..Diagnostics::default()
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_honeycomb;
    use crate::models::{haldane_hamiltonian, BoundaryCondition, HaldaneParams};
    use crate::spectra::{eigendecompose, projector, select_targeted, Filling};

    #[test]
    fn fd_coefficients_known_orders() {
        assert_eq!(fd_coefficients(1).unwrap().coefficients(), &[1.0]);
        let c2 = fd_coefficients(2).unwrap();
        assert!((c2.coefficients()[0] - 4.0 / 3.0).abs() < 1e-14);
        assert!((c2.coefficients()[1] + 1.0 / 6.0).abs() < 1e-14);
        let c3 = fd_coefficients(3).unwrap();
        for (c, e) in c3.coefficients().iter().zip([1.5, -0.3, 1.0 / 30.0]) {
            assert!((c - e).abs() < 1e-13);
        }
        for q in 1..=8 {
            let c = fd_coefficients(q).unwrap();
            let abs = c.moment_residuals();
            assert!(abs[0].abs() < 1e-10, "Q = {q}");
            if q <= 6 {
                assert!(abs.iter().all(|r| r.abs() < 1e-10), "Q = {q}: {abs:?}");
            }
            assert!(c.relative_moment_residuals().iter().all(|r| *r < 1e-14), "Q = {q}");
        }
        assert!(fd_coefficients(0).is_err());
        assert!(!fd_coefficients(9).unwrap().is_well_conditioned());
    }

    #[test]
    fn twist_unitaries_commute_and_close() {
        let g = build_honeycomb(5, 4, false).unwrap();
        let pos = PositionOperators::new(&g);
        let ux = twist_unitary(&pos, Axis::X);
        let uy = twist_unitary(&pos, Axis::Y);
        for p in ux.pow(5).phases() {
            assert!(linalg::abs(*p - c64::new(1.0, 0.0)) < 1e-12);
        }
        assert_eq!(ux.compose(&uy), uy.compose(&ux));
    }

    #[test]
    fn truncated_positions() {
        let g = build_honeycomb(10, 10, false).unwrap();
        let pos = PositionOperators::truncated(&g, 3).unwrap();
        assert_eq!(pos.x.length(), 4.0);
        for (s, x) in g.sites().iter().zip(pos.x.values()) {
            let inside = (3..7).contains(&s.cx);
            assert_eq!(*x, if inside { (s.cx - 3) as f64 } else { 0.0 });
        }
        assert!(PositionOperators::truncated(&g, 4).is_ok());
        assert!(PositionOperators::truncated(&g, 5).is_err());
    }

    fn half_filled(l: usize, p: HaldaneParams) -> StateSet {
        let g = build_honeycomb(l, l, false).unwrap();
        let h = haldane_hamiltonian(&g, &p, &BoundaryCondition::periodic(), None).unwrap();
        select_targeted(&eigendecompose(&h).unwrap(), Filling::LowestN(l * l)).unwrap()
    }

    #[test]
    fn identity_projector_gives_zero() {
        let g = build_honeycomb(4, 4, false).unwrap();
        let n = g.num_sites();
        let ss = StateSet::from_columns(Mat::identity(n, n), Filling::LowestN(n)).unwrap();
        let c = noncommutative_chern(&projector(&ss), &PositionOperators::new(&g)).unwrap();
        assert!(c.value.abs() < 1e-12);
    }

    #[test]
    fn single_state_bott_is_zero() {
        let g = build_honeycomb(4, 4, false).unwrap();
        let n = g.num_sites();
        let mut e = Mat::<c64>::zeros(n, 1);
        e[(5, 0)] = c64::new(1.0, 0.0);
        let ss = StateSet::from_columns(e, Filling::LowestN(1)).unwrap();
        let pos = PositionOperators::new(&g);
        let b = bott_index(&ss, &pos.x.twist(), &pos.y.twist()).unwrap();
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn haldane_reference_point_real_space() {
        let l = 6;
        let p = HaldaneParams {
            t1: 1.0,
            t2: 0.5,
            phi: PI / 2.0,
            delta0: 0.0,
        };
        let ss = half_filled(l, p);
        let g = build_honeycomb(l, l, false).unwrap();
        let pos = PositionOperators::new(&g);
        let b = bott_index(&ss, &pos.x.twist(), &pos.y.twist()).unwrap();
        assert_eq!(b.integer, 1);
        let alt = bott_index_with(&ss, &pos.x.twist(), &pos.y.twist(), BottOrdering::Commutator)
            .unwrap();
        assert_eq!(alt.integer, b.integer);

        let proj = projector(&ss);
        let nc = noncommutative_chern(&proj, &pos).unwrap();
        assert!(nc.value > 0.5, "noncomm {}", nc.value);
        let q1 = noncommutative_chern_higher_order_at(&proj, &pos, 1).unwrap();
        assert!(q1.value > 0.5, "Q=1 {}", q1.value);

        let mut avg = 0.0;
        for cy in 0..l {
            for cx in 0..l {
                avg += noncommutative_chern_cell(&proj, &pos, &g, (cx, cy)).unwrap().value;
            }
        }
        avg /= (l * l) as f64;
        assert!((avg - nc.value).abs() < 1e-10);
    }
}
