//! Spin Chern numbers of quantum spin Hall states.
//!
//! Three real-space routes are provided: splitting the occupied space by the
//! sign of `P σz P`, generalized spin-dependent positions `r̂x σz`, and the
//! 2×2 Chern-number matrix of spin-resolved positions. A twist-torus
//! integration with the spin twist `e^{iθx σz}` serves as reference.
//!
//! All Chern-type entries use the same orientation as the charge Chern
//! number: `(2πi/(LxLy)) Tr(P[[r̂x, P], [r̂y, P]])` and the Bott product
//! `𝒰_y^† 𝒰_x 𝒰_y 𝒰_x^†`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::lattice::{LatticeGeometry, Spin};
use crate::linalg;
use crate::operator::DiagonalUnitary;
use crate::realspace::{
    self, bott_index, double_commutator_trace, noncommutative_chern, projected_unitary,
    quantized, BottOrdering, PositionAxis, PositionOperators,
};
use crate::result::{Diagnostics, InvariantResult, Method};
use crate::spectra::{projector, Projector, StateSet};
use crate::tbc::{chern_link_variable, TwistFamily, TwistGrid};

/// Smallest `|eigenvalue|` of `P σz P` on the occupied space for which the
/// spin sectors count as separated.
pub const SIGMA_GAP_TOL: f64 = 1e-6;

/// `σz` eigenvalue of every basis state.
pub fn sigma_z(geom: &LatticeGeometry) -> Vec<f64> {
    geom.sites()
        .iter()
        .map(|s| s.spin.map_or(1.0, Spin::sign))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinMethod {
    Noncommutative,
    Bott,
}

/// Occupied states split by the sign of `P σz P`.
#[derive(Debug, Clone)]
pub struct SpinSplitProjectors {
    pub plus: StateSet,
    pub minus: StateSet,
    pub sigma_gap: f64,
    /// Eigenvalues of `Ψ^† σz Ψ`, ascending.
    pub sigma_spectrum: Vec<f64>,
}

impl SpinSplitProjectors {
    pub fn projector_plus(&self) -> Projector {
        projector(&self.plus)
    }

    pub fn projector_minus(&self) -> Projector {
        projector(&self.minus)
    }
}

/// Diagonalizes `Ψ^† σz Ψ` (the matrix of `P σz P` on the range of `P`).
pub fn spin_spectral_split(ss: &StateSet, sigma_z: &[f64]) -> Result<SpinSplitProjectors> {
    if sigma_z.len() != ss.dim() {
        return Err(Error::DimensionMismatch {
            expected: ss.dim(),
            found: sigma_z.len(),
        });
    }
    let psi = ss.as_ref();
    let weighted = Mat::from_fn(psi.nrows(), psi.ncols(), |i, j| psi[(i, j)] * sigma_z[i]);
    let m = linalg::overlap(psi, weighted.as_ref());
    let (values, vectors) = linalg::hermitian_eigen(m.as_ref())?;
    let sigma_gap = values.iter().fold(f64::INFINITY, |g, v| g.min(v.abs()));
    if sigma_gap < SIGMA_GAP_TOL {
        return Err(Error::SpinSectorDegenerate { sigma_gap });
    }
    let k = values.iter().take_while(|&&v| v < 0.0).count();
    let rotated = psi * vectors.as_ref();
    let minus = rotated.subcols(0, k).to_owned();
    let plus = rotated.subcols(k, values.len() - k).to_owned();
    Ok(SpinSplitProjectors {
        plus: StateSet::from_columns_unchecked(plus, ss.policy()),
        minus: StateSet::from_columns_unchecked(minus, ss.policy()),
        sigma_gap,
        sigma_spectrum: values,
    })
}

/// How sector Bott indices are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SectorBott {
    /// `Ψ_±^† U Ψ_±` on the sector itself.
    #[default]
    Restricted,
    /// `P_± U P_± + (1 − P_±)` on the full space.
    Padded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinChern {
    pub plus: InvariantResult,
    pub minus: InvariantResult,
    /// `(C+ − C−)/2`
    pub spin: InvariantResult,
}

fn padded_bott(sector: &StateSet, ux: &DiagonalUnitary, uy: &DiagonalUnitary) -> Result<InvariantResult> {
    let psi = sector.as_ref();
    let n = psi.nrows();
    let pad = |u: &DiagonalUnitary| -> Result<realspace::ProjectedUnitary> {
        let small = linalg::overlap(psi, u.apply(psi).as_ref());
        let inner = psi * small.as_ref() * psi.adjoint();
        let proj = psi * psi.adjoint();
        let v = Mat::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            inner[(i, j)] + c64::new(id, 0.0) - proj[(i, j)]
        });
        let (unitary, singular_values) = linalg::unitarize(v.as_ref())?;
        let out = realspace::ProjectedUnitary {
            unitary,
            singular_values,
        };
        if out.min_singular() <= realspace::MIN_SINGULAR {
            return Err(Error::NotQuasiUnitary {
                min_singular: out.min_singular(),
            });
        }
        Ok(out)
    };
    let vx = pad(ux)?;
    let vy = pad(uy)?;
    let sum = realspace::bott_phase_sum(vx.unitary.as_ref(), vy.unitary.as_ref(), BottOrdering::Standard)?;
    let value = sum / (2.0 * PI);
    let err = quantized(value, 1.0)?;
    Ok(InvariantResult::new(
        value,
        Method::Bott,
        Diagnostics {
            min_singular: Some(vx.min_singular().min(vy.min_singular())),
            unitarity_deviation: Some(vx.max_deviation().max(vy.max_deviation())),
            quantization_error: Some(err),
            ..Diagnostics::default()
        },
    ))
}

/// `C±` of the two spin sectors and `C_s = (C+ − C−)/2`.
pub fn spin_chern_split(
    split: &SpinSplitProjectors,
    pos: &PositionOperators,
    method: SpinMethod,
) -> Result<SpinChern> {
    spin_chern_split_with(split, pos, method, SectorBott::Restricted)
}

pub fn spin_chern_split_with(
    split: &SpinSplitProjectors,
    pos: &PositionOperators,
    method: SpinMethod,
    construction: SectorBott,
) -> Result<SpinChern> {
    let (plus, minus, tag) = match method {
        SpinMethod::Noncommutative => (
            noncommutative_chern(&split.projector_plus(), pos)?,
            noncommutative_chern(&split.projector_minus(), pos)?,
            Method::SpinSplitNoncommutative,
        ),
        SpinMethod::Bott => {
            let ux = pos.x.twist();
            let uy = pos.y.twist();
            let sector = |s: &StateSet| match construction {
                SectorBott::Restricted => bott_index(s, &ux, &uy),
                SectorBott::Padded => padded_bott(s, &ux, &uy),
            };
            (sector(&split.plus)?, sector(&split.minus)?, Method::SpinSplitBott)
        }
    };
    let value = 0.5 * (plus.value - minus.value);
    let mut diagnostics = Diagnostics {
        sigma_gap: Some(split.sigma_gap),
        ..Diagnostics::default()
    };
    match method {
        SpinMethod::Noncommutative => {
            diagnostics.imaginary_residue = max_opt(
                plus.diagnostics.imaginary_residue,
                minus.diagnostics.imaginary_residue,
            );
        }
        SpinMethod::Bott => {
            diagnostics.min_singular =
                min_opt(plus.diagnostics.min_singular, minus.diagnostics.min_singular);
            diagnostics.unitarity_deviation = max_opt(
                plus.diagnostics.unitarity_deviation,
                minus.diagnostics.unitarity_deviation,
            );
            diagnostics.quantization_error = Some(half_integer_error(value));
        }
    }
    Ok(SpinChern {
        plus,
        minus,
        spin: InvariantResult::new(value, tag, diagnostics),
    })
}

fn max_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn half_integer_error(value: f64) -> f64 {
    (value - 0.5 * libm::round(2.0 * value)).abs()
}

/// Generalized position `r̂x σz` and ordinary `r̂y`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedPositions {
    pub x_gamma: PositionAxis,
    pub y: PositionAxis,
}

impl GeneralizedPositions {
    pub fn new(pos: &PositionOperators, sigma_z: &[f64]) -> Self {
        Self {
            x_gamma: pos.x.weighted(sigma_z),
            y: pos.y.clone(),
        }
    }
}

/// Spin Chern number from the generalized twist `e^{2πi r̂x σz / Lx}`.
///
/// Non-commutative: `(πi/(LxLy)) Tr(P[[r̂x σz, P], [r̂y, P]])`.
/// Bott: `(1/4π) Im Tr log(𝒰_y^† 𝒰^Γ_x 𝒰_y 𝒰^Γ†_x)`, quantized to halves.
pub fn spin_chern_generalized(
    ss: &StateSet,
    gp: &GeneralizedPositions,
    method: SpinMethod,
) -> Result<InvariantResult> {
    match method {
        SpinMethod::Noncommutative => {
            let p = projector(ss);
            let t = double_commutator_trace(p.as_ref(), &gp.x_gamma, &gp.y);
            let area = gp.x_gamma.length() * gp.y.length();
            let z = c64::new(0.0, PI / area) * t;
            if z.im.abs() > realspace::RESIDUE_TOL {
                return Err(Error::ImaginaryResidue {
                    residue: z.im.abs(),
                    tolerance: realspace::RESIDUE_TOL,
                });
            }
            Ok(InvariantResult::new(
                z.re,
                Method::SpinGeneralizedNoncommutative,
                Diagnostics {
                    imaginary_residue: Some(z.im.abs()),
                    ..Diagnostics::default()
                },
            ))
        }
        SpinMethod::Bott => {
            let wx = projected_unitary(ss.as_ref(), &gp.x_gamma.twist())?;
            let wy = projected_unitary(ss.as_ref(), &gp.y.twist())?;
            let sum =
                realspace::bott_phase_sum(wx.unitary.as_ref(), wy.unitary.as_ref(), BottOrdering::Standard)?;
            let value = sum / (4.0 * PI);
            let err = quantized(value, 0.5)?;
            Ok(InvariantResult::new(
                value,
                Method::SpinGeneralizedBott,
                Diagnostics {
                    min_singular: Some(wx.min_singular().min(wy.min_singular())),
                    unitarity_deviation: Some(wx.max_deviation().max(wy.max_deviation())),
                    quantization_error: Some(err),
                    ..Diagnostics::default()
                },
            ))
        }
    }
}

/// `ℂ_{σσ'}` for `σ, σ' ∈ {↑, ↓}` (index 0 = ↑).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernMatrix {
    pub entries: [[f64; 2]; 2],
    pub method: SpinMethod,
    pub imaginary_residue: f64,
    pub min_singular: Option<f64>,
}

impl ChernMatrix {
    /// `(1/2) Σ sgn(σ) ℂ_{σσ'}`
    pub fn spin_chern(&self) -> f64 {
        let e = &self.entries;
        0.5 * (e[0][0] + e[0][1] - e[1][0] - e[1][1])
    }

    /// `Σ ℂ_{σσ'}`, the charge Chern number.
    pub fn charge_chern(&self) -> f64 {
        self.entries.iter().flatten().sum()
    }
}

/// Spin-resolved positions `r̂^σ_j` (`r_j` on spin σ, 0 on the other spin).
pub fn spin_resolved_positions(pos: &PositionOperators, sigma_z: &[f64]) -> [[PositionAxis; 2]; 2] {
    let up: Vec<f64> = sigma_z.iter().map(|s| if *s > 0.0 { 1.0 } else { 0.0 }).collect();
    let down: Vec<f64> = sigma_z.iter().map(|s| if *s > 0.0 { 0.0 } else { 1.0 }).collect();
    [
        [pos.x.weighted(&up), pos.x.weighted(&down)],
        [pos.y.weighted(&up), pos.y.weighted(&down)],
    ]
}

/// Chern-number matrix with entries normalized like the charge Chern number:
/// `(2πi/(LxLy)) Tr(P[[r̂^σ_x, P], [r̂^σ'_y, P]])`, or the Bott winding of
/// `(𝒰^σ'_y)^† 𝒰^σ_x 𝒰^σ'_y (𝒰^σ_x)^†` divided by `2π`.
pub fn chern_matrix(
    ss: &StateSet,
    pos: &PositionOperators,
    sigma_z: &[f64],
    method: SpinMethod,
) -> Result<ChernMatrix> {
    let [xs, ys] = spin_resolved_positions(pos, sigma_z);
    let mut entries = [[0.0; 2]; 2];
    let mut residue = 0.0f64;
    let mut min_singular = None;
    match method {
        SpinMethod::Noncommutative => {
            let p = projector(ss);
            let scale = c64::new(0.0, 2.0 * PI / pos.area());
            for s in 0..2 {
                for t in 0..2 {
                    let z = scale * double_commutator_trace(p.as_ref(), &xs[s], &ys[t]);
                    if z.im.abs() > realspace::RESIDUE_TOL {
                        return Err(Error::ImaginaryResidue {
                            residue: z.im.abs(),
                            tolerance: realspace::RESIDUE_TOL,
                        });
                    }
                    residue = residue.max(z.im.abs());
                    entries[s][t] = z.re;
                }
            }
        }
        SpinMethod::Bott => {
            let wx = [
                projected_unitary(ss.as_ref(), &xs[0].twist())?,
                projected_unitary(ss.as_ref(), &xs[1].twist())?,
            ];
            let wy = [
                projected_unitary(ss.as_ref(), &ys[0].twist())?,
                projected_unitary(ss.as_ref(), &ys[1].twist())?,
            ];
            let mut ms = f64::INFINITY;
            for w in wx.iter().chain(&wy) {
                ms = ms.min(w.min_singular());
            }
            min_singular = Some(ms);
            for s in 0..2 {
                for t in 0..2 {
                    let sum = realspace::bott_phase_sum(
                        wx[s].unitary.as_ref(),
                        wy[t].unitary.as_ref(),
                        BottOrdering::Standard,
                    )?;
                    let value = sum / (2.0 * PI);
                    quantized(value, 1.0)?;
                    entries[s][t] = value;
                }
            }
        }
    }
    Ok(ChernMatrix {
        entries,
        method,
        imaginary_residue: residue,
        min_singular,
    })
}

/// Spin Chern number `(1/4π) Σ fluxes` from link-variable integration of a
/// family twisted by `e^{iθx σz}` along x and `e^{iθy}` along y.
pub fn spin_chern_tbc_oracle(
    fam: &(impl TwistFamily + ?Sized),
    n: usize,
    grid: TwistGrid,
) -> Result<InvariantResult> {
    let (charge, _) = chern_link_variable(fam, n, grid)?;
    let value = 0.5 * charge.value;
    Ok(InvariantResult::new(
        value,
        Method::SpinTbcLinkVariable,
        Diagnostics {
            quantization_error: Some(half_integer_error(value)),
            ..charge.diagnostics
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_honeycomb;
    use crate::models::{kane_mele_hamiltonian, BoundaryCondition, KaneMeleParams};
    use crate::spectra::{eigendecompose, select_targeted, Filling};

    fn km_states(l: usize, lambda_r: f64, delta0: f64) -> (LatticeGeometry, StateSet) {
        let g = build_honeycomb(l, l, true).unwrap();
        let p = KaneMeleParams {
            t: 1.0,
            lambda_so: 0.3,
            lambda_r,
            delta0,
        };
        let h = kane_mele_hamiltonian(&g, &p, &BoundaryCondition::periodic(), None).unwrap();
        let ss = select_targeted(&eigendecompose(&h).unwrap(), Filling::LowestN(2 * l * l)).unwrap();
        (g, ss)
    }

    #[test]
    fn decoupled_split_is_exact() {
        let (g, ss) = km_states(4, 0.0, 0.0);
        let sz = sigma_z(&g);
        let split = spin_spectral_split(&ss, &sz).unwrap();
        assert!(split
            .sigma_spectrum
            .iter()
            .all(|v| (v.abs() - 1.0).abs() < 1e-10));
        assert_eq!(split.plus.count() + split.minus.count(), ss.count());
        let pp = split.projector_plus();
        let pm = split.projector_minus();
        let p = projector(&ss);
        let sum = pp.as_ref() + pm.as_ref();
        assert!(linalg::max_abs_diff(sum.as_ref(), p.as_ref()) < 1e-9);
        let cross = pp.as_ref() * pm.as_ref();
        assert!(linalg::max_abs_diff(cross.as_ref(), Mat::<c64>::zeros(cross.nrows(), cross.ncols()).as_ref()) < 1e-9);
        // P+ lives on spin up only
        for (i, s) in sz.iter().enumerate() {
            if *s < 0.0 {
                assert!(linalg::abs(pp.as_ref()[(i, i)]) < 1e-10);
            }
        }
    }

    #[test]
    fn padded_and_restricted_sector_bott_agree() {
        let (g, ss) = km_states(5, 0.1, 0.0);
        let sz = sigma_z(&g);
        let split = spin_spectral_split(&ss, &sz).unwrap();
        let pos = PositionOperators::new(&g);
        let r = spin_chern_split_with(&split, &pos, SpinMethod::Bott, SectorBott::Restricted).unwrap();
        let p = spin_chern_split_with(&split, &pos, SpinMethod::Bott, SectorBott::Padded).unwrap();
        assert_eq!(r.plus.integer, p.plus.integer);
        assert_eq!(r.minus.integer, p.minus.integer);
        assert!((r.spin.value - p.spin.value).abs() < 1e-12);
    }

    #[test]
    fn chern_matrix_decoupled_and_trivial() {
        let (g, ss) = km_states(6, 0.0, 0.0);
        let sz = sigma_z(&g);
        let pos = PositionOperators::new(&g);
        let m = chern_matrix(&ss, &pos, &sz, SpinMethod::Bott).unwrap();
        let expected = [[1.0, 0.0], [0.0, -1.0]];
        for s in 0..2 {
            for t in 0..2 {
                assert!((m.entries[s][t] - expected[s][t]).abs() < 1e-8, "{m:?}");
            }
        }
        assert!((m.spin_chern() - 1.0).abs() < 1e-8);

        let (g, ss) = km_states(6, 0.0, 6.0);
        let m = chern_matrix(&ss, &PositionOperators::new(&g), &sigma_z(&g), SpinMethod::Noncommutative)
            .unwrap();
        assert!(m.entries.iter().flatten().all(|v| v.abs() < 0.05), "{m:?}");
    }
}
