//! Chern numbers from twisted boundary conditions.
//!
//! The twist torus `θ ∈ [0, 2π)²` is sampled on a regular grid. States at
//! `θ + 2π e_j` are obtained from those at `θ` by the large gauge
//! transformation of the family (the identity in the boundary gauge), so the
//! discretized torus closes exactly.
//!
//! Sign conventions: the Berry connection is `𝒜 = −iΨ^†∂Ψ`, the curvature
//! `Tr𝓕 = −i Tr(P[∂xP, ∂yP])` and `C = (1/2π)∬ Tr𝓕 d²θ`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{self, arg, wrap_angle};
use crate::models::{Twist, TwistGauge};
use crate::operator::{DiagonalUnitary, HermitianOperator};
use crate::result::{Diagnostics, InvariantResult, Method};

/// Gaps at or below this are treated as closed.
pub const GAP_TOL: f64 = 1e-10;
/// Overlap determinants below this modulus signal an under-resolved grid.
pub const DET_TOL: f64 = 1e-12;
/// Plaquette fluxes this close to `±π` are branch-ambiguous.
pub const BRANCH_TOL: f64 = 1e-6;
/// Link-variable sums must be this close to an integer.
pub const QUANTIZATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A family of Hamiltonians `θ ↦ H(θ)` on a torus of twist angles.
pub trait TwistFamily: Sync {
    fn dim(&self) -> usize;

    fn hamiltonian(&self, twist: Twist) -> Result<HermitianOperator>;

    /// Where the twist phases live.
    fn gauge(&self) -> TwistGauge;

    /// `e^{2πi Γ r̂_j / L_j}`, the full-flux twist operator along `axis`
    /// (with the family's twist generator `Γ`).
    fn full_twist(&self, axis: Axis) -> DiagonalUnitary;

    /// `G_j` with `H(θ + 2π e_j) = G_j H(θ) G_j^†`; `None` when the family is
    /// exactly periodic.
    fn large_gauge(&self, axis: Axis) -> Option<DiagonalUnitary> {
        match self.gauge() {
            TwistGauge::Boundary => None,
            TwistGauge::Uniform => Some(self.full_twist(axis)),
        }
    }
}

/// Regular `nx × ny` grid with vertices `θ_ab = (2πa/nx, 2πb/ny)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistGrid {
    nx: usize,
    ny: usize,
}

impl TwistGrid {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::GridTooSmall { nx, ny });
        }
        Ok(Self { nx, ny })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn spacing(&self) -> (f64, f64) {
        (2.0 * PI / self.nx as f64, 2.0 * PI / self.ny as f64)
    }

    pub fn vertex(&self, a: usize, b: usize) -> Twist {
        let (dx, dy) = self.spacing();
        Twist::new(dx * a as f64, dy * b as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureKind {
    LinkVariable,
    FiniteDifference,
}

/// Plaquette-integrated curvature `F_ab = Tr𝓕(θ_ab)·δθx·δθy`, stored
/// row-major (`b` outer).
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    grid: TwistGrid,
    kind: CurvatureKind,
    values: Vec<f64>,
}

impl CurvatureField {
    pub fn grid(&self) -> TwistGrid {
        self.grid
    }

    pub fn kind(&self) -> CurvatureKind {
        self.kind
    }

    pub fn plaquette(&self, a: usize, b: usize) -> f64 {
        self.values[b * self.grid.nx + a]
    }

    pub fn plaquettes(&self) -> &[f64] {
        &self.values
    }

    /// `Σ F_ab`, summed in storage order.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Pointwise `Tr𝓕` at every grid vertex.
    pub fn pointwise(&self) -> Vec<f64> {
        let (dx, dy) = self.grid.spacing();
        self.values.iter().map(|v| v / (dx * dy)).collect()
    }

    /// `(θx, θy, Tr𝓕)` for each vertex in storage order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let nx = self.grid.nx;
        let grid = self.grid;
        self.pointwise()
            .into_iter()
            .enumerate()
            .map(move |(k, f)| {
                let t = grid.vertex(k % nx, k / nx);
                (t.theta_x, t.theta_y, f)
            })
    }
}

/// Evaluates `f(0..n)` in order, on the rayon pool when available.
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

fn collect_results<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

/// The `n` lowest states of `H(θ)` and the gap above them.
pub fn lowest_states(
    fam: &(impl TwistFamily + ?Sized),
    n: usize,
    twist: Twist,
) -> Result<(Mat<c64>, f64)> {
    if n == 0 || n > fam.dim() {
        return Err(Error::InvalidSelection {
            reason: "targeted count must satisfy 1 <= n <= N",
        });
    }
    let h = fam.hamiltonian(twist)?;
    let (values, vectors) = linalg::hermitian_eigen(h.as_ref())?;
    let gap = if n < values.len() {
        values[n] - values[n - 1]
    } else {
        f64::INFINITY
    };
    if gap <= GAP_TOL {
        return Err(Error::Gapless {
            theta_x: twist.theta_x,
            theta_y: twist.theta_y,
            gap,
        });
    }
    Ok((vectors.subcols(0, n).to_owned(), gap))
}

struct Row {
    states: Vec<Mat<c64>>,
    min_gap: f64,
}

fn compute_row(fam: &(impl TwistFamily + ?Sized), n: usize, grid: &TwistGrid, b: usize) -> Result<Row> {
    let items = collect_results(par_map(grid.nx, |a| lowest_states(fam, n, grid.vertex(a, b))))?;
    let min_gap = items.iter().map(|(_, g)| *g).fold(f64::INFINITY, f64::min);
    Ok(Row {
        states: items.into_iter().map(|(s, _)| s).collect(),
        min_gap,
    })
}

fn gauge_shift(g: &Option<DiagonalUnitary>, m: MatRef<'_, c64>) -> Mat<c64> {
    match g {
        Some(g) => g.apply(m),
        None => m.to_owned(),
    }
}

/// Unit-modulus link `det(Ψ_a^† Ψ_b)/|det|`, failing when the determinant
/// vanishes.
fn link(a: MatRef<'_, c64>, b: MatRef<'_, c64>, at: Twist) -> Result<c64> {
    let d = linalg::determinant(linalg::overlap(a, b).as_ref());
    let m = linalg::abs(d);
    if m < DET_TOL {
        return Err(Error::GridTooCoarse {
            theta_x: at.theta_x,
            theta_y: at.theta_y,
            modulus: m,
        });
    }
    Ok(d / m)
}

/// Horizontal links `U_x(a, b)` along one row, including the one that closes
/// through the large gauge transformation.
fn row_links_x(row: &Row, gx: &Option<DiagonalUnitary>, grid: &TwistGrid, b: usize) -> Result<Vec<c64>> {
    let nx = grid.nx;
    collect_results(par_map(nx, |a| {
        let at = grid.vertex(a, b);
        if a + 1 < nx {
            link(row.states[a].as_ref(), row.states[a + 1].as_ref(), at)
        } else {
            let wrapped = gauge_shift(gx, row.states[0].as_ref());
            link(row.states[a].as_ref(), wrapped.as_ref(), at)
        }
    }))
}

/// Vertical links `U_y(a, b)` between a row and the next one (`next` already
/// gauge-shifted when it closes the torus).
fn row_links_y(lower: &Row, upper: &Row, grid: &TwistGrid, b: usize) -> Result<Vec<c64>> {
    collect_results(par_map(grid.nx, |a| {
        link(
            lower.states[a].as_ref(),
            upper.states[a].as_ref(),
            grid.vertex(a, b),
        )
    }))
}

fn shifted_row(row: &Row, g: &Option<DiagonalUnitary>) -> Row {
    Row {
        states: par_map(row.states.len(), |a| gauge_shift(g, row.states[a].as_ref())),
        min_gap: row.min_gap,
    }
}

/// Link-variable Chern number of the `n` lowest states of `fam`.
///
/// Each plaquette contributes the principal-branch phase of
/// `U_x(θ) U_y(θ + δx) U_x(θ + δy)^* U_y(θ)^*`; the sum is `2π C` exactly.
pub fn chern_link_variable(
    fam: &(impl TwistFamily + ?Sized),
    n: usize,
    grid: TwistGrid,
) -> Result<(InvariantResult, CurvatureField)> {
    let (field, min_gap) = link_variable_field(fam, n, grid)?;
    let max_flux = field.plaquettes().iter().fold(0.0f64, |m, f| m.max(f.abs()));
    let value = field.total() / (2.0 * PI);
    let deviation = (value - libm::round(value)).abs();
    if deviation > QUANTIZATION_TOL {
        return Err(Error::NotQuantized {
            value,
            tolerance: QUANTIZATION_TOL,
        });
    }
    let diagnostics = Diagnostics {
        gap: Some(min_gap),
        flatness: Some(flatness(&field)),
        quantization_error: Some(deviation),
        max_plaquette_flux: Some(max_flux),
        ..Diagnostics::default()
    };
    Ok((
        InvariantResult::new(value, Method::TbcLinkVariable, diagnostics),
        field,
    ))
}

/// Plaquette fluxes of the link-variable discretization and the smallest gap
/// met on the grid.
pub fn link_variable_field(
    fam: &(impl TwistFamily + ?Sized),
    n: usize,
    grid: TwistGrid,
) -> Result<(CurvatureField, f64)> {
    let (nx, ny) = (grid.nx, grid.ny);
    let gx = fam.large_gauge(Axis::X);
    let gy = fam.large_gauge(Axis::Y);

    let row0 = compute_row(fam, n, &grid, 0)?;
    let links_x0 = row_links_x(&row0, &gx, &grid, 0)?;
    let mut min_gap = row0.min_gap;

    let mut values = Vec::with_capacity(nx * ny);
    let mut lower_links_x = links_x0.clone();
    let mut lower: Option<Row> = None;
    for b in 0..ny {
        let lower_row = lower.as_ref().unwrap_or(&row0);
        let (upper, upper_links_x) = if b + 1 < ny {
            let r = compute_row(fam, n, &grid, b + 1)?;
            min_gap = min_gap.min(r.min_gap);
            let lx = row_links_x(&r, &gx, &grid, b + 1)?;
            (r, lx)
        } else {
            // |det| and phase of U_x are unchanged by a diagonal unitary
            (shifted_row(&row0, &gy), links_x0.clone())
        };
        let links_y = row_links_y(lower_row, &upper, &grid, b)?;
        for a in 0..nx {
            let uy_right = links_y[(a + 1) % nx];
            let prod = lower_links_x[a] * uy_right * upper_links_x[a].conj() * links_y[a].conj();
            let flux = arg(prod);
            if flux.abs() > PI - BRANCH_TOL {
                let t = grid.vertex(a, b);
                return Err(Error::PlaquetteBranch {
                    theta_x: t.theta_x,
                    theta_y: t.theta_y,
                    flux,
                });
            }
            values.push(flux);
        }
        lower_links_x = upper_links_x;
        lower = if b + 1 < ny { Some(upper) } else { None };
    }
    Ok((
        CurvatureField {
            grid,
            kind: CurvatureKind::LinkVariable,
            values,
        },
        min_gap,
    ))
}

/// `Tr(P_0 [P_x, P_y])` from three state matrices, as the difference of two
/// independently formed traces, plus its (ideally zero) real part.
fn projector_commutator_trace(
    psi0: MatRef<'_, c64>,
    psix: MatRef<'_, c64>,
    psiy: MatRef<'_, c64>,
) -> (f64, f64) {
    let o0x = linalg::overlap(psi0, psix);
    let oxy = linalg::overlap(psix, psiy);
    let oy0 = linalg::overlap(psiy, psi0);
    // Tr(P0 Px Py) = tr(O_0x O_xy O_y0), Tr(P0 Py Px) = tr(O_0y O_yx O_x0)
    let forward = linalg::trace_of_product((&o0x * &oxy).as_ref(), oy0.as_ref());
    let backward = linalg::trace_of_product(
        (oy0.adjoint() * oxy.adjoint()).as_ref(),
        o0x.adjoint().to_owned().as_ref(),
    );
    let t = forward - backward;
    (t.im, t.re)
}

/// Residue tolerance for the discarded real part of `Tr(P[Px, Py])`,
/// relative to the number of targeted states.
const FD_RESIDUE_TOL: f64 = 1e-10;

fn check_residue(residue: f64, n: usize) -> Result<()> {
    let tol = FD_RESIDUE_TOL * (n.max(1) as f64);
    if residue.abs() > tol {
        return Err(Error::ImaginaryResidue {
            residue: residue.abs(),
            tolerance: tol,
        });
    }
    Ok(())
}

/// Forward-difference Berry curvature `Tr𝓕(θ)` with steps `(δx, δy)`.
pub fn berry_curvature_fd(
    fam: &(impl TwistFamily + ?Sized),
    n: usize,
    twist: Twist,
    delta: (f64, f64),
) -> Result<f64> {
    let (p0, _) = lowest_states(fam, n, twist)?;
    let (px, _) = lowest_states(fam, n, Twist::new(twist.theta_x + delta.0, twist.theta_y))?;
    let (py, _) = lowest_states(fam, n, Twist::new(twist.theta_x, twist.theta_y + delta.1))?;
    let (im, re) = projector_commutator_trace(p0.as_ref(), px.as_ref(), py.as_ref());
    check_residue(re, n)?;
    Ok(im / (delta.0 * delta.1))
}

/// Finite-difference Chern number: forward differences with the grid spacing
/// as step. Close to, but not exactly, an integer.
pub fn chern_fd(
    fam: &(impl TwistFamily + ?Sized),
    n: usize,
    grid: TwistGrid,
) -> Result<(InvariantResult, CurvatureField)> {
    let (nx, ny) = (grid.nx, grid.ny);
    let gx = fam.large_gauge(Axis::X);
    let gy = fam.large_gauge(Axis::Y);

    let row0 = compute_row(fam, n, &grid, 0)?;
    let mut min_gap = row0.min_gap;
    let mut max_residue = 0.0f64;
    let mut values = Vec::with_capacity(nx * ny);
    let mut lower: Option<Row> = None;
    for b in 0..ny {
        let lower_row = lower.as_ref().unwrap_or(&row0);
        let upper = if b + 1 < ny {
            let r = compute_row(fam, n, &grid, b + 1)?;
            min_gap = min_gap.min(r.min_gap);
            r
        } else {
            shifted_row(&row0, &gy)
        };
        let traces = par_map(nx, |a| {
            let right = if a + 1 < nx {
                lower_row.states[a + 1].clone()
            } else {
                gauge_shift(&gx, lower_row.states[0].as_ref())
            };
            projector_commutator_trace(
                lower_row.states[a].as_ref(),
                right.as_ref(),
                upper.states[a].as_ref(),
            )
        });
        for (im, re) in traces {
            check_residue(re, n)?;
            max_residue = max_residue.max(re.abs());
            // F·δxδy = Tr(P[ΔxP, ΔyP])/i · δxδy = Im Tr(P[Px, Py])
            values.push(im);
        }
        lower = if b + 1 < ny { Some(upper) } else { None };
    }
    let field = CurvatureField {
        grid,
        kind: CurvatureKind::FiniteDifference,
        values,
    };
    let value = field.total() / (2.0 * PI);
    let diagnostics = Diagnostics {
        gap: Some(min_gap),
        flatness: Some(flatness(&field)),
        imaginary_residue: Some(max_residue),
        quantization_error: Some((value - libm::round(value)).abs()),
        ..Diagnostics::default()
    };
    Ok((
        InvariantResult::new(value, Method::TbcFiniteDifference, diagnostics),
        field,
    ))
}

/// `max Tr𝓕 − min Tr𝓕` over the grid.
pub fn flatness(field: &CurvatureField) -> f64 {
    let f = field.pointwise();
    let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = f.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// Berry phase `φ(θx) = Im log det(Ψ^† e^{2πi r̂_y/L_y} Ψ)` of the states at
/// `(θx, 0)`, in (-π, π].
pub fn wilson_loop_berry_phase(fam: &(impl TwistFamily + ?Sized), n: usize, theta_x: f64) -> Result<f64> {
    let (psi, _) = lowest_states(fam, n, Twist::new(theta_x, 0.0))?;
    let uy = fam.full_twist(Axis::Y);
    let m = linalg::overlap(psi.as_ref(), uy.apply(psi.as_ref()).as_ref());
    let d = linalg::determinant(m.as_ref());
    let modulus = linalg::abs(d);
    if modulus < DET_TOL {
        return Err(Error::WilsonLoopDegenerate { theta_x, modulus });
    }
    Ok(arg(d))
}

/// Winding of the Berry phase over `θx ∈ [0, 2π)` sampled at `samples`
/// points, together with the sampled phases.
pub fn berry_phase_winding(
    fam: &(impl TwistFamily + ?Sized),
    n: usize,
    samples: usize,
) -> Result<(InvariantResult, Vec<f64>)> {
    if samples < 2 {
        return Err(Error::GridTooSmall { nx: samples, ny: 1 });
    }
    let step = 2.0 * PI / samples as f64;
    let phases = collect_results(par_map(samples, |k| {
        wilson_loop_berry_phase(fam, n, step * k as f64)
    }))?;
    let mut total = 0.0;
    let mut max_jump = 0.0f64;
    for k in 0..samples {
        let d = wrap_angle(phases[(k + 1) % samples] - phases[k]);
        max_jump = max_jump.max(d.abs());
        total += d;
    }
    let value = total / (2.0 * PI);
    let diagnostics = Diagnostics {
        quantization_error: Some((value - libm::round(value)).abs()),
        max_plaquette_flux: Some(max_jump),
        ..Diagnostics::default()
    };
    Ok((InvariantResult::new(value, Method::WilsonLoop, diagnostics), phases))
}
