//! Haldane and Kane–Mele Hamiltonians on the honeycomb torus.
//!
//! Every hop is stored once as `(from = j, to = i)` and written into the
//! matrix together with its conjugate, so the assembled matrix is exactly
//! Hermitian.
//!
//! Twist conventions for a hop `j → i` with true displacement `d` and wrap
//! count `w` (see [`Bond`]):
//!
//! * boundary gauge: amplitude times `e^{i(θx wx + θy wy)}`,
//! * uniform gauge: amplitude times `e^{i(θx dx/Lx + θy dy/Ly)}`.
//!
//! The two are related by `H̃(θ) = U_θ H(θ) U_θ^†` with
//! `U_θ = diag e^{i(θx rx/Lx + θy ry/Ly)}`.

use alloc::vec::Vec;

use faer::{c64, Mat};

use crate::disorder::{disorder_potential, DisorderSpec};
use crate::error::{Error, Result};
use crate::lattice::{Bond, LatticeGeometry};
use crate::linalg::cis;
use crate::operator::{DiagonalUnitary, HermitianOperator};
use crate::tbc::{Axis, TwistFamily};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaldaneParams {
    pub t1: f64,
    pub t2: f64,
    pub phi: f64,
    pub delta0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KaneMeleParams {
    pub t: f64,
    pub lambda_so: f64,
    pub lambda_r: f64,
    pub delta0: f64,
}

/// Twist angles `(θx, θy)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Twist {
    pub theta_x: f64,
    pub theta_y: f64,
}

impl Twist {
    pub const ZERO: Twist = Twist {
        theta_x: 0.0,
        theta_y: 0.0,
    };

    pub fn new(theta_x: f64, theta_y: f64) -> Self {
        Self { theta_x, theta_y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Periodic,
    TwistBoundaryGauge,
    TwistUniformGauge,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition {
    pub kind: BoundaryKind,
    /// Ignored for `Periodic` and `Open`.
    pub twist: Twist,
}

impl BoundaryCondition {
    pub fn periodic() -> Self {
        Self {
            kind: BoundaryKind::Periodic,
            twist: Twist::ZERO,
        }
    }

    pub fn open() -> Self {
        Self {
            kind: BoundaryKind::Open,
            twist: Twist::ZERO,
        }
    }

    pub fn boundary_gauge(twist: Twist) -> Self {
        Self {
            kind: BoundaryKind::TwistBoundaryGauge,
            twist,
        }
    }

    pub fn uniform_gauge(twist: Twist) -> Self {
        Self {
            kind: BoundaryKind::TwistUniformGauge,
            twist,
        }
    }
}

/// Where a twist family puts its phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwistGauge {
    Boundary,
    Uniform,
}

/// Which charge the twist couples to in the x direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwistGenerator {
    /// `e^{iθ}` for both spins.
    Charge,
    /// `e^{iθx σz}` along x and `e^{iθy}` along y.
    SpinX,
}

/// Diagonal `diag e^{i(θx rx/Lx + θy ry/Ly)}` over the basis of `geom`.
pub fn twist_operator(geom: &LatticeGeometry, twist: Twist) -> DiagonalUnitary {
    spin_twist_operator(geom, twist, false)
}

/// Like [`twist_operator`], optionally with the x phase multiplied by `σz`.
pub fn spin_twist_operator(geom: &LatticeGeometry, twist: Twist, spin_x: bool) -> DiagonalUnitary {
    let lx = geom.lx() as f64;
    let ly = geom.ly() as f64;
    DiagonalUnitary::from_angles(geom.sites().iter().map(|s| {
        let gx = match (spin_x, s.spin) {
            (true, Some(spin)) => spin.sign(),
            _ => 1.0,
        };
        twist.theta_x * gx * s.cx as f64 / lx + twist.theta_y * s.cy as f64 / ly
    }))
}

#[derive(Debug, Clone, Copy)]
enum Realization {
    Periodic,
    Open,
    Boundary(Twist),
    Uniform(Twist),
    /// Boundary gauge with the x phase multiplied by the spin of the source.
    SpinBoundary(Twist),
}

impl Realization {
    fn from_bc(bc: &BoundaryCondition) -> Self {
        match bc.kind {
            BoundaryKind::Periodic => Realization::Periodic,
            BoundaryKind::Open => Realization::Open,
            BoundaryKind::TwistBoundaryGauge => Realization::Boundary(bc.twist),
            BoundaryKind::TwistUniformGauge => Realization::Uniform(bc.twist),
        }
    }

    /// Phase attached to `bond` when it lands on a source component of spin
    /// sign `s_from`; `None` drops the hop.
    fn phase(&self, geom: &LatticeGeometry, bond: &Bond, s_from: f64) -> Option<c64> {
        match *self {
            Realization::Periodic => Some(c64::new(1.0, 0.0)),
            Realization::Open => (!bond.wraps()).then(|| c64::new(1.0, 0.0)),
            Realization::Boundary(t) => Some(cis(
                t.theta_x * bond.wrap_x as f64 + t.theta_y * bond.wrap_y as f64,
            )),
            Realization::Uniform(t) => Some(cis(
                t.theta_x * bond.dx as f64 / geom.lx() as f64
                    + t.theta_y * bond.dy as f64 / geom.ly() as f64,
            )),
            Realization::SpinBoundary(t) => Some(cis(
                t.theta_x * s_from * bond.wrap_x as f64 + t.theta_y * bond.wrap_y as f64,
            )),
        }
    }
}

struct Assembler {
    m: Mat<c64>,
}

impl Assembler {
    fn new(n: usize) -> Self {
        Self {
            m: Mat::zeros(n, n),
        }
    }

    fn onsite(&mut self, i: usize, e: f64) {
        self.m[(i, i)] += c64::new(e, 0.0);
    }

    fn hop(&mut self, to: usize, from: usize, amp: c64) {
        self.m[(to, from)] += amp;
        self.m[(from, to)] += amp.conj();
    }

    fn finish(self) -> Result<HermitianOperator> {
        HermitianOperator::new(self.m, 0.0)
    }
}

fn haldane_assemble(
    geom: &LatticeGeometry,
    p: &HaldaneParams,
    real: Realization,
    potential: Option<&[f64]>,
) -> Result<HermitianOperator> {
    if geom.is_spinful() {
        return Err(Error::WrongGeometry {
            expected: "spinless",
        });
    }
    let mut asm = Assembler::new(geom.num_sites());
    for (i, s) in geom.sites().iter().enumerate() {
        let v = potential.map_or(0.0, |pot| pot[i]);
        asm.onsite(i, 0.5 * p.delta0 * s.sublattice.xi() + v);
    }
    for b in geom.nn_bonds() {
        if let Some(ph) = real.phase(geom, b, 1.0) {
            asm.hop(b.to, b.from, ph * (-p.t1));
        }
    }
    let nnn = cis(p.phi) * (-p.t2);
    for b in geom.nnn_bonds() {
        if let Some(ph) = real.phase(geom, b, 1.0) {
            asm.hop(b.to, b.from, nnn * ph);
        }
    }
    asm.finish()
}

/// Haldane model on a spinless geometry.
///
/// NN amplitude `-t1`, NNN amplitude `-t2 e^{iΦ}` along positively oriented
/// hops, on-site `Δ0/2 · ξ + W·ε`.
pub fn haldane_hamiltonian(
    geom: &LatticeGeometry,
    p: &HaldaneParams,
    bc: &BoundaryCondition,
    dis: Option<&DisorderSpec>,
) -> Result<HermitianOperator> {
    let pot = dis.map(|d| disorder_potential(geom, d));
    haldane_assemble(geom, p, Realization::from_bc(bc), pot.as_deref())
}

type SpinBlock = [[c64; 2]; 2];

fn kane_mele_assemble(
    geom: &LatticeGeometry,
    p: &KaneMeleParams,
    real: Realization,
    potential: Option<&[f64]>,
) -> Result<HermitianOperator> {
    if !geom.is_spinful() {
        return Err(Error::WrongGeometry {
            expected: "spinful",
        });
    }
    let zero = c64::new(0.0, 0.0);
    let idx = |orbital: usize, s: usize| 2 * orbital + s;
    let sign = |s: usize| if s == 0 { 1.0 } else { -1.0 };
    let mut asm = Assembler::new(geom.num_sites());
    for (i, s) in geom.sites().iter().enumerate() {
        let v = potential.map_or(0.0, |pot| pot[i]);
        asm.onsite(i, 0.5 * p.delta0 * s.sublattice.xi() + v);
    }

    let place = |asm: &mut Assembler, b: &Bond, block: &SpinBlock| {
        for sf in 0..2 {
            let Some(ph) = real.phase(geom, b, sign(sf)) else {
                continue;
            };
            for st in 0..2 {
                if block[st][sf] != zero {
                    asm.hop(idx(b.to, st), idx(b.from, sf), block[st][sf] * ph);
                }
            }
        }
    };

    for b in geom.nn_bonds() {
        // ê points from the target site i back to the source j
        let (vx, vy) = geom.bond_vector(b);
        let (ex, ey) = (-vx, -vy);
        // -t·1 + iλR (σx ê_y − σy ê_x)
        let i_lr = c64::new(0.0, p.lambda_r);
        let block = [
            [c64::new(-p.t, 0.0), i_lr * c64::new(ey, ex)],
            [i_lr * c64::new(ey, -ex), c64::new(-p.t, 0.0)],
        ];
        place(&mut asm, b, &block);
    }
    // −iλSO σz on positively oriented hops, so the spin-up sector is
    // Haldane(t2 = λSO, Φ = π/2) and carries C = +1.
    let block = [
        [c64::new(0.0, -p.lambda_so), zero],
        [zero, c64::new(0.0, p.lambda_so)],
    ];
    for b in geom.nnn_bonds() {
        place(&mut asm, b, &block);
    }
    asm.finish()
}

/// Kane–Mele model on a spinful geometry with spin-independent twist phases.
///
/// NN `-t`, intrinsic spin-orbit `−iλSO σz` on positively oriented NNN hops,
/// Rashba `iλR (σ × ê)_z`, on-site `Δ0/2 · ξ + W·ε`.
pub fn kane_mele_hamiltonian(
    geom: &LatticeGeometry,
    p: &KaneMeleParams,
    bc: &BoundaryCondition,
    dis: Option<&DisorderSpec>,
) -> Result<HermitianOperator> {
    let pot = dis.map(|d| disorder_potential(geom, d));
    kane_mele_assemble(geom, p, Realization::from_bc(bc), pot.as_deref())
}

fn large_gauge(geom: &LatticeGeometry, axis: Axis, spin_x: bool) -> DiagonalUnitary {
    let two_pi = 2.0 * core::f64::consts::PI;
    let twist = match axis {
        Axis::X => Twist::new(two_pi, 0.0),
        Axis::Y => Twist::new(0.0, two_pi),
    };
    spin_twist_operator(geom, twist, spin_x)
}

/// `θ ↦ H(θ)` for a Haldane model with fixed disorder.
#[derive(Debug, Clone)]
pub struct HaldaneFamily {
    geom: LatticeGeometry,
    params: HaldaneParams,
    gauge: TwistGauge,
    potential: Option<Vec<f64>>,
}

impl HaldaneFamily {
    pub fn new(
        geom: LatticeGeometry,
        params: HaldaneParams,
        gauge: TwistGauge,
        dis: Option<&DisorderSpec>,
    ) -> Result<Self> {
        if geom.is_spinful() {
            return Err(Error::WrongGeometry {
                expected: "spinless",
            });
        }
        let potential = dis.map(|d| disorder_potential(&geom, d));
        Ok(Self {
            geom,
            params,
            gauge,
            potential,
        })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geom
    }
}

impl TwistFamily for HaldaneFamily {
    fn dim(&self) -> usize {
        self.geom.num_sites()
    }

    fn hamiltonian(&self, twist: Twist) -> Result<HermitianOperator> {
        let real = match self.gauge {
            TwistGauge::Boundary => Realization::Boundary(twist),
            TwistGauge::Uniform => Realization::Uniform(twist),
        };
        haldane_assemble(&self.geom, &self.params, real, self.potential.as_deref())
    }

    fn gauge(&self) -> TwistGauge {
        self.gauge
    }

    fn full_twist(&self, axis: Axis) -> DiagonalUnitary {
        large_gauge(&self.geom, axis, false)
    }
}

/// `θ ↦ H(θ)` for a Kane–Mele model, with either a charge twist or the
/// spin twist `e^{iθx σz}` used for spin Chern numbers.
#[derive(Debug, Clone)]
pub struct KaneMeleFamily {
    geom: LatticeGeometry,
    params: KaneMeleParams,
    gauge: TwistGauge,
    generator: TwistGenerator,
    potential: Option<Vec<f64>>,
}

impl KaneMeleFamily {
    pub fn new(
        geom: LatticeGeometry,
        params: KaneMeleParams,
        gauge: TwistGauge,
        generator: TwistGenerator,
        dis: Option<&DisorderSpec>,
    ) -> Result<Self> {
        if !geom.is_spinful() {
            return Err(Error::WrongGeometry {
                expected: "spinful",
            });
        }
        let potential = dis.map(|d| disorder_potential(&geom, d));
        Ok(Self {
            geom,
            params,
            gauge,
            generator,
            potential,
        })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geom
    }
}

impl TwistFamily for KaneMeleFamily {
    fn dim(&self) -> usize {
        self.geom.num_sites()
    }

    fn hamiltonian(&self, twist: Twist) -> Result<HermitianOperator> {
        let pot = self.potential.as_deref();
        match (self.generator, self.gauge) {
            (TwistGenerator::Charge, TwistGauge::Boundary) => {
                kane_mele_assemble(&self.geom, &self.params, Realization::Boundary(twist), pot)
            }
            (TwistGenerator::Charge, TwistGauge::Uniform) => {
                kane_mele_assemble(&self.geom, &self.params, Realization::Uniform(twist), pot)
            }
            (TwistGenerator::SpinX, TwistGauge::Boundary) => kane_mele_assemble(
                &self.geom,
                &self.params,
                Realization::SpinBoundary(twist),
                pot,
            ),
            (TwistGenerator::SpinX, TwistGauge::Uniform) => {
                // Rashba hops do not commute with σz, so the spread-out twist
                // is realized as an exact gauge transformation of the
                // boundary-gauge matrix.
                let h = kane_mele_assemble(
                    &self.geom,
                    &self.params,
                    Realization::SpinBoundary(twist),
                    pot,
                )?;
                Ok(h.conjugated_by(&spin_twist_operator(&self.geom, twist, true)))
            }
        }
    }

    fn gauge(&self) -> TwistGauge {
        self.gauge
    }

    fn full_twist(&self, axis: Axis) -> DiagonalUnitary {
        large_gauge(&self.geom, axis, self.generator == TwistGenerator::SpinX)
    }
}
