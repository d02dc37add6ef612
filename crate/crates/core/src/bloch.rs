//! Chern number of the lower Haldane band from its 2×2 Bloch Hamiltonian.
//!
//! Written independently of the real-space builders: the hopping table below
//! restates the lattice conventions (`k` is conjugate to the integer cell
//! index, so `H(k)` is `2π`-periodic in each component) and the lower
//! eigenvector is obtained in closed form.

use alloc::vec::Vec;
use core::f64::consts::PI;

use faer::c64;

use crate::error::{Error, Result};
use crate::linalg::{abs, arg, cis};
use crate::models::HaldaneParams;
use crate::result::{Diagnostics, InvariantResult, Method};

const NN: [(f64, f64); 3] = [(0.0, 0.0), (0.0, -1.0), (1.0, -1.0)];
const NNN_A: [(f64, f64); 3] = [(-1.0, 0.0), (1.0, -1.0), (0.0, 1.0)];

/// `H(k) = Σ_d T(d) e^{−ik·d}` in the (A, B) basis.
pub fn bloch_hamiltonian(p: &HaldaneParams, k: (f64, f64)) -> [[c64; 2]; 2] {
    let dot = |d: (f64, f64)| k.0 * d.0 + k.1 * d.1;
    let mut haa = 0.5 * p.delta0;
    let mut hbb = -0.5 * p.delta0;
    for &d in &NNN_A {
        haa -= 2.0 * p.t2 * libm::cos(p.phi - dot(d));
        hbb -= 2.0 * p.t2 * libm::cos(p.phi + dot(d));
    }
    let mut hba = c64::new(0.0, 0.0);
    for &d in &NN {
        hba -= cis(-dot(d)) * p.t1;
    }
    [
        [c64::new(haa, 0.0), hba.conj()],
        [hba, c64::new(hbb, 0.0)],
    ]
}

/// Normalized lower eigenvector and the band gap `E+ − E−`.
fn lower_state(h: &[[c64; 2]; 2]) -> ([c64; 2], f64) {
    let a = h[0][0].re;
    let c = h[1][1].re;
    let b = h[0][1];
    let half = 0.5 * (a - c);
    let r = libm::sqrt(half * half + b.norm_sqr());
    let lower = 0.5 * (a + c) - r;
    let v1 = [b, c64::new(lower - a, 0.0)];
    let v2 = [c64::new(lower - c, 0.0), b.conj()];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    let s = 1.0 / libm::sqrt(n);
    ([v[0] * s, v[1] * s], 2.0 * r)
}

/// Link-variable Chern number of the lower band on a `kgrid × kgrid` mesh.
pub fn momentum_chern_oracle(p: &HaldaneParams, kgrid: usize) -> Result<InvariantResult> {
    if kgrid < 2 {
        return Err(Error::GridTooSmall {
            nx: kgrid,
            ny: kgrid,
        });
    }
    let step = 2.0 * PI / kgrid as f64;
    let mut states: Vec<[c64; 2]> = Vec::with_capacity(kgrid * kgrid);
    let mut min_gap = f64::INFINITY;
    for b in 0..kgrid {
        for a in 0..kgrid {
            let k = (step * a as f64, step * b as f64);
            let (v, gap) = lower_state(&bloch_hamiltonian(p, k));
            if gap <= crate::tbc::GAP_TOL {
                return Err(Error::BandTouching {
                    kx: k.0,
                    ky: k.1,
                    gap,
                });
            }
            min_gap = min_gap.min(gap);
            states.push(v);
        }
    }
    let at = |a: usize, b: usize| &states[(b % kgrid) * kgrid + (a % kgrid)];
    let link = |u: &[c64; 2], v: &[c64; 2]| {
        let o = u[0].conj() * v[0] + u[1].conj() * v[1];
        o / abs(o)
    };
    let mut total = 0.0;
    let mut max_flux = 0.0f64;
    for b in 0..kgrid {
        for a in 0..kgrid {
            let prod = link(at(a, b), at(a + 1, b))
                * link(at(a + 1, b), at(a + 1, b + 1))
                * link(at(a, b + 1), at(a + 1, b + 1)).conj()
                * link(at(a, b), at(a, b + 1)).conj();
            let flux = arg(prod);
            if flux.abs() > PI - crate::tbc::BRANCH_TOL {
                return Err(Error::PlaquetteBranch {
                    theta_x: step * a as f64,
                    theta_y: step * b as f64,
                    flux,
                });
            }
            max_flux = max_flux.max(flux.abs());
            total += flux;
        }
    }
    let value = total / (2.0 * PI);
    let diagnostics = Diagnostics {
        gap: Some(min_gap),
        quantization_error: Some((value - libm::round(value)).abs()),
        max_plaquette_flux: Some(max_flux),
        ..Diagnostics::default()
    };
    Ok(InvariantResult::new(value, Method::MomentumOracle, diagnostics))
}

/// `|Δ0| = 6√3 t2 |sin Φ|`, where the Haldane gap closes.
pub fn haldane_critical_delta(t2: f64, phi: f64) -> f64 {
    6.0 * libm::sqrt(3.0) * t2 * libm::fabs(libm::sin(phi))
}
