//! Evaluation of one configured method at one parameter point.

use chern_core::bloch::momentum_chern_oracle;
use chern_core::realspace::{
    bott_index, noncommutative_chern, noncommutative_chern_higher_order_at, PositionOperators,
};
use chern_core::spectra::resolve_count;
use chern_core::spin::{
    chern_matrix, sigma_z, spin_chern_generalized, spin_chern_split, spin_chern_tbc_oracle,
    spin_spectral_split, GeneralizedPositions,
};
use chern_core::tbc::{berry_phase_winding, chern_fd, chern_link_variable};
use chern_core::{
    build_honeycomb, eigendecompose, haldane_hamiltonian, kane_mele_hamiltonian, projector,
    select_targeted, spectral_gap, BoundaryCondition, Diagnostics, DisorderSpec, Error, Filling,
    HaldaneFamily, HaldaneParams, HermitianOperator, KaneMeleFamily, KaneMeleParams,
    LatticeGeometry, TwistFamily, TwistGenerator, TwistGrid,
};

use crate::config::{MethodKind, Model, Params, RunConfig, Variant};

/// Numbers produced for one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub value: f64,
    pub integer: i64,
    pub diagnostics: Diagnostics,
    /// Method-specific extra values, named by [`extra_names`].
    pub extras: Vec<f64>,
}

/// Column names of [`Outcome::extras`] for `method`.
pub fn extra_names(method: MethodKind) -> &'static [&'static str] {
    match method {
        MethodKind::SpinSplit => &["c_plus", "c_minus"],
        MethodKind::ChernMatrix => &["m_upup", "m_updown", "m_downup", "m_downdown"],
        MethodKind::Flatness => &["chern"],
        _ => &[],
    }
}

/// Whether `method` yields an exact integer up to rounding noise; ensemble
/// statistics of such methods are taken over the rounded integers.
pub fn is_quantized(cfg: &RunConfig) -> bool {
    match cfg.method {
        MethodKind::TbcLink | MethodKind::Bott | MethodKind::Wilson | MethodKind::Oracle | MethodKind::SpinTbc => true,
        MethodKind::SpinSplit | MethodKind::SpinGeneralized | MethodKind::ChernMatrix => {
            cfg.variant == Variant::Bott
        }
        _ => false,
    }
}

fn haldane_params(p: &Params) -> HaldaneParams {
    HaldaneParams {
        t1: p.t1,
        t2: p.t2,
        phi: p.phi,
        delta0: p.delta,
    }
}

fn kane_mele_params(p: &Params) -> KaneMeleParams {
    KaneMeleParams {
        t: p.t,
        lambda_so: p.lso,
        lambda_r: p.lr,
        delta0: p.delta,
    }
}

fn simple(value: f64, diagnostics: Diagnostics) -> Outcome {
    Outcome {
        value,
        integer: value.round() as i64,
        diagnostics,
        extras: Vec::new(),
    }
}

fn hamiltonian(
    cfg: &RunConfig,
    geom: &LatticeGeometry,
    p: &Params,
    bc: &BoundaryCondition,
    dis: Option<&DisorderSpec>,
) -> Result<HermitianOperator, Error> {
    match cfg.model {
        Model::Haldane => haldane_hamiltonian(geom, &haldane_params(p), bc, dis),
        Model::KaneMele => kane_mele_hamiltonian(geom, &kane_mele_params(p), bc, dis),
    }
}

fn filling(cfg: &RunConfig, p: &Params, geom: &LatticeGeometry) -> Filling {
    match (p.fermi, cfg.obc) {
        (Some(ef), _) => Filling::BelowEnergy(ef),
        (None, true) => Filling::BelowEnergy(0.0),
        (None, false) => Filling::LowestN(geom.num_sites() / 2),
    }
}

/// Runs the configured method at parameters `p` with optional disorder.
pub fn evaluate(cfg: &RunConfig, p: &Params, dis: Option<&DisorderSpec>) -> Result<Outcome, Error> {
    let spinful = cfg.model == Model::KaneMele;
    let geom = build_honeycomb(p.lx, p.ly, spinful)?;
    if cfg.method == MethodKind::Oracle {
        let r = momentum_chern_oracle(&haldane_params(p), cfg.grid.0)?;
        return Ok(simple(r.value, r.diagnostics));
    }
    if cfg.method.uses_twists() {
        return evaluate_twisted(cfg, p, geom, dis);
    }

    let bc = if cfg.obc {
        BoundaryCondition::open()
    } else {
        BoundaryCondition::periodic()
    };
    let h = hamiltonian(cfg, &geom, p, &bc, dis)?;
    let es = eigendecompose(&h)?;
    let ss = select_targeted(&es, filling(cfg, p, &geom))?;
    let gap = (ss.count() < es.dim()).then(|| spectral_gap(&es, ss.count()));
    let pos = if cfg.obc {
        PositionOperators::truncated(&geom, p.margin)?
    } else {
        PositionOperators::new(&geom)
    };
    let with_gap = |mut d: Diagnostics| {
        d.gap = gap;
        d
    };
    let spin_method = cfg.variant.spin_method();
    let out = match cfg.method {
        MethodKind::Noncomm => {
            let r = noncommutative_chern(&projector(&ss), &pos)?;
            simple(r.value, with_gap(r.diagnostics))
        }
        MethodKind::NoncommHi => {
            let r = noncommutative_chern_higher_order_at(&projector(&ss), &pos, p.q)?;
            simple(r.value, with_gap(r.diagnostics))
        }
        MethodKind::Bott => {
            let r = bott_index(&ss, &pos.x.twist(), &pos.y.twist())?;
            simple(r.value, with_gap(r.diagnostics))
        }
        MethodKind::SpinSplit => {
            let split = spin_spectral_split(&ss, &sigma_z(&geom))?;
            let r = spin_chern_split(&split, &pos, spin_method)?;
            Outcome {
                extras: vec![r.plus.value, r.minus.value],
                ..simple(r.spin.value, with_gap(r.spin.diagnostics))
            }
        }
        MethodKind::SpinGeneralized => {
            let gp = GeneralizedPositions::new(&pos, &sigma_z(&geom));
            let r = spin_chern_generalized(&ss, &gp, spin_method)?;
            simple(r.value, with_gap(r.diagnostics))
        }
        MethodKind::ChernMatrix => {
            let m = chern_matrix(&ss, &pos, &sigma_z(&geom), spin_method)?;
            let d = Diagnostics {
                imaginary_residue: Some(m.imaginary_residue),
                min_singular: m.min_singular,
                ..Diagnostics::default()
            };
            Outcome {
                extras: m.entries.iter().flatten().copied().collect(),
                ..simple(m.spin_chern(), with_gap(d))
            }
        }
        _ => unreachable!("twisted methods are dispatched above"),
    };
    Ok(out)
}

fn evaluate_twisted(
    cfg: &RunConfig,
    p: &Params,
    geom: LatticeGeometry,
    dis: Option<&DisorderSpec>,
) -> Result<Outcome, Error> {
    let gauge = cfg.gauge.twist_gauge();
    let generator = if cfg.method == MethodKind::SpinTbc {
        TwistGenerator::SpinX
    } else {
        TwistGenerator::Charge
    };
    let fam: Box<dyn TwistFamily> = match cfg.model {
        Model::Haldane => Box::new(HaldaneFamily::new(geom.clone(), haldane_params(p), gauge, dis)?),
        Model::KaneMele => Box::new(KaneMeleFamily::new(
            geom.clone(),
            kane_mele_params(p),
            gauge,
            generator,
            dis,
        )?),
    };
    let n = match p.fermi {
        None => geom.num_sites() / 2,
        Some(ef) => {
            let es = eigendecompose(&fam.hamiltonian(chern_core::Twist::ZERO)?)?;
            resolve_count(&es.eigenvalues, Filling::BelowEnergy(ef))?
        }
    };
    let grid = TwistGrid::new(cfg.grid.0, cfg.grid.1)?;
    let fam = fam.as_ref();
    let out = match cfg.method {
        MethodKind::TbcLink => {
            let (r, _) = chern_link_variable(fam, n, grid)?;
            simple(r.value, r.diagnostics)
        }
        MethodKind::Flatness => {
            let (r, _) = chern_link_variable(fam, n, grid)?;
            let f = r.diagnostics.flatness.unwrap_or(f64::NAN);
            // the integer column keeps the Chern number of the scan point
            Outcome {
                value: f,
                integer: r.integer,
                diagnostics: r.diagnostics,
                extras: vec![r.value],
            }
        }
        MethodKind::TbcFd => {
            let (r, _) = chern_fd(fam, n, grid)?;
            simple(r.value, r.diagnostics)
        }
        MethodKind::Wilson => {
            let (r, _) = berry_phase_winding(fam, n, cfg.grid.0)?;
            simple(r.value, r.diagnostics)
        }
        MethodKind::SpinTbc => {
            let r = spin_chern_tbc_oracle(fam, n, grid)?;
            simple(r.value, r.diagnostics)
        }
        _ => unreachable!("real-space methods are dispatched by evaluate"),
    };
    Ok(out)
}
