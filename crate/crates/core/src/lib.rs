//! Chern numbers of finite two-dimensional tight-binding models.
//!
//! The crate builds honeycomb Haldane and Kane–Mele Hamiltonians under
//! periodic, twisted (boundary or uniform gauge) and open boundary
//! conditions, and evaluates the Chern number of a gapped set of states by
//! several independent routes:
//!
//! * link-variable and finite-difference integration of the Berry curvature
//!   over the twist-angle torus ([`tbc`]),
//! * the non-commutative real-space formula and the Bott index from a single
//!   diagonalization ([`realspace`]),
//! * spin Chern numbers of quantum spin Hall models ([`spin`]),
//! * a Bloch-momentum oracle for clean Haldane models ([`bloch`]).
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. The `parallel` feature evaluates twist grids on the rayon pool;
//! results are reduced in grid order, so they do not depend on the number of
//! worker threads.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bloch;
pub mod disorder;
pub mod error;
pub mod lattice;
mod linalg;
pub mod models;
pub mod operator;
pub mod realspace;
pub mod result;
pub mod spectra;
pub mod spin;
pub mod tbc;

pub use faer::c64;

pub use disorder::{derive_seed, disorder_potential, DisorderSpec};
pub use error::{Error, Result};
pub use lattice::{build_honeycomb, LatticeGeometry, Spin, Sublattice};
pub use models::{
    haldane_hamiltonian, kane_mele_hamiltonian, BoundaryCondition, BoundaryKind, HaldaneFamily,
    HaldaneParams, KaneMeleFamily, KaneMeleParams, Twist, TwistGauge, TwistGenerator,
};
pub use operator::{DiagonalUnitary, HermitianOperator};
pub use result::{Diagnostics, InvariantResult, Method};
pub use spectra::{
    eigendecompose, projector, select_targeted, spectral_gap, EigenSystem, Filling, Projector,
    StateSet,
};
pub use tbc::{Axis, CurvatureField, TwistFamily, TwistGrid};
