//! Dense eigendecomposition, state selection and projectors.

use alloc::vec::Vec;

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::HermitianOperator;

/// Eigenvalues closer than this to a selection boundary make the selected
/// subspace ambiguous.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: Mat<c64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

pub fn eigendecompose(h: &HermitianOperator) -> Result<EigenSystem> {
    let (eigenvalues, eigenvectors) = linalg::hermitian_eigen(h.as_ref())?;
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Which eigenstates span the targeted subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Filling {
    /// The `n` lowest states.
    LowestN(usize),
    /// All states strictly below the Fermi energy.
    BelowEnergy(f64),
}

/// Column-orthonormal `N × 𝒩` matrix of targeted states.
#[derive(Debug, Clone)]
pub struct StateSet {
    states: Mat<c64>,
    policy: Filling,
}

impl StateSet {
    /// Wraps a matrix with orthonormal columns (checked to `1e-10`).
    pub fn from_columns(states: Mat<c64>, policy: Filling) -> Result<Self> {
        let gram = linalg::overlap(states.as_ref(), states.as_ref());
        let n = gram.nrows();
        let id = Mat::<c64>::identity(n, n);
        if n > 0 && linalg::max_abs_diff(gram.as_ref(), id.as_ref()) > 1e-10 {
            return Err(Error::InvalidSelection {
                reason: "columns are not orthonormal",
            });
        }
        Ok(Self { states, policy })
    }

    pub(crate) fn from_columns_unchecked(states: Mat<c64>, policy: Filling) -> Self {
        Self { states, policy }
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        self.states.as_ref()
    }

    pub fn count(&self) -> usize {
        self.states.ncols()
    }

    pub fn dim(&self) -> usize {
        self.states.nrows()
    }

    pub fn policy(&self) -> Filling {
        self.policy
    }
}

/// Number of states selected by `policy`, after checking that the boundary
/// of the selection is not degenerate.
pub fn resolve_count(eigenvalues: &[f64], policy: Filling) -> Result<usize> {
    let n = eigenvalues.len();
    match policy {
        Filling::LowestN(0) => Err(Error::InvalidSelection {
            reason: "lowest_n(0) selects nothing",
        }),
        Filling::LowestN(k) if k > n => Err(Error::InvalidSelection {
            reason: "more states requested than the dimension",
        }),
        Filling::LowestN(k) => {
            if k < n && eigenvalues[k] - eigenvalues[k - 1] < DEGENERACY_TOL {
                return Err(Error::AmbiguousFilling {
                    eigenvalue: eigenvalues[k],
                    boundary: eigenvalues[k - 1],
                    tolerance: DEGENERACY_TOL,
                });
            }
            Ok(k)
        }
        Filling::BelowEnergy(ef) => {
            if let Some(&e) = eigenvalues.iter().find(|&&e| (e - ef).abs() < DEGENERACY_TOL) {
                return Err(Error::AmbiguousFilling {
                    eigenvalue: e,
                    boundary: ef,
                    tolerance: DEGENERACY_TOL,
                });
            }
            let k = eigenvalues.iter().take_while(|&&e| e < ef).count();
            if k == 0 {
                return Err(Error::InvalidSelection {
                    reason: "no states below the Fermi energy",
                });
            }
            Ok(k)
        }
    }
}

pub fn select_targeted(es: &EigenSystem, policy: Filling) -> Result<StateSet> {
    let k = resolve_count(&es.eigenvalues, policy)?;
    Ok(StateSet {
        states: es.eigenvectors.subcols(0, k).to_owned(),
        policy,
    })
}

/// `P = Ψ Ψ^†`
#[derive(Debug, Clone)]
pub struct Projector {
    matrix: Mat<c64>,
    rank: usize,
}

impl Projector {
    pub fn as_ref(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest of `|P - P^†|`, `|P² - P|` and `|Tr P - rank|`.
    pub fn defect(&self) -> f64 {
        let p = self.matrix.as_ref();
        let herm = crate::operator::hermiticity_deviation(p);
        let sq = p * p;
        let idem = linalg::max_abs_diff(sq.as_ref(), p);
        let tr = (linalg::trace(p).re - self.rank as f64).abs();
        herm.max(idem).max(tr)
    }
}

pub fn projector(ss: &StateSet) -> Projector {
    let psi = ss.as_ref();
    Projector {
        matrix: psi * psi.adjoint(),
        rank: ss.count(),
    }
}

/// `λ_{𝒩+1} − λ_𝒩` (one-based), the gap above the `n` lowest states.
pub fn spectral_gap(es: &EigenSystem, n: usize) -> f64 {
    assert!(
        n >= 1 && n < es.dim(),
        "spectral_gap needs 1 <= n < N (n = {n}, N = {})",
        es.dim()
    );
    es.eigenvalues[n] - es.eigenvalues[n - 1]
}
