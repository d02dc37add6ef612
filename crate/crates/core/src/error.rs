use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice needs at least 3 cells per direction, got {lx}x{ly}")]
    LatticeTooSmall { lx: usize, ly: usize },

    #[error("model requires a {expected} geometry")]
    WrongGeometry { expected: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("assembled matrix is not Hermitian (max |H - H^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge for a {size}x{size} matrix")]
    EigenConvergence { size: usize },

    #[error("SVD did not converge for a {size}x{size} matrix")]
    SvdConvergence { size: usize },

    #[error("invalid state selection: {reason}")]
    InvalidSelection { reason: &'static str },

    #[error("ambiguous filling: eigenvalue {eigenvalue:e} is within {tolerance:e} of the selection boundary {boundary}")]
    AmbiguousFilling {
        eigenvalue: f64,
        boundary: f64,
        tolerance: f64,
    },

    #[error("targeted states are gapless at twist ({theta_x}, {theta_y}): gap {gap:e}")]
    Gapless {
        theta_x: f64,
        theta_y: f64,
        gap: f64,
    },

    #[error("twist grid needs at least 2 points per direction, got {nx}x{ny}")]
    GridTooSmall { nx: usize, ny: usize },

    #[error("overlap determinant |det| = {modulus:e} vanishes near twist ({theta_x}, {theta_y}); use a finer grid")]
    GridTooCoarse {
        theta_x: f64,
        theta_y: f64,
        modulus: f64,
    },

    #[error("plaquette flux {flux} at twist ({theta_x}, {theta_y}) is on the branch cut")]
    PlaquetteBranch {
        theta_x: f64,
        theta_y: f64,
        flux: f64,
    },

    #[error("Wilson loop determinant |det| = {modulus:e} vanishes at theta_x = {theta_x}")]
    WilsonLoopDegenerate { theta_x: f64, modulus: f64 },

    #[error("finite-difference order {order} is invalid (need 1 <= Q < {limit})")]
    InvalidOrder { order: usize, limit: usize },

    #[error("projected translation is not quasi-unitary: smallest singular value {min_singular}")]
    NotQuasiUnitary { min_singular: f64 },

    #[error("eigenphase {phase} of the commutator product is on the branch cut")]
    BottBranch { phase: f64 },

    #[error("invariant is not quantized: {value} (tolerance {tolerance:e})")]
    NotQuantized { value: f64, tolerance: f64 },

    #[error("imaginary residue {residue:e} exceeds {tolerance:e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("spin sectors are not separated: smallest |eigenvalue| of P sz P is {sigma_gap:e}")]
    SpinSectorDegenerate { sigma_gap: f64 },

    #[error("Bloch bands touch at k = ({kx}, {ky}): gap {gap:e}")]
    BandTouching { kx: f64, ky: f64, gap: f64 },
}
