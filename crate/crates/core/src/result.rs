//! Invariant values with their provenance and numerical diagnostics.

/// How an invariant was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    TbcLinkVariable,
    TbcFiniteDifference,
    WilsonLoop,
    MomentumOracle,
    Noncommutative,
    NoncommutativeHigherOrder { order: usize },
    Bott,
    SpinSplitNoncommutative,
    SpinSplitBott,
    SpinGeneralizedNoncommutative,
    SpinGeneralizedBott,
    ChernMatrixNoncommutative,
    ChernMatrixBott,
    SpinTbcLinkVariable,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::TbcLinkVariable => "tbc-link",
            Method::TbcFiniteDifference => "tbc-fd",
            Method::WilsonLoop => "wilson",
            Method::MomentumOracle => "oracle",
            Method::Noncommutative => "noncomm",
            Method::NoncommutativeHigherOrder { .. } => "noncomm-hi",
            Method::Bott => "bott",
            Method::SpinSplitNoncommutative => "spin-split-noncomm",
            Method::SpinSplitBott => "spin-split-bott",
            Method::SpinGeneralizedNoncommutative => "spin-generalized-noncomm",
            Method::SpinGeneralizedBott => "spin-generalized-bott",
            Method::ChernMatrixNoncommutative => "chern-matrix-noncomm",
            Method::ChernMatrixBott => "chern-matrix-bott",
            Method::SpinTbcLinkVariable => "spin-tbc",
        }
    }
}

/// Optional numerical side information; `None` means "not applicable".
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// Smallest spectral gap above the targeted states.
    pub gap: Option<f64>,
    /// `max TrF − min TrF` over the twist grid.
    pub flatness: Option<f64>,
    /// Smallest singular value of the projected translations.
    pub min_singular: Option<f64>,
    /// `max |σ_k − 1|` of the projected translations.
    pub unitarity_deviation: Option<f64>,
    /// Discarded imaginary part of a quantity that should be real.
    pub imaginary_residue: Option<f64>,
    /// Distance of the value from the nearest allowed quantized value.
    pub quantization_error: Option<f64>,
    /// Largest `|flux|` of a single plaquette.
    pub max_plaquette_flux: Option<f64>,
    /// Smallest `|eigenvalue|` of `P σz P` on the targeted subspace.
    pub sigma_gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantResult {
    pub value: f64,
    /// `value` rounded to the nearest integer.
    pub integer: i64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl InvariantResult {
    pub fn new(value: f64, method: Method, diagnostics: Diagnostics) -> Self {
        Self {
            value,
            integer: libm::round(value) as i64,
            method,
            diagnostics,
        }
    }

    /// `|value − round(value)|`
    pub fn integer_deviation(&self) -> f64 {
        (self.value - libm::round(self.value)).abs()
    }
}
