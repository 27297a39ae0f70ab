use std::fmt;

use serde::Serialize;

/// Which inequality of the admissible exponent region failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionReason {
    BelowLowerP,
    BelowLowerQ,
    HyperbolaLow,
    HyperbolaHigh,
    /// Dimension below 3 or an exponent that is not finite and > 1.
    BadInput,
}

impl RegionReason {
    pub fn code(&self) -> &'static str {
        match self {
            RegionReason::BelowLowerP => "below-lower-p",
            RegionReason::BelowLowerQ => "below-lower-q",
            RegionReason::HyperbolaLow => "hyperbola-low",
            RegionReason::HyperbolaHigh => "hyperbola-high",
            RegionReason::BadInput => "bad-input",
        }
    }
}

impl fmt::Display for RegionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("exponents outside the admissible region ({0})")]
    RegionViolation(RegionReason),
    #[error("degenerate rescaling: (q-1)(p-1) = 1")]
    DegenerateScaling,
    #[error("unsupported dimension {0} (expected 3, 4 or 5)")]
    UnsupportedDimension(usize),
    #[error("unsupported Hankel order {0}")]
    UnsupportedOrder(f64),
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("bad grid resolution: {0}")]
    BadResolution(String),
    #[error("spectral annulus holds only {0} grid frequencies (need at least 8)")]
    ResolutionError(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("shift is not a lattice vector: {0}")]
    NonLatticeShift(String),
    #[error("coefficient sample {value} falls below the floor {floor}")]
    FloorViolation { value: f64, floor: f64 },
    #[error("field contains a non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("grid frequency within {gap:e} of the unit sphere (delta = {delta:e})")]
    SingularGrid { gap: f64, delta: f64 },
    #[error("state is zero")]
    ZeroState,
    #[error("interaction C = {0:e} is not positive; state is outside the positive cone")]
    NotInPositiveCone(f64),
    #[error("Armijo line search failed at the minimal step")]
    NoDescentDirection,
    #[error("no admissible seed after {0} attempts")]
    SeedOutsideCone(usize),
    #[error("solution did not converge")]
    NotConverged,
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
