use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: String, hi: String },

    #[error("invalid chamber: {0}")]
    InvalidChamber(String),

    #[error("class belongs to lattice {found:?}, expected {expected:?}")]
    OwnerMismatch { expected: String, found: String },

    #[error("class has {found} coefficients, lattice {lattice:?} has rank {expected}")]
    RankMismatch { lattice: String, expected: usize, found: usize },

    #[error("unknown curve {0:?}")]
    UnknownCurve(String),

    #[error("unknown divisor {0:?}")]
    UnknownDivisor(String),

    #[error("pairing with {curve} has degree {degree} in u; subdivide the interval")]
    NonAffinePairing { curve: String, degree: i64 },

    #[error("class {0} is not in the effective cone")]
    NotEffective(String),

    #[error("invalid lattice {name:?}: {reason}")]
    InvalidLattice { name: String, reason: String },

    #[error("zariski iteration did not stabilise after {0} rounds; curve list incomplete?")]
    IterationLimit(usize),

    #[error("chambers cover area {covered} of a domain with area {domain}")]
    DomainNotCovered { covered: String, domain: String },

    #[error("chambers with distinct decompositions overlap: total area {covered} exceeds domain area {domain}")]
    OverlappingChambers { covered: String, domain: String },

    #[error("family is not affine: {0}")]
    NonAffineFamily(String),

    #[error("certificate for {0} failed verification")]
    UnverifiedCertificate(String),

    #[error("no local multiplicity recorded for curve {curve:?} at point {point:?}")]
    MissingMultiplicity { curve: String, point: String },

    #[error("the flag curve {0:?} cannot appear in a cycle restricted to itself")]
    FlagCurveInCycle(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid scenario {name:?}: {reason}")]
    InvalidScenario { name: String, reason: String },

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
