use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure carries a stable machine-readable code, see [`Error::code`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed document: {0}")]
    Parse(String),
    #[error("space is disconnected: {0}")]
    Disconnected(String),
    #[error("lattice violates 1-discreteness or 2-density: {0}")]
    BadLattice(String),
    #[error("bad edge at {location}: {reason}")]
    BadEdge { location: String, reason: String },
    #[error("basepoint {0:?} is not a vertex")]
    MissingBasepoint(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("horoball depth must be at least 1, got {0}")]
    DepthTooSmall(u32),
    #[error("paths do not share endpoints")]
    EndpointMismatch,
    #[error("sample is empty")]
    EmptySample,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("tree of spaces is not a bipartite tree: {0}")]
    NotBipartite(String),
    #[error("cut vertex {vertex:?} of component {component:?} is not a lattice point")]
    CutNotInLattice { component: String, vertex: String },
    #[error("assembled space is disconnected: {0}")]
    DisconnectedAssembly(String),
    #[error("word depth must be at least 1, got {0}")]
    BadDepth(u32),
    #[error("augmentation level {level} is out of range (components: {components})")]
    BadLevel { level: usize, components: usize },
    #[error("no frontier vertex at radius {0}")]
    RadiusTooLarge(String),
    #[error("rays do not share basepoint and radius")]
    BasepointMismatch,
    #[error("threshold {n_max} exceeds radius {radius}")]
    BadThreshold { n_max: u32, radius: String },
    #[error("space is augmented at level {0}, expected level 0")]
    NotFullyAugmented(usize),
    #[error("ray never meets component {0:?}")]
    NeverMeets(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "PARSE",
            Error::Disconnected(_) => "DISCONNECTED",
            Error::BadLattice(_) => "BAD_LATTICE",
            Error::BadEdge { .. } => "BAD_EDGE",
            Error::MissingBasepoint(_) => "MISSING_BASEPOINT",
            Error::UnknownVertex(_) => "UNKNOWN_VERTEX",
            Error::DepthTooSmall(_) => "DEPTH_TOO_SMALL",
            Error::EndpointMismatch => "ENDPOINT_MISMATCH",
            Error::EmptySample => "EMPTY_SAMPLE",
            Error::BadParams(_) => "BAD_PARAMS",
            Error::DivisionByZero(_) => "DIVISION_BY_ZERO",
            Error::NotBipartite(_) => "NOT_BIPARTITE",
            Error::CutNotInLattice { .. } => "CUT_NOT_IN_LATTICE",
            Error::DisconnectedAssembly(_) => "DISCONNECTED_ASSEMBLY",
            Error::BadDepth(_) => "BAD_DEPTH",
            Error::BadLevel { .. } => "BAD_LEVEL",
            Error::RadiusTooLarge(_) => "RADIUS_TOO_LARGE",
            Error::BasepointMismatch => "BASEPOINT_MISMATCH",
            Error::BadThreshold { .. } => "BAD_THRESHOLD",
            Error::NotFullyAugmented(_) => "NOT_FULLY_AUGMENTED",
            Error::NeverMeets(_) => "NEVER_MEETS",
        }
    }
}
