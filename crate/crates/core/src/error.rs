use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a polygon needs at least 3 sides, got {0}")]
    TooFewSides(usize),
    #[error("side length {index} is not a positive finite number: {value}")]
    InvalidLength { index: usize, value: f64 },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("edge {0} has zero length")]
    DegenerateEdge(usize),
    #[error("degenerate segment")]
    DegenerateSegment,
    #[error("circle centers coincide")]
    CoincidentCenters,
    #[error("{n} sides is outside the supported range {min}..={max}")]
    UnsupportedSize { n: usize, min: usize, max: usize },
    #[error("the given angles admit no closed polygon")]
    NoClosure,
    #[error("closing circles are tangent; branch choice is ambiguous")]
    AmbiguousTangency,
    #[error("invalid index selection: {0}")]
    InvalidIndices(String),
    #[error("prefix of length {len} is out of range for {n} sides")]
    PrefixLength { len: usize, n: usize },
    #[error("prefix is not realizable by a convex polygon")]
    PrefixNotInAtlas,
    #[error("no stretched configuration satisfies the convexity filter: {0}")]
    NoStretchedCandidate(String),
    #[error("lengths admit a straight-line configuration")]
    NotGeneric,
    #[error("quadrilateral is not strictly convex")]
    NotStrictlyConvex,
    #[error("expansive motion blocked: {0}")]
    MotionBlocked(String),
    #[error("polygon is not embedded")]
    NotEmbedded,
    #[error("vertex {vertex} lies on edge {edge}")]
    VertexOnEdge { vertex: usize, edge: usize },
    #[error("closure defect {defect:e} exceeds the allowed {limit:e}")]
    OffManifold { defect: f64, limit: f64 },
    #[error("closure projection did not converge within {0} iterations")]
    ClosureDiverged(usize),
    #[error("energy gradient vanishes; no ascent direction")]
    NoAscentDirection,
    #[error("no admissible ascent step below the energy cap")]
    EnergyCapExceeded,
    #[error("step size fell below {0:e} without an admissible step")]
    StepUnderflow(f64),
    #[error("perturbation left the embedded region")]
    PerturbationNotEmbedded,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
