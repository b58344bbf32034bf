use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate arrow `{0}`")]
    DuplicateArrow(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("paths are not composable: source {source_vertex} of the left path differs from target {target_vertex} of the right path")]
    NonComposable {
        source_vertex: String,
        target_vertex: String,
    },
    #[error("relation terms disagree on endpoints")]
    MixedEndpoints,
    #[error("relation has no terms")]
    EmptyRelation,
    #[error("relation has a zero coefficient")]
    ZeroCoefficient,
    #[error("relation contains a path of length zero")]
    TrivialPathInRelation,
    #[error("objects live over different quivers")]
    DifferentQuivers,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dimension vector mismatch: {0}")]
    WrongDimension(String),
    #[error("not a cocycle: twisted evaluation of relation {relation} is nonzero")]
    NotACocycle { relation: usize },
    #[error("representation is not a point of the module variety (relation {relation} does not vanish)")]
    NotAVarietyPoint { relation: usize },
    #[error("Euler residual for Ext^2 is negative ({value}); the global dimension assertion is inconsistent with the data")]
    NegativeExt2 { value: i64 },
    #[error("quiver has an oriented cycle; the Euler form is not a module invariant here")]
    NotTriangular,
    #[error("Hom(V, U) has dimension {0}, stratum requires 0")]
    HomNotZero(usize),
    #[error("constrained cocycle locus is not a linear subspace (generic stratum dimension {generic_dim})")]
    NonlinearLocus { generic_dim: usize },
    #[error("invalid family label: {0}")]
    InvalidLabel(String),
    #[error("invalid family parameters: {0}")]
    InvalidParams(String),
    #[error("decomposition mismatch at (u = {u}, v = {v}): direct {direct}, four-summand total {total}")]
    DecompositionMismatch {
        u: String,
        v: String,
        direct: usize,
        total: usize,
    },
    #[error("inequality violated at (u = {u}, v = {v}): dim Z_S(M,M) = {direct} > a(d) = {bound}")]
    InequalityViolated {
        u: String,
        v: String,
        direct: usize,
        bound: i64,
    },
    #[error("check failed at (u = {u}, v = {v}): {reason}")]
    CheckFailed { u: String, v: String, reason: String },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
