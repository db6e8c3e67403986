use thiserror::Error;

/// Errors raised by the assignment calculus, function tables, bases and
/// Holant instances.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HolantError {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,

    #[error("duplicate symbol `{0}` in alphabet")]
    DuplicateSymbol(String),

    #[error("edge set must contain at least one edge")]
    EmptyEdgeSet,

    #[error("duplicate edge label `{0}`")]
    DuplicateEdge(String),

    #[error("unknown edge label `{0}`")]
    UnknownEdge(String),

    #[error("scope must contain at least one edge")]
    EmptyScope,

    #[error("scope and domain refer to different edge sets")]
    ForeignScope,

    #[error("edge `{0}` is not part of the assignment's domain")]
    ScopeNotSubset(String),

    #[error("domains overlap on edge `{0}`")]
    OverlappingDomains(String),

    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),

    #[error("value {value} at edge `{edge}` is not below the codomain size {size}")]
    ValueOutOfRange { edge: String, value: usize, size: usize },

    #[error("configuration space {radix}^{len} exceeds the enumeration cap of {cap}")]
    SpaceTooLarge { radix: usize, len: usize, cap: usize },

    #[error("index {index} out of range for a space of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("alphabet mismatch between operands")]
    AlphabetMismatch,

    #[error("scope mismatch between operands")]
    ScopeMismatch,

    #[error("table length {found} does not match the expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite table entry at index {0}")]
    NonFinite(usize),

    #[error("basis matrix must be square of size {expected}, got {rows}x{cols}")]
    BasisShape { expected: usize, rows: usize, cols: usize },

    #[error("singular basis: |det T| = {det:e} below threshold {threshold:e}")]
    SingularBasis { det: f64, threshold: f64 },

    #[error("ill-conditioned basis: condition estimate {cond:e} exceeds {cap:e}")]
    IllConditionedBasis { cond: f64, cap: f64 },

    #[error("basis inverse residual {0:e} exceeds 1e-10 after refinement")]
    InaccurateInverse(f64),

    #[error("cannot split {edges} edges into {parts} nonempty parts")]
    InfeasiblePartition { parts: usize, edges: usize },

    #[error("no basis with condition <= {bound} found in {retries} draws")]
    BasisSearchExhausted { bound: f64, retries: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = HolantError> = std::result::Result<T, E>;
