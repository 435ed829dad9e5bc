use thiserror::Error;

/// Errors raised by the algebraic engine and the geometric constructions.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalar variant mismatch: {0} vs {1}")]
    VariantMismatch(&'static str, &'static str),
    #[error("pole: denominator vanishes at {0}")]
    Pole(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("elements belong to different presentations")]
    PresentationMismatch,
    #[error("rewrite rule `{0}` does not decrease in the monomial order")]
    NonTerminating(String),
    #[error("critical pair on `{word}` does not resolve: {left} vs {right}")]
    NotConfluent {
        word: String,
        left: String,
        right: String,
    },
    #[error("map violates relation `{relation}`: {witness}")]
    RelationViolated { relation: String, witness: String },
    #[error("derivation `{derivation}` is ill-defined on relation `{relation}`: {witness}")]
    IllDefinedDerivation {
        derivation: String,
        relation: String,
        witness: String,
    },
    #[error("no star structure available")]
    NoStarStructure,
    #[error("star table is not an involutive anti-automorphism: {0}")]
    BadStar(String),
    #[error("index map is not an involution on 0..{0}")]
    NotInvolution(usize),
    #[error("star structure check failed: {0}")]
    StarStructure(String),
    #[error("matrices do not commute: {0}")]
    NonCommuting(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("matrix is not unitary: {0}")]
    NonUnitary(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("map is not linear over the algebra: {0}")]
    NonLinear(String),
    #[error("map is not a projection: {0}")]
    NotProjection(String),
    #[error("projection does not commute with the twisted maps: {0}")]
    ProjectionNotCompatible(String),
    #[error("not invertible: {0}")]
    NonInvertible(String),
    #[error("gamma table violates the required star symmetry: {0}")]
    GammaSymmetry(String),
    #[error("projection is not orthogonal for the form: {0}")]
    NonOrthogonal(String),
    #[error("anchor images do not form a basis: {0}")]
    AnchorNotBasis(String),
    #[error("no regularity witness found for derivation {0}")]
    NotRegular(usize),
    #[error("hermitian form is not invariant: {0}")]
    NonInvariant(String),
    #[error("lie structure invalid: {0}")]
    InvalidLieStructure(String),
    #[error("vector is not a common eigenvector: {0}")]
    NotEigenvector(String),
    #[error("action table invalid: {0}")]
    InvalidActionTable(String),
    #[error("linear system has no nonzero solution: {0}")]
    NoSolution(String),
    #[error("operation requires a projector p")]
    MissingProjector,
    #[error("matrix is not hermitian: {0}")]
    NotHermitian(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
