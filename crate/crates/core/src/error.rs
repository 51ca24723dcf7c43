use thiserror::Error;

use crate::algebra::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a partial order: {law} fails at {witness:?}")]
    NotPoset { law: &'static str, witness: Vec<usize> },

    #[error("element 0 must be the unique bottom (fails at {0})")]
    BottomNotZero(usize),

    #[error("element n-1 must be the unique top (fails at {0})")]
    TopNotLast(usize),

    #[error("not a lattice: elements {0} and {1} have no unique meet or join")]
    NotLattice(usize, usize),

    #[error("not a Heyting algebra: {{x : {0} ∧ x ≤ {1}}} has no maximum")]
    NotHeyting(usize, usize),

    #[error("invalid involution: {0}")]
    InvalidInvolution(ValidationReport),

    #[error("malformed algebra: {0}")]
    Malformed(String),

    #[error("syntax error at position {position}: expected {}", expected.join(", "))]
    Syntax { position: usize, expected: Vec<String> },

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("filter is not involutive: {0} ∈ F but ¬∼{0} ∉ F")]
    NotInvolutive(usize),

    #[error("the operation is undefined on the trivial one-element algebra")]
    TrivialAlgebra,

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("killer not verified on member {algebra}: witness element {witness}")]
    NotVerified { algebra: usize, witness: usize },

    #[error("size bound exceeded: {requested} > {limit}")]
    SizeBound { requested: usize, limit: usize },

    #[error("candidate does not embed in any power A^n with n <= {n_max}")]
    NoEmbedding { n_max: usize },

    #[error("generator algebra is not subdirectly irreducible")]
    NotSubdirectlyIrreducible,

    #[error("element {element} is outside a carrier of size {size}")]
    OutOfRange { element: usize, size: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Variant name, for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPoset { .. } => "NotPoset",
            Error::BottomNotZero(_) => "BottomNotZero",
            Error::TopNotLast(_) => "TopNotLast",
            Error::NotLattice(..) => "NotLattice",
            Error::NotHeyting(..) => "NotHeyting",
            Error::InvalidInvolution(_) => "InvalidInvolution",
            Error::Malformed(_) => "Malformed",
            Error::Syntax { .. } => "Syntax",
            Error::UnboundVariable(_) => "UnboundVariable",
            Error::NotInvolutive(_) => "NotInvolutive",
            Error::TrivialAlgebra => "TrivialAlgebra",
            Error::InternalInconsistency(_) => "InternalInconsistency",
            Error::NotVerified { .. } => "NotVerified",
            Error::SizeBound { .. } => "SizeBound",
            Error::NoEmbedding { .. } => "NoEmbedding",
            Error::NotSubdirectlyIrreducible => "NotSubdirectlyIrreducible",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::Json(_) => "Json",
            Error::Io(_) => "Io",
        }
    }
}
