use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("element has a nonzero constant term, expected an element of V0")]
    NonzeroConstant,
    #[error("element is not homogeneous")]
    NotHomogeneous,
    #[error("word {0:?} does not end in e1, element is not in W = Q + V e1")]
    NotInW(String),
    #[error("degree must be at least {min}, got {got}")]
    Degree { min: usize, got: usize },
    #[error("derivation of kind {tag} cannot act on {kind}")]
    KindMismatch {
        tag: &'static str,
        kind: &'static str,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
