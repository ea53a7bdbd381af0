//! Crossing, OU and CN matrices of braid words, the BW-ladder rewriting
//! calculus, and certificate-producing CN-realizers.

pub mod braid;
pub mod formations;
pub mod ladder;
pub mod matrix;
pub mod par;
pub mod realizer;
pub mod tstructure;

pub use braid::{BraidError, DiagramWord, Over, PairCountMatrix, Permutation, ProjectionWord, StrandCount};
pub use formations::{FormationDescriptor, FormationError};
pub use ladder::{LadderDiagram, LadderEdge, LadderError, Move, MoveId, MoveTrace};
pub use matrix::{MatrixError, T0Violation, UpperMask};
pub use par::Exec;
pub use realizer::{CertKind, Certificate, RealizeError, Realizer, RealizerOptions};
pub use tstructure::{GridGraph, TStructureError};

/// Any error raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Ladder(#[from] LadderError),
    #[error(transparent)]
    Formation(#[from] FormationError),
    #[error(transparent)]
    TStructure(#[from] TStructureError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Braid(e) => match e {
                BraidError::InvalidStrandCount(_) => "InvalidStrandCount",
                BraidError::LetterOutOfRange { .. } => "LetterOutOfRange",
                BraidError::MismatchedStrandCount(..) => "MismatchedStrandCount",
                BraidError::OffsetOutOfRange { .. } => "OffsetOutOfRange",
                BraidError::BadToken(_) => "BadToken",
                BraidError::BadShape(_) => "BadShape",
            },
            Error::Matrix(e) => matrix_code(e),
            Error::Ladder(e) => match e {
                LadderError::IndexOutOfRange(..) => "IndexOutOfRange",
                LadderError::BlackEdgePresent(_) => "BlackEdgePresent",
                LadderError::IllegalMove(_) => "IllegalMove",
                LadderError::BudgetExhausted(_) => "BudgetExhausted",
                LadderError::Parse(_) => "Parse",
                LadderError::BadMultiplicity(..) => "BadMultiplicity",
            },
            Error::Formation(e) => match e {
                FormationError::InvalidParameters(_) => "InvalidParameters",
                FormationError::Parse(_) => "Parse",
                FormationError::Construction(_) => "Construction",
            },
            Error::TStructure(e) => match e {
                TStructureError::VertexNotFound(..) => "VertexNotFound",
                TStructureError::InvalidEdge(..) => "InvalidEdge",
                TStructureError::Parse(_) => "Parse",
                TStructureError::Matrix(m) => matrix_code(m),
            },
            Error::Realize(e) => match e {
                RealizeError::NotT0(_) => "NotT0",
                RealizeError::SumNotEven(..) => "SumNotEven",
                RealizeError::SumNotT0(_) => "SumNotT0",
                RealizeError::RealizationFailed(_) => "RealizationFailed",
                RealizeError::Matrix(m) => matrix_code(m),
                RealizeError::Braid(_) => "BadToken",
            },
        }
    }
}

fn matrix_code(e: &MatrixError) -> &'static str {
    match e {
        MatrixError::NonZeroDiagonal(_) => "NonZeroDiagonal",
        MatrixError::StrandCountTooLarge(_) => "StrandCountTooLarge",
        MatrixError::NotSymmetric(..) => "NotSymmetric",
        MatrixError::Negative(..) => "Negative",
        MatrixError::Odd(..) => "Odd",
        MatrixError::PairOutOfRange(..) => "PairOutOfRange",
        MatrixError::Parse(_) => "Parse",
    }
}
