//! Error vocabulary shared by every layer of the crate.
//!
//! Arithmetic over an algebraic level defined by a squarefree but possibly
//! reducible polynomial can hit a zero divisor while inverting; the level then
//! splits into two branch towers and the caller is expected to re-run the
//! computation once per branch. [`Error::ZeroDivisorSplit`] carries the
//! branches. [`Error::InsufficientPrecision`] drives the adaptive
//! re-computation loops: truncated data never produces a silently wrong
//! answer, it produces this error.

use crate::algebra::Tower;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone)]
pub enum Error {
    /// Inversion of zero (or of an element that is zero in the current branch).
    DivisionByZero,
    /// A zero divisor was hit in an algebraic level; re-run per branch.
    ZeroDivisorSplit {
        generator: String,
        branches: Vec<Tower>,
    },
    /// Defining polynomial of an algebraic generator is not squarefree.
    NotSquarefree,
    /// A generator name is already taken in the tower.
    NameClash(String),
    /// Two elements from incompatible towers were combined.
    TowerMismatch,
    /// A coefficient beyond the certified precision degree was requested.
    InsufficientPrecision { needed: u32, have: u32 },
    /// The map's direction polynomial vanishes identically.
    DicriticalMap,
    /// Vector field is dicritical where a non-dicritical one is required.
    Dicritical,
    /// Blow-up of a diffeomorphism at a direction its linear part does not fix.
    NotInvariantDirection,
    /// The map's linear part is not the identity.
    NotTangentToIdentity,
    /// Resolution exceeded the depth guard (bug or precision starvation).
    DepthExceeded { max_depth: u32 },
    /// Requested index along a separatrix that is not strict.
    SeparatrixNotStrict,
    /// An exact index identity failed; carries the offending location.
    PropertyViolation(String),
    /// The supplied direction is not a characteristic direction.
    NotCharacteristic,
    /// The only-separatrix certificate loop hit its blow-up cap.
    CertificateIncomplete(String),
    /// Residual index vanishes, so the index theorem does not apply.
    IndexZero,
    /// The studied divisor point is a corner.
    CornerPoint,
    /// The divisor is not a strict separatrix of the generator.
    NotTangential,
    /// A numeric orbit left the escape radius.
    Escape { step: usize },
    /// A numeric orbit did not pass the convergence criterion.
    NotConvergent,
    /// The compiled map does not match the supplied normal shape.
    ShapeMismatch(String),
    /// An exact polynomial input was required (not a truncation).
    ExactInputRequired,
    /// A named parameter has no numeric binding.
    UnboundParameter(String),
    /// Input text failed to parse.
    Parse { line: usize, col: usize, msg: String },
    /// Catch-all for internal consistency failures worth surfacing.
    Internal(String),
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::ZeroDivisorSplit { generator, branches } => write!(
                f,
                "zero divisor in level '{generator}'; {} branch towers",
                branches.len()
            ),
            Error::NotSquarefree => write!(f, "defining polynomial is not squarefree"),
            Error::NameClash(n) => write!(f, "generator name '{n}' already in use"),
            Error::TowerMismatch => write!(f, "elements belong to incompatible towers"),
            Error::InsufficientPrecision { needed, have } => {
                write!(f, "insufficient precision: need degree {needed}, have {have}")
            }
            Error::DicriticalMap => write!(f, "every direction is characteristic (dicritical map)"),
            Error::Dicritical => write!(f, "vector field is dicritical"),
            Error::NotInvariantDirection => {
                write!(f, "direction is not invariant under the linear part")
            }
            Error::NotTangentToIdentity => write!(f, "map is not tangent to the identity"),
            Error::DepthExceeded { max_depth } => {
                write!(f, "resolution exceeded depth {max_depth}")
            }
            Error::SeparatrixNotStrict => write!(f, "separatrix is not strict"),
            Error::PropertyViolation(what) => write!(f, "index property violated: {what}"),
            Error::NotCharacteristic => write!(f, "not a characteristic direction"),
            Error::CertificateIncomplete(what) => write!(f, "certificate incomplete: {what}"),
            Error::IndexZero => write!(f, "residual index is zero; theorem inapplicable"),
            Error::CornerPoint => write!(f, "divisor point is a corner"),
            Error::NotTangential => write!(f, "divisor is not a strict separatrix of the generator"),
            Error::Escape { step } => write!(f, "orbit escaped at step {step}"),
            Error::NotConvergent => write!(f, "orbit does not converge"),
            Error::ShapeMismatch(what) => write!(f, "shape mismatch: {what}"),
            Error::ExactInputRequired => write!(f, "operation requires an exact polynomial input"),
            Error::UnboundParameter(n) => write!(f, "parameter '{n}' has no numeric binding"),
            Error::Parse { line, col, msg } => write!(f, "parse error at {line}:{col}: {msg}"),
            Error::Internal(what) => write!(f, "internal error: {what}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    /// Exit status the CLI maps this error to: typed inapplicability errors
    /// exit with 2, everything else with 1.
    pub fn is_inapplicability(&self) -> bool {
        matches!(
            self,
            Error::DicriticalMap
                | Error::Dicritical
                | Error::NotCharacteristic
                | Error::IndexZero
                | Error::CornerPoint
                | Error::NotTangential
                | Error::CertificateIncomplete(_)
                | Error::NotInvariantDirection
        )
    }
}
