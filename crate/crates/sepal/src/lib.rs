//! Exact computer algebra for germs of plane vector fields and tangent to
//! the identity diffeomorphisms.
//!
//! The crate computes, over exact coefficient towers (rationals, free
//! parameters, algebraic extensions with lazy splitting):
//!
//! - infinitesimal generators (`log` of a diffeomorphism) and time-1 maps
//!   (`exp` of a vector field) as certified-precision jets,
//! - characteristic directions, fixed curves, blow-up transforms,
//! - saturation, Seidenberg resolution trees, separatrix enumeration,
//!   saddle-node detection,
//! - Camacho-Sad and residual indices with the classical index identities as
//!   exact validators,
//! - the trichotomy classifier for a characteristic direction (fixed curve /
//!   invariant sets asymptotic to a separatrix / parabolic domains foliated
//!   by parabolic curves), the non-vanishing-index variant, and the
//!   along-a-divisor variant,
//! - double-precision orbit experiments backing up the symbolic verdicts.
//!
//! Start with [`input::parse_source`] to read the text grammar, or build
//! [`germs::Diffeo`] / [`germs::VectorField`] values directly. The `book/`
//! directory of the repository walks through the theory chapter by chapter
//! with runnable snippets.

pub mod algebra;
pub mod blowup;
pub mod classify;
pub mod dynamics;
pub mod error;
pub mod germs;
pub mod index;
pub mod input;

pub use error::{Error, Result};
