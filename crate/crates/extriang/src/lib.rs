//! Relative extriangulated structures on finite based categories.
//!
//! The library builds two families of small additive categories with an
//! explicit biadditive extension bifunctor E and a realization of every
//! extension class:
//!
//! * representations of an A_n quiver over F_p (an abelian, hereditary case),
//! * the stable module category of F_p[x]/(x^n) (a triangulated case),
//!
//! and then computes relative theories on top of them: additive subfunctors of
//! E, the closed ones among them, right/left exactness loci of half exact
//! functors, defects of extensions, the Serre lattice of the defect category,
//! and proper classes. A brute-force oracle enumerates all additive
//! subfunctors and cross-checks every classification claim.

pub mod category;
pub mod defects;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod proper;
pub mod quiver;
pub mod relative;
pub mod stmod;
pub mod verify;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("enumeration would produce {count} items, cap is {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("unknown object: {0}")]
    UnknownObject(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("category has no suspension")]
    NoSuspension,

    #[error("internal consistency violation: {0}")]
    InternalConsistency(String),

    #[error("operation not applicable: {0}")]
    Inapplicable(String),

    #[error("functor is not a defect: {0}")]
    NotADefect(String),

    #[error("objects belong to different categories")]
    CategoryMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
