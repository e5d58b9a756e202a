//! milnor-forge: exact-arithmetic certificates for Steinberg summands of
//! Dickson coinvariant modules, their Milnor-operation module structure,
//! and annihilator elimination over truncated Lazard rings.
//!
//! Everything is computed over F_p or the p-local rationals Z_(p); there is
//! no floating point anywhere, and every pipeline emits a deterministic,
//! self-contained JSON certificate.

pub mod bidegree;
pub mod bigraded;
pub mod certificate;
pub mod cli;
pub mod coinvariant;
pub mod dickson;
pub mod error;
pub mod fp;
pub mod freeness;
pub mod frobenius;
pub mod groupring;
pub mod lazard;
pub mod level;
pub mod linalg;
pub mod plocal;
pub mod poly;
pub mod quotient;

pub use bidegree::BiDegree;
pub use error::{Error, Result};
pub use plocal::PLocalRational;
pub use poly::FpPolynomial;

/// Default resource caps: group order and module dimension.
pub const DEFAULT_CAP: u64 = 100_000;
