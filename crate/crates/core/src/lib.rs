//! Exact dimensions of spaces of modular forms, cusp forms and Eisenstein
//! series of integral weight with trivial or quadratic character for
//! `Gamma0(N)`, the Fricke group `Gamma0+(N)` and, for square-free `N`, the
//! full Atkin-Lehner extension `Gamma0*(N)`.
//!
//! Every closed-form ingredient has an independent brute-force counterpart
//! (quadratic form class enumeration, genus characters, explicit elliptic
//! element enumeration) so the two routes can be compared.

pub mod arith;
pub mod characters;
pub mod cli;
pub mod cusps;
pub mod dims;
pub mod elliptic;
pub mod error;
pub mod qforms;

pub use characters::{AlMatrix, ExtChar, GroupKind, QuadChar, TwoPart, Unit};
pub use dims::{DimReport, Dims};
pub use error::{Error, Result};
pub use qforms::QForm;
