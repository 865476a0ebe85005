//! Construction and verification of the metaplectic `SO(2p+1)_2` fusion and modular data.
//!
//! The pipeline is: [`fusion_ring`] gives labels and fusion rules, [`f_symbols`] and
//! [`r_symbols`] build the closed-form solutions, [`verifier`] checks the pentagon and
//! hexagon axioms exhaustively, [`spherical_modular`] derives `(S, T)`, and [`classifier`] sorts
//! solutions into monoidal equivalence classes.

pub mod classifier;
pub mod cli;
pub mod error;
pub mod f_symbols;
pub mod fusion_ring;
pub mod gf2;
pub mod io;
pub mod numtheory;
pub mod params;
pub mod r_symbols;
pub mod spherical_modular;
pub mod verifier;

pub use error::{Error, Result};
pub use fusion_ring::{FusionRing, Label};
pub use params::{Params, Sign};
