//! F-symbols: closed-form blocks and the full store of F-matrices for one solution.

pub mod blocks;
mod store;

pub use blocks::{build_block, build_g, build_h, j_entry, orthogonality_residual, Block};
pub use store::{channels, FMatrix, FStore, BUILD_TOLERANCE};
