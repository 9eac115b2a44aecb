//! Complete non-CMC biconservative surfaces in hyperbolic 3-space.
//!
//! The crate builds the intrinsic metric family and the three explicit
//! extrinsic surface families, glues two branches into complete surfaces,
//! and audits every claimed identity with finite differences taken from
//! sampled embeddings only.

pub mod export;
pub mod extrinsic;
pub mod intrinsic;
pub mod models;
pub mod numerics;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
    #[error(transparent)]
    Model(#[from] models::ModelError),
    #[error(transparent)]
    Intrinsic(#[from] intrinsic::IntrinsicError),
    #[error(transparent)]
    Extrinsic(#[from] extrinsic::ExtrinsicError),
    #[error(transparent)]
    Verify(#[from] verify::VerifyError),
    #[error(transparent)]
    Export(#[from] export::ExportError),
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
