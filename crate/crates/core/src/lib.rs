//! Inertia-eigenvalue webs on shape space, relative equilibria and their
//! energy-momentum signatures.

pub mod error;
pub mod lie;
pub mod models;
pub mod numeric;

pub use error::{Error, Result};
pub use lie::{EigenFrame, Signature, SymTensor, Vec3};
pub use models::{ModelSystem, ShapePoint};
pub mod web;
pub mod re;
pub mod stability;
pub mod io;
pub mod verify;
