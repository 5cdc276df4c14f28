pub mod cli;
pub mod complexes;
pub mod dercat;
pub mod error;
pub mod globalext;
pub mod gradedmod;
pub mod groebner;
pub mod linal;
pub mod polyring;

pub use error::{Error, Result};
