pub mod anyons;
pub mod codes;
pub mod decoder;
pub mod error;
pub mod gf2;
pub mod mapper;
pub mod matching;
pub mod pauli;
pub mod threshold;
pub mod toric;

pub use error::{Error, Result};
