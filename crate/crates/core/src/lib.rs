pub mod coin_rep;
pub mod density;
pub mod error;
pub mod evolution;
pub mod qubit;
pub mod special_math;
pub mod tomography;
pub mod transitions;
pub mod states;

pub use error::{Error, Result};
