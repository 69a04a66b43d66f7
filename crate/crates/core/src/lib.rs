pub mod classify;
pub mod cli;
pub mod continuation;
pub mod curve;
pub mod error;
pub mod forced;
pub mod numerics;
pub mod unimodal;
pub mod universality;

pub use error::{Error, Result};
