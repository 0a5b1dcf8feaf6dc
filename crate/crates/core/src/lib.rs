//! Random walks on group actions.

pub mod action;
pub mod error;
pub mod inverted;
pub mod lamplighter;
pub mod mc;
pub mod measure;
pub mod spectral;
pub mod stats;
pub mod synth;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
