//! Probabilistic error cancellation on top of surface-code logical qubits.

pub mod error;
pub mod linalg;
pub mod pauli;
pub mod ptm;
pub mod quasiprob;

pub use error::{Error, Result};
pub mod dense;
pub mod stab;
pub mod par;
pub mod rng;
pub mod stats;
pub mod surface;
pub mod synth;
pub mod swap;
pub mod frame;
pub mod gst;
pub mod resource;
pub mod harness;
pub mod decision;
pub mod acceptance;
pub mod config;
pub mod run;
