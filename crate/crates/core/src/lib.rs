//! Physical-layer security over multimode fiber links.
//!
//! The crate is split along the signal chain: [`fiber`] solves the LP mode
//! basis, [`linalg`] provides the dense complex matrix services, [`channel`]
//! assembles the Alice/Bob/Eve link and [`security`] runs detection and the
//! Monte-Carlo sweeps on top of it.

pub mod bessel;
pub mod channel;
pub mod error;
pub mod fiber;
pub mod linalg;
pub mod rng;
pub mod security;

pub use error::{Error, Result};
pub use num_complex::Complex64;
