//! Fredholm-determinant numerics for the Airy₁ and Airy₂ processes.
//!
//! Everything here is deterministic dense linear algebra on composite
//! Gauss–Legendre grids. The crate is `no_std` (it needs `alloc`); the
//! `parallel` feature spreads the heavy matrix products over a rayon pool
//! without changing any result bit.
//!
//! ```
//! use airyproc_core::{airy1, GridParams};
//!
//! let p = GridParams::default();
//! let f = airy1::marginal_cdf(0.0, &p).unwrap();
//! assert!((f.value - 0.831908066202944).abs() < 1e-10);
//! ```
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod airy1;
pub mod airy2;
pub mod fredholm;
pub mod kernels;
pub mod quadrature;
pub mod specfun;

mod engine;
mod error;
mod par;

pub use error::{Error, Result};
pub use fredholm::{DetResult, DiscreteOperator, Matrix};
pub use quadrature::{GridParams, QuadGrid};
