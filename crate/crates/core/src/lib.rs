//! Exact compilation of continuous piecewise linear (CPWL) functions into
//! ReLU networks.
//!
//! A CPWL function is given as a list of polyhedral pieces, each carrying an
//! affine map. [`compiler::compile`] turns such an instance into a ReLU
//! network that computes the same function everywhere, built from the
//! max-min lattice form: one min-of-affines network per piece, concatenated
//! in parallel and fed into a max network. All arithmetic is exact rational,
//! so equality of the compiled network and the input function is decidable
//! and tested, not approximated.
//!
//! The crate also ships the size-bound calculators the construction is
//! checked against ([`bounds`]), instance generators and a hyperplane
//! arrangement cell enumerator ([`generate`], [`arrangement`]), exact linear
//! region extraction from small networks ([`regions`]), and an equivalence
//! verifier ([`verify`]).
//!
//! The crate is `no_std` compatible (requires `alloc`); everything involving
//! files, clocks, or command lines lives in the companion `cpwl2relu` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod arrangement;
pub mod bounds;
pub mod builders;
pub mod compiler;
mod error;
pub mod generate;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod rat;
pub mod regions;
pub mod relunet;
pub mod verify;

pub use error::Error;
pub use rat::Rat;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
