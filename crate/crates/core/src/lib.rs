//! Interval-valued Volterra integral equations.
//!
//! Endpoint interval arithmetic ([`interval`]), continuous interval-valued
//! functions and their sup metric ([`ivfun`]), dyadic Schauder projections
//! ([`schauder`]), a Picard forward solver with collage error bounds
//! ([`volterra`]) and collage-based recovery of kernel parameters from a
//! target solution ([`inverse`]).

pub mod config;
pub mod error;
pub mod interval;
pub mod inverse;
pub mod ivfun;
pub mod optim;
pub mod scenarios;
pub mod schauder;
pub mod volterra;

pub use error::{Error, Result};
pub use interval::Interval;
pub use ivfun::{metric_h, Domain, EvalGrid, GridFun, GridFun2D, IvFun1D, IvFun2D};
