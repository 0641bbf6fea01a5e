//! Exact zero statistics for quadratic Dirichlet L-functions over F_q[x].

pub mod characters;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod fqx;
pub mod lfunction;
pub mod qpoly;
pub mod ratios;
pub mod testfn;
pub mod theorems;
pub mod verify;

pub use error::{Error, Result};
