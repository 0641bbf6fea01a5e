//! Arithmetic in F_q and F_q[x].

pub mod arith;
pub mod enumerate;
pub mod factor;
pub mod field;
pub mod poly;

pub use field::{Field, FieldSpec, Fq};
pub use poly::Poly;
