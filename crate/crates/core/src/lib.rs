#![no_std]
// `!(x > 0.0)` is the NaN-rejecting form of the guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
extern crate alloc;

pub mod error;
pub mod fermion;
pub mod kernels;
pub mod kvb;
pub mod linalg;
pub mod quad;
pub mod sector;
pub mod special;
pub mod stm;
pub mod twobody;

pub use error::{Error, Result};
