#![no_std]
#![doc = "Exact computer algebra for quasi-split iquantum groups of Dynkin type."]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

mod error;
pub mod freealg;
pub mod hallfq;
pub mod iqg;
pub mod iseq;
pub mod qgroup;
pub mod rootdata;
pub mod scalars;

pub use error::{CoreError, CoreResult};
