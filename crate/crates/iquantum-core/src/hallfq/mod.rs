//! Hall algebras of ıquiver algebras over finite fields.

pub mod algebra;
pub mod catalog;
pub mod fq;
pub mod hall;
pub mod identities;
pub mod psi;
pub mod reflect;

pub use algebra::{build_bound_algebra, BoundAlgebra, FqRep, DEFAULT_RANK_CAP};
pub use fq::{Fq, Mat};
pub use catalog::{Catalog, CatalogOptions, ClassKey};
pub use hall::{hall_generic_coefficient, Hall, HallElem, HallMethod, ReducedElem};
