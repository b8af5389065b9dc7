//! conelab — a finite-dimensional laboratory for symmetric cones.
//!
//! Jordan algebras are represented by structure constants; on top of that the
//! crate realises the cone's order structure and Finsler geometry, decides
//! orientation existence by solving the defining quadratic constraint system,
//! and reconstructs associative C*-products (complex and real) from purely
//! geometric data.

pub mod cstar;
pub mod error;
pub mod geom;
pub mod jalg;
mod linalg;
pub mod order;
pub mod orient;

pub use error::{Error, Result};
pub use jalg::{catalog, AlgebraSpec, Element};
