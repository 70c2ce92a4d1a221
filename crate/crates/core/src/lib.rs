//! Geometric invariants of lens spaces from Euclidean edge-length data.
//!
//! The lens space L(p, q) is built from a p-gonal bipyramid whose upper cone
//! faces are glued to the lower ones with a twist of q steps. Joining the two
//! cone vertices cuts it into p tetrahedra; the quotient complex has two
//! vertex classes and p + 2 edge classes. Placing the vertex copies
//! symmetrically around an axis realizes every tetrahedron in Euclidean
//! space, and the angle defects around all edge classes vanish there.
//!
//! From such a realization the crate assembles the scaled Jacobian of the
//! defect map, restricts it to the bulk edge classes, and combines its
//! determinant with the signed tetrahedron volumes and a four-parameter
//! length Jacobian into a single number that is independent of the chosen
//! realization. That number is conjectured to equal
//!
//! ```text
//! (16 / p) sin^2(pi k / p) sin^2(pi q k / p),
//! ```
//!
//! where k labels the rotation angle of the holonomy; the crate ships the
//! machinery to compute it from lengths alone and to test the closed form.

pub mod defect;
pub mod error;
pub mod fixtures;
pub mod invariant;
pub mod lens;
pub mod linalg;
pub mod tetgeom;

pub use error::{Error, Result};
