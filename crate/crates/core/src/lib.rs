//! Exact arithmetic invariants of hyperbolic Coxeter polyhedra.
//!
//! The crate is organised bottom-up: [`exact`] provides quadratic towers,
//! [`quadfield`] the arithmetic of a real quadratic field, [`coxeter`] Gram
//! matrices and diagrams, [`vinberg`] the arithmeticity criterion,
//! [`qforms`] local invariants of quadratic forms and [`garland`] the
//! combinatorics of gluing polyhedra into chains.

pub mod coxeter;
pub mod error;
pub mod exact;
pub mod garland;
pub mod qforms;
pub mod quadfield;
pub mod vinberg;

pub use coxeter::{CoxeterDiagram, EdgeKind, Weight};
pub use error::{Error, Result};
pub use quadfield::{Field, Place, PrimeIdeal, PrimeKind, QuadField};
pub use exact::{Embedding, Inertia, Matrix, Rational, Tower, TowerBuilder, TowerElement};
