//! Computations with self-similar groups acting on rooted `p`-ary trees:
//! finite quotients, their lower central and dimension series, the
//! associated graded Lie algebras and Hilbert–Poincaré series.

pub mod error;
pub mod lie;
pub mod linalg;
pub mod quotients;
pub mod series_tools;
pub mod tree;
pub mod vn;

pub use error::{Error, Result};
