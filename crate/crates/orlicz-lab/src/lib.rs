//! Numerical laboratory for Orlicz-Morrey norms and composition operators.
//!
//! The crate computes Luxemburg-type norms of simple functions over balls,
//! cubes, and box unions, certifies growth-function classes empirically, and
//! checks operator-norm bounds for composition (Koopman) operators induced by
//! measure-controlled maps.
//!
//! Modules:
//! * [`young`]: Young functions, generalized inverses, convexity certificates;
//! * [`growth`]: growth functions, class constants, monotonicity profiles;
//! * [`domain`]: boxes, balls, cubes, simple functions, exact measures;
//! * [`norms`]: Luxemburg and weak Luxemburg norms plus the supremum search;
//! * [`indicators`]: closed-form norms of box indicators;
//! * [`compose`]: composition-operator bounds, dilations, diagonal maps;
//! * [`appendix`]: embedding and sandwich checks for concrete presets.
//!
//! The `examples/` directory has one runnable walk-through per capability;
//! `orlicz-lab` is the thin CLI over the same entry points.

pub mod appendix;
pub mod cli;
pub mod compose;
pub mod domain;
pub mod error;
pub mod growth;
pub mod indicators;
pub mod norms;
pub mod young;

pub use error::{Error, Result};
