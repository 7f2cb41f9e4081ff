//! Finite-scale toolkit for horoballs, coarsely convex bicombings, trees of
//! spaces and their ideal boundaries.
//!
//! Every space is a finite weighted graph with exact rational edge lengths.
//! The modules build on each other bottom-up:
//!
//! - [`metric`]: validated spaces, exact distances, lexicographic geodesics.
//! - [`horoball`]: combinatorial and glued horoballs, normal geodesics,
//!   minimal-diameter triangle certificates.
//! - [`bicombing`]: combings, convexity checks, Gromov products and the
//!   constants derived from a convexity pair `(E, C)`.
//! - [`tree`]: trees of spaces, free products, augmented spaces.
//! - [`boundary`]: frontier rays, threshold partitions, isolation and
//!   retraction surrogates.
//!
//! Heavy enumerations go through [`par`], which runs on rayon when the
//! `parallel` feature is enabled and falls back to plain loops otherwise.

pub mod bicombing;
pub mod boundary;
pub mod emit;
pub mod error;
pub mod gen;
pub mod horoball;
pub mod length;
pub mod metric;
pub mod par;
pub mod sample;
pub mod tree;

pub use error::{Error, Result};
pub use length::Length;
pub use metric::{Path, Space, SpaceDoc, Vertex};
