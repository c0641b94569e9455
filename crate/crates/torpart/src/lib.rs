//! Spectral minimal partitions of flat rectangular tori.
//!
//! The torus `T(a,b) = R^2 / (a Z x b Z)` is partitioned into `k` open
//! cells; the energy of a partition is the largest Dirichlet ground-state
//! eigenvalue among its cells. This crate provides:
//!
//! * closed-form torus spectra and strip energies, plus certified
//!   two-sided bounds on the strip-to-hexagon transition values through a
//!   chain of one-dimensional Schrodinger comparisons
//!   ([`analytic`], [`oned`]);
//! * finite-difference grids, masked Dirichlet operators, and a
//!   preconditioned block eigensolver ([`grid`], [`eigensolve`],
//!   [`spectral`]);
//! * a relaxed density formulation optimized by projected gradient
//!   descent with multistart ([`relax`]), and extraction of strong
//!   partitions with connectivity and adjacency analysis ([`extract`]);
//! * reference tilings (strips, cyclic hexagons, the five-square pattern,
//!   a double-cover three-partition) and pair-compatibility diagnostics
//!   ([`tilings`]).

pub mod analytic;
pub mod cli;
pub mod eigensolve;
pub mod error;
pub mod extract;
pub mod geom;
pub mod grid;
pub mod oned;
pub mod relax;
pub mod spectral;
pub mod tilings;

pub use error::{Error, Result};
