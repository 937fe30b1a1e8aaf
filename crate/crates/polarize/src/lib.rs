//! Numerical toolkit for the product lower bound of unit vector systems.
//!
//! Given n unit vectors v_1, ..., v_n in R^n, the central quantity is
//! sup over unit x of |<x,v_1> * ... * <x,v_n>|, which is bounded below by
//! n^(-n/2) for n <= 14, with equality exactly at orthonormal systems. The
//! crate provides three cooperating layers:
//!
//! * [`slice_min`] — exact minimization of the coordinate product over a
//!   hyperplane slice of the cube [1/s, 1]^n, the combinatorial core of the
//!   bound, together with an independent search oracle.
//! * [`proof_check`] — numerical verification of the derived artifacts:
//!   breakpoints of the slice minimum, per-branch unimodality, the reference
//!   table of powers, and the slope analysis that pins down where the
//!   argument stops working (n = 15, 16).
//! * [`vectors`], [`sign_search`], [`sphere_opt`] — the constructive side:
//!   generating unit vector systems, finding the longest signed sum, and
//!   maximizing the product over the unit sphere to produce witnesses.
//!
//! All randomized entry points take explicit seeds and are deterministic for
//! a fixed seed.

pub mod error;
pub mod proof_check;
pub mod seeding;
pub mod sign_search;
pub mod slice_min;
pub mod sphere_opt;
pub mod vectors;

pub(crate) mod linalg;

pub use error::{Error, Result};
