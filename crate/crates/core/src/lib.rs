//! Exact reproduction of an algebraic-solvability certificate for the
//! adjoint of the Navier–Stokes equations linearized around an explicit
//! return-method trajectory.
//!
//! The pipeline builds the adjoint system symbolically, eliminates the
//! pressure, prolongs the resulting three equations into a large sparse
//! matrix with polynomial entries, evaluates it at a fixed point, and then
//! uses structural rank, the Dulmage–Mendelsohn decomposition and exact
//! modular elimination to exhibit an invertible square block containing the
//! six first-order derivatives of the unknowns.

pub mod combinatorics;
pub mod pdesystem;
pub mod polyring;
pub mod prolongation;
pub mod structural;
pub mod exactrank;
pub mod pipeline;
