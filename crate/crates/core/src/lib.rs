//! Multiplayer parity games played with classical strategies, deformed GHZ
//! states and deformed rotated-surface-code states.
//!
//! The crate is split along the two computational routes it cross-checks:
//!
//! - [`qsim`], [`lattice`] and [`prep`] build and simulate the measurement-and-
//!   feedback preparation circuits exactly, branch by branch.
//! - [`rbim`] evaluates the same victory probability through the random-bond
//!   Ising model on the Nishimori line.
//!
//! [`game`] holds the game itself (promise, win condition, classical optimum)
//! and [`harness`] runs sweeps, bootstrap error bars and CSV/SVG output.

pub mod error;
pub mod game;
pub mod harness;
pub mod lattice;
pub mod prep;
pub mod qsim;
pub mod rbim;
pub mod seeds;

pub use error::{Error, Result};
