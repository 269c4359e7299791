//! Simulation and strategy synthesis for the quantum penny-flip game.
//!
//! Q moves first and last on a single qubit coin, P moves once in between
//! with one of several unitaries. Q wins if the coin ends in its initial state.

pub mod cli;
pub mod error;
pub mod gamesim;
pub mod nash;
pub mod qalg;
pub mod solver;

pub use error::{Error, Result};
