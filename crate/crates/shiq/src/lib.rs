//! Text formats and the command-line driver for the `shiq-core` reasoner.

pub mod cli;
pub mod syntax;
