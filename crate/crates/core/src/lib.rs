//! Limited belief reasoning: a sound, eventually complete approximation of
//! first-order belief with functions and equality.

pub mod bench;
pub mod clause;
pub mod formula;
pub mod oracle;
pub mod setup;
pub mod solver;
pub mod symbols;
pub mod textio;
