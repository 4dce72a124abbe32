pub mod arith;
pub mod atm;
pub mod cli;
pub mod codec;
pub mod dtm;
pub mod gen;
pub mod prenex;
pub mod tiling;
pub mod verifier;

/// Tape symbol index into a machine's alphabet.
pub type Sym = u8;
/// State index into a machine's state list.
pub type StateId = usize;
