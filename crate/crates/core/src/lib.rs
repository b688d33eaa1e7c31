//! Abstract solvers for disjunctive answer set programs.
//!
//! Solvers are transition systems over states built from records of
//! literals. A single-layer graph searches one program; a two-layer graph
//! generates candidates on the left and checks their minimality on the right
//! through a witness program. Brute-force oracles and an exhaustive explorer
//! check the graphs on small programs.

pub mod engine;
pub mod extensions;
pub mod oracle;
pub mod program;
pub mod propagators;
pub mod random;
pub mod record;
pub mod transforms;

pub use program::{parse_program, Atom, AtomTable, Lit, ParseError, Program, Rule};
pub use record::{Assign, Record};
