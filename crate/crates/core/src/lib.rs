//! Plan-verification laboratory.
//!
//! * [`strips`] — ground-truth planning semantics (grounding, successor
//!   states, plan validation, subclass classification).
//! * [`dsl`] — text formats for domains, instances, plans and C*-RASP
//!   programs.
//! * [`crasp`] — the C*-RASP language: AST, type checker, interpreter and the
//!   finite-alphabet lowering of match operations.
//! * [`compile`] — compilers from delete-free / well-formed verification
//!   tasks to C-RASP and C*-RASP programs, and the token encoding they read.
//! * [`domains`] — the benchmark domains (Heavy Grippers, Colors, Lights Out),
//!   the FlipFlop instance, and the GF(2) view of Lights Out.
//! * [`datagen`] — dataset generation, plan corruption, tokenization and
//!   JSONL export.
//! * [`theory`] — brute-force language and soundness checks.

pub mod strips;


pub use strips::{
    Atom, Domain, GroundAction, GroundLiteral, Instance, ObjId, Plan, PredId, SchemaId, State,
    Verdict,
};
pub mod crasp;
pub mod domains;
pub mod dsl;
pub mod compile;
pub mod datagen;
pub mod theory;
