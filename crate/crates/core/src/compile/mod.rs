//! Compilers from plan verification to C*-RASP programs, and the token
//! encoding they read.
//!
//! An encoded record is `$ I @ π @ G @`: each initial proposition, action and
//! goal literal is its predicate or schema name followed by its arguments.
//! Objects are extended tokens; negative goals use the `~p` symbol.
//!
//! [`compile_fixed`] targets a fixed object universe and reads object tokens
//! through Σ (no match operations). [`compile_variable`] is universe-free and
//! reaches objects only through match operations.

mod encode;
mod fixed;
mod variable;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crasp::{CraspProgram, Op};
use crate::strips::{classify_domain, Domain};

pub use encode::{decode, encode, encoded_len, negated_symbol, EncodingLayout, SEPARATOR, START};
pub use fixed::compile_fixed;
pub use variable::{compile_variable, ArgMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    DeleteFree,
    WellFormed,
}

impl Mode {
    pub fn id(self) -> &'static str {
        match self {
            Mode::DeleteFree => "df",
            Mode::WellFormed => "wf",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "df" | "delete-free" | "delete_free" => Ok(Mode::DeleteFree),
            "wf" | "well-formed" | "well_formed" => Ok(Mode::WellFormed),
            _ => Err(format!("unknown mode `{s}` (expected `wf` or `df`)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("not supported: {0}")]
    NotSupported(String),
    #[error("objects `{first}` and `{second}` share token value {value}")]
    ObjectCollision {
        first: String,
        second: String,
        value: u64,
    },
    #[error("layout maps {values} objects, instance has {objects}")]
    LayoutTooShort { objects: usize, values: usize },
    #[error("symbol `{0}` is ambiguous in the token encoding")]
    AmbiguousSymbol(String),
    #[error("domain constant `{0}` is not among the objects")]
    MissingConstant(String),
    #[error("cannot decode token {position}: {message}")]
    Decode { position: usize, message: String },
}

/// A compiled program together with per-line provenance.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub program: CraspProgram,
    pub report: CompilationReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompilationReport {
    pub domain: String,
    pub mode: Mode,
    /// `fixed` or `variable`.
    pub universe: String,
    pub lines: usize,
    pub match_ops: usize,
    /// Ground propositions plus ground actions (fixed) or predicates plus
    /// schemas (variable).
    pub domain_size: usize,
    /// One entry per line, in program order.
    pub provenance: Vec<String>,
}

impl CompilationReport {
    fn new(domain: &Domain, mode: Mode, universe: &str, program: &CraspProgram, provenance: Vec<String>, domain_size: usize) -> Self {
        debug_assert_eq!(provenance.len(), program.len());
        CompilationReport {
            domain: domain.name().to_string(),
            mode,
            universe: universe.to_string(),
            lines: program.len(),
            match_ops: program.count_matches(),
            domain_size,
            provenance,
        }
    }
}

/// Provenance of a 1-based program line.
pub fn explain(program: &CraspProgram, report: &CompilationReport, line: usize) -> String {
    assert!(line >= 1 && line <= program.len(), "line {line} out of range");
    report.provenance[line - 1].clone()
}

/// Rejects domains the encoding cannot represent unambiguously: predicate
/// and schema names must differ from each other and from the reserved
/// symbols.
pub fn check_symbols(domain: &Domain) -> Result<(), CompileError> {
    let mut seen = std::collections::HashSet::new();
    let names = domain
        .predicates()
        .iter()
        .map(|p| &p.name)
        .chain(domain.schemas().iter().map(|s| &s.name));
    for n in names {
        let reserved = n == START || n == SEPARATOR || n.starts_with('~') || n.starts_with('#');
        if reserved || !seen.insert(n.as_str()) {
            return Err(CompileError::AmbiguousSymbol(n.clone()));
        }
    }
    Ok(())
}

fn check_mode(domain: &Domain, mode: Mode) -> Result<(), CompileError> {
    let class = classify_domain(domain);
    if class.conditional_effects {
        return Err(CompileError::NotSupported(format!(
            "domain `{}` has conditional effects",
            domain.name()
        )));
    }
    let ok = match mode {
        Mode::DeleteFree => class.delete_free,
        Mode::WellFormed => class.well_formed,
    };
    if !ok {
        let what = match mode {
            Mode::DeleteFree => "delete-free",
            Mode::WellFormed => "well-formed",
        };
        return Err(CompileError::NotSupported(format!(
            "domain `{}` is not {what}",
            domain.name()
        )));
    }
    check_symbols(domain)
}

/// True when every object token is read through a match operation: no Σ
/// symbol of the program names an extended value.
pub fn objects_only_through_match(program: &CraspProgram) -> bool {
    let reads_object = program.ops().iter().any(|op| match op {
        Op::Initial(s) => program.sigma()[*s as usize].starts_with('#'),
        _ => false,
    });
    !reads_object
}
