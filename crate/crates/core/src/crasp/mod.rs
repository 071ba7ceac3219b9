//! C*-RASP: straight-line counting programs over a split alphabet of finitely
//! many named symbols plus unboundedly many integer-valued tokens.
//!
//! Lines are either boolean- or count-valued and may only reference earlier
//! lines. Positions are 1-indexed; a program accepts `w` iff its last line is
//! true at position `|w|`.

mod builder;
mod eval;
mod lower;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use builder::{LineRef, ProgramBuilder};
pub use eval::{accepts, eval, Column, EvalTable};
pub use lower::{lower_match_to_finite, pair_branches, DEFAULT_EXPANSION_BUDGET};

/// A token of a bound input: either an index into the program's Σ table or an
/// extended-alphabet value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    Sigma(u32),
    Ext(u64),
}

/// A token of an unbound input, with Σ symbols named rather than indexed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Symbol {
    Sigma(String),
    Ext(u64),
}

impl Symbol {
    pub fn sigma(name: impl Into<String>) -> Self {
        Symbol::Sigma(name.into())
    }
}

/// `ext_symbol(5) == "#5"`: the Σ name an extended value takes once lifted
/// into a finite alphabet.
pub fn ext_symbol(v: u64) -> String {
    format!("#{v}")
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Sigma(s) if is_bare(s) => f.write_str(s),
            Symbol::Sigma(s) => write!(f, "{s:?}"),
            Symbol::Ext(v) => write!(f, "#{v}"),
        }
    }
}

pub(crate) fn is_bare(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Relation between the counting position `j` and the query position `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocalRel {
    Top,
    /// `i = j + δ`.
    Offset(u32),
}

/// One equality `c[j - past] = c[i - current] + shift`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Conjunct {
    pub past: u32,
    pub current: u32,
    pub shift: i64,
}

impl Conjunct {
    pub fn new(past: u32, current: u32, shift: i64) -> Self {
        Conjunct {
            past,
            current,
            shift,
        }
    }
}

/// Counts positions `j ≤ i` (or `j < i` when `strict`) where `filter(j)`
/// holds and every conjunct matches. A conjunct is false when either
/// referenced position is out of range or holds a Σ token.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatchSpec {
    pub conjuncts: Vec<Conjunct>,
    pub filter: Option<usize>,
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Initial(u32),
    Not(usize),
    And(usize, usize),
    True,
    Leq(usize, usize),
    Count { filter: usize, rel: LocalRel },
    Match(MatchSpec),
    Cond(usize, usize, usize),
    Add(usize, usize),
    Sub(usize, usize),
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    Bool,
    Count,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Bool => "boolean",
            Sort::Count => "count",
        })
    }
}

impl Op {
    pub fn sort(&self) -> Sort {
        match self {
            Op::Initial(_) | Op::Not(_) | Op::And(..) | Op::True | Op::Leq(..) => Sort::Bool,
            _ => Sort::Count,
        }
    }

    /// Operand line indices with the sort each must have.
    pub fn operands(&self) -> Vec<(usize, Sort)> {
        match self {
            Op::Initial(_) | Op::True | Op::One => vec![],
            Op::Not(a) => vec![(*a, Sort::Bool)],
            Op::And(a, b) => vec![(*a, Sort::Bool), (*b, Sort::Bool)],
            Op::Leq(a, b) | Op::Add(a, b) | Op::Sub(a, b) => {
                vec![(*a, Sort::Count), (*b, Sort::Count)]
            }
            Op::Count { filter, .. } => vec![(*filter, Sort::Bool)],
            Op::Match(m) => m.filter.iter().map(|&f| (f, Sort::Bool)).collect(),
            Op::Cond(p, a, b) => vec![(*p, Sort::Bool), (*a, Sort::Count), (*b, Sort::Count)],
        }
    }

    fn max_offset(&self) -> u32 {
        match self {
            Op::Count {
                rel: LocalRel::Offset(d),
                ..
            } => *d,
            Op::Match(m) => m
                .conjuncts
                .iter()
                .map(|c| c.past.max(c.current))
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CraspError {
    #[error("program has no lines")]
    EmptyProgram,
    #[error("line {line}: operand {operand} is not an earlier line")]
    ForwardReference { line: usize, operand: usize },
    #[error("line {line}: expected a {expected} operand, line {operand} is {found}")]
    SortMismatch {
        line: usize,
        operand: usize,
        expected: Sort,
        found: Sort,
    },
    #[error("line {line}: match needs at least one conjunct")]
    EmptyMatch { line: usize },
    #[error("line {line}: offset {offset} exceeds bandwidth {bandwidth}")]
    BandwidthExceeded {
        line: usize,
        offset: u32,
        bandwidth: u32,
    },
    #[error("line {line}: Σ index {index} out of range")]
    SigmaOutOfRange { line: usize, index: u32 },
    #[error("duplicate Σ symbol `{0}`")]
    DuplicateSigma(String),
    #[error("duplicate line name `{0}`")]
    DuplicateName(String),
    #[error("`{0}` is not a valid line name")]
    InvalidName(String),
    #[error("last line must be boolean")]
    OutputNotBoolean,
    #[error("unknown Σ symbol `{0}`")]
    UnknownSigmaSymbol(String),
    #[error("empty input")]
    EmptyInput,
    #[error("line {line}: integer overflow at position {position}")]
    Overflow { line: usize, position: usize },
    #[error("lowering needs {needed} match branches, budget is {budget}")]
    AlphabetTooLarge { needed: u128, budget: usize },
}

const KEYWORDS: &[&str] = &[
    "not", "and", "true", "if", "then", "else", "count", "match", "filter", "sigma", "bandwidth", "i", "j",
];

/// Line names are identifiers (`[A-Za-z_][A-Za-z0-9_']*`) other than the
/// text-format keywords and not starting with `Q_`.
pub fn is_line_name(s: &str) -> bool {
    let mut chars = s.chars();
    let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    head_ok
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !s.starts_with("Q_")
        && !KEYWORDS.contains(&s)
}

/// A type-checked program. The output is the last line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CraspProgram {
    sigma: Vec<String>,
    ops: Vec<Op>,
    names: Vec<String>,
    bandwidth: u32,
    sigma_index: HashMap<String, u32>,
}

impl CraspProgram {
    /// Builds and type-checks a program. Lines without a name get `L{index}`;
    /// a missing bandwidth is inferred as the largest offset used.
    pub fn new(
        sigma: Vec<String>,
        ops: Vec<Op>,
        names: Option<Vec<String>>,
        bandwidth: Option<u32>,
    ) -> Result<Self, CraspError> {
        let mut sigma_index = HashMap::with_capacity(sigma.len());
        for (i, s) in sigma.iter().enumerate() {
            if sigma_index.insert(s.clone(), i as u32).is_some() {
                return Err(CraspError::DuplicateSigma(s.clone()));
            }
        }
        let names = names.unwrap_or_else(|| (0..ops.len()).map(|i| format!("L{i}")).collect());
        assert_eq!(names.len(), ops.len(), "one name per line");
        let bandwidth = bandwidth.unwrap_or_else(|| ops.iter().map(Op::max_offset).max().unwrap_or(0));
        let program = CraspProgram {
            sigma,
            ops,
            names,
            bandwidth,
            sigma_index,
        };
        typecheck(&program)?;
        Ok(program)
    }

    pub fn sigma(&self) -> &[String] {
        &self.sigma
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn bandwidth(&self) -> u32 {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn output(&self) -> usize {
        self.ops.len() - 1
    }

    pub fn sigma_id(&self, name: &str) -> Option<u32> {
        self.sigma_index.get(name).copied()
    }

    /// Resolves named symbols against Σ. An extended value `v` binds to the Σ
    /// symbol `#v` when the program declares it (as lowered and fixed-universe
    /// programs do) and stays an extended token otherwise.
    pub fn bind(&self, input: &[Symbol]) -> Result<Vec<Token>, CraspError> {
        input
            .iter()
            .map(|s| match s {
                Symbol::Sigma(name) => self
                    .sigma_id(name)
                    .map(Token::Sigma)
                    .ok_or_else(|| CraspError::UnknownSigmaSymbol(name.clone())),
                Symbol::Ext(v) => Ok(match self.sigma_id(&ext_symbol(*v)) {
                    Some(id) => Token::Sigma(id),
                    None => Token::Ext(*v),
                }),
            })
            .collect()
    }

    /// Binds and evaluates in one step.
    pub fn accepts_symbols(&self, input: &[Symbol]) -> Result<bool, CraspError> {
        accepts(self, &self.bind(input)?)
    }

    pub fn count_matches(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Match(_))).count()
    }
}

/// Checks sorts, forward references, Σ indices, bandwidth bounds and that the
/// output line is boolean.
pub fn typecheck(program: &CraspProgram) -> Result<(), CraspError> {
    let ops = &program.ops;
    if ops.is_empty() {
        return Err(CraspError::EmptyProgram);
    }
    let mut seen = HashMap::with_capacity(ops.len());
    for n in &program.names {
        if !is_line_name(n) {
            return Err(CraspError::InvalidName(n.clone()));
        }
        if seen.insert(n.as_str(), ()).is_some() {
            return Err(CraspError::DuplicateName(n.clone()));
        }
    }
    for (line, op) in ops.iter().enumerate() {
        if let Op::Initial(s) = op {
            if *s as usize >= program.sigma.len() {
                return Err(CraspError::SigmaOutOfRange { line, index: *s });
            }
        }
        if let Op::Match(m) = op {
            if m.conjuncts.is_empty() {
                return Err(CraspError::EmptyMatch { line });
            }
        }
        let off = op.max_offset();
        if off > program.bandwidth {
            return Err(CraspError::BandwidthExceeded {
                line,
                offset: off,
                bandwidth: program.bandwidth,
            });
        }
        for (operand, expected) in op.operands() {
            if operand >= line {
                return Err(CraspError::ForwardReference { line, operand });
            }
            let found = ops[operand].sort();
            if found != expected {
                return Err(CraspError::SortMismatch {
                    line,
                    operand,
                    expected,
                    found,
                });
            }
        }
    }
    if ops.last().unwrap().sort() != Sort::Bool {
        return Err(CraspError::OutputNotBoolean);
    }
    Ok(())
}

/// Static positional-encoding profile of a program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProgramClass {
    pub lines: usize,
    pub match_ops: usize,
    pub offset_counts: usize,
    pub max_offset: u32,
    /// No offset relations and every match offset is zero: the fragment
    /// whose guarantees hold without positional encodings.
    pub nope_eligible: bool,
}

pub fn classify(program: &CraspProgram) -> ProgramClass {
    let offset_counts = program
        .ops
        .iter()
        .filter(|o| {
            matches!(
                o,
                Op::Count {
                    rel: LocalRel::Offset(_),
                    ..
                }
            )
        })
        .count();
    let match_offsets = program.ops.iter().any(|o| match o {
        Op::Match(m) => m.conjuncts.iter().any(|c| c.past != 0 || c.current != 0),
        _ => false,
    });
    ProgramClass {
        lines: program.ops.len(),
        match_ops: program.count_matches(),
        offset_counts,
        max_offset: program.ops.iter().map(Op::max_offset).max().unwrap_or(0),
        nope_eligible: offset_counts == 0 && !match_offsets,
    }
}
