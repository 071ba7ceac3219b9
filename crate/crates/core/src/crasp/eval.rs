use std::collections::HashMap;
use std::fmt::Write as _;

use smallvec::SmallVec;

use super::{CraspError, CraspProgram, LocalRel, MatchSpec, Op, Token};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Column {
    Bool(Vec<bool>),
    Count(Vec<i64>),
}

impl Column {
    fn bools(&self) -> &[bool] {
        match self {
            Column::Bool(v) => v,
            Column::Count(_) => unreachable!("typechecked program"),
        }
    }

    fn counts(&self) -> &[i64] {
        match self {
            Column::Count(v) => v,
            Column::Bool(_) => unreachable!("typechecked program"),
        }
    }
}

/// Per-line, per-position values; `columns[line][i - 1]` is the value at
/// position `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalTable {
    pub len: usize,
    pub columns: Vec<Column>,
}

impl EvalTable {
    pub fn bool_at(&self, line: usize, pos: usize) -> bool {
        self.columns[line].bools()[pos - 1]
    }

    pub fn count_at(&self, line: usize, pos: usize) -> i64 {
        self.columns[line].counts()[pos - 1]
    }

    /// One row per line, one tab-separated column per position.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for col in &self.columns {
            let mut first = true;
            let mut cell = |out: &mut String, v: &dyn std::fmt::Display| {
                if !first {
                    out.push('\t');
                }
                first = false;
                let _ = write!(out, "{v}");
            };
            match col {
                Column::Bool(v) => v.iter().for_each(|b| cell(&mut out, b)),
                Column::Count(v) => v.iter().for_each(|c| cell(&mut out, c)),
            }
            out.push('\n');
        }
        out
    }
}

/// Runs every line over `w`. Runs in `O(|ops| · n)` for count lines (running
/// prefix sums) and expected `O(K · n)` per match line (hashing the matched
/// value tuples).
pub fn eval(program: &CraspProgram, w: &[Token]) -> Result<EvalTable, CraspError> {
    let n = w.len();
    for t in w {
        if let Token::Sigma(s) = t {
            if *s as usize >= program.sigma().len() {
                return Err(CraspError::UnknownSigmaSymbol(format!("index {s}")));
            }
        }
    }
    let mut columns: Vec<Column> = Vec::with_capacity(program.len());
    for (line, op) in program.ops().iter().enumerate() {
        let col = match op {
            Op::Initial(s) => Column::Bool(w.iter().map(|t| *t == Token::Sigma(*s)).collect()),
            Op::True => Column::Bool(vec![true; n]),
            Op::One => Column::Count(vec![1; n]),
            Op::Not(a) => Column::Bool(columns[*a].bools().iter().map(|b| !b).collect()),
            Op::And(a, b) => Column::Bool(
                columns[*a]
                    .bools()
                    .iter()
                    .zip(columns[*b].bools())
                    .map(|(x, y)| *x && *y)
                    .collect(),
            ),
            Op::Leq(a, b) => Column::Bool(
                columns[*a]
                    .counts()
                    .iter()
                    .zip(columns[*b].counts())
                    .map(|(x, y)| x <= y)
                    .collect(),
            ),
            Op::Count { filter, rel } => {
                let f = columns[*filter].bools();
                Column::Count(match rel {
                    LocalRel::Top => {
                        let mut acc = 0i64;
                        f.iter()
                            .map(|&b| {
                                acc += b as i64;
                                acc
                            })
                            .collect()
                    }
                    LocalRel::Offset(d) => {
                        let d = *d as usize;
                        (0..n).map(|i| (i >= d && f[i - d]) as i64).collect()
                    }
                })
            }
            Op::Match(spec) => Column::Count(eval_match(spec, w, &columns)),
            Op::Cond(p, a, b) => {
                let (p, a, b) = (columns[*p].bools(), columns[*a].counts(), columns[*b].counts());
                Column::Count((0..n).map(|i| if p[i] { a[i] } else { b[i] }).collect())
            }
            Op::Add(a, b) | Op::Sub(a, b) => {
                let (x, y) = (columns[*a].counts(), columns[*b].counts());
                let add = matches!(op, Op::Add(..));
                let mut out = Vec::with_capacity(n);
                for i in 0..n {
                    let v = if add {
                        x[i].checked_add(y[i])
                    } else {
                        x[i].checked_sub(y[i])
                    };
                    out.push(v.ok_or(CraspError::Overflow {
                        line,
                        position: i + 1,
                    })?);
                }
                Column::Count(out)
            }
        };
        columns.push(col);
    }
    Ok(EvalTable { len: n, columns })
}

type Key = SmallVec<[i128; 4]>;

fn ext_at(w: &[Token], i: usize, back: u32) -> Option<i128> {
    let back = back as usize;
    if i < back {
        return None;
    }
    match w[i - back] {
        Token::Ext(v) => Some(v as i128),
        Token::Sigma(_) => None,
    }
}

fn eval_match(spec: &MatchSpec, w: &[Token], columns: &[Column]) -> Vec<i64> {
    let filter = spec.filter.map(|f| columns[f].bools());
    let mut seen: HashMap<Key, i64> = HashMap::new();
    let mut out = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        let past_key = || -> Option<Key> {
            if filter.is_some_and(|f| !f[i]) {
                return None;
            }
            spec.conjuncts
                .iter()
                .map(|c| ext_at(w, i, c.past).map(|v| v - c.shift as i128))
                .collect()
        };
        let insert = |seen: &mut HashMap<Key, i64>| {
            if let Some(k) = past_key() {
                *seen.entry(k).or_default() += 1;
            }
        };
        if !spec.strict {
            insert(&mut seen);
        }
        let current: Option<Key> = spec
            .conjuncts
            .iter()
            .map(|c| ext_at(w, i, c.current))
            .collect();
        out.push(current.and_then(|k| seen.get(&k).copied()).unwrap_or(0));
        if spec.strict {
            insert(&mut seen);
        }
    }
    out
}

/// Value of the output line at the last position.
pub fn accepts(program: &CraspProgram, w: &[Token]) -> Result<bool, CraspError> {
    if w.is_empty() {
        return Err(CraspError::EmptyInput);
    }
    let table = eval(program, w)?;
    Ok(table.bool_at(program.output(), w.len()))
}
