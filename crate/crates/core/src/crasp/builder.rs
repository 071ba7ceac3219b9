use std::collections::HashMap;

use super::{Conjunct, CraspProgram, LocalRel, MatchSpec, Op};

/// Index of a line inside a [`ProgramBuilder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineRef(pub usize);

/// Incremental program construction with structural sharing: emitting an op
/// that already exists returns the existing line. Every new line is tagged
/// with the current label, which becomes its provenance.
#[derive(Debug, Default)]
pub struct ProgramBuilder {
    sigma: Vec<String>,
    sigma_index: HashMap<String, u32>,
    ops: Vec<Op>,
    memo: HashMap<Op, usize>,
    labels: Vec<String>,
    names: Vec<Option<String>>,
    label: String,
    consts: Vec<LineRef>,
}

impl ProgramBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_sigma<S: AsRef<str>>(sigma: &[S]) -> Self {
        let mut b = Self::new();
        for s in sigma {
            b.sigma_symbol(s.as_ref());
        }
        b
    }

    /// Interns a Σ symbol without emitting a line.
    pub fn sigma_symbol(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.sigma_index.get(name) {
            return id;
        }
        let id = self.sigma.len() as u32;
        self.sigma.push(name.to_string());
        self.sigma_index.insert(name.to_string(), id);
        id
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Gives a line a display name for the text format (first name wins).
    /// Characters that cannot appear in a line name become `_`.
    pub fn name(&mut self, line: LineRef, name: impl Into<String>) {
        let name: String = name
            .into()
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '\'' { c } else { '_' })
            .collect();
        let slot = &mut self.names[line.0];
        if slot.is_none() {
            *slot = Some(name);
        }
    }

    pub fn op(&mut self, op: Op) -> LineRef {
        if let Some(&i) = self.memo.get(&op) {
            return LineRef(i);
        }
        let i = self.ops.len();
        self.memo.insert(op.clone(), i);
        self.ops.push(op);
        self.labels.push(self.label.clone());
        self.names.push(None);
        LineRef(i)
    }

    pub fn initial(&mut self, sym: &str) -> LineRef {
        let s = self.sigma_symbol(sym);
        self.op(Op::Initial(s))
    }

    pub fn truth(&mut self) -> LineRef {
        self.op(Op::True)
    }

    pub fn not(&mut self, a: LineRef) -> LineRef {
        if let Op::Not(inner) = self.ops[a.0] {
            return LineRef(inner);
        }
        self.op(Op::Not(a.0))
    }

    pub fn and(&mut self, a: LineRef, b: LineRef) -> LineRef {
        if a == b {
            return a;
        }
        let (a, b) = (a.min(b), a.max(b));
        self.op(Op::And(a.0, b.0))
    }

    /// Conjunction of all lines; `⊤` when empty.
    pub fn and_all(&mut self, lines: impl IntoIterator<Item = LineRef>) -> LineRef {
        let mut acc: Option<LineRef> = None;
        for l in lines {
            acc = Some(match acc {
                None => l,
                Some(a) => self.and(a, l),
            });
        }
        acc.unwrap_or_else(|| self.truth())
    }

    pub fn or(&mut self, a: LineRef, b: LineRef) -> LineRef {
        let na = self.not(a);
        let nb = self.not(b);
        let both = self.and(na, nb);
        self.not(both)
    }

    pub fn or_all(&mut self, lines: impl IntoIterator<Item = LineRef>) -> LineRef {
        let negs: Vec<LineRef> = lines.into_iter().map(|l| self.not(l)).collect();
        if negs.is_empty() {
            let t = self.truth();
            return self.not(t);
        }
        let all = self.and_all(negs);
        self.not(all)
    }

    pub fn leq(&mut self, a: LineRef, b: LineRef) -> LineRef {
        self.op(Op::Leq(a.0, b.0))
    }

    pub fn count_top(&mut self, filter: LineRef) -> LineRef {
        self.op(Op::Count {
            filter: filter.0,
            rel: LocalRel::Top,
        })
    }

    /// `#[j ≤ i] ⊤`, the current position.
    pub fn count_top_true(&mut self) -> LineRef {
        let t = self.truth();
        self.count_top(t)
    }

    pub fn count_offset(&mut self, filter: LineRef, offset: u32) -> LineRef {
        self.op(Op::Count {
            filter: filter.0,
            rel: LocalRel::Offset(offset),
        })
    }

    /// `filter` held exactly `offset` positions back.
    pub fn lookback(&mut self, filter: LineRef, offset: u32) -> LineRef {
        if offset == 0 {
            return filter;
        }
        let c = self.count_offset(filter, offset);
        let one = self.one();
        self.leq(one, c)
    }

    /// Σ symbol `sym` sits `offset` positions back.
    pub fn look(&mut self, sym: &str, offset: u32) -> LineRef {
        let q = self.initial(sym);
        self.lookback(q, offset)
    }

    pub fn match_count(
        &mut self,
        conjuncts: Vec<Conjunct>,
        filter: Option<LineRef>,
        strict: bool,
    ) -> LineRef {
        self.op(Op::Match(MatchSpec {
            conjuncts,
            filter: filter.map(|f| f.0),
            strict,
        }))
    }

    pub fn cond(&mut self, p: LineRef, a: LineRef, b: LineRef) -> LineRef {
        self.op(Op::Cond(p.0, a.0, b.0))
    }

    pub fn add(&mut self, a: LineRef, b: LineRef) -> LineRef {
        let (a, b) = (a.min(b), a.max(b));
        self.op(Op::Add(a.0, b.0))
    }

    pub fn sub(&mut self, a: LineRef, b: LineRef) -> LineRef {
        self.op(Op::Sub(a.0, b.0))
    }

    pub fn one(&mut self) -> LineRef {
        self.op(Op::One)
    }

    pub fn zero(&mut self) -> LineRef {
        let one = self.one();
        self.sub(one, one)
    }

    /// The constant `k`, as a chain of additions of `1`.
    pub fn constant(&mut self, k: u64) -> LineRef {
        if k == 0 {
            return self.zero();
        }
        if self.consts.is_empty() {
            let one = self.one();
            self.consts.push(one);
        }
        while (self.consts.len() as u64) < k {
            let last = *self.consts.last().unwrap();
            let one = self.consts[0];
            let next = self.add(last, one);
            self.consts.push(next);
        }
        self.consts[k as usize - 1]
    }

    /// Sum of all lines; `0` when empty.
    pub fn sum(&mut self, lines: impl IntoIterator<Item = LineRef>) -> LineRef {
        let mut acc: Option<LineRef> = None;
        for l in lines {
            acc = Some(match acc {
                None => l,
                Some(a) => self.add(a, l),
            });
        }
        acc.unwrap_or_else(|| self.zero())
    }

    /// `(a ≤ b) ∧ (b ≤ a)`.
    pub fn eq(&mut self, a: LineRef, b: LineRef) -> LineRef {
        let x = self.leq(a, b);
        let y = self.leq(b, a);
        self.and(x, y)
    }

    pub fn eq_const(&mut self, a: LineRef, k: u64) -> LineRef {
        let k = self.constant(k);
        self.eq(a, k)
    }

    pub fn ge_const(&mut self, a: LineRef, k: u64) -> LineRef {
        let k = self.constant(k);
        self.leq(k, a)
    }

    /// `1` if the count is positive, else `0`.
    pub fn clamp01(&mut self, a: LineRef) -> LineRef {
        let pos = self.ge_const(a, 1);
        let one = self.one();
        let zero = self.zero();
        self.cond(pos, one, zero)
    }

    /// Finishes the program with `output` as its last line, returning it
    /// together with each line's provenance label.
    pub fn finish(mut self, output: LineRef) -> (CraspProgram, Vec<String>) {
        if output.0 + 1 != self.ops.len() {
            let label = self.labels[output.0].clone();
            self.ops.push(Op::And(output.0, output.0));
            self.labels.push(label);
            self.names.push(None);
        }
        let mut used: HashMap<String, ()> = HashMap::new();
        let explicit: Vec<Option<String>> = self
            .names
            .iter()
            .map(|n| {
                n.clone()
                    .filter(|n| super::is_line_name(n) && used.insert(n.clone(), ()).is_none())
            })
            .collect();
        let names = explicit
            .into_iter()
            .enumerate()
            .map(|(i, n)| {
                n.unwrap_or_else(|| {
                    let mut cand = format!("L{i}");
                    while used.contains_key(&cand) {
                        cand.push('_');
                    }
                    used.insert(cand.clone(), ());
                    cand
                })
            })
            .collect::<Vec<_>>();
        let program = CraspProgram::new(self.sigma, self.ops, Some(names), None)
            .expect("builder emits well-sorted programs");
        (program, self.labels)
    }
}
