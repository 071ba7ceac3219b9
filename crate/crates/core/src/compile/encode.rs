use std::collections::HashMap;
use std::sync::Arc;

use super::{check_symbols, CompileError};
use crate::crasp::Symbol;
use crate::strips::{Atom, Domain, GroundAction, GroundLiteral, Instance, ObjId, Plan, State};

pub const START: &str = "$";
pub const SEPARATOR: &str = "@";

/// `~p`, the symbol that opens a negative goal literal over `p`.
pub fn negated_symbol(pred: &str) -> String {
    format!("~{pred}")
}

/// Extended-token value of each object, indexed by object id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingLayout {
    pub values: Vec<u64>,
}

impl EncodingLayout {
    pub fn new(values: Vec<u64>) -> Self {
        EncodingLayout { values }
    }

    /// Object `k` gets `base + k`.
    pub fn sequential(objects: usize, base: u64) -> Self {
        EncodingLayout {
            values: (0..objects as u64).map(|k| base + k).collect(),
        }
    }

    pub fn value(&self, obj: ObjId) -> u64 {
        self.values[obj as usize]
    }

    /// Same layout with every value shifted by `delta`.
    pub fn shifted(&self, delta: u64) -> Self {
        EncodingLayout {
            values: self.values.iter().map(|v| v + delta).collect(),
        }
    }

    pub(crate) fn validate(&self, objects: &[String]) -> Result<(), CompileError> {
        if self.values.len() < objects.len() {
            return Err(CompileError::LayoutTooShort {
                objects: objects.len(),
                values: self.values.len(),
            });
        }
        let mut seen: HashMap<u64, usize> = HashMap::new();
        for (k, &v) in self.values[..objects.len()].iter().enumerate() {
            if let Some(prev) = seen.insert(v, k) {
                return Err(CompileError::ObjectCollision {
                    first: objects[prev].clone(),
                    second: objects[k].clone(),
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// Number of tokens `encode` produces.
pub fn encoded_len(inst: &Instance, plan: &Plan) -> usize {
    let d = inst.domain();
    let entry = |a: &Atom| 1 + a.args.len();
    4 + inst.init().iter().map(entry).sum::<usize>()
        + plan
            .actions
            .iter()
            .map(|a| 1 + d.schema(a.schema).arity())
            .sum::<usize>()
        + inst.goal().iter().map(|g| entry(&g.atom)).sum::<usize>()
}

/// `$ I @ π @ G @`, with the initial state in canonical (sorted) order.
pub fn encode(inst: &Instance, plan: &Plan, layout: &EncodingLayout) -> Result<Vec<Symbol>, CompileError> {
    check_symbols(inst.domain())?;
    layout.validate(inst.objects())?;
    let d = inst.domain();
    let mut out = Vec::with_capacity(encoded_len(inst, plan));
    let obj = |o: &ObjId| Symbol::Ext(layout.value(*o));
    out.push(Symbol::sigma(START));
    for a in inst.init().iter() {
        out.push(Symbol::sigma(&d.predicate(a.pred).name));
        out.extend(a.args.iter().map(obj));
    }
    out.push(Symbol::sigma(SEPARATOR));
    for a in &plan.actions {
        out.push(Symbol::sigma(&d.schema(a.schema).name));
        out.extend(a.args.iter().map(obj));
    }
    out.push(Symbol::sigma(SEPARATOR));
    for g in inst.goal() {
        let name = &d.predicate(g.atom.pred).name;
        out.push(Symbol::Sigma(if g.positive { name.clone() } else { negated_symbol(name) }));
        out.extend(g.atom.args.iter().map(obj));
    }
    out.push(Symbol::sigma(SEPARATOR));
    Ok(out)
}

/// Inverse of [`encode`] for a known domain, object list and layout.
pub fn decode(
    word: &[Symbol],
    domain: Arc<Domain>,
    objects: &[String],
    layout: &EncodingLayout,
) -> Result<(Instance, Plan), CompileError> {
    layout.validate(objects)?;
    let by_value: HashMap<u64, ObjId> = layout.values[..objects.len()]
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, k as ObjId))
        .collect();
    let err = |position: usize, message: String| CompileError::Decode { position, message };
    if word.first() != Some(&Symbol::sigma(START)) {
        return Err(err(0, format!("expected `{START}`")));
    }
    let mut pos = 1;
    let mut section = 0;
    let mut init = State::new();
    let mut actions = Vec::new();
    let mut goal = Vec::new();
    while section < 3 {
        let Some(sym) = word.get(pos) else {
            return Err(err(pos, "unexpected end of input".into()));
        };
        let Symbol::Sigma(name) = sym else {
            return Err(err(pos, "expected a name, found an object".into()));
        };
        pos += 1;
        if name == SEPARATOR {
            section += 1;
            continue;
        }
        let (positive, bare) = match name.strip_prefix('~') {
            Some(rest) if section == 2 => (false, rest),
            _ => (true, name.as_str()),
        };
        let (arity, head) = if section == 1 {
            let s = domain
                .schema_id(bare)
                .ok_or_else(|| err(pos - 1, format!("unknown action `{bare}`")))?;
            (domain.schema(s).arity(), s.0)
        } else {
            let p = domain
                .predicate_id(bare)
                .ok_or_else(|| err(pos - 1, format!("unknown predicate `{bare}`")))?;
            (domain.predicate(p).arity, p.0)
        };
        let mut args = Vec::with_capacity(arity);
        for _ in 0..arity {
            match word.get(pos) {
                Some(Symbol::Ext(v)) => {
                    args.push(*by_value.get(v).ok_or_else(|| err(pos, format!("unmapped object value {v}")))?)
                }
                _ => return Err(err(pos, "expected an object".into())),
            }
            pos += 1;
        }
        match section {
            0 => {
                init.insert(Atom::new(crate::strips::PredId(head), args));
            }
            1 => actions.push(GroundAction::new(crate::strips::SchemaId(head), args)),
            _ => goal.push(GroundLiteral {
                atom: Atom::new(crate::strips::PredId(head), args),
                positive,
            }),
        }
    }
    if pos != word.len() {
        return Err(err(pos, "trailing tokens after the final separator".into()));
    }
    let inst = Instance::new(domain, objects.to_vec(), init, goal).map_err(|e| err(0, e.to_string()))?;
    Ok((inst, Plan::new(actions)))
}
