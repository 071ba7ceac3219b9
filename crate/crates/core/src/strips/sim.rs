use std::collections::BTreeSet;

use serde::Serialize;

use super::{
    Atom, Domain, GroundAction, GroundLiteral, Instance, Literal, ObjId, Plan, SchemaId, State,
    StripsError, Verdict,
};

/// `S ⊨ L`: every positive literal's atom is in the state and no negative
/// literal's atom is.
pub fn holds<'a>(state: &State, literals: impl IntoIterator<Item = &'a GroundLiteral>) -> bool {
    literals
        .into_iter()
        .all(|l| state.contains(&l.atom) == l.positive)
}

fn first_violated(state: &State, literals: Vec<GroundLiteral>) -> Option<GroundLiteral> {
    literals
        .into_iter()
        .find(|l| state.contains(&l.atom) != l.positive)
}

/// All `n_objects^arity` groundings of a schema, in lexicographic order over
/// object indices.
pub fn ground_schema(domain: &Domain, schema: SchemaId, n_objects: usize) -> Vec<GroundAction> {
    let arity = domain.schema(schema).arity();
    if arity > 0 && n_objects == 0 {
        return Vec::new();
    }
    let total = n_objects.pow(arity as u32);
    let mut out = Vec::with_capacity(total);
    let mut args = vec![0 as ObjId; arity];
    for _ in 0..total {
        out.push(GroundAction::new(schema, args.iter().copied()));
        for pos in (0..arity).rev() {
            args[pos] += 1;
            if (args[pos] as usize) < n_objects {
                break;
            }
            args[pos] = 0;
        }
    }
    out
}

fn check_action(instance: &Instance, action: &GroundAction) -> Result<(), StripsError> {
    let domain = instance.domain();
    if action.schema.0 as usize >= domain.schemas().len() {
        return Err(StripsError::UnknownSchema(action.schema.0));
    }
    let schema = domain.schema(action.schema);
    if schema.arity() != action.args.len() {
        return Err(StripsError::ArityMismatch {
            schema: schema.name.clone(),
            expected: schema.arity(),
            found: action.args.len(),
        });
    }
    match action
        .args
        .iter()
        .find(|&&o| o as usize >= instance.objects().len())
    {
        Some(&o) => Err(StripsError::UnknownObject(o)),
        None => Ok(()),
    }
}

fn ground_all(instance: &Instance, lits: &[Literal], args: &[ObjId]) -> Vec<GroundLiteral> {
    lits.iter().map(|l| instance.ground_literal(l, args)).collect()
}

/// Ground preconditions of an action.
pub fn ground_pre(instance: &Instance, action: &GroundAction) -> Vec<GroundLiteral> {
    let schema = instance.domain().schema(action.schema);
    ground_all(instance, &schema.pre, &action.args)
}

pub fn applicable(instance: &Instance, state: &State, action: &GroundAction) -> bool {
    let schema = instance.domain().schema(action.schema);
    schema
        .pre
        .iter()
        .all(|l| state.contains(&instance.ground_literal(l, &action.args).atom) == l.positive)
}

/// Ground effect literals triggered by `action` in `state`: every
/// conditional effect whose condition holds in the pre-state contributes.
fn triggered(instance: &Instance, state: &State, action: &GroundAction) -> Vec<Vec<GroundLiteral>> {
    let schema = instance.domain().schema(action.schema);
    schema
        .effects
        .iter()
        .filter(|e| {
            e.condition
                .iter()
                .all(|l| state.contains(&instance.ground_literal(l, &action.args).atom) == l.positive)
        })
        .map(|e| ground_all(instance, &e.effect, &action.args))
        .collect()
}

/// Successor state. Preconditions are not checked here; conditions are
/// evaluated against the pre-state, deletes are applied before adds.
pub fn succ(instance: &Instance, state: &State, action: &GroundAction) -> Result<State, StripsError> {
    check_action(instance, action)?;
    let sets = triggered(instance, state, action);
    let mut adds: Vec<(usize, &Atom)> = Vec::new();
    let mut dels: Vec<(usize, &Atom)> = Vec::new();
    for (i, set) in sets.iter().enumerate() {
        for l in set {
            if l.positive {
                adds.push((i, &l.atom));
            } else {
                dels.push((i, &l.atom));
            }
        }
    }
    for &(i, a) in &adds {
        if dels.iter().any(|&(j, d)| j != i && d == a) {
            return Err(StripsError::ConflictingEffects(instance.fmt_atom(a)));
        }
    }
    let mut next = state.clone();
    for (_, d) in dels {
        next.remove(d);
    }
    for (_, a) in adds {
        next.insert(a.clone());
    }
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simulation {
    /// `s_1 … s_{k+1}`; truncated at the first inapplicable action.
    pub trace: Vec<State>,
    pub verdict: Verdict,
}

fn run(instance: &Instance, plan: &Plan, keep_trace: bool) -> Result<Simulation, StripsError> {
    let mut trace = Vec::new();
    let mut state = instance.init().clone();
    for (i, action) in plan.actions.iter().enumerate() {
        check_action(instance, action)?;
        if keep_trace {
            trace.push(state.clone());
        }
        if let Some(violated) = first_violated(&state, ground_pre(instance, action)) {
            return Ok(Simulation {
                trace,
                verdict: Verdict::NonExecutable {
                    step: i + 1,
                    violated,
                },
            });
        }
        state = succ(instance, &state, action)?;
    }
    let unsatisfied: Vec<GroundLiteral> = instance
        .goal()
        .iter()
        .filter(|g| state.contains(&g.atom) != g.positive)
        .cloned()
        .collect();
    if keep_trace {
        trace.push(state);
    }
    let verdict = if unsatisfied.is_empty() {
        Verdict::Valid
    } else {
        Verdict::Incomplete { unsatisfied }
    };
    Ok(Simulation { trace, verdict })
}

/// Executes a plan from the initial state, recording every visited state.
pub fn simulate(instance: &Instance, plan: &Plan) -> Result<Simulation, StripsError> {
    run(instance, plan, true)
}

/// Like [`simulate`] without keeping the trace.
pub fn verdict(instance: &Instance, plan: &Plan) -> Result<Verdict, StripsError> {
    run(instance, plan, false).map(|s| s.verdict)
}

/// Syntactic subclass flags.
///
/// `well_formed` is a sufficient syntactic condition: STRIPS, and the
/// complement of every effect literal appears verbatim among the
/// preconditions, so every effect changes the truth value in any state where
/// the action applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DomainClass {
    pub conditional_effects: bool,
    pub strips: bool,
    pub delete_free: bool,
    pub well_formed: bool,
}

pub fn classify_domain(domain: &Domain) -> DomainClass {
    let strips = domain.schemas().iter().all(|s| s.strips_effect().is_some());
    let delete_free = strips
        && domain
            .schemas()
            .iter()
            .all(|s| s.strips_effect().unwrap().iter().all(|l| l.positive));
    let well_formed = strips
        && domain.schemas().iter().all(|s| {
            s.strips_effect().unwrap().iter().all(|e| {
                s.pre
                    .iter()
                    .any(|p| p.pred == e.pred && p.args == e.args && p.positive != e.positive)
            })
        });
    DomainClass {
        conditional_effects: !strips,
        strips,
        delete_free,
        well_formed,
    }
}

/// A step whose pre-state already satisfied one of the action's effect
/// literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellFormedViolation {
    /// 1-based plan step.
    pub step: usize,
    pub literal: GroundLiteral,
}

/// Checks the trace-level well-formedness condition along one executable plan.
pub fn audit_well_formed_trace(
    instance: &Instance,
    plan: &Plan,
) -> Result<Vec<WellFormedViolation>, StripsError> {
    let mut out = Vec::new();
    let mut state = instance.init().clone();
    for (i, action) in plan.actions.iter().enumerate() {
        check_action(instance, action)?;
        if !applicable(instance, &state, action) {
            return Err(StripsError::NonExecutable(i + 1));
        }
        let mut seen = BTreeSet::new();
        for lit in triggered(instance, &state, action).into_iter().flatten() {
            if state.contains(&lit.atom) == lit.positive && seen.insert(lit.clone()) {
                out.push(WellFormedViolation {
                    step: i + 1,
                    literal: lit,
                });
            }
        }
        state = succ(instance, &state, action)?;
    }
    Ok(out)
}
