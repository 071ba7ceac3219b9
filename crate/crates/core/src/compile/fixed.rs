use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::encode::{negated_symbol, EncodingLayout, SEPARATOR, START};
use super::{check_mode, CompilationReport, CompileError, Compiled, Mode};
use crate::crasp::{ext_symbol, LineRef, ProgramBuilder};
use crate::strips::{ground_pre, ground_schema, Atom, GroundAction, Instance, ObjId, State};

/// Every tuple in `0..n` of length `k`, lexicographically.
fn tuples(n: usize, k: usize) -> Vec<Vec<ObjId>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n as ObjId).map(move |o| {
                    let mut t = t.clone();
                    t.push(o);
                    t
                })
            })
            .collect();
    }
    out
}

struct Fixed<'a> {
    b: ProgramBuilder,
    inst: &'a Instance,
    object_syms: Vec<String>,
}

impl Fixed<'_> {
    /// `head o1 … ok` ends at the current position.
    fn entry(&mut self, head: &str, args: &[ObjId]) -> LineRef {
        let k = args.len() as u32;
        let mut parts = vec![self.b.look(head, k)];
        for (m, &o) in args.iter().enumerate() {
            let sym = self.object_syms[o as usize].clone();
            parts.push(self.b.look(&sym, k - 1 - m as u32));
        }
        self.b.and_all(parts)
    }

    fn fmt_atom(&self, a: &Atom) -> String {
        self.inst.fmt_atom(a)
    }
}

/// Compiles verification over the fixed universe `objects` (token values
/// from `layout`) into a match-free program. The program accepts
/// `encode(I, π, G)` iff `π` is valid, for every `I`, `π` and `G` over
/// these objects.
pub fn compile_fixed(
    domain: &crate::strips::Domain,
    objects: &[String],
    layout: &EncodingLayout,
    mode: Mode,
) -> Result<Compiled, CompileError> {
    check_mode(domain, mode)?;
    layout.validate(objects)?;
    let inst = Instance::new(Arc::new(domain.clone()), objects.to_vec(), State::new(), vec![]).map_err(|e| match e {
        crate::strips::InstanceError::MissingConstant(c) => CompileError::MissingConstant(c),
        e => CompileError::NotSupported(e.to_string()),
    })?;
    let n = objects.len();

    let mut sigma = vec![START.to_string(), SEPARATOR.to_string()];
    sigma.extend(domain.predicates().iter().map(|p| p.name.clone()));
    sigma.extend(domain.schemas().iter().map(|s| s.name.clone()));
    sigma.extend(domain.predicates().iter().map(|p| negated_symbol(&p.name)));
    let object_syms: Vec<String> = (0..n).map(|k| ext_symbol(layout.value(k as ObjId))).collect();
    sigma.extend(object_syms.iter().cloned());
    let mut c = Fixed {
        b: ProgramBuilder::with_sigma(&sigma),
        inst: &inst,
        object_syms,
    };

    c.b.set_label("CountSep");
    let sep = c.b.initial(SEPARATOR);
    let count_sep = c.b.count_top(sep);
    c.b.name(count_sep, "CountSep");
    let section = |c: &mut Fixed, k: u64, name: &str| {
        c.b.set_label(name);
        let l = c.b.eq_const(count_sep, k);
        c.b.name(l, name);
        l
    };
    let in_init = section(&mut c, 0, "InInit");
    let in_plan = section(&mut c, 1, "InPlan");
    let in_goal = section(&mut c, 2, "InGoal");
    let end = section(&mut c, 3, "End");

    let atoms: Vec<Atom> = domain
        .pred_ids()
        .flat_map(|p| tuples(n, domain.predicate(p).arity).into_iter().map(move |t| Atom::new(p, t)))
        .collect();
    let actions: Vec<GroundAction> = domain.schema_ids().flat_map(|s| ground_schema(domain, s, n)).collect();

    // Additions and deletions per ground proposition.
    let mut adders: BTreeMap<Atom, BTreeSet<usize>> = BTreeMap::new();
    let mut deleters: BTreeMap<Atom, BTreeSet<usize>> = BTreeMap::new();
    for (k, a) in actions.iter().enumerate() {
        let schema = domain.schema(a.schema);
        for l in schema.strips_effect().unwrap() {
            let g = inst.ground_literal(l, &a.args);
            let side = if g.positive { &mut adders } else { &mut deleters };
            side.entry(g.atom).or_default().insert(k);
        }
    }

    let mut action_counts = Vec::with_capacity(actions.len());
    let mut occurs_action = Vec::with_capacity(actions.len());
    for a in &actions {
        let text = inst.fmt_action(a);
        c.b.set_label(format!("OccursAction_a for {text}"));
        let name = &domain.schema(a.schema).name;
        let e = c.entry(name, &a.args);
        let occ = c.b.and(e, in_plan);
        occurs_action.push(occ);
        action_counts.push(c.b.count_top(occ));
    }

    let mut valid: BTreeMap<Atom, LineRef> = BTreeMap::new();
    for atom in &atoms {
        let text = c.fmt_atom(atom);
        let pname = domain.predicate(atom.pred).name.clone();
        c.b.set_label(format!("OccursInitial_p for {text}"));
        let e = c.entry(&pname, &atom.args);
        let occ_init = c.b.and(e, in_init);
        let seen = c.b.count_top(occ_init);
        let init_bit = c.b.clamp01(seen);
        c.b.set_label(format!("MadeTrue_p for {text}"));
        let made_true = {
            let lines: Vec<LineRef> = adders.get(atom).into_iter().flatten().map(|&k| action_counts[k]).collect();
            c.b.sum(lines)
        };
        let v = match mode {
            Mode::WellFormed => {
                c.b.set_label(format!("MadeFalse_p for {text}"));
                let lines: Vec<LineRef> =
                    deleters.get(atom).into_iter().flatten().map(|&k| action_counts[k]).collect();
                let made_false = c.b.sum(lines);
                c.b.set_label(format!("Valid_p for {text}"));
                let up = c.b.add(init_bit, made_true);
                let net = c.b.sub(up, made_false);
                c.b.eq_const(net, 1)
            }
            Mode::DeleteFree => {
                c.b.set_label(format!("Valid_p for {text}"));
                let total = c.b.add(init_bit, made_true);
                c.b.ge_const(total, 1)
            }
        };
        c.b.name(v, format!("Valid_{}", text.trim_matches(|ch| ch == '(' || ch == ')')));
        valid.insert(atom.clone(), v);
    }

    let mut invalid_counts = Vec::with_capacity(actions.len());
    for (k, a) in actions.iter().enumerate() {
        let text = inst.fmt_action(a);
        c.b.set_label(format!("PreCondPassed_a for {text}"));
        let mut checks = Vec::new();
        for lit in ground_pre(&inst, a) {
            let v = valid[&lit.atom];
            let v = if lit.positive { v } else { c.b.not(v) };
            checks.push(c.b.lookback(v, 1));
        }
        let passed = c.b.and_all(checks);
        c.b.set_label(format!("InvalidAction_a for {text}"));
        let failed = c.b.not(passed);
        let bad = c.b.and(occurs_action[k], failed);
        invalid_counts.push(c.b.count_top(bad));
    }
    c.b.set_label("AllActionsValid");
    let bad_total = c.b.sum(invalid_counts);
    let no_bad = c.b.eq_const(bad_total, 0);
    let all_actions_valid = c.b.and(end, no_bad);
    c.b.name(all_actions_valid, "AllActionsValid");

    let mut unsat = Vec::new();
    for atom in &atoms {
        let text = c.fmt_atom(atom);
        let pname = domain.predicate(atom.pred).name.clone();
        c.b.set_label(format!("GoalSat for {text}"));
        let v = valid[atom];
        let pos = c.entry(&pname, &atom.args);
        let pos = c.b.and(pos, in_goal);
        let not_v = c.b.not(v);
        unsat.push(c.b.and(pos, not_v));
        let neg = c.entry(&negated_symbol(&pname), &atom.args);
        let neg = c.b.and(neg, in_goal);
        unsat.push(c.b.and(neg, v));
    }
    c.b.set_label("AllGoalsMet");
    let any_unsat = c.b.or_all(unsat);
    let unsat_count = c.b.count_top(any_unsat);
    let none = c.b.eq_const(unsat_count, 0);
    let all_goals_met = c.b.and(end, none);
    c.b.name(all_goals_met, "AllGoalsMet");

    c.b.set_label("Φ_valid = AllActionsValid ∧ AllGoalsMet");
    let out = c.b.and(all_actions_valid, all_goals_met);
    c.b.name(out, "Phi_valid");
    let (program, labels) = c.b.finish(out);
    let report = CompilationReport::new(domain, mode, "fixed", &program, labels, atoms.len() + actions.len());
    Ok(Compiled { program, report })
}
