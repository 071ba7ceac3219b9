use super::encode::{negated_symbol, SEPARATOR, START};
use super::{check_mode, CompilationReport, CompileError, Compiled, Mode};
use crate::crasp::{Conjunct, LineRef, ProgramBuilder};
use crate::strips::{Domain, Literal, PredId, SchemaId, Term};

/// Argument correspondence between a query entry ending at `i` and an
/// earlier entry ending at `j` that mention the same predicate: pair
/// `(m, n)` says argument `m` of the query entry must equal argument `n` of
/// the earlier one (both 0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgMap {
    pub pairs: Vec<(u32, u32)>,
}

impl ArgMap {
    /// Maps a query literal's arguments onto a source literal's arguments,
    /// argument by argument of the predicate.
    pub fn between(query: &[u32], source: &[u32]) -> Self {
        debug_assert_eq!(query.len(), source.len());
        ArgMap {
            pairs: query.iter().copied().zip(source.iter().copied()).collect(),
        }
    }

    /// Conjuncts for entries of arity `query_arity` (at `i`) and
    /// `source_arity` (at `j`).
    pub fn conjuncts(&self, query_arity: u32, source_arity: u32) -> Vec<Conjunct> {
        let mut out: Vec<Conjunct> = self
            .pairs
            .iter()
            .map(|&(m, n)| Conjunct::new(source_arity - 1 - n, query_arity - 1 - m, 0))
            .collect();
        out.sort_by_key(|c| (c.past, c.current));
        out.dedup();
        out
    }
}

fn var_args(lit: &Literal) -> Vec<u32> {
    lit.args
        .iter()
        .map(|t| match t {
            Term::Var(v) => *v as u32,
            Term::Const(_) => unreachable!("constants are rejected before compilation"),
        })
        .collect()
}

/// Schemas that add (or delete) a predicate, each with the effect literals
/// doing so.
type Sources = Vec<(SchemaId, Vec<Vec<u32>>)>;

fn sources(domain: &Domain, pred: PredId, positive: bool) -> Sources {
    domain
        .schema_ids()
        .filter_map(|s| {
            let lits: Vec<Vec<u32>> = domain
                .schema(s)
                .strips_effect()
                .unwrap()
                .iter()
                .filter(|l| l.pred == pred && l.positive == positive)
                .map(var_args)
                .collect();
            (!lits.is_empty()).then_some((s, lits))
        })
        .collect()
}

struct Variable<'a> {
    b: ProgramBuilder,
    domain: &'a Domain,
    curr_action: Vec<LineRef>,
}

impl Variable<'_> {
    fn arity(&self, s: SchemaId) -> u32 {
        self.domain.schema(s).arity() as u32
    }

    /// Match count, or a plain count of `filter` when nothing is compared.
    fn match_or_count(&mut self, conjuncts: Vec<Conjunct>, filter: LineRef, strict: bool) -> LineRef {
        if !conjuncts.is_empty() {
            return self.b.match_count(conjuncts, Some(filter), strict);
        }
        let all = self.b.count_top(filter);
        if !strict {
            return all;
        }
        let one = self.b.one();
        let zero = self.b.zero();
        let here = self.b.cond(filter, one, zero);
        self.b.sub(all, here)
    }

    /// Number of earlier actions whose effects produce the query
    /// proposition. Inclusion–exclusion over literals of one action keeps an
    /// action that produces the same proposition twice from counting twice.
    #[allow(clippy::too_many_arguments)]
    fn counter(
        &mut self,
        query: &[u32],
        query_arity: u32,
        srcs: &Sources,
        strict: bool,
        kind: &str,
        alpha: Option<&str>,
        pred: &str,
    ) -> LineRef {
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for (beta, lits) in srcs {
            let beta_name = self.domain.schema(*beta).name.clone();
            self.b.set_label(match alpha {
                Some(a) => format!("{kind} for (α={a}, β={beta_name}, p={pred})"),
                None => format!("{kind} for (β={beta_name}, p={pred})"),
            });
            let k_beta = self.arity(*beta);
            for subset in 1u32..(1 << lits.len()) {
                let mut conjuncts = Vec::new();
                for (t, lit) in lits.iter().enumerate() {
                    if subset >> t & 1 == 1 {
                        conjuncts.extend(ArgMap::between(query, lit).conjuncts(query_arity, k_beta));
                    }
                }
                conjuncts.sort_by_key(|c| (c.past, c.current));
                conjuncts.dedup();
                let filter = self.curr_action[beta.0 as usize];
                let line = self.match_or_count(conjuncts, filter, strict);
                if subset.count_ones() % 2 == 1 {
                    plus.push(line);
                } else {
                    minus.push(line);
                }
            }
        }
        let up = self.b.sum(plus);
        if minus.is_empty() {
            return up;
        }
        let down = self.b.sum(minus);
        self.b.sub(up, down)
    }
}

/// Compiles verification for every instance of `domain`, over any object
/// universe, into a program that reaches object tokens only through match
/// operations.
pub fn compile_variable(domain: &Domain, mode: Mode) -> Result<Compiled, CompileError> {
    check_mode(domain, mode)?;
    if !domain.constants().is_empty() {
        return Err(CompileError::NotSupported(format!(
            "domain `{}` mentions constants, which have no fixed token in a variable universe",
            domain.name()
        )));
    }
    let mut sigma = vec![START.to_string(), SEPARATOR.to_string()];
    sigma.extend(domain.predicates().iter().map(|p| p.name.clone()));
    sigma.extend(domain.schemas().iter().map(|s| s.name.clone()));
    sigma.extend(domain.predicates().iter().map(|p| negated_symbol(&p.name)));
    let mut c = Variable {
        b: ProgramBuilder::with_sigma(&sigma),
        domain,
        curr_action: Vec::new(),
    };

    c.b.set_label("CountSep");
    let sep = c.b.initial(SEPARATOR);
    let count_sep = c.b.count_top(sep);
    c.b.name(count_sep, "CountSep");
    let section = |c: &mut Variable, k: u64, name: &str| {
        c.b.set_label(name);
        let l = c.b.eq_const(count_sep, k);
        c.b.name(l, name);
        l
    };
    let in_init = section(&mut c, 0, "InInit");
    let in_plan = section(&mut c, 1, "InPlan");
    let in_goal = section(&mut c, 2, "InGoal");
    let end = section(&mut c, 3, "End");

    for s in domain.schemas() {
        c.b.set_label(format!("Curr_α for α={}", s.name));
        let at = c.b.look(&s.name, s.arity() as u32);
        let l = c.b.and(at, in_plan);
        c.b.name(l, format!("Curr_{}", s.name));
        c.curr_action.push(l);
    }
    let mut curr_init = Vec::new();
    for p in domain.predicates() {
        c.b.set_label(format!("Curr_p for p={} in I", p.name));
        let at = c.b.look(&p.name, p.arity as u32);
        let l = c.b.and(at, in_init);
        c.b.name(l, format!("Init_{}", p.name));
        curr_init.push(l);
    }
    let adds: Vec<Sources> = domain.pred_ids().map(|p| sources(domain, p, true)).collect();
    let dels: Vec<Sources> = domain.pred_ids().map(|p| sources(domain, p, false)).collect();

    let mut invalid_counts = Vec::new();
    for sid in domain.schema_ids() {
        let s = domain.schema(sid);
        let k_alpha = s.arity() as u32;
        let mut satisfied = Vec::new();
        for lit in &s.pre {
            let pname = &domain.predicate(lit.pred).name;
            let k_p = domain.predicate(lit.pred).arity as u32;
            let query = var_args(lit);
            c.b.set_label(format!("V_init for (α={}, p={pname})", s.name));
            let identity: Vec<u32> = (0..k_p).collect();
            let conj = ArgMap::between(&query, &identity).conjuncts(k_alpha, k_p);
            let seen = c.match_or_count(conj, curr_init[lit.pred.0 as usize], true);
            let v_init = c.b.clamp01(seen);
            let p_ix = lit.pred.0 as usize;
            let v_add = c.counter(&query, k_alpha, &adds[p_ix], true, "V_add", Some(&s.name), pname);
            let value = match mode {
                Mode::WellFormed => {
                    let v_del = c.counter(&query, k_alpha, &dels[p_ix], true, "V_del", Some(&s.name), pname);
                    c.b.set_label(format!("CurrentVal for (α={}, p={pname})", s.name));
                    let up = c.b.add(v_init, v_add);
                    c.b.sub(up, v_del)
                }
                Mode::DeleteFree => {
                    c.b.set_label(format!("CurrentVal for (α={}, p={pname})", s.name));
                    c.b.add(v_init, v_add)
                }
            };
            c.b.set_label(format!("Satisfied for (α={}, p={pname})", s.name));
            let sat = match (mode, lit.positive) {
                (Mode::WellFormed, true) => c.b.eq_const(value, 1),
                (Mode::DeleteFree, true) => c.b.ge_const(value, 1),
                (_, false) => c.b.eq_const(value, 0),
            };
            satisfied.push(sat);
        }
        c.b.set_label(format!("Valid_α for α={}", s.name));
        let ok = c.b.and_all(satisfied);
        let not_ok = c.b.not(ok);
        let bad = c.b.and(c.curr_action[sid.0 as usize], not_ok);
        invalid_counts.push(c.b.count_top(bad));
    }
    c.b.set_label("AllActionsValid");
    let bad_total = c.b.sum(invalid_counts);
    let no_bad = c.b.eq_const(bad_total, 0);
    let all_actions_valid = c.b.and(end, no_bad);
    c.b.name(all_actions_valid, "AllActionsValid");

    let mut unsat = Vec::new();
    for pid in domain.pred_ids() {
        let p = domain.predicate(pid);
        let k_p = p.arity as u32;
        let identity: Vec<u32> = (0..k_p).collect();
        c.b.set_label(format!("G_init for p={}", p.name));
        let conj = ArgMap::between(&identity, &identity).conjuncts(k_p, k_p);
        let seen = c.match_or_count(conj, curr_init[pid.0 as usize], false);
        let g_init = c.b.clamp01(seen);
        let g_add = c.counter(&identity, k_p, &adds[pid.0 as usize], false, "G_add", None, &p.name);
        let g_del = c.counter(&identity, k_p, &dels[pid.0 as usize], false, "G_del", None, &p.name);
        c.b.set_label(format!("GoalSat for p={}", p.name));
        let up = c.b.add(g_init, g_add);
        let value = c.b.sub(up, g_del);
        let sat_pos = match mode {
            Mode::WellFormed => c.b.eq_const(value, 1),
            Mode::DeleteFree => c.b.ge_const(value, 1),
        };
        let sat_neg = c.b.eq_const(value, 0);
        c.b.set_label(format!("UnsatisfiedGoal for p={}", p.name));
        let at_pos = c.b.look(&p.name, k_p);
        let at_pos = c.b.and(at_pos, in_goal);
        let at_neg = c.b.look(&negated_symbol(&p.name), k_p);
        let at_neg = c.b.and(at_neg, in_goal);
        let fail_pos = c.b.not(sat_pos);
        let fail_neg = c.b.not(sat_neg);
        let u_pos = c.b.and(at_pos, fail_pos);
        let u_neg = c.b.and(at_neg, fail_neg);
        unsat.push(u_pos);
        unsat.push(u_neg);
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
    let size = domain.predicates().len() + domain.schemas().len();
    let report = CompilationReport::new(domain, mode, "variable", &program, labels, size);
    Ok(Compiled { program, report })
}
