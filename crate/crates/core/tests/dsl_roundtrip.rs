use std::sync::Arc;

use planlab::crasp::{Conjunct, CraspProgram, LocalRel, MatchSpec, Op, Sort, Symbol};
use planlab::dsl::{
    parse_crasp, parse_domain, parse_instance, parse_plan, parse_word, serialize_crasp, serialize_domain,
    serialize_instance, serialize_plan, serialize_word,
};
use planlab::strips::{
    ActionSchema, ConditionalEffect, Domain, GroundAction, GroundLiteral, Literal, PredId, PredicateDef, Term,
};
use planlab::{Atom, Instance, Plan, SchemaId, State};
use proptest::prelude::*;

type RawLit = (usize, Vec<usize>, bool);

#[derive(Clone, Debug)]
struct RawSchema {
    params: usize,
    pre: Vec<RawLit>,
    effects: Vec<(Vec<RawLit>, Vec<RawLit>)>,
}

fn raw_lit() -> impl Strategy<Value = RawLit> {
    (any::<usize>(), prop::collection::vec(any::<usize>(), 3), any::<bool>())
}

fn raw_schema() -> impl Strategy<Value = RawSchema> {
    (
        0usize..4,
        prop::collection::vec(raw_lit(), 0..4),
        prop::collection::vec(
            (prop::collection::vec(raw_lit(), 0..2), prop::collection::vec(raw_lit(), 0..3)),
            0..3,
        ),
    )
        .prop_map(|(params, pre, effects)| RawSchema { params, pre, effects })
}

fn build_domain(arities: &[usize], n_const: usize, raw: &[RawSchema]) -> Option<Domain> {
    let predicates: Vec<PredicateDef> = arities
        .iter()
        .enumerate()
        .map(|(i, &arity)| PredicateDef {
            name: format!("p{i}"),
            arity,
        })
        .collect();
    let constants: Vec<String> = (0..n_const).map(|i| format!("k{i}")).collect();
    let lit = |params: usize, (p, args, pos): &RawLit| -> Literal {
        // predicate 0 is nullary
        let pred = if params + n_const == 0 { 0 } else { p % arities.len() };
        let terms = (0..arities[pred])
            .map(|t| {
                let pool = params + n_const;
                if pool == 0 {
                    return None;
                }
                let x = args[t] % pool;
                Some(if x < params {
                    Term::Var(x as u16)
                } else {
                    Term::Const((x - params) as u32)
                })
            })
            .collect::<Option<_>>();
        Literal {
            pred: PredId(pred as u32),
            args: terms.unwrap_or_default(),
            positive: *pos,
        }
    };
    let schemas = raw
        .iter()
        .enumerate()
        .map(|(i, s)| ActionSchema {
            name: format!("a{i}"),
            params: (0..s.params).map(|v| format!("v{v}")).collect(),
            pre: s.pre.iter().map(|l| lit(s.params, l)).collect(),
            effects: s
                .effects
                .iter()
                .map(|(c, e)| ConditionalEffect {
                    condition: c.iter().map(|l| lit(s.params, l)).collect(),
                    effect: e.iter().map(|l| lit(s.params, l)).collect(),
                })
                .collect(),
        })
        .collect();
    Domain::new("random", constants, predicates, schemas).ok()
}

fn domain_strategy() -> impl Strategy<Value = Option<Domain>> {
    (
        prop::collection::vec(0usize..4, 0..4).prop_map(|mut a| {
            a.insert(0, 0);
            a
        }),
        0usize..3,
        prop::collection::vec(raw_schema(), 0..4),
    )
        .prop_map(|(arities, n_const, raw)| build_domain(&arities, n_const, &raw))
}

fn random_instance(d: Arc<Domain>, n_obj: usize, init: &[RawLit], goal: &[RawLit]) -> Option<Instance> {
    let mut objects: Vec<String> = (0..n_obj).map(|i| format!("o{i}")).collect();
    objects.extend(d.constants().iter().cloned());
    let n = objects.len();
    let atom = |(p, args, _): &RawLit| -> Option<Atom> {
        let pred = p % d.predicates().len();
        let arity = d.predicates()[pred].arity;
        if arity > 0 && n == 0 {
            return None;
        }
        Some(Atom::new(PredId(pred as u32), (0..arity).map(|t| (args[t] % n.max(1)) as u32)))
    };
    let init: State = init.iter().filter_map(atom).collect();
    let goal: Vec<GroundLiteral> = goal
        .iter()
        .filter_map(|l| {
            atom(l).map(|a| GroundLiteral {
                atom: a,
                positive: l.2,
            })
        })
        .collect();
    Instance::new(d, objects, init, goal).ok()
}

fn random_plan(inst: &Instance, steps: &[(usize, Vec<usize>)]) -> Plan {
    let d = inst.domain();
    let n = inst.objects().len();
    steps
        .iter()
        .filter_map(|(s, args)| {
            if d.schemas().is_empty() {
                return None;
            }
            let sid = s % d.schemas().len();
            let arity = d.schemas()[sid].arity();
            if arity > 0 && n == 0 {
                return None;
            }
            Some(GroundAction::new(
                SchemaId(sid as u32),
                (0..arity).map(|t| (args[t] % n.max(1)) as u32),
            ))
        })
        .collect()
}

#[test]
fn generator_mostly_yields_domains() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strat = domain_strategy();
    let ok = (0..400)
        .filter(|_| strat.new_tree(&mut runner).unwrap().current().is_some())
        .count();
    assert!(ok > 200, "{ok}/400");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn domains_round_trip(d in domain_strategy()) {
        let Some(d) = d else { return Ok(()) };
        let text = serialize_domain(&d);
        let back = parse_domain(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &d);
        prop_assert_eq!(serialize_domain(&back), text);
    }

    #[test]
    fn instances_and_plans_round_trip(
        d in domain_strategy(),
        n_obj in 0usize..5,
        init in prop::collection::vec(raw_lit(), 0..8),
        goal in prop::collection::vec(raw_lit(), 0..4),
        steps in prop::collection::vec((any::<usize>(), prop::collection::vec(any::<usize>(), 3)), 0..6),
    ) {
        let Some(d) = d else { return Ok(()) };
        let d = Arc::new(d);
        let Some(inst) = random_instance(d.clone(), n_obj, &init, &goal) else { return Ok(()) };
        let text = serialize_instance(&inst);
        let back = parse_instance(&text, d).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &inst);
        let plan = random_plan(&inst, &steps);
        let ptext = serialize_plan(&plan, &inst);
        prop_assert_eq!(parse_plan(&ptext, &back).unwrap(), plan);
    }

    #[test]
    fn identical_text_interns_identically(d in domain_strategy()) {
        let Some(d) = d else { return Ok(()) };
        let text = serialize_domain(&d);
        let a = parse_domain(&text).unwrap();
        let b = parse_domain(&text).unwrap();
        for p in a.pred_ids() {
            prop_assert_eq!(a.predicate_id(&a.predicate(p).name), b.predicate_id(&a.predicate(p).name));
        }
    }

    #[test]
    fn programs_round_trip(
        choices in prop::collection::vec((0u8..11, any::<usize>(), any::<usize>(), any::<usize>()), 1..25),
        sigma_size in 1usize..4,
        strict in any::<bool>(),
        quoted in any::<bool>(),
    ) {
        let program = random_program(&choices, sigma_size, strict, quoted);
        let text = serialize_crasp(&program);
        let back = parse_crasp(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &program);
    }

    #[test]
    fn words_round_trip(word in prop::collection::vec(prop_oneof![
        any::<u64>().prop_map(Symbol::Ext),
        "[a-z$@~#\" ]{1,4}".prop_map(Symbol::Sigma),
    ], 0..10)) {
        prop_assert_eq!(parse_word(&serialize_word(&word)).unwrap(), word);
    }
}

fn random_program(choices: &[(u8, usize, usize, usize)], sigma_size: usize, strict: bool, quoted: bool) -> CraspProgram {
    let sigma: Vec<String> = (0..sigma_size)
        .map(|i| if quoted && i == 0 { "$ x".to_string() } else { format!("s{i}") })
        .collect();
    let mut ops: Vec<Op> = Vec::new();
    let pick = |ops: &[Op], sort: Sort, r: usize| -> Option<usize> {
        let cands: Vec<usize> = (0..ops.len()).filter(|&i| ops[i].sort() == sort).collect();
        (!cands.is_empty()).then(|| cands[r % cands.len()])
    };
    for &(kind, a, b, c) in choices {
        let bool1 = pick(&ops, Sort::Bool, a);
        let bool2 = pick(&ops, Sort::Bool, b);
        let cnt1 = pick(&ops, Sort::Count, a);
        let cnt2 = pick(&ops, Sort::Count, b);
        let op = match kind {
            0 => Op::Initial((a % sigma_size) as u32),
            1 => Op::True,
            2 => Op::One,
            3 if bool1.is_some() => Op::Not(bool1.unwrap()),
            4 if bool1.is_some() => Op::And(bool1.unwrap(), bool2.unwrap()),
            5 if cnt1.is_some() => Op::Leq(cnt1.unwrap(), cnt2.unwrap()),
            6 if bool1.is_some() => Op::Count {
                filter: bool1.unwrap(),
                rel: if c % 2 == 0 { LocalRel::Top } else { LocalRel::Offset((c % 4) as u32) },
            },
            7 if cnt1.is_some() => Op::Add(cnt1.unwrap(), cnt2.unwrap()),
            8 if cnt1.is_some() => Op::Sub(cnt1.unwrap(), cnt2.unwrap()),
            9 if bool1.is_some() && cnt1.is_some() => Op::Cond(bool1.unwrap(), cnt1.unwrap(), cnt2.unwrap()),
            10 => Op::Match(MatchSpec {
                conjuncts: (0..1 + c % 3)
                    .map(|k| Conjunct::new(((a >> k) % 3) as u32, ((b >> k) % 3) as u32, ((c >> k) % 7) as i64 - 3))
                    .collect(),
                filter: if a % 2 == 0 { bool1 } else { None },
                strict,
            }),
            _ => Op::Initial(0),
        };
        ops.push(op);
    }
    if ops.last().unwrap().sort() == Sort::Count {
        let last = ops.len() - 1;
        ops.push(Op::Leq(last, last));
    }
    let names = (0..ops.len()).map(|i| format!("N{i}")).collect();
    CraspProgram::new(sigma, ops, Some(names), None).unwrap()
}
