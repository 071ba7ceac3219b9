use super::*;
use crate::crasp::{classify, Op};
use crate::domains::{fig11_well_formed, fig9_instance, fig9_plans, GrippersVariant};

#[test]
fn flipflop_small_lengths() {
    let r = check_flipflop(6);
    assert_eq!(r.tested, (1..=6).map(|n| 3usize.pow(n)).sum::<usize>());
    assert!(r.passed(), "{r:?}");
}

#[test]
fn flipflop_edge_words() {
    let inst = flipflop_instance();
    let re = Regex::new("^[abe]*be*$").unwrap();
    for w in ["", "bae", "b", "beee", "ab", "ba"] {
        let valid = verdict(&inst, &flipflop_plan(&inst, w).unwrap()).unwrap().is_valid();
        assert_eq!(valid, re.is_match(w), "{w:?}");
    }
    assert!(!re.is_match("") && !re.is_match("bae"));
}

#[test]
fn parity_two_by_two() {
    let r = check_parity_exhaustive(Board::new(2, 2), 4, 1);
    assert_eq!(r.tested, (0..=4).map(|n| 4usize.pow(n) * 16).sum::<usize>());
    assert!(r.passed(), "{r:?}");
}

#[test]
fn parity_random_and_toggle() {
    let board = Board::new(3, 4);
    assert!(check_parity_random(board, 300, 40, 9).passed());
    assert!(check_toggle_identity(board, 100, 9).passed());
}

#[test]
fn doubled_presses_are_valid_from_off() {
    let board = Board::new(3, 3);
    let lo = lights_out_conditional(board);
    let off = vec![false; 9];
    let inst = lo.instance(&off);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let mut presses: Vec<usize> = (0..rng.random_range(0..6)).map(|_| rng.random_range(0..9)).collect();
        presses.extend(presses.clone());
        let plan = Plan::new(presses.iter().map(|&p| lo.press(p, &off)).collect());
        assert!(verdict(&inst, &plan).unwrap().is_valid());
    }
}

#[test]
fn report_merge_keeps_first_counterexample() {
    let mut a = LangCheckReport::new("x", 2);
    a.record(true, || unreachable!());
    let mut b = LangCheckReport::new("x", 5);
    b.record(false, || "second".into());
    let mut c = LangCheckReport::new("x", 3);
    c.record(false, || "third".into());
    let m = a.merge(b).merge(c);
    assert_eq!((m.tested, m.agree, m.disagree, m.max_len), (3, 1, 2, 5));
    assert_eq!(m.first_counterexample.as_deref(), Some("second"));
    assert!(!m.passed());
    assert!(!LangCheckReport::new("empty", 0).passed());
}

#[test]
fn compiled_checks_catch_a_wrong_program() {
    let (inst, p1, p1x) = fig11_well_formed();
    let layout = record_layout(inst.objects());
    let cases = vec![
        CompiledCase { instance: inst.clone(), plan: p1, layout: layout.clone() },
        CompiledCase { instance: inst.clone(), plan: p1x, layout },
    ];
    let r = check_compiled(Variant::ColorsWf, Construction::Variable, &cases).unwrap();
    assert!(r.passed(), "{r:?}");
    let r = check_compiled(Variant::ColorsWf, Construction::Fixed, &cases).unwrap();
    assert!(r.passed(), "{r:?}");

    let sigma = compile_variable(&domain_of(Variant::ColorsWf), Mode::WellFormed).unwrap().program.sigma().to_vec();
    let mut b = crate::crasp::ProgramBuilder::with_sigma(&sigma);
    let t = b.truth();
    let (always, _) = b.finish(t);
    let mut r = LangCheckReport::new("always", 0);
    for c in &cases {
        check_case(&always, c, &mut r).unwrap();
    }
    assert_eq!(r.disagree, 1);
    assert!(r.first_counterexample.unwrap().contains("program says true"));
    assert!(r.detail.is_some());
}

#[test]
fn sampled_cases_mix_verdicts() {
    for v in [Variant::ColorsWf, Variant::GrippersWf, Variant::GrippersDf, Variant::LightsOutWf] {
        let cases = sample_cases(v, 20, 3, 11..=20, Some(12)).unwrap();
        let statuses: Vec<&str> =
            cases.iter().map(|c| verdict(&c.instance, &c.plan).unwrap().status()).collect();
        assert!(statuses.contains(&"valid"), "{v}");
        assert!(statuses.iter().any(|s| *s != "valid"), "{v}");
        if v.has_preconditions() {
            assert!(statuses.contains(&"non_executable"), "{v}");
        }
        assert!(cases.iter().any(|c| c.plan.is_empty()));
        assert!(cases.iter().any(|c| c.instance.goal().is_empty()));
    }
}

#[test]
fn compiled_sweeps_small() {
    for v in [Variant::ColorsWf, Variant::GrippersWf, Variant::GrippersDf] {
        let cases = sample_cases(v, 30, 5, 11..=25, Some(15)).unwrap();
        let r = check_compiled(v, Construction::Variable, &cases).unwrap();
        assert!(r.passed(), "{r:?}");
    }
    for v in [Variant::ColorsWf, Variant::LightsOutWf] {
        let cases = sample_cases(v, 6, 5, 11..=20, Some(10)).unwrap();
        let r = check_compiled(v, Construction::Fixed, &cases).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn near_miss_object_values_are_rejected() {
    let inst = fig9_instance(GrippersVariant::WellFormed);
    let (pi, _, _) = fig9_plans(&inst);
    let program = compile_variable(&domain_of(Variant::GrippersWf), Mode::WellFormed).unwrap().program;
    let layout = record_layout(inst.objects());
    let word = encode(&inst, &pi, &layout).unwrap();
    assert!(program.accepts_symbols(&word).unwrap());
    // object_7 and object_76 share a name prefix; swapping the ball picked
    // first for its prefix sibling breaks the pick precondition
    let mut swapped = pi.clone();
    let o7 = inst.object_id("object_7").unwrap();
    swapped.actions[0].args[0] = o7;
    assert!(!verdict(&inst, &swapped).unwrap().is_valid());
    let word = encode(&inst, &swapped, &layout).unwrap();
    assert!(!program.accepts_symbols(&word).unwrap());
}

#[test]
fn lowering_named_examples() {
    let hand = hand_programs();
    let unique = &hand.iter().find(|(n, _)| n == "unique copy").unwrap().1;
    let r = check_lowering(unique, &[1, 2, 3], None, 5).unwrap();
    assert!(r.passed(), "{r:?}");
    let tau = &hand.iter().find(|(n, _)| n == "successor seen").unwrap().1;
    assert!(check_lowering(tau, &[1, 2], None, 6).unwrap().passed());
    let free = &hand.iter().find(|(n, _)| n == "match free").unwrap().1;
    assert_eq!(&lower_match_to_finite(free, &[1, 2], DEFAULT_EXPANSION_BUDGET).unwrap(), free);
    assert!(check_lowering(free, &[1, 2], None, 5).unwrap().passed());
}

#[test]
fn unique_copy_reads_doubled_strings() {
    let hand = hand_programs();
    let unique = &hand.iter().find(|(n, _)| n == "unique copy").unwrap().1;
    let w = |vs: &[u64]| vs.iter().map(|&v| Symbol::Ext(v)).collect::<Vec<_>>();
    assert!(unique.accepts_symbols(&w(&[1, 2, 3])).unwrap());
    assert!(!unique.accepts_symbols(&w(&[1, 2, 3, 1])).unwrap());
}

#[test]
fn fragments_cover_every_compiled_match_shape() {
    let frags = compiled_fragments();
    assert!(frags.len() >= 3);
    let shapes: Vec<(Vec<crate::crasp::Conjunct>, bool, bool)> = frags
        .iter()
        .map(|(_, p)| {
            p.ops()
                .iter()
                .find_map(|o| match o {
                    Op::Match(m) => Some((m.conjuncts.clone(), m.strict, m.filter.is_some())),
                    _ => None,
                })
                .unwrap()
        })
        .collect();
    for (v, mode) in [(Variant::ColorsWf, Mode::WellFormed), (Variant::GrippersWf, Mode::WellFormed), (Variant::GrippersDf, Mode::DeleteFree)] {
        let program = compile_variable(&domain_of(v), mode).unwrap().program;
        for op in program.ops() {
            if let Op::Match(m) = op {
                assert!(shapes.contains(&(m.conjuncts.clone(), m.strict, m.filter.is_some())));
            }
        }
    }
}

#[test]
fn suite_has_twenty_programs_and_lowers() {
    let suite = lowering_suite(20, 11);
    assert_eq!(suite.len().max(20), suite.len());
    assert!(suite.iter().any(|(_, p)| classify(p).match_ops == 0));
    for (name, p) in suite.iter().take(8) {
        let r = check_lowering(p, &[1, 2, 3], None, 4).unwrap();
        assert!(r.passed(), "{name}: {r:?}");
    }
}

#[test]
fn random_programs_are_well_sorted_and_vary() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let w: Vec<Symbol> = [1u64, 2, 1, 3, 2].iter().map(|&v| Symbol::Ext(v)).collect();
    let mut seen = [false; 2];
    for _ in 0..60 {
        let p = random_program(&mut rng, &["p"], 6);
        assert!(p.count_matches() >= 1);
        seen[p.accepts_symbols(&w).unwrap() as usize] = true;
    }
    assert_eq!(seen, [true, true]);
}

#[test]
fn translation_small() {
    let r = check_translation(60, &[1, 17, 1000], 8).unwrap();
    assert_eq!(r.tested, 180);
    assert!(r.passed(), "{r:?}");
}

#[test]
fn checks_are_deterministic() {
    let a = check_parity_random(Board::new(2, 3), 50, 10, 3);
    let b = check_parity_random(Board::new(2, 3), 50, 10, 3);
    assert_eq!(a, b);
    assert_eq!(check_translation(12, &[5], 1).unwrap(), check_translation(12, &[5], 1).unwrap());
}
