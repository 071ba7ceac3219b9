use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::compile::decode;
use crate::domains::{fig9_instance, fig9_plans, GrippersVariant};
use crate::dsl::parse_word;
use crate::strips::{audit_well_formed_trace, simulate, verdict, Verdict};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn cfg(variant: Variant) -> GenConfig {
    GenConfig::new(variant, 7)
}

#[test]
fn ball_counts_follow_plan_length() {
    let mut r = rng(1);
    let mut seen = BTreeSet::new();
    for _ in 0..2000 {
        let (balls, heavy, rooms) = grippers_counts(20, None, &mut r);
        assert!((12..=17).contains(&balls), "{balls}");
        assert!(heavy * 100 >= 45 * balls && heavy * 100 <= 85 * balls);
        assert!(rooms >= 2 && rooms * 10 >= 2 * balls && rooms <= (balls / 2).max(2));
        seen.insert(balls);
    }
    assert_eq!(seen.len(), 6);
    for _ in 0..500 {
        let (b, _, r2) = grippers_counts(60, Some(40), &mut r);
        assert!(b + r2 + 2 <= 40);
    }
}

#[test]
fn colors_shape_is_near_square() {
    assert_eq!(colors_shape(24), (2, 3));
    assert_eq!(colors_shape(11), (1, 3));
    assert_eq!(colors_shape(200), (7, 7));
    for n in 1..=200 {
        let (b, c) = colors_shape(n);
        assert!(b <= c && c <= b + 2 + b / 2, "{n}: {b}x{c}");
    }
}

#[test]
fn grippers_plans_are_valid_and_end_with_balls_down() {
    for variant in [Variant::GrippersWf, Variant::GrippersDf] {
        let c = cfg(variant);
        for seed in 0..150 {
            let n = 11 + (seed as usize * 7) % 50;
            let (inst, plan) = gen_grippers(&c, n, &mut rng(seed)).unwrap();
            assert_eq!(plan.len(), n);
            assert_eq!(verdict(&inst, &plan).unwrap(), Verdict::Valid);
            let balls = inst.init().iter().filter(|a| inst.domain().predicate(a.pred).name == "ball").count();
            let at_goals: BTreeSet<u32> = inst.goal().iter().map(|g| g.atom.args[0]).collect();
            assert_eq!(at_goals.len(), balls);
            if variant == Variant::GrippersWf {
                assert!(audit_well_formed_trace(&inst, &plan).unwrap().is_empty());
                let end = simulate(&inst, &plan).unwrap().trace.pop().unwrap();
                assert!(end.iter().all(|a| inst.domain().predicate(a.pred).name != "carry"));
            }
        }
    }
}

#[test]
fn colors_plans_start_empty() {
    let mut duplicate_adds = 0;
    for variant in [Variant::ColorsWf, Variant::ColorsStrips] {
        let c = cfg(variant);
        for seed in 0..200 {
            let (inst, plan) = gen_colors(&c, 24, &mut rng(seed)).unwrap();
            assert_eq!(inst.objects().len(), 5);
            assert!(inst.init().iter().all(|a| inst.domain().predicate(a.pred).name != "hasColor"));
            assert_eq!(verdict(&inst, &plan).unwrap(), Verdict::Valid);
            let clean = audit_well_formed_trace(&inst, &plan).unwrap().is_empty();
            if variant == Variant::ColorsWf {
                assert!(clean);
            } else if !clean {
                duplicate_adds += 1;
            }
        }
    }
    assert!(duplicate_adds > 100);
}

#[test]
fn lights_out_plans_invert_the_scramble() {
    for seed in 0..300 {
        let n = 1 + seed as usize % 60;
        let (ce, pce) = gen_lights_out(Variant::LightsOutCe, n, &mut rng(seed)).unwrap();
        let (wf, pwf) = gen_lights_out(Variant::LightsOutWf, n, &mut rng(seed)).unwrap();
        assert_eq!(pce.len(), n);
        let tce = simulate(&ce, &pce).unwrap();
        let twf = simulate(&wf, &pwf).unwrap();
        assert_eq!(tce.verdict, Verdict::Valid);
        assert_eq!(twf.verdict, Verdict::Valid);
        assert_eq!(tce.trace, twf.trace);
    }
    let lo = lights::lights_out(Variant::LightsOutCe);
    let (inst, plan) = gen_lights_out(Variant::LightsOutCe, 1, &mut rng(3)).unwrap();
    let (cell, _) = lo.cell_of(plan.actions[0].schema);
    let lit: BTreeSet<usize> = lo.lit_of(inst.init()).iter().enumerate().filter(|x| *x.1).map(|x| x.0).collect();
    assert_eq!(lit, lo.board.neighborhood(cell).into_iter().collect());
}

fn differing_positions(a: &Plan, b: &Plan) -> usize {
    a.actions.iter().zip(&b.actions).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len())
}

#[test]
fn incomplete_corruptions() {
    for variant in [Variant::ColorsWf, Variant::ColorsStrips, Variant::LightsOutCe, Variant::LightsOutWf] {
        let c = cfg(variant);
        let mut done = 0;
        for seed in 0..200 {
            let mut r = rng(seed);
            let (inst, plan) = gen_valid(&c, 30, &mut r).unwrap();
            let Ok(bad) = corrupt_incomplete(&c, &inst, &plan, &(11..=100), &mut r) else { continue };
            done += 1;
            assert_eq!(bad.len(), plan.len());
            assert_eq!(differing_positions(&plan, &bad), 1);
            match verdict(&inst, &bad).unwrap() {
                Verdict::Incomplete { unsatisfied } => {
                    if variant.is_colors() {
                        assert_eq!(unsatisfied.len(), 1)
                    }
                }
                v => panic!("{variant}: {v:?}"),
            }
        }
        assert!(done > 150, "{variant}: {done}");
    }
    for variant in [Variant::GrippersWf, Variant::GrippersDf] {
        let c = cfg(variant);
        let mut done = 0;
        for seed in 0..200 {
            let mut r = rng(seed);
            let (inst, plan) = gen_valid(&c, 40, &mut r).unwrap();
            let Ok(bad) = corrupt_incomplete(&c, &inst, &plan, &(11..=100), &mut r) else { continue };
            done += 1;
            assert!(bad.len() <= plan.len() && bad.len() + GRIPPERS_MAX_SHRINK >= plan.len());
            match verdict(&inst, &bad).unwrap() {
                Verdict::Incomplete { unsatisfied } => assert_eq!(unsatisfied.len(), 1),
                v => panic!("{variant}: {v:?}"),
            }
        }
        assert!(done > 100, "{variant}: {done}");
    }
}

#[test]
fn fig9_incomplete_is_reachable() {
    let inst = fig9_instance(GrippersVariant::WellFormed);
    let (pi, pi1, _) = fig9_plans(&inst);
    let mut outputs = Vec::new();
    for seed in 0..200 {
        if let Ok(p) = corrupt_incomplete_grippers(&inst, &pi, &(1..=100), &mut rng(seed)) {
            outputs.push(p);
        }
    }
    assert!(outputs.contains(&pi1), "{outputs:?}");
}

#[test]
fn nonexecutable_corruptions() {
    for variant in [Variant::GrippersWf, Variant::GrippersDf] {
        let c = cfg(variant);
        let mut schemas = BTreeSet::new();
        for seed in 0..200 {
            let mut r = rng(seed);
            let (inst, plan) = gen_valid(&c, 25, &mut r).unwrap();
            let bad = corrupt_nonexecutable(&c, &inst, &plan, &mut r).unwrap();
            assert_eq!(bad.len(), plan.len());
            assert_eq!(differing_positions(&plan, &bad), 1);
            match verdict(&inst, &bad).unwrap() {
                Verdict::NonExecutable { step, .. } => assert_eq!(step, plan.len()),
                v => panic!("{v:?}"),
            }
            let name = inst.domain().schema(bad.actions.last().unwrap().schema).name.clone();
            assert!(name == "move" || name == "drop", "{name}");
            schemas.insert(name);
        }
        assert_eq!(schemas.len(), 2);
    }
    for variant in [Variant::ColorsStrips, Variant::LightsOutCe] {
        let c = cfg(variant);
        let (inst, plan) = gen_valid(&c, 12, &mut rng(0)).unwrap();
        assert!(matches!(corrupt_nonexecutable(&c, &inst, &plan, &mut rng(0)), Err(GenError::NotApplicable(_))));
    }
}

#[test]
fn fig9_nonexecutable_shape() {
    let inst = fig9_instance(GrippersVariant::WellFormed);
    let (pi, _, pi2) = fig9_plans(&inst);
    let mut hit = false;
    for seed in 0..400 {
        let p = corrupt_nonexecutable_grippers(&inst, &pi, &mut rng(seed)).unwrap();
        hit |= p == pi2;
    }
    assert!(hit);
}

#[test]
fn records_check_and_tokenize() {
    for variant in Variant::ALL {
        let c = cfg(variant);
        let recs = generate_split(&c, Split::ValId, 20).unwrap();
        assert_eq!(recs.len(), 20);
        let correct = recs.iter().filter(|r| r.label == Label::Correct).count();
        assert_eq!(correct, 10);
        for r in &recs {
            assert!((11..=100).contains(&r.n_actions));
            r.check().unwrap();
            let (inst, plan) = r.instance_plan().unwrap();
            let word = parse_word(&r.tokens_crasp).unwrap();
            let layout = record_layout(&r.objects);
            let (back, back_plan) = decode(&word, inst.domain_arc().clone(), inst.objects(), &layout).unwrap();
            assert_eq!(back_plan, plan);
            assert_eq!(back.init(), inst.init());
            assert_eq!(back.goal(), inst.goal());
            let toks: Vec<&str> = r.tokens_train.split(' ').collect();
            assert_eq!(toks[0], "<init>");
            assert_eq!(*toks.last().unwrap(), if r.label == Label::Correct { "correct" } else { "incorrect" });
            if variant.is_colors() {
                assert_eq!(toks[1], "<plan>");
            }
            if variant == Variant::LightsOutWf {
                let plan_at = toks.iter().position(|t| *t == "<plan>").unwrap();
                let goal_at = toks.iter().position(|t| *t == "<goal>").unwrap();
                assert_eq!(goal_at - plan_at - 1, 4 * r.n_actions);
                assert_eq!(toks[goal_at + 1], "<verdict>");
            }
        }
        let ood = generate_split(&c, Split::TestOod, 4).unwrap();
        assert!(ood.iter().all(|r| (101..=200).contains(&r.n_actions)));
    }
}

#[test]
fn grippers_invalids_mix_kinds() {
    let recs = generate_split(&cfg(Variant::GrippersDf), Split::Train, 80).unwrap();
    let s = stats(&recs);
    assert_eq!(s.correct, 40);
    assert!(s.corruption["incomplete"] > 5 && s.corruption["non_executable"] > 5, "{s:?}");
}

#[test]
fn generation_is_deterministic() {
    let c = cfg(Variant::GrippersWf);
    let run = || {
        let mut buf = Vec::new();
        write_jsonl(&generate_split(&c, Split::Train, 30).unwrap(), &mut buf).unwrap();
        buf
    };
    let a = run();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(run);
    assert_eq!(a, b);
    let other = GenConfig::new(Variant::GrippersWf, 8);
    let mut c2 = Vec::new();
    write_jsonl(&generate_split(&other, Split::Train, 30).unwrap(), &mut c2).unwrap();
    assert_ne!(a, c2);
}

#[test]
fn default_sizes_are_even() {
    for v in Variant::ALL {
        let s = SplitSizes::default_for(v);
        for split in Split::ALL {
            assert_eq!(s.get(split) % 2, 0);
        }
    }
    assert_eq!(SplitSizes::default_for(Variant::ColorsWf).train, 17_200);
    assert_eq!(SplitSizes::default_for(Variant::GrippersDf).val_ood, 200);
    assert_eq!(SplitSizes::default_for(Variant::LightsOutCe).test_ood, 134);
}

#[test]
fn build_splits_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let c = cfg(Variant::ColorsStrips);
    let summary = build_splits(&c, &SplitSizes::uniform(6), dir.path()).unwrap();
    for split in Split::ALL {
        let recs = read_jsonl(&split_path(dir.path(), Variant::ColorsStrips, split)).unwrap();
        assert_eq!(recs.len(), 6);
        assert_eq!(summary.splits[split.id()].records, 6);
    }
    assert!(dir.path().join("colors-strips.stats.json").exists());
}

#[test]
fn pool_size_covers_largest_instance() {
    let c = cfg(Variant::GrippersWf);
    assert!(c.pool_size() + 1 >= 170 + 85 + 2);
    let mut capped = cfg(Variant::GrippersWf);
    capped.max_objects = Some(40);
    assert_eq!(capped.pool_size(), 39);
    assert_eq!(cfg(Variant::ColorsWf).pool_size(), 13);
}
