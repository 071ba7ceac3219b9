use std::time::{Duration, Instant};

use planlab::compile::{compile_fixed, compile_variable, CompileError, EncodingLayout, Mode};
use planlab::datagen::{
    build_splits, domain_of, generate_split, read_jsonl, split_path, write_jsonl, Corruption, GenConfig, Label, Split,
    SplitSizes,
};
use planlab::domains::{golden_cases, Board, Variant};
use planlab::strips::verdict;
use planlab::theory::{
    check_compiled, check_flipflop, check_lowering, check_parity_exhaustive, check_parity_random,
    check_toggle_identity, check_translation, lowering_suite, sample_cases, Construction, LangCheckReport,
};

const SEED: u64 = 20_240_601;

struct Outcome {
    name: &'static str,
    ok: bool,
    elapsed: Duration,
    note: String,
}

fn run(name: &'static str, budget: Option<Duration>, body: impl FnOnce() -> Result<String, String>) -> Outcome {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let (mut ok, mut note) = match result {
        Ok(n) => (true, n),
        Err(e) => (false, e),
    };
    if let Some(b) = budget {
        if elapsed > b {
            ok = false;
            note = format!("{note}; over the {}s budget", b.as_secs());
        }
    }
    println!(
        "[{}] {name} ({:.1}s): {note}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    Outcome { name, ok, elapsed, note }
}

fn expect(report: &LangCheckReport, at_least: usize) -> Result<String, String> {
    if report.passed() && report.tested >= at_least {
        Ok(format!("{}: {}/{} agree", report.check, report.agree, report.tested))
    } else {
        Err(format!(
            "{}: {} of {} disagree (need >= {at_least} cases), first: {:?}\n{}",
            report.check,
            report.disagree,
            report.tested,
            report.first_counterexample,
            report.detail.as_deref().unwrap_or("")
        ))
    }
}

fn fixed_soundness() -> Result<String, String> {
    let mut notes = Vec::new();
    for v in [Variant::ColorsWf, Variant::LightsOutWf] {
        let cases = sample_cases(v, 1000, SEED, 11..=60, Some(12)).map_err(|e| e.to_string())?;
        let statuses: std::collections::BTreeSet<&str> =
            cases.iter().map(|c| verdict(&c.instance, &c.plan).unwrap().status()).collect();
        if !statuses.contains("valid") || statuses.len() < 2 {
            return Err(format!("{v}: unmixed verdicts {statuses:?}"));
        }
        if v.has_preconditions() && !statuses.contains("non_executable") {
            return Err(format!("{v}: no non-executable cases"));
        }
        let r = check_compiled(v, Construction::Fixed, &cases).map_err(|e| e.to_string())?;
        notes.push(expect(&r, 2000)?);
    }
    Ok(notes.join("; "))
}

fn variable_soundness() -> Result<String, String> {
    let mut notes = Vec::new();
    for v in [Variant::GrippersWf, Variant::GrippersDf, Variant::ColorsWf] {
        let cases = sample_cases(v, 2500, SEED, 11..=60, Some(40)).map_err(|e| e.to_string())?;
        let most = cases.iter().map(|c| c.instance.objects().len()).max().unwrap_or(0);
        if most > 40 {
            return Err(format!("{v}: {most} objects"));
        }
        let r = check_compiled(v, Construction::Variable, &cases).map_err(|e| e.to_string())?;
        notes.push(format!("{} (up to {most} objects)", expect(&r, 5000)?));
    }
    Ok(notes.join("; "))
}

fn negative_gating() -> Result<String, String> {
    let mut checked = 0;
    for v in [Variant::ColorsStrips, Variant::LightsOutCe] {
        let d = domain_of(v);
        let objects = d.constants().to_vec();
        let layout = EncodingLayout::sequential(objects.len(), 0);
        for (what, r) in [
            ("fixed", compile_fixed(&d, &objects, &layout, Mode::WellFormed).map(|_| ())),
            ("variable", compile_variable(&d, Mode::WellFormed).map(|_| ())),
            ("variable/delete-free", compile_variable(&d, Mode::DeleteFree).map(|_| ())),
        ] {
            match r {
                Err(CompileError::NotSupported(_)) => checked += 1,
                other => return Err(format!("{v} {what}: {other:?}")),
            }
        }
    }
    Ok(format!("{checked} compile attempts refused"))
}

fn flipflop() -> Result<String, String> {
    let r = check_flipflop(10);
    if r.tested != 88_572 {
        return Err(format!("enumerated {} strings", r.tested));
    }
    expect(&r, 88_572)
}

fn parity() -> Result<String, String> {
    let small = check_parity_exhaustive(Board::new(2, 2), 6, SEED);
    let big = check_parity_random(Board::new(5, 5), 10_000, 200, SEED);
    let toggle = check_toggle_identity(Board::new(5, 5), 1000, SEED);
    Ok([expect(&small, 1)?, expect(&big, 10_000)?, expect(&toggle, 1000)?].join("; "))
}

fn lowering() -> Result<String, String> {
    let suite = lowering_suite(20, SEED);
    if suite.len() < 20 {
        return Err(format!("only {} programs", suite.len()));
    }
    let mut strings = 0;
    for (name, p) in &suite {
        let r = check_lowering(p, &[1, 2, 3], None, 8).map_err(|e| format!("{name}: {e}"))?;
        expect(&r, 1).map_err(|e| format!("{name}: {e}"))?;
        strings += r.tested;
    }
    Ok(format!("{} programs, {strings} strings", suite.len()))
}

fn translation() -> Result<String, String> {
    let r = check_translation(1000, &[1, 17, 1000], SEED).map_err(|e| e.to_string())?;
    expect(&r, 3000)
}

fn dataset_contract() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut records = 0;
    for v in Variant::ALL {
        let cfg = GenConfig::new(v, SEED);
        let summary = build_splits(&cfg, &SplitSizes::uniform(60), dir.path()).map_err(|e| e.to_string())?;
        for split in Split::ALL {
            let recs = read_jsonl(&split_path(dir.path(), v, split)).map_err(|e| e.to_string())?;
            let st = &summary.splits[split.id()];
            if st.correct != st.incorrect || st.records != recs.len() {
                return Err(format!("{v}/{split}: {} correct, {} incorrect", st.correct, st.incorrect));
            }
            let lengths = cfg.lengths(split);
            for r in &recs {
                let valid = r.check().map_err(|e| e.to_string())?.is_valid();
                if valid != (r.label == Label::Correct) {
                    return Err(format!("{}: label disagrees with simulation", r.id));
                }
                if r.label == Label::Correct && !lengths.contains(&r.n_actions) {
                    return Err(format!("{}: {} actions outside {lengths:?}", r.id, r.n_actions));
                }
                if r.label == Label::Incorrect && r.n_actions > *lengths.end() {
                    return Err(format!("{}: {} actions", r.id, r.n_actions));
                }
            }
            if v.is_grippers() && split == Split::Train {
                let kinds = [Corruption::Incomplete, Corruption::NonExecutable];
                if !kinds.iter().all(|k| recs.iter().any(|r| r.corruption == *k)) {
                    return Err(format!("{v}: invalid plans do not mix both corruptions"));
                }
            }
            records += recs.len();
        }
    }
    for c in golden_cases() {
        let own = verdict(&c.instance, &c.plan).map_err(|e| e.to_string())?.status();
        let sib = c.instance.with_domain(c.variant.sibling().domain()).map_err(|e| e.to_string())?;
        let other = verdict(&sib, &c.plan).map_err(|e| e.to_string())?.status();
        if (own, other) != (c.expected, c.expected_sibling) {
            return Err(format!("{}: {own}/{other}", c.name));
        }
    }
    Ok(format!("{records} records, {} golden cases", golden_cases().len()))
}

fn json(r: LangCheckReport) -> String {
    serde_json::to_string(&r).unwrap()
}

fn determinism() -> Result<String, String> {
    let bytes = |v: Variant, split: Split| -> Result<Vec<u8>, String> {
        let mut out = Vec::new();
        let recs = generate_split(&GenConfig::new(v, SEED), split, 40).map_err(|e| e.to_string())?;
        write_jsonl(&recs, &mut out).map_err(|e| e.to_string())?;
        Ok(out)
    };
    for v in Variant::ALL {
        for split in [Split::Train, Split::TestOod] {
            let a = bytes(v, split)?;
            let b = rayon::ThreadPoolBuilder::new()
                .num_threads(3)
                .build()
                .map_err(|e| e.to_string())?
                .install(|| bytes(v, split))?;
            if a != b {
                return Err(format!("{v}/{split} differs between runs"));
            }
        }
    }
    let checks: [fn() -> String; 3] = [
        || json(check_parity_random(Board::new(3, 3), 200, 30, SEED)),
        || json(check_translation(50, &[1, 17], SEED).unwrap()),
        || {
            let cases = sample_cases(Variant::GrippersDf, 20, SEED, 11..=30, Some(20)).unwrap();
            json(check_compiled(Variant::GrippersDf, Construction::Variable, &cases).unwrap())
        },
    ];
    for check in checks {
        if check() != check() {
            return Err("check report differs between runs".into());
        }
    }
    Ok("generation and check output identical across runs".into())
}

fn main() {
    let outcomes = vec![
        run("1 fixed-universe verifier soundness", Some(Duration::from_secs(60)), fixed_soundness),
        run("2 variable-universe verifier soundness", Some(Duration::from_secs(300)), variable_soundness),
        run("3 negative-construction gating", None, negative_gating),
        run("4 flipflop identity", Some(Duration::from_secs(30)), flipflop),
        run("5 parity identity", None, parity),
        run("6 match lowering", None, lowering),
        run("7 translation invariance", None, translation),
        run("8 dataset contract", None, dataset_contract),
        run("9 determinism", None, determinism),
    ];
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.ok)
        .map(|o| format!("{} after {:.1}s: {}", o.name, o.elapsed.as_secs_f64(), o.note))
        .collect();
    println!("{}/{} criteria pass", outcomes.len() - failed.len(), outcomes.len());
    if !failed.is_empty() {
        eprintln!("{failed:#?}");
        std::process::exit(1);
    }
}
