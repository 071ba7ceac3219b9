use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use planlab::compile::{compile_fixed, compile_variable, encode, EncodingLayout, Mode};
use planlab::crasp::{classify, eval, lower_match_to_finite, CraspProgram};
use planlab::datagen::{
    build_splits, domain_of, generate_split, read_jsonl, record_layout, stats, write_jsonl, GenConfig, Split,
    SplitSizes,
};
use planlab::domains::{Board, Variant};
use planlab::dsl::{parse_crasp, parse_domain, parse_instance, parse_plan, parse_word, serialize_crasp, serialize_word};
use planlab::strips::simulate;
use planlab::theory::{
    check_compiled, check_flipflop, check_lowering, check_parity_exhaustive, check_parity_random,
    check_toggle_identity, check_translation, lowering_suite, sample_cases, Construction, LangCheckReport,
    PARITY_EXHAUSTIVE_MAX_CELLS, PARITY_EXHAUSTIVE_MAX_LEN,
};
use planlab::{Domain, Instance, Plan, Verdict};

use crate::{
    Check, Cli, CmdResult, Command, CompileArgs, ConstructionArg, EncodeArgs, Failure, GenArgs, LowerArgs, ModeArg,
    Outcome, RunCraspArgs, StatsArgs, TaskArgs, VerifyArgs,
};

fn usage(msg: impl ToString) -> Failure {
    Failure::Usage(msg.to_string())
}

fn internal(msg: impl ToString) -> Failure {
    Failure::Internal(msg.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| internal(format!("{}: {e}", path.display())))
}

/// Writes to stdout; a closed pipe ends output silently.
fn out(text: &str) -> Result<(), Failure> {
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(internal(e)),
        _ => Ok(()),
    }
}

fn emit(value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string(value).map_err(internal)?;
    out(&(text + "\n"))
}

pub fn write_manifest(path: &Path, cli: &Cli) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(&json!({
        "tool": "planlab",
        "version": env!("CARGO_PKG_VERSION"),
        "args": cli,
    }))
    .map_err(internal)?;
    write(path, &(text + "\n"))
}

pub fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Verify(a) => verify(a),
        Command::RunCrasp(a) => run_crasp(a),
        Command::CompileCrasp(a) => compile_crasp(a),
        Command::Lower(a) => lower(a),
        Command::Encode(a) => encode_task(a),
        Command::Gen(a) => gen(a, cli),
        Command::Stats(a) => stats_files(a),
        Command::CheckTheory(a) => check(&a.check),
    }
}

/// A domain file, or a built-in variant id when no such file exists.
fn load_domain(spec: &str) -> Result<Arc<Domain>, Failure> {
    let path = Path::new(spec);
    if path.exists() {
        let text = read(path)?;
        return parse_domain(&text)
            .map(Arc::new)
            .map_err(|e| usage(format!("{spec}:{e}")));
    }
    match spec.parse::<Variant>() {
        Ok(v) => Ok(domain_of(v)),
        Err(_) => Err(usage(format!("{spec}: no such file or built-in domain"))),
    }
}

fn load_task(task: &TaskArgs) -> Result<(Instance, Plan), Failure> {
    let domain = load_domain(&task.domain)?;
    let inst = parse_instance(&read(&task.instance)?, domain)
        .map_err(|e| usage(format!("{}:{e}", task.instance.display())))?;
    let plan = parse_plan(&read(&task.plan)?, &inst).map_err(|e| usage(format!("{}:{e}", task.plan.display())))?;
    Ok((inst, plan))
}

fn load_program(path: &Path) -> Result<CraspProgram, Failure> {
    parse_crasp(&read(path)?).map_err(|e| usage(format!("{}:{e}", path.display())))
}

fn verify(a: &VerifyArgs) -> CmdResult {
    let (inst, plan) = load_task(&a.task)?;
    let sim = simulate(&inst, &plan).map_err(internal)?;
    let mut out = serde_json::Map::new();
    out.insert("status".into(), sim.verdict.status().into());
    match &sim.verdict {
        Verdict::Valid => {}
        Verdict::NonExecutable { step, violated } => {
            out.insert("step".into(), (*step).into());
            out.insert("action".into(), inst.fmt_action(&plan.actions[step - 1]).into());
            out.insert("violated".into(), inst.fmt_literal(violated).into());
        }
        Verdict::Incomplete { unsatisfied } => {
            let lits: Vec<String> = unsatisfied.iter().map(|l| inst.fmt_literal(l)).collect();
            out.insert("unsat_goals".into(), lits.into());
        }
    }
    if a.trace {
        let states: Vec<Vec<String>> = sim
            .trace
            .iter()
            .map(|s| s.iter().map(|atom| inst.fmt_atom(atom)).collect())
            .collect();
        out.insert("trace".into(), states.into());
    }
    emit(&out)?;
    Ok(if sim.verdict.is_valid() { Outcome::Ok } else { Outcome::Rejected })
}

fn run_crasp(a: &RunCraspArgs) -> CmdResult {
    let program = load_program(&a.program)?;
    let word = parse_word(&read(&a.input)?).map_err(|e| usage(format!("{}:{e}", a.input.display())))?;
    if word.is_empty() {
        return Err(usage(format!("{}: empty input word", a.input.display())));
    }
    let tokens = program.bind(&word).map_err(usage)?;
    let table = eval(&program, &tokens).map_err(usage)?;
    let accept = table.bool_at(program.output(), word.len());
    if a.dump_table {
        out(&table.to_tsv())?;
    } else {
        let mut out = json!({ "accept": accept, "length": word.len(), "lines": program.ops().len() });
        if a.classify {
            out["class"] = serde_json::to_value(classify(&program)).map_err(internal)?;
        }
        emit(&out)?;
    }
    Ok(if accept { Outcome::Ok } else { Outcome::Rejected })
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Wf => Mode::WellFormed,
        ModeArg::Df => Mode::DeleteFree,
    }
}

fn compile_crasp(a: &CompileArgs) -> CmdResult {
    let domain = load_domain(&a.domain)?;
    let mode = mode_of(a.mode);
    let compiled = match &a.objects {
        Some(path) => {
            let objects: Vec<String> = read(path)?.split_whitespace().map(String::from).collect();
            let layout = match a.base {
                Some(base) => EncodingLayout::sequential(objects.len(), base),
                None => record_layout(&objects),
            };
            compile_fixed(&domain, &objects, &layout, mode)
        }
        None => compile_variable(&domain, mode),
    }
    .map_err(usage)?;
    let program = serialize_crasp(&compiled.program);
    let report = serde_json::to_string(&compiled.report).map_err(internal)?;
    match &a.out {
        Some(path) => {
            write(path, &program)?;
            out(&format!("{report}\n"))?;
        }
        None => {
            out(&program)?;
            if let Some(path) = &a.report {
                write(path, &(report + "\n"))?;
            }
        }
    }
    Ok(Outcome::Ok)
}

fn lower(a: &LowerArgs) -> CmdResult {
    let program = load_program(&a.program)?;
    let lowered = lower_match_to_finite(&program, &a.values, a.budget).map_err(usage)?;
    let text = serialize_crasp(&lowered);
    match &a.out {
        Some(path) => {
            write(path, &text)?;
            emit(&json!({
                "lines_before": program.ops().len(),
                "lines_after": lowered.ops().len(),
                "match_ops_before": program.count_matches(),
                "match_ops_after": lowered.count_matches(),
            }))?;
        }
        None => out(&text)?,
    }
    Ok(Outcome::Ok)
}

fn encode_task(a: &EncodeArgs) -> CmdResult {
    let (inst, plan) = load_task(&a.task)?;
    let layout = match a.base {
        Some(base) => EncodingLayout::sequential(inst.objects().len(), base),
        None => record_layout(inst.objects()),
    };
    let word = encode(&inst, &plan, &layout).map_err(usage)?;
    out(&(serialize_word(&word) + "\n"))?;
    Ok(Outcome::Ok)
}

fn parse_range(text: &str) -> Result<RangeInclusive<usize>, Failure> {
    let bad = || usage(format!("`{text}`: expected LO:HI"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}

fn parse_variant(text: &str) -> Result<Variant, Failure> {
    text.parse().map_err(|_| {
        let ids: Vec<String> = Variant::ALL.iter().map(|v| v.to_string()).collect();
        usage(format!("unknown variant `{text}` (one of {})", ids.join(", ")))
    })
}

fn gen(a: &GenArgs, cli: &Cli) -> CmdResult {
    let variant = parse_variant(&a.variant)?;
    let mut cfg = GenConfig::new(variant, a.seed);
    cfg.id_lengths = parse_range(&a.lengths)?;
    cfg.ood_lengths = parse_range(&a.ood_lengths)?;
    cfg.max_objects = a.max_objects;
    cfg.name_pool = a.name_pool;
    cfg.nonexec_share = a.nonexec_share;
    cfg.df_mix = a.df_mix;
    for (flag, share) in [("--nonexec-share", a.nonexec_share), ("--df-mix", a.df_mix)] {
        if !(0.0..=1.0).contains(&share) {
            return Err(usage(format!("{flag} must lie in [0, 1]")));
        }
    }
    let split = match a.split.as_deref() {
        None if a.out.is_some() => None,
        None => Some(Split::Train),
        Some("all") => None,
        Some(s) => Some(s.parse::<Split>().map_err(usage)?),
    };
    match (&a.out, split) {
        (Some(dir), None) => {
            let sizes = a.count.map(SplitSizes::uniform).unwrap_or_else(|| SplitSizes::default_for(variant));
            let summary = build_splits(&cfg, &sizes, dir).map_err(internal)?;
            write_gen_manifest(dir, variant, cli, &cfg)?;
            emit(&summary)?;
        }
        (target, Some(split)) => {
            let records = generate_split(&cfg, split, a.count.unwrap_or(100)).map_err(internal)?;
            match target {
                Some(dir) => {
                    fs::create_dir_all(dir).map_err(internal)?;
                    let path = planlab::datagen::split_path(dir, variant, split);
                    planlab::datagen::export_jsonl(&records, &path).map_err(internal)?;
                    write_gen_manifest(dir, variant, cli, &cfg)?;
                    emit(&stats(&records))?;
                }
                None => {
                    let mut buf = Vec::new();
                    write_jsonl(&records, &mut buf).map_err(internal)?;
                    out(&String::from_utf8(buf).map_err(internal)?)?;
                }
            }
        }
        (None, None) => return Err(usage("--split all needs --out")),
    }
    Ok(Outcome::Ok)
}

fn write_gen_manifest(dir: &Path, variant: Variant, cli: &Cli, cfg: &GenConfig) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(&json!({
        "tool": "planlab",
        "version": env!("CARGO_PKG_VERSION"),
        "args": cli,
        "config": cfg,
    }))
    .map_err(internal)?;
    write(&dir.join(format!("{variant}.manifest.json")), &(text + "\n"))
}

fn stats_files(a: &StatsArgs) -> CmdResult {
    let mut out: BTreeMap<String, Value> = BTreeMap::new();
    for path in &a.files {
        if !path.exists() {
            return Err(usage(format!("{}: no such file", path.display())));
        }
        let records = read_jsonl(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        out.insert(path.display().to_string(), serde_json::to_value(stats(&records)).map_err(internal)?);
    }
    if out.len() == 1 {
        emit(out.values().next().unwrap())?;
    } else {
        emit(&out)?;
    }
    Ok(Outcome::Ok)
}

fn parse_board(text: &str) -> Result<Board, Failure> {
    let bad = || usage(format!("`{text}`: expected RxC"));
    let (r, c) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    let r: usize = r.trim().parse().map_err(|_| bad())?;
    let c: usize = c.trim().parse().map_err(|_| bad())?;
    if r == 0 || c == 0 {
        return Err(bad());
    }
    Ok(Board::new(r, c))
}

fn report_outcome(reports: &[LangCheckReport]) -> CmdResult {
    if reports.len() == 1 {
        emit(&reports[0])?;
    } else {
        emit(&reports)?;
    }
    Ok(if reports.iter().all(|r| r.passed()) { Outcome::Ok } else { Outcome::CheckFailed })
}

fn check(c: &Check) -> CmdResult {
    let reports = match c {
        Check::Flipflop { max_len } => vec![check_flipflop(*max_len)],
        Check::Parity { board, exhaustive, samples, max_len, toggle, seed } => {
            let board = parse_board(board)?;
            let mut reports = Vec::new();
            if *exhaustive {
                let len = max_len.unwrap_or(PARITY_EXHAUSTIVE_MAX_LEN);
                if board.cells() > PARITY_EXHAUSTIVE_MAX_CELLS || len > PARITY_EXHAUSTIVE_MAX_LEN {
                    return Err(usage(format!(
                        "--exhaustive takes at most {PARITY_EXHAUSTIVE_MAX_CELLS} cells and --max-len {PARITY_EXHAUSTIVE_MAX_LEN}"
                    )));
                }
                reports.push(check_parity_exhaustive(board, len, *seed));
            } else {
                reports.push(check_parity_random(board, *samples, max_len.unwrap_or(200), *seed));
            }
            if *toggle > 0 {
                reports.push(check_toggle_identity(board, *toggle, *seed));
            }
            reports
        }
        Check::Compiled { variant, construction, pairs, lengths, max_objects, seed } => {
            let variant = parse_variant(variant)?;
            let construction = match construction {
                ConstructionArg::Fixed => Construction::Fixed,
                ConstructionArg::Variable => Construction::Variable,
            };
            let cases = sample_cases(variant, *pairs, *seed, parse_range(lengths)?, *max_objects).map_err(internal)?;
            vec![check_compiled(variant, construction, &cases).map_err(usage)?]
        }
        Check::Lowering { program, programs, values, max_len, seed } => {
            let suite: Vec<(String, CraspProgram)> = match program {
                Some(path) => vec![(path.display().to_string(), load_program(path)?)],
                None => lowering_suite(*programs, *seed),
            };
            let mut total = LangCheckReport::new("lowering", *max_len);
            for (name, p) in &suite {
                let mut r = check_lowering(p, values, None, *max_len).map_err(|e| usage(format!("{name}: {e}")))?;
                if let Some(cx) = r.first_counterexample.take() {
                    r.first_counterexample = Some(format!("{name}: {cx}"));
                }
                total = total.merge(r);
            }
            vec![total]
        }
        Check::Translation { pairs, deltas, seed } => vec![check_translation(*pairs, deltas, *seed).map_err(internal)?],
    };
    report_outcome(&reports)
}
