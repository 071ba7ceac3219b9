//! Brute-force checks of the language identities behind the verifier
//! constructions.

mod programs;

#[cfg(test)]
mod tests;

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::compile::{compile_fixed, compile_variable, encode, CompileError, EncodingLayout, Mode};
use crate::crasp::{eval, lower_match_to_finite, CraspError, CraspProgram, Symbol, DEFAULT_EXPANSION_BUDGET};
use crate::datagen::{domain_of, generate_pair, record_layout, GenConfig, GenError, Split};
use crate::domains::{
    flipflop_instance, flipflop_plan, ghom, lights_out_conditional, lights_out_well_formed, parity_verdict, Board,
    Variant,
};
use crate::strips::{applicable, simulate, succ, verdict, GroundAction, GroundLiteral, Instance, Plan};

pub use programs::{compiled_fragments, hand_programs, random_program};

/// Exhaustive checks refuse longer strings than this.
pub const FLIPFLOP_MAX_LEN: usize = 14;
pub const PARITY_EXHAUSTIVE_MAX_LEN: usize = 6;
pub const PARITY_EXHAUSTIVE_MAX_CELLS: usize = 9;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LangCheckReport {
    pub check: String,
    pub max_len: usize,
    pub tested: usize,
    pub agree: usize,
    pub disagree: usize,
    pub first_counterexample: Option<String>,
    /// Extra context for the first counterexample (an evaluation table for
    /// compiled programs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl LangCheckReport {
    pub fn new(check: impl Into<String>, max_len: usize) -> Self {
        LangCheckReport { check: check.into(), max_len, ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.tested > 0 && self.disagree == 0
    }

    fn record(&mut self, ok: bool, example: impl FnOnce() -> String) {
        self.tested += 1;
        if ok {
            self.agree += 1;
        } else {
            self.disagree += 1;
            if self.first_counterexample.is_none() {
                self.first_counterexample = Some(example());
            }
        }
    }

    /// Folds another shard in; the earlier shard's counterexample wins.
    pub fn merge(mut self, other: LangCheckReport) -> Self {
        self.tested += other.tested;
        self.agree += other.agree;
        self.disagree += other.disagree;
        self.max_len = self.max_len.max(other.max_len);
        if self.first_counterexample.is_none() {
            self.first_counterexample = other.first_counterexample;
            self.detail = other.detail;
        }
        self
    }
}

fn merge_all(name: &str, max_len: usize, parts: Vec<LangCheckReport>) -> LangCheckReport {
    parts.into_iter().fold(LangCheckReport::new(name, max_len), LangCheckReport::merge)
}

fn words(alphabet: &[char], len: usize) -> impl Iterator<Item = String> + '_ {
    let total = alphabet.len().pow(len as u32);
    (0..total).map(move |mut k| {
        let mut s = String::with_capacity(len);
        for _ in 0..len {
            s.push(alphabet[k % alphabet.len()]);
            k /= alphabet.len();
        }
        s
    })
}

/// Every word over `{a, b, e}` of length `1..=max_len`: plan validity on
/// the FlipFlop instance against membership in `Σ* b e*`.
pub fn check_flipflop(max_len: usize) -> LangCheckReport {
    assert!(max_len <= FLIPFLOP_MAX_LEN, "max_len is capped at {FLIPFLOP_MAX_LEN}");
    let inst = flipflop_instance();
    let re = Regex::new("^[abe]*be*$").unwrap();
    let shards: Vec<(usize, char)> = (1..=max_len).flat_map(|n| ['a', 'b', 'e'].map(|c| (n, c))).collect();
    let parts = shards
        .into_par_iter()
        .map(|(n, first)| {
            let mut r = LangCheckReport::new("flipflop", n);
            for tail in words(&['a', 'b', 'e'], n - 1) {
                let w = format!("{first}{tail}");
                let plan = flipflop_plan(&inst, &w).unwrap();
                let valid = verdict(&inst, &plan).unwrap().is_valid();
                r.record(valid == re.is_match(&w), || w.clone());
            }
            r
        })
        .collect();
    merge_all("flipflop", max_len, parts)
}

fn lit_vector(cells: usize, code: u64) -> Vec<bool> {
    (0..cells).map(|v| code >> v & 1 == 1).collect()
}

/// Every press sequence up to `max_len` on a small board, from every initial
/// state (boards up to 4 cells) or from `h(w)` plus seven random states.
pub fn check_parity_exhaustive(board: Board, max_len: usize, seed: u64) -> LangCheckReport {
    let cells = board.cells();
    assert!(cells <= PARITY_EXHAUSTIVE_MAX_CELLS && max_len <= PARITY_EXHAUSTIVE_MAX_LEN);
    let lo = lights_out_conditional(board);
    let alphabet: Vec<char> = (0..cells).map(|v| char::from_digit(v as u32, 10).unwrap()).collect();
    let parts = (0..=max_len)
        .into_par_iter()
        .map(|n| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
            let mut r = LangCheckReport::new("parity", n);
            for w in words(&alphabet, n) {
                let presses: Vec<usize> = w.chars().map(|c| c.to_digit(10).unwrap() as usize).collect();
                let inits: Vec<Vec<bool>> = if cells <= 4 {
                    (0..1u64 << cells).map(|c| lit_vector(cells, c)).collect()
                } else {
                    let mut v = vec![ghom(board, &presses).to_bools()];
                    v.extend((0..7).map(|_| lit_vector(cells, rng.random_range(0..1u64 << cells))));
                    v
                };
                for lit in inits {
                    let inst = lo.instance(&lit);
                    let plan = Plan::new(presses.iter().map(|&p| lo.press(p, &lit)).collect());
                    let sim = verdict(&inst, &plan).unwrap().is_valid();
                    r.record(sim == parity_verdict(board, &lit, &presses), || format!("init={lit:?} presses={presses:?}"));
                }
            }
            r
        })
        .collect();
    merge_all("parity", max_len, parts)
}

/// Random press sequences of length `0..=max_len`. Half start from `h(w)`
/// (valid by the identity), half from `h(w)` with random cells flipped.
pub fn check_parity_random(board: Board, samples: usize, max_len: usize, seed: u64) -> LangCheckReport {
    let lo = lights_out_conditional(board);
    let cells = board.cells();
    let parts = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let n = rng.random_range(0..=max_len);
            let presses: Vec<usize> = (0..n).map(|_| rng.random_range(0..cells)).collect();
            let mut lit = ghom(board, &presses).to_bools();
            if k % 2 == 1 {
                for _ in 0..rng.random_range(1..=3) {
                    let v = rng.random_range(0..cells);
                    lit[v] = !lit[v];
                }
            }
            let inst = lo.instance(&lit);
            let plan = Plan::new(presses.iter().map(|&p| lo.press(p, &lit)).collect());
            let sim = verdict(&inst, &plan).unwrap().is_valid();
            let mut r = LangCheckReport::new("parity", n);
            r.record(sim == parity_verdict(board, &lit, &presses), || format!("sample {k}: presses={presses:?}"));
            r
        })
        .collect();
    merge_all("parity", max_len, parts)
}

/// Pressing the same cell twice restores a random state, in both variants.
pub fn check_toggle_identity(board: Board, samples: usize, seed: u64) -> LangCheckReport {
    let ce = lights_out_conditional(board);
    let wf = lights_out_well_formed(board);
    let cells = board.cells();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = LangCheckReport::new("toggle", 2);
    for _ in 0..samples {
        let lit: Vec<bool> = (0..cells).map(|_| rng.random_bool(0.5)).collect();
        let cell = rng.random_range(0..cells);
        let s = ce.state_of(&lit);
        let inst = ce.instance(&lit);
        let a = ce.press(cell, &lit);
        let twice = succ(&inst, &succ(&inst, &s, &a).unwrap(), &a).unwrap();
        let wf_inst = wf.instance(&lit);
        let first = wf.press(cell, &lit);
        let mid = succ(&wf_inst, &s, &first).unwrap();
        let second = wf.press(cell, &wf.lit_of(&mid));
        let ok = applicable(&wf_inst, &s, &first)
            && applicable(&wf_inst, &mid, &second)
            && succ(&wf_inst, &mid, &second).unwrap() == s;
        r.record(twice == s && ok, || format!("cell {cell} from {lit:?}"));
    }
    r
}

/// Which construction to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Fixed,
    Variable,
}

#[derive(Clone, Debug)]
pub struct CompiledCase {
    pub instance: Instance,
    pub plan: Plan,
    pub layout: EncodingLayout,
}

fn mode_of(variant: Variant) -> Mode {
    if variant == Variant::GrippersDf {
        Mode::DeleteFree
    } else {
        Mode::WellFormed
    }
}

/// A random action that fails its preconditions at step `k` of `plan`.
fn inapplicable_at(inst: &Instance, plan: &Plan, k: usize, rng: &mut ChaCha8Rng) -> Option<GroundAction> {
    let state = simulate(inst, &Plan::new(plan.actions[..k].to_vec())).ok()?.trace.pop()?;
    let d = inst.domain();
    let n = inst.objects().len() as u32;
    for _ in 0..200 {
        let schema = d.schema_ids().collect::<Vec<_>>().choose(rng).copied()?;
        let arity = d.schema(schema).arity();
        let a = GroundAction::new(schema, (0..arity).map(|_| rng.random_range(0..n)));
        if !applicable(inst, &state, &a) {
            return Some(a);
        }
    }
    None
}

/// Mixed records for compiled-verifier checks: generated valid/invalid pairs
/// with lengths in `lengths`, a generic non-executable mutation for variants
/// with preconditions, and degenerate cases (empty plan, empty goal).
pub fn sample_cases(
    variant: Variant,
    pairs: usize,
    seed: u64,
    lengths: std::ops::RangeInclusive<usize>,
    max_objects: Option<usize>,
) -> Result<Vec<CompiledCase>, GenError> {
    let mut cfg = GenConfig::new(variant, seed);
    cfg.id_lengths = lengths;
    cfg.max_objects = max_objects;
    let chunks: Vec<Vec<CompiledCase>> = (0..pairs as u64)
        .into_par_iter()
        .map(|p| -> Result<Vec<CompiledCase>, GenError> {
            let recs = generate_pair(&cfg, Split::Train, p)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7e57);
            rng.set_stream(p);
            let mut out = Vec::new();
            for r in &recs {
                let (instance, plan) = r.instance_plan()?;
                let layout = record_layout(&r.objects);
                out.push(CompiledCase { instance, plan, layout });
            }
            let base = out[0].clone();
            if variant.has_preconditions() && p % 2 == 0 {
                let k = rng.random_range(0..base.plan.len());
                if let Some(a) = inapplicable_at(&base.instance, &base.plan, k, &mut rng) {
                    let mut plan = base.plan.clone();
                    plan.actions[k] = a;
                    out.push(CompiledCase { plan, ..base.clone() });
                }
            }
            if p % 10 == 0 {
                let empty = Plan::default();
                let init_goal: Vec<GroundLiteral> =
                    base.instance.init().iter().take(2).cloned().map(GroundLiteral::pos).collect();
                let trivial = base.instance.with_init_goal(base.instance.init().clone(), init_goal).unwrap();
                out.push(CompiledCase { instance: trivial, plan: empty.clone(), layout: base.layout.clone() });
                out.push(CompiledCase { instance: base.instance.clone(), plan: empty, layout: base.layout.clone() });
                let no_goal = base.instance.with_init_goal(base.instance.init().clone(), vec![]).unwrap();
                out.push(CompiledCase { instance: no_goal, plan: base.plan.clone(), layout: base.layout.clone() });
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

fn check_case(program: &CraspProgram, case: &CompiledCase, r: &mut LangCheckReport) -> Result<(), CompileError> {
    let word = encode(&case.instance, &case.plan, &case.layout)?;
    let expected = verdict(&case.instance, &case.plan).map_err(|e| CompileError::NotSupported(e.to_string()))?;
    let bound = program.bind(&word).map_err(crasp_err)?;
    let got = crate::crasp::accepts(program, &bound).map_err(crasp_err)?;
    r.max_len = r.max_len.max(case.plan.len());
    let ok = got == expected.is_valid();
    r.record(ok, || {
        format!(
            "{} plan of {} actions: program says {got}, simulation says {}",
            case.instance.domain().name(),
            case.plan.len(),
            expected.status()
        )
    });
    if !ok && r.detail.is_none() {
        r.detail = eval(program, &bound).ok().map(|t| t.to_tsv());
    }
    Ok(())
}

fn crasp_err(e: CraspError) -> CompileError {
    CompileError::NotSupported(e.to_string())
}

/// Compiled acceptance against simulation on every case. Fixed-universe
/// programs are compiled once per distinct (objects, layout).
pub fn check_compiled(
    variant: Variant,
    construction: Construction,
    cases: &[CompiledCase],
) -> Result<LangCheckReport, CompileError> {
    let domain = domain_of(variant);
    let mode = mode_of(variant);
    let name = format!("compiled {variant} ({construction:?})").to_lowercase();
    match construction {
        Construction::Variable => {
            let program = compile_variable(&domain, mode)?.program;
            let parts: Vec<LangCheckReport> = cases
                .par_iter()
                .map(|c| {
                    let mut r = LangCheckReport::new(&name, 0);
                    check_case(&program, c, &mut r).map(|_| r)
                })
                .collect::<Result<_, _>>()?;
            Ok(merge_all(&name, 0, parts))
        }
        Construction::Fixed => {
            let mut groups: HashMap<(Vec<String>, Vec<u64>), Vec<&CompiledCase>> = HashMap::new();
            for c in cases {
                groups
                    .entry((c.instance.objects().to_vec(), c.layout.values.clone()))
                    .or_default()
                    .push(c);
            }
            let mut keys: Vec<_> = groups.keys().cloned().collect();
            keys.sort();
            let parts: Vec<LangCheckReport> = keys
                .par_iter()
                .map(|key| {
                    let program = compile_fixed(&domain, &key.0, &EncodingLayout::new(key.1.clone()), mode)?.program;
                    let mut r = LangCheckReport::new(&name, 0);
                    for c in &groups[key] {
                        check_case(&program, c, &mut r)?;
                    }
                    Ok(r)
                })
                .collect::<Result<_, CompileError>>()?;
            Ok(merge_all(&name, 0, parts))
        }
    }
}

fn symbol_words(alphabet: &[Symbol], max_len: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![];
    let mut frontier = vec![vec![]];
    for _ in 0..max_len {
        frontier = frontier
            .into_iter()
            .flat_map(|w: Vec<Symbol>| {
                alphabet.iter().map(move |s| {
                    let mut w = w.clone();
                    w.push(s.clone());
                    w
                })
            })
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

/// Original against lowered acceptance on every string of length
/// `1..=max_len` over the program's Σ (or `sigma` when given) and the
/// extended values `values`.
pub fn check_lowering(
    program: &CraspProgram,
    values: &[u64],
    sigma: Option<&[String]>,
    max_len: usize,
) -> Result<LangCheckReport, CraspError> {
    let lowered = lower_match_to_finite(program, values, DEFAULT_EXPANSION_BUDGET)?;
    let mut alphabet: Vec<Symbol> = sigma.unwrap_or(program.sigma()).iter().cloned().map(Symbol::Sigma).collect();
    alphabet.extend(values.iter().map(|&v| Symbol::Ext(v)));
    let all = symbol_words(&alphabet, max_len);
    let parts: Vec<LangCheckReport> = all
        .par_chunks(4096)
        .map(|chunk| {
            let mut r = LangCheckReport::new("lowering", max_len);
            for w in chunk {
                let a = program.accepts_symbols(w)?;
                let b = lowered.accepts_symbols(w)?;
                r.record(a == b, || crate::dsl::serialize_word(w));
            }
            Ok(r)
        })
        .collect::<Result<_, CraspError>>()?;
    Ok(merge_all("lowering", max_len, parts))
}

/// The lowering suite: compiled fragments, hand-written programs and random
/// programs, `total` in all when there are fewer fixed ones.
pub fn lowering_suite(total: usize, seed: u64) -> Vec<(String, CraspProgram)> {
    let mut suite = compiled_fragments();
    suite.extend(hand_programs());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = 0;
    while suite.len() < total {
        suite.push((format!("random {k}"), random_program(&mut rng, &["p"], 6)));
        k += 1;
    }
    suite
}

fn shift_word(w: &[Symbol], delta: u64) -> Vec<Symbol> {
    w.iter()
        .map(|s| match s {
            Symbol::Ext(v) => Symbol::Ext(v + delta),
            s => s.clone(),
        })
        .collect()
}

/// Acceptance is unchanged when every extended value moves by `delta`,
/// over random programs with random inputs and compiled programs with
/// generated records.
pub fn check_translation(pairs: usize, deltas: &[u64], seed: u64) -> Result<LangCheckReport, CraspError> {
    let compiled: Vec<(Variant, Arc<CraspProgram>)> = [Variant::ColorsWf, Variant::GrippersWf, Variant::GrippersDf]
        .into_iter()
        .map(|v| (v, Arc::new(compile_variable(&domain_of(v), mode_of(v)).unwrap().program)))
        .collect();
    let parts: Vec<LangCheckReport> = (0..pairs as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let (program, word) = if k % 4 == 3 {
                let (v, p) = &compiled[(k / 4 % 3) as usize];
                let mut cfg = GenConfig::new(*v, seed);
                cfg.id_lengths = 11..=30;
                cfg.max_objects = Some(20);
                let recs = generate_pair(&cfg, Split::Train, k).expect("generation");
                let r = &recs[(k / 12 % 2) as usize];
                let (inst, plan) = r.instance_plan().expect("record");
                let word = encode(&inst, &plan, &record_layout(&r.objects)).expect("encode");
                ((**p).clone(), word)
            } else {
                let lines = rng.random_range(3..10);
                let program = random_program(&mut rng, &["a", "b"], lines);
                let n = rng.random_range(1..14);
                let word = (0..n)
                    .map(|_| match rng.random_range(0..4) {
                        0 => Symbol::sigma(if rng.random_bool(0.5) { "a" } else { "b" }),
                        _ => Symbol::Ext(rng.random_range(0..6)),
                    })
                    .collect();
                (program, word)
            };
            let mut r = LangCheckReport::new("translation", word.len());
            let base = program.accepts_symbols(&word)?;
            for &d in deltas {
                let shifted = program.accepts_symbols(&shift_word(&word, d))?;
                r.record(base == shifted, || format!("pair {k}, delta {d}: {}", crate::dsl::serialize_word(&word)));
            }
            Ok(r)
        })
        .collect::<Result<_, CraspError>>()?;
    Ok(merge_all("translation", 0, parts))
}
