use rand::seq::IndexedRandom;
use rand::Rng;

use crate::compile::{compile_variable, Mode};
use crate::crasp::{Conjunct, CraspProgram, LocalRel, MatchSpec, Op, ProgramBuilder, Sort};
use crate::domains::{colors, heavy_grippers, ColorsVariant, GrippersVariant};

/// A random well-sorted program over `sigma` whose output depends on at
/// least one match line.
pub fn random_program(rng: &mut impl Rng, sigma: &[&str], lines: usize) -> CraspProgram {
    let sigma: Vec<String> = sigma.iter().map(|s| s.to_string()).collect();
    let mut ops: Vec<Op> = (0..sigma.len() as u32).map(Op::Initial).collect();
    ops.push(Op::True);
    ops.push(Op::One);
    let of_sort = |ops: &[Op], sort: Sort| -> Vec<usize> { (0..ops.len()).filter(|&i| ops[i].sort() == sort).collect() };
    let random_match = |rng: &mut dyn rand::RngCore, bools: &[usize]| -> Op {
        let k = rng.random_range(1..=2);
        Op::Match(MatchSpec {
            conjuncts: (0..k)
                .map(|_| Conjunct::new(rng.random_range(0..3), rng.random_range(0..3), rng.random_range(-2..=2)))
                .collect(),
            filter: if rng.random_bool(0.4) { bools.choose(rng).copied() } else { None },
            strict: rng.random_bool(0.5),
        })
    };
    let bools = of_sort(&ops, Sort::Bool);
    ops.push(random_match(rng, &bools));
    for _ in 0..lines {
        let bools = of_sort(&ops, Sort::Bool);
        let counts = of_sort(&ops, Sort::Count);
        let b = |rng: &mut dyn rand::RngCore| *bools.choose(rng).unwrap();
        let c = |rng: &mut dyn rand::RngCore| {
            if rng.random_bool(0.5) {
                *counts.last().unwrap()
            } else {
                *counts.choose(rng).unwrap()
            }
        };
        let op = match rng.random_range(0..9) {
            0 => Op::Not(b(rng)),
            1 => Op::And(b(rng), b(rng)),
            2 | 3 => Op::Leq(c(rng), c(rng)),
            4 => Op::Count {
                filter: b(rng),
                rel: if rng.random_bool(0.5) { LocalRel::Top } else { LocalRel::Offset(rng.random_range(1..3)) },
            },
            5 => random_match(rng, &bools),
            6 => Op::Cond(b(rng), c(rng), c(rng)),
            7 => Op::Add(c(rng), c(rng)),
            _ => Op::Sub(c(rng), c(rng)),
        };
        ops.push(op);
    }
    let last_count = of_sort(&ops, Sort::Count).into_iter().max().unwrap();
    let one = sigma.len() + 1;
    ops.push(Op::Leq(one, last_count));
    CraspProgram::new(sigma, ops, None, None).expect("generated program is well-sorted")
}

/// One-symbol programs that reproduce every distinct match shape the
/// variable-universe compiler emits: the conjunct list, strictness and
/// whether a filter is present.
pub fn compiled_fragments() -> Vec<(String, CraspProgram)> {
    let domains = [
        (colors(ColorsVariant::WellFormed), Mode::WellFormed),
        (heavy_grippers(GrippersVariant::WellFormed), Mode::WellFormed),
        (heavy_grippers(GrippersVariant::DeleteFree), Mode::DeleteFree),
    ];
    let mut shapes: Vec<(Vec<Conjunct>, bool, bool)> = Vec::new();
    let mut out = Vec::new();
    for (d, mode) in domains {
        let c = compile_variable(&d, mode).expect("builtin domains compile");
        for (op, label) in c.program.ops().iter().zip(&c.report.provenance) {
            let Op::Match(m) = op else { continue };
            let shape = (m.conjuncts.clone(), m.strict, m.filter.is_some());
            if shapes.contains(&shape) {
                continue;
            }
            shapes.push(shape.clone());
            let mut b = ProgramBuilder::with_sigma(&["p"]);
            let f = b.initial("p");
            let m = b.match_count(shape.0, shape.2.then_some(f), shape.1);
            let one = b.one();
            let hit = b.leq(one, m);
            let any = b.count_top(hit);
            let twice = b.ge_const(any, 2);
            let out_line = b.and(hit, twice);
            out.push((format!("{} / {}", d.name(), label), b.finish(out_line).0));
        }
    }
    out
}

/// Small programs exercising matches, filters, offsets and negative shifts,
/// plus one match-free program.
pub fn hand_programs() -> Vec<(String, CraspProgram)> {
    let mut out = Vec::new();
    {
        let mut b = ProgramBuilder::with_sigma(&["p"]);
        let dup = b.match_count(vec![Conjunct::new(0, 0, 0)], None, true);
        let one = b.one();
        let seen = b.leq(one, dup);
        let any = b.count_top(seen);
        let zero = b.zero();
        let unique = b.leq(any, zero);
        out.push(("unique copy".to_string(), b.finish(unique).0));
    }
    {
        let mut b = ProgramBuilder::with_sigma(&["p"]);
        let up = b.match_count(vec![Conjunct::new(0, 0, 1)], None, false);
        let one = b.one();
        let out_line = b.leq(one, up);
        out.push(("successor seen".to_string(), b.finish(out_line).0));
    }
    {
        let mut b = ProgramBuilder::with_sigma(&["p"]);
        let down = b.match_count(vec![Conjunct::new(1, 0, -1), Conjunct::new(0, 1, 0)], None, false);
        let q = b.initial("p");
        let qs = b.count_top(q);
        let out_line = b.leq(qs, down);
        out.push(("pair with shift".to_string(), b.finish(out_line).0));
    }
    {
        let mut b = ProgramBuilder::with_sigma(&["p", "q"]);
        let p = b.initial("p");
        let after_p = b.lookback(p, 1);
        let m = b.match_count(vec![Conjunct::new(0, 0, 0)], Some(after_p), false);
        let q = b.initial("q");
        let qs = b.count_top(q);
        let out_line = b.leq(qs, m);
        out.push(("filtered by lookback".to_string(), b.finish(out_line).0));
    }
    {
        let mut b = ProgramBuilder::with_sigma(&["p"]);
        let p = b.initial("p");
        let c = b.count_offset(p, 2);
        let all = b.count_top(p);
        let diff = b.sub(all, c);
        let out_line = b.eq_const(diff, 1);
        out.push(("match free".to_string(), b.finish(out_line).0));
    }
    out
}
