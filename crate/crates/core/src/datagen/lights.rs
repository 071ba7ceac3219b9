use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{exhausted, GenError};
use crate::domains::{lights_out_conditional, lights_out_well_formed, Board, LightsOut, Variant};
use crate::strips::{applicable, simulate, Instance, Plan, Verdict};

/// The 5×5 board for either variant, built once.
pub fn lights_out(variant: Variant) -> &'static LightsOut {
    static CE: OnceLock<LightsOut> = OnceLock::new();
    static WF: OnceLock<LightsOut> = OnceLock::new();
    match variant {
        Variant::LightsOutCe => CE.get_or_init(|| lights_out_conditional(Board::new(5, 5))),
        Variant::LightsOutWf => WF.get_or_init(|| lights_out_well_formed(Board::new(5, 5))),
        v => panic!("{v} is not a Lights Out variant"),
    }
}

fn toggle(lo: &LightsOut, lit: &mut [bool], cell: usize) {
    for u in lo.board.neighborhood(cell) {
        lit[u] = !lit[u];
    }
}

/// Presses `n` random cells starting from all lights off; the result is the
/// initial state and the reversed press sequence is the plan.
pub fn gen_lights_out(variant: Variant, n: usize, rng: &mut ChaCha8Rng) -> Result<(Instance, Plan), GenError> {
    let lo = lights_out(variant);
    let cells = lo.board.cells();
    let presses: Vec<usize> = (0..n).map(|_| rng.random_range(0..cells)).collect();
    let mut lit = vec![false; cells];
    for &c in &presses {
        toggle(lo, &mut lit, c);
    }
    let inst = lo.instance(&lit);
    let mut actions = Vec::with_capacity(n);
    for &c in presses.iter().rev() {
        actions.push(lo.press(c, &lit));
        toggle(lo, &mut lit, c);
    }
    debug_assert!(lit.iter().all(|l| !l));
    Ok((inst, Plan::new(actions)))
}

/// Replaces the last press with an applicable press of a different cell.
pub fn corrupt_incomplete_lights_out(
    variant: Variant,
    inst: &Instance,
    plan: &Plan,
    rng: &mut ChaCha8Rng,
) -> Result<Plan, GenError> {
    let lo = lights_out(variant);
    let Some(last) = plan.actions.last() else {
        return Err(exhausted("lights out incomplete", 0));
    };
    let trace = simulate(inst, plan)?.trace;
    let before = &trace[plan.len() - 1];
    let lit = lo.lit_of(before);
    let (cell, _) = lo.cell_of(last.schema);
    let cells = lo.board.cells();
    let other = (cell + rng.random_range(1..cells)) % cells;
    let replacement = lo.press(other, &lit);
    debug_assert!(applicable(inst, before, &replacement));
    let mut out = plan.actions.clone();
    *out.last_mut().unwrap() = replacement;
    let out = Plan::new(out);
    match simulate(inst, &out)?.verdict {
        Verdict::Incomplete { .. } => Ok(out),
        _ => Err(exhausted("lights out incomplete", 1)),
    }
}
