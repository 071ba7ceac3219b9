use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{domain_of, exactly_one_unmet, exhausted, sample_names, GenConfig, GenError, COLORS_SUBSTITUTIONS};
use crate::domains::Variant;
use crate::strips::{applicable, simulate, succ, Atom, GroundAction, GroundLiteral, Instance, ObjId, Plan, State};

const WALK_ATTEMPTS: usize = 20;

/// `(bags, colors)` with about `n / 4` pairs, the two counts as close as
/// possible.
pub fn colors_shape(n: usize) -> (usize, usize) {
    let pairs = ((n + 2) / 4).max(1);
    let bags = (pairs as f64).sqrt().floor().max(1.0) as usize;
    let colors = ((pairs + bags / 2) / bags).max(1);
    (bags, colors)
}

fn typed_actions(inst: &Instance) -> Vec<GroundAction> {
    let d = inst.domain();
    let (add, remove) = (d.schema_id("add").unwrap(), d.schema_id("remove").unwrap());
    let (bag, color) = (d.predicate_id("bag").unwrap(), d.predicate_id("color").unwrap());
    let of = |p| -> Vec<ObjId> { inst.init().iter().filter(|a| a.pred == p).map(|a| a.args[0]).collect() };
    let (bags, colors) = (of(bag), of(color));
    let mut out = Vec::new();
    for s in [add, remove] {
        for &c in &colors {
            for &b in &bags {
                out.push(GroundAction::new(s, [c, b]));
            }
        }
    }
    out
}

fn pick(actions: &[GroundAction], inst: &Instance, state: &State, rng: &mut ChaCha8Rng) -> GroundAction {
    let pool: Vec<&GroundAction> = actions.iter().filter(|a| applicable(inst, state, a)).collect();
    pool[rng.random_range(0..pool.len())].clone()
}

/// All bags start empty; random applicable actions; the goal is every
/// `hasColor` fact of the final state.
pub fn gen_colors(cfg: &GenConfig, n: usize, rng: &mut ChaCha8Rng) -> Result<(Instance, Plan), GenError> {
    let domain: Arc<_> = domain_of(cfg.variant);
    debug_assert!(matches!(cfg.variant, Variant::ColorsWf | Variant::ColorsStrips));
    let (bags, colors) = colors_shape(n);
    let objects = sample_names(cfg.pool_size(), bags + colors, rng);
    let (bag, color, has) = (
        domain.predicate_id("bag").unwrap(),
        domain.predicate_id("color").unwrap(),
        domain.predicate_id("hasColor").unwrap(),
    );
    let mut init = State::new();
    for k in 0..bags {
        init.insert(Atom::new(bag, [k as ObjId]));
    }
    for k in bags..bags + colors {
        init.insert(Atom::new(color, [k as ObjId]));
    }
    let inst = Instance::new(domain, objects, init, vec![]).expect("sampled colors instance");
    let actions = typed_actions(&inst);
    for _ in 0..WALK_ATTEMPTS {
        let mut state = inst.init().clone();
        let mut plan = Vec::with_capacity(n);
        for _ in 0..n {
            let a = pick(&actions, &inst, &state, rng);
            state = succ(&inst, &state, &a)?;
            plan.push(a);
        }
        let goal: Vec<GroundLiteral> = state
            .iter()
            .filter(|a| a.pred == has)
            .map(|a| GroundLiteral::pos(a.clone()))
            .collect();
        if goal.is_empty() {
            continue;
        }
        let inst = inst.with_init_goal(inst.init().clone(), goal).expect("goal over instance objects");
        return Ok((inst, Plan::new(plan)));
    }
    Err(exhausted("colors goal", WALK_ATTEMPTS))
}

/// Substitutes one action with another action applicable at that step,
/// keeping the plan executable, so that exactly one goal literal fails.
pub fn corrupt_incomplete_colors(inst: &Instance, plan: &Plan, rng: &mut ChaCha8Rng) -> Result<Plan, GenError> {
    let actions = typed_actions(inst);
    let trace = simulate(inst, plan)?.trace;
    for _ in 0..COLORS_SUBSTITUTIONS {
        let k = rng.random_range(0..plan.len());
        let replacement = pick(&actions, inst, &trace[k], rng);
        if replacement == plan.actions[k] {
            continue;
        }
        let mut out = plan.actions.clone();
        out[k] = replacement;
        let out = Plan::new(out);
        if exactly_one_unmet(inst, &out)?.is_some() {
            return Ok(out);
        }
    }
    Err(exhausted("colors substitution", COLORS_SUBSTITUTIONS))
}
