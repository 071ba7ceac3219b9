use std::collections::BTreeSet;
use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{domain_of, exactly_one_unmet, exhausted, sample_names, GenConfig, GenError, GRIPPERS_MAX_SHRINK};
use crate::domains::Variant;
use crate::strips::{
    applicable, simulate, succ, verdict, Atom, Domain, GroundAction, GroundLiteral, Instance, ObjId, Plan, PredId,
    SchemaId, State, Verdict,
};

const WALK_ATTEMPTS: usize = 20;
const CORRUPT_ATTEMPTS: usize = 50;
const GRIPPERS: usize = 2;

struct Ids {
    room: PredId,
    ball: PredId,
    gripper: PredId,
    free: PredId,
    heavy: PredId,
    charged: PredId,
    at_robby: PredId,
    at: PredId,
    carry: PredId,
    mv: SchemaId,
    pick: SchemaId,
    pick_heavy: SchemaId,
    drop: SchemaId,
}

impl Ids {
    fn of(d: &Domain) -> Self {
        let p = |s| d.predicate_id(s).expect("grippers predicate");
        let a = |s| d.schema_id(s).expect("grippers schema");
        Ids {
            room: p("room"),
            ball: p("ball"),
            gripper: p("gripper"),
            free: p("free"),
            heavy: p("heavy"),
            charged: p("charged"),
            at_robby: p("at-robby"),
            at: p("at"),
            carry: p("carry"),
            mv: a("move"),
            pick: a("pick"),
            pick_heavy: a("pick_heavy"),
            drop: a("drop"),
        }
    }
}

/// `[⌈0.6 N⌉, ⌊0.85 N⌋]`.
pub(super) fn ball_range(n: usize) -> (usize, usize) {
    let lo = (6 * n).div_ceil(10).max(1);
    (lo, (85 * n / 100).max(lo))
}

/// Samples `(balls, heavy, rooms)` for a plan of length `n`, keeping the
/// total object count (with two grippers) within `max_objects`.
pub fn grippers_counts(n: usize, max_objects: Option<usize>, rng: &mut impl Rng) -> (usize, usize, usize) {
    let rooms_lo = |b: usize| (2 * b).div_ceil(10).max(2);
    let (mut lo, mut hi) = ball_range(n);
    if let Some(cap) = max_objects {
        let budget = cap.saturating_sub(GRIPPERS);
        while hi > 1 && hi + rooms_lo(hi) > budget {
            hi -= 1;
        }
        lo = lo.min(hi);
    }
    let balls = rng.random_range(lo..=hi);
    let heavy = rng.random_range((45 * balls).div_ceil(100)..=(85 * balls / 100).max((45 * balls).div_ceil(100)));
    let mut rooms_hi = (balls / 2).max(rooms_lo(balls));
    if let Some(cap) = max_objects {
        rooms_hi = rooms_hi.min(cap.saturating_sub(GRIPPERS + balls)).max(2);
    }
    let rooms = rng.random_range(rooms_lo(balls).min(rooms_hi)..=rooms_hi);
    (balls, heavy, rooms)
}

struct World {
    ids: Ids,
    rooms: Vec<ObjId>,
    balls: Vec<ObjId>,
    grippers: Vec<ObjId>,
    objects: usize,
}

impl World {
    fn of(inst: &Instance) -> Self {
        let ids = Ids::of(inst.domain());
        let typed = |p: PredId| -> Vec<ObjId> {
            inst.init().iter().filter(|a| a.pred == p).map(|a| a.args[0]).collect()
        };
        World {
            rooms: typed(ids.room),
            balls: typed(ids.ball),
            grippers: typed(ids.gripper),
            objects: inst.objects().len(),
            ids,
        }
    }

    fn robot_rooms(&self, s: &State) -> Vec<ObjId> {
        self.rooms
            .iter()
            .copied()
            .filter(|&r| s.contains(&Atom::new(self.ids.at_robby, [r])))
            .collect()
    }

    /// Moves, picks and drops that could apply around the robot, one list
    /// per schema; callers filter with the real precondition check.
    fn candidates(&self, s: &State) -> Vec<Vec<GroundAction>> {
        let ids = &self.ids;
        let here = self.robot_rooms(s);
        let mut moves = Vec::new();
        let (mut picks, mut heavy_picks, mut drops) = (Vec::new(), Vec::new(), Vec::new());
        for &r in &here {
            for &r2 in &self.rooms {
                if r2 != r {
                    moves.push(GroundAction::new(ids.mv, [r, r2]));
                }
            }
        }
        let mut is_here = vec![false; self.objects];
        for &r in &here {
            is_here[r as usize] = true;
        }
        for a in s.iter() {
            if a.pred == ids.at && is_here[a.args[1] as usize] {
                for &g in &self.grippers {
                    picks.push(GroundAction::new(ids.pick, [a.args[0], a.args[1], g]));
                    heavy_picks.push(GroundAction::new(ids.pick_heavy, [a.args[0], a.args[1], g]));
                }
            } else if a.pred == ids.carry {
                for &r in &here {
                    drops.push(GroundAction::new(ids.drop, [a.args[0], r, a.args[1]]));
                }
            }
        }
        vec![moves, picks, heavy_picks, drops]
    }

    fn carried(&self, s: &State) -> usize {
        s.iter().filter(|a| a.pred == self.ids.carry).count()
    }

    /// Carried count and charge after `a` under the well-formed effects.
    fn after(&self, s: &State, carried: usize, a: &GroundAction) -> (usize, bool) {
        let ids = &self.ids;
        if a.schema == ids.mv {
            return (carried, true);
        }
        let holds = s.contains(&Atom::new(ids.carry, [a.args[0], a.args[2]])) as usize;
        if a.schema == ids.drop {
            (carried - holds, false)
        } else {
            let charged = a.schema == ids.pick && s.contains(&Atom::new(ids.charged, []));
            (carried + 1 - holds, charged)
        }
    }
}

/// `table[left][carried][charged]`: whether a well-formed walk can end with
/// empty grippers after exactly `left` more steps, assuming any pick is
/// available wherever the robot is. Over-approximates real reachability,
/// so pruning with it never removes a completable prefix.
fn endgame_table(n: usize) -> Vec<[[bool; 2]; GRIPPERS + 1]> {
    let mut table = vec![[[false; 2]; GRIPPERS + 1]; n + 1];
    table[0][0] = [true, true];
    for left in 1..=n {
        for c in 0..=GRIPPERS {
            for ch in [false, true] {
                let prev = &table[left - 1];
                let ok = if ch {
                    (c < GRIPPERS && (prev[c + 1][1] || prev[c + 1][0])) || (c > 0 && prev[c - 1][0])
                } else {
                    prev[c][1] || (c < GRIPPERS && prev[c + 1][0])
                };
                table[left][c][ch as usize] = ok;
            }
        }
    }
    table
}

/// Draws a schema uniformly among those with an applicable action left,
/// then one of its applicable actions uniformly. Preconditions are checked
/// only on drawn actions.
struct Pool {
    lists: Vec<Vec<GroundAction>>,
}

impl Pool {
    fn new(mut lists: Vec<Vec<GroundAction>>) -> Self {
        lists.retain(|l| !l.is_empty());
        Pool { lists }
    }

    fn draw(&mut self, inst: &Instance, state: &State, rng: &mut ChaCha8Rng) -> Option<GroundAction> {
        while !self.lists.is_empty() {
            let k = rng.random_range(0..self.lists.len());
            let list = &mut self.lists[k];
            while !list.is_empty() {
                let a = list.swap_remove(rng.random_range(0..list.len()));
                if applicable(inst, state, &a) {
                    if list.is_empty() {
                        self.lists.swap_remove(k);
                    }
                    return Some(a);
                }
            }
            self.lists.swap_remove(k);
        }
        None
    }
}

/// Orders actions by drawing a schema uniformly, then an action of it.
fn schema_first(mut actions: Vec<GroundAction>, rng: &mut ChaCha8Rng) -> Vec<GroundAction> {
    actions.shuffle(rng);
    let mut out = Vec::with_capacity(actions.len());
    while !actions.is_empty() {
        let schemas: BTreeSet<SchemaId> = actions.iter().map(|a| a.schema).collect();
        let pick = *schemas.iter().nth(rng.random_range(0..schemas.len())).unwrap();
        let k = actions.iter().position(|a| a.schema == pick).unwrap();
        out.push(actions.swap_remove(k));
    }
    out
}

struct Walker<'a> {
    well_formed: bool,
    inst: &'a Instance,
    shadow_inst: &'a Instance,
    world: &'a World,
    df_mix: f64,
    budget: usize,
    endgame: Vec<[[bool; 2]; GRIPPERS + 1]>,
}

impl Walker<'_> {
    fn can_finish(&self, carried: usize, charged: bool, left: usize) -> bool {
        if self.well_formed {
            carried <= GRIPPERS && self.endgame[left][carried][charged as usize]
        } else {
            carried <= left
        }
    }

    /// Depth-first random walk: tries actions in random order and backs up
    /// when the remaining steps cannot put every carried ball down.
    fn extend(&mut self, state: &State, shadow: &State, left: usize, plan: &mut Vec<GroundAction>, rng: &mut ChaCha8Rng) -> bool {
        if left == 0 {
            return self.world.carried(shadow) == 0;
        }
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let carried = self.world.carried(shadow);
        let mut pending = None;
        let mut narrow = None;
        if !self.well_formed && rng.random_bool(self.df_mix) {
            let mut pool = Pool::new(self.world.candidates(shadow));
            if let Some(a) = pool.draw(self.shadow_inst, shadow, rng) {
                pending = Some(a);
                narrow = Some(pool);
            }
        }
        let (mut pool, check_in) = match narrow {
            Some(pool) => (pool, (self.shadow_inst, shadow)),
            None => (Pool::new(self.world.candidates(state)), (self.inst, state)),
        };
        while let Some(a) = pending.take().or_else(|| pool.draw(check_in.0, check_in.1, rng)) {
            let (c, ch) = self.world.after(shadow, carried, &a);
            if !self.can_finish(c, ch, left - 1) {
                continue;
            }
            let next_shadow = succ(self.shadow_inst, shadow, &a).expect("generated action");
            let next = if self.well_formed {
                next_shadow.clone()
            } else {
                succ(self.inst, state, &a).expect("generated action")
            };
            plan.push(a);
            if self.extend(&next, &next_shadow, left - 1, plan, rng) {
                return true;
            }
            plan.pop();
            if self.budget == 0 {
                return false;
            }
        }
        false
    }

}

fn sample_instance(cfg: &GenConfig, domain: Arc<Domain>, n: usize, rng: &mut ChaCha8Rng) -> Instance {
    let ids = Ids::of(&domain);
    let (balls, heavy, rooms) = grippers_counts(n, cfg.max_objects, rng);
    let objects = sample_names(cfg.pool_size(), GRIPPERS + rooms + balls, rng);
    let grippers: Vec<ObjId> = (0..GRIPPERS as ObjId).collect();
    let room_ids: Vec<ObjId> = (GRIPPERS..GRIPPERS + rooms).map(|k| k as ObjId).collect();
    let ball_ids: Vec<ObjId> = (GRIPPERS + rooms..objects.len()).map(|k| k as ObjId).collect();
    let mut init = State::new();
    for &g in &grippers {
        init.insert(Atom::new(ids.gripper, [g]));
        init.insert(Atom::new(ids.free, [g]));
    }
    for &r in &room_ids {
        init.insert(Atom::new(ids.room, [r]));
    }
    let mut heavy_balls = ball_ids.clone();
    heavy_balls.shuffle(rng);
    heavy_balls.truncate(heavy);
    for &b in &ball_ids {
        init.insert(Atom::new(ids.ball, [b]));
        init.insert(Atom::new(ids.at, [b, room_ids[rng.random_range(0..rooms)]]));
    }
    for b in heavy_balls {
        init.insert(Atom::new(ids.heavy, [b]));
    }
    init.insert(Atom::new(ids.at_robby, [room_ids[rng.random_range(0..rooms)]]));
    Instance::new(domain, objects, init, vec![]).expect("sampled grippers instance")
}

/// Samples an instance and a valid plan of exactly `n` actions after which
/// no ball is carried; the goal lists every ball location.
pub fn gen_grippers(cfg: &GenConfig, n: usize, rng: &mut ChaCha8Rng) -> Result<(Instance, Plan), GenError> {
    let well_formed = cfg.variant == Variant::GrippersWf;
    let domain = domain_of(cfg.variant);
    let wf_domain = domain_of(Variant::GrippersWf);
    for _ in 0..WALK_ATTEMPTS {
        let inst = sample_instance(cfg, domain.clone(), n, rng);
        let shadow_inst = inst.with_domain(wf_domain.clone()).expect("same signature");
        let world = World::of(&inst);
        let mut walker = Walker {
            well_formed,
            inst: &inst,
            shadow_inst: &shadow_inst,
            world: &world,
            df_mix: cfg.df_mix,
            budget: 8 * n + 200,
            endgame: endgame_table(n),
        };
        let mut steps = Vec::with_capacity(n);
        if !walker.extend(inst.init(), inst.init(), n, &mut steps, rng) {
            continue;
        }
        let plan = Plan::new(steps);
        let mut shadow = inst.init().clone();
        for a in &plan.actions {
            shadow = succ(&shadow_inst, &shadow, a)?;
        }
        let goal: Vec<GroundLiteral> = shadow
            .iter()
            .filter(|a| a.pred == world.ids.at)
            .map(|a| GroundLiteral::pos(a.clone()))
            .collect();
        let inst = inst.with_init_goal(inst.init().clone(), goal).expect("goal over instance objects");
        debug_assert_eq!(verdict(&inst, &plan).ok(), Some(Verdict::Valid));
        return Ok((inst, plan));
    }
    Err(exhausted("grippers walk", WALK_ATTEMPTS))
}

fn replace_room(a: &GroundAction, ids: &Ids, from: ObjId, to: ObjId) -> GroundAction {
    let mut args = a.args.clone();
    let room_slots: &[usize] = if a.schema == ids.mv { &[0, 1] } else { &[1] };
    for &k in room_slots {
        if args[k] == from {
            args[k] = to;
        }
    }
    GroundAction { schema: a.schema, args }
}

/// Redirects the last drop of a random ball to another room, reroutes the
/// move that led there and repairs the remaining moves. Accepted only when
/// exactly that ball's goal literal fails.
pub fn corrupt_incomplete_grippers(
    inst: &Instance,
    plan: &Plan,
    lengths: &RangeInclusive<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<Plan, GenError> {
    let world = World::of(inst);
    let ids = &world.ids;
    let dropped: Vec<ObjId> = plan
        .actions
        .iter()
        .filter(|a| a.schema == ids.drop)
        .map(|a| a.args[0])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if dropped.is_empty() || world.rooms.len() < 3 {
        return Err(exhausted("grippers incomplete", 0));
    }
    let min_len = plan.len().saturating_sub(GRIPPERS_MAX_SHRINK).max(*lengths.start());
    for _ in 0..CORRUPT_ATTEMPTS {
        let b = dropped[rng.random_range(0..dropped.len())];
        let t = plan
            .actions
            .iter()
            .rposition(|a| a.schema == ids.drop && a.args[0] == b)
            .unwrap();
        let goal_room = plan.actions[t].args[1];
        let Some(m) = plan.actions[..t]
            .iter()
            .rposition(|a| a.schema == ids.mv && a.args[1] == goal_room)
        else {
            continue;
        };
        let source = plan.actions[m].args[0];
        let others: Vec<ObjId> = world
            .rooms
            .iter()
            .copied()
            .filter(|&r| r != goal_room && r != source)
            .collect();
        let target = others[rng.random_range(0..others.len())];
        let mut out: Vec<GroundAction> = plan.actions[..m].to_vec();
        out.extend(plan.actions[m..=t].iter().map(|a| replace_room(a, ids, goal_room, target)));
        let sim = simulate(inst, &Plan::new(out.clone()))?;
        if !sim.verdict.is_valid() && !matches!(sim.verdict, Verdict::Incomplete { .. }) {
            continue;
        }
        let mut state = sim.trace.last().unwrap().clone();
        for a in &plan.actions[t + 1..] {
            let fixed = if applicable(inst, &state, a) {
                Some(a.clone())
            } else if a.schema == ids.mv {
                world
                    .robot_rooms(&state)
                    .into_iter()
                    .map(|z| GroundAction::new(ids.mv, [z, a.args[1]]))
                    .find(|m| applicable(inst, &state, m))
            } else {
                None
            };
            if let Some(f) = fixed {
                state = succ(inst, &state, &f)?;
                out.push(f);
            }
        }
        if out.len() < min_len || out.len() > plan.len() {
            continue;
        }
        let out = Plan::new(out);
        let wanted = GroundLiteral::pos(Atom::new(ids.at, [b, goal_room]));
        if exactly_one_unmet(inst, &out)?.as_ref() == Some(&wanted) {
            return Ok(out);
        }
    }
    Err(exhausted("grippers incomplete", CORRUPT_ATTEMPTS))
}

/// Replaces the last action with a move or drop whose preconditions fail
/// at that step.
pub fn corrupt_nonexecutable_grippers(inst: &Instance, plan: &Plan, rng: &mut ChaCha8Rng) -> Result<Plan, GenError> {
    let world = World::of(inst);
    let ids = &world.ids;
    let Some((_, prefix)) = plan.actions.split_last() else {
        return Err(exhausted("grippers non-executable", 0));
    };
    let prefix = Plan::new(prefix.to_vec());
    let sim = simulate(inst, &prefix)?;
    let state = sim.trace.last().unwrap();
    let mut candidates = Vec::new();
    for &r1 in &world.rooms {
        for &r2 in &world.rooms {
            if r1 != r2 {
                candidates.push(GroundAction::new(ids.mv, [r1, r2]));
            }
        }
    }
    for &b in &world.balls {
        for &r in &world.rooms {
            for &g in &world.grippers {
                candidates.push(GroundAction::new(ids.drop, [b, r, g]));
            }
        }
    }
    candidates.retain(|a| !applicable(inst, state, a));
    if candidates.is_empty() {
        return Err(exhausted("grippers non-executable", 1));
    }
    let mut out = prefix.actions;
    out.push(schema_first(candidates, rng).swap_remove(0));
    Ok(Plan::new(out))
}
