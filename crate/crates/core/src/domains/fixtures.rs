use std::sync::Arc;

use super::{
    atom_from_str, colors, heavy_grippers, plan_from_strs, ColorsVariant, GrippersVariant, Variant,
};
use crate::strips::{GroundLiteral, Instance, Plan, State};

fn instance(domain: Arc<crate::strips::Domain>, objects: &[&str], init: &[&str], goal: &[&str]) -> Instance {
    let objects: Vec<String> = objects.iter().map(|s| s.to_string()).collect();
    let skeleton = Instance::new(domain.clone(), objects.clone(), State::new(), vec![])
        .expect("fixture objects");
    let atom = |s: &str| atom_from_str(&skeleton, s).unwrap_or_else(|| panic!("bad atom {s}"));
    let init: State = init.iter().map(|s| atom(s)).collect();
    let goal: Vec<GroundLiteral> = goal
        .iter()
        .map(|s| match s.strip_prefix('!') {
            Some(rest) => GroundLiteral::neg(atom(rest)),
            None => GroundLiteral::pos(atom(s)),
        })
        .collect();
    Instance::new(domain, objects, init, goal).expect("fixture instance")
}

fn plan(inst: &Instance, steps: &[&str]) -> Plan {
    plan_from_strs(inst, steps).expect("fixture plan")
}

/// Two balls swapped between two rooms by a single-gripper robot that starts
/// uncharged next to the heavy ball (conditional-effects Grippers).
pub fn fig3_instance() -> Instance {
    instance(
        Arc::new(heavy_grippers(GrippersVariant::Conditional)),
        &["B1", "B2", "RoomA", "RoomB", "G1"],
        &[
            "room RoomA",
            "room RoomB",
            "ball B1",
            "ball B2",
            "gripper G1",
            "free G1",
            "heavy B1",
            "at-robby RoomA",
            "at B1 RoomA",
            "at B2 RoomB",
        ],
        &["at B1 RoomB", "at B2 RoomA"],
    )
}

pub fn fig3_plan(inst: &Instance) -> Plan {
    plan(
        inst,
        &[
            "move RoomA RoomB",
            "pick B2 RoomB G1",
            "move RoomB RoomA",
            "drop B2 RoomA G1",
            "move RoomA RoomB",
            "move RoomB RoomA",
            "pick B1 RoomA G1",
            "move RoomA RoomB",
            "drop B1 RoomB G1",
        ],
    )
}

pub fn fig9_instance(variant: GrippersVariant) -> Instance {
    instance(
        Arc::new(heavy_grippers(variant)),
        &[
            "object_237", "object_223", "object_100", "object_154", "object_280", "object_113",
            "object_94", "object_7", "object_76",
        ],
        &[
            "at-robby object_280",
            "gripper object_237",
            "gripper object_223",
            "free object_237",
            "free object_223",
            "room object_100",
            "room object_154",
            "room object_280",
            "room object_113",
            "ball object_94",
            "ball object_7",
            "ball object_76",
            "heavy object_94",
            "at object_94 object_100",
            "at object_7 object_154",
            "at object_76 object_280",
        ],
        &[
            "at object_94 object_280",
            "at object_7 object_154",
            "at object_76 object_154",
        ],
    )
}

/// `(π, π1′, π2′)`: valid, incomplete, and non-executable under the
/// well-formed variant.
pub fn fig9_plans(inst: &Instance) -> (Plan, Plan, Plan) {
    let prefix = [
        "pick object_76 object_280 object_223",
        "move object_280 object_100",
        "pick_heavy object_94 object_100 object_237",
        "move object_100 object_154",
        "drop object_76 object_154 object_223",
    ];
    let with = |tail: &[&str]| {
        let mut steps = prefix.to_vec();
        steps.extend_from_slice(tail);
        plan(inst, &steps)
    };
    (
        with(&[
            "move object_154 object_280",
            "drop object_94 object_280 object_237",
            "move object_280 object_113",
        ]),
        with(&[
            "move object_154 object_113",
            "drop object_94 object_113 object_237",
        ]),
        with(&[
            "move object_154 object_280",
            "drop object_94 object_280 object_237",
            "drop object_76 object_280 object_223",
        ]),
    )
}

fn colors_instance(variant: ColorsVariant) -> Instance {
    instance(
        Arc::new(colors(variant)),
        &["object_5", "object_6", "object_3", "object_8"],
        &["bag object_5", "bag object_6", "color object_3", "color object_8"],
        &["hasColor object_5 object_3", "hasColor object_6 object_8"],
    )
}

/// `(instance, π1, π1′)` for the well-formed Colors variant.
pub fn fig11_well_formed() -> (Instance, Plan, Plan) {
    let inst = colors_instance(ColorsVariant::WellFormed);
    let head = [
        "add object_3 object_5",
        "add object_8 object_5",
        "remove object_3 object_5",
        "add object_8 object_6",
    ];
    let with = |mid: &str| {
        let mut steps = head.to_vec();
        steps.push(mid);
        steps.push("remove object_8 object_5");
        plan(&inst, &steps)
    };
    let (p1, p1x) = (with("add object_3 object_5"), with("add object_3 object_6"));
    (inst, p1, p1x)
}

/// `(instance, π2, π2′)` for the STRIPS Colors variant. The first action is
/// `add(object_3, object_5)`: it is the only way the goal `hasColor(object_5,
/// object_3)` can hold at the end, and with it the pair shows the documented
/// behaviour (valid / incomplete, and invalid once read under the
/// well-formed variant because of the repeated add).
pub fn fig11_standard() -> (Instance, Plan, Plan) {
    let inst = colors_instance(ColorsVariant::Strips);
    let with = |fourth: &str| {
        plan(
            &inst,
            &[
                "add object_3 object_5",
                "add object_8 object_5",
                "add object_8 object_5",
                fourth,
                "remove object_8 object_5",
                "remove object_3 object_6",
            ],
        )
    };
    let (p2, p2x) = (with("add object_8 object_6"), with("remove object_8 object_5"));
    (inst, p2, p2x)
}

/// A reference record with its verdict under its own variant and under the
/// sibling variant.
#[derive(Clone, Debug)]
pub struct GoldenCase {
    pub name: &'static str,
    pub variant: Variant,
    pub instance: Instance,
    pub plan: Plan,
    pub expected: &'static str,
    pub expected_sibling: &'static str,
}

pub fn golden_cases() -> Vec<GoldenCase> {
    let g9 = fig9_instance(GrippersVariant::WellFormed);
    let (pi, pi1, pi2) = fig9_plans(&g9);
    let (c1, p1, p1x) = fig11_well_formed();
    let (c2, p2, p2x) = fig11_standard();
    let case = |name, variant, instance: &Instance, plan, expected, expected_sibling| GoldenCase {
        name,
        variant,
        instance: instance.clone(),
        plan,
        expected,
        expected_sibling,
    };
    vec![
        case("grippers-pi", Variant::GrippersWf, &g9, pi, "valid", "valid"),
        case("grippers-pi1", Variant::GrippersWf, &g9, pi1, "incomplete", "incomplete"),
        case("grippers-pi2", Variant::GrippersWf, &g9, pi2, "non_executable", "valid"),
        case("colors-pi1", Variant::ColorsWf, &c1, p1, "valid", "valid"),
        case("colors-pi1x", Variant::ColorsWf, &c1, p1x, "incomplete", "incomplete"),
        case("colors-pi2", Variant::ColorsStrips, &c2, p2, "valid", "non_executable"),
        case("colors-pi2x", Variant::ColorsStrips, &c2, p2x, "incomplete", "non_executable"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strips::{applicable, audit_well_formed_trace, ground_schema, holds, simulate, verdict, Verdict};

    #[test]
    fn fig3_plan_is_valid_and_only_moves_apply_initially() {
        let inst = fig3_instance();
        let goal_holds = holds(inst.init(), inst.goal());
        assert!(!goal_holds);
        let d = inst.domain();
        for sid in d.schema_ids() {
            for a in ground_schema(d, sid, inst.objects().len()) {
                if applicable(&inst, inst.init(), &a) {
                    assert_eq!(d.schema(a.schema).name, "move");
                }
            }
        }
        let pick = d.schema_id("pick").unwrap();
        assert_eq!(ground_schema(d, pick, 5).len(), 125);
        let sim = simulate(&inst, &fig3_plan(&inst)).unwrap();
        assert_eq!(sim.verdict, Verdict::Valid);
        assert_eq!(sim.trace.len(), 10);
    }

    #[test]
    fn fig9_counts_and_verdicts() {
        let inst = fig9_instance(GrippersVariant::WellFormed);
        assert_eq!(inst.objects().len(), 9);
        assert_eq!(inst.init().len(), 16);
        assert_eq!(inst.goal().len(), 3);
        let (pi, pi1, pi2) = fig9_plans(&inst);
        assert_eq!(verdict(&inst, &pi).unwrap(), Verdict::Valid);
        match verdict(&inst, &pi1).unwrap() {
            Verdict::Incomplete { unsatisfied } => assert_eq!(unsatisfied.len(), 1),
            v => panic!("{v:?}"),
        }
        match verdict(&inst, &pi2).unwrap() {
            Verdict::NonExecutable { step, violated } => {
                assert_eq!(step, 8);
                assert_eq!(inst.fmt_literal(&violated), "(carry object_76 object_223)");
            }
            v => panic!("{v:?}"),
        }
        assert!(audit_well_formed_trace(&inst, &pi).unwrap().is_empty());
    }

    #[test]
    fn golden_verdicts_under_both_variants() {
        for c in golden_cases() {
            assert_eq!(verdict(&c.instance, &c.plan).unwrap().status(), c.expected, "{}", c.name);
            let sib = c.instance.with_domain(c.variant.sibling().domain()).unwrap();
            assert_eq!(verdict(&sib, &c.plan).unwrap().status(), c.expected_sibling, "{}", c.name);
        }
    }

    #[test]
    fn printed_standard_plan_misses_the_goal() {
        let (inst, _, _) = fig11_standard();
        let printed = plan(
            &inst,
            &[
                "remove object_3 object_5",
                "add object_8 object_5",
                "add object_8 object_5",
                "add object_8 object_6",
                "remove object_8 object_5",
                "remove object_3 object_6",
            ],
        );
        match verdict(&inst, &printed).unwrap() {
            Verdict::Incomplete { unsatisfied } => {
                assert_eq!(inst.fmt_literal(&unsatisfied[0]), "(hasColor object_5 object_3)")
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn fig11_audits() {
        let (inst, p1, _) = fig11_well_formed();
        assert!(audit_well_formed_trace(&inst, &p1).unwrap().is_empty());
        assert_eq!(p1.len(), 6);
        let (inst2, p2, _) = fig11_standard();
        assert!(!audit_well_formed_trace(&inst2, &p2).unwrap().is_empty());
        assert!(audit_well_formed_trace(&inst2, &Plan::default()).unwrap().is_empty());
    }
}
