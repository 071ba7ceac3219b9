//! Benchmark domains and reference instances.

mod fixtures;
mod gf2;
mod lights_out;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::strips::{
    Atom, Domain, DomainBuilder, GroundAction, GroundLiteral, Instance, Plan, State,
};

pub use fixtures::{
    fig11_standard, fig11_well_formed, fig3_instance, fig3_plan, fig9_instance, fig9_plans,
    golden_cases, GoldenCase,
};
pub use gf2::{effect_matrix, ghom, parity_verdict, presses_of_plan, F2Matrix, F2Vector};
pub use lights_out::{
    lights_out_conditional, lights_out_well_formed, Board, LightsOut, LightsOutKind,
};

/// The six dataset variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Variant {
    #[serde(rename = "grippers-wf")]
    GrippersWf,
    #[serde(rename = "grippers-df")]
    GrippersDf,
    #[serde(rename = "colors-wf")]
    ColorsWf,
    #[serde(rename = "colors-strips")]
    ColorsStrips,
    #[serde(rename = "lightsout-ce")]
    LightsOutCe,
    #[serde(rename = "lightsout-wf")]
    LightsOutWf,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::GrippersWf,
        Variant::GrippersDf,
        Variant::ColorsWf,
        Variant::ColorsStrips,
        Variant::LightsOutCe,
        Variant::LightsOutWf,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Variant::GrippersWf => "grippers-wf",
            Variant::GrippersDf => "grippers-df",
            Variant::ColorsWf => "colors-wf",
            Variant::ColorsStrips => "colors-strips",
            Variant::LightsOutCe => "lightsout-ce",
            Variant::LightsOutWf => "lightsout-wf",
        }
    }

    /// The domain on the canonical 5×5 board for Lights Out.
    pub fn domain(self) -> Arc<Domain> {
        match self {
            Variant::GrippersWf => Arc::new(heavy_grippers(GrippersVariant::WellFormed)),
            Variant::GrippersDf => Arc::new(heavy_grippers(GrippersVariant::DeleteFree)),
            Variant::ColorsWf => Arc::new(colors(ColorsVariant::WellFormed)),
            Variant::ColorsStrips => Arc::new(colors(ColorsVariant::Strips)),
            Variant::LightsOutCe => lights_out_conditional(Board::new(5, 5)).domain,
            Variant::LightsOutWf => lights_out_well_formed(Board::new(5, 5)).domain,
        }
    }

    /// The variant sharing objects and instances with this one.
    pub fn sibling(self) -> Variant {
        match self {
            Variant::GrippersWf => Variant::GrippersDf,
            Variant::GrippersDf => Variant::GrippersWf,
            Variant::ColorsWf => Variant::ColorsStrips,
            Variant::ColorsStrips => Variant::ColorsWf,
            Variant::LightsOutCe => Variant::LightsOutWf,
            Variant::LightsOutWf => Variant::LightsOutCe,
        }
    }

    pub fn is_grippers(self) -> bool {
        matches!(self, Variant::GrippersWf | Variant::GrippersDf)
    }

    pub fn is_colors(self) -> bool {
        matches!(self, Variant::ColorsWf | Variant::ColorsStrips)
    }

    pub fn is_lights_out(self) -> bool {
        matches!(self, Variant::LightsOutCe | Variant::LightsOutWf)
    }

    /// Whether some action can be inapplicable, so non-executable plans exist.
    pub fn has_preconditions(self) -> bool {
        !matches!(self, Variant::ColorsStrips | Variant::LightsOutCe)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.id() == s)
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrippersVariant {
    WellFormed,
    DeleteFree,
    /// The original formulation whose `pick` branches on `heavy`.
    Conditional,
}

/// Heavy Grippers: nine predicates and, apart from the conditional
/// formulation, the four schemas `move`, `pick`, `pick_heavy`, `drop`.
pub fn heavy_grippers(variant: GrippersVariant) -> Domain {
    let name = match variant {
        GrippersVariant::WellFormed => "heavy-grippers-wf",
        GrippersVariant::DeleteFree => "heavy-grippers-df",
        GrippersVariant::Conditional => "heavy-grippers-ce",
    };
    let mut b = DomainBuilder::new(name);
    b.predicate("room", 1)
        .predicate("ball", 1)
        .predicate("gripper", 1)
        .predicate("free", 1)
        .predicate("heavy", 1)
        .predicate("charged", 0)
        .predicate("at-robby", 1)
        .predicate("at", 2)
        .predicate("carry", 2);
    match variant {
        GrippersVariant::WellFormed => {
            b.schema("move", &["r1", "r2"])
                .pre(&["room r1", "room r2", "at-robby r1", "!at-robby r2", "!charged"])
                .effect(&["charged", "at-robby r2", "!at-robby r1"]);
            b.schema("pick", &["b", "r", "g"])
                .pre(&[
                    "ball b", "room r", "!heavy b", "gripper g", "at-robby r", "free g", "at b r",
                    "!carry b g",
                ])
                .effect(&["carry b g", "!free g", "!at b r"]);
            b.schema("pick_heavy", &["b", "r", "g"])
                .pre(&[
                    "ball b", "room r", "heavy b", "gripper g", "at-robby r", "free g", "charged",
                    "at b r", "!carry b g",
                ])
                .effect(&["carry b g", "!free g", "!at b r", "!charged"]);
            b.schema("drop", &["b", "r", "g"])
                .pre(&[
                    "ball b", "room r", "gripper g", "at-robby r", "carry b g", "charged",
                    "!at b r", "!free g",
                ])
                .effect(&["at b r", "free g", "!carry b g", "!charged"]);
        }
        GrippersVariant::DeleteFree => {
            b.schema("move", &["r1", "r2"])
                .pre(&["room r1", "room r2", "at-robby r1"])
                .effect(&["charged", "at-robby r2"]);
            b.schema("pick", &["b", "r", "g"])
                .pre(&["ball b", "room r", "gripper g", "at-robby r", "at b r", "free g", "!heavy b"])
                .effect(&["carry b g"]);
            b.schema("pick_heavy", &["b", "r", "g"])
                .pre(&[
                    "ball b", "room r", "gripper g", "at-robby r", "at b r", "free g", "charged",
                    "heavy b",
                ])
                .effect(&["carry b g"]);
            b.schema("drop", &["b", "r", "g"])
                .pre(&["ball b", "room r", "gripper g", "at-robby r", "carry b g"])
                .effect(&["at b r", "free g"]);
        }
        GrippersVariant::Conditional => {
            b.schema("move", &["r1", "r2"])
                .pre(&["room r1", "room r2", "at-robby r1"])
                .effect(&["charged", "at-robby r2", "!at-robby r1"]);
            b.schema("pick", &["b", "r", "g"])
                .pre(&["ball b", "room r", "gripper g", "at-robby r", "at b r", "free g", "charged"])
                .when(&["!heavy b"], &["carry b g", "!free g", "!at b r"])
                .when(&["heavy b"], &["carry b g", "!free g", "!at b r", "!charged"]);
            b.schema("drop", &["b", "r", "g"])
                .pre(&["ball b", "room r", "gripper g", "at-robby r", "carry b g"])
                .effect(&["at b r", "free g", "!carry b g", "!charged"]);
        }
    }
    b.build().expect("grippers domain is well-formed")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColorsVariant {
    WellFormed,
    Strips,
}

/// Colors: `bag/1`, `color/1`, `hasColor/2`; schemas `add(c, b)` and
/// `remove(c, b)`.
pub fn colors(variant: ColorsVariant) -> Domain {
    let wf = variant == ColorsVariant::WellFormed;
    let mut b = DomainBuilder::new(if wf { "colors-wf" } else { "colors-strips" });
    b.predicate("bag", 1)
        .predicate("color", 1)
        .predicate("hasColor", 2);
    let mut add_pre = vec!["bag b", "color c"];
    let mut remove_pre = vec!["bag b", "color c"];
    if wf {
        add_pre.push("!hasColor b c");
        remove_pre.push("hasColor b c");
    }
    b.schema("add", &["c", "b"])
        .pre(&add_pre)
        .effect(&["hasColor b c"]);
    b.schema("remove", &["c", "b"])
        .pre(&remove_pre)
        .effect(&["!hasColor b c"]);
    b.build().expect("colors domain is well-formed")
}

/// The single-object STRIPS instance whose valid plans spell `Σ* b e*` over
/// `a ↦ a_a(k)`, `b ↦ a_b(k)`, `e ↦ a_e(k)`.
pub fn flipflop_instance() -> Instance {
    let mut b = DomainBuilder::new("flipflop");
    b.predicate("active", 1);
    b.schema("a_a", &["x"]).effect(&["!active x"]);
    b.schema("a_b", &["x"]).effect(&["active x"]);
    b.schema("a_e", &["x"]).effect::<&str>(&[]);
    let domain = Arc::new(b.build().expect("flipflop domain"));
    let active = domain.predicate_id("active").unwrap();
    Instance::new(
        domain,
        vec!["k".into()],
        State::new(),
        vec![GroundLiteral::pos(Atom::new(active, [0]))],
    )
    .expect("flipflop instance")
}

/// Maps a word over `{a, b, e}` to a FlipFlop plan; other letters are
/// rejected.
pub fn flipflop_plan(instance: &Instance, word: &str) -> Option<Plan> {
    word.chars()
        .map(|ch| {
            let name = match ch {
                'a' => "a_a",
                'b' => "a_b",
                'e' => "a_e",
                _ => return None,
            };
            Some(GroundAction::new(instance.domain().schema_id(name)?, [0]))
        })
        .collect::<Option<Vec<_>>>()
        .map(Plan::new)
}

/// Builds a plan from `"schema arg …"` strings naming instance objects.
pub fn plan_from_strs(instance: &Instance, steps: &[&str]) -> Option<Plan> {
    steps
        .iter()
        .map(|s| {
            let mut words = s.split_whitespace();
            let schema = instance.domain().schema_id(words.next()?)?;
            let args = words
                .map(|w| instance.object_id(w))
                .collect::<Option<Vec<_>>>()?;
            Some(GroundAction::new(schema, args))
        })
        .collect::<Option<Vec<_>>>()
        .map(Plan::new)
}

/// Builds an atom from `"pred arg …"`.
pub fn atom_from_str(instance: &Instance, s: &str) -> Option<Atom> {
    let mut words = s.split_whitespace();
    let pred = instance.domain().predicate_id(words.next()?)?;
    let args = words
        .map(|w| instance.object_id(w))
        .collect::<Option<Vec<_>>>()?;
    Some(Atom::new(pred, args))
}
