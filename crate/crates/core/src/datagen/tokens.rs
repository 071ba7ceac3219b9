use std::collections::HashSet;

use super::lights::lights_out;
use super::Label;
use crate::compile::{encode, CompileError, EncodingLayout};
use crate::domains::Variant;
use crate::dsl::serialize_word;
use crate::strips::{Atom, GroundAction, Instance, Plan};

/// `object_N` names map to `N`; any other object list is numbered from 0.
pub fn record_layout(objects: &[String]) -> EncodingLayout {
    let numbered: Option<Vec<u64>> = objects
        .iter()
        .map(|o| o.strip_prefix("object_")?.parse().ok())
        .collect();
    match numbered {
        Some(values) if values.iter().collect::<HashSet<_>>().len() == values.len() => EncodingLayout::new(values),
        _ => EncodingLayout::sequential(objects.len(), 0),
    }
}

/// The `$ I @ π @ G @` word under [`record_layout`].
pub fn tokens_crasp(inst: &Instance, plan: &Plan) -> Result<String, CompileError> {
    let layout = record_layout(inst.objects());
    Ok(serialize_word(&encode(inst, plan, &layout)?))
}

fn push_atom(out: &mut Vec<String>, inst: &Instance, atom: &Atom) {
    out.push(format!("<{}>", inst.domain().predicate(atom.pred).name));
    for &o in &atom.args {
        out.push(format!("<{}>", inst.objects()[o as usize]));
    }
}

fn push_action(out: &mut Vec<String>, variant: Variant, inst: &Instance, action: &GroundAction) {
    if variant.is_lights_out() {
        let lo = lights_out(variant);
        let (cell, k) = lo.cell_of(action.schema);
        let (i, j) = lo.board.coords(cell);
        out.extend(["<press>".to_string(), format!("<{i}>"), format!("<{j}>")]);
        if variant == Variant::LightsOutWf {
            out.push(format!("<{k}>"));
        }
        return;
    }
    out.push(format!("<{}>", inst.domain().schema(action.schema).name));
    for &o in &action.args {
        out.push(format!("<{}>", inst.objects()[o as usize]));
    }
}

/// `<init> I <plan> π <goal> G <verdict> V`. Sections that never vary
/// within a variant are left empty: the Colors initial state and the Lights
/// Out goal. The Lights Out initial state lists the lit cells.
pub fn tokens_train(variant: Variant, inst: &Instance, plan: &Plan, label: Label) -> String {
    let mut out = vec!["<init>".to_string()];
    if variant.is_lights_out() {
        let lo = lights_out(variant);
        for (cell, on) in lo.lit_of(inst.init()).into_iter().enumerate() {
            if on {
                let (i, j) = lo.board.coords(cell);
                out.extend(["<on>".to_string(), format!("<{i}>"), format!("<{j}>")]);
            }
        }
    } else if !variant.is_colors() {
        for a in inst.init().iter() {
            push_atom(&mut out, inst, a);
        }
    }
    out.push("<plan>".into());
    for a in &plan.actions {
        push_action(&mut out, variant, inst, a);
    }
    out.push("<goal>".into());
    if !variant.is_lights_out() {
        for g in inst.goal() {
            if !g.positive {
                out.push("<not>".into());
            }
            push_atom(&mut out, inst, &g.atom);
        }
    }
    out.push("<verdict>".into());
    out.push(match label {
        Label::Correct => "correct".into(),
        Label::Incorrect => "incorrect".into(),
    });
    out.join(" ")
}
