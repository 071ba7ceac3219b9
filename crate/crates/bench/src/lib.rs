//! Shared fixtures for the criterion benches.

use planlab::compile::EncodingLayout;
use planlab::datagen::{generate_pair, record_layout, GenConfig, Label, Split};
use planlab::domains::Variant;
use planlab::{Instance, Plan};

pub const SEED: u64 = 11;

/// A valid generated plan of exactly `len` actions.
pub fn valid_case(variant: Variant, len: usize) -> (Instance, Plan, EncodingLayout) {
    let mut cfg = GenConfig::new(variant, SEED);
    cfg.id_lengths = len..=len;
    let recs = generate_pair(&cfg, Split::Train, 0).expect("generation succeeds");
    let rec = recs.into_iter().find(|r| r.label == Label::Correct).expect("pair has a valid plan");
    let (inst, plan) = rec.instance_plan().expect("record decodes");
    let layout = record_layout(inst.objects());
    (inst, plan, layout)
}
