//! Dataset generation: instance sampling, valid plans, corruptions,
//! tokenization and split export.

mod colors;
mod grippers;
mod lights;
mod tokens;

#[cfg(test)]
mod tests;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{atom_from_str, plan_from_strs, Variant};
use crate::strips::{verdict, GroundLiteral, Instance, Plan, State, StripsError, Verdict};

pub use colors::{colors_shape, corrupt_incomplete_colors, gen_colors};
pub use grippers::{corrupt_incomplete_grippers, corrupt_nonexecutable_grippers, gen_grippers, grippers_counts};
pub use lights::{corrupt_incomplete_lights_out, gen_lights_out};
pub use tokens::{record_layout, tokens_crasp, tokens_train};

/// Attempts at a whole (instance, valid, invalid) triple before giving up.
pub const PAIR_ATTEMPTS: usize = 100;
/// Substitutions tried per base plan for the Colors incomplete corruption.
pub const COLORS_SUBSTITUTIONS: usize = 50;
/// Grippers incomplete plans may be at most this many actions shorter.
pub const GRIPPERS_MAX_SHRINK: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("{what}: gave up after {attempts} attempts")]
    RetryExhausted { what: &'static str, attempts: usize },
    #[error("{0} has no inapplicable actions")]
    NotApplicable(Variant),
    #[error(transparent)]
    Strips(#[from] StripsError),
    #[error("record {id}: {message}")]
    BadRecord { id: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn exhausted(what: &'static str, attempts: usize) -> GenError {
    GenError::RetryExhausted { what, attempts }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    ValId,
    ValOod,
    TestId,
    TestOod,
}

impl Split {
    pub const ALL: [Split; 5] = [Split::Train, Split::ValId, Split::ValOod, Split::TestId, Split::TestOod];

    pub fn id(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::ValId => "val_id",
            Split::ValOod => "val_ood",
            Split::TestId => "test_id",
            Split::TestOod => "test_ood",
        }
    }

    pub fn is_ood(self) -> bool {
        matches!(self, Split::ValOod | Split::TestOod)
    }

    fn stream(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL
            .into_iter()
            .find(|x| x.id() == s)
            .ok_or_else(|| format!("unknown split `{s}`"))
    }
}

/// Record counts per split. Counts are even so labels balance exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub val_id: usize,
    pub val_ood: usize,
    pub test_id: usize,
    pub test_ood: usize,
}

impl SplitSizes {
    /// The reference dataset sizes scaled down by 100, rounded to even.
    pub fn default_for(variant: Variant) -> Self {
        let full: [f64; 5] = if variant.is_colors() {
            [1_720_000.0, 12_000.0, 13_333.0, 24_000.0, 26_667.0]
        } else if variant.is_grippers() {
            [360_000.0, 18_000.0, 20_000.0, 18_000.0, 20_000.0]
        } else {
            [180_000.0, 6_000.0, 6_666.0, 12_000.0, 13_334.0]
        };
        let s = full.map(|x| 2 * (x / 200.0).round() as usize);
        SplitSizes { train: s[0], val_id: s[1], val_ood: s[2], test_id: s[3], test_ood: s[4] }
    }

    /// Every split gets `n` records.
    pub fn uniform(n: usize) -> Self {
        SplitSizes { train: n, val_id: n, val_ood: n, test_id: n, test_ood: n }
    }

    pub fn get(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::ValId => self.val_id,
            Split::ValOod => self.val_ood,
            Split::TestId => self.test_id,
            Split::TestOod => self.test_ood,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub variant: Variant,
    pub seed: u64,
    /// In-distribution plan lengths.
    pub id_lengths: RangeInclusive<usize>,
    /// Out-of-distribution plan lengths.
    pub ood_lengths: RangeInclusive<usize>,
    /// Upper bound on instance objects (Grippers and Colors).
    pub max_objects: Option<usize>,
    /// Object names are drawn from `object_0 … object_M`; `None` derives M
    /// from the largest instance the length ranges can produce.
    pub name_pool: Option<usize>,
    /// Share of Grippers invalid plans that are non-executable.
    pub nonexec_share: f64,
    /// Share of delete-free Grippers steps drawn from the well-formed pool.
    pub df_mix: f64,
}

impl GenConfig {
    pub fn new(variant: Variant, seed: u64) -> Self {
        GenConfig {
            variant,
            seed,
            id_lengths: 11..=100,
            ood_lengths: 101..=200,
            max_objects: None,
            name_pool: None,
            nonexec_share: 0.5,
            df_mix: 0.5,
        }
    }

    pub fn lengths(&self, split: Split) -> RangeInclusive<usize> {
        if split.is_ood() {
            self.ood_lengths.clone()
        } else {
            self.id_lengths.clone()
        }
    }

    /// M: the largest object index a name may carry.
    pub fn pool_size(&self) -> usize {
        if let Some(m) = self.name_pool {
            return m;
        }
        let longest = *self.id_lengths.end().max(self.ood_lengths.end());
        let most = if self.variant.is_grippers() {
            let (_, balls_hi) = grippers::ball_range(longest);
            balls_hi + (balls_hi / 2).max(2) + 2
        } else if self.variant.is_colors() {
            let (b, c) = colors_shape(longest);
            b + c
        } else {
            25
        };
        let most = self.max_objects.map_or(most, |cap| most.min(cap));
        most.max(1) - 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Correct,
    Incorrect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corruption {
    None,
    Incomplete,
    NonExecutable,
}

impl Corruption {
    pub fn id(self) -> &'static str {
        match self {
            Corruption::None => "none",
            Corruption::Incomplete => "incomplete",
            Corruption::NonExecutable => "non_executable",
        }
    }

    /// Whether `v` is the verdict this corruption kind produces.
    pub fn matches(self, v: &Verdict) -> bool {
        matches!(
            (self, v),
            (Corruption::None, Verdict::Valid)
                | (Corruption::Incomplete, Verdict::Incomplete { .. })
                | (Corruption::NonExecutable, Verdict::NonExecutable { .. })
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub variant: Variant,
    pub n_actions: usize,
    pub label: Label,
    pub corruption: Corruption,
    pub objects: Vec<String>,
    pub init: Vec<String>,
    pub plan: Vec<String>,
    pub goal: Vec<String>,
    pub tokens_train: String,
    pub tokens_crasp: String,
}

fn strip_parens(s: &str) -> Option<&str> {
    s.strip_prefix('(')?.strip_suffix(')')
}

impl DatasetRecord {
    pub fn new(id: String, variant: Variant, inst: &Instance, plan: &Plan, corruption: Corruption) -> Self {
        let label = if corruption == Corruption::None { Label::Correct } else { Label::Incorrect };
        DatasetRecord {
            id,
            variant,
            n_actions: plan.len(),
            label,
            corruption,
            objects: inst.objects().to_vec(),
            init: inst.init().iter().map(|a| inst.fmt_atom(a)).collect(),
            plan: plan.actions.iter().map(|a| inst.fmt_action(a)).collect(),
            goal: inst.goal().iter().map(|g| inst.fmt_literal(g)).collect(),
            tokens_train: tokens_train(variant, inst, plan, label),
            tokens_crasp: tokens_crasp(inst, plan).expect("record objects have distinct values"),
        }
    }

    /// Rebuilds the instance and plan under the record's own variant.
    pub fn instance_plan(&self) -> Result<(Instance, Plan), GenError> {
        self.instance_plan_in(domain_of(self.variant))
    }

    /// Rebuilds the instance and plan under another domain over the same
    /// predicates and schemas (the sibling variant).
    pub fn instance_plan_in(&self, domain: Arc<crate::strips::Domain>) -> Result<(Instance, Plan), GenError> {
        let bad = |message: String| GenError::BadRecord { id: self.id.clone(), message };
        let skeleton = Instance::new(domain.clone(), self.objects.clone(), State::new(), vec![])
            .map_err(|e| bad(e.to_string()))?;
        let atom = |s: &str| {
            strip_parens(s)
                .and_then(|t| atom_from_str(&skeleton, t))
                .ok_or_else(|| bad(format!("bad atom `{s}`")))
        };
        let init = self.init.iter().map(|s| atom(s)).collect::<Result<State, _>>()?;
        let goal = self
            .goal
            .iter()
            .map(|s| match s.strip_prefix("(not ").and_then(|t| t.strip_suffix(')')) {
                Some(inner) => atom(inner).map(GroundLiteral::neg),
                None => atom(s).map(GroundLiteral::pos),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let steps: Vec<&str> = self
            .plan
            .iter()
            .map(|s| strip_parens(s).ok_or_else(|| bad(format!("bad action `{s}`"))))
            .collect::<Result<_, _>>()?;
        let plan = plan_from_strs(&skeleton, &steps).ok_or_else(|| bad("unknown action in plan".into()))?;
        let inst = Instance::new(domain, self.objects.clone(), init, goal).map_err(|e| bad(e.to_string()))?;
        Ok((inst, plan))
    }

    /// Re-simulates the record and checks its label and corruption kind.
    pub fn check(&self) -> Result<Verdict, GenError> {
        let (inst, plan) = self.instance_plan()?;
        let v = verdict(&inst, &plan)?;
        if !self.corruption.matches(&v) {
            return Err(GenError::BadRecord {
                id: self.id.clone(),
                message: format!("declared {} but simulation says {}", self.corruption.id(), v.status()),
            });
        }
        Ok(v)
    }
}

/// Domains are shared between records; Lights Out has 512 schemas so it is
/// built once.
pub fn domain_of(variant: Variant) -> Arc<crate::strips::Domain> {
    use std::sync::OnceLock;
    static CACHE: OnceLock<Vec<Arc<crate::strips::Domain>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| Variant::ALL.iter().map(|v| v.domain()).collect());
    all[Variant::ALL.iter().position(|v| *v == variant).unwrap()].clone()
}

/// The per-pair random stream: a ChaCha8 generator keyed by the seed, with
/// the split and pair index selecting the stream.
pub fn pair_rng(seed: u64, split: Split, pair: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(split.stream() << 48 | pair);
    rng
}

/// Samples an instance with a valid plan of exactly `n` actions.
pub fn gen_valid(cfg: &GenConfig, n: usize, rng: &mut ChaCha8Rng) -> Result<(Instance, Plan), GenError> {
    let v = cfg.variant;
    if v.is_grippers() {
        gen_grippers(cfg, n, rng)
    } else if v.is_colors() {
        gen_colors(cfg, n, rng)
    } else {
        gen_lights_out(v, n, rng)
    }
}

pub fn corrupt_incomplete(
    cfg: &GenConfig,
    inst: &Instance,
    plan: &Plan,
    lengths: &RangeInclusive<usize>,
    rng: &mut ChaCha8Rng,
) -> Result<Plan, GenError> {
    let v = cfg.variant;
    if v.is_grippers() {
        corrupt_incomplete_grippers(inst, plan, lengths, rng)
    } else if v.is_colors() {
        corrupt_incomplete_colors(inst, plan, rng)
    } else {
        corrupt_incomplete_lights_out(v, inst, plan, rng)
    }
}

pub fn corrupt_nonexecutable(cfg: &GenConfig, inst: &Instance, plan: &Plan, rng: &mut ChaCha8Rng) -> Result<Plan, GenError> {
    if cfg.variant.is_grippers() {
        corrupt_nonexecutable_grippers(inst, plan, rng)
    } else {
        Err(GenError::NotApplicable(cfg.variant))
    }
}

/// One valid record and its invalid counterpart over the same instance.
pub fn generate_pair(
    cfg: &GenConfig,
    split: Split,
    pair: u64,
) -> Result<[DatasetRecord; 2], GenError> {
    let mut rng = pair_rng(cfg.seed, split, pair);
    let lengths = cfg.lengths(split);
    for _ in 0..PAIR_ATTEMPTS {
        let n = rng.random_range(lengths.clone());
        let (inst, valid) = match gen_valid(cfg, n, &mut rng) {
            Ok(x) => x,
            Err(GenError::RetryExhausted { .. }) => continue,
            Err(e) => return Err(e),
        };
        let nonexec = cfg.variant.is_grippers() && rng.random_bool(cfg.nonexec_share);
        let invalid = if nonexec {
            corrupt_nonexecutable(cfg, &inst, &valid, &mut rng)
        } else {
            corrupt_incomplete(cfg, &inst, &valid, &lengths, &mut rng)
        };
        let invalid = match invalid {
            Ok(p) => p,
            Err(GenError::RetryExhausted { .. }) | Err(GenError::NotApplicable(_)) => continue,
            Err(e) => return Err(e),
        };
        let kind = if nonexec { Corruption::NonExecutable } else { Corruption::Incomplete };
        let base = 2 * pair;
        let id = |k: u64| format!("{}-{}-{:07}", cfg.variant, split, base + k);
        return Ok([
            DatasetRecord::new(id(0), cfg.variant, &inst, &valid, Corruption::None),
            DatasetRecord::new(id(1), cfg.variant, &inst, &invalid, kind),
        ]);
    }
    Err(exhausted("record pair", PAIR_ATTEMPTS))
}

/// `count` records (rounded up to even) for one split, in index order.
pub fn generate_split(cfg: &GenConfig, split: Split, count: usize) -> Result<Vec<DatasetRecord>, GenError> {
    let pairs = count.div_ceil(2) as u64;
    let chunks: Vec<[DatasetRecord; 2]> = (0..pairs)
        .into_par_iter()
        .map(|p| generate_pair(cfg, split, p))
        .collect::<Result<_, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

/// Writes one JSON object per line.
pub fn export_jsonl(records: &[DatasetRecord], path: &Path) -> Result<(), GenError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_jsonl(records, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_jsonl(records: &[DatasetRecord], w: &mut impl Write) -> Result<(), GenError> {
    for r in records {
        serde_json::to_writer(&mut *w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<DatasetRecord>, GenError> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(GenError::from))
        .collect()
}

pub fn split_path(dir: &Path, variant: Variant, split: Split) -> PathBuf {
    dir.join(format!("{variant}.{split}.jsonl"))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitStats {
    pub records: usize,
    pub correct: usize,
    pub incorrect: usize,
    pub corruption: BTreeMap<String, usize>,
    pub min_actions: usize,
    pub max_actions: usize,
    pub min_objects: usize,
    pub max_objects: usize,
    /// Record counts per plan-length bucket of width 10.
    pub buckets: BTreeMap<String, usize>,
}

pub fn stats(records: &[DatasetRecord]) -> SplitStats {
    let mut s = SplitStats {
        records: records.len(),
        min_actions: records.iter().map(|r| r.n_actions).min().unwrap_or(0),
        max_actions: records.iter().map(|r| r.n_actions).max().unwrap_or(0),
        min_objects: records.iter().map(|r| r.objects.len()).min().unwrap_or(0),
        max_objects: records.iter().map(|r| r.objects.len()).max().unwrap_or(0),
        ..SplitStats::default()
    };
    for r in records {
        match r.label {
            Label::Correct => s.correct += 1,
            Label::Incorrect => s.incorrect += 1,
        }
        *s.corruption.entry(r.corruption.id().to_string()).or_default() += 1;
        let lo = (r.n_actions.saturating_sub(1)) / 10 * 10 + 1;
        *s.buckets.entry(format!("{lo:03}-{:03}", lo + 9)).or_default() += 1;
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub config: GenConfig,
    pub sizes: SplitSizes,
    pub splits: BTreeMap<String, SplitStats>,
}

/// Generates and writes all five split files plus `{variant}.stats.json`.
pub fn build_splits(cfg: &GenConfig, sizes: &SplitSizes, dir: &Path) -> Result<DatasetSummary, GenError> {
    std::fs::create_dir_all(dir)?;
    let mut splits = BTreeMap::new();
    for split in Split::ALL {
        let records = generate_split(cfg, split, sizes.get(split))?;
        export_jsonl(&records, &split_path(dir, cfg.variant, split))?;
        splits.insert(split.id().to_string(), stats(&records));
    }
    let summary = DatasetSummary { config: cfg.clone(), sizes: *sizes, splits };
    let mut f = File::create(dir.join(format!("{}.stats.json", cfg.variant)))?;
    serde_json::to_writer_pretty(&mut f, &summary)?;
    f.write_all(b"\n")?;
    Ok(summary)
}

/// Draws `count` distinct names from `object_0 … object_M`.
pub(crate) fn sample_names(pool: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let pool = pool.max(count.saturating_sub(1));
    rand::seq::index::sample(rng, pool + 1, count)
        .into_iter()
        .map(|k| format!("object_{k}"))
        .collect()
}

/// Whether the corrupted plan fails with exactly one unmet goal literal.
pub(crate) fn exactly_one_unmet(inst: &Instance, plan: &Plan) -> Result<Option<GroundLiteral>, GenError> {
    Ok(match verdict(inst, plan)? {
        Verdict::Incomplete { mut unsatisfied } if unsatisfied.len() == 1 => unsatisfied.pop(),
        _ => None,
    })
}
