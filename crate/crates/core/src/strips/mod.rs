//! Symbolic planning semantics: domains, instances, grounding, successor
//! states and plan validation.
//!
//! Domains are lifted (schemas over variables); instances fix an object list
//! and ground everything against it. Object, predicate and schema references
//! are dense indices so that states and plans stay cheap to copy and compare.

mod builder;
mod sim;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

pub use builder::{DomainBuilder, SchemaBuilder};
pub use sim::{
    applicable, audit_well_formed_trace, classify_domain, ground_pre, ground_schema, holds, simulate, succ,
    verdict, DomainClass, Simulation, WellFormedViolation,
};

/// Index of an object within an [`Instance`]'s object list.
pub type ObjId = u32;

pub type ObjArgs = SmallVec<[ObjId; 4]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchemaId(pub u32);

/// An argument position inside a lifted literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    /// Index into the owning schema's parameter list.
    Var(u16),
    /// Index into the domain's constant table.
    Const(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub pred: PredId,
    pub args: SmallVec<[Term; 4]>,
    pub positive: bool,
}

/// A ground proposition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: PredId,
    pub args: ObjArgs,
}

impl Atom {
    pub fn new(pred: PredId, args: impl IntoIterator<Item = ObjId>) -> Self {
        Atom {
            pred,
            args: args.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundLiteral {
    pub atom: Atom,
    pub positive: bool,
}

impl GroundLiteral {
    pub fn pos(atom: Atom) -> Self {
        GroundLiteral {
            atom,
            positive: true,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        GroundLiteral {
            atom,
            positive: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDef {
    pub name: String,
    pub arity: usize,
}

/// `condition ▷ effect`; an empty condition fires unconditionally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalEffect {
    pub condition: Vec<Literal>,
    pub effect: Vec<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<String>,
    pub pre: Vec<Literal>,
    pub effects: Vec<ConditionalEffect>,
}

impl ActionSchema {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// Effect literals of a STRIPS schema (single unconditional effect).
    /// Returns `None` for schemas with conditional effects.
    pub fn strips_effect(&self) -> Option<&[Literal]> {
        match self.effects.as_slice() {
            [] => Some(&[]),
            [e] if e.condition.is_empty() => Some(&e.effect),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DomainError {
    #[error("duplicate predicate `{0}`")]
    DuplicatePredicate(String),
    #[error("duplicate action schema `{0}`")]
    DuplicateSchema(String),
    #[error("duplicate constant `{0}`")]
    DuplicateConstant(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{pred}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("schema `{schema}` uses unbound variable `{var}`")]
    UnboundVariable { schema: String, var: String },
    #[error("schema `{schema}` has an effect set asserting both `{pred}` and its negation")]
    InconsistentEffect { schema: String, pred: String },
    #[error("schema `{schema}` references term out of range")]
    TermOutOfRange { schema: String },
}

/// A planning domain `⟨predicates, schemas⟩`, plus named constants that
/// schemas may mention directly (the propositionalized Lights Out variants
/// need them).
#[derive(Clone, Debug)]
pub struct Domain {
    name: String,
    constants: Vec<String>,
    predicates: Vec<PredicateDef>,
    schemas: Vec<ActionSchema>,
    pred_index: HashMap<String, PredId>,
    schema_index: HashMap<String, SchemaId>,
}

impl PartialEq for Domain {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.constants == other.constants
            && self.predicates == other.predicates
            && self.schemas == other.schemas
    }
}

impl Eq for Domain {}

impl Domain {
    pub fn new(
        name: impl Into<String>,
        constants: Vec<String>,
        predicates: Vec<PredicateDef>,
        schemas: Vec<ActionSchema>,
    ) -> Result<Self, DomainError> {
        let mut pred_index = HashMap::new();
        for (i, p) in predicates.iter().enumerate() {
            if pred_index.insert(p.name.clone(), PredId(i as u32)).is_some() {
                return Err(DomainError::DuplicatePredicate(p.name.clone()));
            }
        }
        let mut schema_index = HashMap::new();
        for (i, s) in schemas.iter().enumerate() {
            if schema_index.insert(s.name.clone(), SchemaId(i as u32)).is_some() {
                return Err(DomainError::DuplicateSchema(s.name.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for c in &constants {
            if !seen.insert(c.as_str()) {
                return Err(DomainError::DuplicateConstant(c.clone()));
            }
        }
        let domain = Domain {
            name: name.into(),
            constants,
            predicates,
            schemas,
            pred_index,
            schema_index,
        };
        for s in &domain.schemas {
            domain.check_schema(s)?;
        }
        Ok(domain)
    }

    fn check_schema(&self, s: &ActionSchema) -> Result<(), DomainError> {
        let all = s
            .pre
            .iter()
            .chain(s.effects.iter().flat_map(|e| e.condition.iter().chain(&e.effect)));
        for lit in all {
            let def = self
                .predicates
                .get(lit.pred.0 as usize)
                .ok_or_else(|| DomainError::TermOutOfRange {
                    schema: s.name.clone(),
                })?;
            if def.arity != lit.args.len() {
                return Err(DomainError::ArityMismatch {
                    pred: def.name.clone(),
                    expected: def.arity,
                    found: lit.args.len(),
                });
            }
            for t in &lit.args {
                let ok = match *t {
                    Term::Var(v) => (v as usize) < s.params.len(),
                    Term::Const(c) => (c as usize) < self.constants.len(),
                };
                if !ok {
                    return Err(DomainError::TermOutOfRange {
                        schema: s.name.clone(),
                    });
                }
            }
        }
        for e in &s.effects {
            for (i, a) in e.effect.iter().enumerate() {
                for b in &e.effect[i + 1..] {
                    if a.pred == b.pred && a.args == b.args && a.positive != b.positive {
                        return Err(DomainError::InconsistentEffect {
                            schema: s.name.clone(),
                            pred: self.predicates[a.pred.0 as usize].name.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn predicates(&self) -> &[PredicateDef] {
        &self.predicates
    }

    pub fn schemas(&self) -> &[ActionSchema] {
        &self.schemas
    }

    pub fn predicate(&self, id: PredId) -> &PredicateDef {
        &self.predicates[id.0 as usize]
    }

    pub fn schema(&self, id: SchemaId) -> &ActionSchema {
        &self.schemas[id.0 as usize]
    }

    pub fn predicate_id(&self, name: &str) -> Option<PredId> {
        self.pred_index.get(name).copied()
    }

    pub fn schema_id(&self, name: &str) -> Option<SchemaId> {
        self.schema_index.get(name).copied()
    }

    pub fn schema_ids(&self) -> impl Iterator<Item = SchemaId> {
        (0..self.schemas.len() as u32).map(SchemaId)
    }

    pub fn pred_ids(&self) -> impl Iterator<Item = PredId> {
        (0..self.predicates.len() as u32).map(PredId)
    }
}

/// A state: the set of true propositions (closed world).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(BTreeSet<Atom>);

impl State {
    pub fn new() -> Self {
        State(BTreeSet::new())
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.0.contains(atom)
    }

    pub fn insert(&mut self, atom: Atom) -> bool {
        self.0.insert(atom)
    }

    pub fn remove(&mut self, atom: &Atom) -> bool {
        self.0.remove(atom)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &State) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<Atom> for State {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        State(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundAction {
    pub schema: SchemaId,
    pub args: ObjArgs,
}

impl GroundAction {
    pub fn new(schema: SchemaId, args: impl IntoIterator<Item = ObjId>) -> Self {
        GroundAction {
            schema,
            args: args.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub actions: Vec<GroundAction>,
}

impl Plan {
    pub fn new(actions: Vec<GroundAction>) -> Self {
        Plan { actions }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

impl FromIterator<GroundAction> for Plan {
    fn from_iter<I: IntoIterator<Item = GroundAction>>(iter: I) -> Self {
        Plan {
            actions: iter.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// `step` is 1-based; `violated` is the first unsatisfied precondition.
    NonExecutable { step: usize, violated: GroundLiteral },
    Incomplete { unsatisfied: Vec<GroundLiteral> },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Valid => "valid",
            Verdict::NonExecutable { .. } => "non_executable",
            Verdict::Incomplete { .. } => "incomplete",
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("duplicate object `{0}`")]
    DuplicateObject(String),
    #[error("object index {0} out of range")]
    UnknownObject(ObjId),
    #[error("domain constant `{0}` is not among the instance objects")]
    MissingConstant(String),
    #[error("proposition over `{pred}` has {found} argument(s), expected {expected}")]
    ArityMismatch {
        pred: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StripsError {
    #[error("object index {0} out of range")]
    UnknownObject(ObjId),
    #[error("schema index {0} out of range")]
    UnknownSchema(u32),
    #[error("action `{schema}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        schema: String,
        expected: usize,
        found: usize,
    },
    #[error("triggered effects both add and delete `{0}`")]
    ConflictingEffects(String),
    #[error("plan is not executable at step {0}")]
    NonExecutable(usize),
}

/// A planning instance `⟨domain, objects, init, goal⟩`.
#[derive(Clone, Debug)]
pub struct Instance {
    domain: Arc<Domain>,
    objects: Vec<String>,
    object_index: HashMap<String, ObjId>,
    const_objects: Vec<ObjId>,
    init: State,
    goal: Vec<GroundLiteral>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        *self.domain == *other.domain
            && self.objects == other.objects
            && self.init == other.init
            && self.goal == other.goal
    }
}

impl Instance {
    pub fn new(
        domain: Arc<Domain>,
        objects: Vec<String>,
        init: State,
        goal: Vec<GroundLiteral>,
    ) -> Result<Self, InstanceError> {
        let mut object_index = HashMap::with_capacity(objects.len());
        for (i, o) in objects.iter().enumerate() {
            if object_index.insert(o.clone(), i as ObjId).is_some() {
                return Err(InstanceError::DuplicateObject(o.clone()));
            }
        }
        let const_objects = domain
            .constants()
            .iter()
            .map(|c| {
                object_index
                    .get(c)
                    .copied()
                    .ok_or_else(|| InstanceError::MissingConstant(c.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let inst = Instance {
            domain,
            objects,
            object_index,
            const_objects,
            init,
            goal,
        };
        for atom in inst.init.iter().chain(inst.goal.iter().map(|g| &g.atom)) {
            inst.check_atom(atom)?;
        }
        Ok(inst)
    }

    pub fn check_atom(&self, atom: &Atom) -> Result<(), InstanceError> {
        let def = self.domain.predicate(atom.pred);
        if def.arity != atom.args.len() {
            return Err(InstanceError::ArityMismatch {
                pred: def.name.clone(),
                expected: def.arity,
                found: atom.args.len(),
            });
        }
        match atom.args.iter().find(|&&o| o as usize >= self.objects.len()) {
            Some(&o) => Err(InstanceError::UnknownObject(o)),
            None => Ok(()),
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn domain_arc(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_id(&self, name: &str) -> Option<ObjId> {
        self.object_index.get(name).copied()
    }

    pub fn init(&self) -> &State {
        &self.init
    }

    pub fn goal(&self) -> &[GroundLiteral] {
        &self.goal
    }

    /// Same objects, init and goal interpreted under a sibling domain with
    /// identical predicate and schema names (e.g. the STRIPS vs well-formed
    /// Colors variants).
    pub fn with_domain(&self, domain: Arc<Domain>) -> Result<Self, InstanceError> {
        Instance::new(domain, self.objects.clone(), self.init.clone(), self.goal.clone())
    }

    pub fn with_init_goal(&self, init: State, goal: Vec<GroundLiteral>) -> Result<Self, InstanceError> {
        Instance::new(self.domain.clone(), self.objects.clone(), init, goal)
    }

    /// Grounds a lifted literal under an action's argument binding.
    pub fn ground_literal(&self, lit: &Literal, args: &[ObjId]) -> GroundLiteral {
        let objs = lit
            .args
            .iter()
            .map(|t| match *t {
                Term::Var(v) => args[v as usize],
                Term::Const(c) => self.const_objects[c as usize],
            })
            .collect();
        GroundLiteral {
            atom: Atom {
                pred: lit.pred,
                args: objs,
            },
            positive: lit.positive,
        }
    }

    pub fn fmt_atom(&self, atom: &Atom) -> String {
        let mut s = format!("({}", self.domain.predicate(atom.pred).name);
        for &o in &atom.args {
            s.push(' ');
            s.push_str(self.object_name(o));
        }
        s.push(')');
        s
    }

    pub fn fmt_literal(&self, lit: &GroundLiteral) -> String {
        if lit.positive {
            self.fmt_atom(&lit.atom)
        } else {
            format!("(not {})", self.fmt_atom(&lit.atom))
        }
    }

    pub fn fmt_action(&self, action: &GroundAction) -> String {
        let mut s = format!("({}", self.domain.schema(action.schema).name);
        for &o in &action.args {
            s.push(' ');
            s.push_str(self.object_name(o));
        }
        s.push(')');
        s
    }

    fn object_name(&self, o: ObjId) -> &str {
        self.objects.get(o as usize).map(String::as_str).unwrap_or("?")
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.status())
    }
}
