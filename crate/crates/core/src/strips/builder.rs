use smallvec::SmallVec;

use super::{ActionSchema, ConditionalEffect, Domain, DomainError, Literal, PredId, PredicateDef, Term};

/// Programmatic domain construction with a compact literal notation:
/// `"at b r"` is `at(b, r)` and `"!at b r"` its negation. Argument names
/// resolve to schema parameters first, then to domain constants.
#[derive(Debug, Default)]
pub struct DomainBuilder {
    name: String,
    constants: Vec<String>,
    predicates: Vec<PredicateDef>,
    schemas: Vec<PendingSchema>,
}

#[derive(Debug)]
struct PendingSchema {
    name: String,
    params: Vec<String>,
    pre: Vec<String>,
    effects: Vec<(Vec<String>, Vec<String>)>,
}

pub struct SchemaBuilder<'a> {
    schema: &'a mut PendingSchema,
}

impl DomainBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        DomainBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn constant(&mut self, name: impl Into<String>) -> &mut Self {
        self.constants.push(name.into());
        self
    }

    pub fn predicate(&mut self, name: impl Into<String>, arity: usize) -> &mut Self {
        self.predicates.push(PredicateDef {
            name: name.into(),
            arity,
        });
        self
    }

    pub fn schema(&mut self, name: impl Into<String>, params: &[&str]) -> SchemaBuilder<'_> {
        self.schemas.push(PendingSchema {
            name: name.into(),
            params: params.iter().map(|p| p.to_string()).collect(),
            pre: Vec::new(),
            effects: Vec::new(),
        });
        SchemaBuilder {
            schema: self.schemas.last_mut().unwrap(),
        }
    }

    pub fn build(&self) -> Result<Domain, DomainError> {
        let schemas = self
            .schemas
            .iter()
            .map(|s| self.resolve_schema(s))
            .collect::<Result<Vec<_>, _>>()?;
        Domain::new(
            self.name.clone(),
            self.constants.clone(),
            self.predicates.clone(),
            schemas,
        )
    }

    fn resolve_schema(&self, s: &PendingSchema) -> Result<ActionSchema, DomainError> {
        let lits = |specs: &[String]| -> Result<Vec<Literal>, DomainError> {
            specs.iter().map(|spec| self.resolve_literal(s, spec)).collect()
        };
        Ok(ActionSchema {
            name: s.name.clone(),
            params: s.params.clone(),
            pre: lits(&s.pre)?,
            effects: s
                .effects
                .iter()
                .map(|(c, e)| {
                    Ok(ConditionalEffect {
                        condition: lits(c)?,
                        effect: lits(e)?,
                    })
                })
                .collect::<Result<_, DomainError>>()?,
        })
    }

    fn resolve_literal(&self, s: &PendingSchema, spec: &str) -> Result<Literal, DomainError> {
        let (positive, body) = match spec.strip_prefix('!') {
            Some(rest) => (false, rest),
            None => (true, spec),
        };
        let mut words = body.split_whitespace();
        let pname = words.next().unwrap_or_default();
        let pred = self
            .predicates
            .iter()
            .position(|p| p.name == pname)
            .ok_or_else(|| DomainError::UnknownPredicate(pname.to_string()))?;
        let args = words
            .map(|w| {
                if let Some(v) = s.params.iter().position(|p| p == w) {
                    Ok(Term::Var(v as u16))
                } else if let Some(c) = self.constants.iter().position(|c| c == w) {
                    Ok(Term::Const(c as u32))
                } else {
                    Err(DomainError::UnboundVariable {
                        schema: s.name.clone(),
                        var: w.to_string(),
                    })
                }
            })
            .collect::<Result<SmallVec<_>, _>>()?;
        Ok(Literal {
            pred: PredId(pred as u32),
            args,
            positive,
        })
    }
}

impl SchemaBuilder<'_> {
    pub fn pre<S: AsRef<str>>(self, lits: &[S]) -> Self {
        self.schema
            .pre
            .extend(lits.iter().map(|l| l.as_ref().to_string()));
        self
    }

    /// Adds an unconditional effect set.
    pub fn effect<S: AsRef<str>>(self, lits: &[S]) -> Self {
        self.when::<&str, S>(&[], lits)
    }

    pub fn when<C: AsRef<str>, S: AsRef<str>>(self, cond: &[C], lits: &[S]) -> Self {
        self.schema.effects.push((
            cond.iter().map(|l| l.as_ref().to_string()).collect(),
            lits.iter().map(|l| l.as_ref().to_string()).collect(),
        ));
        self
    }
}
