use std::collections::HashMap;
use std::fmt::Write;
use std::sync::Arc;

use smallvec::SmallVec;

use super::sexpr::{atom_text, parse_sexprs, SExpr};
use super::{ParseError, SourceSpan};
use crate::strips::{
    ActionSchema, Atom, ConditionalEffect, Domain, GroundAction, GroundLiteral, Instance, Literal, Plan,
    PredId, PredicateDef, SchemaId, State, Term,
};

fn single_form<'a>(forms: &'a [SExpr], head: &str, text_len: usize) -> Result<&'a [SExpr], ParseError> {
    let eof = SourceSpan {
        start: text_len,
        end: text_len,
        ..Default::default()
    };
    match forms {
        [] => Err(ParseError::expected(eof, "empty input", format!("`({head} …)`"))),
        [f] => {
            let items = f.expect_list(&format!("`({head} …)`"))?;
            if f.head() != Some(head) {
                return Err(ParseError::expected(
                    f.span(),
                    format!("expected a `{head}` form"),
                    format!("`({head} …)`"),
                ));
            }
            Ok(items)
        }
        [_, extra, ..] => Err(ParseError::new(extra.span(), format!("trailing form after `{head}`"))),
    }
}

/// Splits `(not X)` into `(false, X)`; anything else is `(true, self)`.
fn polarity(e: &SExpr) -> (bool, &SExpr) {
    if let Some([head, inner]) = e.list() {
        if head.atom() == Some("not") && inner.list().is_some() {
            return (false, inner);
        }
    }
    (true, e)
}

fn check_arity(def: &PredicateDef, found: usize, span: SourceSpan) -> Result<(), ParseError> {
    if def.arity != found {
        return Err(ParseError::new(
            span,
            format!(
                "predicate `{}` expects {} argument(s), got {}",
                def.name, def.arity, found
            ),
        ));
    }
    Ok(())
}

struct DomainCtx<'a> {
    constants: &'a [String],
    predicates: &'a [PredicateDef],
    pred_index: HashMap<&'a str, PredId>,
}

impl DomainCtx<'_> {
    fn predicate<'e>(&self, e: &'e SExpr) -> Result<(PredId, &'e [SExpr]), ParseError> {
        let items = e.expect_list("a literal `(pred arg …)`")?;
        let Some(first) = items.first() else {
            return Err(ParseError::expected(e.span(), "empty literal", "a predicate name"));
        };
        let name = first.expect_atom("a predicate name")?;
        let pred = *self
            .pred_index
            .get(name)
            .ok_or_else(|| ParseError::new(first.span(), format!("unknown predicate `{name}`")))?;
        check_arity(&self.predicates[pred.0 as usize], items.len() - 1, e.span())?;
        Ok((pred, &items[1..]))
    }

    fn literal(&self, e: &SExpr, schema: &str, params: &[String]) -> Result<Literal, ParseError> {
        let (positive, inner) = polarity(e);
        let (pred, args) = self.predicate(inner)?;
        let args = args
            .iter()
            .map(|a| {
                let name = a.expect_atom("a variable or constant")?;
                if let Some(v) = params.iter().position(|p| p == name) {
                    Ok(Term::Var(v as u16))
                } else if let Some(c) = self.constants.iter().position(|c| c == name) {
                    Ok(Term::Const(c as u32))
                } else {
                    Err(ParseError::new(
                        a.span(),
                        format!("unbound variable `{name}` in action `{schema}`"),
                    ))
                }
            })
            .collect::<Result<SmallVec<_>, _>>()?;
        Ok(Literal { pred, args, positive })
    }

    fn literals(&self, items: &[SExpr], schema: &str, params: &[String]) -> Result<Vec<Literal>, ParseError> {
        items.iter().map(|e| self.literal(e, schema, params)).collect()
    }
}

fn atoms<'a>(items: &'a [SExpr], what: &str) -> Result<Vec<&'a str>, ParseError> {
    items.iter().map(|e| e.expect_atom(what)).collect()
}

/// Parses a `.pdom` file:
///
/// ```text
/// (domain NAME
///   (constants C …)
///   (predicate P ARG …)
///   (action A (PARAM …)
///     (pre LIT …)
///     (effect LIT …)
///     (when (LIT …) (LIT …))))
/// ```
///
/// A literal is `(P ARG …)` or `(not (P ARG …))`. Arguments resolve to the
/// action's parameters first, then to constants.
pub fn parse_domain(text: &str) -> Result<Domain, ParseError> {
    let forms = parse_sexprs(text)?;
    let items = single_form(&forms, "domain", text.len())?;
    let name_expr = items
        .get(1)
        .ok_or_else(|| ParseError::expected(forms[0].span(), "missing domain name", "a name"))?;
    let name = name_expr.expect_atom("a domain name")?;
    let body = &items[2..];

    let mut constants: Vec<String> = Vec::new();
    let mut predicates: Vec<PredicateDef> = Vec::new();
    let mut pred_index: HashMap<&str, PredId> = HashMap::new();
    let mut actions = Vec::new();
    for form in body {
        let parts = form.expect_list("a domain section")?;
        match form.head() {
            Some("constants") => {
                for c in &parts[1..] {
                    let c_name = c.expect_atom("a constant name")?;
                    if constants.iter().any(|x| x == c_name) {
                        return Err(ParseError::new(c.span(), format!("duplicate constant `{c_name}`")));
                    }
                    constants.push(c_name.to_string());
                }
            }
            Some("predicate") => {
                let p = parts
                    .get(1)
                    .ok_or_else(|| ParseError::expected(form.span(), "missing predicate name", "a name"))?;
                let p_name = p.expect_atom("a predicate name")?;
                if p_name == "not" {
                    return Err(ParseError::new(p.span(), "`not` cannot name a predicate"));
                }
                atoms(&parts[2..], "a parameter name")?;
                if pred_index.insert(p_name, PredId(predicates.len() as u32)).is_some() {
                    return Err(ParseError::new(p.span(), format!("duplicate predicate `{p_name}`")));
                }
                predicates.push(PredicateDef {
                    name: p_name.to_string(),
                    arity: parts.len() - 2,
                });
            }
            Some("action") => actions.push(form),
            _ => {
                return Err(ParseError::expected(
                    form.span(),
                    "unknown domain section",
                    "`constants`, `predicate` or `action`",
                ))
            }
        }
    }

    let ctx = DomainCtx {
        constants: &constants,
        predicates: &predicates,
        pred_index,
    };
    let mut schemas: Vec<ActionSchema> = Vec::new();
    for form in actions {
        let parts = form.list().unwrap();
        let a = parts
            .get(1)
            .ok_or_else(|| ParseError::expected(form.span(), "missing action name", "a name"))?;
        let a_name = a.expect_atom("an action name")?;
        if schemas.iter().any(|s| s.name == a_name) {
            return Err(ParseError::new(a.span(), format!("duplicate action `{a_name}`")));
        }
        let params_expr = parts
            .get(2)
            .ok_or_else(|| ParseError::expected(form.span(), "missing parameter list", "`(PARAM …)`"))?;
        let params: Vec<String> = atoms(params_expr.expect_list("a parameter list")?, "a parameter name")?
            .into_iter()
            .map(str::to_string)
            .collect();
        for (i, p) in params.iter().enumerate() {
            if params[..i].contains(p) {
                return Err(ParseError::new(params_expr.span(), format!("duplicate parameter `{p}`")));
            }
        }
        let mut schema = ActionSchema {
            name: a_name.to_string(),
            params,
            pre: Vec::new(),
            effects: Vec::new(),
        };
        for clause in &parts[3..] {
            let c = clause.expect_list("an action clause")?;
            match clause.head() {
                Some("pre") => {
                    let lits = ctx.literals(&c[1..], a_name, &schema.params)?;
                    schema.pre.extend(lits);
                }
                Some("effect") => {
                    let effect = ctx.literals(&c[1..], a_name, &schema.params)?;
                    schema.effects.push(ConditionalEffect {
                        condition: Vec::new(),
                        effect,
                    });
                }
                Some("when") if c.len() == 3 => {
                    let cond = c[1].expect_list("a condition list")?;
                    let eff = c[2].expect_list("an effect list")?;
                    schema.effects.push(ConditionalEffect {
                        condition: ctx.literals(cond, a_name, &schema.params)?,
                        effect: ctx.literals(eff, a_name, &schema.params)?,
                    });
                }
                Some("when") => {
                    return Err(ParseError::expected(
                        clause.span(),
                        "malformed conditional effect",
                        "`(when (LIT …) (LIT …))`",
                    ))
                }
                _ => {
                    return Err(ParseError::expected(
                        clause.span(),
                        "unknown action clause",
                        "`pre`, `effect` or `when`",
                    ))
                }
            }
        }
        schemas.push(schema);
    }
    let span = forms[0].span();
    Domain::new(name, constants, predicates, schemas).map_err(|e| ParseError::new(span, e.to_string()))
}

/// Parameter names for `(predicate …)` lines: the variable names of the first
/// literal that uses the predicate over distinct parameters, else `x1 …`.
fn predicate_params(domain: &Domain, pred: PredId) -> Vec<String> {
    let arity = domain.predicate(pred).arity;
    for s in domain.schemas() {
        let lits = s
            .pre
            .iter()
            .chain(s.effects.iter().flat_map(|e| e.condition.iter().chain(&e.effect)));
        for l in lits.filter(|l| l.pred == pred) {
            let vars: Vec<u16> = l
                .args
                .iter()
                .filter_map(|t| match t {
                    Term::Var(v) => Some(*v),
                    Term::Const(_) => None,
                })
                .collect();
            let distinct = vars.iter().enumerate().all(|(i, v)| !vars[..i].contains(v));
            if vars.len() == arity && distinct {
                return vars.iter().map(|&v| s.params[v as usize].clone()).collect();
            }
        }
    }
    (1..=arity).map(|i| format!("x{i}")).collect()
}

fn write_lifted(out: &mut String, domain: &Domain, schema: &ActionSchema, lit: &Literal) {
    if !lit.positive {
        out.push_str("(not ");
    }
    out.push('(');
    out.push_str(&atom_text(&domain.predicate(lit.pred).name));
    for t in &lit.args {
        out.push(' ');
        let name = match *t {
            Term::Var(v) => &schema.params[v as usize],
            Term::Const(c) => &domain.constants()[c as usize],
        };
        out.push_str(&atom_text(name));
    }
    out.push(')');
    if !lit.positive {
        out.push(')');
    }
}

fn write_lifted_list(out: &mut String, domain: &Domain, schema: &ActionSchema, lits: &[Literal]) {
    for (i, l) in lits.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_lifted(out, domain, schema, l);
    }
}

/// Canonical `.pdom` text; `parse_domain` inverts it.
pub fn serialize_domain(domain: &Domain) -> String {
    let mut out = format!("(domain {}", atom_text(domain.name()));
    if !domain.constants().is_empty() {
        out.push_str("\n  (constants");
        for c in domain.constants() {
            out.push(' ');
            out.push_str(&atom_text(c));
        }
        out.push(')');
    }
    for p in domain.pred_ids() {
        write!(out, "\n  (predicate {}", atom_text(&domain.predicate(p).name)).unwrap();
        for v in predicate_params(domain, p) {
            out.push(' ');
            out.push_str(&atom_text(&v));
        }
        out.push(')');
    }
    for s in domain.schemas() {
        write!(out, "\n  (action {} (", atom_text(&s.name)).unwrap();
        let params: Vec<String> = s.params.iter().map(|p| atom_text(p)).collect();
        out.push_str(&params.join(" "));
        out.push(')');
        if !s.pre.is_empty() {
            out.push_str("\n    (pre ");
            write_lifted_list(&mut out, domain, s, &s.pre);
            out.push(')');
        }
        for e in &s.effects {
            if e.condition.is_empty() {
                out.push_str("\n    (effect");
                if !e.effect.is_empty() {
                    out.push(' ');
                }
                write_lifted_list(&mut out, domain, s, &e.effect);
                out.push(')');
            } else {
                out.push_str("\n    (when (");
                write_lifted_list(&mut out, domain, s, &e.condition);
                out.push_str(") (");
                write_lifted_list(&mut out, domain, s, &e.effect);
                out.push_str("))");
            }
        }
        out.push(')');
    }
    out.push_str(")\n");
    out
}

struct InstanceCtx<'a> {
    domain: &'a Domain,
    objects: HashMap<String, u32>,
}

impl InstanceCtx<'_> {
    fn atom(&self, e: &SExpr) -> Result<Atom, ParseError> {
        let items = e.expect_list("a proposition `(pred obj …)`")?;
        let Some(first) = items.first() else {
            return Err(ParseError::expected(e.span(), "empty proposition", "a predicate name"));
        };
        let name = first.expect_atom("a predicate name")?;
        let pred = self
            .domain
            .predicate_id(name)
            .ok_or_else(|| ParseError::new(first.span(), format!("unknown predicate `{name}`")))?;
        check_arity(self.domain.predicate(pred), items.len() - 1, e.span())?;
        let args = items[1..]
            .iter()
            .map(|a| self.object(a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Atom::new(pred, args))
    }

    fn object(&self, a: &SExpr) -> Result<u32, ParseError> {
        let o = a.expect_atom("an object name")?;
        self.objects
            .get(o)
            .copied()
            .ok_or_else(|| ParseError::new(a.span(), format!("unknown object `{o}`")))
    }
}

/// Parses a `.pinst` file against `domain`:
///
/// ```text
/// (instance [NAME]
///   (domain NAME)
///   (objects O …)
///   (init (P O …) …)
///   (goal LIT …))
/// ```
///
/// Objects are interned in declaration order; domain constants not listed
/// are appended after them. The `(domain …)` section is optional but must
/// match when present.
pub fn parse_instance(text: &str, domain: Arc<Domain>) -> Result<Instance, ParseError> {
    let forms = parse_sexprs(text)?;
    let items = single_form(&forms, "instance", text.len())?;
    let mut body = &items[1..];
    if body.first().is_some_and(|e| e.atom().is_some()) {
        body = &body[1..];
    }
    let mut objects: Vec<String> = Vec::new();
    let mut sections: Vec<(&str, &SExpr)> = Vec::new();
    for form in body {
        let parts = form.expect_list("an instance section")?;
        match form.head() {
            Some("domain") => {
                let named = parts.get(1).and_then(SExpr::atom);
                if parts.len() != 2 || named.is_none() {
                    return Err(ParseError::expected(form.span(), "malformed domain reference", "`(domain NAME)`"));
                }
                if named != Some(domain.name()) {
                    return Err(ParseError::new(
                        parts[1].span(),
                        format!("instance is for domain `{}`, not `{}`", named.unwrap(), domain.name()),
                    ));
                }
            }
            Some("objects") => {
                for o in &parts[1..] {
                    let name = o.expect_atom("an object name")?;
                    if objects.iter().any(|x| x == name) {
                        return Err(ParseError::new(o.span(), format!("duplicate object `{name}`")));
                    }
                    objects.push(name.to_string());
                }
            }
            Some(h @ ("init" | "goal")) => sections.push((h, form)),
            _ => {
                return Err(ParseError::expected(
                    form.span(),
                    "unknown instance section",
                    "`domain`, `objects`, `init` or `goal`",
                ))
            }
        }
    }
    for c in domain.constants() {
        if !objects.contains(c) {
            objects.push(c.clone());
        }
    }
    let ctx = InstanceCtx {
        domain: &domain,
        objects: objects.iter().enumerate().map(|(i, o)| (o.clone(), i as u32)).collect(),
    };
    let mut init = State::new();
    let mut goal = Vec::new();
    for (kind, form) in sections {
        for e in &form.list().unwrap()[1..] {
            let (positive, inner) = polarity(e);
            if kind == "init" {
                if !positive {
                    return Err(ParseError::new(e.span(), "initial state lists only true propositions"));
                }
                init.insert(ctx.atom(inner)?);
            } else {
                goal.push(GroundLiteral {
                    atom: ctx.atom(inner)?,
                    positive,
                });
            }
        }
    }
    let span = forms[0].span();
    Instance::new(domain, objects, init, goal).map_err(|e| ParseError::new(span, e.to_string()))
}

fn write_atom(out: &mut String, inst: &Instance, atom: &Atom) {
    out.push('(');
    out.push_str(&atom_text(&inst.domain().predicate(atom.pred).name));
    for &o in &atom.args {
        out.push(' ');
        out.push_str(&atom_text(&inst.objects()[o as usize]));
    }
    out.push(')');
}

/// Canonical `.pinst` text; `parse_instance` inverts it.
pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = format!("(instance\n  (domain {})\n  (objects", atom_text(inst.domain().name()));
    for o in inst.objects() {
        out.push(' ');
        out.push_str(&atom_text(o));
    }
    out.push_str(")\n  (init");
    for a in inst.init().iter() {
        out.push_str("\n    ");
        write_atom(&mut out, inst, a);
    }
    out.push_str(")\n  (goal");
    for g in inst.goal() {
        out.push_str("\n    ");
        if !g.positive {
            out.push_str("(not ");
        }
        write_atom(&mut out, inst, &g.atom);
        if !g.positive {
            out.push(')');
        }
    }
    out.push_str("))\n");
    out
}

/// Parses a `.pplan` file: `(plan (A O …) …)`.
pub fn parse_plan(text: &str, inst: &Instance) -> Result<Plan, ParseError> {
    let forms = parse_sexprs(text)?;
    let items = single_form(&forms, "plan", text.len())?;
    let domain = inst.domain();
    items[1..]
        .iter()
        .map(|e| {
            let parts = e.expect_list("an action `(name obj …)`")?;
            let Some(first) = parts.first() else {
                return Err(ParseError::expected(e.span(), "empty action", "an action name"));
            };
            let name = first.expect_atom("an action name")?;
            let schema: SchemaId = domain
                .schema_id(name)
                .ok_or_else(|| ParseError::new(first.span(), format!("unknown action `{name}`")))?;
            let arity = domain.schema(schema).arity();
            if arity != parts.len() - 1 {
                return Err(ParseError::new(
                    e.span(),
                    format!("action `{name}` expects {arity} argument(s), got {}", parts.len() - 1),
                ));
            }
            let args = parts[1..]
                .iter()
                .map(|a| {
                    let o = a.expect_atom("an object name")?;
                    inst.object_id(o)
                        .ok_or_else(|| ParseError::new(a.span(), format!("unknown object `{o}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(GroundAction::new(schema, args))
        })
        .collect()
}

/// Canonical `.pplan` text, one action per line.
pub fn serialize_plan(plan: &Plan, inst: &Instance) -> String {
    let mut out = String::from("(plan");
    for a in &plan.actions {
        out.push_str("\n  (");
        out.push_str(&atom_text(&inst.domain().schema(a.schema).name));
        for &o in &a.args {
            out.push(' ');
            out.push_str(&atom_text(&inst.objects()[o as usize]));
        }
        out.push(')');
    }
    out.push_str(")\n");
    out
}
