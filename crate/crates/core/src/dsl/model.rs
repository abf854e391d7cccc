//! Model-definition language: statements with attribute blocks.

use std::collections::BTreeMap;

use super::expr::{parse_expression, parse_polynomial, parse_relation, RegistryResolver, Resolver};
use super::lexer::{describe, Cursor, Tok};
use crate::embed::{guard_to_cpt, formula_to_cpt, parametric_function_cpt, EmbeddedDefinition, ParametricMode};
use crate::error::{Error, Result};
use crate::network::{canonical_name, Clique, ComponentTable, Constraint, Domain, Model, TableSource, Target};
use crate::polynomial::{parse_rational, Polynomial, Rational};

use super::parse_formula;

#[derive(Clone, Debug)]
enum Item {
    Str(String),
    Expr(String),
}

#[derive(Clone, Debug)]
enum Value {
    Str(String),
    Word(String),
    Call(String, Vec<Item>),
    List(Vec<Item>),
}

#[derive(Clone, Debug)]
enum AttrKind {
    Flag,
    Assign(Value),
    Call(Vec<Item>),
}

#[derive(Clone, Debug)]
struct Attr {
    name: String,
    kind: AttrKind,
    line: usize,
    col: usize,
}

impl Attr {
    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::syntax(self.line, self.col, msg))
    }
}

#[derive(Clone, Debug)]
enum Decl {
    Parameter { name: String, attrs: Vec<Attr> },
    Decision { name: String, attrs: Vec<Attr> },
    Primary { name: String, attrs: Vec<Attr> },
    Utility { name: String, attrs: Vec<Attr> },
    Clique { name: String },
    Table { clique: Option<String>, targets: Vec<String>, parents: Vec<String>, attrs: Vec<Attr> },
    Set { name: String, value: String },
    Net { attrs: Vec<Attr> },
    Constraint { text: String },
}

#[derive(Clone, Debug)]
struct Stmt {
    decl: Decl,
    line: usize,
    col: usize,
}

struct Parser<'a> {
    src: &'a str,
    c: Cursor,
}

impl<'a> Parser<'a> {
    fn statements(&mut self) -> Result<Vec<Stmt>> {
        let mut out = Vec::new();
        while !self.c.at_eof() {
            if self.c.eat(";") {
                continue;
            }
            let (line, col) = (self.c.here().line, self.c.here().col);
            let kw = self.c.ident()?;
            let decl = match kw.as_str() {
                "parameter" | "decision" | "primary" | "utility" => {
                    let name = self.c.ident()?;
                    let attrs = self.block()?;
                    match kw.as_str() {
                        "parameter" => Decl::Parameter { name, attrs },
                        "decision" => Decl::Decision { name, attrs },
                        "primary" => Decl::Primary { name, attrs },
                        _ => Decl::Utility { name, attrs },
                    }
                }
                "clique" => {
                    let name = self.c.ident()?;
                    self.c.expect(";")?;
                    Decl::Clique { name }
                }
                "probability" | "potential" => self.table()?,
                "set" => {
                    let name = self.c.ident()?;
                    self.c.expect("=")?;
                    let value = self.text_until(&[";"])?;
                    self.c.expect(";")?;
                    Decl::Set { name, value }
                }
                "net" => Decl::Net { attrs: self.block()? },
                "constraint" => {
                    let tok = self.c.bump();
                    let Tok::Str(text) = tok.tok else {
                        return Err(Error::syntax(tok.line, tok.col, "expected a quoted constraint"));
                    };
                    self.c.expect(";")?;
                    Decl::Constraint { text }
                }
                other => return Err(Error::syntax(line, col, format!("unknown statement `{other}`"))),
            };
            out.push(Stmt { decl, line, col });
        }
        Ok(out)
    }

    fn table(&mut self) -> Result<Decl> {
        self.c.expect("(")?;
        let mut names = Vec::new();
        let mut clique = None;
        let mut parents = Vec::new();
        let mut in_parents = false;
        loop {
            if self.c.eat(")") {
                break;
            }
            if self.c.eat("|") {
                if in_parents {
                    return self.c.error("second `|` in table header");
                }
                in_parents = true;
                continue;
            }
            if self.c.eat(":") {
                if clique.is_some() || in_parents || names.len() != 1 {
                    return self.c.error("misplaced `:` in table header");
                }
                clique = names.pop();
                continue;
            }
            let name = self.c.ident()?;
            if in_parents {
                parents.push(name);
            } else {
                names.push(name);
            }
        }
        if names.is_empty() {
            return self.c.error("table header names no variable");
        }
        let attrs = self.block()?;
        Ok(Decl::Table { clique, targets: names, parents, attrs })
    }

    fn block(&mut self) -> Result<Vec<Attr>> {
        self.c.expect("{")?;
        let mut attrs = Vec::new();
        loop {
            if self.c.eat("}") {
                return Ok(attrs);
            }
            if self.c.eat(";") || self.c.eat(",") {
                continue;
            }
            let (line, col) = (self.c.here().line, self.c.here().col);
            let name = self.c.ident()?;
            let kind = if self.c.eat("=") {
                AttrKind::Assign(self.value()?)
            } else if self.c.at_punct("(") {
                AttrKind::Call(self.items()?)
            } else {
                AttrKind::Flag
            };
            attrs.push(Attr { name, kind, line, col });
            if !(self.c.eat(";") || self.c.eat(",") || self.c.at_punct("}")) {
                let found = describe(self.c.peek());
                return self.c.error(format!("expected `;`, found {found}"));
            }
        }
    }

    fn value(&mut self) -> Result<Value> {
        match self.c.peek().clone() {
            Tok::Str(s) => {
                self.c.bump();
                Ok(Value::Str(s))
            }
            Tok::Ident(w) => {
                self.c.bump();
                if self.c.at_punct("(") {
                    Ok(Value::Call(w, self.items()?))
                } else {
                    Ok(Value::Word(w))
                }
            }
            Tok::Punct("(") => Ok(Value::List(self.items()?)),
            _ => Ok(Value::List(vec![Item::Expr(self.text_until(&[";", ",", "}"])?)])),
        }
    }

    /// Parenthesized, comma-separated items.
    fn items(&mut self) -> Result<Vec<Item>> {
        self.c.expect("(")?;
        let mut out = Vec::new();
        if self.c.eat(")") {
            return Ok(out);
        }
        loop {
            if let (Tok::Str(s), Tok::Punct(",") | Tok::Punct(")")) = (self.c.peek().clone(), self.c.peek_at(1)) {
                self.c.bump();
                out.push(Item::Str(s));
            } else {
                out.push(Item::Expr(self.text_until(&[",", ")"])?));
            }
            if self.c.eat(")") {
                return Ok(out);
            }
            self.c.expect(",")?;
        }
    }

    /// Source text of tokens up to one of `stops` at bracket depth zero.
    fn text_until(&mut self, stops: &[&str]) -> Result<String> {
        let start = self.c.here().start;
        let mut end = start;
        let mut depth = 0i32;
        loop {
            match self.c.peek() {
                Tok::Eof => return self.c.error("unexpected end of input"),
                Tok::Punct(p) if depth == 0 && stops.contains(p) => break,
                Tok::Punct("(") | Tok::Punct("[") => depth += 1,
                Tok::Punct(")") | Tok::Punct("]") => depth -= 1,
                _ => {}
            }
            end = self.c.bump().end;
        }
        if end == start {
            return self.c.error("expected a value");
        }
        Ok(self.src[start..end].trim().to_string())
    }
}

fn item_text(i: &Item) -> &str {
    match i {
        Item::Str(s) | Item::Expr(s) => s,
    }
}

fn constant(text: &str, a: &Attr) -> Result<Rational> {
    if let Some(r) = parse_rational(text) {
        return Ok(r);
    }
    struct NoNames;
    impl Resolver for NoNames {
        fn ident(&self, name: &str) -> Result<Polynomial> {
            Err(Error::UnknownIdentifier(name.to_string()))
        }
    }
    match parse_expression(text, &NoNames).ok().and_then(|f| f.constant_value()) {
        Some(r) => Ok(r),
        None => a.error(format!("expected a number, found `{text}`")),
    }
}

fn integer(text: &str, a: &Attr) -> Result<i64> {
    let r = constant(text, a)?;
    if !r.is_integer() {
        return a.error(format!("expected an integer, found `{text}`"));
    }
    r.to_integer().try_into().or_else(|_| a.error("integer out of range"))
}

fn text_value(a: &Attr) -> Result<String> {
    match &a.kind {
        AttrKind::Assign(Value::Str(s)) | AttrKind::Assign(Value::Word(s)) => Ok(s.clone()),
        AttrKind::Assign(Value::List(items)) if items.len() == 1 => Ok(item_text(&items[0]).to_string()),
        _ => a.error(format!("`{}` expects a string", a.name)),
    }
}

fn list_value(a: &Attr) -> Result<Vec<Item>> {
    match &a.kind {
        AttrKind::Assign(Value::List(items)) => Ok(items.clone()),
        AttrKind::Assign(Value::Str(s)) => Ok(vec![Item::Str(s.clone())]),
        _ => a.error(format!("`{}` expects a parenthesized list", a.name)),
    }
}

fn interval(a: &Attr) -> Result<Domain> {
    let items = list_value(a)?;
    if items.len() != 2 {
        return a.error("range needs two bounds");
    }
    Ok(Domain::Interval(constant(item_text(&items[0]), a)?, constant(item_text(&items[1]), a)?))
}

fn states(a: &Attr) -> Result<Domain> {
    match &a.kind {
        AttrKind::Assign(Value::Word(w)) if w == "binary" => Ok(Domain::binary()),
        AttrKind::Assign(Value::Call(f, items)) if f == "range" => {
            if items.len() != 2 {
                return a.error("range needs two bounds");
            }
            let (lo, hi) = (integer(item_text(&items[0]), a)?, integer(item_text(&items[1]), a)?);
            if lo > hi {
                return a.error("empty range");
            }
            Ok(Domain::range(lo, hi))
        }
        AttrKind::Assign(Value::Call(f, items)) if f == "values" => {
            if items.is_empty() {
                return a.error("values needs at least one state");
            }
            let labels: Vec<&str> = items.iter().map(item_text).collect();
            for (i, l) in labels.iter().enumerate() {
                if labels[..i].contains(l) {
                    return a.error(format!("duplicate state `{l}`"));
                }
            }
            Ok(Domain::values(&labels))
        }
        _ => a.error("states must be binary, range(a,b) or values(...)"),
    }
}

struct Labels {
    label: Option<String>,
    tex: Option<String>,
}

fn common(a: &Attr, l: &mut Labels) -> Result<bool> {
    match a.name.as_str() {
        "label" => l.label = Some(text_value(a)?),
        "tex" => l.tex = Some(text_value(a)?),
        _ => return Ok(false),
    }
    Ok(true)
}

fn unknown<T>(a: &Attr, what: &str) -> Result<T> {
    a.error(format!("unknown attribute `{}` for {what}", a.name))
}

struct PendingTarget {
    name: String,
    label: Option<String>,
    function: Option<(Vec<String>, String)>,
}

/// Parses and validates a model source.
pub fn parse_model(text: &str) -> Result<Model> {
    let mut p = Parser { src: text, c: Cursor::new(text)? };
    let stmts = p.statements()?;
    let mut model = Model::new();
    let mut decisions = Vec::new();
    let mut pending: Vec<PendingTarget> = Vec::new();

    for s in &stmts {
        match &s.decl {
            Decl::Parameter { name, attrs } | Decl::Decision { name, attrs } => {
                let decision = matches!(s.decl, Decl::Decision { .. });
                let mut labels = Labels { label: None, tex: None };
                let mut domain = if decision {
                    Domain::Finite(vec![Rational::from_integer(0.into()), Rational::from_integer(1.into())])
                } else {
                    Domain::unit_interval()
                };
                for a in attrs {
                    if common(a, &mut labels)? {
                        continue;
                    }
                    match a.name.as_str() {
                        "range" => domain = interval(a)?,
                        "states" => match &a.kind {
                            AttrKind::Assign(Value::Call(f, items)) if f == "values" => {
                                let vals = items.iter().map(|i| constant(item_text(i), a)).collect::<Result<Vec<_>>>()?;
                                if vals.is_empty() {
                                    return a.error("values needs at least one value");
                                }
                                domain = Domain::Finite(vals);
                            }
                            _ => return a.error("parameter states must be values(...)"),
                        },
                        _ => return unknown(a, "a parameter"),
                    }
                }
                model.add_parameter(name, domain).map_err(|e| at(s, e))?;
                let v = model.parameters.last_mut().expect("just added");
                v.label = labels.label;
                v.tex = labels.tex;
                if decision {
                    decisions.push(canonical_name(name));
                }
            }
            Decl::Primary { name, attrs } => {
                let mut labels = Labels { label: None, tex: None };
                let mut domain = Domain::binary();
                for a in attrs {
                    if common(a, &mut labels)? {
                        continue;
                    }
                    match a.name.as_str() {
                        "states" => domain = states(a)?,
                        _ => return unknown(a, "a primary"),
                    }
                }
                let i = model.add_primary(name, domain).map_err(|e| at(s, e))?;
                model.primaries[i].label = labels.label;
                model.primaries[i].tex = labels.tex;
            }
            Decl::Utility { name, attrs } => {
                let mut labels = Labels { label: None, tex: None };
                for a in attrs {
                    if common(a, &mut labels)? || a.name == "range" {
                        continue;
                    }
                    return unknown(a, "a utility");
                }
                if pending.iter().any(|t| &t.name == name) || model.primary_index(name).is_some() {
                    return Err(at(s, Error::Duplicate(name.clone())));
                }
                pending.push(PendingTarget { name: name.clone(), label: labels.label.or(labels.tex), function: None });
            }
            Decl::Clique { name } => {
                if model.cliques.iter().any(|c| &c.name == name) {
                    return Err(at(s, Error::Duplicate(name.clone())));
                }
                model.cliques.push(Clique { name: name.clone(), members: Vec::new() });
            }
            _ => {}
        }
    }

    let mut settings: Vec<(String, String, &Stmt)> = Vec::new();
    for s in &stmts {
        match &s.decl {
            Decl::Table { clique, targets, parents, attrs } => {
                if targets.iter().all(|t| decisions.contains(&canonical_name(t))) {
                    // Decision sequencing carries no probabilities.
                    continue;
                }
                if let Some(t) = pending.iter_mut().find(|t| targets.len() == 1 && t.name == targets[0]) {
                    let mut function = None;
                    for a in attrs {
                        match a.name.as_str() {
                            "function" => function = Some(text_value(a)?),
                            _ => return unknown(a, "a utility table"),
                        }
                    }
                    let Some(f) = function else {
                        return Err(at(s, Error::Model(format!("utility `{}` needs a function", t.name))));
                    };
                    t.function = Some((parents.clone(), f));
                    continue;
                }
                build_table(&mut model, clique.clone(), targets, parents, attrs).map_err(|e| at(s, e))?;
            }
            Decl::Constraint { text } => {
                let (l, rel, r) = parse_relation(text, &RegistryResolver(&model.registry)).map_err(|e| at(s, e))?;
                let (Some(l), Some(r)) = (l.as_polynomial(), r.as_polynomial()) else {
                    return Err(at(s, Error::Model(format!("constraint `{text}` is not polynomial"))));
                };
                model.add_constraint(Constraint::user(l, rel, r)).map_err(|e| at(s, e))?;
            }
            Decl::Net { attrs } => {
                for a in attrs {
                    match a.name.as_str() {
                        "graph" => model.hints.push(text_value(a)?),
                        _ => return unknown(a, "net"),
                    }
                }
            }
            Decl::Set { name, value } => settings.push((name.clone(), value.clone(), s)),
            _ => {}
        }
    }

    for t in pending {
        let Some((parents, text)) = t.function else {
            return Err(Error::Model(format!("utility `{}` has no function", t.name)));
        };
        let poly = parse_polynomial(&text, &model.registry)?;
        model.targets.push(Target { name: t.name, label: t.label, parents, text, poly });
    }

    if !settings.is_empty() {
        let mut assignment = BTreeMap::new();
        let mut order = Vec::new();
        for (name, value, s) in settings {
            let var = model
                .parameter(&name)
                .and_then(|p| p.var)
                .ok_or_else(|| at(s, Error::UnknownIdentifier(name.clone())))?;
            let a = Attr { name: name.clone(), kind: AttrKind::Flag, line: s.line, col: s.col };
            let r = constant(&value, &a)?;
            assignment.insert(var, r.clone());
            order.retain(|(v, _)| *v != var);
            order.push((var, r));
        }
        let targets = model.targets.clone();
        model = model.instantiate(&assignment)?;
        model.targets = targets;
        model.settings = order;
    }

    model.validate()?;
    Ok(model)
}

fn at(s: &Stmt, e: Error) -> Error {
    match e {
        Error::Syntax { .. } | Error::Invalid(_) => e,
        other => Error::Model(format!("line {}: {other}", s.line)),
    }
}

fn build_table(
    model: &mut Model,
    clique: Option<String>,
    targets: &[String],
    parents: &[String],
    attrs: &[Attr],
) -> Result<()> {
    let target_idx = targets
        .iter()
        .map(|n| model.primary_index(n).ok_or_else(|| Error::UnknownIdentifier(n.clone())))
        .collect::<Result<Vec<_>>>()?;
    let parent_idx = parents
        .iter()
        .map(|n| model.primary_index(n).ok_or_else(|| Error::UnknownIdentifier(n.clone())))
        .collect::<Result<Vec<_>>>()?;
    let mut verify = true;
    let mut table: Option<ComponentTable> = None;
    let set = |table: &mut Option<ComponentTable>, t: ComponentTable, a: &Attr| -> Result<()> {
        if table.is_some() {
            return a.error("table entries given twice");
        }
        *table = Some(t);
        Ok(())
    };
    for a in attrs {
        match a.name.as_str() {
            "noverify" => verify = false,
            "verify" => verify = true,
            "data" => {
                let items = list_value(a)?;
                let resolver = RegistryResolver(&model.registry);
                let entries = items
                    .iter()
                    .map(|i| match i {
                        Item::Expr(e) => super::parse_polynomial_with(e, &resolver),
                        Item::Str(_) => a.error("data entries are expressions, not strings"),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let t = ComponentTable::new(target_idx.clone(), parent_idx.clone(), entries, TableSource::Data);
                set(&mut table, t, a)?;
            }
            "function" => {
                let text = text_value(a)?;
                if targets.len() != 1 {
                    return a.error("a function table has exactly one target");
                }
                let f = parse_formula(&text)?;
                let t = if f.variables().contains(&targets[0]) {
                    guard_to_cpt(model, &targets[0], parents, &f, &text)?
                } else {
                    let def = EmbeddedDefinition { target: targets[0].clone(), formula: f };
                    formula_to_cpt(model, &def, parents)?
                };
                set(&mut table, t, a)?;
            }
            "parametric" => {
                let AttrKind::Call(items) = &a.kind else {
                    return a.error("expected parametric(prefix)");
                };
                let (prefix, mode) = match items.as_slice() {
                    [p] => (item_text(p).to_string(), None),
                    [p, m] => {
                        let mode = match item_text(m) {
                            "function" => ParametricMode::Function,
                            "distribution" => ParametricMode::Distribution,
                            other => return a.error(format!("unknown parametric mode `{other}`")),
                        };
                        (item_text(p).to_string(), Some(mode))
                    }
                    _ => return a.error("expected parametric(prefix)"),
                };
                let joint = targets.len() > 1 || clique.is_some() || parents.is_empty();
                let t = if joint {
                    let width: usize = model.dims(&target_idx).iter().product();
                    let rows: usize = model.dims(&parent_idx).iter().product();
                    let mode = mode.unwrap_or(ParametricMode::Distribution);
                    let params = model.fresh_parameters(&prefix, width * rows, mode)?;
                    let entries = params.iter().map(|&v| Polynomial::var(v)).collect();
                    ComponentTable::new(
                        target_idx.clone(),
                        parent_idx.clone(),
                        entries,
                        TableSource::Parametric { prefix, params },
                    )
                } else {
                    let mode = mode.unwrap_or(ParametricMode::Function);
                    parametric_function_cpt(model, &targets[0], parents, &prefix, mode)?.0
                };
                set(&mut table, t, a)?;
            }
            _ => return unknown(a, "a table"),
        }
    }
    let Some(mut table) = table else {
        return Err(Error::Model(format!("table for {} has no entries", targets.join(" "))));
    };
    table.verify = verify;
    table.clique = clique;
    model.add_table(table)
}
