//! Session state and command execution shared by the shell and the batch
//! processor.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use parapoly::dsl::{
    parse_command, parse_criteria, parse_expression, parse_model, parse_relation, serialize, Command, PrintFlags,
    RegistryResolver, Resolver, Statement,
};
use parapoly::inference::{pivot, query, DisplayOptions, Query, ResultTable};
use parapoly::network::{export_dot, Model, Rel};
use parapoly::optimize::{build_program, default_epsilon, expectation, Problem, Solution, DEFAULT_BUDGET};
use parapoly::polynomial::{parse_rational, simplify_quotient, Reduction};
use parapoly::search::{enumerate, instantiate_model, InstantiationTable, SearchSpec, DEFAULT_CAP};
use parapoly::{Error, FractionalPolynomial, Polynomial, Rational, Registry, Result};

/// Environment variable holding the default solver budget (boxes).
pub const BUDGET_ENV: &str = "PARAPOLY_BUDGET";

const HELP: &str = "\
load PATH                          load a model
table [$m] P... [| C...]           probability-table query
infer [$t]                         (re)run inference for a table
print [$h] [-index] [-all] [-unless [-exact]] [-pivot VAR]
item [$t] K                        K-th row of a table
expr [-unless] TEXT                evaluate an expression or relation; $t[K] is a table item
expect [$m] VAR                    expected value of a numeric primary
pprog [$m] -min|-max OBJ [CONSTRAINT...] [-aux NAMES]
show|solve|solution|point [$p]     inspect and solve an optimization problem
search [$m|$t] PARAM... [| TARGET...]
filter [$s] CRITERIA               e.g. zero(1) && nonzero(2)
instantiate [$m] NAME=VALUE...     fix parameters
dot|serialize|validate|constraints [$m]
set epsilon|budget|cap VALUE
handles | help | quit
Results are named with `name = command` or `command ... as name`.";

#[derive(Clone, Debug)]
pub enum Object {
    Model(Model),
    Table { table: ResultTable, model: String },
    Problem { problem: Problem, solution: Option<Solution> },
    Search { table: InstantiationTable, model: String },
}

impl Object {
    fn kind(&self) -> Kind {
        match self {
            Object::Model(_) => Kind::Model,
            Object::Table { .. } => Kind::Table,
            Object::Problem { .. } => Kind::Problem,
            Object::Search { .. } => Kind::Search,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    Model,
    Table,
    Problem,
    Search,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Model => "model",
            Kind::Table => "table",
            Kind::Problem => "problem",
            Kind::Search => "search",
        })
    }
}

impl Kind {
    fn prefix(self) -> &'static str {
        match self {
            Kind::Model => "m",
            Kind::Table => "t",
            Kind::Problem => "p",
            Kind::Search => "s",
        }
    }
}

/// What a command asks of the driver after running.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Continue(String),
    Quit,
}

pub struct Session {
    objects: BTreeMap<String, Object>,
    /// Most recent object of each kind, with its creation sequence number.
    last: BTreeMap<Kind, (usize, String)>,
    counter: usize,
    /// Directories searched for relative model paths after the working
    /// directory.
    pub search_path: Vec<PathBuf>,
    pub epsilon: Rational,
    pub budget: usize,
    pub cap: usize,
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

impl Session {
    pub fn new() -> Self {
        let budget = std::env::var(BUDGET_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET);
        Session {
            objects: BTreeMap::new(),
            last: BTreeMap::new(),
            counter: 0,
            search_path: Vec::new(),
            epsilon: default_epsilon(),
            budget,
            cap: DEFAULT_CAP,
        }
    }

    pub fn get(&self, name: &str) -> Option<&Object> {
        self.objects.get(name)
    }

    /// Parses and runs one line.
    pub fn execute_line(&mut self, line: &str) -> Result<Outcome> {
        match parse_command(line)? {
            None => Ok(Outcome::Continue(String::new())),
            Some(stmt) => self.execute(stmt),
        }
    }

    fn store(&mut self, name: Option<String>, obj: Object) -> String {
        let kind = obj.kind();
        let name = name.unwrap_or_else(|| loop {
            self.counter += 1;
            let n = format!("{}{}", kind.prefix(), self.counter);
            if !self.objects.contains_key(&n) {
                break n;
            }
        });
        self.objects.insert(name.clone(), obj);
        self.counter += 1;
        self.last.insert(kind, (self.counter, name.clone()));
        name
    }

    fn resolve(&self, handle: &Option<String>, kinds: &[Kind]) -> Result<String> {
        match handle {
            Some(h) => match self.objects.get(h) {
                Some(o) if kinds.contains(&o.kind()) => Ok(h.clone()),
                Some(o) => Err(Error::Query(format!("${h} is a {}, not a {}", o.kind(), kinds[0]))),
                None => Err(Error::UnknownIdentifier(format!("${h}"))),
            },
            None => kinds
                .iter()
                .filter_map(|k| self.last.get(k))
                .max()
                .map(|(_, n)| n.clone())
                .ok_or_else(|| Error::Query(format!("no {} yet", kinds[0]))),
        }
    }

    fn model(&self, handle: &Option<String>) -> Result<(String, &Model)> {
        let name = self.resolve(handle, &[Kind::Model])?;
        match &self.objects[&name] {
            Object::Model(m) => Ok((name, m)),
            _ => unreachable!("resolved to a model"),
        }
    }

    fn table(&self, handle: &Option<String>) -> Result<(&ResultTable, &str)> {
        let name = self.resolve(handle, &[Kind::Table])?;
        match &self.objects[&name] {
            Object::Table { table, model } => Ok((table, model)),
            _ => unreachable!("resolved to a table"),
        }
    }

    fn locate(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() || p.exists() {
            return p.to_path_buf();
        }
        self.search_path.iter().map(|d| d.join(p)).find(|c| c.exists()).unwrap_or_else(|| p.to_path_buf())
    }

    /// Registry for free-standing expressions: the first referenced table's,
    /// otherwise the most recent model's.
    fn expr_registry(&self, text: &str) -> Result<Registry> {
        for name in handle_refs(text) {
            if let Some(Object::Table { table, .. }) = self.objects.get(&name) {
                return Ok(table.registry.clone());
            }
        }
        Ok(self.model(&None)?.1.registry.clone())
    }

    fn solve(&mut self, handle: &Option<String>) -> Result<&Solution> {
        let name = self.resolve(handle, &[Kind::Problem])?;
        let budget = self.budget;
        let Some(Object::Problem { problem, solution }) = self.objects.get_mut(&name) else {
            unreachable!("resolved to a problem")
        };
        if solution.is_none() {
            *solution = Some(problem.solve(budget)?);
        }
        Ok(solution.as_ref().expect("just solved"))
    }

    pub fn execute(&mut self, stmt: Statement) -> Result<Outcome> {
        let Statement { name, command } = stmt;
        let out = match command {
            Command::Load { path } => {
                let file = self.locate(&path);
                let text = std::fs::read_to_string(&file)
                    .map_err(|e| Error::Model(format!("cannot read {}: {e}", file.display())))?;
                let model = parse_model(&text)?;
                self.store(name, Object::Model(model));
                String::new()
            }
            Command::Table { model, principal, conditioning } => {
                let (mname, m) = self.model(&model)?;
                let p: Vec<&str> = principal.iter().map(String::as_str).collect();
                let c: Vec<&str> = conditioning.iter().map(String::as_str).collect();
                let q = Query::new(m, &p, &c)?;
                let table = query(m, &q)?;
                self.store(name, Object::Table { table, model: mname });
                String::new()
            }
            Command::Infer { handle } => {
                self.table(&handle)?;
                String::new()
            }
            Command::Print { handle, flags } => self.print(&handle, &flags)?,
            Command::Item { handle, index } => {
                let (t, _) = self.table(&handle)?;
                let v = t.item(index)?;
                t.render_value(v, &DisplayOptions::default())
            }
            Command::Expr { unless, text } => {
                let reg = self.expr_registry(&text)?;
                let r = SessionResolver { session: self, reg: &reg };
                if has_relation(&text) {
                    let (l, rel, rv) = parse_relation(&text, &r)?;
                    let op = if rel == Rel::Eq { "==" } else { rel.symbol() };
                    format!("{} {op} {}", render_expr(&l, &reg, unless)?, render_expr(&rv, &reg, unless)?)
                } else {
                    render_expr(&parse_expression(&text, &r)?, &reg, unless)?
                }
            }
            Command::Expect { model, var } => {
                let (_, m) = self.model(&model)?;
                expectation(m, &var)?.to_string_with(&m.registry)
            }
            Command::Pprog { model, sense, objective, constraints, aux } => {
                let (_, m) = self.model(&model)?;
                let reg = m.registry.clone();
                let mut aux_vars = Vec::new();
                for a in &aux {
                    if reg.lookup(a).is_some() {
                        return Err(Error::Duplicate(a.clone()));
                    }
                    aux_vars.push(reg.var(a));
                }
                let r = SessionResolver { session: self, reg: &reg };
                let obj = parse_expression(&objective, &r)?;
                let rels = constraints.iter().map(|c| parse_relation(c, &r)).collect::<Result<Vec<_>>>()?;
                let problem = build_program(m, sense, obj, &rels, &aux_vars, &self.epsilon)?;
                self.store(name, Object::Problem { problem, solution: None });
                String::new()
            }
            Command::Show { handle } => {
                let n = self.resolve(&handle, &[Kind::Problem])?;
                let Object::Problem { problem, .. } = &self.objects[&n] else { unreachable!("resolved to a problem") };
                problem.render().trim_end_matches('\n').to_string()
            }
            Command::Solve { handle } => {
                self.solve(&handle)?;
                String::new()
            }
            Command::Solution { handle } => self.solve(&handle)?.render_value(),
            Command::Point { handle } => {
                let n = self.resolve(&handle, &[Kind::Problem])?;
                self.solve(&handle)?;
                let Object::Problem { problem, solution: Some(s) } = &self.objects[&n] else {
                    unreachable!("solved above")
                };
                s.render_point(&problem.registry)
            }
            Command::Search { handle, params, targets } => {
                let (mname, targets_fp) = self.search_targets(&handle, &targets)?;
                let Object::Model(m) = &self.objects[&mname] else { unreachable!("search model") };
                let ps: Vec<&str> = params.iter().map(String::as_str).collect();
                let spec = SearchSpec::new(m, &ps, targets_fp)?;
                let table = enumerate(&spec, &m.registry, self.cap)?;
                self.store(name, Object::Search { table, model: mname });
                String::new()
            }
            Command::Filter { handle, criteria } => {
                let n = self.resolve(&handle, &[Kind::Search])?;
                let Object::Search { table, .. } = &self.objects[&n] else { unreachable!("resolved to a search") };
                let c = parse_criteria(&criteria, &table.target_names)?;
                let matches = table.filter(&c, self.budget)?;
                let rows = table.rows.iter().filter(|r| matches.iter().any(|m| m.index == r.index));
                table.render_rows(rows).trim_end_matches('\n').to_string()
            }
            Command::Instantiate { model, assignment } => {
                let (_, m) = self.model(&model)?;
                let mut values = Vec::new();
                for (k, v) in &assignment {
                    let r = parse_rational(v).ok_or_else(|| Error::TypeMismatch(format!("`{v}` is not a number")))?;
                    values.push((k.as_str(), r));
                }
                let m2 = instantiate_model(m, &values)?;
                self.store(name, Object::Model(m2));
                String::new()
            }
            Command::Dot { model } => export_dot(self.model(&model)?.1).trim_end_matches('\n').to_string(),
            Command::Serialize { model } => serialize(self.model(&model)?.1).trim_end_matches('\n').to_string(),
            Command::Validate { model } => {
                self.model(&model)?.1.validate()?;
                "ok".to_string()
            }
            Command::Constraints { model } => {
                let (_, m) = self.model(&model)?;
                let cs = m.all_constraints();
                let mut lines: Vec<String> = cs.constraints.iter().map(|c| c.render(&m.registry)).collect();
                lines.extend(cs.bounds.iter().map(|b| b.render(&m.registry)));
                lines.join("\n")
            }
            Command::Set { key, value } => {
                self.set(&key, &value)?;
                String::new()
            }
            Command::Handles => {
                let mut lines = Vec::new();
                for (n, o) in &self.objects {
                    lines.push(format!("{n}\t{}", o.kind()));
                }
                lines.join("\n")
            }
            Command::Help => HELP.to_string(),
            Command::Quit => return Ok(Outcome::Quit),
        };
        Ok(Outcome::Continue(out))
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::TypeMismatch(format!("bad value `{value}` for `{key}`"));
        match key {
            "epsilon" => {
                let e = parse_rational(value).filter(|e| *e > Rational::from_integer(0.into())).ok_or_else(bad)?;
                self.epsilon = e;
            }
            "budget" => self.budget = value.parse().ok().filter(|&b| b > 0).ok_or_else(bad)?,
            "cap" => self.cap = value.parse().ok().filter(|&c| c > 0).ok_or_else(bad)?,
            _ => return Err(Error::UnknownIdentifier(key.to_string())),
        }
        Ok(())
    }

    fn print(&self, handle: &Option<String>, flags: &PrintFlags) -> Result<String> {
        let name = self.resolve(handle, &[Kind::Table, Kind::Search, Kind::Problem])?;
        let text = match &self.objects[&name] {
            Object::Table { table, .. } => {
                let opts = DisplayOptions {
                    index: flags.index,
                    all: flags.all,
                    unless: flags.unless.then_some(if flags.exact { Reduction::Exact } else { Reduction::Monomial }),
                };
                match &flags.pivot {
                    Some(v) => pivot(table, v, flags.all)?.render(table, &opts),
                    None => table.render(&opts),
                }
            }
            Object::Search { table, .. } => table.render(),
            Object::Problem { problem, .. } => problem.render(),
            Object::Model(m) => serialize(m),
        };
        Ok(text.trim_end_matches('\n').to_string())
    }

    /// The model behind a search and its target quotients. Without explicit
    /// targets, the model's declared utilities are used.
    fn search_targets(
        &self,
        handle: &Option<String>,
        targets: &[String],
    ) -> Result<(String, Vec<(String, FractionalPolynomial)>)> {
        let name = self.resolve(handle, &[Kind::Model, Kind::Table])?;
        let mname = match &self.objects[&name] {
            Object::Model(_) => name.clone(),
            Object::Table { model, .. } => model.clone(),
            _ => unreachable!("resolved to a model or table"),
        };
        let Some(Object::Model(m)) = self.objects.get(&mname) else {
            return Err(Error::UnknownIdentifier(format!("${mname}")));
        };
        if targets.is_empty() {
            if let Object::Table { table, .. } = &self.objects[&name] {
                let out = table.rows.iter().map(|r| (format!("${name}[{}]", r.index), r.value.clone())).collect();
                return Ok((mname, out));
            }
            if m.targets.is_empty() {
                return Err(Error::Search("no targets given and the model declares no utilities".into()));
            }
            let out = m.targets.iter().map(|t| (t.name.clone(), t.poly.clone().into())).collect();
            return Ok((mname, out));
        }
        let r = SessionResolver { session: self, reg: &m.registry };
        let mut out = Vec::new();
        for t in targets {
            out.push((t.clone(), parse_expression(t, &r)?));
        }
        Ok((mname, out))
    }
}

/// `$name` references in expression text.
fn handle_refs(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(i) = rest.find('$') {
        rest = &rest[i + 1..];
        let n: String = rest.chars().take_while(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
        if !n.is_empty() {
            out.push(n);
        }
    }
    out
}

fn has_relation(text: &str) -> bool {
    ["==", "<=", ">=", "<", ">", "="].iter().any(|op| text.contains(op))
}

fn render_expr(v: &FractionalPolynomial, reg: &Registry, unless: bool) -> Result<String> {
    if unless {
        return Ok(simplify_quotient(v)?.render(reg));
    }
    Ok(match v.as_polynomial() {
        Some(p) => p.to_string_with(reg),
        None => v.display_quotient(reg).to_string(),
    })
}

struct SessionResolver<'a> {
    session: &'a Session,
    reg: &'a Registry,
}

impl Resolver for SessionResolver<'_> {
    fn ident(&self, name: &str) -> Result<Polynomial> {
        RegistryResolver(self.reg).ident(name)
    }

    fn handle(&self, name: &str, index: usize) -> Result<FractionalPolynomial> {
        match self.session.objects.get(name) {
            Some(Object::Table { table, .. }) => {
                if !table.registry.same(self.reg) {
                    return Err(Error::Query(format!("${name} belongs to a different model")));
                }
                Ok(table.item(index)?.clone())
            }
            Some(o) => Err(Error::Query(format!("${name} is a {}, not a table", o.kind()))),
            None => Err(Error::UnknownIdentifier(format!("${name}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session() -> Session {
        let mut s = Session::new();
        s.search_path.push(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models"));
        s
    }

    fn run(s: &mut Session, line: &str) -> String {
        match s.execute_line(line).unwrap() {
            Outcome::Continue(text) => text,
            Outcome::Quit => panic!("unexpected quit"),
        }
    }

    #[test]
    fn default_handle_is_most_recent() {
        let mut s = session();
        run(&mut s, "a = load butter.pql");
        run(&mut s, "b = load basic1.pql");
        run(&mut s, "table R");
        run(&mut s, "load butter.pql as c");
        run(&mut s, "u = table C_1");
        assert!(matches!(s.get("u"), Some(Object::Table { model, .. }) if model == "c"));
        run(&mut s, "v = table $b Q");
        assert!(matches!(s.get("v"), Some(Object::Table { model, .. }) if model == "b"));
        assert!(s.execute_line("table $a R").is_err());
    }

    #[test]
    fn automatic_names_are_unique() {
        let mut s = session();
        run(&mut s, "load basic1.pql");
        run(&mut s, "table P");
        run(&mut s, "table Q");
        let names: Vec<&String> = s.objects.keys().collect();
        assert_eq!(names.len(), 3);
        assert!(names.iter().any(|n| n.starts_with('m')));
        assert_eq!(names.iter().filter(|n| n.starts_with('t')).count(), 2);
    }

    #[test]
    fn handles_of_the_wrong_kind_are_rejected() {
        let mut s = session();
        run(&mut s, "m = load basic1.pql");
        let err = s.execute_line("print $m -index").unwrap_err().to_string();
        assert!(err.contains("$m"), "{err}");
        let err = s.execute_line("item $nothing 1").unwrap_err().to_string();
        assert!(err.contains("$nothing"), "{err}");
    }

    #[test]
    fn quit_and_blank_lines() {
        let mut s = session();
        assert_eq!(s.execute_line("   ").unwrap(), Outcome::Continue(String::new()));
        assert_eq!(s.execute_line("quit").unwrap(), Outcome::Quit);
    }

    #[test]
    fn settings_take_effect() {
        let mut s = session();
        run(&mut s, "set budget 17");
        assert_eq!(s.budget, 17);
        run(&mut s, "set epsilon 1/100");
        assert_eq!(s.epsilon, parse_rational("1/100").unwrap());
        assert!(s.execute_line("set colour red").is_err());
    }
}
