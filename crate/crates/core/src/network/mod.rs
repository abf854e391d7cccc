//! Parametric probability network: variables, component tables, constraints.

mod dot;

pub use dot::export_dot;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::embed::{ParametricMode, Value};
use crate::error::{Error, Result};
use crate::polynomial::{fmt_signed, parse_rational, rat, Polynomial, Rational, Registry, Var};

/// One state of a primary variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub label: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Ordered states of a primary variable.
    States(Vec<State>),
    /// Closed real interval of a parameter.
    Interval(Rational, Rational),
    /// Finite value set of a parameter (decision scaffolding).
    Finite(Vec<Rational>),
}

impl Domain {
    pub fn binary() -> Domain {
        Domain::States(vec![
            State { label: "T".into(), value: Value::Bool(true) },
            State { label: "F".into(), value: Value::Bool(false) },
        ])
    }

    /// Integers `a..=b` in increasing order.
    pub fn range(a: i64, b: i64) -> Domain {
        Domain::States(
            (a..=b)
                .map(|k| State { label: k.to_string(), value: Value::Num(rat(k)) })
                .collect(),
        )
    }

    /// Explicit values; numeric labels become numbers, others symbols.
    pub fn values<S: AsRef<str>>(labels: &[S]) -> Domain {
        Domain::States(
            labels
                .iter()
                .map(|l| {
                    let l = l.as_ref();
                    let value = match l {
                        "T" => Value::Bool(true),
                        "F" => Value::Bool(false),
                        _ => parse_rational(l).map(Value::Num).unwrap_or_else(|| Value::Sym(l.to_string())),
                    };
                    State { label: l.to_string(), value }
                })
                .collect(),
        )
    }

    pub fn unit_interval() -> Domain {
        Domain::Interval(Rational::zero(), Rational::one())
    }

    /// Lower and upper bound of a parameter domain.
    pub fn bounds(&self) -> Option<(Rational, Rational)> {
        match self {
            Domain::States(_) => None,
            Domain::Interval(lo, hi) => Some((lo.clone(), hi.clone())),
            Domain::Finite(vals) => Some((vals.iter().min()?.clone(), vals.iter().max()?.clone())),
        }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        match self {
            Domain::States(_) => false,
            Domain::Interval(lo, hi) => lo <= v && v <= hi,
            Domain::Finite(vals) => vals.contains(v),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Primary,
    Parameter,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub role: Role,
    pub domain: Domain,
    pub label: Option<String>,
    pub tex: Option<String>,
    pub deterministic: bool,
    /// Registry handle (parameters only).
    pub var: Option<Var>,
    /// Value fixed by instantiation (parameters only).
    pub fixed: Option<Rational>,
    /// Created by a `parametric(...)` table rather than declared.
    pub generated: bool,
}

impl Variable {
    pub fn primary(name: &str, domain: Domain) -> Variable {
        Variable {
            name: name.to_string(),
            role: Role::Primary,
            domain,
            label: None,
            tex: None,
            deterministic: false,
            var: None,
            fixed: None,
            generated: false,
        }
    }

    pub fn states(&self) -> &[State] {
        match &self.domain {
            Domain::States(s) => s,
            _ => &[],
        }
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states().iter().position(|s| s.label == label)
    }
}

/// Canonical parameter spelling: `t[1]` and `x_1` become `t1` and `x1`.
pub fn canonical_name(name: &str) -> String {
    if let Some(open) = name.find('[') {
        if let Some(inner) = name[open + 1..].strip_suffix(']') {
            if !inner.is_empty() && inner.chars().all(|c| c.is_ascii_digit()) {
                return format!("{}{}", &name[..open], inner);
            }
        }
    }
    if let Some(us) = name.rfind('_') {
        let (head, tail) = (&name[..us], &name[us + 1..]);
        if !head.is_empty() && !tail.is_empty() && tail.chars().all(|c| c.is_ascii_digit()) {
            return format!("{head}{tail}");
        }
    }
    name.to_string()
}

/// Where a table's entries came from; used to serialize models back to source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableSource {
    Data,
    Function(String),
    Formula(String),
    Parametric { prefix: String, params: Vec<Var> },
    Builtin,
}

/// Conditional table of one primary, or joint table of a clique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentTable {
    pub targets: Vec<usize>,
    pub parents: Vec<usize>,
    /// Row-major entries: parent rows, then target combinations, last
    /// variable varying fastest in both.
    pub entries: Vec<Polynomial>,
    pub verify: bool,
    pub clique: Option<String>,
    pub source: TableSource,
}

impl ComponentTable {
    pub fn new(targets: Vec<usize>, parents: Vec<usize>, entries: Vec<Polynomial>, source: TableSource) -> Self {
        ComponentTable { targets, parents, entries, verify: true, clique: None, source }
    }

    pub fn parameters(&self) -> BTreeSet<Var> {
        self.entries.iter().flat_map(|e| e.variables()).collect()
    }

    /// Sum of each parent row.
    pub fn row_sums(&self, width: usize) -> Vec<Polynomial> {
        if width == 0 {
            return Vec::new();
        }
        self.entries
            .chunks(width)
            .map(|row| row.iter().fold(Polynomial::zero(), |acc, e| &acc + e))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Eq,
    Le,
    Ge,
    Lt,
    Gt,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Le => "<=",
            Rel::Ge => ">=",
            Rel::Lt => "<",
            Rel::Gt => ">",
        }
    }

    pub fn flip(self) -> Rel {
        match self {
            Rel::Eq => Rel::Eq,
            Rel::Le => Rel::Ge,
            Rel::Ge => Rel::Le,
            Rel::Lt => Rel::Gt,
            Rel::Gt => Rel::Lt,
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Rel::Lt | Rel::Gt)
    }

    /// Whether `d REL 0`.
    pub fn sign_holds(self, d: &Rational) -> bool {
        match self {
            Rel::Eq => d.is_zero(),
            Rel::Le => !d.is_positive(),
            Rel::Ge => !d.is_negative(),
            Rel::Lt => d.is_negative(),
            Rel::Gt => d.is_positive(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    User,
    System,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub lhs: Polynomial,
    pub rel: Rel,
    pub rhs: Polynomial,
    pub origin: Origin,
}

impl Constraint {
    pub fn user(lhs: Polynomial, rel: Rel, rhs: Polynomial) -> Self {
        Constraint { lhs, rel, rhs, origin: Origin::User }
    }

    pub fn system(lhs: Polynomial, rel: Rel, rhs: Polynomial) -> Self {
        Constraint { lhs, rel, rhs, origin: Origin::System }
    }

    /// `lhs - rhs`, to be compared against zero with `rel`.
    pub fn difference(&self) -> Polynomial {
        &self.lhs - &self.rhs
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut v = self.lhs.variables();
        v.extend(self.rhs.variables());
        v
    }

    /// Exact satisfaction test at a point.
    pub fn holds(&self, point: &BTreeMap<Var, Rational>, reg: &Registry) -> Result<bool> {
        let d = self.difference().evaluate(point, reg)?;
        Ok(self.rel.sign_holds(&d))
    }

    pub fn substitute_values(&self, values: &BTreeMap<Var, Rational>) -> Constraint {
        Constraint {
            lhs: self.lhs.substitute_values(values),
            rel: self.rel,
            rhs: self.rhs.substitute_values(values),
            origin: self.origin,
        }
    }

    /// Renders with positive terms on the left and negative terms on the right.
    /// Equations are first signed so their lowest-order variable term is positive.
    pub fn render(&self, reg: &Registry) -> String {
        let mut diff = self.difference();
        if self.rel == Rel::Eq {
            let first = diff.terms().find(|(m, _)| !m.is_one()).map(|(_, c)| c.is_negative());
            if first == Some(true) {
                diff = -&diff;
            }
        }
        let (pos, neg) = diff.split_signs();
        format!("{} {} {}", pos.display(reg), self.rel.symbol(), neg.display(reg))
    }
}

/// Closed bound `lo <= var <= hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub var: Var,
    pub lo: Rational,
    pub hi: Rational,
}

impl Bound {
    pub fn render(&self, reg: &Registry) -> String {
        let name = reg.name(self.var);
        if self.lo == self.hi {
            format!("{name} = {}", fmt_signed(&self.lo))
        } else {
            format!("{} <= {name} <= {}", fmt_signed(&self.lo), fmt_signed(&self.hi))
        }
    }
}

/// Bounds plus general constraints.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pub bounds: Vec<Bound>,
    pub constraints: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty() && self.constraints.is_empty()
    }

    pub fn bound(&self, v: Var) -> Option<&Bound> {
        self.bounds.iter().find(|b| b.var == v)
    }

    /// Adds or tightens the bound of `var`.
    pub fn set_bound(&mut self, var: Var, lo: Rational, hi: Rational) {
        match self.bounds.iter_mut().find(|b| b.var == var) {
            Some(b) => {
                if lo > b.lo {
                    b.lo = lo;
                }
                if hi < b.hi {
                    b.hi = hi;
                }
            }
            None => self.bounds.push(Bound { var, lo, hi }),
        }
    }

    pub fn push(&mut self, c: Constraint) {
        if !self.constraints.contains(&c) {
            self.constraints.push(c);
        }
    }

    /// True when every bound and constraint holds exactly at `point`.
    pub fn feasible(&self, point: &BTreeMap<Var, Rational>, reg: &Registry) -> Result<bool> {
        for b in &self.bounds {
            let v = point.get(&b.var).ok_or_else(|| Error::Unbound(reg.name(b.var)))?;
            if v < &b.lo || v > &b.hi {
                return Ok(false);
            }
        }
        for c in &self.constraints {
            if !c.holds(point, reg)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clique {
    pub name: String,
    pub members: Vec<usize>,
}

/// Named polynomial target declared with `utility`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub name: String,
    pub label: Option<String>,
    pub parents: Vec<String>,
    pub text: String,
    pub poly: Polynomial,
}

/// Directed and undirected structure implied by the tables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NetworkGraph {
    pub nodes: Vec<String>,
    /// Directed edges between primaries, parent to child.
    pub edges: BTreeSet<(usize, usize)>,
    /// Parameter to primary edges (by primary index).
    pub parameter_edges: BTreeSet<(Var, usize)>,
    pub cliques: Vec<Clique>,
}

#[derive(Clone, Debug, Default)]
pub struct Model {
    pub registry: Registry,
    pub primaries: Vec<Variable>,
    pub parameters: Vec<Variable>,
    pub tables: Vec<ComponentTable>,
    pub constraints: Vec<Constraint>,
    pub cliques: Vec<Clique>,
    pub hints: Vec<String>,
    /// `utility` targets, in declaration order.
    pub targets: Vec<Target>,
    /// Values assigned with `set`, in statement order.
    pub settings: Vec<(Var, Rational)>,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.registry.names() == other.registry.names()
            && self.primaries == other.primaries
            && self.parameters == other.parameters
            && self.tables == other.tables
            && self.constraints == other.constraints
            && self.cliques == other.cliques
            && self.hints == other.hints
            && self.targets == other.targets
            && self.settings == other.settings
    }
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn primary_index(&self, name: &str) -> Option<usize> {
        self.primaries.iter().position(|v| v.name == name)
    }

    pub fn parameter(&self, name: &str) -> Option<&Variable> {
        let canon = canonical_name(name);
        self.parameters.iter().find(|p| p.name == canon)
    }

    pub fn parameter_by_var(&self, v: Var) -> Option<&Variable> {
        self.parameters.iter().find(|p| p.var == Some(v))
    }

    fn name_taken(&self, name: &str) -> bool {
        self.primary_index(name).is_some() || self.parameter(name).is_some()
    }

    pub fn add_primary(&mut self, name: &str, domain: Domain) -> Result<usize> {
        if self.name_taken(name) {
            return Err(Error::Duplicate(name.to_string()));
        }
        if let Domain::States(s) = &domain {
            if s.is_empty() {
                return Err(Error::Model(format!("primary `{name}` has an empty domain")));
            }
        } else {
            return Err(Error::Model(format!("primary `{name}` needs a finite state list")));
        }
        self.primaries.push(Variable::primary(name, domain));
        Ok(self.primaries.len() - 1)
    }

    pub fn add_parameter(&mut self, name: &str, domain: Domain) -> Result<Var> {
        let canon = canonical_name(name);
        if self.name_taken(&canon) || self.primary_index(name).is_some() {
            return Err(Error::Duplicate(canon));
        }
        if let Some((lo, hi)) = domain.bounds() {
            if lo > hi {
                return Err(Error::Model(format!("parameter `{canon}` has an empty range")));
            }
        } else {
            return Err(Error::Model(format!("parameter `{canon}` needs a range")));
        }
        let var = self.registry.var(&canon);
        self.parameters.push(Variable {
            name: canon,
            role: Role::Parameter,
            domain,
            label: None,
            tex: None,
            deterministic: false,
            var: Some(var),
            fixed: None,
            generated: false,
        });
        Ok(var)
    }

    /// Parameters `prefix1..prefixN`, reusing declared ones of the same name.
    pub fn fresh_parameters(&mut self, prefix: &str, n: usize, mode: ParametricMode) -> Result<Vec<Var>> {
        let mut out = Vec::with_capacity(n);
        for i in 1..=n {
            let name = format!("{prefix}{i}");
            if self.primary_index(&name).is_some() {
                return Err(Error::Duplicate(name));
            }
            if let Some(p) = self.parameter(&name) {
                if p.generated {
                    return Err(Error::Duplicate(name));
                }
                out.push(p.var.expect("parameter has a handle"));
                continue;
            }
            let domain = match mode {
                ParametricMode::Distribution => Domain::unit_interval(),
                ParametricMode::Function => Domain::Finite(vec![Rational::zero(), Rational::one()]),
            };
            let v = self.add_parameter(&name, domain)?;
            self.parameters.last_mut().expect("just added").generated = true;
            out.push(v);
        }
        Ok(out)
    }

    pub fn table_for(&self, primary: usize) -> Option<&ComponentTable> {
        self.tables.iter().find(|t| t.targets.contains(&primary))
    }

    pub fn dims(&self, vars: &[usize]) -> Vec<usize> {
        vars.iter().map(|&v| self.primaries[v].states().len()).collect()
    }

    pub fn table_width(&self, t: &ComponentTable) -> usize {
        self.dims(&t.targets).iter().product()
    }

    pub fn add_table(&mut self, mut table: ComponentTable) -> Result<()> {
        for &v in table.targets.iter().chain(&table.parents) {
            if v >= self.primaries.len() {
                return Err(Error::Model(format!("table refers to unknown primary #{v}")));
            }
        }
        for &t in &table.targets {
            if self.table_for(t).is_some() {
                return Err(Error::Model(format!("second table for `{}`", self.primaries[t].name)));
            }
            if table.parents.contains(&t) {
                return Err(Error::Model(format!("`{}` is its own parent", self.primaries[t].name)));
            }
        }
        let expected: usize = self.dims(&table.parents).iter().product::<usize>() * self.table_width(&table);
        if table.entries.len() != expected {
            return Err(Error::Model(format!(
                "table for {} has {} entries, expected {expected}",
                self.target_names(&table),
                table.entries.len()
            )));
        }
        for v in table.parameters() {
            if self.parameter_by_var(v).is_none() {
                return Err(Error::UnknownIdentifier(self.registry.name(v)));
            }
        }
        let deterministic = matches!(table.source, TableSource::Function(_) | TableSource::Formula(_) | TableSource::Builtin)
            && table.targets.len() == 1
            && table.entries.iter().all(|e| e.is_zero() || e.is_one());
        if deterministic {
            self.primaries[table.targets[0]].deterministic = true;
        }
        if table.targets.len() > 1 && table.clique.is_none() {
            table.clique = Some(format!("_C{}", self.cliques.len() + 1));
        }
        if let Some(name) = &table.clique {
            match self.cliques.iter_mut().find(|c| &c.name == name) {
                Some(c) => {
                    if !c.members.is_empty() {
                        return Err(Error::Model(format!("clique `{name}` already has a table")));
                    }
                    c.members = table.targets.clone();
                }
                None => self.cliques.push(Clique { name: name.clone(), members: table.targets.clone() }),
            }
        }
        self.tables.push(table);
        Ok(())
    }

    pub fn add_constraint(&mut self, c: Constraint) -> Result<()> {
        for v in c.variables() {
            if self.parameter_by_var(v).is_none() {
                return Err(Error::UnknownIdentifier(self.registry.name(v)));
            }
        }
        self.constraints.push(c);
        Ok(())
    }

    pub fn target_names(&self, t: &ComponentTable) -> String {
        t.targets.iter().map(|&i| self.primaries[i].name.as_str()).collect::<Vec<_>>().join(" ")
    }

    /// Parameter handles in declaration order.
    pub fn parameter_vars(&self) -> Vec<Var> {
        self.parameters.iter().filter_map(|p| p.var).collect()
    }

    /// Parameters that are not fixed by instantiation.
    pub fn free_parameter_vars(&self) -> Vec<Var> {
        self.parameters.iter().filter(|p| p.fixed.is_none()).filter_map(|p| p.var).collect()
    }

    pub fn graph(&self) -> NetworkGraph {
        let mut g = NetworkGraph {
            nodes: self.primaries.iter().map(|v| v.name.clone()).collect(),
            cliques: self.cliques.clone(),
            ..Default::default()
        };
        for t in &self.tables {
            for &target in &t.targets {
                for &p in &t.parents {
                    g.edges.insert((p, target));
                }
                for v in t.parameters() {
                    g.parameter_edges.insert((v, target));
                }
            }
        }
        g
    }

    /// Law-of-probability constraints: parameter bounds and row sums.
    pub fn auto_constraints(&self) -> ConstraintSet {
        let mut set = ConstraintSet::default();
        let mut in_tables = BTreeSet::new();
        for t in &self.tables {
            in_tables.extend(t.parameters());
        }
        for p in &self.parameters {
            let (Some(var), None) = (p.var, &p.fixed) else { continue };
            let Some((mut lo, mut hi)) = p.domain.bounds() else { continue };
            if in_tables.contains(&var) {
                lo = lo.max(Rational::zero());
                hi = hi.min(Rational::one());
            }
            set.set_bound(var, lo, hi);
        }
        for t in &self.tables {
            for sum in t.row_sums(self.table_width(t)) {
                if !sum.is_constant() {
                    set.push(Constraint::system(sum, Rel::Eq, Polynomial::one()));
                }
            }
        }
        set
    }

    /// Auto constraints followed by user constraints.
    pub fn all_constraints(&self) -> ConstraintSet {
        let mut set = self.auto_constraints();
        for c in &self.constraints {
            set.push(c.clone());
        }
        set
    }

    pub fn validate(&self) -> Result<()> {
        let mut diags = Vec::new();
        for (i, v) in self.primaries.iter().enumerate() {
            let n = self.tables.iter().filter(|t| t.targets.contains(&i)).count();
            if n == 0 {
                diags.push(format!("primary `{}` has no component table", v.name));
            } else if n > 1 {
                diags.push(format!("primary `{}` has {n} component tables", v.name));
            }
        }
        if let Some(cycle) = self.find_cycle() {
            diags.push(format!("directed cycle through {}", cycle.join(" -> ")));
        }
        for t in &self.tables {
            let name = self.target_names(t);
            if t.targets.len() > 1 && !t.parents.is_empty() {
                diags.push(format!("clique table for {name} has directed parents"));
            }
            let width = self.table_width(t);
            let rows: usize = self.dims(&t.parents).iter().product();
            if t.entries.len() != width * rows {
                diags.push(format!("table for {name} has {} entries, expected {}", t.entries.len(), width * rows));
                continue;
            }
            for e in &t.entries {
                if let Some(c) = e.constant_value() {
                    if c.is_negative() || c > Rational::one() {
                        diags.push(format!("table for {name} has entry {} outside [0,1]", fmt_signed(&c)));
                    }
                }
                for v in e.variables() {
                    if self.parameter_by_var(v).is_none() {
                        diags.push(format!("table for {name} uses undeclared `{}`", self.registry.name(v)));
                    }
                }
            }
            if t.verify {
                for (r, sum) in t.row_sums(width).iter().enumerate() {
                    if let Some(c) = sum.constant_value() {
                        if !c.is_one() {
                            diags.push(format!("row {} of the table for {name} sums to {}", r + 1, fmt_signed(&c)));
                        }
                    }
                }
            }
            if t.targets.len() == 1 && self.primaries[t.targets[0]].deterministic {
                if !t.entries.iter().all(|e| e.is_zero() || e.is_one()) {
                    diags.push(format!("deterministic `{name}` has entries other than 0 and 1"));
                }
            }
        }
        for c in &self.constraints {
            for v in c.variables() {
                if self.parameter_by_var(v).is_none() {
                    diags.push(format!("constraint uses undeclared `{}`", self.registry.name(v)));
                }
            }
        }
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(diags))
        }
    }

    fn find_cycle(&self) -> Option<Vec<String>> {
        let g = self.graph();
        let n = self.primaries.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &g.edges {
            adj[a].push(b);
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; n];
        let mut stack = Vec::new();
        fn dfs(u: usize, adj: &[Vec<usize>], mark: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
            mark[u] = 1;
            stack.push(u);
            for &w in &adj[u] {
                if mark[w] == 1 {
                    let pos = stack.iter().position(|&s| s == w).unwrap_or(0);
                    let mut cyc = stack[pos..].to_vec();
                    cyc.push(w);
                    return Some(cyc);
                }
                if mark[w] == 0 {
                    if let Some(c) = dfs(w, adj, mark, stack) {
                        return Some(c);
                    }
                }
            }
            stack.pop();
            mark[u] = 2;
            None
        }
        for s in 0..n {
            if mark[s] == 0 {
                if let Some(c) = dfs(s, &adj, &mut mark, &mut stack) {
                    return Some(c.into_iter().map(|i| self.primaries[i].name.clone()).collect());
                }
            }
        }
        None
    }

    /// Copy of the model with parameters fixed to the given values.
    pub fn instantiate(&self, assignment: &BTreeMap<Var, Rational>) -> Result<Model> {
        let mut out = self.clone();
        for (v, value) in assignment {
            let p = out
                .parameters
                .iter_mut()
                .find(|p| p.var == Some(*v))
                .ok_or_else(|| Error::UnknownIdentifier(self.registry.name(*v)))?;
            if !p.domain.contains(value) {
                return Err(Error::Model(format!(
                    "value {} is outside the declared set of `{}`",
                    fmt_signed(value),
                    p.name
                )));
            }
            p.fixed = Some(value.clone());
        }
        for t in &mut out.tables {
            for e in &mut t.entries {
                *e = e.substitute_values(assignment);
            }
        }
        for c in &mut out.constraints {
            *c = c.substitute_values(assignment);
        }
        for target in &mut out.targets {
            target.poly = target.poly.substitute_values(assignment);
        }
        out.constraints.retain(|c| !c.difference().is_constant());
        Ok(out)
    }

    /// Current values fixed on parameters.
    pub fn fixed_values(&self) -> BTreeMap<Var, Rational> {
        self.parameters
            .iter()
            .filter_map(|p| Some((p.var?, p.fixed.clone()?)))
            .collect()
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}
