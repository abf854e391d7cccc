//! Embedding of finite formulas into component probability tables, and the
//! translation of propositional formulas into Boolean polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::network::{ComponentTable, Constraint, Model, Rel, TableSource};
use crate::polynomial::{rat, F2Polynomial, Polynomial, Rational, Registry, Var};

/// A value of a finite domain: truth value, number or bare symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Num(Rational),
    Sym(String),
}

impl Value {
    pub fn numeric(&self) -> Option<Rational> {
        match self {
            Value::Bool(b) => Some(if *b { Rational::one() } else { Rational::zero() }),
            Value::Num(r) => Some(r.clone()),
            Value::Sym(_) => None,
        }
    }

    fn truth(&self, op: &str) -> Result<bool> {
        match self {
            Value::Bool(b) => Ok(*b),
            other => Err(Error::TypeMismatch(format!("`{op}` expects a truth value, got {other}"))),
        }
    }

    /// Equality across representations: truth values compare as 1/0 with numbers.
    pub fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Sym(a), Value::Sym(b)) => a == b,
            (Value::Sym(_), _) | (_, Value::Sym(_)) => false,
            (a, b) => a.numeric() == b.numeric(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(true) => f.write_str("T"),
            Value::Bool(false) => f.write_str("F"),
            Value::Num(r) => f.write_str(&crate::polynomial::fmt_rational(r)),
            Value::Sym(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
    Xor,
    Implies,
    Iff,
    Nand,
    Nor,
    Eq,
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Xor => "^",
            BinOp::Implies => "->",
            BinOp::Iff => "<->",
            BinOp::Nand => "nand",
            BinOp::Nor => "nor",
            BinOp::Eq => "==",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }

    fn is_logical(self) -> bool {
        matches!(
            self,
            BinOp::And | BinOp::Or | BinOp::Xor | BinOp::Implies | BinOp::Iff | BinOp::Nand | BinOp::Nor
        )
    }
}

/// Formula syntax tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Const(Value),
    Var(String),
    Not(Box<Formula>),
    Neg(Box<Formula>),
    Bin(BinOp, Box<Formula>, Box<Formula>),
    Cond(Box<Formula>, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(name.to_string())
    }

    pub fn bin(op: BinOp, a: Formula, b: Formula) -> Formula {
        Formula::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    /// Variable names in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        fn walk(f: &Formula, out: &mut Vec<String>) {
            match f {
                Formula::Const(_) => {}
                Formula::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                Formula::Not(a) | Formula::Neg(a) => walk(a, out),
                Formula::Bin(_, a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Cond(c, a, b) => {
                    walk(c, out);
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Const(Value::Bool(_)) | Formula::Var(_) => true,
            Formula::Not(a) => a.is_propositional(),
            Formula::Bin(op, a, b) => op.is_logical() && a.is_propositional() && b.is_propositional(),
            _ => false,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(v) => write!(f, "{v}"),
            Formula::Var(v) => f.write_str(v),
            Formula::Not(a) => write!(f, "!({a})"),
            Formula::Neg(a) => write!(f, "-({a})"),
            Formula::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Formula::Cond(c, a, b) => write!(f, "({c} ? {a} : {b})"),
        }
    }
}

/// Evaluates a formula under a total assignment of its variables.
pub fn eval_formula(f: &Formula, env: &BTreeMap<String, Value>) -> Result<Value> {
    match f {
        Formula::Const(v) => Ok(v.clone()),
        Formula::Var(name) => env.get(name).cloned().ok_or_else(|| Error::Unbound(name.clone())),
        Formula::Not(a) => Ok(Value::Bool(!eval_formula(a, env)?.truth("!")?)),
        Formula::Neg(a) => {
            let v = eval_formula(a, env)?;
            let n = v
                .numeric()
                .ok_or_else(|| Error::TypeMismatch(format!("cannot negate {v}")))?;
            Ok(Value::Num(-n))
        }
        Formula::Cond(c, a, b) => {
            if eval_formula(c, env)?.truth("?:")? {
                eval_formula(a, env)
            } else {
                eval_formula(b, env)
            }
        }
        Formula::Bin(op, a, b) => {
            let va = eval_formula(a, env)?;
            let vb = eval_formula(b, env)?;
            if op.is_logical() {
                let (p, q) = (va.truth(op.symbol())?, vb.truth(op.symbol())?);
                let r = match op {
                    BinOp::And => p && q,
                    BinOp::Or => p || q,
                    BinOp::Xor => p != q,
                    BinOp::Implies => !p || q,
                    BinOp::Iff => p == q,
                    BinOp::Nand => !(p && q),
                    BinOp::Nor => !(p || q),
                    _ => unreachable!(),
                };
                return Ok(Value::Bool(r));
            }
            if *op == BinOp::Eq {
                return Ok(Value::Bool(va.same(&vb)));
            }
            let mismatch = || Error::TypeMismatch(format!("`{}` applied to {va} and {vb}", op.symbol()));
            let (x, y) = (va.numeric().ok_or_else(mismatch)?, vb.numeric().ok_or_else(mismatch)?);
            Ok(Value::Num(match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                _ => unreachable!(),
            }))
        }
    }
}

/// `target := formula`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedDefinition {
    pub target: String,
    pub formula: Formula,
}

/// Iterates every state combination of `vars`, last varying fastest.
pub(crate) fn for_each_row(model: &Model, vars: &[usize], mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let dims: Vec<usize> = vars.iter().map(|&v| model.primaries[v].states().len()).collect();
    if dims.contains(&0) {
        return Ok(());
    }
    let mut idx = vec![0usize; vars.len()];
    loop {
        f(&idx)?;
        let mut k = vars.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn env_for(model: &Model, vars: &[usize], states: &[usize]) -> BTreeMap<String, Value> {
    vars.iter()
        .zip(states)
        .map(|(&v, &s)| {
            let var = &model.primaries[v];
            (var.name.clone(), var.states()[s].value.clone())
        })
        .collect()
}

fn resolve_primaries(model: &Model, names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| model.primary_index(n).ok_or_else(|| Error::UnknownIdentifier(n.clone())))
        .collect()
}

/// Deterministic table for `target := formula`.
pub fn formula_to_cpt(model: &Model, def: &EmbeddedDefinition, parents: &[String]) -> Result<ComponentTable> {
    let target = model
        .primary_index(&def.target)
        .ok_or_else(|| Error::UnknownIdentifier(def.target.clone()))?;
    let parent_idx = resolve_primaries(model, parents)?;
    for v in def.formula.variables() {
        if !parents.contains(&v) {
            return Err(Error::Model(format!("`{v}` in the definition of `{}` is not a parent", def.target)));
        }
    }
    let states = model.primaries[target].states().to_vec();
    let mut entries = Vec::new();
    for_each_row(model, &parent_idx, |row| {
        let value = eval_formula(&def.formula, &env_for(model, &parent_idx, row))?;
        let hit = states.iter().position(|s| s.value.same(&value)).ok_or_else(|| Error::OutsideDomain {
            target: def.target.clone(),
            formula: def.formula.to_string(),
            value: value.to_string(),
        })?;
        entries.extend((0..states.len()).map(|k| Polynomial::int((k == hit) as i64)));
        Ok(())
    })?;
    Ok(ComponentTable::new(vec![target], parent_idx, entries, TableSource::Formula(def.formula.to_string())))
}

/// Table whose entries are the value of a guard formula mentioning the child,
/// as in `"R <-> P -> Q ? 1 : 0"`.
pub fn guard_to_cpt(model: &Model, child: &str, parents: &[String], guard: &Formula, text: &str) -> Result<ComponentTable> {
    let target = model
        .primary_index(child)
        .ok_or_else(|| Error::UnknownIdentifier(child.to_string()))?;
    let parent_idx = resolve_primaries(model, parents)?;
    for v in guard.variables() {
        if v != child && !parents.contains(&v) {
            return Err(Error::Model(format!("`{v}` in the function of `{child}` is not a parent")));
        }
    }
    let states = model.primaries[target].states().to_vec();
    let mut entries = Vec::new();
    for_each_row(model, &parent_idx, |row| {
        let mut env = env_for(model, &parent_idx, row);
        for s in &states {
            env.insert(child.to_string(), s.value.clone());
            let v = eval_formula(guard, &env)?;
            let entry = v
                .numeric()
                .ok_or_else(|| Error::TypeMismatch(format!("function of `{child}` yields {v}")))?;
            entries.push(Polynomial::constant(entry));
        }
        Ok(())
    })?;
    let mut t = ComponentTable::new(vec![target], parent_idx, entries, TableSource::Function(text.to_string()));
    t.verify = true;
    Ok(t)
}

/// Deterministic table giving the number of true parents.
pub fn count_true_cpt(model: &Model, child: &str, parents: &[String]) -> Result<ComponentTable> {
    let target = model
        .primary_index(child)
        .ok_or_else(|| Error::UnknownIdentifier(child.to_string()))?;
    let parent_idx = resolve_primaries(model, parents)?;
    let states = model.primaries[target].states().to_vec();
    for n in 0..=parents.len() {
        if !states.iter().any(|s| s.value.same(&Value::Num(rat(n as i64)))) {
            return Err(Error::Model(format!("domain of `{child}` lacks the count {n}")));
        }
    }
    let mut entries = Vec::new();
    for_each_row(model, &parent_idx, |row| {
        let env = env_for(model, &parent_idx, row);
        let mut count = 0i64;
        for p in parents {
            if env[p].same(&Value::Bool(true)) {
                count += 1;
            }
        }
        let target_value = Value::Num(rat(count));
        entries.extend(states.iter().map(|s| Polynomial::int(s.value.same(&target_value) as i64)));
        Ok(())
    })?;
    Ok(ComponentTable::new(vec![target], parent_idx, entries, TableSource::Builtin))
}

/// How the fresh parameters of a parametric function table are constrained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParametricMode {
    /// Each parameter is restricted to {0,1}: the table encodes an unknown function.
    Function,
    /// Each parameter ranges over [0,1]: the table is an unknown distribution.
    Distribution,
}

/// Fresh parameters for a conditional table: one per parent row for a binary
/// child (entries `t, 1 - t`), one per cell with a row-sum constraint otherwise.
pub fn parametric_function_cpt(
    model: &mut Model,
    child: &str,
    parents: &[String],
    prefix: &str,
    mode: ParametricMode,
) -> Result<(ComponentTable, Vec<Constraint>)> {
    let target = model
        .primary_index(child)
        .ok_or_else(|| Error::UnknownIdentifier(child.to_string()))?;
    let parent_idx = resolve_primaries(model, parents)?;
    let k = model.primaries[target].states().len();
    let rows: usize = parent_idx.iter().map(|&p| model.primaries[p].states().len()).product();
    let per_row = if k == 2 { 1 } else { k };
    let params = model.fresh_parameters(prefix, rows * per_row, mode)?;
    let mut entries = Vec::new();
    let mut constraints = Vec::new();
    for r in 0..rows {
        let slice = &params[r * per_row..(r + 1) * per_row];
        if k == 2 {
            let t = Polynomial::var(slice[0]);
            entries.push(t.clone());
            entries.push(&Polynomial::one() - &t);
        } else {
            let mut sum = Polynomial::zero();
            for &p in slice {
                entries.push(Polynomial::var(p));
                sum += &Polynomial::var(p);
            }
            constraints.push(Constraint::system(sum, Rel::Eq, Polynomial::one()));
        }
    }
    let table = ComponentTable::new(
        vec![target],
        parent_idx,
        entries,
        TableSource::Parametric { prefix: prefix.to_string(), params: params.clone() },
    );
    Ok((table, constraints))
}

/// Coefficient field of a Boolean polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Reals,
    F2,
}

/// Result of [`to_boolean_polynomial`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BooleanPolynomial {
    Reals(Polynomial),
    F2(F2Polynomial),
}

fn real_translation(f: &Formula, reg: &Registry) -> Result<Polynomial> {
    let one = Polynomial::one();
    Ok(match f {
        Formula::Const(Value::Bool(b)) => Polynomial::int(*b as i64),
        Formula::Var(v) => Polynomial::var(reg.var(v)),
        Formula::Not(a) => &one - &real_translation(a, reg)?,
        Formula::Bin(op, a, b) if op.is_logical() => {
            let p = real_translation(a, reg)?;
            let q = real_translation(b, reg)?;
            let pq = (&p * &q).multilinear();
            let two = Rational::from_integer(2.into());
            match op {
                BinOp::And => pq,
                BinOp::Or => &(&p + &q) - &pq,
                BinOp::Xor => &(&p + &q) - &pq.scale(&two),
                BinOp::Implies => &(&one - &p) + &pq,
                BinOp::Iff => &(&(&one - &p) - &q) + &pq.scale(&two),
                BinOp::Nand => &one - &pq,
                BinOp::Nor => &(&(&one - &p) - &q) + &pq,
                _ => unreachable!(),
            }
        }
        other => return Err(Error::TypeMismatch(format!("`{other}` is not propositional"))),
    })
}

fn f2_translation(f: &Formula, reg: &Registry) -> Result<F2Polynomial> {
    let one = F2Polynomial::one();
    Ok(match f {
        Formula::Const(Value::Bool(true)) => one,
        Formula::Const(Value::Bool(false)) => F2Polynomial::zero(),
        Formula::Var(v) => F2Polynomial::var(reg.var(v)),
        Formula::Not(a) => one.add(&f2_translation(a, reg)?),
        Formula::Bin(op, a, b) if op.is_logical() => {
            let p = f2_translation(a, reg)?;
            let q = f2_translation(b, reg)?;
            let pq = p.mul(&q);
            match op {
                BinOp::And => pq,
                BinOp::Or => p.add(&q).add(&pq),
                BinOp::Xor => p.add(&q),
                BinOp::Implies => one.add(&p).add(&pq),
                BinOp::Iff => one.add(&p).add(&q),
                BinOp::Nand => one.add(&pq),
                BinOp::Nor => one.add(&p).add(&q).add(&pq),
                _ => unreachable!(),
            }
        }
        other => return Err(Error::TypeMismatch(format!("`{other}` is not propositional"))),
    })
}

/// Translates a propositional formula into a Boolean polynomial, with atoms
/// registered in `reg`.
pub fn to_boolean_polynomial(f: &Formula, field: Field, reg: &Registry) -> Result<BooleanPolynomial> {
    match field {
        Field::Reals => real_translation(f, reg).map(BooleanPolynomial::Reals),
        Field::F2 => f2_translation(f, reg).map(BooleanPolynomial::F2),
    }
}

pub fn to_real_polynomial(f: &Formula, reg: &Registry) -> Result<Polynomial> {
    real_translation(f, reg)
}

pub fn to_f2_polynomial(f: &Formula, reg: &Registry) -> Result<F2Polynomial> {
    f2_translation(f, reg)
}

/// Equivalence by comparing canonical F2 forms.
pub fn logically_equivalent(f: &Formula, g: &Formula) -> Result<bool> {
    let reg = Registry::new();
    let mut atoms = f.variables();
    for v in g.variables() {
        if !atoms.contains(&v) {
            atoms.push(v);
        }
    }
    atoms.sort();
    for a in &atoms {
        reg.var(a);
    }
    Ok(f2_translation(f, &reg)? == f2_translation(g, &reg)?)
}

/// Parameters of a formula translated over the reals, keyed by atom name.
pub fn atom_vars(reg: &Registry, f: &Formula) -> BTreeMap<String, Var> {
    f.variables().into_iter().map(|v| (v.clone(), reg.var(&v))).collect()
}
