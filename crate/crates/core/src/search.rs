//! Exhaustive search over finite-valued parameters: instantiate target
//! polynomials at every assignment and keep the rows meeting zero/nonzero
//! criteria.

use std::collections::BTreeMap;
use std::fmt::Write;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::network::{Constraint, ConstraintSet, Domain, Model, Rel};
use crate::optimize::{default_epsilon, Number, Problem, Sense, Status};
use crate::polynomial::{fmt_signed, FractionalPolynomial, Polynomial, Rational, Registry, Var};

/// Default cap on the number of enumerated rows.
pub const DEFAULT_CAP: usize = 1 << 20;

/// Per-row predicate. Targets are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Criteria {
    True,
    IsZero(usize),
    IsNonzero(usize),
    Not(Box<Criteria>),
    And(Box<Criteria>, Box<Criteria>),
    Or(Box<Criteria>, Box<Criteria>),
}

impl Criteria {
    pub fn xor(a: Criteria, b: Criteria) -> Criteria {
        let l = Criteria::And(Box::new(a.clone()), Box::new(Criteria::Not(Box::new(b.clone()))));
        let r = Criteria::And(Box::new(Criteria::Not(Box::new(a))), Box::new(b));
        Criteria::Or(Box::new(l), Box::new(r))
    }

    /// Largest target index mentioned, if any.
    pub fn max_target(&self) -> Option<usize> {
        match self {
            Criteria::True => None,
            Criteria::IsZero(k) | Criteria::IsNonzero(k) => Some(*k),
            Criteria::Not(a) => a.max_target(),
            Criteria::And(a, b) | Criteria::Or(a, b) => a.max_target().max(b.max_target()),
        }
    }

    fn eval(&self, zero: &dyn Fn(usize) -> bool, nonzero: &mut dyn FnMut(usize) -> bool) -> bool {
        match self {
            Criteria::True => true,
            Criteria::IsZero(k) => zero(*k),
            Criteria::IsNonzero(k) => nonzero(*k),
            Criteria::Not(a) => !a.eval(zero, nonzero),
            Criteria::And(a, b) => a.eval(zero, nonzero) && b.eval(zero, nonzero),
            Criteria::Or(a, b) => a.eval(zero, nonzero) || b.eval(zero, nonzero),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub params: Vec<(Var, Vec<Rational>)>,
    pub targets: Vec<(String, FractionalPolynomial)>,
    /// Constraints on the remaining (continuous) parameters.
    pub constraints: ConstraintSet,
}

impl SearchSpec {
    /// Discrete parameters by name, with their finite value sets ({0,1}
    /// when the parameter has an interval domain).
    pub fn new(model: &Model, params: &[&str], targets: Vec<(String, FractionalPolynomial)>) -> Result<SearchSpec> {
        let mut ps = Vec::new();
        for name in params {
            let p = model.parameter(name).ok_or_else(|| Error::UnknownIdentifier(name.to_string()))?;
            let var = p.var.ok_or_else(|| Error::Search(format!("`{name}` is not a parameter")))?;
            if ps.iter().any(|(v, _)| *v == var) {
                return Err(Error::Duplicate(name.to_string()));
            }
            let values = match &p.domain {
                Domain::Finite(vals) => vals.clone(),
                _ => vec![Rational::zero(), Rational::one()],
            };
            ps.push((var, values));
        }
        Ok(SearchSpec { params: ps, targets, constraints: model.all_constraints() })
    }
}

#[derive(Clone, Debug)]
pub struct InstantiationRow {
    /// 1-based.
    pub index: usize,
    pub assignment: Vec<Rational>,
    pub values: Vec<FractionalPolynomial>,
}

#[derive(Clone, Debug)]
pub struct InstantiationTable {
    pub registry: Registry,
    pub params: Vec<Var>,
    pub target_names: Vec<String>,
    pub rows: Vec<InstantiationRow>,
    pub constraints: ConstraintSet,
}

/// Substitutes every assignment into the targets, last parameter fastest.
pub fn enumerate(spec: &SearchSpec, registry: &Registry, cap: usize) -> Result<InstantiationTable> {
    let mut count: usize = 1;
    for (v, vals) in &spec.params {
        if vals.is_empty() {
            return Err(Error::Search(format!("`{}` has no values", registry.name(*v))));
        }
        count = count
            .checked_mul(vals.len())
            .filter(|&c| c <= cap)
            .ok_or_else(|| Error::Search(format!("more than {cap} assignments")))?;
    }
    let mut rows = Vec::with_capacity(count);
    let mut digits = vec![0usize; spec.params.len()];
    for index in 1..=count {
        let assignment: Vec<Rational> = digits.iter().zip(&spec.params).map(|(&d, (_, vals))| vals[d].clone()).collect();
        let map: BTreeMap<Var, Rational> = spec.params.iter().map(|(v, _)| *v).zip(assignment.iter().cloned()).collect();
        let values = spec
            .targets
            .iter()
            .map(|(_, f)| FractionalPolynomial::new(f.num.substitute_values(&map), f.den.substitute_values(&map)))
            .collect();
        rows.push(InstantiationRow { index, assignment, values });
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < spec.params[k].1.len() {
                break;
            }
            digits[k] = 0;
        }
    }
    Ok(InstantiationTable {
        registry: registry.clone(),
        params: spec.params.iter().map(|(v, _)| *v).collect(),
        target_names: spec.targets.iter().map(|(n, _)| n.clone()).collect(),
        rows,
        constraints: spec.constraints.clone(),
    })
}

impl InstantiationTable {
    /// Shared table format with an Index column.
    pub fn render(&self) -> String {
        self.render_rows(self.rows.iter())
    }

    pub fn render_rows<'a>(&'a self, rows: impl Iterator<Item = &'a InstantiationRow>) -> String {
        let reg = &self.registry;
        let mut out = String::new();
        let params: Vec<String> = self.params.iter().map(|&v| reg.name(v)).collect();
        let mut head = vec!["Index".to_string()];
        head.extend(params);
        let _ = writeln!(out, "{}\t| {}\t", head.join("\t| "), self.target_names.join("\t| "));
        let _ = writeln!(out, "{}", vec!["-------"; head.len() + self.target_names.len()].join("\t"));
        for row in rows {
            let mut cells = vec![row.index.to_string()];
            cells.extend(row.assignment.iter().map(fmt_signed));
            let vals: Vec<String> = row.values.iter().map(|v| v.display(reg).to_string()).collect();
            let _ = writeln!(out, "{}\t| {}\t", cells.join("\t| "), vals.join("\t| "));
        }
        out
    }

    fn row_constraints(&self, row: &InstantiationRow) -> Option<ConstraintSet> {
        let map: BTreeMap<Var, Rational> = self.params.iter().cloned().zip(row.assignment.iter().cloned()).collect();
        let mut set = ConstraintSet::default();
        for b in &self.constraints.bounds {
            if !map.contains_key(&b.var) {
                set.set_bound(b.var, b.lo.clone(), b.hi.clone());
            }
        }
        for c in &self.constraints.constraints {
            let c = c.substitute_values(&map);
            match c.difference().constant_value() {
                Some(d) => {
                    let ok = c.rel.sign_holds(&d);
                    if !ok {
                        return None;
                    }
                }
                None => set.push(c),
            }
        }
        Some(set)
    }

    /// A feasible point where the target is positive, if one exists. The
    /// denominator is held positive.
    pub fn witness(&self, row: &InstantiationRow, k: usize, budget: usize) -> Result<Option<BTreeMap<Var, Rational>>> {
        let f = &row.values[k];
        if f.num.is_zero() {
            return Ok(None);
        }
        let Some(mut cs) = self.row_constraints(row) else { return Ok(None) };
        if !f.den.is_constant() {
            cs.push(Constraint::system(f.den.clone(), Rel::Ge, Polynomial::constant(default_epsilon())));
        }
        let num = match f.den.constant_value() {
            Some(d) if d.is_negative() => -&f.num,
            _ => f.num.clone(),
        };
        // Cheap candidates first: the center and the corners of the box.
        let mut vars: Vec<Var> = num.variables().into_iter().collect();
        for b in &cs.bounds {
            if !vars.contains(&b.var) {
                vars.push(b.var);
            }
        }
        for c in &cs.constraints {
            for v in c.variables() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        let bounded = vars.iter().all(|&v| cs.bound(v).is_some());
        if bounded {
            let center: BTreeMap<Var, Rational> = vars
                .iter()
                .map(|&v| {
                    let b = cs.bound(v).expect("bounded");
                    (v, (&b.lo + &b.hi) / Rational::from_integer(2.into()))
                })
                .collect();
            if self.positive_at(&num, &cs, &center)? {
                return Ok(Some(center));
            }
        }
        let problem = Problem {
            registry: self.registry.clone(),
            sense: Sense::Max,
            objective: num.clone().into(),
            constraints: cs.clone(),
            aux: Vec::new(),
        };
        let sol = problem.solve(budget)?;
        if sol.status == Status::Unbounded {
            return Err(Error::Search("target is unbounded over the feasible set".into()));
        }
        if !matches!(sol.status, Status::Optimal | Status::BoundsOnly) {
            return Ok(None);
        }
        let point: BTreeMap<Var, Rational> = sol
            .point
            .iter()
            .filter_map(|(v, n)| match n {
                Number::Exact(r) => Some((*v, r.clone())),
                Number::Approx(x) if x.is_finite() => Some((*v, crate::polynomial::from_f64(*x))),
                Number::Approx(_) => None,
            })
            .collect();
        if self.positive_at(&num, &cs, &point)? {
            return Ok(Some(point));
        }
        Ok(None)
    }

    fn positive_at(&self, num: &Polynomial, cs: &ConstraintSet, point: &BTreeMap<Var, Rational>) -> Result<bool> {
        if !num.variables().iter().all(|v| point.contains_key(v)) {
            return Ok(false);
        }
        if !cs.feasible(point, &self.registry)? {
            return Ok(false);
        }
        Ok(num.evaluate(point, &self.registry)?.is_positive())
    }

    /// Rows satisfying the criteria, each with a witness point for every
    /// target found nonzero.
    pub fn filter(&self, criteria: &Criteria, budget: usize) -> Result<Vec<FilterMatch>> {
        if let Some(k) = criteria.max_target() {
            if k >= self.target_names.len() {
                return Err(Error::Search(format!("no target {}", k + 1)));
            }
        }
        let mut out = Vec::new();
        for row in &self.rows {
            let mut witnesses: BTreeMap<usize, Option<BTreeMap<Var, Rational>>> = BTreeMap::new();
            let mut failure = None;
            let zero = |k: usize| row.values[k].num.is_zero();
            let mut nonzero = |k: usize| {
                if let Some(w) = witnesses.get(&k) {
                    return w.is_some();
                }
                match self.witness(row, k, budget) {
                    Ok(w) => {
                        let found = w.is_some();
                        witnesses.insert(k, w);
                        found
                    }
                    Err(e) => {
                        failure = Some(e);
                        false
                    }
                }
            };
            let keep = criteria.eval(&zero, &mut nonzero);
            if let Some(e) = failure {
                return Err(e);
            }
            if keep {
                out.push(FilterMatch {
                    index: row.index,
                    assignment: row.assignment.clone(),
                    witnesses: witnesses.into_iter().filter_map(|(k, w)| Some((k, w?))).collect(),
                });
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterMatch {
    pub index: usize,
    pub assignment: Vec<Rational>,
    pub witnesses: BTreeMap<usize, BTreeMap<Var, Rational>>,
}

/// Fixes parameters by name, e.g. `t1 = 1`.
pub fn instantiate_model(model: &Model, assignment: &[(&str, Rational)]) -> Result<Model> {
    let mut map = BTreeMap::new();
    for (name, value) in assignment {
        let p = model.parameter(name).ok_or_else(|| Error::UnknownIdentifier(name.to_string()))?;
        let var = p.var.ok_or_else(|| Error::UnknownIdentifier(name.to_string()))?;
        if map.insert(var, value.clone()).is_some() {
            return Err(Error::Duplicate(name.to_string()));
        }
    }
    model.instantiate(&map)
}
