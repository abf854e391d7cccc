//! Secondary analysis by optimization: problem construction, classification,
//! exact linear and fractional-linear solving, and interval branch-and-bound
//! for general polynomial programs.

pub mod interval;
pub mod simplex;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::inference::{query, Query};
use crate::network::{Constraint, ConstraintSet, Model, Rel};
use crate::polynomial::{fmt_signed, ratio, to_f64, FractionalPolynomial, Polynomial, Rational, Registry, Var};
use interval::{branch_and_bound, BoxProgram};
use simplex::{solve_lp, LinearProgram, LpResult};

pub use crate::dsl::Sense;

/// Default ε for strict inequalities.
pub fn default_epsilon() -> Rational {
    ratio(1, 1000)
}

/// Default number of boxes the branch-and-bound may examine.
pub const DEFAULT_BUDGET: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Linear,
    FractionalLinear,
    Polynomial,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::Linear => "linear",
            Class::FractionalLinear => "fractional_linear",
            Class::Polynomial => "polynomial",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub registry: Registry,
    pub sense: Sense,
    pub objective: FractionalPolynomial,
    pub constraints: ConstraintSet,
    /// Variables introduced for this problem only, bounded to [0, 1].
    pub aux: Vec<Var>,
}

/// A number reported by a solver: exact when known exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Rational),
    Approx(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(r) => to_f64(r),
            Number::Approx(x) => *x,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Number::Exact(r) => Some(r),
            Number::Approx(_) => None,
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(r) => f.write_str(&fmt_signed(r)),
            Number::Approx(x) => {
                let x = if x.abs() < 5e-4 { 0.0 } else { *x };
                write!(f, "{x:.3}")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    /// Budget exhausted before the enclosure reached the target width.
    BoundsOnly,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub status: Status,
    pub lower: Option<Number>,
    pub upper: Option<Number>,
    pub point: Vec<(Var, Number)>,
    pub class: Class,
}

impl Solution {
    fn infeasible(class: Class) -> Self {
        Solution { status: Status::Infeasible, lower: None, upper: None, point: Vec::new(), class }
    }

    /// The optimum when it is known exactly.
    pub fn exact_value(&self) -> Option<&Rational> {
        match (&self.lower, &self.upper) {
            (Some(Number::Exact(a)), Some(Number::Exact(b))) if a == b => Some(a),
            _ => None,
        }
    }

    /// Value interval, `lo hi`.
    pub fn render_value(&self) -> String {
        match self.status {
            Status::Infeasible => "infeasible".into(),
            Status::Unbounded => "unbounded".into(),
            _ => {
                let s = |n: &Option<Number>| n.as_ref().map_or("?".to_string(), |n| n.to_string());
                format!("{} {}", s(&self.lower), s(&self.upper))
            }
        }
    }

    /// `{x = 1} {y = 1} {z = 0}`.
    pub fn render_point(&self, reg: &Registry) -> String {
        self.point
            .iter()
            .map(|(v, n)| format!("{{{} = {n}}}", reg.name(*v)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn point_map(&self) -> BTreeMap<Var, Rational> {
        self.point
            .iter()
            .filter_map(|(v, n)| Some((*v, n.exact()?.clone())))
            .collect()
    }
}

/// Weakens a strict constraint: `p > a` becomes `p >= a + ε` and `p < b`
/// becomes `p <= b - ε`. Weak constraints pass through unchanged.
pub fn strictify(c: &Constraint, epsilon: &Rational) -> Constraint {
    let eps = Polynomial::constant(epsilon.clone());
    match c.rel {
        Rel::Gt => Constraint { lhs: c.lhs.clone(), rel: Rel::Ge, rhs: &c.rhs + &eps, origin: c.origin },
        Rel::Lt => Constraint { lhs: c.lhs.clone(), rel: Rel::Le, rhs: &c.rhs - &eps, origin: c.origin },
        _ => c.clone(),
    }
}

/// Expected value of a numeric-domain primary, `sum of state * Pr(state)`.
pub fn expectation(model: &Model, var: &str) -> Result<Polynomial> {
    let q = Query::new(model, &[var], &[])?;
    let t = query(model, &q)?;
    let v = model.primary_index(var).ok_or_else(|| Error::UnknownIdentifier(var.to_string()))?;
    let mut sum = Polynomial::zero();
    for row in &t.rows {
        let state = &model.primaries[v].states()[row.states[0]];
        let x = state
            .value
            .numeric()
            .ok_or_else(|| Error::TypeMismatch(format!("state `{}` of `{var}` is not numeric", state.label)))?;
        let p = row
            .value
            .as_polynomial()
            .ok_or_else(|| Error::Query("unconditional row is not a polynomial".into()))?;
        sum += &p.scale(&x);
    }
    Ok(sum)
}

/// Clears a (possibly fractional) relation `l REL r` into a polynomial
/// constraint. Nonconstant denominators are assumed positive and receive
/// the constraint `den >= ε`; strict relations are weakened by ε first.
pub fn clear_relation(
    l: &FractionalPolynomial,
    rel: Rel,
    r: &FractionalPolynomial,
    epsilon: &Rational,
) -> Result<Vec<Constraint>> {
    if l.is_indeterminate() || r.is_indeterminate() {
        return Err(Error::Indeterminate);
    }
    let diff = l - r;
    let eps = Polynomial::constant(epsilon.clone());
    let (mut rel, mut num, den) = (rel, diff.num.clone(), diff.den.clone());
    if let Some(c) = den.constant_value() {
        if c.is_zero() {
            return Err(Error::Solver("division by zero in a constraint".into()));
        }
        num = num.scale(&c.recip());
        let (rel, num) = match rel {
            Rel::Gt => (Rel::Ge, &num - &eps),
            Rel::Lt => (Rel::Le, &num + &eps),
            r => (r, num),
        };
        return Ok(vec![Constraint::user(num, rel, Polynomial::zero())]);
    }
    match rel {
        Rel::Gt => {
            num = &num - &(&eps * &den);
            rel = Rel::Ge;
        }
        Rel::Lt => {
            num = &num + &(&eps * &den);
            rel = Rel::Le;
        }
        _ => {}
    }
    Ok(vec![
        Constraint::user(num, rel, Polynomial::zero()),
        Constraint::user(den, Rel::Ge, eps),
    ])
}

/// Problem from a model's constraints plus user relations.
pub fn build_program(
    model: &Model,
    sense: Sense,
    objective: FractionalPolynomial,
    relations: &[(FractionalPolynomial, Rel, FractionalPolynomial)],
    aux: &[Var],
    epsilon: &Rational,
) -> Result<Problem> {
    if objective.is_indeterminate() {
        return Err(Error::Indeterminate);
    }
    let mut constraints = model.all_constraints();
    for &v in aux {
        constraints.set_bound(v, Rational::zero(), Rational::one());
    }
    for (l, rel, r) in relations {
        for c in clear_relation(l, *rel, r, epsilon)? {
            if c.difference().is_zero() && c.rel != Rel::Lt && c.rel != Rel::Gt {
                continue;
            }
            constraints.push(c);
        }
    }
    let fixed = model.fixed_values();
    let known: BTreeSet<Var> = model.parameter_vars().into_iter().chain(aux.iter().cloned()).collect();
    let p = Problem { registry: model.registry.clone(), sense, objective, constraints, aux: aux.to_vec() };
    for v in p.variables() {
        if !known.contains(&v) {
            return Err(Error::UnknownIdentifier(model.registry.name(v)));
        }
        if fixed.contains_key(&v) {
            return Err(Error::Model(format!("`{}` is fixed", model.registry.name(v))));
        }
    }
    Ok(p)
}

impl Problem {
    /// Every variable of the problem, in registry order.
    pub fn variables(&self) -> Vec<Var> {
        let mut vs: BTreeSet<Var> = self.objective.num.variables();
        vs.extend(self.objective.den.variables());
        for b in &self.constraints.bounds {
            vs.insert(b.var);
        }
        for c in &self.constraints.constraints {
            vs.extend(c.variables());
        }
        vs.extend(self.aux.iter().cloned());
        vs.into_iter().collect()
    }

    pub fn classify(&self) -> Class {
        let linear_cons = self.constraints.constraints.iter().all(|c| c.difference().degree() <= 1);
        let (n, d) = (&self.objective.num, &self.objective.den);
        if !linear_cons {
            return Class::Polynomial;
        }
        if n.degree() <= 1 && d.is_constant() {
            Class::Linear
        } else if n.degree() <= 1 && d.degree() <= 1 {
            Class::FractionalLinear
        } else {
            Class::Polynomial
        }
    }

    /// `minimize: / subject to: / and:` layout.
    pub fn render(&self) -> String {
        let reg = &self.registry;
        let head = match self.sense {
            Sense::Min => "minimize",
            Sense::Max => "maximize",
        };
        let mut out = format!("{head}:\t{}\n", self.objective.display(reg));
        if !self.constraints.constraints.is_empty() {
            out.push_str("subject to:\n");
            for c in &self.constraints.constraints {
                out.push_str(&format!("\t{}\n", c.render(reg)));
            }
        }
        if !self.constraints.bounds.is_empty() {
            out.push_str("and:\n");
            for b in &self.constraints.bounds {
                out.push_str(&format!("\t{}\n", b.render(reg)));
            }
        }
        out
    }

    fn bounds_of(&self, v: Var) -> (Option<Rational>, Option<Rational>) {
        match self.constraints.bound(v) {
            Some(b) => (Some(b.lo.clone()), Some(b.hi.clone())),
            None => (None, None),
        }
    }

    /// Solves by class: simplex, Charnes-Cooper, or branch-and-bound.
    pub fn solve(&self, budget: usize) -> Result<Solution> {
        let class = self.classify();
        let mut p = self.clone();
        for c in p.constraints.constraints.iter_mut() {
            if c.rel.is_strict() {
                *c = strictify(c, &default_epsilon());
            }
        }
        match class {
            Class::Linear => p.solve_linear(class),
            Class::FractionalLinear => match p.charnes_cooper()? {
                Some(s) => Ok(s),
                None => p.solve_polynomial(budget),
            },
            Class::Polynomial => p.solve_polynomial(budget),
        }
    }

    fn linear_program(&self, vars: &[Var], objective: &Polynomial) -> Result<LinearProgram> {
        let n = vars.len();
        let pos = |v: Var| vars.iter().position(|&w| w == v).expect("variable in problem");
        let mut lp = LinearProgram::new(n);
        let (coeffs, constant) = objective
            .linear_coefficients()
            .ok_or_else(|| Error::Solver("objective is not linear".into()))?;
        for (v, c) in coeffs {
            lp.objective[pos(v)] = c;
        }
        lp.constant = constant;
        lp.maximize = self.sense == Sense::Max;
        for (j, &v) in vars.iter().enumerate() {
            let (lo, hi) = self.bounds_of(v);
            lp.lower[j] = lo;
            lp.upper[j] = hi;
        }
        for c in &self.constraints.constraints {
            let (coeffs, constant) = c
                .difference()
                .linear_coefficients()
                .ok_or_else(|| Error::Solver("constraint is not linear".into()))?;
            let mut row = vec![Rational::zero(); n];
            for (v, a) in coeffs {
                row[pos(v)] = a;
            }
            lp.rows.push((row, c.rel, -constant));
        }
        Ok(lp)
    }

    fn solve_linear(&self, class: Class) -> Result<Solution> {
        let vars = self.variables();
        let obj = self
            .objective
            .as_polynomial()
            .ok_or_else(|| Error::Solver("objective has a zero denominator".into()))?;
        let lp = self.linear_program(&vars, &obj)?;
        Ok(match solve_lp(&lp) {
            LpResult::Optimal { value, point } => Solution {
                status: Status::Optimal,
                lower: Some(Number::Exact(value.clone())),
                upper: Some(Number::Exact(value)),
                point: vars.iter().cloned().zip(point.into_iter().map(Number::Exact)).collect(),
                class,
            },
            LpResult::Infeasible => Solution::infeasible(class),
            LpResult::Unbounded => Solution { status: Status::Unbounded, lower: None, upper: None, point: vec![], class },
        })
    }

    /// Linear-fractional objective by the Charnes-Cooper transformation.
    /// Returns `None` when the denominator may be negative on the feasible set.
    pub fn charnes_cooper(&self) -> Result<Option<Solution>> {
        let class = Class::FractionalLinear;
        let vars = self.variables();
        let n = vars.len();
        let den = self.objective.den.clone();
        // Sign of the denominator over the feasible set.
        let mut probe = self.clone();
        probe.objective = den.clone().into();
        probe.sense = Sense::Min;
        let min_den = match probe.solve_linear(Class::Linear)? {
            Solution { status: Status::Infeasible, .. } => return Ok(Some(Solution::infeasible(class))),
            s => s.exact_value().cloned(),
        };
        probe.sense = Sense::Max;
        let max_den = probe.solve_linear(Class::Linear)?.exact_value().cloned();
        match (&min_den, &max_den) {
            (Some(lo), _) if lo.is_negative() => {
                let (lo_max, _) = (max_den.clone().unwrap_or_default(), ());
                if lo_max.is_positive() || lo_max.is_zero() {
                    // Denominator changes sign: fall back.
                    return Ok(None);
                }
                // Denominator never positive: negate both parts.
                let mut flipped = self.clone();
                flipped.objective = FractionalPolynomial::new(-&self.objective.num, -&self.objective.den);
                return flipped.charnes_cooper();
            }
            (None, _) => return Ok(None),
            _ => {}
        }
        if max_den.as_ref().is_some_and(|m| m.is_zero()) {
            return Err(Error::Solver("the objective's denominator vanishes on the feasible set".into()));
        }
        // Lifted variables y_j = s * x_j plus s itself in the last column.
        let pos = |v: Var| vars.iter().position(|&w| w == v).expect("variable in problem");
        let mut lp = LinearProgram::new(n + 1);
        lp.maximize = self.sense == Sense::Max;
        let (nc, n0) = self.objective.num.linear_coefficients().expect("classified linear");
        for (v, c) in nc {
            lp.objective[pos(v)] = c;
        }
        lp.objective[n] = n0;
        lp.lower[n] = Some(Rational::zero());
        let (dc, d0) = den.linear_coefficients().expect("classified linear");
        let mut norm = vec![Rational::zero(); n + 1];
        for (v, c) in dc {
            norm[pos(v)] = c;
        }
        norm[n] = d0;
        lp.rows.push((norm, Rel::Eq, Rational::one()));
        for (j, &v) in vars.iter().enumerate() {
            let (lo, hi) = self.bounds_of(v);
            if let Some(lo) = lo {
                let mut row = vec![Rational::zero(); n + 1];
                row[j] = Rational::one();
                row[n] = -lo;
                lp.rows.push((row, Rel::Ge, Rational::zero()));
            }
            if let Some(hi) = hi {
                let mut row = vec![Rational::zero(); n + 1];
                row[j] = Rational::one();
                row[n] = -hi;
                lp.rows.push((row, Rel::Le, Rational::zero()));
            }
        }
        for c in &self.constraints.constraints {
            let (coeffs, constant) = c.difference().linear_coefficients().expect("classified linear");
            let mut row = vec![Rational::zero(); n + 1];
            for (v, a) in coeffs {
                row[pos(v)] = a;
            }
            row[n] = constant;
            lp.rows.push((row, c.rel, Rational::zero()));
        }
        Ok(Some(match solve_lp(&lp) {
            LpResult::Optimal { value, point } => {
                let s = point[n].clone();
                if s.is_zero() {
                    return Err(Error::Solver("the optimum is approached only as the denominator vanishes".into()));
                }
                let x: Vec<Number> = point[..n].iter().map(|y| Number::Exact(y / &s)).collect();
                Solution {
                    status: Status::Optimal,
                    lower: Some(Number::Exact(value.clone())),
                    upper: Some(Number::Exact(value)),
                    point: vars.iter().cloned().zip(x).collect(),
                    class,
                }
            }
            LpResult::Infeasible => Solution::infeasible(class),
            LpResult::Unbounded => Solution { status: Status::Unbounded, lower: None, upper: None, point: vec![], class },
        }))
    }

    /// Substitutes away equalities that are linear in one variable with a
    /// constant coefficient. Returns the reduced problem and the
    /// substitutions in the order applied, or `None` when infeasible.
    fn presolve(&self) -> Option<(Problem, Vec<(Var, Polynomial)>)> {
        let mut p = self.clone();
        let mut subs: Vec<(Var, Polynomial)> = Vec::new();
        loop {
            let mut found = None;
            'outer: for (k, c) in p.constraints.constraints.iter().enumerate() {
                if c.rel != Rel::Eq {
                    continue;
                }
                let d = c.difference();
                for v in d.variables() {
                    if d.degree_in(v) != 1 {
                        continue;
                    }
                    let (with_v, rest): (Vec<_>, Vec<_>) =
                        d.terms().map(|(m, c)| (m.clone(), c.clone())).partition(|(m, _)| m.exponent(v) == 1);
                    if with_v.len() == 1 && with_v[0].0.degree() == 1 {
                        let a = with_v[0].1.clone();
                        let rest = Polynomial::from_terms(rest);
                        let value = rest.scale(&(-a.recip()));
                        found = Some((k, v, value));
                        break 'outer;
                    }
                }
            }
            let Some((k, v, value)) = found else { break };
            p.constraints.constraints.remove(k);
            let (lo, hi) = p.bounds_of(v);
            p.constraints.bounds.retain(|b| b.var != v);
            let vp = Polynomial::from(value.clone());
            if let Some(lo) = lo {
                p.constraints.constraints.push(Constraint::system(vp.clone(), Rel::Ge, Polynomial::constant(lo)));
            }
            if let Some(hi) = hi {
                p.constraints.constraints.push(Constraint::system(vp.clone(), Rel::Le, Polynomial::constant(hi)));
            }
            let map: BTreeMap<Var, Polynomial> = [(v, value.clone())].into_iter().collect();
            p.objective = FractionalPolynomial::new(p.objective.num.substitute(&map), p.objective.den.substitute(&map));
            let mut kept = Vec::new();
            for c in &p.constraints.constraints {
                let c2 = Constraint { lhs: c.lhs.substitute(&map), rel: c.rel, rhs: c.rhs.substitute(&map), origin: c.origin };
                match c2.difference().constant_value() {
                    Some(d) => {
                        let ok = c2.rel.sign_holds(&d);
                        if !ok {
                            return None;
                        }
                    }
                    None => kept.push(c2),
                }
            }
            p.constraints.constraints = kept;
            for (_, e) in subs.iter_mut() {
                *e = e.substitute(&map);
            }
            subs.push((v, value));
            p.aux.retain(|&a| a != v);
        }
        Some((p, subs))
    }

    fn solve_polynomial(&self, budget: usize) -> Result<Solution> {
        let class = Class::Polynomial;
        let Some((reduced, subs)) = self.presolve() else {
            return Ok(Solution::infeasible(class));
        };
        let removed: BTreeSet<Var> = subs.iter().map(|(v, _)| *v).collect();
        let mut sol = if reduced.classify() == Class::Linear {
            reduced.solve_linear(Class::Linear)?
        } else {
            reduced.branch_and_bound(budget)?
        };
        sol.class = class;
        if sol.status == Status::Infeasible || sol.status == Status::Unbounded {
            return Ok(sol);
        }
        // Recover substituted variables from the point.
        let exact_point = sol.point.iter().all(|(_, n)| n.exact().is_some());
        let values: BTreeMap<Var, Rational> = sol.point_map();
        let mut point: BTreeMap<Var, Number> = sol.point.iter().cloned().collect();
        for (v, e) in &subs {
            let val = e.substitute_values(&values);
            let n = match val.constant_value() {
                Some(r) if exact_point => Number::Exact(r),
                Some(r) => Number::Approx(to_f64(&r)),
                None => Number::Approx(f64::NAN),
            };
            point.insert(*v, n);
        }
        let all: Vec<Var> = self.variables();
        sol.point = all
            .into_iter()
            .filter_map(|v| point.get(&v).map(|n| (v, n.clone())).or_else(|| (!removed.contains(&v)).then_some((v, Number::Approx(f64::NAN)))))
            .collect();
        Ok(sol)
    }

    fn branch_and_bound(&self, budget: usize) -> Result<Solution> {
        let class = Class::Polynomial;
        let vars = self.variables();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for &v in &vars {
            match self.bounds_of(v) {
                (Some(lo), Some(hi)) => {
                    lower.push(lo);
                    upper.push(hi);
                }
                _ => {
                    return Err(Error::Solver(format!(
                        "`{}` needs finite bounds for polynomial optimization",
                        self.registry.name(v)
                    )))
                }
            }
        }
        let maximize = self.sense == Sense::Max;
        let (mut num, mut den) = (self.objective.num.clone(), self.objective.den.clone());
        if let Some(c) = den.constant_value() {
            if c.is_zero() {
                return Err(Error::Solver("objective has a zero denominator".into()));
            }
            num = num.scale(&c.recip());
            den = Polynomial::one();
        }
        if maximize {
            num = -&num;
        }
        let program = BoxProgram {
            vars: vars.clone(),
            lower,
            upper,
            num,
            den,
            constraints: self.constraints.constraints.iter().map(|c| (c.difference(), c.rel)).collect(),
        };
        let r = branch_and_bound(&program, budget, 1e-5);
        let Some((point, value)) = r.best else {
            if r.converged {
                return Ok(Solution::infeasible(class));
            }
            let lb = if maximize { -r.lower } else { r.lower };
            let (lo, hi) = if maximize { (None, Some(Number::Approx(lb))) } else { (Some(Number::Approx(lb)), None) };
            return Ok(Solution { status: Status::BoundsOnly, lower: lo, upper: hi, point: vec![], class });
        };
        let best = if maximize { -value } else { value };
        // The certified bound, never worse than the incumbent.
        let bound = if maximize { -r.lower } else { r.lower };
        let tight = (to_f64(&best) - bound).abs() < 5e-6;
        let bound = if tight { Number::Exact(best.clone()) } else { Number::Approx(bound) };
        let incumbent = Number::Exact(best);
        let (lo, hi) = if maximize { (incumbent, bound) } else { (bound, incumbent) };
        let point = vars.iter().cloned().zip(point.into_iter().map(|r| Number::Approx(to_f64(&r)))).collect();
        Ok(Solution {
            status: if r.converged { Status::Optimal } else { Status::BoundsOnly },
            lower: Some(lo),
            upper: Some(hi),
            point,
            class,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::rat;

    fn setup() -> (Registry, Var, Var, Var) {
        let reg = Registry::new();
        let (x, y, z) = (reg.var("x"), reg.var("y"), reg.var("z"));
        (reg, x, y, z)
    }

    fn unit_box(vars: &[Var]) -> ConstraintSet {
        let mut cs = ConstraintSet::default();
        for &v in vars {
            cs.set_bound(v, rat(0), rat(1));
        }
        cs
    }

    #[test]
    fn strict_weakening() {
        let reg = Registry::new();
        let y = Polynomial::var(reg.var("y"));
        let eps = ratio(1, 10);
        let c = strictify(&Constraint::user(y.clone(), Rel::Gt, Polynomial::zero()), &eps);
        assert_eq!(c.render(&reg), "y >= 1/10");
        let c = strictify(&Constraint::user(y, Rel::Lt, Polynomial::one()), &eps);
        assert_eq!(c.rel, Rel::Le);
        assert_eq!(c.rhs.constant_value(), Some(ratio(9, 10)));
    }

    #[test]
    fn classification() {
        let (reg, x, y, _) = setup();
        let (xp, yp) = (Polynomial::var(x), Polynomial::var(y));
        let mut p = Problem {
            registry: reg,
            sense: Sense::Min,
            objective: FractionalPolynomial::new(yp.clone(), &xp + &yp),
            constraints: unit_box(&[x, y]),
            aux: vec![],
        };
        assert_eq!(p.classify(), Class::FractionalLinear);
        p.objective = (&xp - &yp).into();
        assert_eq!(p.classify(), Class::Linear);
        p.objective = (&xp * &yp).into();
        assert_eq!(p.classify(), Class::Polynomial);
    }

    #[test]
    fn presolve_modus_ponens() {
        let (reg, x, y, z) = setup();
        let (xp, yp, zp) = (Polynomial::var(x), Polynomial::var(y), Polynomial::var(z));
        let mut cs = unit_box(&[x, y, z]);
        cs.push(Constraint::user(xp.clone(), Rel::Eq, Polynomial::one()));
        cs.push(Constraint::user(xp.clone(), Rel::Eq, &xp * &yp));
        let obj = &(&zp + &(&xp * &yp)) - &(&xp * &zp);
        let p = Problem { registry: reg.clone(), sense: Sense::Min, objective: obj.into(), constraints: cs, aux: vec![] };
        assert_eq!(p.classify(), Class::Polynomial);
        let s = p.solve(DEFAULT_BUDGET).unwrap();
        assert_eq!(s.exact_value(), Some(&rat(1)));
        assert_eq!(s.render_point(&reg), "{x = 1} {y = 1} {z = 0}");
        assert_eq!(s.render_value(), "1 1");
    }

    #[test]
    fn fractional_linear() {
        let reg = Registry::new();
        let xs: Vec<Var> = (1..=4).map(|i| reg.var(&format!("x{i}"))).collect();
        let p: Vec<Polynomial> = xs.iter().map(|&v| Polynomial::var(v)).collect();
        let mut cs = unit_box(&xs);
        cs.push(Constraint::system(&(&(&p[0] + &p[1]) + &p[2]) + &p[3], Rel::Eq, Polynomial::one()));
        let obj = FractionalPolynomial::new(p[1].clone(), &p[0] + &p[1]);
        let mut prob = Problem { registry: reg.clone(), sense: Sense::Min, objective: obj, constraints: cs, aux: vec![] };
        let s = prob.solve(DEFAULT_BUDGET).unwrap();
        assert_eq!(s.exact_value(), Some(&rat(0)));
        assert_eq!(prob.objective.num.evaluate(&s.point_map(), &reg).unwrap(), rat(0));
        prob.sense = Sense::Max;
        let s = prob.solve(DEFAULT_BUDGET).unwrap();
        assert_eq!(s.exact_value(), Some(&rat(1)));
    }

    #[test]
    fn expectation_bounds() {
        let (reg, x, y, z) = setup();
        let (xp, yp, zp) = (Polynomial::var(x), Polynomial::var(y), Polynomial::var(z));
        let mut cs = unit_box(&[x, y, z]);
        cs.push(Constraint::user(&Polynomial::constant(ratio(1, 4)) + &(&xp * &yp), Rel::Le, xp.clone()));
        // 1 + z + 2xy - xz
        let eb = &(&(&Polynomial::one() + &zp) + &(&xp * &yp).scale(&rat(2))) - &(&xp * &zp);
        let mut p = Problem { registry: reg, sense: Sense::Min, objective: eb.into(), constraints: cs, aux: vec![] };
        let s = p.solve(DEFAULT_BUDGET).unwrap();
        let (lo, hi) = (s.lower.unwrap().to_f64(), s.upper.unwrap().to_f64());
        assert!(lo <= 1.0 + 1e-9 && hi >= 1.0 - 1e-9 && hi - lo <= 0.01, "{lo} {hi}");
        p.sense = Sense::Max;
        let s = p.solve(DEFAULT_BUDGET).unwrap();
        let (lo, hi) = (s.lower.unwrap().to_f64(), s.upper.unwrap().to_f64());
        assert!(lo <= 2.5 + 1e-9 && hi >= 2.5 - 1e-9 && hi - lo <= 0.01, "{lo} {hi}");
    }
}
