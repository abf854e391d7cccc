//! Outward-rounded interval arithmetic and a best-first branch-and-bound
//! for box-constrained polynomial programs.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::network::Rel;
use crate::polynomial::{from_f64, to_f64, Polynomial, Rational, Var};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Smallest interval certainly containing a rational.
    pub fn of(r: &Rational) -> Self {
        let x = to_f64(r);
        if from_f64(x) == *r {
            Interval::point(x)
        } else {
            Interval { lo: x.next_down(), hi: x.next_up() }
        }
    }

    pub fn entire() -> Self {
        Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    fn widen(lo: f64, hi: f64) -> Self {
        Interval { lo: lo.next_down(), hi: hi.next_up() }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    pub fn intersect(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.max(o.lo), hi: self.hi.min(o.hi) }
    }

    pub fn powi(&self, e: u32) -> Interval {
        if e == 0 {
            return Interval::point(1.0);
        }
        if e == 1 {
            return *self;
        }
        let (a, b) = (self.lo.powi(e as i32), self.hi.powi(e as i32));
        if e % 2 == 1 {
            Interval::widen(a, b)
        } else if self.lo >= 0.0 {
            Interval::widen(a, b)
        } else if self.hi <= 0.0 {
            Interval::widen(b, a)
        } else {
            Interval { lo: 0.0, hi: a.max(b).next_up() }
        }
    }

    pub fn div(&self, o: &Interval) -> Interval {
        if o.contains_zero() {
            return Interval::entire();
        }
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        Interval::widen(c.iter().cloned().fold(f64::INFINITY, f64::min), c.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval::widen(self.lo + o.lo, self.hi + o.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval::widen(self.lo - o.hi, self.hi - o.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        if self.lo == self.hi && o.lo == o.hi {
            let p = self.lo * o.lo;
            return if p == 0.0 { Interval::point(0.0) } else { Interval::widen(p, p) };
        }
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().cloned().filter(|v| !v.is_nan()).fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max);
        Interval::widen(lo, hi)
    }
}

/// Polynomial compiled against a variable ordering for fast evaluation.
#[derive(Clone, Debug)]
pub struct Compiled {
    terms: Vec<(Interval, f64, Vec<(usize, u32)>)>,
}

impl Compiled {
    pub fn new(p: &Polynomial, vars: &[Var]) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let idx = m
                    .pairs()
                    .iter()
                    .map(|&(v, e)| (vars.iter().position(|&w| w == v).expect("variable in problem"), e))
                    .collect();
                (Interval::of(c), to_f64(c), idx)
            })
            .collect();
        Compiled { terms }
    }

    pub fn eval(&self, b: &[Interval]) -> Interval {
        let mut acc = Interval::point(0.0);
        for (c, _, idx) in &self.terms {
            let mut t = *c;
            for &(i, e) in idx {
                t = t * b[i].powi(e);
            }
            acc = acc + t;
        }
        acc
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(_, c, idx)| idx.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e as i32)))
            .sum()
    }
}

/// Polynomial with its gradient, for mean-value enclosures.
#[derive(Clone, Debug)]
pub struct Enclosure {
    pub f: Compiled,
    pub grad: Vec<Compiled>,
}

impl Enclosure {
    pub fn new(p: &Polynomial, vars: &[Var]) -> Self {
        Enclosure { f: Compiled::new(p, vars), grad: vars.iter().map(|&v| Compiled::new(&p.derivative(v), vars)).collect() }
    }

    /// Natural extension intersected with the mean-value form.
    pub fn bound(&self, b: &[Interval]) -> (Interval, Vec<Interval>) {
        let natural = self.f.eval(b);
        let grads: Vec<Interval> = self.grad.iter().map(|g| g.eval(b)).collect();
        let c: Vec<Interval> = b.iter().map(|i| Interval::point(i.mid())).collect();
        let mut mv = self.f.eval(&c);
        for (k, g) in grads.iter().enumerate() {
            mv = mv + *g * (b[k] - c[k]);
        }
        (natural.intersect(&mv), grads)
    }
}

/// One constraint `g REL 0`.
#[derive(Clone, Debug)]
pub struct BoxConstraint {
    pub g: Enclosure,
    pub rel: Rel,
}

/// Polynomial program over a box, always minimized; the caller negates the
/// objective for maximization.
pub struct BoxProgram {
    pub vars: Vec<Var>,
    pub lower: Vec<Rational>,
    pub upper: Vec<Rational>,
    pub num: Polynomial,
    pub den: Polynomial,
    pub constraints: Vec<(Polynomial, Rel)>,
}

#[derive(Clone, Debug)]
pub struct BnbResult {
    /// Certified lower bound on the minimum.
    pub lower: f64,
    /// Best feasible point with its exact objective value.
    pub best: Option<(Vec<Rational>, Rational)>,
    /// True when the search stopped on the gap rather than the budget.
    pub converged: bool,
    pub boxes: usize,
}

struct Node {
    lb: f64,
    seq: usize,
    b: Vec<Interval>,
}

impl PartialEq for Node {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Node {
    // Reversed so that the heap pops the smallest bound first.
    fn cmp(&self, o: &Self) -> Ordering {
        o.lb.total_cmp(&self.lb).then(o.seq.cmp(&self.seq))
    }
}

const FEAS_TOL: f64 = 1e-12;
const MIN_WIDTH: f64 = 1e-9;

struct Search<'a> {
    p: &'a BoxProgram,
    num: Enclosure,
    den: Option<Enclosure>,
    cons: Vec<BoxConstraint>,
    free: Vec<bool>,
    best: Option<(Vec<Rational>, Rational)>,
    best_f: f64,
}

impl Search<'_> {
    fn objective(&self, b: &[Interval]) -> (Interval, Vec<Interval>) {
        let (n, g) = self.num.bound(b);
        match &self.den {
            None => (n, g),
            Some(d) => {
                let (dv, _) = d.bound(b);
                (n.div(&dv), vec![Interval::entire(); b.len()])
            }
        }
    }

    /// Exact feasibility and objective of a point, after a cheap
    /// floating-point screen.
    fn try_point(&mut self, x: &[f64]) {
        let d = self.den.as_ref().map_or(1.0, |d| d.f.eval_f64(x));
        let f = self.num.f.eval_f64(x) / d;
        if !(f < self.best_f) {
            return;
        }
        for c in &self.cons {
            let g = c.g.f.eval_f64(x);
            let ok = match c.rel {
                Rel::Le | Rel::Lt => g <= 1e-9,
                Rel::Ge | Rel::Gt => g >= -1e-9,
                Rel::Eq => g.abs() <= 1e-9,
            };
            if !ok {
                return;
            }
        }
        let point: Vec<Rational> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let r = from_f64(v);
                r.max(self.p.lower[i].clone()).min(self.p.upper[i].clone())
            })
            .collect();
        self.try_exact(point);
    }

    fn try_exact(&mut self, point: Vec<Rational>) {
        let values: std::collections::BTreeMap<Var, Rational> =
            self.p.vars.iter().cloned().zip(point.iter().cloned()).collect();
        for (g, rel) in &self.p.constraints {
            let v = g.substitute_values(&values).constant_value().unwrap_or_default();
            let ok = match rel {
                Rel::Eq => v.is_zero(),
                Rel::Le | Rel::Lt => v <= Rational::zero(),
                Rel::Ge | Rel::Gt => v >= Rational::zero(),
            };
            if !ok {
                return;
            }
        }
        let n = self.p.num.substitute_values(&values).constant_value().unwrap_or_default();
        let d = self.p.den.substitute_values(&values).constant_value().unwrap_or_default();
        if d.is_zero() {
            return;
        }
        let f = n / d;
        let better = match &self.best {
            None => true,
            Some((_, v)) => f < *v,
        };
        if better {
            self.best_f = to_f64(&f);
            self.best = Some((point, f));
        }
    }

    /// Rounds a point to nearby simple fractions and keeps it when feasible
    /// and no worse.
    fn snap(&mut self) {
        let Some((point, value)) = self.best.clone() else { return };
        for d in [1i64, 2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 32, 64, 100, 1000] {
            let snapped: Vec<Rational> = point
                .iter()
                .map(|r| {
                    let k = (to_f64(r) * d as f64).round() as i64;
                    Rational::new(k.into(), d.into())
                })
                .collect();
            let before = self.best.clone();
            self.best = None;
            self.try_exact(snapped);
            match &self.best {
                Some((_, v)) if *v <= value => return,
                _ => {
                    self.best = before;
                    self.best_f = to_f64(&value);
                }
            }
        }
    }

    /// Constraint status over a box: None when infeasible, Some(true) when
    /// every point satisfies all constraints.
    fn status(&self, b: &[Interval]) -> (Option<bool>, Vec<f64>) {
        let mut all = true;
        let mut weights = vec![0.0; b.len()];
        for c in &self.cons {
            let (g, grads) = c.g.bound(b);
            let (infeasible, inside) = match c.rel {
                Rel::Le | Rel::Lt => (g.lo > FEAS_TOL, g.hi <= 0.0),
                Rel::Ge | Rel::Gt => (g.hi < -FEAS_TOL, g.lo >= 0.0),
                Rel::Eq => (g.lo > FEAS_TOL || g.hi < -FEAS_TOL, false),
            };
            if infeasible {
                return (None, weights);
            }
            if !inside {
                all = false;
                for (w, gi) in weights.iter_mut().zip(&grads) {
                    *w += gi.mag();
                }
            }
        }
        (Some(all), weights)
    }
}

/// Minimizes `num / den` over the box subject to the constraints. A constant
/// denominator must be exactly one.
pub fn branch_and_bound(p: &BoxProgram, budget: usize, tol: f64) -> BnbResult {
    let n = p.vars.len();
    let num = Enclosure::new(&p.num, &p.vars);
    let den = if p.den.is_constant() { None } else { Some(Enclosure::new(&p.den, &p.vars)) };
    let cons: Vec<BoxConstraint> = p
        .constraints
        .iter()
        .map(|(g, rel)| BoxConstraint { g: Enclosure::new(g, &p.vars), rel: *rel })
        .collect();
    // Variables absent from constraints and denominator may be pinned by monotonicity.
    let free: Vec<bool> = p
        .vars
        .iter()
        .map(|&v| p.constraints.iter().all(|(g, _)| g.degree_in(v) == 0) && p.den.degree_in(v) == 0)
        .collect();
    let mut s = Search { p, num, den, cons, free, best: None, best_f: f64::INFINITY };
    let root: Vec<Interval> = (0..n).map(|i| Interval::new(to_f64(&p.lower[i]), to_f64(&p.upper[i]))).collect();
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut unresolved = f64::INFINITY;
    let mut pruned = f64::INFINITY;
    heap.push(Node { lb: f64::NEG_INFINITY, seq, b: root });
    let mut boxes = 0usize;
    let mut converged = false;
    while let Some(node) = heap.pop() {
        if node.lb >= s.best_f - tol {
            converged = true;
            heap.push(node);
            break;
        }
        if boxes >= budget {
            heap.push(node);
            break;
        }
        boxes += 1;
        let mut b = node.b;
        let (status, weights) = s.status(&b);
        let Some(all_feasible) = status else { continue };
        let (mut f, grads) = s.objective(&b);
        let mut collapsed = false;
        for i in 0..n {
            if !s.free[i] || b[i].width() == 0.0 {
                continue;
            }
            let g = grads[i];
            if g.lo >= 0.0 {
                b[i] = Interval::point(b[i].lo);
                collapsed = true;
            } else if g.hi <= 0.0 {
                b[i] = Interval::point(b[i].hi);
                collapsed = true;
            }
        }
        if collapsed {
            f = s.objective(&b).0.intersect(&f);
        }
        let lb = f.lo;
        if lb >= s.best_f - tol {
            pruned = pruned.min(lb);
            continue;
        }
        let mid: Vec<f64> = b.iter().map(|i| i.mid()).collect();
        s.try_point(&mid);
        if !all_feasible && n <= 6 {
            for mask in 0..(1u32 << n) {
                let corner: Vec<f64> = (0..n).map(|i| if mask & (1 << i) != 0 { b[i].hi } else { b[i].lo }).collect();
                s.try_point(&corner);
            }
        }
        if all_feasible && f.width() <= tol {
            // The box is resolved: its objective is known to tolerance.
            unresolved = unresolved.min(lb);
            continue;
        }
        // Split the variable with the largest weighted width.
        let mut split = None;
        let mut best_score = -1.0;
        for i in 0..n {
            let w = b[i].width();
            if w <= MIN_WIDTH {
                continue;
            }
            let score = w * (1.0 + grads[i].mag().min(1e12) + weights[i].min(1e12));
            if score > best_score {
                best_score = score;
                split = Some(i);
            }
        }
        let Some(i) = split else {
            unresolved = unresolved.min(lb);
            continue;
        };
        let m = b[i].mid();
        let mut left = b.clone();
        let mut right = b;
        left[i].hi = m;
        right[i].lo = m;
        for child in [left, right] {
            seq += 1;
            heap.push(Node { lb, seq, b: child });
        }
    }
    s.snap();
    let mut lower = unresolved.min(pruned).min(s.best_f);
    for node in heap.iter() {
        lower = lower.min(node.lb);
    }
    if heap.is_empty() {
        converged = true;
    }
    if converged {
        if let Some((_, v)) = &s.best {
            lower = lower.min(to_f64(v));
        }
    }
    BnbResult { lower, best: s.best, converged, boxes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{rat, ratio, Registry};

    #[test]
    fn interval_ops_enclose() {
        let a = Interval::new(-1.0, 2.0);
        let b = Interval::new(3.0, 4.0);
        let p = a * b;
        assert!(p.lo <= -4.0 && p.hi >= 8.0);
        let sq = a.powi(2);
        assert!(sq.lo == 0.0 && sq.hi >= 4.0);
        let third = Interval::of(&ratio(1, 3));
        assert!(third.lo < 1.0 / 3.0 + 1e-17 && third.hi > 1.0 / 3.0 - 1e-17 && third.lo < third.hi);
    }

    #[test]
    fn minimizes_quadratic() {
        let reg = Registry::new();
        let x = reg.var("x");
        let xp = Polynomial::var(x);
        // (x - 1/3)^2 on [0, 1]
        let q = &xp - &Polynomial::constant(ratio(1, 3));
        let p = BoxProgram {
            vars: vec![x],
            lower: vec![rat(0)],
            upper: vec![rat(1)],
            num: &q * &q,
            den: Polynomial::one(),
            constraints: vec![],
        };
        let r = branch_and_bound(&p, 100_000, 1e-6);
        assert!(r.converged);
        assert!(r.lower <= 1e-9);
        let (_, v) = r.best.unwrap();
        assert!(to_f64(&v) < 1e-5);
    }
}
