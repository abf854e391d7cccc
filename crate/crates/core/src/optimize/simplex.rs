//! Two-phase primal simplex over exact rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::network::Rel;
use crate::polynomial::Rational;

/// `min` or `max` of `objective . x + constant` subject to linear rows and
/// optional per-variable bounds. Strict relations are treated as their
/// closures.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constant: Rational,
    pub maximize: bool,
    pub rows: Vec<(Vec<Rational>, Rel, Rational)>,
    pub lower: Vec<Option<Rational>>,
    pub upper: Vec<Option<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpResult {
    Optimal { value: Rational, point: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(n: usize) -> Self {
        LinearProgram {
            objective: vec![Rational::zero(); n],
            constant: Rational::zero(),
            maximize: false,
            rows: Vec::new(),
            lower: vec![None; n],
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
}

/// How an original variable maps to nonnegative columns.
enum Map {
    /// x = lo + col
    Shift(Rational, usize),
    /// x = hi - col
    Mirror(Rational, usize),
    /// x = pos - neg
    Split(usize, usize),
}

struct Tableau {
    /// Rows of coefficients with the right-hand side last.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v = &*v / &p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost . x` over the current tableau. Columns at or beyond
    /// `allowed` never enter. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.t[i][j].is_zero() && !cost[b].is_zero() {
                        r -= &cost[b] * &self.t[i][j];
                    }
                }
                if r.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut best: Option<(Rational, usize, usize)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][c];
                if a.is_positive() {
                    let ratio = &self.t[i][self.cols] / a;
                    let better = match &best {
                        None => true,
                        Some((r, _, b)) => ratio < *r || (ratio == *r && self.basis[i] < *b),
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            let Some((_, r, _)) = best else { return false };
            self.pivot(r, c);
        }
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        let mut v = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            v += &cost[b] * &self.t[i][self.cols];
        }
        v
    }
}

/// Solves a linear program exactly.
pub fn solve_lp(lp: &LinearProgram) -> LpResult {
    let n = lp.num_vars();
    // Map each variable onto nonnegative structural columns.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for j in 0..n {
        match (&lp.lower[j], &lp.upper[j]) {
            (Some(lo), hi) => {
                if let Some(hi) = hi {
                    if hi < lo {
                        return LpResult::Infeasible;
                    }
                    bound_rows.push((ncols, hi - lo));
                }
                maps.push(Map::Shift(lo.clone(), ncols));
                ncols += 1;
            }
            (None, Some(hi)) => {
                maps.push(Map::Mirror(hi.clone(), ncols));
                ncols += 1;
            }
            (None, None) => {
                maps.push(Map::Split(ncols, ncols + 1));
                ncols += 2;
            }
        }
    }
    // Rows over structural columns, each `a . y REL b`.
    let mut rows: Vec<(Vec<Rational>, Rel, Rational)> = Vec::new();
    for (a, rel, b) in &lp.rows {
        let mut coeffs = vec![Rational::zero(); ncols];
        let mut rhs = b.clone();
        for (j, aj) in a.iter().enumerate() {
            if aj.is_zero() {
                continue;
            }
            match &maps[j] {
                Map::Shift(lo, c) => {
                    coeffs[*c] += aj;
                    rhs -= aj * lo;
                }
                Map::Mirror(hi, c) => {
                    coeffs[*c] -= aj;
                    rhs -= aj * hi;
                }
                Map::Split(p, q) => {
                    coeffs[*p] += aj;
                    coeffs[*q] -= aj;
                }
            }
        }
        let rel = match rel {
            Rel::Lt => Rel::Le,
            Rel::Gt => Rel::Ge,
            r => *r,
        };
        rows.push((coeffs, rel, rhs));
    }
    for (c, width) in bound_rows {
        let mut coeffs = vec![Rational::zero(); ncols];
        coeffs[c] = Rational::one();
        rows.push((coeffs, Rel::Le, width));
    }
    // Objective over structural columns, as a minimization.
    let mut cost = vec![Rational::zero(); ncols];
    for (j, cj) in lp.objective.iter().enumerate() {
        if cj.is_zero() {
            continue;
        }
        let cj = if lp.maximize { -cj } else { cj.clone() };
        match &maps[j] {
            Map::Shift(_, c) => cost[*c] += &cj,
            Map::Mirror(_, c) => cost[*c] -= &cj,
            Map::Split(p, q) => {
                cost[*p] += &cj;
                cost[*q] -= &cj;
            }
        }
    }
    // Normalize right-hand sides to be nonnegative.
    for (a, rel, b) in rows.iter_mut() {
        if b.is_negative() {
            for v in a.iter_mut() {
                *v = -&*v;
            }
            *b = -&*b;
            *rel = match *rel {
                Rel::Le => Rel::Ge,
                Rel::Ge => Rel::Le,
                r => r,
            };
        }
    }
    let m = rows.len();
    let slack_count = rows.iter().filter(|(_, r, _)| *r != Rel::Eq).count();
    let art_count = rows.iter().filter(|(_, r, _)| *r != Rel::Le).count();
    let slack0 = ncols;
    let art0 = ncols + slack_count;
    let cols = art0 + art_count;
    let mut t = vec![vec![Rational::zero(); cols + 1]; m];
    let mut basis = vec![0; m];
    let (mut s, mut a) = (slack0, art0);
    for (i, (coeffs, rel, b)) in rows.iter().enumerate() {
        t[i][..ncols].clone_from_slice(coeffs);
        t[i][cols] = b.clone();
        match rel {
            Rel::Le => {
                t[i][s] = Rational::one();
                basis[i] = s;
                s += 1;
            }
            Rel::Ge => {
                t[i][s] = -Rational::one();
                s += 1;
                t[i][a] = Rational::one();
                basis[i] = a;
                a += 1;
            }
            _ => {
                t[i][a] = Rational::one();
                basis[i] = a;
                a += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, cols };
    if art_count > 0 {
        let mut phase1 = vec![Rational::zero(); cols];
        for c in phase1.iter_mut().skip(art0) {
            *c = Rational::one();
        }
        tab.optimize(&phase1, cols);
        if tab.value(&phase1).is_positive() {
            return LpResult::Infeasible;
        }
        // Drive remaining artificials out of the basis.
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= art0 {
                match (0..art0).find(|&j| !tab.t[i][j].is_zero()) {
                    Some(j) => tab.pivot(i, j),
                    None => {
                        tab.t.remove(i);
                        tab.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
    let mut full_cost = cost.clone();
    full_cost.resize(cols, Rational::zero());
    if !tab.optimize(&full_cost, art0) {
        return LpResult::Unbounded;
    }
    let mut y = vec![Rational::zero(); cols];
    for (i, &b) in tab.basis.iter().enumerate() {
        y[b] = tab.t[i][cols].clone();
    }
    let point: Vec<Rational> = maps
        .iter()
        .map(|m| match m {
            Map::Shift(lo, c) => lo + &y[*c],
            Map::Mirror(hi, c) => hi - &y[*c],
            Map::Split(p, q) => &y[*p] - &y[*q],
        })
        .collect();
    let mut value = lp.constant.clone();
    for (cj, xj) in lp.objective.iter().zip(&point) {
        value += cj * xj;
    }
    LpResult::Optimal { value, point }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{rat, ratio};

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&k| rat(k)).collect()
    }

    #[test]
    fn box_maximum() {
        let mut lp = LinearProgram::new(1);
        lp.objective = r(&[1]);
        lp.maximize = true;
        lp.lower = vec![Some(rat(0))];
        lp.upper = vec![Some(rat(1))];
        assert_eq!(solve_lp(&lp), LpResult::Optimal { value: rat(1), point: r(&[1]) });
    }

    #[test]
    fn threshold_program() {
        // max z s.t. x1+x2+x3 = 1, x1+x2 >= z, x2+x3 >= z, x1+x3 >= z
        let mut lp = LinearProgram::new(4);
        lp.objective = r(&[0, 0, 0, 1]);
        lp.maximize = true;
        for j in 0..3 {
            lp.lower[j] = Some(rat(0));
            lp.upper[j] = Some(rat(1));
        }
        lp.rows.push((r(&[1, 1, 1, 0]), Rel::Eq, rat(1)));
        lp.rows.push((r(&[1, 1, 0, -1]), Rel::Ge, rat(0)));
        lp.rows.push((r(&[0, 1, 1, -1]), Rel::Ge, rat(0)));
        lp.rows.push((r(&[1, 0, 1, -1]), Rel::Ge, rat(0)));
        let LpResult::Optimal { value, .. } = solve_lp(&lp) else { panic!() };
        assert_eq!(value, ratio(2, 3));
    }

    #[test]
    fn statuses() {
        let mut lp = LinearProgram::new(1);
        lp.objective = r(&[1]);
        lp.rows.push((r(&[1]), Rel::Ge, rat(2)));
        lp.rows.push((r(&[1]), Rel::Le, rat(1)));
        assert_eq!(solve_lp(&lp), LpResult::Infeasible);
        let mut lp = LinearProgram::new(1);
        lp.objective = r(&[1]);
        lp.maximize = true;
        lp.lower = vec![Some(rat(0))];
        assert_eq!(solve_lp(&lp), LpResult::Unbounded);
        let mut lp = LinearProgram::new(2);
        lp.objective = r(&[1, -1]);
        lp.rows.push((r(&[1, 1]), Rel::Eq, rat(1)));
        lp.rows.push((r(&[2, 2]), Rel::Eq, rat(2)));
        lp.lower = vec![Some(rat(0)), Some(rat(0))];
        let LpResult::Optimal { value, point } = solve_lp(&lp) else { panic!() };
        assert_eq!((value, point), (rat(-1), r(&[0, 1])));
    }
}
