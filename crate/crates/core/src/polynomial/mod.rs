//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Variables are small integer handles issued by a [`Registry`]. The registry
//! also fixes the variable order used for term ordering and printing: terms are
//! shown lowest total degree first, and within a degree by descending
//! lexicographic exponent vector in registration order, so `1 - x + x*y` and
//! `x - x^2 - x*y + x^2*y` print exactly like that.

mod f2;
mod fraction;

pub use f2::F2Polynomial;
pub use fraction::{
    reduce_quotient, render_guard, simplify_quotient, unless_form, FractionalPolynomial, Reduction, UnlessForm,
};

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms.
pub type Rational = num_rational::BigRational;

/// Builds a rational from an integer.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds the rational `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `3`, `-2/5` or `0.125` exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t),
    };
    let value = if let Some((n, d)) = body.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Rational::new(n, d)
    } else if let Some((whole, frac)) = body.split_once('.') {
        if whole.is_empty() && frac.is_empty() {
            return None;
        }
        if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{whole}{frac}");
        let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let d = num_traits::pow(BigInt::from(10), frac.len());
        Rational::new(n, d)
    } else {
        if body.is_empty() || !body.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        Rational::from_integer(body.parse().ok()?)
    };
    Some(if neg { -value } else { value })
}

/// Converts a rational to the nearest `f64`.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators or denominators: fall back to a scaled division.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact rational value of a finite `f64`.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Handle of a registered variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

#[derive(Default, Debug)]
struct RegistryInner {
    names: Vec<String>,
    index: HashMap<String, Var>,
}

/// Shared variable registry. Clones share the same table.
#[derive(Clone, Default, Debug)]
pub struct Registry {
    inner: Arc<RwLock<RegistryInner>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the handle for `name`, registering it on first use.
    pub fn var(&self, name: &str) -> Var {
        if let Some(v) = self.lookup(name) {
            return v;
        }
        let mut inner = self.inner.write().expect("registry poisoned");
        if let Some(&v) = inner.index.get(name) {
            return v;
        }
        let v = Var(inner.names.len() as u32);
        inner.names.push(name.to_string());
        inner.index.insert(name.to_string(), v);
        v
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.inner.read().expect("registry poisoned").index.get(name).copied()
    }

    pub fn name(&self, v: Var) -> String {
        self.inner
            .read()
            .expect("registry poisoned")
            .names
            .get(v.0 as usize)
            .cloned()
            .unwrap_or_else(|| format!("v{}", v.0))
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("registry poisoned").names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> Vec<String> {
        self.inner.read().expect("registry poisoned").names.clone()
    }

    pub fn same(&self, other: &Registry) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}

/// Power product of variables, stored as `(variable, exponent)` pairs sorted by
/// variable with every exponent positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u32)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_by_key(|&(v, _)| v);
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|&&(w, _)| w == v).map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when every exponent of `other` is covered.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = self.0.clone();
        for &(v, e) in &other.0 {
            let slot = out.iter_mut().find(|(w, _)| *w == v)?;
            if slot.1 < e {
                return None;
            }
            slot.1 -= e;
        }
        out.retain(|&(_, e)| e > 0);
        Some(Monomial(out))
    }

    /// Caps every exponent at one.
    pub fn multilinear(&self) -> Monomial {
        Monomial(self.0.iter().map(|&(v, _)| (v, 1)).collect())
    }

    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        // Ordering::Less means `self` is lexicographically larger and is
        // printed first.
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Less,
                (None, Some(_)) => return Ordering::Greater,
                (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                    Ordering::Less => return Ordering::Less,
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Equal => {
                        if ea != eb {
                            return eb.cmp(&ea);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }

    /// Graded-lex comparison used to pick leading terms in division.
    fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.lex_cmp(self))
    }

    fn fmt_with(&self, reg: &Registry, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            f.write_str(&reg.name(v))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl Ord for Monomial {
    /// Display order: ascending degree, then descending lex.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rat(n))
    }

    pub fn var(v: Var) -> Self {
        Self::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// Some(c) when the polynomial is the constant `c` (including zero).
    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect()
    }

    pub fn all_coefficients_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Applies the idempotent law `v^2 = v` to every variable.
    pub fn multilinear(&self) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (m.multilinear(), c.clone())))
    }

    /// Replaces bound variables by polynomials; unbound variables stay symbolic.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Polynomial>) -> Polynomial {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut factor = Polynomial::constant(c.clone());
            for &(v, e) in &m.0 {
                match bindings.get(&v) {
                    Some(p) => factor = &factor * &p.pow(e),
                    None => kept.push((v, e)),
                }
            }
            out += &(&factor * &Polynomial::term(Rational::one(), Monomial(kept)));
        }
        out
    }

    /// Substitutes rational values.
    pub fn substitute_values(&self, values: &BTreeMap<Var, Rational>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut kept = Vec::new();
            for &(v, e) in &m.0 {
                match values.get(&v) {
                    Some(x) => coef *= num_traits::pow(x.clone(), e as usize),
                    None => kept.push((v, e)),
                }
            }
            out.add_term(Monomial(kept), coef);
        }
        out
    }

    /// Exact value at a total assignment.
    pub fn evaluate(&self, point: &BTreeMap<Var, Rational>, reg: &Registry) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let x = point.get(&v).ok_or_else(|| Error::Unbound(reg.name(v)))?;
                t *= num_traits::pow(x.clone(), e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating-point value; missing variables read as zero.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter().fold(to_f64(c), |acc, &(v, e)| {
                    acc * point.get(v.0 as usize).copied().unwrap_or(0.0).powi(e as i32)
                })
            })
            .sum()
    }

    pub fn derivative(&self, v: Var) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let pairs = m
                .0
                .iter()
                .map(|&(w, k)| if w == v { (w, k - 1) } else { (w, k) })
                .collect();
            out.add_term(Monomial::from_pairs(pairs), c * rat(e as i64));
        }
        out
    }

    /// Leading term under graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| a.0.grlex_cmp(b.0))
    }

    /// Exact quotient `self / d` if `d` divides `self`, else `None`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (ld, lc) = d.leading()?;
        let (ld, lc) = (ld.clone(), lc.clone());
        let mut q = Polynomial::zero();
        let mut r = self.clone();
        while let Some((lr, cr)) = r.leading() {
            let m = lr.div(&ld)?;
            let t = Polynomial::term(cr / &lc, m);
            r -= &(&t * d);
            q += &t;
        }
        Some(q)
    }

    /// Coefficient of `v` when the polynomial is affine in its variables.
    pub fn linear_coefficients(&self) -> Option<(BTreeMap<Var, Rational>, Rational)> {
        if self.degree() > 1 {
            return None;
        }
        let mut coeffs = BTreeMap::new();
        for (m, c) in &self.terms {
            if let [(v, 1)] = m.0.as_slice() {
                coeffs.insert(*v, c.clone());
            }
        }
        Some((coeffs, self.constant_term()))
    }

    pub fn display<'a>(&'a self, reg: &'a Registry) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, reg }
    }

    pub fn to_string_with(&self, reg: &Registry) -> String {
        self.display(reg).to_string()
    }

    /// Splits into terms with positive and negated-negative coefficients.
    pub fn split_signs(&self) -> (Polynomial, Polynomial) {
        let mut pos = Polynomial::zero();
        let mut neg = Polynomial::zero();
        for (m, c) in &self.terms {
            if c.is_negative() {
                neg.add_term(m.clone(), -c);
            } else {
                pos.add_term(m.clone(), c.clone());
            }
        }
        (pos, neg)
    }
}

/// Formats a rational coefficient: integers plainly, others as `n/d`.
/// Like [`fmt_rational`] but with a leading minus for negatives.
pub fn fmt_signed(r: &Rational) -> String {
    if r.is_negative() {
        format!("-{}", fmt_rational(&-r))
    } else {
        fmt_rational(r)
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    reg: &'a Registry,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.poly.terms.iter().enumerate() {
            let mag = c.abs();
            if k == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&mag))?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", fmt_rational(&mag))?;
                }
                m.fmt_with(self.reg, f)?;
            }
        }
        Ok(())
    }
}

impl From<Rational> for Polynomial {
    fn from(c: Rational) -> Self {
        Polynomial::constant(c)
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Registry, Polynomial, Polynomial, Polynomial) {
        let reg = Registry::new();
        let x = Polynomial::var(reg.var("x"));
        let y = Polynomial::var(reg.var("y"));
        let z = Polynomial::var(reg.var("z"));
        (reg, x, y, z)
    }

    #[test]
    fn sum_of_conditional_rows() {
        let (reg, x, _, z) = setup();
        let one = Polynomial::one();
        let a = &z - &(&x * &z);
        let b = &(&(&one - &x) - &z) + &(&x * &z);
        assert_eq!((&a + &b).to_string_with(&reg), "1 - x");
    }

    #[test]
    fn products_print_in_graded_lex_order() {
        let (reg, x, y, z) = setup();
        let one = Polynomial::one();
        let p = &(&one - &x) * &(&one - &z);
        assert_eq!(p.to_string_with(&reg), "1 - x - z + x*z");
        let q = &(&(&one - &x) * &(&one - &y)) * &x;
        assert_eq!(q.to_string_with(&reg), "x - x^2 - x*y + x^2*y");
    }

    #[test]
    fn registry_order_drives_display() {
        let reg = Registry::new();
        let x = Polynomial::var(reg.var("x"));
        let _y = reg.var("y");
        let z = Polynomial::var(reg.var("z"));
        let t4 = Polynomial::var(reg.var("t4"));
        let one = Polynomial::one();
        let p = &(&(&one - &x) * &(&one - &z)) * &(&one - &t4);
        assert_eq!(p.to_string_with(&reg), "1 - x - z - t4 + x*z + x*t4 + z*t4 - x*z*t4");
    }

    #[test]
    fn coefficients_render() {
        let (reg, x, y, _) = setup();
        let p = &(&x * &y).scale(&rat(2)) - &Polynomial::constant(ratio(1, 4));
        assert_eq!(p.to_string_with(&reg), "-1/4 + 2*x*y");
        assert_eq!(Polynomial::zero().to_string_with(&reg), "0");
    }

    #[test]
    fn substitution_of_values() {
        let reg = Registry::new();
        let names = ["x", "y", "z", "t1", "t2", "t3", "t4"];
        let v: Vec<Polynomial> = names.iter().map(|n| Polynomial::var(reg.var(n))).collect();
        let (x, y, z, t2, t3, t4) = (&v[0], &v[1], &v[2], &v[4], &v[5], &v[6]);
        let mut p = x + z;
        p += t4;
        for q in [x * y, x * z, x * t2, x * t4, z * t3, z * t4] {
            p -= &q;
        }
        for q in [&(x * y) * t2, &(x * z) * t3, &(x * z) * t4] {
            p += &q;
        }
        let vals: BTreeMap<Var, Rational> = [("t1", 1), ("t2", 0), ("t3", 0), ("t4", 1)]
            .iter()
            .map(|(n, k)| (reg.lookup(n).unwrap(), rat(*k)))
            .collect();
        assert_eq!(p.substitute_values(&vals).to_string_with(&reg), "1 - x*y");
    }

    #[test]
    fn evaluate_errors_on_missing_variable() {
        let (reg, x, y, _) = setup();
        let p = &(&Polynomial::one() - &x) + &(&x * &y);
        let pt: BTreeMap<Var, Rational> =
            [(reg.lookup("x").unwrap(), rat(1)), (reg.lookup("y").unwrap(), rat(0))].into();
        assert_eq!(p.evaluate(&pt, &reg).unwrap(), rat(0));
        let partial: BTreeMap<Var, Rational> = [(reg.lookup("x").unwrap(), rat(1))].into();
        assert!(matches!(p.evaluate(&partial, &reg), Err(Error::Unbound(n)) if n == "y"));
    }

    #[test]
    fn exact_division() {
        let (reg, x, y, z) = setup();
        let one = Polynomial::one();
        let n = &(&one - &x) * &(&one - &z);
        assert_eq!(n.div_exact(&(&one - &x)).unwrap().to_string_with(&reg), "1 - z");
        assert_eq!((&x * &y).div_exact(&x).unwrap(), y);
        assert!(x.div_exact(&(&x * &y)).is_none());
        assert!((&one + &x).div_exact(&(&one - &x)).is_none());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("abc").is_none());
    }

    #[test]
    fn derivative_and_degree() {
        let (reg, x, y, _) = setup();
        let p = &(&x * &x) * &y;
        assert_eq!(p.degree(), 3);
        let d = p.derivative(reg.lookup("x").unwrap());
        assert_eq!(d.to_string_with(&reg), "2*x*y");
    }
}
