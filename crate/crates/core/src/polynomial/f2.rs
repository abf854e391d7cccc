use std::collections::BTreeSet;
use std::fmt;

use super::{Monomial, Registry, Var};

/// Polynomial over the two-element field with idempotent variables.
///
/// Each term is a set of variables; the polynomial is the set of its terms, so
/// addition is symmetric difference.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct F2Polynomial {
    terms: BTreeSet<Monomial>,
}

impl F2Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self { terms: [Monomial::one()].into() }
    }

    pub fn var(v: Var) -> Self {
        Self { terms: [Monomial::var(v)].into() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { terms: self.terms.symmetric_difference(&other.terms).cloned().collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = BTreeSet::new();
        for a in &self.terms {
            for b in &other.terms {
                let m = a.mul(b).multilinear();
                if !out.remove(&m) {
                    out.insert(m);
                }
            }
        }
        Self { terms: out }
    }

    /// Value at a 0/1 point (`true` for variables set to one).
    pub fn evaluate(&self, point: impl Fn(Var) -> bool) -> bool {
        self.terms
            .iter()
            .filter(|m| m.pairs().iter().all(|&(v, _)| point(v)))
            .count()
            % 2
            == 1
    }

    pub fn display<'a>(&'a self, reg: &'a Registry) -> impl fmt::Display + 'a {
        struct D<'a>(&'a F2Polynomial, &'a Registry);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                if self.0.is_zero() {
                    return f.write_str("0");
                }
                for (k, m) in self.0.terms.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" + ")?;
                    }
                    if m.is_one() {
                        f.write_str("1")?;
                    } else {
                        m.fmt_with(self.1, f)?;
                    }
                }
                Ok(())
            }
        }
        D(self, reg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_laws() {
        let reg = Registry::new();
        let k = F2Polynomial::var(reg.var("K"));
        let a = F2Polynomial::var(reg.var("A"));
        let one = F2Polynomial::one();
        let lhs = one.add(&k).add(&a);
        let rhs = one.add(&k);
        assert_eq!(lhs.add(&rhs), a);
        assert!(lhs.add(&lhs).is_zero());
        assert_eq!(k.mul(&k), k);
        assert_eq!(one.add(&k).add(&a).display(&reg).to_string(), "1 + K + A");
    }
}
