use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Polynomial, Registry};
use crate::error::{Error, Result};

/// Numerator and denominator kept exactly as produced. `0/0` is a legal value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FractionalPolynomial {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl FractionalPolynomial {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        Self { num, den }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self::new(p, Polynomial::one())
    }

    pub fn indeterminate() -> Self {
        Self::new(Polynomial::zero(), Polynomial::zero())
    }

    pub fn is_indeterminate(&self) -> bool {
        self.num.is_zero() && self.den.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Exact value with the constant denominator folded in.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        let c = self.den.constant_value()?;
        if c.is_zero() {
            return None;
        }
        Some(self.num.scale(&c.recip()))
    }

    pub fn display<'a>(&'a self, reg: &'a Registry) -> FracDisplay<'a> {
        FracDisplay { frac: self, reg, force_quotient: false }
    }

    /// Always renders `(num) / (den)`, even for a unit denominator.
    pub fn display_quotient<'a>(&'a self, reg: &'a Registry) -> FracDisplay<'a> {
        FracDisplay { frac: self, reg, force_quotient: true }
    }

    fn combine(&self, rhs: &Self, sign: bool) -> Self {
        let op = |a: &Polynomial, b: &Polynomial| if sign { a + b } else { a - b };
        if self.den == rhs.den {
            Self::new(op(&self.num, &rhs.num), self.den.clone())
        } else if rhs.den.is_one() {
            Self::new(op(&self.num, &(&rhs.num * &self.den)), self.den.clone())
        } else if self.den.is_one() {
            Self::new(op(&(&self.num * &rhs.den), &rhs.num), rhs.den.clone())
        } else {
            Self::new(
                op(&(&self.num * &rhs.den), &(&rhs.num * &self.den)),
                &self.den * &rhs.den,
            )
        }
    }
}

impl From<Polynomial> for FractionalPolynomial {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl Add for &FractionalPolynomial {
    type Output = FractionalPolynomial;
    fn add(self, rhs: &FractionalPolynomial) -> FractionalPolynomial {
        self.combine(rhs, true)
    }
}

impl Sub for &FractionalPolynomial {
    type Output = FractionalPolynomial;
    fn sub(self, rhs: &FractionalPolynomial) -> FractionalPolynomial {
        self.combine(rhs, false)
    }
}

impl Mul for &FractionalPolynomial {
    type Output = FractionalPolynomial;
    fn mul(self, rhs: &FractionalPolynomial) -> FractionalPolynomial {
        FractionalPolynomial::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &FractionalPolynomial {
    type Output = FractionalPolynomial;
    fn div(self, rhs: &FractionalPolynomial) -> FractionalPolynomial {
        FractionalPolynomial::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Neg for &FractionalPolynomial {
    type Output = FractionalPolynomial;
    fn neg(self) -> FractionalPolynomial {
        FractionalPolynomial::new(-&self.num, self.den.clone())
    }
}

pub struct FracDisplay<'a> {
    frac: &'a FractionalPolynomial,
    reg: &'a Registry,
    force_quotient: bool,
}

impl fmt::Display for FracDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.force_quotient && self.frac.is_polynomial() {
            return write!(f, "{}", self.frac.num.display(self.reg));
        }
        write!(
            f,
            "({}) / ({})",
            self.frac.num.display(self.reg),
            self.frac.den.display(self.reg)
        )
    }
}

/// How aggressively a quotient is reduced for display.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Any exact multivariate division.
    #[default]
    Exact,
    /// Only quotients that come out as a single term (or zero). This is the
    /// reduction shown in the classic unless tables.
    Monomial,
}

/// A quotient rendered as `value unless den = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnlessForm {
    /// `quotient`, undefined where `guard` vanishes. `guard` is `None` when the
    /// denominator is a nonzero constant.
    Reduced { quotient: Polynomial, guard: Option<Polynomial> },
    /// Not divisible; kept as the original quotient.
    Unreduced { frac: FractionalPolynomial, guard: Option<Polynomial> },
    /// The literal `0/0`.
    Indeterminate,
}

impl UnlessForm {
    pub fn render(&self, reg: &Registry) -> String {
        match self {
            UnlessForm::Reduced { quotient, guard: None } => quotient.to_string_with(reg),
            UnlessForm::Reduced { quotient, guard: Some(g) } => {
                format!("{} unless {}", quotient.display(reg), render_guard(g, reg))
            }
            UnlessForm::Unreduced { frac, .. } => frac.display_quotient(reg).to_string(),
            UnlessForm::Indeterminate => "0/0".to_string(),
        }
    }
}

/// Exact reduction of `n/d` to `q unless d = 0`.
pub fn simplify_quotient(f: &FractionalPolynomial) -> Result<UnlessForm> {
    reduce_quotient(f, Reduction::Exact)
}

pub fn reduce_quotient(f: &FractionalPolynomial, mode: Reduction) -> Result<UnlessForm> {
    if f.is_indeterminate() {
        return Err(Error::Indeterminate);
    }
    if f.den.is_zero() {
        return Ok(UnlessForm::Unreduced { frac: f.clone(), guard: Some(Polynomial::zero()) });
    }
    let guard = if f.den.is_constant() { None } else { Some(f.den.clone()) };
    match f.num.div_exact(&f.den) {
        Some(q) if mode == Reduction::Exact || q.num_terms() <= 1 => {
            Ok(UnlessForm::Reduced { quotient: q, guard })
        }
        _ => Ok(UnlessForm::Unreduced { frac: f.clone(), guard }),
    }
}

/// Like [`reduce_quotient`] but maps `0/0` to [`UnlessForm::Indeterminate`].
pub fn unless_form(f: &FractionalPolynomial, mode: Reduction) -> UnlessForm {
    reduce_quotient(f, mode).unwrap_or(UnlessForm::Indeterminate)
}

/// Renders `d = 0` with negative terms moved to the left and positive terms to
/// the right, e.g. `x - x*y` becomes `x*y = x` and `1 - x` becomes `x = 1`.
pub fn render_guard(d: &Polynomial, reg: &Registry) -> String {
    let (pos, neg) = d.split_signs();
    if neg.is_zero() {
        format!("{} = 0", pos.display(reg))
    } else {
        format!("{} = {}", neg.display(reg), pos.display(reg))
    }
}

impl FractionalPolynomial {
    /// True when numerator and denominator are both the same nonzero polynomial.
    pub fn is_trivially_one(&self) -> bool {
        !self.den.is_zero() && self.num == self.den
    }

    pub fn is_zero_numerator(&self) -> bool {
        self.num.is_zero()
    }

    pub fn constant_value(&self) -> Option<crate::Rational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        if d.is_zero() {
            None
        } else {
            Some(n / d)
        }
    }

    pub fn unit() -> Self {
        Self::from_poly(Polynomial::constant(crate::Rational::one()))
    }
}
