//! Expression grammars: polynomial and fractional arithmetic, propositional
//! and arithmetic formulas, relations, and search criteria.

use super::lexer::{describe, Cursor, Tok};
use crate::embed::{BinOp, Formula, Value};
use crate::error::{Error, Result};
use crate::network::{canonical_name, Rel};
use crate::polynomial::{parse_rational, FractionalPolynomial, Polynomial, Registry};
use crate::search::Criteria;

/// Maps identifiers and `$handle[k]` references to values.
pub trait Resolver {
    fn ident(&self, name: &str) -> Result<Polynomial>;

    fn handle(&self, name: &str, _index: usize) -> Result<FractionalPolynomial> {
        Err(Error::UnknownIdentifier(format!("${name}")))
    }
}

/// Resolves names already present in a registry, after canonicalization.
pub struct RegistryResolver<'a>(pub &'a Registry);

impl Resolver for RegistryResolver<'_> {
    fn ident(&self, name: &str) -> Result<Polynomial> {
        self.0
            .lookup(name)
            .or_else(|| self.0.lookup(&canonical_name(name)))
            .map(Polynomial::var)
            .ok_or_else(|| Error::UnknownIdentifier(name.to_string()))
    }
}

fn split_subscript(name: &str) -> (String, Option<usize>) {
    if let Some(open) = name.find('[') {
        if let Some(inner) = name[open + 1..].strip_suffix(']') {
            if let Ok(k) = inner.parse() {
                return (name[..open].to_string(), Some(k));
            }
        }
    }
    (name.to_string(), None)
}

fn divide(a: &FractionalPolynomial, b: &FractionalPolynomial) -> Result<FractionalPolynomial> {
    if let Some(c) = b.constant_value() {
        if num_traits::Zero::is_zero(&c) {
            return Err(Error::Solver("division by zero".into()));
        }
        return Ok(FractionalPolynomial::new(a.num.scale(&num_traits::Inv::inv(c)), a.den.clone()));
    }
    Ok(a / b)
}

pub(crate) fn parse_sum(c: &mut Cursor, r: &dyn Resolver) -> Result<FractionalPolynomial> {
    let mut acc = parse_term(c, r)?;
    loop {
        if c.eat("+") {
            acc = &acc + &parse_term(c, r)?;
        } else if c.eat("-") {
            acc = &acc - &parse_term(c, r)?;
        } else {
            return Ok(acc);
        }
    }
}

fn parse_term(c: &mut Cursor, r: &dyn Resolver) -> Result<FractionalPolynomial> {
    let mut acc = parse_unary(c, r)?;
    loop {
        if c.eat("*") {
            acc = &acc * &parse_unary(c, r)?;
        } else if c.eat("/") {
            acc = divide(&acc, &parse_unary(c, r)?)?;
        } else {
            return Ok(acc);
        }
    }
}

fn parse_unary(c: &mut Cursor, r: &dyn Resolver) -> Result<FractionalPolynomial> {
    if c.eat("-") {
        return Ok(-&parse_unary(c, r)?);
    }
    if c.eat("+") {
        return parse_unary(c, r);
    }
    let base = parse_atom(c, r)?;
    if c.eat("^") {
        let tok = c.bump();
        let Tok::Number(n) = &tok.tok else {
            return Err(Error::syntax(tok.line, tok.col, "expected an integer exponent"));
        };
        let e: u32 = n.parse().map_err(|_| Error::syntax(tok.line, tok.col, "expected an integer exponent"))?;
        return Ok(FractionalPolynomial::new(base.num.pow(e), base.den.pow(e)));
    }
    Ok(base)
}

fn parse_atom(c: &mut Cursor, r: &dyn Resolver) -> Result<FractionalPolynomial> {
    let tok = c.bump();
    match &tok.tok {
        Tok::Number(n) => {
            let v = parse_rational(n).ok_or_else(|| Error::syntax(tok.line, tok.col, format!("bad number `{n}`")))?;
            Ok(Polynomial::constant(v).into())
        }
        Tok::Ident(name) => r.ident(name).map(Into::into),
        Tok::Punct("$") => {
            let name = c.ident()?;
            let (base, k) = split_subscript(&name);
            let k = match k {
                Some(k) => k,
                None => {
                    c.expect("[")?;
                    let t = c.bump();
                    let Tok::Number(n) = &t.tok else {
                        return Err(Error::syntax(t.line, t.col, "expected a row index"));
                    };
                    let k = n.parse().map_err(|_| Error::syntax(t.line, t.col, "expected a row index"))?;
                    c.expect("]")?;
                    k
                }
            };
            r.handle(&base, k)
        }
        Tok::Punct("(") => {
            let v = parse_sum(c, r)?;
            c.expect(")")?;
            Ok(v)
        }
        other => Err(Error::syntax(tok.line, tok.col, format!("unexpected {}", describe(other)))),
    }
}

fn finish(c: &Cursor) -> Result<()> {
    if c.at_eof() {
        Ok(())
    } else {
        c.error(format!("unexpected {}", describe(c.peek())))
    }
}

/// Parses a fractional-polynomial expression.
pub fn parse_expression(text: &str, r: &dyn Resolver) -> Result<FractionalPolynomial> {
    let mut c = Cursor::new(text)?;
    let v = parse_sum(&mut c, r)?;
    finish(&c)?;
    Ok(v)
}

/// Parses a polynomial over the names already in `reg`.
pub fn parse_polynomial(text: &str, reg: &Registry) -> Result<Polynomial> {
    parse_polynomial_with(text, &RegistryResolver(reg))
}

pub fn parse_polynomial_with(text: &str, r: &dyn Resolver) -> Result<Polynomial> {
    let v = parse_expression(text, r)?;
    v.as_polynomial()
        .ok_or_else(|| Error::syntax(1, 1, "division by a non-constant is not allowed here"))
}

/// Parses `lhs REL rhs` where REL is one of `==`, `=`, `<=`, `>=`, `<`, `>`.
pub fn parse_relation(text: &str, r: &dyn Resolver) -> Result<(FractionalPolynomial, Rel, FractionalPolynomial)> {
    let mut c = Cursor::new(text)?;
    let lhs = parse_sum(&mut c, r)?;
    let rel = match c.peek() {
        Tok::Punct("==") | Tok::Punct("=") => Rel::Eq,
        Tok::Punct("<=") => Rel::Le,
        Tok::Punct(">=") => Rel::Ge,
        Tok::Punct("<") => Rel::Lt,
        Tok::Punct(">") => Rel::Gt,
        other => return c.error(format!("expected a relation, found {}", describe(other))),
    };
    c.bump();
    let rhs = parse_sum(&mut c, r)?;
    finish(&c)?;
    Ok((lhs, rel, rhs))
}

/// Parses a formula in the shared surface syntax.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut c = Cursor::new(text)?;
    let f = formula_cond(&mut c)?;
    finish(&c)?;
    Ok(f)
}

fn formula_cond(c: &mut Cursor) -> Result<Formula> {
    let test = formula_iff(c)?;
    if c.eat("?") {
        let a = formula_cond(c)?;
        c.expect(":")?;
        let b = formula_cond(c)?;
        return Ok(Formula::Cond(Box::new(test), Box::new(a), Box::new(b)));
    }
    Ok(test)
}

fn formula_iff(c: &mut Cursor) -> Result<Formula> {
    let mut acc = formula_imp(c)?;
    while c.eat("<->") {
        acc = Formula::bin(BinOp::Iff, acc, formula_imp(c)?);
    }
    Ok(acc)
}

fn formula_imp(c: &mut Cursor) -> Result<Formula> {
    let a = formula_or(c)?;
    if c.eat("->") {
        return Ok(Formula::bin(BinOp::Implies, a, formula_imp(c)?));
    }
    Ok(a)
}

fn at_word(c: &Cursor, w: &str) -> bool {
    matches!(c.peek(), Tok::Ident(s) if s == w)
}

fn formula_or(c: &mut Cursor) -> Result<Formula> {
    let mut acc = formula_xor(c)?;
    loop {
        if c.eat("||") {
            acc = Formula::bin(BinOp::Or, acc, formula_xor(c)?);
        } else if at_word(c, "nor") {
            c.bump();
            acc = Formula::bin(BinOp::Nor, acc, formula_xor(c)?);
        } else {
            return Ok(acc);
        }
    }
}

fn formula_xor(c: &mut Cursor) -> Result<Formula> {
    let mut acc = formula_and(c)?;
    while c.eat("^") {
        acc = Formula::bin(BinOp::Xor, acc, formula_and(c)?);
    }
    Ok(acc)
}

fn formula_and(c: &mut Cursor) -> Result<Formula> {
    let mut acc = formula_eq(c)?;
    loop {
        if c.eat("&&") {
            acc = Formula::bin(BinOp::And, acc, formula_eq(c)?);
        } else if at_word(c, "nand") {
            c.bump();
            acc = Formula::bin(BinOp::Nand, acc, formula_eq(c)?);
        } else {
            return Ok(acc);
        }
    }
}

fn formula_eq(c: &mut Cursor) -> Result<Formula> {
    let mut acc = formula_add(c)?;
    loop {
        if c.eat("==") {
            acc = Formula::bin(BinOp::Eq, acc, formula_add(c)?);
        } else if c.eat("!=") {
            acc = Formula::not(Formula::bin(BinOp::Eq, acc, formula_add(c)?));
        } else {
            return Ok(acc);
        }
    }
}

fn formula_add(c: &mut Cursor) -> Result<Formula> {
    let mut acc = formula_mul(c)?;
    loop {
        if c.eat("+") {
            acc = Formula::bin(BinOp::Add, acc, formula_mul(c)?);
        } else if c.eat("-") {
            acc = Formula::bin(BinOp::Sub, acc, formula_mul(c)?);
        } else {
            return Ok(acc);
        }
    }
}

fn formula_mul(c: &mut Cursor) -> Result<Formula> {
    let mut acc = formula_unary(c)?;
    while c.eat("*") {
        acc = Formula::bin(BinOp::Mul, acc, formula_unary(c)?);
    }
    Ok(acc)
}

fn formula_unary(c: &mut Cursor) -> Result<Formula> {
    if c.eat("!") {
        return Ok(Formula::not(formula_unary(c)?));
    }
    if c.eat("-") {
        return Ok(Formula::Neg(Box::new(formula_unary(c)?)));
    }
    let tok = c.bump();
    match &tok.tok {
        Tok::Number(n) => {
            let v = parse_rational(n).ok_or_else(|| Error::syntax(tok.line, tok.col, format!("bad number `{n}`")))?;
            Ok(Formula::Const(Value::Num(v)))
        }
        Tok::Ident(s) => Ok(match s.as_str() {
            "T" | "true" => Formula::Const(Value::Bool(true)),
            "F" | "false" => Formula::Const(Value::Bool(false)),
            _ => Formula::Var(s.clone()),
        }),
        Tok::Punct("(") => {
            let f = formula_cond(c)?;
            c.expect(")")?;
            Ok(f)
        }
        other => Err(Error::syntax(tok.line, tok.col, format!("unexpected {}", describe(other)))),
    }
}

/// Parses search criteria: `zero(k)`, `nonzero(k)`, `true`, `false`, combined
/// with `!`, `&&`, `||`, `^` and parentheses. `k` is a 1-based target number
/// or a target name.
pub fn parse_criteria(text: &str, targets: &[String]) -> Result<Criteria> {
    let mut c = Cursor::new(text)?;
    let v = crit_or(&mut c, targets)?;
    finish(&c)?;
    Ok(v)
}

fn crit_or(c: &mut Cursor, t: &[String]) -> Result<Criteria> {
    let mut acc = crit_xor(c, t)?;
    while c.eat("||") {
        acc = Criteria::Or(Box::new(acc), Box::new(crit_xor(c, t)?));
    }
    Ok(acc)
}

fn crit_xor(c: &mut Cursor, t: &[String]) -> Result<Criteria> {
    let mut acc = crit_and(c, t)?;
    while c.eat("^") {
        let b = crit_and(c, t)?;
        acc = Criteria::xor(acc, b);
    }
    Ok(acc)
}

fn crit_and(c: &mut Cursor, t: &[String]) -> Result<Criteria> {
    let mut acc = crit_unary(c, t)?;
    while c.eat("&&") {
        acc = Criteria::And(Box::new(acc), Box::new(crit_unary(c, t)?));
    }
    Ok(acc)
}

fn crit_unary(c: &mut Cursor, t: &[String]) -> Result<Criteria> {
    if c.eat("!") {
        return Ok(Criteria::Not(Box::new(crit_unary(c, t)?)));
    }
    if c.eat("(") {
        let v = crit_or(c, t)?;
        c.expect(")")?;
        return Ok(v);
    }
    let word = c.ident()?;
    match word.as_str() {
        "true" => Ok(Criteria::True),
        "false" => Ok(Criteria::Not(Box::new(Criteria::True))),
        "zero" | "nonzero" => {
            c.expect("(")?;
            let tok = c.bump();
            let k = match &tok.tok {
                Tok::Number(n) => n
                    .parse::<usize>()
                    .ok()
                    .filter(|&k| k >= 1 && k <= t.len())
                    .ok_or_else(|| Error::syntax(tok.line, tok.col, format!("no target {n}")))?
                    - 1,
                Tok::Ident(name) => t
                    .iter()
                    .position(|s| s == name)
                    .ok_or_else(|| Error::syntax(tok.line, tok.col, format!("no target `{name}`")))?,
                other => return Err(Error::syntax(tok.line, tok.col, format!("unexpected {}", describe(other)))),
            };
            c.expect(")")?;
            Ok(if word == "zero" { Criteria::IsZero(k) } else { Criteria::IsNonzero(k) })
        }
        other => c.error(format!("unknown criterion `{other}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_literals() {
        let reg = Registry::new();
        for n in ["x", "y", "t1", "x1", "x2"] {
            reg.var(n);
        }
        let p = parse_polynomial("1 - x + x*y", &reg).unwrap();
        assert_eq!(p.to_string_with(&reg), "1 - x + x*y");
        assert_eq!(parse_polynomial("0.25", &reg).unwrap().constant_value().unwrap(), crate::polynomial::ratio(1, 4));
        let z = parse_polynomial("x_2 + t[1]*x1 - (x2)", &reg).unwrap();
        assert_eq!(z.to_string_with(&reg), "t1*x1");
        assert_eq!(parse_polynomial("(1 - x)^2 / 2", &reg).unwrap().to_string_with(&reg), "1/2 - x + 1/2*x^2");
        assert!(matches!(parse_polynomial("w + 1", &reg), Err(Error::UnknownIdentifier(_))));
        assert!(matches!(parse_polynomial("x +", &reg), Err(Error::Syntax { .. })));
        assert!(parse_polynomial("1 / x", &reg).is_err());
    }

    #[test]
    fn formula_precedence() {
        let f = parse_formula("R <-> P -> Q ? 1 : 0").unwrap();
        assert_eq!(f.to_string(), "((R <-> (P -> Q)) ? 1 : 0)");
        let g = parse_formula("P -> Q -> R").unwrap();
        assert_eq!(g.to_string(), "(P -> (Q -> R))");
        let h = parse_formula("B == P + Q + R ? 1 : 0").unwrap();
        assert_eq!(h.to_string(), "((B == ((P + Q) + R)) ? 1 : 0)");
        let k = parse_formula("S_2 <-> !(Q && R) && P").unwrap();
        assert_eq!(k.to_string(), "(S_2 <-> (!((Q && R)) && P))");
        assert!(parse_formula("P && ").is_err());
    }

    #[test]
    fn relations() {
        let reg = Registry::new();
        reg.var("x");
        let (l, rel, r) = parse_relation("1 - x <= 0.75", &RegistryResolver(&reg)).unwrap();
        assert_eq!(rel, Rel::Le);
        assert_eq!(l.display(&reg).to_string(), "1 - x");
        assert_eq!(r.display(&reg).to_string(), "3/4");
        assert!(parse_relation("x", &RegistryResolver(&reg)).is_err());
    }
}
