#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use num_traits::{One, Zero};
use parapoly::dsl::{parse_formula, parse_model};
use parapoly::embed::{eval_formula, to_f2_polynomial, to_real_polynomial, Value};
use parapoly::inference::{full_joint, query, Query, ResultTable};
use parapoly::network::{Domain, Model, Rel};
use parapoly::polynomial::{ratio, Rational};
use parapoly::{Registry, Var};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const MODELS: [&str; 7] = [
    "basic1.pql",
    "ace-king.pql",
    "amphibian.pql",
    "butter.pql",
    "knight2.pql",
    "zombie1.pql",
    "zombie1-search.pql",
];

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

pub fn source(name: &str) -> String {
    let path = models_dir().join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn load(name: &str) -> Model {
    let m = parse_model(&source(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    m.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
    m
}

/// Random point satisfying bounds and the `sum of variables = 1` constraints
/// that the example models generate. Panics if the result is infeasible.
pub fn feasible_point(model: &Model, rng: &mut impl Rng) -> BTreeMap<Var, Rational> {
    let mut point = model.fixed_values();
    for v in model.free_parameter_vars() {
        let p = model.parameter_by_var(v).unwrap();
        let value = match &p.domain {
            Domain::Interval(lo, hi) => lo + (hi - lo) * ratio(rng.gen_range(1..64), 64),
            Domain::Finite(vals) => vals[rng.gen_range(0..vals.len())].clone(),
            Domain::States(_) => unreachable!(),
        };
        point.insert(v, value);
    }
    let constraints = model.all_constraints();
    for c in &constraints.constraints {
        if c.rel != Rel::Eq {
            continue;
        }
        let Some((coeffs, constant)) = c.difference().linear_coefficients() else { continue };
        if constant != -Rational::one() || !coeffs.values().all(|a| a.is_one()) {
            continue;
        }
        let weights: Vec<i64> = coeffs.keys().map(|_| rng.gen_range(1..20)).collect();
        let total: i64 = weights.iter().sum();
        for (v, w) in coeffs.keys().zip(weights) {
            point.insert(*v, ratio(w, total));
        }
    }
    assert!(constraints.feasible(&point, &model.registry).unwrap(), "sampled point is infeasible");
    point
}

/// Full joint distribution at a point, computed directly from the numeric
/// values of every table entry. Indexed in mixed radix, last primary fastest.
pub fn numeric_joint(model: &Model, point: &BTreeMap<Var, Rational>) -> Vec<Rational> {
    let dims: Vec<usize> = model.primaries.iter().map(|p| p.states().len()).collect();
    let tables: Vec<Vec<Rational>> = model
        .tables
        .iter()
        .map(|t| t.entries.iter().map(|e| e.evaluate(point, &model.registry).unwrap()).collect())
        .collect();
    let size: usize = dims.iter().product();
    let mut out = Vec::with_capacity(size);
    for index in 0..size {
        let states = decode(index, &dims);
        let mut prod = Rational::one();
        for (t, values) in model.tables.iter().zip(&tables) {
            let row = t.parents.iter().fold(0, |acc, &p| acc * dims[p] + states[p]);
            let col = t.targets.iter().fold(0, |acc, &v| acc * dims[v] + states[v]);
            prod *= &values[row * model.table_width(t) + col];
            if prod.is_zero() {
                break;
            }
        }
        out.push(prod);
    }
    out
}

pub fn decode(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// State vectors of every joint index, in joint order.
pub fn joint_states(model: &Model) -> Vec<Vec<usize>> {
    let dims: Vec<usize> = model.primaries.iter().map(|p| p.states().len()).collect();
    (0..dims.iter().product()).map(|i| decode(i, &dims)).collect()
}

/// Marginal of the numeric joint over `cols`, in the same index order as a
/// result table over those columns.
pub fn numeric_marginal(model: &Model, states: &[Vec<usize>], joint: &[Rational], cols: &[usize]) -> Vec<Rational> {
    let dims: Vec<usize> = model.primaries.iter().map(|p| p.states().len()).collect();
    let sub: Vec<usize> = cols.iter().map(|&c| dims[c]).collect();
    let mut acc = vec![Rational::zero(); sub.iter().product()];
    for (s, p) in states.iter().zip(joint) {
        if p.is_zero() {
            continue;
        }
        let k = cols.iter().fold(0, |a, &c| a * dims[c] + s[c]);
        acc[k] += p;
    }
    acc
}

/// Every single-primary marginal and every ordered pair `Pr(a | b)`.
pub fn queries(model: &Model) -> Vec<ResultTable> {
    let names: Vec<&str> = model.primaries.iter().map(|p| p.name.as_str()).collect();
    let mut out = Vec::new();
    for a in &names {
        out.push(query(model, &Query::new(model, &[a], &[]).unwrap()).unwrap());
        for b in &names {
            if a != b {
                out.push(query(model, &Query::new(model, &[a], &[b]).unwrap()).unwrap());
            }
        }
    }
    out
}

fn column_indices(model: &Model, names: &[String]) -> Vec<usize> {
    names.iter().map(|n| model.primary_index(n).unwrap()).collect()
}

/// Evaluates every query of [`queries`] and the full joint at `points`
/// random feasible points and compares numerators and denominators with the
/// numeric joint.
pub fn check_numeric_oracle(name: &str, points: usize, seed: u64) -> Result<(), String> {
    let model = load(name);
    let mut rng = StdRng::seed_from_u64(seed);
    let tables = queries(&model);
    let joint_sym = full_joint(&model);
    let states = joint_states(&model);
    let reg = &model.registry;
    for _ in 0..points {
        let point = feasible_point(&model, &mut rng);
        let joint = numeric_joint(&model, &point);
        for (row, expected) in joint_sym.rows.iter().zip(&joint) {
            if &row.value.num.evaluate(&point, reg).unwrap() != expected {
                return Err(format!("{name}: joint row {} differs at {point:?}", row.index));
            }
        }
        for t in &tables {
            let num = numeric_marginal(&model, &states, &joint, &column_indices(&model, &t.column_names));
            let den = numeric_marginal(&model, &states, &joint, &column_indices(&model, &t.conditioning));
            let block = num.len() / den.len();
            for row in &t.rows {
                let i = row.index - 1;
                let n = row.value.num.evaluate(&point, reg).unwrap();
                let d = row.value.den.evaluate(&point, reg).unwrap();
                if n != num[i] || d != den[i / block] {
                    return Err(format!("{name}: {} row {} differs at {point:?}", t.header(), row.index));
                }
            }
        }
    }
    Ok(())
}

/// Unconditional tables sum to one at random feasible points.
pub fn check_normalization(name: &str, points: usize, seed: u64) -> Result<(), String> {
    let model = load(name);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut tables: Vec<ResultTable> = queries(&model).into_iter().filter(|t| !t.conditional).collect();
    tables.push(full_joint(&model));
    for _ in 0..points {
        let point = feasible_point(&model, &mut rng);
        for t in &tables {
            let total = t
                .rows
                .iter()
                .map(|r| r.value.num.evaluate(&point, &model.registry).unwrap())
                .fold(Rational::zero(), |a, b| a + b);
            if !total.is_one() {
                return Err(format!("{name}: {} sums to {total}", t.header()));
            }
        }
    }
    Ok(())
}

/// Numerators and denominators of every query have degree at most one.
pub fn check_linear_form(name: &str) -> Result<(), String> {
    let model = load(name);
    if model.cliques.is_empty() {
        return Err(format!("{name} has no clique"));
    }
    for t in queries(&model) {
        for row in &t.rows {
            if row.value.num.degree() > 1 || row.value.den.degree() > 1 {
                return Err(format!("{name}: {} row {} is not linear", t.header(), row.index));
            }
        }
    }
    Ok(())
}

/// One formula for each of the sixteen binary truth functions, with the
/// expected outputs at (a,b) = TT, TF, FT, FF.
pub const CONNECTIVES: [(&str, [bool; 4]); 16] = [
    ("F", [false, false, false, false]),
    ("a && b", [true, false, false, false]),
    ("a && !b", [false, true, false, false]),
    ("a", [true, true, false, false]),
    ("!a && b", [false, false, true, false]),
    ("b", [true, false, true, false]),
    ("a ^ b", [false, true, true, false]),
    ("a || b", [true, true, true, false]),
    ("a nor b", [false, false, false, true]),
    ("a <-> b", [true, false, false, true]),
    ("!b", [false, true, false, true]),
    ("b -> a", [true, true, false, true]),
    ("!a", [false, false, true, true]),
    ("a -> b", [true, false, true, true]),
    ("a nand b", [false, true, true, true]),
    ("T", [true, true, true, true]),
];

/// Truth tables of the real and F2 translations of every connective.
pub fn check_connectives() -> Result<(), String> {
    let reg = Registry::new();
    let (a, b) = (reg.var("a"), reg.var("b"));
    let bit = |v: bool| Rational::from_integer((v as i64).into());
    for (text, table) in CONNECTIVES {
        let f = parse_formula(text).map_err(|e| e.to_string())?;
        let real = to_real_polynomial(&f, &reg).map_err(|e| e.to_string())?;
        let f2 = to_f2_polynomial(&f, &reg).map_err(|e| e.to_string())?;
        for (k, &expected) in table.iter().enumerate() {
            let (va, vb) = (k < 2, k % 2 == 0);
            let at: BTreeMap<Var, Rational> = [(a, bit(va)), (b, bit(vb))].into_iter().collect();
            let env: BTreeMap<String, Value> =
                [("a".to_string(), Value::Bool(va)), ("b".to_string(), Value::Bool(vb))].into_iter().collect();
            if eval_formula(&f, &env).map_err(|e| e.to_string())? != Value::Bool(expected) {
                return Err(format!("`{text}` evaluates wrongly at ({va}, {vb})"));
            }
            if real.evaluate(&at, &reg).map_err(|e| e.to_string())? != bit(expected) {
                return Err(format!("real translation of `{text}` is wrong at ({va}, {vb})"));
            }
            if f2.evaluate(|v| if v == a { va } else { vb }) != expected {
                return Err(format!("F2 translation of `{text}` is wrong at ({va}, {vb})"));
            }
        }
    }
    Ok(())
}
