mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{check_linear_form, check_normalization, check_numeric_oracle, load, source, MODELS};
use parapoly::dsl::{parse_criteria, parse_model, serialize};
use parapoly::inference::{query, Query};
use parapoly::network::Model;
use parapoly::polynomial::{rat, Rational};
use parapoly::search::{enumerate, instantiate_model, SearchSpec, DEFAULT_CAP};
use parapoly::{Polynomial, Var};

const POINTS: usize = 25;

#[test]
fn symbolic_matches_numeric_oracle() {
    for (k, name) in MODELS.iter().enumerate() {
        check_numeric_oracle(name, POINTS, k as u64).unwrap();
    }
}

#[test]
fn unconditional_queries_normalize() {
    for (k, name) in MODELS.iter().enumerate() {
        check_normalization(name, POINTS, 100 + k as u64).unwrap();
    }
}

#[test]
fn clique_models_have_linear_form() {
    for name in ["ace-king.pql", "amphibian.pql", "knight2.pql", "zombie1-search.pql"] {
        check_linear_form(name).unwrap();
    }
}
#[test]
fn models_round_trip_through_source() {
    for name in MODELS.iter().chain(&["basic1-star.pql"]) {
        let model = load(name);
        let text = serialize(&model);
        let again = parse_model(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(again, model, "{name}");
        assert_eq!(serialize(&again), text, "{name}");
    }
}

#[test]
fn parse_errors_carry_positions() {
    let bad = source("basic1.pql").replace("data = (x, 1-x);", "data = (x, 1-x;");
    let err = parse_model(&bad).unwrap_err().to_string();
    assert!(err.contains("line"), "{err}");
}

fn assignments(n: usize) -> Vec<Vec<Rational>> {
    (0..1usize << n)
        .map(|k| (0..n).map(|b| rat(((k >> (n - 1 - b)) & 1) as i64)).collect())
        .collect()
}

fn values_map(model: &Model, names: &[&str], a: &[Rational]) -> BTreeMap<Var, Polynomial> {
    names
        .iter()
        .zip(a)
        .map(|(n, v)| (model.registry.lookup(n).unwrap(), Polynomial::constant(v.clone())))
        .collect()
}

#[test]
fn substitution_commutes_with_inference() {
    let model = load("zombie1.pql");
    let params = ["t1", "t2", "t3", "t4"];
    let q = Query::new(&model, &["R", "H"], &[]).unwrap();
    let symbolic = query(&model, &q).unwrap();
    for a in assignments(4) {
        let pairs: Vec<(&str, Rational)> = params.iter().copied().zip(a.iter().cloned()).collect();
        let inst = instantiate_model(&model, &pairs).unwrap();
        let direct = query(&inst, &Query::new(&inst, &["R", "H"], &[]).unwrap()).unwrap();
        let bindings = values_map(&model, &params, &a);
        for (s, d) in symbolic.rows.iter().zip(&direct.rows) {
            assert_eq!(s.value.num.substitute(&bindings), d.value.num, "{a:?}");
            assert_eq!(s.value.den.substitute(&bindings), d.value.den, "{a:?}");
        }
    }
}

/// Assignments whose instantiated model satisfies `keep`, found by re-running
/// inference from scratch for every assignment.
fn brute_force(
    model: &Model,
    params: &[&str],
    q: (&[&str], &[usize]),
    keep: impl Fn(&[bool]) -> bool,
) -> BTreeSet<Vec<Rational>> {
    let mut out = BTreeSet::new();
    for a in assignments(params.len()) {
        let pairs: Vec<(&str, Rational)> = params.iter().copied().zip(a.iter().cloned()).collect();
        let inst = instantiate_model(model, &pairs).unwrap();
        let t = query(&inst, &Query::new(&inst, q.0, &[]).unwrap()).unwrap();
        let zero: Vec<bool> = q.1.iter().map(|&i| t.rows[i].value.num.is_zero()).collect();
        if keep(&zero) {
            out.insert(a);
        }
    }
    out
}

fn searched(model: &Model, params: &[&str], q: (&[&str], &[usize]), criteria: &str) -> BTreeSet<Vec<Rational>> {
    let t = query(model, &Query::new(model, q.0, &[]).unwrap()).unwrap();
    let targets: Vec<(String, _)> = q.1.iter().map(|&i| (format!("r{}", i + 1), t.rows[i].value.clone())).collect();
    let labels: Vec<String> = targets.iter().map(|(n, _)| n.clone()).collect();
    let spec = SearchSpec::new(model, params, targets).unwrap();
    let table = enumerate(&spec, &model.registry, DEFAULT_CAP).unwrap();
    let c = parse_criteria(criteria, &labels).unwrap();
    table
        .filter(&c, 20_000)
        .unwrap()
        .into_iter()
        .map(|m| m.assignment)
        .collect()
}

#[test]
fn zombie_search_matches_brute_force() {
    let model = load("zombie1.pql");
    let params = ["t1", "t2", "t3", "t4"];
    let q: (&[&str], &[usize]) = (&["R", "H"], &[0, 1, 2, 3]);
    let expected = brute_force(&model, &params, q, |z| (z[0] != z[1]) && (z[2] != z[3]));
    let got = searched(&model, &params, q, "(zero(1) ^ zero(2)) && (zero(3) ^ zero(4))");
    assert_eq!(got, expected);
    assert_eq!(expected.len(), 2);
}

#[test]
fn basic_star_search_matches_brute_force() {
    let model = load("basic1-star.pql");
    let params = ["t1", "t2", "t3", "t4"];
    let q: (&[&str], &[usize]) = (&["B"], &[0, 2]);
    let expected = brute_force(&model, &params, q, |z| z[0] && z[1]);
    let got = searched(&model, &params, q, "zero(1) && zero(2)");
    assert_eq!(got, expected);
    assert_eq!(expected, BTreeSet::from([vec![rat(1), rat(0), rat(0), rat(1)]]));
}

#[test]
fn instantiation_is_identity_without_parameters() {
    let model = load("basic1.pql");
    assert_eq!(instantiate_model(&model, &[]).unwrap(), model);
}
