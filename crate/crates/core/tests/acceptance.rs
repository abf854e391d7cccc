//! Acceptance criteria. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::{check_connectives, check_linear_form, check_normalization, check_numeric_oracle, load, source, MODELS};
use parapoly::dsl::{parse_criteria, parse_formula, parse_model, parse_polynomial, parse_relation, serialize, RegistryResolver};
use parapoly::embed::to_f2_polynomial;
use parapoly::inference::{full_joint, query, Query, ResultTable};
use parapoly::network::Model;
use parapoly::optimize::{build_program, default_epsilon, expectation, Sense, Solution, DEFAULT_BUDGET};
use parapoly::polynomial::{rat, ratio, simplify_quotient, unless_form, Rational, Reduction};
use parapoly::search::{enumerate, instantiate_model, SearchSpec, DEFAULT_CAP};
use parapoly::{FractionalPolynomial, Polynomial};

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn poly(model: &Model, text: &str) -> Polynomial {
    parse_polynomial(text, &model.registry).unwrap_or_else(|e| panic!("{text}: {e}"))
}

fn table(model: &Model, principal: &[&str], conditioning: &[&str]) -> Result<ResultTable, String> {
    let q = Query::new(model, principal, conditioning).map_err(|e| e.to_string())?;
    query(model, &q).map_err(|e| e.to_string())
}

fn expect_column(model: &Model, t: &ResultTable, expected: &[(&str, &str)]) -> Check {
    ensure(t.rows.len() == expected.len(), || format!("{}: {} rows", t.header(), t.rows.len()))?;
    for (row, (num, den)) in t.rows.iter().zip(expected) {
        let want = FractionalPolynomial::new(poly(model, num), poly(model, den));
        ensure(row.value == want, || {
            format!("{} row {}: got {}", t.header(), row.index, row.value.display_quotient(&model.registry))
        })?;
    }
    Ok(())
}

fn expect_polys(model: &Model, t: &ResultTable, expected: &[&str]) -> Check {
    let pairs: Vec<(&str, &str)> = expected.iter().map(|&p| (p, "1")).collect();
    expect_column(model, t, &pairs)
}

fn solve(
    model: &Model,
    sense: Sense,
    objective: FractionalPolynomial,
    relations: &[&str],
    aux: &[&str],
) -> Result<(Solution, Duration), String> {
    let resolver = RegistryResolver(&model.registry);
    let rels = relations
        .iter()
        .map(|r| parse_relation(r, &resolver))
        .collect::<parapoly::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let aux: Vec<_> = aux.iter().map(|a| model.registry.var(a)).collect();
    let p = build_program(model, sense, objective, &rels, &aux, &default_epsilon()).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let s = p.solve(DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    Ok((s, start.elapsed()))
}

fn expect_exact(s: &Solution, want: &Rational, what: &str) -> Check {
    ensure(s.exact_value() == Some(want), || format!("{what}: got {}", s.render_value()))
}

fn criterion_1() -> Check {
    let m = load("basic1.pql");
    expect_polys(&m, &table(&m, &["R"], &[])?, &["1 - x + x*y", "x - x*y"])?;
    expect_column(
        &m,
        &table(&m, &["Q"], &["P"])?,
        &[("x*y", "x"), ("x - x*y", "x"), ("z - x*z", "1 - x"), ("1 - x - z + x*z", "1 - x")],
    )?;
    let joint = full_joint(&m);
    let nonzero: Vec<(usize, Polynomial)> =
        joint.rows.iter().filter(|r| !r.value.num.is_zero()).map(|r| (r.index, r.value.num.clone())).collect();
    let want: Vec<(usize, Polynomial)> = [(13, "x*y"), (55, "x - x*y"), (74, "z - x*z"), (103, "1 - x - z + x*z")]
        .iter()
        .map(|&(i, p)| (i, poly(&m, p)))
        .collect();
    ensure(joint.rows.len() == 128, || format!("joint has {} rows", joint.rows.len()))?;
    ensure(nonzero == want, || format!("nonzero joint rows {:?}", nonzero.iter().map(|r| r.0).collect::<Vec<_>>()))
}

fn criterion_2() -> Check {
    let m = load("basic1.pql");
    let t = table(&m, &["Q"], &["P", "R"])?;
    let got: Vec<String> = t.rows.iter().map(|r| unless_form(&r.value, Reduction::Monomial).render(&m.registry)).collect();
    let want = [
        "1 unless x*y = 0",
        "0 unless x*y = 0",
        "0 unless x*y = x",
        "1 unless x*y = x",
        "z unless x = 1",
        "(1 - x - z + x*z) / (1 - x)",
        "0/0",
        "0/0",
    ];
    ensure(got == want, || format!("got {got:?}"))
}

fn criterion_3() -> Check {
    let m = load("basic1.pql");
    let r = table(&m, &["R"], &[])?;
    let q = table(&m, &["Q"], &["P"])?;
    let diff = r.item(1).map_err(|e| e.to_string())? - q.item(1).map_err(|e| e.to_string())?;
    let text = diff.display_quotient(&m.registry).to_string();
    ensure(text == "(x - x^2 - x*y + x^2*y) / (x)", || format!("difference {text}"))?;
    ensure(diff == FractionalPolynomial::new(poly(&m, "x - x^2 - x*y + x^2*y"), poly(&m, "x")), || {
        "difference is not exact".into()
    })?;
    let eb = expectation(&m, "B").map_err(|e| e.to_string())?;
    ensure(eb == poly(&m, "1 + z + 2*x*y - x*z"), || format!("E(B) = {}", eb.to_string_with(&m.registry)))
}

fn criterion_4() -> Check {
    let m = load("basic1.pql");
    let eb = expectation(&m, "B").map_err(|e| e.to_string())?;
    for (sense, target) in [(Sense::Min, 1.0), (Sense::Max, 2.5)] {
        let (s, took) = solve(&m, sense, eb.clone().into(), &["0.25 + x*y <= x"], &[])?;
        let lo = s.lower.as_ref().map(|n| n.to_f64()).ok_or("no lower bound")?;
        let hi = s.upper.as_ref().map(|n| n.to_f64()).ok_or("no upper bound")?;
        ensure(lo <= target && target <= hi, || format!("{sense:?}: [{lo}, {hi}] misses {target}"))?;
        ensure(hi - lo <= 0.01, || format!("{sense:?}: enclosure width {}", hi - lo))?;
        ensure(took <= Duration::from_secs(10), || format!("{sense:?}: took {took:?}"))?;
    }
    Ok(())
}

fn criterion_5() -> Check {
    let m = load("basic1-star.pql");
    let b = table(&m, &["B"], &[])?;
    let targets = vec![("B=0".to_string(), b.rows[0].value.clone()), ("B=2".to_string(), b.rows[2].value.clone())];
    let names: Vec<String> = targets.iter().map(|t| t.0.clone()).collect();
    let spec = SearchSpec::new(&m, &["t1", "t2", "t3", "t4"], targets).map_err(|e| e.to_string())?;
    let inst = enumerate(&spec, &m.registry, DEFAULT_CAP).map_err(|e| e.to_string())?;
    ensure(inst.rows.len() == 16, || format!("{} rows", inst.rows.len()))?;
    let c = parse_criteria("zero(1) && zero(2)", &names).map_err(|e| e.to_string())?;
    let hits = inst.filter(&c, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let want = vec![rat(1), rat(0), rat(0), rat(1)];
    ensure(hits.len() == 1 && hits[0].index == 10 && hits[0].assignment == want, || {
        format!("matches {:?}", hits.iter().map(|h| h.index).collect::<Vec<_>>())
    })?;
    let fixed = instantiate_model(&m, &[("t1", rat(1)), ("t2", rat(0)), ("t3", rat(0)), ("t4", rat(1))])
        .map_err(|e| e.to_string())?;
    expect_polys(&fixed, &table(&fixed, &["B"], &[])?, &["0", "1 - x*y", "0", "x*y"])
}

fn criterion_6() -> Check {
    let m = load("basic1.pql");
    let t = table(&m, &["Q"], &["P", "R"])?;
    let form = simplify_quotient(t.item(1).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(form.render(&m.registry) == "1 unless x*y = 0", || format!("subjunctive {}", form.render(&m.registry)))?;
    let q = table(&m, &["Q"], &[])?;
    let objective = q.item(1).map_err(|e| e.to_string())?.clone();
    let (s, _) = solve(&m, Sense::Min, objective, &["x == 1", "x == x*y"], &[])?;
    expect_exact(&s, &rat(1), "imperative minimum")?;
    let point = s.point_map();
    let y = m.registry.lookup("y").ok_or("no y")?;
    ensure(point.get(&y) == Some(&rat(1)), || format!("point {}", s.render_point(&m.registry)))?;
    let mut full = point.clone();
    full.extend(m.fixed_values());
    ensure(m.all_constraints().feasible(&full, &m.registry).map_err(|e| e.to_string())?, || "point is infeasible".into())
}

fn criterion_7() -> Check {
    let reg = parapoly::Registry::new();
    let lhs = to_f2_polynomial(&parse_formula("(K <-> A) <-> K").map_err(|e| e.to_string())?, &reg).map_err(|e| e.to_string())?;
    ensure(lhs.display(&reg).to_string() == "A", || format!("F2 form {}", lhs.display(&reg)))?;
    let m = load("ace-king.pql");
    let a = table(&m, &["A"], &["P"])?;
    let k = table(&m, &["K"], &["P"])?;
    let diff = a.item(1).map_err(|e| e.to_string())? - k.item(1).map_err(|e| e.to_string())?;
    ensure(diff == FractionalPolynomial::new(poly(&m, "x2"), poly(&m, "x1 + x2")), || {
        format!("difference {}", diff.display_quotient(&m.registry))
    })?;
    let (lo, _) = solve(&m, Sense::Min, diff.clone(), &[], &[])?;
    let (hi, _) = solve(&m, Sense::Max, diff, &[], &[])?;
    expect_exact(&lo, &rat(0), "subjunctive minimum")?;
    expect_exact(&hi, &rat(1), "subjunctive maximum")?;
    let pa = table(&m, &["A"], &[])?;
    let pk = table(&m, &["K"], &[])?;
    let ind = pa.item(1).map_err(|e| e.to_string())? - pk.item(1).map_err(|e| e.to_string())?;
    ensure(ind.as_polynomial() == Some(poly(&m, "x2 - x3")), || "indicative difference".into())?;
    let (lo, _) = solve(&m, Sense::Min, ind.clone(), &["x1 + x2 == 1"], &[])?;
    let (hi, _) = solve(&m, Sense::Max, ind, &["x1 + x2 == 1"], &[])?;
    expect_exact(&lo, &rat(0), "indicative minimum")?;
    expect_exact(&hi, &rat(1), "indicative maximum")
}

fn criterion_8() -> Check {
    let m = load("amphibian.pql");
    let joint = table(&m, &["S_1", "S_2", "S_3"], &[])?;
    let zero: Vec<usize> = joint.rows.iter().filter(|r| r.value.num.is_zero()).map(|r| r.index).collect();
    ensure(zero == [1, 4], || format!("zero rows {zero:?}"))?;
    let truth = |name: &str| -> Result<Polynomial, String> {
        let t = table(&m, &[name], &[])?;
        Ok(t.rows[0].value.num.clone())
    };
    let gamma: Vec<String> = ["S_1", "S_2", "S_3"]
        .iter()
        .map(|s| truth(s).map(|p| p.to_string_with(&m.registry)))
        .collect::<Result<_, _>>()?;
    let eta_rels: Vec<String> = gamma.iter().map(|g| format!("{g} >= eta")).collect();
    let eta_refs: Vec<&str> = eta_rels.iter().map(String::as_str).collect();
    m.registry.var("eta");
    let eta_obj = poly(&m, "eta");
    let (s, _) = solve(&m, Sense::Max, eta_obj.into(), &eta_refs, &["eta"])?;
    expect_exact(&s, &ratio(2, 3), "eta")?;
    let zeta_rels: Vec<String> = gamma.iter().map(|g| format!("{g} >= 2/3")).collect();
    let zeta_refs: Vec<&str> = zeta_rels.iter().map(String::as_str).collect();
    let want = [ratio(2, 3), rat(1), ratio(2, 3), ratio(1, 3), rat(0)];
    for (k, w) in (4..=8).zip(&want) {
        let name = format!("S_{k}");
        let (s, _) = solve(&m, Sense::Max, truth(&name)?.into(), &zeta_refs, &[])?;
        expect_exact(&s, w, &format!("zeta for {name}"))?;
    }
    Ok(())
}

fn criterion_9() -> Check {
    let m = load("butter.pql");
    let c1 = table(&m, &["C_1"], &[])?.rows[0].value.num.clone();
    let c2 = table(&m, &["C_2"], &[])?.rows[0].value.num.clone();
    ensure(c1 == poly(&m, "1 - x + x*y"), || format!("C_1 = {}", c1.to_string_with(&m.registry)))?;
    ensure(c2 == poly(&m, "1 - x*y"), || format!("C_2 = {}", c2.to_string_with(&m.registry)))?;
    let joint = table(&m, &["H", "C_1", "C_2"], &[])?;
    expect_polys(&m, &joint, &["0", "x*y", "x - x*y", "0", "1 - x", "0", "0", "0"])?;
    let diff = &c1 - &c2;
    ensure(diff == &poly(&m, "x") * &poly(&m, "2*y - 1"), || format!("difference {}", diff.to_string_with(&m.registry)))?;
    let at = |v: &str, r: Rational| -> BTreeMap<parapoly::Var, Rational> {
        [(m.registry.lookup(v).unwrap(), r)].into_iter().collect()
    };
    ensure(diff.substitute_values(&at("x", rat(0))).is_zero(), || "not zero at x = 0".into())?;
    ensure(diff.substitute_values(&at("y", ratio(1, 2))).is_zero(), || "not zero at y = 1/2".into())
}

fn criterion_10() -> Check {
    let m = load("knight2.pql");
    let t = table(&m, &["A", "B"], &["R"])?;
    let f_rows: Vec<&parapoly::inference::Row> = t.select("R", "F");
    let want = ["0", "0", "x3", "0"];
    ensure(f_rows.len() == 4, || format!("{} rows with R = F", f_rows.len()))?;
    for (row, w) in f_rows.iter().zip(want) {
        let expected = FractionalPolynomial::new(poly(&m, w), poly(&m, "x3"));
        ensure(row.value == expected, || {
            format!("row {}: {}", row.index, row.value.display_quotient(&m.registry))
        })?;
    }
    Ok(())
}

fn criterion_11() -> Check {
    let m = load("zombie1.pql");
    let rh = table(&m, &["R", "H"], &[])?;
    expect_polys(
        &m,
        &rh,
        &["x2 + t1*x1 - t2*x2", "x3 - t3*x3 + t4*x4", "x1 - t1*x1 + t2*x2", "x4 + t3*x3 - t4*x4"],
    )?;
    let targets: Vec<(String, FractionalPolynomial)> =
        rh.rows.iter().map(|r| (format!("r{}", r.index), r.value.clone())).collect();
    let names: Vec<String> = targets.iter().map(|t| t.0.clone()).collect();
    let spec = SearchSpec::new(&m, &["t1", "t2", "t3", "t4"], targets).map_err(|e| e.to_string())?;
    let inst = enumerate(&spec, &m.registry, DEFAULT_CAP).map_err(|e| e.to_string())?;
    let c = parse_criteria("(zero(1) ^ zero(2)) && (zero(3) ^ zero(4))", &names).map_err(|e| e.to_string())?;
    let hits = inst.filter(&c, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let got: Vec<(usize, Vec<Rational>)> = hits.into_iter().map(|h| (h.index, h.assignment)).collect();
    let want = vec![
        (6, vec![rat(0), rat(1), rat(0), rat(1)]),
        (11, vec![rat(1), rat(0), rat(1), rat(0)]),
    ];
    ensure(got == want, || format!("matches {:?}", got.iter().map(|g| g.0).collect::<Vec<_>>()))?;
    let fixed = instantiate_model(&m, &[("t1", rat(1)), ("t2", rat(0)), ("t3", rat(1)), ("t4", rat(0))])
        .map_err(|e| e.to_string())?;
    expect_polys(&fixed, &table(&fixed, &["R", "H"], &[])?, &["x1 + x2", "0", "0", "x3 + x4"])?;
    let scripted = load("zombie1-search.pql");
    expect_polys(&scripted, &table(&scripted, &["R", "H"], &[])?, &["x1 + x2", "0", "0", "x3 + x4"])
}

fn criterion_12() -> Check {
    for (k, name) in MODELS.iter().enumerate() {
        check_numeric_oracle(name, 25, k as u64).map_err(|e| format!("(a) {e}"))?;
        check_normalization(name, 25, 100 + k as u64).map_err(|e| format!("(b) {e}"))?;
    }
    check_connectives().map_err(|e| format!("(c) {e}"))?;
    for name in ["ace-king.pql", "amphibian.pql", "knight2.pql", "zombie1-search.pql"] {
        check_linear_form(name).map_err(|e| format!("(d) {e}"))?;
    }
    Ok(())
}

fn criterion_13() -> Check {
    for name in MODELS {
        let m = parse_model(&source(name)).map_err(|e| format!("{name}: {e}"))?;
        m.validate().map_err(|e| format!("{name}: {e}"))?;
        let text = serialize(&m);
        let again = parse_model(&text).map_err(|e| format!("{name} reparse: {e}"))?;
        ensure(again == m, || format!("{name} does not round-trip"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 13] = [
        ("symbolic inference on the PQ model", criterion_1),
        ("unless-form display of Pr(Q | P, R)", criterion_2),
        ("algebra on result-table entries", criterion_3),
        ("polynomial optimization of E(B)", criterion_4),
        ("search over the parametric R* function", criterion_5),
        ("modus ponens in both moods", criterion_6),
        ("ace-king", criterion_7),
        ("Paris monster thresholds", criterion_8),
        ("Goodman's butter", criterion_9),
        ("knights and knaves", criterion_10),
        ("zombies", criterion_11),
        ("property suites", criterion_12),
        ("parsing and round-trip", criterion_13),
    ];
    let mut failed = 0;
    for (k, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {:>2} {title} ({took:.2}s)", k + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {title}: {e}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
}

