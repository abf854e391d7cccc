//! Writes a model back out as model-definition source.

use std::fmt::Write;

use crate::embed::Value;
use crate::network::{Domain, Model, Origin, TableSource};
use crate::polynomial::fmt_signed;

fn quote(s: &str) -> String {
    if !s.contains('"') {
        format!("\"{s}\"")
    } else if !s.contains('\'') {
        format!("'{s}'")
    } else {
        format!("\"{}\"", s.replace('"', "\\\""))
    }
}

fn labels(out: &mut String, label: &Option<String>, tex: &Option<String>) {
    if let Some(l) = label {
        let _ = write!(out, " label = {};", quote(l));
    }
    if let Some(t) = tex {
        let _ = write!(out, " tex = {};", quote(t));
    }
}

fn states(domain: &Domain) -> String {
    let Domain::States(s) = domain else { return "binary".into() };
    let binary = s.len() == 2
        && s[0].label == "T"
        && s[1].label == "F"
        && s[0].value == Value::Bool(true)
        && s[1].value == Value::Bool(false);
    if binary {
        return "binary".into();
    }
    let ints: Option<Vec<i64>> = s.iter().map(|st| st.label.parse::<i64>().ok()).collect();
    if let Some(ints) = ints {
        if ints.windows(2).all(|w| w[1] == w[0] + 1) && ints.iter().zip(s).all(|(k, st)| k.to_string() == st.label) {
            return format!("range({}, {})", ints[0], ints[ints.len() - 1]);
        }
    }
    let labels: Vec<String> = s.iter().map(|st| st.label.clone()).collect();
    format!("values({})", labels.join(", "))
}

/// Model source that parses back to an equal model.
pub fn serialize(model: &Model) -> String {
    let reg = &model.registry;
    let mut out = String::new();
    for p in model.parameters.iter().filter(|p| !p.generated) {
        match &p.domain {
            Domain::Finite(vals) => {
                let vs: Vec<String> = vals.iter().map(fmt_signed).collect();
                let _ = write!(out, "decision {} {{", p.name);
                labels(&mut out, &p.label, &p.tex);
                let _ = writeln!(out, " states = values({}); }}", vs.join(", "));
            }
            Domain::Interval(lo, hi) => {
                let _ = write!(out, "parameter {} {{", p.name);
                labels(&mut out, &p.label, &p.tex);
                let _ = writeln!(out, " range = ({}, {}); }}", fmt_signed(lo), fmt_signed(hi));
            }
            Domain::States(_) => {}
        }
    }
    for v in &model.primaries {
        let _ = write!(out, "primary {} {{", v.name);
        labels(&mut out, &v.label, &v.tex);
        let _ = writeln!(out, " states = {}; }}", states(&v.domain));
    }
    for c in &model.cliques {
        let _ = writeln!(out, "clique {};", c.name);
    }
    for t in &model.targets {
        let _ = write!(out, "utility {} {{", t.name);
        labels(&mut out, &t.label, &None);
        out.push_str(" }\n");
    }
    for t in &model.tables {
        let names = |idx: &[usize]| idx.iter().map(|&i| model.primaries[i].name.clone()).collect::<Vec<_>>().join(" ");
        out.push_str("probability ( ");
        if let Some(c) = &t.clique {
            let _ = write!(out, "{c} : ");
        }
        out.push_str(&names(&t.targets));
        if !t.parents.is_empty() {
            let _ = write!(out, " | {}", names(&t.parents));
        }
        out.push_str(" ) {");
        match &t.source {
            TableSource::Function(text) | TableSource::Formula(text) => {
                let _ = write!(out, " function = {};", quote(text));
            }
            TableSource::Parametric { prefix, params } => {
                let joint = t.targets.len() > 1 || t.clique.is_some() || t.parents.is_empty();
                let interval = params
                    .first()
                    .and_then(|&v| model.parameter_by_var(v))
                    .is_some_and(|p| matches!(p.domain, Domain::Interval(..)));
                let _ = match (joint, interval) {
                    (true, false) => write!(out, " parametric({prefix}, function);"),
                    (false, true) => write!(out, " parametric({prefix}, distribution);"),
                    _ => write!(out, " parametric({prefix});"),
                };
            }
            TableSource::Data | TableSource::Builtin => {
                let es: Vec<String> = t.entries.iter().map(|e| e.to_string_with(reg)).collect();
                let _ = write!(out, " data = ({});", es.join(", "));
            }
        }
        if !t.verify {
            out.push_str(" noverify;");
        }
        out.push_str(" }\n");
    }
    for t in &model.targets {
        let _ = writeln!(
            out,
            "probability ( {} | {} ) {{ function = {}; }}",
            t.name,
            t.parents.join(" "),
            quote(&t.text)
        );
    }
    for c in model.constraints.iter().filter(|c| c.origin == Origin::User) {
        let _ = writeln!(out, "constraint {};", quote(&c.render(reg)));
    }
    for (v, value) in &model.settings {
        let _ = writeln!(out, "set {} = {};", reg.name(*v), fmt_signed(value));
    }
    for h in &model.hints {
        let _ = writeln!(out, "net {{ graph = {}; }}", quote(h));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;

    #[test]
    fn round_trip() {
        let src = r#"
parameter x { range = (0,1); }
parameter w { range = (-1, 2); }
primary P { label = "say \"hi\""; states = binary; }
probability ( P ) { data = (x, 1-x); noverify; }
primary B { states = range(0, 2); }
probability ( B | P ) { parametric(b); }
primary S { states = values(red, green); }
probability ( S ) { data = (1/4, 3/4); }
constraint "x <= 1/2 + w";
net { graph = "rankdir = TB;"; }
"#;
        let m = parse_model(src).unwrap();
        let text = serialize(&m);
        let again = parse_model(&text).unwrap();
        assert_eq!(m, again, "{text}");
    }
}
