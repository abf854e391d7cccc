use std::fmt::Write;

use super::Model;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz text: ovals for primaries (double border when deterministic),
/// parallelograms for parameters, a diamond per clique.
pub fn export_dot(model: &Model) -> String {
    let mut out = String::from("digraph model {\n");
    for hint in &model.hints {
        let _ = writeln!(out, "  {}", hint.trim());
    }
    let g = model.graph();
    let mut used_params: Vec<_> = g.parameter_edges.iter().map(|&(v, _)| v).collect();
    used_params.sort();
    used_params.dedup();
    for p in &model.parameters {
        let Some(var) = p.var else { continue };
        if !used_params.contains(&var) {
            continue;
        }
        let border = if p.fixed.is_some() { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  {} [shape=parallelogram{border}];", quote(&p.name));
    }
    for v in &model.primaries {
        let border = if v.deterministic { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  {} [shape=oval{border}];", quote(&v.name));
    }
    for c in &model.cliques {
        if c.members.is_empty() {
            continue;
        }
        let _ = writeln!(out, "  {} [shape=diamond, label=\"\"];", quote(&c.name));
    }
    for t in &model.tables {
        let sink = |target: usize| match &t.clique {
            Some(c) => quote(c),
            None => quote(&model.primaries[target].name),
        };
        let mut params: Vec<_> = t.parameters().into_iter().collect();
        params.sort();
        let sinks: Vec<String> = match &t.clique {
            Some(c) => vec![quote(c)],
            None => t.targets.iter().map(|&i| sink(i)).collect(),
        };
        for s in &sinks {
            for &p in &params {
                let _ = writeln!(out, "  {} -> {s};", quote(&model.registry.name(p)));
            }
            for &p in &t.parents {
                let _ = writeln!(out, "  {} -> {s};", quote(&model.primaries[p].name));
            }
        }
        if let Some(c) = &t.clique {
            for &m in &t.targets {
                let _ = writeln!(out, "  {} -> {} [dir=none];", quote(c), quote(&model.primaries[m].name));
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model() {
        assert_eq!(export_dot(&Model::new()), "digraph model {\n}\n");
    }
}
