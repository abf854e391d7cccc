//! Brute-force symbolic inference: join every component table into the full
//! joint, aggregate for numerator and denominator, divide entrywise.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::network::{ConstraintSet, Model};
use crate::polynomial::{unless_form, FractionalPolynomial, Polynomial, Reduction, Registry};

/// Principal and conditioning sets; everything else is marginalized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub principal: Vec<usize>,
    pub conditioning: Vec<usize>,
}

impl Query {
    pub fn new(model: &Model, principal: &[&str], conditioning: &[&str]) -> Result<Query> {
        let resolve = |names: &[&str]| -> Result<Vec<usize>> {
            names
                .iter()
                .map(|n| model.primary_index(n).ok_or_else(|| Error::Query(format!("unknown primary `{n}`"))))
                .collect()
        };
        let q = Query { principal: resolve(principal)?, conditioning: resolve(conditioning)? };
        q.check(model)?;
        Ok(q)
    }

    pub fn check(&self, model: &Model) -> Result<()> {
        let all: Vec<usize> = self.principal.iter().chain(&self.conditioning).copied().collect();
        for (k, &v) in all.iter().enumerate() {
            if v >= model.primaries.len() {
                return Err(Error::Query(format!("unknown primary #{v}")));
            }
            if all[..k].contains(&v) {
                return Err(Error::Query(format!("`{}` appears twice", model.primaries[v].name)));
            }
        }
        Ok(())
    }

    /// Column order of the result: conditioning first, then principal.
    pub fn columns(&self) -> Vec<usize> {
        self.conditioning.iter().chain(&self.principal).copied().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    /// 1-based index in the full enumeration of the columns.
    pub index: usize,
    pub states: Vec<usize>,
    pub value: FractionalPolynomial,
}

/// Probability table over a set of columns.
#[derive(Clone, Debug)]
pub struct ResultTable {
    pub registry: Registry,
    pub column_names: Vec<String>,
    pub state_labels: Vec<Vec<String>>,
    pub columns: Vec<usize>,
    pub principal: Vec<String>,
    pub conditioning: Vec<String>,
    pub conditional: bool,
    pub rows: Vec<Row>,
    pub constraints: ConstraintSet,
}

/// Flags for [`ResultTable::render`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DisplayOptions {
    pub index: bool,
    /// Show 0/0 rows.
    pub all: bool,
    /// Render quotients in unless form with the given reduction.
    pub unless: Option<Reduction>,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

fn decode(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// Nonzero rows of the full joint, as (0-based index, states, product).
pub fn joint_rows(model: &Model) -> Vec<(usize, Vec<usize>, Polynomial)> {
    let m = model.primaries.len();
    let dims = model.dims(&(0..m).collect::<Vec<_>>());
    let st = strides(&dims);
    // Apply each table once all of its variables are assigned.
    let mut at_level: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut constant = Polynomial::one();
    for (ti, t) in model.tables.iter().enumerate() {
        match t.targets.iter().chain(&t.parents).max() {
            Some(&last) => at_level[last].push(ti),
            None => {
                if let Some(e) = t.entries.first() {
                    constant = &constant * e;
                }
            }
        }
    }
    let mut out = Vec::new();
    if constant.is_zero() {
        return out;
    }
    let mut states = vec![0usize; m];
    fn entry_of(model: &Model, ti: usize, states: &[usize]) -> Polynomial {
        let t = &model.tables[ti];
        let mut row = 0;
        for &p in &t.parents {
            row = row * model.primaries[p].states().len() + states[p];
        }
        let mut col = 0;
        for &v in &t.targets {
            col = col * model.primaries[v].states().len() + states[v];
        }
        t.entries[row * model.table_width(t) + col].clone()
    }
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        level: usize,
        model: &Model,
        dims: &[usize],
        st: &[usize],
        at_level: &[Vec<usize>],
        states: &mut Vec<usize>,
        acc: Polynomial,
        out: &mut Vec<(usize, Vec<usize>, Polynomial)>,
    ) {
        if level == dims.len() {
            let idx = states.iter().zip(st).map(|(s, w)| s * w).sum();
            out.push((idx, states.clone(), acc));
            return;
        }
        for s in 0..dims[level] {
            states[level] = s;
            let mut prod = acc.clone();
            for &ti in &at_level[level] {
                let e = entry_of(model, ti, states);
                if e.is_zero() {
                    prod = Polynomial::zero();
                    break;
                }
                if !e.is_one() {
                    prod = &prod * &e;
                }
            }
            if !prod.is_zero() {
                dfs(level + 1, model, dims, st, at_level, states, prod, out);
            }
        }
    }
    dfs(0, model, &dims, &st, &at_level, &mut states, constant, &mut out);
    out
}

fn aggregate(model: &Model, joint: &[(usize, Vec<usize>, Polynomial)], cols: &[usize]) -> Vec<Polynomial> {
    let dims = model.dims(cols);
    let st = strides(&dims);
    let size: usize = dims.iter().product();
    let mut acc = vec![Polynomial::zero(); size];
    for (_, states, p) in joint {
        let idx: usize = cols.iter().zip(&st).map(|(&c, w)| states[c] * w).sum();
        acc[idx] += p;
    }
    acc
}

fn table_shell(model: &Model, cols: &[usize], principal: &[usize], conditioning: &[usize]) -> ResultTable {
    ResultTable {
        registry: model.registry.clone(),
        column_names: cols.iter().map(|&c| model.primaries[c].name.clone()).collect(),
        state_labels: cols
            .iter()
            .map(|&c| model.primaries[c].states().iter().map(|s| s.label.clone()).collect())
            .collect(),
        columns: cols.to_vec(),
        principal: principal.iter().map(|&c| model.primaries[c].name.clone()).collect(),
        conditioning: conditioning.iter().map(|&c| model.primaries[c].name.clone()).collect(),
        conditional: !conditioning.is_empty(),
        rows: Vec::new(),
        constraints: model.all_constraints(),
    }
}

/// Product of matching entries of every table, one row per state combination.
pub fn full_joint(model: &Model) -> ResultTable {
    let cols: Vec<usize> = (0..model.primaries.len()).collect();
    let joint = joint_rows(model);
    let values = aggregate(model, &joint, &cols);
    let dims = model.dims(&cols);
    let mut t = table_shell(model, &cols, &cols, &[]);
    t.rows = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| Row { index: i + 1, states: decode(i, &dims), value: FractionalPolynomial::from_poly(v) })
        .collect();
    t
}

/// Sums an unconditional table over the columns not kept.
pub fn marginalize(t: &ResultTable, keep: &[usize]) -> Result<ResultTable> {
    if t.conditional {
        return Err(Error::Query("cannot marginalize a conditional table".into()));
    }
    let pos: Vec<usize> = keep
        .iter()
        .map(|k| t.columns.iter().position(|c| c == k).ok_or_else(|| Error::Query(format!("column #{k} not in table"))))
        .collect::<Result<_>>()?;
    let dims: Vec<usize> = pos.iter().map(|&p| t.state_labels[p].len()).collect();
    let st = strides(&dims);
    let size: usize = dims.iter().product();
    let mut acc = vec![Polynomial::zero(); size];
    for row in &t.rows {
        let idx: usize = pos.iter().zip(&st).map(|(&p, w)| row.states[p] * w).sum();
        acc[idx] += &row.value.num;
    }
    let mut out = ResultTable {
        registry: t.registry.clone(),
        column_names: pos.iter().map(|&p| t.column_names[p].clone()).collect(),
        state_labels: pos.iter().map(|&p| t.state_labels[p].clone()).collect(),
        columns: keep.to_vec(),
        principal: pos.iter().map(|&p| t.column_names[p].clone()).collect(),
        conditioning: Vec::new(),
        conditional: false,
        rows: Vec::new(),
        constraints: t.constraints.clone(),
    };
    out.rows = acc
        .into_iter()
        .enumerate()
        .map(|(i, v)| Row { index: i + 1, states: decode(i, &dims), value: FractionalPolynomial::from_poly(v) })
        .collect();
    Ok(out)
}

/// Answers a probability-table query.
pub fn query(model: &Model, q: &Query) -> Result<ResultTable> {
    q.check(model)?;
    let joint = joint_rows(model);
    let cols = q.columns();
    let num = aggregate(model, &joint, &cols);
    let dims = model.dims(&cols);
    let mut t = table_shell(model, &cols, &q.principal, &q.conditioning);
    if q.conditioning.is_empty() {
        t.rows = num
            .into_iter()
            .enumerate()
            .map(|(i, v)| Row { index: i + 1, states: decode(i, &dims), value: FractionalPolynomial::from_poly(v) })
            .collect();
        return Ok(t);
    }
    let den = aggregate(model, &joint, &q.conditioning);
    let block: usize = model.dims(&q.principal).iter().product();
    t.rows = num
        .into_iter()
        .enumerate()
        .map(|(i, v)| Row {
            index: i + 1,
            states: decode(i, &dims),
            value: FractionalPolynomial::new(v, den[i / block].clone()),
        })
        .collect();
    Ok(t)
}

/// Layout with one column per state of `col_var`.
#[derive(Clone, Debug)]
pub struct PivotTable {
    pub row_names: Vec<String>,
    pub col_name: String,
    pub col_states: Vec<String>,
    pub header: String,
    pub rows: Vec<PivotRow>,
}

#[derive(Clone, Debug)]
pub struct PivotRow {
    pub indices: Vec<usize>,
    pub states: Vec<String>,
    pub values: Vec<FractionalPolynomial>,
}

/// Regroups rows so every state of `col_var` sits in its own column; rows whose
/// entries are all 0/0 are dropped unless `all`.
pub fn pivot(t: &ResultTable, col_var: &str, all: bool) -> Result<PivotTable> {
    let cpos = t
        .column_names
        .iter()
        .position(|c| c == col_var)
        .ok_or_else(|| Error::Query(format!("`{col_var}` is not a column")))?;
    let row_pos: Vec<usize> = (0..t.columns.len()).filter(|&p| p != cpos).collect();
    let mut groups: Vec<(Vec<usize>, PivotRow)> = Vec::new();
    for row in &t.rows {
        let key: Vec<usize> = row_pos.iter().map(|&p| row.states[p]).collect();
        let slot = match groups.iter().position(|(k, _)| *k == key) {
            Some(s) => s,
            None => {
                groups.push((
                    key.clone(),
                    PivotRow {
                        indices: Vec::new(),
                        states: row_pos.iter().zip(&key).map(|(&p, &s)| t.state_labels[p][s].clone()).collect(),
                        values: Vec::new(),
                    },
                ));
                groups.len() - 1
            }
        };
        groups[slot].1.indices.push(row.index);
        groups[slot].1.values.push(row.value.clone());
    }
    let rows = groups
        .into_iter()
        .map(|(_, r)| r)
        .filter(|r| all || !r.values.iter().all(|v| v.is_indeterminate()))
        .collect();
    Ok(PivotTable {
        row_names: row_pos.iter().map(|&p| t.column_names[p].clone()).collect(),
        col_name: col_var.to_string(),
        col_states: t.state_labels[cpos].clone(),
        header: t.header(),
        rows,
    })
}

const RULE: &str = "-------";

impl ResultTable {
    /// `Pr( {Q} | {P} )`.
    pub fn header(&self) -> String {
        if self.conditional {
            format!("Pr( {{{}}} | {{{}}} )", self.principal.join(" "), self.conditioning.join(" "))
        } else {
            format!("Pr( {{{}}} )", self.principal.join(" "))
        }
    }

    pub fn item(&self, index: usize) -> Result<&FractionalPolynomial> {
        self.rows
            .iter()
            .find(|r| r.index == index)
            .map(|r| &r.value)
            .ok_or_else(|| Error::Query(format!("no row {index}")))
    }

    pub fn render_value(&self, v: &FractionalPolynomial, opts: &DisplayOptions) -> String {
        if let Some(mode) = opts.unless {
            return unless_form(v, mode).render(&self.registry);
        }
        if self.conditional {
            v.display_quotient(&self.registry).to_string()
        } else {
            v.display(&self.registry).to_string()
        }
    }

    /// Tab-separated text with a trailing tab on every row.
    pub fn render(&self, opts: &DisplayOptions) -> String {
        let mut out = String::new();
        let lead = if opts.index { "Index\t| " } else { "" };
        let _ = writeln!(out, "{lead}{}\t| {}\t", self.column_names.join("\t"), self.header());
        let n = self.columns.len() + 1 + opts.index as usize;
        let _ = writeln!(out, "{}", vec![RULE; n].join("\t"));
        for row in &self.rows {
            if row.value.is_indeterminate() && !opts.all && opts.unless.is_none() {
                continue;
            }
            if opts.index {
                let _ = write!(out, "{}\t| ", row.index);
            }
            let states: Vec<&str> = row.states.iter().enumerate().map(|(k, &s)| self.state_labels[k][s].as_str()).collect();
            let _ = writeln!(out, "{}\t| {}\t", states.join("\t"), self.render_value(&row.value, opts));
        }
        out
    }

    /// Rows with a given state label for a column (e.g. `Q = T`).
    pub fn select(&self, column: &str, label: &str) -> Vec<&Row> {
        let Some(p) = self.column_names.iter().position(|c| c == column) else { return Vec::new() };
        self.rows.iter().filter(|r| self.state_labels[p][r.states[p]] == label).collect()
    }
}

impl PivotTable {
    pub fn render(&self, t: &ResultTable, opts: &DisplayOptions) -> String {
        let mut out = String::new();
        let lead = if opts.index { "Index\t| " } else { "" };
        let heads: Vec<String> = self.col_states.iter().map(|s| format!("{}={s}", self.col_name)).collect();
        let _ = writeln!(out, "{lead}{}\t| {}\t", self.row_names.join("\t"), heads.join("\t"));
        let n = self.row_names.len() + self.col_states.len() + opts.index as usize;
        let _ = writeln!(out, "{}", vec![RULE; n].join("\t"));
        for row in &self.rows {
            if opts.index {
                let idx: Vec<String> = row.indices.iter().map(|i| i.to_string()).collect();
                let _ = write!(out, "{}\t| ", idx.join(", "));
            }
            let vals: Vec<String> = row.values.iter().map(|v| t.render_value(v, opts)).collect();
            let _ = writeln!(out, "{}\t| {}\t", row.states.join("\t"), vals.join("\t"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{ComponentTable, Domain, TableSource};

    fn coin() -> Model {
        let mut m = Model::new();
        let x = Polynomial::var(m.add_parameter("x", Domain::unit_interval()).unwrap());
        let p = m.add_primary("P", Domain::binary()).unwrap();
        m.add_table(ComponentTable::new(vec![p], vec![], vec![x.clone(), &Polynomial::one() - &x], TableSource::Data))
            .unwrap();
        let q = m.add_primary("Q", Domain::binary()).unwrap();
        let id = vec![Polynomial::one(), Polynomial::zero(), Polynomial::zero(), Polynomial::one()];
        m.add_table(ComponentTable::new(vec![q], vec![p], id, TableSource::Data)).unwrap();
        m
    }

    #[test]
    fn joint_of_copy() {
        let m = coin();
        let j = full_joint(&m);
        assert_eq!(j.rows.len(), 4);
        let vals: Vec<String> = j.rows.iter().map(|r| r.value.display(&m.registry).to_string()).collect();
        assert_eq!(vals, ["x", "0", "0", "1 - x"]);
    }

    #[test]
    fn keep_all_is_identity() {
        let m = coin();
        let j = full_joint(&m);
        let k = marginalize(&j, &[0, 1]).unwrap();
        assert_eq!(
            k.rows.iter().map(|r| &r.value).collect::<Vec<_>>(),
            j.rows.iter().map(|r| &r.value).collect::<Vec<_>>()
        );
    }

    #[test]
    fn conditional_rows_and_render() {
        let m = coin();
        let q = Query::new(&m, &["Q"], &["P"]).unwrap();
        let t = query(&m, &q).unwrap();
        let text = t.render(&DisplayOptions { index: true, ..Default::default() });
        assert_eq!(
            text,
            "Index\t| P\tQ\t| Pr( {Q} | {P} )\t\n-------\t-------\t-------\t-------\n\
             1\t| T\tT\t| (x) / (x)\t\n2\t| T\tF\t| (0) / (x)\t\n\
             3\t| F\tT\t| (0) / (1 - x)\t\n4\t| F\tF\t| (1 - x) / (1 - x)\t\n"
        );
        assert!(Query::new(&m, &["Q"], &["Q"]).is_err());
        assert!(Query::new(&m, &["Z"], &[]).is_err());
    }

    #[test]
    fn single_variable_pivot_is_unchanged() {
        let m = coin();
        let t = query(&m, &Query::new(&m, &["P"], &[]).unwrap()).unwrap();
        let p = pivot(&t, "P", false).unwrap();
        assert_eq!(p.rows.len(), 1);
        assert_eq!(p.rows[0].values.len(), 2);
    }
}
