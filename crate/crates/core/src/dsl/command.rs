//! Command language of the shell.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrintFlags {
    pub index: bool,
    pub all: bool,
    pub unless: bool,
    pub exact: bool,
    pub pivot: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Load { path: String },
    Table { model: Option<String>, principal: Vec<String>, conditioning: Vec<String> },
    Infer { handle: Option<String> },
    Print { handle: Option<String>, flags: PrintFlags },
    Item { handle: Option<String>, index: usize },
    Expr { unless: bool, text: String },
    Expect { model: Option<String>, var: String },
    Pprog { model: Option<String>, sense: Sense, objective: String, constraints: Vec<String>, aux: Vec<String> },
    Show { handle: Option<String> },
    Solve { handle: Option<String> },
    Solution { handle: Option<String> },
    Point { handle: Option<String> },
    Search { handle: Option<String>, params: Vec<String>, targets: Vec<String> },
    Filter { handle: Option<String>, criteria: String },
    Instantiate { model: Option<String>, assignment: Vec<(String, String)> },
    Dot { model: Option<String> },
    Serialize { model: Option<String> },
    Validate { model: Option<String> },
    Constraints { model: Option<String> },
    Set { key: String, value: String },
    Handles,
    Help,
    Quit,
}

/// A command with an optional result name, written `name = command` or
/// `command ... as name`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub name: Option<String>,
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Word {
    text: String,
    quoted: bool,
}

fn split_words(line: &str) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c == '#' {
            break;
        }
        if c == '"' || c == '\'' {
            chars.next();
            let mut text = String::new();
            loop {
                match chars.next() {
                    None => return Err(Error::syntax(1, i + 1, "unterminated string")),
                    Some((_, '\\')) if chars.peek().is_some_and(|&(_, d)| d == c) => {
                        text.push(c);
                        chars.next();
                    }
                    Some((_, d)) if d == c => break,
                    Some((_, d)) => text.push(d),
                }
            }
            out.push(Word { text, quoted: true });
            continue;
        }
        if c == '|' {
            chars.next();
            out.push(Word { text: "|".into(), quoted: false });
            continue;
        }
        let mut text = String::new();
        while let Some(&(_, d)) = chars.peek() {
            if d.is_whitespace() || d == '|' || d == '"' {
                break;
            }
            text.push(d);
            chars.next();
        }
        out.push(Word { text, quoted: false });
    }
    Ok(out)
}

fn is_name(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Args {
    verb: String,
    words: Vec<Word>,
    handle: Option<String>,
}

impl Args {
    fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::syntax(1, 1, format!("{}: {}", self.verb, msg.into())))
    }

    fn flag(&mut self, f: &str) -> bool {
        match self.words.iter().position(|w| !w.quoted && w.text == f) {
            Some(i) => {
                self.words.remove(i);
                true
            }
            None => false,
        }
    }

    fn option(&mut self, f: &str) -> Result<Option<String>> {
        match self.words.iter().position(|w| !w.quoted && w.text == f) {
            Some(i) if i + 1 < self.words.len() => {
                self.words.remove(i);
                Ok(Some(self.words.remove(i).text))
            }
            Some(_) => self.error(format!("{f} needs a value")),
            None => Ok(None),
        }
    }

    fn none_left(&self) -> Result<()> {
        match self.words.first() {
            None => Ok(()),
            Some(w) => self.error(format!("unexpected argument `{}`", w.text)),
        }
    }

    fn one(&mut self, what: &str) -> Result<String> {
        if self.words.len() != 1 {
            return self.error(format!("expected {what}"));
        }
        Ok(self.words.remove(0).text)
    }
}

/// Parses one command line. Blank lines and comments yield `None`.
pub fn parse_command(line: &str) -> Result<Option<Statement>> {
    let mut words = split_words(line)?;
    if words.is_empty() {
        return Ok(None);
    }
    let mut name = None;
    if words.len() >= 2 && !words[0].quoted && is_name(&words[0].text) && !words[1].quoted && words[1].text == "=" {
        name = Some(words[0].text.clone());
        words.drain(..2);
        if words.is_empty() {
            return Err(Error::syntax(1, 1, "missing command after `=`"));
        }
    }
    let verb = words.remove(0);
    if verb.quoted {
        return Err(Error::syntax(1, 1, format!("expected a command, found \"{}\"", verb.text)));
    }
    let mut args = Args { verb: verb.text.clone(), words, handle: None };
    // Only a bare `$name` selects the target object; `$t[k]` is expression text.
    let pos = args
        .words
        .iter()
        .position(|w| !w.quoted && w.text.strip_prefix('$').is_some_and(is_name));
    if let (Some(i), false) = (pos, verb.text == "expr") {
        args.handle = Some(args.words.remove(i).text[1..].to_string());
    }
    if let Some(i) = args.words.iter().position(|w| !w.quoted && w.text == "as") {
        if i + 2 != args.words.len() || !is_name(&args.words[i + 1].text) {
            return args.error("`as` must be followed by one name at the end");
        }
        if name.is_some() {
            return args.error("result named twice");
        }
        name = Some(args.words.pop().expect("checked").text);
        args.words.pop();
    }
    let handle = args.handle.clone();
    let command = match verb.text.as_str() {
        "load" => Command::Load { path: args.one("a path")? },
        "table" => {
            let mut principal = Vec::new();
            let mut conditioning = Vec::new();
            let mut bar = false;
            for w in &args.words {
                if !w.quoted && w.text == "|" {
                    if bar {
                        return args.error("second `|`");
                    }
                    bar = true;
                } else if bar {
                    conditioning.push(w.text.clone());
                } else {
                    principal.push(w.text.clone());
                }
            }
            if principal.is_empty() {
                return args.error("the principal set is empty");
            }
            Command::Table { model: handle, principal, conditioning }
        }
        "infer" => {
            args.none_left()?;
            Command::Infer { handle }
        }
        "print" => {
            let flags = PrintFlags {
                index: args.flag("-index"),
                all: args.flag("-all"),
                unless: args.flag("-unless"),
                exact: args.flag("-exact"),
                pivot: args.option("-pivot")?,
            };
            args.none_left()?;
            Command::Print { handle, flags }
        }
        "item" => {
            let n = args.one("a row index")?;
            let index = n.parse().ok().filter(|&k: &usize| k >= 1);
            let Some(index) = index else {
                return args.error(format!("bad row index `{n}`"));
            };
            Command::Item { handle, index }
        }
        "expr" => {
            let unless = args.flag("-unless");
            if args.words.is_empty() {
                return args.error("expected an expression");
            }
            let text = args.words.iter().map(|w| w.text.as_str()).collect::<Vec<_>>().join(" ");
            Command::Expr { unless, text }
        }
        "expect" => Command::Expect { model: handle, var: args.one("a variable")? },
        "pprog" => {
            let min = args.flag("-min");
            let max = args.flag("-max");
            let sense = match (min, max) {
                (true, false) => Sense::Min,
                (false, true) => Sense::Max,
                _ => return args.error("give exactly one of -min and -max"),
            };
            let mut aux = Vec::new();
            while let Some(a) = args.option("-aux")? {
                aux.extend(a.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()));
            }
            if args.words.is_empty() {
                return args.error("expected an objective");
            }
            let objective = args.words.remove(0).text;
            let constraints = args.words.drain(..).map(|w| w.text).collect();
            Command::Pprog { model: handle, sense, objective, constraints, aux }
        }
        "show" | "solve" | "solution" | "point" => {
            args.none_left()?;
            match verb.text.as_str() {
                "show" => Command::Show { handle },
                "solve" => Command::Solve { handle },
                "solution" => Command::Solution { handle },
                _ => Command::Point { handle },
            }
        }
        "search" => {
            let mut params = Vec::new();
            let mut targets = Vec::new();
            let mut bar = false;
            for w in &args.words {
                if !w.quoted && w.text == "|" {
                    bar = true;
                } else if bar || w.quoted {
                    targets.push(w.text.clone());
                } else {
                    params.push(w.text.clone());
                }
            }
            Command::Search { handle, params, targets }
        }
        "filter" => {
            let criteria = args.words.iter().map(|w| w.text.as_str()).collect::<Vec<_>>().join(" ");
            if criteria.is_empty() {
                return args.error("expected criteria");
            }
            Command::Filter { handle, criteria }
        }
        "instantiate" => {
            let mut assignment = Vec::new();
            for w in &args.words {
                let Some((k, v)) = w.text.split_once('=') else {
                    return args.error(format!("expected NAME=VALUE, found `{}`", w.text));
                };
                assignment.push((k.trim().to_string(), v.trim().to_string()));
            }
            if assignment.is_empty() {
                return args.error("expected NAME=VALUE pairs");
            }
            Command::Instantiate { model: handle, assignment }
        }
        "dot" | "serialize" | "validate" | "constraints" => {
            args.none_left()?;
            match verb.text.as_str() {
                "dot" => Command::Dot { model: handle },
                "serialize" => Command::Serialize { model: handle },
                "validate" => Command::Validate { model: handle },
                _ => Command::Constraints { model: handle },
            }
        }
        "set" => {
            if args.words.len() != 2 {
                return args.error("expected `set KEY VALUE`");
            }
            Command::Set { key: args.words[0].text.clone(), value: args.words[1].text.clone() }
        }
        "handles" => Command::Handles,
        "help" => Command::Help,
        "quit" | "exit" => Command::Quit,
        other => return Err(Error::syntax(1, 1, format!("unknown command `{other}`"))),
    };
    Ok(Some(Statement { name, command }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmd(s: &str) -> Statement {
        parse_command(s).unwrap().unwrap()
    }

    #[test]
    fn table_queries() {
        let s = cmd("table Q | P");
        assert_eq!(
            s.command,
            Command::Table { model: None, principal: vec!["Q".into()], conditioning: vec!["P".into()] }
        );
        let s = cmd("tqp = table $m Q|P R");
        assert_eq!(s.name.as_deref(), Some("tqp"));
        assert_eq!(
            s.command,
            Command::Table { model: Some("m".into()), principal: vec!["Q".into()], conditioning: vec!["P".into(), "R".into()] }
        );
        assert!(parse_command("table | P").is_err());
    }

    #[test]
    fn pprog_and_flags() {
        let s = cmd(r#"pprog -min "z + x*y - x*z" "x == 1" "1 - x + x*y == 1" as pq"#);
        assert_eq!(s.name.as_deref(), Some("pq"));
        let Command::Pprog { sense, objective, constraints, .. } = s.command else { panic!() };
        assert_eq!(sense, Sense::Min);
        assert_eq!(objective, "z + x*y - x*z");
        assert_eq!(constraints, ["x == 1", "1 - x + x*y == 1"]);
        assert_eq!(cmd("print").command, Command::Print { handle: None, flags: PrintFlags::default() });
        let Command::Print { flags, .. } = cmd("print -index -pivot Q $t").command else { panic!() };
        assert!(flags.index && flags.pivot.as_deref() == Some("Q"));
        assert!(parse_command("frobnicate").is_err());
        assert!(parse_command("item 0").is_err());
        assert_eq!(parse_command("  # note").unwrap(), None);
    }
}
