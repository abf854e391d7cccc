use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Identifier, possibly with a bracketed subscript such as `t[1]`.
    Ident(String),
    Number(String),
    Str(String),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    pub start: usize,
    pub end: usize,
}

const PUNCTS: [&str; 28] = [
    "<->", "->", "&&", "||", "==", "<=", ">=", "!=", "(", ")", "{", "}", "[", "]", ";", ",", "=", "|", ":", "+", "-",
    "*", "/", "^", "!", "?", "<", ">",
];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits source text into tokens; `//` and `/* */` comments are skipped.
pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    let byte = |k: usize| chars.get(k).map_or(src.len(), |&(b, _)| b);
    while i < chars.len() {
        let (b, c) = chars[i];
        let col = b - line_start + 1;
        if c == '\n' {
            line += 1;
            line_start = b + 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let rest = &src[b..];
        if rest.starts_with("//") || rest.starts_with('#') {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        if rest.starts_with("/*") {
            i += 2;
            loop {
                if i >= chars.len() {
                    return Err(Error::syntax(line, col, "unterminated comment"));
                }
                if chars[i].1 == '\n' {
                    line += 1;
                    line_start = chars[i].0 + 1;
                }
                if src[chars[i].0..].starts_with("*/") {
                    i += 2;
                    break;
                }
                i += 1;
            }
            continue;
        }
        if c == '"' || c == '\'' {
            let mut text = String::new();
            let (sl, sc) = (line, col);
            i += 1;
            loop {
                let Some(&(_, d)) = chars.get(i) else {
                    return Err(Error::syntax(sl, sc, "unterminated string"));
                };
                if d == '\\' && chars.get(i + 1).is_some_and(|&(_, e)| e == c) {
                    text.push(c);
                    i += 2;
                    continue;
                }
                if d == c {
                    i += 1;
                    break;
                }
                if d == '\n' {
                    line += 1;
                    line_start = chars[i].0 + 1;
                }
                text.push(d);
                i += 1;
            }
            out.push(Token { tok: Tok::Str(text), line: sl, col: sc, start: b, end: byte(i) });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|&(_, d)| d.is_ascii_digit())) {
            let s = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            let text = &src[b..byte(i)];
            if text.matches('.').count() > 1 {
                return Err(Error::syntax(line, col, format!("malformed number `{text}`")));
            }
            let _ = s;
            out.push(Token { tok: Tok::Number(text.to_string()), line, col, start: b, end: byte(i) });
            continue;
        }
        if is_ident_start(c) {
            while i < chars.len() && is_ident_char(chars[i].1) {
                i += 1;
            }
            // Subscript suffix `[digits]` belongs to the identifier.
            if chars.get(i).is_some_and(|&(_, d)| d == '[') {
                let mut k = i + 1;
                while k < chars.len() && chars[k].1.is_ascii_digit() {
                    k += 1;
                }
                if k > i + 1 && chars.get(k).is_some_and(|&(_, d)| d == ']') {
                    i = k + 1;
                }
            }
            let text = &src[b..byte(i)];
            out.push(Token { tok: Tok::Ident(text.to_string()), line, col, start: b, end: byte(i) });
            continue;
        }
        if c == '$' {
            out.push(Token { tok: Tok::Punct("$"), line, col, start: b, end: b + 1 });
            i += 1;
            continue;
        }
        match PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                out.push(Token { tok: Tok::Punct(p), line, col, start: b, end: b + p.len() });
                i += p.chars().count();
            }
            None => return Err(Error::syntax(line, col, format!("unexpected character `{c}`"))),
        }
    }
    let end = src.len();
    out.push(Token { tok: Tok::Eof, line, col: end - line_start + 1, start: end, end });
    Ok(out)
}

/// Cursor over a token list.
pub struct Cursor {
    pub toks: Vec<Token>,
    pub pos: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self> {
        Ok(Cursor { toks: tokenize(src)?, pos: 0 })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub fn here(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    pub fn eat(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        let t = self.here();
        Err(Error::syntax(t.line, t.col, msg))
    }

    pub fn expect(&mut self, p: &str) -> Result<()> {
        if self.eat(p) {
            Ok(())
        } else {
            let found = describe(self.peek());
            self.error(format!("expected `{p}`, found {found}"))
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected a name, found {}", describe(&other))),
        }
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }
}

pub fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(s) => format!("number `{s}`"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Punct(p) => format!("`{p}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subscripts_and_operators() {
        let toks: Vec<Tok> = tokenize("t[1] <-> x_2 -> !(a)").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(toks[0], Tok::Ident("t[1]".into()));
        assert_eq!(toks[1], Tok::Punct("<->"));
        assert_eq!(toks[2], Tok::Ident("x_2".into()));
        assert_eq!(toks[3], Tok::Punct("->"));
        assert_eq!(toks[4], Tok::Punct("!"));
    }

    #[test]
    fn strings_keep_backslashes() {
        let toks = tokenize(r#"tex = "$P \rightarrow Q$"; 'a"b'"#).unwrap();
        assert_eq!(toks[2].tok, Tok::Str(r"$P \rightarrow Q$".into()));
        assert_eq!(toks[4].tok, Tok::Str("a\"b".into()));
    }

    #[test]
    fn positions_and_comments() {
        let toks = tokenize("// note\n  x /* c\n */ y").unwrap();
        assert_eq!((toks[0].line, toks[0].col), (2, 3));
        assert_eq!((toks[1].line, toks[1].col), (3, 5));
        assert!(matches!(tokenize("\"abc"), Err(Error::Syntax { line: 1, col: 1, .. })));
    }
}
