//! Shell and batch driver over the `parapoly` engine.

pub mod session;

use std::io::{BufRead, Write};

pub use session::{Outcome, Session};

/// Runs a script, writing the transcript to `out`. Stops at the first
/// failing line and reports it as `line N: message`.
pub fn run_script(session: &mut Session, script: &str, out: &mut dyn Write) -> Result<(), String> {
    for (k, line) in script.lines().enumerate() {
        match session.execute_line(line) {
            Ok(Outcome::Continue(text)) => {
                if !text.is_empty() {
                    writeln!(out, "{text}").map_err(|e| e.to_string())?;
                }
            }
            Ok(Outcome::Quit) => break,
            Err(e) => return Err(format!("line {}: {e}", k + 1)),
        }
    }
    Ok(())
}

/// Interactive loop. Errors are reported and the session continues.
pub fn repl(session: &mut Session, input: &mut dyn BufRead, out: &mut dyn Write, prompt: Option<&str>) -> std::io::Result<()> {
    let mut line = String::new();
    loop {
        if let Some(p) = prompt {
            write!(out, "{p}")?;
            out.flush()?;
        }
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Ok(());
        }
        match session.execute_line(&line) {
            Ok(Outcome::Continue(text)) if !text.is_empty() => writeln!(out, "{text}")?,
            Ok(Outcome::Continue(_)) => {}
            Ok(Outcome::Quit) => return Ok(()),
            Err(e) => writeln!(out, "error: {e}")?,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_errors_name_their_line() {
        let mut s = Session::new();
        let mut out = Vec::new();
        let err = run_script(&mut s, "help\n\nbogus\n", &mut out).unwrap_err();
        assert!(err.starts_with("line 3: "), "{err}");
        assert!(String::from_utf8(out).unwrap().contains("load PATH"));
    }

    #[test]
    fn quit_stops_a_script() {
        let mut s = Session::new();
        let mut out = Vec::new();
        run_script(&mut s, "quit\nbogus\n", &mut out).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn repl_survives_errors() {
        let mut s = Session::new();
        let mut out = Vec::new();
        repl(&mut s, &mut "bogus\nset cap 5\n".as_bytes(), &mut out, Some("> ")).unwrap();
        assert_eq!(s.cap, 5);
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("> error: "), "{text}");
    }
}
