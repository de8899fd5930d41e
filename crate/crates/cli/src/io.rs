use std::fs;
use std::io::Write;
use std::path::Path;

use fsdim::sequences::{format_digits, parse_digits};
use fsdim::SymbolSequence;
use serde::Serialize;

use crate::{Failure, Outcome};

pub fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

pub fn failed(e: impl std::fmt::Display) -> Failure {
    Failure::Computation(e.to_string())
}

pub fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// Loads a digits file as a finite sequence.
pub fn read_digits(path: &Path) -> Outcome<SymbolSequence> {
    let file = parse_digits(&read_text(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    SymbolSequence::from_digits(file.base, file.digits).map_err(invalid)
}

/// Prefix length to analyse: the requested `n`, which must be available, or
/// everything available less `reserve` look-ahead digits.
pub fn prefix_length(x: &SymbolSequence, n: Option<usize>, reserve: usize) -> Outcome<usize> {
    let available = x.available(usize::MAX >> 1);
    let usable = available.saturating_sub(reserve);
    match n {
        Some(n) if n > usable => Err(invalid(format!(
            "n = {n} needs {} digits but the input has {available}",
            n + reserve
        ))),
        Some(0) => Err(invalid("n must be positive")),
        Some(n) => Ok(n),
        None if usable == 0 => Err(invalid(format!("input has only {available} digits"))),
        None => Ok(usable),
    }
}

fn write_to(path: Option<&Path>, text: &str) -> Outcome<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| failed(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(failed),
    }
}

pub fn write_digits(path: Option<&Path>, base: u32, digits: &[u8]) -> Outcome<()> {
    write_to(path, &format_digits(base, digits))
}

#[derive(Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a C,
    result: &'a R,
}

/// Writes `result` wrapped with the tool version and the invoking config.
pub fn write_report<C: Serialize, R: Serialize>(path: Option<&Path>, config: &C, result: &R) -> Outcome<()> {
    let envelope = Envelope { tool: "fsdim", version: env!("CARGO_PKG_VERSION"), config, result };
    let mut text = serde_json::to_string_pretty(&envelope).map_err(failed)?;
    text.push('\n');
    write_to(path, &text)
}
