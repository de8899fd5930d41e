use crate::error::{Error, Result};

/// A finite digit string read from text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitsFile {
    pub base: u32,
    pub digits: Vec<u8>,
}

/// Parses an optional `#base:<b>` header line followed by digits `0-9a-z`.
/// Whitespace is ignored and the base defaults to 2.
pub fn parse_digits(text: &str) -> Result<DigitsFile> {
    let mut base = 2u32;
    let mut body = text;
    let trimmed = text.trim_start();
    if let Some(rest) = trimmed.strip_prefix('#') {
        let (line, tail) = rest.split_once('\n').unwrap_or((rest, ""));
        let value = line
            .trim()
            .strip_prefix("base:")
            .ok_or_else(|| Error::Parse(format!("unrecognized header {:?}", line.trim())))?;
        base = value.trim().parse().map_err(|_| Error::Parse(format!("bad base {:?}", value.trim())))?;
        if !(2..=36).contains(&base) {
            return Err(Error::InvalidBase(base));
        }
        body = tail;
    }
    let mut digits = Vec::with_capacity(body.len());
    for ch in body.chars().filter(|c| !c.is_whitespace()) {
        let d = ch
            .to_digit(36)
            .ok_or_else(|| Error::Parse(format!("unexpected character {ch:?} at digit {}", digits.len())))?;
        if d >= base {
            return Err(Error::InvalidDigit { digit: d, position: digits.len(), base });
        }
        digits.push(d as u8);
    }
    Ok(DigitsFile { base, digits })
}

/// Inverse of [`parse_digits`]: a header line and 80 digits per line.
pub fn format_digits(base: u32, digits: &[u8]) -> String {
    let mut s = format!("#base:{base}\n");
    for line in digits.chunks(80) {
        s.extend(line.iter().map(|&d| char::from_digit(d as u32, 36).unwrap_or('?')));
        s.push('\n');
    }
    s
}
