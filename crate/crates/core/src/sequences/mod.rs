//! Digit sequences over `Σ_b = {0, .., b-1}`, the left shift, the evaluation
//! map `v_b`, and the sequence constructions (Champernowne, dilution,
//! alternating dilution, measure-driven Champernowne).
//!
//! A [`SymbolSequence`] is a cheap handle: clones and shifted views share one
//! growable cache filled on demand from a deterministic [`DigitSource`].

mod io;
mod mu_champernowne;
mod pattern;
mod sources;

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};

pub use io::{format_digits, parse_digits, DigitsFile};
pub use mu_champernowne::{MuChampernowneSchedule, StringOrder};
pub use pattern::{Cell, DilutionPattern, StageSchedule};

/// A deterministic producer of digits.
pub trait DigitSource: Send {
    /// Appends at least one digit to `out` (roughly `hint` of them), or returns
    /// `false` once the source has nothing more to give.
    fn extend(&mut self, out: &mut Vec<u8>, hint: usize) -> bool;
}

struct State {
    source: Box<dyn DigitSource>,
    cache: Vec<u8>,
    exhausted: bool,
}

struct Shared {
    base: u32,
    label: String,
    state: Mutex<State>,
}

/// A base-`b` digit stream `x = x_0 x_1 x_2 ...` viewed from some offset.
#[derive(Clone)]
pub struct SymbolSequence {
    shared: Arc<Shared>,
    offset: usize,
}

impl fmt::Debug for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolSequence")
            .field("base", &self.shared.base)
            .field("label", &self.shared.label)
            .field("offset", &self.offset)
            .finish()
    }
}

const MIN_CHUNK: usize = 4096;

impl SymbolSequence {
    /// Wraps an arbitrary source.
    pub fn from_source(base: u32, label: impl Into<String>, source: Box<dyn DigitSource>) -> Result<Self> {
        if !(2..=36).contains(&base) {
            return Err(Error::InvalidBase(base));
        }
        Ok(Self {
            shared: Arc::new(Shared {
                base,
                label: label.into(),
                state: Mutex::new(State { source, cache: Vec::new(), exhausted: false }),
            }),
            offset: 0,
        })
    }

    /// A finite sequence; reads past its end fail with [`Error::Exhausted`].
    pub fn from_digits(base: u32, digits: Vec<u8>) -> Result<Self> {
        check_digits(base, &digits)?;
        Self::from_source(base, "digits", Box::new(sources::Finite::new(digits)))
    }

    /// `prefix` followed by `period` repeated forever. An empty period means a
    /// zero tail.
    pub fn eventually_periodic(base: u32, prefix: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        check_digits(base, &prefix)?;
        check_digits(base, &period)?;
        let period = if period.is_empty() { vec![0] } else { period };
        Self::from_source(base, "periodic", Box::new(sources::Periodic::new(prefix, period)))
    }

    /// `period` repeated forever.
    pub fn periodic(base: u32, period: Vec<u8>) -> Result<Self> {
        Self::eventually_periodic(base, Vec::new(), period)
    }

    /// Concatenation of the base-`b` numerals of `1, 2, 3, ...`.
    pub fn champernowne(base: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        Self::from_source(base, format!("champernowne({base})"), Box::new(sources::Champernowne::new(base)))
    }

    /// Repeats `pattern` cyclically, filling wildcards with successive digits of `y`.
    pub fn diluted(y: &SymbolSequence, pattern: &DilutionPattern) -> Result<Self> {
        pattern.check_base(y.base())?;
        Self::from_source(
            y.base(),
            format!("diluted({}, {})", pattern, y.label()),
            Box::new(sources::Diluted::new(y.clone(), pattern.clone())),
        )
    }

    /// Stagewise alternation between two dilution patterns: stage `i`
    /// (1-based) uses `pat_odd` when `i` is odd and `pat_even` otherwise. The
    /// wildcard cursor into `y` continues across stages. Once the schedule is
    /// exhausted the pattern of the last stage continues forever.
    pub fn alternating(
        pat_odd: &DilutionPattern,
        pat_even: &DilutionPattern,
        y: &SymbolSequence,
        schedule: &StageSchedule,
    ) -> Result<Self> {
        pat_odd.check_base(y.base())?;
        pat_even.check_base(y.base())?;
        for p in [pat_odd, pat_even] {
            if !schedule.alignment().is_multiple_of(p.len()) {
                return Err(Error::InvalidSchedule(format!(
                    "alignment {} is not a multiple of pattern length {}",
                    schedule.alignment(),
                    p.len()
                )));
            }
        }
        Self::from_source(
            y.base(),
            format!("alternating({pat_odd}, {pat_even}, {})", y.label()),
            Box::new(sources::Alternating::new(pat_odd.clone(), pat_even.clone(), y.clone(), schedule.stage_ends())),
        )
    }

    /// The Champernowne sequence of a shift-invariant measure.
    pub fn mu_champernowne(
        mu: &crate::measures::AnalyticMeasure,
        schedule: &MuChampernowneSchedule,
    ) -> Result<Self> {
        let source = mu_champernowne::MuChampernowneSource::new(mu, schedule)?;
        Self::from_source(mu.base(), "mu-champernowne", Box::new(source))
    }

    pub fn base(&self) -> u32 {
        self.shared.base
    }

    pub fn label(&self) -> &str {
        &self.shared.label
    }

    /// Offset of this view into the underlying stream.
    pub fn offset(&self) -> usize {
        self.offset
    }

    /// `T^j x`: position `i` of the result is position `i + j` of `self`.
    pub fn shift(&self, j: usize) -> SymbolSequence {
        SymbolSequence { shared: Arc::clone(&self.shared), offset: self.offset + j }
    }

    /// Whether two handles share one underlying stream.
    pub fn shares_cache_with(&self, other: &SymbolSequence) -> bool {
        Arc::ptr_eq(&self.shared, &other.shared)
    }

    /// Digits `start .. start + len` of this view.
    pub fn digits(&self, start: usize, len: usize) -> Result<Vec<u8>> {
        let abs = self.offset + start;
        let end = abs + len;
        let mut state = self.shared.state.lock().unwrap_or_else(|e| e.into_inner());
        fill(&mut state, end, self.shared.base);
        if state.cache.len() < end {
            return Err(Error::Exhausted {
                needed: end - self.offset,
                available: state.cache.len().saturating_sub(self.offset),
            });
        }
        Ok(state.cache[abs..end].to_vec())
    }

    /// The first `n` digits of this view.
    pub fn prefix(&self, n: usize) -> Result<Vec<u8>> {
        self.digits(0, n)
    }

    pub fn digit(&self, i: usize) -> Result<u8> {
        Ok(self.digits(i, 1)?[0])
    }

    /// Number of digits this view can still produce, up to `limit`.
    pub fn available(&self, limit: usize) -> usize {
        let end = self.offset + limit;
        let mut state = self.shared.state.lock().unwrap_or_else(|e| e.into_inner());
        fill(&mut state, end, self.shared.base);
        state.cache.len().min(end).saturating_sub(self.offset)
    }
}

fn fill(state: &mut State, end: usize, base: u32) {
    while state.cache.len() < end && !state.exhausted {
        let before = state.cache.len();
        let hint = (end - before).max(MIN_CHUNK);
        let State { source, cache, exhausted } = state;
        if !source.extend(cache, hint) {
            *exhausted = true;
        }
        debug_assert!(cache[before..].iter().all(|&d| (d as u32) < base));
    }
}

fn check_digits(base: u32, digits: &[u8]) -> Result<()> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    match digits.iter().position(|&d| d as u32 >= base) {
        Some(position) => Err(Error::InvalidDigit { digit: digits[position] as u32, position, base }),
        None => Ok(()),
    }
}

/// Truncated value of a shifted sequence together with its truncation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// `|v_b(T^offset x) - value| <= error_bound`
    pub error_bound: f64,
}

/// `Σ_{i<depth} x_{offset+i} b^{-(i+1)}`, with the guarantee that the full
/// value `v_b(T^offset x)` lies within `b^{-depth}` of it.
pub fn evaluate_prefix(x: &SymbolSequence, offset: usize, depth: usize) -> Result<Evaluation> {
    if depth == 0 {
        return Err(Error::InvalidParameter("evaluation depth must be at least 1".into()));
    }
    let digits = x.digits(offset, depth)?;
    let b = x.base() as f64;
    // Horner from the deepest digit keeps the small terms from being swamped.
    let value = digits.iter().rev().fold(0.0, |acc, &d| (acc + d as f64) / b);
    Ok(Evaluation { value, error_bound: b.powi(-(depth.min(i32::MAX as usize) as i32)) })
}

/// `T^j x`.
pub fn shift_view(x: &SymbolSequence, j: usize) -> SymbolSequence {
    x.shift(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_prefix_examples() {
        let x = SymbolSequence::eventually_periodic(2, vec![1], vec![0]).unwrap();
        let e = evaluate_prefix(&x, 0, 4).unwrap();
        assert_eq!(e.value, 0.5);
        assert_eq!(e.error_bound, 1.0 / 16.0);

        let zero = SymbolSequence::periodic(2, vec![0]).unwrap();
        assert_eq!(evaluate_prefix(&zero, 17, 9).unwrap().value, 0.0);

        let y = SymbolSequence::eventually_periodic(2, vec![0, 1, 1], vec![0]).unwrap();
        assert_eq!(evaluate_prefix(&y, 0, 3).unwrap().value, 0.375);
    }

    #[test]
    fn evaluate_prefix_reports_truncation() {
        let x = SymbolSequence::from_digits(2, vec![1, 0, 1]).unwrap();
        assert_eq!(
            evaluate_prefix(&x, 1, 4),
            Err(Error::Exhausted { needed: 5, available: 3 })
        );
    }

    #[test]
    fn shift_view_composes_and_shares_cache() {
        let x = SymbolSequence::periodic(2, vec![0, 1]).unwrap();
        assert_eq!(shift_view(&x, 0).prefix(6).unwrap(), x.prefix(6).unwrap());
        assert_eq!(shift_view(&x, 1).prefix(3).unwrap(), vec![1, 0, 1]);
        let c = SymbolSequence::champernowne(3).unwrap();
        let a = shift_view(&shift_view(&c, 2), 3);
        let b = shift_view(&c, 5);
        assert_eq!(a.prefix(100).unwrap(), b.prefix(100).unwrap());
        assert!(a.shares_cache_with(&c));
    }

    #[test]
    fn rejects_bad_digits() {
        assert!(matches!(
            SymbolSequence::from_digits(2, vec![0, 2]),
            Err(Error::InvalidDigit { digit: 2, position: 1, base: 2 })
        ));
        assert!(matches!(SymbolSequence::champernowne(1), Err(Error::InvalidBase(1))));
    }

    #[test]
    fn champernowne_prefixes() {
        let c2 = SymbolSequence::champernowne(2).unwrap();
        let s: String = c2.prefix(11).unwrap().iter().map(|d| char::from(b'0' + d)).collect();
        assert_eq!(s, "11011100101");
        let c10 = SymbolSequence::champernowne(10).unwrap();
        let s: String = c10.prefix(15).unwrap().iter().map(|d| char::from(b'0' + d)).collect();
        assert_eq!(s, "123456789101112");
    }

    #[test]
    fn generators_replay_identically() {
        let a = SymbolSequence::champernowne(2).unwrap();
        let b = SymbolSequence::champernowne(2).unwrap();
        assert_eq!(a.digits(5000, 300).unwrap(), b.digits(5000, 300).unwrap());
        // a second read of the same range comes from the cache
        assert_eq!(a.digits(5000, 300).unwrap(), b.digits(5000, 300).unwrap());
    }

    #[test]
    fn concurrent_readers_agree() {
        let c = SymbolSequence::champernowne(2).unwrap();
        let expected = SymbolSequence::champernowne(2).unwrap().prefix(50_000).unwrap();
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|t| {
                    let c = c.clone();
                    s.spawn(move || c.digits(t * 10_000, 10_000).unwrap())
                })
                .collect();
            for (t, h) in handles.into_iter().enumerate() {
                assert_eq!(h.join().unwrap(), expected[t * 10_000..(t + 1) * 10_000]);
            }
        });
    }
}
