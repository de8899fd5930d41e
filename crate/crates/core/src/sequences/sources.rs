use super::pattern::{Cell, DilutionPattern};
use super::{DigitSource, SymbolSequence};

pub(super) struct Finite {
    digits: Option<Vec<u8>>,
}

impl Finite {
    pub(super) fn new(digits: Vec<u8>) -> Self {
        Self { digits: Some(digits) }
    }
}

impl DigitSource for Finite {
    fn extend(&mut self, out: &mut Vec<u8>, _hint: usize) -> bool {
        match self.digits.take() {
            Some(d) if !d.is_empty() => {
                out.extend_from_slice(&d);
                true
            }
            _ => false,
        }
    }
}

pub(super) struct Periodic {
    prefix: Option<Vec<u8>>,
    period: Vec<u8>,
}

impl Periodic {
    pub(super) fn new(prefix: Vec<u8>, period: Vec<u8>) -> Self {
        debug_assert!(!period.is_empty());
        Self { prefix: Some(prefix), period }
    }
}

impl DigitSource for Periodic {
    fn extend(&mut self, out: &mut Vec<u8>, hint: usize) -> bool {
        if let Some(p) = self.prefix.take() {
            out.extend_from_slice(&p);
        }
        let reps = hint.div_ceil(self.period.len()).max(1);
        for _ in 0..reps {
            out.extend_from_slice(&self.period);
        }
        true
    }
}

pub(super) struct Champernowne {
    base: u64,
    next: u64,
    scratch: Vec<u8>,
}

impl Champernowne {
    pub(super) fn new(base: u32) -> Self {
        Self { base: base as u64, next: 1, scratch: Vec::with_capacity(64) }
    }
}

impl DigitSource for Champernowne {
    fn extend(&mut self, out: &mut Vec<u8>, hint: usize) -> bool {
        let target = out.len() + hint;
        while out.len() < target {
            let mut k = self.next;
            self.scratch.clear();
            while k > 0 {
                self.scratch.push((k % self.base) as u8);
                k /= self.base;
            }
            out.extend(self.scratch.iter().rev());
            self.next += 1;
        }
        true
    }
}

/// Pulls digits of `y` in chunks.
struct Cursor {
    y: SymbolSequence,
    buf: Vec<u8>,
    pos: usize,
    consumed: usize,
    done: bool,
}

impl Cursor {
    fn new(y: SymbolSequence) -> Self {
        Self { y, buf: Vec::new(), pos: 0, consumed: 0, done: false }
    }

    fn next(&mut self) -> Option<u8> {
        if self.pos == self.buf.len() {
            if self.done {
                return None;
            }
            let want = 1 << 16;
            let avail = self.y.available(self.consumed + want).saturating_sub(self.consumed);
            if avail == 0 {
                self.done = true;
                return None;
            }
            self.buf = self.y.digits(self.consumed, avail).ok()?;
            self.consumed += avail;
            self.pos = 0;
            if avail < want {
                self.done = true;
            }
        }
        let d = self.buf[self.pos];
        self.pos += 1;
        Some(d)
    }
}

/// Emits cells of a pattern, drawing wildcards from the cursor. Returns
/// `false` if the cursor ran dry before `count` cells were produced.
fn emit(cells: &[Cell], start_phase: usize, count: usize, cursor: &mut Cursor, out: &mut Vec<u8>) -> bool {
    let len = cells.len();
    for i in 0..count {
        match cells[(start_phase + i) % len] {
            Cell::Fixed(d) => out.push(d),
            Cell::Wildcard => match cursor.next() {
                Some(d) => out.push(d),
                None => return false,
            },
        }
    }
    true
}

pub(super) struct Diluted {
    pattern: DilutionPattern,
    cursor: Cursor,
    phase: usize,
}

impl Diluted {
    pub(super) fn new(y: SymbolSequence, pattern: DilutionPattern) -> Self {
        Self { pattern, cursor: Cursor::new(y), phase: 0 }
    }
}

impl DigitSource for Diluted {
    fn extend(&mut self, out: &mut Vec<u8>, hint: usize) -> bool {
        let before = out.len();
        let ok = emit(self.pattern.cells(), self.phase, hint, &mut self.cursor, out);
        self.phase = (self.phase + (out.len() - before)) % self.pattern.len();
        ok || out.len() > before
    }
}

pub(super) struct Alternating {
    patterns: [DilutionPattern; 2],
    cursor: Cursor,
    stage_ends: Vec<usize>,
    position: usize,
    ended: bool,
}

impl Alternating {
    pub(super) fn new(odd: DilutionPattern, even: DilutionPattern, y: SymbolSequence, stage_ends: Vec<usize>) -> Self {
        Self { patterns: [odd, even], cursor: Cursor::new(y), stage_ends, position: 0, ended: false }
    }

    /// 0-based stage index at `position` and the end of that stage, if bounded.
    fn stage_at(&self, position: usize) -> (usize, Option<usize>) {
        let idx = self.stage_ends.partition_point(|&e| e <= position);
        if idx < self.stage_ends.len() {
            (idx, Some(self.stage_ends[idx]))
        } else {
            (self.stage_ends.len().saturating_sub(1), None)
        }
    }
}

impl DigitSource for Alternating {
    fn extend(&mut self, out: &mut Vec<u8>, hint: usize) -> bool {
        if self.ended {
            return false;
        }
        let before = out.len();
        let mut remaining = hint;
        while remaining > 0 {
            let (stage, end) = self.stage_at(self.position);
            let count = end.map_or(remaining, |e| (e - self.position).min(remaining));
            // Stage ends are multiples of the pattern lengths, so each stage
            // starts at phase 0 of its pattern.
            let stage_start = if stage == 0 { 0 } else { self.stage_ends[stage - 1] };
            let pattern = &self.patterns[stage % 2];
            let phase = (self.position - stage_start) % pattern.len();
            let len_before = out.len();
            let ok = emit(pattern.cells(), phase, count, &mut self.cursor, out);
            let produced = out.len() - len_before;
            self.position += produced;
            remaining -= produced;
            if !ok {
                self.ended = true;
                break;
            }
        }
        out.len() > before
    }
}

#[cfg(test)]
mod tests {
    use super::super::StageSchedule;
    use super::*;

    fn collect(mut s: impl DigitSource, n: usize) -> Vec<u8> {
        let mut out = Vec::new();
        while out.len() < n {
            if !s.extend(&mut out, 7) {
                break;
            }
        }
        out.truncate(n);
        out
    }

    #[test]
    fn dilution_places_y_in_wildcards() {
        let y = SymbolSequence::from_digits(2, vec![1, 1, 0, 1]).unwrap();
        let p = DilutionPattern::parse("0**0").unwrap();
        let out = collect(Diluted::new(y, p), 100);
        // fixed cells before the first missing wildcard are still emitted
        assert_eq!(out, vec![0, 1, 1, 0, 0, 0, 1, 0, 0]);
    }

    #[test]
    fn alternation_switches_patterns_at_stage_ends() {
        let y = SymbolSequence::periodic(2, vec![1]).unwrap();
        let odd = DilutionPattern::parse("0*0*").unwrap();
        let even = DilutionPattern::parse("0**0").unwrap();
        let s = StageSchedule::new(vec![4, 8], 4).unwrap();
        let out = collect(Alternating::new(odd, even, y, s.stage_ends()), 16);
        assert_eq!(out, vec![0, 1, 0, 1, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0]);
    }
}
