use std::fmt;

use crate::error::{Error, Result};

/// One position of a dilution pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Fixed(u8),
    Wildcard,
}

/// A cyclic template of fixed digits and wildcards, e.g. `0*` or `0**0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DilutionPattern {
    cells: Vec<Cell>,
}

impl DilutionPattern {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidPattern("pattern must have at least one cell".into()));
        }
        Ok(Self { cells })
    }

    /// Parses `*`, `⋆` or `?` as wildcards and `0-9`, `a-z` as fixed digits.
    /// Whitespace is ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let mut cells = Vec::new();
        for ch in s.chars().filter(|c| !c.is_whitespace()) {
            let cell = match ch {
                '*' | '⋆' | '?' => Cell::Wildcard,
                c => match c.to_digit(36) {
                    Some(d) => Cell::Fixed(d as u8),
                    None => return Err(Error::InvalidPattern(format!("unexpected character {c:?}"))),
                },
            };
            cells.push(cell);
        }
        Self::new(cells)
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn wildcards(&self) -> usize {
        self.cells.iter().filter(|c| matches!(c, Cell::Wildcard)).count()
    }

    /// A pattern without wildcards produces a periodic sequence.
    pub fn is_eventually_periodic(&self) -> bool {
        self.wildcards() == 0
    }

    /// Dimension of the diluted sequence when the wildcard stream is normal.
    pub fn dimension(&self) -> f64 {
        self.wildcards() as f64 / self.len() as f64
    }

    pub(crate) fn check_base(&self, base: u32) -> Result<()> {
        for c in &self.cells {
            if let Cell::Fixed(d) = c {
                if *d as u32 >= base {
                    return Err(Error::InvalidPattern(format!("fixed digit {d} is not below base {base}")));
                }
            }
        }
        Ok(())
    }

    /// Limiting sliding frequency of `block` in the diluted sequence when the
    /// wildcard digits are i.i.d. uniform over `Σ_base`.
    pub fn expected_frequency(&self, block: &[u8], base: u32) -> f64 {
        let len = self.len();
        let total: f64 = (0..len)
            .map(|phase| {
                block
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| match self.cells[(phase + i) % len] {
                        Cell::Fixed(f) if f == d => 1.0,
                        Cell::Fixed(_) => 0.0,
                        Cell::Wildcard => 1.0 / base as f64,
                    })
                    .product::<f64>()
            })
            .sum();
        total / len as f64
    }

    /// Two equal-length binary patterns of dimension `p/q` whose sliding
    /// frequencies of `01` differ, for alternation.
    ///
    /// For `2p < q` these are `(0*)^p 0^(q-2p)` and `0^(q-p) *^p`; for
    /// `2p > q` they are `(0*)^(q-p) *^(2p-q)` and `0^(q-p) *^p`. `p` and `q`
    /// are doubled first unless both are even. `p/q = 1/2` gives `0*0*` and `0**0`.
    pub fn rational_pair(p: u32, q: u32) -> Result<(Self, Self)> {
        if p == 0 || p >= q {
            return Err(Error::InvalidPattern(format!("need 0 < p/q < 1, got {p}/{q}")));
        }
        if 2 * p == q {
            return Ok((Self::parse("0*0*")?, Self::parse("0**0")?));
        }
        let (p, q) = if p.is_multiple_of(2) && q.is_multiple_of(2) { (p, q) } else { (2 * p, 2 * q) };
        let (p, q) = (p as usize, q as usize);
        let zero = Cell::Fixed(0);
        let star = Cell::Wildcard;
        let mut first = Vec::with_capacity(q);
        if 2 * p < q {
            for _ in 0..p {
                first.extend([zero, star]);
            }
            first.extend(std::iter::repeat_n(zero, q - 2 * p));
        } else {
            for _ in 0..q - p {
                first.extend([zero, star]);
            }
            first.extend(std::iter::repeat_n(star, 2 * p - q));
        }
        let mut second = vec![zero; q - p];
        second.extend(std::iter::repeat_n(star, p));
        Ok((Self::new(first)?, Self::new(second)?))
    }
}

impl fmt::Display for DilutionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cells {
            match c {
                Cell::Fixed(d) => write!(f, "{}", char::from_digit(*d as u32, 36).unwrap_or('#'))?,
                Cell::Wildcard => f.write_str("*")?,
            }
        }
        Ok(())
    }
}

/// Stage lengths for the alternating construction. Stage ends are rounded
/// up to multiples of `alignment`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageSchedule {
    stage_lengths: Vec<usize>,
    alignment: usize,
}

impl StageSchedule {
    pub fn new(stage_lengths: Vec<usize>, alignment: usize) -> Result<Self> {
        if stage_lengths.is_empty() {
            return Err(Error::InvalidSchedule("no stages".into()));
        }
        if stage_lengths.contains(&0) {
            return Err(Error::InvalidSchedule("stage lengths must be positive".into()));
        }
        if alignment == 0 {
            return Err(Error::InvalidSchedule("alignment must be at least 1".into()));
        }
        Ok(Self { stage_lengths, alignment })
    }

    /// `N_i = first * ratio^(i-1)` for `i = 1..=stages`, aligned to `2^(stages+1)`
    /// so that every stage `i` ends on a multiple of `2^(i+1)`.
    pub fn geometric(first: usize, ratio: usize, stages: usize) -> Result<Self> {
        if stages == 0 || stages > 40 {
            return Err(Error::InvalidSchedule(format!("stage count {stages} out of range 1..=40")));
        }
        let mut lengths = Vec::with_capacity(stages);
        let mut len = first;
        for _ in 0..stages {
            lengths.push(len);
            len = len
                .checked_mul(ratio)
                .ok_or_else(|| Error::InvalidSchedule("stage length overflow".into()))?;
        }
        Self::new(lengths, 1usize << (stages + 1))
    }

    /// Replaces the alignment.
    pub fn with_alignment(mut self, alignment: usize) -> Result<Self> {
        if alignment == 0 {
            return Err(Error::InvalidSchedule("alignment must be at least 1".into()));
        }
        self.alignment = alignment;
        Ok(self)
    }

    /// Fails unless stage lengths never decrease.
    pub fn require_nondecreasing(self) -> Result<Self> {
        if self.stage_lengths.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidSchedule("stage lengths must be nondecreasing".into()));
        }
        Ok(self)
    }

    pub fn stage_lengths(&self) -> &[usize] {
        &self.stage_lengths
    }

    pub fn alignment(&self) -> usize {
        self.alignment
    }

    /// Cumulative stage end positions (exclusive), each a multiple of the alignment.
    pub fn stage_ends(&self) -> Vec<usize> {
        let mut end = 0usize;
        self.stage_lengths
            .iter()
            .map(|&n| {
                end = (end + n).div_ceil(self.alignment) * self.alignment;
                end
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p = DilutionPattern::parse("0⋆⋆0").unwrap();
        assert_eq!(p.cells(), &[Cell::Fixed(0), Cell::Wildcard, Cell::Wildcard, Cell::Fixed(0)]);
        assert_eq!(p.to_string(), "0**0");
        assert!(DilutionPattern::parse("").is_err());
        assert!(DilutionPattern::parse("0-").is_err());
        assert!(DilutionPattern::parse("0").unwrap().is_eventually_periodic());
    }

    #[test]
    fn expected_01_frequencies() {
        let a = DilutionPattern::parse("0*").unwrap();
        let b = DilutionPattern::parse("0**0").unwrap();
        assert_eq!(a.expected_frequency(&[0, 1], 2), 0.25);
        assert_eq!(b.expected_frequency(&[0, 1], 2), 3.0 / 16.0);
    }

    #[test]
    fn rational_pairs_oscillate_between_stated_frequencies() {
        // p/q < 1/2: p/2q and (p+1)/4q after making p, q even
        let (x, y) = DilutionPattern::rational_pair(2, 6).unwrap();
        assert_eq!(x.to_string(), "0*0*00");
        assert_eq!(y.to_string(), "0000**");
        assert!((x.expected_frequency(&[0, 1], 2) - 2.0 / 12.0).abs() < 1e-15);
        assert!((y.expected_frequency(&[0, 1], 2) - 3.0 / 24.0).abs() < 1e-15);
        // p/q > 1/2: 1/4 and (p+1)/4q
        let (x, y) = DilutionPattern::rational_pair(3, 4).unwrap();
        assert_eq!((x.len(), x.wildcards()), (8, 6));
        assert!((x.expected_frequency(&[0, 1], 2) - 0.25).abs() < 1e-15);
        assert!((y.expected_frequency(&[0, 1], 2) - 7.0 / 32.0).abs() < 1e-15);
        for (p, q) in [(1, 3), (2, 5), (3, 5), (5, 7), (1, 10)] {
            let (x, y) = DilutionPattern::rational_pair(p, q).unwrap();
            assert_eq!(x.len(), y.len());
            assert!((x.dimension() - p as f64 / q as f64).abs() < 1e-15);
            assert!((y.dimension() - p as f64 / q as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn geometric_stage_ends_are_aligned() {
        let s = StageSchedule::geometric(100, 4, 5).unwrap();
        assert_eq!(s.alignment(), 64);
        let ends = s.stage_ends();
        assert_eq!(ends.len(), 5);
        for (i, e) in ends.iter().enumerate() {
            assert_eq!(e % 64, 0);
            assert_eq!(e % (1 << (i + 2)), 0);
        }
        assert!(StageSchedule::new(vec![3, 2], 1).unwrap().require_nondecreasing().is_err());
        assert!(StageSchedule::new(vec![3, 0], 1).is_err());
        assert!(StageSchedule::new(vec![3], 0).is_err());
    }
}
