//! Sliding and disjoint block distributions, block entropies and finite-prefix
//! dimension estimates.
//!
//! Entropies use logarithms to the alphabet base, so every value lies in `[0, 1]`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{checked_pow, plogp, CompensatedSum};
use crate::sequences::SymbolSequence;

/// Tables up to this many cells are dense arrays.
pub const DENSE_LIMIT: u64 = 1 << 24;
/// Chunk length for parallel counting.
const CHUNK: usize = 1 << 18;
/// Parallel counting keeps one table per chunk, so it is limited to small tables.
const PARALLEL_TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sliding,
    Disjoint,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sliding => "sliding",
            Mode::Disjoint => "disjoint",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sliding" => Ok(Mode::Sliding),
            "disjoint" => Ok(Mode::Disjoint),
            other => Err(Error::Parse(format!("unknown mode {other:?} (expected sliding or disjoint)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Counts {
    Dense(Vec<u64>),
    Sparse(HashMap<u64, u64>),
}

impl Counts {
    fn new(cells: u64) -> Self {
        if cells <= DENSE_LIMIT {
            Counts::Dense(vec![0; cells as usize])
        } else {
            Counts::Sparse(HashMap::new())
        }
    }

    #[inline]
    fn add(&mut self, idx: u64, by: u64) {
        match self {
            Counts::Dense(v) => v[idx as usize] += by,
            Counts::Sparse(m) => *m.entry(idx).or_insert(0) += by,
        }
    }

    fn get(&self, idx: u64) -> u64 {
        match self {
            Counts::Dense(v) => v.get(idx as usize).copied().unwrap_or(0),
            Counts::Sparse(m) => m.get(&idx).copied().unwrap_or(0),
        }
    }

    fn merge(&mut self, other: Counts) {
        match (self, other) {
            (Counts::Dense(a), Counts::Dense(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
            (Counts::Sparse(a), Counts::Sparse(b)) => {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
            }
            _ => unreachable!("count tables of one block length share a representation"),
        }
    }

    fn nonzero(&self) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = match self {
            Counts::Dense(v) => v.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, &c)| (i as u64, c)).collect(),
            Counts::Sparse(m) => m.iter().filter(|(_, &c)| c > 0).map(|(&i, &c)| (i, c)).collect(),
        };
        out.sort_unstable();
        out
    }
}

/// Exact block counts of a prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDistribution {
    base: u32,
    block_length: usize,
    mode: Mode,
    window_length: usize,
    total: u64,
    counts: Counts,
}

impl BlockDistribution {
    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn block_length(&self) -> usize {
        self.block_length
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn window_length(&self) -> usize {
        self.window_length
    }

    /// `n - l + 1` when sliding, `⌊n/l⌋` when disjoint.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Occurrences of `w` (0 for words of the wrong length).
    pub fn count(&self, w: &[u8]) -> u64 {
        if w.len() != self.block_length || w.iter().any(|&d| d as u32 >= self.base) {
            return 0;
        }
        self.counts.get(crate::numeric::word_to_index(w, self.base))
    }

    /// `P(x, w)` or `P^d(x, w)`.
    pub fn probability(&self, w: &[u8]) -> f64 {
        self.count(w) as f64 / self.total as f64
    }

    /// Blocks with positive count as `(index, count)`, in index order.
    pub fn nonzero(&self) -> Vec<(u64, u64)> {
        self.counts.nonzero()
    }

    pub fn counts_by_index(&self) -> Option<&[u64]> {
        match &self.counts {
            Counts::Dense(v) => Some(v),
            Counts::Sparse(_) => None,
        }
    }
}

fn table_cells(base: u32, l: usize) -> Result<u64> {
    checked_pow(base, l).ok_or(Error::BlockTooLong { base, block: l })
}

fn check_window(n: usize, l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidParameter("block length must be at least 1".into()));
    }
    if n < l {
        return Err(Error::WindowTooShort { window: n, block: l });
    }
    Ok(())
}

fn count_range(digits: &[u8], base: u32, l: usize, cells: u64, positions: std::ops::Range<usize>) -> Counts {
    let mut counts = Counts::new(cells);
    if positions.is_empty() {
        return counts;
    }
    let b = base as u64;
    let mut idx = 0u64;
    for &d in &digits[positions.start..positions.start + l - 1] {
        idx = idx * b + d as u64;
    }
    for j in positions {
        // (idx mod b^(l-1)) * b + new digit
        idx = (idx % (cells / b)) * b + digits[j + l - 1] as u64;
        counts.add(idx, 1);
    }
    counts
}

/// Sliding counts of `l`-blocks starting at positions `0..=digits.len()-l`,
/// merged from chunks of `chunk` start positions (each chunk reads `l-1`
/// digits past its end). The result does not depend on `chunk`.
pub fn sliding_counts_chunked(digits: &[u8], base: u32, l: usize, chunk: usize) -> Result<Vec<u64>> {
    check_window(digits.len(), l)?;
    let cells = table_cells(base, l)?;
    if cells > DENSE_LIMIT {
        return Err(Error::BlockTooLong { base, block: l });
    }
    let starts = digits.len() - l + 1;
    let chunk = chunk.max(1);
    let merged = (0..starts.div_ceil(chunk))
        .into_par_iter()
        .map(|c| count_range(digits, base, l, cells, c * chunk..((c + 1) * chunk).min(starts)))
        .reduce(|| Counts::new(cells), |mut a, b| {
            a.merge(b);
            a
        });
    match merged {
        Counts::Dense(v) => Ok(v),
        Counts::Sparse(_) => unreachable!(),
    }
}

fn sliding_from_digits(digits: &[u8], base: u32, l: usize) -> Result<Counts> {
    check_window(digits.len(), l)?;
    let cells = table_cells(base, l)?;
    let starts = digits.len() - l + 1;
    if cells <= PARALLEL_TABLE_LIMIT && starts > CHUNK {
        Ok(Counts::Dense(sliding_counts_chunked(digits, base, l, CHUNK)?))
    } else {
        Ok(count_range(digits, base, l, cells, 0..starts))
    }
}

/// Counts of every `l`-block `x_i .. x_{i+l-1}` for `i ≤ n - l`.
pub fn sliding_distribution(x: &SymbolSequence, n: usize, l: usize) -> Result<BlockDistribution> {
    check_window(n, l)?;
    let digits = x.prefix(n)?;
    Ok(BlockDistribution {
        base: x.base(),
        block_length: l,
        mode: Mode::Sliding,
        window_length: n,
        total: (n - l + 1) as u64,
        counts: sliding_from_digits(&digits, x.base(), l)?,
    })
}

fn disjoint_from_digits(digits: &[u8], base: u32, l: usize) -> Result<Counts> {
    check_window(digits.len(), l)?;
    let mut counts = Counts::new(table_cells(base, l)?);
    for block in digits.chunks_exact(l) {
        counts.add(crate::numeric::word_to_index(block, base), 1);
    }
    Ok(counts)
}

/// Counts of the blocks `x_{li} .. x_{l(i+1)-1}` for `i < ⌊n/l⌋`.
pub fn disjoint_distribution(x: &SymbolSequence, n: usize, l: usize) -> Result<BlockDistribution> {
    check_window(n, l)?;
    let digits = x.prefix(n)?;
    Ok(BlockDistribution {
        base: x.base(),
        block_length: l,
        mode: Mode::Disjoint,
        window_length: n,
        total: (n / l) as u64,
        counts: disjoint_from_digits(&digits, x.base(), l)?,
    })
}

/// Either distribution.
pub fn distribution(x: &SymbolSequence, n: usize, l: usize, mode: Mode) -> Result<BlockDistribution> {
    match mode {
        Mode::Sliding => sliding_distribution(x, n, l),
        Mode::Disjoint => disjoint_distribution(x, n, l),
    }
}

/// Whether block `idx` of length `l` is constant.
fn is_constant(idx: u64, base: u32, l: usize) -> bool {
    let b = base as u64;
    // constant blocks are the multiples c * (b^l - 1)/(b - 1) with c < b
    let rep = (0..l).fold(0u64, |acc, _| acc.wrapping_mul(b).wrapping_add(1));
    rep != 0 && idx.is_multiple_of(rep) && idx / rep < b
}

/// `(-Σ' p ln p, -Σ'' p ln p)` over non-constant and constant blocks.
fn entropy_parts(d: &BlockDistribution) -> (f64, f64) {
    counts_entropy_parts(&d.counts, d.total, d.base, d.block_length)
}

fn counts_entropy_parts(counts: &Counts, total: u64, base: u32, l: usize) -> (f64, f64) {
    let total = total as f64;
    let mut kept = CompensatedSum::new();
    let mut excluded = CompensatedSum::new();
    for (idx, c) in counts.nonzero() {
        let term = plogp(c as f64 / total);
        if is_constant(idx, base, l) {
            excluded.add(term);
        } else {
            kept.add(term);
        }
    }
    (kept.value(), excluded.value())
}

/// `-(1/(l log b)) Σ_w P(w) log P(w)`.
pub fn normalized_entropy(d: &BlockDistribution) -> f64 {
    if d.total == 0 {
        return 0.0;
    }
    let (kept, excluded) = entropy_parts(d);
    (kept + excluded) / (d.block_length as f64 * (d.base as f64).ln())
}

/// The same sum restricted to non-constant blocks (`0^l` and `1^l` in base 2).
pub fn restricted_entropy(d: &BlockDistribution) -> f64 {
    if d.total == 0 {
        return 0.0;
    }
    let (kept, _) = entropy_parts(d);
    kept / (d.block_length as f64 * (d.base as f64).ln())
}

/// Entropy matrix and tail statistics over checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub mode: Mode,
    pub l_list: Vec<usize>,
    pub checkpoints: Vec<usize>,
    /// `matrix[i][j]` is the entropy for `l_list[i]` at `checkpoints[j]`.
    pub matrix: Vec<Vec<f64>>,
    pub burn_in_fraction: f64,
    pub tail_min: Vec<f64>,
    pub tail_max: Vec<f64>,
    pub dim_lo: f64,
    pub dim_hi: f64,
}

impl DimensionEstimate {
    /// Entropy at block length `l` and checkpoint `n`, if both were computed.
    pub fn value(&self, l: usize, n: usize) -> Option<f64> {
        let i = self.l_list.iter().position(|&x| x == l)?;
        let j = self.checkpoints.iter().position(|&x| x == n)?;
        Some(self.matrix[i][j])
    }
}

pub fn check_checkpoints(checkpoints: &[usize]) -> Result<()> {
    if checkpoints.is_empty() {
        return Err(Error::EmptyCheckpoints);
    }
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidCheckpoints("checkpoints must be strictly increasing".into()));
    }
    Ok(())
}

/// Entropies of one block length at every checkpoint, counted incrementally.
fn entropy_row(digits: &[u8], base: u32, l: usize, checkpoints: &[usize], mode: Mode) -> Result<Vec<f64>> {
    let cells = table_cells(base, l)?;
    let b = base as u64;
    let mut counts = Counts::new(cells);
    let mut total = 0u64;
    let mut row = Vec::with_capacity(checkpoints.len());
    let mut next_start = 0usize;
    let mut idx = 0u64;
    for &n in checkpoints {
        match mode {
            Mode::Sliding => {
                // windows starting at next_start..=n-l
                for j in next_start..=n - l {
                    if j == 0 {
                        idx = crate::numeric::word_to_index(&digits[..l], base);
                    } else {
                        idx = (idx % (cells / b)) * b + digits[j + l - 1] as u64;
                    }
                    counts.add(idx, 1);
                    total += 1;
                }
                next_start = n - l + 1;
            }
            Mode::Disjoint => {
                let blocks = n / l;
                for i in next_start..blocks {
                    counts.add(crate::numeric::word_to_index(&digits[i * l..(i + 1) * l], base), 1);
                    total += 1;
                }
                next_start = blocks;
            }
        }
        let (kept, excluded) = counts_entropy_parts(&counts, total, base, l);
        row.push((kept + excluded) / (l as f64 * (base as f64).ln()));
    }
    Ok(row)
}

/// Block entropies for each `l` at each checkpoint `n`, with the min and max
/// over checkpoints `n ≥ burn_in_fraction · max n` as finite stand-ins for
/// liminf and limsup.
pub fn dimension_profile(
    x: &SymbolSequence,
    l_list: &[usize],
    checkpoints: &[usize],
    mode: Mode,
    burn_in_fraction: f64,
) -> Result<DimensionEstimate> {
    check_checkpoints(checkpoints)?;
    if l_list.is_empty() {
        return Err(Error::InvalidParameter("block length list is empty".into()));
    }
    if !(0.0..=1.0).contains(&burn_in_fraction) {
        return Err(Error::InvalidParameter(format!("burn-in fraction {burn_in_fraction} outside [0, 1]")));
    }
    let max_l = *l_list.iter().max().unwrap();
    if l_list.contains(&0) {
        return Err(Error::InvalidParameter("block length must be at least 1".into()));
    }
    if max_l > checkpoints[0] {
        return Err(Error::WindowTooShort { window: checkpoints[0], block: max_l });
    }
    for &l in l_list {
        table_cells(x.base(), l)?;
    }
    let n_max = *checkpoints.last().unwrap();
    let digits = x.prefix(n_max)?;
    let matrix = l_list
        .par_iter()
        .map(|&l| entropy_row(&digits, x.base(), l, checkpoints, mode))
        .collect::<Result<Vec<_>>>()?;
    let threshold = burn_in_fraction * n_max as f64;
    let tail_cols: Vec<usize> = (0..checkpoints.len()).filter(|&j| checkpoints[j] as f64 >= threshold).collect();
    let tail_min: Vec<f64> = matrix.iter().map(|row| tail_cols.iter().map(|&j| row[j]).fold(f64::INFINITY, f64::min)).collect();
    let tail_max: Vec<f64> =
        matrix.iter().map(|row| tail_cols.iter().map(|&j| row[j]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let largest = l_list.iter().enumerate().max_by_key(|(_, &l)| l).map(|(i, _)| i).unwrap();
    Ok(DimensionEstimate {
        mode,
        l_list: l_list.to_vec(),
        checkpoints: checkpoints.to_vec(),
        dim_lo: tail_min[largest],
        dim_hi: tail_max[largest],
        matrix,
        burn_in_fraction,
        tail_min,
        tail_max,
    })
}

/// `P(x_0^{n-1}, w)` at each checkpoint `n`, counted in one pass.
pub fn block_frequency_series(x: &SymbolSequence, w: &[u8], checkpoints: &[usize]) -> Result<Vec<(usize, f64)>> {
    check_checkpoints(checkpoints)?;
    if w.is_empty() {
        return Err(Error::InvalidParameter("block must be nonempty".into()));
    }
    if checkpoints[0] < w.len() {
        return Err(Error::WindowTooShort { window: checkpoints[0], block: w.len() });
    }
    let n_max = *checkpoints.last().unwrap();
    let digits = x.prefix(n_max)?;
    let mut hits = 0u64;
    let mut start = 0usize;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &n in checkpoints {
        let last = n - w.len();
        for j in start..=last {
            if &digits[j..j + w.len()] == w {
                hits += 1;
            }
        }
        start = last + 1;
        out.push((n, hits as f64 / (last + 1) as f64));
    }
    Ok(out)
}

/// Powers of two from `2^start_exp` below `n_max`, followed by `n_max`.
pub fn geometric_checkpoints(start_exp: u32, n_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (start_exp..usize::BITS - 1).map(|e| 1usize << e).take_while(|&n| n < n_max).collect();
    out.push(n_max);
    out
}

/// `count` evenly spaced checkpoints ending at `n_max`.
pub fn linear_checkpoints(n_max: usize, count: usize) -> Vec<usize> {
    let count = count.clamp(1, n_max.max(1));
    let mut out: Vec<usize> = (1..=count).map(|i| n_max * i / count).filter(|&n| n > 0).collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> SymbolSequence {
        SymbolSequence::from_digits(2, s.bytes().map(|c| c - b'0').collect()).unwrap()
    }

    #[test]
    fn sliding_examples() {
        let d = sliding_distribution(&seq("0101"), 4, 2).unwrap();
        assert_eq!(d.total(), 3);
        assert_eq!(d.probability(&[0, 1]), 2.0 / 3.0);
        assert_eq!(d.probability(&[1, 0]), 1.0 / 3.0);
        assert_eq!(sliding_distribution(&seq("0000"), 4, 2).unwrap().probability(&[0, 0]), 1.0);
        let d = sliding_distribution(&seq("0011"), 4, 1).unwrap();
        assert_eq!((d.probability(&[0]), d.probability(&[1])), (0.5, 0.5));
        assert!(matches!(sliding_distribution(&seq("01"), 2, 3), Err(Error::WindowTooShort { .. })));
    }

    #[test]
    fn disjoint_examples() {
        assert_eq!(disjoint_distribution(&seq("010101"), 6, 2).unwrap().probability(&[0, 1]), 1.0);
        let d = disjoint_distribution(&seq("0110"), 4, 2).unwrap();
        assert_eq!((d.probability(&[0, 1]), d.probability(&[1, 0])), (0.5, 0.5));
        assert_eq!(disjoint_distribution(&seq("01101"), 5, 2).unwrap().total(), 2);
    }

    #[test]
    fn entropy_examples() {
        // uniform over all 2-blocks: the de Bruijn cycle 0011 read cyclically
        let d = sliding_distribution(&seq("00110"), 5, 2).unwrap();
        assert!((normalized_entropy(&d) - 1.0).abs() < 1e-15);
        assert!((restricted_entropy(&d) - 0.5).abs() < 1e-15);
        assert_eq!(normalized_entropy(&sliding_distribution(&seq("0000"), 4, 2).unwrap()), 0.0);
        assert_eq!(restricted_entropy(&sliding_distribution(&seq("0000"), 4, 2).unwrap()), 0.0);
        let d = disjoint_distribution(&seq("0110"), 4, 2).unwrap();
        assert!((normalized_entropy(&d) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constant_blocks() {
        for (base, l) in [(2u32, 1usize), (2, 8), (3, 4), (10, 3)] {
            let cells = checked_pow(base, l).unwrap();
            let constants: Vec<u64> = (0..cells).filter(|&i| is_constant(i, base, l)).collect();
            let expected: Vec<u64> =
                (0..base as u8).map(|c| crate::numeric::word_to_index(&vec![c; l], base)).collect();
            assert_eq!(constants, expected);
        }
    }

    #[test]
    fn chunked_counts_match_sequential() {
        let x = SymbolSequence::champernowne(3).unwrap();
        let digits = x.prefix(20_000).unwrap();
        let reference = sliding_counts_chunked(&digits, 3, 5, usize::MAX).unwrap();
        for chunk in [1, 7, 1000, 19_996] {
            assert_eq!(sliding_counts_chunked(&digits, 3, 5, chunk).unwrap(), reference);
        }
    }

    #[test]
    fn profile_matches_direct_computation() {
        let x = SymbolSequence::champernowne(2).unwrap();
        let cps = [1000, 4000, 9000];
        for mode in [Mode::Sliding, Mode::Disjoint] {
            let est = dimension_profile(&x, &[1, 3, 6], &cps, mode, 0.5).unwrap();
            for &l in &[1, 3, 6] {
                for &n in &cps {
                    let direct = normalized_entropy(&distribution(&x, n, l, mode).unwrap());
                    assert!((est.value(l, n).unwrap() - direct).abs() < 1e-14);
                }
            }
            assert_eq!(est.dim_lo, est.tail_min[2]);
        }
    }

    #[test]
    fn periodic_profile_vanishes() {
        let x = SymbolSequence::periodic(2, vec![0, 1, 1]).unwrap();
        let est = dimension_profile(&x, &[16, 48], &[4096, 8192], Mode::Sliding, 0.5).unwrap();
        assert!(est.dim_hi < 0.05);
    }

    #[test]
    fn profile_rejects_bad_inputs() {
        let x = SymbolSequence::champernowne(2).unwrap();
        assert_eq!(dimension_profile(&x, &[2], &[], Mode::Sliding, 0.5), Err(Error::EmptyCheckpoints));
        assert!(dimension_profile(&x, &[2], &[10, 5], Mode::Sliding, 0.5).is_err());
        assert!(dimension_profile(&x, &[20], &[10], Mode::Sliding, 0.5).is_err());
    }

    #[test]
    fn frequency_series_matches_distribution() {
        let x = SymbolSequence::champernowne(2).unwrap();
        let series = block_frequency_series(&x, &[0, 1], &[2, 100, 777]).unwrap();
        for (n, p) in series {
            assert_eq!(p, sliding_distribution(&x, n, 2).unwrap().probability(&[0, 1]));
        }
    }

    #[test]
    fn checkpoint_helpers() {
        assert_eq!(geometric_checkpoints(10, 5000), vec![1024, 2048, 4096, 5000]);
        assert_eq!(geometric_checkpoints(10, 4096), vec![1024, 2048, 4096]);
        assert_eq!(linear_checkpoints(100, 4), vec![25, 50, 75, 100]);
    }
}
