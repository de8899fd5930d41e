use crate::error::{Error, Result};
use crate::measures::AnalyticMeasure;
use crate::numeric::index_to_word;

use super::DigitSource;

const INVARIANCE_TOL: f64 = 1e-10;

/// Order in which the strings of one length are listed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum StringOrder {
    #[default]
    Lexicographic,
}

/// Stage parameters: stage `i` (depth `i`) emits `p_{i,M_i}` repeated `ℓ_i` times.
#[derive(Debug, Clone, PartialEq)]
pub struct MuChampernowneSchedule {
    pub repetition_factors: Vec<f64>,
    pub block_repeats: Vec<u64>,
    pub order: StringOrder,
}

/// `⌈v⌉`, except that values within rounding noise of an integer snap to it.
pub(crate) fn snapped_ceil(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() <= 1e-12 * v.abs().max(1.0) {
        r
    } else {
        v.ceil()
    }
}

impl MuChampernowneSchedule {
    pub fn new(repetition_factors: Vec<f64>, block_repeats: Vec<u64>) -> Result<Self> {
        if repetition_factors.is_empty() || repetition_factors.len() != block_repeats.len() {
            return Err(Error::InvalidSchedule(
                "need one repetition factor and one block repeat per stage".into(),
            ));
        }
        if let Some(m) = repetition_factors.iter().find(|m| !m.is_finite() || **m <= 0.0) {
            return Err(Error::InvalidSchedule(format!("repetition factor {m} must be positive")));
        }
        if block_repeats.contains(&0) {
            return Err(Error::InvalidSchedule("block repeats must be at least 1".into()));
        }
        Ok(Self { repetition_factors, block_repeats, order: StringOrder::Lexicographic })
    }

    /// `M_i = ⌈min{p,1-p}^(-2i)⌉` and `ℓ_i = i^(2i)` for a binary Bernoulli measure.
    pub fn bernoulli_growth(p: f64, stages: usize) -> Result<Self> {
        let q = p.min(1.0 - p);
        if q.is_nan() || q <= 0.0 {
            return Err(Error::InvalidSchedule(format!("p = {p} must lie strictly between 0 and 1")));
        }
        let mut factors = Vec::with_capacity(stages);
        let mut repeats = Vec::with_capacity(stages);
        for i in 1..=stages {
            factors.push(snapped_ceil(q.powi(-2 * i as i32)));
            let l = (i as u64)
                .checked_pow(2 * i as u32)
                .ok_or_else(|| Error::InvalidSchedule(format!("ℓ_{i} = {i}^{} overflows", 2 * i)))?;
            repeats.push(l);
        }
        Self::new(factors, repeats)
    }

    /// The smallest valid factors `M_i = ⌈1/min_w μ(C_w)⌉` with `ℓ_i = 1`,
    /// adding stages while they fit in `budget` digits. The last stage that
    /// fits is repeated until the budget is covered.
    pub fn desk(mu: &AnalyticMeasure, budget: usize) -> Result<Self> {
        let mut factors = Vec::new();
        let mut lengths: Vec<u64> = Vec::new();
        let mut total = 0u64;
        for depth in 1.. {
            let Ok(level) = mu.level(depth) else { break };
            let min = level.iter().copied().filter(|&m| m > 0.0).fold(f64::INFINITY, f64::min);
            let m = snapped_ceil(1.0 / min);
            let len = stage_block_length(&level, m, depth)?;
            if total + len > budget as u64 && !factors.is_empty() {
                break;
            }
            factors.push(m);
            lengths.push(len);
            total += len;
            if total >= budget as u64 {
                break;
            }
        }
        let mut repeats = vec![1u64; factors.len()];
        if let (Some(last), Some(&len)) = (repeats.last_mut(), lengths.last()) {
            let before = total - len;
            *last = (budget as u64).saturating_sub(before).div_ceil(len).max(1);
        }
        Self::new(factors, repeats)
    }

    pub fn stages(&self) -> usize {
        self.repetition_factors.len()
    }
}

fn repeat_count(m: f64, mass: f64) -> Result<u64> {
    let c = snapped_ceil(m * mass);
    if !c.is_finite() || c >= u64::MAX as f64 {
        return Err(Error::RepeatOverflow { factor: m, mass });
    }
    Ok(c as u64)
}

/// Length in digits of one copy of `p_{depth, m}`.
fn stage_block_length(level: &[f64], m: f64, depth: usize) -> Result<u64> {
    let mut total = 0u64;
    for &mass in level.iter().filter(|&&p| p > 0.0) {
        total = repeat_count(m, mass)?
            .checked_mul(depth as u64)
            .and_then(|d| total.checked_add(d))
            .ok_or(Error::RepeatOverflow { factor: m, mass })?;
    }
    Ok(total)
}

struct Stage {
    depth: usize,
    /// Positive-mass words with their repeat counts.
    words: Vec<(Vec<u8>, u64)>,
    block_repeats: u64,
}

pub(super) struct MuChampernowneSource {
    stages: Vec<Stage>,
    stage: usize,
    rep: u64,
    word: usize,
    copy: u64,
}

impl MuChampernowneSource {
    pub(super) fn new(mu: &AnalyticMeasure, schedule: &MuChampernowneSchedule) -> Result<Self> {
        let depth = schedule.stages();
        mu.check_shift_invariance(depth, INVARIANCE_TOL)?;
        let mut stages = Vec::with_capacity(depth);
        for (i, (&m, &l)) in schedule.repetition_factors.iter().zip(&schedule.block_repeats).enumerate() {
            let d = i + 1;
            let level = mu.level(d)?;
            let min = level.iter().copied().filter(|&p| p > 0.0).fold(f64::INFINITY, f64::min);
            if m * min < 1.0 - 1e-12 {
                return Err(Error::InvalidSchedule(format!(
                    "M_{d} = {m} is below 1/min μ(C_w) = {}",
                    1.0 / min
                )));
            }
            stage_block_length(&level, m, d)?;
            let words = level
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(idx, &p)| Ok((index_to_word(idx as u64, mu.base(), d), repeat_count(m, p)?)))
                .collect::<Result<Vec<_>>>()?;
            stages.push(Stage { depth: d, words, block_repeats: l });
        }
        Ok(Self { stages, stage: 0, rep: 0, word: 0, copy: 0 })
    }
}

impl DigitSource for MuChampernowneSource {
    fn extend(&mut self, out: &mut Vec<u8>, hint: usize) -> bool {
        let target = out.len() + hint;
        while out.len() < target {
            let stage = &self.stages[self.stage];
            let (word, count) = &stage.words[self.word];
            // emit as many copies of the current word as the hint asks for
            let copies = (count - self.copy).min(((target - out.len()).div_ceil(stage.depth)) as u64);
            for _ in 0..copies {
                out.extend_from_slice(word);
            }
            self.copy += copies;
            if self.copy < *count {
                continue;
            }
            self.copy = 0;
            self.word += 1;
            if self.word < stage.words.len() {
                continue;
            }
            self.word = 0;
            self.rep += 1;
            if self.rep < stage.block_repeats {
                continue;
            }
            self.rep = 0;
            // the last stage repeats forever
            if self.stage + 1 < self.stages.len() {
                self.stage += 1;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::super::SymbolSequence;
    use super::*;

    #[test]
    fn uniform_first_stage_is_lexicographic() {
        let mu = AnalyticMeasure::binary_bernoulli(0.5).unwrap();
        let schedule = MuChampernowneSchedule::new(vec![2.0], vec![1]).unwrap();
        let x = SymbolSequence::mu_champernowne(&mu, &schedule).unwrap();
        assert_eq!(x.prefix(6).unwrap(), vec![0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn point_mass_at_zero_gives_zeros() {
        let zero = SymbolSequence::periodic(2, vec![0]).unwrap();
        let mu = AnalyticMeasure::point_mass(zero);
        let schedule = MuChampernowneSchedule::new(vec![1.0, 1.0, 3.0], vec![1, 2, 1]).unwrap();
        let x = SymbolSequence::mu_champernowne(&mu, &schedule).unwrap();
        assert!(x.prefix(500).unwrap().iter().all(|&d| d == 0));
    }

    #[test]
    fn second_stage_lists_words_with_ceil_counts() {
        let mu = AnalyticMeasure::binary_bernoulli(0.3).unwrap();
        // depth 2 masses .49 .21 .21 .09; M = 12 gives 6, 3, 3, 2 copies
        let schedule = MuChampernowneSchedule::new(vec![4.0, 12.0], vec![1, 1]).unwrap();
        let x = SymbolSequence::mu_champernowne(&mu, &schedule).unwrap();
        // stage 1: ⌈4·0.7⌉ = 3 zeros, ⌈4·0.3⌉ = 2 ones
        let mut expected = vec![0, 0, 0, 1, 1];
        for (w, c) in [([0, 0], 6), ([0, 1], 3), ([1, 0], 3), ([1, 1], 2)] {
            for _ in 0..c {
                expected.extend_from_slice(&w);
            }
        }
        assert_eq!(x.prefix(expected.len()).unwrap(), expected);
    }

    #[test]
    fn rejects_invalid_inputs() {
        let mu = AnalyticMeasure::binary_bernoulli(0.3).unwrap();
        let too_small = MuChampernowneSchedule::new(vec![2.0], vec![1]).unwrap();
        assert!(SymbolSequence::mu_champernowne(&mu, &too_small).is_err());
        let nonstationary =
            AnalyticMeasure::markov(vec![1.0, 0.0], vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let schedule = MuChampernowneSchedule::new(vec![8.0], vec![1]).unwrap();
        assert!(matches!(
            SymbolSequence::mu_champernowne(&nonstationary, &schedule),
            Err(Error::NotInvariant { .. })
        ));
        let huge = MuChampernowneSchedule::new(vec![1e30], vec![1]).unwrap();
        assert!(matches!(SymbolSequence::mu_champernowne(&mu, &huge), Err(Error::RepeatOverflow { .. })));
        assert!(MuChampernowneSchedule::new(vec![1.0], vec![0]).is_err());
    }

    #[test]
    fn growth_schedule_values() {
        let s = MuChampernowneSchedule::bernoulli_growth(0.5, 3).unwrap();
        assert_eq!(s.repetition_factors, vec![4.0, 16.0, 64.0]);
        assert_eq!(s.block_repeats, vec![1, 16, 729]);
    }

    #[test]
    fn desk_schedule_covers_budget() {
        let mu = AnalyticMeasure::binary_bernoulli(0.110028).unwrap();
        let s = MuChampernowneSchedule::desk(&mu, 1 << 20).unwrap();
        assert!(s.stages() >= 3);
        let x = SymbolSequence::mu_champernowne(&mu, &s).unwrap();
        assert_eq!(x.available(1 << 20), 1 << 20);
    }
}
