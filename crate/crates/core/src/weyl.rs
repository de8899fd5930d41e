//! Weyl averages `S_n(k) = (1/n) Σ_{j<n} e^{2πik v(T^j x)}`, empirical
//! cylinder measures `ν_n`, Fourier coefficients of cylinder measures, and
//! convergence reports over sampled subsequences.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{checked_pow, turn, CompensatedSum, ComplexSum};
use crate::sequences::SymbolSequence;

/// Default truncation depth of `v_b(T^j x)`.
pub const DEFAULT_DEPTH: usize = 64;
/// Largest number of cells in an enumerated cylinder level.
pub const MAX_CELLS: u64 = 1 << 24;

/// Deepest truncation with `b^K ≤ 2^64`, which keeps phases exact in `u128`.
pub fn max_depth(base: u32) -> usize {
    let (mut k, mut p) = (0, 1u128);
    while p * base as u128 <= 1u128 << 64 {
        p *= base as u128;
        k += 1;
    }
    k
}

/// `S_n(k)` at each checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylSeries {
    pub k: i64,
    /// Truncation depth actually used.
    pub depth: usize,
    pub checkpoints: Vec<usize>,
    pub values: Vec<Complex64>,
    /// `2π|k| b^{-depth}`, valid for every value.
    pub error_bound: f64,
}

impl WeylSeries {
    /// `(n, |S_n(k)|)` pairs.
    pub fn moduli(&self) -> Vec<(usize, f64)> {
        self.checkpoints.iter().zip(&self.values).map(|(&n, v)| (n, v.norm())).collect()
    }

    pub fn points(&self) -> Vec<(usize, Complex64)> {
        self.checkpoints.iter().copied().zip(self.values.iter().copied()).collect()
    }
}

/// A value together with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounded {
    pub value: Complex64,
    pub error_bound: f64,
}

fn phase_series(digits: &[u8], base: u32, k: i64, depth: usize, checkpoints: &[usize]) -> Vec<Complex64> {
    let b = base as u128;
    let modulus = b.pow(depth as u32);
    let kk = (k as i128).rem_euclid(modulus as i128) as u128;
    let top = modulus / b;
    let mut w: u128 = digits[..depth].iter().fold(0, |acc, &d| acc * b + d as u128);
    let mut acc = ComplexSum::default();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = 0usize;
    let n_max = *checkpoints.last().unwrap();
    for j in 0..n_max {
        if j > 0 {
            w = (w % top) * b + digits[j + depth - 1] as u128;
        }
        // kk, w < 2^64, so the product fits
        let r = (kk * w) % modulus;
        acc.add(turn(r as f64 / modulus as f64));
        if j + 1 == checkpoints[next] {
            out.push(acc.value() / (j + 1) as f64);
            next += 1;
        }
    }
    out
}

fn effective_depth(base: u32, depth: usize) -> Result<usize> {
    if depth == 0 {
        return Err(Error::InvalidParameter("truncation depth must be at least 1".into()));
    }
    Ok(depth.min(max_depth(base)))
}

/// `S_n(k)` at every checkpoint for every `k`, in one pass per `k`.
///
/// The depth is capped at the largest `K` with `b^K ≤ 2^64`.
pub fn weyl_series(x: &SymbolSequence, ks: &[i64], checkpoints: &[usize], depth: usize) -> Result<Vec<WeylSeries>> {
    crate::entropy::check_checkpoints(checkpoints)?;
    if checkpoints[0] == 0 {
        return Err(Error::InvalidCheckpoints("checkpoints must be positive".into()));
    }
    let depth = effective_depth(x.base(), depth)?;
    let n_max = *checkpoints.last().unwrap();
    let digits = x.prefix(n_max + depth - 1)?;
    let b = x.base() as f64;
    Ok(ks
        .par_iter()
        .map(|&k| WeylSeries {
            k,
            depth,
            checkpoints: checkpoints.to_vec(),
            values: phase_series(&digits, x.base(), k, depth, checkpoints),
            error_bound: std::f64::consts::TAU * (k.unsigned_abs() as f64) * b.powi(-(depth as i32)),
        })
        .collect())
}

/// `S_n(k)` with phases from the first `depth` digits of each shift.
pub fn weyl_partial_average(x: &SymbolSequence, k: i64, n: usize, depth: usize) -> Result<Bounded> {
    let s = weyl_series(x, &[k], &[n], depth)?.remove(0);
    Ok(Bounded { value: s.values[0], error_bound: s.error_bound })
}

/// Cylinder masses for every depth `0..=L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CylinderMeasure {
    base: u32,
    levels: Vec<Vec<f64>>,
}

/// Anything that can list its cylinder masses level by level.
pub trait CylinderLevels {
    fn base(&self) -> u32;
    /// Masses of all `b^depth` cylinders, indexed by word (most significant digit first).
    fn level(&self, depth: usize) -> Result<Vec<f64>>;
}

impl CylinderMeasure {
    /// `levels[d]` has `b^d` entries.
    pub fn from_levels(base: u32, levels: Vec<Vec<f64>>) -> Result<Self> {
        if !(2..=36).contains(&base) {
            return Err(Error::InvalidBase(base));
        }
        for (d, level) in levels.iter().enumerate() {
            let cells = checked_pow(base, d).ok_or(Error::BlockTooLong { base, block: d })?;
            if level.len() as u64 != cells {
                return Err(Error::InvalidMeasure(format!("level {d} has {} entries, expected {cells}", level.len())));
            }
            if level.iter().any(|&p| p.is_nan() || p < 0.0) {
                return Err(Error::InvalidMeasure(format!("negative or NaN mass at level {d}")));
            }
        }
        if levels.is_empty() {
            return Err(Error::InvalidMeasure("no levels".into()));
        }
        Ok(Self { base, levels })
    }

    /// Normalizes exact counts by `n`.
    pub fn from_counts(base: u32, counts: &[Vec<u64>], n: u64) -> Result<Self> {
        let levels = counts.iter().map(|lvl| lvl.iter().map(|&c| c as f64 / n as f64).collect()).collect();
        Self::from_levels(base, levels)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    /// Mass of `C_w` for `|w| ≤ depth`.
    pub fn prob(&self, w: &[u8]) -> f64 {
        if w.len() > self.depth() || w.iter().any(|&d| d as u32 >= self.base) {
            return f64::NAN;
        }
        self.levels[w.len()][crate::numeric::word_to_index(w, self.base) as usize]
    }

    /// Checks `prob(∅) = 1` and `prob(w) = Σ_a prob(wa)` within `tol`.
    pub fn check_consistency(&self, tol: f64) -> Result<()> {
        if (self.levels[0][0] - 1.0).abs() > tol {
            return Err(Error::Inconsistent { word: vec![], mass: self.levels[0][0], children: 1.0 });
        }
        let b = self.base as usize;
        for d in 0..self.depth() {
            for (i, &mass) in self.levels[d].iter().enumerate() {
                let children =
                    self.levels[d + 1][i * b..(i + 1) * b].iter().copied().collect::<CompensatedSum>().value();
                if (mass - children).abs() > tol {
                    return Err(Error::Inconsistent {
                        word: crate::numeric::index_to_word(i as u64, self.base, d),
                        mass,
                        children,
                    });
                }
            }
        }
        Ok(())
    }
}

impl CylinderLevels for CylinderMeasure {
    fn base(&self) -> u32 {
        self.base
    }

    fn level(&self, depth: usize) -> Result<Vec<f64>> {
        self.levels
            .get(depth)
            .cloned()
            .ok_or_else(|| Error::InvalidParameter(format!("depth {depth} exceeds stored depth {}", self.depth())))
    }
}

/// Exact counts `|{j < n : x_j .. x_{j+d-1} = w}|` for every depth `d ≤ L`.
pub fn cylinder_counts(x: &SymbolSequence, n: usize, depth: usize) -> Result<Vec<Vec<u64>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let base = x.base();
    let cells = checked_pow(base, depth).filter(|&c| c <= MAX_CELLS).ok_or(Error::DepthTooLarge {
        base,
        depth,
        max: (0..).take_while(|&d| checked_pow(base, d).is_some_and(|c| c <= MAX_CELLS)).last().unwrap_or(0),
    })?;
    let mut levels = vec![vec![0u64; cells as usize]];
    if depth == 0 {
        levels[0][0] = n as u64;
        return Ok(levels);
    }
    let digits = x.prefix(n + depth - 1)?;
    levels[0] = crate::entropy::sliding_counts_chunked(&digits, base, depth, 1 << 18)?;
    // each start j < n lies in exactly one deeper cylinder, so coarser counts are sums
    let b = base as usize;
    while levels[0].len() > 1 {
        let coarse: Vec<u64> = levels[0].chunks(b).map(|c| c.iter().sum()).collect();
        levels.insert(0, coarse);
    }
    Ok(levels)
}

/// `ν_n` up to depth `L`: `ν_n(C_w) = |{j < n : w is a prefix of T^j x}| / n`.
pub fn empirical_measure(x: &SymbolSequence, n: usize, depth: usize) -> Result<CylinderMeasure> {
    CylinderMeasure::from_counts(x.base(), &cylinder_counts(x, n, depth)?, n as u64)
}

/// `ν_n(C_w)` at each checkpoint, counted in one pass.
pub fn cylinder_frequency_series(x: &SymbolSequence, w: &[u8], checkpoints: &[usize]) -> Result<Vec<(usize, f64)>> {
    crate::entropy::check_checkpoints(checkpoints)?;
    if w.is_empty() || checkpoints[0] == 0 {
        return Err(Error::InvalidParameter("need a nonempty word and positive checkpoints".into()));
    }
    let n_max = *checkpoints.last().unwrap();
    let digits = x.prefix(n_max + w.len() - 1)?;
    let mut hits = 0u64;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    for j in 0..n_max {
        if &digits[j..j + w.len()] == w {
            hits += 1;
        }
        if j + 1 == checkpoints[next] {
            out.push((j + 1, hits as f64 / (j + 1) as f64));
            next += 1;
        }
    }
    Ok(out)
}

/// `Σ_{|w| = L} μ(C_w) e^{2πik v(w0^∞)}` with error bound `2π|k| b^{-L}`.
pub fn measure_fourier(mu: &impl CylinderLevels, k: i64, depth: usize) -> Result<Bounded> {
    let level = mu.level(depth)?;
    let modulus = level.len() as u128;
    let kk = (k as i128).rem_euclid(modulus as i128) as u128;
    let value = level
        .par_iter()
        .enumerate()
        .fold(ComplexSum::default, |mut acc, (idx, &m)| {
            if m != 0.0 {
                acc.add(turn(((kk * idx as u128) % modulus) as f64 / modulus as f64) * m);
            }
            acc
        })
        .map(|s| s.value())
        .collect::<Vec<_>>()
        .into_iter()
        .fold(ComplexSum::default(), |mut acc, z| {
            acc.add(z);
            acc
        })
        .value();
    let error_bound = std::f64::consts::TAU * k.unsigned_abs() as f64 * (mu.base() as f64).powi(-(depth as i32));
    Ok(Bounded { value, error_bound })
}

/// Values that can be compared and averaged in a [`LimitReport`].
pub trait SeriesValue: Copy + Serialize {
    fn distance(&self, other: &Self) -> f64;
    fn mean(values: &[Self]) -> Self;
}

impl SeriesValue for f64 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).abs()
    }

    fn mean(values: &[Self]) -> Self {
        values.iter().copied().collect::<CompensatedSum>().value() / values.len() as f64
    }
}

impl SeriesValue for Complex64 {
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }

    fn mean(values: &[Self]) -> Self {
        let mut acc = ComplexSum::default();
        values.iter().for_each(|&z| acc.add(z));
        acc.value() / values.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converged,
    Oscillating,
    Inconclusive,
}

/// A named subsequence of checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub name: String,
    pub checkpoints: Vec<usize>,
}

impl Schedule {
    pub fn new(name: impl Into<String>, checkpoints: Vec<usize>) -> Self {
        Self { name: name.into(), checkpoints }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleVerdict<T> {
    pub name: String,
    pub checkpoints: Vec<usize>,
    pub verdict: Verdict,
    /// Mean over the tail (the last half of the schedule).
    pub limit: Option<T>,
    pub max_tail_gap: f64,
    /// Two tail checkpoints realizing the largest gap.
    pub witness: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport<T> {
    pub tolerance: f64,
    pub schedules: Vec<ScheduleVerdict<T>>,
}

/// Classifies each schedule from its tail (last `⌈len/2⌉` points): converged
/// when every tail gap is within `tol`, oscillating when some gap exceeds
/// `2 tol`, otherwise inconclusive. Fewer than three points is inconclusive.
pub fn limit_report<T: SeriesValue>(series: &[(usize, T)], schedules: &[Schedule], tol: f64) -> Result<LimitReport<T>> {
    let mut verdicts = Vec::with_capacity(schedules.len());
    for s in schedules {
        let mut points = Vec::with_capacity(s.checkpoints.len());
        for &n in &s.checkpoints {
            let v = series.iter().find(|(m, _)| *m == n).ok_or(Error::UnknownCheckpoint(n))?;
            points.push(*v);
        }
        let tail = &points[points.len() - points.len().div_ceil(2)..];
        let mut max_gap = 0.0;
        let mut witness = None;
        for (i, a) in tail.iter().enumerate() {
            for b in &tail[i + 1..] {
                let gap = a.1.distance(&b.1);
                if gap > max_gap {
                    max_gap = gap;
                    witness = Some((a.0, b.0));
                }
            }
        }
        let values: Vec<T> = tail.iter().map(|p| p.1).collect();
        let verdict = if points.len() < 3 {
            Verdict::Inconclusive
        } else if max_gap <= tol {
            Verdict::Converged
        } else if max_gap > 2.0 * tol {
            Verdict::Oscillating
        } else {
            Verdict::Inconclusive
        };
        verdicts.push(ScheduleVerdict {
            name: s.name.clone(),
            checkpoints: s.checkpoints.clone(),
            verdict,
            limit: (!values.is_empty()).then(|| T::mean(&values)),
            max_tail_gap: max_gap,
            witness,
        });
    }
    Ok(LimitReport { tolerance: tol, schedules: verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_sequence_and_zero_frequency() {
        let zero = SymbolSequence::periodic(2, vec![0]).unwrap();
        for k in [-3, 1, 7] {
            assert_eq!(weyl_partial_average(&zero, k, 1000, 64).unwrap().value, Complex64::new(1.0, 0.0));
        }
        let c = SymbolSequence::champernowne(2).unwrap();
        assert_eq!(weyl_partial_average(&c, 0, 5000, 64).unwrap().value, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn series_matches_single_evaluations() {
        let c = SymbolSequence::champernowne(3).unwrap();
        let series = weyl_series(&c, &[2], &[10, 100, 1000], 64).unwrap();
        assert_eq!(series[0].depth, 40);
        for (i, &n) in [10, 100, 1000].iter().enumerate() {
            assert_eq!(series[0].values[i], weyl_partial_average(&c, 2, n, 64).unwrap().value);
        }
    }

    #[test]
    fn empirical_measure_examples() {
        let alt = SymbolSequence::periodic(2, vec![0, 1]).unwrap();
        let nu = empirical_measure(&alt, 4, 1).unwrap();
        assert_eq!((nu.prob(&[0]), nu.prob(&[1])), (0.5, 0.5));
        let zero = SymbolSequence::periodic(2, vec![0]).unwrap();
        let nu = empirical_measure(&zero, 37, 5).unwrap();
        assert_eq!(nu.prob(&[0; 5]), 1.0);
        nu.check_consistency(0.0).unwrap();
    }

    #[test]
    fn fourier_examples() {
        let zero = SymbolSequence::periodic(2, vec![0]).unwrap();
        let nu = empirical_measure(&zero, 10, 8).unwrap();
        assert_eq!(measure_fourier(&nu, 5, 8).unwrap().value, Complex64::new(1.0, 0.0));
        let uniform = CylinderMeasure::from_levels(2, (0..=10).map(|d| vec![0.5f64.powi(d); 1 << d]).collect()).unwrap();
        let f = measure_fourier(&uniform, 3, 10).unwrap();
        assert!(f.value.norm() <= f.error_bound);
        assert!((measure_fourier(&uniform, 0, 10).unwrap().value - 1.0).norm() < 1e-15);
    }

    #[test]
    fn limit_report_examples() {
        let constant: Vec<(usize, f64)> = (1..=6).map(|n| (n, 0.3)).collect();
        let all = Schedule::new("all", (1..=6).collect());
        let r = limit_report(&constant, std::slice::from_ref(&all), 0.01).unwrap();
        assert_eq!(r.schedules[0].verdict, Verdict::Converged);
        assert_eq!(r.schedules[0].limit, Some(0.3));

        let alternating: Vec<(usize, f64)> = (1..=6).map(|n| (n, if n % 2 == 0 { 0.1 } else { 0.2 })).collect();
        let r = limit_report(&alternating, std::slice::from_ref(&all), 0.01).unwrap();
        assert_eq!(r.schedules[0].verdict, Verdict::Oscillating);
        assert!(r.schedules[0].witness.is_some());

        let short = Schedule::new("short", vec![1, 2]);
        assert_eq!(limit_report(&constant, &[short], 0.01).unwrap().schedules[0].verdict, Verdict::Inconclusive);
        assert_eq!(limit_report(&constant, &[Schedule::new("x", vec![9])], 0.01), Err(Error::UnknownCheckpoint(9)));
    }
}
