//! Closed-form measures on `Σ_b^∞` and on the torus, average entropies,
//! lifts of interval measures, Rényi partition entropies and integer
//! pushforwards `(f_m)_* μ` with `f_m(r) = m r mod 1`.
//!
//! A measure of base `b` is described by its cylinder masses `μ(C_w)`, which
//! coincide with the masses of the `b`-adic intervals `I_w` under the lift.

mod spec;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{checked_pow, plogp, CompensatedSum};
use crate::sequences::SymbolSequence;
use crate::weyl::{CylinderLevels, CylinderMeasure};

pub use spec::MeasureSpec;

/// Largest number of cells enumerated at a single depth.
pub const MAX_CELLS: u64 = 1 << 24;

const PROB_TOL: f64 = 1e-12;
const CONSISTENCY_TOL: f64 = 1e-10;
/// The CDF walk stops once the remaining cylinder mass is below this.
const CDF_MASS_FLOOR: f64 = 1e-18;
const CDF_MAX_DIGITS: usize = 4096;

/// Masses of the base-`b` intervals `I_w` for every depth `0..=D`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMasses {
    base: u32,
    levels: Vec<Vec<f64>>,
}

impl IntervalMasses {
    /// `levels[d]` holds the `b^d` masses at depth `d`, with `levels[0] = [1]`.
    pub fn new(base: u32, levels: Vec<Vec<f64>>) -> Result<Self> {
        if !(2..=36).contains(&base) {
            return Err(Error::InvalidBase(base));
        }
        if levels.is_empty() {
            return Err(Error::InvalidMeasure("no interval levels given".into()));
        }
        for (d, level) in levels.iter().enumerate() {
            let expected = checked_pow(base, d).filter(|&c| c <= MAX_CELLS).ok_or(Error::DepthTooLarge {
                base,
                depth: d,
                max: max_depth(base),
            })?;
            if level.len() as u64 != expected {
                return Err(Error::InvalidMeasure(format!(
                    "depth {d} has {} masses, expected {expected}",
                    level.len()
                )));
            }
            if let Some(i) = level.iter().position(|&m| !m.is_finite() || m < 0.0) {
                return Err(Error::InvalidMeasure(format!("mass {} at depth {d} index {i} is not a probability", level[i])));
            }
        }
        if (levels[0][0] - 1.0).abs() > CONSISTENCY_TOL {
            return Err(Error::InvalidMeasure(format!("total mass {} is not 1", levels[0][0])));
        }
        let b = base as usize;
        for d in 0..levels.len() - 1 {
            for (i, &mass) in levels[d].iter().enumerate() {
                let children: f64 = levels[d + 1][i * b..(i + 1) * b].iter().copied().collect::<CompensatedSum>().value();
                if (mass - children).abs() > CONSISTENCY_TOL {
                    return Err(Error::Inconsistent {
                        word: crate::numeric::index_to_word(i as u64, base, d),
                        mass,
                        children,
                    });
                }
            }
        }
        Ok(Self { base, levels })
    }

    /// Builds every coarser level from the finest one by summation.
    pub fn from_finest(base: u32, finest: Vec<f64>) -> Result<Self> {
        let b = base as usize;
        if b < 2 {
            return Err(Error::InvalidBase(base));
        }
        let mut levels = vec![finest];
        while levels[0].len() > 1 {
            let fine = &levels[0];
            if fine.len() % b != 0 {
                return Err(Error::InvalidMeasure(format!("{} masses is not a power of {base}", fine.len())));
            }
            let coarse: Vec<f64> = fine.chunks(b).map(|c| c.iter().copied().collect::<CompensatedSum>().value()).collect();
            levels.insert(0, coarse);
        }
        Self::new(base, levels)
    }

    /// Interval masses of `mu` at depths `0..=depth`.
    pub fn of(mu: &AnalyticMeasure, depth: usize) -> Result<Self> {
        let levels = (0..=depth).map(|d| mu.level(d)).collect::<Result<Vec<_>>>()?;
        Self::new(mu.base(), levels)
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
}

/// The lift `μ̂` with `μ̂(C_w) = μ(I_w)` for `|w| ≤ depth`.
pub fn lift(masses: &IntervalMasses, depth: usize) -> Result<CylinderMeasure> {
    if depth > masses.depth() {
        return Err(Error::InvalidParameter(format!(
            "lift depth {depth} exceeds the {} levels given",
            masses.depth()
        )));
    }
    CylinderMeasure::from_levels(masses.base, masses.levels[..=depth].to_vec())
}

#[derive(Debug, Clone)]
enum Kind {
    Bernoulli(Vec<f64>),
    Markov { pi: Vec<f64>, transition: Vec<Vec<f64>> },
    PointMass(SymbolSequence),
    IntervalLift(Arc<IntervalMasses>),
    Pushforward {
        inner: Box<AnalyticMeasure>,
        m: u32,
        /// `j` with `m = b^j`, when it exists.
        power: Option<usize>,
        /// `F(i/m)` for `i < m`.
        offsets: Vec<f64>,
    },
}

/// A probability measure given in closed form.
#[derive(Debug, Clone)]
pub struct AnalyticMeasure {
    base: u32,
    kind: Kind,
}

fn check_probability_vector(v: &[f64], what: &str) -> Result<()> {
    if let Some(p) = v.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidMeasure(format!("{what} has entry {p}")));
    }
    let total: f64 = v.iter().copied().collect::<CompensatedSum>().value();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidMeasure(format!("{what} sums to {total}")));
    }
    Ok(())
}

impl AnalyticMeasure {
    /// I.i.d. digits with `P(d) = probs[d]`; the base is `probs.len()`.
    pub fn bernoulli(probs: Vec<f64>) -> Result<Self> {
        let base = probs.len() as u32;
        if !(2..=36).contains(&base) {
            return Err(Error::InvalidBase(base));
        }
        check_probability_vector(&probs, "bernoulli probabilities")?;
        Ok(Self { base, kind: Kind::Bernoulli(probs) })
    }

    /// Binary i.i.d. digits with `P(1) = p1`.
    pub fn binary_bernoulli(p1: f64) -> Result<Self> {
        Self::bernoulli(vec![1.0 - p1, p1])
    }

    pub fn markov(pi: Vec<f64>, transition: Vec<Vec<f64>>) -> Result<Self> {
        let base = pi.len() as u32;
        if !(2..=36).contains(&base) {
            return Err(Error::InvalidBase(base));
        }
        check_probability_vector(&pi, "initial distribution")?;
        if transition.len() != pi.len() {
            return Err(Error::InvalidMeasure(format!(
                "transition matrix has {} rows, expected {base}",
                transition.len()
            )));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != pi.len() {
                return Err(Error::InvalidMeasure(format!("transition row {i} has {} entries", row.len())));
            }
            check_probability_vector(row, &format!("transition row {i}"))?;
        }
        Ok(Self { base, kind: Kind::Markov { pi, transition } })
    }

    /// The Dirac measure at `x`.
    pub fn point_mass(x: SymbolSequence) -> Self {
        Self { base: x.base(), kind: Kind::PointMass(x) }
    }

    /// The measure on the torus given by its interval masses, extended
    /// uniformly inside the finest intervals.
    pub fn interval_lift(masses: IntervalMasses) -> Self {
        Self { base: masses.base, kind: Kind::IntervalLift(Arc::new(masses)) }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Human-readable kind name.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Bernoulli(_) => "bernoulli",
            Kind::Markov { .. } => "markov",
            Kind::PointMass(_) => "pointmass",
            Kind::IntervalLift(_) => "lift",
            Kind::Pushforward { .. } => "pushforward",
        }
    }

    /// `μ(C_w)`.
    ///
    /// For a pushforward whose factor is not a power of the base the mass is
    /// a CDF difference, which needs `b^|w| ≤ 2^96`; deeper words give NaN.
    pub fn cylinder_prob(&self, w: &[u8]) -> f64 {
        if w.iter().any(|&d| d as u32 >= self.base) {
            return 0.0;
        }
        match &self.kind {
            Kind::Bernoulli(p) => w.iter().map(|&d| p[d as usize]).product(),
            Kind::Markov { pi, transition } => match w.split_first() {
                None => 1.0,
                Some((&first, rest)) => {
                    let mut mass = pi[first as usize];
                    let mut last = first as usize;
                    for &d in rest {
                        mass *= transition[last][d as usize];
                        last = d as usize;
                    }
                    mass
                }
            },
            Kind::PointMass(x) => match x.available(w.len()) == w.len() && x.prefix(w.len()).ok().as_deref() == Some(w) {
                true => 1.0,
                false => 0.0,
            },
            Kind::IntervalLift(masses) => {
                let depth = masses.depth();
                if w.len() <= depth {
                    masses.levels[w.len()][crate::numeric::word_to_index(w, self.base) as usize]
                } else {
                    let idx = crate::numeric::word_to_index(&w[..depth], self.base) as usize;
                    masses.levels[depth][idx] * (self.base as f64).powi(-((w.len() - depth) as i32))
                }
            }
            Kind::Pushforward { inner, power: Some(j), .. } => {
                let b = self.base;
                let mut acc = CompensatedSum::new();
                let mut word = vec![0u8; j + w.len()];
                word[*j..].copy_from_slice(w);
                for u in 0..checked_pow(b, *j).unwrap_or(0) {
                    let prefix = crate::numeric::index_to_word(u, b, *j);
                    word[..*j].copy_from_slice(&prefix);
                    acc.add(inner.cylinder_prob(&word));
                }
                acc.value()
            }
            Kind::Pushforward { .. } => {
                let Some(den) = pow_u128(self.base, w.len()).filter(|&d| d <= 1u128 << 96) else {
                    return f64::NAN;
                };
                let idx = w.iter().fold(0u128, |acc, &d| acc * self.base as u128 + d as u128);
                (self.cdf(idx + 1, den) - self.cdf(idx, den)).max(0.0)
            }
        }
    }

    /// `μ([0, num/den))` for `0 ≤ num ≤ den`.
    pub fn cdf(&self, num: u128, den: u128) -> f64 {
        assert!(den > 0 && num <= den, "cdf argument must lie in [0, 1]");
        if num == 0 {
            return 0.0;
        }
        if num == den {
            return 1.0;
        }
        match &self.kind {
            Kind::IntervalLift(masses) => lift_cdf(masses, num, den),
            Kind::Pushforward { inner, m, offsets, .. } => {
                let m = *m as u128;
                let mut acc = CompensatedSum::new();
                for (i, off) in offsets.iter().enumerate() {
                    acc.add(inner.cdf(i as u128 * den + num, m * den) - off);
                }
                acc.value().clamp(0.0, 1.0)
            }
            _ => self.walk_cdf(num, den),
        }
    }

    fn walk_cdf(&self, mut num: u128, den: u128) -> f64 {
        let b = self.base as u128;
        let mut walker = Walker::new(self);
        let mut acc = CompensatedSum::new();
        let mut mass = 1.0f64;
        for _ in 0..CDF_MAX_DIGITS {
            if num == 0 || mass < CDF_MASS_FLOOR {
                break;
            }
            let scaled = num * b;
            let digit = (scaled / den) as u8;
            num = scaled % den;
            for d in 0..digit {
                acc.add(mass * walker.cond(d));
            }
            mass *= walker.cond(digit);
            walker.advance(digit);
        }
        acc.value().clamp(0.0, 1.0)
    }

    /// All cylinder masses at `depth`, indexed by word (most significant digit first).
    pub fn level(&self, depth: usize) -> Result<Vec<f64>> {
        let b = self.base;
        let cells = checked_pow(b, depth).filter(|&c| c <= MAX_CELLS).ok_or(Error::DepthTooLarge {
            base: b,
            depth,
            max: max_depth(b),
        })? as usize;
        Ok(match &self.kind {
            Kind::Bernoulli(p) => {
                let mut level = vec![1.0];
                for _ in 0..depth {
                    level = level.iter().flat_map(|&m| p.iter().map(move |&q| m * q)).collect();
                }
                level
            }
            Kind::Markov { pi, transition } => {
                if depth == 0 {
                    return Ok(vec![1.0]);
                }
                let mut level = pi.clone();
                for _ in 1..depth {
                    level = level
                        .iter()
                        .enumerate()
                        .flat_map(|(i, &m)| transition[i % b as usize].iter().map(move |&q| m * q))
                        .collect();
                }
                level
            }
            Kind::PointMass(x) => {
                let mut level = vec![0.0; cells];
                let prefix = x.prefix(depth)?;
                level[crate::numeric::word_to_index(&prefix, b) as usize] = 1.0;
                level
            }
            Kind::IntervalLift(masses) => {
                let top = masses.depth();
                if depth <= top {
                    masses.levels[depth].clone()
                } else {
                    let split = (cells / masses.levels[top].len()) as f64;
                    let per = cells / masses.levels[top].len();
                    masses.levels[top].iter().flat_map(|&m| std::iter::repeat_n(m / split, per)).collect()
                }
            }
            Kind::Pushforward { inner, power: Some(j), .. } => {
                let fine = inner.level(depth + j)?;
                let mut out = vec![CompensatedSum::new(); cells];
                for chunk in fine.chunks(cells) {
                    for (acc, &m) in out.iter_mut().zip(chunk) {
                        acc.add(m);
                    }
                }
                out.iter().map(|s| s.value()).collect()
            }
            Kind::Pushforward { .. } => self.cdf_grid(b, depth)?,
        })
    }

    /// Masses of the base-`m` intervals `I^m_w` for `|w| = n`.
    pub fn interval_masses(&self, m: u32, n: usize) -> Result<Vec<f64>> {
        if m < 2 {
            return Err(Error::InvalidBase(m));
        }
        if let Some(j) = power_of(self.base, m) {
            return self.level(n * j);
        }
        if let Kind::Pushforward { inner, m: pm, .. } = &self.kind {
            if *pm == m {
                // (f_m)_* μ(I^m_w) = Σ_i μ(I^m_{iw})
                let fine = inner.interval_masses(m, n + 1)?;
                let cells = fine.len() / m as usize;
                let mut out = vec![CompensatedSum::new(); cells];
                for chunk in fine.chunks(cells) {
                    for (acc, &v) in out.iter_mut().zip(chunk) {
                        acc.add(v);
                    }
                }
                return Ok(out.iter().map(|s| s.value()).collect());
            }
        }
        self.cdf_grid(m, n)
    }

    /// Interval masses from differences of the CDF on the grid `j / m^n`.
    fn cdf_grid(&self, m: u32, n: usize) -> Result<Vec<f64>> {
        let cells = checked_pow(m, n).filter(|&c| c <= MAX_CELLS).ok_or(Error::DepthTooLarge {
            base: m,
            depth: n,
            max: max_depth(m),
        })?;
        let den = cells as u128;
        let grid: Vec<f64> = (0..=cells).into_par_iter().map(|j| self.cdf(j as u128, den)).collect();
        Ok(grid.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect())
    }

    /// Verifies `μ(C_w) = Σ_a μ(C_aw)` for all `|w| ≤ depth`.
    pub fn check_shift_invariance(&self, depth: usize, tol: f64) -> Result<()> {
        let b = self.base as usize;
        let mut coarse = self.level(0)?;
        for d in 0..=depth {
            let fine = self.level(d + 1)?;
            for (i, &mass) in coarse.iter().enumerate() {
                let preimage: f64 = (0..b).map(|a| fine[a * coarse.len() + i]).collect::<CompensatedSum>().value();
                if (mass - preimage).abs() > tol {
                    return Err(Error::NotInvariant {
                        word: crate::numeric::index_to_word(i as u64, self.base, d),
                        mass,
                        preimage,
                    });
                }
            }
            coarse = fine;
        }
        Ok(())
    }

    /// Normalized entropy rate `H(μ)/log b` when available in closed form.
    fn closed_form_entropy(&self, n: usize) -> Option<f64> {
        let ln_b = (self.base as f64).ln();
        match &self.kind {
            Kind::Bernoulli(p) => Some(p.iter().map(|&q| plogp(q)).sum::<f64>() / ln_b),
            Kind::PointMass(_) => Some(0.0),
            Kind::Markov { pi, transition } => {
                // chain rule: H_n = H(X_0) + Σ_{t<n-1} Σ_s P(X_t = s) H(P_s)
                let row_h: Vec<f64> = transition.iter().map(|r| r.iter().map(|&q| plogp(q)).sum()).collect();
                let mut dist = pi.clone();
                let mut acc = CompensatedSum::new();
                acc.add(pi.iter().map(|&q| plogp(q)).sum());
                for _ in 1..n {
                    acc.add(dist.iter().zip(&row_h).map(|(p, h)| p * h).sum());
                    let mut next = vec![0.0; dist.len()];
                    for (s, &p) in dist.iter().enumerate() {
                        for (t, &q) in transition[s].iter().enumerate() {
                            next[t] += p * q;
                        }
                    }
                    dist = next;
                }
                Some(acc.value() / (n as f64 * ln_b))
            }
            _ => None,
        }
    }
}

struct Walker<'a> {
    measure: &'a AnalyticMeasure,
    last: Option<usize>,
    position: usize,
    buffer: Vec<u8>,
}

impl<'a> Walker<'a> {
    fn new(measure: &'a AnalyticMeasure) -> Self {
        Self { measure, last: None, position: 0, buffer: Vec::new() }
    }

    /// `μ(C_{ud}) / μ(C_u)` for the prefix `u` walked so far.
    fn cond(&mut self, d: u8) -> f64 {
        match &self.measure.kind {
            Kind::Bernoulli(p) => p[d as usize],
            Kind::Markov { pi, transition } => match self.last {
                None => pi[d as usize],
                Some(s) => transition[s][d as usize],
            },
            Kind::PointMass(x) => {
                if self.position >= self.buffer.len() {
                    let start = self.buffer.len();
                    let avail = x.available(start + 256).saturating_sub(start);
                    match x.digits(start, avail) {
                        Ok(more) if !more.is_empty() => self.buffer.extend(more),
                        // a finite point is padded with zeros
                        _ => self.buffer.push(0),
                    }
                }
                if self.buffer[self.position] == d {
                    1.0
                } else {
                    0.0
                }
            }
            _ => unreachable!("walker is only used for digit-native measures"),
        }
    }

    fn advance(&mut self, d: u8) {
        self.last = Some(d as usize);
        self.position += 1;
    }
}

fn lift_cdf(masses: &IntervalMasses, mut num: u128, den: u128) -> f64 {
    let b = masses.base as u128;
    let mut acc = CompensatedSum::new();
    let mut idx = 0usize;
    for d in 1..=masses.depth() {
        if num == 0 {
            return acc.value();
        }
        let scaled = num * b;
        let digit = (scaled / den) as usize;
        num = scaled % den;
        let first = idx * masses.base as usize;
        for m in &masses.levels[d][first..first + digit] {
            acc.add(*m);
        }
        idx = first + digit;
    }
    // linear interpolation inside the finest interval
    acc.add(masses.levels[masses.depth()][idx] * (num as f64 / den as f64));
    acc.value().clamp(0.0, 1.0)
}

fn pow_u128(base: u32, exp: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

/// `j` with `base^j = m`.
fn power_of(base: u32, m: u32) -> Option<usize> {
    let mut acc = 1u64;
    for j in 0..64 {
        if acc == m as u64 {
            return Some(j);
        }
        if acc > m as u64 {
            return None;
        }
        acc *= base as u64;
    }
    None
}

fn max_depth(base: u32) -> usize {
    let mut d = 0;
    while checked_pow(base, d + 1).is_some_and(|c| c <= MAX_CELLS) {
        d += 1;
    }
    d
}

impl CylinderLevels for AnalyticMeasure {
    fn base(&self) -> u32 {
        self.base
    }

    fn level(&self, depth: usize) -> Result<Vec<f64>> {
        AnalyticMeasure::level(self, depth)
    }
}

/// `(f_m)_* μ`, evaluated lazily through the preimage rule.
pub fn pushforward_integer(mu: &AnalyticMeasure, m: u32) -> Result<AnalyticMeasure> {
    if m == 0 {
        return Err(Error::InvalidParameter("pushforward factor must be at least 1".into()));
    }
    if m == 1 {
        return Ok(mu.clone());
    }
    let offsets = (0..m).map(|i| mu.cdf(i as u128, m as u128)).collect();
    Ok(AnalyticMeasure {
        base: mu.base,
        kind: Kind::Pushforward { inner: Box::new(mu.clone()), m, power: power_of(mu.base, m), offsets },
    })
}

/// Normalized partition entropies per depth with tail statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenyiProfile {
    /// Partition factor `m`.
    pub partition: u32,
    pub n_list: Vec<usize>,
    /// `H^m_n(μ) / (n log m)` for each `n`.
    pub values: Vec<f64>,
    /// Min and max over the second half of the depth range.
    pub tail_lo: f64,
    pub tail_hi: f64,
}

impl RenyiProfile {
    fn new(partition: u32, n_list: Vec<usize>, values: Vec<f64>) -> Self {
        let max_n = n_list.iter().copied().max().unwrap_or(0);
        let tail: Vec<f64> = n_list
            .iter()
            .zip(&values)
            .filter(|(n, _)| 2 * **n >= max_n)
            .map(|(_, v)| *v)
            .collect();
        let tail_lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
        let tail_hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { partition, n_list, values, tail_lo, tail_hi }
    }
}

fn check_n_list(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("depth list is empty".into()));
    }
    if n_list.contains(&0) || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("depths must be positive and increasing".into()));
    }
    Ok(())
}

/// Shannon entropy (natural log) of a mass vector.
pub fn shannon_entropy(masses: &[f64]) -> f64 {
    masses.iter().map(|&p| plogp(p)).collect::<CompensatedSum>().value()
}

/// `H^m_n(μ)` in nats.
pub fn partition_entropy(mu: &AnalyticMeasure, m: u32, n: usize) -> Result<f64> {
    Ok(shannon_entropy(&mu.interval_masses(m, n)?))
}

/// `H_n(μ) / (n log b)` over the native cylinders. Depths past the
/// enumeration limit use closed forms where one exists.
pub fn average_entropy_profile(mu: &AnalyticMeasure, n_list: &[usize]) -> Result<RenyiProfile> {
    check_n_list(n_list)?;
    let ln_b = (mu.base as f64).ln();
    let values = n_list
        .iter()
        .map(|&n| match mu.level(n) {
            Ok(level) => Ok(shannon_entropy(&level) / (n as f64 * ln_b)),
            Err(e @ Error::DepthTooLarge { .. }) => mu.closed_form_entropy(n).ok_or(e),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RenyiProfile::new(mu.base, n_list.to_vec(), values))
}

/// `H^m_n(μ) / (n log m)` for each `n`.
pub fn renyi_profile(mu: &AnalyticMeasure, m: u32, n_list: &[usize]) -> Result<RenyiProfile> {
    check_n_list(n_list)?;
    let ln_m = (m as f64).ln();
    let values = n_list
        .iter()
        .map(|&n| Ok(partition_entropy(mu, m, n)? / (n as f64 * ln_m)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RenyiProfile::new(m, n_list.to_vec(), values))
}

/// Comparison of normalized partition entropies at two factors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionInvariance {
    pub m1: u32,
    pub m2: u32,
    pub l: usize,
    /// The depth with `m1^n ≤ m2^l < m1^(n+1)`.
    pub n: usize,
    /// `H^{m2}_l / (l log m2)`
    pub value_m2: f64,
    /// `H^{m1}_n / (n log m1)`
    pub value_m1: f64,
    pub difference: f64,
    /// `2/n`
    pub bound: f64,
    pub passed: bool,
}

pub fn check_partition_invariance(
    mu: &AnalyticMeasure,
    m1: u32,
    m2: u32,
    l: usize,
    tol: f64,
) -> Result<PartitionInvariance> {
    if m1 < 2 || m2 < 2 || l == 0 {
        return Err(Error::InvalidParameter("partition factors must be at least 2 and l positive".into()));
    }
    let target = pow_u128(m2, l).ok_or_else(|| Error::InvalidParameter("m2^l overflows".into()))?;
    let mut n = 0usize;
    while pow_u128(m1, n + 1).is_some_and(|p| p <= target) {
        n += 1;
    }
    if n == 0 {
        return Err(Error::InvalidParameter(format!("no n ≥ 1 with {m1}^n ≤ {m2}^{l}")));
    }
    let value_m2 = partition_entropy(mu, m2, l)? / (l as f64 * (m2 as f64).ln());
    let value_m1 = partition_entropy(mu, m1, n)? / (n as f64 * (m1 as f64).ln());
    let difference = (value_m2 - value_m1).abs();
    let bound = 2.0 / n as f64;
    Ok(PartitionInvariance { m1, m2, l, n, value_m2, value_m1, difference, bound, passed: difference <= bound + tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::binary_entropy;

    fn bern(p: f64) -> AnalyticMeasure {
        AnalyticMeasure::binary_bernoulli(p).unwrap()
    }

    #[test]
    fn cylinder_prob_examples() {
        assert!((bern(0.3).cylinder_prob(&[1, 1]) - 0.09).abs() < 1e-15);
        let x = SymbolSequence::periodic(2, vec![0, 1, 0]).unwrap();
        let d = AnalyticMeasure::point_mass(x);
        assert_eq!(d.cylinder_prob(&[0, 1]), 1.0);
        assert_eq!(d.cylinder_prob(&[0, 0]), 0.0);
    }

    #[test]
    fn pushforward_by_base_sums_preimages() {
        let mu = AnalyticMeasure::markov(vec![0.2, 0.8], vec![vec![0.9, 0.1], vec![0.4, 0.6]]).unwrap();
        let push = pushforward_integer(&mu, 2).unwrap();
        for w in [vec![0u8], vec![1, 0], vec![1, 1, 0]] {
            let mut w0 = vec![0];
            w0.extend(&w);
            let mut w1 = vec![1];
            w1.extend(&w);
            let expected = mu.cylinder_prob(&w0) + mu.cylinder_prob(&w1);
            assert!((push.cylinder_prob(&w) - expected).abs() < 1e-15);
        }
        let same = pushforward_integer(&mu, 1).unwrap();
        assert_eq!(same.level(4).unwrap(), mu.level(4).unwrap());
    }

    #[test]
    fn uniform_is_pushforward_invariant() {
        let u = bern(0.5);
        for m in [2, 3, 5] {
            let push = pushforward_integer(&u, m).unwrap();
            for (i, p) in push.level(6).unwrap().iter().enumerate() {
                assert!((p - 1.0 / 64.0).abs() < 1e-12, "m={m} cell {i}: {p}");
            }
        }
    }

    #[test]
    fn cdf_matches_levels() {
        let mu = bern(0.3);
        let level = mu.level(5).unwrap();
        let mut acc = 0.0;
        for (j, m) in level.iter().enumerate() {
            assert!((mu.cdf(j as u128, 32) - acc).abs() < 1e-14);
            acc += m;
        }
        // base-3 grid via the CDF sums to 1
        let masses = mu.interval_masses(3, 4).unwrap();
        assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn average_entropy_examples() {
        let p = average_entropy_profile(&bern(0.5), &[1, 2, 5, 10]).unwrap();
        assert!(p.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let p = average_entropy_profile(&bern(0.3), &[1, 4, 16, 30]).unwrap();
        assert!(p.values.iter().all(|v| (v - binary_entropy(0.3)).abs() < 1e-12));
        let x = SymbolSequence::periodic(2, vec![0]).unwrap();
        let p = average_entropy_profile(&AnalyticMeasure::point_mass(x), &[1, 8]).unwrap();
        assert_eq!(p.values, vec![0.0, 0.0]);
        let x = SymbolSequence::periodic(2, vec![0]).unwrap();
        assert!(average_entropy_profile(&AnalyticMeasure::point_mass(x), &[30]).is_ok());
    }

    #[test]
    fn markov_closed_form_agrees_with_enumeration() {
        let mu = AnalyticMeasure::markov(vec![0.25, 0.75], vec![vec![0.5, 0.5], vec![0.1, 0.9]]).unwrap();
        for n in [1, 3, 9] {
            let enumerated = average_entropy_profile(&mu, &[n]).unwrap().values[0];
            assert!((enumerated - mu.closed_form_entropy(n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn lift_examples() {
        let half = IntervalMasses::new(2, vec![vec![1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(lift(&half, 1).unwrap().prob(&[0]), 1.0);
        let mu = bern(0.3);
        let masses = IntervalMasses::of(&mu, 6).unwrap();
        let lifted = lift(&masses, 6).unwrap();
        for i in 0..64u64 {
            let w = crate::numeric::index_to_word(i, 2, 6);
            assert_eq!(lifted.prob(&w), mu.cylinder_prob(&w));
        }
        assert!(matches!(
            IntervalMasses::new(2, vec![vec![1.0], vec![0.3, 0.6]]),
            Err(Error::Inconsistent { .. })
        ));
    }

    #[test]
    fn partition_invariance_examples() {
        let r = check_partition_invariance(&bern(0.3), 2, 4, 5, 0.0).unwrap();
        assert_eq!(r.n, 10);
        assert!(r.passed);
        assert!(r.difference < 1e-12);
        let r = check_partition_invariance(&bern(0.5), 2, 3, 7, 0.0).unwrap();
        assert!(r.difference < 1e-9);
        let r = check_partition_invariance(&bern(0.3), 3, 3, 4, 0.0).unwrap();
        assert_eq!(r.difference, 0.0);
    }

    #[test]
    fn shift_invariance_check() {
        assert!(bern(0.2).check_shift_invariance(6, 1e-10).is_ok());
        let not_stationary = AnalyticMeasure::markov(vec![1.0, 0.0], vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(not_stationary.check_shift_invariance(3, 1e-10), Err(Error::NotInvariant { .. })));
    }
}
