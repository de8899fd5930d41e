//! Desk-scale reproduction checks. Each criterion builds its corpus, runs
//! the relevant estimators and compares against pinned tolerances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arithmetic::multiply_mod1;
use crate::entropy::{
    block_frequency_series, dimension_profile, distribution, geometric_checkpoints, normalized_entropy,
    restricted_entropy, Mode,
};
use crate::error::Result;
use crate::gambler::{sgale_evaluate, Gambler};
use crate::measures::{
    check_partition_invariance, pushforward_integer, renyi_profile, AnalyticMeasure, IntervalMasses,
};
use crate::numeric::{binary_entropy, inverse_binary_entropy};
use crate::sequences::{DilutionPattern, MuChampernowneSchedule, StageSchedule, SymbolSequence};
use crate::weyl::{empirical_measure, limit_report, measure_fourier, weyl_series, Schedule, Verdict};

pub const NORMALITY_N: usize = 1 << 20;
pub const NORMALITY_MIN_ENTROPY: f64 = 0.96;
pub const NORMALITY_MAX_WEYL: f64 = 0.05;
pub const DILUTION_N: usize = 100_000;
pub const DILUTION_TOL: f64 = 0.01;
pub const STAGE_FIRST: usize = 1024;
pub const STAGE_RATIO: usize = 4;
pub const STAGES: usize = 8;
pub const STAGE_TOL: f64 = 0.02;
pub const LIMIT_TOL: f64 = 0.01;
pub const FOURIER_N: usize = 100_000;
pub const FOURIER_DEPTH: usize = 20;
pub const FOURIER_TOL: f64 = 1e-3;
pub const PUSHFORWARD_DEPTH: usize = 22;
pub const PUSHFORWARD_TOL: f64 = 1e-3;
pub const BERNOULLI_TOL: f64 = 1e-12;
pub const MU_CHAMPERNOWNE_N: usize = 1 << 20;
pub const MU_CHAMPERNOWNE_TOL: f64 = 0.05;
pub const ARITH_N: usize = 1 << 18;
pub const ARITH_DIM_TOL: f64 = 0.05;
pub const ARITH_PHASE_TOL: f64 = 1e-6;
pub const SGALE_GAMBLERS: usize = 100;
pub const SGALE_MAX_LEN: usize = 12;
pub const SGALE_REL_TOL: f64 = 1e-12;
pub const INEQUALITY_N: usize = 100_000;
pub const INEQUALITY_SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    fn new(id: u32, name: &'static str, passed: bool, detail: String) -> Self {
        Self { id, name, passed, detail }
    }

    pub fn line(&self) -> String {
        format!("{} criterion {:>2} ({}): {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

pub fn champernowne() -> SymbolSequence {
    SymbolSequence::champernowne(2).expect("base 2 is valid")
}

fn pattern(s: &str) -> DilutionPattern {
    DilutionPattern::parse(s).expect("constant pattern")
}

/// `a`: Champernowne diluted into `0*`.
pub fn diluted_a() -> SymbolSequence {
    SymbolSequence::diluted(&champernowne(), &pattern("0*")).expect("binary pattern")
}

/// `b`: Champernowne diluted into `0**0`.
pub fn diluted_b() -> SymbolSequence {
    SymbolSequence::diluted(&champernowne(), &pattern("0**0")).expect("binary pattern")
}

pub fn stage_schedule() -> StageSchedule {
    StageSchedule::geometric(STAGE_FIRST, STAGE_RATIO, STAGES).expect("fixed schedule")
}

/// Alternation of `0*` (odd stages) and `0**0` (even stages).
pub fn alternating_sequence() -> SymbolSequence {
    SymbolSequence::alternating(&pattern("0*"), &pattern("0**0"), &champernowne(), &stage_schedule())
        .expect("alignment divides both patterns")
}

/// Bernoulli measure with entropy 1/2 bit.
pub fn half_entropy_bernoulli() -> AnalyticMeasure {
    AnalyticMeasure::binary_bernoulli(inverse_binary_entropy(0.5)).expect("valid probability")
}

pub fn mu_champernowne_sequence() -> Result<SymbolSequence> {
    let mu = half_entropy_bernoulli();
    let schedule = MuChampernowneSchedule::desk(&mu, MU_CHAMPERNOWNE_N)?;
    SymbolSequence::mu_champernowne(&mu, &schedule)
}

/// One row per stage end of the alternating sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRow {
    pub stage: usize,
    pub end: usize,
    pub pattern: &'static str,
    pub frequency_01: f64,
    pub target: f64,
}

pub fn stage_table() -> Result<Vec<StageRow>> {
    let x = alternating_sequence();
    let ends = stage_schedule().stage_ends();
    let series = block_frequency_series(&x, &[0, 1], &ends)?;
    Ok(series
        .into_iter()
        .enumerate()
        .map(|(i, (end, p))| {
            let odd = i % 2 == 0;
            StageRow {
                stage: i + 1,
                end,
                pattern: if odd { "0*" } else { "0**0" },
                frequency_01: p,
                target: if odd { 0.25 } else { 3.0 / 16.0 },
            }
        })
        .collect())
}

fn fail(id: u32, name: &'static str, e: crate::Error) -> CriterionOutcome {
    CriterionOutcome::new(id, name, false, format!("error: {e}"))
}

macro_rules! guarded {
    ($id:expr, $name:expr, $body:expr) => {
        match (|| -> Result<CriterionOutcome> { $body })() {
            Ok(o) => o,
            Err(e) => fail($id, $name, e),
        }
    };
}

pub fn criterion_1() -> CriterionOutcome {
    const NAME: &str = "normality proxy";
    guarded!(1, NAME, {
        let x = champernowne();
        let h = restricted_entropy(&distribution(&x, NORMALITY_N, 8, Mode::Sliding)?);
        let ks: Vec<i64> = (1..=8).collect();
        let series = weyl_series(&x, &ks, &[NORMALITY_N], 64)?;
        let max_s = series.iter().map(|s| s.values[0].norm()).fold(0.0, f64::max);
        let passed = h >= NORMALITY_MIN_ENTROPY && max_s <= NORMALITY_MAX_WEYL;
        Ok(CriterionOutcome::new(1, NAME, passed, format!("restricted H_8 = {h:.4}, max |S_n(k)| = {max_s:.4}")))
    })
}

pub fn criterion_2() -> CriterionOutcome {
    const NAME: &str = "dilution 0*";
    guarded!(2, NAME, {
        let a = diluted_a();
        let p = distribution(&a, DILUTION_N, 2, Mode::Sliding)?.probability(&[0, 1]);
        let h = normalized_entropy(&distribution(&a, DILUTION_N, 2, Mode::Disjoint)?);
        let passed = (p - 0.25).abs() <= DILUTION_TOL && (h - 0.5).abs() <= DILUTION_TOL;
        Ok(CriterionOutcome::new(2, NAME, passed, format!("P(a, 01) = {p:.4} (target 0.25), disjoint H_2 = {h:.4} (target 0.5)")))
    })
}

pub fn criterion_3() -> CriterionOutcome {
    const NAME: &str = "dilution 0**0";
    guarded!(3, NAME, {
        let p = distribution(&diluted_b(), DILUTION_N, 2, Mode::Sliding)?.probability(&[0, 1]);
        let passed = (p - 3.0 / 16.0).abs() <= DILUTION_TOL;
        Ok(CriterionOutcome::new(3, NAME, passed, format!("P(b, 01) = {p:.4} (target 0.1875)")))
    })
}

/// Stage-end checks use the later half of each parity class, where the
/// stage dominates the prefix.
pub fn criterion_4() -> CriterionOutcome {
    const NAME: &str = "stagewise oscillation";
    guarded!(4, NAME, {
        let x = alternating_sequence();
        let ends = stage_schedule().stage_ends();
        let n_max = *ends.last().unwrap();
        let mut all: Vec<usize> = geometric_checkpoints(10, n_max).into_iter().chain(ends.iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        let series = block_frequency_series(&x, &[0, 1], &all)?;
        let at = |n: usize| series.iter().find(|p| p.0 == n).map(|p| p.1).unwrap();
        let odd: Vec<usize> = ends.iter().step_by(2).copied().collect();
        let even: Vec<usize> = ends.iter().skip(1).step_by(2).copied().collect();
        let tail = |v: &[usize]| v[v.len() - v.len().div_ceil(2)..].to_vec();
        let odd_ok = tail(&odd).iter().all(|&n| (at(n) - 0.25).abs() <= STAGE_TOL);
        let even_ok = tail(&even).iter().all(|&n| (at(n) - 3.0 / 16.0).abs() <= STAGE_TOL);
        let schedules =
            [Schedule::new("odd-stage ends", odd), Schedule::new("even-stage ends", even), Schedule::new("all-n", all)];
        let report = limit_report(&series, &schedules, LIMIT_TOL)?;
        let [o, e, a] = &report.schedules[..] else { unreachable!() };
        let (lo, le) = (o.limit.unwrap_or(f64::NAN), e.limit.unwrap_or(f64::NAN));
        let distinct = (lo - le).abs() > 2.0 * LIMIT_TOL;
        let passed = odd_ok
            && even_ok
            && o.verdict == Verdict::Converged
            && e.verdict == Verdict::Converged
            && distinct
            && a.verdict == Verdict::Oscillating;
        let values: Vec<String> = ends.iter().map(|&n| format!("{:.4}", at(n))).collect();
        Ok(CriterionOutcome::new(
            4,
            NAME,
            passed,
            format!(
                "P(., 01) at stage ends [{}]; odd limit {lo:.4} ({:?}), even limit {le:.4} ({:?}), all-n {:?}",
                values.join(", "),
                o.verdict,
                e.verdict,
                a.verdict
            ),
        ))
    })
}

pub fn criterion_5() -> CriterionOutcome {
    const NAME: &str = "Fourier/empirical consistency";
    guarded!(5, NAME, {
        let mut worst = 0.0f64;
        for x in [champernowne(), alternating_sequence()] {
            let nu = empirical_measure(&x, FOURIER_N, FOURIER_DEPTH)?;
            let ks: Vec<i64> = (1..=8).collect();
            for s in weyl_series(&x, &ks, &[FOURIER_N], 64)? {
                let f = measure_fourier(&nu, s.k, FOURIER_DEPTH)?;
                worst = worst.max((s.values[0] - f.value).norm());
            }
        }
        Ok(CriterionOutcome::new(5, NAME, worst <= FOURIER_TOL, format!("max |S_n(k) - nu_n^(k)| = {worst:.3e}")))
    })
}

pub fn criterion_6() -> CriterionOutcome {
    const NAME: &str = "pushforward Fourier shift";
    guarded!(6, NAME, {
        let bern = AnalyticMeasure::binary_bernoulli(0.3)?;
        let mu = AnalyticMeasure::interval_lift(IntervalMasses::of(&bern, PUSHFORWARD_DEPTH)?);
        let push = pushforward_integer(&mu, 3)?;
        let mut worst = 0.0f64;
        for k in -4i64..=4 {
            let a = measure_fourier(&push, k, PUSHFORWARD_DEPTH)?.value;
            let b = measure_fourier(&mu, 3 * k, PUSHFORWARD_DEPTH)?.value;
            worst = worst.max((a - b).norm());
        }
        Ok(CriterionOutcome::new(6, NAME, worst <= PUSHFORWARD_TOL, format!("max gap over k in -4..4 = {worst:.3e}")))
    })
}

pub fn criterion_7() -> CriterionOutcome {
    const NAME: &str = "partition invariance";
    guarded!(7, NAME, {
        let mu = AnalyticMeasure::binary_bernoulli(0.3)?;
        let mut passed = true;
        let mut ratio = 0.0f64;
        for l in 4..=12 {
            let r = check_partition_invariance(&mu, 2, 3, l, 0.0)?;
            passed &= r.passed;
            ratio = ratio.max(r.difference / r.bound);
        }
        Ok(CriterionOutcome::new(7, NAME, passed, format!("max difference / (2/n) over l in 4..12 = {ratio:.3}")))
    })
}

pub fn criterion_8() -> CriterionOutcome {
    const NAME: &str = "Bernoulli exactness";
    guarded!(8, NAME, {
        let n_list: Vec<usize> = (1..=20).collect();
        let mut worst = 0.0f64;
        for p in [0.1, 0.3, 0.5] {
            let mu = AnalyticMeasure::binary_bernoulli(p)?;
            let h = binary_entropy(p);
            for v in renyi_profile(&mu, 2, &n_list)?.values {
                worst = worst.max((v - h).abs());
            }
        }
        Ok(CriterionOutcome::new(8, NAME, worst <= BERNOULLI_TOL, format!("max |H^2_n/n - H(p)| = {worst:.2e}")))
    })
}

pub fn criterion_9() -> CriterionOutcome {
    const NAME: &str = "mu-Champernowne";
    guarded!(9, NAME, {
        let x = mu_champernowne_sequence()?;
        let h = restricted_entropy(&distribution(&x, MU_CHAMPERNOWNE_N, 8, Mode::Sliding)?);
        let full = normalized_entropy(&distribution(&x, MU_CHAMPERNOWNE_N, 8, Mode::Sliding)?);
        let passed = (h - 0.5).abs() <= MU_CHAMPERNOWNE_TOL;
        Ok(CriterionOutcome::new(
            9,
            NAME,
            passed,
            format!(
                "p = {:.6}, restricted H_8 = {h:.4} (target 0.5), unrestricted H_8 = {full:.4}",
                inverse_binary_entropy(0.5)
            ),
        ))
    })
}

pub fn criterion_10() -> CriterionOutcome {
    const NAME: &str = "arithmetic preservation";
    guarded!(10, NAME, {
        let r = diluted_a();
        let scaled = multiply_mod1(&r, 3, ARITH_N + 64)?.require(ARITH_N + 64)?.to_sequence()?;
        let cps: Vec<usize> = geometric_checkpoints(10, ARITH_N);
        let dim = |x: &SymbolSequence| dimension_profile(x, &[8], &cps, Mode::Disjoint, 0.5).map(|d| d.dim_lo);
        let (d_r, d_3r) = (dim(&r)?, dim(&scaled)?);
        let ks: Vec<i64> = (1..=8).collect();
        let ks3: Vec<i64> = ks.iter().map(|k| 3 * k).collect();
        let s_scaled = weyl_series(&scaled, &ks, &[ARITH_N], 64)?;
        let s_r = weyl_series(&r, &ks3, &[ARITH_N], 64)?;
        let phase = s_scaled
            .iter()
            .zip(&s_r)
            .map(|(a, b)| (a.values[0] - b.values[0]).norm())
            .fold(0.0, f64::max);
        let passed = (d_3r - d_r).abs() <= ARITH_DIM_TOL && phase <= ARITH_PHASE_TOL;
        Ok(CriterionOutcome::new(
            10,
            NAME,
            passed,
            format!("disjoint dim_lo(r) = {d_r:.4}, dim_lo(3r) = {d_3r:.4}, max phase gap = {phase:.2e}"),
        ))
    })
}

fn random_gambler(rng: &mut ChaCha8Rng) -> Gambler {
    let states = rng.random_range(1..=8);
    let delta = (0..states).map(|_| [rng.random_range(0..states), rng.random_range(0..states)]).collect();
    let beta = (0..states)
        .map(|_| match rng.random_range(0..10) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random::<f64>(),
        })
        .collect();
    let c0 = rng.random_range(0.25..4.0);
    Gambler::new(delta, beta, rng.random_range(0..states), c0).expect("valid by construction")
}

pub fn criterion_11() -> CriterionOutcome {
    const NAME: &str = "s-gale identity";
    guarded!(11, NAME, {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5ca1e);
        let mut worst = 0.0f64;
        let mut checks = 0usize;
        for _ in 0..SGALE_GAMBLERS {
            let g = random_gambler(&mut rng);
            let s: f64 = rng.random_range(0.0..2.0);
            let scale = (-s).exp2();
            for len in 0..SGALE_MAX_LEN {
                for idx in 0..1u64 << len {
                    let mut w: Vec<u8> = (0..len).rev().map(|i| ((idx >> i) & 1) as u8).collect();
                    let d = g.capital(s, &w);
                    w.push(0);
                    let d0 = g.capital(s, &w);
                    *w.last_mut().unwrap() = 1;
                    let d1 = g.capital(s, &w);
                    worst = worst.max((d - scale * (d0 + d1)).abs() / d.max(1.0));
                    checks += 1;
                }
            }
        }
        let zero = SymbolSequence::periodic(2, vec![0])?;
        let g = Gambler::new(vec![[0, 0]], vec![0.0], 0, 1.0)?;
        let mut exact = true;
        for s in [0.0, 0.25, 0.5, 1.0, 1.75] {
            let trace = sgale_evaluate(&g, s, &zero, 4096)?;
            exact &= trace.log2_values.iter().enumerate().all(|(n, &v)| v == s * n as f64);
        }
        let passed = worst <= SGALE_REL_TOL && exact;
        Ok(CriterionOutcome::new(
            11,
            NAME,
            passed,
            format!("{checks} identities, max relative error {worst:.2e}; zero-bet capital exact: {exact}"),
        ))
    })
}

pub fn corpora() -> Result<Vec<(&'static str, SymbolSequence)>> {
    Ok(vec![
        ("champernowne(2)", champernowne()),
        ("champernowne(3)", SymbolSequence::champernowne(3)?),
        ("a", diluted_a()),
        ("b", diluted_b()),
        ("alternating", alternating_sequence()),
        ("mu-champernowne", mu_champernowne_sequence()?),
    ])
}

pub fn criterion_12() -> CriterionOutcome {
    const NAME: &str = "entropy inequalities";
    guarded!(12, NAME, {
        let n = INEQUALITY_N;
        let mut violations = Vec::new();
        let mut worst_sub = f64::NEG_INFINITY;
        for (name, x) in corpora()? {
            let mut sliding = [0.0; 9];
            let mut disjoint = [0.0; 9];
            for l in 1..=8 {
                let d = distribution(&x, n, l, Mode::Sliding)?;
                let (h, ht) = (normalized_entropy(&d), restricted_entropy(&d));
                if !(ht <= h && h <= ht + 2.0 / l as f64) {
                    violations.push(format!("{name}: restricted sandwich at l={l}"));
                }
                sliding[l] = h;
                disjoint[l] = normalized_entropy(&distribution(&x, n, l, Mode::Disjoint)?);
            }
            for l in [1, 2, 4] {
                for kl in [2, 4, 8] {
                    if kl > l && disjoint[kl] > disjoint[l] + INEQUALITY_SLACK {
                        violations.push(format!("{name}: disjoint H_{kl} > H_{l}"));
                    }
                }
            }
            for l in 1..8 {
                for m in 1..=8 - l {
                    let excess = (l + m) as f64 * sliding[l + m] - l as f64 * sliding[l] - m as f64 * sliding[m];
                    worst_sub = worst_sub.max(excess / (l + m) as f64);
                    if excess > INEQUALITY_SLACK * (l + m) as f64 {
                        violations.push(format!("{name}: subadditivity at ({l}, {m})"));
                    }
                }
            }
        }
        let passed = violations.is_empty();
        let detail = if passed {
            format!("6 corpora, largest normalized subadditivity excess {worst_sub:.4}")
        } else {
            violations.join("; ")
        };
        Ok(CriterionOutcome::new(12, NAME, passed, detail))
    })
}

pub fn run(id: u32) -> Option<CriterionOutcome> {
    Some(match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(),
        _ => return None,
    })
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=12).filter_map(run).collect()
}
