//! Finite-state gamblers on binary sequences and their `s`-gales
//! `d(wb) = 2^s d(w) ((1-b)(1-β(q)) + b β(q))`, kept in the log domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::sequences::SymbolSequence;

/// `G = (Q, δ, β, q0, c0)` over `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gambler {
    pub states: usize,
    /// `delta[q][b]` is the state after reading bit `b` in state `q`.
    pub delta: Vec<[usize; 2]>,
    /// Fraction of capital bet on the next bit being 1.
    pub beta: Vec<f64>,
    pub q0: usize,
    pub c0: f64,
}

impl Gambler {
    pub fn new(delta: Vec<[usize; 2]>, beta: Vec<f64>, q0: usize, c0: f64) -> Result<Self> {
        let g = Self { states: delta.len(), delta, beta, q0, c0 };
        g.validate()?;
        Ok(g)
    }

    /// Parses `{"states":k,"delta":[[..],..],"beta":[..],"q0":0,"c0":1}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let g: Gambler = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGambler(m));
        if self.states == 0 {
            return bad("at least one state is required".into());
        }
        if self.delta.len() != self.states || self.beta.len() != self.states {
            return bad(format!(
                "{} states but {} transition rows and {} bets",
                self.states,
                self.delta.len(),
                self.beta.len()
            ));
        }
        if let Some((q, row)) = self.delta.iter().enumerate().find(|(_, r)| r.iter().any(|&t| t >= self.states)) {
            return bad(format!("transition {row:?} from state {q} leaves the state set"));
        }
        if let Some((q, b)) = self.beta.iter().enumerate().find(|(_, b)| !(0.0..=1.0).contains(*b)) {
            return bad(format!("bet {b} in state {q} is outside [0, 1]"));
        }
        if self.q0 >= self.states {
            return bad(format!("start state {} does not exist", self.q0));
        }
        if !self.c0.is_finite() || self.c0 < 0.0 {
            return bad(format!("initial capital {} must be finite and nonnegative", self.c0));
        }
        Ok(())
    }

    /// A gambler that stakes everything on `prefix` followed by `period`
    /// repeated, betting evenly while it reads the prefix.
    pub fn periodic_predictor(prefix: &[u8], period: &[u8]) -> Result<Self> {
        if period.is_empty() || prefix.iter().chain(period).any(|&b| b > 1) {
            return Err(Error::InvalidGambler("predictor needs a nonempty binary period".into()));
        }
        let p = prefix.len();
        let states = p + period.len();
        let delta = (0..states).map(|q| if q + 1 < states { [q + 1; 2] } else { [p; 2] }).collect();
        let beta = (0..states).map(|q| if q < p { 0.5 } else { period[q - p] as f64 }).collect();
        Self::new(delta, beta, 0, 1.0)
    }

    /// `log2 d^{(s)}(w)`, or `-∞` once the gambler is ruined.
    pub fn log2_capital(&self, s: f64, w: &[u8]) -> f64 {
        let mut q = self.q0;
        let mut acc = CompensatedSum::new();
        for &b in w {
            let factor = if b == 0 { 1.0 - self.beta[q] } else { self.beta[q] };
            if factor == 0.0 {
                return f64::NEG_INFINITY;
            }
            if factor != 1.0 {
                acc.add(factor.log2());
            }
            q = self.delta[q][b as usize];
        }
        self.c0.log2() + s * w.len() as f64 + acc.value()
    }

    /// `d^{(s)}(w)`.
    pub fn capital(&self, s: f64, w: &[u8]) -> f64 {
        self.log2_capital(s, w).exp2()
    }
}

/// Capital along a prefix of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SgaleTrace {
    pub s: f64,
    /// `log2 d(x_0 .. x_{i-1})` for `i = 0..=n`.
    pub log2_values: Vec<f64>,
    /// State after reading `i` digits.
    pub states: Vec<usize>,
    /// Prefix length at which the capital first became zero.
    pub ruined_at: Option<usize>,
}

impl SgaleTrace {
    pub fn values(&self) -> Vec<f64> {
        self.log2_values.iter().map(|v| v.exp2()).collect()
    }
}

fn binary_prefix(x: &SymbolSequence, n: usize) -> Result<Vec<u8>> {
    if x.base() != 2 {
        return Err(Error::InvalidGambler(format!("gamblers read binary sequences, got base {}", x.base())));
    }
    x.prefix(n)
}

/// Runs the recursion along `x_0 .. x_{n-1}`.
pub fn sgale_evaluate(g: &Gambler, s: f64, x: &SymbolSequence, n: usize) -> Result<SgaleTrace> {
    g.validate()?;
    let digits = binary_prefix(x, n)?;
    let log_c0 = g.c0.log2();
    let mut log2_values = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut acc = CompensatedSum::new();
    let mut q = g.q0;
    let mut ruined_at = if g.c0 == 0.0 { Some(0) } else { None };
    log2_values.push(log_c0);
    states.push(q);
    for (i, &b) in digits.iter().enumerate() {
        let factor = if b == 0 { 1.0 - g.beta[q] } else { g.beta[q] };
        if factor == 0.0 && ruined_at.is_none() {
            ruined_at = Some(i + 1);
        }
        if factor != 1.0 && factor != 0.0 {
            acc.add(factor.log2());
        }
        q = g.delta[q][b as usize];
        let v = if ruined_at.is_some() { f64::NEG_INFINITY } else { log_c0 + s * (i + 1) as f64 + acc.value() };
        log2_values.push(v);
        states.push(q);
    }
    Ok(SgaleTrace { s, log2_values, states, ruined_at })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuccessVerdict {
    Succeeds,
    Fails,
    Inconclusive,
}

/// Growth-rate diagnostics of an `s`-gale on a prefix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuccessReport {
    pub s: f64,
    pub checkpoints: Vec<usize>,
    pub log2_capital: Vec<f64>,
    /// `log2 d(x_0^{n-1}) / n` at each checkpoint.
    pub growth_rates: Vec<f64>,
    /// Max and min growth rate over the later half of the checkpoints.
    pub limsup_proxy: f64,
    pub liminf_proxy: f64,
    /// Change of log2 capital per digit across the later half.
    pub trend: f64,
    pub threshold_log2: f64,
    pub verdict: SuccessVerdict,
}

/// "Succeeds" when the final log2 capital exceeds `threshold_log2` and is
/// still rising; "fails" on ruin or a falling trend below the threshold.
pub fn success_report(
    g: &Gambler,
    s: f64,
    x: &SymbolSequence,
    checkpoints: &[usize],
    threshold_log2: f64,
) -> Result<SuccessReport> {
    crate::entropy::check_checkpoints(checkpoints)?;
    if checkpoints[0] == 0 {
        return Err(Error::InvalidCheckpoints("checkpoints must be positive".into()));
    }
    let trace = sgale_evaluate(g, s, x, *checkpoints.last().unwrap())?;
    let log2_capital: Vec<f64> = checkpoints.iter().map(|&n| trace.log2_values[n]).collect();
    let growth_rates: Vec<f64> = checkpoints.iter().zip(&log2_capital).map(|(&n, v)| v / n as f64).collect();
    let tail_start = checkpoints.len() / 2;
    let tail = &growth_rates[tail_start..];
    let limsup_proxy = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let liminf_proxy = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let (first, last) = (tail_start, checkpoints.len() - 1);
    let trend = if last > first && log2_capital[last].is_finite() && log2_capital[first].is_finite() {
        (log2_capital[last] - log2_capital[first]) / (checkpoints[last] - checkpoints[first]) as f64
    } else if trace.ruined_at.is_some() {
        f64::NEG_INFINITY
    } else {
        0.0
    };
    let final_value = log2_capital[last];
    let verdict = if final_value >= threshold_log2 && trend > 0.0 {
        SuccessVerdict::Succeeds
    } else if trace.ruined_at.is_some() || (trend < 0.0 && final_value < threshold_log2) {
        SuccessVerdict::Fails
    } else {
        SuccessVerdict::Inconclusive
    };
    Ok(SuccessReport {
        s,
        checkpoints: checkpoints.to_vec(),
        log2_capital,
        growth_rates,
        limsup_proxy,
        liminf_proxy,
        trend,
        threshold_log2,
        verdict,
    })
}
