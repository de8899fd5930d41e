//! Streaming base-`b` arithmetic modulo 1 on digit sequences: multiplication
//! by a positive integer and addition of a rational, with certified output
//! digits.
//!
//! A prefix of `N` input digits pins `v_b(x)` to an interval of width `b^{-N}`.
//! The transformed value then lies in an interval `[L, U]`, and an output
//! digit is certified once it is shared by both endpoints.

use serde::Serialize;

use crate::entropy::{dimension_profile, geometric_checkpoints, DimensionEstimate, Mode};
use crate::error::{Error, Result};
use crate::sequences::SymbolSequence;

/// Output digits of a transformed number.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifiedDigits {
    pub base: u32,
    pub digits: Vec<u8>,
    /// The first `certified_count` digits equal the true expansion.
    pub certified_count: usize,
    /// Input digits read to reach the certification.
    pub input_digits: usize,
    /// Set when fewer than the requested digits could be certified, or when
    /// the input ended and was read as terminating.
    pub diagnostic: Option<String>,
}

impl CertifiedDigits {
    pub fn certified(&self) -> &[u8] {
        &self.digits[..self.certified_count]
    }

    /// The certified digits as a finite sequence.
    pub fn to_sequence(&self) -> Result<SymbolSequence> {
        SymbolSequence::from_digits(self.base, self.certified().to_vec())
    }

    /// Fails unless at least `wanted` digits are certified.
    pub fn require(self, wanted: usize) -> Result<Self> {
        if self.certified_count < wanted {
            return Err(Error::Uncertified { wanted, certified: self.certified_count });
        }
        Ok(self)
    }
}

/// A fixed-point number `int + Σ frac_i b^{-(i+1)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Fixed {
    int: u64,
    frac: Vec<u8>,
}

impl Fixed {
    fn add_ulps(&self, base: u32, mut amount: u64) -> Fixed {
        let mut out = self.clone();
        let b = base as u64;
        for d in out.frac.iter_mut().rev() {
            if amount == 0 {
                break;
            }
            let s = *d as u64 + amount % b;
            amount /= b;
            *d = (s % b) as u8;
            amount += s / b;
        }
        out.int += amount;
        out
    }

    fn common_prefix(&self, other: &Fixed) -> usize {
        if self.int != other.int {
            return 0;
        }
        self.frac.iter().zip(&other.frac).take_while(|(a, b)| a == b).count()
    }
}

fn multiply(digits: &[u8], base: u32, m: u64) -> Fixed {
    let b = base as u128;
    let mut carry: u128 = 0;
    let mut frac = vec![0u8; digits.len()];
    for (i, &d) in digits.iter().enumerate().rev() {
        let p = d as u128 * m as u128 + carry;
        frac[i] = (p % b) as u8;
        carry = p / b;
    }
    Fixed { int: carry as u64, frac }
}

fn read_prefix(x: &SymbolSequence, n: usize) -> (Vec<u8>, bool) {
    let avail = x.available(n);
    let digits = x.prefix(avail).unwrap_or_default();
    (digits, avail < n)
}

fn fresh_base_digits(m: u64, base: u32) -> usize {
    let mut k = 1;
    let mut p = base as u128;
    while p <= m as u128 {
        p *= base as u128;
        k += 1;
    }
    k
}

/// Runs the certification loop with `transform(prefix) = (lower, width)`.
fn certify<F>(x: &SymbolSequence, want: usize, slack: usize, transform: F) -> Result<CertifiedDigits>
where
    F: Fn(&[u8], bool) -> (Fixed, u64),
{
    let base = x.base();
    let horizon = 4 * want + 64;
    let mut n = (want + slack + 2).min(horizon);
    loop {
        let (mut digits, finite) = read_prefix(x, n);
        let read = digits.len();
        // a finite input is read as terminating, so its value is exact
        digits.resize(n, 0);
        let (mut lower, width) = transform(&digits, finite);
        let upper = lower.add_ulps(base, width);
        let certified = if width == 0 { lower.frac.len() } else { lower.common_prefix(&upper) };
        let certified = certified.min(want);
        if certified == want || finite || n == horizon {
            let diagnostic = if certified < want {
                Some(format!(
                    "certified {certified} of {want} digits within a horizon of {n} input digits; the result is \
                     indistinguishable so far from a base-{base} rational ending in a run of {} digits",
                    base - 1
                ))
            } else if finite {
                Some(format!("input ended after {read} digits and was read as terminating"))
            } else {
                None
            };
            lower.frac.truncate(want);
            return Ok(CertifiedDigits {
                base,
                digits: lower.frac,
                certified_count: certified,
                input_digits: read,
                diagnostic,
            });
        }
        n = (2 * n).min(horizon);
    }
}

/// First `want` digits of `(m · v_b(x)) mod 1`.
pub fn multiply_mod1(x: &SymbolSequence, m: u64, want: usize) -> Result<CertifiedDigits> {
    if m == 0 {
        return Err(Error::InvalidParameter("multiplier must be at least 1".into()));
    }
    let base = x.base();
    certify(x, want, fresh_base_digits(m, base), |digits, finite| {
        let mut lower = multiply(digits, base, m);
        lower.int = 0;
        (lower, if finite { 0 } else { m })
    })
}

/// First `want` digits of `(v_b(x) + p/q) mod 1`.
pub fn add_rational_mod1(x: &SymbolSequence, p: i64, q: u64, want: usize) -> Result<CertifiedDigits> {
    if q == 0 {
        return Err(Error::InvalidParameter("denominator must be positive".into()));
    }
    let base = x.base();
    let b = base as u128;
    let p = (p as i128).rem_euclid(q as i128) as u128;
    let q = q as u128;
    certify(x, want, 2, |digits, finite| {
        // digits of p/q by long division
        let mut rem = p;
        let mut frac = Vec::with_capacity(digits.len());
        for _ in 0..digits.len() {
            rem *= b;
            frac.push((rem / q) as u8);
            rem %= q;
        }
        // add the input digits
        let mut sum = Fixed { int: 0, frac };
        let mut carry = 0u8;
        for i in (0..digits.len()).rev() {
            let s = sum.frac[i] as u32 + digits[i] as u32 + carry as u32;
            sum.frac[i] = (s % base) as u8;
            carry = (s / base) as u8;
        }
        let width = u64::from(!finite) + u64::from(rem != 0);
        (Fixed { int: 0, frac: sum.frac }, width)
    })
}

/// Dimension estimates of `r`, `s·r` and `r + s/t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreservationReport {
    pub s: u64,
    pub t: u64,
    pub l: usize,
    pub n: usize,
    pub r: DimensionEstimate,
    /// `s·r mod 1`, standing in for `q·r = (s·r)/t`.
    pub scaled: DimensionEstimate,
    /// `r + s/t mod 1`.
    pub shifted: DimensionEstimate,
    /// Largest pairwise difference of `dim_lo` at `l`.
    pub max_gap: f64,
}

/// Compares finite-state dimension estimates of `r = v_b(x)`, `s·r` and
/// `r + s/t`, each at block length `l` over a prefix of `n` digits.
///
/// Multiplication by a rational `s/t` is reported through its integer
/// numerator: dividing by `t` would need unbounded lookahead, and
/// multiplication by `t` maps `q·r` back onto `s·r`.
pub fn preservation_report(x: &SymbolSequence, s: u64, t: u64, l: usize, n: usize, mode: Mode) -> Result<PreservationReport> {
    if s == 0 || t == 0 {
        return Err(Error::InvalidParameter("numerator and denominator must be positive".into()));
    }
    let checkpoints = geometric_checkpoints(10, n).into_iter().filter(|&c| c >= l).collect::<Vec<_>>();
    let estimate = |seq: &SymbolSequence| dimension_profile(seq, &[l], &checkpoints, mode, 0.5);
    let r = estimate(x)?;
    let scaled = estimate(&multiply_mod1(x, s, n)?.require(n)?.to_sequence()?)?;
    let shifted = estimate(&add_rational_mod1(x, s as i64, t, n)?.require(n)?.to_sequence()?)?;
    let dims = [r.dim_lo, scaled.dim_lo, shifted.dim_lo];
    let max_gap = dims.iter().flat_map(|a| dims.iter().map(move |b| (a - b).abs())).fold(0.0, f64::max);
    Ok(PreservationReport { s, t, l, n, r, scaled, shifted, max_gap })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite(digits: &[u8]) -> SymbolSequence {
        SymbolSequence::from_digits(2, digits.to_vec()).unwrap()
    }

    #[test]
    fn multiply_examples() {
        let r = multiply_mod1(&finite(&[0, 1, 0, 1]), 3, 4).unwrap();
        assert_eq!(r.certified(), &[1, 1, 1, 1]);
        let r = multiply_mod1(&finite(&[1]), 2, 5).unwrap();
        assert_eq!(r.certified(), &[0, 0, 0, 0, 0]);
        // the same values with an infinite zero tail need extension but agree
        let x = SymbolSequence::eventually_periodic(2, vec![0, 1, 0, 1], vec![0]).unwrap();
        let r = multiply_mod1(&x, 3, 16).unwrap();
        assert_eq!(r.certified_count, 16);
        assert_eq!(&r.digits[..6], &[1, 1, 1, 1, 0, 0]);
        assert!(r.diagnostic.is_none());
    }

    #[test]
    fn identity_multiplier() {
        let c = SymbolSequence::champernowne(2).unwrap();
        let r = multiply_mod1(&c, 1, 500).unwrap();
        assert_eq!(r.certified_count, 500);
        assert_eq!(r.digits, c.prefix(500).unwrap());
    }

    #[test]
    fn add_examples() {
        let c = SymbolSequence::champernowne(3).unwrap();
        assert_eq!(add_rational_mod1(&c, 0, 5, 300).unwrap().digits, c.prefix(300).unwrap());
        let zero = SymbolSequence::periodic(2, vec![0]).unwrap();
        let r = add_rational_mod1(&zero, 1, 2, 6).unwrap();
        assert_eq!(r.certified(), &[1, 0, 0, 0, 0, 0]);
        // 1/4 + 1/3 = 7/12 = 0.100101010...
        let quarter = SymbolSequence::eventually_periodic(2, vec![0, 1], vec![0]).unwrap();
        let r = add_rational_mod1(&quarter, 1, 3, 10).unwrap();
        assert_eq!(r.certified(), &[1, 0, 0, 1, 0, 1, 0, 1, 0, 1]);
        let r = add_rational_mod1(&quarter, -2, 3, 4).unwrap();
        assert_eq!(r.certified_count, 4);
    }

    #[test]
    fn trailing_ones_exhaust_the_horizon() {
        // v = 1/3 = 0.0101..., times 3 is 1, which reads as 0.111... forever
        let third = SymbolSequence::periodic(2, vec![0, 1]).unwrap();
        let r = multiply_mod1(&third, 3, 20).unwrap();
        assert!(r.certified_count < 20);
        assert!(r.diagnostic.is_some());
        assert!(matches!(r.require(20), Err(Error::Uncertified { wanted: 20, .. })));
    }

    #[test]
    fn rejects_zero_parameters() {
        let c = SymbolSequence::champernowne(2).unwrap();
        assert!(multiply_mod1(&c, 0, 5).is_err());
        assert!(add_rational_mod1(&c, 1, 0, 5).is_err());
    }
}
