//! Parsers for the list, range and checkpoint arguments used on the command line.

use std::str::FromStr;

use crate::entropy::{geometric_checkpoints, linear_checkpoints};
use crate::error::{Error, Result};

const MAX_EXPANDED: usize = 1 << 20;

/// Parses comma-separated integers and inclusive ranges, e.g. `1,2,4..6` or `-4..4`.
pub fn parse_int_list<T>(s: &str) -> Result<Vec<T>>
where
    T: FromStr + TryFrom<i64>,
{
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if part.is_empty() {
            return Err(Error::Parse(format!("empty item in list {s:?}")));
        }
        match split_range(part) {
            Some((lo, hi)) => {
                let lo: i64 = lo.trim().parse().map_err(|_| Error::Parse(format!("bad range start in {part:?}")))?;
                let hi: i64 = hi.trim().parse().map_err(|_| Error::Parse(format!("bad range end in {part:?}")))?;
                if hi < lo {
                    return Err(Error::Parse(format!("empty range {part:?}")));
                }
                if (hi as i128 - lo as i128) as usize >= MAX_EXPANDED - out.len() {
                    return Err(Error::Parse(format!("range {part:?} is too long")));
                }
                for v in lo..=hi {
                    out.push(T::try_from(v).map_err(|_| Error::Parse(format!("{v} is out of range")))?);
                }
            }
            None => out.push(part.parse().map_err(|_| Error::Parse(format!("bad number {part:?}")))?),
        }
        if out.len() > MAX_EXPANDED {
            return Err(Error::Parse("list is too long".into()));
        }
    }
    Ok(out)
}

/// Splits `a..b` at the first `..` that is not part of a leading sign.
fn split_range(part: &str) -> Option<(&str, &str)> {
    part.find("..").map(|i| (&part[..i], &part[i + 2..]))
}

/// Checkpoint lists ending at `n_max`:
/// `geometric` (powers of two from 1024), `geometric:<e>` (from `2^e`),
/// `linear:<count>`, or an explicit increasing list.
pub fn parse_checkpoints(spec: &str, n_max: usize) -> Result<Vec<usize>> {
    let spec = spec.trim();
    let cps = if spec == "geometric" {
        geometric_checkpoints(10, n_max)
    } else if let Some(e) = spec.strip_prefix("geometric:") {
        let e: u32 = e.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in {spec:?}")))?;
        if e >= usize::BITS - 1 {
            return Err(Error::InvalidCheckpoints(format!("exponent {e} is too large")));
        }
        geometric_checkpoints(e, n_max)
    } else if let Some(c) = spec.strip_prefix("linear:") {
        let c: usize = c.trim().parse().map_err(|_| Error::Parse(format!("bad count in {spec:?}")))?;
        if c == 0 || c > MAX_EXPANDED {
            return Err(Error::InvalidCheckpoints(format!("count {c} out of range")));
        }
        linear_checkpoints(n_max, c)
    } else {
        parse_int_list::<u64>(spec)?.into_iter().map(|v| v as usize).collect()
    };
    if n_max == 0 || cps.is_empty() || cps[0] == 0 {
        return Err(Error::InvalidCheckpoints(format!("{spec:?} gives no positive checkpoints")));
    }
    crate::entropy::check_checkpoints(&cps)?;
    if *cps.last().unwrap() > n_max {
        return Err(Error::InvalidCheckpoints(format!("checkpoint {} exceeds n = {n_max}", cps.last().unwrap())));
    }
    Ok(cps)
}
