use serde::{Deserialize, Serialize};

use super::{pushforward_integer, AnalyticMeasure, IntervalMasses};
use crate::error::{Error, Result};
use crate::sequences::SymbolSequence;

const MAX_PUSHFORWARD_FACTOR: u32 = 1 << 16;
const MAX_NESTING: usize = 4;

/// JSON description of an [`AnalyticMeasure`].
///
/// ```json
/// {"kind":"bernoulli","p":[0.7,0.3]}
/// {"kind":"markov","pi":[0.5,0.5],"P":[[0.9,0.1],[0.1,0.9]]}
/// {"kind":"pointmass","digits":"01","base":2}
/// {"kind":"pushforward","m":3,"inner":{"kind":"bernoulli","p":[0.7,0.3]}}
/// {"kind":"lift","base":2,"masses":[0.25,0.25,0.5,0.0]}
/// ```
///
/// Point-mass digits repeat periodically. Lift masses are the finest level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureSpec {
    Bernoulli {
        p: Vec<f64>,
    },
    Markov {
        pi: Vec<f64>,
        #[serde(rename = "P")]
        transition: Vec<Vec<f64>>,
    },
    Pointmass {
        digits: String,
        #[serde(default = "default_base")]
        base: u32,
    },
    Pushforward {
        m: u32,
        inner: Box<MeasureSpec>,
    },
    Lift {
        masses: Vec<f64>,
        #[serde(default = "default_base")]
        base: u32,
    },
}

fn default_base() -> u32 {
    2
}

impl MeasureSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn build(&self) -> Result<AnalyticMeasure> {
        self.build_nested(0)
    }

    fn build_nested(&self, nesting: usize) -> Result<AnalyticMeasure> {
        match self {
            MeasureSpec::Bernoulli { p } => AnalyticMeasure::bernoulli(p.clone()),
            MeasureSpec::Markov { pi, transition } => AnalyticMeasure::markov(pi.clone(), transition.clone()),
            MeasureSpec::Pointmass { digits, base } => {
                let file = crate::sequences::parse_digits(&format!("#base:{base}\n{digits}"))?;
                if file.digits.is_empty() {
                    return Err(Error::InvalidMeasure("point mass needs at least one digit".into()));
                }
                Ok(AnalyticMeasure::point_mass(SymbolSequence::periodic(file.base, file.digits)?))
            }
            MeasureSpec::Pushforward { m, inner } => {
                if nesting >= MAX_NESTING {
                    return Err(Error::InvalidMeasure(format!("pushforwards nest deeper than {MAX_NESTING}")));
                }
                if *m > MAX_PUSHFORWARD_FACTOR {
                    return Err(Error::InvalidMeasure(format!("pushforward factor {m} exceeds {MAX_PUSHFORWARD_FACTOR}")));
                }
                pushforward_integer(&inner.build_nested(nesting + 1)?, *m)
            }
            MeasureSpec::Lift { masses, base } => {
                Ok(AnalyticMeasure::interval_lift(IntervalMasses::from_finest(*base, masses.clone())?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let mu = MeasureSpec::parse(r#"{"kind":"bernoulli","p":[0.7,0.3]}"#).unwrap().build().unwrap();
        assert!((mu.cylinder_prob(&[1]) - 0.3).abs() < 1e-15);
        let mu = MeasureSpec::parse(r#"{"kind":"markov","pi":[0.5,0.5],"P":[[0.9,0.1],[0.1,0.9]]}"#)
            .unwrap()
            .build()
            .unwrap();
        assert!((mu.cylinder_prob(&[0, 0]) - 0.45).abs() < 1e-15);
        let mu = MeasureSpec::parse(r#"{"kind":"pointmass","digits":"01"}"#).unwrap().build().unwrap();
        assert_eq!(mu.cylinder_prob(&[0, 1, 0, 1]), 1.0);
        let mu = MeasureSpec::parse(r#"{"kind":"pushforward","m":3,"inner":{"kind":"bernoulli","p":[0.5,0.5]}}"#)
            .unwrap()
            .build()
            .unwrap();
        assert!((mu.cylinder_prob(&[1, 0]) - 0.25).abs() < 1e-12);
        let mu = MeasureSpec::parse(r#"{"kind":"lift","masses":[0.25,0.25,0.5,0.0]}"#).unwrap().build().unwrap();
        assert_eq!(mu.cylinder_prob(&[0]), 0.5);
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in [
            r#"{"kind":"bernoulli","p":[0.7,0.4]}"#,
            r#"{"kind":"bernoulli","p":[1.0]}"#,
            r#"{"kind":"pointmass","digits":"012"}"#,
            r#"{"kind":"pointmass","digits":""}"#,
            r#"{"kind":"lift","masses":[0.5,0.25,0.25]}"#,
            r#"{"kind":"pushforward","m":0,"inner":{"kind":"bernoulli","p":[0.5,0.5]}}"#,
        ] {
            let built = MeasureSpec::parse(bad).and_then(|s| s.build());
            assert!(built.is_err(), "{bad}");
        }
        assert!(MeasureSpec::parse(r#"{"kind":"gaussian"}"#).is_err());
    }
}
