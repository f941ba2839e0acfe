use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scale applied to link probabilities as a function of the sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SparsityRate {
    /// `n^exponent` with `exponent <= 0`.
    PowerOfN(f64),
    /// `log(n) / log(log(n)) / n`, the sparsest regime the denoised instrument supports.
    LogOverLogLogOverN,
    /// A fixed value in (0, 1].
    Constant(f64),
}

impl SparsityRate {
    pub fn power(exponent: f64) -> Result<Self> {
        let s = Self::PowerOfN(exponent);
        s.validate()?;
        Ok(s)
    }

    pub fn constant(value: f64) -> Result<Self> {
        let s = Self::Constant(value);
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::PowerOfN(e) if !(e.is_finite() && e <= 0.0) => {
                Err(Error::InvalidConfig(format!("sparsity exponent must be <= 0, got {e}")))
            }
            Self::Constant(v) if !(v > 0.0 && v <= 1.0) => {
                Err(Error::InvalidConfig(format!("constant sparsity must lie in (0, 1], got {v}")))
            }
            _ => Ok(()),
        }
    }

    /// Resolves `q(n)`. The log-log rate exceeds 1 for very small `n` and is
    /// capped there.
    pub fn resolve(&self, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            Self::PowerOfN(e) => nf.powf(e).min(1.0),
            Self::Constant(v) => v,
            Self::LogOverLogLogOverN => {
                let ll = nf.ln().ln();
                if ll <= 0.0 {
                    1.0
                } else {
                    (nf.ln() / ll / nf).min(1.0)
                }
            }
        }
    }
}

impl fmt::Display for SparsityRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PowerOfN(e) => write!(f, "n^{e}"),
            Self::LogOverLogLogOverN => write!(f, "loglog"),
            Self::Constant(v) => write!(f, "const:{v}"),
        }
    }
}

impl FromStr for SparsityRate {
    type Err = Error;

    /// Accepts `n^-0.5`, `n^-1/2`, `loglog` and `const:0.3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidConfig(format!("unrecognized sparsity `{s}` (expected n^<exp>, loglog or const:<q>)"));
        let rate = if s == "loglog" {
            Self::LogOverLogLogOverN
        } else if let Some(v) = s.strip_prefix("const:") {
            Self::Constant(v.parse().map_err(|_| bad())?)
        } else if let Some(e) = s.strip_prefix("n^") {
            let exponent = match e.split_once('/') {
                Some((num, den)) => {
                    let num: f64 = num.parse().map_err(|_| bad())?;
                    let den: f64 = den.parse().map_err(|_| bad())?;
                    num / den
                }
                None => e.parse().map_err(|_| bad())?,
            };
            Self::PowerOfN(exponent)
        } else {
            return Err(bad());
        };
        rate.validate()?;
        Ok(rate)
    }
}

impl Serialize for SparsityRate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SparsityRate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cli_forms() {
        assert_eq!("n^-0.5".parse::<SparsityRate>().unwrap(), SparsityRate::PowerOfN(-0.5));
        assert_eq!("n^-1/5".parse::<SparsityRate>().unwrap(), SparsityRate::PowerOfN(-0.2));
        assert_eq!("loglog".parse::<SparsityRate>().unwrap(), SparsityRate::LogOverLogLogOverN);
        assert_eq!("const:0.3".parse::<SparsityRate>().unwrap(), SparsityRate::Constant(0.3));
        assert!("n^0.5".parse::<SparsityRate>().is_err());
        assert!("const:0".parse::<SparsityRate>().is_err());
        assert!("dense".parse::<SparsityRate>().is_err());
    }

    #[test]
    fn resolves_in_unit_interval() {
        let rates = [
            SparsityRate::PowerOfN(-1.0),
            SparsityRate::PowerOfN(-0.2),
            SparsityRate::LogOverLogLogOverN,
            SparsityRate::Constant(0.3),
        ];
        for n in 2..5000 {
            for r in &rates {
                let q = r.resolve(n);
                assert!(q > 0.0 && q <= 1.0, "{r} at n={n}: {q}");
            }
        }
        for n in [2, 10, 1000] {
            assert_eq!(SparsityRate::PowerOfN(0.0).resolve(n), SparsityRate::Constant(1.0).resolve(n));
        }
        let q200 = SparsityRate::LogOverLogLogOverN.resolve(200);
        let expect = 200f64.ln() / 200f64.ln().ln() / 200.0;
        assert!((q200 - expect).abs() < 1e-15);
    }
}
