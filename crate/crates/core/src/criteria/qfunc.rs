use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// The modulating function q(n) > 0 of the q-growth condition.
///
/// Text form: `one` (or `1`), `log`, `power(a)` for n^a, and
/// `table(v1,v2,...)` where the k-th value is q(k).
#[derive(Clone, Debug, PartialEq)]
pub enum QFunction {
    ConstantOne,
    /// q(n) = ln n. Only defined for n ≥ 2, which is all the checkers use.
    Log,
    Power(f64),
    Table(Vec<f64>),
}

impl QFunction {
    pub fn power(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidQ(format!(
                "power exponent must be finite, got {alpha}"
            )));
        }
        Ok(QFunction::Power(alpha))
    }

    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidQ("table must have at least one value".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidQ(format!(
                "q({}) = {v} is not positive",
                i + 1
            )));
        }
        Ok(QFunction::Table(values))
    }

    /// ln q(n), failing when q(n) is undefined or not positive.
    pub fn ln_eval(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        let v = match self {
            QFunction::ConstantOne if n >= 1 => 0.0,
            QFunction::Log if n >= 2 => nf.ln().ln(),
            QFunction::Power(a) if n >= 1 => a * nf.ln(),
            QFunction::Table(values) if n >= 1 && n <= values.len() => values[n - 1].ln(),
            _ => {
                return Err(Error::InvalidQ(format!(
                    "q({n}) is not defined for q = {self}"
                )))
            }
        };
        Ok(v)
    }

    pub fn eval(&self, n: usize) -> Result<f64> {
        self.ln_eval(n).map(f64::exp)
    }
}

impl fmt::Display for QFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QFunction::ConstantOne => f.write_str("one"),
            QFunction::Log => f.write_str("log"),
            QFunction::Power(a) => write!(f, "power({a})"),
            QFunction::Table(v) => {
                let parts: Vec<String> = v.iter().map(f64::to_string).collect();
                write!(f, "table({})", parts.join(","))
            }
        }
    }
}

impl Serialize for QFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for QFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match compact.as_str() {
            "one" | "1" => return Ok(QFunction::ConstantOne),
            "log" => return Ok(QFunction::Log),
            _ => {}
        }
        let inner = |head: &str| {
            compact
                .strip_prefix(head)
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
                .map(str::to_owned)
        };
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in q spec")))
        };
        if let Some(body) = inner("power") {
            return QFunction::power(num(&body)?);
        }
        if let Some(body) = inner("table") {
            let values = body.split(',').map(num).collect::<Result<Vec<_>>>()?;
            return QFunction::table(values);
        }
        Err(Error::Parse(format!("unrecognised q function {s:?}")))
    }
}
