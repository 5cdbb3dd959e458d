use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One multiplicative factor ξ^δ (ln(1+η))^r with ξ, η ~ Exp(1) independent.
/// Its n-th moment is Γ(δn + 1) · S(nr).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Factor {
    pub delta: f64,
    pub r: f64,
}

impl Factor {
    pub fn new(delta: f64, r: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&delta) {
            return Err(Error::InvalidFamily(format!(
                "delta must lie in [0, 2], got {delta}"
            )));
        }
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidFamily(format!(
                "r must lie in [0, 1], got {r}"
            )));
        }
        Ok(Factor { delta, r })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyBase {
    /// Product of independent factors; moments multiply.
    Product(Vec<Factor>),
    /// m_n = e^{n²/2}; a calibration family whose Carleman series converges.
    LogNormal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetrization {
    None,
    /// ζ·√X with ζ = ±1 equiprobable: m_{2n} equals the base family's m_n.
    SymmetricRoot,
    /// ζ·X₁X₂⋯ taken literally: m_{2n} equals the base family's m_{2n}.
    LiteralProduct,
}

/// Analytic description of a moment family.
///
/// Text form (also the [`FamilySpec::label`]):
///
/// ```text
/// product[(1,1),(1,1)]    X(1,1) = ξ₁ ln(1+η₁) · ξ₂ ln(1+η₂)
/// symroot[(1,1),(1,1)]    symmetric variable with m_{2n} = (n!)² K_n²
/// symprod[(1,1),(1,0)]    literal product ζ·Y₁·Y₂
/// exp                     ξ, m_n = n!
/// exp2                    ξ², m_n = (2n)!
/// lognormal               m_n = e^{n²/2}
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub base: FamilyBase,
    pub symmetrization: Symmetrization,
    pub label: String,
}

impl FamilySpec {
    pub fn product(factors: Vec<Factor>) -> Result<Self> {
        Self::with_symmetrization(factors, Symmetrization::None)
    }

    fn with_symmetrization(factors: Vec<Factor>, symmetrization: Symmetrization) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidFamily(
                "at least one factor is required".into(),
            ));
        }
        for f in &factors {
            Factor::new(f.delta, f.r)?;
        }
        let head = match symmetrization {
            Symmetrization::None => "product",
            Symmetrization::SymmetricRoot => "symroot",
            Symmetrization::LiteralProduct => "symprod",
        };
        let list: Vec<String> = factors
            .iter()
            .map(|f| format!("({},{})", f.delta, f.r))
            .collect();
        Ok(FamilySpec {
            label: format!("{head}[{}]", list.join(",")),
            base: FamilyBase::Product(factors),
            symmetrization,
        })
    }

    /// X(r₁, r₂) = ξ₁(ln(1+η₁))^{r₁} · ξ₂(ln(1+η₂))^{r₂}.
    pub fn x(r1: f64, r2: f64) -> Result<Self> {
        Self::product(vec![Factor::new(1.0, r1)?, Factor::new(1.0, r2)?])
    }

    pub fn exponential() -> Self {
        FamilySpec {
            base: FamilyBase::Product(vec![Factor { delta: 1.0, r: 0.0 }]),
            symmetrization: Symmetrization::None,
            label: "exp".into(),
        }
    }

    pub fn squared_exponential() -> Self {
        FamilySpec {
            base: FamilyBase::Product(vec![Factor { delta: 2.0, r: 0.0 }]),
            symmetrization: Symmetrization::None,
            label: "exp2".into(),
        }
    }

    pub fn lognormal() -> Self {
        FamilySpec {
            base: FamilyBase::LogNormal,
            symmetrization: Symmetrization::None,
            label: "lognormal".into(),
        }
    }

    /// The symmetric variable ζ·√X over this (unsymmetrized, product) family.
    pub fn symmetric_root(&self) -> Result<Self> {
        self.symmetrized(Symmetrization::SymmetricRoot)
    }

    /// The literal symmetric product ζ·X over this (unsymmetrized, product) family.
    pub fn literal_symmetric(&self) -> Result<Self> {
        self.symmetrized(Symmetrization::LiteralProduct)
    }

    fn symmetrized(&self, sym: Symmetrization) -> Result<Self> {
        match (&self.base, self.symmetrization) {
            (FamilyBase::Product(factors), Symmetrization::None) => {
                Self::with_symmetrization(factors.clone(), sym)
            }
            _ => Err(Error::InvalidFamily(format!(
                "cannot symmetrize {}",
                self.label
            ))),
        }
    }

    pub fn factors(&self) -> Option<&[Factor]> {
        match &self.base {
            FamilyBase::Product(f) => Some(f),
            FamilyBase::LogNormal => None,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetrization != Symmetrization::None
    }

    /// (r₁, r₂) when the base is a two-factor product with δ = 1 on both,
    /// i.e. an X(r₁, r₂) variable.
    pub fn x_parameters(&self) -> Option<(f64, f64)> {
        match self.factors()? {
            [a, b] if a.delta == 1.0 && b.delta == 1.0 => Some((a.r, b.r)),
            _ => None,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        match compact.as_str() {
            "exp" => return Ok(Self::exponential()),
            "exp2" => return Ok(Self::squared_exponential()),
            "lognormal" => return Ok(Self::lognormal()),
            _ => {}
        }
        let open = compact
            .find('[')
            .ok_or_else(|| Error::Parse(format!("unrecognised family {s:?}")))?;
        if !compact.ends_with(']') {
            return Err(Error::Parse(format!(
                "family {s:?} is missing a closing ']'"
            )));
        }
        let head = &compact[..open];
        let body = &compact[open + 1..compact.len() - 1];
        let sym = match head {
            "product" => Symmetrization::None,
            "symroot" => Symmetrization::SymmetricRoot,
            "symprod" => Symmetrization::LiteralProduct,
            other => {
                return Err(Error::Parse(format!(
                    "unknown family constructor {other:?}"
                )))
            }
        };
        let factors = match body {
            "exp" => vec![Factor { delta: 1.0, r: 0.0 }],
            "exp2" => vec![Factor { delta: 2.0, r: 0.0 }],
            _ => parse_factors(body)?,
        };
        Self::with_symmetrization(factors, sym)
    }
}

fn parse_factors(body: &str) -> Result<Vec<Factor>> {
    let mut out = Vec::new();
    let mut rest = body;
    while !rest.is_empty() {
        let inner = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("expected '(' at {rest:?}")))?;
        let close = inner
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unterminated factor at {rest:?}")))?;
        let (delta, r) = inner[..close].split_once(',').ok_or_else(|| {
            Error::Parse(format!("factor {:?} needs two numbers", &inner[..close]))
        })?;
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?}")))
        };
        out.push(Factor::new(num(delta)?, num(r)?)?);
        rest = &inner[close + 1..];
        if let Some(next) = rest.strip_prefix(',') {
            if next.is_empty() {
                return Err(Error::Parse("trailing ',' in factor list".into()));
            }
            rest = next;
        } else if !rest.is_empty() {
            return Err(Error::Parse(format!("unexpected {rest:?} after factor")));
        }
    }
    Ok(out)
}
