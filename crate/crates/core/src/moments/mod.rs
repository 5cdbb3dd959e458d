//! Log-domain moment sequences for the product families and a few stock
//! calibration families.

mod family;
pub mod io;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use family::{Factor, FamilyBase, FamilySpec, Symmetrization};

use crate::error::{Error, Result};
use crate::gamma::ln_gamma;
use crate::quadrature::{self, DEFAULT_REL_TOL};
use crate::signed_log::SignedLogValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Support {
    /// Distribution on [0, ∞); entry n is m_n.
    Stieltjes,
    /// Symmetric distribution on ℝ; entry k is m_{2k}, odd moments vanish.
    HamburgerSymmetric,
}

impl Support {
    pub fn as_str(&self) -> &'static str {
        match self {
            Support::Stieltjes => "stieltjes",
            Support::HamburgerSymmetric => "hamburger-symmetric",
        }
    }
}

/// A validated moment sequence.
///
/// Entries start at index 0 (m₀ = 1). For [`Support::HamburgerSymmetric`]
/// the stored entries are the even moments, so `entries()[k]` is m_{2k}.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    support: Support,
    entries: Vec<SignedLogValue>,
    family: Option<FamilySpec>,
}

impl MomentSequence {
    /// Validates and wraps stored entries: at least three, all positive,
    /// m₀ = 1, and ln m convex in the index.
    pub fn new(
        support: Support,
        entries: Vec<SignedLogValue>,
        family: Option<FamilySpec>,
    ) -> Result<Self> {
        if entries.len() < 3 {
            return Err(Error::InvalidSequence(format!(
                "need at least 3 stored moments, got {}",
                entries.len()
            )));
        }
        if let Some(i) = entries.iter().position(|m| !m.is_positive()) {
            return Err(Error::InvalidSequence(format!(
                "stored moment {i} is not positive"
            )));
        }
        if entries.iter().any(|m| !m.logmag().is_finite()) {
            return Err(Error::InvalidSequence("non-finite log-moment".into()));
        }
        if entries[0].logmag().abs() > 1e-12 {
            return Err(Error::InvalidSequence(format!(
                "m0 must be 1, got exp({})",
                entries[0].logmag()
            )));
        }
        for n in 1..entries.len() - 1 {
            let (a, b, c) = (
                entries[n - 1].logmag(),
                entries[n].logmag(),
                entries[n + 1].logmag(),
            );
            let slack = 1e-9 * (1.0 + b.abs());
            if a + c < 2.0 * b - slack {
                return Err(Error::InvalidSequence(format!(
                    "ln m is not convex at stored index {n} ({a}, {b}, {c})"
                )));
            }
        }
        Ok(MomentSequence {
            support,
            entries,
            family,
        })
    }

    /// Builds a sequence from natural logs of the stored moments.
    pub fn from_ln_moments(
        support: Support,
        ln_moments: &[f64],
        family: Option<FamilySpec>,
    ) -> Result<Self> {
        Self::new(
            support,
            ln_moments
                .iter()
                .map(|&l| SignedLogValue::from_ln(l))
                .collect(),
            family,
        )
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn entries(&self) -> &[SignedLogValue] {
        &self.entries
    }

    pub fn family(&self) -> Option<&FamilySpec> {
        self.family.as_ref()
    }

    /// Highest stored index: m_{n_max} for Stieltjes, m_{2·n_max} for Hamburger.
    pub fn n_max(&self) -> usize {
        self.entries.len() - 1
    }

    /// The moment of the given order; odd orders of a symmetric sequence are 0.
    pub fn moment(&self, order: usize) -> Option<SignedLogValue> {
        match self.support {
            Support::Stieltjes => self.entries.get(order).copied(),
            Support::HamburgerSymmetric if order % 2 == 1 => {
                (order / 2 < self.entries.len() - 1).then_some(SignedLogValue::ZERO)
            }
            Support::HamburgerSymmetric => self.entries.get(order / 2).copied(),
        }
    }

    /// Natural logs of the stored entries.
    pub fn ln_entries(&self) -> Vec<f64> {
        self.entries.iter().map(|m| m.logmag()).collect()
    }
}

/// Moments of `family` up to stored index `n_max`, with quadrature at the
/// default tolerance.
pub fn generate_moments(family: &FamilySpec, n_max: usize) -> Result<MomentSequence> {
    generate_moments_tol(family, n_max, DEFAULT_REL_TOL)
}

/// For an unsymmetrized product family, ln m_n = Σᵢ [ln Γ(δᵢn + 1) + ln S(n rᵢ)].
/// A symmetric root stores the base m_k as m_{2k}; a literal symmetric
/// product stores the base m_{2k}.
///
/// Distinct arguments of S are integrated in parallel; the assembled sequence
/// does not depend on the thread count.
pub fn generate_moments_tol(
    family: &FamilySpec,
    n_max: usize,
    rel_tol: f64,
) -> Result<MomentSequence> {
    if n_max < 2 {
        return Err(Error::domain(
            "generate_moments",
            format!("n_max must be >= 2, got {n_max}"),
        ));
    }
    // order of the base-family moment stored at index k
    let order_of = |k: usize| match family.symmetrization {
        Symmetrization::LiteralProduct => 2 * k,
        _ => k,
    };
    let support = if family.is_symmetric() {
        Support::HamburgerSymmetric
    } else {
        Support::Stieltjes
    };

    let ln_moments: Vec<f64> = match &family.base {
        FamilyBase::LogNormal => (0..=n_max)
            .map(|k| {
                let n = order_of(k) as f64;
                n * n / 2.0
            })
            .collect(),
        FamilyBase::Product(factors) => {
            let mut args: BTreeMap<u64, f64> = BTreeMap::new();
            for k in 0..=n_max {
                let n = order_of(k) as f64;
                for f in factors {
                    let p = n * f.r;
                    args.insert(p.to_bits(), p);
                }
            }
            let keys: Vec<(u64, f64)> = args.into_iter().collect();
            let values: Vec<Result<f64>> = keys
                .par_iter()
                .map(|&(_, p)| {
                    quadrature::integrate_logweighted(p, rel_tol).map(|q| q.value.logmag())
                })
                .collect();
            let mut ln_s: BTreeMap<u64, Result<f64>> =
                keys.into_iter().map(|(b, _)| b).zip(values).collect();
            let mut out = Vec::with_capacity(n_max + 1);
            for k in 0..=n_max {
                let n = order_of(k) as f64;
                let mut total = 0.0;
                for f in factors {
                    let bits = (n * f.r).to_bits();
                    match &ln_s[&bits] {
                        Ok(v) => total += ln_gamma(f.delta * n + 1.0) + v,
                        Err(_) => {
                            let source = ln_s
                                .remove(&bits)
                                .and_then(|r| r.err())
                                .expect("error entry");
                            return Err(Error::AtIndex {
                                index: k,
                                source: Box::new(source),
                            });
                        }
                    }
                }
                out.push(total);
            }
            out
        }
    };
    MomentSequence::from_ln_moments(support, &ln_moments, Some(family.clone()))
}

/// Log-ratios of consecutive stored moments: ln(m_{n+1}/m_n) for Stieltjes,
/// ln(m_{2n+2}/m_{2n}) for symmetric sequences. Entry n of the result
/// corresponds to stored index n.
pub fn moment_ratios(seq: &MomentSequence) -> Result<Vec<f64>> {
    if seq.entries.iter().any(|m| m.is_zero()) {
        return Err(Error::InvalidSequence(
            "zero moment in ratio computation".into(),
        ));
    }
    Ok(seq
        .entries
        .windows(2)
        .map(|w| w[1].ln_ratio(&w[0]))
        .collect())
}

/// Carleman terms a_n = m_n^{-1/(2n)} (Stieltjes) or m_{2n}^{-1/(2n)}
/// (symmetric), for n = 1..=n_max. Entry i of the result is a_{i+1}.
pub fn carleman_terms(seq: &MomentSequence) -> Result<Vec<f64>> {
    if seq.entries.iter().any(|m| !m.is_positive()) {
        return Err(Error::InvalidSequence(
            "Carleman terms need positive moments".into(),
        ));
    }
    Ok(seq
        .entries
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, m)| (-m.logmag() / (2.0 * n as f64)).exp())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::ln_factorial;

    #[test]
    fn exponential_family_is_factorial() {
        let seq = generate_moments(&FamilySpec::exponential(), 10).unwrap();
        assert_eq!(seq.support(), Support::Stieltjes);
        assert!((seq.entries()[3].logmag() - 6f64.ln()).abs() < 1e-14);
        for n in 0..=10 {
            assert_eq!(seq.entries()[n].logmag(), ln_factorial(n as u64));
        }
        let ratios = moment_ratios(&seq).unwrap();
        for (n, r) in ratios.iter().enumerate() {
            assert!((r - ((n + 1) as f64).ln()).abs() < 1e-13);
        }
        let a = carleman_terms(&seq).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn x11_small_moments() {
        let seq = generate_moments(&FamilySpec::x(1.0, 1.0).unwrap(), 4).unwrap();
        let m2 = seq.entries()[2].to_f64();
        // 4 K_2^2 with K_2 = 0.531930770064818
        assert!((m2 - 4.0 * 0.531_930_770_064_818_4f64.powi(2)).abs() < 1e-9);
        assert!((m2 - 1.13).abs() < 0.01);
        // m_1 = K_1^2, not the 1 printed alongside the table
        assert!((seq.entries()[1].to_f64() - 0.355_630_176_549_830_9).abs() < 1e-9);
    }

    #[test]
    fn squared_exponential_and_degenerate_products() {
        let exp2 = generate_moments(&FamilySpec::squared_exponential(), 20).unwrap();
        let prod = generate_moments(&"product[(1,0),(1,0)]".parse().unwrap(), 20).unwrap();
        for n in 0..=20u64 {
            assert_eq!(
                exp2.entries()[n as usize].logmag(),
                ln_gamma(2.0 * n as f64 + 1.0)
            );
            assert!((prod.entries()[n as usize].logmag() - 2.0 * ln_factorial(n)).abs() < 1e-12);
        }
        let r = moment_ratios(&exp2).unwrap();
        for (n, v) in r.iter().enumerate() {
            let want = ((2 * n + 2) as f64 * (2 * n + 1) as f64).ln();
            assert!((v - want).abs() < 1e-12);
        }
    }

    #[test]
    fn lognormal_terms() {
        let seq = generate_moments(&FamilySpec::lognormal(), 30).unwrap();
        let a = carleman_terms(&seq).unwrap();
        for (i, v) in a.iter().enumerate() {
            let n = (i + 1) as f64;
            assert!((v - (-n / 4.0).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_root_reproduces_base() {
        let x = FamilySpec::x(1.0, 1.0).unwrap();
        let base = generate_moments(&x, 12).unwrap();
        let sym = generate_moments(&x.symmetric_root().unwrap(), 12).unwrap();
        assert_eq!(sym.support(), Support::HamburgerSymmetric);
        assert_eq!(sym.entries(), base.entries());
        assert!(sym.moment(3).unwrap().is_zero());
        assert_eq!(sym.moment(4).unwrap(), base.entries()[2]);
        assert!(sym.moment(25).is_none());
    }

    #[test]
    fn literal_product_uses_double_order() {
        let x = FamilySpec::x(1.0, 1.0).unwrap();
        let base = generate_moments(&x, 12).unwrap();
        let lit = generate_moments(&x.literal_symmetric().unwrap(), 6).unwrap();
        for k in 0..=6 {
            assert!((lit.entries()[k].logmag() - base.entries()[2 * k].logmag()).abs() < 1e-12);
        }
    }

    #[test]
    fn validation() {
        assert!(MomentSequence::from_ln_moments(Support::Stieltjes, &[0.0, 1.0], None).is_err());
        assert!(
            MomentSequence::from_ln_moments(Support::Stieltjes, &[0.5, 1.0, 3.0], None).is_err()
        );
        // concave in n
        assert!(
            MomentSequence::from_ln_moments(Support::Stieltjes, &[0.0, 2.0, 3.0], None).is_err()
        );
        let neg = vec![
            SignedLogValue::ONE,
            SignedLogValue::from_f64(-2.0),
            SignedLogValue::from_f64(5.0),
        ];
        assert!(MomentSequence::new(Support::Stieltjes, neg, None).is_err());
        assert!(generate_moments(&FamilySpec::exponential(), 1).is_err());
    }
}
