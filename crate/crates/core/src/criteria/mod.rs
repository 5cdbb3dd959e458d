//! Determinacy-condition checkers.
//!
//! A divergent series cannot be certified from finitely many terms, so every
//! checker returns evidence: a three-valued [`Status`] together with the
//! fitted exponents it was based on. All fits are ordinary least squares in
//! log-log coordinates over the last half of the available indices, with
//! thresholds [`EPS_C`] and [`EPS_G`].

mod fit;
mod qfunc;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::ln_gamma;
use crate::moments::{moment_ratios, MomentSequence, Support, Symmetrization};
use crate::signed_log::LogSumAccumulator;
use fit::{log_scale_decision, slope, slope2, tail_start, Decision};

pub use qfunc::QFunction;

/// Tolerance on decay exponents of series terms.
pub const EPS_C: f64 = 0.05;
/// Tolerance on the log-log slope of normalised growth ratios.
pub const EPS_G: f64 = 0.05;
/// Largest Hardy slope still read as "not increasing"; it only absorbs rounding.
pub const HARDY_FLAT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Carleman,
    GrowthRate,
    GrowthRateQ,
    QDivergence,
    Hardy,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [
        Criterion::Carleman,
        Criterion::GrowthRate,
        Criterion::GrowthRateQ,
        Criterion::QDivergence,
        Criterion::Hardy,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Carleman => "carleman",
            Criterion::GrowthRate => "growth_rate",
            Criterion::GrowthRateQ => "growth_rate_q",
            Criterion::QDivergence => "q_divergence",
            Criterion::Hardy => "hardy",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace('-', "_");
        Criterion::ALL
            .into_iter()
            .find(|c| c.as_str() == key)
            .ok_or_else(|| Error::Parse(format!("unknown criterion {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    SatisfiedEvidence,
    ViolatedEvidence,
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::SatisfiedEvidence => "satisfied-evidence",
            Status::ViolatedEvidence => "violated-evidence",
            Status::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub criterion: Criterion,
    pub status: Status,
    pub diagnostics: BTreeMap<String, f64>,
    pub n_used: usize,
}

impl Verdict {
    fn new(
        criterion: Criterion,
        status: Status,
        n_used: usize,
        diagnostics: &[(&str, f64)],
    ) -> Self {
        Verdict {
            criterion,
            status,
            diagnostics: diagnostics
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            n_used,
        }
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.get(name).copied()
    }
}

fn ln_n(n: usize) -> f64 {
    (n as f64).ln()
}

fn sum_exp(ln_terms: impl Iterator<Item = f64>) -> f64 {
    let mut acc = LogSumAccumulator::new();
    for t in ln_terms {
        acc.push(t);
    }
    acc.ln_sum().exp()
}

/// Carleman's condition: divergence of Σ a_n with a_n = m_n^{-1/(2n)}
/// (Stieltjes) or m_{2n}^{-1/(2n)} (symmetric Hamburger).
///
/// The decay exponent p of a_n is fitted on the tail. p < 1 − ε means
/// divergence. Near p = 1 the terms are rewritten as b_n / (n ln n) and the
/// decay of b_n against ln n decides. The borderline band is widened above
/// 1 + ε by the mean of 1/ln n over the window: a sequence like
/// c/(n ln n) has a log-log slope of 1 + 1/ln n at finite n, and the
/// headline family approaches that shape slowly from above.
pub fn check_carleman(seq: &MomentSequence, n_min: usize) -> Result<Verdict> {
    let n_max = seq.n_max();
    let needed = (n_min + 8).max(16);
    if n_max < needed {
        return Err(Error::InvalidSequence(format!(
            "Carleman check needs n_max >= {needed}, got {n_max}"
        )));
    }
    let entries = seq.entries();
    let ln_a = |n: usize| -entries[n].logmag() / (2.0 * n as f64);

    let window: Vec<usize> = (tail_start(n_min, n_max)..=n_max).collect();
    let xs: Vec<f64> = window.iter().map(|&n| ln_n(n)).collect();
    let ys: Vec<f64> = window.iter().map(|&n| ln_a(n)).collect();
    let p = -slope(&xs, &ys);
    let band_upper = 1.0 + EPS_C + xs.iter().map(|x| 1.0 / x).sum::<f64>() / xs.len() as f64;

    let lnln: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ln_b: Vec<f64> = ys
        .iter()
        .zip(&xs)
        .zip(&lnln)
        .map(|((y, x), l)| y + x + l)
        .collect();
    let beta = -slope(&lnln, &ln_b);
    let b_trend_slope = slope(&xs, &ln_b);
    let partial_sum = sum_exp((1..=n_max).map(ln_a));

    let status = if p < 1.0 - EPS_C {
        Status::SatisfiedEvidence
    } else {
        let decision = log_scale_decision(beta, EPS_C);
        match (p <= band_upper, decision) {
            (true, Decision::Diverges) => Status::SatisfiedEvidence,
            (_, Decision::Converges) => Status::ViolatedEvidence,
            _ => Status::Inconclusive,
        }
    };
    Ok(Verdict::new(
        Criterion::Carleman,
        status,
        n_max,
        &[
            ("p", p),
            ("p_band_upper", band_upper),
            ("beta", beta),
            ("b_trend_slope", b_trend_slope),
            ("b_last", ln_b.last().copied().unwrap_or(f64::NAN).exp()),
            ("partial_sum", partial_sum),
            ("tail_start", window[0] as f64),
        ],
    ))
}

/// Growth-rate condition m_{n+1}/m_n ≤ C (n+1)² q(n+1)² (even-order moments
/// for a symmetric sequence). With q ≡ 1 this is the quadratic rate; any
/// other q gives the q-modulated variant, whose other half is
/// [`check_q_divergence`].
pub fn check_growth_rate(seq: &MomentSequence, q: &QFunction) -> Result<Verdict> {
    let criterion = if *q == QFunction::ConstantOne {
        Criterion::GrowthRate
    } else {
        Criterion::GrowthRateQ
    };
    let ratios = moment_ratios(seq)?;
    if ratios.len() < 8 {
        return Err(Error::InvalidSequence(format!(
            "growth-rate check needs at least 8 ratios, got {}",
            ratios.len()
        )));
    }
    let last = ratios.len() - 1;
    let ln_g = (1..=last)
        .map(|n| Ok(ratios[n] - 2.0 * ln_n(n + 1) - 2.0 * q.ln_eval(n + 1)?))
        .collect::<Result<Vec<f64>>>()?;
    // ln_g[i] belongs to n = i + 1
    let window = tail_start(1, last)..=last;
    let xs: Vec<f64> = window.clone().map(ln_n).collect();
    let ys: Vec<f64> = window.clone().map(|n| ln_g[n - 1]).collect();
    let fitted = slope(&xs, &ys);
    let ln_sup = ln_g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let increasing = ys[ys.len() - 1] > ys[0];

    let status = if fitted <= EPS_G && ln_sup.is_finite() {
        Status::SatisfiedEvidence
    } else if fitted > EPS_G && increasing {
        Status::ViolatedEvidence
    } else {
        Status::Inconclusive
    };
    Ok(Verdict::new(
        criterion,
        status,
        seq.n_max(),
        &[
            ("slope", fitted),
            ("sup_g", ln_sup.exp()),
            ("g_last", ys[ys.len() - 1].exp()),
            ("g_tail_first", ys[0].exp()),
        ],
    ))
}

/// Divergence of Σ_{n≥2} 1/(n q(n)), from the first `n_max` terms.
///
/// The summand is fitted jointly as n^{-p} (ln n)^{-s}, which recovers p and
/// s exactly for the analytic q kinds. Near p = 1 the same log-scale rule as
/// [`check_carleman`] applies, with beta = s − 1.
pub fn check_q_divergence(q: &QFunction, n_max: usize) -> Result<Verdict> {
    if n_max < 100 {
        return Err(Error::InvalidQ(format!(
            "q-divergence check needs n_max >= 100, got {n_max}"
        )));
    }
    let ln_s = (2..=n_max)
        .map(|n| Ok(-ln_n(n) - q.ln_eval(n)?))
        .collect::<Result<Vec<f64>>>()?;
    let partial_sum = sum_exp(ln_s.iter().copied());

    let window = tail_start(1, n_max)..=n_max;
    let xs: Vec<f64> = window.clone().map(ln_n).collect();
    let lnln: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = window.map(|n| ln_s[n - 2]).collect();
    let (a, b) = slope2(&xs, &lnln, &ys);
    let (p, s) = (-a, -b);
    let beta = s - 1.0;

    let status = if !p.is_finite() {
        Status::Inconclusive
    } else if p < 1.0 - EPS_C {
        Status::SatisfiedEvidence
    } else if p > 1.0 + EPS_C {
        Status::ViolatedEvidence
    } else {
        match log_scale_decision(beta, EPS_C) {
            Decision::Diverges => Status::SatisfiedEvidence,
            Decision::Converges => Status::ViolatedEvidence,
            Decision::Undecided => Status::Inconclusive,
        }
    };
    Ok(Verdict::new(
        Criterion::QDivergence,
        status,
        n_max,
        &[
            ("p", p),
            ("log_exponent", s),
            ("beta", beta),
            ("partial_sum", partial_sum),
        ],
    ))
}

/// Hardy's condition in its moment form m_n ≤ (2n)! c₀ⁿ, via
/// b_n = (ln m_n − ln (2n)!)/n. A non-increasing b_n means the bound holds
/// with ln c₀ = max b_n; a b_n that grows against ln n rules out every c₀.
pub fn check_hardy(seq: &MomentSequence) -> Result<Verdict> {
    if seq.support() != Support::Stieltjes {
        return Err(Error::Unsupported(
            "the Hardy check applies to Stieltjes (positive) sequences only".into(),
        ));
    }
    let n_max = seq.n_max();
    let entries = seq.entries();
    let b: Vec<f64> = (1..=n_max)
        .map(|n| (entries[n].logmag() - ln_gamma(2.0 * n as f64 + 1.0)) / n as f64)
        .collect();
    let window = tail_start(1, n_max)..=n_max;
    let xs: Vec<f64> = window.clone().map(ln_n).collect();
    let ys: Vec<f64> = window.map(|n| b[n - 1]).collect();
    let fitted = slope(&xs, &ys);
    let log_c0 = b.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let status = if fitted <= HARDY_FLAT_TOL {
        Status::SatisfiedEvidence
    } else if fitted > EPS_C {
        Status::ViolatedEvidence
    } else {
        Status::Inconclusive
    };
    Ok(Verdict::new(
        Criterion::Hardy,
        status,
        n_max,
        &[
            ("slope", fitted),
            ("log_c0", log_c0),
            ("c0", log_c0.exp()),
            ("b_last", b[n_max - 1]),
        ],
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub support: Support,
    pub family: Option<String>,
    pub n_max: usize,
    pub q: QFunction,
    pub verdicts: Vec<Verdict>,
    /// Normalised asymptotic trends, present for X(r₁, r₂)-type families.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub trends: BTreeMap<String, f64>,
}

impl AnalysisReport {
    pub fn verdict(&self, criterion: Criterion) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.criterion == criterion)
    }

    pub fn status(&self, criterion: Criterion) -> Option<Status> {
        self.verdict(criterion).map(|v| v.status)
    }
}

/// Runs every checker that applies to `seq`. Growth rate is checked both with
/// q ≡ 1 and with `q`; the q-divergence check uses max(n_max, 100) terms.
pub fn analyze(seq: &MomentSequence, q: &QFunction) -> Result<AnalysisReport> {
    let wanted: Vec<Criterion> = Criterion::ALL
        .into_iter()
        .filter(|&c| c != Criterion::Hardy || seq.support() == Support::Stieltjes)
        .collect();
    analyze_with(seq, &wanted, q)
}

/// [`analyze`] restricted to the listed checkers. Asking for Hardy on a
/// symmetric sequence is an error here rather than a silent omission.
pub fn analyze_with(
    seq: &MomentSequence,
    which: &[Criterion],
    q: &QFunction,
) -> Result<AnalysisReport> {
    let verdicts = run_checks(seq, which, q)?;
    Ok(AnalysisReport {
        support: seq.support(),
        family: seq.family().map(|f| f.label.clone()),
        n_max: seq.n_max(),
        q: q.clone(),
        verdicts,
        trends: x_family_trends(seq)?,
    })
}

/// Runs the named checkers in parallel; the result keeps the order of `which`.
pub fn run_checks(
    seq: &MomentSequence,
    which: &[Criterion],
    q: &QFunction,
) -> Result<Vec<Verdict>> {
    which
        .par_iter()
        .map(|c| match c {
            Criterion::Carleman => check_carleman(seq, 1),
            Criterion::GrowthRate => check_growth_rate(seq, &QFunction::ConstantOne),
            Criterion::GrowthRateQ => {
                let mut v = check_growth_rate(seq, q)?;
                v.criterion = Criterion::GrowthRateQ;
                Ok(v)
            }
            Criterion::QDivergence => check_q_divergence(q, seq.n_max().max(100)),
            Criterion::Hardy => check_hardy(seq),
        })
        .collect()
}

/// For X(r₁, r₂) with s = r₁ + r₂:
/// m_n^{1/(2n)} e / (n ln(n+1)^{s/2}) and (m_{n+1}/m_n) / ((n+1)² ln(n+1)^s),
/// the two normalisations under which the moments have simple limits.
fn x_family_trends(seq: &MomentSequence) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    let Some(fam) = seq.family() else {
        return Ok(out);
    };
    if fam.symmetrization == Symmetrization::LiteralProduct {
        return Ok(out);
    }
    let Some((r1, r2)) = fam.x_parameters() else {
        return Ok(out);
    };
    let s = r1 + r2;
    let n_max = seq.n_max();
    let entries = seq.entries();
    let ratios = moment_ratios(seq)?;

    let ln_root = |n: usize| {
        entries[n].logmag() / (2.0 * n as f64) + 1.0 - ln_n(n) - 0.5 * s * ln_n(n + 1).ln()
    };
    let ln_ratio = |n: usize| ratios[n] - 2.0 * ln_n(n + 1) - s * ln_n(n + 1).ln();

    let window = tail_start(1, n_max)..=n_max;
    let xs: Vec<f64> = window.clone().map(ln_n).collect();
    let ys: Vec<f64> = window.map(ln_root).collect();
    out.insert("root_trend_at_n_max".into(), ln_root(n_max).exp());
    out.insert("root_trend_tail_slope".into(), slope(&xs, &ys));

    let window = tail_start(1, n_max - 1)..=n_max - 1;
    let xs: Vec<f64> = window.clone().map(ln_n).collect();
    let ys: Vec<f64> = window.map(ln_ratio).collect();
    out.insert("ratio_trend_at_n_max".into(), ln_ratio(n_max - 1).exp());
    out.insert("ratio_trend_tail_slope".into(), slope(&xs, &ys));
    Ok(out)
}
