//! Log-domain quadrature for the integrals behind the moment families.
//!
//! * S(p) = ∫₀^∞ ln(1+x)^p e^{-x} dx, so K_n = S(n) and K_n(r) = S(nr);
//! * U(n) = ∫₀¹ (ln t)^n e^{-t} dt, evaluated after u = −ln t;
//! * γ_n = Γ⁽ⁿ⁾(1) = U(n) + e^{-1} S(n).
//!
//! Every integrand here is log-concave, so the rule is the same for all of
//! them: locate the peak, cut each side where the log-integrand falls
//! [`CUTOFF`] below the peak, and apply tanh-sinh on the two pieces. Node
//! contributions are summed in the log domain in a fixed order, so results are
//! bit-identical however the calls are scheduled.

use std::f64::consts::{FRAC_PI_2, LN_2};

use crate::error::{Error, Result};
use crate::lambertw;
use crate::signed_log::{LogSumAccumulator, SignedLogValue};

pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Truncation depth in nats below the peak of the log-integrand.
const CUTOFF: f64 = 60.0;
/// Half-width of the tanh-sinh abscissa range; nodes beyond it carry weight < e^{-50}.
const T_MAX: f64 = 3.5;
const H0: f64 = 0.5;
const MIN_LEVEL: u32 = 3;
const MAX_LEVEL: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: SignedLogValue,
    pub est_rel_error: f64,
    pub nodes_used: usize,
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if rel_tol > 1e-14 && rel_tol < 1e-2 {
        Ok(())
    } else {
        Err(Error::domain(
            "quadrature",
            format!("rel_tol must lie in (1e-14, 1e-2), got {rel_tol}"),
        ))
    }
}

/// S(p) = ∫₀^∞ ln(1+x)^p e^{-x} dx for p ≥ 0.
pub fn integrate_logweighted(p: f64, rel_tol: f64) -> Result<QuadratureResult> {
    check_rel_tol(rel_tol)?;
    if !p.is_finite() || p < 0.0 {
        return Err(Error::domain(
            "integrate_logweighted",
            format!("p must be finite and >= 0, got {p}"),
        ));
    }
    if p == 0.0 {
        return Ok(QuadratureResult {
            value: SignedLogValue::ONE,
            est_rel_error: 0.0,
            nodes_used: 1,
        });
    }
    let log_f = |x: f64| {
        if x <= 0.0 {
            f64::NEG_INFINITY
        } else {
            p * x.ln_1p().ln() - x
        }
    };
    // The maximiser solves (1+x) ln(1+x) = p, i.e. x = e^{W(p)} - 1.
    let peak = lambertw::w0(p)?.exp_m1();
    integrate_log_concave(&log_f, peak, rel_tol).map_err(|e| with_context(e, format!("S({p})")))
}

/// ∫₀¹ (ln t)^n e^{-t} dt, computed as (−1)^n ∫₀^∞ u^n e^{-u} e^{-e^{-u}} du.
pub fn integrate_unit_log_power(n: u32) -> Result<QuadratureResult> {
    integrate_unit_log_power_tol(n, DEFAULT_REL_TOL)
}

pub fn integrate_unit_log_power_tol(n: u32, rel_tol: f64) -> Result<QuadratureResult> {
    check_rel_tol(rel_tol)?;
    let nf = f64::from(n);
    let log_f = |u: f64| {
        if n == 0 {
            -u - (-u).exp()
        } else if u <= 0.0 {
            f64::NEG_INFINITY
        } else {
            nf * u.ln() - u - (-u).exp()
        }
    };
    let peak = if n == 0 { 0.0 } else { unit_peak(nf) };
    let mut res = integrate_log_concave(&log_f, peak, rel_tol)
        .map_err(|e| with_context(e, format!("U({n})")))?;
    if n % 2 == 1 {
        res.value = -res.value;
    }
    Ok(res)
}

/// Root of n/u − 1 + e^{-u} = 0, which lies in (n, n+1).
fn unit_peak(n: f64) -> f64 {
    let g = |u: f64| n / u - 1.0 + (-u).exp();
    let (mut lo, mut hi) = (n, n + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// γ_n = Γ⁽ⁿ⁾(1) via γ_n = ∫₀¹ (ln t)^n e^{-t} dt + e^{-1} S(n).
pub fn gamma_derivative(n: u32) -> Result<QuadratureResult> {
    gamma_derivative_tol(n, 1e-12)
}

pub fn gamma_derivative_tol(n: u32, rel_tol: f64) -> Result<QuadratureResult> {
    let unit = integrate_unit_log_power_tol(n, rel_tol)?;
    let tail = integrate_logweighted(f64::from(n), rel_tol)?;
    let tail_scaled = tail.value.scale_ln(-1.0);
    let value = unit.value + tail_scaled;
    let abs_err = SignedLogValue::from_f64(unit.est_rel_error) * unit.value.abs()
        + SignedLogValue::from_f64(tail.est_rel_error) * tail_scaled.abs();
    let est_rel_error = if value.is_zero() {
        f64::INFINITY
    } else {
        (abs_err.logmag() - value.logmag()).exp()
    };
    Ok(QuadratureResult {
        value,
        est_rel_error,
        nodes_used: unit.nodes_used + tail.nodes_used,
    })
}

fn with_context(err: Error, context: String) -> Error {
    match err {
        Error::Quadrature {
            partial,
            est_rel_error,
            rel_tol,
            ..
        } => Error::Quadrature {
            context,
            partial,
            est_rel_error,
            rel_tol,
        },
        other => other,
    }
}

/// Integral over [0, ∞) of exp(log_f), for a concave `log_f` with its
/// maximum at `peak` ≥ 0.
fn integrate_log_concave<F: Fn(f64) -> f64>(
    log_f: &F,
    peak: f64,
    rel_tol: f64,
) -> Result<QuadratureResult> {
    let top = log_f(peak);
    if !top.is_finite() {
        return Err(Error::domain(
            "quadrature",
            format!("log-integrand not finite at its peak {peak}"),
        ));
    }
    let floor = top - CUTOFF;

    let lower = if peak == 0.0 || log_f(0.0) >= floor {
        0.0
    } else {
        crossing(log_f, 0.0, peak, floor)
    };
    let mut far = peak + peak.max(1.0);
    while log_f(far) >= floor {
        far = peak + 2.0 * (far - peak);
    }
    let upper = crossing(log_f, far, peak, floor);

    let mut pieces = Vec::with_capacity(2);
    if peak > lower {
        pieces.push(tanh_sinh(log_f, lower, peak, rel_tol));
    }
    pieces.push(tanh_sinh(log_f, peak, upper, rel_tol));

    let mut acc = LogSumAccumulator::new();
    let mut err_acc = LogSumAccumulator::new();
    let mut nodes = 0;
    let mut converged = true;
    for piece in &pieces {
        acc.push(piece.ln_value);
        err_acc.push(piece.ln_value + piece.est_rel_error.ln());
        nodes += piece.nodes;
        converged &= piece.converged;
    }
    let ln_value = acc.ln_sum();
    // A log-magnitude of size L carries absolute rounding of about eps·L,
    // which is a relative error in the value itself.
    let representation = 4.0 * f64::EPSILON * ln_value.abs();
    let est_rel_error = (err_acc.ln_sum() - ln_value).exp().max(representation);
    let value = SignedLogValue::from_ln(ln_value);
    if !converged || est_rel_error > rel_tol {
        return Err(Error::Quadrature {
            context: String::new(),
            partial: value,
            est_rel_error,
            rel_tol,
        });
    }
    Ok(QuadratureResult {
        value,
        est_rel_error,
        nodes_used: nodes,
    })
}

/// Point between `outside` and `inside` where `log_f` crosses `level`, by
/// bisection; `log_f(inside) ≥ level > log_f(outside)`.
fn crossing<F: Fn(f64) -> f64>(log_f: &F, outside: f64, inside: f64, level: f64) -> f64 {
    let (mut out, mut ins) = (outside, inside);
    for _ in 0..200 {
        let mid = 0.5 * (out + ins);
        if mid == out || mid == ins {
            break;
        }
        if log_f(mid) >= level {
            ins = mid;
        } else {
            out = mid;
        }
    }
    out
}

struct Piece {
    ln_value: f64,
    est_rel_error: f64,
    nodes: usize,
    converged: bool,
}

/// Tanh-sinh on [a, b] with step halving. Each level adds only the odd
/// nodes, so the log-sum of weight × integrand is carried across levels.
fn tanh_sinh<F: Fn(f64) -> f64>(log_f: &F, a: f64, b: f64, rel_tol: f64) -> Piece {
    let half = 0.5 * (b - a);
    let ln_half = half.ln();
    let mut acc = LogSumAccumulator::new();
    let mut nodes = 0usize;

    let node = |t: f64, acc: &mut LogSumAccumulator| {
        let s = FRAC_PI_2 * t.sinh();
        let e2 = (-2.0 * s.abs()).exp();
        // distance to the nearer endpoint: (b - a) / (1 + e^{2|s|})
        let dist = (b - a) * e2 / (1.0 + e2);
        let x = if t < 0.0 {
            a + dist
        } else if t > 0.0 {
            b - dist
        } else {
            a + half
        };
        // ln of (b-a)/2 · (π/2) cosh t · sech² s
        let ln_w =
            ln_half + (FRAC_PI_2 * t.cosh()).ln() + 2.0 * LN_2 - 2.0 * s.abs() - 2.0 * e2.ln_1p();
        acc.push(ln_w + log_f(x));
    };

    let k_max = (T_MAX / H0).floor() as i64;
    for k in -k_max..=k_max {
        node(k as f64 * H0, &mut acc);
        nodes += 1;
    }
    let mut h = H0;
    let mut prev = acc.ln_sum() + h.ln();
    let mut est = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let k_max = (T_MAX / h).floor() as i64;
        let mut k = -k_max + if k_max % 2 == 0 { 1 } else { 0 };
        while k <= k_max {
            node(k as f64 * h, &mut acc);
            nodes += 1;
            k += 2;
        }
        let cur = acc.ln_sum() + h.ln();
        est = (cur - prev).exp_m1().abs();
        prev = cur;
        if level >= MIN_LEVEL && est <= rel_tol {
            return Piece {
                ln_value: cur,
                est_rel_error: est,
                nodes,
                converged: true,
            };
        }
    }
    Piece {
        ln_value: prev,
        est_rel_error: est,
        nodes,
        converged: false,
    }
}
