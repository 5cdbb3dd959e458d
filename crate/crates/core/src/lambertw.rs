//! Principal branch of the Lambert W function on [0, ∞).
//!
//! W(t) solves t = W e^W. Besides the function itself this module exposes
//! the elementary bounds and the two limit quantities used in the saddle-point
//! analysis of ∫ ln(1+x)^t e^{-x} dx.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// Relative tolerance on the defining identity.
pub const TOL_W: f64 = 1e-12;

const MAX_ITER: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WValue {
    pub t: f64,
    pub w: f64,
    /// `w e^w - t`
    pub residual: f64,
}

/// W₀(t) for t ≥ 0, by Halley iteration.
///
/// For t > e the iteration runs on the log form w + ln w = ln t, which keeps
/// every intermediate in range up to t = f64::MAX. Below e it runs on
/// w e^w - t directly, started from ln(1 + t).
pub fn lambert_w0(t: f64) -> Result<WValue> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain(
            "lambert_w0",
            format!("argument must be finite and >= 0, got {t}"),
        ));
    }
    if t == 0.0 {
        return Ok(WValue {
            t,
            w: 0.0,
            residual: 0.0,
        });
    }
    if t == E {
        return Ok(WValue {
            t,
            w: 1.0,
            residual: 0.0,
        });
    }

    let w = if t > E {
        halley_log_form(t)?
    } else {
        halley_direct(t)?
    };
    let residual = w * w.exp() - t;
    let scale = t.max(1.0);
    if residual.abs() > TOL_W * scale {
        return Err(Error::NoConvergence {
            routine: "lambert_w0",
            iterations: MAX_ITER,
        });
    }
    Ok(WValue { t, w, residual })
}

fn halley_direct(t: f64) -> Result<f64> {
    let mut w = t.ln_1p();
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - t;
        if f == 0.0 {
            return Ok(w);
        }
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence {
        routine: "lambert_w0",
        iterations: MAX_ITER,
    })
}

fn halley_log_form(t: f64) -> Result<f64> {
    let lt = t.ln();
    let llt = lt.ln();
    let mut w = (lt - llt + llt / lt).max(1.0);
    for _ in 0..MAX_ITER {
        let f = w + w.ln() - lt;
        if f == 0.0 {
            return Ok(w);
        }
        let d1 = 1.0 + 1.0 / w;
        let d2 = -1.0 / (w * w);
        let step = f / (d1 - f * d2 / (2.0 * d1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w {
            return Ok(w);
        }
    }
    Err(Error::NoConvergence {
        routine: "lambert_w0",
        iterations: MAX_ITER,
    })
}

/// Convenience wrapper returning just W(t).
pub fn w0(t: f64) -> Result<f64> {
    lambert_w0(t).map(|v| v.w)
}

/// Elementary bounds ln t − ln ln t ≤ W(t) ≤ ln t − ln(ln t − ln ln t), valid for t > e.
pub fn lambert_w_bounds(t: f64) -> Result<(f64, f64)> {
    if !t.is_finite() || t <= E {
        return Err(Error::domain(
            "lambert_w_bounds",
            format!("requires finite t > e, got {t}"),
        ));
    }
    let lt = t.ln();
    let lower = lt - lt.ln();
    let upper = lt - lower.ln();
    Ok((lower, upper))
}

/// Increment W(t+1) − W(t), computed without cancellation.
///
/// With w = W(t) and d the increment, (1 + d/w) e^d = 1 + 1/t; the root of
/// ln(1 + d/w) + d = ln(1 + 1/t) is found by Newton from its linearisation.
fn w_increment(t: f64, w: f64) -> Result<f64> {
    let rhs = (1.0 / t).ln_1p();
    let mut d = rhs / (1.0 + 1.0 / w);
    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let g = (d / w).ln_1p() + d - rhs;
        let step = g / (1.0 / (w + d) + 1.0);
        d -= step;
        let size = step.abs();
        // For tiny t the residual bottoms out at the rounding level of rhs,
        // so a stalled but negligible step also counts as converged.
        if size <= 4.0 * f64::EPSILON * d.abs() || (size >= last_step && size <= 1e-13 * d.abs()) {
            return Ok(d.max(0.0));
        }
        last_step = size;
    }
    Err(Error::NoConvergence {
        routine: "w_increment",
        iterations: MAX_ITER,
    })
}

/// (W(t+1)/W(t))^t, which lies in [1, exp(1/(W(t)+1))] and tends to 1.
pub fn w_ratio_power(t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 || t.is_infinite() {
        return Err(Error::domain(
            "w_ratio_power",
            format!("requires finite t > 0, got {t}"),
        ));
    }
    let w = w0(t)?;
    let d = w_increment(t, w)?;
    Ok((t * (d / w).ln_1p()).exp())
}

/// (t+1)/W(t+1) − t/W(t) = e^{W(t+1)} − e^{W(t)}, which lies in [0, 1/W(t+1)].
pub fn w_frac_diff(t: f64) -> Result<f64> {
    if t.is_nan() || t <= 0.0 || t.is_infinite() {
        return Err(Error::domain(
            "w_frac_diff",
            format!("requires finite t > 0, got {t}"),
        ));
    }
    let w = w0(t)?;
    let d = w_increment(t, w)?;
    Ok(w.exp() * d.exp_m1())
}

/// W′(t) = 1 / (e^{W} (W + 1)).
pub fn w_derivative(t: f64) -> Result<f64> {
    let w = w0(t)?;
    Ok(1.0 / (w.exp() * (w + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: plain bisection on w e^w = t.
    fn bisect_w(t: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, t.max(1.0).ln() + 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn anchor_values() {
        assert_eq!(lambert_w0(0.0).unwrap().w, 0.0);
        assert!((w0(E).unwrap() - 1.0).abs() < 1e-12);
        assert!((w0(1.0).unwrap() - 0.567_143_290_4).abs() < 1e-10);
        assert!((w0(1.0).unwrap() - bisect_w(1.0)).abs() < 1e-12);
        assert!((w0(100.0).unwrap() - 3.385_630_140_290_05).abs() < 1e-12);
        assert!((w0(11.0).unwrap() - 1.806_502_575_505_666).abs() < 1e-12);
        assert!((w0(1e6).unwrap() - 11.383_358_086_140_053).abs() < 1e-11);
    }

    #[test]
    fn agrees_with_bisection_oracle() {
        for &t in &[1e-8, 1e-3, 0.3, 2.0, 2.7, 3.0, 10.0, 1e3, 1e8, 1e15] {
            let got = w0(t).unwrap();
            let want = bisect_w(t);
            assert!(
                (got - want).abs() <= 1e-12 * want.max(1e-300) + 1e-15,
                "t={t}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(lambert_w0(-1e-9).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
        assert!(lambert_w0(f64::INFINITY).is_err());
        assert!(lambert_w_bounds(E).is_err());
        assert!(lambert_w_bounds(2.0).is_err());
        assert!(w_ratio_power(0.0).is_err());
    }

    #[test]
    fn handles_extremes() {
        let tiny = w0(1e-300).unwrap();
        assert!(tiny > 0.0 && (tiny - 1e-300).abs() < 1e-310);
        let huge = lambert_w0(f64::MAX).unwrap();
        assert!(huge.residual.abs() <= TOL_W * f64::MAX);
    }

    #[test]
    fn bounds_closed_form_at_e_squared() {
        let (lo, hi) = lambert_w_bounds(E * E).unwrap();
        assert!((lo - (2.0 - 2f64.ln())).abs() < 1e-14);
        assert!((hi - (2.0 - (2.0 - 2f64.ln()).ln())).abs() < 1e-14);
        assert!((lo - 1.306_85).abs() < 1e-5 && (hi - 1.732_37).abs() < 1e-5);
        let w = w0(E * E).unwrap();
        assert!(lo <= w && w <= hi);
    }

    #[test]
    fn bounds_near_e_and_at_100() {
        let t = E + 1e-9;
        let (lo, hi) = lambert_w_bounds(t).unwrap();
        let w = w0(t).unwrap();
        assert!((lo - 1.0).abs() < 1e-6 && lo <= w && w <= hi);
        let (lo, hi) = lambert_w_bounds(100.0).unwrap();
        assert!((lo - 3.077_990_560_180_191).abs() < 1e-13);
        let w = w0(100.0).unwrap();
        assert!(lo <= w && w <= hi);
    }

    #[test]
    fn limit_quantities_at_10() {
        let w11 = bisect_w(11.0);
        let v = w_ratio_power(10.0).unwrap();
        let upper = (1.0 / (bisect_w(10.0) + 1.0)).exp();
        assert!((upper - 1.4395).abs() < 1e-4);
        assert!((1.0..=upper).contains(&v));
        let direct = (w11 / bisect_w(10.0)).powf(10.0);
        assert!((v - direct).abs() < 1e-10);
        let fd = w_frac_diff(10.0).unwrap();
        assert!(fd >= 0.0 && fd <= 1.0 / w11);
        assert!((fd - (11.0 / w11 - 10.0 / bisect_w(10.0))).abs() < 1e-10);
    }

    #[test]
    fn limit_quantities_at_1e6() {
        let v = w_ratio_power(1e6).unwrap();
        assert!((1.0..=(1.0 / (w0(1e6).unwrap() + 1.0)).exp()).contains(&v));
        // 1.0841036282020216 from a 50-digit reference
        assert!((v - 1.084_103_628_202_021_6).abs() < 1e-12);
        let fd = w_frac_diff(1e6).unwrap();
        assert!(fd >= 0.0 && fd <= 1.0 / w0(1e6 + 1.0).unwrap());
        assert!((fd - 0.080_753_536_797_345_07).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for &t in &[0.01, 1.0, 50.0, 1e4, 1e9] {
            let h = t * 1e-6;
            let fd = (w0(t + h).unwrap() - w0(t - h).unwrap()) / (2.0 * h);
            let exact = w_derivative(t).unwrap();
            assert!(fd > 0.0);
            assert!((fd / exact - 1.0).abs() < 0.01, "t={t}");
        }
    }

    #[test]
    fn limit_quantities_for_tiny_t() {
        // here the direct differences lose nothing, so they serve as the oracle
        for &t in &[
            1e-6,
            2.833_096_101_839_324_3e-6,
            9.884_959_046_625_597e-6,
            9.771_241_535_346_5e-5,
            0.3,
        ] {
            let (w, w1) = (w0(t).unwrap(), w0(t + 1.0).unwrap());
            let fd = w_frac_diff(t).unwrap();
            assert!((fd - ((t + 1.0) / w1 - t / w)).abs() < 1e-13, "t={t}");
            let rp = w_ratio_power(t).unwrap();
            assert!((rp - (w1 / w).powf(t)).abs() < 1e-12, "t={t}");
        }
    }
}
