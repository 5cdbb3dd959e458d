//! Laplace (saddle-point) analysis of S(t) = ∫₀^∞ e^{Q(x,t)} dx with
//! Q(x,t) = t ln ln(1+x) − x.
//!
//! The saddle solves (1+x) ln(1+x) = t, so x_t = e^{W(t)} − 1, and every
//! quantity at the saddle has a closed form in W = W(t):
//!
//! * Q(x_t, t) = t ln W − e^{W} + 1
//! * Q″(x_t, t) = −(1 + W)/t
//!
//! Estimates are returned as [`SignedLogValue`] because e^{Q} overflows
//! long before the asymptotic regime.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};
use crate::lambertw;
use crate::signed_log::SignedLogValue;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaddleReport {
    pub t: f64,
    pub w: f64,
    pub x_t: f64,
    pub q_peak: f64,
    pub q_curv: f64,
    /// Neighbourhood scale μ(t) = e^{W(t)/4}.
    pub mu: f64,
    /// t − (1 + x_t) ln(1 + x_t)
    pub residual: f64,
}

/// Numerical evidence for the three conditions of the Laplace method at one t.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionCheck {
    /// Q″(x, t) < 0 at every point of the log grid on (0, 4x_t].
    pub cond2_ok: bool,
    /// x_t √|Q″(x_t, t)|, which must diverge with t.
    pub cond3_value: f64,
    /// sup over U(x_t) of |Q″(x,t)/Q″(x_t,t) − 1|, which must vanish with t.
    pub cond1_sup_dev: f64,
    /// Half-width μ(t) √(t/(1+W)) of U(x_t).
    pub neighbourhood_half_width: f64,
    /// Set when U(x_t) reached below 0 and was clipped.
    pub clipped_below_zero: bool,
}

/// Q(x, t) = t ln ln(1+x) − x.
pub fn q_value(x: f64, t: f64) -> f64 {
    t * x.ln_1p().ln() - x
}

/// ∂²Q/∂x² = −t (1 + ln(1+x)) / ((1+x) ln(1+x))².
pub fn q_second_derivative(x: f64, t: f64) -> f64 {
    let l = x.ln_1p();
    let d = (1.0 + x) * l;
    -t * (1.0 + l) / (d * d)
}

fn require_positive(routine: &'static str, t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            routine,
            format!("requires finite t > 0, got {t}"),
        ))
    }
}

pub fn saddle_point(t: f64) -> Result<SaddleReport> {
    require_positive("saddle_point", t)?;
    let w = lambertw::w0(t)?;
    let x_t = w.exp_m1();
    let l = x_t.ln_1p();
    Ok(SaddleReport {
        t,
        w,
        x_t,
        q_peak: t * w.ln() - w.exp() + 1.0,
        q_curv: -(1.0 + w) / t,
        mu: (w / 4.0).exp(),
        residual: t - (1.0 + x_t) * l,
    })
}

/// √(2πt/(W+1)) · exp(t ln W − e^W + 1): the Laplace estimate of S(t)
/// with the exact curvature at the saddle.
pub fn laplace_estimate_exact(t: f64) -> Result<SignedLogValue> {
    let sp = saddle_point(t)?;
    let ln_prefactor = 0.5 * (2.0 * PI * t / (sp.w + 1.0)).ln();
    Ok(SignedLogValue::from_ln(ln_prefactor + sp.q_peak))
}

/// e √(2πt) W^{t−1/2} e^{−t/W}: the leading-order form, which replaces
/// W + 1 by W in the curvature.
pub fn laplace_estimate_leading(t: f64) -> Result<SignedLogValue> {
    require_positive("laplace_estimate_leading", t)?;
    let w = lambertw::w0(t)?;
    let ln = 1.0 + 0.5 * (2.0 * PI * t).ln() + (t - 0.5) * w.ln() - t / w;
    Ok(SignedLogValue::from_ln(ln))
}

/// Leading-order estimate of K_n(r) = S(nr); exactly 1 when r = 0.
pub fn asymptotic_kn(n: u32, r: f64) -> Result<SignedLogValue> {
    if n == 0 {
        return Err(Error::domain("asymptotic_kn", "n must be >= 1"));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain(
            "asymptotic_kn",
            format!("r must lie in [0, 1], got {r}"),
        ));
    }
    if r == 0.0 {
        return Ok(SignedLogValue::ONE);
    }
    laplace_estimate_leading(f64::from(n) * r)
}

/// Grid check of the Laplace-method conditions at a single t > e.
///
/// Condition 1 is sampled on `grid_size` equispaced points of
/// U(x_t) = {|x − x_t| ≤ μ(t) √(t/(1+W))}; condition 2 on `grid_size`
/// log-spaced points of (0, 4x_t]. A finite grid gives evidence, not proof.
pub fn verify_laplace_conditions(t: f64, grid_size: usize) -> Result<ConditionCheck> {
    if t.is_nan() || t <= E || t.is_infinite() {
        return Err(Error::domain(
            "verify_laplace_conditions",
            format!("requires finite t > e, got {t}"),
        ));
    }
    if grid_size < 11 {
        return Err(Error::domain(
            "verify_laplace_conditions",
            format!("grid_size must be >= 11, got {grid_size}"),
        ));
    }
    let sp = saddle_point(t)?;

    let top = 4.0 * sp.x_t;
    let bottom = top * 1e-6;
    let step = (top / bottom).ln() / (grid_size - 1) as f64;
    let cond2_ok = (0..grid_size).all(|i| {
        let x = bottom * (step * i as f64).exp();
        q_second_derivative(x, t) < 0.0
    });

    let cond3_value = sp.x_t * (-sp.q_curv).sqrt();

    let half_width = sp.mu * (t / (1.0 + sp.w)).sqrt();
    let mut lo = sp.x_t - half_width;
    let clipped_below_zero = lo <= 0.0;
    if clipped_below_zero {
        lo = sp.x_t * 1e-9;
    }
    let hi = sp.x_t + half_width;
    let cond1_sup_dev = (0..grid_size)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (grid_size - 1) as f64;
            (q_second_derivative(x, t) / sp.q_curv - 1.0).abs()
        })
        .fold(0.0f64, f64::max);

    Ok(ConditionCheck {
        cond2_ok,
        cond3_value,
        cond1_sup_dev,
        neighbourhood_half_width: half_width,
        clipped_below_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saddle_at_e_is_closed_form() {
        let sp = saddle_point(E).unwrap();
        assert!((sp.x_t - (E - 1.0)).abs() < 1e-14);
        assert!((sp.q_peak - (1.0 - E)).abs() < 1e-14);
        assert!((sp.q_curv + 2.0 / E).abs() < 1e-15);
        assert!(sp.residual.abs() < 1e-14);
    }

    #[test]
    fn saddle_at_100() {
        let sp = saddle_point(100.0).unwrap();
        // 100 / W(100) - 1 with W(100) = 3.38563014029005
        assert!((sp.x_t - (100.0 / 3.385_630_140_290_05 - 1.0)).abs() < 1e-10);
        assert!((sp.x_t - 28.536).abs() < 1e-3);
        assert!(sp.q_curv < 0.0);
        assert!((q_second_derivative(sp.x_t, 100.0) / sp.q_curv - 1.0).abs() < 1e-12);
    }

    #[test]
    fn saddle_is_the_maximum_of_q() {
        for &t in &[0.5, 3.0, 100.0, 1e5] {
            let sp = saddle_point(t).unwrap();
            assert!((q_value(sp.x_t, t) - sp.q_peak).abs() < 1e-9 * sp.q_peak.abs().max(1.0));
            for f in [0.9, 0.99, 1.01, 1.1] {
                assert!(q_value(sp.x_t * f, t) < sp.q_peak);
            }
        }
    }

    #[test]
    fn estimates_at_e() {
        let want = 0.5 * (2.0 * PI * E / 2.0).ln() + 1.0 - E;
        assert!((laplace_estimate_exact(E).unwrap().logmag() - want).abs() < 1e-14);
        let want = 1.0 + 0.5 * (2.0 * PI * E).ln() - E;
        assert!((laplace_estimate_leading(E).unwrap().logmag() - want).abs() < 1e-14);
    }

    #[test]
    fn leading_to_exact_ratio() {
        for &t in &[0.1, E, 50.0, 1e4, 1e8] {
            let w = lambertw::w0(t).unwrap();
            let exact = laplace_estimate_exact(t).unwrap();
            let got = laplace_estimate_leading(t).unwrap().ln_ratio(&exact);
            let want = 0.5 * ((w + 1.0) / w).ln();
            // both logs carry rounding proportional to their own size
            assert!(
                (got - want).abs() < 1e-12 * exact.logmag().abs().max(1.0),
                "t={t}"
            );
        }
    }

    #[test]
    fn kn_definition() {
        assert_eq!(asymptotic_kn(17, 0.0).unwrap(), SignedLogValue::ONE);
        assert_eq!(
            asymptotic_kn(1000, 0.5).unwrap(),
            laplace_estimate_leading(500.0).unwrap()
        );
        assert!(asymptotic_kn(0, 1.0).is_err());
        assert!(asymptotic_kn(3, 1.5).is_err());
    }

    #[test]
    fn conditions() {
        let c = verify_laplace_conditions(100.0, 101).unwrap();
        assert!(c.cond2_ok);
        let w = 3.385_630_140_290_05f64;
        let want = (100.0 / w - 1.0) * ((1.0 + w) / 100.0).sqrt();
        assert!((c.cond3_value - want).abs() < 1e-10);
        // the leading-order value √(t/W) ≈ 5.43; the two agree up to 1 + o(1)
        assert!((c.cond3_value / (100.0 / w).sqrt() - 1.0).abs() < 0.15);
        let devs: Vec<f64> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&t| verify_laplace_conditions(t, 201).unwrap().cond1_sup_dev)
            .collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");
        assert!(verify_laplace_conditions(2.0, 101).is_err());
        assert!(verify_laplace_conditions(100.0, 5).is_err());
    }
}
