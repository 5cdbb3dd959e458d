//! Row builders for the tabulating commands.

use std::f64::consts::E;

use momdet::asymptotics::{laplace_estimate_exact, laplace_estimate_leading, saddle_point};
use momdet::gamma::ln_factorial;
use momdet::lambertw::{lambert_w0, lambert_w_bounds};
use momdet::moments::{generate_moments_tol, FamilySpec};
use momdet::quadrature::{
    gamma_derivative_tol, integrate_logweighted, integrate_unit_log_power_tol,
};
use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
pub struct ReferenceRow {
    pub quantity: &'static str,
    pub computed: f64,
    pub published: f64,
    pub rel_deviation: f64,
    pub tolerance: String,
    pub within: Option<bool>,
    pub note: &'static str,
}

enum Tol {
    Abs(f64),
    Rel(f64),
}

fn row(quantity: &'static str, computed: f64, published: f64, tol: Tol) -> ReferenceRow {
    let (within, tolerance) = match tol {
        Tol::Abs(a) => ((computed - published).abs() <= a, format!("abs {a}")),
        Tol::Rel(r) => (
            (computed / published - 1.0).abs() <= r,
            format!("rel {}%", r * 100.0),
        ),
    };
    ReferenceRow {
        quantity,
        computed,
        published,
        rel_deviation: (computed / published - 1.0).abs(),
        tolerance,
        within: Some(within),
        note: "",
    }
}

/// The published table of ratios and values for K_n = S(n) and m_n = (n! K_n)².
pub fn reference_table(rel_tol: f64) -> Result<Vec<ReferenceRow>, CliError> {
    let ln_k = |n: u32| -> Result<f64, CliError> {
        Ok(integrate_logweighted(f64::from(n), rel_tol)?.value.logmag())
    };
    let ratio = |n: u32| -> Result<f64, CliError> { Ok((ln_k(n)? - ln_k(n - 1)?).exp()) };
    let seq = generate_moments_tol(
        &FamilySpec::x(1.0, 1.0).expect("valid family"),
        100,
        rel_tol,
    )?;
    let scaled = |n: usize| (seq.entries()[n].logmag() - 2.0 * ln_factorial(n as u64)).exp();

    let mut rows = vec![
        row("K1/K0", ratio(1)?, 0.60, Tol::Abs(0.01)),
        row("K2/K1", ratio(2)?, 0.89, Tol::Abs(0.01)),
        row("K3/K2", ratio(3)?, 1.09, Tol::Abs(0.01)),
        row("K4/K3", ratio(4)?, 1.24, Tol::Abs(0.01)),
        row("K100/K99", ratio(100)?, 3.39, Tol::Abs(0.01)),
        row("K2", ln_k(2)?.exp(), 0.53, Tol::Abs(0.01)),
        row("K99", ln_k(99)?.exp(), 1.32e41, Tol::Rel(0.01)),
        row("K100", ln_k(100)?.exp(), 4.47e41, Tol::Rel(0.01)),
        row("m2", seq.entries()[2].to_f64(), 1.13, Tol::Abs(0.01)),
        row("m99/(99!)^2", scaled(99), 1.73e82, Tol::Rel(0.02)),
        row("m100/(100!)^2", scaled(100), 2e83, Tol::Rel(0.02)),
    ];
    let m1 = seq.entries()[1].to_f64();
    rows.push(ReferenceRow {
        quantity: "m1",
        computed: m1,
        published: 1.0,
        rel_deviation: (m1 - 1.0).abs(),
        tolerance: "-".into(),
        within: None,
        note: "informational: published value inconsistent with m1 = K1^2",
    });
    Ok(rows)
}

#[derive(Serialize)]
pub struct AsymRow {
    pub t: f64,
    pub w: f64,
    pub x_t: f64,
    pub ln_s: f64,
    pub ln_exact_estimate: f64,
    pub ln_leading_estimate: f64,
    pub exact_over_s: f64,
    pub leading_over_s: f64,
}

pub fn asym_rows(ts: &[f64], rel_tol: f64) -> Result<Vec<AsymRow>, CliError> {
    ts.iter()
        .map(|&t| {
            let sp = saddle_point(t)?;
            let ln_s = integrate_logweighted(t, rel_tol)?.value.logmag();
            let exact = laplace_estimate_exact(t)?.logmag();
            let leading = laplace_estimate_leading(t)?.logmag();
            Ok(AsymRow {
                t,
                w: sp.w,
                x_t: sp.x_t,
                ln_s,
                ln_exact_estimate: exact,
                ln_leading_estimate: leading,
                exact_over_s: (exact - ln_s).exp(),
                leading_over_s: (leading - ln_s).exp(),
            })
        })
        .collect()
}

#[derive(Serialize)]
pub struct WRow {
    pub t: f64,
    pub w: f64,
    pub residual: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub in_bounds: Option<bool>,
    pub note: &'static str,
}

pub fn w_rows(ts: &[f64]) -> Result<Vec<WRow>, CliError> {
    ts.iter()
        .map(|&t| {
            let v = lambert_w0(t)?;
            let (bounds, note) = if t == E {
                // both bounds collapse to 1 = W(e)
                (Some((1.0, 1.0)), "boundary")
            } else if t > E {
                (Some(lambert_w_bounds(t)?), "")
            } else {
                (None, "bounds need t > e")
            };
            Ok(WRow {
                t,
                w: v.w,
                residual: v.residual,
                lower: bounds.map(|b| b.0),
                upper: bounds.map(|b| b.1),
                in_bounds: bounds.map(|(l, u)| l <= v.w && v.w <= u),
                note,
            })
        })
        .collect()
}

#[derive(Serialize)]
pub struct GammaRow {
    pub n: u32,
    pub gamma_n: f64,
    pub unit_part: f64,
    pub tail_part: f64,
    pub bracket_lower: f64,
    pub bracket_upper: f64,
    pub bracket_ok: bool,
    pub est_rel_error: f64,
}

/// Largest n for which n! is finite in double precision.
pub const GAMMA_NMAX_LIMIT: u32 = 170;

pub fn gamma_rows(n_max: u32, rel_tol: f64) -> Result<Vec<GammaRow>, CliError> {
    if n_max > GAMMA_NMAX_LIMIT {
        return Err(CliError::input(format!(
            "--nmax must be at most {GAMMA_NMAX_LIMIT} for gamma-derivs"
        )));
    }
    (0..=n_max)
        .map(|n| {
            let g = gamma_derivative_tol(n, rel_tol)?;
            let unit = integrate_unit_log_power_tol(n, rel_tol)?.value;
            let tail = integrate_logweighted(f64::from(n), rel_tol)?.value.logmag() - 1.0;
            let fact = ln_factorial(u64::from(n));
            Ok(GammaRow {
                n,
                gamma_n: g.value.to_f64(),
                unit_part: unit.to_f64(),
                tail_part: tail.exp(),
                bracket_lower: (fact - 1.0).exp(),
                bracket_upper: fact.exp(),
                bracket_ok: fact - 1.0 <= unit.logmag() && unit.logmag() <= fact,
                est_rel_error: g.est_rel_error,
            })
        })
        .collect()
}
