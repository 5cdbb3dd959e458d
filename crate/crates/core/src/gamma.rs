//! Log-gamma by the Stirling series.

use std::f64::consts::PI;

// B_{2k} / (2k (2k - 1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

// Below this the series is not used directly; the argument is shifted up
// with the recurrence first. At x = 15 the first omitted term is < 1e-19.
const SHIFT: f64 = 15.0;

/// ln Γ(x) for x > 0.
///
/// Arguments below 15 are shifted up by the recurrence Γ(x+1) = xΓ(x), with
/// the shift factors collected into one product so only a single log is taken.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let mut z = x;
    let mut shift = 1.0;
    while z < SHIFT {
        shift *= z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    let stirling = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series;
    stirling - shift.ln()
}

/// ln n!
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials() {
        let mut fact = 1.0f64;
        for n in 1..=25u64 {
            fact *= n as f64;
            let got = ln_factorial(n);
            assert!(
                (got - fact.ln()).abs() < 1e-13 * fact.ln().max(1.0),
                "n={n}"
            );
        }
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
    }

    #[test]
    fn half_integers() {
        // Γ(1/2) = √π, Γ(5/2) = 3√π/4
        let sqrt_pi_ln = 0.5 * PI.ln();
        assert!((ln_gamma(0.5) - sqrt_pi_ln).abs() < 1e-14);
        assert!((ln_gamma(2.5) - (0.75f64.ln() + sqrt_pi_ln)).abs() < 1e-14);
    }

    #[test]
    fn large_argument_against_recurrence() {
        for &x in &[20.3, 150.0, 1234.5, 1e6] {
            let lhs = ln_gamma(x + 1.0) - ln_gamma(x);
            assert!((lhs - x.ln()).abs() < 1e-12 * x.ln().max(1.0), "x={x}");
        }
    }

    #[test]
    fn factorial_100() {
        // ln(100!) = 363.73937555556347...
        assert!((ln_factorial(100) - 363.739_375_555_563_47).abs() < 1e-11);
    }
}
