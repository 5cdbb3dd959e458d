//! Least-squares fits on log-log data and the shared series-divergence rule.

/// Ordinary least-squares slope of `ys` against `xs`.
pub(crate) fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Fits y = c + a·x₁ + b·x₂ by least squares and returns (a, b).
pub(crate) fn slope2(x1: &[f64], x2: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = ys.len() as f64;
    let m1 = x1.iter().sum::<f64>() / n;
    let m2 = x2.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut s11, mut s22, mut s12, mut s1y, mut s2y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..ys.len() {
        let (a, b, y) = (x1[i] - m1, x2[i] - m2, ys[i] - my);
        s11 += a * a;
        s22 += b * b;
        s12 += a * b;
        s1y += a * y;
        s2y += b * y;
    }
    let det = s11 * s22 - s12 * s12;
    ((s1y * s22 - s2y * s12) / det, (s2y * s11 - s1y * s12) / det)
}

/// First index of the tail window: the last half of 1..=n_max, never below
/// `n_min` and never below 2 (the log-scale fits need ln ln n).
pub(crate) fn tail_start(n_min: usize, n_max: usize) -> usize {
    n_min.max(n_max.div_ceil(2)).max(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Decision {
    Diverges,
    Converges,
    Undecided,
}

/// Decision on the logarithmic scale. With a summand of the form
/// b_n / (n ln n), `beta` is the fitted exponent in b_n ~ (ln n)^{-beta}.
/// A slow decay of b_n (beta < 1 − ε) cannot be told apart from b_n
/// settling at a positive limit along a log scale, so it counts as
/// divergence; decay at least as fast as 1/ln n counts as convergence.
pub(crate) fn log_scale_decision(beta: f64, eps: f64) -> Decision {
    if !beta.is_finite() {
        Decision::Undecided
    } else if beta < 1.0 - eps {
        Decision::Diverges
    } else if beta > 1.0 + eps {
        Decision::Converges
    } else {
        Decision::Undecided
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_lines() {
        let xs: Vec<f64> = (2..20).map(|i| f64::from(i).ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 1.5 * x).collect();
        assert!((slope(&xs, &ys) + 1.5).abs() < 1e-12);

        let x2: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ys: Vec<f64> = xs
            .iter()
            .zip(&x2)
            .map(|(a, b)| 0.3 - 1.1 * a - 2.0 * b)
            .collect();
        let (a, b) = slope2(&xs, &x2, &ys);
        assert!((a + 1.1).abs() < 1e-9 && (b + 2.0).abs() < 1e-9, "{a} {b}");
    }

    #[test]
    fn windows() {
        assert_eq!(tail_start(1, 200), 100);
        assert_eq!(tail_start(1, 201), 101);
        assert_eq!(tail_start(150, 200), 150);
        assert_eq!(tail_start(1, 3), 2);
    }
}
