//! Means and standard errors of correlated series, and weighted line fits.

/// Integrated autocorrelation time with Sokal's self-consistent window
/// (`W >= c τ(W)`, `c = 5`). A constant series has `τ = 1`.
pub fn integrated_autocorrelation(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 1.0;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let c0 = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    if c0 <= 0.0 {
        return 1.0;
    }
    let mut tau = 1.0;
    for t in 1..n {
        let ct = (0..n - t).map(|i| (x[i] - mean) * (x[i + t] - mean)).sum::<f64>() / n as f64;
        tau += 2.0 * ct / c0;
        if t as f64 >= 5.0 * tau {
            break;
        }
    }
    tau.max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub effective: f64,
}

/// Mean of independent replicas of a correlated series. The effective
/// sample count adds `N_r / τ_r` over replicas.
pub fn estimate(replicas: &[Vec<f64>]) -> Estimate {
    let samples: usize = replicas.iter().map(|r| r.len()).sum();
    if samples == 0 {
        return Estimate {
            value: f64::NAN,
            stderr: f64::NAN,
            samples: 0,
            effective: 0.0,
        };
    }
    let mean = replicas.iter().flatten().sum::<f64>() / samples as f64;
    let var = if samples > 1 {
        replicas.iter().flatten().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64
    } else {
        0.0
    };
    let effective: f64 = replicas
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| r.len() as f64 / integrated_autocorrelation(r))
        .sum();
    Estimate {
        value: mean,
        stderr: (var / effective).sqrt(),
        samples: samples as u64,
        effective,
    }
}

/// Least-squares line through `(x, y)` with known standard errors on `y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub points: usize,
}

pub fn weighted_line(points: &[(f64, f64, f64)]) -> Option<LineFit> {
    if points.len() < 2 {
        return None;
    }
    let (mut s, mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, se) in points {
        if se <= 0.0 || !se.is_finite() || !y.is_finite() {
            return None;
        }
        let w = 1.0 / (se * se);
        s += w;
        sx += w * x;
        sxx += w * x * x;
        sy += w * y;
        sxy += w * x * y;
    }
    let det = s * sxx - sx * sx;
    if det <= 0.0 {
        return None;
    }
    Some(LineFit {
        slope: (s * sxy - sx * sy) / det,
        slope_se: (s / det).sqrt(),
        intercept: (sxx * sy - sx * sxy) / det,
        points: points.len(),
    })
}

/// Fit of `log P` against `x` from probability estimates, using the delta
/// method `se(log P) = se(P) / P`. Points with fewer than `min_events`
/// expected events are dropped.
pub fn log_linear_fit(points: &[(f64, Estimate)], min_events: f64) -> Option<LineFit> {
    let usable: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|(_, e)| e.value > 0.0 && e.value * e.effective >= min_events && e.stderr > 0.0)
        .map(|(x, e)| (*x, e.value.ln(), e.stderr / e.value))
        .collect();
    weighted_line(&usable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn iid_series_has_unit_tau() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        let tau = integrated_autocorrelation(&x);
        assert!((tau - 1.0).abs() < 0.1, "{tau}");
    }

    #[test]
    fn ar1_series_matches_closed_form() {
        // For x_t = a x_{t-1} + noise, τ = (1 + a) / (1 - a).
        let a: f64 = 0.8;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut v = 0.0;
        let x: Vec<f64> = (0..200_000)
            .map(|_| {
                v = a * v + rng.random::<f64>() - 0.5;
                v
            })
            .collect();
        let tau = integrated_autocorrelation(&x);
        assert!((tau - 9.0).abs() < 1.0, "{tau}");
    }

    #[test]
    fn constant_series() {
        let e = estimate(&[vec![1.0; 50], vec![1.0; 50]]);
        assert_eq!(e.value, 1.0);
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.effective, 100.0);
    }

    #[test]
    fn exact_line() {
        let f = weighted_line(&[(0.0, 1.0, 0.1), (1.0, -1.0, 0.1), (2.0, -3.0, 0.1)]).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        // Var(slope) = 1 / Σ w (x - x̄)^2 = 0.01 / 2.
        assert!((f.slope_se - (0.005f64).sqrt()).abs() < 1e-12);
        assert!(weighted_line(&[(0.0, 1.0, 0.1)]).is_none());
    }
}
