use serde::{Deserialize, Serialize};

use super::StatsError;

/// Which standard deviation to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spread {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n - 1` (falls back to 0 when `n = 1`).
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// Mean and population standard deviation.
pub fn summarize(xs: &[f64]) -> Result<SummaryStats, StatsError> {
    summarize_with(xs, Spread::Population)
}

pub fn summarize_with(xs: &[f64], spread: Spread) -> Result<SummaryStats, StatsError> {
    if xs.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    let denom = match spread {
        Spread::Population => n as f64,
        Spread::Sample if n > 1 => (n - 1) as f64,
        Spread::Sample => return Ok(SummaryStats { mean, std: 0.0, n }),
    };
    Ok(SummaryStats {
        mean,
        std: (ss / denom).sqrt(),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn examples() {
        let s = summarize(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.std, s.n), (1.0, 0.0, 3));
        let s = summarize(&[0.0, 1.0]).unwrap();
        assert_eq!((s.mean, s.std), (0.5, 0.5));
        // sqrt(((-0.3)^2 + (-0.1)^2 + 0.4^2) / 3) = sqrt(0.26 / 3)
        let s = summarize(&[0.2, 0.4, 0.9]).unwrap();
        assert_abs_diff_eq!(s.mean, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.std, (0.26f64 / 3.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(s.std, 0.294, epsilon = 5e-4);
    }

    #[test]
    fn sample_spread_and_empty() {
        assert_eq!(summarize(&[]), Err(StatsError::EmptySample));
        let s = summarize_with(&[0.0, 1.0], Spread::Sample).unwrap();
        assert_abs_diff_eq!(s.std, 0.5f64.sqrt());
        assert_eq!(summarize_with(&[3.0], Spread::Sample).unwrap().std, 0.0);
    }
}
