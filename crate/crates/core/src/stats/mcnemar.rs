//! Paired comparison of two classifiers and an exact binomial test.

use statrs::function::erf::erfc;
use statrs::function::factorial::ln_binomial;

use super::{StatsError, TestResult};

/// Discordant totals below this use the exact binomial p-value.
pub const EXACT_BELOW: u64 = 20;

/// Discordant cell counts: `b` = only `a` correct, `c` = only `b` correct.
pub fn mcnemar_counts(correct_a: &[bool], correct_b: &[bool]) -> Result<(u64, u64), StatsError> {
    if correct_a.len() != correct_b.len() {
        return Err(StatsError::LengthMismatch(correct_a.len(), correct_b.len()));
    }
    let mut b = 0;
    let mut c = 0;
    for (&x, &y) in correct_a.iter().zip(correct_b) {
        match (x, y) {
            (true, false) => b += 1,
            (false, true) => c += 1,
            _ => {}
        }
    }
    Ok((b, c))
}

/// McNemar's test on per-instance correctness vectors.
pub fn mcnemar(correct_a: &[bool], correct_b: &[bool]) -> Result<TestResult, StatsError> {
    let (b, c) = mcnemar_counts(correct_a, correct_b)?;
    Ok(mcnemar_from_counts(b, c))
}

/// The statistic is always the continuity-corrected chi-square value; the
/// p-value is exact binomial when `b + c < 20`.
pub fn mcnemar_from_counts(b: u64, c: u64) -> TestResult {
    let n = b + c;
    if n == 0 {
        return TestResult::new(0.0, 1.0);
    }
    let diff = (b as f64 - c as f64).abs() - 1.0;
    let statistic = diff.max(0.0).powi(2) / n as f64;
    let p = if n < EXACT_BELOW {
        binomial_two_sided(b.min(c), n, 0.5)
    } else {
        // Chi-square with one degree of freedom: P(X > s) = erfc(sqrt(s / 2)).
        erfc((statistic / 2.0).sqrt())
    };
    TestResult::new(statistic, p)
}

fn ln_pmf(k: u64, n: u64, p: f64) -> f64 {
    ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()
}

/// Two-sided exact binomial p-value: total probability of outcomes no more
/// likely than the observed one.
fn binomial_two_sided(k: u64, n: u64, p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        let expected = if p <= 0.0 { 0 } else { n };
        return if k == expected { 1.0 } else { 0.0 };
    }
    let observed = ln_pmf(k, n, p);
    let tol = 1e-7;
    let total: f64 = (0..=n)
        .map(|i| ln_pmf(i, n, p))
        .filter(|&l| l <= observed + tol)
        .map(f64::exp)
        .sum();
    total.min(1.0)
}

/// Exact two-sided binomial test of `successes` out of `trials` against rate `p`.
/// The statistic is the observed proportion.
pub fn binomial_test(successes: u64, trials: u64, p: f64) -> Result<TestResult, StatsError> {
    if trials == 0 {
        return Err(StatsError::EmptySample);
    }
    let p_value = binomial_two_sided(successes.min(trials), trials, p);
    Ok(TestResult::new(successes as f64 / trials as f64, p_value))
}
