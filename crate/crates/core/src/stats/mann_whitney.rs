//! Two-sided Mann-Whitney U test.
//!
//! Ranks use midranks for ties. Small designs (`n * m < 20`) get an exact
//! p-value from the permutation distribution of the observed ranks; larger
//! designs use the tie-corrected normal approximation with a 0.5 continuity
//! correction.

use statrs::function::erf::erfc;

use super::{StatsError, TestResult};

/// Designs with `n * m` below this use the exact distribution.
pub const EXACT_BELOW: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MwuMethod {
    #[default]
    Auto,
    Exact,
    Asymptotic,
}

/// Midranks of the pooled sample, `a` first then `b`.
fn pooled_midranks(a: &[f64], b: &[f64]) -> (Vec<f64>, f64) {
    let n = a.len() + b.len();
    let mut order: Vec<(f64, usize)> = a.iter().chain(b).copied().zip(0..).collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = vec![0.0; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && order[j].0 == order[i].0 {
            j += 1;
        }
        let mid = (i + j + 1) as f64 / 2.0;
        for &(_, idx) in &order[i..j] {
            ranks[idx] = mid;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    (ranks, tie_term)
}

/// U statistic of `a`.
fn u_statistic(ranks: &[f64], n_a: usize) -> f64 {
    let r_a: f64 = ranks[..n_a].iter().sum();
    r_a - (n_a * (n_a + 1)) as f64 / 2.0
}

pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    mann_whitney_u_with(a, b, MwuMethod::Auto)
}

/// The reported statistic is the U of `a`; the p-value is symmetric in the
/// argument order.
pub fn mann_whitney_u_with(a: &[f64], b: &[f64], method: MwuMethod) -> Result<TestResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let (ranks, tie_term) = pooled_midranks(a, b);
    let u = u_statistic(&ranks, a.len());
    let exact = match method {
        MwuMethod::Auto => a.len() * b.len() < EXACT_BELOW,
        MwuMethod::Exact => true,
        MwuMethod::Asymptotic => false,
    };
    let p = if exact {
        exact_p(&ranks, a.len(), u)
    } else {
        normal_p(a.len(), b.len(), u, tie_term)
    };
    Ok(TestResult::new(u, p))
}

fn normal_p(n: usize, m: usize, u: f64, tie_term: f64) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let total = nf + mf;
    let mu = nf * mf / 2.0;
    let var = nf * mf / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u - mu).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Exact two-sided p-value, valid with ties.
pub fn mann_whitney_exact_p(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let (ranks, _) = pooled_midranks(a, b);
    let u = u_statistic(&ranks, a.len());
    Ok(exact_p(&ranks, a.len(), u))
}

/// Counts, over all ways to pick `n_a` of the pooled ranks, the fraction whose
/// U is at least as far from its mean as the observed one. Doubled midranks
/// are integers, so a subset-sum table over them is exact.
fn exact_p(ranks: &[f64], n_a: usize, u_obs: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    // counts[k][s]: subsets of size k with doubled rank sum s.
    let mut counts = vec![vec![0.0f64; max_sum + 1]; n_a + 1];
    counts[0][0] = 1.0;
    for &r in &doubled {
        for k in (1..=n_a).rev() {
            let (lower, upper) = counts.split_at_mut(k);
            let (prev, cur) = (&lower[k - 1], &mut upper[0]);
            for s in (r..=max_sum).rev() {
                if prev[s - r] != 0.0 {
                    cur[s] += prev[s - r];
                }
            }
        }
    }
    let n_b = ranks.len() - n_a;
    // In doubled units: 2U = S - n_a(n_a + 1), mean 2U = n_a * n_b.
    let offset = (n_a * (n_a + 1)) as f64;
    let center = (n_a * n_b) as f64;
    let observed = (2.0 * u_obs - center).abs();
    let (mut hit, mut all) = (0.0, 0.0);
    for (s, &c) in counts[n_a].iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        all += c;
        if ((s as f64 - offset) - center).abs() >= observed - 1e-9 {
            hit += c;
        }
    }
    (hit / all).min(1.0)
}
