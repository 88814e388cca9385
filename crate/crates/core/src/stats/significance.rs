use std::fmt;

use serde::{Deserialize, Serialize};

/// Significance bucket of an adjusted p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    #[serde(rename = "***")]
    P001,
    #[serde(rename = "**")]
    P01,
    #[serde(rename = "*")]
    P05,
    #[serde(rename = "ns")]
    NotSignificant,
}

impl Tier {
    pub fn of(p: f64) -> Tier {
        if p < 0.001 {
            Tier::P001
        } else if p < 0.01 {
            Tier::P01
        } else if p < 0.05 {
            Tier::P05
        } else {
            Tier::NotSignificant
        }
    }

    pub fn stars(self) -> &'static str {
        match self {
            Tier::P001 => "***",
            Tier::P01 => "**",
            Tier::P05 => "*",
            Tier::NotSignificant => "ns",
        }
    }

    pub fn is_significant(self) -> bool {
        self != Tier::NotSignificant
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.stars())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub tier: Tier,
}

impl TestResult {
    /// An unadjusted result; `p` is clamped to `[0, 1]`.
    pub fn new(statistic: f64, p: f64) -> Self {
        let p = p.clamp(0.0, 1.0);
        Self {
            statistic,
            p_raw: p,
            p_adjusted: p,
            tier: Tier::of(p),
        }
    }

    /// Applies a Bonferroni correction for `m` comparisons.
    pub fn adjusted(self, m: usize) -> Self {
        let p_adjusted = bonferroni(self.p_raw, m.max(1));
        Self {
            p_adjusted,
            tier: Tier::of(p_adjusted),
            ..self
        }
    }
}

/// `min(1, m * p)`. `m = 0` is treated as 1.
pub fn bonferroni(p: f64, m: usize) -> f64 {
    (p * m.max(1) as f64).min(1.0)
}
