use serde::{Deserialize, Serialize};

use super::{summarize, StatsError};
use crate::corpus::TextMode;
use crate::phonodict::PronDict;
use crate::scorer::{score_all, Device};

/// Fraction of `scores` strictly greater than `t`.
pub fn ccdf_at(scores: &[f64], t: f64) -> Result<f64, StatsError> {
    if scores.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(StatsError::ThresholdOutOfRange(t.to_string()));
    }
    let above = scores.iter().filter(|&&s| s > t).count();
    Ok(above as f64 / scores.len() as f64)
}

/// Per-device cutoffs for "clearly euphonic" sentences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub rhyme: f64,
    pub alliteration: f64,
    pub plosive: f64,
    pub homogeneity: f64,
    /// Number of reference sentences the cutoffs were averaged over.
    pub source_size: usize,
}

impl Thresholds {
    /// Published means over a 534-sentence tongue-twister collection.
    pub const TONGUE_TWISTER_REFERENCE: Thresholds = Thresholds {
        rhyme: 0.55,
        alliteration: 0.58,
        plosive: 0.20,
        homogeneity: 0.68,
        source_size: 534,
    };

    pub fn get(&self, device: Device) -> f64 {
        match device {
            Device::Rhyme => self.rhyme,
            Device::Alliteration => self.alliteration,
            Device::Plosive => self.plosive,
            Device::Homogeneity => self.homogeneity,
        }
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self::TONGUE_TWISTER_REFERENCE
    }
}

/// The bundled tongue-twister collection, one sentence per line.
pub fn bundled_tongue_twisters() -> Vec<&'static str> {
    include_str!("../../assets/tongue_twisters.txt")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

/// Each threshold is the mean score of that device over `reference`.
pub fn derive_thresholds<S: AsRef<str> + Sync>(reference: &[S], dict: &PronDict) -> Result<Thresholds, StatsError> {
    if reference.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let profiles = score_all(reference, TextMode::Generic, dict);
    let mean = |d: Device| -> Result<f64, StatsError> {
        let xs: Vec<f64> = profiles.iter().map(|p| p.get(d)).collect();
        Ok(summarize(&xs)?.mean)
    };
    Ok(Thresholds {
        rhyme: mean(Device::Rhyme)?,
        alliteration: mean(Device::Alliteration)?,
        plosive: mean(Device::Plosive)?,
        homogeneity: mean(Device::Homogeneity)?,
        source_size: reference.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scorer::score_sentence;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn fixture() -> PronDict {
        PronDict::parse(include_str!("../../assets/cmudict-fixture.dict")).unwrap()
    }

    #[test]
    fn ccdf_examples() {
        assert_abs_diff_eq!(ccdf_at(&[0.1, 0.6, 0.7], 0.55).unwrap(), 2.0 / 3.0);
        assert_eq!(ccdf_at(&[0.0, 0.5, 1.0], 1.0).unwrap(), 0.0);
        assert_eq!(ccdf_at(&[0.3, 0.5], 0.1).unwrap(), 1.0);
        // Strict inequality.
        assert_eq!(ccdf_at(&[0.55], 0.55).unwrap(), 0.0);
        assert_eq!(ccdf_at(&[], 0.5), Err(StatsError::EmptySample));
        assert!(ccdf_at(&[0.1], 1.5).is_err());
    }

    #[test]
    fn thresholds_from_one_sentence() {
        let d = fixture();
        let s = "Peter Piper picked a peck of pickled peppers.";
        let th = derive_thresholds(&[s], &d).unwrap();
        let p = score_sentence(s, &d);
        assert_eq!(th.rhyme, p.rhyme);
        assert_eq!(th.alliteration, p.alliteration);
        assert_eq!(th.plosive, p.plosive);
        assert_eq!(th.homogeneity, p.homogeneity);
        assert_eq!(th.source_size, 1);
    }

    #[test]
    fn plosive_free_reference() {
        let th = derive_thresholds(&["so so", "she sells sea shells"], &fixture()).unwrap();
        assert_eq!(th.plosive, 0.0);
        assert!(derive_thresholds::<&str>(&[], &fixture()).is_err());
    }

    #[test]
    fn reference_constants() {
        let t = Thresholds::default();
        assert_eq!(Device::ALL.map(|d| t.get(d)), [0.55, 0.58, 0.20, 0.68]);
    }

    proptest! {
        #[test]
        fn ccdf_monotone(xs in prop::collection::vec(0.0f64..=1.0, 1..40), t1 in 0.0f64..=1.0, t2 in 0.0f64..=1.0) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(ccdf_at(&xs, lo).unwrap() >= ccdf_at(&xs, hi).unwrap());
        }
    }
}
