//! Per-dataset score tables: means with Mann-Whitney significance, and
//! above-threshold probabilities with Kolmogorov-Smirnov significance.
//!
//! Bonferroni family size is `4 devices x datasets in the run` for both
//! tables and is written into every rendered header.

use std::fmt::Write as _;

use serde::Serialize;

use super::{
    ccdf_at, ks_two_sample, mann_whitney_u, summarize_with, Spread, StatsError, SummaryStats, TestResult, Thresholds,
};
use crate::corpus::{PairCorpus, TextMode, SWAP_SUFFIX};
use crate::phonodict::PronDict;
use crate::scorer::{score_all, Device, PhoneticProfile};

/// Profiles of the persuasive and non-persuasive sides of one corpus.
#[derive(Debug, Clone)]
pub struct DatasetScores {
    pub name: String,
    pub persuasive: Vec<PhoneticProfile>,
    pub other: Vec<PhoneticProfile>,
}

impl DatasetScores {
    /// Scores every pair once; swapped twins of a symmetrized corpus are skipped.
    pub fn from_corpus(corpus: &PairCorpus, mode: TextMode, dict: &PronDict) -> Self {
        let originals: Vec<_> = corpus
            .pairs
            .iter()
            .filter(|p| !(corpus.symmetrized && p.pair_id.ends_with(SWAP_SUFFIX)))
            .collect();
        let p_texts: Vec<&str> = originals.iter().map(|p| p.persuasive()).collect();
        let np_texts: Vec<&str> = originals.iter().map(|p| p.non_persuasive()).collect();
        Self {
            name: corpus.name.clone(),
            persuasive: score_all(&p_texts, mode, dict),
            other: score_all(&np_texts, mode, dict),
        }
    }

    pub fn column(&self, persuasive: bool, device: Device) -> Vec<f64> {
        let side = if persuasive { &self.persuasive } else { &self.other };
        side.iter().map(|p| p.get(device)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeansRow {
    pub dataset: String,
    pub device: Device,
    pub persuasive: SummaryStats,
    pub other: SummaryStats,
    pub test: TestResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct AboveRow {
    pub dataset: String,
    pub device: Device,
    pub threshold: f64,
    pub persuasive: f64,
    pub other: f64,
    pub test: TestResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub family_size: usize,
    pub thresholds: Thresholds,
    pub means: Vec<MeansRow>,
    pub above: Vec<AboveRow>,
}

/// Means table for all datasets.
pub fn means_table(
    datasets: &[DatasetScores],
    spread: Spread,
    family_size: usize,
) -> Result<Vec<MeansRow>, StatsError> {
    let mut rows = Vec::new();
    for ds in datasets {
        for device in Device::ALL {
            let p = ds.column(true, device);
            let np = ds.column(false, device);
            rows.push(MeansRow {
                dataset: ds.name.clone(),
                device,
                persuasive: summarize_with(&p, spread)?,
                other: summarize_with(&np, spread)?,
                test: mann_whitney_u(&p, &np)?.adjusted(family_size),
            });
        }
    }
    Ok(rows)
}

/// Above-threshold probabilities for all datasets.
pub fn above_threshold_report(
    datasets: &[DatasetScores],
    thresholds: &Thresholds,
    family_size: usize,
) -> Result<Vec<AboveRow>, StatsError> {
    let mut rows = Vec::new();
    for ds in datasets {
        for device in Device::ALL {
            let t = thresholds.get(device);
            let p = ds.column(true, device);
            let np = ds.column(false, device);
            rows.push(AboveRow {
                dataset: ds.name.clone(),
                device,
                threshold: t,
                persuasive: ccdf_at(&p, t)?,
                other: ccdf_at(&np, t)?,
                test: ks_two_sample(&p, &np)?.adjusted(family_size),
            });
        }
    }
    Ok(rows)
}

/// Both tables with a shared Bonferroni family of `4 x datasets.len()`.
pub fn analyze(
    datasets: &[DatasetScores],
    thresholds: &Thresholds,
    spread: Spread,
) -> Result<AnalysisReport, StatsError> {
    let family_size = Device::ALL.len() * datasets.len().max(1);
    Ok(AnalysisReport {
        family_size,
        thresholds: *thresholds,
        means: means_table(datasets, spread, family_size)?,
        above: above_threshold_report(datasets, thresholds, family_size)?,
    })
}

impl AnalysisReport {
    pub fn find_means(&self, dataset: &str, device: Device) -> Option<&MeansRow> {
        self.means.iter().find(|r| r.dataset == dataset && r.device == device)
    }

    pub fn find_above(&self, dataset: &str, device: Device) -> Option<&AboveRow> {
        self.above.iter().find(|r| r.dataset == dataset && r.device == device)
    }

    pub fn means_tsv(&self) -> String {
        let mut out = format!("# bonferroni_family={}\n", self.family_size);
        out.push_str("dataset\tside\tdevice\tmean\tstd\tn\tstatistic\tp_raw\tp_adjusted\ttier\n");
        for r in &self.means {
            let d = r.device.name();
            let _ = writeln!(
                out,
                "{}\tnon_persuasive\t{d}\t{:.6}\t{:.6}\t{}\t\t\t\t",
                r.dataset, r.other.mean, r.other.std, r.other.n
            );
            let _ = writeln!(
                out,
                "{}\tpersuasive\t{d}\t{:.6}\t{:.6}\t{}\t{:.6}\t{:.6e}\t{:.6e}\t{}",
                r.dataset,
                r.persuasive.mean,
                r.persuasive.std,
                r.persuasive.n,
                r.test.statistic,
                r.test.p_raw,
                r.test.p_adjusted,
                r.test.tier
            );
        }
        out
    }

    pub fn above_tsv(&self) -> String {
        let mut out = format!("# bonferroni_family={}\n", self.family_size);
        out.push_str("dataset\tside\tdevice\tthreshold\tccdf\tstatistic\tp_raw\tp_adjusted\ttier\n");
        for r in &self.above {
            let d = r.device.name();
            let _ = writeln!(
                out,
                "{}\tnon_persuasive\t{d}\t{:.4}\t{:.6}\t\t\t\t",
                r.dataset, r.threshold, r.other
            );
            let _ = writeln!(
                out,
                "{}\tpersuasive\t{d}\t{:.4}\t{:.6}\t{:.6}\t{:.6e}\t{:.6e}\t{}",
                r.dataset, r.threshold, r.persuasive, r.test.statistic, r.test.p_raw, r.test.p_adjusted, r.test.tier
            );
        }
        out
    }

    /// Aligned text rendering of both tables, one block per table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Average phonetic scores (Mann-Whitney U, Bonferroni m={})",
            self.family_size
        );
        let mut header = format!("{:<24}", "dataset");
        for d in Device::ALL {
            let _ = write!(header, "{:>18}{:>8}", format!("{} mu", d.short()), "sigma");
        }
        out.push_str(header.trim_end());
        out.push('\n');
        for chunk in self.means.chunks(Device::ALL.len()) {
            let name = &chunk[0].dataset;
            let mut np = format!("{:<24}", format!("{name} ~P"));
            let mut p = format!("{:<24}", format!("{name} P"));
            for r in chunk {
                let _ = write!(np, "{:>18.3}{:>8.3}", r.other.mean, r.other.std);
                let _ = write!(
                    p,
                    "{:>18}{:>8.3}",
                    format!("{:.3}{}", r.persuasive.mean, r.test.tier),
                    r.persuasive.std
                );
            }
            out.push_str(np.trim_end());
            out.push('\n');
            out.push_str(p.trim_end());
            out.push('\n');
        }
        out.push('\n');
        let th = &self.thresholds;
        let _ = writeln!(
            out,
            "Probability above threshold (KS, Bonferroni m={}; t_rh={:.2} t_al={:.2} t_pl={:.2} t_ho={:.2})",
            self.family_size, th.rhyme, th.alliteration, th.plosive, th.homogeneity
        );
        let mut header = format!("{:<24}", "dataset");
        for d in Device::ALL {
            let _ = write!(header, "{:>14}", format!("F_{}(t)", d.short()));
        }
        out.push_str(header.trim_end());
        out.push('\n');
        for chunk in self.above.chunks(Device::ALL.len()) {
            let name = &chunk[0].dataset;
            let mut np = format!("{:<24}", format!("{name} ~P"));
            let mut p = format!("{:<24}", format!("{name} P"));
            for r in chunk {
                let _ = write!(np, "{:>14.3}", r.other);
                let _ = write!(p, "{:>14}", format!("{:.3}{}", r.persuasive, r.test.tier));
            }
            out.push_str(np.trim_end());
            out.push('\n');
            out.push_str(p.trim_end());
            out.push('\n');
        }
        out
    }
}
