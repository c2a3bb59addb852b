//! Flat CSV rows and JSON summaries for verification runs.
//!
//! CSV reals use 17 significant digits (`{:.16e}`), which round-trips every
//! finite `f64` exactly.

use std::collections::BTreeMap;

use serde::Serialize;

use super::VerifyReport;
use crate::model::pairwise_sum;

pub const CSV_HEADER: &str = "seed,k,n,m,alpha,input_index,tv,kl";

/// Appends one line per input row of `report`.
pub fn write_csv_rows(report: &VerifyReport, out: &mut String) {
    for (y, (tv, kl)) in report.per_input_tv.iter().zip(&report.per_input_kl).enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{:.16e},{},{:.16e},{:.16e}\n",
            report.seed, report.k, report.n, report.m, report.alpha, y, tv, kl
        ));
    }
}

/// Header plus the rows of every report, in order.
pub fn reports_to_csv(reports: &[VerifyReport]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in reports {
        write_csv_rows(r, &mut out);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorStats {
    pub count: usize,
    pub max_tv: f64,
    pub mean_tv: f64,
    pub max_kl: f64,
    pub mean_kl: f64,
}

/// Per-sharpness statistics over every input row of a set of reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    pub k: usize,
    pub n: usize,
    pub m: usize,
    /// Keyed by `alpha=<value>`.
    pub classes: BTreeMap<String, ErrorStats>,
}

pub fn summarize(reports: &[VerifyReport]) -> RunSummary {
    let mut grouped: BTreeMap<String, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in reports {
        let entry = grouped.entry(format!("alpha={}", r.alpha)).or_default();
        entry.0.extend_from_slice(&r.per_input_tv);
        entry.1.extend_from_slice(&r.per_input_kl);
    }
    let classes = grouped
        .into_iter()
        .map(|(key, (tv, kl))| {
            let stats = ErrorStats {
                count: tv.len(),
                max_tv: tv.iter().copied().fold(0.0, f64::max),
                mean_tv: pairwise_sum(&tv) / tv.len() as f64,
                max_kl: kl.iter().copied().fold(0.0, f64::max),
                mean_kl: pairwise_sum(&kl) / kl.len() as f64,
            };
            (key, stats)
        })
        .collect();
    let first = reports.first();
    RunSummary {
        seed: first.map_or(0, |r| r.seed),
        k: first.map_or(0, |r| r.k),
        n: first.map_or(0, |r| r.n),
        m: first.map_or(0, |r| r.m),
        classes,
    }
}
