//! CSV outputs: experiment report, sampled cases and reduction provenance.
//!
//! Floats are written with 9 significant digits; missing values are empty.

use std::io;

use super::numfmt::fmt_sig;
use crate::experiment::{ExperimentSummary, TestCase};
use crate::network::Network;
use crate::reduction::ReductionReport;

pub const REPORT_HEADER: [&str; 11] = [
    "phase",
    "disease_id",
    "n_cases",
    "mean_tp_two_level",
    "mean_tp_three_level",
    "mean_fp_two_level",
    "mean_fp_three_level",
    "t_stat",
    "df",
    "sig95",
    "sig975",
];

pub const CASES_HEADER: [&str; 5] = ["case_id", "node_id", "kind", "phase", "value"];

pub const PROVENANCE_HEADER: [&str; 5] = ["src", "dst", "eta", "path", "composed_eta"];

const DIGITS: usize = 9;

fn num(x: f64) -> String {
    fmt_sig(x, DIGITS)
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// One row per (phase, disease) in phase-then-id order; `n_cases` counts the
/// cases in which the disease is present.
pub fn write_report<W: io::Write>(w: W, summary: &ExperimentSummary) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(REPORT_HEADER)?;
    for c in &summary.cells {
        let t = c.t_test;
        out.write_record([
            c.phase.to_string(),
            c.disease.to_string(),
            c.n_present.to_string(),
            opt(c.mean_tp_two),
            opt(c.mean_tp_three),
            opt(c.mean_fp_two),
            opt(c.mean_fp_three),
            t.map(|t| num(t.t)).unwrap_or_default(),
            t.map(|t| t.df.to_string()).unwrap_or_default(),
            t.map(|t| flag(t.sig95).to_string()).unwrap_or_default(),
            t.map(|t| flag(t.sig975).to_string()).unwrap_or_default(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One row per (case, disease or finding); `phase` is empty for diseases and
/// `value` is 1 for present.
pub fn write_cases<W: io::Write>(w: W, net: &Network, cases: &[TestCase]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CASES_HEADER)?;
    for case in cases {
        let id = case.case_id.to_string();
        for (d, v) in case.true_diseases.iter() {
            out.write_record([id.as_str(), d.as_str(), "disease", "", flag(v)])?;
        }
        for (k, bucket) in case.findings_by_phase.iter().enumerate() {
            let phase = (k + 1).to_string();
            for (f, v) in bucket.iter() {
                debug_assert!(net.node(f.as_str()).is_some());
                out.write_record([id.as_str(), f.as_str(), "finding", phase.as_str(), flag(v)])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// One row per source path of each reduced edge, paths written `A>B>C`.
pub fn write_provenance<W: io::Write>(w: W, report: &ReductionReport) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(PROVENANCE_HEADER)?;
    for prov in &report.provenance {
        let eta = report
            .reduced
            .eta(prov.src.as_str(), prov.dst.as_str())
            .map(num)
            .unwrap_or_default();
        for (path, composed) in prov.source_paths.iter().zip(&prov.composed_etas) {
            let path = path
                .iter()
                .map(|n| n.as_str())
                .collect::<Vec<_>>()
                .join(">");
            out.write_record([
                prov.src.as_str(),
                prov.dst.as_str(),
                eta.as_str(),
                path.as_str(),
                num(*composed).as_str(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}
