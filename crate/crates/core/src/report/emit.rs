//! Canonical JSON and CSV output.

use std::fs;
use std::path::Path;

use super::AnalysisReport;
use crate::detect::IssueKind;
use crate::error::ReportError;

pub const CSV_FILES: [&str; 3] = ["frequency.csv", "cooccurrence.csv", "findings.csv"];

/// Pretty-printed JSON with a trailing newline.
pub fn render_json(report: &AnalysisReport) -> Result<String, ReportError> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

pub fn write_json(report: &AnalysisReport, path: &Path) -> Result<(), ReportError> {
    write(path, &render_json(report)?)
}

fn write(path: &Path, text: &str) -> Result<(), ReportError> {
    fs::write(path, text).map_err(|source| ReportError::Io { path: path.to_path_buf(), source })
}

fn csv_text(rows: Vec<Vec<String>>) -> Result<String, ReportError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output of utf-8 fields is utf-8"))
}

/// The three CSV documents, in [`CSV_FILES`] order.
pub fn render_csv(report: &AnalysisReport) -> Result<[String; 3], ReportError> {
    let f = &report.frequency;
    let mut frequency = vec![["kind", "pct_test_methods", "n_test_methods", "n_test_classes", "n_projects"]
        .map(String::from)
        .to_vec()];
    for kind in IssueKind::ALL {
        let r = f.row(kind);
        frequency.push(vec![
            kind.to_string(),
            r.pct_text(),
            r.n_test_methods.to_string(),
            r.n_test_classes.to_string(),
            r.n_projects.to_string(),
        ]);
    }
    let total_pct = if f.total_test_methods == 0 { "0.0" } else { "100.0" };
    frequency.push(vec![
        "TOTAL".into(),
        total_pct.into(),
        f.total_test_methods.to_string(),
        f.total_test_classes.to_string(),
        f.total_projects.to_string(),
    ]);

    let m = &report.cooccurrence;
    let mut header = vec!["kind".to_string()];
    header.extend(m.kinds.iter().map(|k| k.to_string()));
    let mut cooccurrence = vec![header];
    for (kind, counts) in m.kinds.iter().zip(&m.counts) {
        let mut row = vec![kind.to_string()];
        row.extend(counts.iter().map(|c| c.to_string()));
        cooccurrence.push(row);
    }

    let mut findings = vec![["kind", "suite", "test", "lines", "related_tests", "note", "subcase"]
        .map(String::from)
        .to_vec()];
    for x in &report.findings {
        let lines: Vec<String> = x.evidence_lines.iter().map(u32::to_string).collect();
        findings.push(vec![
            x.kind.to_string(),
            x.suite.clone(),
            x.test.clone(),
            lines.join(";"),
            x.related_tests.join(";"),
            x.note.clone(),
            x.subcase.clone().unwrap_or_default(),
        ]);
    }
    Ok([csv_text(frequency)?, csv_text(cooccurrence)?, csv_text(findings)?])
}

/// Writes the CSV documents into `dir`, creating it if needed.
pub fn write_csv(report: &AnalysisReport, dir: &Path) -> Result<(), ReportError> {
    fs::create_dir_all(dir).map_err(|source| ReportError::Io { path: dir.to_path_buf(), source })?;
    for (name, text) in CSV_FILES.iter().zip(render_csv(report)?) {
        write(&dir.join(name), &text)?;
    }
    Ok(())
}
