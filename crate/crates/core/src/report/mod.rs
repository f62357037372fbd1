//! Aggregation of findings into per-kind frequencies and a co-occurrence matrix.

mod emit;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::detect::{IssueFinding, IssueKind};
use crate::error::ReportError;

pub use emit::{render_csv, render_json, write_csv, write_json, CSV_FILES};

/// One analyzed suite, as far as aggregation is concerned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub suite: String,
    pub project: String,
    pub test_methods: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FrequencyRow {
    /// Share of all test methods, in tenths of a percent.
    #[serde(rename = "pct_test_methods", serialize_with = "tenths_out", deserialize_with = "tenths_in")]
    pub pct_tenths: u64,
    pub n_test_methods: usize,
    pub n_test_classes: usize,
    pub n_projects: usize,
}

impl FrequencyRow {
    /// "14.0" style rendering.
    pub fn pct_text(&self) -> String {
        format!("{}.{}", self.pct_tenths / 10, self.pct_tenths % 10)
    }
}

fn tenths_out<S: Serializer>(t: &u64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(*t as f64 / 10.0)
}

fn tenths_in<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
    let pct = f64::deserialize(d)?;
    Ok((pct * 10.0).round() as u64)
}

/// `part / whole` as a percentage in tenths, rounded half-up.
pub fn percent_tenths(part: usize, whole: usize) -> u64 {
    if whole == 0 {
        return 0;
    }
    let (part, whole) = (part as u128, whole as u128);
    ((part * 2000 + whole) / (2 * whole)) as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub total_test_methods: usize,
    pub total_test_classes: usize,
    pub total_projects: usize,
    /// Every kind is present, in catalog order.
    pub rows: BTreeMap<IssueKind, FrequencyRow>,
}

impl FrequencyReport {
    pub fn row(&self, kind: IssueKind) -> FrequencyRow {
        self.rows.get(&kind).copied().unwrap_or_default()
    }
}

/// Counts each test method, suite and project at most once per kind.
pub fn aggregate(findings: &[IssueFinding], corpus: &[CorpusEntry]) -> Result<FrequencyReport, ReportError> {
    let projects: BTreeMap<&str, &str> = corpus.iter().map(|e| (e.suite.as_str(), e.project.as_str())).collect();
    let mut methods: BTreeMap<IssueKind, BTreeSet<(&str, &str)>> = BTreeMap::new();
    let mut classes: BTreeMap<IssueKind, BTreeSet<&str>> = BTreeMap::new();
    let mut owners: BTreeMap<IssueKind, BTreeSet<&str>> = BTreeMap::new();
    for f in findings {
        let project = projects
            .get(f.suite.as_str())
            .ok_or_else(|| ReportError::InconsistentTotals(f.suite.clone()))?;
        methods.entry(f.kind).or_default().insert((&f.suite, &f.test));
        classes.entry(f.kind).or_default().insert(&f.suite);
        owners.entry(f.kind).or_default().insert(project);
    }
    let total_test_methods = corpus.iter().map(|e| e.test_methods).sum();
    fn count<T>(m: &BTreeMap<IssueKind, BTreeSet<T>>, k: IssueKind) -> usize {
        m.get(&k).map_or(0, BTreeSet::len)
    }
    let rows = IssueKind::ALL
        .into_iter()
        .map(|k| {
            let n = count(&methods, k);
            let row = FrequencyRow {
                pct_tenths: percent_tenths(n, total_test_methods),
                n_test_methods: n,
                n_test_classes: count(&classes, k),
                n_projects: count(&owners, k),
            };
            (k, row)
        })
        .collect();
    Ok(FrequencyReport {
        total_test_methods,
        total_test_classes: corpus.len(),
        total_projects: projects.values().collect::<BTreeSet<_>>().len(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooccurrenceMatrix {
    pub kinds: Vec<IssueKind>,
    /// Row-major, indexed like `kinds`.
    pub counts: Vec<Vec<usize>>,
}

impl CooccurrenceMatrix {
    pub fn get(&self, a: IssueKind, b: IssueKind) -> usize {
        self.counts[a.index()][b.index()]
    }

    /// Off-diagonal pairs ordered by count, highest first; ties in catalog order.
    pub fn ranked_pairs(&self) -> Vec<(IssueKind, IssueKind, usize)> {
        let mut pairs = Vec::new();
        for (i, a) in self.kinds.iter().enumerate() {
            for (j, b) in self.kinds.iter().enumerate().skip(i + 1) {
                pairs.push((*a, *b, self.counts[i][j]));
            }
        }
        pairs.sort_by_key(|p| std::cmp::Reverse(p.2));
        pairs
    }
}

/// Number of distinct test methods carrying both kinds, for every pair.
pub fn cooccurrence(findings: &[IssueFinding]) -> CooccurrenceMatrix {
    let mut per_test: BTreeMap<(&str, &str), BTreeSet<IssueKind>> = BTreeMap::new();
    for f in findings {
        per_test.entry((&f.suite, &f.test)).or_default().insert(f.kind);
    }
    let n = IssueKind::ALL.len();
    let mut counts = vec![vec![0; n]; n];
    for kinds in per_test.values() {
        for a in kinds {
            for b in kinds {
                counts[a.index()][b.index()] += 1;
            }
        }
    }
    CooccurrenceMatrix { kinds: IssueKind::ALL.to_vec(), counts }
}

/// A suite that could not be analyzed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    pub suite: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub test_methods: usize,
    pub test_classes: usize,
    pub projects: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub totals: Totals,
    pub diagnostics: Vec<Diagnostic>,
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub meta: Meta,
    pub frequency: FrequencyReport,
    pub cooccurrence: CooccurrenceMatrix,
    pub findings: Vec<IssueFinding>,
}

impl AnalysisReport {
    pub fn new(
        findings: Vec<IssueFinding>,
        corpus: &[CorpusEntry],
        config_hash: String,
        diagnostics: Vec<Diagnostic>,
    ) -> Result<Self, ReportError> {
        let frequency = aggregate(&findings, corpus)?;
        let meta = Meta {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash,
            totals: Totals {
                test_methods: frequency.total_test_methods,
                test_classes: frequency.total_test_classes,
                projects: frequency.total_projects,
            },
            diagnostics,
        };
        Ok(AnalysisReport { meta, cooccurrence: cooccurrence(&findings), frequency, findings })
    }
}
