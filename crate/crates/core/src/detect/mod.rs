//! The thirteen quality-issue detectors.
//!
//! Per-test detectors look at one [`TestMethodModel`] plus the [`CutModel`].
//! Cross-test detectors (OIMT, DS, TSES, TSVM) look at the whole suite and
//! emit one finding per group member, each listing the other members.
//!
//! Detectors are grouped as in the issue catalog:
//! [`act_assert`] (the assertion does not check what the test exercised),
//! [`redundant`] (code repeated within or across tests),
//! [`failed_setup`] (tests that only observe an exception caused by setup),
//! and [`accessors`] (tests that only touch accessors or constants).

pub mod accessors;
pub mod act_assert;
mod common;
pub mod failed_setup;
pub mod redundant;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::AnalysisConfig;
use crate::cut::CutModel;
use crate::source::{TestMethodModel, TestSuiteModel};

pub use accessors::{detect_ac, detect_tofa};
pub use act_assert::{detect_arpm, detect_narv, detect_nase};
pub use failed_setup::{detect_eded, detect_edis, detect_edna};
pub use redundant::{detect_ds, detect_nna, detect_oimt, detect_tses, detect_tsvm};

/// Declaration order is catalog order and is used for every output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum IssueKind {
    /// Not asserted side effects.
    Nase,
    /// Not asserted return values.
    Narv,
    /// Assertions with not related parent class method.
    Arpm,
    /// Asserting object initialization multiple times.
    Oimt,
    /// Duplicated setup.
    Ds,
    /// Testing the same exception scenario.
    Tses,
    /// Testing the same void method.
    Tsvm,
    /// Redundant not-null assertion.
    Nna,
    /// Exceptions due to null arguments.
    Edna,
    /// Exceptions due to external dependencies.
    Eded,
    /// Exceptions due to incomplete setup.
    Edis,
    /// Testing only field accessors.
    Tofa,
    /// Asserting constants.
    Ac,
}

impl IssueKind {
    pub const ALL: [IssueKind; 13] = [
        IssueKind::Nase,
        IssueKind::Narv,
        IssueKind::Arpm,
        IssueKind::Oimt,
        IssueKind::Ds,
        IssueKind::Tses,
        IssueKind::Tsvm,
        IssueKind::Nna,
        IssueKind::Edna,
        IssueKind::Eded,
        IssueKind::Edis,
        IssueKind::Tofa,
        IssueKind::Ac,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IssueKind::Nase => "NASE",
            IssueKind::Narv => "NARV",
            IssueKind::Arpm => "ARPM",
            IssueKind::Oimt => "OIMT",
            IssueKind::Ds => "DS",
            IssueKind::Tses => "TSES",
            IssueKind::Tsvm => "TSVM",
            IssueKind::Nna => "NNA",
            IssueKind::Edna => "EDNA",
            IssueKind::Eded => "EDED",
            IssueKind::Edis => "EDIS",
            IssueKind::Tofa => "TOFA",
            IssueKind::Ac => "AC",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_cross_test(self) -> bool {
        matches!(self, IssueKind::Oimt | IssueKind::Ds | IssueKind::Tses | IssueKind::Tsvm)
    }
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownIssueKind(pub String);

impl fmt::Display for UnknownIssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown issue kind `{}`", self.0)
    }
}

impl std::error::Error for UnknownIssueKind {}

impl FromStr for IssueKind {
    type Err = UnknownIssueKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        IssueKind::ALL
            .into_iter()
            .find(|k| k.as_str() == upper)
            .ok_or_else(|| UnknownIssueKind(s.trim().to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IssueFinding {
    pub kind: IssueKind,
    pub suite: String,
    pub test: String,
    #[serde(rename = "lines")]
    pub evidence_lines: Vec<u32>,
    pub related_tests: Vec<String>,
    pub note: String,
    pub subcase: Option<String>,
}

impl IssueFinding {
    pub(crate) fn new(kind: IssueKind, suite: &str, test: &TestMethodModel, lines: Vec<u32>, note: String) -> Self {
        let mut lines = lines;
        lines.sort_unstable();
        lines.dedup();
        if lines.is_empty() {
            lines.push(test.line);
        }
        IssueFinding {
            kind,
            suite: suite.to_string(),
            test: test.name.clone(),
            evidence_lines: lines,
            related_tests: Vec::new(),
            note,
            subcase: None,
        }
    }

    pub(crate) fn related(mut self, mut tests: Vec<String>) -> Self {
        tests.sort();
        tests.dedup();
        self.related_tests = tests;
        self
    }

    pub(crate) fn subcase(mut self, tag: &str) -> Self {
        self.subcase = Some(tag.to_string());
        self
    }
}

/// Canonical order: suite, test, kind, then evidence.
pub fn sort_findings(findings: &mut [IssueFinding]) {
    findings.sort_by(|a, b| {
        (&a.suite, &a.test, a.kind, &a.evidence_lines, &a.note)
            .cmp(&(&b.suite, &b.test, b.kind, &b.evidence_lines, &b.note))
    });
}

/// Runs every enabled detector on one suite. `suite_id` is the identifier
/// recorded in findings, normally the suite's path relative to the corpus root.
pub fn detect_suite(
    suite_id: &str,
    suite: &TestSuiteModel,
    cut: &CutModel,
    config: &AnalysisConfig,
) -> Vec<IssueFinding> {
    let on = |k: IssueKind| config.enabled_issues.contains(&k);
    let mut out = Vec::new();
    for test in &suite.tests {
        if on(IssueKind::Nase) {
            out.extend(detect_nase(suite_id, test, cut));
        }
        if on(IssueKind::Narv) {
            out.extend(detect_narv(suite_id, test, cut));
        }
        if on(IssueKind::Arpm) {
            out.extend(detect_arpm(suite_id, test, cut));
        }
        if on(IssueKind::Nna) {
            out.extend(detect_nna(suite_id, test, cut));
        }
        if on(IssueKind::Edna) {
            out.extend(detect_edna(suite_id, test));
        }
        if on(IssueKind::Eded) {
            out.extend(detect_eded(suite_id, test, config));
        }
        if on(IssueKind::Edis) {
            out.extend(detect_edis(suite_id, test, cut));
        }
        if on(IssueKind::Tofa) {
            out.extend(detect_tofa(suite_id, test, cut));
        }
        if on(IssueKind::Ac) {
            out.extend(detect_ac(suite_id, test, cut));
        }
    }
    if on(IssueKind::Oimt) {
        out.extend(detect_oimt(suite_id, suite, cut));
    }
    if on(IssueKind::Ds) {
        out.extend(detect_ds(suite_id, suite, config.duplicated_setup_min_lines));
    }
    if on(IssueKind::Tses) {
        out.extend(detect_tses(suite_id, suite));
    }
    if on(IssueKind::Tsvm) {
        out.extend(detect_tsvm(suite_id, suite, cut));
    }
    sort_findings(&mut out);
    out
}
