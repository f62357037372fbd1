//! Executable invariants, shared by the property tests and the acceptance run.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::test_runner::{Config, FileFailurePersistence, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use evoqual::config::AnalysisConfig;
use evoqual::corpus::CorpusLayout;
use evoqual::detect::{IssueFinding, IssueKind};
use evoqual::pipeline::{model_from_sources, run_analysis};
use evoqual::report::{aggregate, cooccurrence, render_json, AnalysisReport, CorpusEntry};

use super::{analyze, gen_suite, GSuite};

pub const CASES: u32 = 1000;

pub fn config() -> Config {
    Config { cases: CASES, failure_persistence: Some(Box::new(FileFailurePersistence::Off)), ..Config::default() }
}

/// A runner with a fixed seed, for reproducible acceptance runs.
pub fn runner() -> TestRunner {
    TestRunner::new_with_rng(config(), TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

type Relative = BTreeSet<(IssueKind, String, Vec<i64>, Vec<String>, Option<String>)>;

/// Findings with lines made relative to their test's declaration, so they
/// survive moving tests around in the file.
fn relative(suite: &GSuite, findings: &[IssueFinding], keep: impl Fn(IssueKind) -> bool) -> Relative {
    let header: BTreeMap<&str, u32> = suite.tests.iter().map(|t| (t.name.as_str(), t.header)).collect();
    findings
        .iter()
        .filter(|f| keep(f.kind))
        .map(|f| {
            let h = i64::from(header[f.test.as_str()]);
            let lines = f.evidence_lines.iter().map(|&l| i64::from(l) - h).collect();
            (f.kind, f.test.clone(), lines, f.related_tests.clone(), f.subcase.clone())
        })
        .collect()
}

fn default_findings(suite: &GSuite) -> Vec<IssueFinding> {
    analyze(suite, "gen/S_ESTest.java", &AnalysisConfig::default())
}

/// Reordering test methods leaves every finding in place.
pub fn permutation_invariance(seed: u64, order_seed: u64) -> Result<(), TestCaseError> {
    let suite = gen_suite(seed, 0);
    let mut tests = suite.tests.clone();
    tests.shuffle(&mut ChaCha8Rng::seed_from_u64(order_seed));
    let shuffled = suite.with_tests(tests);
    let all = |_| true;
    prop_assert_eq!(
        relative(&suite, &default_findings(&suite), all),
        relative(&shuffled, &default_findings(&shuffled), all)
    );
    Ok(())
}

/// A per-test kind sees the same findings whether its test stands alone or
/// sits among others.
pub fn single_test_locality(seed: u64, pick: usize) -> Result<(), TestCaseError> {
    let suite = gen_suite(seed, 0);
    let test = suite.tests[pick % suite.tests.len()].clone();
    let name = test.name.clone();
    let alone = suite.with_tests(vec![test]);
    let per_test = |k: IssueKind| !k.is_cross_test();
    let full: Relative = relative(&suite, &default_findings(&suite), per_test).into_iter().filter(|f| f.1 == name).collect();
    prop_assert_eq!(full, relative(&alone, &default_findings(&alone), per_test));
    Ok(())
}

/// No try block is blamed on both a null argument and an incomplete setup.
pub fn edna_edis_disjoint(seed: u64) -> Result<(), TestCaseError> {
    let suite = gen_suite(seed, 0);
    let findings = default_findings(&suite);
    let blocks = |kind| -> BTreeSet<(String, u32)> {
        findings.iter().filter(|f| f.kind == kind).map(|f| (f.test.clone(), f.evidence_lines[0])).collect()
    };
    prop_assert!(blocks(IssueKind::Edna).is_disjoint(&blocks(IssueKind::Edis)));
    Ok(())
}

/// Every call behind a TSVM finding is itself an unasserted side effect.
pub fn tsvm_within_nase(seed: u64) -> Result<(), TestCaseError> {
    let suite = gen_suite(seed, 0);
    let findings = default_findings(&suite);
    let nase: BTreeSet<(&str, u32)> = findings
        .iter()
        .filter(|f| f.kind == IssueKind::Nase)
        .flat_map(|f| f.evidence_lines.iter().map(move |&l| (f.test.as_str(), l)))
        .collect();
    for f in findings.iter().filter(|f| f.kind == IssueKind::Tsvm) {
        for &l in &f.evidence_lines {
            prop_assert!(nase.contains(&(f.test.as_str(), l)), "TSVM line {} of {} has no NASE", l, f.test);
        }
    }
    Ok(())
}

/// Deeper propagation only adds fields to write and read sets.
pub fn depth_monotonic(seed: u64) -> Result<(), TestCaseError> {
    let mut suite = gen_suite(seed, 0);
    suite.cut.source = true;
    let sources = suite.cut_sources();
    let refs: Vec<&str> = sources.iter().map(String::as_str).collect();
    let models: Vec<_> = (1..=4).map(|d| model_from_sources(&suite.cut.name, &refs, d)).collect();
    for pair in models.windows(2) {
        for (shallow, deep) in pair[0].methods.iter().zip(&pair[1].methods) {
            prop_assert_eq!(&shallow.name, &deep.name);
            prop_assert!(shallow.write_set.is_subset(&deep.write_set), "{} writes shrank", shallow.name);
            prop_assert!(shallow.read_set.is_subset(&deep.read_set), "{} reads shrank", shallow.name);
        }
        for (sig, fields) in &pair[0].constructor_init_fields {
            prop_assert!(fields.is_subset(&pair[1].constructor_init_fields[sig]));
        }
    }
    Ok(())
}

/// Disabling kinds drops exactly their findings.
pub fn filtering_sound(seed: u64, mask: u16) -> Result<(), TestCaseError> {
    let suite = gen_suite(seed, 0);
    let full = default_findings(&suite);
    let enabled: BTreeSet<IssueKind> = IssueKind::ALL.into_iter().filter(|k| mask & (1 << k.index()) != 0).collect();
    let config = AnalysisConfig { enabled_issues: enabled.clone(), ..AnalysisConfig::default() };
    let mut want: Vec<IssueFinding> = full.into_iter().filter(|f| enabled.contains(&f.kind)).collect();
    let mut got = analyze(&suite, "gen/S_ESTest.java", &config);
    want.sort();
    got.sort();
    prop_assert_eq!(got, want);
    Ok(())
}

/// A suite's findings do not depend on which other suites share the corpus.
pub fn per_suite_isolation(seed_a: u64, seed_b: u64) -> Result<(), TestCaseError> {
    let (a, b) = (gen_suite(seed_a, 1), gen_suite(seed_b, 2));
    let together = tempfile::tempdir().unwrap();
    a.write_to(together.path(), "a");
    b.write_to(together.path(), "b");
    let alone = tempfile::tempdir().unwrap();
    a.write_to(alone.path(), "a");
    let config = AnalysisConfig::default();
    let both = run_analysis(&CorpusLayout::new(together.path()), &config).unwrap();
    let only = run_analysis(&CorpusLayout::new(alone.path()), &config).unwrap();
    let id = a.suite_id("a");
    let from_both: Vec<_> = both.findings.iter().filter(|f| f.suite == id).cloned().collect();
    prop_assert_eq!(from_both, only.findings);
    Ok(())
}

/// Random findings over a random corpus.
pub fn random_findings(seed: u64) -> (Vec<IssueFinding>, Vec<CorpusEntry>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus: Vec<CorpusEntry> = (0..rng.gen_range(1..=8))
        .map(|i| CorpusEntry {
            suite: format!("p{}/S{i}_ESTest.java", i % 3),
            project: format!("p{}", rng.gen_range(0..3)),
            test_methods: rng.gen_range(1..=12),
        })
        .collect();
    let findings = (0..rng.gen_range(0..40))
        .map(|_| {
            let e = corpus.choose(&mut rng).unwrap();
            IssueFinding {
                kind: *IssueKind::ALL.choose(&mut rng).unwrap(),
                suite: e.suite.clone(),
                test: format!("test{:02}", rng.gen_range(0..e.test_methods)),
                evidence_lines: vec![rng.gen_range(1..100)],
                related_tests: Vec::new(),
                note: String::new(),
                subcase: None,
            }
        })
        .collect();
    (findings, corpus)
}

/// Frequencies and co-occurrences agree with a brute-force recount.
pub fn aggregation_recount(seed: u64) -> Result<(), TestCaseError> {
    let (findings, corpus) = random_findings(seed);
    let report = aggregate(&findings, &corpus).unwrap();
    let matrix = cooccurrence(&findings);
    let total: usize = corpus.iter().map(|e| e.test_methods).sum();
    prop_assert_eq!(report.total_test_methods, total);
    let project_of = |suite: &str| corpus.iter().find(|e| e.suite == suite).unwrap().project.clone();
    for kind in IssueKind::ALL {
        let mine: Vec<&IssueFinding> = findings.iter().filter(|f| f.kind == kind).collect();
        let methods: BTreeSet<(&str, &str)> = mine.iter().map(|f| (f.suite.as_str(), f.test.as_str())).collect();
        let classes: BTreeSet<&str> = mine.iter().map(|f| f.suite.as_str()).collect();
        let projects: BTreeSet<String> = mine.iter().map(|f| project_of(&f.suite)).collect();
        let row = report.row(kind);
        prop_assert_eq!(row.n_test_methods, methods.len());
        prop_assert_eq!(row.n_test_classes, classes.len());
        prop_assert_eq!(row.n_projects, projects.len());
        let exact = 100.0 * methods.len() as f64 / total as f64;
        prop_assert!((row.pct_tenths as f64 / 10.0 - exact).abs() <= 0.05 + 1e-9, "{} vs {}", row.pct_text(), exact);
        prop_assert_eq!(matrix.get(kind, kind), methods.len());
        for other in IssueKind::ALL {
            prop_assert_eq!(matrix.get(kind, other), matrix.get(other, kind));
            let both = methods
                .iter()
                .filter(|(s, t)| findings.iter().any(|f| f.kind == other && f.suite == *s && f.test == *t))
                .count();
            prop_assert_eq!(matrix.get(kind, other), both);
        }
    }
    Ok(())
}

/// Reports survive a JSON round trip unchanged.
pub fn json_round_trip(seed: u64) -> Result<(), TestCaseError> {
    let (findings, corpus) = random_findings(seed);
    let report = AnalysisReport::new(findings, &corpus, format!("{seed:x}"), Vec::new()).unwrap();
    let text = render_json(&report).unwrap();
    let back: AnalysisReport = serde_json::from_str(&text).unwrap();
    prop_assert_eq!(&back, &report);
    prop_assert_eq!(render_json(&back).unwrap(), text);
    Ok(())
}

/// Every invariant with its input strategy, run through `run`.
pub fn all(mut run: impl FnMut(&str, &mut dyn FnMut(&mut TestRunner) -> Result<(), String>)) {
    macro_rules! check {
        ($name:expr, $strategy:expr, $f:expr) => {
            run($name, &mut |r: &mut TestRunner| r.run(&$strategy, $f).map_err(|e| e.to_string()))
        };
    }
    check!("permutation invariance", (any::<u64>(), any::<u64>()), |(a, b)| permutation_invariance(a, b));
    check!("single-test locality", (any::<u64>(), 0usize..10), |(a, b)| single_test_locality(a, b));
    check!("EDNA/EDIS disjointness", any::<u64>(), edna_edis_disjoint);
    check!("TSVM within NASE", any::<u64>(), tsvm_within_nase);
    check!("depth-monotonic write sets", any::<u64>(), depth_monotonic);
}
