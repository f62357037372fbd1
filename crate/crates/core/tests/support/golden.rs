//! The bundled corpus of transcribed listings and what it must produce.

use std::path::PathBuf;

use evoqual::corpus::CorpusLayout;
use evoqual::detect::IssueKind;

use super::oracle::Key;

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden")
}

pub fn layout() -> CorpusLayout {
    let mut layout = CorpusLayout::new(root().join("tests"));
    layout.cut_root = Some(root().join("cut"));
    layout
}

/// Findings the original authors attribute to each listing: kind, suite,
/// test and subcase. Transcribed by hand, independent of the manifest file.
pub const DOCUMENTED: &[(IssueKind, &str, &str, Option<&str>)] = &[
    (IssueKind::Nase, "not_asserted_side_effects/SubstringLabeler_ESTest.java", "test79", None),
    (IssueKind::Narv, "not_asserted_return_values/ExternalXid_ESTest.java", "test22", None),
    (IssueKind::Arpm, "unrelated_parent_method/Field_ESTest.java", "test12", None),
    (IssueKind::Ds, "duplicated_setup/ScriptOrFnScope_ESTest.java", "test07", None),
    (IssueKind::Ds, "duplicated_setup/ScriptOrFnScope_ESTest.java", "test08", None),
    (IssueKind::Ds, "duplicated_setup/ScriptOrFnScope_ESTest.java", "test09", None),
    (IssueKind::Tses, "same_exception_scenario/ClusterExecutorUtil_ESTest.java", "test04", None),
    (IssueKind::Tses, "same_exception_scenario/ClusterExecutorUtil_ESTest.java", "test08", None),
    (IssueKind::Tsvm, "same_void_method/DbConnectionBroker_ESTest.java", "test00", None),
    (IssueKind::Tsvm, "same_void_method/DbConnectionBroker_ESTest.java", "test11", None),
    (IssueKind::Nase, "same_void_method/DbConnectionBroker_ESTest.java", "test00", None),
    (IssueKind::Nase, "same_void_method/DbConnectionBroker_ESTest.java", "test11", None),
    (IssueKind::Oimt, "object_initialization/PhotoController_ESTest.java", "test14", None),
    (IssueKind::Oimt, "object_initialization/PhotoController_ESTest.java", "test27", None),
    (IssueKind::Nna, "not_null_after_creation/HookHotDeployListener_ESTest.java", "test00", Some("i")),
    (IssueKind::Nna, "not_null_implied/SubstringLabeler_ESTest.java", "test74", Some("ii")),
    (IssueKind::Edna, "null_arguments/PeersItem_ESTest.java", "test02", None),
    (IssueKind::Eded, "external_dependencies/EntryListView_ESTest.java", "test00", None),
    (IssueKind::Edis, "incomplete_setup/AlphabeticTokenizer_ESTest.java", "test00", None),
    (IssueKind::Tofa, "field_accessors/DirEntry_ESTest.java", "test05", None),
    (IssueKind::Ac, "asserting_constants/ConnectionConsumer_ESTest.java", "test06", None),
];

/// The reviewed manifest: documented findings plus the co-findings the
/// catalog's definitions imply for the same tests.
pub fn manifest() -> Vec<Key> {
    let text = std::fs::read_to_string(root().join("expected_findings.json")).unwrap();
    let rows: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
    let mut keys: Vec<Key> = rows
        .iter()
        .map(|r| {
            let s = |k: &str| r[k].as_str().unwrap().to_string();
            let list = |k: &str| r[k].as_array().unwrap().clone();
            (
                s("kind").parse().unwrap(),
                s("suite"),
                s("test"),
                list("lines").iter().map(|l| l.as_u64().unwrap() as u32).collect(),
                list("related_tests").iter().map(|t| t.as_str().unwrap().to_string()).collect(),
                r["subcase"].as_str().map(String::from),
            )
        })
        .collect();
    keys.sort();
    keys
}

/// Documented findings missing from `found`.
pub fn missing_documented(found: &[Key]) -> Vec<String> {
    DOCUMENTED
        .iter()
        .filter(|(kind, suite, test, sub)| {
            !found.iter().any(|k| k.0 == *kind && k.1 == *suite && k.2 == *test && k.5.as_deref() == *sub)
        })
        .map(|(kind, suite, test, _)| format!("{kind} {suite} {test}"))
        .collect()
}
