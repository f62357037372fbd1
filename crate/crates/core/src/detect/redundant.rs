//! Redundant code: tests that repeat what other tests, or other statements
//! in the same test, already do.

use std::collections::{BTreeMap, BTreeSet};

use super::act_assert::unasserted_calls;
use super::common::{accessor_kind, property, simple, Facts};
use super::{IssueFinding, IssueKind};
use crate::cut::{accessor_by_name, Accessor, CutModel, Resolution};
use crate::source::{ArgModel, Receiver, StatementKind, StatementModel, TestMethodModel, TestSuiteModel};

/// Leading run of creations, calls and bindings.
pub(crate) fn setup_prefix(test: &TestMethodModel) -> &[StatementModel] {
    let end = test
        .statements
        .iter()
        .position(|s| {
            !matches!(
                s.kind,
                StatementKind::ObjectCreation { .. } | StatementKind::Invocation { .. } | StatementKind::Binding { .. }
            )
        })
        .unwrap_or(test.statements.len());
    &test.statements[..end]
}

/// Assertion lines of a test whose assertions only read state the constructor
/// set up (or left at its default) and that nothing else in the test changed.
fn init_asserting(test: &TestMethodModel, cut: &CutModel) -> Option<Vec<u32>> {
    let stmts = &test.statements;
    if stmts.iter().any(|s| matches!(s.kind, StatementKind::Opaque { .. } | StatementKind::TryCatchFail { .. })) {
        return None;
    }
    let facts = Facts::new(test, cut);
    let mut created: BTreeMap<&str, usize> = BTreeMap::new();
    for s in stmts {
        if let StatementKind::ObjectCreation { var: Some(v), ty, args } = &s.kind {
            if simple(ty) == facts.cut_name {
                created.entry(v.as_str()).or_insert(args.len());
            }
        }
    }
    let mut lines = Vec::new();
    // per variable: asserted fields (with source) and asserted properties
    let mut fields: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    let mut properties: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for s in stmts {
        let StatementKind::Assertion { invoked_methods, .. } = &s.kind else {
            continue;
        };
        if invoked_methods.is_empty() {
            return None;
        }
        for (receiver, method) in invoked_methods {
            let Receiver::Var(v) = receiver else {
                return None;
            };
            let v = created.get_key_value(v.as_str())?.0;
            if accessor_kind(cut, method, 0) != Accessor::Getter {
                return None;
            }
            if let Resolution::Method(m) = cut.resolve(method, Some(0)) {
                fields.entry(v).or_default().extend(m.read_set.iter().cloned());
            }
            properties.entry(v).or_default().insert(property(method));
        }
        lines.push(s.line);
    }
    if lines.is_empty() {
        return None;
    }
    if cut.source_available {
        let defaults = cut.default_valued_fields();
        for (v, read) in &fields {
            let mut initialized = cut.init_fields_for_arity(created[v]);
            initialized.extend(defaults.iter().cloned());
            if !read.is_subset(&initialized) {
                return None;
            }
        }
    }
    for s in stmts {
        let StatementKind::Invocation { receiver: Receiver::Var(v), method, args, .. } = &s.kind else {
            continue;
        };
        if !created.contains_key(v.as_str()) {
            continue;
        }
        if cut.source_available {
            match cut.resolve(method, Some(args.len())) {
                Resolution::Method(m) => {
                    if fields.get(v.as_str()).is_some_and(|f| !f.is_disjoint(&m.write_set)) {
                        return None;
                    }
                }
                _ => return None,
            }
        } else {
            match accessor_by_name(method, args.len()) {
                Accessor::Getter => {}
                Accessor::Setter => {
                    if properties.get(v.as_str()).is_some_and(|p| p.contains(&property(method))) {
                        return None;
                    }
                }
                Accessor::None => return None,
            }
        }
    }
    Some(lines)
}

/// Asserting object initialization multiple times: two or more tests in the
/// suite only assert constructor-set or default state.
pub fn detect_oimt(suite_id: &str, suite: &TestSuiteModel, cut: &CutModel) -> Vec<IssueFinding> {
    let hits: Vec<(&TestMethodModel, Vec<u32>)> =
        suite.tests.iter().filter_map(|t| init_asserting(t, cut).map(|l| (t, l))).collect();
    if hits.len() < 2 {
        return Vec::new();
    }
    let names: Vec<String> = hits.iter().map(|(t, _)| t.name.clone()).collect();
    hits.into_iter()
        .map(|(t, lines)| {
            let others = names.iter().filter(|n| **n != t.name).cloned().collect();
            let note = format!("assertions only check initial state, as in {} other test(s)", names.len() - 1);
            IssueFinding::new(IssueKind::Oimt, suite_id, t, lines, note).related(others)
        })
        .collect()
}

/// Duplicated setup: tests whose first `min_lines` setup statements are
/// token-identical.
pub fn detect_ds(suite_id: &str, suite: &TestSuiteModel, min_lines: usize) -> Vec<IssueFinding> {
    let k = min_lines.max(1);
    let mut groups: BTreeMap<Vec<&str>, Vec<&TestMethodModel>> = BTreeMap::new();
    for t in &suite.tests {
        let prefix = setup_prefix(t);
        if prefix.len() >= k {
            let key = prefix[..k].iter().map(|s| s.normalized.as_str()).collect();
            groups.entry(key).or_default().push(t);
        }
    }
    let mut out = Vec::new();
    for members in groups.values().filter(|m| m.len() >= 2) {
        for t in members {
            let others = members.iter().filter(|o| o.name != t.name).map(|o| o.name.clone()).collect();
            let lines = setup_prefix(t)[..k].iter().map(|s| s.line).collect();
            let note = format!("first {k} setup statements repeated in {} other test(s)", members.len() - 1);
            out.push(IssueFinding::new(IssueKind::Ds, suite_id, t, lines, note).related(others));
        }
    }
    out
}

struct ExceptionScenario<'a> {
    test: &'a TestMethodModel,
    key: (Vec<&'a str>, &'a str, Option<&'a str>, Option<&'a str>),
    trigger: String,
    line: u32,
}

fn exception_scenario(test: &TestMethodModel) -> Option<ExceptionScenario<'_>> {
    let (stmt, body, exception, target, comment) = test.statements.iter().find_map(|s| match &s.kind {
        StatementKind::TryCatchFail { body, expected_exception, verify_target, catch_comment, .. } => {
            Some((s, body, expected_exception, verify_target, catch_comment))
        }
        _ => None,
    })?;
    let trigger = body.iter().rev().find_map(|s| match &s.kind {
        StatementKind::Invocation { method, .. } => Some(method.clone()),
        StatementKind::ObjectCreation { ty, .. } => Some(format!("new {ty}")),
        _ => None,
    })?;
    let prefix = setup_prefix(test).iter().map(|s| s.normalized.as_str()).collect();
    Some(ExceptionScenario {
        test,
        key: (prefix, exception.as_str(), target.as_deref(), comment.as_deref()),
        trigger,
        line: stmt.line,
    })
}

/// Testing the same exception scenario: identical setup, exception, verified
/// origin and generated comment, with a different triggering call.
pub fn detect_tses(suite_id: &str, suite: &TestSuiteModel) -> Vec<IssueFinding> {
    let scenarios: Vec<_> = suite.tests.iter().filter_map(exception_scenario).collect();
    let mut out = Vec::new();
    for s in &scenarios {
        let others: Vec<String> = scenarios
            .iter()
            .filter(|o| o.key == s.key && o.trigger != s.trigger)
            .map(|o| o.test.name.clone())
            .collect();
        if others.is_empty() {
            continue;
        }
        let note = format!("{} raised by `{}` as in {} other test(s) with the same setup", s.key.1, s.trigger, others.len());
        out.push(IssueFinding::new(IssueKind::Tses, suite_id, s.test, vec![s.line], note).related(others));
    }
    out
}

/// Testing the same void method: two or more tests with an unasserted side
/// effect from the same method.
pub fn detect_tsvm(suite_id: &str, suite: &TestSuiteModel, cut: &CutModel) -> Vec<IssueFinding> {
    let mut by_method: BTreeMap<String, BTreeMap<&str, Vec<u32>>> = BTreeMap::new();
    let mut tests: BTreeMap<&str, &TestMethodModel> = BTreeMap::new();
    for t in &suite.tests {
        tests.insert(&t.name, t);
        for call in unasserted_calls(t, cut) {
            by_method.entry(call.method).or_default().entry(&t.name).or_default().push(call.line);
        }
    }
    let mut out = Vec::new();
    for (method, hits) in &by_method {
        if hits.len() < 2 {
            continue;
        }
        for (name, lines) in hits {
            let others = hits.keys().filter(|n| *n != name).map(|n| n.to_string()).collect();
            let note = format!("unasserted void call `{method}` shared with {} other test(s)", hits.len() - 1);
            out.push(IssueFinding::new(IssueKind::Tsvm, suite_id, tests[name], lines.clone(), note).related(others));
        }
    }
    out
}

/// Redundant not-null assertion. Subcases in priority order: (i) the value
/// was just created with `new`; (ii) another assertion already implies it is
/// non-null; (iii) it came from a method whose every return is provably
/// non-null.
pub fn detect_nna(suite_id: &str, test: &TestMethodModel, cut: &CutModel) -> Vec<IssueFinding> {
    let facts = Facts::new(test, cut);
    let stmts = &test.statements;
    let mut out = Vec::new();
    for (q, stmt) in stmts.iter().enumerate() {
        let StatementKind::Assertion { kind, args, .. } = &stmt.kind else {
            continue;
        };
        if kind != "assertNotNull" {
            continue;
        }
        let Some(ArgModel::VarRef { name: v }) = args.last() else {
            continue;
        };
        let definition = stmts[..q].iter().rev().find(|s| s.defined_var() == Some(v.as_str()));
        if let Some(def) = definition.filter(|d| matches!(d.kind, StatementKind::ObjectCreation { .. })) {
            let note = format!("`{v}` was just created with `new`");
            out.push(IssueFinding::new(IssueKind::Nna, suite_id, test, vec![def.line, stmt.line], note).subcase("i"));
            continue;
        }
        if let Some(other) = stmts.iter().enumerate().find(|(i, s)| *i != q && implies_non_null(s, v)) {
            let note = format!("another assertion already implies `{v}` is not null");
            let lines = vec![stmt.line, other.1.line];
            out.push(IssueFinding::new(IssueKind::Nna, suite_id, test, lines, note).subcase("ii"));
            continue;
        }
        if let Some(def) = definition {
            if let StatementKind::Invocation { receiver, method, args, .. } = &def.kind {
                let proven = facts.is_cut_receiver(receiver)
                    && matches!(cut.resolve(method, Some(args.len())), Resolution::Method(m) if m.returns_non_null);
                if proven {
                    let note = format!("`{method}` never returns null");
                    let lines = vec![def.line, stmt.line];
                    out.push(IssueFinding::new(IssueKind::Nna, suite_id, test, lines, note).subcase("iii"));
                }
            }
        }
    }
    out
}

/// An assertion that fails, or throws, when `var` is null: an equality check
/// against a non-null value, a call on `var`, or a boolean check of `var`.
fn implies_non_null(stmt: &StatementModel, var: &str) -> bool {
    let StatementKind::Assertion { kind, args, invoked_methods, .. } = &stmt.kind else {
        return false;
    };
    let is_var = |a: &ArgModel| matches!(a, ArgModel::VarRef { name } if name == var);
    if invoked_methods.iter().any(|(r, _)| r.var() == Some(var)) {
        return true;
    }
    match kind.as_str() {
        "assertEquals" | "assertSame" | "assertArrayEquals" => {
            args.iter().any(is_var) && args.iter().any(|a| !is_var(a) && !a.is_null())
        }
        "assertTrue" | "assertFalse" => args.iter().any(is_var),
        _ => false,
    }
}
