//! Act-assert mismatch: the assertions do not check what the test exercised.
//!
//! Relatedness between a call and an assertion is field-level: the assertion
//! is related when it calls, on the same receiver, a method whose read set
//! meets the call's write set, or when it names the called method itself.

use std::collections::BTreeSet;

use super::common::{names_match, presumed_void, value_returning_name, Facts};
use super::{IssueFinding, IssueKind};
use crate::cut::{accessor_by_name, Accessor, CutModel, Resolution};
use crate::source::{CallResult, Receiver, StatementKind, TestMethodModel};

/// A void call on the class under test whose effect no assertion observes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct UnassertedCall {
    pub line: u32,
    pub method: String,
    pub fields: BTreeSet<String>,
}

/// Candidates are top-level calls on the class under test. With source they
/// must be void with a non-empty write set. Without source any discarded call
/// that is not conventionally value-returning and not a setter qualifies, and
/// only the by-name check applies. Any opaque statement after the call might
/// hold the missing assertion, so it suppresses the finding.
pub(crate) fn unasserted_calls(test: &TestMethodModel, cut: &CutModel) -> Vec<UnassertedCall> {
    let facts = Facts::new(test, cut);
    let mut out = Vec::new();
    for (pos, stmt) in test.statements.iter().enumerate() {
        let StatementKind::Invocation { receiver, method, args, result } = &stmt.kind else {
            continue;
        };
        if !facts.is_cut_receiver(receiver) {
            continue;
        }
        let written = if cut.source_available {
            match cut.resolve(method, Some(args.len())) {
                Resolution::Method(m) if m.is_void && !m.write_set.is_empty() => m.write_set.clone(),
                _ => continue,
            }
        } else {
            let candidate = matches!(result, CallResult::Discarded)
                && !value_returning_name(method)
                && accessor_by_name(method, args.len()) != Accessor::Setter;
            if !candidate {
                continue;
            }
            BTreeSet::new()
        };
        let related = test.statements.iter().any(|s| {
            let StatementKind::Assertion { invoked_methods, .. } = &s.kind else {
                return false;
            };
            invoked_methods.iter().any(|(r, m)| {
                m == method
                    || (r == receiver
                        && matches!(cut.resolve(m, None), Resolution::Method(rm)
                            if !rm.read_set.is_disjoint(&written)))
            })
        });
        if related || facts.has_opaque_after(pos) {
            continue;
        }
        out.push(UnassertedCall { line: stmt.line, method: method.clone(), fields: written });
    }
    out
}

/// Not asserted side effects.
pub fn detect_nase(suite: &str, test: &TestMethodModel, cut: &CutModel) -> Vec<IssueFinding> {
    unasserted_calls(test, cut)
        .into_iter()
        .map(|c| {
            let note = if c.fields.is_empty() {
                format!("void call `{}` is not verified by any assertion", c.method)
            } else {
                let fields: Vec<_> = c.fields.iter().map(String::as_str).collect();
                format!("void call `{}` writes {} but no assertion reads it", c.method, fields.join(", "))
            };
            IssueFinding::new(IssueKind::Nase, suite, test, vec![c.line], note)
        })
        .collect()
}

/// Not asserted return values: a value-returning call on the class under test
/// whose result is dropped, or stored in a variable nothing later mentions.
pub fn detect_narv(suite: &str, test: &TestMethodModel, cut: &CutModel) -> Vec<IssueFinding> {
    let facts = Facts::new(test, cut);
    let mut out = Vec::new();
    for (pos, stmt) in test.statements.iter().enumerate() {
        let StatementKind::Invocation { receiver, method, args, result } = &stmt.kind else {
            continue;
        };
        if !facts.is_cut_receiver(receiver) || presumed_void(cut, method, args.len(), result) {
            continue;
        }
        let note = match result {
            CallResult::Discarded => format!("return value of `{method}` is discarded"),
            CallResult::Assigned { var, .. } => {
                let later = &test.statements[pos + 1..];
                let used = later.iter().any(|s| {
                    s.mentions.contains(var) || matches!(s.kind, StatementKind::Opaque { elided: true, .. })
                });
                if used {
                    continue;
                }
                format!("`{var}` holds the result of `{method}` but is never used")
            }
        };
        out.push(IssueFinding::new(IssueKind::Narv, suite, test, vec![stmt.line], note));
    }
    out
}

/// Assertions with not related parent class method. Needs source: without it
/// nothing is known about where a method is declared.
pub fn detect_arpm(suite: &str, test: &TestMethodModel, cut: &CutModel) -> Vec<IssueFinding> {
    if !cut.source_available {
        return Vec::new();
    }
    let facts = Facts::new(test, cut);
    let acted: Vec<(&str, BTreeSet<String>)> = test
        .statements
        .iter()
        .filter_map(|s| match &s.kind {
            StatementKind::Invocation { receiver, method, args, .. } if facts.is_cut_receiver(receiver) => {
                let writes = match cut.resolve(method, Some(args.len())) {
                    Resolution::Method(m) => m.write_set.clone(),
                    _ => BTreeSet::new(),
                };
                Some((method.as_str(), writes))
            }
            _ => None,
        })
        .collect();
    let mut out = Vec::new();
    for (pos, stmt) in test.statements.iter().enumerate() {
        let StatementKind::Assertion { invoked_methods, .. } = &stmt.kind else {
            continue;
        };
        for (receiver, method) in invoked_methods {
            if !facts.is_cut_receiver(receiver) {
                continue;
            }
            let (origin, reads) = match cut.resolve(method, None) {
                Resolution::Method(m) if m.declared_in != cut.name => (m.declared_in.clone(), m.read_set.clone()),
                Resolution::UnknownAncestor => ("an ancestor outside the corpus".to_string(), BTreeSet::new()),
                _ => continue,
            };
            let related = acted
                .iter()
                .any(|(name, writes)| names_match(name, method) || !reads.is_disjoint(writes));
            if related {
                continue;
            }
            let start = match receiver {
                Receiver::Var(v) => facts.declaration(v).map_or(0, |d| d + 1),
                _ => 0,
            };
            if test.statements[start.min(pos)..pos].iter().any(|s| s.is_opaque()) {
                continue;
            }
            let note = format!("`{method}` is inherited from {origin} and unrelated to the calls under test");
            out.push(IssueFinding::new(IssueKind::Arpm, suite, test, vec![stmt.line], note));
            break;
        }
    }
    out
}
