//! Tests whose behavior under test is nothing but accessors or constants.

use std::collections::BTreeSet;

use super::common::{accessor_kind, simple, Facts};
use super::{IssueFinding, IssueKind};
use crate::cut::{Accessor, CutModel};
use crate::source::{ArgModel, StatementKind, TestMethodModel};

/// Testing only field accessors: object creation, getter and setter calls,
/// and assertions over their results.
pub fn detect_tofa(suite: &str, test: &TestMethodModel, cut: &CutModel) -> Vec<IssueFinding> {
    let facts = Facts::new(test, cut);
    let mut defined = BTreeSet::new();
    let mut lines = Vec::new();
    let mut assertions = 0;
    for s in &test.statements {
        match &s.kind {
            StatementKind::ObjectCreation { .. } | StatementKind::Binding { .. } => {}
            StatementKind::Invocation { receiver, method, args, .. } => {
                if !facts.is_cut_receiver(receiver) || accessor_kind(cut, method, args.len()) == Accessor::None {
                    return Vec::new();
                }
                lines.push(s.line);
            }
            StatementKind::Assertion { referenced_vars, invoked_methods, .. } => {
                for (receiver, method) in invoked_methods {
                    if !facts.is_cut_receiver(receiver) || accessor_kind(cut, method, 0) != Accessor::Getter {
                        return Vec::new();
                    }
                }
                if !referenced_vars.is_subset(&defined) {
                    return Vec::new();
                }
                if !invoked_methods.is_empty() {
                    lines.push(s.line);
                }
                assertions += 1;
            }
            StatementKind::TryCatchFail { .. } | StatementKind::Opaque { .. } => return Vec::new(),
        }
        if let Some(v) = s.defined_var() {
            defined.insert(v.to_string());
        }
    }
    if assertions == 0 || lines.is_empty() {
        return Vec::new();
    }
    let note = "only object creation and field accessors are exercised".to_string();
    vec![IssueFinding::new(IssueKind::Tofa, suite, test, lines, note)]
}

fn all_caps(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_uppercase())
        && name.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Asserting constants: an assertion argument that is a static final field.
/// Fields of the class under test are checked against its declarations when
/// source is available; anything else is judged by its ALL_CAPS name.
pub fn detect_ac(suite: &str, test: &TestMethodModel, cut: &CutModel) -> Vec<IssueFinding> {
    let cut_name = simple(&cut.name);
    let mut out = Vec::new();
    for s in &test.statements {
        let StatementKind::Assertion { args, .. } = &s.kind else {
            continue;
        };
        let constant = args.iter().find_map(|a| match a {
            ArgModel::StaticFieldRef { class, field } => {
                let declared = (cut.source_available && simple(class) == cut_name)
                    .then(|| cut.fields.get(field))
                    .flatten();
                let is_constant = match declared {
                    Some(info) => info.is_static && info.is_final,
                    None => all_caps(field),
                };
                is_constant.then(|| format!("{}.{field}", simple(class)))
            }
            _ => None,
        });
        if let Some(c) = constant {
            out.push(IssueFinding::new(IssueKind::Ac, suite, test, vec![s.line], format!("asserts the constant {c}")));
        }
    }
    out
}
