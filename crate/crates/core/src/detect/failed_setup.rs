//! Failed setup: the only thing a test checks is an exception that the setup,
//! not the behavior under test, caused.

use super::common::{simple, Facts};
use super::{IssueFinding, IssueKind};
use crate::config::AnalysisConfig;
use crate::cut::{CutModel, Resolution};
use crate::source::{ArgModel, Receiver, StatementKind, StatementModel, TestMethodModel};

const NPE: &str = "NullPointerException";

/// One top-level try/catch/fail block.
struct Handler<'a> {
    pos: usize,
    stmt: &'a StatementModel,
    body: &'a [StatementModel],
    exceptions: Vec<&'a str>,
}

fn handlers(test: &TestMethodModel) -> impl Iterator<Item = Handler<'_>> {
    test.statements.iter().enumerate().filter_map(|(pos, stmt)| match &stmt.kind {
        StatementKind::TryCatchFail { body, expected_exception, .. } => Some(Handler {
            pos,
            stmt,
            body,
            exceptions: expected_exception.split(" | ").map(simple).collect(),
        }),
        _ => None,
    })
}

fn has_null_arg(args: &[ArgModel]) -> bool {
    args.iter().any(ArgModel::is_null)
}

/// Whether the most recent binding of `var` before `body[upto]` is a null literal.
fn bound_to_null(test: &TestMethodModel, h: &Handler<'_>, upto: usize, var: &str) -> bool {
    let mut before = test.statements[..h.pos].iter().chain(&h.body[..upto]);
    match before.rfind(|s| s.defined_var() == Some(var)).map(|s| &s.kind) {
        Some(StatementKind::Binding { value: Some(v), .. }) => v.is_null(),
        _ => false,
    }
}

/// The null-argument condition, with the offending line when it holds.
fn null_cause(test: &TestMethodModel, h: &Handler<'_>) -> Option<(u32, String)> {
    h.body.iter().enumerate().find_map(|(i, s)| match &s.kind {
        StatementKind::Invocation { receiver, method, args, .. } => {
            if has_null_arg(args) {
                Some((s.line, format!("null argument passed to `{method}`")))
            } else {
                let v = receiver.var()?;
                bound_to_null(test, h, i, v).then(|| (s.line, format!("`{method}` called on `{v}`, which is null")))
            }
        }
        StatementKind::ObjectCreation { ty, args, .. } if has_null_arg(args) => {
            Some((s.line, format!("null argument passed to `new {ty}`")))
        }
        _ => None,
    })
}

/// Exceptions due to null arguments.
pub fn detect_edna(suite: &str, test: &TestMethodModel) -> Vec<IssueFinding> {
    handlers(test)
        .filter(|h| h.exceptions.contains(&NPE))
        .filter_map(|h| {
            let (line, note) = null_cause(test, &h)?;
            Some(IssueFinding::new(IssueKind::Edna, suite, test, vec![h.stmt.line, line], note))
        })
        .collect()
}

/// Exceptions due to external dependencies: a handled, or declared, exception
/// type from the configured set.
pub fn detect_eded(suite: &str, test: &TestMethodModel, config: &AnalysisConfig) -> Vec<IssueFinding> {
    let external = |e: &str| config.external_exception_types.contains(e);
    let mut out = Vec::new();
    for h in handlers(test) {
        if let Some(e) = h.exceptions.iter().find(|e| external(e)) {
            out.push(IssueFinding::new(IssueKind::Eded, suite, test, vec![h.stmt.line], format!("handles {e}")));
        }
    }
    for e in test.declared_throws.iter().filter(|e| external(simple(e))) {
        out.push(IssueFinding::new(IssueKind::Eded, suite, test, vec![test.line], format!("declares {e}")));
    }
    out
}

/// Exceptions due to incomplete setup: a NullPointerException from a call on
/// an object built in the test, when the called method reads fields its
/// constructor leaves unset. Without source the shape alone decides: one
/// call on a freshly built object.
pub fn detect_edis(suite: &str, test: &TestMethodModel, cut: &CutModel) -> Vec<IssueFinding> {
    let facts = Facts::new(test, cut);
    let mut out = Vec::new();
    for h in handlers(test) {
        if !h.exceptions.contains(&NPE) || null_cause(test, &h).is_some() {
            continue;
        }
        let Some((trigger, var, method, arity)) = h.body.iter().rev().find_map(|s| match &s.kind {
            StatementKind::Invocation { receiver: Receiver::Var(v), method, args, .. } => Some((s, v, method, args.len())),
            _ => None,
        }) else {
            continue;
        };
        let construction = test.statements[..h.pos].iter().find_map(|s| match &s.kind {
            StatementKind::ObjectCreation { var: Some(v), ty, args } if v == var && simple(ty) == facts.cut_name => {
                Some(args.len())
            }
            _ => None,
        });
        let Some(ctor_arity) = construction else {
            continue;
        };
        let note = if cut.source_available {
            let Resolution::Method(m) = cut.resolve(method, Some(arity)) else {
                continue;
            };
            let init = cut.init_fields_for_arity(ctor_arity);
            let unset: Vec<&str> = m.read_set.iter().filter(|f| !init.contains(*f)).map(String::as_str).collect();
            if unset.is_empty() {
                continue;
            }
            format!("`{method}` reads {} not set by the constructor", unset.join(", "))
        } else {
            if h.body.len() != 1 {
                continue;
            }
            format!("`{method}` fails right after construction")
        };
        out.push(IssueFinding::new(IssueKind::Edis, suite, test, vec![h.stmt.line, trigger.line], note));
    }
    out
}
