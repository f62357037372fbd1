use std::collections::BTreeMap;

use crate::cut::{accessor_by_name, Accessor, CutModel, Resolution};
use crate::source::{CallResult, Receiver, StatementKind, StatementModel, TestMethodModel};

pub(crate) fn simple(name: &str) -> &str {
    name.rsplit('.').next().unwrap_or(name)
}

/// Names that conventionally return a value. Used when there is no source to
/// tell whether a discarded call is void.
pub(crate) fn value_returning_name(name: &str) -> bool {
    matches!(name, "equals" | "hashCode" | "toString" | "compareTo" | "clone")
        || ["get", "is", "has"].iter().any(|p| {
            name.strip_prefix(p)
                .and_then(|r| r.chars().next())
                .is_some_and(|c| !c.is_lowercase())
        })
}

/// Property name with a `get`/`is`/`set`/`has` prefix removed, lowercased.
pub(crate) fn property(name: &str) -> String {
    for p in ["get", "set", "has", "is"] {
        if let Some(rest) = name.strip_prefix(p) {
            if rest.chars().next().is_some_and(|c| !c.is_lowercase()) {
                return rest.to_lowercase();
            }
        }
    }
    name.to_lowercase()
}

/// Same method, or accessors of the same property.
pub(crate) fn names_match(a: &str, b: &str) -> bool {
    a == b || property(a) == property(b)
}

/// Whether a call returns nothing: from the summary when source is available,
/// otherwise from the statement shape and the method name.
pub(crate) fn presumed_void(cut: &CutModel, method: &str, arity: usize, result: &CallResult) -> bool {
    if let Resolution::Method(m) = cut.resolve(method, Some(arity)) {
        return m.is_void;
    }
    matches!(result, CallResult::Discarded) && !value_returning_name(method)
}

/// Accessor kind of a call on the class under test.
pub(crate) fn accessor_kind(cut: &CutModel, method: &str, arity: usize) -> Accessor {
    match cut.resolve(method, Some(arity)) {
        Resolution::Method(m) => m.is_accessor,
        Resolution::UnknownAncestor => Accessor::None,
        Resolution::Unknown => accessor_by_name(method, arity),
    }
}

/// Variable types as first bound in the test.
pub(crate) struct Facts<'a> {
    pub test: &'a TestMethodModel,
    pub cut_name: &'a str,
    types: BTreeMap<String, String>,
}

impl<'a> Facts<'a> {
    pub fn new(test: &'a TestMethodModel, cut: &'a CutModel) -> Self {
        let mut types = BTreeMap::new();
        fn visit(stmts: &[StatementModel], types: &mut BTreeMap<String, String>) {
            for s in stmts {
                let bound = match &s.kind {
                    StatementKind::ObjectCreation { var: Some(v), ty, .. } => Some((v, ty)),
                    StatementKind::Invocation { result: CallResult::Assigned { var, ty: Some(t) }, .. } => {
                        Some((var, t))
                    }
                    StatementKind::Binding { var, ty: Some(t), .. } => Some((var, t)),
                    StatementKind::TryCatchFail { body, .. } => {
                        visit(body, types);
                        None
                    }
                    _ => None,
                };
                if let Some((v, t)) = bound {
                    types.entry(v.clone()).or_insert_with(|| simple(t).to_string());
                }
            }
        }
        visit(&test.statements, &mut types);
        Facts { test, cut_name: simple(&cut.name), types }
    }

    pub fn is_cut_var(&self, var: &str) -> bool {
        self.types.get(var).is_some_and(|t| t == self.cut_name)
    }

    pub fn is_cut_receiver(&self, receiver: &Receiver) -> bool {
        match receiver {
            Receiver::Var(v) => self.is_cut_var(v),
            Receiver::Class(c) => simple(c) == self.cut_name,
            _ => false,
        }
    }

    pub fn has_opaque_after(&self, pos: usize) -> bool {
        self.test.statements[pos + 1..].iter().any(StatementModel::is_opaque)
    }

    /// Index of the first top-level statement defining `var`.
    pub fn declaration(&self, var: &str) -> Option<usize> {
        self.test.statements.iter().position(|s| s.defined_var() == Some(var))
    }
}
