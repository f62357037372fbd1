//! Language-neutral model of generated test classes.
//!
//! A test method is lowered into a flat list of [`StatementModel`]s. Only the
//! shapes EvoSuite emits get a dedicated variant; everything else becomes
//! [`StatementKind::Opaque`] and is treated conservatively by the detectors.

mod lower;

use std::collections::BTreeSet;

use crate::error::{SourceError, SyntaxError};
use crate::java::syntax::{ClassDecl, CompilationUnit};
use crate::java::parse_compilation_unit;

pub use lower::is_test_method;

#[derive(Debug, Clone, PartialEq)]
pub struct TestSuiteModel {
    pub suite_name: String,
    /// Fully-qualified name of the class under test, derived from the suite
    /// name by dropping the `_ESTest` suffix.
    pub cut_name: String,
    pub tests: Vec<TestMethodModel>,
}

impl TestSuiteModel {
    pub fn cut_simple_name(&self) -> &str {
        self.cut_name.rsplit('.').next().unwrap_or(&self.cut_name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestMethodModel {
    pub name: String,
    pub line: u32,
    pub statements: Vec<StatementModel>,
    pub declared_throws: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatementModel {
    pub kind: StatementKind,
    pub line: u32,
    /// Statement tokens joined by single spaces. Comments are not tokens, so
    /// they never take part in comparisons.
    pub normalized: String,
    /// Every identifier in the statement that is not a member name after `.`.
    pub mentions: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatementKind {
    /// `T v = new T(..)`, `v = new T(..)` or a discarded `new T(..)`.
    ObjectCreation { var: Option<String>, ty: String, args: Vec<ArgModel> },
    Invocation { receiver: Receiver, method: String, args: Vec<ArgModel>, result: CallResult },
    /// A variable bound to something that is neither a creation nor a call,
    /// e.g. `Camera.Lens camera_Lens0 = Camera.Lens.PINHOLE;`.
    Binding { var: String, ty: Option<String>, value: Option<ArgModel> },
    Assertion {
        kind: String,
        args: Vec<ArgModel>,
        referenced_vars: BTreeSet<String>,
        invoked_methods: Vec<(Receiver, String)>,
    },
    TryCatchFail {
        body: Vec<StatementModel>,
        expected_exception: String,
        fail_message: Option<String>,
        verify_target: Option<String>,
        /// First non-blank comment in the first catch block.
        catch_comment: Option<String>,
    },
    /// Anything else. `elided` marks a `...` placeholder for omitted code.
    Opaque { text: String, elided: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CallResult {
    Discarded,
    Assigned { var: String, ty: Option<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Receiver {
    Var(String),
    /// Static call; dotted class name as written.
    Class(String),
    /// Chained call or other expression receiver.
    Expr(Box<ArgModel>),
    /// Unqualified call such as `foo()`.
    Implicit,
}

impl Receiver {
    pub fn var(&self) -> Option<&str> {
        match self {
            Receiver::Var(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArgModel {
    VarRef { name: String },
    NullLiteral { cast: Option<String> },
    Literal { text: String, ty: String },
    StaticFieldRef { class: String, field: String },
    NestedCall { receiver: Receiver, method: String, args: Vec<ArgModel> },
    Creation { ty: String, args: Vec<ArgModel> },
    Other { text: String, vars: BTreeSet<String> },
}

impl ArgModel {
    /// Variables referenced anywhere inside this argument, receivers included.
    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            ArgModel::VarRef { name } => {
                out.insert(name.clone());
            }
            ArgModel::NestedCall { receiver, args, .. } => {
                collect_receiver_vars(receiver, out);
                args.iter().for_each(|a| a.collect_vars(out));
            }
            ArgModel::Creation { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
            ArgModel::Other { vars, .. } => out.extend(vars.iter().cloned()),
            ArgModel::NullLiteral { .. } | ArgModel::Literal { .. } | ArgModel::StaticFieldRef { .. } => {}
        }
    }

    /// `(receiver, method)` pairs of every call inside this argument,
    /// outermost first.
    pub fn collect_calls(&self, out: &mut Vec<(Receiver, String)>) {
        match self {
            ArgModel::NestedCall { receiver, method, args } => {
                out.push((receiver.clone(), method.clone()));
                if let Receiver::Expr(inner) = receiver {
                    inner.collect_calls(out);
                }
                args.iter().for_each(|a| a.collect_calls(out));
            }
            ArgModel::Creation { args, .. } => args.iter().for_each(|a| a.collect_calls(out)),
            _ => {}
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, ArgModel::NullLiteral { .. })
    }
}

pub(crate) fn collect_receiver_vars(receiver: &Receiver, out: &mut BTreeSet<String>) {
    match receiver {
        Receiver::Var(v) => {
            out.insert(v.clone());
        }
        Receiver::Expr(inner) => inner.collect_vars(out),
        Receiver::Class(_) | Receiver::Implicit => {}
    }
}

impl StatementModel {
    pub fn is_opaque(&self) -> bool {
        matches!(self.kind, StatementKind::Opaque { .. })
    }

    pub fn is_assertion(&self) -> bool {
        matches!(self.kind, StatementKind::Assertion { .. })
    }

    /// The variable this statement defines, if any.
    pub fn defined_var(&self) -> Option<&str> {
        match &self.kind {
            StatementKind::ObjectCreation { var, .. } => var.as_deref(),
            StatementKind::Invocation { result: CallResult::Assigned { var, .. }, .. } => Some(var),
            StatementKind::Binding { var, .. } => Some(var),
            _ => None,
        }
    }
}

/// Parses a generated test class.
///
/// The first class (top-level or nested) containing at least one test method
/// is taken as the suite.
pub fn parse_test_class(source_text: &str) -> Result<TestSuiteModel, SourceError> {
    let (unit, lexed) = parse_compilation_unit(source_text)?;
    fn find(classes: &[ClassDecl]) -> Option<&ClassDecl> {
        classes.iter().find_map(|c| {
            if c.methods.iter().any(is_test_method) {
                Some(c)
            } else {
                find(&c.nested)
            }
        })
    }
    let class = match find(&unit.classes) {
        Some(c) => c,
        None => {
            let name = unit.classes.first().map(|c| c.name.clone()).unwrap_or_default();
            return Err(SourceError::NotATestClass(name));
        }
    };
    let suite_name = class.name.clone();
    let simple = suite_name.strip_suffix("_ESTest").unwrap_or(&suite_name);
    let cut_name = match &unit.package {
        Some(p) => format!("{p}.{simple}"),
        None => simple.to_string(),
    };
    let mut seen = BTreeSet::new();
    let tests = class
        .methods
        .iter()
        .filter(|m| is_test_method(m) && seen.insert(m.name.clone()))
        .map(|m| lower::lower_test(m, &lexed))
        .collect();
    Ok(TestSuiteModel { suite_name, cut_name, tests })
}

/// Parses the source of a class under test or one of its ancestors.
pub fn parse_cut_class(source_text: &str) -> Result<CompilationUnit, SyntaxError> {
    parse_compilation_unit(source_text).map(|(unit, _)| unit)
}
