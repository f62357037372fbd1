//! Lowering from the Java syntax tree to [`super::StatementModel`]s.

use std::collections::BTreeSet;

use super::{ArgModel, CallResult, Receiver, StatementKind, StatementModel, TestMethodModel};
use crate::java::syntax::{Expr, LambdaBody, LitKind, MethodDecl, Stmt, StmtKind, TypeRef};
use crate::java::{Lexed, TokenKind};

/// A method is a test if it carries `@Test` or is named `test` plus digits.
pub fn is_test_method(m: &MethodDecl) -> bool {
    if m.return_type.is_none() || m.body.is_none() {
        return false;
    }
    m.annotations.iter().any(|a| a == "Test")
        || m.name
            .strip_prefix("test")
            .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

pub(super) fn lower_test(m: &MethodDecl, lexed: &Lexed) -> TestMethodModel {
    let body = m.body.as_deref().unwrap_or_default();
    let mut locals = BTreeSet::new();
    for p in &m.params {
        locals.insert(p.name.clone());
    }
    collect_locals(body, &mut locals);
    let cx = Lowerer { lexed, locals };
    TestMethodModel {
        name: m.name.clone(),
        line: m.line,
        statements: body.iter().flat_map(|s| cx.statement(s)).collect(),
        declared_throws: m.throws.iter().map(|t| t.simple_name().to_string()).collect(),
    }
}

fn collect_locals(stmts: &[Stmt], out: &mut BTreeSet<String>) {
    for s in stmts {
        match &s.kind {
            StmtKind::LocalVar { vars, .. } => out.extend(vars.iter().map(|v| v.name.clone())),
            StmtKind::Block(b) | StmtKind::Synchronized { body: b, .. } | StmtKind::Switch { body: b, .. } => {
                collect_locals(b, out)
            }
            StmtKind::If { then, otherwise, .. } => {
                collect_locals(std::slice::from_ref(then), out);
                if let Some(o) = otherwise {
                    collect_locals(std::slice::from_ref(o), out);
                }
            }
            StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } | StmtKind::Labeled { body, .. } => {
                collect_locals(std::slice::from_ref(body), out)
            }
            StmtKind::For { init, body, .. } => {
                collect_locals(init, out);
                collect_locals(std::slice::from_ref(body), out);
            }
            StmtKind::ForEach { name, body, .. } => {
                out.insert(name.clone());
                collect_locals(std::slice::from_ref(body), out);
            }
            StmtKind::Try { resources, body, catches, finally } => {
                collect_locals(resources, out);
                collect_locals(body, out);
                for c in catches {
                    out.insert(c.var.clone());
                    collect_locals(&c.body, out);
                }
                if let Some(f) = finally {
                    collect_locals(f, out);
                }
            }
            _ => {}
        }
    }
}

struct Lowerer<'a> {
    lexed: &'a Lexed,
    locals: BTreeSet<String>,
}

fn starts_upper(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_uppercase())
}

impl Lowerer<'_> {
    /// Declared locals and lowercase names are variables, everything else is
    /// taken to be a class name.
    fn is_var(&self, name: &str) -> bool {
        self.locals.contains(name) || !starts_upper(name)
    }

    fn normalized(&self, span: (usize, usize)) -> String {
        self.lexed.tokens[span.0..span.1]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn mentions(&self, span: (usize, usize)) -> BTreeSet<String> {
        let toks = &self.lexed.tokens;
        (span.0..span.1)
            .filter(|&i| toks[i].kind == TokenKind::Ident && (i == 0 || !toks[i - 1].is(".")))
            .map(|i| toks[i].text.clone())
            .collect()
    }

    fn model(&self, s: &Stmt, kind: StatementKind) -> StatementModel {
        StatementModel { kind, line: s.line, normalized: self.normalized(s.span), mentions: self.mentions(s.span) }
    }

    fn opaque(&self, s: &Stmt) -> StatementModel {
        let elided = s.kind == StmtKind::Ellipsis;
        self.model(s, StatementKind::Opaque { text: self.normalized(s.span), elided })
    }

    fn statement(&self, s: &Stmt) -> Vec<StatementModel> {
        match &s.kind {
            StmtKind::LocalVar { ty, vars } => vars
                .iter()
                .map(|v| self.model(s, self.bind(&v.name, Some(ty), v.init.as_ref())))
                .collect(),
            StmtKind::Expr(e) => vec![match self.expr_statement(e) {
                Some(kind) => self.model(s, kind),
                None => self.opaque(s),
            }],
            StmtKind::Try { resources, body, catches, finally }
                if resources.is_empty() && finally.is_none() && !catches.is_empty() =>
            {
                vec![self.try_catch(s, body, catches)]
            }
            _ => vec![self.opaque(s)],
        }
    }

    fn bind(&self, var: &str, ty: Option<&TypeRef>, init: Option<&Expr>) -> StatementKind {
        let var = var.to_string();
        let ty_name = ty.map(|t| t.name.clone());
        match init.map(Expr::peeled) {
            Some(Expr::New { ty, args, .. }) => {
                StatementKind::ObjectCreation { var: Some(var), ty: ty.name.clone(), args: self.args(args) }
            }
            Some(Expr::NewArray { ty, dims, .. }) => {
                StatementKind::ObjectCreation { var: Some(var), ty: ty.text.clone(), args: self.args(dims) }
            }
            Some(Expr::Call { target, name, args }) if !is_assert_call(target.as_deref(), name) => {
                StatementKind::Invocation {
                    receiver: self.receiver(target.as_deref()),
                    method: name.clone(),
                    args: self.args(args),
                    result: CallResult::Assigned { var, ty: ty_name },
                }
            }
            _ => StatementKind::Binding { var, ty: ty_name, value: init.map(|e| self.arg(e)) },
        }
    }

    fn expr_statement(&self, e: &Expr) -> Option<StatementKind> {
        match e {
            Expr::Assign { op, target, value } if op == "=" => match target.as_ref() {
                Expr::Name(v) => Some(self.bind(v, None, Some(value))),
                _ => None,
            },
            Expr::Call { target, name, args } => {
                if is_assert_call(target.as_deref(), name) {
                    return Some(self.assertion(name, args));
                }
                if target.is_none() && matches!(name.as_str(), "fail" | "verifyException" | "this" | "super") {
                    return None;
                }
                Some(StatementKind::Invocation {
                    receiver: self.receiver(target.as_deref()),
                    method: name.clone(),
                    args: self.args(args),
                    result: CallResult::Discarded,
                })
            }
            Expr::New { ty, args, .. } => {
                Some(StatementKind::ObjectCreation { var: None, ty: ty.name.clone(), args: self.args(args) })
            }
            _ => None,
        }
    }

    fn assertion(&self, name: &str, args: &[Expr]) -> StatementKind {
        let args = self.args(args);
        let mut referenced_vars = BTreeSet::new();
        let mut invoked_methods = Vec::new();
        for a in &args {
            a.collect_vars(&mut referenced_vars);
            a.collect_calls(&mut invoked_methods);
        }
        StatementKind::Assertion { kind: name.to_string(), args, referenced_vars, invoked_methods }
    }

    fn try_catch(&self, s: &Stmt, body: &[Stmt], catches: &[crate::java::syntax::CatchClause]) -> StatementModel {
        let mut fail_message = None;
        let mut lowered = Vec::new();
        for st in body {
            if let StmtKind::Expr(Expr::Call { target: None, name, args }) = &st.kind {
                if name == "fail" {
                    if fail_message.is_none() {
                        fail_message = args.first().and_then(string_literal);
                    }
                    continue;
                }
            }
            lowered.extend(self.statement(st));
        }
        let first = &catches[0];
        let expected_exception = first.types.iter().map(|t| t.simple_name()).collect::<Vec<_>>().join(" | ");
        let mut verify_target = None;
        for st in &first.body {
            let mut found = None;
            if let StmtKind::Expr(e) = &st.kind {
                e.walk(&mut |x| {
                    if found.is_none() {
                        if let Expr::Call { name, args, .. } = x {
                            if name == "verifyException" {
                                found = args.iter().find_map(string_literal);
                            }
                        }
                    }
                });
            }
            if found.is_some() {
                verify_target = found;
                break;
            }
        }
        let (open, close) = first.block_span;
        let catch_comment = self
            .lexed
            .comments
            .iter()
            .find(|c| c.before_token > open && c.before_token < close && !c.text.is_empty())
            .map(|c| c.text.clone());
        self.model(
            s,
            StatementKind::TryCatchFail {
                body: lowered,
                expected_exception,
                fail_message,
                verify_target,
                catch_comment,
            },
        )
    }

    fn receiver(&self, target: Option<&Expr>) -> Receiver {
        let Some(target) = target else {
            return Receiver::Implicit;
        };
        let target = target.peeled();
        if let Some(chain) = name_chain(target) {
            if chain.len() == 1 && self.is_var(&chain[0]) {
                return Receiver::Var(chain[0].clone());
            }
            if !self.is_var(&chain[0]) {
                return Receiver::Class(chain.join("."));
            }
        }
        Receiver::Expr(Box::new(self.arg(target)))
    }

    fn args(&self, args: &[Expr]) -> Vec<ArgModel> {
        args.iter().map(|a| self.arg(a)).collect()
    }

    fn arg(&self, e: &Expr) -> ArgModel {
        match e {
            Expr::Paren(inner) => self.arg(inner),
            Expr::Cast { ty, expr } => match expr.peeled() {
                Expr::Literal { kind: LitKind::Null, .. } => ArgModel::NullLiteral { cast: Some(ty.text.clone()) },
                _ => self.arg(expr),
            },
            Expr::Literal { kind: LitKind::Null, .. } => ArgModel::NullLiteral { cast: None },
            Expr::Literal { kind, text } => ArgModel::Literal { text: text.clone(), ty: kind.java_type().to_string() },
            Expr::Unary { op, expr, postfix: false } if op == "-" || op == "+" => match expr.peeled() {
                Expr::Literal { kind, text } if *kind != LitKind::Null && *kind != LitKind::String => {
                    let text = if op == "-" { format!("-{text}") } else { text.clone() };
                    ArgModel::Literal { text, ty: kind.java_type().to_string() }
                }
                _ => self.other(e),
            },
            Expr::Name(n) if self.is_var(n) => ArgModel::VarRef { name: n.clone() },
            Expr::Field { .. } => match name_chain(e) {
                Some(chain) if !self.is_var(&chain[0]) => {
                    let (field, class) = chain.split_last().expect("chain has at least two parts");
                    ArgModel::StaticFieldRef { class: class.join("."), field: field.clone() }
                }
                _ => self.other(e),
            },
            Expr::Call { target, name, args } => ArgModel::NestedCall {
                receiver: self.receiver(target.as_deref()),
                method: name.clone(),
                args: self.args(args),
            },
            Expr::New { ty, args, .. } => ArgModel::Creation { ty: ty.name.clone(), args: self.args(args) },
            Expr::Unparsed(text) => ArgModel::Other { text: text.clone(), vars: self.vars_in_text(text) },
            _ => self.other(e),
        }
    }

    fn other(&self, e: &Expr) -> ArgModel {
        let mut vars = BTreeSet::new();
        self.expr_vars(e, &mut vars);
        ArgModel::Other { text: render(e), vars }
    }

    fn expr_vars(&self, e: &Expr, out: &mut BTreeSet<String>) {
        e.walk(&mut |x| match x {
            Expr::Name(n) if self.is_var(n) => {
                out.insert(n.clone());
            }
            Expr::Unparsed(t) => out.extend(self.vars_in_text(t)),
            Expr::Lambda { params, body } => {
                let mut inner = BTreeSet::new();
                if let LambdaBody::Expr(b) = body.as_ref() {
                    self.expr_vars(b, &mut inner);
                }
                out.extend(inner.into_iter().filter(|v| !params.contains(v)));
            }
            _ => {}
        });
    }

    fn vars_in_text(&self, text: &str) -> BTreeSet<String> {
        let Ok(lexed) = crate::java::lexer::tokenize(text) else {
            return BTreeSet::new();
        };
        let toks = &lexed.tokens;
        (0..toks.len())
            .filter(|&i| {
                toks[i].kind == TokenKind::Ident && (i == 0 || !toks[i - 1].is(".")) && self.is_var(&toks[i].text)
            })
            .map(|i| toks[i].text.clone())
            .collect()
    }
}

fn is_assert_call(target: Option<&Expr>, name: &str) -> bool {
    let plain = match target {
        None => true,
        Some(t) => matches!(name_chain(t), Some(chain) if chain.last().is_some_and(|c| c == "Assert" || c == "Assertions")),
    };
    plain && name.starts_with("assert") && name.len() > "assert".len()
}

fn string_literal(e: &Expr) -> Option<String> {
    match e.peeled() {
        Expr::Literal { kind: LitKind::String, text } => {
            Some(text.strip_prefix('"').and_then(|t| t.strip_suffix('"')).unwrap_or(text).to_string())
        }
        _ => None,
    }
}

/// `a.b.c` as `["a", "b", "c"]`.
fn name_chain(e: &Expr) -> Option<Vec<String>> {
    match e {
        Expr::Name(n) => Some(vec![n.clone()]),
        Expr::Field { target, name } => {
            let mut chain = name_chain(target)?;
            chain.push(name.clone());
            Some(chain)
        }
        _ => None,
    }
}

/// Compact source rendering, used for opaque argument text.
pub(crate) fn render(e: &Expr) -> String {
    let list = |xs: &[Expr]| xs.iter().map(render).collect::<Vec<_>>().join(", ");
    match e {
        Expr::Name(n) => n.clone(),
        Expr::Literal { text, .. } => text.clone(),
        Expr::This => "this".into(),
        Expr::Super => "super".into(),
        Expr::Field { target, name } => format!("{}.{name}", render(target)),
        Expr::Call { target: Some(t), name, args } => format!("{}.{name}({})", render(t), list(args)),
        Expr::Call { target: None, name, args } => format!("{name}({})", list(args)),
        Expr::New { ty, args, anonymous_body } => {
            format!("new {}({}){}", ty.text, list(args), if *anonymous_body { " {...}" } else { "" })
        }
        Expr::NewArray { ty, dims, init } => match init {
            Some(items) => format!("new {} {{{}}}", ty.text, list(items)),
            None => format!("new {}[{}]", ty.name, list(dims)),
        },
        Expr::ArrayInit(items) => format!("{{{}}}", list(items)),
        Expr::Cast { ty, expr } => format!("({}) {}", ty.text, render(expr)),
        Expr::Paren(inner) => format!("({})", render(inner)),
        Expr::Unary { op, expr, postfix: true } => format!("{}{op}", render(expr)),
        Expr::Unary { op, expr, postfix: false } => format!("{op}{}", render(expr)),
        Expr::Binary { op, lhs, rhs } => format!("{} {op} {}", render(lhs), render(rhs)),
        Expr::Assign { op, target, value } => format!("{} {op} {}", render(target), render(value)),
        Expr::Conditional { cond, then, otherwise } => {
            format!("{} ? {} : {}", render(cond), render(then), render(otherwise))
        }
        Expr::Index { target, index } => format!("{}[{}]", render(target), render(index)),
        Expr::InstanceOf { expr, ty } => format!("{} instanceof {}", render(expr), ty.text),
        Expr::ClassLit(ty) => format!("{}.class", ty.text),
        Expr::Lambda { params, body } => match body.as_ref() {
            LambdaBody::Expr(b) => format!("({}) -> {}", params.join(", "), render(b)),
            LambdaBody::Block(_) => format!("({}) -> {{...}}", params.join(", ")),
        },
        Expr::MethodRef { target, name } => format!("{}::{name}", render(target)),
        Expr::Unparsed(t) => t.clone(),
    }
}
