//! Semantic summary of a class under test.
//!
//! Field effects are computed per method from its body and then propagated
//! through unqualified (`foo()` / `this.foo()`) calls up to a fixed depth.
//! Without source the model is empty and flagged `source_available = false`;
//! detectors then fall back to naming conventions.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::java::syntax::{ClassDecl, Expr, LambdaBody, MethodDecl, Stmt, StmtKind};

pub const DEFAULT_DEPTH: usize = 2;

/// Method names whose call on a field counts as writing that field.
const COLLECTION_MUTATORS: &[&str] = &[
    "add", "addAll", "put", "putAll", "remove", "removeAll", "clear", "set", "push", "pop", "offer", "poll",
    "insert", "append", "addElement", "removeElement",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Accessor {
    Getter,
    Setter,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodSummary {
    pub name: String,
    pub signature: Vec<String>,
    pub is_void: bool,
    pub is_static: bool,
    pub write_set: BTreeSet<String>,
    pub read_set: BTreeSet<String>,
    pub is_accessor: Accessor,
    pub declared_in: String,
    pub overridden_in_cut: bool,
    /// Every `return` yields a constructor call or a string literal.
    pub returns_non_null: bool,
}

impl MethodSummary {
    pub fn arity(&self) -> usize {
        self.signature.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldInfo {
    pub declared_in: String,
    pub is_static: bool,
    pub is_final: bool,
    pub has_initializer: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutModel {
    pub name: String,
    pub methods: Vec<MethodSummary>,
    /// Static final fields declared by the class itself.
    pub constants: BTreeSet<String>,
    /// Fields explicitly assigned when an instance is built with a given
    /// constructor, keyed by signature such as `(int,String)`. Field
    /// initializers and initializer blocks are included; implicit default
    /// values are not (see [`CutModel::default_valued_fields`]).
    pub constructor_init_fields: BTreeMap<String, BTreeSet<String>>,
    /// Declared fields of the class and its available ancestors.
    pub fields: BTreeMap<String, FieldInfo>,
    /// Nearest first. The last entry may be a class known by name only.
    pub ancestors: Vec<String>,
    pub source_available: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution<'a> {
    Method(&'a MethodSummary),
    /// Source is available and neither the class nor its available ancestors
    /// declare the method, so it must come from an ancestor outside the corpus.
    UnknownAncestor,
    /// No source for the class under test.
    Unknown,
}

impl CutModel {
    /// Model used when the class under test has no source.
    pub fn without_source(name: &str) -> Self {
        CutModel {
            name: name.to_string(),
            methods: Vec::new(),
            constants: BTreeSet::new(),
            constructor_init_fields: BTreeMap::new(),
            fields: BTreeMap::new(),
            ancestors: Vec::new(),
            source_available: false,
        }
    }

    /// Most-derived method with the given name, preferring a matching arity.
    pub fn resolve(&self, name: &str, arity: Option<usize>) -> Resolution<'_> {
        if !self.source_available {
            return Resolution::Unknown;
        }
        let mut by_name = self.methods.iter().filter(|m| m.name == name).peekable();
        if by_name.peek().is_none() {
            return Resolution::UnknownAncestor;
        }
        let candidates: Vec<_> = by_name.collect();
        let hit = arity
            .and_then(|n| candidates.iter().find(|m| m.arity() == n))
            .unwrap_or(&candidates[0]);
        Resolution::Method(hit)
    }

    /// Fields assigned by constructors taking `arity` arguments. With several
    /// candidates only fields every one of them assigns are returned.
    pub fn init_fields_for_arity(&self, arity: usize) -> BTreeSet<String> {
        let mut sets = self
            .constructor_init_fields
            .iter()
            .filter(|(sig, _)| signature_arity(sig) == arity)
            .map(|(_, s)| s);
        let Some(first) = sets.next() else {
            return BTreeSet::new();
        };
        sets.fold(first.clone(), |acc, s| acc.intersection(s).cloned().collect())
    }

    /// Instance fields without an initializer: they start at 0, false or null.
    pub fn default_valued_fields(&self) -> BTreeSet<String> {
        self.fields
            .iter()
            .filter(|(_, f)| !f.is_static && !f.has_initializer)
            .map(|(n, _)| n.clone())
            .collect()
    }
}

fn signature_arity(sig: &str) -> usize {
    let inner = sig.trim_start_matches('(').trim_end_matches(')');
    if inner.is_empty() {
        0
    } else {
        inner.split(',').count()
    }
}

fn signature_of(m: &MethodDecl) -> Vec<String> {
    m.params.iter().map(|p| p.ty.text.clone()).collect()
}

/// Accessor kind from the body when available, otherwise from the name.
pub fn classify_accessor(method: &MethodSummary, fallback_name_based: bool) -> Accessor {
    if fallback_name_based {
        accessor_by_name(&method.name, method.arity())
    } else {
        method.is_accessor
    }
}

/// `get*`/`is*` with no parameters, `set*` with one.
pub fn accessor_by_name(name: &str, arity: usize) -> Accessor {
    let has_prefix = |p: &str| {
        name.strip_prefix(p)
            .and_then(|rest| rest.chars().next())
            .is_some_and(|c| !c.is_lowercase())
    };
    if arity == 0 && (has_prefix("get") || has_prefix("is")) {
        Accessor::Getter
    } else if arity == 1 && has_prefix("set") {
        Accessor::Setter
    } else {
        Accessor::None
    }
}

/// Builds the model from the class under test followed by its available
/// ancestors, nearest first. `unresolved_ancestor` names the first ancestor
/// whose source is missing, if any.
pub fn summarize_cut(classes: &[ClassDecl], unresolved_ancestor: Option<&str>, depth: usize) -> CutModel {
    let depth = depth.max(1);
    let Some(cut) = classes.first() else {
        return CutModel::without_source("");
    };
    let mut ancestors: Vec<String> = classes[1..].iter().map(|c| c.name.clone()).collect();
    if let Some(extra) = unresolved_ancestor {
        ancestors.push(extra.to_string());
    }

    // Most-derived declaration wins.
    let mut fields = BTreeMap::new();
    for class in classes.iter().rev() {
        for f in &class.fields {
            fields.insert(
                f.name.clone(),
                FieldInfo {
                    declared_in: class.name.clone(),
                    is_static: f.modifiers.is_static,
                    is_final: f.modifiers.is_final,
                    has_initializer: f.init.is_some(),
                },
            );
        }
    }
    let constants: BTreeSet<String> = cut
        .fields
        .iter()
        .filter(|f| f.modifiers.is_static && f.modifiers.is_final)
        .map(|f| f.name.clone())
        .collect();
    let all_constants: BTreeSet<&str> = fields
        .iter()
        .filter(|(_, f)| f.is_static && f.is_final)
        .map(|(n, _)| n.as_str())
        .collect();
    let method_names: BTreeSet<&str> =
        classes.iter().flat_map(|c| c.methods.iter().map(|m| m.name.as_str())).collect();

    // Visible methods: own first, then inherited ones not redeclared.
    let mut visible: Vec<(&MethodDecl, &str)> = Vec::new();
    for class in classes {
        for m in &class.methods {
            let shadowed = visible
                .iter()
                .any(|(v, _)| v.name == m.name && v.params.len() == m.params.len());
            if !shadowed {
                visible.push((m, class.name.as_str()));
            }
        }
    }

    let scanner = Scanner { fields: &fields, method_names: &method_names };
    let direct: Vec<Effects> = visible.iter().map(|(m, _)| scanner.method(m)).collect();
    let resolve_callee = |name: &str, arity: usize| -> Option<usize> {
        visible
            .iter()
            .position(|(m, _)| m.name == name && m.params.len() == arity)
            .or_else(|| visible.iter().position(|(m, _)| m.name == name))
    };
    let callee_idx: Vec<Vec<usize>> = direct
        .iter()
        .map(|e| e.calls.iter().filter_map(|(n, a)| resolve_callee(n, *a)).collect())
        .collect();
    let (writes, reads) = propagate(&direct, &callee_idx, depth);

    let methods = visible
        .iter()
        .enumerate()
        .map(|(i, (m, owner))| {
            let is_void = m.return_type.as_ref().is_some_and(|t| t.is_void());
            let write_set: BTreeSet<String> =
                writes[i].iter().filter(|f| !all_constants.contains(f.as_str())).cloned().collect();
            let overridden_in_cut = *owner == cut.name
                && classes[1..]
                    .iter()
                    .any(|c| c.methods.iter().any(|a| a.name == m.name && a.params.len() == m.params.len()));
            MethodSummary {
                name: m.name.clone(),
                signature: signature_of(m),
                is_void,
                is_static: m.modifiers.is_static,
                is_accessor: body_accessor(m, &direct[i]),
                write_set,
                read_set: reads[i].clone(),
                declared_in: owner.to_string(),
                overridden_in_cut,
                returns_non_null: returns_non_null(m),
            }
        })
        .collect::<Vec<_>>();

    let constructor_init_fields =
        constructor_inits(classes, &scanner, &writes, &resolve_callee, &all_constants);

    CutModel {
        name: cut.name.clone(),
        methods,
        constants,
        constructor_init_fields,
        fields,
        ancestors,
        source_available: true,
    }
}

/// Depth 1 is the direct effect set. Depth `d` adds the depth `d - 1` sets of
/// every resolved callee.
fn propagate(
    direct: &[Effects],
    callees: &[Vec<usize>],
    depth: usize,
) -> (Vec<BTreeSet<String>>, Vec<BTreeSet<String>>) {
    let mut writes: Vec<BTreeSet<String>> = direct.iter().map(|e| e.writes.clone()).collect();
    let mut reads: Vec<BTreeSet<String>> = direct.iter().map(|e| e.reads.clone()).collect();
    for _ in 1..depth {
        let (prev_w, prev_r) = (writes.clone(), reads.clone());
        for (i, cs) in callees.iter().enumerate() {
            for &c in cs {
                writes[i].extend(prev_w[c].iter().cloned());
                reads[i].extend(prev_r[c].iter().cloned());
            }
        }
        if writes == prev_w && reads == prev_r {
            break;
        }
    }
    (writes, reads)
}

fn constructor_inits(
    classes: &[ClassDecl],
    scanner: &Scanner<'_>,
    writes: &[BTreeSet<String>],
    resolve_callee: &dyn Fn(&str, usize) -> Option<usize>,
    constants: &BTreeSet<&str>,
) -> BTreeMap<String, BTreeSet<String>> {
    let cut = &classes[0];
    // Field initializers anywhere in the hierarchy plus instance initializer
    // blocks of the class run before every constructor body.
    let mut base: BTreeSet<String> = classes
        .iter()
        .flat_map(|c| c.fields.iter().filter(|f| !f.modifiers.is_static && f.init.is_some()))
        .map(|f| f.name.clone())
        .collect();
    for init in cut.initializers.iter().filter(|i| !i.is_static) {
        base.extend(scanner.stmts(&init.body, &BTreeSet::new()).writes);
    }

    let own: Vec<(String, Effects)> = cut
        .constructors
        .iter()
        .map(|c| (format!("({})", signature_of(c).join(",")), scanner.method(c)))
        .collect();
    let mut out = BTreeMap::new();
    if own.is_empty() {
        out.insert("()".to_string(), base.clone());
    }
    for (i, (sig, eff)) in own.iter().enumerate() {
        let mut set = base.clone();
        let mut seen = BTreeSet::from([i]);
        let mut stack = vec![eff];
        while let Some(e) = stack.pop() {
            set.extend(e.writes.iter().cloned());
            for (name, arity) in &e.calls {
                if name == "this" {
                    if let Some(j) = own.iter().position(|(s, _)| signature_arity(s) == *arity) {
                        if seen.insert(j) {
                            stack.push(&own[j].1);
                        }
                    }
                } else if let Some(k) = resolve_callee(name, *arity) {
                    set.extend(writes[k].iter().cloned());
                }
            }
        }
        set.retain(|f| !constants.contains(f.as_str()));
        out.insert(sig.clone(), set);
    }
    out
}

fn body_accessor(m: &MethodDecl, effects: &Effects) -> Accessor {
    let Some(body) = m.body.as_deref() else {
        return Accessor::None;
    };
    let [only] = body else {
        return Accessor::None;
    };
    let is_void = m.return_type.as_ref().is_some_and(|t| t.is_void());
    match &only.kind {
        StmtKind::Return(Some(e)) if !is_void && m.params.is_empty() => {
            if field_target(e.peeled()).is_some() && !effects.reads.is_empty() {
                Accessor::Getter
            } else {
                Accessor::None
            }
        }
        StmtKind::Expr(Expr::Assign { op, target, value }) if is_void && m.params.len() == 1 && op == "=" => {
            let assigns_param = matches!(value.peeled(), Expr::Name(n) if *n == m.params[0].name);
            if assigns_param && field_target(target).is_some() && effects.writes.len() == 1 {
                Accessor::Setter
            } else {
                Accessor::None
            }
        }
        _ => Accessor::None,
    }
}

/// `f` or `this.f`.
fn field_target(e: &Expr) -> Option<&str> {
    match e {
        Expr::Name(n) => Some(n),
        Expr::Field { target, name } if matches!(**target, Expr::This) => Some(name),
        _ => None,
    }
}

fn returns_non_null(m: &MethodDecl) -> bool {
    let Some(body) = m.body.as_deref() else {
        return false;
    };
    let mut returns = Vec::new();
    each_stmt(body, &mut |s| {
        if let StmtKind::Return(v) = &s.kind {
            returns.push(v.as_ref());
        }
    });
    !returns.is_empty()
        && returns.iter().all(|r| {
            matches!(
                r.map(Expr::peeled),
                Some(Expr::New { .. } | Expr::NewArray { .. } | Expr::Literal { kind: crate::java::syntax::LitKind::String, .. })
            )
        })
}

/// Visits statements recursively, not entering local classes or lambdas.
fn each_stmt<'a>(stmts: &'a [Stmt], f: &mut dyn FnMut(&'a Stmt)) {
    for s in stmts {
        f(s);
        match &s.kind {
            StmtKind::Block(b) | StmtKind::Synchronized { body: b, .. } | StmtKind::Switch { body: b, .. } => {
                each_stmt(b, f)
            }
            StmtKind::If { then, otherwise, .. } => {
                each_stmt(std::slice::from_ref(then), f);
                if let Some(o) = otherwise {
                    each_stmt(std::slice::from_ref(o), f);
                }
            }
            StmtKind::While { body, .. } | StmtKind::DoWhile { body, .. } | StmtKind::Labeled { body, .. } => {
                each_stmt(std::slice::from_ref(body), f)
            }
            StmtKind::For { init, body, .. } => {
                each_stmt(init, f);
                each_stmt(std::slice::from_ref(body), f);
            }
            StmtKind::ForEach { body, .. } => each_stmt(std::slice::from_ref(body), f),
            StmtKind::Try { resources, body, catches, finally } => {
                each_stmt(resources, f);
                each_stmt(body, f);
                for c in catches {
                    each_stmt(&c.body, f);
                }
                if let Some(fin) = finally {
                    each_stmt(fin, f);
                }
            }
            _ => {}
        }
    }
}

#[derive(Debug, Default, Clone)]
struct Effects {
    writes: BTreeSet<String>,
    reads: BTreeSet<String>,
    /// Unqualified or `this.` calls as (name, arity); `this(..)` delegation
    /// appears as `"this"`.
    calls: Vec<(String, usize)>,
}

struct Scanner<'a> {
    fields: &'a BTreeMap<String, FieldInfo>,
    method_names: &'a BTreeSet<&'a str>,
}

impl Scanner<'_> {
    fn method(&self, m: &MethodDecl) -> Effects {
        let mut locals: BTreeSet<String> = m.params.iter().map(|p| p.name.clone()).collect();
        if let Some(body) = &m.body {
            each_stmt(body, &mut |s| match &s.kind {
                StmtKind::LocalVar { vars, .. } => locals.extend(vars.iter().map(|v| v.name.clone())),
                StmtKind::ForEach { name, .. } => {
                    locals.insert(name.clone());
                }
                StmtKind::Try { catches, .. } => locals.extend(catches.iter().map(|c| c.var.clone())),
                _ => {}
            });
            self.stmts(body, &locals)
        } else {
            Effects::default()
        }
    }

    fn stmts(&self, body: &[Stmt], locals: &BTreeSet<String>) -> Effects {
        let mut cx = ScanCx { scanner: self, locals, out: Effects::default() };
        each_stmt(body, &mut |s| cx.stmt(s));
        cx.out
    }

    /// Known fields, plus free lowercase identifiers that are neither locals
    /// nor method names. Listings often show only part of a class, so
    /// undeclared lowercase names are taken to be fields.
    fn is_field(&self, name: &str, locals: &BTreeSet<String>) -> bool {
        if locals.contains(name) {
            return false;
        }
        self.fields.contains_key(name)
            || (name.chars().next().is_some_and(|c| c.is_lowercase() || c == '_')
                && !self.method_names.contains(name))
    }
}

struct ScanCx<'a, 'b> {
    scanner: &'a Scanner<'b>,
    locals: &'a BTreeSet<String>,
    out: Effects,
}

impl ScanCx<'_, '_> {
    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::LocalVar { vars, .. } => {
                for v in vars {
                    if let Some(init) = &v.init {
                        self.read(init);
                    }
                }
            }
            StmtKind::Expr(e) | StmtKind::Throw(e) | StmtKind::Assert(e) => self.read(e),
            StmtKind::Return(Some(e)) => self.read(e),
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } | StmtKind::DoWhile { cond, .. } => {
                self.read(cond)
            }
            StmtKind::For { cond, update, .. } => {
                if let Some(c) = cond {
                    self.read(c);
                }
                update.iter().for_each(|u| self.read(u));
            }
            StmtKind::ForEach { iterable, .. } => self.read(iterable),
            StmtKind::Switch { selector, .. } => self.read(selector),
            StmtKind::Synchronized { lock, .. } => self.read(lock),
            _ => {}
        }
    }

    fn field_of(&self, e: &Expr) -> Option<String> {
        match e {
            Expr::Name(n) if self.scanner.is_field(n, self.locals) => Some(n.clone()),
            Expr::Field { target, name } if matches!(**target, Expr::This) => Some(name.clone()),
            _ => None,
        }
    }

    fn write_target(&mut self, target: &Expr) {
        match target.peeled() {
            Expr::Index { target, index } => {
                self.read(index);
                match self.field_of(target.peeled()) {
                    Some(f) => {
                        self.out.writes.insert(f);
                    }
                    None => self.read(target),
                }
            }
            t => match self.field_of(t) {
                Some(f) => {
                    self.out.writes.insert(f);
                }
                None => {
                    if let Expr::Field { target, .. } = t {
                        self.read(target);
                    }
                }
            },
        }
    }

    fn read(&mut self, e: &Expr) {
        match e {
            Expr::Name(_) => {
                if let Some(f) = self.field_of(e) {
                    self.out.reads.insert(f);
                }
            }
            Expr::Field { target, .. } => match self.field_of(e) {
                Some(f) => {
                    self.out.reads.insert(f);
                }
                None => self.read(target),
            },
            Expr::Assign { op, target, value } => {
                if op != "=" {
                    self.read(target);
                }
                self.write_target(target);
                self.read(value);
            }
            Expr::Unary { op, expr, .. } if op == "++" || op == "--" => {
                self.read(expr);
                self.write_target(expr);
            }
            Expr::Call { target, name, args } => {
                match target.as_deref().map(Expr::peeled) {
                    None | Some(Expr::This) => self.out.calls.push((name.clone(), args.len())),
                    Some(t) => {
                        if COLLECTION_MUTATORS.contains(&name.as_str()) {
                            if let Some(f) = self.field_of(t) {
                                self.out.writes.insert(f);
                            }
                        }
                        self.read(t);
                    }
                }
                args.iter().for_each(|a| self.read(a));
            }
            Expr::Lambda { body, .. } => {
                if let LambdaBody::Expr(b) = body.as_ref() {
                    self.read(b);
                }
            }
            Expr::Literal { .. }
            | Expr::This
            | Expr::Super
            | Expr::ClassLit(_)
            | Expr::Unparsed(_)
            | Expr::MethodRef { .. } => {}
            Expr::New { args, .. } => args.iter().for_each(|a| self.read(a)),
            Expr::NewArray { dims, init, .. } => {
                dims.iter().for_each(|a| self.read(a));
                init.iter().flatten().for_each(|a| self.read(a));
            }
            Expr::ArrayInit(items) => items.iter().for_each(|a| self.read(a)),
            Expr::Cast { expr, .. } | Expr::Paren(expr) | Expr::Unary { expr, .. } | Expr::InstanceOf { expr, .. } => {
                self.read(expr)
            }
            Expr::Binary { lhs, rhs, .. } => {
                self.read(lhs);
                self.read(rhs);
            }
            Expr::Conditional { cond, then, otherwise } => {
                self.read(cond);
                self.read(then);
                self.read(otherwise);
            }
            Expr::Index { target, index } => {
                self.read(target);
                self.read(index);
            }
        }
    }
}
