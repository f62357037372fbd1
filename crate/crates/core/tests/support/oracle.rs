//! Expected findings for a generated suite, computed from the generator's
//! model rather than from parsed Java.

use std::collections::{BTreeMap, BTreeSet};

use evoqual::detect::{IssueFinding, IssueKind};

use super::{GArg, GAssert, GCut, GStmt, GSuite, MKind, MRef, Parent, RType, PARENT_FIELD, PARENT_METHODS};

/// The comparable part of a finding.
pub type Key = (IssueKind, String, String, Vec<u32>, Vec<String>, Option<String>);

pub fn key_of(f: &IssueFinding) -> Key {
    (f.kind, f.suite.clone(), f.test.clone(), f.evidence_lines.clone(), f.related_tests.clone(), f.subcase.clone())
}

pub struct OracleConfig {
    pub depth: usize,
    pub min_lines: usize,
    pub external: BTreeSet<&'static str>,
    pub enabled: BTreeSet<IssueKind>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            depth: 2,
            min_lines: 2,
            external: ["HeadlessException", "SQLException", "NotYetConnectedException"].into(),
            enabled: IssueKind::ALL.into_iter().collect(),
        }
    }
}

type Fields = BTreeSet<String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Acc {
    Getter,
    Setter,
    None,
}

/// What a resolved method looks like to the analysis.
#[derive(Debug, Clone)]
struct Summary {
    is_void: bool,
    writes: Fields,
    reads: Fields,
    accessor: Acc,
    non_null: bool,
    inherited: bool,
}

enum Res {
    Method(Summary),
    UnknownAncestor,
    Unknown,
}

struct Model<'a> {
    cut: &'a GCut,
    depth: usize,
}

fn set(fields: impl IntoIterator<Item = usize>) -> Fields {
    fields.into_iter().map(|f| format!("f{f}")).collect()
}

impl Model<'_> {
    fn direct(&self, i: usize) -> (Fields, Fields) {
        match &self.cut.methods[i].kind {
            MKind::Getter(f) | MKind::Check(f) => (Fields::new(), set([*f])),
            MKind::Setter(f) => (set([*f]), Fields::new()),
            MKind::Mutator { writes, .. } => (set(writes.iter().copied()), Fields::new()),
            MKind::Compute(fs) => (Fields::new(), set(fs.iter().copied())),
            MKind::Noop | MKind::Describe => (Fields::new(), Fields::new()),
        }
    }

    fn callees(&self, i: usize) -> &[usize] {
        match &self.cut.methods[i].kind {
            MKind::Mutator { calls, .. } => calls,
            _ => &[],
        }
    }

    /// Effects of `i` including callees up to `d` levels deep.
    fn effects(&self, i: usize, d: usize) -> (Fields, Fields) {
        let (mut w, mut r) = self.direct(i);
        if d > 1 {
            for &c in self.callees(i) {
                let (cw, cr) = self.effects(c, d - 1);
                w.extend(cw);
                r.extend(cr);
            }
        }
        (w, r)
    }

    fn own(&self, i: usize) -> Summary {
        let m = &self.cut.methods[i];
        let (writes, reads) = self.effects(i, self.depth);
        let accessor = match m.kind {
            MKind::Getter(_) => Acc::Getter,
            MKind::Setter(_) => Acc::Setter,
            _ => Acc::None,
        };
        Summary {
            is_void: m.is_void(),
            writes,
            reads,
            accessor,
            non_null: m.kind == MKind::Describe,
            inherited: false,
        }
    }

    fn inherited(&self, i: usize) -> Summary {
        let (_, is_void, reads, writes, getter) = PARENT_METHODS[i];
        let field = || Fields::from([PARENT_FIELD.to_string()]);
        Summary {
            is_void,
            writes: if writes { field() } else { Fields::new() },
            reads: if reads { field() } else { Fields::new() },
            accessor: if getter { Acc::Getter } else { Acc::None },
            non_null: false,
            inherited: true,
        }
    }

    fn resolve(&self, m: MRef) -> Res {
        if !self.cut.source {
            return Res::Unknown;
        }
        match (m, self.cut.parent) {
            (MRef::Own(i), _) => Res::Method(self.own(i)),
            (MRef::Parent(i), Parent::Available) => Res::Method(self.inherited(i)),
            (MRef::Parent(_), _) => Res::UnknownAncestor,
        }
    }

    fn name(&self, m: MRef) -> &str {
        super::method_name(self.cut, m)
    }

    fn accessor(&self, m: MRef, arity: usize) -> Acc {
        match self.resolve(m) {
            Res::Method(s) => s.accessor,
            Res::UnknownAncestor => Acc::None,
            Res::Unknown => by_name(self.name(m), arity),
        }
    }

    fn instance_fields(&self) -> Vec<(String, bool)> {
        let mut out: Vec<(String, bool)> =
            self.cut.fields.iter().enumerate().map(|(i, init)| (format!("f{i}"), *init)).collect();
        if self.cut.parent == Parent::Available {
            out.push((PARENT_FIELD.to_string(), false));
        }
        out
    }

    fn defaults(&self) -> Fields {
        self.instance_fields().into_iter().filter(|(_, init)| !init).map(|(n, _)| n).collect()
    }

    fn ctor_init(&self, arity: usize) -> Fields {
        let base: Fields = self.instance_fields().into_iter().filter(|(_, init)| *init).map(|(n, _)| n).collect();
        if self.cut.ctors.is_empty() {
            return if arity == 0 { base } else { Fields::new() };
        }
        let Some(c) = self.cut.ctors.iter().find(|c| c.arity == arity) else {
            return Fields::new();
        };
        let mut out = base;
        out.extend(set(c.assigns.iter().map(|(f, _)| *f)));
        for &m in &c.calls {
            out.extend(self.effects(m, self.depth).0);
        }
        out
    }
}

fn by_name(name: &str, arity: usize) -> Acc {
    let after = |p: &str| name.strip_prefix(p).and_then(|r| r.chars().next()).is_some_and(|c| !c.is_lowercase());
    if arity == 0 && (after("get") || after("is")) {
        Acc::Getter
    } else if arity == 1 && after("set") {
        Acc::Setter
    } else {
        Acc::None
    }
}

fn value_returning(name: &str) -> bool {
    let after = |p: &str| name.strip_prefix(p).and_then(|r| r.chars().next()).is_some_and(|c| !c.is_lowercase());
    ["equals", "hashCode", "toString", "compareTo", "clone"].contains(&name) || after("get") || after("is") || after("has")
}

fn property(name: &str) -> String {
    for p in ["get", "set", "has", "is"] {
        if let Some(rest) = name.strip_prefix(p) {
            if rest.chars().next().is_some_and(|c| !c.is_lowercase()) {
                return rest.to_lowercase();
            }
        }
    }
    name.to_lowercase()
}

fn all_caps(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_uppercase())
        && name.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Receiver and method of every call inside an assertion.
fn assert_calls(a: &GAssert) -> Vec<(String, Option<MRef>)> {
    match a {
        GAssert::EqCall { var, m, .. } | GAssert::TrueCall { var, m } => vec![(var.clone(), Some(*m))],
        GAssert::EqOther { var, .. } => vec![(var.clone(), None)],
        _ => Vec::new(),
    }
}

fn assert_vars(a: &GAssert) -> Vec<&str> {
    match a {
        GAssert::EqCall { var, .. }
        | GAssert::TrueCall { var, .. }
        | GAssert::EqOther { var, .. }
        | GAssert::EqVar { var, .. }
        | GAssert::NotNull { var } => vec![var],
        GAssert::Const { .. } => Vec::new(),
    }
}

fn defined(s: &GStmt) -> Option<&str> {
    match s {
        GStmt::NewCut { var, .. } => var.as_deref(),
        GStmt::NewOther { var } | GStmt::NullBind { var } => Some(var),
        GStmt::Call { assign: Some((v, _)), .. } => Some(v),
        _ => None,
    }
}

fn is_setup(s: &GStmt) -> bool {
    matches!(s, GStmt::NewCut { .. } | GStmt::NewOther { .. } | GStmt::NullBind { .. } | GStmt::Call { .. })
}

struct TestView<'a> {
    name: &'a str,
    stmts: &'a [GStmt],
    lines: &'a [u32],
    body_lines: &'a [Vec<u32>],
    /// Variables typed as the class under test.
    cut_vars: BTreeSet<&'a str>,
}

impl<'a> TestView<'a> {
    fn new(t: &'a super::GTest) -> Self {
        let mut cut_vars = BTreeSet::new();
        let mut visit = |s: &'a GStmt| match s {
            GStmt::NewCut { var: Some(v), .. } | GStmt::NullBind { var: v } => {
                cut_vars.insert(v.as_str());
            }
            _ => {}
        };
        for s in &t.stmts {
            visit(s);
            if let GStmt::Try { body, .. } = s {
                body.iter().for_each(&mut visit);
            }
        }
        TestView { name: &t.name, stmts: &t.stmts, lines: &t.lines, body_lines: &t.body_lines, cut_vars }
    }

    fn prefix(&self) -> usize {
        self.stmts.iter().position(|s| !is_setup(s)).unwrap_or(self.stmts.len())
    }

    fn mentions(&self, s: &GStmt, var: &str) -> bool {
        match s {
            GStmt::Assert(a) => assert_vars(a).contains(&var),
            GStmt::Call { var: v, .. } => v == var,
            GStmt::Try { body, .. } => body.iter().any(|b| self.mentions(b, var)),
            _ => false,
        }
    }
}

struct Out<'a> {
    suite: &'a str,
    found: Vec<Key>,
}

impl Out<'_> {
    fn push(&mut self, kind: IssueKind, test: &str, lines: Vec<u32>, related: Vec<String>, subcase: Option<&str>) {
        let lines: BTreeSet<u32> = lines.into_iter().collect();
        let mut related = related;
        related.sort();
        related.dedup();
        self.found.push((
            kind,
            self.suite.to_string(),
            test.to_string(),
            lines.into_iter().collect(),
            related,
            subcase.map(String::from),
        ));
    }
}

/// Unasserted void calls of one test: (line, method name).
fn unasserted(m: &Model<'_>, t: &TestView<'_>) -> Vec<(u32, String)> {
    let mut out = Vec::new();
    for (pos, s) in t.stmts.iter().enumerate() {
        let GStmt::Call { var, m: mr, args, assign } = s else {
            continue;
        };
        if !t.cut_vars.contains(var.as_str()) {
            continue;
        }
        let name = m.name(*mr);
        let written = if m.cut.source {
            match m.resolve(*mr) {
                Res::Method(s) if s.is_void && !s.writes.is_empty() => s.writes,
                _ => continue,
            }
        } else {
            if assign.is_some() || value_returning(name) || by_name(name, args.len()) == Acc::Setter {
                continue;
            }
            Fields::new()
        };
        let related = t.stmts.iter().any(|s| {
            let GStmt::Assert(a) = s else { return false };
            assert_calls(a).into_iter().any(|(r, am)| {
                let Some(am) = am else {
                    return name == "hashCode";
                };
                m.name(am) == name
                    || (r == *var && matches!(m.resolve(am), Res::Method(s) if !s.reads.is_disjoint(&written)))
            })
        });
        let opaque_after = t.stmts[pos + 1..].iter().any(|s| matches!(s, GStmt::Ellipsis));
        if !related && !opaque_after {
            out.push((t.lines[pos], name.to_string()));
        }
    }
    out
}

fn narv(m: &Model<'_>, t: &TestView<'_>, out: &mut Out<'_>) {
    for (pos, s) in t.stmts.iter().enumerate() {
        let GStmt::Call { var, m: mr, assign, .. } = s else {
            continue;
        };
        if !t.cut_vars.contains(var.as_str()) {
            continue;
        }
        let void = match m.resolve(*mr) {
            Res::Method(s) => s.is_void,
            _ => assign.is_none() && !value_returning(m.name(*mr)),
        };
        if void {
            continue;
        }
        if let Some((r, _)) = assign {
            let later = &t.stmts[pos + 1..];
            if later.iter().any(|s| matches!(s, GStmt::Ellipsis) || t.mentions(s, r)) {
                continue;
            }
        }
        out.push(IssueKind::Narv, t.name, vec![t.lines[pos]], vec![], None);
    }
}

fn arpm(m: &Model<'_>, t: &TestView<'_>, out: &mut Out<'_>) {
    if !m.cut.source {
        return;
    }
    let acted: Vec<(&str, Fields)> = t
        .stmts
        .iter()
        .filter_map(|s| match s {
            GStmt::Call { var, m: mr, .. } if t.cut_vars.contains(var.as_str()) => {
                let w = match m.resolve(*mr) {
                    Res::Method(s) => s.writes,
                    _ => Fields::new(),
                };
                Some((m.name(*mr), w))
            }
            _ => None,
        })
        .collect();
    for (pos, s) in t.stmts.iter().enumerate() {
        let GStmt::Assert(a) = s else { continue };
        for (r, am) in assert_calls(a) {
            let Some(am) = am else { continue };
            if !t.cut_vars.contains(r.as_str()) {
                continue;
            }
            let reads = match m.resolve(am) {
                Res::Method(s) if s.inherited => s.reads,
                Res::UnknownAncestor => Fields::new(),
                _ => continue,
            };
            let name = m.name(am);
            if acted.iter().any(|(n, w)| *n == name || property(n) == property(name) || !reads.is_disjoint(w)) {
                continue;
            }
            let start = t.stmts.iter().position(|s| defined(s) == Some(r.as_str())).map_or(0, |d| d + 1);
            if t.stmts[start.min(pos)..pos].iter().any(|s| matches!(s, GStmt::Ellipsis)) {
                continue;
            }
            out.push(IssueKind::Arpm, t.name, vec![t.lines[pos]], vec![], None);
            break;
        }
    }
}

/// Assertion lines when every assertion only checks initial state.
fn init_asserting(m: &Model<'_>, t: &TestView<'_>) -> Option<Vec<u32>> {
    if t.stmts.iter().any(|s| matches!(s, GStmt::Ellipsis | GStmt::Try { .. })) {
        return None;
    }
    let mut created: BTreeMap<&str, usize> = BTreeMap::new();
    for s in t.stmts {
        if let GStmt::NewCut { var: Some(v), args } = s {
            created.entry(v).or_insert(args.len());
        }
    }
    let mut lines = Vec::new();
    let mut fields: BTreeMap<&str, Fields> = BTreeMap::new();
    let mut props: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for (pos, s) in t.stmts.iter().enumerate() {
        let GStmt::Assert(a) = s else { continue };
        let calls = assert_calls(a);
        if calls.is_empty() {
            return None;
        }
        for (r, am) in calls {
            let v = *created.get_key_value(r.as_str())?.0;
            let am = am?;
            if m.accessor(am, 0) != Acc::Getter {
                return None;
            }
            if let Res::Method(s) = m.resolve(am) {
                fields.entry(v).or_default().extend(s.reads);
            }
            props.entry(v).or_default().insert(property(m.name(am)));
        }
        lines.push(t.lines[pos]);
    }
    if lines.is_empty() {
        return None;
    }
    if m.cut.source {
        for (v, read) in &fields {
            let mut ok = m.ctor_init(created[v]);
            ok.extend(m.defaults());
            if !read.is_subset(&ok) {
                return None;
            }
        }
    }
    for s in t.stmts {
        let GStmt::Call { var, m: mr, args, .. } = s else { continue };
        if !created.contains_key(var.as_str()) {
            continue;
        }
        if m.cut.source {
            match m.resolve(*mr) {
                Res::Method(s) => {
                    if fields.get(var.as_str()).is_some_and(|f| !f.is_disjoint(&s.writes)) {
                        return None;
                    }
                }
                _ => return None,
            }
        } else {
            match by_name(m.name(*mr), args.len()) {
                Acc::Getter => {}
                Acc::Setter if props.get(var.as_str()).is_some_and(|p| p.contains(&property(m.name(*mr)))) => {
                    return None
                }
                Acc::Setter => {}
                Acc::None => return None,
            }
        }
    }
    Some(lines)
}

fn ds(suite: &GSuite, views: &[TestView<'_>], k: usize, out: &mut Out<'_>) {
    let mut groups: BTreeMap<Vec<String>, Vec<&TestView<'_>>> = BTreeMap::new();
    for t in views {
        if t.prefix() >= k {
            let key = t.stmts[..k].iter().map(|s| super::statement_text(&suite.cut, s)).collect();
            groups.entry(key).or_default().push(t);
        }
    }
    for members in groups.values().filter(|m| m.len() >= 2) {
        for t in members {
            let others = members.iter().filter(|o| o.name != t.name).map(|o| o.name.to_string()).collect();
            out.push(IssueKind::Ds, t.name, t.lines[..k].to_vec(), others, None);
        }
    }
}

fn tses(suite: &GSuite, views: &[TestView<'_>], out: &mut Out<'_>) {
    let cut = &suite.cut;
    let scenarios: Vec<_> = views
        .iter()
        .filter_map(|t| {
            let pos = t.stmts.iter().position(|s| matches!(s, GStmt::Try { .. }))?;
            let GStmt::Try { body, exception, comment, target } = &t.stmts[pos] else { unreachable!() };
            let trigger = body.iter().rev().find_map(|b| match b {
                GStmt::Call { m, .. } => Some(super::method_name(cut, *m).to_string()),
                GStmt::NewCut { .. } => Some(format!("new {}", cut.name)),
                _ => None,
            })?;
            let prefix: Vec<String> = t.stmts[..t.prefix()].iter().map(|s| super::statement_text(cut, s)).collect();
            Some((t, (prefix, exception.clone(), *target, *comment), trigger, t.lines[pos]))
        })
        .collect();
    for (t, key, trigger, line) in &scenarios {
        let others: Vec<String> = scenarios
            .iter()
            .filter(|(_, k, tr, _)| k == key && tr != trigger)
            .map(|(o, ..)| o.name.to_string())
            .collect();
        if !others.is_empty() {
            out.push(IssueKind::Tses, t.name, vec![*line], others, None);
        }
    }
}

fn implies_non_null(s: &GStmt, v: &str) -> bool {
    let GStmt::Assert(a) = s else { return false };
    match a {
        GAssert::EqCall { var, .. } | GAssert::TrueCall { var, .. } | GAssert::EqOther { var, .. } => var == v,
        // `assertEquals(lit, v)` or `assertTrue(v)`
        GAssert::EqVar { var, .. } => var == v,
        GAssert::NotNull { .. } | GAssert::Const { .. } => false,
    }
}

fn nna(m: &Model<'_>, t: &TestView<'_>, out: &mut Out<'_>) {
    for (q, s) in t.stmts.iter().enumerate() {
        let GStmt::Assert(GAssert::NotNull { var: v }) = s else { continue };
        let def = t.stmts[..q].iter().rposition(|s| defined(s) == Some(v.as_str()));
        if let Some(d) = def.filter(|d| matches!(t.stmts[*d], GStmt::NewCut { .. } | GStmt::NewOther { .. })) {
            out.push(IssueKind::Nna, t.name, vec![t.lines[d], t.lines[q]], vec![], Some("i"));
            continue;
        }
        if let Some(o) = (0..t.stmts.len()).find(|&i| i != q && implies_non_null(&t.stmts[i], v)) {
            out.push(IssueKind::Nna, t.name, vec![t.lines[q], t.lines[o]], vec![], Some("ii"));
            continue;
        }
        if let Some(d) = def {
            if let GStmt::Call { var, m: mr, .. } = &t.stmts[d] {
                if t.cut_vars.contains(var.as_str()) && matches!(m.resolve(*mr), Res::Method(s) if s.non_null) {
                    out.push(IssueKind::Nna, t.name, vec![t.lines[d], t.lines[q]], vec![], Some("iii"));
                }
            }
        }
    }
}

/// Line of the statement inside a try body that makes the null condition hold.
fn null_cause(t: &TestView<'_>, pos: usize) -> Option<u32> {
    let GStmt::Try { body, .. } = &t.stmts[pos] else { return None };
    let has_null = |args: &[GArg]| args.contains(&GArg::Null);
    for (i, b) in body.iter().enumerate() {
        let line = t.body_lines[pos][i];
        match b {
            GStmt::Call { args, .. } if has_null(args) => return Some(line),
            GStmt::Call { var, .. } => {
                let mut earlier = t.stmts[..pos].iter().chain(&body[..i]);
                if matches!(earlier.rfind(|s| defined(s) == Some(var.as_str())), Some(GStmt::NullBind { .. })) {
                    return Some(line);
                }
            }
            GStmt::NewCut { args, .. } if has_null(args) => return Some(line),
            _ => {}
        }
    }
    None
}

fn failed_setup(m: &Model<'_>, cfg: &OracleConfig, t: &TestView<'_>, out: &mut Out<'_>) {
    for (pos, s) in t.stmts.iter().enumerate() {
        let GStmt::Try { body, exception, .. } = s else { continue };
        let line = t.lines[pos];
        if cfg.external.contains(exception.as_str()) {
            out.push(IssueKind::Eded, t.name, vec![line], vec![], None);
        }
        if exception != "NullPointerException" {
            continue;
        }
        if let Some(cause) = null_cause(t, pos) {
            out.push(IssueKind::Edna, t.name, vec![line, cause], vec![], None);
            continue;
        }
        let Some(i) = body.iter().rposition(|b| matches!(b, GStmt::Call { .. })) else { continue };
        let GStmt::Call { var, m: mr, .. } = &body[i] else { unreachable!() };
        let construction = t.stmts[..pos].iter().find_map(|s| match s {
            GStmt::NewCut { var: Some(v), args } if v == var => Some(args.len()),
            _ => None,
        });
        let Some(arity) = construction else { continue };
        if m.cut.source {
            let Res::Method(s) = m.resolve(*mr) else { continue };
            if s.reads.is_subset(&m.ctor_init(arity)) {
                continue;
            }
        } else if body.len() != 1 {
            continue;
        }
        out.push(IssueKind::Edis, t.name, vec![line, t.body_lines[pos][i]], vec![], None);
    }
}

fn tofa(m: &Model<'_>, t: &TestView<'_>, out: &mut Out<'_>) {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut lines = Vec::new();
    let mut assertions = 0;
    for (pos, s) in t.stmts.iter().enumerate() {
        match s {
            GStmt::NewCut { .. } | GStmt::NewOther { .. } | GStmt::NullBind { .. } => {}
            GStmt::Call { var, m: mr, args, .. } => {
                if !t.cut_vars.contains(var.as_str()) || m.accessor(*mr, args.len()) == Acc::None {
                    return;
                }
                lines.push(t.lines[pos]);
            }
            GStmt::Assert(a) => {
                let calls = assert_calls(a);
                for (r, am) in &calls {
                    let ok = t.cut_vars.contains(r.as_str()) && am.is_some_and(|am| m.accessor(am, 0) == Acc::Getter);
                    if !ok {
                        return;
                    }
                }
                if !assert_vars(a).iter().all(|v| seen.contains(v)) {
                    return;
                }
                if !calls.is_empty() {
                    lines.push(t.lines[pos]);
                }
                assertions += 1;
            }
            GStmt::Try { .. } | GStmt::Ellipsis => return,
        }
        if let Some(v) = defined(s) {
            seen.insert(v);
        }
    }
    if assertions > 0 && !lines.is_empty() {
        out.push(IssueKind::Tofa, t.name, lines, vec![], None);
    }
}

fn ac(m: &Model<'_>, t: &TestView<'_>, out: &mut Out<'_>) {
    for (pos, s) in t.stmts.iter().enumerate() {
        let GStmt::Assert(GAssert::Const { class, field }) = s else { continue };
        let declared = if m.cut.source && *class == m.cut.name {
            match field.as_str() {
                "LIMIT" if m.cut.has_limit => Some(true),
                "counter" if m.cut.has_counter => Some(false),
                _ => None,
            }
        } else {
            None
        };
        if declared.unwrap_or_else(|| all_caps(field)) {
            out.push(IssueKind::Ac, t.name, vec![t.lines[pos]], vec![], None);
        }
    }
}

/// Every finding the analysis should report for `suite` under `suite_id`.
pub fn expected(suite: &GSuite, suite_id: &str, cfg: &OracleConfig) -> Vec<Key> {
    let m = Model { cut: &suite.cut, depth: cfg.depth };
    let views: Vec<TestView<'_>> = suite.tests.iter().map(TestView::new).collect();
    let mut out = Out { suite: suite_id, found: Vec::new() };

    for t in &views {
        for (line, _) in unasserted(&m, t) {
            out.push(IssueKind::Nase, t.name, vec![line], vec![], None);
        }
        narv(&m, t, &mut out);
        arpm(&m, t, &mut out);
        nna(&m, t, &mut out);
        failed_setup(&m, cfg, t, &mut out);
        tofa(&m, t, &mut out);
        ac(&m, t, &mut out);
    }

    let hits: Vec<(&str, Vec<u32>)> = views.iter().filter_map(|t| init_asserting(&m, t).map(|l| (t.name, l))).collect();
    if hits.len() >= 2 {
        for (name, lines) in &hits {
            let others = hits.iter().filter(|(n, _)| n != name).map(|(n, _)| n.to_string()).collect();
            out.push(IssueKind::Oimt, name, lines.clone(), others, None);
        }
    }
    ds(suite, &views, cfg.min_lines, &mut out);
    tses(suite, &views, &mut out);

    let mut by_method: BTreeMap<String, BTreeMap<&str, Vec<u32>>> = BTreeMap::new();
    for t in &views {
        for (line, name) in unasserted(&m, t) {
            by_method.entry(name).or_default().entry(t.name).or_default().push(line);
        }
    }
    for hits in by_method.values().filter(|h| h.len() >= 2) {
        for (name, lines) in hits {
            let others = hits.keys().filter(|n| *n != name).map(|n| n.to_string()).collect();
            out.push(IssueKind::Tsvm, name, lines.clone(), others, None);
        }
    }

    let mut found: Vec<Key> = out.found.into_iter().filter(|k| cfg.enabled.contains(&k.0)).collect();
    found.sort();
    found
}

/// Sorted comparable keys of actual findings.
pub fn actual(findings: &[IssueFinding]) -> Vec<Key> {
    let mut keys: Vec<Key> = findings.iter().map(key_of).collect();
    keys.sort();
    keys
}

/// Result type of an assigned call, for callers that need it.
pub fn result_type(s: &GStmt) -> Option<RType> {
    match s {
        GStmt::Call { assign: Some((_, ty)), .. } => Some(*ty),
        _ => None,
    }
}
