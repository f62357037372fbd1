//! Recursive-descent parser for Java compilation units.
//!
//! The parser is tolerant at two levels. A call argument list that fails to
//! parse is split on top-level commas and each unparseable argument becomes
//! [`Expr::Unparsed`]. A statement or member that fails to parse is skipped up
//! to its terminating `;` or closing brace. Only lexical errors and unbalanced
//! class structure abort the whole unit.

use super::lexer::{tokenize, Lexed, Token, TokenKind};
use super::syntax::*;
use crate::error::SyntaxError;

type PResult<T> = Result<T, SyntaxError>;

pub fn parse_compilation_unit(src: &str) -> PResult<(CompilationUnit, Lexed)> {
    let lexed = tokenize(src)?;
    let unit = {
        let mut p = Parser::new(&lexed.tokens, 0);
        p.compilation_unit()?
    };
    Ok((unit, lexed))
}

const MODIFIERS: &[&str] = &[
    "public", "protected", "private", "static", "final", "abstract", "native", "synchronized",
    "transient", "volatile", "strictfp", "default",
];

const PRIMITIVES: &[&str] = &["boolean", "byte", "char", "short", "int", "long", "float", "double"];

pub(crate) struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    /// Index of `toks[0]` in the full token stream.
    offset: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: &'a [Token], offset: usize) -> Self {
        Self { toks, pos: 0, offset }
    }

    // ---- token helpers -------------------------------------------------

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + n)
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(text))
    }

    fn at_n(&self, n: usize, text: &str) -> bool {
        self.peek_at(n).is_some_and(|t| t.is(text))
    }

    fn at_ident(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Ident)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, text: &str) -> PResult<()> {
        if self.eat(text) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{text}`")))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok(t.text.clone())
            }
            _ => Err(self.error("expected identifier")),
        }
    }

    fn line(&self) -> u32 {
        self.peek()
            .or_else(|| self.toks.last())
            .map(|t| t.line)
            .unwrap_or(1)
    }

    fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let msg = msg.into();
        match self.peek() {
            Some(t) => SyntaxError::new(t.line, t.col, format!("{msg}, found `{}`", t.text)),
            None => {
                let (line, col) = self.toks.last().map(|t| (t.line, t.col)).unwrap_or((1, 1));
                SyntaxError::new(line, col, format!("{msg}, found end of input"))
            }
        }
    }

    fn abs(&self, pos: usize) -> usize {
        self.offset + pos
    }

    fn text_between(&self, start: usize, end: usize) -> String {
        self.toks[start..end]
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Index just past the bracket matching the opener at `open`.
    fn matching_close(&self, open: usize) -> Option<usize> {
        let mut depth = 0i32;
        for (i, t) in self.toks.iter().enumerate().skip(open) {
            if t.kind != TokenKind::Punct {
                continue;
            }
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i + 1);
                    }
                    if depth < 0 {
                        return None;
                    }
                }
                _ => {}
            }
        }
        None
    }

    fn skip_balanced(&mut self) -> PResult<()> {
        match self.matching_close(self.pos) {
            Some(end) => {
                self.pos = end;
                Ok(())
            }
            None => Err(self.error("unbalanced brackets")),
        }
    }

    fn try_parse<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let save = self.pos;
        match f(self) {
            Ok(v) => Some(v),
            Err(_) => {
                self.pos = save;
                None
            }
        }
    }

    // ---- compilation unit and declarations ----------------------------

    fn compilation_unit(&mut self) -> PResult<CompilationUnit> {
        let mut unit = CompilationUnit::default();
        if self.at("@") && !self.at_n(1, "interface") {
            // package annotations
            let save = self.pos;
            self.skip_annotations()?;
            if !self.at("package") {
                self.pos = save;
            }
        }
        if self.eat("package") {
            unit.package = Some(self.qualified_name()?);
            self.expect(";")?;
        }
        while self.peek().is_some() {
            if self.eat(";") {
                continue;
            }
            if self.at("import") {
                while !self.eat(";") {
                    if self.peek().is_none() {
                        return Err(self.error("unterminated import"));
                    }
                    self.pos += 1;
                }
                continue;
            }
            let (_, _) = self.modifiers()?;
            unit.classes.push(self.type_declaration()?);
        }
        Ok(unit)
    }

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?;
        while self.at(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident) {
            self.pos += 1;
            name.push('.');
            name.push_str(&self.ident()?);
        }
        Ok(name)
    }

    fn skip_annotations(&mut self) -> PResult<Vec<String>> {
        let mut names = Vec::new();
        while self.at("@") && !self.at_n(1, "interface") {
            self.pos += 1;
            let name = self.qualified_name()?;
            names.push(name.rsplit('.').next().unwrap_or(&name).to_string());
            if self.at("(") {
                self.skip_balanced()?;
            }
        }
        Ok(names)
    }

    /// Annotations and modifier keywords in any order.
    fn modifiers(&mut self) -> PResult<(Modifiers, Vec<String>)> {
        let mut mods = Modifiers::default();
        let mut annotations = Vec::new();
        loop {
            if self.at("@") && !self.at_n(1, "interface") {
                annotations.extend(self.skip_annotations()?);
                continue;
            }
            match self.peek() {
                Some(t) if t.kind == TokenKind::Keyword && MODIFIERS.contains(&t.text.as_str()) => {
                    // `default` starts a switch label inside method bodies but
                    // is only reached here in member position.
                    match t.text.as_str() {
                        "static" => mods.is_static = true,
                        "final" => mods.is_final = true,
                        "abstract" => mods.is_abstract = true,
                        _ => {}
                    }
                    self.pos += 1;
                }
                Some(t) if t.kind == TokenKind::Ident && (t.text == "sealed" || t.text == "non") => {
                    if t.text == "non" && self.at_n(1, "-") {
                        self.pos += 3;
                    } else if self.peek_at(1).is_some_and(|n| n.kind != TokenKind::Punct || n.text == "@") {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                _ => break,
            }
        }
        Ok((mods, annotations))
    }

    fn type_declaration(&mut self) -> PResult<ClassDecl> {
        let line = self.line();
        let kind = if self.eat("class") {
            ClassKind::Class
        } else if self.eat("interface") {
            ClassKind::Interface
        } else if self.eat("enum") {
            ClassKind::Enum
        } else if self.at("@") && self.at_n(1, "interface") {
            self.pos += 2;
            ClassKind::Annotation
        } else if self.peek().is_some_and(|t| t.kind == TokenKind::Ident && t.text == "record") {
            self.pos += 1;
            ClassKind::Record
        } else {
            return Err(self.error("expected type declaration"));
        };
        let name = self.ident()?;
        if self.at("<") {
            self.skip_type_params()?;
        }
        if kind == ClassKind::Record && self.at("(") {
            self.skip_balanced()?;
        }
        let mut superclass = None;
        if self.eat("extends") {
            let first = self.parse_type()?;
            while self.eat(",") {
                self.parse_type()?;
            }
            if kind == ClassKind::Class {
                superclass = Some(first);
            }
        }
        if self.eat("implements") {
            self.parse_type()?;
            while self.eat(",") {
                self.parse_type()?;
            }
        }
        if self.peek().is_some_and(|t| t.text == "permits") {
            self.pos += 1;
            self.parse_type()?;
            while self.eat(",") {
                self.parse_type()?;
            }
        }
        let mut decl = ClassDecl {
            name,
            kind,
            superclass,
            fields: Vec::new(),
            constructors: Vec::new(),
            methods: Vec::new(),
            initializers: Vec::new(),
            nested: Vec::new(),
            line,
        };
        self.class_body(&mut decl)?;
        Ok(decl)
    }

    fn skip_type_params(&mut self) -> PResult<()> {
        self.expect("<")?;
        let mut depth = 1;
        while depth > 0 {
            match self.peek() {
                None => return Err(self.error("unterminated type parameters")),
                Some(t) if t.is("<") => depth += 1,
                Some(t) if t.is(">") => depth -= 1,
                _ => {}
            }
            self.pos += 1;
        }
        Ok(())
    }

    fn class_body(&mut self, decl: &mut ClassDecl) -> PResult<()> {
        self.expect("{")?;
        if decl.kind == ClassKind::Enum {
            self.skip_enum_constants()?;
        }
        loop {
            if self.eat("}") {
                return Ok(());
            }
            if self.peek().is_none() {
                return Err(self.error("unterminated class body"));
            }
            let start = self.pos;
            if let Err(err) = self.member(decl) {
                // Skip the broken member; give up only if nothing can be skipped.
                self.pos = start;
                if !self.recover_member() {
                    return Err(err);
                }
            }
        }
    }

    fn skip_enum_constants(&mut self) -> PResult<()> {
        loop {
            match self.peek() {
                None => return Err(self.error("unterminated enum body")),
                Some(t) if t.is(";") => {
                    self.pos += 1;
                    return Ok(());
                }
                Some(t) if t.is("}") => return Ok(()),
                Some(t) if t.is("(") || t.is("{") || t.is("[") => self.skip_balanced()?,
                _ => self.pos += 1,
            }
        }
    }

    fn recover_member(&mut self) -> bool {
        let start = self.pos;
        let mut depth = 0i32;
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" => depth -= 1,
                    "}" => {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                        if depth == 0 {
                            self.pos += 1;
                            self.eat(";");
                            return true;
                        }
                    }
                    ";" if depth == 0 => {
                        self.pos += 1;
                        return true;
                    }
                    _ => {}
                }
            }
            self.pos += 1;
        }
        self.pos > start
    }

    fn member(&mut self, decl: &mut ClassDecl) -> PResult<()> {
        if self.eat(";") {
            return Ok(());
        }
        let line = self.line();
        let (mods, annotations) = self.modifiers()?;
        if self.at("{") {
            let body = self.block()?;
            decl.initializers.push(Initializer { is_static: mods.is_static, body });
            return Ok(());
        }
        if self.at("class")
            || self.at("interface")
            || self.at("enum")
            || (self.at("@") && self.at_n(1, "interface"))
            || (self.peek().is_some_and(|t| t.text == "record") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident))
        {
            let nested = self.type_declaration()?;
            decl.nested.push(nested);
            return Ok(());
        }
        if self.at("<") {
            self.skip_type_params()?;
        }
        // constructor
        if self.peek().is_some_and(|t| t.kind == TokenKind::Ident && t.text == decl.name) && self.at_n(1, "(") {
            let name = self.ident()?;
            let m = self.method_rest(name, None, mods, annotations, line)?;
            decl.constructors.push(m);
            return Ok(());
        }
        // compact record constructor
        if decl.kind == ClassKind::Record
            && self.peek().is_some_and(|t| t.text == decl.name)
            && self.at_n(1, "{")
        {
            self.pos += 1;
            let body = self.block()?;
            decl.constructors.push(MethodDecl {
                name: decl.name.clone(),
                modifiers: mods,
                annotations,
                return_type: None,
                params: Vec::new(),
                throws: Vec::new(),
                body: Some(body),
                line,
            });
            return Ok(());
        }
        let ty = if self.at("void") {
            self.pos += 1;
            TypeRef { name: "void".into(), text: "void".into(), dims: 0 }
        } else {
            self.parse_type()?
        };
        let name = self.ident()?;
        if self.at("(") {
            let m = self.method_rest(name, Some(ty), mods, annotations, line)?;
            decl.methods.push(m);
            return Ok(());
        }
        // field declarators
        let mut name = name;
        loop {
            let mut fty = ty.clone();
            while self.at("[") && self.at_n(1, "]") {
                self.pos += 2;
                fty.dims += 1;
                fty.text.push_str("[]");
            }
            let init = if self.eat("=") { Some(self.var_init_recovering()) } else { None };
            decl.fields.push(FieldDecl { name, ty: fty, modifiers: mods, init, line });
            if self.eat(",") {
                name = self.ident()?;
                continue;
            }
            self.expect(";")?;
            return Ok(());
        }
    }

    fn method_rest(
        &mut self,
        name: String,
        return_type: Option<TypeRef>,
        modifiers: Modifiers,
        annotations: Vec<String>,
        line: u32,
    ) -> PResult<MethodDecl> {
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.eat(")") {
            loop {
                self.modifiers()?;
                if self.at("this") {
                    // receiver parameter
                    self.pos += 1;
                } else {
                    let mut ty = self.parse_type()?;
                    if self.eat("...") {
                        ty.dims += 1;
                        ty.text.push_str("...");
                    }
                    let pname = self.ident()?;
                    while self.at("[") && self.at_n(1, "]") {
                        self.pos += 2;
                        ty.dims += 1;
                    }
                    params.push(Param { name: pname, ty });
                }
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        while self.at("[") && self.at_n(1, "]") {
            self.pos += 2;
        }
        let mut throws = Vec::new();
        if self.eat("throws") {
            throws.push(self.parse_type()?);
            while self.eat(",") {
                throws.push(self.parse_type()?);
            }
        }
        if self.eat("default") {
            // annotation member default value
            while !self.at(";") {
                if self.peek().is_none() {
                    return Err(self.error("unterminated annotation default"));
                }
                if self.at("{") || self.at("(") {
                    self.skip_balanced()?;
                } else {
                    self.pos += 1;
                }
            }
        }
        let body = if self.eat(";") { None } else { Some(self.block()?) };
        Ok(MethodDecl { name, modifiers, annotations, return_type, params, throws, body, line })
    }

    // ---- types ----------------------------------------------------------

    pub(crate) fn parse_type(&mut self) -> PResult<TypeRef> {
        self.skip_annotations()?;
        let start = self.pos;
        let mut name = match self.peek() {
            Some(t) if t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text.as_str()) => {
                self.pos += 1;
                t.text.clone()
            }
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                t.text.clone()
            }
            _ => return Err(self.error("expected type")),
        };
        let primitive = PRIMITIVES.contains(&name.as_str());
        if !primitive {
            loop {
                if self.at("<") {
                    self.type_args()?;
                }
                if self.at(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident) {
                    self.pos += 1;
                    name.push('.');
                    name.push_str(&self.ident()?);
                    continue;
                }
                break;
            }
        }
        let mut dims = 0;
        while self.at("[") && self.at_n(1, "]") {
            self.pos += 2;
            dims += 1;
        }
        let text = self.toks[start..self.pos].iter().map(|t| t.text.as_str()).collect();
        Ok(TypeRef { name, text, dims })
    }

    fn type_args(&mut self) -> PResult<()> {
        self.expect("<")?;
        if self.eat(">") {
            return Ok(()); // diamond
        }
        loop {
            self.skip_annotations()?;
            if self.eat("?") {
                if self.eat("extends") || self.eat("super") {
                    self.parse_type()?;
                    while self.eat("&") {
                        self.parse_type()?;
                    }
                }
            } else {
                self.parse_type()?;
            }
            if self.eat(">") {
                return Ok(());
            }
            self.expect(",")?;
        }
    }

    // ---- statements -----------------------------------------------------

    pub(crate) fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect("{")?;
        let mut stmts = Vec::new();
        loop {
            if self.eat("}") {
                return Ok(stmts);
            }
            if self.peek().is_none() {
                return Err(self.error("unterminated block"));
            }
            stmts.push(self.statement_recovering());
        }
    }

    fn statement_recovering(&mut self) -> Stmt {
        let start = self.pos;
        let line = self.line();
        match self.statement() {
            Ok(s) => s,
            Err(_) => {
                self.pos = start;
                self.recover_statement();
                Stmt { kind: StmtKind::Unparsed, line, span: (self.abs(start), self.abs(self.pos)) }
            }
        }
    }

    fn recover_statement(&mut self) {
        let start = self.pos;
        let mut depth = 0i32;
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" => depth = (depth - 1).max(0),
                    "}" => {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                        if depth == 0 {
                            self.pos += 1;
                            let continues = self
                                .peek()
                                .is_some_and(|n| n.is(";") || n.is(")") || n.is(",") || n.is("."));
                            if !continues {
                                return;
                            }
                            continue;
                        }
                    }
                    ";" if depth == 0 => {
                        self.pos += 1;
                        return;
                    }
                    _ => {}
                }
            }
            self.pos += 1;
        }
        if self.pos == start && self.peek().is_some() && !self.at("}") {
            self.pos += 1;
        }
    }

    fn mk(&self, kind: StmtKind, line: u32, start: usize) -> Stmt {
        Stmt { kind, line, span: (self.abs(start), self.abs(self.pos)) }
    }

    fn statement(&mut self) -> PResult<Stmt> {
        let start = self.pos;
        let line = self.line();
        let tok = match self.peek() {
            Some(t) => t,
            None => return Err(self.error("expected statement")),
        };
        if tok.kind == TokenKind::Punct {
            match tok.text.as_str() {
                "{" => {
                    let b = self.block()?;
                    return Ok(self.mk(StmtKind::Block(b), line, start));
                }
                ";" => {
                    self.pos += 1;
                    return Ok(self.mk(StmtKind::Empty, line, start));
                }
                "..." => {
                    self.pos += 1;
                    self.eat(";");
                    return Ok(self.mk(StmtKind::Ellipsis, line, start));
                }
                _ => {}
            }
        }
        if tok.kind == TokenKind::Keyword {
            match tok.text.as_str() {
                "if" => {
                    self.pos += 1;
                    let cond = self.paren_expr()?;
                    let then = Box::new(self.statement_recovering());
                    let otherwise =
                        if self.eat("else") { Some(Box::new(self.statement_recovering())) } else { None };
                    return Ok(self.mk(StmtKind::If { cond, then, otherwise }, line, start));
                }
                "while" => {
                    self.pos += 1;
                    let cond = self.paren_expr()?;
                    let body = Box::new(self.statement_recovering());
                    return Ok(self.mk(StmtKind::While { cond, body }, line, start));
                }
                "do" => {
                    self.pos += 1;
                    let body = Box::new(self.statement_recovering());
                    self.expect("while")?;
                    let cond = self.paren_expr()?;
                    self.expect(";")?;
                    return Ok(self.mk(StmtKind::DoWhile { body, cond }, line, start));
                }
                "for" => return self.for_statement(line, start),
                "try" => return self.try_statement(line, start),
                "return" => {
                    self.pos += 1;
                    let value = if self.at(";") { None } else { Some(self.expr()?) };
                    self.expect(";")?;
                    return Ok(self.mk(StmtKind::Return(value), line, start));
                }
                "throw" => {
                    self.pos += 1;
                    let value = self.expr()?;
                    self.expect(";")?;
                    return Ok(self.mk(StmtKind::Throw(value), line, start));
                }
                "break" | "continue" => {
                    let is_break = tok.text == "break";
                    self.pos += 1;
                    if self.at_ident() {
                        self.pos += 1;
                    }
                    self.expect(";")?;
                    let kind = if is_break { StmtKind::Break } else { StmtKind::Continue };
                    return Ok(self.mk(kind, line, start));
                }
                "switch" => {
                    self.pos += 1;
                    let selector = self.paren_expr()?;
                    let body = self.switch_body()?;
                    self.eat(";");
                    return Ok(self.mk(StmtKind::Switch { selector, body }, line, start));
                }
                "synchronized" if self.at_n(1, "(") => {
                    self.pos += 1;
                    let lock = self.paren_expr()?;
                    let body = self.block()?;
                    return Ok(self.mk(StmtKind::Synchronized { lock, body }, line, start));
                }
                "assert" => {
                    self.pos += 1;
                    let cond = self.expr()?;
                    if self.eat(":") {
                        self.expr()?;
                    }
                    self.expect(";")?;
                    return Ok(self.mk(StmtKind::Assert(cond), line, start));
                }
                "class" | "interface" | "enum" => {
                    self.type_declaration()?;
                    return Ok(self.mk(StmtKind::LocalClass, line, start));
                }
                _ => {}
            }
        }
        if tok.kind == TokenKind::Ident && self.at_n(1, ":") && !self.at_n(1, "::") {
            let label = tok.text.clone();
            self.pos += 2;
            let body = Box::new(self.statement_recovering());
            return Ok(self.mk(StmtKind::Labeled { label, body }, line, start));
        }
        if let Some(kind) = self.try_parse(|p| p.local_var_decl()) {
            self.expect(";")?;
            return Ok(self.mk(kind, line, start));
        }
        let e = self.expr()?;
        self.expect(";")?;
        Ok(self.mk(StmtKind::Expr(e), line, start))
    }

    /// `[final] Type name [= init] {, name [= init]}` without the trailing `;`.
    fn local_var_decl(&mut self) -> PResult<StmtKind> {
        let (_, _) = self.modifiers()?;
        if self.peek().is_some_and(|t| t.text == "var") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident) {
            self.pos += 1;
            let ty = TypeRef { name: "var".into(), text: "var".into(), dims: 0 };
            return self.declarators(ty);
        }
        let ty = self.parse_type()?;
        if !self.at_ident() {
            return Err(self.error("expected variable name"));
        }
        match self.peek_at(1) {
            Some(t) if t.is("=") || t.is(";") || t.is(",") || t.is("[") || t.is(":") => {}
            _ => return Err(self.error("not a declaration")),
        }
        self.declarators(ty)
    }

    fn declarators(&mut self, ty: TypeRef) -> PResult<StmtKind> {
        let mut vars = Vec::new();
        loop {
            let name = self.ident()?;
            while self.at("[") && self.at_n(1, "]") {
                self.pos += 2;
            }
            let init = if self.eat("=") { Some(self.var_init()?) } else { None };
            vars.push(VarDecl { name, init });
            if !self.eat(",") {
                break;
            }
        }
        Ok(StmtKind::LocalVar { ty, vars })
    }

    fn var_init(&mut self) -> PResult<Expr> {
        if self.at("{") {
            self.array_init()
        } else {
            self.expr()
        }
    }

    fn var_init_recovering(&mut self) -> Expr {
        let start = self.pos;
        if let Some(e) = self.try_parse(|p| {
            let e = p.var_init()?;
            if p.at(";") || p.at(",") {
                Ok(e)
            } else {
                Err(p.error("expected end of initializer"))
            }
        }) {
            return e;
        }
        let mut depth = 0i32;
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => depth -= 1,
                    ";" | "," if depth <= 0 => break,
                    _ => {}
                }
            }
            self.pos += 1;
        }
        Expr::Unparsed(self.text_between(start, self.pos))
    }

    fn array_init(&mut self) -> PResult<Expr> {
        self.expect("{")?;
        let mut items = Vec::new();
        loop {
            if self.eat("}") {
                return Ok(Expr::ArrayInit(items));
            }
            items.push(self.var_init()?);
            if !self.eat(",") {
                self.expect("}")?;
                return Ok(Expr::ArrayInit(items));
            }
        }
    }

    fn paren_expr(&mut self) -> PResult<Expr> {
        self.expect("(")?;
        let e = self.expr()?;
        self.expect(")")?;
        Ok(e)
    }

    fn for_statement(&mut self, line: u32, start: usize) -> PResult<Stmt> {
        self.expect("for")?;
        self.expect("(")?;
        // for-each
        let save = self.pos;
        if let Ok((ty, name)) = (|| -> PResult<(TypeRef, String)> {
            self.modifiers()?;
            let ty = if self.peek().is_some_and(|t| t.text == "var") {
                self.pos += 1;
                TypeRef { name: "var".into(), text: "var".into(), dims: 0 }
            } else {
                self.parse_type()?
            };
            let name = self.ident()?;
            self.expect(":")?;
            Ok((ty, name))
        })() {
            let iterable = self.expr()?;
            self.expect(")")?;
            let body = Box::new(self.statement_recovering());
            return Ok(self.mk(StmtKind::ForEach { ty, name, iterable, body }, line, start));
        }
        self.pos = save;
        let mut init = Vec::new();
        if !self.at(";") {
            let istart = self.pos;
            let iline = self.line();
            if let Some(kind) = self.try_parse(|p| p.local_var_decl()) {
                init.push(self.mk(kind, iline, istart));
            } else {
                loop {
                    let s = self.pos;
                    let e = self.expr()?;
                    init.push(self.mk(StmtKind::Expr(e), iline, s));
                    if !self.eat(",") {
                        break;
                    }
                }
            }
        }
        self.expect(";")?;
        let cond = if self.at(";") { None } else { Some(self.expr()?) };
        self.expect(";")?;
        let mut update = Vec::new();
        if !self.at(")") {
            loop {
                update.push(self.expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        let body = Box::new(self.statement_recovering());
        Ok(self.mk(StmtKind::For { init, cond, update, body }, line, start))
    }

    fn try_statement(&mut self, line: u32, start: usize) -> PResult<Stmt> {
        self.expect("try")?;
        let mut resources = Vec::new();
        if self.eat("(") {
            loop {
                if self.eat(")") {
                    break;
                }
                let rstart = self.pos;
                let rline = self.line();
                let kind = match self.try_parse(|p| p.local_var_decl()) {
                    Some(k) => k,
                    None => StmtKind::Expr(self.expr()?),
                };
                resources.push(self.mk(kind, rline, rstart));
                if !self.eat(";") {
                    self.expect(")")?;
                    break;
                }
            }
        }
        let body = self.block()?;
        let mut catches = Vec::new();
        while self.eat("catch") {
            self.expect("(")?;
            self.modifiers()?;
            let mut types = vec![self.parse_type()?];
            while self.eat("|") {
                types.push(self.parse_type()?);
            }
            let var = self.ident()?;
            self.expect(")")?;
            let bstart = self.pos;
            let cbody = self.block()?;
            catches.push(CatchClause {
                types,
                var,
                body: cbody,
                block_span: (self.abs(bstart), self.abs(self.pos)),
            });
        }
        let finally = if self.eat("finally") { Some(self.block()?) } else { None };
        if catches.is_empty() && finally.is_none() && resources.is_empty() {
            return Err(self.error("try without catch or finally"));
        }
        Ok(self.mk(StmtKind::Try { resources, body, catches, finally }, line, start))
    }

    fn switch_body(&mut self) -> PResult<Vec<Stmt>> {
        self.expect("{")?;
        let mut stmts = Vec::new();
        loop {
            if self.eat("}") {
                return Ok(stmts);
            }
            if self.peek().is_none() {
                return Err(self.error("unterminated switch"));
            }
            if self.at("case") || (self.at("default") && (self.at_n(1, ":") || self.at_n(1, "->"))) {
                self.pos += 1;
                let mut depth = 0i32;
                let arrow = loop {
                    match self.peek() {
                        None => return Err(self.error("unterminated case label")),
                        Some(t) if depth == 0 && t.is(":") => break false,
                        Some(t) if depth == 0 && t.is("->") => break true,
                        Some(t) if t.is("(") || t.is("[") || t.is("{") => depth += 1,
                        Some(t) if t.is(")") || t.is("]") || t.is("}") => depth -= 1,
                        _ => {}
                    }
                    self.pos += 1;
                };
                self.pos += 1;
                if arrow {
                    let s = self.pos;
                    let l = self.line();
                    if self.at("{") || self.at("throw") {
                        stmts.push(self.statement_recovering());
                    } else {
                        let e = self.expr()?;
                        self.expect(";")?;
                        stmts.push(self.mk(StmtKind::Expr(e), l, s));
                    }
                }
                continue;
            }
            stmts.push(self.statement_recovering());
        }
    }

    // ---- expressions ----------------------------------------------------

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        if let Some(lambda) = self.try_lambda()? {
            return Ok(lambda);
        }
        let lhs = self.conditional()?;
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Punct
                && matches!(
                    t.text.as_str(),
                    "=" | "+=" | "-=" | "*=" | "/=" | "%=" | "&=" | "|=" | "^=" | "<<=" | ">>=" | ">>>="
                )
            {
                let op = t.text.clone();
                self.pos += 1;
                let value = self.expr()?;
                return Ok(Expr::Assign { op, target: Box::new(lhs), value: Box::new(value) });
            }
            // `>` `>=` glued into `>>=`
            if t.is(">") && t.joined && self.at_n(1, ">=") {
                self.pos += 2;
                let value = self.expr()?;
                return Ok(Expr::Assign { op: ">>=".into(), target: Box::new(lhs), value: Box::new(value) });
            }
        }
        Ok(lhs)
    }

    fn try_lambda(&mut self) -> PResult<Option<Expr>> {
        let params = if self.at_ident() && self.at_n(1, "->") {
            let p = self.ident()?;
            vec![p]
        } else if self.at("(") {
            let close = match self.matching_close(self.pos) {
                Some(c) => c,
                None => return Ok(None),
            };
            if !self.toks.get(close).is_some_and(|t| t.is("->")) {
                return Ok(None);
            }
            let params = self.toks[self.pos + 1..close - 1]
                .iter()
                .enumerate()
                .filter(|(i, t)| {
                    t.kind == TokenKind::Ident
                        && self.toks
                            .get(self.pos + 1 + i + 1)
                            .is_none_or(|n| n.is(",") || n.is(")"))
                })
                .map(|(_, t)| t.text.clone())
                .collect();
            self.pos = close;
            params
        } else {
            return Ok(None);
        };
        self.expect("->")?;
        let body = if self.at("{") { LambdaBody::Block(self.block()?) } else { LambdaBody::Expr(self.expr()?) };
        Ok(Some(Expr::Lambda { params, body: Box::new(body) }))
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let cond = self.binary(0)?;
        if self.eat("?") {
            let then = if let Some(l) = self.try_lambda()? { l } else { self.conditional()? };
            self.expect(":")?;
            let otherwise = if let Some(l) = self.try_lambda()? { l } else { self.conditional()? };
            return Ok(Expr::Conditional {
                cond: Box::new(cond),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            });
        }
        Ok(cond)
    }

    /// Current binary operator with its precedence and token width.
    fn binary_op(&self) -> Option<(String, u8, usize)> {
        let t = self.peek()?;
        if t.kind == TokenKind::Keyword && t.text == "instanceof" {
            return Some(("instanceof".into(), 7, 1));
        }
        if t.kind != TokenKind::Punct {
            return None;
        }
        if t.text == ">" && t.joined && self.at_n(1, ">") {
            let second = self.peek_at(1)?;
            if second.joined && self.at_n(2, ">") {
                if self.peek_at(2).is_some_and(|x| x.joined && (x.is("=") || x.is(">="))) {
                    return None;
                }
                return Some((">>>".into(), 8, 3));
            }
            if second.joined && self.at_n(2, "=") {
                return None;
            }
            return Some((">>".into(), 8, 2));
        }
        if t.text == ">" && t.joined && self.at_n(1, ">=") {
            return None;
        }
        let prec = match t.text.as_str() {
            "||" => 0,
            "&&" => 1,
            "|" => 2,
            "^" => 3,
            "&" => 4,
            "==" | "!=" => 5,
            "<" | ">" | "<=" | ">=" => 7,
            "<<" => 8,
            "+" | "-" => 9,
            "*" | "/" | "%" => 10,
            _ => return None,
        };
        Some((t.text.clone(), prec, 1))
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some((op, prec, width)) = self.binary_op() {
            if prec < min_prec {
                break;
            }
            self.pos += width;
            if op == "instanceof" {
                self.eat("final");
                let ty = self.parse_type()?;
                if self.at_ident() {
                    self.pos += 1; // pattern binding
                }
                lhs = Expr::InstanceOf { expr: Box::new(lhs), ty };
                continue;
            }
            let rhs = self.binary(prec + 1)?;
            lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Punct {
                match t.text.as_str() {
                    "+" | "-" | "!" | "~" | "++" | "--" => {
                        let op = t.text.clone();
                        self.pos += 1;
                        let e = self.unary()?;
                        return Ok(Expr::Unary { op, expr: Box::new(e), postfix: false });
                    }
                    "(" => {
                        if let Some(cast) = self.try_cast()? {
                            return Ok(cast);
                        }
                    }
                    _ => {}
                }
            }
        }
        let mut e = self.postfix_primary()?;
        while self.at("++") || self.at("--") {
            let op = self.peek().map(|t| t.text.clone()).unwrap_or_default();
            self.pos += 1;
            e = Expr::Unary { op, expr: Box::new(e), postfix: true };
        }
        Ok(e)
    }

    fn try_cast(&mut self) -> PResult<Option<Expr>> {
        let save = self.pos;
        self.pos += 1;
        let ty = match self.parse_type() {
            Ok(ty) => ty,
            Err(_) => {
                self.pos = save;
                return Ok(None);
            }
        };
        while self.eat("&") {
            if self.parse_type().is_err() {
                self.pos = save;
                return Ok(None);
            }
        }
        if !self.eat(")") {
            self.pos = save;
            return Ok(None);
        }
        let next_ok = match self.peek() {
            None => false,
            Some(t) => match t.kind {
                TokenKind::Ident
                | TokenKind::IntLit
                | TokenKind::LongLit
                | TokenKind::FloatLit
                | TokenKind::DoubleLit
                | TokenKind::CharLit
                | TokenKind::StringLit => true,
                TokenKind::Keyword => {
                    matches!(t.text.as_str(), "this" | "super" | "new" | "true" | "false" | "null" | "switch")
                        || PRIMITIVES.contains(&t.text.as_str())
                }
                TokenKind::Punct => {
                    matches!(t.text.as_str(), "(" | "!" | "~")
                        || (ty.is_primitive() && matches!(t.text.as_str(), "+" | "-" | "++" | "--"))
                }
            },
        };
        if !next_ok {
            self.pos = save;
            return Ok(None);
        }
        let expr = if let Some(l) = self.try_lambda()? { l } else { self.unary()? };
        Ok(Some(Expr::Cast { ty, expr: Box::new(expr) }))
    }

    fn postfix_primary(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            if self.at(".") {
                self.pos += 1;
                if self.at("<") {
                    self.type_args()?;
                }
                if self.eat("new") {
                    let (ty, args, anonymous_body) = self.class_creator()?;
                    e = Expr::New { ty, args, anonymous_body };
                    continue;
                }
                if self.eat("class") {
                    e = Expr::ClassLit(expr_to_type(&e).ok_or_else(|| self.error("bad class literal"))?);
                    continue;
                }
                if self.eat("this") {
                    e = Expr::This;
                    continue;
                }
                if self.eat("super") {
                    e = Expr::Super;
                    continue;
                }
                let name = self.ident()?;
                if self.at("(") {
                    let args = self.arguments()?;
                    e = Expr::Call { target: Some(Box::new(e)), name, args };
                } else {
                    e = Expr::Field { target: Box::new(e), name };
                }
                continue;
            }
            if self.at("[") {
                if self.at_n(1, "]") {
                    // `Foo[].class`
                    let mut ty = expr_to_type(&e).ok_or_else(|| self.error("bad array type"))?;
                    while self.at("[") && self.at_n(1, "]") {
                        self.pos += 2;
                        ty.dims += 1;
                        ty.text.push_str("[]");
                    }
                    self.expect(".")?;
                    self.expect("class")?;
                    e = Expr::ClassLit(ty);
                    continue;
                }
                self.pos += 1;
                let index = self.expr()?;
                self.expect("]")?;
                e = Expr::Index { target: Box::new(e), index: Box::new(index) };
                continue;
            }
            if self.at("::") {
                self.pos += 1;
                let name = if self.eat("new") { "new".to_string() } else { self.ident()? };
                e = Expr::MethodRef { target: Box::new(e), name };
                continue;
            }
            return Ok(e);
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = match self.peek() {
            Some(t) => t,
            None => return Err(self.error("expected expression")),
        };
        let lit = |kind: LitKind| Expr::Literal { kind, text: t.text.clone() };
        let e = match t.kind {
            TokenKind::IntLit => lit(LitKind::Int),
            TokenKind::LongLit => lit(LitKind::Long),
            TokenKind::FloatLit => lit(LitKind::Float),
            TokenKind::DoubleLit => lit(LitKind::Double),
            TokenKind::CharLit => lit(LitKind::Char),
            TokenKind::StringLit => lit(LitKind::String),
            TokenKind::Ident => {
                self.pos += 1;
                let name = t.text.clone();
                if self.at("(") {
                    let args = self.arguments()?;
                    return Ok(Expr::Call { target: None, name, args });
                }
                return Ok(Expr::Name(name));
            }
            TokenKind::Keyword => match t.text.as_str() {
                "true" | "false" => lit(LitKind::Bool),
                "null" => lit(LitKind::Null),
                "this" => {
                    self.pos += 1;
                    if self.at("(") {
                        let args = self.arguments()?;
                        return Ok(Expr::Call { target: None, name: "this".into(), args });
                    }
                    return Ok(Expr::This);
                }
                "super" => {
                    self.pos += 1;
                    if self.at("(") {
                        let args = self.arguments()?;
                        return Ok(Expr::Call { target: None, name: "super".into(), args });
                    }
                    return Ok(Expr::Super);
                }
                "new" => {
                    self.pos += 1;
                    return self.creator();
                }
                "switch" => {
                    let start = self.pos;
                    self.pos += 1;
                    if self.at("(") {
                        self.skip_balanced()?;
                    }
                    if self.at("{") {
                        self.skip_balanced()?;
                    }
                    return Ok(Expr::Unparsed(self.text_between(start, self.pos)));
                }
                "void" => {
                    self.pos += 1;
                    self.expect(".")?;
                    self.expect("class")?;
                    return Ok(Expr::ClassLit(TypeRef { name: "void".into(), text: "void".into(), dims: 0 }));
                }
                k if PRIMITIVES.contains(&k) => {
                    let ty = self.parse_type()?;
                    self.expect(".")?;
                    self.expect("class")?;
                    return Ok(Expr::ClassLit(ty));
                }
                _ => return Err(self.error("unexpected keyword")),
            },
            TokenKind::Punct => match t.text.as_str() {
                "(" => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    self.expect(")")?;
                    return Ok(Expr::Paren(Box::new(inner)));
                }
                "{" => return self.array_init(),
                _ => return Err(self.error("expected expression")),
            },
        };
        self.pos += 1;
        Ok(e)
    }

    /// After `new`.
    fn creator(&mut self) -> PResult<Expr> {
        self.skip_annotations()?;
        let start = self.pos;
        // element type without dimensions
        let name = match self.peek() {
            Some(t) if t.kind == TokenKind::Keyword && PRIMITIVES.contains(&t.text.as_str()) => {
                self.pos += 1;
                t.text.clone()
            }
            _ => {
                let mut name = self.ident()?;
                loop {
                    if self.at("<") {
                        self.type_args()?;
                    }
                    if self.at(".") && self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident) {
                        self.pos += 1;
                        name.push('.');
                        name.push_str(&self.ident()?);
                        continue;
                    }
                    break;
                }
                name
            }
        };
        let base_text: String = self.toks[start..self.pos].iter().map(|t| t.text.as_str()).collect();
        if self.at("[") {
            let mut dims = Vec::new();
            let mut ndims = 0;
            while self.at("[") {
                self.pos += 1;
                ndims += 1;
                if self.eat("]") {
                    continue;
                }
                dims.push(self.expr()?);
                self.expect("]")?;
            }
            let init = if self.at("{") {
                match self.array_init()? {
                    Expr::ArrayInit(items) => Some(items),
                    _ => None,
                }
            } else {
                None
            };
            let text = format!("{base_text}{}", "[]".repeat(ndims));
            return Ok(Expr::NewArray { ty: TypeRef { name, text, dims: ndims }, dims, init });
        }
        let ty = TypeRef { name, text: base_text, dims: 0 };
        let args = self.arguments()?;
        let anonymous_body = if self.at("{") {
            self.skip_balanced()?;
            true
        } else {
            false
        };
        Ok(Expr::New { ty, args, anonymous_body })
    }

    /// After `outer.new`.
    fn class_creator(&mut self) -> PResult<(TypeRef, Vec<Expr>, bool)> {
        let ty = self.parse_type()?;
        let args = self.arguments()?;
        let anonymous_body = if self.at("{") {
            self.skip_balanced()?;
            true
        } else {
            false
        };
        Ok((ty, args, anonymous_body))
    }

    /// Parses `( args )`. If the list does not parse, each top-level
    /// comma-separated segment is parsed on its own and unparseable segments
    /// become [`Expr::Unparsed`].
    fn arguments(&mut self) -> PResult<Vec<Expr>> {
        if !self.at("(") {
            return Err(self.error("expected `(`"));
        }
        let open = self.pos;
        let parsed = self.try_parse(|p| {
            p.expect("(")?;
            let mut args = Vec::new();
            if p.eat(")") {
                return Ok(args);
            }
            loop {
                args.push(p.expr()?);
                if p.eat(")") {
                    return Ok(args);
                }
                p.expect(",")?;
            }
        });
        if let Some(args) = parsed {
            return Ok(args);
        }
        let close = self.matching_close(open).ok_or_else(|| self.error("unbalanced argument list"))?;
        let inner_start = open + 1;
        let inner_end = close - 1;
        let mut segments = Vec::new();
        let mut depth = 0i32;
        let mut seg_start = inner_start;
        for i in inner_start..inner_end {
            let t = &self.toks[i];
            if t.kind != TokenKind::Punct {
                continue;
            }
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                "," if depth == 0 => {
                    segments.push((seg_start, i));
                    seg_start = i + 1;
                }
                _ => {}
            }
        }
        if seg_start < inner_end || !segments.is_empty() {
            segments.push((seg_start, inner_end));
        }
        let args = segments
            .into_iter()
            .map(|(a, b)| {
                let mut sub = Parser::new(&self.toks[a..b], self.offset + a);
                match sub.expr() {
                    Ok(e) if sub.pos == b - a => e,
                    _ => Expr::Unparsed(self.text_between(a, b)),
                }
            })
            .collect();
        self.pos = close;
        Ok(args)
    }
}

/// Reinterprets a `Name`/`Field` chain as a type, for class literals.
fn expr_to_type(e: &Expr) -> Option<TypeRef> {
    fn chain(e: &Expr) -> Option<String> {
        match e {
            Expr::Name(n) => Some(n.clone()),
            Expr::Field { target, name } => Some(format!("{}.{name}", chain(target)?)),
            _ => None,
        }
    }
    let name = chain(e)?;
    Some(TypeRef { text: name.clone(), name, dims: 0 })
}
