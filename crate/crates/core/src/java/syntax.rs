//! Concrete syntax tree for the Java subset handled by [`super::parser`].

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    /// Dotted name without type arguments, e.g. `java.util.List`.
    pub name: String,
    /// Source text with type arguments and dimensions, whitespace removed.
    pub text: String,
    pub dims: usize,
}

impl TypeRef {
    pub fn simple_name(&self) -> &str {
        self.name.rsplit('.').next().unwrap_or(&self.name)
    }

    pub fn is_primitive(&self) -> bool {
        self.dims == 0
            && matches!(
                self.name.as_str(),
                "boolean" | "byte" | "char" | "short" | "int" | "long" | "float" | "double"
            )
    }

    pub fn is_void(&self) -> bool {
        self.name == "void" && self.dims == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LitKind {
    Int,
    Long,
    Float,
    Double,
    Char,
    String,
    Bool,
    Null,
}

impl LitKind {
    pub fn java_type(self) -> &'static str {
        match self {
            LitKind::Int => "int",
            LitKind::Long => "long",
            LitKind::Float => "float",
            LitKind::Double => "double",
            LitKind::Char => "char",
            LitKind::String => "String",
            LitKind::Bool => "boolean",
            LitKind::Null => "null",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaBody {
    Expr(Expr),
    Block(Vec<Stmt>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Name(String),
    Literal { kind: LitKind, text: String },
    This,
    Super,
    Field { target: Box<Expr>, name: String },
    Call { target: Option<Box<Expr>>, name: String, args: Vec<Expr> },
    New { ty: TypeRef, args: Vec<Expr>, anonymous_body: bool },
    NewArray { ty: TypeRef, dims: Vec<Expr>, init: Option<Vec<Expr>> },
    ArrayInit(Vec<Expr>),
    Cast { ty: TypeRef, expr: Box<Expr> },
    Paren(Box<Expr>),
    Unary { op: String, expr: Box<Expr>, postfix: bool },
    Binary { op: String, lhs: Box<Expr>, rhs: Box<Expr> },
    Assign { op: String, target: Box<Expr>, value: Box<Expr> },
    Conditional { cond: Box<Expr>, then: Box<Expr>, otherwise: Box<Expr> },
    Index { target: Box<Expr>, index: Box<Expr> },
    InstanceOf { expr: Box<Expr>, ty: TypeRef },
    ClassLit(TypeRef),
    Lambda { params: Vec<String>, body: Box<LambdaBody> },
    MethodRef { target: Box<Expr>, name: String },
    /// Token text of an argument or initializer that could not be parsed.
    Unparsed(String),
}

impl Expr {
    /// Strips parentheses and casts.
    pub fn peeled(&self) -> &Expr {
        match self {
            Expr::Paren(e) | Expr::Cast { expr: e, .. } => e.peeled(),
            other => other,
        }
    }

    /// Visits this expression and every sub-expression, pre-order. Lambda
    /// bodies are not entered.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Field { target, .. } => target.walk(f),
            Expr::Call { target, args, .. } => {
                if let Some(t) = target {
                    t.walk(f);
                }
                args.iter().for_each(|a| a.walk(f));
            }
            Expr::New { args, .. } => args.iter().for_each(|a| a.walk(f)),
            Expr::NewArray { dims, init, .. } => {
                dims.iter().for_each(|a| a.walk(f));
                if let Some(init) = init {
                    init.iter().for_each(|a| a.walk(f));
                }
            }
            Expr::ArrayInit(items) => items.iter().for_each(|a| a.walk(f)),
            Expr::Cast { expr, .. } | Expr::Paren(expr) | Expr::Unary { expr, .. } => expr.walk(f),
            Expr::InstanceOf { expr, .. } => expr.walk(f),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            Expr::Assign { target, value, .. } => {
                target.walk(f);
                value.walk(f);
            }
            Expr::Conditional { cond, then, otherwise } => {
                cond.walk(f);
                then.walk(f);
                otherwise.walk(f);
            }
            Expr::Index { target, index } => {
                target.walk(f);
                index.walk(f);
            }
            Expr::MethodRef { target, .. } => target.walk(f),
            Expr::Name(_)
            | Expr::Literal { .. }
            | Expr::This
            | Expr::Super
            | Expr::ClassLit(_)
            | Expr::Lambda { .. }
            | Expr::Unparsed(_) => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatchClause {
    pub types: Vec<TypeRef>,
    pub var: String,
    pub body: Vec<Stmt>,
    /// Token range of the catch block, braces included.
    pub block_span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    LocalVar { ty: TypeRef, vars: Vec<VarDecl> },
    Expr(Expr),
    Block(Vec<Stmt>),
    If { cond: Expr, then: Box<Stmt>, otherwise: Option<Box<Stmt>> },
    While { cond: Expr, body: Box<Stmt> },
    DoWhile { body: Box<Stmt>, cond: Expr },
    For { init: Vec<Stmt>, cond: Option<Expr>, update: Vec<Expr>, body: Box<Stmt> },
    ForEach { ty: TypeRef, name: String, iterable: Expr, body: Box<Stmt> },
    Return(Option<Expr>),
    Throw(Expr),
    Try {
        resources: Vec<Stmt>,
        body: Vec<Stmt>,
        catches: Vec<CatchClause>,
        finally: Option<Vec<Stmt>>,
    },
    Switch { selector: Expr, body: Vec<Stmt> },
    Synchronized { lock: Expr, body: Vec<Stmt> },
    Labeled { label: String, body: Box<Stmt> },
    Assert(Expr),
    Break,
    Continue,
    Empty,
    LocalClass,
    /// A bare `...` standing in for elided code.
    Ellipsis,
    /// A statement the parser skipped during error recovery.
    Unparsed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: u32,
    /// Half-open token range `[start, end)` in the compilation unit.
    pub span: (usize, usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Modifiers {
    pub is_static: bool,
    pub is_final: bool,
    pub is_abstract: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: TypeRef,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    pub ty: TypeRef,
    pub modifiers: Modifiers,
    pub init: Option<Expr>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub name: String,
    pub modifiers: Modifiers,
    pub annotations: Vec<String>,
    /// `None` for constructors.
    pub return_type: Option<TypeRef>,
    pub params: Vec<Param>,
    pub throws: Vec<TypeRef>,
    pub body: Option<Vec<Stmt>>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Initializer {
    pub is_static: bool,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Class,
    Interface,
    Enum,
    Record,
    Annotation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDecl {
    pub name: String,
    pub kind: ClassKind,
    pub superclass: Option<TypeRef>,
    pub fields: Vec<FieldDecl>,
    pub constructors: Vec<MethodDecl>,
    pub methods: Vec<MethodDecl>,
    pub initializers: Vec<Initializer>,
    pub nested: Vec<ClassDecl>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompilationUnit {
    pub package: Option<String>,
    pub classes: Vec<ClassDecl>,
}
