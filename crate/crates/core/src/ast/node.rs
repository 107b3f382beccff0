//! Uniform syntax tree shared by every stage of the pipeline.
//!
//! A [`Node`] is a kind plus an ordered child list. Child roles are fixed per
//! kind (see [`Kind::arity`]), so generic services (edits, distances,
//! normalization) never need to know the concrete grammar. Structural
//! equality (`==`) compares kinds and children only; spans, preorder ids and
//! inferred types are metadata.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::types::LangType;

/// Preorder index of a node within its file.
pub type NodeId = u32;

/// Id carried by nodes that were created by an edit and not yet renumbered.
pub const DETACHED: NodeId = u32::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Clone, Debug)]
pub enum Lit {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Null,
}

impl PartialEq for Lit {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Lit::Bool(a), Lit::Bool(b)) => a == b,
            (Lit::Int(a), Lit::Int(b)) => a == b,
            (Lit::Float(a), Lit::Float(b)) => a.to_bits() == b.to_bits(),
            (Lit::Str(a), Lit::Str(b)) => a == b,
            (Lit::Null, Lit::Null) => true,
            _ => false,
        }
    }
}

impl Lit {
    pub fn lang_type(&self) -> LangType {
        match self {
            Lit::Bool(_) => LangType::Boolean,
            Lit::Int(_) => LangType::Int,
            Lit::Float(_) => LangType::Float,
            Lit::Str(_) => LangType::Str,
            Lit::Null => LangType::Null,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

/// Operator classes used by operator mutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpClass {
    Arithmetic,
    Relational,
    Logical,
}

impl BinOp {
    pub const ALL: [BinOp; 13] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Div,
        BinOp::Rem,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::And,
        BinOp::Or,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Ne => 4,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
            BinOp::Add | BinOp::Sub => 6,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 7,
        }
    }

    pub fn class(self) -> OpClass {
        match self {
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Rem => OpClass::Arithmetic,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => OpClass::Relational,
            BinOp::And | BinOp::Or => OpClass::Logical,
        }
    }

    pub fn is_arithmetic(self) -> bool {
        self.class() == OpClass::Arithmetic
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnOp {
    Not,
    Neg,
}

impl UnOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnOp::Not => "!",
            UnOp::Neg => "-",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
    Div,
}

impl AssignOp {
    pub fn symbol(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
            AssignOp::Div => "/=",
        }
    }

    pub fn binop(self) -> Option<BinOp> {
        match self {
            AssignOp::Set => None,
            AssignOp::Add => Some(BinOp::Add),
            AssignOp::Sub => Some(BinOp::Sub),
            AssignOp::Mul => Some(BinOp::Mul),
            AssignOp::Div => Some(BinOp::Div),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    // declarations
    CompilationUnit,
    Class { name: String, parent: Option<String> },
    /// children: `[init?]`
    Field { ty: LangType, name: String },
    /// children: `[Param*, Block]`
    Method { ret: LangType, name: String },
    /// children: `[Param*, Block]`
    Constructor { name: String },
    Param { ty: LangType, name: String },

    // statements
    Block,
    /// children: `[init?]`
    LocalVar { ty: LangType, name: String },
    /// children: `[expr]`
    ExprStmt,
    /// children: `[target, value]`
    Assign { op: AssignOp },
    /// `x++` / `x--`; children: `[target]`
    Step { increment: bool },
    /// children: `[cond, then, else?]`
    If,
    /// children: `[cond, body]`
    While,
    /// children: `[init, cond, update, body]`; absent parts are `Empty`
    For,
    /// children: `[value?]`
    Return,
    Break,
    Continue,
    /// children: `[Block, Catch+]`
    Try,
    /// children: `[Block]`
    Catch { ty: LangType, name: String },
    Empty,

    // expressions
    Literal(Lit),
    Name(String),
    This,
    /// `recv.name`; children: `[recv]`
    Select { name: String },
    /// unqualified call on `this`; children: args
    Call { name: String },
    /// children: `[recv, args*]`
    MethodCall { name: String },
    /// `super.name(args)`; children: args
    SuperCall { name: String },
    /// children: args
    New { class: String },
    /// `new T[size]`; children: `[size]`
    NewArray { elem: LangType },
    /// `new T[]{a, b}`; children: elements
    ArrayLit { elem: LangType },
    /// children: `[array, index]`
    Index,
    /// children: `[expr]`
    Cast { ty: LangType },
    /// children: `[expr]`
    InstanceOf { ty: LangType },
    Binary { op: BinOp },
    Unary { op: UnOp },
    /// `c ? a : b`
    Conditional,
    Paren,

    /// Placeholder inside wrap templates; replaced by the wrapped statements.
    Hole,
}

/// Broad syntactic category of a kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Category {
    Declaration,
    Statement,
    Expression,
    Template,
}

impl Kind {
    pub fn category(&self) -> Category {
        use Kind::*;
        match self {
            CompilationUnit | Class { .. } | Field { .. } | Method { .. } | Constructor { .. } | Param { .. } => {
                Category::Declaration
            }
            Block | LocalVar { .. } | ExprStmt | Assign { .. } | Step { .. } | If | While | For | Return | Break
            | Continue | Try | Catch { .. } | Empty => Category::Statement,
            Hole => Category::Template,
            _ => Category::Expression,
        }
    }

    pub fn is_statement(&self) -> bool {
        self.category() == Category::Statement && !matches!(self, Kind::Catch { .. })
    }

    pub fn is_expression(&self) -> bool {
        self.category() == Category::Expression
    }

    /// Allowed child count range `(min, max)`.
    pub fn arity(&self) -> (usize, usize) {
        use Kind::*;
        const MANY: usize = usize::MAX;
        match self {
            CompilationUnit | Class { .. } | Block => (0, MANY),
            Field { .. } | LocalVar { .. } | Return => (0, 1),
            Method { .. } | Constructor { .. } => (1, MANY),
            Param { .. } | Break | Continue | Empty | Literal(_) | Name(_) | This | Hole => (0, 0),
            ExprStmt | Select { .. } | NewArray { .. } | Cast { .. } | InstanceOf { .. } | Unary { .. } | Paren
            | Step { .. } | Catch { .. } => (1, 1),
            Assign { .. } | While | Index | Binary { .. } => (2, 2),
            If => (2, 3),
            For => (4, 4),
            Try => (2, MANY),
            Call { .. } | SuperCall { .. } | New { .. } | ArrayLit { .. } => (0, MANY),
            MethodCall { .. } => (1, MANY),
            Conditional => (3, 3),
        }
    }

    /// Kinds whose children form a free list, so single children may be
    /// inserted or deleted.
    pub fn has_list_children(&self) -> bool {
        use Kind::*;
        matches!(
            self,
            CompilationUnit
                | Class { .. }
                | Block
                | Call { .. }
                | MethodCall { .. }
                | SuperCall { .. }
                | New { .. }
                | ArrayLit { .. }
        )
    }

    /// Short label used in diagnostics and descriptors.
    pub fn label(&self) -> &'static str {
        use Kind::*;
        match self {
            CompilationUnit => "compilation-unit",
            Class { .. } => "class-decl",
            Field { .. } => "field-decl",
            Method { .. } => "method-decl",
            Constructor { .. } => "constructor-decl",
            Param { .. } => "param",
            Block => "block",
            LocalVar { .. } => "variable-decl",
            ExprStmt => "expression-stmt",
            Assign { .. } => "assignment",
            Step { .. } => "step",
            If => "if",
            While => "while",
            For => "for",
            Return => "return",
            Break => "break",
            Continue => "continue",
            Try => "try",
            Catch { .. } => "catch",
            Empty => "empty",
            Literal(_) => "literal",
            Name(_) => "variable-ref",
            This => "this",
            Select { .. } => "field-access",
            Call { .. } | MethodCall { .. } | SuperCall { .. } => "method-invocation",
            New { .. } => "class-instance-creation",
            NewArray { .. } => "array-creation",
            ArrayLit { .. } => "array-literal",
            Index => "array-access",
            Cast { .. } => "cast",
            InstanceOf { .. } => "instanceof",
            Binary { .. } => "infix",
            Unary { .. } => "prefix",
            Conditional => "conditional-expr",
            Paren => "parenthesized",
            Hole => "hole",
        }
    }
}

/// Resolved target of a call or instance creation.
#[derive(Clone, Debug, PartialEq)]
pub struct Callee {
    pub owner: String,
    pub params: Vec<LangType>,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub kind: Kind,
    pub children: Vec<Node>,
    pub span: Span,
    pub id: NodeId,
    pub ty: Option<LangType>,
    pub callee: Option<Callee>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.children == other.children
    }
}

impl Node {
    pub fn new(kind: Kind, children: Vec<Node>) -> Self {
        Node { kind, children, span: Span::default(), id: DETACHED, ty: None, callee: None }
    }

    pub fn leaf(kind: Kind) -> Self {
        Node::new(kind, Vec::new())
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    pub fn with_type(mut self, ty: LangType) -> Self {
        self.ty = Some(ty);
        self
    }

    // --- small constructors used by generators and tests ---

    pub fn name(n: &str) -> Self {
        Node::leaf(Kind::Name(n.to_string()))
    }

    pub fn lit(l: Lit) -> Self {
        Node::leaf(Kind::Literal(l))
    }

    /// Integer literal; negative values become `-(n)` as the parser would.
    pub fn int(v: i64) -> Self {
        if v < 0 {
            Node::new(Kind::Unary { op: UnOp::Neg }, vec![Node::lit(Lit::Int(v.wrapping_neg()))])
        } else {
            Node::lit(Lit::Int(v))
        }
    }

    pub fn float(v: f64) -> Self {
        if v < 0.0 {
            Node::new(Kind::Unary { op: UnOp::Neg }, vec![Node::lit(Lit::Float(-v))])
        } else {
            Node::lit(Lit::Float(v))
        }
    }

    pub fn binary(op: BinOp, l: Node, r: Node) -> Self {
        Node::new(Kind::Binary { op }, vec![l, r])
    }

    pub fn not(e: Node) -> Self {
        Node::new(Kind::Unary { op: UnOp::Not }, vec![e])
    }

    pub fn block(stmts: Vec<Node>) -> Self {
        Node::new(Kind::Block, stmts)
    }

    pub fn if_then(cond: Node, then: Node) -> Self {
        Node::new(Kind::If, vec![cond, then])
    }

    pub fn ret(value: Option<Node>) -> Self {
        Node::new(Kind::Return, value.into_iter().collect())
    }

    pub fn is_statement(&self) -> bool {
        self.kind.is_statement()
    }

    pub fn is_expression(&self) -> bool {
        self.kind.is_expression()
    }

    /// Number of nodes in this subtree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Node::size).sum::<usize>()
    }

    /// Reassign preorder ids `0..N` over this subtree.
    pub fn renumber(&mut self) {
        fn go(n: &mut Node, next: &mut NodeId) {
            n.id = *next;
            *next += 1;
            for c in &mut n.children {
                go(c, next);
            }
        }
        let mut next = 0;
        go(self, &mut next);
    }

    /// Preorder traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Node)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    pub fn preorder(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        self.walk(&mut |n| out.push(n));
        out
    }

    pub fn find(&self, id: NodeId) -> Option<&Node> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(id))
    }

    pub fn find_mut(&mut self, id: NodeId) -> Option<&mut Node> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter_mut().find_map(|c| c.find_mut(id))
    }

    /// Child-index path from this node to `id`.
    pub fn path_to(&self, id: NodeId) -> Option<Vec<usize>> {
        if self.id == id {
            return Some(Vec::new());
        }
        for (i, c) in self.children.iter().enumerate() {
            if let Some(mut p) = c.path_to(id) {
                p.insert(0, i);
                return Some(p);
            }
        }
        None
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&Node> {
        let mut cur = self;
        for &i in path {
            cur = cur.children.get(i)?;
        }
        Some(cur)
    }

    pub fn at_path_mut(&mut self, path: &[usize]) -> Option<&mut Node> {
        let mut cur = self;
        for &i in path {
            cur = cur.children.get_mut(i)?;
        }
        Some(cur)
    }

    /// Whether any node in this subtree satisfies `pred`.
    pub fn any(&self, pred: &impl Fn(&Node) -> bool) -> bool {
        pred(self) || self.children.iter().any(|c| c.any(pred))
    }

    /// Whether `self` is a (direct) reference to the variable `var`.
    pub fn is_name(&self, var: &str) -> bool {
        matches!(&self.kind, Kind::Name(n) if n == var)
    }

    /// Variable names referenced anywhere in this subtree.
    pub fn referenced_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.walk(&mut |n| {
            if let Kind::Name(v) = &n.kind {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    /// Strip metadata so that the node can be spliced into another tree.
    pub fn detached(&self) -> Node {
        let mut n = self.clone();
        fn go(n: &mut Node) {
            n.id = DETACHED;
            n.span = Span::default();
            for c in &mut n.children {
                go(c);
            }
        }
        go(&mut n);
        n
    }

    /// Check every node's child count against its kind's arity.
    pub fn check_arity(&self) -> Result<(), NodeId> {
        let (lo, hi) = self.kind.arity();
        if self.children.len() < lo || self.children.len() > hi {
            return Err(self.id);
        }
        for c in &self.children {
            c.check_arity()?;
        }
        Ok(())
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::lang::printer::print_node(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renumber_is_preorder_bijection() {
        let mut t = Node::block(vec![
            Node::new(Kind::ExprStmt, vec![Node::new(Kind::Call { name: "f".into() }, vec![Node::int(1)])]),
            Node::ret(Some(Node::name("x"))),
        ]);
        t.renumber();
        let ids: Vec<NodeId> = t.preorder().iter().map(|n| n.id).collect();
        assert_eq!(ids, (0..t.size() as NodeId).collect::<Vec<_>>());
        assert_eq!(t.path_to(3), Some(vec![0, 0, 0]));
        assert!(t.find(4).unwrap().kind == Kind::Return);
    }

    #[test]
    fn structural_equality_ignores_metadata() {
        let a = Node::name("x").with_span(Span::new(1, 2)).with_type(LangType::Int);
        let b = Node::name("x");
        assert_eq!(a, b);
        assert_ne!(Node::lit(Lit::Float(0.0)), Node::lit(Lit::Float(-0.0)));
    }

    #[test]
    fn negative_literals_are_prefix_nodes() {
        let n = Node::int(-3);
        assert_eq!(n.kind, Kind::Unary { op: UnOp::Neg });
        assert_eq!(n.children[0], Node::lit(Lit::Int(3)));
    }
}
