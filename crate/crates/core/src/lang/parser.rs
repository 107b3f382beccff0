//! Recursive-descent parser producing the uniform [`Node`] tree.

use crate::ast::{AssignOp, BinOp, Kind, Lit, Node, Span, UnOp};

use super::lexer::{tokenize, Tok, Token};
use super::types::LangType;
use super::SyntaxError;

/// Parse a compilation unit. The returned tree is renumbered in preorder.
pub fn parse(text: &str) -> Result<Node, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { text, toks: tokens, pos: 0 };
    let mut unit = p.unit()?;
    unit.renumber();
    Ok(unit)
}

/// Parse a single expression (used by tests and templates).
pub fn parse_expr(text: &str) -> Result<Node, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { text, toks: tokens, pos: 0 };
    let mut e = p.expr()?;
    p.expect_eof()?;
    e.renumber();
    Ok(e)
}

/// Parse a single statement.
pub fn parse_stmt(text: &str) -> Result<Node, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { text, toks: tokens, pos: 0 };
    let mut s = p.stmt()?;
    p.expect_eof()?;
    s.renumber();
    Ok(s)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn start(&self) -> usize {
        self.toks[self.pos].span.start
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn span_from(&self, start: usize) -> Span {
        Span::new(start, self.prev_end().max(start))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(q) if *q == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, msg: &str) -> SyntaxError {
        SyntaxError::at(self.text, self.start(), msg)
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        self.error(&format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), SyntaxError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{p}`")))
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    // ---------------------------------------------------------------- decls

    fn unit(&mut self) -> Result<Node, SyntaxError> {
        let start = self.start();
        let mut classes = Vec::new();
        while *self.peek() != Tok::Eof {
            classes.push(self.class_decl()?);
        }
        Ok(Node::new(Kind::CompilationUnit, classes).with_span(Span::new(start.min(self.text.len()), self.text.len())))
    }

    fn class_decl(&mut self) -> Result<Node, SyntaxError> {
        let start = self.start();
        if !self.eat_kw("class") {
            return Err(self.unexpected("`class`"));
        }
        let name = self.ident()?;
        let parent = if self.eat_kw("extends") { Some(self.ident()?) } else { None };
        self.expect_punct("{")?;
        let mut members = Vec::new();
        while !self.is_punct("}") {
            if *self.peek() == Tok::Eof {
                return Err(self.unexpected("`}`"));
            }
            members.push(self.member(&name)?);
        }
        self.expect_punct("}")?;
        Ok(Node::new(Kind::Class { name, parent }, members).with_span(self.span_from(start)))
    }

    fn member(&mut self, class: &str) -> Result<Node, SyntaxError> {
        let start = self.start();
        if matches!(self.peek(), Tok::Ident(n) if n == class) && matches!(self.peek_at(1), Tok::Punct("(")) {
            self.bump();
            let mut children = self.params()?;
            children.push(self.block()?);
            return Ok(Node::new(Kind::Constructor { name: class.to_string() }, children).with_span(self.span_from(start)));
        }
        let ty = self.type_name()?;
        let name = self.ident()?;
        if self.is_punct("(") {
            let mut children = self.params()?;
            children.push(self.block()?);
            return Ok(Node::new(Kind::Method { ret: ty, name }, children).with_span(self.span_from(start)));
        }
        if ty == LangType::Void {
            return Err(SyntaxError::at(self.text, start, "field cannot have type void"));
        }
        let init = if self.eat_punct("=") { vec![self.expr()?] } else { vec![] };
        self.expect_punct(";")?;
        Ok(Node::new(Kind::Field { ty, name }, init).with_span(self.span_from(start)))
    }

    fn params(&mut self) -> Result<Vec<Node>, SyntaxError> {
        self.expect_punct("(")?;
        let mut out = Vec::new();
        if !self.is_punct(")") {
            loop {
                let start = self.start();
                let ty = self.type_name()?;
                let name = self.ident()?;
                out.push(Node::leaf(Kind::Param { ty, name }).with_span(self.span_from(start)));
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(out)
    }

    fn type_name(&mut self) -> Result<LangType, SyntaxError> {
        let base = match self.peek().clone() {
            Tok::Kw("int") => LangType::Int,
            Tok::Kw("float") => LangType::Float,
            Tok::Kw("boolean") => LangType::Boolean,
            Tok::Kw("void") => LangType::Void,
            Tok::Ident(s) => LangType::from_source(&s),
            _ => return Err(self.unexpected("type")),
        };
        self.bump();
        let mut ty = base;
        while self.is_punct("[") && matches!(self.peek_at(1), Tok::Punct("]")) {
            self.bump();
            self.bump();
            ty = LangType::array_of(ty);
        }
        Ok(ty)
    }

    // ----------------------------------------------------------- statements

    fn block(&mut self) -> Result<Node, SyntaxError> {
        let start = self.start();
        self.expect_punct("{")?;
        let mut stmts = Vec::new();
        while !self.is_punct("}") {
            if *self.peek() == Tok::Eof {
                return Err(self.unexpected("`}`"));
            }
            stmts.push(self.stmt()?);
        }
        self.expect_punct("}")?;
        Ok(Node::block(stmts).with_span(self.span_from(start)))
    }

    /// Does a local variable declaration start here?
    fn at_local_decl(&self) -> bool {
        match self.peek() {
            Tok::Kw("int") | Tok::Kw("float") | Tok::Kw("boolean") => true,
            Tok::Ident(_) => match self.peek_at(1) {
                Tok::Ident(_) => true,
                Tok::Punct("[") => matches!(self.peek_at(2), Tok::Punct("]")),
                _ => false,
            },
            _ => false,
        }
    }

    fn stmt(&mut self) -> Result<Node, SyntaxError> {
        let start = self.start();
        if self.is_punct("{") {
            return self.block();
        }
        if self.eat_punct(";") {
            return Ok(Node::leaf(Kind::Empty).with_span(self.span_from(start)));
        }
        if self.eat_kw("if") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let then = self.stmt()?;
            let mut children = vec![cond, then];
            if self.eat_kw("else") {
                children.push(self.stmt()?);
            }
            return Ok(Node::new(Kind::If, children).with_span(self.span_from(start)));
        }
        if self.eat_kw("while") {
            self.expect_punct("(")?;
            let cond = self.expr()?;
            self.expect_punct(")")?;
            let body = self.stmt()?;
            return Ok(Node::new(Kind::While, vec![cond, body]).with_span(self.span_from(start)));
        }
        if self.eat_kw("for") {
            self.expect_punct("(")?;
            let init = if self.is_punct(";") {
                Node::leaf(Kind::Empty).with_span(Span::new(self.start(), self.start()))
            } else if self.at_local_decl() {
                self.local_decl()?
            } else {
                self.simple_stmt()?
            };
            self.expect_punct(";")?;
            let cond = if self.is_punct(";") {
                Node::leaf(Kind::Empty).with_span(Span::new(self.start(), self.start()))
            } else {
                self.expr()?
            };
            self.expect_punct(";")?;
            let update = if self.is_punct(")") {
                Node::leaf(Kind::Empty).with_span(Span::new(self.start(), self.start()))
            } else {
                self.simple_stmt()?
            };
            self.expect_punct(")")?;
            let body = self.stmt()?;
            return Ok(Node::new(Kind::For, vec![init, cond, update, body]).with_span(self.span_from(start)));
        }
        if self.eat_kw("return") {
            let value = if self.is_punct(";") { vec![] } else { vec![self.expr()?] };
            self.expect_punct(";")?;
            return Ok(Node::new(Kind::Return, value).with_span(self.span_from(start)));
        }
        if self.eat_kw("break") {
            self.expect_punct(";")?;
            return Ok(Node::leaf(Kind::Break).with_span(self.span_from(start)));
        }
        if self.eat_kw("continue") {
            self.expect_punct(";")?;
            return Ok(Node::leaf(Kind::Continue).with_span(self.span_from(start)));
        }
        if self.eat_kw("try") {
            let body = self.block()?;
            let mut children = vec![body];
            while self.is_kw("catch") {
                let cstart = self.start();
                self.bump();
                self.expect_punct("(")?;
                let ty = self.type_name()?;
                let name = self.ident()?;
                self.expect_punct(")")?;
                let handler = self.block()?;
                children.push(Node::new(Kind::Catch { ty, name }, vec![handler]).with_span(self.span_from(cstart)));
            }
            if children.len() == 1 {
                return Err(self.unexpected("`catch`"));
            }
            return Ok(Node::new(Kind::Try, children).with_span(self.span_from(start)));
        }
        if self.is_kw("else") || self.is_kw("catch") {
            return Err(self.unexpected("statement"));
        }
        let s = if self.at_local_decl() { self.local_decl()? } else { self.simple_stmt()? };
        self.expect_punct(";")?;
        Ok(s.with_span(self.span_from(start)))
    }

    fn local_decl(&mut self) -> Result<Node, SyntaxError> {
        let start = self.start();
        let ty = self.type_name()?;
        let name = self.ident()?;
        let init = if self.eat_punct("=") { vec![self.expr()?] } else { vec![] };
        Ok(Node::new(Kind::LocalVar { ty, name }, init).with_span(self.span_from(start)))
    }

    /// Assignment, step or expression statement (without the `;`).
    fn simple_stmt(&mut self) -> Result<Node, SyntaxError> {
        let start = self.start();
        let lhs = self.expr()?;
        let assign = match self.peek() {
            Tok::Punct("=") => Some(AssignOp::Set),
            Tok::Punct("+=") => Some(AssignOp::Add),
            Tok::Punct("-=") => Some(AssignOp::Sub),
            Tok::Punct("*=") => Some(AssignOp::Mul),
            Tok::Punct("/=") => Some(AssignOp::Div),
            _ => None,
        };
        if let Some(op) = assign {
            self.bump();
            let rhs = self.expr()?;
            return Ok(Node::new(Kind::Assign { op }, vec![lhs, rhs]).with_span(self.span_from(start)));
        }
        if self.is_punct("++") || self.is_punct("--") {
            let increment = self.is_punct("++");
            self.bump();
            return Ok(Node::new(Kind::Step { increment }, vec![lhs]).with_span(self.span_from(start)));
        }
        Ok(Node::new(Kind::ExprStmt, vec![lhs]).with_span(self.span_from(start)))
    }

    // ---------------------------------------------------------- expressions

    pub(crate) fn expr(&mut self) -> Result<Node, SyntaxError> {
        let start = self.start();
        let cond = self.binary(2)?;
        if self.eat_punct("?") {
            let a = self.expr()?;
            self.expect_punct(":")?;
            let b = self.expr()?;
            return Ok(Node::new(Kind::Conditional, vec![cond, a, b]).with_span(self.span_from(start)));
        }
        Ok(cond)
    }

    fn peek_binop(&self) -> Option<BinOp> {
        match self.peek() {
            Tok::Punct(p) => BinOp::ALL.iter().copied().find(|op| op.symbol() == *p),
            _ => None,
        }
    }

    /// Precedence climbing over binary operators with precedence >= `min`.
    fn binary(&mut self, min: u8) -> Result<Node, SyntaxError> {
        let start = self.start();
        let mut lhs = self.unary()?;
        loop {
            if self.is_kw("instanceof") && min <= 5 {
                self.bump();
                let ty = self.type_name()?;
                lhs = Node::new(Kind::InstanceOf { ty }, vec![lhs]).with_span(self.span_from(start));
                continue;
            }
            let Some(op) = self.peek_binop() else { break };
            let prec = op.precedence();
            if prec < min {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            lhs = Node::binary(op, lhs, rhs).with_span(self.span_from(start));
        }
        Ok(lhs)
    }

    fn at_cast(&self) -> bool {
        if !self.is_punct("(") {
            return false;
        }
        match self.peek_at(1) {
            Tok::Kw("int") | Tok::Kw("float") | Tok::Kw("boolean") => true,
            Tok::Ident(_) => {
                let mut k = 2;
                while matches!(self.peek_at(k), Tok::Punct("[")) && matches!(self.peek_at(k + 1), Tok::Punct("]")) {
                    k += 2;
                }
                if !matches!(self.peek_at(k), Tok::Punct(")")) {
                    return false;
                }
                matches!(
                    self.peek_at(k + 1),
                    Tok::Ident(_)
                        | Tok::Int(_)
                        | Tok::Float(_)
                        | Tok::Str(_)
                        | Tok::Punct("(")
                        | Tok::Punct("!")
                        | Tok::Kw("this")
                        | Tok::Kw("new")
                        | Tok::Kw("super")
                        | Tok::Kw("null")
                        | Tok::Kw("true")
                        | Tok::Kw("false")
                )
            }
            _ => false,
        }
    }

    fn unary(&mut self) -> Result<Node, SyntaxError> {
        let start = self.start();
        if self.eat_punct("!") {
            let e = self.unary()?;
            return Ok(Node::new(Kind::Unary { op: UnOp::Not }, vec![e]).with_span(self.span_from(start)));
        }
        if self.eat_punct("-") {
            let e = self.unary()?;
            return Ok(Node::new(Kind::Unary { op: UnOp::Neg }, vec![e]).with_span(self.span_from(start)));
        }
        if self.at_cast() {
            self.bump();
            let ty = self.type_name()?;
            self.expect_punct(")")?;
            let e = self.unary()?;
            return Ok(Node::new(Kind::Cast { ty }, vec![e]).with_span(self.span_from(start)));
        }
        self.postfix()
    }

    fn args(&mut self) -> Result<Vec<Node>, SyntaxError> {
        self.expect_punct("(")?;
        let mut out = Vec::new();
        if !self.is_punct(")") {
            loop {
                out.push(self.expr()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        Ok(out)
    }

    fn postfix(&mut self) -> Result<Node, SyntaxError> {
        let start = self.start();
        let mut e = self.primary()?;
        loop {
            if self.eat_punct(".") {
                let name = self.ident()?;
                if self.is_punct("(") {
                    let mut children = vec![e];
                    children.extend(self.args()?);
                    e = Node::new(Kind::MethodCall { name }, children).with_span(self.span_from(start));
                } else {
                    e = Node::new(Kind::Select { name }, vec![e]).with_span(self.span_from(start));
                }
            } else if self.is_punct("[") {
                self.bump();
                let idx = self.expr()?;
                self.expect_punct("]")?;
                e = Node::new(Kind::Index, vec![e, idx]).with_span(self.span_from(start));
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Node, SyntaxError> {
        let start = self.start();
        let node = match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Node::lit(Lit::Int(v))
            }
            Tok::Float(v) => {
                self.bump();
                Node::lit(Lit::Float(v))
            }
            Tok::Str(s) => {
                self.bump();
                Node::lit(Lit::Str(s))
            }
            Tok::Kw("true") => {
                self.bump();
                Node::lit(Lit::Bool(true))
            }
            Tok::Kw("false") => {
                self.bump();
                Node::lit(Lit::Bool(false))
            }
            Tok::Kw("null") => {
                self.bump();
                Node::lit(Lit::Null)
            }
            Tok::Kw("this") => {
                self.bump();
                Node::leaf(Kind::This)
            }
            Tok::Kw("assert") => {
                self.bump();
                let args = self.args()?;
                Node::new(Kind::Call { name: "assert".to_string() }, args)
            }
            Tok::Kw("super") => {
                self.bump();
                self.expect_punct(".")?;
                let name = self.ident()?;
                let args = self.args()?;
                Node::new(Kind::SuperCall { name }, args)
            }
            Tok::Kw("new") => {
                self.bump();
                let base = match self.peek().clone() {
                    Tok::Kw("int") => LangType::Int,
                    Tok::Kw("float") => LangType::Float,
                    Tok::Kw("boolean") => LangType::Boolean,
                    Tok::Ident(s) => LangType::from_source(&s),
                    _ => return Err(self.unexpected("type after `new`")),
                };
                self.bump();
                if self.is_punct("(") {
                    let class = match &base {
                        LangType::Class(c) => c.clone(),
                        LangType::Str => "String".to_string(),
                        _ => return Err(self.error("cannot instantiate a primitive type")),
                    };
                    let args = self.args()?;
                    Node::new(Kind::New { class }, args)
                } else if self.is_punct("[") && matches!(self.peek_at(1), Tok::Punct("]")) {
                    self.bump();
                    self.bump();
                    let mut elem = base;
                    while self.is_punct("[") && matches!(self.peek_at(1), Tok::Punct("]")) {
                        self.bump();
                        self.bump();
                        elem = LangType::array_of(elem);
                    }
                    self.expect_punct("{")?;
                    let mut elems = Vec::new();
                    if !self.is_punct("}") {
                        loop {
                            elems.push(self.expr()?);
                            if !self.eat_punct(",") {
                                break;
                            }
                        }
                    }
                    self.expect_punct("}")?;
                    Node::new(Kind::ArrayLit { elem }, elems)
                } else if self.eat_punct("[") {
                    let size = self.expr()?;
                    self.expect_punct("]")?;
                    if self.is_punct("[") {
                        return Err(self.error("unsupported construct `multi-dimensional array creation`"));
                    }
                    Node::new(Kind::NewArray { elem: base }, vec![size])
                } else {
                    return Err(self.unexpected("`(` or `[`"));
                }
            }
            Tok::Ident(name) => {
                self.bump();
                if self.is_punct("(") {
                    let args = self.args()?;
                    Node::new(Kind::Call { name }, args)
                } else {
                    Node::name(&name)
                }
            }
            Tok::Punct("(") => {
                self.bump();
                let inner = self.expr()?;
                self.expect_punct(")")?;
                Node::new(Kind::Paren, vec![inner])
            }
            _ => return Err(self.unexpected("expression")),
        };
        Ok(node.with_span(self.span_from(start)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_unit() {
        let u = parse("").unwrap();
        assert_eq!(u.kind, Kind::CompilationUnit);
        assert!(u.children.is_empty());
    }

    #[test]
    fn integer_division_declaration_shape() {
        let s = parse_stmt("int x = 1 / 2;").unwrap();
        assert_eq!(s.kind, Kind::LocalVar { ty: LangType::Int, name: "x".into() });
        let init = &s.children[0];
        assert_eq!(init.kind, Kind::Binary { op: BinOp::Div });
        assert_eq!(init.children, vec![Node::int(1), Node::int(2)]);
    }

    #[test]
    fn missing_initializer_is_error_at_semicolon() {
        let err = parse_stmt("int x = ;").unwrap_err();
        assert_eq!((err.line, err.column), (1, 9));
        assert!(err.message.contains("expected expression"));
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("a + b * c - d").unwrap();
        // (a + (b * c)) - d
        assert_eq!(e.kind, Kind::Binary { op: BinOp::Sub });
        assert_eq!(e.children[0].kind, Kind::Binary { op: BinOp::Add });
        assert_eq!(e.children[0].children[1].kind, Kind::Binary { op: BinOp::Mul });
        let e = parse_expr("a || b && c == d").unwrap();
        assert_eq!(e.kind, Kind::Binary { op: BinOp::Or });
        assert_eq!(e.children[1].kind, Kind::Binary { op: BinOp::And });
    }

    #[test]
    fn casts_versus_parenthesized_names() {
        let e = parse_expr("(Rect) s").unwrap();
        assert_eq!(e.kind, Kind::Cast { ty: LangType::class("Rect") });
        let e = parse_expr("(a) - b").unwrap();
        assert_eq!(e.kind, Kind::Binary { op: BinOp::Sub });
        let e = parse_expr("(float) a / b").unwrap();
        assert_eq!(e.kind, Kind::Binary { op: BinOp::Div });
        assert_eq!(e.children[0].kind, Kind::Cast { ty: LangType::Float });
    }

    #[test]
    fn class_members() {
        let src = "class M extends B { int x = 1; M(int a) { x = a; } Object clone() { return new M(x); } }";
        let u = parse(src).unwrap();
        let c = &u.children[0];
        assert_eq!(c.kind, Kind::Class { name: "M".into(), parent: Some("B".into()) });
        assert!(matches!(c.children[0].kind, Kind::Field { .. }));
        assert!(matches!(c.children[1].kind, Kind::Constructor { .. }));
        assert!(matches!(c.children[2].kind, Kind::Method { .. }));
    }

    #[test]
    fn statements() {
        let s = parse_stmt("for (int i = 0; i < n; i++) { s += a[i]; }").unwrap();
        assert_eq!(s.kind, Kind::For);
        assert_eq!(s.children[2].kind, Kind::Step { increment: true });
        let s = parse_stmt("try { f(); } catch (Exception e) { }").unwrap();
        assert_eq!(s.kind, Kind::Try);
        let s = parse_stmt("x = c ? 1 : 2;").unwrap();
        assert_eq!(s.children[1].kind, Kind::Conditional);
        let s = parse_stmt("if (o instanceof Rect) r = (Rect) o; else r = null;").unwrap();
        assert_eq!(s.children.len(), 3);
    }

    #[test]
    fn spans_are_contained() {
        let src = "class A { int f(int a) { return a + 1; } }";
        let u = parse(src).unwrap();
        u.walk(&mut |n| {
            assert!(n.span.end <= src.len());
            for c in &n.children {
                assert!(n.span.contains(&c.span), "{:?} !⊇ {:?}", n.kind, c.kind);
            }
        });
    }
}
