//! Deterministic pretty printer. Parenthesizes wherever the tree shape
//! requires it, so printed text always re-parses to the same structure.

use crate::ast::{Kind, Lit, Node, UnOp};

const INDENT: &str = "    ";

const PREC_CONDITIONAL: u8 = 1;
const PREC_INSTANCEOF: u8 = 5;
const PREC_UNARY: u8 = 8;
const PREC_POSTFIX: u8 = 9;
const PREC_PRIMARY: u8 = 10;

pub fn pretty_print(ast: &Node) -> String {
    let mut p = Printer { out: String::new() };
    match &ast.kind {
        Kind::CompilationUnit => {
            for (i, c) in ast.children.iter().enumerate() {
                if i > 0 {
                    p.out.push('\n');
                }
                p.decl(c, 0);
            }
        }
        _ => p.any(ast, 0),
    }
    p.out
}

/// Single-line rendering of any node (statements are printed without
/// trailing newline).
pub fn print_node(node: &Node) -> String {
    if node.is_expression() {
        return expr_string(node);
    }
    let s = pretty_print(node);
    s.trim_end().to_string()
}

pub fn expr_string(e: &Node) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

struct Printer {
    out: String,
}

impl Printer {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..depth {
            self.out.push_str(INDENT);
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn any(&mut self, n: &Node, depth: usize) {
        if n.is_expression() {
            let e = expr_string(n);
            self.line(depth, &e);
        } else if n.is_statement() {
            self.stmt(n, depth);
        } else {
            self.decl(n, depth);
        }
    }

    fn decl(&mut self, n: &Node, depth: usize) {
        match &n.kind {
            Kind::Class { name, parent } => {
                let head = match parent {
                    Some(p) => format!("class {name} extends {p} {{"),
                    None => format!("class {name} {{"),
                };
                self.line(depth, &head);
                for m in &n.children {
                    self.decl(m, depth + 1);
                }
                self.line(depth, "}");
            }
            Kind::Field { ty, name } => match n.children.first() {
                Some(init) => self.line(depth, &format!("{ty} {name} = {};", expr_string(init))),
                None => self.line(depth, &format!("{ty} {name};")),
            },
            Kind::Method { ret, name } => {
                let head = format!("{ret} {name}({})", params(n));
                self.body(&head, n.children.last(), depth);
            }
            Kind::Constructor { name } => {
                let head = format!("{name}({})", params(n));
                self.body(&head, n.children.last(), depth);
            }
            Kind::Param { ty, name } => self.line(depth, &format!("{ty} {name}")),
            Kind::CompilationUnit => {
                for c in &n.children {
                    self.decl(c, depth);
                }
            }
            _ => self.any(n, depth),
        }
    }

    fn body(&mut self, head: &str, block: Option<&Node>, depth: usize) {
        match block {
            Some(b) if b.kind == Kind::Block => {
                self.line(depth, &format!("{head} {{"));
                for s in &b.children {
                    self.stmt(s, depth + 1);
                }
                self.line(depth, "}");
            }
            _ => self.line(depth, &format!("{head} {{ }}")),
        }
    }

    /// Print `stmt` as the body of a compound statement whose header is
    /// `head`; a block body opens on the header line.
    fn nested(&mut self, head: &str, body: &Node, depth: usize) -> bool {
        if body.kind == Kind::Block {
            self.line(depth, &format!("{head} {{"));
            for s in &body.children {
                self.stmt(s, depth + 1);
            }
            true
        } else {
            self.line(depth, head);
            self.stmt(body, depth + 1);
            false
        }
    }

    fn stmt(&mut self, n: &Node, depth: usize) {
        match &n.kind {
            Kind::Block => {
                self.line(depth, "{");
                for s in &n.children {
                    self.stmt(s, depth + 1);
                }
                self.line(depth, "}");
            }
            Kind::If => {
                let head = format!("if ({})", expr_string(&n.children[0]));
                let braced = self.nested(&head, &n.children[1], depth);
                match n.children.get(2) {
                    None => {
                        if braced {
                            self.line(depth, "}");
                        }
                    }
                    Some(els) => {
                        let prefix = if braced { "} else" } else { "else" };
                        if els.kind == Kind::If {
                            // `else if` chains are printed flat.
                            let mut sub = Printer { out: String::new() };
                            sub.stmt(els, depth);
                            let text = sub.out;
                            let trimmed = text.trim_start();
                            for _ in 0..depth {
                                self.out.push_str(INDENT);
                            }
                            self.out.push_str(prefix);
                            self.out.push(' ');
                            self.out.push_str(trimmed);
                        } else {
                            let braced_else = self.nested(prefix, els, depth);
                            if braced_else {
                                self.line(depth, "}");
                            }
                        }
                    }
                }
            }
            Kind::While => {
                let head = format!("while ({})", expr_string(&n.children[0]));
                if self.nested(&head, &n.children[1], depth) {
                    self.line(depth, "}");
                }
            }
            Kind::For => {
                let init = header_part(&n.children[0]);
                let cond = match n.children[1].kind {
                    Kind::Empty => String::new(),
                    _ => expr_string(&n.children[1]),
                };
                let update = header_part(&n.children[2]);
                let head = format!("for ({init}; {cond}; {update})");
                if self.nested(&head, &n.children[3], depth) {
                    self.line(depth, "}");
                }
            }
            Kind::Try => {
                self.line(depth, "try {");
                for s in &n.children[0].children {
                    self.stmt(s, depth + 1);
                }
                for c in &n.children[1..] {
                    if let Kind::Catch { ty, name } = &c.kind {
                        self.line(depth, &format!("}} catch ({ty} {name}) {{"));
                        for s in &c.children[0].children {
                            self.stmt(s, depth + 1);
                        }
                    }
                }
                self.line(depth, "}");
            }
            Kind::Empty => self.line(depth, ";"),
            Kind::Hole => self.line(depth, "/* hole */"),
            _ => {
                let s = simple_stmt(n);
                self.line(depth, &format!("{s};"));
            }
        }
    }
}

fn params(n: &Node) -> String {
    n.children
        .iter()
        .filter_map(|c| match &c.kind {
            Kind::Param { ty, name } => Some(format!("{ty} {name}")),
            _ => None,
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn header_part(n: &Node) -> String {
    match n.kind {
        Kind::Empty => String::new(),
        _ => simple_stmt(n),
    }
}

/// Statement text without the terminating `;`.
fn simple_stmt(n: &Node) -> String {
    match &n.kind {
        Kind::LocalVar { ty, name } => match n.children.first() {
            Some(init) => format!("{ty} {name} = {}", expr_string(init)),
            None => format!("{ty} {name}"),
        },
        Kind::ExprStmt => expr_string(&n.children[0]),
        Kind::Assign { op } => format!("{} {} {}", expr_string(&n.children[0]), op.symbol(), expr_string(&n.children[1])),
        Kind::Step { increment } => {
            format!("{}{}", expr_string(&n.children[0]), if *increment { "++" } else { "--" })
        }
        Kind::Return => match n.children.first() {
            Some(v) => format!("return {}", expr_string(v)),
            None => "return".to_string(),
        },
        Kind::Break => "break".to_string(),
        Kind::Continue => "continue".to_string(),
        other => format!("/* {} */", other.label()),
    }
}

pub(crate) fn expr_precedence(e: &Node) -> u8 {
    match &e.kind {
        Kind::Conditional => PREC_CONDITIONAL,
        Kind::Binary { op } => op.precedence(),
        Kind::InstanceOf { .. } => PREC_INSTANCEOF,
        Kind::Unary { .. } | Kind::Cast { .. } => PREC_UNARY,
        Kind::Select { .. } | Kind::MethodCall { .. } | Kind::Index => PREC_POSTFIX,
        Kind::Literal(Lit::Int(v)) if *v < 0 => PREC_UNARY,
        Kind::Literal(Lit::Float(v)) if v.is_sign_negative() => PREC_UNARY,
        _ => PREC_PRIMARY,
    }
}

fn write_child(out: &mut String, e: &Node, min: u8) {
    if expr_precedence(e) < min {
        out.push('(');
        write_expr(out, e, 0);
        out.push(')');
    } else {
        write_expr(out, e, min);
    }
}

fn write_args(out: &mut String, args: &[Node]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a, 0);
    }
    out.push(')');
}

pub fn format_float(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "1e999".to_string() } else { "-1e999".to_string() };
    }
    if v.is_nan() {
        return "(0.0 / 0.0)".to_string();
    }
    let s = format!("{v:?}");
    if s.contains('.') || s.contains('e') {
        s
    } else {
        format!("{s}.0")
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn write_expr(out: &mut String, e: &Node, _ctx: u8) {
    match &e.kind {
        Kind::Literal(l) => match l {
            Lit::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Lit::Int(v) => out.push_str(&v.to_string()),
            Lit::Float(v) => out.push_str(&format_float(*v)),
            Lit::Str(s) => out.push_str(&escape(s)),
            Lit::Null => out.push_str("null"),
        },
        Kind::Name(n) => out.push_str(n),
        Kind::This => out.push_str("this"),
        Kind::Select { name } => {
            write_child(out, &e.children[0], PREC_POSTFIX);
            out.push('.');
            out.push_str(name);
        }
        Kind::Call { name } => {
            out.push_str(name);
            write_args(out, &e.children);
        }
        Kind::MethodCall { name } => {
            write_child(out, &e.children[0], PREC_POSTFIX);
            out.push('.');
            out.push_str(name);
            write_args(out, &e.children[1..]);
        }
        Kind::SuperCall { name } => {
            out.push_str("super.");
            out.push_str(name);
            write_args(out, &e.children);
        }
        Kind::New { class } => {
            out.push_str("new ");
            out.push_str(class);
            write_args(out, &e.children);
        }
        Kind::NewArray { elem } => {
            out.push_str(&format!("new {elem}["));
            write_expr(out, &e.children[0], 0);
            out.push(']');
        }
        Kind::ArrayLit { elem } => {
            out.push_str(&format!("new {elem}[]{{"));
            for (i, c) in e.children.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, c, 0);
            }
            out.push('}');
        }
        Kind::Index => {
            write_child(out, &e.children[0], PREC_POSTFIX);
            out.push('[');
            write_expr(out, &e.children[1], 0);
            out.push(']');
        }
        Kind::Cast { ty } => {
            out.push_str(&format!("({ty}) "));
            write_child(out, &e.children[0], PREC_UNARY);
        }
        Kind::InstanceOf { ty } => {
            write_child(out, &e.children[0], PREC_INSTANCEOF);
            out.push_str(&format!(" instanceof {ty}"));
        }
        Kind::Binary { op } => {
            let p = op.precedence();
            write_child(out, &e.children[0], p);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_child(out, &e.children[1], p + 1);
        }
        Kind::Unary { op } => {
            out.push_str(op.symbol());
            let mut inner = String::new();
            write_child(&mut inner, &e.children[0], PREC_UNARY);
            // `- -x` must not lex as `--x`
            if *op == UnOp::Neg && inner.starts_with('-') {
                out.push(' ');
            }
            out.push_str(&inner);
        }
        Kind::Conditional => {
            write_child(out, &e.children[0], PREC_CONDITIONAL + 1);
            out.push_str(" ? ");
            write_expr(out, &e.children[1], 0);
            out.push_str(" : ");
            write_expr(out, &e.children[2], 0);
        }
        Kind::Paren => {
            out.push('(');
            write_expr(out, &e.children[0], 0);
            out.push(')');
        }
        Kind::Hole => out.push_str("/* hole */"),
        other => out.push_str(&format!("/* {} */", other.label())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::{parse, parse_expr};

    #[test]
    fn adds_required_parentheses() {
        use crate::ast::BinOp;
        let e = Node::binary(
            BinOp::Mul,
            Node::binary(BinOp::Add, Node::name("a"), Node::name("b")),
            Node::name("c"),
        );
        assert_eq!(expr_string(&e), "(a + b) * c");
        let e = Node::binary(
            BinOp::Sub,
            Node::name("a"),
            Node::binary(BinOp::Sub, Node::name("b"), Node::name("c")),
        );
        assert_eq!(expr_string(&e), "a - (b - c)");
        let neg = Node::new(Kind::Unary { op: UnOp::Neg }, vec![Node::int(-1)]);
        let s = expr_string(&neg);
        assert_eq!(s, "- -1");
        assert_eq!(parse_expr(&s).unwrap(), neg);
    }

    #[test]
    fn round_trip_sample() {
        let src = r#"
class Shape {
    float area() { return 0.0; }
}
class Rect extends Shape {
    float w;
    float h = 2.5;
    Rect(float w) { this.w = w; }
    float area() {
        if (w > 0.0 && !(h < 1.0)) { return w * h; } else if (w == 0.0) return 0.0; else { return -w; }
    }
    String tag(int[] xs, Shape s) {
        String out = "n=\"" + xs.length;
        for (int i = 0; i < xs.length; i++) out += xs[i];
        while (s instanceof Rect) { s = null; }
        try { int q = 1 / 0; } catch (Exception e) { out = out + "!"; }
        return out.length() > 3 ? out : new String();
    }
}
"#;
        let a = parse(src).unwrap();
        let printed = pretty_print(&a);
        let b = parse(&printed).unwrap();
        assert_eq!(a, b, "printed:\n{printed}");
        assert_eq!(pretty_print(&b), printed);
    }
}
